use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Distribution, ScmError};

/// A value a condition can test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Operand {
    /// `<node>.<param>` of a parent node.
    Param { node: String, param: String },
    /// `eps(<name>)`, an exogenous draw of the current node.
    Eps(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
        }
    }

    pub fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Condition {
    Compare { lhs: Operand, op: CmpOp, rhs: f64 },
    And(Box<Condition>, Box<Condition>),
    Or(Box<Condition>, Box<Condition>),
}

/// Right-hand side of a structural equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Expr {
    Const(f64),
    /// `~ dist(...)`: a fresh draw ignoring the parents.
    Draw(Distribution),
    /// `scale * eps(name) + offset`.
    Affine {
        scale: f64,
        eps: String,
        offset: f64,
    },
    Branch {
        cond: Condition,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
}

/// A structural equation for one parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mechanism {
    pub expr: Expr,
}

/// Read-only view of what a mechanism may consult while evaluating.
pub(crate) struct EvalScope<'a> {
    pub parents: &'a BTreeMap<String, BTreeMap<String, f64>>,
    pub eps: &'a BTreeMap<String, f64>,
    /// Added to half-normal draws.
    pub half_normal_offset: f64,
}

impl Condition {
    pub fn compare(lhs: Operand, op: CmpOp, rhs: f64) -> Self {
        Condition::Compare { lhs, op, rhs }
    }

    fn visit_operands<'a>(&'a self, f: &mut dyn FnMut(&'a Operand)) {
        match self {
            Condition::Compare { lhs, .. } => f(lhs),
            Condition::And(a, b) | Condition::Or(a, b) => {
                a.visit_operands(f);
                b.visit_operands(f);
            }
        }
    }

    fn eval(&self, scope: &EvalScope<'_>) -> Result<bool, String> {
        match self {
            Condition::Compare { lhs, op, rhs } => {
                let v = match lhs {
                    Operand::Param { node, param } => scope
                        .parents
                        .get(node)
                        .and_then(|m| m.get(param))
                        .copied()
                        .ok_or_else(|| format!("{node}.{param} has not been sampled"))?,
                    Operand::Eps(name) => *scope
                        .eps
                        .get(name)
                        .ok_or_else(|| format!("eps({name}) is not declared"))?,
                };
                if v.is_nan() {
                    return Err("comparison operand is NaN".into());
                }
                Ok(op.holds(v, *rhs))
            }
            Condition::And(a, b) => Ok(a.eval(scope)? && b.eval(scope)?),
            Condition::Or(a, b) => Ok(a.eval(scope)? || b.eval(scope)?),
        }
    }
}

impl Expr {
    pub(crate) fn eval<R: Rng + ?Sized>(
        &self,
        scope: &EvalScope<'_>,
        rng: &mut R,
    ) -> Result<f64, String> {
        match self {
            Expr::Const(v) => Ok(*v),
            Expr::Draw(d) => Ok(d.sample_offset(rng, scope.half_normal_offset)),
            Expr::Affine { scale, eps, offset } => {
                let e = scope
                    .eps
                    .get(eps)
                    .ok_or_else(|| format!("eps({eps}) is not declared"))?;
                Ok(scale * e + offset)
            }
            Expr::Branch {
                cond,
                then,
                otherwise,
            } => {
                if cond.eval(scope)? {
                    then.eval(scope, rng)
                } else {
                    otherwise.eval(scope, rng)
                }
            }
        }
    }

    /// Hull of the values this expression can produce.
    pub fn support(
        &self,
        eps: &BTreeMap<String, Distribution>,
        half_normal_offset: f64,
    ) -> (f64, f64) {
        match self {
            Expr::Const(v) => (*v, *v),
            Expr::Draw(d) => d.support_offset(half_normal_offset),
            Expr::Affine {
                scale,
                eps: name,
                offset,
            } => {
                let (lo, hi) = eps
                    .get(name)
                    .map(|d| d.support())
                    .unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
                if *scale == 0.0 {
                    return (*offset, *offset);
                }
                let a = scale * lo + offset;
                let b = scale * hi + offset;
                (a.min(b), a.max(b))
            }
            Expr::Branch {
                then, otherwise, ..
            } => {
                let (a, b) = then.support(eps, half_normal_offset);
                let (c, d) = otherwise.support(eps, half_normal_offset);
                (a.min(c), b.max(d))
            }
        }
    }

    fn visit(&self, on_operand: &mut dyn FnMut(&Operand), on_dist: &mut dyn FnMut(&Distribution)) {
        match self {
            Expr::Const(_) => {}
            Expr::Draw(d) => on_dist(d),
            Expr::Affine { eps, .. } => on_operand(&Operand::Eps(eps.clone())),
            Expr::Branch {
                cond,
                then,
                otherwise,
            } => {
                cond.visit_operands(&mut |o| on_operand(o));
                then.visit(on_operand, on_dist);
                otherwise.visit(on_operand, on_dist);
            }
        }
    }
}

impl Mechanism {
    pub fn new(expr: Expr) -> Self {
        Mechanism { expr }
    }

    pub fn constant(v: f64) -> Self {
        Mechanism {
            expr: Expr::Const(v),
        }
    }

    pub fn draw(d: Distribution) -> Self {
        Mechanism {
            expr: Expr::Draw(d),
        }
    }

    /// Every operand referenced, in syntax order (duplicates kept).
    pub fn operands(&self) -> Vec<Operand> {
        let mut out = Vec::new();
        self.expr.visit(&mut |o| out.push(o.clone()), &mut |_| {});
        out
    }

    pub(crate) fn validate_dists(&self) -> Result<(), ScmError> {
        let mut res = Ok(());
        self.expr.visit(&mut |_| {}, &mut |d| {
            if res.is_ok() {
                res = d.validate();
            }
        });
        res
    }

    /// True if any draw in the expression is half-normal.
    pub fn draws_half_normal(&self) -> bool {
        let mut hit = false;
        self.expr
            .visit(&mut |_| {}, &mut |d| hit |= d.contains_half_normal());
        hit
    }

    /// Parent nodes whose parameters are read.
    pub fn parent_refs(&self) -> Vec<(String, String)> {
        self.operands()
            .into_iter()
            .filter_map(|o| match o {
                Operand::Param { node, param } => Some((node, param)),
                Operand::Eps(_) => None,
            })
            .collect()
    }
}
