use std::collections::{BTreeMap, BTreeSet};

use super::lexer::{tokenize, Tok, Token};
use super::{DslError, Pos, SpanIndex, SpecDocument, FORMAT_VERSION};
use crate::ops::OperatorId;
use crate::scm::{
    CausalGraph, CmpOp, Condition, CorruptionNode, Distribution, Expr, GraphOptions, Mechanism,
    Operand, RenderFrom, ScmError,
};

/// Parse a model description into a validated graph.
pub fn parse_spec(text: &str) -> Result<SpecDocument, DslError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, at: 0 };
    let raw = p.document()?;
    let (graph, spans) = build(raw)?;
    Ok(SpecDocument {
        source_text: text.to_string(),
        graph,
        version: FORMAT_VERSION,
        spans,
    })
}

/// Parse a single distribution, e.g. `uniform(0, 0.1)`.
pub fn parse_distribution(text: &str) -> Result<Distribution, DslError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, at: 0 };
    let (d, _) = p.dist()?;
    p.expect_eof()?;
    Ok(d)
}

/// Parameter name, expression, position and the operands it references.
type ParamDecl = (String, Expr, Pos, Vec<(Operand, Pos)>);

struct RawNode {
    name: String,
    pos: Pos,
    parents: Vec<(String, Pos)>,
    render_from: Option<(RenderFrom, Pos)>,
    op: Option<(String, Pos)>,
    eps: Vec<(String, Distribution, Pos)>,
    params: Vec<ParamDecl>,
}

struct RawDoc {
    options: GraphOptions,
    nodes: Vec<RawNode>,
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

type PResult<T> = Result<T, DslError>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.at.min(self.tokens.len() - 1)]
    }

    fn bump(&mut self) -> Token {
        let t = self.peek().clone();
        if self.at < self.tokens.len() - 1 {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> PResult<T> {
        let t = self.peek();
        Err(DslError::Syntax {
            pos: t.pos,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.tok.to_string(),
        })
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(&self.peek().tok, Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(x) if x == s)
    }

    fn sym(&mut self, s: &str) -> PResult<Pos> {
        if self.is_sym(s) {
            Ok(self.bump().pos)
        } else {
            self.fail(&[&format!("`{s}`")])
        }
    }

    fn kw(&mut self, s: &str) -> PResult<Pos> {
        if self.is_kw(s) {
            Ok(self.bump().pos)
        } else {
            self.fail(&[&format!("`{s}`")])
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Pos)> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                Ok((s, self.bump().pos))
            }
            _ => self.fail(&[what]),
        }
    }

    fn number(&mut self) -> PResult<(f64, Pos)> {
        let neg = if self.is_sym("-") {
            Some(self.bump().pos)
        } else {
            None
        };
        match self.peek().tok {
            Tok::Number(v) => {
                let pos = self.bump().pos;
                Ok(match neg {
                    Some(p) => (-v, p),
                    None => (v, pos),
                })
            }
            _ => self.fail(&["number"]),
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        if matches!(self.peek().tok, Tok::Eof) {
            Ok(())
        } else {
            self.fail(&["end of input"])
        }
    }

    fn document(&mut self) -> PResult<RawDoc> {
        let mut options = GraphOptions::default();
        let mut nodes = Vec::new();
        loop {
            if self.is_kw("version") {
                self.bump();
                let (v, pos) = self.number()?;
                if v != f64::from(FORMAT_VERSION) {
                    return Err(DslError::Syntax {
                        pos,
                        expected: vec![format!("version {FORMAT_VERSION}")],
                        found: format!("version {v}"),
                    });
                }
                self.sym(";")?;
            } else if self.is_kw("option") {
                self.bump();
                let (key, _) = self.ident("option name")?;
                if key != "halfnormal_offset" {
                    return self.fail_at_prev(&["`halfnormal_offset`"], &key);
                }
                self.sym("=")?;
                let (val, _) = self.ident("`identity` or `none`")?;
                options.half_normal_offset = match val.as_str() {
                    "identity" => true,
                    "none" => false,
                    _ => return self.fail_at_prev(&["`identity`", "`none`"], &val),
                };
                self.sym(";")?;
            } else if self.is_kw("node") {
                nodes.push(self.node()?);
            } else if matches!(self.peek().tok, Tok::Eof) {
                break;
            } else {
                return self.fail(&["`node`", "`version`", "`option`", "end of input"]);
            }
        }
        Ok(RawDoc { options, nodes })
    }

    fn fail_at_prev<T>(&self, expected: &[&str], found: &str) -> PResult<T> {
        let pos = self.tokens[self.at.saturating_sub(1)].pos;
        Err(DslError::Syntax {
            pos,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: format!("`{found}`"),
        })
    }

    fn node(&mut self) -> PResult<RawNode> {
        self.kw("node")?;
        let (name, pos) = self.ident("node name")?;
        let mut node = RawNode {
            name,
            pos,
            parents: Vec::new(),
            render_from: None,
            op: None,
            eps: Vec::new(),
            params: Vec::new(),
        };
        if self.is_kw("after") {
            self.bump();
            node.parents.push(self.ident("parent name")?);
            while self.is_sym(",") {
                self.bump();
                node.parents.push(self.ident("parent name")?);
            }
        }
        if self.is_kw("render_from") {
            self.bump();
            let (v, p) = self.ident("`clean` or `parent`")?;
            let r = match v.as_str() {
                "clean" => RenderFrom::Clean,
                "parent" => RenderFrom::Parent,
                _ => return self.fail_at_prev(&["`clean`", "`parent`"], &v),
            };
            node.render_from = Some((r, p));
        }
        self.sym("{")?;
        while !self.is_sym("}") {
            if self.is_kw("op") {
                let pos = self.bump().pos;
                if node.op.is_some() {
                    return Err(DslError::Syntax {
                        pos,
                        expected: vec!["parameter".into()],
                        found: "second `op`".into(),
                    });
                }
                self.sym("=")?;
                node.op = Some(self.ident("operator name")?);
                self.sym(";")?;
            } else if self.is_kw("eps") {
                self.bump();
                let (n, p) = self.ident("eps name")?;
                self.sym("~")?;
                let (d, _) = self.dist()?;
                self.sym(";")?;
                node.eps.push((n, d, p));
            } else if let Tok::Ident(_) = self.peek().tok {
                let (n, p) = self.ident("parameter name")?;
                self.sym("=")?;
                let mut refs = Vec::new();
                let e = self.expr(&mut refs)?;
                self.sym(";")?;
                node.params.push((n, e, p, refs));
            } else {
                return self.fail(&["`op`", "`eps`", "parameter name", "`}`"]);
            }
        }
        self.sym("}")?;
        Ok(node)
    }

    fn expr(&mut self, refs: &mut Vec<(Operand, Pos)>) -> PResult<Expr> {
        if self.is_kw("if") {
            self.bump();
            let cond = self.cond(refs)?;
            self.kw("then")?;
            let then = self.expr(refs)?;
            self.kw("else")?;
            let otherwise = self.expr(refs)?;
            return Ok(Expr::Branch {
                cond,
                then: Box::new(then),
                otherwise: Box::new(otherwise),
            });
        }
        if self.is_sym("~") {
            self.bump();
            return Ok(Expr::Draw(self.dist()?.0));
        }
        if self.is_sym("(") {
            self.bump();
            let e = self.expr(refs)?;
            self.sym(")")?;
            return Ok(e);
        }
        // affine: [num '*'] eps(name) [(+|-) num]  |  num
        let scale = if self.is_kw("eps") {
            1.0
        } else {
            let (v, _) = match self.number() {
                Ok(v) => v,
                Err(_) => return self.fail(&["`if`", "`~`", "`(`", "number", "`eps`"]),
            };
            if !self.is_sym("*") {
                return Ok(Expr::Const(v));
            }
            self.bump();
            v
        };
        let eps_pos = self.kw("eps")?;
        self.sym("(")?;
        let (name, _) = self.ident("eps name")?;
        self.sym(")")?;
        refs.push((Operand::Eps(name.clone()), eps_pos));
        let offset = if self.is_sym("+") {
            self.bump();
            self.number()?.0
        } else if self.is_sym("-") {
            self.bump();
            -self.number()?.0
        } else {
            0.0
        };
        Ok(Expr::Affine {
            scale,
            eps: name,
            offset,
        })
    }

    fn cond(&mut self, refs: &mut Vec<(Operand, Pos)>) -> PResult<Condition> {
        let mut lhs = self.conj(refs)?;
        while self.is_kw("or") {
            self.bump();
            let rhs = self.conj(refs)?;
            lhs = Condition::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn conj(&mut self, refs: &mut Vec<(Operand, Pos)>) -> PResult<Condition> {
        let mut lhs = self.atom(refs)?;
        while self.is_kw("and") {
            self.bump();
            let rhs = self.atom(refs)?;
            lhs = Condition::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn atom(&mut self, refs: &mut Vec<(Operand, Pos)>) -> PResult<Condition> {
        if self.is_sym("(") {
            self.bump();
            let c = self.cond(refs)?;
            self.sym(")")?;
            return Ok(c);
        }
        let (operand, pos) = if self.is_kw("eps") {
            let pos = self.bump().pos;
            self.sym("(")?;
            let (n, _) = self.ident("eps name")?;
            self.sym(")")?;
            (Operand::Eps(n), pos)
        } else {
            let (node, pos) = match self.ident("") {
                Ok(v) => v,
                Err(_) => return self.fail(&["`(`", "`eps`", "<node>.<param>"]),
            };
            self.sym(".")?;
            let (param, _) = self.ident("parameter name")?;
            (Operand::Param { node, param }, pos)
        };
        refs.push((operand.clone(), pos));
        let op = match &self.peek().tok {
            Tok::Sym("<") => CmpOp::Lt,
            Tok::Sym("<=") => CmpOp::Le,
            Tok::Sym(">") => CmpOp::Gt,
            Tok::Sym(">=") => CmpOp::Ge,
            Tok::Sym("==") => CmpOp::Eq,
            Tok::Sym("!=") => CmpOp::Ne,
            _ => return self.fail(&["`<`", "`<=`", "`>`", "`>=`", "`==`", "`!=`"]),
        };
        self.bump();
        let (rhs, _) = self.number()?;
        Ok(Condition::compare(operand, op, rhs))
    }

    fn dist(&mut self) -> PResult<(Distribution, Pos)> {
        let (kind, pos) = match self.ident("") {
            Ok(v) => v,
            Err(_) => return self.fail(&["distribution"]),
        };
        let invalid = |e: ScmError| DslError::InvalidDistribution {
            pos,
            detail: e.to_string(),
        };
        self.sym("(")?;
        let d = match kind.as_str() {
            "uniform" => {
                let (lo, _) = self.number()?;
                self.sym(",")?;
                let (hi, _) = self.number()?;
                Distribution::uniform(lo, hi).map_err(invalid)?
            }
            "halfnormal" => Distribution::half_normal(self.number()?.0).map_err(invalid)?,
            "normal" => {
                let (m, _) = self.number()?;
                self.sym(",")?;
                let (sd, _) = self.number()?;
                Distribution::normal(m, sd).map_err(invalid)?
            }
            "point" => Distribution::point(self.number()?.0),
            "discrete" => {
                let mut values = Vec::new();
                loop {
                    let (a, apos) = self.number()?;
                    if self.is_sym("..") {
                        self.bump();
                        let (b, _) = self.number()?;
                        if a.fract() != 0.0 || b.fract() != 0.0 || a > b || b - a > 1e6 {
                            return Err(DslError::InvalidDistribution {
                                pos: apos,
                                detail: format!("range {a}..{b} needs integer bounds a <= b"),
                            });
                        }
                        let mut v = a;
                        while v <= b {
                            values.push(v);
                            v += 1.0;
                        }
                    } else {
                        values.push(a);
                    }
                    if !self.is_sym(",") {
                        break;
                    }
                    self.bump();
                }
                Distribution::discrete(values).map_err(invalid)?
            }
            "mixture" => {
                let mut comps = Vec::new();
                loop {
                    let (w, _) = self.number()?;
                    self.sym(":")?;
                    let (d, _) = self.dist()?;
                    comps.push((w, d));
                    if !self.is_sym(",") {
                        break;
                    }
                    self.bump();
                }
                Distribution::mixture(comps).map_err(invalid)?
            }
            _ => {
                return Err(DslError::Syntax {
                    pos,
                    expected: [
                        "uniform",
                        "halfnormal",
                        "normal",
                        "discrete",
                        "point",
                        "mixture",
                    ]
                    .iter()
                    .map(|s| format!("`{s}`"))
                    .collect(),
                    found: format!("`{kind}`"),
                })
            }
        };
        self.sym(")")?;
        Ok((d, pos))
    }
}

fn build(raw: RawDoc) -> Result<(CausalGraph, SpanIndex), DslError> {
    let mut spans = SpanIndex::default();
    let mut declared = BTreeSet::new();
    for n in &raw.nodes {
        if !declared.insert(n.name.clone()) {
            return Err(DslError::DuplicateNode {
                pos: n.pos,
                name: n.name.clone(),
            });
        }
    }

    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for n in raw.nodes {
        spans.nodes.insert(n.name.clone(), n.pos);
        let (op_name, op_pos) = n.op.clone().ok_or(DslError::Syntax {
            pos: n.pos,
            expected: vec!["`op = <operator>;`".into()],
            found: format!("node `{}` without an operator", n.name),
        })?;
        let operator: OperatorId = op_name.parse().map_err(|_| DslError::UnknownOperator {
            pos: op_pos,
            name: op_name.clone(),
        })?;

        let parent_names: Vec<&str> = n.parents.iter().map(|(p, _)| p.as_str()).collect();
        let mut seen_parents = BTreeSet::new();
        for (p, pos) in &n.parents {
            if !declared.contains(p) {
                return Err(DslError::UnknownParent {
                    pos: *pos,
                    node: n.name.clone(),
                    parent: p.clone(),
                });
            }
            if !seen_parents.insert(p.as_str()) {
                return Err(DslError::Syntax {
                    pos: *pos,
                    expected: vec!["distinct parents".into()],
                    found: format!("`{p}` twice"),
                });
            }
            spans.edges.push(((p.clone(), n.name.clone()), *pos));
            edges.push((p.clone(), n.name.clone()));
        }

        let render_from = match n.render_from {
            Some((r, pos)) => {
                if r == RenderFrom::Parent && n.parents.len() != 1 {
                    return Err(DslError::Graph {
                        pos,
                        source: ScmError::InvalidRenderFrom {
                            node: n.name.clone(),
                            parents: n.parents.len(),
                        },
                    });
                }
                r
            }
            None if n.parents.len() == 1 => RenderFrom::Parent,
            None => RenderFrom::Clean,
        };

        let eps_names: BTreeSet<&str> = n.eps.iter().map(|(e, _, _)| e.as_str()).collect();
        for (e, _, pos) in &n.eps {
            spans.eps.insert((n.name.clone(), e.clone()), *pos);
        }
        if eps_names.len() != n.eps.len() {
            let pos = n.eps.last().map(|e| e.2).unwrap_or(n.pos);
            return Err(DslError::Syntax {
                pos,
                expected: vec!["distinct eps names".into()],
                found: "duplicate eps".into(),
            });
        }

        let required: Vec<&str> = operator.params().iter().map(|s| s.name).collect();
        let mut missing: Vec<String> = Vec::new();
        for r in &required {
            if !n.params.iter().any(|(p, ..)| p == r) {
                missing.push(r.to_string());
            }
        }
        let mut extra = Vec::new();
        let mut seen = BTreeSet::new();
        for (p, ..) in &n.params {
            if !required.contains(&p.as_str()) || !seen.insert(p.as_str()) {
                extra.push(p.clone());
            }
        }
        if !missing.is_empty() || !extra.is_empty() {
            let pos = n
                .params
                .iter()
                .find(|(p, ..)| extra.contains(p))
                .map(|(.., pos, _)| *pos)
                .unwrap_or(n.pos);
            return Err(DslError::ArityError {
                pos,
                node: n.name.clone(),
                missing,
                extra,
            });
        }

        let mut params = Vec::new();
        for (pname, expr, pos, refs) in n.params {
            for (operand, rpos) in &refs {
                match operand {
                    Operand::Eps(e) if !eps_names.contains(e.as_str()) => {
                        return Err(DslError::UnknownReference {
                            pos: *rpos,
                            node: n.name.clone(),
                            reference: format!("eps({e})"),
                        })
                    }
                    Operand::Param { node: pn, param } => {
                        if !parent_names.contains(&pn.as_str()) {
                            return Err(DslError::UnknownParent {
                                pos: *rpos,
                                node: n.name.clone(),
                                parent: pn.clone(),
                            });
                        }
                        // parent operator is resolved after all nodes are built
                        spans.refs.push(((pn.clone(), param.clone()), *rpos));
                    }
                    _ => {}
                }
            }
            spans.params.insert((n.name.clone(), pname.clone()), pos);
            params.push((pname, Mechanism::new(expr)));
        }

        nodes.push(CorruptionNode {
            name: n.name,
            operator,
            eps: n.eps.into_iter().map(|(e, d, _)| (e, d)).collect(),
            params,
            render_from,
        });
    }

    let ops: BTreeMap<&str, OperatorId> = nodes
        .iter()
        .map(|n| (n.name.as_str(), n.operator))
        .collect();
    for ((node, param), pos) in &spans.refs {
        let op = ops[node.as_str()];
        if op.param(param).is_none() {
            return Err(DslError::UnknownReference {
                pos: *pos,
                node: node.clone(),
                reference: format!("{node}.{param}"),
            });
        }
    }

    let graph = CausalGraph::with_options(nodes, edges, raw.options).map_err(|e| match e {
        ScmError::CyclicGraph { cycle } => {
            let pos = cycle
                .first()
                .and_then(|c| spans.nodes.get(c))
                .copied()
                .unwrap_or_default();
            DslError::AcyclicityViolation { pos, cycle }
        }
        ScmError::DuplicateNode(name) => {
            let pos = spans.nodes.get(&name).copied().unwrap_or_default();
            DslError::DuplicateNode { pos, name }
        }
        other => {
            let pos = match &other {
                ScmError::ReservedName(n) | ScmError::UnknownNode(n) => spans.nodes.get(n).copied(),
                ScmError::ArityError { node, .. }
                | ScmError::InvalidRenderFrom { node, .. }
                | ScmError::UnknownReference { node, .. } => spans.nodes.get(node).copied(),
                _ => None,
            };
            DslError::Graph {
                pos: pos.unwrap_or_default(),
                source: other,
            }
        }
    })?;
    Ok((graph, spans))
}
