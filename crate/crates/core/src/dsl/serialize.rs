use std::fmt::Write;

use super::FORMAT_VERSION;
use crate::scm::{CausalGraph, Condition, Distribution, Expr, Operand, RenderFrom};

/// Canonical text for a graph.
///
/// Nodes are emitted in topological order with ties broken by name; parameters
/// and eps terms keep their declaration order because it fixes the draw order.
pub fn serialize_spec(graph: &CausalGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "version {FORMAT_VERSION};");
    if graph.options().half_normal_offset {
        out.push_str("option halfnormal_offset = identity;\n");
    }
    for name in canonical_order(graph) {
        let node = graph
            .node(&name)
            .expect("ordered names come from the graph");
        out.push('\n');
        let parents = graph.parents(&name);
        let _ = write!(out, "node {name}");
        if !parents.is_empty() {
            let _ = write!(out, " after {}", parents.join(", "));
        }
        let default = if parents.len() == 1 {
            RenderFrom::Parent
        } else {
            RenderFrom::Clean
        };
        if node.render_from != default {
            out.push_str(match node.render_from {
                RenderFrom::Clean => " render_from clean",
                RenderFrom::Parent => " render_from parent",
            });
        }
        out.push_str(" {\n");
        let _ = writeln!(out, "  op = {};", node.operator);
        for (e, d) in &node.eps {
            let _ = writeln!(out, "  eps {e} ~ {};", format_distribution(d));
        }
        for (p, m) in &node.params {
            let _ = writeln!(out, "  {p} = {};", format_expr(&m.expr));
        }
        out.push_str("}\n");
    }
    out
}

fn canonical_order(graph: &CausalGraph) -> Vec<String> {
    let mut names: Vec<&str> = graph.nodes().iter().map(|n| n.name.as_str()).collect();
    names.sort_unstable();
    let mut placed: Vec<String> = Vec::with_capacity(names.len());
    while placed.len() < names.len() {
        let next = names
            .iter()
            .find(|n| {
                !placed.iter().any(|p| p == *n)
                    && graph
                        .parents(n)
                        .iter()
                        .all(|p| placed.iter().any(|q| q == p))
            })
            .expect("graph is acyclic");
        placed.push(next.to_string());
    }
    placed
}

fn num(v: f64) -> String {
    format!("{v}")
}

pub fn format_distribution(d: &Distribution) -> String {
    match d {
        Distribution::Uniform { lo, hi } => format!("uniform({}, {})", num(*lo), num(*hi)),
        Distribution::HalfNormal { scale } => format!("halfnormal({})", num(*scale)),
        Distribution::Normal { mean, sd } => format!("normal({}, {})", num(*mean), num(*sd)),
        Distribution::PointMass { value } => format!("point({})", num(*value)),
        Distribution::DiscreteUniform { values } => format!("discrete({})", format_values(values)),
        Distribution::Mixture { components } => {
            let parts: Vec<String> = components
                .iter()
                .map(|(w, d)| format!("{}: {}", num(*w), format_distribution(d)))
                .collect();
            format!("mixture({})", parts.join(", "))
        }
    }
}

/// Runs of three or more consecutive integers collapse to `a..b`.
fn format_values(values: &[f64]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < values.len() {
        let mut j = i;
        if values[i].fract() == 0.0 {
            while j + 1 < values.len() && values[j + 1] == values[j] + 1.0 {
                j += 1;
            }
        }
        if j >= i + 2 {
            parts.push(format!("{}..{}", num(values[i]), num(values[j])));
            i = j + 1;
        } else {
            parts.push(num(values[i]));
            i += 1;
        }
    }
    parts.join(", ")
}

fn format_operand(o: &Operand) -> String {
    match o {
        Operand::Param { node, param } => format!("{node}.{param}"),
        Operand::Eps(e) => format!("eps({e})"),
    }
}

fn format_cond(c: &Condition) -> String {
    let wrap = |c: &Condition, bare: bool| {
        if bare {
            format_cond(c)
        } else {
            format!("({})", format_cond(c))
        }
    };
    match c {
        Condition::Compare { lhs, op, rhs } => {
            format!("{} {} {}", format_operand(lhs), op.symbol(), num(*rhs))
        }
        // `or` is left-associative and binds looser than `and`
        Condition::Or(a, b) => format!(
            "{} or {}",
            wrap(a, true),
            wrap(b, !matches!(**b, Condition::Or(..)))
        ),
        Condition::And(a, b) => format!(
            "{} and {}",
            wrap(a, !matches!(**a, Condition::Or(..))),
            wrap(b, matches!(**b, Condition::Compare { .. }))
        ),
    }
}

fn format_expr(e: &Expr) -> String {
    match e {
        Expr::Const(v) => num(*v),
        Expr::Draw(d) => format!("~ {}", format_distribution(d)),
        Expr::Affine { scale, eps, offset } => {
            let mut s = if *scale == 1.0 {
                format!("eps({eps})")
            } else {
                format!("{}*eps({eps})", num(*scale))
            };
            if *offset != 0.0 || offset.is_sign_negative() {
                if offset.is_sign_negative() {
                    let _ = write!(s, " - {}", num(-offset));
                } else {
                    let _ = write!(s, " + {}", num(*offset));
                }
            }
            s
        }
        Expr::Branch {
            cond,
            then,
            otherwise,
        } => {
            format!(
                "if {} then {} else {}",
                format_cond(cond),
                format_expr(then),
                format_expr(otherwise)
            )
        }
    }
}
