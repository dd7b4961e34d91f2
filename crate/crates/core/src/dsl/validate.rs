use std::fmt;

use super::{Pos, SpecDocument};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Level {
    Warning,
    Error,
}

/// A domain finding for one parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub level: Level,
    pub node: String,
    pub param: String,
    pub pos: Pos,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.level {
            Level::Warning => "warning",
            Level::Error => "error",
        };
        write!(
            f,
            "{}: {level}: {}.{}: {}",
            self.pos, self.node, self.param, self.message
        )
    }
}

/// Compare each mechanism's support hull with its operator's parameter domain.
///
/// A finite bound outside the domain is an error. An unbounded tail is a
/// warning: sampled values are clamped to the domain edge.
pub fn validate_spec(doc: &SpecDocument) -> Vec<Diagnostic> {
    let graph = &doc.graph;
    let offset_enabled = graph.options().half_normal_offset;
    let mut out = Vec::new();
    for node in graph.ordered_nodes() {
        let eps = node.eps_map();
        for (pname, mech) in &node.params {
            let Some(spec) = node.operator.param(pname) else {
                continue;
            };
            let offset = if offset_enabled { spec.identity } else { 0.0 };
            let (lo, hi) = mech.expr.support(&eps, offset);
            let pos = doc
                .spans
                .params
                .get(&(node.name.clone(), pname.clone()))
                .copied()
                .unwrap_or_default();
            let mut push = |level, message: String| {
                out.push(Diagnostic {
                    level,
                    node: node.name.clone(),
                    param: pname.clone(),
                    pos,
                    message,
                })
            };
            if lo < spec.min {
                if lo.is_finite() {
                    push(
                        Level::Error,
                        format!("support below domain minimum ({lo} < {})", spec.min),
                    );
                } else {
                    push(
                        Level::Warning,
                        format!("unbounded below; clamped to {} = {}", spec.name, spec.min),
                    );
                }
            }
            if hi > spec.max {
                if hi.is_finite() {
                    push(
                        Level::Error,
                        format!("support above domain maximum ({hi} > {})", spec.max),
                    );
                } else {
                    push(
                        Level::Warning,
                        format!(
                            "unbounded above; clamped to {}_max = {}",
                            spec.name, spec.max
                        ),
                    );
                }
            }
        }
    }
    out
}
