use serde::{Deserialize, Serialize};

use super::{CausalGraph, Distribution, Mechanism, ScmError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InterventionKind {
    /// `do(param = value)`.
    Hard(f64),
    /// Replace the mechanism by an independent draw.
    Soft(Distribution),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Intervention {
    pub node: String,
    pub param: String,
    pub kind: InterventionKind,
}

impl Intervention {
    pub fn hard(node: impl Into<String>, param: impl Into<String>, value: f64) -> Self {
        Intervention {
            node: node.into(),
            param: param.into(),
            kind: InterventionKind::Hard(value),
        }
    }

    pub fn soft(node: impl Into<String>, param: impl Into<String>, dist: Distribution) -> Self {
        Intervention {
            node: node.into(),
            param: param.into(),
            kind: InterventionKind::Soft(dist),
        }
    }
}

/// Return a copy of `graph` with one parameter's mechanism cut from its parents.
///
/// Edges are kept: other parameters of the same node may still read them, and
/// descendants keep reading the (now intervened) value.
pub fn apply_intervention(graph: &CausalGraph, iv: &Intervention) -> Result<CausalGraph, ScmError> {
    let node = graph
        .node(&iv.node)
        .ok_or_else(|| ScmError::UnknownNode(iv.node.clone()))?;
    if node.mechanism(&iv.param).is_none() {
        return Err(ScmError::UnknownParam {
            node: iv.node.clone(),
            param: iv.param.clone(),
        });
    }
    let mech = match &iv.kind {
        InterventionKind::Hard(v) => {
            if !v.is_finite() {
                return Err(ScmError::InvalidDistribution(format!(
                    "hard intervention value {v} is not finite"
                )));
            }
            Mechanism::draw(Distribution::point(*v))
        }
        InterventionKind::Soft(d) => {
            d.validate()?;
            Mechanism::draw(d.clone())
        }
    };
    let mut out = graph.clone();
    out.replace_mechanism(&iv.node, &iv.param, mech)?;
    Ok(out)
}
