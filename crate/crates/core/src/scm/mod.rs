//! Structural causal models over corruption parameters.
//!
//! A [`CausalGraph`] is a DAG of [`CorruptionNode`]s. Each node owns the
//! structural equations ([`Mechanism`]s) for its operator's parameters and any
//! exogenous noise terms they read. [`sample_trace`] evaluates the equations in
//! topological order; [`apply_intervention`] rewrites one equation.

mod distribution;
mod graph;
mod intervention;
mod mechanism;
mod sample;

pub use distribution::{Distribution, WEIGHT_TOLERANCE};
pub use graph::{
    topological_order, CausalGraph, CorruptionNode, GraphOptions, RenderFrom, RESERVED_NAMES,
};
pub use intervention::{apply_intervention, Intervention, InterventionKind};
pub use mechanism::{CmpOp, Condition, Expr, Mechanism, Operand};
pub use sample::{sample_trace, sample_traces, SampledTrace};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScmError {
    #[error("graph contains a cycle: {}", .cycle.join(" -> "))]
    CyclicGraph { cycle: Vec<String> },
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("node `{node}` has no parameter `{param}`")]
    UnknownParam { node: String, param: String },
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("`{0}` is a reserved name")]
    ReservedName(String),
    #[error("node `{node}`: missing parameters {missing:?}, unexpected parameters {extra:?}")]
    ArityError {
        node: String,
        missing: Vec<String>,
        extra: Vec<String>,
    },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("node `{node}` renders from its parent but has {parents} parents")]
    InvalidRenderFrom { node: String, parents: usize },
    #[error(
        "node `{node}` references `{reference}`, which is not a parent parameter or declared eps"
    )]
    UnknownReference { node: String, reference: String },
    #[error("mechanism {node}.{param} failed: {detail}")]
    MechanismDomainError {
        node: String,
        param: String,
        detail: String,
    },
}
