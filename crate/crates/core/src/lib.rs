//! Causal-model driven image corruption benchmarks.
//!
//! Corruption parameters are sampled from a structural causal model described in
//! a small text format ([`dsl`]), applied to procedurally generated multi-object
//! scenes ([`scene`]) by deterministic raster operators ([`ops`]), written to disk
//! as a dataset ([`dataset`]), and scored against external predictions ([`eval`]).

pub mod dataset;
pub mod dsl;
pub mod eval;
pub mod exec;
pub mod hash;
pub mod ops;
pub mod plot;
pub mod rng;
pub mod scene;
pub mod scm;

pub use dsl::{parse_spec, serialize_spec, validate_spec, SpecDocument};
pub use exec::Workers;
pub use ops::{apply, Image, OperatorId, OperatorParams};
pub use scm::{
    apply_intervention, sample_trace, CausalGraph, Distribution, Intervention, SampledTrace,
};
