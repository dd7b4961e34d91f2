use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::mechanism::EvalScope;
use super::{CausalGraph, ScmError};
use crate::exec::Workers;
use crate::rng;

/// One realization of every parameter and exogenous term for one scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledTrace {
    pub scene_id: u64,
    /// Per-scene seed derived from the global seed.
    pub seed: u64,
    /// node → param → value, after clamping to the operator domain.
    pub values: BTreeMap<String, BTreeMap<String, f64>>,
    /// node → eps name → value.
    pub exogenous: BTreeMap<String, BTreeMap<String, f64>>,
}

impl SampledTrace {
    pub fn value(&self, node: &str, param: &str) -> Option<f64> {
        self.values.get(node)?.get(param).copied()
    }

    pub fn params(&self, node: &str) -> Option<&BTreeMap<String, f64>> {
        self.values.get(node)
    }
}

/// Sample every node in topological order.
///
/// Each node draws from its own stream seeded by `(global_seed, scene_id, node name)`,
/// so the trace does not depend on how scenes are scheduled.
pub fn sample_trace(
    graph: &CausalGraph,
    scene_id: u64,
    global_seed: u64,
) -> Result<SampledTrace, ScmError> {
    let seed = rng::scene_seed(global_seed, scene_id);
    let offset_enabled = graph.options().half_normal_offset;
    let mut values: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    let mut exogenous = BTreeMap::new();

    for node in graph.ordered_nodes() {
        let mut r = rng::rng_from(rng::node_seed(seed, &node.name));
        let eps: BTreeMap<String, f64> = node
            .eps
            .iter()
            .map(|(n, d)| (n.clone(), d.sample(&mut r)))
            .collect();
        let mut params = BTreeMap::new();
        for (pname, mech) in &node.params {
            let spec = node
                .operator
                .param(pname)
                .ok_or_else(|| ScmError::UnknownParam {
                    node: node.name.clone(),
                    param: pname.clone(),
                })?;
            let scope = EvalScope {
                parents: &values,
                eps: &eps,
                half_normal_offset: if offset_enabled { spec.identity } else { 0.0 },
            };
            let raw = mech.expr.eval(&scope, &mut r).map_err(|detail| {
                ScmError::MechanismDomainError {
                    node: node.name.clone(),
                    param: pname.clone(),
                    detail,
                }
            })?;
            if raw.is_nan() {
                return Err(ScmError::MechanismDomainError {
                    node: node.name.clone(),
                    param: pname.clone(),
                    detail: "evaluated to NaN".into(),
                });
            }
            params.insert(pname.clone(), spec.clamp(raw));
        }
        values.insert(node.name.clone(), params);
        exogenous.insert(node.name.clone(), eps);
    }
    Ok(SampledTrace {
        scene_id,
        seed,
        values,
        exogenous,
    })
}

/// Sample scenes `0..n`.
pub fn sample_traces(
    graph: &CausalGraph,
    n: usize,
    global_seed: u64,
    workers: Workers,
) -> Result<Vec<SampledTrace>, ScmError> {
    workers.try_map(n, |i| sample_trace(graph, i as u64, global_seed))
}
