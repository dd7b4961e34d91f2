//! `trace.json`: `{ "<node>": { "<param>": v, ..., "eps": { "<name>": v } }, "seed": s, "scene_id": id }`.

use std::collections::BTreeMap;

use serde_json::{Map, Value};

use super::DatasetError;
use crate::scm::SampledTrace;

fn trace_value(trace: &SampledTrace) -> Value {
    let mut root = Map::new();
    for (node, params) in &trace.values {
        let mut obj = Map::new();
        for (p, v) in params {
            obj.insert(p.clone(), Value::from(*v));
        }
        let eps: Map<String, Value> = trace
            .exogenous
            .get(node)
            .map(|m| {
                m.iter()
                    .map(|(k, v)| (k.clone(), Value::from(*v)))
                    .collect()
            })
            .unwrap_or_default();
        obj.insert("eps".into(), Value::Object(eps));
        root.insert(node.clone(), Value::Object(obj));
    }
    root.insert("seed".into(), Value::from(trace.seed));
    root.insert("scene_id".into(), Value::from(trace.scene_id));
    Value::Object(root)
}

pub fn trace_to_json(trace: &SampledTrace) -> String {
    let mut s = serde_json::to_string_pretty(&trace_value(trace)).expect("trace serializes");
    s.push('\n');
    s
}

/// Single-line form, for JSONL streams.
pub fn trace_to_json_line(trace: &SampledTrace) -> String {
    serde_json::to_string(&trace_value(trace)).expect("trace serializes")
}

pub fn trace_from_json(text: &str) -> Result<SampledTrace, DatasetError> {
    let bad = |m: &str| DatasetError::Format(format!("trace.json: {m}"));
    let root: Map<String, Value> = serde_json::from_str(text).map_err(|e| bad(&e.to_string()))?;
    let seed = root
        .get("seed")
        .and_then(Value::as_u64)
        .ok_or_else(|| bad("missing seed"))?;
    let scene_id = root
        .get("scene_id")
        .and_then(Value::as_u64)
        .ok_or_else(|| bad("missing scene_id"))?;
    let mut values = BTreeMap::new();
    let mut exogenous = BTreeMap::new();
    for (node, body) in &root {
        if node == "seed" || node == "scene_id" {
            continue;
        }
        let obj = body
            .as_object()
            .ok_or_else(|| bad("node entry is not an object"))?;
        let mut params = BTreeMap::new();
        let mut eps = BTreeMap::new();
        for (k, v) in obj {
            if k == "eps" {
                for (e, ev) in v.as_object().ok_or_else(|| bad("eps is not an object"))? {
                    eps.insert(
                        e.clone(),
                        ev.as_f64()
                            .ok_or_else(|| bad("eps value is not a number"))?,
                    );
                }
            } else {
                params.insert(
                    k.clone(),
                    v.as_f64().ok_or_else(|| bad("parameter is not a number"))?,
                );
            }
        }
        values.insert(node.clone(), params);
        exogenous.insert(node.clone(), eps);
    }
    Ok(SampledTrace {
        scene_id,
        seed,
        values,
        exogenous,
    })
}
