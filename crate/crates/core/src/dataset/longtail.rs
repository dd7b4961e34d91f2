use std::collections::BTreeMap;

use rand::Rng as _;

use super::{DatasetError, DatasetManifest};
use crate::rng;

/// Listing written next to the manifest for the long-tail regime.
pub const LONGTAIL_FILE: &str = "longtail.csv";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LongtailPick {
    pub scene_id: u64,
    /// `"clean"` or a corruption node name.
    pub variant: String,
}

/// Pick exactly one variant per scene: corruption `i` with probability
/// `p_corr[i]`, otherwise clean.
pub fn mix_longtail_ids(
    scene_ids: &[u64],
    p_corr: &BTreeMap<String, f64>,
    seed: u64,
) -> Result<Vec<LongtailPick>, DatasetError> {
    let mut total = 0.0;
    for (k, &p) in p_corr {
        if !p.is_finite() || p < 0.0 {
            return Err(DatasetError::Probability(format!("p_corr[{k}] = {p}")));
        }
        total += p;
    }
    if total > 1.0 + 1e-9 {
        return Err(DatasetError::Probability(format!(
            "p_corr sums to {total} > 1"
        )));
    }
    let base = rng::stream_seed(seed, "longtail");
    Ok(scene_ids
        .iter()
        .map(|&scene_id| {
            let mut r = rng::rng_from(rng::mix(base, scene_id));
            let u: f64 = r.random();
            let mut acc = 0.0;
            let mut variant = "clean".to_string();
            for (k, &p) in p_corr {
                acc += p;
                if u < acc {
                    variant = k.clone();
                    break;
                }
            }
            LongtailPick { scene_id, variant }
        })
        .collect())
}

/// [`mix_longtail_ids`] over the scenes of a manifest.
pub fn mix_longtail(
    manifest: &DatasetManifest,
    p_corr: &BTreeMap<String, f64>,
    seed: u64,
) -> Result<Vec<LongtailPick>, DatasetError> {
    let nodes = manifest.corruption_nodes();
    if let Some(k) = p_corr.keys().find(|k| !nodes.contains(k)) {
        return Err(DatasetError::Probability(format!(
            "`{k}` is not a corruption in this dataset"
        )));
    }
    let ids: Vec<u64> = manifest.scenes.iter().map(|s| s.scene_id).collect();
    mix_longtail_ids(&ids, p_corr, seed)
}
