use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::bootstrap::{bootstrap_ci, BootstrapCi, DEFAULT_RESAMPLES};
use super::curve::{severity_curve, SeverityCurve};
use super::matching::mean_iou;
use super::metrics::{mse, MseScale};
use super::predict::{read_prediction, CLEAN_VARIANT};
use super::EvalError;
use crate::dataset::{
    node_params, read_mask_png, read_rgb_png, trace_from_json, write_atomic, DatasetManifest,
};
use crate::exec::Workers;
use crate::ops::{severity_normalize, ObservedRange, OperatorId, OperatorParams};
use crate::rng;

pub const REPORT_VERSION: u32 = 1;
pub const DEFAULT_BINS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    pub seed: u64,
    pub n_boot: usize,
    pub bins: usize,
    pub mse_scale: MseScale,
    pub workers: Workers,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            seed: 0,
            n_boot: DEFAULT_RESAMPLES,
            bins: DEFAULT_BINS,
            mse_scale: MseScale::EightBit,
            workers: Workers::Auto,
        }
    }
}

/// One scored (scene, variant) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub scene_id: u64,
    pub variant: String,
    pub miou: Option<f64>,
    pub mse: Option<f64>,
    /// Primary parameter value; `None` for clean.
    pub severity_raw: Option<f64>,
    /// Min-max normalized over this variant's rows; `None` for clean.
    pub severity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub variant: String,
    pub operator: OperatorId,
    pub miou: Option<BootstrapCi>,
    pub mse: Option<BootstrapCi>,
    /// Rows with a defined mIoU; equals the curve's total count.
    pub count: usize,
    pub curve: Option<SeverityCurve>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateScore {
    pub path: String,
    pub clean_miou: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub format_version: u32,
    pub spec_fingerprint: String,
    pub seed: u64,
    pub n_boot: usize,
    pub bins: usize,
    pub mse_scale: MseScale,
    /// Index into `candidates` of the prediction set with the highest clean mIoU.
    pub selected: usize,
    pub candidates: Vec<CandidateScore>,
    pub groups: Vec<GroupSummary>,
    pub samples: Vec<SampleRow>,
    pub diagnostics: Vec<String>,
}

impl EvalReport {
    pub fn group(&self, variant: &str) -> Option<&GroupSummary> {
        self.groups.iter().find(|g| g.variant == variant)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn load(path: &Path) -> Result<Self, EvalError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| EvalError::Format(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| EvalError::Format(format!("{}: {e}", path.display())))
    }

    /// Flat per-scene rows.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut s = String::from("scene_id,variant,miou,mse,severity_raw,severity\n");
        for r in &self.samples {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.scene_id,
                r.variant,
                opt(r.miou),
                opt(r.mse),
                opt(r.severity_raw),
                opt(r.severity)
            ));
        }
        s
    }

    /// `<prefix>.json` and `<prefix>.csv`.
    pub fn write(&self, prefix: &Path) -> Result<(PathBuf, PathBuf), EvalError> {
        let json = with_suffix(prefix, "json");
        let csv = with_suffix(prefix, "csv");
        write_atomic(&json, self.to_json().as_bytes())?;
        write_atomic(&csv, self.to_csv().as_bytes())?;
        Ok((json, csv))
    }

    /// Re-bin every corruption's rows.
    pub fn curves(&self, bins: usize) -> Vec<(String, SeverityCurve)> {
        self.groups
            .iter()
            .filter(|g| g.variant != CLEAN_VARIANT)
            .map(|g| {
                let recs: Vec<(f64, f64)> = self
                    .samples
                    .iter()
                    .filter(|r| r.variant == g.variant)
                    .filter_map(|r| Some((r.severity?, r.miou?)))
                    .collect();
                (g.variant.clone(), severity_curve(&recs, bins))
            })
            .collect()
    }
}

/// `path` with `.ext` appended unless it already ends in it.
pub fn with_suffix(path: &Path, ext: &str) -> PathBuf {
    if path.extension().is_some_and(|e| e == ext) {
        return path.to_path_buf();
    }
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

struct Scored {
    rows: Vec<SampleRow>,
    diagnostics: Vec<String>,
}

fn score_set(
    manifest: &DatasetManifest,
    dataset: &Path,
    pred: &Path,
    opts: &EvalOptions,
) -> Result<Scored, EvalError> {
    let per_scene = opts.workers.try_map(manifest.scenes.len(), |i| {
        let rec = &manifest.scenes[i];
        let gt = read_mask_png(&dataset.join(&rec.mask.path))?;
        let clean = read_rgb_png(&dataset.join(&rec.clean.path))?;
        let variants =
            std::iter::once(CLEAN_VARIANT).chain(rec.corrupted.iter().map(|c| c.node.as_str()));
        let mut rows = Vec::new();
        let mut diags = Vec::new();
        for v in variants {
            let p = read_prediction(pred, rec.scene_id, v)?;
            if p.masks.is_none() && p.recon.is_none() {
                diags.push(format!("scene {} / {v}: no prediction", rec.scene_id));
                continue;
            }
            let miou = match &p.masks {
                Some(m) => {
                    let r = mean_iou(m, &gt)?;
                    if r.is_none() {
                        diags.push(format!(
                            "scene {} has no ground-truth objects; mIoU skipped",
                            rec.scene_id
                        ));
                    }
                    r
                }
                None => None,
            };
            let mse = p
                .recon
                .as_ref()
                .map(|r| mse(r, &clean, opts.mse_scale))
                .transpose()?;
            rows.push(SampleRow {
                scene_id: rec.scene_id,
                variant: v.to_string(),
                miou,
                mse,
                severity_raw: None,
                severity: None,
            });
        }
        Ok::<_, EvalError>((rows, diags))
    })?;
    let mut rows = Vec::new();
    let mut diagnostics = Vec::new();
    for (r, d) in per_scene {
        rows.extend(r);
        diagnostics.extend(d);
    }
    Ok(Scored { rows, diagnostics })
}

fn mean_of(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Score one or more prediction sets against a dataset and report the one
/// with the highest clean mIoU.
pub fn evaluate(
    dataset: &Path,
    preds: &[PathBuf],
    opts: &EvalOptions,
) -> Result<EvalReport, EvalError> {
    if preds.is_empty() {
        return Err(EvalError::MissingPrediction(
            "no prediction sets given".into(),
        ));
    }
    let manifest = DatasetManifest::load(dataset)?;
    let spec = manifest.load_spec(dataset)?;

    let mut scored = Vec::new();
    let mut candidates = Vec::new();
    for p in preds {
        let s = score_set(&manifest, dataset, p, opts)?;
        let clean: Vec<f64> = s
            .rows
            .iter()
            .filter(|r| r.variant == CLEAN_VARIANT)
            .filter_map(|r| r.miou)
            .collect();
        candidates.push(CandidateScore {
            path: p.display().to_string(),
            clean_miou: mean_of(&clean),
        });
        scored.push(s);
    }
    let mut selected = 0;
    for (i, c) in candidates.iter().enumerate() {
        let best = candidates[selected].clean_miou.unwrap_or(f64::NEG_INFINITY);
        if c.clean_miou.unwrap_or(f64::NEG_INFINITY) > best {
            selected = i;
        }
    }
    let Scored {
        mut rows,
        diagnostics,
    } = scored.swap_remove(selected);

    // Severity of every corrupted row, normalized per corruption.
    let traces = opts.workers.try_map(manifest.scenes.len(), |i| {
        let rec = &manifest.scenes[i];
        let text = std::fs::read_to_string(dataset.join(&rec.trace.path))
            .map_err(|e| EvalError::Format(format!("{}: {e}", rec.trace.path)))?;
        Ok::<_, EvalError>((rec.scene_id, trace_from_json(&text)?))
    })?;
    let traces: BTreeMap<u64, _> = traces.into_iter().collect();
    let nodes = manifest.corruption_nodes();
    let mut params: BTreeMap<(u64, String), OperatorParams> = BTreeMap::new();
    let mut ranges: BTreeMap<String, ObservedRange> = BTreeMap::new();
    for node in &nodes {
        let op = spec
            .graph
            .node(node)
            .map(|n| n.operator)
            .unwrap_or(OperatorId::Clean);
        let mut ps = Vec::new();
        for (&id, t) in &traces {
            let p = node_params(&spec.graph, t, node)?;
            params.insert((id, node.clone()), p.clone());
            ps.push(p);
        }
        ranges.insert(node.clone(), ObservedRange::from_samples(op, &ps));
    }
    for r in rows.iter_mut().filter(|r| r.variant != CLEAN_VARIANT) {
        if let (Some(p), Some(range)) = (
            params.get(&(r.scene_id, r.variant.clone())),
            ranges.get(&r.variant),
        ) {
            let s = severity_normalize(p, range);
            r.severity_raw = Some(s.raw);
            r.severity = Some(s.normalized);
        }
    }

    let mut groups = Vec::new();
    for variant in std::iter::once(CLEAN_VARIANT.to_string()).chain(nodes.iter().cloned()) {
        let mine: Vec<&SampleRow> = rows.iter().filter(|r| r.variant == variant).collect();
        let mious: Vec<f64> = mine.iter().filter_map(|r| r.miou).collect();
        let mses: Vec<f64> = mine.iter().filter_map(|r| r.mse).collect();
        let ci = |vals: &[f64], what: &str| -> Result<Option<BootstrapCi>, EvalError> {
            if vals.is_empty() {
                return Ok(None);
            }
            let seed = rng::stream_seed(opts.seed, &format!("{variant}/{what}"));
            bootstrap_ci(vals, opts.n_boot, seed).map(Some)
        };
        let operator = spec
            .graph
            .node(&variant)
            .map(|n| n.operator)
            .unwrap_or(OperatorId::Clean);
        let curve = (variant != CLEAN_VARIANT).then(|| {
            let recs: Vec<(f64, f64)> = mine
                .iter()
                .filter_map(|r| Some((r.severity?, r.miou?)))
                .collect();
            severity_curve(&recs, opts.bins)
        });
        groups.push(GroupSummary {
            miou: ci(&mious, "miou")?,
            mse: ci(&mses, "mse")?,
            count: mious.len(),
            curve,
            operator,
            variant,
        });
    }

    let order: BTreeMap<&str, usize> = groups
        .iter()
        .enumerate()
        .map(|(i, g)| (g.variant.as_str(), i))
        .collect();
    rows.sort_by_key(|r| {
        (
            r.scene_id,
            order.get(r.variant.as_str()).copied().unwrap_or(usize::MAX),
        )
    });

    Ok(EvalReport {
        format_version: REPORT_VERSION,
        spec_fingerprint: manifest.spec_fingerprint.clone(),
        seed: opts.seed,
        n_boot: opts.n_boot,
        bins: opts.bins,
        mse_scale: opts.mse_scale,
        selected,
        candidates,
        groups,
        samples: rows,
        diagnostics,
    })
}
