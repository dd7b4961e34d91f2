//! On-disk benchmark datasets.
//!
//! ```text
//! out/manifest.json                  written last, atomically
//! out/spec.scm.txt                   copy of the model the dataset was drawn from
//! out/scenes/<id>/clean.png
//! out/scenes/<id>/masks.png          gray label raster, 0 = background
//! out/scenes/<id>/trace.json
//! out/scenes/<id>/corrupt/<node>.png
//! ```
//!
//! Every corrupted image is `apply(op, input)` where `input` is the decoded PNG of
//! the node's render input (parent node or clean), so stored bytes can be
//! re-derived exactly from the manifest.

mod io;
mod longtail;
mod trace_file;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use io::{
    encode_mask_png, encode_rgb_png, read_mask_png, read_rgb_png, write_atomic, write_file,
};
pub use longtail::{mix_longtail, mix_longtail_ids, LongtailPick, LONGTAIL_FILE};
pub use trace_file::{trace_from_json, trace_to_json, trace_to_json_line};

use crate::dsl::{parse_spec, SpecDocument};
use crate::exec::Workers;
use crate::hash::sha256_hex;
use crate::ops::{self, Image, OperatorId, OperatorParams};
use crate::rng;
use crate::scene::{generate_scene, MaskMap, SceneConfig};
use crate::scm::{sample_trace, CausalGraph, SampledTrace};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SPEC_FILE: &str = "spec.scm.txt";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("{path}: {detail}")]
    Io { path: String, detail: String },
    #[error("spec error: {0}")]
    Spec(String),
    #[error("scene source: {0}")]
    SceneSource(String),
    #[error("probabilities: {0}")]
    Probability(String),
    #[error("format: {0}")]
    Format(String),
    #[error("integrity: {0}")]
    Integrity(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    OodIid,
    OodChain,
    Longtail,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::OodIid => "ood_iid",
            Regime::OodChain => "ood_chain",
            Regime::Longtail => "longtail",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ood_iid" => Some(Regime::OodIid),
            "ood_chain" => Some(Regime::OodChain),
            "longtail" => Some(Regime::Longtail),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeConfig {
    pub regime: Regime,
    /// Per-corruption selection probability (long-tail only).
    pub p_corr: BTreeMap<String, f64>,
    /// Seed of the long-tail selection; defaults to the dataset seed.
    pub selection_seed: Option<u64>,
}

impl RegimeConfig {
    pub fn new(regime: Regime) -> Self {
        RegimeConfig {
            regime,
            p_corr: BTreeMap::new(),
            selection_seed: None,
        }
    }

    /// Long-tail regime with the same probability for every corruption node.
    pub fn longtail_uniform(graph: &CausalGraph, p: f64) -> Self {
        let p_corr = graph
            .nodes()
            .iter()
            .filter(|n| n.operator != OperatorId::Clean)
            .map(|n| (n.name.clone(), p))
            .collect();
        RegimeConfig {
            regime: Regime::Longtail,
            p_corr,
            selection_seed: None,
        }
    }
}

/// Where clean scenes come from.
#[derive(Debug, Clone)]
pub enum SceneSource {
    Synth(SceneConfig),
    /// `<dir>/<id>/clean.png` + `<dir>/<id>/masks.png`.
    Directory(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileRef {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorruptRecord {
    pub node: String,
    pub operator: OperatorId,
    /// `"clean"` or the name of the node whose image this one was rendered from.
    pub input: String,
    pub file: FileRef,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneRecord {
    pub scene_id: u64,
    pub clean: FileRef,
    pub mask: FileRef,
    pub trace: FileRef,
    pub corrupted: Vec<CorruptRecord>,
    pub regime_tag: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format_version: u32,
    pub spec_fingerprint: String,
    pub spec_file: String,
    pub global_seed: u64,
    pub scene_count: usize,
    pub width: usize,
    pub height: usize,
    pub node_order: Vec<String>,
    pub regime: Regime,
    pub scenes: Vec<SceneRecord>,
}

impl DatasetManifest {
    pub fn load(dir: &Path) -> Result<Self, DatasetError> {
        let text = io::read_file(&dir.join(MANIFEST_FILE))?;
        serde_json::from_slice(&text)
            .map_err(|e| DatasetError::Format(format!("manifest.json: {e}")))
    }

    pub fn load_spec(&self, dir: &Path) -> Result<SpecDocument, DatasetError> {
        let bytes = io::read_file(&dir.join(&self.spec_file))?;
        let text = String::from_utf8(bytes).map_err(|e| DatasetError::Spec(e.to_string()))?;
        parse_spec(&text).map_err(|e| DatasetError::Spec(e.to_string()))
    }

    /// Number of corrupted images listed.
    pub fn corrupted_count(&self) -> usize {
        self.scenes.iter().map(|s| s.corrupted.len()).sum()
    }

    pub fn corruption_nodes(&self) -> Vec<String> {
        self.scenes
            .first()
            .map(|s| s.corrupted.iter().map(|c| c.node.clone()).collect())
            .unwrap_or_default()
    }
}

/// Directory name of a scene.
pub fn scene_dir_name(scene_id: u64) -> String {
    format!("{scene_id:06}")
}

/// Seed handed to a node's operator for its own random fields.
pub fn render_seed(trace: &SampledTrace, node: &str) -> u64 {
    rng::stream_seed(rng::node_seed(trace.seed, node), "render")
}

/// Operator parameters for one node of a trace.
pub fn node_params(
    graph: &CausalGraph,
    trace: &SampledTrace,
    node: &str,
) -> Result<OperatorParams, DatasetError> {
    let n = graph
        .node(node)
        .ok_or_else(|| DatasetError::Spec(format!("unknown node {node}")))?;
    let empty = BTreeMap::new();
    let map = trace.params(node).unwrap_or(&empty);
    let (p, _) = OperatorParams::from_map_clamped(n.operator, map)
        .map_err(|e| DatasetError::Spec(e.to_string()))?;
    Ok(p)
}

/// Render every node of one scene in topological order.
///
/// Each render is quantized to 8 bits before children read it, matching what a
/// reader of the PNG files sees.
pub fn render_nodes(
    graph: &CausalGraph,
    clean: &Image,
    trace: &SampledTrace,
) -> Result<BTreeMap<String, Image>, DatasetError> {
    let clean = clean.quantized();
    let mut renders: BTreeMap<String, Image> = BTreeMap::new();
    for node in graph.ordered_nodes() {
        let input = match graph.render_input(&node.name) {
            Some(parent) => &renders[parent],
            None => &clean,
        };
        let params = node_params(graph, trace, &node.name)?;
        let out = ops::apply(input, &params, render_seed(trace, &node.name))
            .map_err(|e| DatasetError::Spec(e.to_string()))?;
        renders.insert(node.name.clone(), out.quantized());
    }
    Ok(renders)
}

fn load_external_scene(dir: &Path, scene_id: u64) -> Result<(Image, MaskMap), DatasetError> {
    let base = dir.join(scene_dir_name(scene_id));
    let base = if base.is_dir() {
        base
    } else {
        dir.join(scene_id.to_string())
    };
    let clean = read_rgb_png(&base.join("clean.png"))
        .map_err(|e| DatasetError::SceneSource(e.to_string()))?;
    let mask = read_mask_png(&base.join("masks.png"))
        .map_err(|e| DatasetError::SceneSource(e.to_string()))?;
    if clean.dims() != mask.dims() {
        return Err(DatasetError::SceneSource(format!(
            "{}: image is {:?} but mask is {:?}",
            base.display(),
            clean.dims(),
            mask.dims()
        )));
    }
    Ok((clean, mask))
}

/// Scene ids available in an external scene directory, ascending.
pub fn list_scene_ids(dir: &Path) -> Result<Vec<u64>, DatasetError> {
    let rd = fs::read_dir(dir)
        .map_err(|e| DatasetError::SceneSource(format!("{}: {e}", dir.display())))?;
    let mut ids: Vec<u64> = rd
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_dir())
        .filter_map(|e| e.file_name().to_str().and_then(|s| s.parse().ok()))
        .collect();
    ids.sort_unstable();
    ids.dedup();
    Ok(ids)
}

/// Write synthesized clean scenes in the external-scene layout.
pub fn write_scenes(
    config: &SceneConfig,
    n_scenes: usize,
    global_seed: u64,
    out_dir: &Path,
    workers: Workers,
) -> Result<(), DatasetError> {
    workers.try_map(n_scenes, |i| {
        let id = i as u64;
        let (img, mask, meta) = generate_scene(config, id, global_seed)
            .map_err(|e| DatasetError::SceneSource(e.to_string()))?;
        let base = out_dir.join(scene_dir_name(id));
        write_file(&base.join("clean.png"), &encode_rgb_png(&img)?)?;
        write_file(&base.join("masks.png"), &encode_mask_png(&mask)?)?;
        let meta =
            serde_json::to_string_pretty(&meta).map_err(|e| DatasetError::Format(e.to_string()))?;
        write_file(&base.join("scene.json"), meta.as_bytes())
    })?;
    Ok(())
}

fn file_ref(out_dir: &Path, rel: String, bytes: &[u8]) -> Result<FileRef, DatasetError> {
    write_file(&out_dir.join(&rel), bytes)?;
    Ok(FileRef {
        path: rel,
        sha256: sha256_hex(bytes),
    })
}

/// Generate a dataset: sample, render and write every scene, then the manifest.
pub fn generate_dataset(
    spec: &SpecDocument,
    source: &SceneSource,
    n_scenes: usize,
    global_seed: u64,
    regime: &RegimeConfig,
    out_dir: &Path,
    workers: Workers,
) -> Result<DatasetManifest, DatasetError> {
    let graph = &spec.graph;
    let scene_ids: Vec<u64> = match source {
        SceneSource::Synth(cfg) => {
            cfg.validate()
                .map_err(|e| DatasetError::SceneSource(e.to_string()))?;
            (0..n_scenes as u64).collect()
        }
        SceneSource::Directory(dir) => {
            let ids = list_scene_ids(dir)?;
            if ids.len() < n_scenes {
                return Err(DatasetError::SceneSource(format!(
                    "{} holds {} scenes, {n_scenes} requested",
                    dir.display(),
                    ids.len()
                )));
            }
            ids[..n_scenes].to_vec()
        }
    };

    let longtail_tags: Option<Vec<LongtailPick>> = match regime.regime {
        Regime::Longtail => Some(mix_longtail_ids(
            &scene_ids,
            &regime.p_corr,
            regime.selection_seed.unwrap_or(global_seed),
        )?),
        _ => None,
    };

    fs::create_dir_all(out_dir).map_err(|e| DatasetError::Io {
        path: out_dir.display().to_string(),
        detail: e.to_string(),
    })?;
    write_file(&out_dir.join(SPEC_FILE), spec.source_text.as_bytes())?;

    let records: Vec<(SceneRecord, (usize, usize))> = workers.try_map(scene_ids.len(), |i| {
        let id = scene_ids[i];
        let (clean, mask) = match source {
            SceneSource::Synth(cfg) => {
                let (img, mask, _) = generate_scene(cfg, id, global_seed)
                    .map_err(|e| DatasetError::SceneSource(e.to_string()))?;
                (img.quantized(), mask)
            }
            SceneSource::Directory(dir) => load_external_scene(dir, id)?,
        };
        let trace =
            sample_trace(graph, id, global_seed).map_err(|e| DatasetError::Spec(e.to_string()))?;
        let renders = render_nodes(graph, &clean, &trace)?;

        let base = format!("scenes/{}", scene_dir_name(id));
        let clean_ref = file_ref(
            out_dir,
            format!("{base}/clean.png"),
            &encode_rgb_png(&clean)?,
        )?;
        let mask_ref = file_ref(
            out_dir,
            format!("{base}/masks.png"),
            &encode_mask_png(&mask)?,
        )?;
        let trace_ref = file_ref(
            out_dir,
            format!("{base}/trace.json"),
            trace_to_json(&trace).as_bytes(),
        )?;
        let mut corrupted = Vec::new();
        for node in graph.ordered_nodes() {
            if node.operator == OperatorId::Clean {
                continue;
            }
            let rel = format!("{base}/corrupt/{}.png", node.name);
            let file = file_ref(out_dir, rel, &encode_rgb_png(&renders[&node.name])?)?;
            corrupted.push(CorruptRecord {
                node: node.name.clone(),
                operator: node.operator,
                input: input_label(graph, &node.name),
                file,
            });
        }
        let regime_tag = match &longtail_tags {
            Some(tags) => format!("longtail:{}", tags[i].variant),
            None => regime.regime.as_str().to_string(),
        };
        Ok((
            SceneRecord {
                scene_id: id,
                clean: clean_ref,
                mask: mask_ref,
                trace: trace_ref,
                corrupted,
                regime_tag,
            },
            clean.dims(),
        ))
    })?;

    let (width, height) = records.first().map(|r| r.1).unwrap_or((0, 0));
    if records.iter().any(|r| r.1 != (width, height)) {
        return Err(DatasetError::SceneSource(
            "scenes have differing dimensions".into(),
        ));
    }
    if let Some(tags) = &longtail_tags {
        let mut listing = String::from("scene_id,variant\n");
        for t in tags {
            listing.push_str(&format!("{},{}\n", t.scene_id, t.variant));
        }
        write_atomic(&out_dir.join(LONGTAIL_FILE), listing.as_bytes())?;
    }

    let manifest = DatasetManifest {
        format_version: MANIFEST_VERSION,
        spec_fingerprint: spec.fingerprint(),
        spec_file: SPEC_FILE.to_string(),
        global_seed,
        scene_count: records.len(),
        width,
        height,
        node_order: graph.topological_order(),
        regime: regime.regime,
        scenes: records.into_iter().map(|r| r.0).collect(),
    };
    let mut json =
        serde_json::to_string_pretty(&manifest).map_err(|e| DatasetError::Format(e.to_string()))?;
    json.push('\n');
    write_atomic(&out_dir.join(MANIFEST_FILE), json.as_bytes())?;
    Ok(manifest)
}

/// The render input of a node as recorded in the manifest.
///
/// Pass-through `clean` nodes are resolved to whatever they forward.
fn input_label(graph: &CausalGraph, node: &str) -> String {
    let mut cur = graph.render_input(node);
    while let Some(p) = cur {
        match graph.node(p) {
            Some(n) if n.operator == OperatorId::Clean => cur = graph.render_input(p),
            _ => return p.to_string(),
        }
    }
    "clean".to_string()
}

/// Outcome of [`verify_dataset`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub files_checked: usize,
    pub renders_checked: usize,
    pub problems: Vec<String>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Check content hashes and node order; with `rerender`, also re-derive every
/// corrupted image from its recorded input and trace and compare bytes.
pub fn verify_dataset(
    dir: &Path,
    rerender: bool,
    workers: Workers,
) -> Result<VerifyReport, DatasetError> {
    let manifest = DatasetManifest::load(dir)?;
    let spec = manifest.load_spec(dir)?;
    let mut report = VerifyReport::default();
    if spec.fingerprint() != manifest.spec_fingerprint {
        report.problems.push("spec fingerprint mismatch".into());
    }
    if spec.graph.topological_order() != manifest.node_order {
        report
            .problems
            .push("node order differs from the spec's topological order".into());
    }
    if manifest.scene_count != manifest.scenes.len() {
        report
            .problems
            .push("scene_count disagrees with scene records".into());
    }

    let per_scene: Vec<(usize, usize, Vec<String>)> =
        workers.try_map(manifest.scenes.len(), |i| {
            let rec = &manifest.scenes[i];
            let mut problems = Vec::new();
            let mut files = 0;
            let mut bytes_of = BTreeMap::new();
            let refs = [
                ("clean", &rec.clean),
                ("mask", &rec.mask),
                ("trace", &rec.trace),
            ]
            .into_iter()
            .map(|(k, f)| (k.to_string(), f))
            .chain(rec.corrupted.iter().map(|c| (c.node.clone(), &c.file)));
            for (key, f) in refs {
                files += 1;
                match fs::read(dir.join(&f.path)) {
                    Ok(b) => {
                        if sha256_hex(&b) != f.sha256 {
                            problems.push(format!("{}: hash mismatch", f.path));
                        }
                        bytes_of.insert(key, b);
                    }
                    Err(e) => problems.push(format!("{}: {e}", f.path)),
                }
            }
            let mut renders = 0;
            if rerender && problems.is_empty() {
                let trace = trace_from_json(&String::from_utf8_lossy(&bytes_of["trace"]))?;
                let decoded = |key: &str, path: &str| -> Result<Image, DatasetError> {
                    let _ = key;
                    read_rgb_png(&dir.join(path))
                };
                for c in &rec.corrupted {
                    let input_path = if c.input == "clean" {
                        rec.clean.path.clone()
                    } else {
                        match rec.corrupted.iter().find(|o| o.node == c.input) {
                            Some(o) => o.file.path.clone(),
                            None => {
                                problems
                                    .push(format!("{}: unknown input {}", c.file.path, c.input));
                                continue;
                            }
                        }
                    };
                    let input = decoded(&c.input, &input_path)?;
                    let params = node_params(&spec.graph, &trace, &c.node)?;
                    let out = ops::apply(&input, &params, render_seed(&trace, &c.node))
                        .map_err(|e| DatasetError::Spec(e.to_string()))?;
                    if encode_rgb_png(&out)? != bytes_of[&c.node] {
                        problems.push(format!("{}: re-render differs", c.file.path));
                    }
                    renders += 1;
                }
            }
            Ok((files, renders, problems))
        })?;
    for (files, renders, problems) in per_scene {
        report.files_checked += files;
        report.renders_checked += renders;
        report.problems.extend(problems);
    }
    Ok(report)
}
