//! Reference predictors and the on-disk prediction layout.
//!
//! ```text
//! <pred>/scenes/<id>/<variant>/pred_masks.png
//! <pred>/scenes/<id>/<variant>/recon.png
//! ```
//!
//! `variant` is `clean` or a corruption node name. Either file may be absent.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::dataset::{
    encode_mask_png, encode_rgb_png, read_mask_png, read_rgb_png, scene_dir_name, write_file,
    DatasetManifest,
};
use crate::exec::Workers;
use crate::ops::Image;
use crate::scene::{default_palette, MaskMap, SceneConfig};

pub const PRED_MASKS: &str = "pred_masks.png";
pub const RECON: &str = "recon.png";
pub const CLEAN_VARIANT: &str = "clean";

/// Directory holding one (scene, variant) prediction.
pub fn prediction_dir(root: &Path, scene_id: u64, variant: &str) -> PathBuf {
    root.join("scenes")
        .join(scene_dir_name(scene_id))
        .join(variant)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Prediction {
    pub masks: Option<MaskMap>,
    pub recon: Option<Image>,
}

/// Load one prediction; missing files yield `None` fields.
pub fn read_prediction(root: &Path, scene_id: u64, variant: &str) -> Result<Prediction, EvalError> {
    let dir = prediction_dir(root, scene_id, variant);
    let masks_path = dir.join(PRED_MASKS);
    let recon_path = dir.join(RECON);
    let masks = if masks_path.is_file() {
        Some(read_mask_png(&masks_path)?)
    } else {
        None
    };
    let recon = if recon_path.is_file() {
        Some(read_rgb_png(&recon_path)?)
    } else {
        None
    };
    Ok(Prediction { masks, recon })
}

pub fn write_prediction(
    root: &Path,
    scene_id: u64,
    variant: &str,
    pred: &Prediction,
) -> Result<(), EvalError> {
    let dir = prediction_dir(root, scene_id, variant);
    if let Some(m) = &pred.masks {
        write_file(&dir.join(PRED_MASKS), &encode_mask_png(m)?)?;
    }
    if let Some(r) = &pred.recon {
        write_file(&dir.join(RECON), &encode_rgb_png(r)?)?;
    }
    Ok(())
}

/// Color-threshold segmenter: nearest palette color, then 4-connected components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FragileConfig {
    pub palette: Vec<[f64; 3]>,
    pub background: [f64; 3],
    /// Pixels farther than this (RGB Euclidean, `[0, 1]` units) from every
    /// palette color are background.
    pub threshold: f64,
    /// Components smaller than this many pixels are background.
    pub min_component: usize,
    /// Components whose mean color step across their outline (over two pixels)
    /// is below this are background: the segmenter trusts crisp edges only.
    pub min_edge: f64,
}

impl Default for FragileConfig {
    fn default() -> Self {
        let scene = SceneConfig::default();
        FragileConfig {
            palette: default_palette(),
            background: scene.background,
            threshold: 0.07,
            min_component: 40,
            min_edge: 0.1,
        }
    }
}

fn dist2(a: [f64; 3], b: [f64; 3]) -> f64 {
    (0..3).map(|k| (a[k] - b[k]).powi(2)).sum()
}

/// Segment and reconstruct one image with the fragile predictor.
pub fn fragile_predict(image: &Image, cfg: &FragileConfig) -> Prediction {
    let (w, h) = image.dims();
    // class 0 = background, k = palette[k - 1]
    let t2 = cfg.threshold * cfg.threshold;
    let class: Vec<usize> = (0..w * h)
        .map(|i| {
            let px = image.pixel(i % w, i / w);
            let mut best = (dist2(px, cfg.background), 0);
            for (k, &c) in cfg.palette.iter().enumerate() {
                let d = dist2(px, c);
                if d < best.0 {
                    best = (d, k + 1);
                }
            }
            if best.0 > t2 {
                0
            } else {
                best.1
            }
        })
        .collect();

    let mut labels = vec![0u16; w * h];
    let mut visited = vec![false; w * h];
    let mut next: u16 = 1;
    let mut stack = Vec::new();
    let mut component = Vec::new();
    for start in 0..w * h {
        if visited[start] || class[start] == 0 {
            continue;
        }
        let c = class[start];
        component.clear();
        stack.push(start);
        visited[start] = true;
        while let Some(i) = stack.pop() {
            component.push(i);
            let (x, y) = (i % w, i / w);
            let mut visit = |j: usize| {
                if !visited[j] && class[j] == c {
                    visited[j] = true;
                    stack.push(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }
        if component.len() >= cfg.min_component
            && edge_step(image, &class, c, &component) >= cfg.min_edge
            && next < u16::MAX
        {
            for &i in &component {
                labels[i] = next;
            }
            next += 1;
        }
    }
    let recon = Image::from_fn(w, h, |x, y| {
        let i = y * w + x;
        if labels[i] == 0 {
            cfg.background
        } else {
            cfg.palette[class[i] - 1]
        }
    });
    Prediction {
        masks: Some(MaskMap::new(w, h, labels)),
        recon: Some(recon),
    }
}

/// Mean color distance between each outline pixel of a component and the pixel
/// two steps outward, over every outward 4-neighbor direction inside the image.
fn edge_step(image: &Image, class: &[usize], c: usize, component: &[usize]) -> f64 {
    let (w, h) = image.dims();
    let (mut sum, mut n) = (0.0, 0usize);
    for &i in component {
        let (x, y) = ((i % w) as i64, (i / w) as i64);
        for (dx, dy) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
            let (nx, ny) = (x + dx, y + dy);
            let (fx, fy) = (x + 2 * dx, y + 2 * dy);
            if fx < 0 || fy < 0 || fx >= w as i64 || fy >= h as i64 {
                continue;
            }
            if class[ny as usize * w + nx as usize] == c {
                continue;
            }
            let a = image.pixel(x as usize, y as usize);
            let b = image.pixel(fx as usize, fy as usize);
            sum += dist2(a, b).sqrt();
            n += 1;
        }
    }
    if n == 0 {
        f64::INFINITY
    } else {
        sum / n as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Predictor {
    /// Ground-truth masks (labels reversed) and the clean image.
    Oracle,
    Fragile(FragileConfig),
}

impl Predictor {
    pub fn name(&self) -> &'static str {
        match self {
            Predictor::Oracle => "oracle",
            Predictor::Fragile(_) => "fragile",
        }
    }
}

/// Run a reference predictor over every clean and corrupted image of a dataset.
/// Returns the number of predictions written.
pub fn write_predictions(
    dataset: &Path,
    predictor: &Predictor,
    out: &Path,
    workers: Workers,
) -> Result<usize, EvalError> {
    let manifest = DatasetManifest::load(dataset)?;
    let counts = workers.try_map(manifest.scenes.len(), |i| {
        let rec = &manifest.scenes[i];
        let mut variants = vec![(CLEAN_VARIANT.to_string(), rec.clean.path.clone())];
        variants.extend(
            rec.corrupted
                .iter()
                .map(|c| (c.node.clone(), c.file.path.clone())),
        );
        let (gt, clean) = match predictor {
            Predictor::Oracle => (
                Some(read_mask_png(&dataset.join(&rec.mask.path))?),
                Some(read_rgb_png(&dataset.join(&rec.clean.path))?),
            ),
            Predictor::Fragile(_) => (None, None),
        };
        for (variant, path) in &variants {
            let pred = match predictor {
                Predictor::Oracle => {
                    let gt = gt.as_ref().expect("loaded above");
                    let top = gt.object_ids().last().copied().unwrap_or(0);
                    Prediction {
                        masks: Some(gt.relabel(|l| if l == 0 { 0 } else { top + 1 - l })),
                        recon: clean.clone(),
                    }
                }
                Predictor::Fragile(cfg) => {
                    fragile_predict(&read_rgb_png(&dataset.join(path))?, cfg)
                }
            };
            write_prediction(out, rec.scene_id, variant, &pred)?;
        }
        Ok::<usize, EvalError>(variants.len())
    })?;
    Ok(counts.into_iter().sum())
}
