//! Procedural 2D multi-object scenes with per-object ground-truth masks.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::ops::Image;
use crate::rng;

/// Placement attempts per object before the scene is re-seeded.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 100;
/// Re-seeds before a non-overlapping layout is declared impossible.
pub const MAX_RESEEDS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Circle,
    Square,
    Triangle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SceneConfig {
    pub width: usize,
    pub height: usize,
    /// Inclusive `[min, max]` object count.
    pub n_objects: (usize, usize),
    pub shapes: Vec<Shape>,
    /// Inclusive `[min, max]` object size in px (radius / half side / circumradius).
    pub size: (f64, f64),
    pub palette: Vec<[f64; 3]>,
    pub background: [f64; 3],
    pub allow_occlusion: bool,
    /// Give every object of a scene its own palette color while the palette lasts.
    pub distinct_colors: bool,
}

impl Default for SceneConfig {
    fn default() -> Self {
        SceneConfig {
            width: 128,
            height: 128,
            n_objects: (3, 6),
            shapes: vec![Shape::Circle, Shape::Square, Shape::Triangle],
            size: (8.0, 16.0),
            palette: default_palette(),
            background: [0.42, 0.42, 0.42],
            allow_occlusion: true,
            distinct_colors: true,
        }
    }
}

/// Well-separated saturated colors, including bright ones the glare pass picks up.
pub fn default_palette() -> Vec<[f64; 3]> {
    vec![
        [0.90, 0.15, 0.15],
        [0.15, 0.75, 0.20],
        [0.15, 0.30, 0.90],
        [0.95, 0.90, 0.20],
        [0.95, 0.95, 0.95],
        [0.60, 0.20, 0.80],
        [0.10, 0.80, 0.85],
        [0.95, 0.55, 0.10],
    ]
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SceneError {
    #[error("invalid scene config: {0}")]
    ConfigError(String),
}

impl SceneConfig {
    pub fn validate(&self) -> Result<(), SceneError> {
        let bad = |m: String| Err(SceneError::ConfigError(m));
        if self.width == 0 || self.height == 0 {
            return bad("canvas must be non-empty".into());
        }
        if self.n_objects.0 < 1 || self.n_objects.0 > self.n_objects.1 {
            return bad(format!(
                "object count range {:?} needs 1 <= min <= max",
                self.n_objects
            ));
        }
        if self.n_objects.1 > 255 {
            return bad("at most 255 objects fit an 8-bit mask".into());
        }
        if !(self.size.0 > 0.0 && self.size.0 <= self.size.1 && self.size.1.is_finite()) {
            return bad(format!("size range {:?} needs 0 < min <= max", self.size));
        }
        if 2.0 * self.size.1 > self.width.min(self.height) as f64 {
            return bad(format!(
                "size up to {} does not fit a {}x{} canvas",
                self.size.1, self.width, self.height
            ));
        }
        if self.shapes.is_empty() {
            return bad("shape set is empty".into());
        }
        if self.palette.is_empty() {
            return bad("palette is empty".into());
        }
        Ok(())
    }
}

/// One object, in back-to-front order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacedShape {
    pub shape: Shape,
    pub cx: f64,
    pub cy: f64,
    pub size: f64,
    pub color: [f64; 3],
}

impl PlacedShape {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let dx = x - self.cx;
        let dy = y - self.cy;
        match self.shape {
            Shape::Circle => dx * dx + dy * dy <= self.size * self.size,
            Shape::Square => dx.abs() <= self.size && dy.abs() <= self.size,
            Shape::Triangle => {
                // upward equilateral triangle with circumradius `size`
                let r = self.size;
                let h = 1.5 * r;
                let top = -r;
                if dy < top || dy > top + h {
                    return false;
                }
                let half = (dy - top) / h * (r * 3f64.sqrt() / 2.0);
                dx.abs() <= half
            }
        }
    }

    /// Inclusive pixel bounding box `(x0, y0, x1, y1)` of pixels whose centers may be inside.
    pub fn pixel_bbox(&self) -> (i64, i64, i64, i64) {
        let s = self.size;
        let (top, bottom) = match self.shape {
            Shape::Triangle => (self.cy - s, self.cy + 0.5 * s),
            _ => (self.cy - s, self.cy + s),
        };
        let half_w = match self.shape {
            Shape::Triangle => s * 3f64.sqrt() / 2.0,
            _ => s,
        };
        let lo = |v: f64| (v - 0.5).ceil() as i64;
        let hi = |v: f64| (v - 0.5).floor() as i64;
        (
            lo(self.cx - half_w),
            lo(top),
            hi(self.cx + half_w),
            hi(bottom),
        )
    }
}

/// Integer label raster: 0 is background, `1..=K` are objects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskMap {
    width: usize,
    height: usize,
    labels: Vec<u16>,
}

impl MaskMap {
    pub fn new(width: usize, height: usize, labels: Vec<u16>) -> Self {
        assert_eq!(labels.len(), width * height, "label raster size");
        MaskMap {
            width,
            height,
            labels,
        }
    }

    pub fn background(width: usize, height: usize) -> Self {
        MaskMap {
            width,
            height,
            labels: vec![0; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn labels(&self) -> &[u16] {
        &self.labels
    }

    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.labels[y * self.width + x]
    }

    /// Distinct non-zero labels, ascending.
    pub fn object_ids(&self) -> Vec<u16> {
        let mut seen = vec![false; u16::MAX as usize + 1];
        for &l in &self.labels {
            seen[l as usize] = true;
        }
        (1..=u16::MAX).filter(|&l| seen[l as usize]).collect()
    }

    /// Apply `f` to every label (0 is passed through `f` as well).
    pub fn relabel(&self, f: impl Fn(u16) -> u16) -> MaskMap {
        MaskMap {
            width: self.width,
            height: self.height,
            labels: self.labels.iter().map(|&l| f(l)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneMetadata {
    pub scene_id: u64,
    pub seed: u64,
    /// Visible objects, index `i` has label `i + 1`.
    pub objects: Vec<PlacedShape>,
}

impl SceneMetadata {
    pub fn object_count(&self) -> usize {
        self.objects.len()
    }
}

/// Rasterize shapes back to front.
///
/// The image is 2×2 supersampled; the mask takes the topmost shape at each pixel
/// center. Shapes without visible pixels are dropped and labels compacted; the
/// returned list holds the surviving shapes in label order.
pub fn render_shapes(
    width: usize,
    height: usize,
    background: [f64; 3],
    shapes: &[PlacedShape],
) -> (Image, MaskMap, Vec<PlacedShape>) {
    let top_at = |x: f64, y: f64| shapes.iter().rposition(|s| s.contains(x, y));
    let mut raw = vec![0u16; width * height];
    let mut counts = vec![0usize; shapes.len()];
    for y in 0..height {
        for x in 0..width {
            if let Some(i) = top_at(x as f64 + 0.5, y as f64 + 0.5) {
                raw[y * width + x] = i as u16 + 1;
                counts[i] += 1;
            }
        }
    }
    let mut remap = vec![0u16; shapes.len() + 1];
    let mut visible = Vec::new();
    for (i, &c) in counts.iter().enumerate() {
        if c > 0 {
            visible.push(shapes[i]);
            remap[i + 1] = visible.len() as u16;
        }
    }
    let labels = raw.iter().map(|&l| remap[l as usize]).collect();

    const SUB: [f64; 2] = [0.25, 0.75];
    let image = Image::from_fn(width, height, |x, y| {
        let mut acc = [0.0f64; 3];
        for sy in SUB {
            for sx in SUB {
                let c = match top_at(x as f64 + sx, y as f64 + sy) {
                    Some(i) => shapes[i].color,
                    None => background,
                };
                for k in 0..3 {
                    acc[k] += c[k];
                }
            }
        }
        acc.map(|v| v / 4.0)
    });
    (image, MaskMap::new(width, height, labels), visible)
}

fn boxes_overlap(a: (i64, i64, i64, i64), b: (i64, i64, i64, i64)) -> bool {
    a.0 <= b.2 && b.0 <= a.2 && a.1 <= b.3 && b.1 <= a.3
}

/// Generate one scene. Deterministic in `(config, scene_id, global_seed)`.
pub fn generate_scene(
    config: &SceneConfig,
    scene_id: u64,
    global_seed: u64,
) -> Result<(Image, MaskMap, SceneMetadata), SceneError> {
    config.validate()?;
    let seed = rng::stream_seed(rng::scene_seed(global_seed, scene_id), "scene");
    for attempt in 0..MAX_RESEEDS {
        let mut r = rng::rng_from(rng::mix(seed, attempt as u64));
        if let Some(shapes) = place(config, &mut r) {
            let (image, mask, objects) =
                render_shapes(config.width, config.height, config.background, &shapes);
            return Ok((
                image,
                mask,
                SceneMetadata {
                    scene_id,
                    seed,
                    objects,
                },
            ));
        }
    }
    Err(SceneError::ConfigError(format!(
        "could not place {} non-overlapping objects after {MAX_RESEEDS} re-seeds",
        config.n_objects.1
    )))
}

fn place(config: &SceneConfig, r: &mut rng::Rng) -> Option<Vec<PlacedShape>> {
    let n = r.random_range(config.n_objects.0..=config.n_objects.1);
    let mut shapes: Vec<PlacedShape> = Vec::with_capacity(n);
    for _ in 0..n {
        let mut placed = false;
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let size = if config.size.0 == config.size.1 {
                config.size.0
            } else {
                r.random_range(config.size.0..=config.size.1)
            };
            let cx = r.random_range(size..=config.width as f64 - size);
            let cy = r.random_range(size..=config.height as f64 - size);
            let shape = config.shapes[r.random_range(0..config.shapes.len())];
            let free: Vec<&[f64; 3]> = if config.distinct_colors {
                config
                    .palette
                    .iter()
                    .filter(|c| shapes.iter().all(|o| o.color != **c))
                    .collect()
            } else {
                Vec::new()
            };
            let color = if free.is_empty() {
                config.palette[r.random_range(0..config.palette.len())]
            } else {
                *free[r.random_range(0..free.len())]
            };
            let s = PlacedShape {
                shape,
                cx,
                cy,
                size,
                color,
            };
            if config.allow_occlusion
                || shapes
                    .iter()
                    .all(|o| !boxes_overlap(o.pixel_bbox(), s.pixel_bbox()))
            {
                shapes.push(s);
                placed = true;
                break;
            }
        }
        if !placed {
            return None;
        }
    }
    Some(shapes)
}
