//! Corruption operators.
//!
//! Every operator is a pure function of `(image, params, noise_seed)`. Identity
//! parameters return the input unchanged, and every output sample lies in `[0, 1]`.
//! Rounding assumes the default IEEE-754 round-to-nearest mode.

mod catalog;
mod filters;
mod image;
mod severity;
mod value_noise;

use std::collections::BTreeMap;

use rand_distr::{Distribution as _, StandardNormal};

pub use catalog::{OperatorId, ParamSpec, UnknownOperator};
pub use image::Image;
pub use severity::{
    mse_unit, severity_normalize, similarity, ObservedRange, Severity, PSNR_CAP_DB,
};

use crate::rng;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OpsError {
    #[error("{op}.{param} = {value} is outside [{min}, {max}]")]
    DomainError {
        op: OperatorId,
        param: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("{op} is missing parameter `{param}`")]
    MissingParam { op: OperatorId, param: &'static str },
    #[error("{op} has no parameter `{param}`")]
    UnknownParam { op: OperatorId, param: String },
    #[error("image shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("non-finite sample value")]
    NonFinite,
}

/// Black-point threshold of the glare bright-pass.
pub const GLARE_THRESHOLD: f64 = 0.8;
/// Taps along the motion direction.
pub const MOTION_TAPS: usize = 16;
/// Taps of the radial zoom stage.
pub const ZOOM_TAPS: usize = 8;
/// Defocus radii below this many pixels leave the image unchanged.
pub const DEFOCUS_MIN_RADIUS: f64 = 0.5;

/// Parameters of one operator, values in canonical order (see [`OperatorId::params`]).
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorParams {
    op: OperatorId,
    values: Vec<f64>,
}

impl OperatorParams {
    /// Strict constructor: every value must already lie in its domain.
    pub fn new(op: OperatorId, values: &[f64]) -> Result<Self, OpsError> {
        let specs = op.params();
        if values.len() != specs.len() {
            let param = specs.get(values.len()).map(|s| s.name).unwrap_or("");
            return Err(OpsError::MissingParam { op, param });
        }
        for (spec, &v) in specs.iter().zip(values) {
            if !spec.contains(v) {
                return Err(OpsError::DomainError {
                    op,
                    param: spec.name,
                    value: v,
                    min: spec.min,
                    max: spec.max,
                });
            }
        }
        Ok(OperatorParams {
            op,
            values: values.to_vec(),
        })
    }

    /// Build from a name → value map, clamping out-of-domain values.
    ///
    /// Returns one diagnostic line per clamped value. NaN is rejected.
    pub fn from_map_clamped(
        op: OperatorId,
        map: &BTreeMap<String, f64>,
    ) -> Result<(Self, Vec<String>), OpsError> {
        if let Some(extra) = map.keys().find(|k| op.param(k).is_none()) {
            return Err(OpsError::UnknownParam {
                op,
                param: extra.clone(),
            });
        }
        let mut notes = Vec::new();
        let mut values = Vec::with_capacity(op.params().len());
        for spec in op.params() {
            let v = *map.get(spec.name).ok_or(OpsError::MissingParam {
                op,
                param: spec.name,
            })?;
            if v.is_nan() {
                return Err(OpsError::DomainError {
                    op,
                    param: spec.name,
                    value: v,
                    min: spec.min,
                    max: spec.max,
                });
            }
            let c = spec.clamp(v);
            if c != v {
                notes.push(format!("{op}.{} = {v} clamped to {c}", spec.name));
            }
            values.push(c);
        }
        Ok((OperatorParams { op, values }, notes))
    }

    /// Parameters that leave every image unchanged.
    pub fn identity(op: OperatorId) -> Self {
        OperatorParams {
            op,
            values: op.params().iter().map(|s| s.identity).collect(),
        }
    }

    pub fn op(&self) -> OperatorId {
        self.op
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.op
            .params()
            .iter()
            .position(|s| s.name == name)
            .map(|i| self.values[i])
    }

    pub fn to_map(&self) -> BTreeMap<String, f64> {
        self.op
            .params()
            .iter()
            .zip(&self.values)
            .map(|(s, v)| (s.name.to_string(), *v))
            .collect()
    }

    /// True when the operator is guaranteed to return its input.
    pub fn is_identity(&self) -> bool {
        let v = &self.values;
        match self.op {
            OperatorId::Clean => true,
            OperatorId::Gamma => v[0] == 1.0,
            OperatorId::Blur => v[0] <= BLUR_IDENTITY_SIGMA + 1e-9,
            OperatorId::Defocus => defocus_radius(v[0], v[1]) < DEFOCUS_MIN_RADIUS,
            OperatorId::Lens => v[0] == 0.0,
            OperatorId::Motion => v[0] == 0.0 && v[1] == 0.0,
            OperatorId::Noise => v[0] == 0.0,
            OperatorId::Clouds => v[0] == 0.0,
            OperatorId::Glare => v[0] == -0.5,
        }
    }
}

/// Blur σ at or below this value is treated as no blur.
pub const BLUR_IDENTITY_SIGMA: f64 = 1.0;

/// Disc radius in px for a defocus setting.
pub fn defocus_radius(z: f64, f_stop: f64) -> f64 {
    1.5 * (z - 1.0) * (128.0 / f_stop)
}

/// Apply one operator.
pub fn apply(image: &Image, params: &OperatorParams, noise_seed: u64) -> Result<Image, OpsError> {
    // re-check: fields can only be set through the constructors, but keep apply total
    OperatorParams::new(params.op, &params.values)?;
    if params.is_identity() {
        return Ok(image.clone());
    }
    let v = &params.values;
    let mut out = match params.op {
        OperatorId::Clean => image.clone(),
        OperatorId::Gamma => gamma(image, v[0]),
        OperatorId::Blur => filters::gaussian_blur(image, v[0]),
        OperatorId::Defocus => filters::disc_blur(image, defocus_radius(v[0], v[1])),
        OperatorId::Lens => lens(image, v[0], v[1]),
        OperatorId::Motion => motion(image, v[0], v[1]),
        OperatorId::Noise => noise(image, v[0], noise_seed),
        OperatorId::Clouds => clouds(image, v[0], noise_seed),
        OperatorId::Glare => glare(image, v[0]),
    };
    out.clamp_in_place();
    Ok(out)
}

fn gamma(img: &Image, g: f64) -> Image {
    let mut out = img.clone();
    for v in out.data_mut() {
        *v = v.powf(g);
    }
    out
}

/// Inverse-mapped radial distortion on coordinates normalized to the half-diagonal.
fn lens(img: &Image, distort: f64, disperse: f64) -> Image {
    let (w, h) = img.dims();
    let cx = w as f64 / 2.0;
    let cy = h as f64 / 2.0;
    let half_diag = (cx * cx + cy * cy).sqrt();
    let k = [
        distort * (1.0 + 0.5 * disperse),
        distort,
        distort * (1.0 - 0.5 * disperse),
    ];
    let mut out = Image::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let dx = (x as f64 + 0.5 - cx) / half_diag;
            let dy = (y as f64 + 0.5 - cy) / half_diag;
            let r2 = dx * dx + dy * dy;
            for (c, kc) in k.iter().enumerate() {
                let s = 1.0 + kc * r2;
                let sx = cx + dx * s * half_diag - 0.5;
                let sy = cy + dy * s * half_diag - 0.5;
                out.set(x, y, c, img.sample_bilinear(sx, sy, c));
            }
        }
    }
    out
}

/// Horizontal streak of `distance·width` px followed by a radial zoom of `1 + zoom`.
fn motion(img: &Image, distance: f64, zoom: f64) -> Image {
    let (w, h) = img.dims();
    let mut cur = img.clone();
    if distance > 0.0 {
        // Taps are centered on the pixel; a one-sided streak also shifts the
        // image, and its error is then not monotone in distance.
        let span = distance * w as f64;
        let mut out = Image::new(w, h);
        for y in 0..h {
            for x in 0..w {
                for c in 0..3 {
                    let mut acc = 0.0f64;
                    for i in 0..MOTION_TAPS {
                        let t = span * (i as f64 / (MOTION_TAPS - 1) as f64 - 0.5);
                        acc += cur.sample_bilinear(x as f64 - t, y as f64, c);
                    }
                    out.set(x, y, c, acc / MOTION_TAPS as f64);
                }
            }
        }
        cur = out;
    }
    if zoom > 0.0 {
        let cx = (w as f64 - 1.0) / 2.0;
        let cy = (h as f64 - 1.0) / 2.0;
        let mut out = Image::new(w, h);
        for y in 0..h {
            for x in 0..w {
                for c in 0..3 {
                    let mut acc = 0.0f64;
                    for j in 0..ZOOM_TAPS {
                        let s = 1.0 + zoom * j as f64 / (ZOOM_TAPS - 1) as f64;
                        let sx = cx + (x as f64 - cx) / s;
                        let sy = cy + (y as f64 - cy) / s;
                        acc += cur.sample_bilinear(sx, sy, c);
                    }
                    out.set(x, y, c, acc / ZOOM_TAPS as f64);
                }
            }
        }
        cur = out;
    }
    cur
}

fn noise(img: &Image, scale: f64, seed: u64) -> Image {
    let mut r = rng::rng_from(rng::stream_seed(seed, "noise"));
    let mut out = img.clone();
    for v in out.data_mut() {
        let z: f64 = StandardNormal.sample(&mut r);
        *v = ((*v) + scale * z) as f64;
    }
    out
}

fn clouds(img: &Image, factor: f64, seed: u64) -> Image {
    let (w, h) = img.dims();
    let field = value_noise::fractal_field(
        w,
        h,
        (w as f64 / 4.0).max(1.0),
        rng::stream_seed(seed, "clouds"),
    );
    let mut out = img.clone();
    for (px, n) in out.data_mut().chunks_exact_mut(3).zip(field) {
        let a = factor * n;
        for v in px {
            *v = *v * (1.0 - a) + a;
        }
    }
    out
}

fn glare(img: &Image, mix: f64) -> Image {
    let w = img.width();
    let weight = mix + 0.5;
    let mut bright = img.clone();
    for v in bright.data_mut() {
        *v = (*v - GLARE_THRESHOLD).max(0.0) / (1.0 - GLARE_THRESHOLD);
    }
    let glow = filters::gaussian_blur(&bright, (w as f64 / 32.0).max(0.5));
    let mut out = img.clone();
    for (v, g) in out.data_mut().iter_mut().zip(glow.data()) {
        *v += weight * g;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scene() -> Image {
        Image::from_fn(48, 40, |x, y| {
            let inside = (x as isize - 20).pow(2) + (y as isize - 18).pow(2) < 100;
            if inside {
                [0.95, 0.9, 0.2]
            } else if (x / 6 + y / 6) % 2 == 0 {
                [0.3, 0.35, 0.4]
            } else {
                [0.6, 0.5, 0.45]
            }
        })
    }

    fn params(op: OperatorId, v: &[f64]) -> OperatorParams {
        OperatorParams::new(op, v).unwrap()
    }

    #[test]
    fn identities_are_bit_exact() {
        let img = scene();
        for op in OperatorId::ALL {
            let out = apply(&img, &OperatorParams::identity(op), 99).unwrap();
            assert_eq!(out, img, "{op}");
        }
        assert_eq!(
            apply(&img, &params(OperatorId::Gamma, &[1.0]), 0).unwrap(),
            img
        );
        assert_eq!(
            apply(&img, &params(OperatorId::Clouds, &[0.0]), 5).unwrap(),
            img
        );
        assert_eq!(
            apply(&img, &params(OperatorId::Blur, &[0.7]), 0).unwrap(),
            img
        );
    }

    #[test]
    fn blur_reduces_checkerboard_variance() {
        let img = Image::from_fn(32, 32, |x, y| {
            let v = if (x / 2 + y / 2) % 2 == 0 { 1.0 } else { 0.0 };
            [v, v, v]
        });
        let var = |im: &Image| {
            let d = im.data();
            let m = d.iter().copied().sum::<f64>() / d.len() as f64;
            d.iter().map(|&v| (v - m).powi(2)).sum::<f64>() / d.len() as f64
        };
        let out = apply(&img, &params(OperatorId::Blur, &[5.0]), 0).unwrap();
        assert!(var(&out) < var(&img));
    }

    #[test]
    fn lens_center_fixed() {
        let img = Image::from_fn(65, 65, |x, y| [(x as f64) / 64.0, (y as f64) / 64.0, 0.5]);
        let out = apply(&img, &params(OperatorId::Lens, &[0.1, 0.0]), 0).unwrap();
        assert_eq!(out.pixel(32, 32), img.pixel(32, 32));
        assert_ne!(out, img);
    }

    #[test]
    fn noise_is_seeded_and_scales() {
        let img = scene();
        let a = apply(&img, &params(OperatorId::Noise, &[0.25]), 7).unwrap();
        let b = apply(&img, &params(OperatorId::Noise, &[0.25]), 7).unwrap();
        assert_eq!(a, b);
        let weak = apply(&img, &params(OperatorId::Noise, &[0.05]), 7).unwrap();
        assert!(similarity(&img, &a).unwrap() < similarity(&img, &weak).unwrap());
    }

    #[test]
    fn outputs_bounded() {
        let img = scene();
        let cases = [
            (OperatorId::Gamma, vec![4.0]),
            (OperatorId::Blur, vec![16.0]),
            (OperatorId::Defocus, vec![10.0, 64.0]),
            (OperatorId::Lens, vec![1.0, 1.0]),
            (OperatorId::Motion, vec![0.5, 0.5]),
            (OperatorId::Noise, vec![1.0]),
            (OperatorId::Clouds, vec![1.0]),
            (OperatorId::Glare, vec![0.5]),
        ];
        for (op, v) in cases {
            let out = apply(&img, &params(op, &v), 3).unwrap();
            assert_eq!(out.dims(), img.dims());
            assert!(
                out.data()
                    .iter()
                    .all(|x| x.is_finite() && (0.0..=1.0).contains(x)),
                "{op}"
            );
        }
    }

    #[test]
    fn domain_checks() {
        assert!(matches!(
            OperatorParams::new(OperatorId::Noise, &[1.5]),
            Err(OpsError::DomainError { .. })
        ));
        assert!(matches!(
            OperatorParams::new(OperatorId::Lens, &[0.1]),
            Err(OpsError::MissingParam { .. })
        ));
        let mut m = BTreeMap::new();
        m.insert("sigma".to_string(), 40.0);
        let (p, notes) = OperatorParams::from_map_clamped(OperatorId::Blur, &m).unwrap();
        assert_eq!(p.values(), &[16.0]);
        assert_eq!(notes.len(), 1);
    }
}
