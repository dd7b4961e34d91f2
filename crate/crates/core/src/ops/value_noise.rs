//! Fractal value noise for the clouds operator.

use crate::rng::mix;

pub(crate) const OCTAVES: u32 = 4;
pub(crate) const PERSISTENCE: f64 = 0.5;

#[inline]
fn lattice(seed: u64, octave: u32, ix: i64, iy: i64) -> f64 {
    let key = ((ix as u64) << 32) ^ (iy as u64 & 0xffff_ffff);
    let h = mix(mix(seed, u64::from(octave)), key);
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[inline]
fn smooth(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

fn octave_value(seed: u64, octave: u32, x: f64, y: f64) -> f64 {
    let x0 = x.floor();
    let y0 = y.floor();
    let (ix, iy) = (x0 as i64, y0 as i64);
    let tx = smooth(x - x0);
    let ty = smooth(y - y0);
    let a = lattice(seed, octave, ix, iy);
    let b = lattice(seed, octave, ix + 1, iy);
    let c = lattice(seed, octave, ix, iy + 1);
    let d = lattice(seed, octave, ix + 1, iy + 1);
    let top = a + (b - a) * tx;
    let bottom = c + (d - c) * tx;
    top + (bottom - top) * ty
}

/// Noise field in `[0, 1]`, row-major, sampled at pixel centers.
///
/// Octave `o` has period `base_period / 2^o` px and amplitude `0.5^o`; the sum is
/// divided by the total amplitude.
pub(crate) fn fractal_field(width: usize, height: usize, base_period: f64, seed: u64) -> Vec<f64> {
    let amps: Vec<f64> = (0..OCTAVES).map(|o| PERSISTENCE.powi(o as i32)).collect();
    let total: f64 = amps.iter().sum();
    let mut out = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            let mut v = 0.0;
            for (o, amp) in amps.iter().enumerate() {
                let period = base_period / f64::from(1u32 << o);
                let px = (x as f64 + 0.5) / period;
                let py = (y as f64 + 0.5) / period;
                v += amp * octave_value(seed, o as u32, px, py);
            }
            out.push((v / total).clamp(0.0, 1.0));
        }
    }
    out
}
