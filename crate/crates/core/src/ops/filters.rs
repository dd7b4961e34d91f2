//! Convolution helpers shared by the blur-type operators.

use super::Image;

/// Mirror index without repeating the edge sample (`dcb|abcd|cba`).
#[inline]
pub(crate) fn reflect(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let m = i.rem_euclid(period);
    if m >= n as isize {
        (period - m) as usize
    } else {
        m as usize
    }
}

/// Normalized Gaussian taps for offsets `-r..=r`, `r = ceil(3σ)`.
pub(crate) fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let r = (3.0 * sigma).ceil().max(0.0) as isize;
    let w: Vec<f64> = (-r..=r)
        .map(|d| (-((d * d) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = w.iter().sum();
    w.iter().map(|v| v / total).collect()
}

/// Separable Gaussian blur with reflect padding. No identity shortcut.
pub(crate) fn gaussian_blur(img: &Image, sigma: f64) -> Image {
    let k = gaussian_kernel(sigma);
    let r = (k.len() / 2) as isize;
    let (w, h) = img.dims();
    let mut tmp = Image::new(w, h);
    for y in 0..h {
        for x in 0..w {
            for c in 0..3 {
                let mut acc = 0.0f64;
                for (j, kv) in k.iter().enumerate() {
                    let sx = reflect(x as isize + j as isize - r, w);
                    acc += kv * img.get(sx, y, c);
                }
                tmp.set(x, y, c, acc);
            }
        }
    }
    let mut out = Image::new(w, h);
    for y in 0..h {
        for x in 0..w {
            for c in 0..3 {
                let mut acc = 0.0f64;
                for (j, kv) in k.iter().enumerate() {
                    let sy = reflect(y as isize + j as isize - r, h);
                    acc += kv * tmp.get(x, sy, c);
                }
                out.set(x, y, c, acc);
            }
        }
    }
    out.clamp_in_place();
    out
}

/// Uniform disc ("bokeh") blur of radius `radius` px with reflect padding.
///
/// Each kernel row is a horizontal span, so the sum uses per-row prefix sums.
pub(crate) fn disc_blur(img: &Image, radius: f64) -> Image {
    let (w, h) = img.dims();
    let r = radius.floor() as isize;
    let half_widths: Vec<isize> = (-r..=r)
        .map(|dy| {
            let rem = radius * radius - (dy * dy) as f64;
            rem.max(0.0).sqrt().floor() as isize
        })
        .collect();
    let taps: f64 = half_widths.iter().map(|hw| (2 * hw + 1) as f64).sum();
    let ext = w + 2 * r as usize;

    // prefix[c][row][i] = sum of the first i samples of the reflected row
    let mut prefix = vec![vec![0.0f64; (ext + 1) * h]; 3];
    for y in 0..h {
        for (c, plane) in prefix.iter_mut().enumerate() {
            let row = &mut plane[y * (ext + 1)..(y + 1) * (ext + 1)];
            for i in 0..ext {
                let sx = reflect(i as isize - r, w);
                row[i + 1] = row[i] + img.get(sx, y, c);
            }
        }
    }

    let mut out = Image::new(w, h);
    for y in 0..h {
        for x in 0..w {
            for (c, plane) in prefix.iter().enumerate() {
                let mut acc = 0.0f64;
                for (k, hw) in half_widths.iter().enumerate() {
                    let sy = reflect(y as isize + k as isize - r, h);
                    let row = &plane[sy * (ext + 1)..(sy + 1) * (ext + 1)];
                    // extended index of source x is x + r
                    let lo = (x as isize + r - hw) as usize;
                    let hi = (x as isize + r + hw + 1) as usize;
                    acc += row[hi] - row[lo];
                }
                out.set(x, y, c, acc / taps);
            }
        }
    }
    out.clamp_in_place();
    out
}
