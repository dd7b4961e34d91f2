use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveBin {
    pub lo: f64,
    pub hi: f64,
    pub center: f64,
    /// `None` for empty bins.
    pub mean: Option<f64>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeverityCurve {
    pub bins: Vec<CurveBin>,
}

impl SeverityCurve {
    pub fn total_count(&self) -> usize {
        self.bins.iter().map(|b| b.count).sum()
    }

    /// Means of populated bins, in bin order.
    pub fn populated_means(&self) -> Vec<f64> {
        self.bins.iter().filter_map(|b| b.mean).collect()
    }
}

/// Bin index of a normalized severity; values outside `[0, 1]` are clamped.
pub fn bin_index(severity: f64, n_bins: usize) -> usize {
    let s = severity.clamp(0.0, 1.0);
    ((s * n_bins as f64).floor() as usize).min(n_bins - 1)
}

/// Equal-width bins on `[0, 1]` over `(normalized severity, metric)` records.
///
/// Non-finite records are ignored. `n_bins = 0` is treated as 1.
pub fn severity_curve(records: &[(f64, f64)], n_bins: usize) -> SeverityCurve {
    let n_bins = n_bins.max(1);
    let mut sums = vec![0.0; n_bins];
    let mut counts = vec![0usize; n_bins];
    for &(s, v) in records {
        if !s.is_finite() || !v.is_finite() {
            continue;
        }
        let b = bin_index(s, n_bins);
        sums[b] += v;
        counts[b] += 1;
    }
    let width = 1.0 / n_bins as f64;
    let bins = (0..n_bins)
        .map(|b| CurveBin {
            lo: b as f64 * width,
            hi: (b + 1) as f64 * width,
            center: (b as f64 + 0.5) * width,
            mean: (counts[b] > 0).then(|| sums[b] / counts[b] as f64),
            count: counts[b],
        })
        .collect();
    SeverityCurve { bins }
}

/// Min-max rescale to `[0, 1]`; a constant input maps to 0.
pub fn min_max(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .map(|&v| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 })
        .collect()
}
