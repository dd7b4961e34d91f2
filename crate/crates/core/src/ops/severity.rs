use serde::{Deserialize, Serialize};

use super::{Image, OperatorId, OperatorParams, OpsError};

/// PSNR reported for identical images.
pub const PSNR_CAP_DB: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Severity {
    /// The operator's primary parameter.
    pub raw: f64,
    /// Min-max normalized over a sample set, in `[0, 1]`.
    pub normalized: f64,
}

/// Per-parameter `(min, max)` observed over a sample set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservedRange {
    pub op: OperatorId,
    pub bounds: Vec<(f64, f64)>,
}

impl ObservedRange {
    pub fn new(op: OperatorId, bounds: Vec<(f64, f64)>) -> Self {
        ObservedRange { op, bounds }
    }

    pub fn from_samples<'a>(
        op: OperatorId,
        samples: impl IntoIterator<Item = &'a OperatorParams>,
    ) -> Self {
        let n = op.params().len();
        let mut bounds = vec![(f64::INFINITY, f64::NEG_INFINITY); n];
        for p in samples {
            for (b, &v) in bounds.iter_mut().zip(p.values()) {
                b.0 = b.0.min(v);
                b.1 = b.1.max(v);
            }
        }
        ObservedRange { op, bounds }
    }
}

/// Min-max normalize a parameter setting against the range seen in a sample set.
///
/// Each parameter is oriented so that 0 is its identity end: a parameter whose
/// identity sits at the top of its domain (defocus `f_stop`) is flipped.
/// Multi-parameter operators average the per-parameter values. A degenerate
/// (empty or zero-width) range contributes 0.
pub fn severity_normalize(params: &OperatorParams, observed: &ObservedRange) -> Severity {
    let raw = params.values().first().copied().unwrap_or(0.0);
    if params.values().is_empty() {
        return Severity {
            raw,
            normalized: 0.0,
        };
    }
    let parts: Vec<f64> = params
        .values()
        .iter()
        .zip(&observed.bounds)
        .zip(params.op().params())
        .map(|((&v, &(lo, hi)), spec)| {
            if hi <= lo {
                return 0.0;
            }
            let t = ((v - lo) / (hi - lo)).clamp(0.0, 1.0);
            if spec.identity >= spec.max {
                1.0 - t
            } else {
                t
            }
        })
        .collect();
    let normalized = parts.iter().sum::<f64>() / parts.len() as f64;
    Severity { raw, normalized }
}

/// Mean squared error on `[0, 1]` samples.
pub fn mse_unit(a: &Image, b: &Image) -> Result<f64, OpsError> {
    a.check_same_shape(b)?;
    let n = a.data().len();
    if n == 0 {
        return Ok(0.0);
    }
    let sum: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| (x - y).powi(2))
        .sum();
    Ok(sum / n as f64)
}

/// PSNR in dB for `[0, 1]` data, capped at [`PSNR_CAP_DB`].
pub fn similarity(a: &Image, b: &Image) -> Result<f64, OpsError> {
    let mse = mse_unit(a, b)?;
    if mse == 0.0 {
        return Ok(PSNR_CAP_DB);
    }
    Ok((10.0 * (1.0 / mse).log10()).min(PSNR_CAP_DB))
}
