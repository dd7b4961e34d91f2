use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::rng;

pub const DEFAULT_RESAMPLES: usize = 1000;

/// Percentile bootstrap interval of the mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapCi {
    pub mean: f64,
    /// Half the distance between the 2.5th and 97.5th percentiles of resample means.
    pub half_width: f64,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub n_boot: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Linear-interpolation percentile of sorted data, `q` in `[0, 1]`.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

/// Bootstrap CI of the mean. Resample `b` uses its own seed, so the result
/// depends only on `(values, n_boot, seed)`.
pub fn bootstrap_ci(values: &[f64], n_boot: usize, seed: u64) -> Result<BootstrapCi, EvalError> {
    if values.is_empty() {
        return Err(EvalError::EmptySample);
    }
    let m = mean(values);
    let n = values.len();
    if n == 1 || n_boot == 0 {
        let warning =
            format!("bootstrap over {n} sample(s) and {n_boot} resample(s) is degenerate");
        log::warn!("{warning}");
        return Ok(BootstrapCi {
            mean: m,
            half_width: 0.0,
            lo: m,
            hi: m,
            n,
            n_boot,
            warning: Some(warning),
        });
    }
    let base = rng::stream_seed(seed, "bootstrap");
    let mut means: Vec<f64> = (0..n_boot)
        .map(|b| {
            let mut r = rng::rng_from(rng::mix(base, b as u64));
            let s: f64 = (0..n).map(|_| values[r.random_range(0..n)]).sum();
            s / n as f64
        })
        .collect();
    means.sort_by(f64::total_cmp);
    let lo = percentile(&means, 0.025);
    let hi = percentile(&means, 0.975);
    Ok(BootstrapCi {
        mean: m,
        half_width: ((hi - lo) / 2.0).max(0.0),
        lo,
        hi,
        n,
        n_boot,
        warning: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_degenerate() {
        let ci = bootstrap_ci(&[0.3; 50], 200, 1).unwrap();
        assert_eq!(ci.half_width, 0.0);
        let one = bootstrap_ci(&[2.0], 1000, 1).unwrap();
        assert_eq!((one.mean, one.half_width), (2.0, 0.0));
        assert!(one.warning.is_some());
        assert!(matches!(
            bootstrap_ci(&[], 10, 0),
            Err(EvalError::EmptySample)
        ));
    }

    #[test]
    fn seeded() {
        let v: Vec<f64> = (0..100).map(|i| (i as f64).sin()).collect();
        assert_eq!(
            bootstrap_ci(&v, 300, 9).unwrap(),
            bootstrap_ci(&v, 300, 9).unwrap()
        );
        assert_ne!(
            bootstrap_ci(&v, 300, 9).unwrap(),
            bootstrap_ci(&v, 300, 10).unwrap()
        );
    }

    #[test]
    fn percentile_interpolates() {
        assert_eq!(percentile(&[0.0, 10.0], 0.25), 2.5);
        assert_eq!(percentile(&[1.0, 2.0, 3.0], 1.0), 3.0);
    }
}
