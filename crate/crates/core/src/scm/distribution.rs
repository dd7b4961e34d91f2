use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::ScmError;

/// Tolerance on mixture weight sums.
pub const WEIGHT_TOLERANCE: f64 = 1e-9;

/// A univariate distribution over reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Distribution {
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// `|z|` with `z ~ Normal(0, scale²)`.
    HalfNormal {
        scale: f64,
    },
    Normal {
        mean: f64,
        sd: f64,
    },
    /// Equiprobable over a finite ordered set.
    DiscreteUniform {
        values: Vec<f64>,
    },
    PointMass {
        value: f64,
    },
    Mixture {
        components: Vec<(f64, Distribution)>,
    },
}

impl Distribution {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self, ScmError> {
        let d = Distribution::Uniform { lo, hi };
        d.validate()?;
        Ok(d)
    }

    pub fn half_normal(scale: f64) -> Result<Self, ScmError> {
        let d = Distribution::HalfNormal { scale };
        d.validate()?;
        Ok(d)
    }

    pub fn normal(mean: f64, sd: f64) -> Result<Self, ScmError> {
        let d = Distribution::Normal { mean, sd };
        d.validate()?;
        Ok(d)
    }

    pub fn discrete(values: Vec<f64>) -> Result<Self, ScmError> {
        let d = Distribution::DiscreteUniform { values };
        d.validate()?;
        Ok(d)
    }

    pub fn point(value: f64) -> Self {
        Distribution::PointMass { value }
    }

    pub fn mixture(components: Vec<(f64, Distribution)>) -> Result<Self, ScmError> {
        let d = Distribution::Mixture { components };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), ScmError> {
        let bad = |msg: String| Err(ScmError::InvalidDistribution(msg));
        match self {
            Distribution::Uniform { lo, hi } => {
                if !lo.is_finite() || !hi.is_finite() || lo > hi {
                    return bad(format!("uniform({lo}, {hi}) needs finite lo <= hi"));
                }
            }
            Distribution::HalfNormal { scale } => {
                if !scale.is_finite() || *scale < 0.0 {
                    return bad(format!("halfnormal({scale}) needs a finite scale >= 0"));
                }
            }
            Distribution::Normal { mean, sd } => {
                if !mean.is_finite() || !sd.is_finite() || *sd < 0.0 {
                    return bad(format!(
                        "normal({mean}, {sd}) needs finite mean and sd >= 0"
                    ));
                }
            }
            Distribution::DiscreteUniform { values } => {
                if values.is_empty() {
                    return bad("discrete() needs at least one value".into());
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return bad("discrete() values must be finite".into());
                }
                if values.windows(2).any(|w| w[0] >= w[1]) {
                    return bad("discrete() values must be strictly increasing".into());
                }
            }
            Distribution::PointMass { value } => {
                if !value.is_finite() {
                    return bad(format!("point({value}) must be finite"));
                }
            }
            Distribution::Mixture { components } => {
                if components.is_empty() {
                    return bad("mixture needs at least one component".into());
                }
                let mut total = 0.0;
                for (w, d) in components {
                    if !w.is_finite() || *w < 0.0 {
                        return bad(format!("mixture weight {w} must be finite and >= 0"));
                    }
                    total += w;
                    d.validate()?;
                }
                if (total - 1.0).abs() > WEIGHT_TOLERANCE {
                    return bad(format!("mixture weights sum to {total}, expected 1"));
                }
            }
        }
        Ok(())
    }

    /// Draw one value.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Distribution::Uniform { lo, hi } => {
                if lo == hi {
                    *lo
                } else {
                    let u: f64 = rng.random();
                    lo + (hi - lo) * u
                }
            }
            Distribution::HalfNormal { scale } => {
                let z: f64 = rng.sample(StandardNormal);
                (z * scale).abs()
            }
            Distribution::Normal { mean, sd } => {
                let z: f64 = rng.sample(StandardNormal);
                mean + sd * z
            }
            Distribution::DiscreteUniform { values } => values[rng.random_range(0..values.len())],
            Distribution::PointMass { value } => *value,
            Distribution::Mixture { components } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (w, d) in components {
                    acc += w;
                    if u < acc {
                        return d.sample(rng);
                    }
                }
                // rounding left u above the cumulative total; take the last weighted component
                let (_, d) = components
                    .iter()
                    .rev()
                    .find(|(w, _)| *w > 0.0)
                    .unwrap_or(&components[components.len() - 1]);
                d.sample(rng)
            }
        }
    }

    /// Closed support hull `[lo, hi]`, with infinities for unbounded tails.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Distribution::Uniform { lo, hi } => (*lo, *hi),
            Distribution::HalfNormal { scale } => {
                if *scale == 0.0 {
                    (0.0, 0.0)
                } else {
                    (0.0, f64::INFINITY)
                }
            }
            Distribution::Normal { mean, sd } => {
                if *sd == 0.0 {
                    (*mean, *mean)
                } else {
                    (f64::NEG_INFINITY, f64::INFINITY)
                }
            }
            Distribution::DiscreteUniform { values } => (values[0], values[values.len() - 1]),
            Distribution::PointMass { value } => (*value, *value),
            Distribution::Mixture { components } => components
                .iter()
                .filter(|(w, _)| *w > 0.0)
                .map(|(_, d)| d.support())
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (a, b)| {
                    (lo.min(a), hi.max(b))
                }),
        }
    }

    /// Analytic mean.
    pub fn mean(&self) -> f64 {
        match self {
            Distribution::Uniform { lo, hi } => 0.5 * (lo + hi),
            Distribution::HalfNormal { scale } => scale * (2.0 / std::f64::consts::PI).sqrt(),
            Distribution::Normal { mean, .. } => *mean,
            Distribution::DiscreteUniform { values } => {
                values.iter().sum::<f64>() / values.len() as f64
            }
            Distribution::PointMass { value } => *value,
            Distribution::Mixture { components } => {
                components.iter().map(|(w, d)| w * d.mean()).sum()
            }
        }
    }

    /// True when the distribution (or any mixture component) is half-normal.
    pub fn contains_half_normal(&self) -> bool {
        match self {
            Distribution::HalfNormal { .. } => true,
            Distribution::Mixture { components } => {
                components.iter().any(|(_, d)| d.contains_half_normal())
            }
            _ => false,
        }
    }

    /// Sample, adding `offset` to any half-normal draw.
    pub(crate) fn sample_offset<R: Rng + ?Sized>(&self, rng: &mut R, offset: f64) -> f64 {
        match self {
            Distribution::HalfNormal { .. } => offset + self.sample(rng),
            Distribution::Mixture { components }
                if offset != 0.0 && self.contains_half_normal() =>
            {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (w, d) in components {
                    acc += w;
                    if u < acc {
                        return d.sample_offset(rng, offset);
                    }
                }
                let (_, d) = components
                    .iter()
                    .rev()
                    .find(|(w, _)| *w > 0.0)
                    .unwrap_or(&components[components.len() - 1]);
                d.sample_offset(rng, offset)
            }
            _ => self.sample(rng),
        }
    }

    /// Support hull when half-normal draws are shifted by `offset`.
    pub(crate) fn support_offset(&self, offset: f64) -> (f64, f64) {
        match self {
            Distribution::HalfNormal { .. } => {
                let (lo, hi) = self.support();
                (lo + offset, hi + offset)
            }
            Distribution::Mixture { components } => components
                .iter()
                .filter(|(w, _)| *w > 0.0)
                .map(|(_, d)| d.support_offset(offset))
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (a, b)| {
                    (lo.min(a), hi.max(b))
                }),
            _ => self.support(),
        }
    }
}
