use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::ops::Image;

/// Units of reported MSE.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MseScale {
    /// Samples scaled by 255 before squaring.
    #[default]
    EightBit,
    /// Samples on `[0, 1]`.
    Unit,
}

impl MseScale {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "8bit" | "eight_bit" => Some(MseScale::EightBit),
            "unit" => Some(MseScale::Unit),
            _ => None,
        }
    }

    fn factor(self) -> f64 {
        match self {
            MseScale::EightBit => 255.0,
            MseScale::Unit => 1.0,
        }
    }
}

/// Mean over pixels and channels of the squared difference.
pub fn mse(recon: &Image, clean: &Image, scale: MseScale) -> Result<f64, EvalError> {
    if recon.dims() != clean.dims() {
        return Err(EvalError::ShapeMismatch {
            expected: clean.dims(),
            found: recon.dims(),
        });
    }
    let n = clean.data().len();
    if n == 0 {
        return Ok(0.0);
    }
    let k = scale.factor();
    let sum: f64 = recon
        .data()
        .iter()
        .zip(clean.data())
        .map(|(&a, &b)| (a * k - b * k).powi(2))
        .sum();
    Ok(sum / n as f64)
}
