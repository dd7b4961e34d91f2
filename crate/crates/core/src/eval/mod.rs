//! Scoring of external predictions: mIoU with optimal matching, MSE, bootstrap
//! intervals and severity-binned curves.

mod bootstrap;
mod curve;
mod matching;
mod metrics;
mod predict;
mod report;

pub use bootstrap::{bootstrap_ci, percentile, BootstrapCi, DEFAULT_RESAMPLES};
pub use curve::{bin_index, min_max, severity_curve, CurveBin, SeverityCurve};
pub use matching::{hungarian, iou_matrix, match_masks, mean_iou, IouMatrix, MatchPair, Matching};
pub use metrics::{mse, MseScale};
pub use predict::{
    fragile_predict, prediction_dir, read_prediction, write_prediction, write_predictions,
    FragileConfig, Prediction, Predictor, CLEAN_VARIANT, PRED_MASKS, RECON,
};
pub use report::{
    evaluate, with_suffix, CandidateScore, EvalOptions, EvalReport, GroupSummary, SampleRow,
    DEFAULT_BINS, REPORT_VERSION,
};

use crate::dataset::DatasetError;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("empty sample")]
    EmptySample,
    #[error("missing prediction: {0}")]
    MissingPrediction(String),
    #[error("format: {0}")]
    Format(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}
