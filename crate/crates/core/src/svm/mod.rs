//! Soft-margin binary SVM with the Gaussian kernel `exp(−‖x−y‖²/σ²)`.
//!
//! Training solves the box-constrained dual with two-variable analytic updates
//! (SMO). Targets follow [`Label::sign`](crate::Label::sign): true defects are
//! `+1`, pseudo defects `−1`. The primal weight vector is never formed; the
//! model keeps its support vectors and their signed dual coefficients.

mod kernel;
mod model;
mod smo;

pub use kernel::{gram_matrix, rbf_kernel};
pub(crate) use model::ModelDocument;
pub use model::{SvmModel, MODEL_FORMAT_VERSION};
pub use smo::{dual_objective, kkt_violation, solve, train, DualSolution, TrainConfig};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SvmError {
    #[error("feature dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("{samples} samples but {labels} labels")]
    LengthMismatch { samples: usize, labels: usize },
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("training set contains only `{0}` samples; both classes are required")]
    SingleClass(crate::Label),
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error("dual optimizer did not converge after {iterations} updates (KKT gap {gap:.3e})")]
    NotConverged { iterations: usize, gap: f64 },
    #[error("training produced no support vectors")]
    NoSupportVectors,
    #[error("invalid model: {0}")]
    InvalidModel(String),
}
