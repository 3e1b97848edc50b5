use crate::dataset::DatasetError;
use crate::dwt::DwtError;
use crate::eval::EvalError;
use crate::features::FeatureError;
use crate::svm::SvmError;

/// Any pipeline failure.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Dwt(#[from] DwtError),
    #[error(transparent)]
    Features(#[from] FeatureError),
    #[error(transparent)]
    Svm(#[from] SvmError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("model file: {0}")]
    ModelFormat(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}
