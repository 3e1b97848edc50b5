//! Confusion matrices, accuracy, and the (σ, c, level) grid search.

mod confusion;
mod grid;

pub use confusion::{accuracy, confusion, evaluate, format_percent, ConfusionMatrix};
pub use grid::{cartesian, grid_search, CellOutcome, GridCell, GridResult, GridRow, GridSpec};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("{predictions} predictions for {labels} labels")]
    LengthMismatch { predictions: usize, labels: usize },
    #[error("nothing to evaluate")]
    EmptyInput,
    #[error("grid has no {0}")]
    EmptyGrid(&'static str),
}
