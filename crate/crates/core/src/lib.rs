//! True-vs-pseudo PCB defect classification.
//!
//! The pipeline is: a multi-level separable 2-D wavelet decomposition
//! ([`dwt`]), mean and standard-deviation statistics over every sub-band
//! ([`features`]), and a soft-margin SVM with a Gaussian kernel trained by
//! sequential two-variable dual optimization ([`svm`]). [`dataset`] loads and
//! synthesizes labeled PGM images, [`eval`] scores classifiers and runs the
//! (σ, c, level) grid search, and [`cli`] wires everything to a command line.

pub mod classifier;
pub mod cli;
pub mod dataset;
pub mod dwt;
pub mod eval;
pub mod features;
pub mod label;
pub mod svm;

mod error;

pub use classifier::{Classifier, FeaturePipeline};
pub use error::Error;
pub use label::Label;
