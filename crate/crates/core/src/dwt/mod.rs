//! Separable multi-level 2-D discrete wavelet transform.
//!
//! Each level filters the rows of the current approximation with the lowpass
//! and highpass taps and keeps every second sample, then filters the columns of
//! both intermediates the same way, giving the `LL`, `LH`, `HL` and `HH`
//! sub-bands. Only `LL` is decomposed further. Signals are extended
//! periodically, so dyadic inputs are critically sampled and, with orthonormal
//! filters, perfectly reconstructed by [`reconstruct`].

mod filter;
mod image;
mod transform;

pub use filter::{FilterFamily, FilterPair};
pub use image::Image;
pub use transform::{
    decompose, decompose_level, reconstruct, reconstruct_level, BandKind, LevelBands, Subband, SubbandPyramid,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DwtError {
    #[error("image dimensions must be at least 1x1 with {expected} pixels, got {height}x{width} and {actual} pixels")]
    InvalidShape {
        height: usize,
        width: usize,
        expected: usize,
        actual: usize,
    },
    #[error("cannot halve a {height}x{width} grid: both dimensions must be even")]
    OddDimension { height: usize, width: usize },
    #[error("a {height}x{width} image cannot be decomposed to {levels} levels: 2^{levels} must divide both dimensions")]
    NonDyadic {
        height: usize,
        width: usize,
        levels: u32,
    },
    #[error("decomposition needs at least one level")]
    ZeroLevels,
    #[error("sub-band shapes do not match for reconstruction: {0}")]
    ShapeMismatch(String),
}
