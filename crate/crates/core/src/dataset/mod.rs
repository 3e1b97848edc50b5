//! Labeled grayscale datasets: PGM I/O, directory loading, seeded splits and a
//! synthetic texture generator.

mod pgm;
mod split;
mod synth;

use std::fs;
use std::path::{Path, PathBuf};

use crate::dwt::Image;
use crate::Label;

pub use pgm::{encode_pgm, load_pgm, parse_pgm, write_pgm};
pub use split::{split, SplitSpec};
pub use synth::{synth_generate, write_dataset};

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed PGM: {0}")]
    MalformedPgm(String),
    #[error("pixel value {value} at index {index} is outside 0..=255")]
    OutOfRange { index: usize, value: f64 },
    #[error("{path}: image is {actual_height}x{actual_width}, expected {expected_height}x{expected_width}")]
    MixedDimensions {
        path: String,
        expected_height: usize,
        expected_width: usize,
        actual_height: usize,
        actual_width: usize,
    },
    #[error("class `{0}` has no images")]
    EmptyClass(Label),
    #[error("cannot take {requested} `{label}` training samples from {available}")]
    InfeasibleSplit {
        label: Label,
        requested: usize,
        available: usize,
    },
}

impl DatasetError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        DatasetError::Io {
            path: path.into(),
            source,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub image: Image,
    pub label: Label,
    /// Path relative to the dataset root, or a synthetic identifier.
    pub source_id: String,
}

/// Per-class counts `(true, pseudo)`.
pub fn class_counts(samples: &[LabeledSample]) -> (usize, usize) {
    samples.iter().fold((0, 0), |(t, p), s| match s.label {
        Label::TrueDefect => (t + 1, p),
        Label::PseudoDefect => (t, p + 1),
    })
}

fn is_pgm(path: &Path) -> bool {
    path.is_file()
        && path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("pgm"))
}

/// Loads `root/true/*.pgm` and `root/pseudo/*.pgm`.
///
/// Files are read in lexicographic file-name order within each class, true
/// defects first. Every image must share the dimensions of the first.
pub fn load_dataset(root: impl AsRef<Path>) -> Result<Vec<LabeledSample>, DatasetError> {
    let root = root.as_ref();
    let mut samples = Vec::new();
    let mut shape: Option<(usize, usize)> = None;
    for label in Label::ALL {
        let dir = root.join(label.as_str());
        let entries = fs::read_dir(&dir).map_err(|e| DatasetError::io(&dir, e))?;
        let mut names = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|e| DatasetError::io(&dir, e))?;
            if is_pgm(&entry.path()) {
                names.push(entry.file_name());
            }
        }
        if names.is_empty() {
            return Err(DatasetError::EmptyClass(label));
        }
        names.sort();
        for name in names {
            let path = dir.join(&name);
            let image = load_pgm(&path)?;
            let source_id = format!("{}/{}", label.as_str(), name.to_string_lossy());
            let dims = (image.height(), image.width());
            match shape {
                None => shape = Some(dims),
                Some(expected) if expected != dims => {
                    return Err(DatasetError::MixedDimensions {
                        path: source_id,
                        expected_height: expected.0,
                        expected_width: expected.1,
                        actual_height: dims.0,
                        actual_width: dims.1,
                    })
                }
                Some(_) => {}
            }
            samples.push(LabeledSample {
                image,
                label,
                source_id,
            });
        }
    }
    Ok(samples)
}
