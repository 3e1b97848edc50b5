use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Defect class. The SVM encodes a true defect as `+1` and a pseudo defect as `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "true")]
    TrueDefect,
    #[serde(rename = "pseudo")]
    PseudoDefect,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::TrueDefect, Label::PseudoDefect];

    /// Signed target used by the SVM.
    pub fn sign(self) -> f64 {
        match self {
            Label::TrueDefect => 1.0,
            Label::PseudoDefect => -1.0,
        }
    }

    /// Maps a decision value to a class. Zero goes to `TrueDefect`: an escaped
    /// true defect costs more than a re-inspection.
    pub fn from_decision(value: f64) -> Label {
        if value >= 0.0 {
            Label::TrueDefect
        } else {
            Label::PseudoDefect
        }
    }

    /// Directory / CSV token.
    pub fn as_str(self) -> &'static str {
        match self {
            Label::TrueDefect => "true",
            Label::PseudoDefect => "pseudo",
        }
    }

    pub fn other(self) -> Label {
        match self {
            Label::TrueDefect => Label::PseudoDefect,
            Label::PseudoDefect => Label::TrueDefect,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown label `{0}` (expected `true` or `pseudo`)")]
pub struct ParseLabelError(String);

impl FromStr for Label {
    type Err = ParseLabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "true" => Ok(Label::TrueDefect),
            "pseudo" => Ok(Label::PseudoDefect),
            other => Err(ParseLabelError(other.to_string())),
        }
    }
}
