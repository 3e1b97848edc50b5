use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Supported orthonormal wavelet families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterFamily {
    #[default]
    Haar,
    /// Four-tap Daubechies wavelet (two vanishing moments, `db2` in some libraries).
    Daubechies4,
}

impl FilterFamily {
    pub fn name(self) -> &'static str {
        match self {
            FilterFamily::Haar => "haar",
            FilterFamily::Daubechies4 => "daubechies4",
        }
    }
}

impl fmt::Display for FilterFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FilterFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "haar" | "db1" => Ok(FilterFamily::Haar),
            "daubechies4" | "db4" | "d4" | "db2" => Ok(FilterFamily::Daubechies4),
            other => Err(format!(
                "unknown filter family `{other}` (expected `haar` or `daubechies4`)"
            )),
        }
    }
}

/// Lowpass/highpass analysis taps of a quadrature mirror filter bank.
///
/// The highpass taps are derived from the lowpass ones as
/// `highpass[i] = (-1)^i * lowpass[len - 1 - i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterPair {
    family: FilterFamily,
    lowpass: Vec<f64>,
    highpass: Vec<f64>,
}

impl FilterPair {
    pub fn new(family: FilterFamily) -> Self {
        let lowpass = match family {
            FilterFamily::Haar => vec![std::f64::consts::FRAC_1_SQRT_2; 2],
            FilterFamily::Daubechies4 => {
                let s3 = 3f64.sqrt();
                let norm = 4.0 * std::f64::consts::SQRT_2;
                vec![
                    (1.0 + s3) / norm,
                    (3.0 + s3) / norm,
                    (3.0 - s3) / norm,
                    (1.0 - s3) / norm,
                ]
            }
        };
        let highpass = quadrature_mirror(&lowpass);
        FilterPair {
            family,
            lowpass,
            highpass,
        }
    }

    pub fn haar() -> Self {
        Self::new(FilterFamily::Haar)
    }

    pub fn daubechies4() -> Self {
        Self::new(FilterFamily::Daubechies4)
    }

    pub fn family(&self) -> FilterFamily {
        self.family
    }

    pub fn lowpass(&self) -> &[f64] {
        &self.lowpass
    }

    pub fn highpass(&self) -> &[f64] {
        &self.highpass
    }

    pub fn len(&self) -> usize {
        self.lowpass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lowpass.is_empty()
    }
}

impl Default for FilterPair {
    fn default() -> Self {
        Self::haar()
    }
}

fn quadrature_mirror(lowpass: &[f64]) -> Vec<f64> {
    let n = lowpass.len();
    (0..n)
        .map(|i| {
            let tap = lowpass[n - 1 - i];
            if i % 2 == 0 {
                tap
            } else {
                -tap
            }
        })
        .collect()
}
