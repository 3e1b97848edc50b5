//! Mean and standard-deviation statistics over wavelet sub-bands.
//!
//! For a `k`-level decomposition the canonical feature order is
//! `LH1, HL1, HH1, ..., LH_k, HL_k, HH_k, LL_k`, with the mean of each band
//! followed by its standard deviation. That gives `2·(3k + 1)` values: 8, 14 and
//! 20 for `k = 1, 2, 3`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dwt::{decompose, BandKind, DwtError, FilterPair, Image, Subband, SubbandPyramid};

pub const MIN_LEVEL: u32 = 1;
pub const MAX_LEVEL: u32 = 3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FeatureError {
    #[error(transparent)]
    Dwt(#[from] DwtError),
    #[error("feature level must be between {MIN_LEVEL} and {MAX_LEVEL}, got {0}")]
    UnsupportedLevel(u32),
    #[error("standardizer expects {expected} features, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("cannot fit a standardizer on zero samples")]
    NoSamples,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    Mean,
    Sd,
}

impl Statistic {
    pub fn name(self) -> &'static str {
        match self {
            Statistic::Mean => "mean",
            Statistic::Sd => "sd",
        }
    }
}

/// Which sub-bands of a `k`-level pyramid feed the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BandSelection {
    /// Detail bands of every level plus `LL_k`.
    #[default]
    AllLevels,
    /// Only `LH_k`, `HL_k`, `HH_k` and `LL_k`.
    FinalLevelOnly,
}

impl BandSelection {
    pub fn name(self) -> &'static str {
        match self {
            BandSelection::AllLevels => "all-levels",
            BandSelection::FinalLevelOnly => "final-level-only",
        }
    }
}

impl fmt::Display for BandSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BandSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all-levels" | "all" => Ok(BandSelection::AllLevels),
            "final-level-only" | "final" => Ok(BandSelection::FinalLevelOnly),
            other => Err(format!(
                "unknown band selection `{other}` (expected `all-levels` or `final-level-only`)"
            )),
        }
    }
}

/// Names one entry of a feature vector, e.g. `HL2_sd`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FeatureDescriptor {
    pub kind: BandKind,
    pub level: u32,
    pub statistic: Statistic,
}

impl fmt::Display for FeatureDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}_{}", self.kind, self.level, self.statistic.name())
    }
}

/// Ordered feature descriptors for a `level`-deep pyramid.
pub fn schema(level: u32, bands: BandSelection) -> Vec<FeatureDescriptor> {
    let first = match bands {
        BandSelection::AllLevels => 1,
        BandSelection::FinalLevelOnly => level,
    };
    let detail = (first..=level).flat_map(|l| BandKind::DETAILS.iter().map(move |&k| (k, l)));
    detail
        .chain(std::iter::once((BandKind::LL, level)))
        .flat_map(|(kind, level)| {
            [Statistic::Mean, Statistic::Sd].map(|statistic| FeatureDescriptor {
                kind,
                level,
                statistic,
            })
        })
        .collect()
}

/// Statistics of one image in canonical schema order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    level: u32,
    values: Vec<f64>,
    schema: Vec<FeatureDescriptor>,
}

impl FeatureVector {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn schema(&self) -> &[FeatureDescriptor] {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, descriptor: &FeatureDescriptor) -> Option<f64> {
        self.schema
            .iter()
            .position(|d| d == descriptor)
            .map(|i| self.values[i])
    }
}

/// Arithmetic mean of the band coefficients.
pub fn subband_mean(band: &Subband) -> f64 {
    let coeffs = band.coefficients();
    coeffs.iter().sum::<f64>() / coeffs.len() as f64
}

/// Population standard deviation (divisor `H·W`) of the band coefficients.
pub fn subband_sd(band: &Subband) -> f64 {
    let mean = subband_mean(band);
    let coeffs = band.coefficients();
    let var = coeffs.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / coeffs.len() as f64;
    var.sqrt()
}

/// Collects statistics from an existing pyramid. `level` must not exceed the
/// pyramid depth.
pub fn features_from_pyramid(pyramid: &SubbandPyramid, bands: BandSelection) -> FeatureVector {
    let level = pyramid.levels();
    let selected = pyramid
        .bands()
        .filter(|b| bands == BandSelection::AllLevels || b.level() == level);
    let values = selected.flat_map(|b| [subband_mean(b), subband_sd(b)]).collect();
    FeatureVector {
        level,
        values,
        schema: schema(level, bands),
    }
}

/// Decomposes `image` to `level` levels and extracts all-levels features.
pub fn extract_features(
    image: &Image,
    level: u32,
    filter: &FilterPair,
) -> Result<FeatureVector, FeatureError> {
    extract_features_with(image, level, filter, BandSelection::AllLevels)
}

pub fn extract_features_with(
    image: &Image,
    level: u32,
    filter: &FilterPair,
    bands: BandSelection,
) -> Result<FeatureVector, FeatureError> {
    if !(MIN_LEVEL..=MAX_LEVEL).contains(&level) {
        return Err(FeatureError::UnsupportedLevel(level));
    }
    let pyramid = decompose(image, level, filter)?;
    Ok(features_from_pyramid(&pyramid, bands))
}

/// Per-feature z-score transform fitted on training vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    /// Population SD per feature; zero-variance features keep a scale of 1.
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(samples: &[Vec<f64>]) -> Result<Self, FeatureError> {
        let first = samples.first().ok_or(FeatureError::NoSamples)?;
        let dim = first.len();
        let n = samples.len() as f64;
        let mut mean = vec![0.0; dim];
        for s in samples {
            if s.len() != dim {
                return Err(FeatureError::DimensionMismatch {
                    expected: dim,
                    actual: s.len(),
                });
            }
            for (m, v) in mean.iter_mut().zip(s) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut scale = vec![0.0; dim];
        for s in samples {
            for ((acc, v), m) in scale.iter_mut().zip(s).zip(&mean) {
                *acc += (v - m).powi(2);
            }
        }
        for sd in scale.iter_mut() {
            *sd = (*sd / n).sqrt();
            if *sd <= f64::EPSILON {
                *sd = 1.0;
            }
        }
        Ok(Standardizer { mean, scale })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn transform(&self, values: &[f64]) -> Result<Vec<f64>, FeatureError> {
        if values.len() != self.dim() {
            return Err(FeatureError::DimensionMismatch {
                expected: self.dim(),
                actual: values.len(),
            });
        }
        Ok(values
            .iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dwt::FilterFamily;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn band(h: usize, w: usize, values: Vec<f64>) -> Subband {
        Subband::new(BandKind::HH, 1, Image::new(h, w, values).unwrap())
    }

    fn random_image(seed: u64, h: usize, w: usize) -> Image {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Image::from_fn(h, w, |_, _| rng.random_range(0.0..255.0))
    }

    #[test]
    fn mean_and_sd_small_cases() {
        let constant = band(3, 3, vec![5.0; 9]);
        assert_eq!(subband_mean(&constant), 5.0);
        assert_eq!(subband_sd(&constant), 0.0);

        let b = band(2, 2, vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(subband_mean(&b), 2.5);
        assert!((subband_sd(&b) - 1.25f64.sqrt()).abs() < 1e-15);
        assert!((subband_sd(&b) - 1.118034).abs() < 1e-6);
    }

    #[test]
    fn mean_and_sd_match_independent_oracles() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let values: Vec<f64> = (0..256).map(|_| rng.random_range(-50.0..50.0)).collect();
        let b = band(16, 16, values.clone());

        // Straight summation in a different order, then a sum-of-squares form.
        let mut total = 0.0;
        for v in values.iter().rev() {
            total += v;
        }
        let mean = total / 256.0;
        assert!((subband_mean(&b) - mean).abs() < 1e-12);

        let mut sq = 0.0;
        for v in values.iter().rev() {
            let d = v - mean;
            sq += d * d;
        }
        assert!((subband_sd(&b) - (sq / 256.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn schema_order_and_lengths() {
        for (k, len) in [(1, 8), (2, 14), (3, 20)] {
            assert_eq!(schema(k, BandSelection::AllLevels).len(), len);
            assert_eq!(schema(k, BandSelection::FinalLevelOnly).len(), 8);
        }
        let names: Vec<String> = schema(2, BandSelection::AllLevels)
            .iter()
            .map(ToString::to_string)
            .collect();
        assert_eq!(
            names,
            [
                "LH1_mean", "LH1_sd", "HL1_mean", "HL1_sd", "HH1_mean", "HH1_sd", "LH2_mean", "LH2_sd",
                "HL2_mean", "HL2_sd", "HH2_mean", "HH2_sd", "LL2_mean", "LL2_sd"
            ]
        );
        let narrow: Vec<String> = schema(2, BandSelection::FinalLevelOnly)
            .iter()
            .map(ToString::to_string)
            .collect();
        assert_eq!(narrow[0], "LH2_mean");
        assert_eq!(narrow[7], "LL2_sd");
    }

    #[test]
    fn constant_image_closed_form() {
        let v = 91.0;
        let img = Image::filled(64, 64, v);
        for k in 1..=3 {
            let fv = extract_features(&img, k, &FilterPair::haar()).unwrap();
            assert_eq!(fv.len(), 2 * (3 * k as usize + 1));
            let n = fv.len();
            for (i, value) in fv.values().iter().enumerate() {
                let expected = if i == n - 2 { 2f64.powi(k as i32) * v } else { 0.0 };
                assert!((value - expected).abs() < 1e-10, "k={k} i={i} {value}");
            }
        }
    }

    #[test]
    fn compositional_oracle() {
        let img = random_image(11, 64, 64);
        let f = FilterPair::new(FilterFamily::Daubechies4);
        let fv = extract_features(&img, 3, &f).unwrap();
        let pyramid = decompose(&img, 3, &f).unwrap();
        let manual: Vec<f64> = pyramid
            .bands()
            .flat_map(|b| [subband_mean(b), subband_sd(b)])
            .collect();
        assert_eq!(fv.values(), manual.as_slice());
        assert!(fv.values().chunks(2).all(|pair| pair[1] >= 0.0));
        let d = FeatureDescriptor {
            kind: BandKind::LL,
            level: 3,
            statistic: Statistic::Mean,
        };
        assert_eq!(fv.get(&d), Some(subband_mean(pyramid.approximation())));
    }

    #[test]
    fn final_level_only_picks_last_bands() {
        let img = random_image(12, 32, 32);
        let all = extract_features(&img, 2, &FilterPair::haar()).unwrap();
        let narrow =
            extract_features_with(&img, 2, &FilterPair::haar(), BandSelection::FinalLevelOnly).unwrap();
        assert_eq!(narrow.values(), &all.values()[6..]);
    }

    #[test]
    fn level_and_dyadic_errors() {
        let img = Image::filled(64, 64, 1.0);
        assert!(matches!(
            extract_features(&img, 0, &FilterPair::haar()),
            Err(FeatureError::UnsupportedLevel(0))
        ));
        assert!(matches!(
            extract_features(&img, 4, &FilterPair::haar()),
            Err(FeatureError::UnsupportedLevel(4))
        ));
        let odd = Image::filled(12, 12, 1.0);
        assert!(matches!(
            extract_features(&odd, 3, &FilterPair::haar()),
            Err(FeatureError::Dwt(DwtError::NonDyadic { .. }))
        ));
    }

    #[test]
    fn standardizer() {
        let data = vec![vec![1.0, 5.0], vec![3.0, 5.0]];
        let s = Standardizer::fit(&data).unwrap();
        assert_eq!(s.mean, vec![2.0, 5.0]);
        assert_eq!(s.scale, vec![1.0, 1.0]);
        assert_eq!(s.transform(&[3.0, 5.0]).unwrap(), vec![1.0, 0.0]);
        assert!(s.transform(&[1.0]).is_err());
        assert!(matches!(Standardizer::fit(&[]), Err(FeatureError::NoSamples)));
        assert!(Standardizer::fit(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn intensity_shift_moves_only_ll_mean(seed in any::<u64>(), c in -100.0f64..100.0, k in 1u32..=3) {
            let img = random_image(seed, 32, 32);
            let shifted = img.map(|p| p + c);
            let a = extract_features(&img, k, &FilterPair::haar()).unwrap();
            let b = extract_features(&shifted, k, &FilterPair::haar()).unwrap();
            let n = a.len();
            for i in 0..n {
                let expected = if i == n - 2 { a.values()[i] + 2f64.powi(k as i32) * c } else { a.values()[i] };
                prop_assert!((b.values()[i] - expected).abs() < 1e-10 * (1.0 + expected.abs()));
            }
        }

        #[test]
        fn scaling_scales_every_statistic(seed in any::<u64>(), scale in 0.01f64..20.0, k in 1u32..=3) {
            let img = random_image(seed, 32, 32);
            let a = extract_features(&img, k, &FilterPair::daubechies4()).unwrap();
            let b = extract_features(&img.map(|p| p * scale), k, &FilterPair::daubechies4()).unwrap();
            for (x, y) in a.values().iter().zip(b.values()) {
                prop_assert!((x * scale - y).abs() <= 1e-10 * (x * scale).abs().max(1e-3));
            }
        }
    }
}
