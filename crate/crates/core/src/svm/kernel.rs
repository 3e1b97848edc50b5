use super::SvmError;

pub(crate) fn squared_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

#[inline]
pub(crate) fn rbf_unchecked(x: &[f64], y: &[f64], sigma: f64) -> f64 {
    (-squared_distance(x, y) / (sigma * sigma)).exp()
}

/// Gaussian kernel `exp(−‖x−y‖² / σ²)`.
///
/// The denominator is `σ²`, not `2σ²`; the equivalent `gamma` used by other
/// libraries is `1/σ²`.
pub fn rbf_kernel(x: &[f64], y: &[f64], sigma: f64) -> Result<f64, SvmError> {
    if x.len() != y.len() {
        return Err(SvmError::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(SvmError::InvalidConfig(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    Ok(rbf_unchecked(x, y, sigma))
}

/// Dense row-major kernel matrix. Each entry is computed on its own, so the
/// result does not depend on evaluation order.
pub fn gram_matrix(samples: &[Vec<f64>], sigma: f64) -> Vec<f64> {
    let n = samples.len();
    let mut gram = vec![0.0; n * n];
    for i in 0..n {
        gram[i * n + i] = 1.0;
        for j in i + 1..n {
            let k = rbf_unchecked(&samples[i], &samples[j], sigma);
            gram[i * n + j] = k;
            gram[j * n + i] = k;
        }
    }
    gram
}
