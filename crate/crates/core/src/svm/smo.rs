use crate::Label;

use super::kernel::{gram_matrix, rbf_unchecked};
use super::{SvmError, SvmModel};

/// Curvature floor for pairs whose kernel rows coincide (duplicated inputs).
const MIN_CURVATURE: f64 = 1e-12;
/// Duals within this fraction of `cost` of a bound are snapped onto it.
const BOUND_SNAP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    /// Kernel width σ.
    pub sigma: f64,
    /// Box constraint `c` on every dual variable.
    pub cost: f64,
    /// Largest tolerated gap between the most violating pair.
    pub kkt_tolerance: f64,
    /// Update budget, in units of the training-set size.
    pub max_passes: usize,
}

impl TrainConfig {
    pub const DEFAULT_TOLERANCE: f64 = 1e-3;
    pub const DEFAULT_MAX_PASSES: usize = 10_000;

    pub fn new(sigma: f64, cost: f64) -> Self {
        TrainConfig {
            sigma,
            cost,
            kkt_tolerance: Self::DEFAULT_TOLERANCE,
            max_passes: Self::DEFAULT_MAX_PASSES,
        }
    }

    pub fn with_tolerance(mut self, kkt_tolerance: f64) -> Self {
        self.kkt_tolerance = kkt_tolerance;
        self
    }

    pub fn with_max_passes(mut self, max_passes: usize) -> Self {
        self.max_passes = max_passes;
        self
    }

    pub fn validate(&self) -> Result<(), SvmError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(SvmError::InvalidConfig(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        };
        positive("sigma", self.sigma)?;
        positive("cost", self.cost)?;
        positive("kkt_tolerance", self.kkt_tolerance)?;
        if self.max_passes == 0 {
            return Err(SvmError::InvalidConfig("max_passes must be at least 1".into()));
        }
        Ok(())
    }
}

/// Full dual solution over the training set.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    /// One multiplier per training sample, each in `[0, cost]`.
    pub alphas: Vec<f64>,
    pub bias: f64,
    /// Pair updates performed.
    pub iterations: usize,
    /// Final maximal-violating-pair gap.
    pub gap: f64,
}

fn validate_problem(samples: &[Vec<f64>], labels: &[Label]) -> Result<usize, SvmError> {
    if samples.len() != labels.len() {
        return Err(SvmError::LengthMismatch {
            samples: samples.len(),
            labels: labels.len(),
        });
    }
    let first = samples.first().ok_or(SvmError::EmptyTrainingSet)?;
    let dim = first.len();
    if let Some(bad) = samples.iter().find(|s| s.len() != dim) {
        return Err(SvmError::DimensionMismatch {
            expected: dim,
            actual: bad.len(),
        });
    }
    if labels.iter().all(|&l| l == labels[0]) {
        return Err(SvmError::SingleClass(labels[0]));
    }
    Ok(dim)
}

/// Dual objective `Σa − ½ ΣΣ a_n a_m t_n t_m K(x_n, x_m)`.
pub fn dual_objective(
    samples: &[Vec<f64>],
    labels: &[Label],
    duals: &[f64],
    sigma: f64,
) -> Result<f64, SvmError> {
    if samples.len() != labels.len() || samples.len() != duals.len() {
        return Err(SvmError::LengthMismatch {
            samples: samples.len(),
            labels: labels.len().min(duals.len()),
        });
    }
    if let Some(first) = samples.first() {
        if let Some(bad) = samples.iter().find(|s| s.len() != first.len()) {
            return Err(SvmError::DimensionMismatch {
                expected: first.len(),
                actual: bad.len(),
            });
        }
    }
    let linear: f64 = duals.iter().sum();
    let mut quadratic = 0.0;
    for n in 0..samples.len() {
        if duals[n] == 0.0 {
            continue;
        }
        for m in 0..samples.len() {
            quadratic += duals[n]
                * duals[m]
                * labels[n].sign()
                * labels[m].sign()
                * rbf_unchecked(&samples[n], &samples[m], sigma);
        }
    }
    Ok(linear - 0.5 * quadratic)
}

struct Problem {
    n: usize,
    gram: Vec<f64>,
    targets: Vec<f64>,
    cost: f64,
}

impl Problem {
    #[inline]
    fn k(&self, i: usize, j: usize) -> f64 {
        self.gram[i * self.n + j]
    }

    /// `Σ_j a_j t_j K_ij − t_i` for every `i`, recomputed from scratch.
    fn residuals(&self, alphas: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let s: f64 = (0..self.n)
                    .filter(|&j| alphas[j] != 0.0)
                    .map(|j| alphas[j] * self.targets[j] * self.k(i, j))
                    .sum();
                s - self.targets[i]
            })
            .collect()
    }

    /// Can `a_i` move in the direction that raises `t_i·y(x_i)`?
    fn in_up(&self, i: usize, a: f64) -> bool {
        if self.targets[i] > 0.0 {
            a < self.cost
        } else {
            a > 0.0
        }
    }

    fn in_low(&self, i: usize, a: f64) -> bool {
        if self.targets[i] > 0.0 {
            a > 0.0
        } else {
            a < self.cost
        }
    }

    /// Maximal violating pair: the smallest residual among samples that can
    /// move up and the largest among those that can move down. Their
    /// difference is the KKT gap. Ties resolve to the lowest index.
    fn select(&self, alphas: &[f64], residuals: &[f64]) -> (Option<usize>, Option<usize>) {
        let mut up: Option<usize> = None;
        let mut low: Option<usize> = None;
        for i in 0..self.n {
            if self.in_up(i, alphas[i]) && up.is_none_or(|u| residuals[i] < residuals[u]) {
                up = Some(i);
            }
            if self.in_low(i, alphas[i]) && low.is_none_or(|l| residuals[i] > residuals[l]) {
                low = Some(i);
            }
        }
        (up, low)
    }

    fn gap(&self, alphas: &[f64], residuals: &[f64]) -> f64 {
        match self.select(alphas, residuals) {
            (Some(u), Some(l)) => residuals[l] - residuals[u],
            _ => 0.0,
        }
    }

    fn snap(&self, a: f64) -> f64 {
        let a = a.clamp(0.0, self.cost);
        if a <= BOUND_SNAP * self.cost {
            0.0
        } else if a >= self.cost * (1.0 - BOUND_SNAP) {
            self.cost
        } else {
            a
        }
    }

    /// Bias averaged over free support vectors, or the midpoint of the
    /// feasible interval when every multiplier sits on a bound.
    fn bias(&self, alphas: &[f64], residuals: &[f64]) -> f64 {
        let free: Vec<usize> = (0..self.n)
            .filter(|&i| alphas[i] > 0.0 && alphas[i] < self.cost)
            .collect();
        if !free.is_empty() {
            return -free.iter().map(|&i| residuals[i]).sum::<f64>() / free.len() as f64;
        }
        match self.select(alphas, residuals) {
            (Some(u), Some(l)) => -0.5 * (residuals[u] + residuals[l]),
            (Some(u), None) => -residuals[u],
            (None, Some(l)) => -residuals[l],
            (None, None) => 0.0,
        }
    }
}

/// Solves the soft-margin dual and returns every multiplier.
pub fn solve(samples: &[Vec<f64>], labels: &[Label], config: &TrainConfig) -> Result<DualSolution, SvmError> {
    config.validate()?;
    validate_problem(samples, labels)?;
    let n = samples.len();
    let problem = Problem {
        n,
        gram: gram_matrix(samples, config.sigma),
        targets: labels.iter().map(|l| l.sign()).collect(),
        cost: config.cost,
    };

    let mut alphas = vec![0.0; n];
    let mut residuals: Vec<f64> = problem.targets.iter().map(|t| -t).collect();
    let budget = config.max_passes.saturating_mul(n);
    let mut iterations = 0;

    while let (Some(i), Some(j)) = problem.select(&alphas, &residuals) {
        let gap = residuals[j] - residuals[i];
        if gap <= config.kkt_tolerance {
            break;
        }
        if iterations >= budget {
            return Err(SvmError::NotConverged { iterations, gap });
        }
        iterations += 1;

        let (ti, tj) = (problem.targets[i], problem.targets[j]);
        let (ai, aj) = (alphas[i], alphas[j]);
        let curvature = (problem.k(i, i) + problem.k(j, j) - 2.0 * problem.k(i, j)).max(MIN_CURVATURE);
        let (lo, hi) = if ti != tj {
            ((aj - ai).max(0.0), (config.cost + aj - ai).min(config.cost))
        } else {
            ((ai + aj - config.cost).max(0.0), (ai + aj).min(config.cost))
        };
        let aj_new = problem.snap((aj + tj * (residuals[i] - residuals[j]) / curvature).clamp(lo, hi));
        let ai_new = problem.snap(ai + ti * tj * (aj - aj_new));

        let di = (ai_new - ai) * ti;
        let dj = (aj_new - aj) * tj;
        alphas[i] = ai_new;
        alphas[j] = aj_new;
        for (k, r) in residuals.iter_mut().enumerate() {
            *r += di * problem.k(i, k) + dj * problem.k(j, k);
        }
    }

    let residuals = problem.residuals(&alphas);
    let gap = problem.gap(&alphas, &residuals);
    let bias = problem.bias(&alphas, &residuals);
    Ok(DualSolution {
        alphas,
        bias,
        iterations,
        gap,
    })
}

/// Trains a model on `samples` labeled by `labels`.
pub fn train(samples: &[Vec<f64>], labels: &[Label], config: &TrainConfig) -> Result<SvmModel, SvmError> {
    let solution = solve(samples, labels, config)?;
    let mut support_vectors = Vec::new();
    let mut dual_coefficients = Vec::new();
    for ((x, label), &a) in samples.iter().zip(labels).zip(&solution.alphas) {
        if a > 0.0 {
            support_vectors.push(x.clone());
            dual_coefficients.push(a * label.sign());
        }
    }
    if support_vectors.is_empty() {
        return Err(SvmError::NoSupportVectors);
    }
    SvmModel::new(
        support_vectors,
        dual_coefficients,
        solution.bias,
        config.sigma,
        config.cost,
    )
}

/// Worst KKT violation of a dual solution, measured on the margins
/// `t_n·y(x_n)` recomputed directly from the multipliers:
///
/// * `a_n = 0` requires `t_n·y(x_n) ≥ 1`,
/// * `0 < a_n < c` requires `t_n·y(x_n) = 1`,
/// * `a_n = c` requires `t_n·y(x_n) ≤ 1`.
///
/// Also folds in box violations and `|Σ a_n t_n|`.
pub fn kkt_violation(
    samples: &[Vec<f64>],
    labels: &[Label],
    solution: &DualSolution,
    config: &TrainConfig,
) -> f64 {
    let mut worst: f64 = 0.0;
    let mut balance = 0.0;
    for (n, x) in samples.iter().enumerate() {
        let a = solution.alphas[n];
        let t = labels[n].sign();
        balance += a * t;
        worst = worst.max(-a).max(a - config.cost);
        let y: f64 = samples
            .iter()
            .zip(labels)
            .zip(&solution.alphas)
            .map(|((xm, lm), &am)| am * lm.sign() * rbf_unchecked(x, xm, config.sigma))
            .sum::<f64>()
            + solution.bias;
        let margin = t * y - 1.0;
        let violation = if a == 0.0 {
            -margin
        } else if a == config.cost {
            margin
        } else {
            margin.abs()
        };
        worst = worst.max(violation);
    }
    worst.max(balance.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Label::{PseudoDefect as N, TrueDefect as P};

    #[test]
    fn two_point_closed_form() {
        // Equal multipliers a maximize 2a − a²(K11 − K12), so a = 1/(K11 − K12).
        let samples = vec![vec![1.0], vec![-1.0]];
        let labels = [P, N];
        let config = TrainConfig::new(10.0, 100.0).with_tolerance(1e-10);
        let sol = solve(&samples, &labels, &config).unwrap();
        let k12 = (-4.0f64 / 100.0).exp();
        let expected = 1.0 / (1.0 - k12);
        assert!((sol.alphas[0] - expected).abs() < 1e-6, "{:?}", sol.alphas);
        assert!((sol.alphas[1] - expected).abs() < 1e-6);
        assert!(sol.bias.abs() < 1e-9);

        let optimum = 2.0 * expected - expected * expected * (1.0 - k12);
        let obj = dual_objective(&samples, &labels, &sol.alphas, 10.0).unwrap();
        assert!((obj - optimum).abs() < 1e-9);

        let model = train(&samples, &labels, &config).unwrap();
        assert_eq!(model.support_vectors().len(), 2);
        assert!((model.decision_value(&[1.0]).unwrap() - 1.0).abs() < 1e-6);
        assert!((model.decision_value(&[-1.0]).unwrap() + 1.0).abs() < 1e-6);
    }

    #[test]
    fn xor_is_separable_with_rbf() {
        let samples = vec![vec![1.0, 1.0], vec![-1.0, -1.0], vec![1.0, -1.0], vec![-1.0, 1.0]];
        let labels = [P, P, N, N];
        let config = TrainConfig::new(1.0, 10.0);
        let sol = solve(&samples, &labels, &config).unwrap();
        assert!(sol.alphas.iter().all(|&a| a > 0.0));
        let model = train(&samples, &labels, &config).unwrap();
        assert_eq!(model.support_vectors().len(), 4);
        for (x, l) in samples.iter().zip(labels) {
            assert_eq!(model.predict(x).unwrap(), l);
        }
        // By symmetry every multiplier equals 1 / (1 + e⁻⁸ − 2e⁻⁴).
        let expected = 1.0 / (1.0 + (-8f64).exp() - 2.0 * (-4f64).exp());
        for a in &sol.alphas {
            assert!((a - expected).abs() < 1e-3);
        }
    }

    #[test]
    fn contradictory_duplicates_hit_the_box() {
        let samples = vec![vec![0.5, 0.5], vec![0.5, 0.5]];
        let labels = [P, N];
        let config = TrainConfig::new(1.0, 1.0);
        let sol = solve(&samples, &labels, &config).unwrap();
        assert_eq!(sol.alphas, vec![1.0, 1.0]);
        assert!(kkt_violation(&samples, &labels, &sol, &config) <= 1e-3);
        let model = train(&samples, &labels, &config).unwrap();
        assert_eq!(model.predict(&[0.5, 0.5]).unwrap(), Label::TrueDefect);
    }

    #[test]
    fn zero_duals_have_zero_objective() {
        let samples = vec![vec![0.0], vec![1.0], vec![2.0]];
        assert_eq!(dual_objective(&samples, &[P, N, P], &[0.0; 3], 1.0).unwrap(), 0.0);
        assert!(dual_objective(&samples, &[P, N], &[0.0; 3], 1.0).is_err());
    }

    #[test]
    fn input_validation() {
        let config = TrainConfig::new(1.0, 1.0);
        assert!(matches!(
            train(&[vec![0.0], vec![1.0]], &[P, P], &config),
            Err(SvmError::SingleClass(Label::TrueDefect))
        ));
        assert!(matches!(
            train(&[vec![0.0], vec![1.0, 2.0]], &[P, N], &config),
            Err(SvmError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            train(&[vec![0.0]], &[P, N], &config),
            Err(SvmError::LengthMismatch { .. })
        ));
        assert!(matches!(
            train(&[], &[], &config),
            Err(SvmError::EmptyTrainingSet)
        ));
        for bad in [
            TrainConfig::new(0.0, 1.0),
            TrainConfig::new(1.0, -1.0),
            TrainConfig::new(1.0, 1.0).with_tolerance(0.0),
            TrainConfig::new(1.0, 1.0).with_max_passes(0),
        ] {
            assert!(matches!(
                train(&[vec![0.0], vec![1.0]], &[P, N], &bad),
                Err(SvmError::InvalidConfig(_))
            ));
        }
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let samples: Vec<Vec<f64>> = (0..20).map(|i| vec![(i as f64 * 0.37).sin()]).collect();
        let labels: Vec<Label> = (0..20).map(|i| if i % 3 == 0 { P } else { N }).collect();
        let config = TrainConfig::new(0.5, 100.0)
            .with_tolerance(1e-12)
            .with_max_passes(1);
        assert!(matches!(
            solve(&samples, &labels, &config),
            Err(SvmError::NotConverged { .. })
        ));
    }
}
