//! Independent oracles shared by the integration and acceptance tests. Nothing
//! here calls the transform or solver code it is used to check.
#![allow(dead_code, clippy::needless_range_loop)]

use pcb_defect::dwt::{FilterPair, Image};
use pcb_defect::Label;
use rand::Rng;

pub fn random_image<R: Rng>(rng: &mut R, h: usize, w: usize) -> Image {
    Image::from_fn(h, w, |_, _| rng.random_range(0.0..255.0))
}

/// One level written as four explicit double sums over the row tap `k` and
/// column tap `i`, periodic indices `2n−i` / `2m−k`. Returns `[LL, LH, HL, HH]`.
pub fn naive_level(x: &Image, f: &FilterPair) -> [Image; 4] {
    let (h, w) = (x.height() as isize, x.width() as isize);
    let w_taps = f.lowpass();
    let h_taps = f.highpass();
    let band = |row_taps: &[f64], col_taps: &[f64]| {
        Image::from_fn(x.height() / 2, x.width() / 2, |n, m| {
            let mut acc = 0.0;
            for (i, ci) in col_taps.iter().enumerate() {
                for (k, rk) in row_taps.iter().enumerate() {
                    let r = (2 * n as isize - i as isize).rem_euclid(h) as usize;
                    let c = (2 * m as isize - k as isize).rem_euclid(w) as usize;
                    acc += ci * rk * x.get(r, c);
                }
            }
            acc
        })
    };
    [
        band(w_taps, w_taps),
        band(w_taps, h_taps),
        band(h_taps, w_taps),
        band(h_taps, h_taps),
    ]
}

/// Naive pyramid in canonical order `LH1, HL1, HH1, ..., LL_L`.
pub fn naive_pyramid(x: &Image, levels: u32, f: &FilterPair) -> Vec<Image> {
    let mut out = Vec::new();
    let mut current = x.clone();
    for _ in 0..levels {
        let [ll, lh, hl, hh] = naive_level(&current, f);
        out.extend([lh, hl, hh]);
        current = ll;
    }
    out.push(current);
    out
}

pub fn gaussian(x: &[f64], y: &[f64], sigma: f64) -> f64 {
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    (-d2 / (sigma * sigma)).exp()
}

#[derive(Debug, Clone)]
pub struct DualProblem {
    pub samples: Vec<Vec<f64>>,
    pub labels: Vec<Label>,
    pub sigma: f64,
    pub cost: f64,
}

impl DualProblem {
    pub fn random<R: Rng>(rng: &mut R, max_n: usize, max_dim: usize) -> Self {
        let n = rng.random_range(2..=max_n);
        let dim = rng.random_range(1..=max_dim);
        let samples: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let mut labels: Vec<Label> = (0..n)
            .map(|_| {
                if rng.random_bool(0.5) {
                    Label::TrueDefect
                } else {
                    Label::PseudoDefect
                }
            })
            .collect();
        labels[0] = Label::TrueDefect;
        labels[1] = Label::PseudoDefect;
        let sigma = rng.random_range(0.5..5.0);
        let cost = if rng.random_bool(0.5) { 1.0 } else { 10.0 };
        DualProblem {
            samples,
            labels,
            sigma,
            cost,
        }
    }

    fn t(&self, i: usize) -> f64 {
        self.labels[i].sign()
    }

    fn q(&self, i: usize, j: usize) -> f64 {
        self.t(i) * self.t(j) * gaussian(&self.samples[i], &self.samples[j], self.sigma)
    }

    pub fn objective(&self, a: &[f64]) -> f64 {
        let n = a.len();
        let mut quad = 0.0;
        for i in 0..n {
            for j in 0..n {
                quad += a[i] * a[j] * self.q(i, j);
            }
        }
        a.iter().sum::<f64>() - 0.5 * quad
    }

    /// `Σ_j a_j t_j K_ij + b`.
    pub fn decision(&self, a: &[f64], b: f64, x: &[f64]) -> f64 {
        (0..a.len())
            .map(|j| a[j] * self.t(j) * gaussian(x, &self.samples[j], self.sigma))
            .sum::<f64>()
            + b
    }

    /// Exhaustive active-set search: every variable is pinned at 0, pinned at
    /// `c`, or free; the free block is solved from its stationarity conditions
    /// plus the equality constraint. The best feasible candidate is the
    /// global maximum of this concave problem.
    pub fn brute_force(&self) -> Vec<f64> {
        let n = self.samples.len();
        let c = self.cost;
        let mut best: Option<(f64, Vec<f64>)> = None;
        let total = 3usize.pow(n as u32);
        for code in 0..total {
            let mut state = vec![0u8; n];
            let mut rest = code;
            for s in state.iter_mut() {
                *s = (rest % 3) as u8;
                rest /= 3;
            }
            let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
            let mut a: Vec<f64> = state.iter().map(|&s| if s == 1 { c } else { 0.0 }).collect();
            if free.is_empty() {
                let balance: f64 = (0..n).map(|i| a[i] * self.t(i)).sum();
                if balance.abs() > 1e-9 {
                    continue;
                }
            } else {
                let f = free.len();
                let mut m = vec![vec![0.0; f + 2]; f + 1];
                for (r, &i) in free.iter().enumerate() {
                    for (col, &j) in free.iter().enumerate() {
                        m[r][col] = self.q(i, j);
                    }
                    m[r][f] = self.t(i);
                    let fixed: f64 = (0..n)
                        .filter(|j| state[*j] != 2)
                        .map(|j| self.q(i, j) * a[j])
                        .sum();
                    m[r][f + 1] = 1.0 - fixed;
                }
                for (col, &j) in free.iter().enumerate() {
                    m[f][col] = self.t(j);
                }
                m[f][f + 1] = -(0..n)
                    .filter(|j| state[*j] != 2)
                    .map(|j| self.t(j) * a[j])
                    .sum::<f64>();
                let Some(sol) = solve_dense(m) else { continue };
                let tol = 1e-9 * c;
                if sol[..f].iter().any(|&v| v < -tol || v > c + tol) {
                    continue;
                }
                for (k, &i) in free.iter().enumerate() {
                    a[i] = sol[k].clamp(0.0, c);
                }
            }
            let value = self.objective(&a);
            if best.as_ref().is_none_or(|(v, _)| value > *v) {
                best = Some((value, a));
            }
        }
        best.expect("a = 0 is always feasible").1
    }

    /// Bias from a dual vector: average over free multipliers, otherwise the
    /// midpoint of the interval allowed by the bound multipliers.
    pub fn bias(&self, a: &[f64]) -> f64 {
        let n = a.len();
        let c = self.cost;
        let eps = 1e-8 * c;
        let resid = |i: usize| self.decision(a, 0.0, &self.samples[i]) - self.t(i);
        let free: Vec<usize> = (0..n).filter(|&i| a[i] > eps && a[i] < c - eps).collect();
        if !free.is_empty() {
            return -free.iter().map(|&i| resid(i)).sum::<f64>() / free.len() as f64;
        }
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for i in 0..n {
            // t_i (r_i + b) >= 0 at a=0, <= 0 at a=c.
            let at_zero = a[i] <= eps;
            let r = resid(i);
            let lower_bound = (at_zero && self.t(i) > 0.0) || (!at_zero && self.t(i) < 0.0);
            if lower_bound {
                lo = lo.max(-r);
            } else {
                hi = hi.min(-r);
            }
        }
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => 0.5 * (lo + hi),
            (true, false) => lo,
            (false, true) => hi,
            _ => 0.0,
        }
    }
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn solve_dense(mut m: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let n = m.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot][col].abs() < 1e-13 {
            return None;
        }
        m.swap(col, pivot);
        for r in 0..n {
            if r != col {
                let factor = m[r][col] / m[col][col];
                if factor != 0.0 {
                    for k in col..=n {
                        m[r][k] -= factor * m[col][k];
                    }
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

/// Three-case KKT check on margins recomputed from the multipliers, plus box
/// and equality constraints. Returns a description of the first failure.
pub fn check_kkt(p: &DualProblem, a: &[f64], b: f64, tol: f64) -> Result<(), String> {
    let balance: f64 = (0..a.len()).map(|i| a[i] * p.t(i)).sum();
    if balance.abs() >= 1e-6 {
        return Err(format!("|Σ a t| = {balance:e}"));
    }
    for i in 0..a.len() {
        if a[i] < 0.0 || a[i] > p.cost + 1e-9 {
            return Err(format!("a[{i}] = {} outside [0, {}]", a[i], p.cost));
        }
        let margin = p.t(i) * p.decision(a, b, &p.samples[i]);
        let ok = if a[i] == 0.0 {
            margin >= 1.0 - tol
        } else if a[i] == p.cost {
            margin <= 1.0 + tol
        } else {
            (margin - 1.0).abs() <= tol
        };
        if !ok {
            return Err(format!("sample {i}: a = {}, t·y = {margin}", a[i]));
        }
    }
    Ok(())
}
