//! Estimates and goodness-of-fit tests used by the experiments.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::chacha;

/// Samples below this effective size make the asymptotic KS law unreliable.
pub const KS_LOW_POWER_N: f64 = 35.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub point_estimate: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub ci95: [f64; 2],
    pub method: &'static str,
}

impl EstimateRecord {
    /// Bernoulli proportion with the normal-approximation interval.
    pub fn bernoulli(successes: u64, n: u64, method: &'static str) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySamples);
        }
        let p = successes as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        Ok(Self { point_estimate: p, std_error: se, n_samples: n, ci95: [p - 1.96 * se, p + 1.96 * se], method })
    }

    /// Whether `value` lies within `k` standard errors, or within `floor`.
    pub fn within(&self, value: f64, k: f64, floor: f64) -> bool {
        (self.point_estimate - value).abs() <= (k * self.std_error).max(floor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub n_eff: f64,
    /// Asymptotic p-value with the Stephens finite-sample correction.
    pub p_value: f64,
    pub alpha: f64,
    pub critical: f64,
    /// Allowance subtracted from the statistic before the decision.
    pub slack: f64,
    pub accept: bool,
    pub low_power: bool,
}

impl KsResult {
    fn new(statistic: f64, n_eff: f64, alpha: f64, slack: f64) -> Self {
        let critical = ks_critical(alpha, n_eff);
        let root = n_eff.sqrt();
        let lambda = (root + 0.12 + 0.11 / root) * statistic;
        Self {
            statistic,
            n_eff,
            p_value: kolmogorov_tail(lambda),
            alpha,
            critical,
            slack,
            accept: statistic - slack <= critical,
            low_power: n_eff < KS_LOW_POWER_N,
        }
    }
}

/// `P(K > λ)` for the Kolmogorov distribution.
pub fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..200 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic critical value `√(−½ ln(α/2)) / √n`.
pub fn ks_critical(alpha: f64, n_eff: f64) -> f64 {
    (-0.5 * (alpha / 2.0).ln()).sqrt() / n_eff.sqrt()
}

fn sorted(x: &[f64]) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(Error::EmptySamples);
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite sample".into()));
    }
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// One-sample test of `samples` against a continuous CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F, alpha: f64, slack: f64) -> Result<KsResult> {
    let v = sorted(samples)?;
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(KsResult::new(d.clamp(0.0, 1.0), n, alpha, slack))
}

/// Two-sample test with `n_eff = nm / (n + m)`.
pub fn ks_two_sample(a: &[f64], b: &[f64], alpha: f64, slack: f64) -> Result<KsResult> {
    let (a, b) = (sorted(a)?, sorted(b)?);
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let n_eff = (n * m) as f64 / (n + m) as f64;
    Ok(KsResult::new(d, n_eff, alpha, slack))
}

/// Empirical CDF of `samples` evaluated at each point of `grid`.
pub fn empirical_cdf(samples: &[f64], grid: &[f64]) -> Result<Vec<f64>> {
    let v = sorted(samples)?;
    let n = v.len() as f64;
    Ok(grid.iter().map(|&s| v.partition_point(|&x| x <= s) as f64 / n).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub intercept_se: f64,
}

/// Weighted least squares for `y = intercept + slope·x` with weights
/// `1/σᵢ²`; standard errors come from the weights alone.
pub fn weighted_line_fit(x: &[f64], y: &[f64], var: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() || x.len() != var.len() {
        return Err(Error::InvalidInput("fit inputs differ in length".into()));
    }
    if x.len() < 2 {
        return Err(Error::InvalidInput("a line fit needs two points".into()));
    }
    let (mut s, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((&xi, &yi), &vi) in x.iter().zip(y).zip(var) {
        if !(vi > 0.0 && vi.is_finite() && yi.is_finite()) {
            return Err(Error::InvalidInput("fit point has no finite variance".into()));
        }
        let w = 1.0 / vi;
        s += w;
        sx += w * xi;
        sy += w * yi;
        sxx += w * xi * xi;
        sxy += w * xi * yi;
    }
    let det = s * sxx - sx * sx;
    if det <= 0.0 {
        return Err(Error::InvalidInput("fit abscissae coincide".into()));
    }
    Ok(LineFit {
        slope: (s * sxy - sx * sy) / det,
        intercept: (sxx * sy - sx * sxy) / det,
        slope_se: (s / det).sqrt(),
        intercept_se: (sxx / det).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PermutationResult {
    pub statistic: f64,
    pub p_value: f64,
    pub permutations: usize,
}

fn lag1_correlation(runs: &[Vec<f64>]) -> f64 {
    let (mut n, mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for r in runs {
        for w in r.windows(2) {
            let (x, y) = (w[0], w[1]);
            n += 1.0;
            sx += x;
            sy += y;
            sxx += x * x;
            syy += y * y;
            sxy += x * y;
        }
    }
    let cov = sxy - sx * sy / n;
    let den = ((sxx - sx * sx / n) * (syy - sy * sy / n)).sqrt();
    if den > 0.0 {
        cov / den
    } else {
        0.0
    }
}

/// Two-sided permutation test of zero lag-1 correlation within each run;
/// the null shuffles every run independently.
pub fn lag1_permutation_test(runs: &[Vec<f64>], permutations: usize, seed: u64) -> Result<PermutationResult> {
    if runs.iter().all(|r| r.len() < 2) {
        return Err(Error::EmptySamples);
    }
    let obs = lag1_correlation(runs);
    let mut rng = chacha(seed);
    let mut work: Vec<Vec<f64>> = runs.to_vec();
    let mut extreme = 0usize;
    for _ in 0..permutations {
        for r in work.iter_mut() {
            r.shuffle(&mut rng);
        }
        if lag1_correlation(&work).abs() >= obs.abs() {
            extreme += 1;
        }
    }
    Ok(PermutationResult {
        statistic: obs,
        p_value: (extreme + 1) as f64 / (permutations + 1) as f64,
        permutations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn bernoulli_record() {
        let r = EstimateRecord::bernoulli(30, 100, "test").unwrap();
        assert!((r.std_error - (0.3f64 * 0.7 / 100.0).sqrt()).abs() < 1e-15);
        assert!((r.ci95[1] - r.point_estimate - 1.96 * r.std_error).abs() < 1e-15);
        assert!(EstimateRecord::bernoulli(0, 0, "test").is_err());
    }

    #[test]
    fn interval_coverage_for_a_fair_coin() {
        let mut rng = chacha(7);
        let mut covered = 0;
        for _ in 0..200 {
            let hits = (0..1000).filter(|_| rng.random::<bool>()).count() as u64;
            let r = EstimateRecord::bernoulli(hits, 1000, "coin").unwrap();
            if r.ci95[0] <= 0.5 && 0.5 <= r.ci95[1] {
                covered += 1;
            }
        }
        assert!(covered >= 186, "coverage {covered}/200");
    }

    #[test]
    fn std_error_halves_when_n_quadruples() {
        let mut rng = chacha(11);
        let mut se = |n: u64| {
            let hits = (0..n).filter(|_| rng.random::<bool>()).count() as u64;
            EstimateRecord::bernoulli(hits, n, "coin").unwrap().std_error
        };
        for _ in 0..5 {
            let ratio = se(4000) / se(16000);
            assert!((ratio - 2.0).abs() < 0.4, "ratio {ratio}");
        }
    }

    #[test]
    fn kolmogorov_tail_known_values() {
        // classical table: P(K > 1.3581) = 0.05, P(K > 1.6276) = 0.01
        assert!((kolmogorov_tail(1.358_1) - 0.05).abs() < 1e-4);
        assert!((kolmogorov_tail(1.627_6) - 0.01).abs() < 1e-4);
        assert!((ks_critical(0.05, 1.0) - 1.358_1).abs() < 1e-3);
    }

    fn brute_one_sample(x: &[f64], f: impl Fn(f64) -> f64) -> f64 {
        // sup over a fine grid plus both sides of every jump
        let n = x.len() as f64;
        let ecdf = |s: f64| x.iter().filter(|&&v| v <= s).count() as f64 / n;
        let ecdf_left = |s: f64| x.iter().filter(|&&v| v < s).count() as f64 / n;
        let mut d: f64 = 0.0;
        for &v in x {
            d = d.max((ecdf(v) - f(v)).abs()).max((ecdf_left(v) - f(v)).abs());
        }
        d
    }

    #[test]
    fn one_sample_statistic_matches_brute_force() {
        let mut rng = chacha(3);
        for n in [1usize, 2, 7, 50] {
            let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let r = ks_one_sample(&x, |s| s.clamp(0.0, 1.0), 0.01, 0.0).unwrap();
            assert!((r.statistic - brute_one_sample(&x, |s| s.clamp(0.0, 1.0))).abs() < 1e-15);
            assert_eq!(r.low_power, (n as f64) < KS_LOW_POWER_N);
        }
    }

    #[test]
    fn two_sample_cases() {
        let x = vec![0.1, 0.4, 0.4, 0.9];
        assert_eq!(ks_two_sample(&x, &x, 0.01, 0.0).unwrap().statistic, 0.0);
        let y = vec![0.5, 0.6];
        // at 0.4: F_x = 3/4, F_y = 0
        assert!((ks_two_sample(&x, &y, 0.01, 0.0).unwrap().statistic - 0.75).abs() < 1e-15);
        assert!(ks_two_sample(&x, &[], 0.01, 0.0).is_err());
        // F versus F(2s ∧ 1) on uniforms
        let mut rng = chacha(5);
        let a: Vec<f64> = (0..1000).map(|_| rng.random::<f64>()).collect();
        let b: Vec<f64> = (0..1000).map(|_| 0.5 * rng.random::<f64>()).collect();
        assert!(!ks_two_sample(&a, &b, 0.01, 0.0).unwrap().accept);
    }

    #[test]
    fn uniform_samples_pass_at_the_stated_rate() {
        let mut rejections = 0;
        for seed in 0..200 {
            let mut rng = chacha(seed);
            let x: Vec<f64> = (0..500).map(|_| rng.random::<f64>()).collect();
            if !ks_one_sample(&x, |s| s, 0.05, 0.0).unwrap().accept {
                rejections += 1;
            }
        }
        // 5% nominal; 3σ band for 200 trials is about ±9
        assert!(rejections <= 19, "{rejections} rejections");
    }

    #[test]
    fn line_fit_recovers_exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 1.5 - 2.0 * v).collect();
        let f = weighted_line_fit(&x, &y, &[1.0, 2.0, 0.5, 1.0]).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-13 && (f.intercept - 1.5).abs() < 1e-13);
        // unit weights: se of the slope is 1/√Σ(x − x̄)²
        let g = weighted_line_fit(&x, &y, &[1.0; 4]).unwrap();
        assert!((g.slope_se - 1.0 / 5f64.sqrt()).abs() < 1e-13);
        assert!(weighted_line_fit(&[1.0, 1.0], &[0.0, 1.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn permutation_test_separates_independent_and_correlated_runs() {
        let mut rng = chacha(9);
        let iid: Vec<Vec<f64>> =
            (0..500).map(|_| (0..5).map(|_| StandardNormal.sample(&mut rng)).collect()).collect();
        let p = lag1_permutation_test(&iid, 199, 1).unwrap();
        assert!(p.p_value > 0.01, "{p:?}");
        let walk: Vec<Vec<f64>> = iid
            .iter()
            .map(|r| {
                r.iter()
                    .scan(0.0, |s, &x| {
                        *s = 0.8 * *s + x;
                        Some(*s)
                    })
                    .collect()
            })
            .collect();
        let q = lag1_permutation_test(&walk, 199, 1).unwrap();
        assert!(q.p_value <= 0.01, "{q:?}");
    }
}
