//! Gauss rules and adaptive integration.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma;

/// Nodes on `[-1, 1]` and weights for `∫ (1-x)^α (1+x)^β f(x) dx`.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn apply<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

type Key = (usize, u64, u64);

fn cache() -> &'static Mutex<HashMap<Key, Arc<Rule>>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<Rule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Gauss–Jacobi rule of order `n` (Golub–Welsch), cached.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Arc<Rule> {
    assert!(n >= 1 && alpha > -1.0 && beta > -1.0);
    let key = (n, alpha.to_bits(), beta.to_bits());
    if let Some(rule) = cache().lock().unwrap().get(&key) {
        return rule.clone();
    }
    let rule = Arc::new(golub_welsch(n, alpha, beta));
    cache().lock().unwrap().insert(key, rule.clone());
    rule
}

pub fn gauss_legendre(n: usize) -> Arc<Rule> {
    gauss_jacobi(n, 0.0, 0.0)
}

/// Gauss–Chebyshev rule of the first kind, closed form.
pub fn gauss_chebyshev(n: usize) -> Rule {
    let w = std::f64::consts::PI / n as f64;
    let nodes = (0..n)
        .map(|i| ((2 * i + 1) as f64 * std::f64::consts::PI / (2 * n) as f64).cos())
        .collect();
    Rule { nodes, weights: vec![w; n] }
}

fn golub_welsch(n: usize, a: f64, b: f64) -> Rule {
    let ab = a + b;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let diag = if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        jac[(k, k)] = diag;
        if k + 1 < n {
            let m = (k + 1) as f64;
            let off2 = if k == 0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * m * (m + a) * (m + b) * (m + ab)
                    / ((2.0 * m + ab).powi(2) * (2.0 * m + ab + 1.0) * (2.0 * m + ab - 1.0))
            };
            jac[(k, k + 1)] = off2.sqrt();
            jac[(k + 1, k)] = off2.sqrt();
        }
    }
    let mu0 = ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
        - ln_gamma(ab + 2.0))
    .exp();
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

/// Adaptive Gauss–Legendre integration of a smooth integrand on `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let rule = gauss_legendre(20);
    let panel = |lo: f64, hi: f64| {
        let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        h * rule.apply(|x| f(c + h * x))
    };
    fn rec<P: Fn(f64, f64) -> f64>(p: &P, lo: f64, hi: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let mid = 0.5 * (lo + hi);
        let (l, r) = (p(lo, mid), p(mid, hi));
        if depth == 0 || (l + r - whole).abs() <= tol {
            l + r
        } else {
            rec(p, lo, mid, l, 0.5 * tol, depth - 1) + rec(p, mid, hi, r, 0.5 * tol, depth - 1)
        }
    }
    rec(&panel, a, b, panel(a, b), tol, 40)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_is_exact_on_polynomials() {
        let r = gauss_legendre(8);
        for p in 0..16 {
            let got = r.apply(|x| x.powi(p));
            let want = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
            assert!((got - want).abs() < 1e-14, "p = {p}");
        }
    }

    #[test]
    fn jacobi_moments_match_beta_function() {
        // ∫ (1-x)^α (1+x)^β x dx over [-1,1] via weight moments
        let (a, b) = (0.0, -2.0 / 3.0);
        let r = gauss_jacobi(12, a, b);
        // ∫_0^1 u^{-2/3} du = 3 after u = (1+x)/2
        let mass: f64 = r.weights.iter().sum();
        assert!((mass - 3.0 * 2f64.powf(1.0 / 3.0)).abs() < 1e-13);
        let r2 = gauss_jacobi(10, -0.5, -0.5);
        let cheb = gauss_chebyshev(10);
        for (x, y) in r2.nodes.iter().zip(cheb.nodes.iter().rev()) {
            assert!((x - y).abs() < 1e-13);
        }
        assert!((r2.weights[3] - cheb.weights[3]).abs() < 1e-13);
    }

    #[test]
    fn adaptive_integrates_peaked_function() {
        let f = |x: f64| 1.0 / (1e-4 + x * x);
        let got = integrate(&f, -1.0, 1.0, 1e-12);
        let want = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((got - want).abs() < 1e-9 * want);
    }
}
