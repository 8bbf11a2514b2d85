//! Cardy's crossing formula
//! `Φ(η) = Γ(2/3) / (Γ(4/3) Γ(1/3)) · η^{1/3} ₂F₁(1/3, 2/3; 4/3; η)`
//! and the boundary hitting distribution it determines.

use serde::{Deserialize, Serialize};

use crate::conformal::{cross_ratio, quad_cross_ratio, MarkedDomain};
use crate::error::{Error, Result};

pub const GAMMA_1_3: f64 = 2.678_938_534_707_747_6;
pub const GAMMA_2_3: f64 = 1.354_117_939_426_400_4;
pub const GAMMA_4_3: f64 = 0.892_979_511_569_249_2;
pub const GAMMA_M1_3: f64 = -4.062_353_818_279_201_3;

/// `Γ(2/3) / (Γ(4/3) Γ(1/3))`.
pub const PREFACTOR: f64 = GAMMA_2_3 / (GAMMA_4_3 * GAMMA_1_3);

const SWITCH: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CardyValue {
    pub eta: f64,
    pub phi: f64,
    pub err_bound: f64,
}

/// Sum of `₂F₁(a, b; c; x)` for `0 ≤ x < 1` with a bound on the truncated tail.
fn series(a: f64, b: f64, c: f64, x: f64) -> (f64, f64) {
    let (mut term, mut sum) = (1.0f64, 1.0f64);
    let mut n = 0.0;
    loop {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x;
        sum += term;
        n += 1.0;
        // later term ratios stay below x once (a+n)(b+n) ≤ (c+n)(n+1)
        let tail = term * x / (1.0 - x);
        if tail <= 1e-17 * sum || n > 5000.0 {
            return (sum, tail + 4e-16 * n.sqrt() * sum);
        }
    }
}

/// `₂F₁(1/3, 2/3; 4/3; η)` with an error bound.
pub fn hyp2f1_cardy_with_bound(eta: f64) -> (f64, f64) {
    let eta = eta.clamp(0.0, 1.0);
    if eta <= SWITCH {
        return series(1.0 / 3.0, 2.0 / 3.0, 4.0 / 3.0, eta);
    }
    // connection to 1 − η; the first branch collapses to η^{-1/3}
    let a_coef = GAMMA_4_3 * GAMMA_1_3 / GAMMA_2_3;
    let b_coef = GAMMA_4_3 * GAMMA_M1_3 / (GAMMA_1_3 * GAMMA_2_3);
    let (s, err) = series(1.0, 2.0 / 3.0, 4.0 / 3.0, 1.0 - eta);
    let w = (1.0 - eta).cbrt();
    let value = a_coef / eta.cbrt() + b_coef * w * s;
    (value, b_coef.abs() * w * err + 4e-16 * value)
}

pub fn hyp2f1_cardy(eta: f64) -> f64 {
    hyp2f1_cardy_with_bound(eta).0
}

pub fn cardy_value(eta: f64) -> CardyValue {
    let eta = eta.clamp(0.0, 1.0);
    if eta == 0.0 || eta == 1.0 {
        return CardyValue { eta, phi: eta, err_bound: 0.0 };
    }
    if eta <= SWITCH {
        let (f, err) = hyp2f1_cardy_with_bound(eta);
        let pre = PREFACTOR * eta.cbrt();
        return CardyValue { eta, phi: (pre * f).clamp(0.0, 1.0), err_bound: pre * err + 2e-16 };
    }
    // PREFACTOR · A = 1 exactly, which keeps Φ(1) = 1
    let b_coef = PREFACTOR * GAMMA_4_3 * GAMMA_M1_3 / (GAMMA_1_3 * GAMMA_2_3);
    let (s, err) = series(1.0, 2.0 / 3.0, 4.0 / 3.0, 1.0 - eta);
    let w = (eta * (1.0 - eta)).cbrt();
    let phi = 1.0 + b_coef * w * s;
    CardyValue { eta, phi: phi.clamp(0.0, 1.0), err_bound: b_coef.abs() * w * err + 2e-16 }
}

pub fn cardy_phi(eta: f64) -> f64 {
    cardy_value(eta).phi
}

/// Cardy's formula for a four-mark domain: the probability of a crossing
/// from arc `z₁z₂` to arc `z₃z₄`.
pub fn crossing_probability(md: &MarkedDomain) -> Result<f64> {
    Ok(cardy_phi(quad_cross_ratio(md)?))
}

/// Probability that the exploration from `a` first hits the arc `cd` within
/// its initial portion of arc-length fraction `s`; marks are `[a, c, d]`.
/// Equals `1 − Φ(a, c; x(s), d)`, which has no mass at `c` or `d`.
pub fn hitting_cdf(md: &MarkedDomain, s: f64) -> Result<f64> {
    if md.marks().len() != 3 {
        return Err(Error::InvalidMarks("hitting distribution needs marks [a, c, d]".into()));
    }
    if s <= 0.0 {
        return Ok(0.0);
    }
    if s >= 1.0 {
        return Ok(1.0);
    }
    let w = md.mark_prevertices();
    let wx = md.disc_prevertex(md.arc_param(1, 2, s));
    let eta = cross_ratio(&[w[0], w[1], wx, w[2]]);
    Ok(1.0 - cardy_phi(eta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::Shape;
    use std::f64::consts::PI;

    /// Tanh-sinh quadrature on (0, 1), robust to endpoint singularities.
    fn tanh_sinh<F: Fn(f64, f64) -> f64>(f: F) -> f64 {
        let h = 1.0 / 64.0;
        let mut sum = 0.0;
        for k in -400..=400 {
            let t = k as f64 * h;
            let u = 0.5 * PI * t.sinh();
            let x = 0.5 * u.exp() / u.cosh();
            let w = 0.5 * PI * t.cosh() / u.cosh().powi(2) * 0.5;
            let one_minus = 0.5 * (-u).exp() / u.cosh();
            if x <= 0.0 || one_minus <= 0.0 {
                continue;
            }
            sum += w * f(x, one_minus);
        }
        sum * h
    }

    /// Euler integral: `₂F₁ = Γ(c)/(Γ(b)Γ(c−b)) ∫ t^{b−1}(1−t)^{c−b−1}(1−ηt)^{−a} dt`.
    fn euler_oracle(eta: f64) -> f64 {
        let pre = GAMMA_4_3 / (GAMMA_2_3 * GAMMA_2_3);
        pre * tanh_sinh(|t, s| t.powf(-1.0 / 3.0) * s.powf(-1.0 / 3.0) * (1.0 - eta * t).powf(-1.0 / 3.0))
    }

    #[test]
    fn gamma_constants() {
        assert!((GAMMA_4_3 - GAMMA_1_3 / 3.0).abs() < 1e-15);
        assert!((GAMMA_M1_3 + 3.0 * GAMMA_2_3).abs() < 1e-14);
        // reflection: Γ(1/3)Γ(2/3) = π / sin(π/3)
        assert!((GAMMA_1_3 * GAMMA_2_3 - PI / (PI / 3.0).sin()).abs() < 1e-14);
    }

    #[test]
    fn endpoints() {
        assert_eq!(hyp2f1_cardy(0.0), 1.0);
        let gauss = GAMMA_4_3 * GAMMA_1_3 / GAMMA_2_3;
        assert!((hyp2f1_cardy(1.0) - gauss).abs() < 1e-14);
        assert!((gauss - 1.766_638_750_285_449_9).abs() < 1e-14);
        assert_eq!(cardy_phi(0.0), 0.0);
        assert_eq!(cardy_phi(1.0), 1.0);
        assert!((cardy_phi(1.0 - 1e-15) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn matches_euler_integral() {
        assert!((euler_oracle(0.25) - 1.047_566_861_349_620_1).abs() < 1e-12);
        for i in 1..40 {
            let eta = i as f64 / 40.0;
            let (got, want) = (hyp2f1_cardy(eta), euler_oracle(eta));
            assert!((got - want).abs() < 1e-10, "η = {eta}: {got} vs {want}");
        }
    }

    #[test]
    fn branches_agree_on_overlap() {
        for i in 0..=40 {
            let eta = 0.6 + 0.2 * i as f64 / 40.0;
            let near = series(1.0 / 3.0, 2.0 / 3.0, 4.0 / 3.0, eta).0;
            assert!((near - hyp2f1_cardy(eta)).abs() < 1e-12, "η = {eta}");
            let direct = (PREFACTOR * eta.cbrt() * near).clamp(0.0, 1.0);
            assert!((direct - cardy_phi(eta)).abs() < 1e-12);
        }
    }

    #[test]
    fn frozen_values() {
        assert!((PREFACTOR - 0.566_046_680_363_159_7).abs() < 1e-15);
        assert!((cardy_phi(0.5) - 0.5).abs() < 1e-12);
        assert!((cardy_phi(0.3) - 0.401_227_613_791_358).abs() < 1e-12);
        assert!((cardy_phi(0.9) - 0.732_662_993_149_616_6).abs() < 1e-12);
        let eta2 = 17.0 - 12.0 * 2f64.sqrt();
        assert!((cardy_phi(eta2) - 0.175_646_893_800_655_24).abs() < 1e-12);
    }

    #[test]
    fn duality_and_error_bound() {
        for i in 0..1000 {
            let eta = (i as f64 + 0.5) / 1000.0;
            assert!((cardy_phi(eta) + cardy_phi(1.0 - eta) - 1.0).abs() < 1e-10);
            assert!(cardy_value(eta).err_bound <= 1e-10);
        }
        let v = cardy_value(1e-8);
        assert!(v.err_bound <= 1e-10);
    }

    #[test]
    fn crossing_probabilities() {
        let sq = MarkedDomain::rectangle(1.0, 1.0).unwrap();
        assert!((crossing_probability(&sq).unwrap() - 0.5).abs() < 1e-10);
        let r2 = MarkedDomain::rectangle(2.0, 1.0).unwrap();
        assert!((crossing_probability(&r2).unwrap() - 0.175_646_893_800_655_24).abs() < 1e-9);
        let disc = MarkedDomain::new(Shape::unit_disc(), vec![0.0, 0.25, 0.5, 0.75]).unwrap();
        assert!((crossing_probability(&disc).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn conformal_invariance_between_disc_and_half_plane() {
        let xs = [-2.0, -0.3, 0.4, 3.0];
        let hp = MarkedDomain::new(Shape::HalfPlane, xs.to_vec()).unwrap();
        let cay = crate::conformal::MobiusMap::cayley();
        let marks: Vec<f64> = xs
            .iter()
            .map(|&x| (cay.apply(num_complex::Complex64::new(x, 0.0)).arg() / (2.0 * PI)).rem_euclid(1.0))
            .collect();
        let disc = MarkedDomain::new(Shape::unit_disc(), marks).unwrap();
        let (a, b) = (crossing_probability(&hp).unwrap(), crossing_probability(&disc).unwrap());
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn half_disc_hitting_cdf() {
        let sh = Shape::unit_half_disc();
        let top = 0.5 * PI / (PI + 2.0);
        let left = PI / (PI + 2.0);
        let md = MarkedDomain::new(sh, vec![top, left, 0.0]).unwrap();
        assert_eq!(hitting_cdf(&md, 0.0).unwrap(), 0.0);
        assert_eq!(hitting_cdf(&md, 1.0).unwrap(), 1.0);
        assert!((hitting_cdf(&md, 0.5).unwrap() - 0.5).abs() < 1e-10);
        let mut prev = 0.0;
        for i in 1..1000 {
            let v = hitting_cdf(&md, i as f64 / 1000.0).unwrap();
            assert!(v >= prev - 1e-12);
            assert!(v - prev < 0.02);
            prev = v;
        }
    }

    #[test]
    fn rectangle_perturbation_is_continuous() {
        let r = MarkedDomain::rectangle(1.5, 1.0).unwrap();
        let base = crossing_probability(&r).unwrap();
        let m = r.marks().to_vec();
        for eps in [1e-3, 1e-4] {
            let moved = r.with_marks(vec![m[0] + eps, m[1], m[2], m[3]]).unwrap();
            let d = (crossing_probability(&moved).unwrap() - base).abs();
            assert!(d > 0.0 && d < 10.0 * eps, "eps {eps}: {d}");
        }
    }
}
