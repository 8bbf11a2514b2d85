//! Schwarz–Christoffel maps for the rectangle, the equilateral triangle and
//! general polygons.
//!
//! Rectangle and triangle maps use the upper half-plane with real
//! prevertices, returned as projective pairs `[n : m]` so that `∞` needs no
//! special casing. Polygon maps use the disc directly.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::elliptic::{amplitude, complete_k_from_kp, incomplete_f};
use super::quadrature::gauss_jacobi;
use crate::cardy::{GAMMA_1_3, GAMMA_2_3};
use crate::error::{Error, Result};

/// Rectangle `[0, W] × [0, H]` (translated to `origin`) as the image of the
/// upper half-plane under `x ↦ ∫₀ˣ dt / √((1 − t²)(1 − k²t²))`, with corners at
/// the prevertices `−1, 1, 1/k, −1/k`.
#[derive(Debug, Clone)]
pub struct RectMap {
    pub k: f64,
    pub kp: f64,
    pub big_k: f64,
    pub big_kp: f64,
    origin: Complex64,
    scale: f64,
}

impl RectMap {
    pub fn new(origin: Complex64, width: f64, height: f64) -> Result<Self> {
        let aspect = width / height;
        let ratio = |t: f64| {
            let k = 1.0 / (1.0 + (-2.0 * t).exp()).sqrt();
            let kp = 1.0 / (1.0 + (2.0 * t).exp()).sqrt();
            (k, kp, 2.0 * complete_k_from_kp(kp) / complete_k_from_kp(k))
        };
        // t = ln(k/k'); the aspect ratio is increasing in t
        let (mut lo, mut hi) = (-20.0, 20.0);
        if !(ratio(lo).2 < aspect && ratio(hi).2 > aspect) {
            return Err(Error::MapNotConverged(format!("aspect ratio {aspect} out of range")));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if ratio(mid).2 < aspect {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        let (k, kp, got) = ratio(0.5 * (lo + hi));
        if (got - aspect).abs() > 1e-9 * aspect {
            return Err(Error::MapNotConverged(format!(
                "rectangle modulus: aspect error {:e}",
                (got - aspect).abs()
            )));
        }
        let (big_k, big_kp) = (complete_k_from_kp(kp), complete_k_from_kp(k));
        Ok(Self { k, kp, big_k, big_kp, origin, scale: width / (2.0 * big_k) })
    }

    fn to_local(&self, z: Complex64) -> Complex64 {
        (z - self.origin) / self.scale - self.big_k
    }

    fn from_local(&self, z: Complex64) -> Complex64 {
        self.origin + (z + self.big_k) * self.scale
    }

    fn sn(&self, u: f64) -> f64 {
        amplitude(u, self.k, self.big_k).sin()
    }

    /// Real prevertex of the boundary point `z`.
    pub fn prevertex(&self, z: Complex64) -> (f64, f64) {
        let w = self.to_local(z);
        let d = [w.im, self.big_k - w.re, self.big_kp - w.im, w.re + self.big_k];
        let side = (0..4).min_by(|&a, &b| d[a].total_cmp(&d[b])).unwrap();
        match side {
            0 => (self.sn(w.re.clamp(-self.big_k, self.big_k)), 1.0),
            2 => (1.0, self.k * self.sn(w.re.clamp(-self.big_k, self.big_k))),
            _ => {
                let v = w.im.clamp(0.0, self.big_kp);
                let psi = amplitude(v, self.kp, self.big_kp);
                let x = 1.0 / (1.0 - (self.kp * psi.sin()).powi(2)).sqrt();
                (if side == 1 { x } else { -x }, 1.0)
            }
        }
    }

    /// Boundary image of the real prevertex `[n : m]`.
    pub fn image(&self, n: f64, m: f64) -> Complex64 {
        let local = if n.abs() <= m.abs() {
            Complex64::new(incomplete_f((n / m).clamp(-1.0, 1.0).asin(), self.k), 0.0)
        } else if n.abs() * self.k <= m.abs() {
            let x = n / m;
            let s = ((1.0 - 1.0 / (x * x)).sqrt() / self.kp).min(1.0);
            let v = incomplete_f(s.asin(), self.kp);
            Complex64::new(self.big_k * x.signum(), v)
        } else {
            let s = (m / (self.k * n)).clamp(-1.0, 1.0);
            Complex64::new(incomplete_f(s.asin(), self.k), self.big_kp)
        };
        self.from_local(local)
    }
}

/// `B(1/3, 1/3)`.
pub fn beta_third() -> f64 {
    GAMMA_1_3 * GAMMA_1_3 / GAMMA_2_3
}

/// `∫₀ˣ t^{−2/3} (1 − t)^{−2/3} dt` for `x ∈ [0, 1]`.
pub fn incomplete_beta_third(x: f64) -> f64 {
    if x > 0.5 {
        return beta_third() - incomplete_beta_third(1.0 - x);
    }
    if x <= 0.0 {
        return 0.0;
    }
    let rule = gauss_jacobi(32, 0.0, -2.0 / 3.0);
    // t = x u, u = (1 + s)/2
    let inner = rule.apply(|s| (1.0 - x * 0.5 * (1.0 + s)).powf(-2.0 / 3.0));
    x.cbrt() * 2f64.powf(2.0 / 3.0) * 0.5 * inner
}

fn inverse_beta_third(f: f64) -> f64 {
    let b = beta_third();
    if f > 0.5 {
        return 1.0 - inverse_beta_third(1.0 - f);
    }
    let (mut lo, mut hi) = (0.0, 0.5f64.cbrt());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if incomplete_beta_third(mid * mid * mid) / b < f {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-17 {
            break;
        }
    }
    let y = 0.5 * (lo + hi);
    y * y * y
}

/// Equilateral triangle with prevertices `0, 1, ∞` at its three corners.
/// The Möbius map `σ(x) = 1/(1 − x)` permutes the prevertices cyclically and
/// corresponds to rotation by 120° about the centroid.
#[derive(Debug, Clone)]
pub struct TriangleMap {
    vertices: [Complex64; 3],
}

fn sigma(p: (f64, f64)) -> (f64, f64) {
    (p.1, p.1 - p.0)
}

impl TriangleMap {
    pub fn new(vertices: [Complex64; 3]) -> Self {
        Self { vertices }
    }

    pub fn prevertex(&self, z: Complex64) -> (f64, f64) {
        let v = self.vertices;
        let (mut best, mut side, mut frac) = (f64::INFINITY, 0, 0.0);
        for j in 0..3 {
            let (a, b) = (v[j], v[(j + 1) % 3]);
            let d = b - a;
            let t = (((z - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
            let dist = (a + d * t - z).norm();
            if dist < best {
                (best, side, frac) = (dist, j, t);
            }
        }
        let mut p = (inverse_beta_third(frac), 1.0);
        for _ in 0..side {
            p = sigma(p);
        }
        p
    }

    pub fn image(&self, n: f64, m: f64) -> Complex64 {
        let (side, x) = if m != 0.0 && (0.0..=1.0).contains(&(n / m)) {
            (0, n / m)
        } else if m == 0.0 || n / m > 1.0 {
            (1, (n - m) / n)
        } else {
            (2, m / (m - n))
        };
        let f = incomplete_beta_third(x.clamp(0.0, 1.0)) / beta_third();
        let (a, b) = (self.vertices[side], self.vertices[(side + 1) % 3]);
        a + (b - a) * f
    }
}

/// Disc Schwarz–Christoffel map
/// `f(w) = v₀ + A ∫_{w₀}^{w} ∏ (1 − ζ/w_k)^{β_k} dζ` onto a polygon with turning
/// exponents `β_k = α_k − 1`, `α_k π` the interior angle at vertex `k`.
#[derive(Debug, Clone)]
pub struct PolygonMap {
    vertices: Vec<Complex64>,
    beta: Vec<f64>,
    theta: Vec<f64>,
    scale: Complex64,
}

const NODES: usize = 48;

fn prevertices(theta: &[f64]) -> Vec<Complex64> {
    theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect()
}

/// `∫_p^q ∏ (1 − ζ/w_j)^{β_j} dζ` along the chord, with optional endpoint
/// singularities at prevertices `left` (= p) and `right` (= q).
fn chord_integral(
    w: &[Complex64],
    beta: &[f64],
    p: Complex64,
    q: Complex64,
    left: Option<usize>,
    right: Option<usize>,
) -> Complex64 {
    let (a, b) = (right.map_or(0.0, |j| beta[j]), left.map_or(0.0, |j| beta[j]));
    let rule = gauss_jacobi(NODES, a, b);
    let (m, h) = ((p + q) * 0.5, (q - p) * 0.5);
    let mut constant = h;
    if let Some(j) = left {
        constant *= (-h / w[j]).powf(beta[j]);
    }
    if let Some(j) = right {
        constant *= (h / w[j]).powf(beta[j]);
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for (&t, &wt) in rule.nodes.iter().zip(&rule.weights) {
        let z = m + h * t;
        let mut f = Complex64::new(wt, 0.0);
        for (j, (&wj, &bj)) in w.iter().zip(beta).enumerate() {
            if Some(j) == left || Some(j) == right {
                continue;
            }
            f *= (Complex64::new(1.0, 0.0) - z / wj).powf(bj);
        }
        sum += f;
    }
    sum * constant
}

fn side_integrals(theta: &[f64], beta: &[f64]) -> Vec<Complex64> {
    let w = prevertices(theta);
    let n = w.len();
    (0..n)
        .map(|k| {
            let j = (k + 1) % n;
            chord_integral(&w, beta, w[k], w[j], Some(k), Some(j))
        })
        .collect()
}

impl PolygonMap {
    pub fn new(vertices: Vec<Complex64>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidDomain("polygon needs at least 3 vertices".into()));
        }
        let beta: Vec<f64> = (0..n)
            .map(|k| {
                let prev = vertices[k] - vertices[(k + n - 1) % n];
                let next = vertices[(k + 1) % n] - vertices[k];
                -(next / prev).arg() / PI
            })
            .collect();
        let lengths: Vec<f64> = (0..n).map(|k| (vertices[(k + 1) % n] - vertices[k]).norm()).collect();
        let free = n.saturating_sub(3);
        let theta_of = |logits: &[f64]| -> Vec<f64> {
            let step = 2.0 * PI / n as f64;
            let mut theta = vec![0.0, step, 2.0 * step];
            if n > 3 {
                let rest = 2.0 * PI - 2.0 * step;
                let mut e: Vec<f64> = logits.iter().map(|l| l.exp()).collect();
                e.push(1.0);
                let total: f64 = e.iter().sum();
                for g in e.iter().take(n - 3) {
                    let last = *theta.last().unwrap();
                    theta.push(last + rest * g / total);
                }
            }
            theta.truncate(n);
            theta
        };
        let residual = |logits: &[f64]| -> DVector<f64> {
            let ints = side_integrals(&theta_of(logits), &beta);
            DVector::from_iterator(
                free,
                (1..=free).map(|i| {
                    (ints[i].norm() / ints[0].norm()).ln() - (lengths[i] / lengths[0]).ln()
                }),
            )
        };
        let mut x = vec![0.0; free];
        let mut r = residual(&x);
        for _ in 0..200 {
            if r.norm() < 1e-13 {
                break;
            }
            let mut jac = DMatrix::zeros(free, free);
            for c in 0..free {
                let mut xp = x.clone();
                let h = 1e-7 * (1.0 + x[c].abs());
                xp[c] += h;
                let rp = residual(&xp);
                for row in 0..free {
                    jac[(row, c)] = (rp[row] - r[row]) / h;
                }
            }
            let Some(step) = jac.lu().solve(&(-&r)) else {
                return Err(Error::MapNotConverged("singular Jacobian in polygon solve".into()));
            };
            let mut lambda = 1.0;
            loop {
                let xn: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a + lambda * s).collect();
                let rn = residual(&xn);
                if rn.norm() < r.norm() || lambda < 1e-6 {
                    x = xn;
                    r = rn;
                    break;
                }
                lambda *= 0.5;
            }
        }
        let theta = theta_of(&x);
        let ints = side_integrals(&theta, &beta);
        let scale = (vertices[1] - vertices[0]) / ints[0];
        let diam = vertices
            .iter()
            .flat_map(|a| vertices.iter().map(move |b| (a - b).norm()))
            .fold(0.0, f64::max);
        let mut v = vertices[0];
        let mut err: f64 = 0.0;
        for k in 0..n {
            v += scale * ints[k];
            err = err.max((v - vertices[(k + 1) % n]).norm());
        }
        if !(err <= 1e-9 * diam) {
            return Err(Error::MapNotConverged(format!("polygon vertex placement error {err:e}")));
        }
        Ok(Self { vertices, beta, theta, scale })
    }

    /// Prevertex angles, increasing from 0.
    pub fn prevertex_angles(&self) -> &[f64] {
        &self.theta
    }

    fn side_of_angle(&self, t: f64) -> usize {
        let t = t.rem_euclid(2.0 * PI);
        (0..self.theta.len()).rev().find(|&k| self.theta[k] <= t).unwrap_or(0)
    }

    /// Image of the circle point `e^{it}` lying on side `k`.
    fn image_on_side(&self, k: usize, t: f64) -> Complex64 {
        let n = self.theta.len();
        let w = prevertices(&self.theta);
        let j = (k + 1) % n;
        let (t0, mut t1) = (self.theta[k], self.theta[j]);
        if j == 0 {
            t1 += 2.0 * PI;
        }
        let z = Complex64::from_polar(1.0, t);
        if t - t0 <= t1 - t {
            self.vertices[k] + self.scale * chord_integral(&w, &self.beta, w[k], z, Some(k), None)
        } else {
            self.vertices[j] - self.scale * chord_integral(&w, &self.beta, z, w[j], None, Some(j))
        }
    }

    pub fn image(&self, w: Complex64) -> Complex64 {
        let t = w.arg().rem_euclid(2.0 * PI);
        let k = self.side_of_angle(t);
        self.image_on_side(k, t)
    }

    /// Disc prevertex of the boundary point `z`.
    pub fn prevertex(&self, z: Complex64) -> Complex64 {
        let n = self.vertices.len();
        let (mut best, mut side, mut frac) = (f64::INFINITY, 0, 0.0);
        for k in 0..n {
            let (a, b) = (self.vertices[k], self.vertices[(k + 1) % n]);
            let d = b - a;
            let t = (((z - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
            let dist = (a + d * t - z).norm();
            if dist < best {
                (best, side, frac) = (dist, k, t);
            }
        }
        let j = (side + 1) % n;
        let (t0, mut t1) = (self.theta[side], self.theta[j]);
        if j == 0 {
            t1 += 2.0 * PI;
        }
        if frac <= 0.0 {
            return Complex64::from_polar(1.0, t0);
        }
        if frac >= 1.0 {
            return Complex64::from_polar(1.0, t1);
        }
        let (a, b) = (self.vertices[side], self.vertices[j]);
        let len = (b - a).norm();
        let (mut lo, mut hi) = (t0, t1);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if (self.image_on_side(side, mid) - a).norm() / len < frac {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        Complex64::from_polar(1.0, 0.5 * (lo + hi))
    }
}
