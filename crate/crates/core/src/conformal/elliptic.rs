//! Legendre elliptic integrals of the first kind.

use std::f64::consts::FRAC_PI_2;

/// `K(k)` from the complementary modulus by the arithmetic-geometric mean,
/// which stays accurate as `k' → 0`.
pub fn complete_k_from_kp(kp: f64) -> f64 {
    assert!(kp > 0.0 && kp <= 1.0, "complementary modulus out of range");
    let (mut a, mut b) = (1.0f64, kp);
    for _ in 0..64 {
        if (a - b).abs() <= 4.0 * f64::EPSILON * a {
            break;
        }
        (a, b) = (0.5 * (a + b), (a * b).sqrt());
    }
    FRAC_PI_2 / a
}

pub fn complete_k(k: f64) -> f64 {
    assert!((0.0..1.0).contains(&k), "modulus out of range");
    complete_k_from_kp(((1.0 - k) * (1.0 + k)).sqrt())
}

/// Carlson's symmetric integral `R_F(x, y, z)` by duplication.
pub fn carlson_rf(x: f64, y: f64, z: f64) -> f64 {
    let (mut x, mut y, mut z) = (x, y, z);
    for _ in 0..200 {
        let mu = (x + y + z) / 3.0;
        let (dx, dy, dz) = (1.0 - x / mu, 1.0 - y / mu, 1.0 - z / mu);
        if dx.abs().max(dy.abs()).max(dz.abs()) < 1e-4 {
            let e2 = dx * dy - dz * dz;
            let e3 = dx * dy * dz;
            return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0)
                / mu.sqrt();
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * sy + sy * sz + sz * sx;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
    }
    let mu = (x + y + z) / 3.0;
    1.0 / mu.sqrt()
}

/// `F(φ, k) = ∫₀^φ dθ / √(1 − k² sin²θ)` for `|φ| ≤ π/2`, odd in `φ`.
pub fn incomplete_f(phi: f64, k: f64) -> f64 {
    if phi < 0.0 {
        return -incomplete_f(-phi, k);
    }
    let (s, c) = phi.sin_cos();
    let c = c.max(0.0);
    s * carlson_rf(c * c, (1.0 - k * s) * (1.0 + k * s), 1.0)
}

/// Amplitude `φ ∈ [−π/2, π/2]` with `F(φ, k) = u`, for `|u| ≤ K(k)`.
pub fn amplitude(u: f64, k: f64, big_k: f64) -> f64 {
    if u < 0.0 {
        return -amplitude(-u, k, big_k);
    }
    if u >= big_k {
        return FRAC_PI_2;
    }
    let (mut lo, mut hi) = (0.0, FRAC_PI_2);
    let mut phi = u / big_k * FRAC_PI_2;
    for _ in 0..200 {
        let r = incomplete_f(phi, k) - u;
        if r > 0.0 {
            hi = phi;
        } else {
            lo = phi;
        }
        let step = r * (1.0 - k * k * phi.sin().powi(2)).sqrt();
        let mut next = phi - step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - phi).abs() < 1e-16 || hi - lo < 1e-16 {
            return next;
        }
        phi = next;
    }
    phi
}
