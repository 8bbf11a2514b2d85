use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `z ↦ (a z + b) / (c z + d)` with `ad − bc ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Finite(Complex64),
    Infinity,
}

impl Point {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            Point::Finite(z) => Some(z),
            Point::Infinity => None,
        }
    }
}

impl MobiusMap {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let m = Self { a, b, c, d };
        if m.det().norm() <= 1e-300 {
            return Err(Error::InvalidInput("singular Möbius map".into()));
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Self { a: o, b: z, c: z, d: o }
    }

    /// Cayley map `z ↦ (z − i)/(z + i)` from the upper half-plane onto the disc.
    pub fn cayley() -> Self {
        let (o, i) = (Complex64::new(1.0, 0.0), Complex64::i());
        Self { a: o, b: -i, c: o, d: i }
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    pub fn apply_point(&self, p: Point) -> Point {
        let (num, den) = match p {
            Point::Finite(z) => (self.a * z + self.b, self.c * z + self.d),
            Point::Infinity => (self.a, self.c),
        };
        if den.norm() == 0.0 {
            Point::Infinity
        } else {
            Point::Finite(num / den)
        }
    }

    /// Image of the real projective point `[n : m]`.
    pub fn apply_projective(&self, n: f64, m: f64) -> Point {
        let num = self.a * n + self.b * m;
        let den = self.c * n + self.d * m;
        if den.norm() <= 1e-300 * num.norm() || den.norm() == 0.0 {
            Point::Infinity
        } else {
            Point::Finite(num / den)
        }
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    /// Preimage of a unit-circle point under a map sending the extended real
    /// line onto the circle, as a real projective pair `[n : m]` normalized to
    /// unit length.
    pub fn real_preimage(&self, w: Complex64) -> (f64, f64) {
        let inv = self.inverse();
        let num = inv.a * w + inv.b;
        let den = inv.c * w + inv.d;
        // num/den is real: rotate the pair onto the real axis
        let (pick, other) = if num.norm() >= den.norm() { (num, den) } else { (den, num) };
        let phase = pick.conj() / pick.norm();
        let (p, o) = ((pick * phase).re, (other * phase).re);
        let (n, m) = if num.norm() >= den.norm() { (p, o) } else { (o, p) };
        let h = n.hypot(m);
        (n / h, m / h)
    }
}

/// The Möbius map `ψ` from the upper half-plane onto the unit disc with
/// `ψ(0) = wa` and `ψ(∞) = wb`, both on the unit circle.
pub fn halfplane_to_disc_marked(wa: Complex64, wb: Complex64) -> Result<MobiusMap> {
    let (wa, wb) = (wa / wa.norm(), wb / wb.norm());
    if (wa - wb).norm() < 1e-14 {
        return Err(Error::DegenerateMarks);
    }
    let phi = (wa / wb).arg();
    let half = Complex64::from_polar(1.0, phi / 2.0);
    // the pole −ū must sit in the lower half-plane
    let u = if half.im > 0.0 { -half } else { half };
    MobiusMap::new(wb, wb * u, Complex64::new(1.0, 0.0), u.conj())
}
