//! Distances between curves, point sets and points of the Riemann sphere.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered list of points with consecutive duplicates collapsed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    points: Vec<Complex64>,
}

impl Polyline {
    pub fn new(points: Vec<Complex64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySet);
        }
        if points.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite polyline point".into()));
        }
        let mut out: Vec<Complex64> = Vec::with_capacity(points.len());
        for p in points {
            if out.last() != Some(&p) {
                out.push(p);
            }
        }
        Ok(Self { points: out })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }
}

/// Inserts points along each segment so that no gap exceeds `h`.
pub fn resample(points: &[Complex64], h: f64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(points.len());
    if let Some(&first) = points.first() {
        out.push(first);
    }
    for w in points.windows(2) {
        let n = ((w[1] - w[0]).norm() / h).ceil().max(1.0) as usize;
        for k in 1..=n {
            out.push(w[0] + (w[1] - w[0]) * (k as f64 / n as f64));
        }
    }
    out
}

/// Discrete Fréchet distance between two sampled curves.
pub fn curve_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "curves must be nonempty");
    let m = b.len();
    let mut prev = vec![0.0f64; m];
    let mut cur = vec![0.0f64; m];
    for (i, &p) in a.iter().enumerate() {
        for j in 0..m {
            let d = (p - b[j]).norm();
            cur[j] = match (i, j) {
                (0, 0) => d,
                (0, _) => cur[j - 1].max(d),
                (_, 0) => prev[0].max(d),
                _ => prev[j].min(prev[j - 1]).min(cur[j - 1]).max(d),
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m - 1]
}

fn directed(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .map(|p| b.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

pub fn hausdorff_points(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(directed(a, b).max(directed(b, a)))
}

/// Hausdorff distance between two families of curves under [`curve_distance`].
pub fn hausdorff_curvesets(f: &[Polyline], g: &[Polyline]) -> Result<f64> {
    if f.is_empty() || g.is_empty() {
        return Err(Error::EmptySet);
    }
    let d: Vec<Vec<f64>> = f
        .iter()
        .map(|x| g.iter().map(|y| curve_distance(x.points(), y.points())).collect())
        .collect();
    let rows = d.iter().map(|r| r.iter().copied().fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
    let cols = (0..g.len())
        .map(|j| d.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    Ok(rows.max(cols))
}

/// A point of the extended plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

/// Geodesic distance for the metric `|dz| / (1 + |z|²)`.
pub fn sphere_distance(u: SpherePoint, v: SpherePoint) -> f64 {
    use SpherePoint::*;
    match (u, v) {
        (Infinity, Infinity) => 0.0,
        (Finite(z), Infinity) | (Infinity, Finite(z)) => std::f64::consts::FRAC_PI_2 - z.norm().atan(),
        (Finite(a), Finite(b)) => (a - b).norm().atan2((1.0 + a.conj() * b).norm()),
    }
}
