//! Continuum domains of the catalogue and their boundary parametrizations.
//!
//! Bounded shapes are parametrized by the arc-length fraction `s ∈ [0, 1)`
//! of their boundary, traversed counterclockwise from a fixed start point:
//! east point of a disc, right end of a half-disc diameter, bottom-left
//! corner of a rectangle, first vertex of a triangle or polygon. The
//! half-plane boundary is parametrized by the real coordinate itself.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Disc { center: [f64; 2], radius: f64 },
    HalfPlane,
    /// The upper half of a disc.
    HalfDisc { center: [f64; 2], radius: f64 },
    Rect { origin: [f64; 2], width: f64, height: f64 },
    /// Vertices `origin`, `origin + side`, `origin + side·e^{iπ/3}`.
    EquilateralTriangle { origin: [f64; 2], side: f64 },
    /// Counterclockwise simple polygon.
    Polygon { vertices: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, Copy)]
pub enum Piece {
    Segment(Complex64, Complex64),
    Arc { center: Complex64, radius: f64, from: f64, to: f64 },
}

impl Piece {
    pub fn length(&self) -> f64 {
        match *self {
            Piece::Segment(a, b) => (b - a).norm(),
            Piece::Arc { radius, from, to, .. } => radius * (to - from),
        }
    }

    pub fn at(&self, t: f64) -> Complex64 {
        match *self {
            Piece::Segment(a, b) => a + (b - a) * t,
            Piece::Arc { center, radius, from, to } => {
                center + Complex64::from_polar(radius, from + (to - from) * t)
            }
        }
    }

    /// Nearest point parameter `t ∈ [0, 1]` and its distance.
    pub fn project(&self, z: Complex64) -> (f64, f64) {
        match *self {
            Piece::Segment(a, b) => {
                let d = b - a;
                let t = (((z - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
                (t, (a + d * t - z).norm())
            }
            Piece::Arc { center, radius, from, to } => {
                let w = z - center;
                let ang = w.im.atan2(w.re);
                let mut best = (0.0, (self.at(0.0) - z).norm());
                let e1 = (self.at(1.0) - z).norm();
                if e1 < best.1 {
                    best = (1.0, e1);
                }
                for k in -1..=1 {
                    let a = ang + 2.0 * PI * k as f64;
                    if a >= from && a <= to {
                        let t = (a - from) / (to - from);
                        let d = (w.norm() - radius).abs();
                        if d < best.1 {
                            best = (t, d);
                        }
                    }
                }
                best
            }
        }
    }
}

fn c(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl Shape {
    pub fn unit_disc() -> Self {
        Shape::Disc { center: [0.0, 0.0], radius: 1.0 }
    }

    pub fn unit_half_disc() -> Self {
        Shape::HalfDisc { center: [0.0, 0.0], radius: 1.0 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Shape::Disc { .. } => "disc",
            Shape::HalfPlane => "half_plane",
            Shape::HalfDisc { .. } => "half_disc",
            Shape::Rect { .. } => "rect",
            Shape::EquilateralTriangle { .. } => "equilateral_triangle",
            Shape::Polygon { .. } => "polygon",
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, Shape::HalfPlane)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        let bad = |m: &str| Err(Error::InvalidDomain(m.to_string()));
        match self {
            Shape::Disc { center, radius } | Shape::HalfDisc { center, radius } => {
                if !finite(center) || !(radius.is_finite() && *radius > 0.0) {
                    return bad("radius must be positive and finite");
                }
            }
            Shape::HalfPlane => {}
            Shape::Rect { origin, width, height } => {
                if !finite(origin) || !(*width > 0.0 && *height > 0.0)
                    || !width.is_finite() || !height.is_finite()
                {
                    return bad("rectangle sides must be positive");
                }
            }
            Shape::EquilateralTriangle { origin, side } => {
                if !finite(origin) || !(side.is_finite() && *side > 0.0) {
                    return bad("triangle side must be positive");
                }
            }
            Shape::Polygon { vertices } => {
                if vertices.len() < 3 {
                    return bad("polygon needs at least 3 vertices");
                }
                if !vertices.iter().all(|v| finite(v)) {
                    return bad("non-finite polygon vertex");
                }
                let n = vertices.len();
                let pts: Vec<Complex64> = vertices.iter().map(|&v| c(v)).collect();
                let area: f64 = (0..n).map(|i| (pts[i].conj() * pts[(i + 1) % n]).im).sum();
                if area <= 0.0 {
                    return bad("polygon must be counterclockwise with positive area");
                }
                for i in 0..n {
                    if (pts[(i + 1) % n] - pts[i]).norm() == 0.0 {
                        return bad("repeated polygon vertex");
                    }
                    for j in i + 1..n {
                        if j == i + 1 || (i == 0 && j == n - 1) {
                            continue;
                        }
                        if segments_cross(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]) {
                            return bad("polygon is not simple");
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> Vec<Complex64> {
        match self {
            Shape::Rect { origin, width, height } => {
                let o = c(*origin);
                vec![
                    o,
                    o + width,
                    o + Complex64::new(*width, *height),
                    o + Complex64::new(0.0, *height),
                ]
            }
            Shape::EquilateralTriangle { origin, side } => {
                let o = c(*origin);
                vec![o, o + side, o + Complex64::from_polar(*side, PI / 3.0)]
            }
            Shape::Polygon { vertices } => vertices.iter().map(|&v| c(v)).collect(),
            _ => Vec::new(),
        }
    }

    /// Boundary pieces in counterclockwise order; empty for the half-plane.
    pub fn pieces(&self) -> Vec<Piece> {
        match self {
            Shape::Disc { center, radius } => {
                vec![Piece::Arc { center: c(*center), radius: *radius, from: 0.0, to: 2.0 * PI }]
            }
            Shape::HalfDisc { center, radius } => {
                let o = c(*center);
                vec![
                    Piece::Arc { center: o, radius: *radius, from: 0.0, to: PI },
                    Piece::Segment(o - radius, o + radius),
                ]
            }
            Shape::HalfPlane => Vec::new(),
            _ => {
                let v = self.vertices();
                (0..v.len()).map(|i| Piece::Segment(v[i], v[(i + 1) % v.len()])).collect()
            }
        }
    }

    pub fn perimeter(&self) -> f64 {
        self.pieces().iter().map(Piece::length).sum()
    }

    /// Boundary parameters of the corners (empty for smooth shapes).
    pub fn corner_params(&self) -> Vec<f64> {
        match self {
            Shape::Disc { .. } | Shape::HalfPlane => Vec::new(),
            Shape::HalfDisc { .. } => {
                let p = PI / (PI + 2.0);
                vec![0.0, p]
            }
            _ => {
                let pieces = self.pieces();
                let total: f64 = pieces.iter().map(Piece::length).sum();
                let mut acc = 0.0;
                pieces
                    .iter()
                    .map(|p| {
                        let s = acc / total;
                        acc += p.length();
                        s
                    })
                    .collect()
            }
        }
    }

    pub fn boundary_point(&self, s: f64) -> Complex64 {
        if !self.is_bounded() {
            return Complex64::new(s, 0.0);
        }
        let pieces = self.pieces();
        let total: f64 = pieces.iter().map(Piece::length).sum();
        let mut target = s.rem_euclid(1.0) * total;
        for p in &pieces {
            let l = p.length();
            if target <= l {
                return p.at(target / l);
            }
            target -= l;
        }
        pieces[0].at(0.0)
    }

    /// Parameter of the boundary point nearest to `z`.
    pub fn boundary_param(&self, z: Complex64) -> f64 {
        if !self.is_bounded() {
            return z.re;
        }
        let pieces = self.pieces();
        let total: f64 = pieces.iter().map(Piece::length).sum();
        let mut acc = 0.0;
        let mut best = (f64::INFINITY, 0.0);
        for p in &pieces {
            let (t, d) = p.project(z);
            if d < best.0 {
                best = (d, (acc + t * p.length()) / total);
            }
            acc += p.length();
        }
        best.1.rem_euclid(1.0)
    }

    pub fn distance_to_boundary(&self, z: Complex64) -> f64 {
        if !self.is_bounded() {
            return z.im.abs();
        }
        self.pieces().iter().map(|p| p.project(z).1).fold(f64::INFINITY, f64::min)
    }

    /// Membership in the open domain.
    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            Shape::Disc { center, radius } => (z - c(*center)).norm() < *radius,
            Shape::HalfPlane => z.im > 0.0,
            Shape::HalfDisc { center, radius } => {
                let w = z - c(*center);
                w.norm() < *radius && w.im > 0.0
            }
            _ => {
                let v = self.vertices();
                if self.distance_to_boundary(z) <= 1e-12 * self.perimeter() {
                    return false;
                }
                let mut inside = false;
                let n = v.len();
                for i in 0..n {
                    let (a, b) = (v[i], v[(i + 1) % n]);
                    if (a.im > z.im) != (b.im > z.im) {
                        let x = a.re + (z.im - a.im) * (b.re - a.re) / (b.im - a.im);
                        if z.re < x {
                            inside = !inside;
                        }
                    }
                }
                inside
            }
        }
    }

    /// Axis-aligned bounding box `(min, max)` of a bounded shape.
    pub fn bbox(&self) -> (Complex64, Complex64) {
        match self {
            Shape::Disc { center, radius } => {
                let o = c(*center);
                (o - Complex64::new(*radius, *radius), o + Complex64::new(*radius, *radius))
            }
            Shape::HalfDisc { center, radius } => {
                let o = c(*center);
                (o - radius, o + Complex64::new(*radius, *radius))
            }
            Shape::HalfPlane => (
                Complex64::new(f64::NEG_INFINITY, 0.0),
                Complex64::new(f64::INFINITY, f64::INFINITY),
            ),
            _ => {
                let v = self.vertices();
                let min = v.iter().fold(Complex64::new(f64::INFINITY, f64::INFINITY), |m, p| {
                    Complex64::new(m.re.min(p.re), m.im.min(p.im))
                });
                let max = v.iter().fold(Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY), |m, p| {
                    Complex64::new(m.re.max(p.re), m.im.max(p.im))
                });
                (min, max)
            }
        }
    }

    /// Points along the boundary arc running counterclockwise from `s0` to
    /// `s1`, at spacing at most `step`; corners are included.
    pub fn arc_polyline(&self, s0: f64, s1: f64, step: f64) -> Vec<Complex64> {
        let span = if self.is_bounded() { (s1 - s0).rem_euclid(1.0) } else { s1 - s0 };
        let span = if self.is_bounded() && span == 0.0 { 1.0 } else { span };
        let len = if self.is_bounded() { span * self.perimeter() } else { span.abs() };
        let n = ((len / step).ceil() as usize).max(1);
        let mut params: Vec<f64> = (0..=n).map(|i| s0 + span * i as f64 / n as f64).collect();
        if self.is_bounded() {
            for corner in self.corner_params() {
                let off = (corner - s0).rem_euclid(1.0);
                if off > 0.0 && off < span {
                    params.push(s0 + off);
                }
            }
            params.sort_by(f64::total_cmp);
        }
        params.into_iter().map(|s| self.boundary_point(s)).collect()
    }
}

fn orient(a: Complex64, b: Complex64, p: Complex64) -> f64 {
    ((b - a).conj() * (p - a)).im
}

fn segments_cross(a: Complex64, b: Complex64, p: Complex64, q: Complex64) -> bool {
    let (d1, d2) = (orient(a, b, p), orient(a, b, q));
    let (d3, d4) = (orient(p, q, a), orient(p, q, b));
    d1 * d2 <= 0.0 && d3 * d4 <= 0.0
}
