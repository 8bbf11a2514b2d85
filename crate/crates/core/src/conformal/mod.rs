//! Conformal atlas of the domain catalogue.
//!
//! Every catalogue shape carries a boundary correspondence with the unit
//! circle, expressed on boundary parameters so that only boundary values are
//! ever needed. Cross-ratios, Cardy values and half-plane charts are all
//! computed from disc prevertices.

pub mod elliptic;
pub mod mobius;
pub mod quadrature;
pub mod sc;
pub mod shape;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use mobius::{halfplane_to_disc_marked, MobiusMap, Point};
pub use shape::Shape;

use crate::error::{Error, Result};
use sc::{PolygonMap, RectMap, TriangleMap};

#[derive(Debug, Clone)]
enum Atlas {
    Disc,
    HalfPlane,
    HalfDisc { center: Complex64, radius: f64 },
    Rect(RectMap),
    Triangle(TriangleMap),
    Polygon(PolygonMap),
}

fn cayley_projective(n: f64, m: f64) -> Complex64 {
    let num = Complex64::new(n, -m);
    num / num.conj()
}

impl Atlas {
    fn new(shape: &Shape) -> Result<Self> {
        Ok(match shape {
            Shape::Disc { .. } => Atlas::Disc,
            Shape::HalfPlane => Atlas::HalfPlane,
            Shape::HalfDisc { center, radius } => {
                Atlas::HalfDisc { center: Complex64::new(center[0], center[1]), radius: *radius }
            }
            Shape::Rect { origin, width, height } => {
                Atlas::Rect(RectMap::new(Complex64::new(origin[0], origin[1]), *width, *height)?)
            }
            Shape::EquilateralTriangle { .. } => {
                let v = shape.vertices();
                Atlas::Triangle(TriangleMap::new([v[0], v[1], v[2]]))
            }
            Shape::Polygon { .. } => Atlas::Polygon(PolygonMap::new(shape.vertices())?),
        })
    }

    fn to_disc(&self, shape: &Shape, s: f64) -> Complex64 {
        match self {
            Atlas::Disc => Complex64::from_polar(1.0, 2.0 * PI * s),
            Atlas::HalfPlane => cayley_projective(s, 1.0),
            Atlas::HalfDisc { center, radius } => {
                let z = (shape.boundary_point(s) - center) / radius;
                let one = Complex64::new(1.0, 0.0);
                let (a, b) = ((one + z).powi(2), (one - z).powi(2));
                let (n, m) = if a.norm() >= b.norm() {
                    (a.norm_sqr(), (b * a.conj()).re)
                } else {
                    ((a * b.conj()).re, b.norm_sqr())
                };
                cayley_projective(n, m)
            }
            Atlas::Rect(map) => {
                let (n, m) = map.prevertex(shape.boundary_point(s));
                cayley_projective(n, m)
            }
            Atlas::Triangle(map) => {
                let (n, m) = map.prevertex(shape.boundary_point(s));
                cayley_projective(n, m)
            }
            Atlas::Polygon(map) => map.prevertex(shape.boundary_point(s)),
        }
    }

    fn from_disc(&self, shape: &Shape, w: Complex64) -> f64 {
        let real = || MobiusMap::cayley().real_preimage(w);
        match self {
            Atlas::Disc => (w.arg() / (2.0 * PI)).rem_euclid(1.0),
            Atlas::HalfPlane => {
                let (n, m) = real();
                if m == 0.0 {
                    f64::INFINITY
                } else {
                    n / m
                }
            }
            Atlas::HalfDisc { center, radius } => {
                let (n, m) = real();
                let z = if m == 0.0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    let y = n / m;
                    let s = if y >= 0.0 {
                        Complex64::new(y.sqrt(), 0.0)
                    } else {
                        Complex64::new(0.0, (-y).sqrt())
                    };
                    (s - 1.0) / (s + 1.0)
                };
                shape.boundary_param(center + z * radius)
            }
            Atlas::Rect(map) => {
                let (n, m) = real();
                shape.boundary_param(map.image(n, m))
            }
            Atlas::Triangle(map) => {
                let (n, m) = real();
                shape.boundary_param(map.image(n, m))
            }
            Atlas::Polygon(map) => shape.boundary_param(map.image(w)),
        }
    }
}

/// A catalogue domain with 2–4 boundary marks in counterclockwise order.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "MarkedDomainSpec", into = "MarkedDomainSpec")]
pub struct MarkedDomain {
    shape: Shape,
    marks: Vec<f64>,
    atlas: Atlas,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarkedDomainSpec {
    pub shape: Shape,
    pub marks: Vec<f64>,
}

impl TryFrom<MarkedDomainSpec> for MarkedDomain {
    type Error = Error;
    fn try_from(spec: MarkedDomainSpec) -> Result<Self> {
        MarkedDomain::new(spec.shape, spec.marks)
    }
}

impl From<MarkedDomain> for MarkedDomainSpec {
    fn from(md: MarkedDomain) -> Self {
        MarkedDomainSpec { shape: md.shape, marks: md.marks }
    }
}

impl MarkedDomain {
    /// Marks are boundary parameters (see [`Shape`]).
    pub fn new(shape: Shape, marks: Vec<f64>) -> Result<Self> {
        shape.validate()?;
        if !(2..=4).contains(&marks.len()) {
            return Err(Error::InvalidMarks(format!("expected 2 to 4 marks, got {}", marks.len())));
        }
        if marks.iter().any(|m| !m.is_finite()) {
            return Err(Error::InvalidMarks("marks must be finite".into()));
        }
        let atlas = Atlas::new(&shape)?;
        // cyclic order is checked on the circle: the gaps must wind exactly once
        let angles: Vec<f64> = marks
            .iter()
            .map(|&s| {
                if shape.is_bounded() {
                    s.rem_euclid(1.0)
                } else {
                    (atlas.to_disc(&shape, s).arg() / (2.0 * PI)).rem_euclid(1.0)
                }
            })
            .collect();
        let n = angles.len();
        let gaps: Vec<f64> = (0..n).map(|i| (angles[(i + 1) % n] - angles[i]).rem_euclid(1.0)).collect();
        if gaps.iter().any(|&g| g < 1e-12) || (gaps.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidMarks("marks must be distinct and counterclockwise".into()));
        }
        Ok(Self { shape, marks, atlas })
    }

    /// Marks at the four corners of a rectangle, starting from the top-left
    /// corner, so that arc 1→2 is the left side and arc 3→4 the right side.
    pub fn rectangle(width: f64, height: f64) -> Result<Self> {
        let shape = Shape::Rect { origin: [0.0, 0.0], width, height };
        let c = shape.corner_params();
        MarkedDomain::new(shape, vec![c[3], c[0], c[1], c[2]])
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn marks(&self) -> &[f64] {
        &self.marks
    }

    pub fn with_marks(&self, marks: Vec<f64>) -> Result<Self> {
        MarkedDomain::new(self.shape.clone(), marks)
    }

    pub fn mark_point(&self, i: usize) -> Complex64 {
        self.shape.boundary_point(self.marks[i])
    }

    /// Unit-circle prevertex of boundary parameter `s`.
    pub fn disc_prevertex(&self, s: f64) -> Complex64 {
        self.atlas.to_disc(&self.shape, s)
    }

    /// Boundary parameter whose prevertex is the unit-circle point `w`.
    pub fn param_from_disc(&self, w: Complex64) -> f64 {
        self.atlas.from_disc(&self.shape, w)
    }

    pub fn mark_prevertices(&self) -> Vec<Complex64> {
        self.marks.iter().map(|&s| self.disc_prevertex(s)).collect()
    }

    /// Half-plane chart sending mark `ia` to 0 and mark `ib` to ∞.
    pub fn halfplane_chart(&self, ia: usize, ib: usize) -> Result<HalfPlaneChart> {
        let w = self.mark_prevertices();
        Ok(HalfPlaneChart { psi: halfplane_to_disc_marked(w[ia], w[ib])? })
    }

    /// Arc-length fraction of `s` along the counterclockwise arc from mark
    /// `i` to mark `j`.
    pub fn arc_fraction(&self, i: usize, j: usize, s: f64) -> f64 {
        let (a, b) = (self.marks[i], self.marks[j]);
        if self.shape.is_bounded() {
            ((s - a).rem_euclid(1.0) / (b - a).rem_euclid(1.0)).clamp(0.0, 1.0)
        } else {
            ((s - a) / (b - a)).clamp(0.0, 1.0)
        }
    }

    /// Boundary parameter at arc-length fraction `f` from mark `i` to `j`.
    pub fn arc_param(&self, i: usize, j: usize, f: f64) -> f64 {
        let (a, b) = (self.marks[i], self.marks[j]);
        if self.shape.is_bounded() {
            (a + f * (b - a).rem_euclid(1.0)).rem_euclid(1.0)
        } else {
            a + f * (b - a)
        }
    }
}

/// Möbius chart from the upper half-plane onto the disc, used to move
/// between boundary parameters of a marked domain and real points.
#[derive(Debug, Clone, Copy)]
pub struct HalfPlaneChart {
    pub psi: MobiusMap,
}

impl HalfPlaneChart {
    /// Real point (possibly ∞, as `[n : 0]`) for the disc point `w`.
    pub fn real_of_disc(&self, w: Complex64) -> (f64, f64) {
        self.psi.real_preimage(w)
    }

    pub fn disc_of_real(&self, x: f64) -> Complex64 {
        self.psi.apply(Complex64::new(x, 0.0))
    }
}

/// Cross-ratio `η = (w₁−w₂)(w₃−w₄) / ((w₁−w₃)(w₂−w₄))` of four points.
pub fn cross_ratio(w: &[Complex64]) -> f64 {
    ((w[0] - w[1]) * (w[2] - w[3]) / ((w[0] - w[2]) * (w[1] - w[3]))).re
}

/// Cross-ratio of the disc prevertices of a four-mark domain.
pub fn quad_cross_ratio(md: &MarkedDomain) -> Result<f64> {
    if md.marks.len() != 4 {
        return Err(Error::InvalidMarks("cross-ratio needs four marks".into()));
    }
    Ok(cross_ratio(&md.mark_prevertices()).clamp(0.0, 1.0))
}

/// Image of the semicircle `{|z| = ε} ∩ H` under a map of the half-plane.
#[derive(Debug, Clone, Serialize)]
pub struct SemiBallImage {
    pub eps: f64,
    pub polyline: Vec<Complex64>,
}

pub fn semiball_image<F: Fn(Complex64) -> Complex64>(base: F, eps: f64, tol: f64) -> SemiBallImage {
    let ratio = (tol / eps).min(1.0);
    let n = ((PI / ratio.asin()).ceil() as usize).max(64);
    let polyline = (0..=n)
        .map(|j| {
            let t = PI * (n - j) as f64 / n as f64;
            base(Complex64::from_polar(eps, t))
        })
        .collect();
    SemiBallImage { eps, polyline }
}
