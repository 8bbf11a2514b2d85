//! δ-approximations of catalogue domains.
//!
//! Rule: hexagons whose centers lie in the open domain, restricted to the
//! largest connected component, holes filled, then exterior hexagons that
//! touch the set from two sides filled in until the external site boundary
//! is a T-loop. Marks snap to the nearest e-vertex.

use std::collections::{HashSet, VecDeque};

use num_complex::Complex64;

use super::{Hex, LatticeDomain};
use crate::conformal::{MarkedDomain, Shape};
use crate::error::{Error, Result};

fn centers_inside(shape: &Shape, mesh: f64) -> Vec<Hex> {
    let (lo, hi) = shape.bbox();
    let rmin = (lo.im / (1.5 * mesh)).floor() as i32 - 1;
    let rmax = (hi.im / (1.5 * mesh)).ceil() as i32 + 1;
    let w = 3f64.sqrt() * mesh;
    let mut out = Vec::new();
    for r in rmin..=rmax {
        let qmin = (lo.re / w - 0.5 * r as f64).floor() as i32 - 1;
        let qmax = (hi.re / w - 0.5 * r as f64).ceil() as i32 + 1;
        for q in qmin..=qmax {
            let h = Hex::new(q, r);
            if shape.contains(h.center(mesh)) {
                out.push(h);
            }
        }
    }
    out
}

fn largest_component(set: &HashSet<Hex>) -> HashSet<Hex> {
    let mut sorted: Vec<Hex> = set.iter().copied().collect();
    sorted.sort_by_key(|h| (h.r, h.q));
    let mut seen: HashSet<Hex> = HashSet::new();
    let mut best: Vec<Hex> = Vec::new();
    for &s in &sorted {
        if seen.contains(&s) {
            continue;
        }
        let mut comp = vec![s];
        seen.insert(s);
        let mut i = 0;
        while i < comp.len() {
            for n in comp[i].neighbors() {
                if set.contains(&n) && seen.insert(n) {
                    comp.push(n);
                }
            }
            i += 1;
        }
        if comp.len() > best.len() {
            best = comp;
        }
    }
    best.into_iter().collect()
}

/// Adds every non-member hexagon not connected to infinity.
fn fill_holes(set: &mut HashSet<Hex>) {
    let (mut qmin, mut qmax, mut rmin, mut rmax) = (i32::MAX, i32::MIN, i32::MAX, i32::MIN);
    for h in set.iter() {
        qmin = qmin.min(h.q);
        qmax = qmax.max(h.q);
        rmin = rmin.min(h.r);
        rmax = rmax.max(h.r);
    }
    let inside_box = |h: Hex| h.q >= qmin - 1 && h.q <= qmax + 1 && h.r >= rmin - 1 && h.r <= rmax + 1;
    let start = Hex::new(qmin - 1, rmin - 1);
    let mut outside: HashSet<Hex> = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(h) = queue.pop_front() {
        for n in h.neighbors() {
            if inside_box(n) && !set.contains(&n) && outside.insert(n) {
                queue.push_back(n);
            }
        }
    }
    for r in rmin..=rmax {
        for q in qmin..=qmax {
            let h = Hex::new(q, r);
            if !outside.contains(&h) {
                set.insert(h);
            }
        }
    }
}

/// Exterior hexagons met by the boundary walk in more than one run.
fn notches(set: &HashSet<Hex>) -> Vec<Hex> {
    let start_site = *set.iter().min_by_key(|h| (h.r, h.q)).unwrap();
    let start = super::Edge::new(start_site, start_site.neighbor(4));
    let mut runs: Vec<Hex> = Vec::new();
    let mut e = start;
    loop {
        if runs.last() != Some(&e.right) {
            runs.push(e.right);
        }
        let ahead = e.ahead();
        e = if set.contains(&ahead) { super::Edge::new(ahead, e.right) } else { super::Edge::new(e.left, ahead) };
        if e == start {
            break;
        }
    }
    if runs.len() > 1 && runs.first() == runs.last() {
        runs.pop();
    }
    let mut seen = HashSet::new();
    let mut out: Vec<Hex> = runs.into_iter().filter(|h| !seen.insert(*h)).collect();
    out.sort_by_key(|h| (h.r, h.q));
    out.dedup();
    out
}

/// Jordan-set approximation of a shape without marks.
pub fn approximate_shape(shape: &Shape, mesh: f64) -> Result<LatticeDomain> {
    shape.validate()?;
    if !shape.is_bounded() {
        return Err(Error::InvalidDomain("cannot approximate an unbounded domain".into()));
    }
    let raw: HashSet<Hex> = centers_inside(shape, mesh).into_iter().collect();
    if raw.is_empty() {
        return Err(Error::MeshTooCoarse("no hexagon center lies in the domain".into()));
    }
    let mut set = largest_component(&raw);
    for _ in 0..10_000 {
        fill_holes(&mut set);
        let extra = notches(&set);
        if extra.is_empty() {
            return LatticeDomain::from_sites(set, mesh)
                .map_err(|e| Error::MeshTooCoarse(format!("approximation is not a Jordan set: {e}")));
        }
        set.extend(extra);
    }
    Err(Error::MeshTooCoarse("notch filling did not terminate".into()))
}

/// δ-approximation of a marked catalogue domain.
pub fn build_delta_approximation(md: &MarkedDomain, mesh: f64) -> Result<LatticeDomain> {
    let points: Vec<Complex64> = (0..md.marks().len()).map(|i| md.mark_point(i)).collect();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if (points[i] - points[j]).norm() < 4.0 * mesh {
                return Err(Error::MeshTooCoarse("marked points closer than 4δ".into()));
            }
        }
    }
    let d = approximate_shape(md.shape(), mesh)?;
    let marks = points.iter().map(|&z| d.nearest_e_vertex(z)).collect();
    d.with_marks(marks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvemetric::{curve_distance, resample};

    #[test]
    fn unit_disc_coarse_is_one_hexagon() {
        let d = approximate_shape(&Shape::unit_disc(), 0.6).unwrap();
        assert_eq!(d.sites(), &[Hex::new(0, 0)]);
    }

    #[test]
    fn unit_square_count_matches_enumeration() {
        // brute force over a generous window of axial coordinates
        let mesh = 0.5;
        let mut n = 0;
        for q in -20..20 {
            for r in -20..20 {
                let c = Hex::new(q, r).center(mesh);
                if c.re > 0.0 && c.re < 1.0 && c.im > 0.0 && c.im < 1.0 {
                    n += 1;
                }
            }
        }
        assert_eq!(n, 1);
        let sq = Shape::Rect { origin: [0.0, 0.0], width: 1.0, height: 1.0 };
        let d = approximate_shape(&sq, mesh).unwrap();
        assert_eq!(d.len(), n);
    }

    #[test]
    fn disc_marks_snap_close() {
        let md = MarkedDomain::new(Shape::unit_disc(), vec![0.75, 0.25]).unwrap();
        let d = build_delta_approximation(&md, 0.05).unwrap();
        let m = d.marks();
        assert!((m[0].position(0.05) + Complex64::i()).norm() <= 0.1);
        assert!((m[1].position(0.05) - Complex64::i()).norm() <= 0.1);
    }

    #[test]
    fn close_marks_are_rejected() {
        let md = MarkedDomain::new(Shape::unit_disc(), vec![0.0, 0.01]).unwrap();
        assert!(matches!(build_delta_approximation(&md, 0.05), Err(Error::MeshTooCoarse(_))));
    }

    #[test]
    fn boundary_arcs_converge() {
        let shapes = vec![
            MarkedDomain::new(Shape::unit_disc(), vec![0.1, 0.45, 0.8]).unwrap(),
            MarkedDomain::new(Shape::unit_half_disc(), vec![0.3, 0.6, 0.95]).unwrap(),
            MarkedDomain::rectangle(2.0, 1.0).unwrap(),
            MarkedDomain::new(Shape::EquilateralTriangle { origin: [0.0, 0.0], side: 1.5 }, vec![0.0, 1.0 / 3.0, 2.0 / 3.0]).unwrap(),
            MarkedDomain::new(Shape::Polygon { vertices: vec![[0.0, 0.0], [2.0, 0.0], [2.5, 1.0], [0.7, 1.6], [-0.4, 0.8]] }, vec![0.05, 0.5]).unwrap(),
        ];
        for md in shapes {
            let mut prev = f64::INFINITY;
            for mesh in [0.08, 0.04, 0.02] {
                let d = build_delta_approximation(&md, mesh).unwrap();
                let n = md.marks().len();
                let mut worst: f64 = 0.0;
                for i in 0..n {
                    let j = (i + 1) % n;
                    let lat = d.arc_polyline(d.marks()[i], d.marks()[j]).unwrap();
                    let cont = md.shape().arc_polyline(md.marks()[i], md.marks()[j], mesh / 4.0);
                    let dist = curve_distance(&resample(&lat, mesh / 4.0), &resample(&cont, mesh / 4.0));
                    worst = worst.max(dist);
                }
                assert!(worst <= 2.0 * mesh, "{}: δ = {mesh}, distance {worst}", md.shape().name());
                assert!(worst < prev, "{}: not decreasing", md.shape().name());
                prev = worst;
            }
        }
    }
}
