//! Annulus crossings counted by tracing interface strands.
//!
//! Every interface edge leaving the inner disc is followed outward, keeping
//! its left and right colors on their sides, until the strand either reaches
//! the outer circle (one crossing) or re-enters the inner disc. The count of
//! crossings equals the number of maximal alternating monochromatic arms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::exploration::Coloring;
use crate::lattice::{Edge, Hex, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ArmGeometry {
    /// Full-plane annulus centered at the origin (the center of hex (0, 0)).
    Interior,
    /// Half-annulus in the half-plane of rows `r ≥ 0`, centered on the
    /// boundary line `y = −3δ/4`.
    Boundary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmCount {
    pub arms: usize,
    /// Color on the right of each crossing strand, in discovery order.
    pub pattern: Vec<bool>,
}

/// Counts interface crossings of the annulus `r_in ≤ |z − c| ≤ r_out`, radii
/// in units of the lattice mesh.
pub fn annulus_arm_count<C: Coloring>(colors: &mut C, geometry: ArmGeometry, r_in: f64, r_out: f64) -> ArmCount {
    assert!(r_in > 0.0 && r_in < r_out, "need 0 < r_in < r_out");
    let center = match geometry {
        ArmGeometry::Interior => Complex64::new(0.0, 0.0),
        ArmGeometry::Boundary => Complex64::new(0.0, -0.75),
    };
    let in_domain = |h: Hex| geometry == ArmGeometry::Interior || h.r >= 0;
    let radius = |v: Vertex| (v.position(1.0) - center).norm();

    // vertices of the inner disc
    let span = (r_in / 1.5).ceil() as i32 + 2;
    let mut inner = Vec::new();
    for r in -span..=span {
        for q in -2 * span..=2 * span {
            for v in [Vertex { sq: 3 * q - 1, sr: 3 * r + 2 }, Vertex { sq: 3 * q + 1, sr: 3 * r - 2 }] {
                if radius(v) < r_in {
                    inner.push(v);
                }
            }
        }
    }
    inner.sort();
    inner.dedup();

    let mut arms = 0;
    let mut pattern = Vec::new();
    for v in inner {
        for e in v.out_edges() {
            if radius(e.head()) < r_in || !in_domain(e.left) || !in_domain(e.right) {
                continue;
            }
            let (lc, rc) = (colors.is_blue(e.left), colors.is_blue(e.right));
            if lc == rc {
                continue;
            }
            if trace(colors, e, rc, &in_domain, &radius, r_in, r_out) {
                arms += 1;
                pattern.push(rc);
            }
        }
    }
    ArmCount { arms, pattern }
}

fn trace<C: Coloring>(
    colors: &mut C,
    mut e: Edge,
    right_color: bool,
    in_domain: &impl Fn(Hex) -> bool,
    radius: &impl Fn(Vertex) -> f64,
    r_in: f64,
    r_out: f64,
) -> bool {
    loop {
        let v = e.head();
        let rho = radius(v);
        if rho >= r_out {
            return true;
        }
        if rho < r_in {
            return false;
        }
        let ahead = e.ahead();
        if !in_domain(ahead) {
            return false;
        }
        e = if colors.is_blue(ahead) == right_color { e.turn_left() } else { e.turn_right() };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exploration::SeededColoring;

    #[test]
    fn monochromatic_has_no_arms() {
        let mut blue = |_h: Hex| true;
        assert_eq!(annulus_arm_count(&mut blue, ArmGeometry::Interior, 3.0, 12.0).arms, 0);
        assert_eq!(annulus_arm_count(&mut blue, ArmGeometry::Boundary, 3.0, 12.0).arms, 0);
    }

    #[test]
    fn straight_color_boundary_gives_two_arms() {
        let mut split = |h: Hex| h.center(1.0).re > 0.1;
        let c = annulus_arm_count(&mut split, ArmGeometry::Interior, 3.0, 15.0);
        assert_eq!(c.arms, 2);
        assert_eq!(c.pattern.iter().filter(|&&b| b).count(), 1);
        // a vertical split meets the half-plane boundary: one strand, no three-arm event
        let b = annulus_arm_count(&mut split, ArmGeometry::Boundary, 3.0, 15.0);
        assert_eq!(b.arms, 1);
    }

    #[test]
    fn three_sectors_give_even_counts() {
        let mut sectors = |h: Hex| {
            let z = h.center(1.0);
            let a = z.im.atan2(z.re).rem_euclid(std::f64::consts::TAU);
            ((a / (std::f64::consts::TAU / 6.0)) as i32) % 2 == 0
        };
        assert_eq!(annulus_arm_count(&mut sectors, ArmGeometry::Interior, 3.0, 20.0).arms, 6);
    }

    #[test]
    fn random_counts_are_even_in_the_plane() {
        for seed in 0..200 {
            let c = annulus_arm_count(&mut SeededColoring { seed }, ArmGeometry::Interior, 4.0, 16.0);
            assert_eq!(c.arms % 2, 0);
        }
    }
}
