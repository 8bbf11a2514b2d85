use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Axial neighbor offsets, counterclockwise starting from east.
///
/// Hexagons are pointy-top with circumradius equal to the mesh `δ`, so the
/// center of `(q, r)` is `δ·(√3·(q + r/2), 3r/2)` and adjacent centers are
/// `δ·√3` apart.
pub const DIRECTIONS: [(i32, i32); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

/// A site of the triangular lattice, i.e. a hexagon of the dual hexagonal
/// lattice, in axial coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Hex {
    pub q: i32,
    pub r: i32,
}

impl fmt::Debug for Hex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.q, self.r)
    }
}

impl Hex {
    pub const fn new(q: i32, r: i32) -> Self {
        Self { q, r }
    }

    #[inline]
    pub fn neighbor(self, dir: usize) -> Hex {
        let (dq, dr) = DIRECTIONS[dir % 6];
        Hex::new(self.q + dq, self.r + dr)
    }

    pub fn neighbors(self) -> [Hex; 6] {
        std::array::from_fn(|i| self.neighbor(i))
    }

    /// Index `i` with `self.neighbor(i) == other`, if the two are adjacent.
    #[inline]
    pub fn direction_to(self, other: Hex) -> Option<usize> {
        let d = (other.q - self.q, other.r - self.r);
        DIRECTIONS.iter().position(|&x| x == d)
    }

    pub fn is_adjacent(self, other: Hex) -> bool {
        self.direction_to(other).is_some()
    }

    pub fn center(self, mesh: f64) -> Complex64 {
        Complex64::new(
            mesh * SQRT3 * (self.q as f64 + 0.5 * self.r as f64),
            mesh * 1.5 * self.r as f64,
        )
    }

    /// The hexagon containing the point `z`.
    pub fn containing(z: Complex64, mesh: f64) -> Hex {
        let rf = z.im / (1.5 * mesh);
        let qf = z.re / (SQRT3 * mesh) - 0.5 * rf;
        // cube rounding
        let (x, zc) = (qf, rf);
        let y = -x - zc;
        let (mut rx, ry, mut rz) = (x.round(), y.round(), zc.round());
        let (dx, dy, dz) = ((rx - x).abs(), (ry - y).abs(), (rz - zc).abs());
        if dx > dy && dx > dz {
            rx = -ry - rz;
        } else if dy <= dz {
            rz = -rx - ry;
        }
        Hex::new(rx as i32, rz as i32)
    }
}

/// A vertex of the hexagonal lattice, keyed by the coordinate sum of its
/// three hexagons. The sum is `3h + (-1, 2)` for the top vertex of `h` and
/// `3h + (1, -2)` for its bottom vertex, so the key is unique.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub sq: i32,
    pub sr: i32,
}

impl Vertex {
    /// The vertex shared by three mutually adjacent hexagons.
    pub fn of(a: Hex, b: Hex, c: Hex) -> Vertex {
        debug_assert!(a.is_adjacent(b) && b.is_adjacent(c) && a.is_adjacent(c));
        Vertex { sq: a.q + b.q + c.q, sr: a.r + b.r + c.r }
    }

    pub fn is_top(self) -> bool {
        self.sr.rem_euclid(3) == 2
    }

    /// The three hexagons meeting at this vertex.
    pub fn hexes(self) -> [Hex; 3] {
        if self.is_top() {
            let h = Hex::new((self.sq + 1).div_euclid(3), (self.sr - 2).div_euclid(3));
            [h, h.neighbor(1), h.neighbor(2)]
        } else {
            let h = Hex::new((self.sq - 1).div_euclid(3), (self.sr + 2).div_euclid(3));
            [h, h.neighbor(4), h.neighbor(5)]
        }
    }

    /// The three edges leaving this vertex.
    pub fn out_edges(self) -> [Edge; 3] {
        let [a, b, c] = self.hexes();
        [(a, b), (b, c), (c, a)].map(|(x, y)| {
            let e = Edge::new(x, y);
            if e.tail() == self {
                e
            } else {
                e.reversed()
            }
        })
    }

    pub fn position(self, mesh: f64) -> Complex64 {
        Complex64::new(
            mesh * SQRT3 * (self.sq as f64 + 0.5 * self.sr as f64) / 3.0,
            mesh * 1.5 * self.sr as f64 / 3.0,
        )
    }
}

/// A directed edge of the hexagonal lattice, stored as the ordered pair of
/// hexagons on its left and right with respect to the direction of travel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub left: Hex,
    pub right: Hex,
}

impl Edge {
    pub fn new(left: Hex, right: Hex) -> Self {
        debug_assert!(left.is_adjacent(right), "{left:?} and {right:?} are not adjacent");
        Self { left, right }
    }

    #[inline]
    fn dir(self) -> usize {
        self.left.direction_to(self.right).expect("edge hexes are adjacent")
    }

    /// The hexagon at the head vertex that does not border this edge.
    #[inline]
    pub fn ahead(self) -> Hex {
        self.left.neighbor(self.dir() + 1)
    }

    /// The hexagon at the tail vertex that does not border this edge.
    #[inline]
    pub fn behind(self) -> Hex {
        self.left.neighbor(self.dir() + 5)
    }

    pub fn head(self) -> Vertex {
        Vertex::of(self.left, self.right, self.ahead())
    }

    pub fn tail(self) -> Vertex {
        Vertex::of(self.left, self.right, self.behind())
    }

    pub fn reversed(self) -> Edge {
        Edge { left: self.right, right: self.left }
    }

    /// Continuation turning left at the head vertex (ahead hexagon on the right).
    #[inline]
    pub fn turn_left(self) -> Edge {
        Edge { left: self.left, right: self.ahead() }
    }

    /// Continuation turning right at the head vertex (ahead hexagon on the left).
    #[inline]
    pub fn turn_right(self) -> Edge {
        Edge { left: self.ahead(), right: self.right }
    }

    /// Orientation-free key.
    pub fn undirected(self) -> (Hex, Hex) {
        if self.left <= self.right {
            (self.left, self.right)
        } else {
            (self.right, self.left)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn out_edges_leave_the_vertex() {
        for v in [Vertex::of(Hex::new(0, 0), Hex::new(1, 0), Hex::new(0, 1)), Vertex { sq: 1, sr: -2 }] {
            let heads: Vec<Vertex> = v.out_edges().iter().map(|e| e.head()).collect();
            for e in v.out_edges() {
                assert_eq!(e.tail(), v);
                assert!(((e.head().position(1.0) - v.position(1.0)).norm() - 1.0).abs() < 1e-12);
            }
            assert!(heads[0] != heads[1] && heads[1] != heads[2]);
        }
    }

    #[test]
    fn adjacent_centers_are_sqrt3_mesh_apart() {
        let mesh = 0.37;
        let h = Hex::new(3, -2);
        for n in h.neighbors() {
            assert!(((n.center(mesh) - h.center(mesh)).norm() - mesh * SQRT3).abs() < 1e-12);
        }
        // second-shell hexagons are never adjacent
        let far = Hex::new(5, -2);
        assert!((far.center(mesh) - h.center(mesh)).norm() > 1.9 * mesh * SQRT3);
        assert!(!h.is_adjacent(far));
    }

    #[test]
    fn vertex_roundtrip_and_position() {
        let mesh = 1.0;
        for q in -4..4 {
            for r in -4..4 {
                let h = Hex::new(q, r);
                for i in 0..6 {
                    let e = Edge::new(h, h.neighbor(i));
                    for v in [e.head(), e.tail()] {
                        let mut hs = v.hexes();
                        hs.sort();
                        let mut expect = [e.left, e.right, if v == e.head() { e.ahead() } else { e.behind() }];
                        expect.sort();
                        assert_eq!(hs, expect);
                        // a vertex is at distance δ from each of its three centers
                        for x in hs {
                            assert!(((v.position(mesh) - x.center(mesh)).norm() - mesh).abs() < 1e-12);
                        }
                    }
                    assert!(((e.head().position(mesh) - e.tail().position(mesh)).norm() - mesh).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn heading_keeps_left_hex_on_the_left() {
        let h = Hex::new(0, 0);
        for i in 0..6 {
            let e = Edge::new(h, h.neighbor(i));
            let d = e.head().position(1.0) - e.tail().position(1.0);
            let to_left = h.center(1.0) - e.tail().position(1.0);
            // cross product of travel direction with vector to left center is positive
            assert!(d.re * to_left.im - d.im * to_left.re > 0.0);
        }
    }

    #[test]
    fn containing_inverts_center() {
        for q in -6..6 {
            for r in -6..6 {
                let h = Hex::new(q, r);
                let c = h.center(0.25);
                assert_eq!(Hex::containing(c, 0.25), h);
                assert_eq!(Hex::containing(c + Complex64::new(0.05, -0.07), 0.25), h);
            }
        }
    }
}
