use std::collections::{HashMap, HashSet, VecDeque};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Edge, Hex, Vertex};
use crate::error::{Error, Result};

/// A Jordan set of hexagons at mesh `δ`, with its counterclockwise boundary
/// loop, external site boundary, e-vertices and marked e-vertices.
#[derive(Debug, Clone)]
pub struct LatticeDomain {
    mesh: f64,
    sites: Vec<Hex>,
    index: HashMap<Hex, u32>,
    loop_edges: Vec<Edge>,
    s_boundary: Vec<Hex>,
    e_vertices: Vec<Vertex>,
    /// Loop index of the edge ending at each boundary vertex.
    vertex_slot: HashMap<Vertex, usize>,
    marks: Vec<Vertex>,
}

/// The two boundary arcs between e-vertices `x` and `y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryArcs {
    /// Counterclockwise from `x` to `y`.
    pub right: Vec<Hex>,
    /// Counterclockwise from `y` to `x`.
    pub left: Vec<Hex>,
    pub right_edges: Vec<Edge>,
    pub left_edges: Vec<Edge>,
}

/// Exterior hexes of consecutive boundary edges, duplicates merged.
fn merge_exterior(edges: &[Edge], cyclic: bool) -> Vec<Hex> {
    let mut out: Vec<Hex> = Vec::new();
    for e in edges {
        if out.last() != Some(&e.right) {
            out.push(e.right);
        }
    }
    if cyclic && out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

impl LatticeDomain {
    /// Validates `sites` as a Jordan set and builds its boundary structures.
    pub fn from_sites<I: IntoIterator<Item = Hex>>(sites: I, mesh: f64) -> Result<Self> {
        if !(mesh > 0.0 && mesh.is_finite()) {
            return Err(Error::InvalidDomain("mesh must be positive".into()));
        }
        let mut sites: Vec<Hex> = sites.into_iter().collect();
        sites.sort_by_key(|h| (h.r, h.q));
        sites.dedup();
        if sites.is_empty() {
            return Err(Error::InvalidDomain("empty interior".into()));
        }
        let index: HashMap<Hex, u32> = sites.iter().enumerate().map(|(i, &h)| (h, i as u32)).collect();
        let inside = |h: Hex| index.contains_key(&h);

        let mut seen = vec![false; sites.len()];
        let mut queue = VecDeque::from([sites[0]]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(h) = queue.pop_front() {
            for n in h.neighbors() {
                if let Some(&j) = index.get(&n) {
                    if !seen[j as usize] {
                        seen[j as usize] = true;
                        reached += 1;
                        queue.push_back(n);
                    }
                }
            }
        }
        if reached != sites.len() {
            return Err(Error::InvalidDomain("interior is not connected".into()));
        }

        // the lowest row has no interior neighbor below it
        let start = Edge::new(sites[0], sites[0].neighbor(4));
        let mut loop_edges = vec![start];
        let mut e = start;
        loop {
            let ahead = e.ahead();
            e = if inside(ahead) { Edge::new(ahead, e.right) } else { Edge::new(e.left, ahead) };
            if e == start {
                break;
            }
            loop_edges.push(e);
            if loop_edges.len() > 6 * sites.len() + 6 {
                return Err(Error::InvalidDomain("boundary walk did not close".into()));
            }
        }
        let total: usize = sites
            .iter()
            .map(|h| h.neighbors().iter().filter(|n| !inside(**n)).count())
            .sum();
        if total != loop_edges.len() {
            return Err(Error::InvalidDomain("interior is not simply connected".into()));
        }
        let s_boundary = merge_exterior(&loop_edges, true);
        let distinct: HashSet<Hex> = s_boundary.iter().copied().collect();
        if distinct.len() != s_boundary.len() {
            return Err(Error::InvalidDomain("external site boundary is not a T-loop".into()));
        }
        let mut vertex_slot = HashMap::new();
        let mut e_vertices = Vec::new();
        for (i, e) in loop_edges.iter().enumerate() {
            let v = e.head();
            vertex_slot.insert(v, i);
            if !inside(e.ahead()) {
                e_vertices.push(v);
            }
        }
        Ok(Self { mesh, sites, index, loop_edges, s_boundary, e_vertices, vertex_slot, marks: Vec::new() })
    }

    /// Attaches marked e-vertices, which must be distinct and in
    /// counterclockwise order along the boundary.
    pub fn with_marks(mut self, marks: Vec<Vertex>) -> Result<Self> {
        let slots: Vec<usize> = marks
            .iter()
            .map(|v| self.e_vertex_slot(*v))
            .collect::<Result<_>>()?;
        let n = slots.len();
        if n > 1 {
            let len = self.loop_edges.len();
            let winding: usize = (0..n).map(|i| (slots[(i + 1) % n] + len - slots[i]) % len).sum();
            if slots.iter().collect::<HashSet<_>>().len() != n {
                return Err(Error::MeshTooCoarse("two marks share an e-vertex".into()));
            }
            if winding != len {
                return Err(Error::MeshTooCoarse("snapped marks are out of order".into()));
            }
        }
        self.marks = marks;
        Ok(self)
    }

    /// Lattice rhombus `0 ≤ q, r < l` (a Hex board) with marks at its four
    /// corners, starting from the top-left one: arc 1→2 is the `q = 0` side,
    /// arc 2→3 the `r = 0` side, arc 3→4 the `q = l−1` side.
    pub fn rhombus(l: i32, mesh: f64) -> Result<Self> {
        if l < 2 {
            return Err(Error::InvalidDomain("rhombus side must be at least 2".into()));
        }
        let sites = (0..l).flat_map(|r| (0..l).map(move |q| Hex::new(q, r)));
        let h = Hex::new;
        let d = Self::from_sites(sites, mesh)?;
        let marks = vec![
            Vertex::of(h(0, l - 1), h(-1, l - 1), h(-1, l)),
            Vertex::of(h(0, 0), h(-1, 0), h(0, -1)),
            Vertex::of(h(l - 1, 0), h(l - 1, -1), h(l, -1)),
            Vertex::of(h(l - 1, l - 1), h(l, l - 1), h(l - 1, l)),
        ];
        d.with_marks(marks)
    }

    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    /// Interior sites, sorted by row then column.
    pub fn sites(&self) -> &[Hex] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn contains(&self, h: Hex) -> bool {
        self.index.contains_key(&h)
    }

    pub fn site_index(&self, h: Hex) -> Option<usize> {
        self.index.get(&h).map(|&i| i as usize)
    }

    /// Boundary edges in counterclockwise order, interior hex on the left.
    pub fn loop_edges(&self) -> &[Edge] {
        &self.loop_edges
    }

    /// External site boundary as a cyclically ordered T-loop.
    pub fn boundary_loop(&self) -> &[Hex] {
        &self.s_boundary
    }

    pub fn e_vertices(&self) -> &[Vertex] {
        &self.e_vertices
    }

    pub fn marks(&self) -> &[Vertex] {
        &self.marks
    }

    pub fn is_e_vertex(&self, v: Vertex) -> bool {
        self.e_vertex_slot(v).is_ok()
    }

    /// Loop index of the boundary edge ending at e-vertex `v`.
    pub fn e_vertex_slot(&self, v: Vertex) -> Result<usize> {
        match self.vertex_slot.get(&v) {
            Some(&i) if !self.contains(self.loop_edges[i].ahead()) => Ok(i),
            _ => Err(Error::NotEVertex(format!("{v:?}"))),
        }
    }

    /// Loop index of the boundary edge ending at boundary vertex `v`.
    pub fn vertex_slot(&self, v: Vertex) -> Option<usize> {
        self.vertex_slot.get(&v).copied()
    }

    /// Boundary edges running counterclockwise from vertex `x` to vertex `y`.
    pub fn edge_arc(&self, x: Vertex, y: Vertex) -> Result<Vec<Edge>> {
        let (i, j) = match (self.vertex_slot(x), self.vertex_slot(y)) {
            (Some(i), Some(j)) => (i, j),
            _ => return Err(Error::InvalidInput("arc endpoints must be boundary vertices".into())),
        };
        let len = self.loop_edges.len();
        let count = (j + len - i) % len;
        let count = if count == 0 { len } else { count };
        Ok((1..=count).map(|k| self.loop_edges[(i + k) % len]).collect())
    }

    pub fn split_boundary(&self, x: Vertex, y: Vertex) -> Result<BoundaryArcs> {
        if x == y {
            return Err(Error::SameVertex);
        }
        self.e_vertex_slot(x)?;
        self.e_vertex_slot(y)?;
        let right_edges = self.edge_arc(x, y)?;
        let left_edges = self.edge_arc(y, x)?;
        Ok(BoundaryArcs {
            right: merge_exterior(&right_edges, false),
            left: merge_exterior(&left_edges, false),
            right_edges,
            left_edges,
        })
    }

    /// Vertex positions along the counterclockwise arc from `x` to `y`.
    pub fn arc_polyline(&self, x: Vertex, y: Vertex) -> Result<Vec<Complex64>> {
        let edges = self.edge_arc(x, y)?;
        let mut pts = vec![x.position(self.mesh)];
        pts.extend(edges.iter().map(|e| e.head().position(self.mesh)));
        Ok(pts)
    }

    /// Nearest e-vertex to a point.
    pub fn nearest_e_vertex(&self, z: Complex64) -> Vertex {
        *self
            .e_vertices
            .iter()
            .min_by(|a, b| {
                let (da, db) = ((a.position(self.mesh) - z).norm(), (b.position(self.mesh) - z).norm());
                da.total_cmp(&db).then(a.cmp(b))
            })
            .expect("a Jordan set has e-vertices")
    }

    pub fn to_export(&self, seed: Option<u64>) -> DomainExport {
        DomainExport {
            seed,
            mesh: self.mesh,
            sites: self.sites.clone(),
            boundary_loop: self.s_boundary.clone(),
            e_vertices: self.e_vertices.clone(),
            marks: self.marks.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainExport {
    pub seed: Option<u64>,
    pub mesh: f64,
    pub sites: Vec<Hex>,
    pub boundary_loop: Vec<Hex>,
    pub e_vertices: Vec<Vertex>,
    pub marks: Vec<Vertex>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn is_t_loop(hexes: &[Hex]) -> bool {
        let n = hexes.len();
        let distinct: HashSet<_> = hexes.iter().collect();
        distinct.len() == n && (0..n).all(|i| hexes[i].is_adjacent(hexes[(i + 1) % n]))
    }

    fn flower() -> LatticeDomain {
        let c = Hex::new(0, 0);
        LatticeDomain::from_sites(std::iter::once(c).chain(c.neighbors()), 1.0).unwrap()
    }

    #[test]
    fn single_hexagon() {
        let d = LatticeDomain::from_sites([Hex::new(0, 0)], 1.0).unwrap();
        assert_eq!(d.boundary_loop().len(), 6);
        assert_eq!(d.e_vertices().len(), 6);
        assert!(is_t_loop(d.boundary_loop()));
    }

    #[test]
    fn two_hexagons() {
        let d = LatticeDomain::from_sites([Hex::new(0, 0), Hex::new(1, 0)], 1.0).unwrap();
        // brute force: distinct non-interior neighbors
        let mut ext: HashSet<Hex> = HashSet::new();
        for h in d.sites() {
            for n in h.neighbors() {
                if !d.contains(n) {
                    ext.insert(n);
                }
            }
        }
        assert_eq!(ext.len(), 8);
        assert_eq!(d.boundary_loop().len(), 8);
        assert!(is_t_loop(d.boundary_loop()));
        assert_eq!(d.loop_edges().len(), 10);
    }

    #[test]
    fn rejects_holes_notches_and_disconnection() {
        let c = Hex::new(0, 0);
        assert!(LatticeDomain::from_sites(c.neighbors(), 1.0).is_err());
        assert!(LatticeDomain::from_sites([c, Hex::new(2, 0)], 1.0).is_err());
        // two hexes touching a common exterior hex from opposite sides
        let notch = [Hex::new(0, 0), Hex::new(1, 0), Hex::new(2, 0), Hex::new(2, 1), Hex::new(2, 2), Hex::new(1, 2), Hex::new(0, 2)];
        assert!(LatticeDomain::from_sites(notch, 1.0).is_err());
    }

    #[test]
    fn e_vertices_have_one_interior_hex() {
        let d = flower();
        for v in d.e_vertices() {
            assert_eq!(v.hexes().iter().filter(|h| d.contains(**h)).count(), 1);
        }
        // every boundary vertex has either one or two interior hexes
        assert_eq!(d.e_vertices().len(), 12);
        assert_eq!(d.loop_edges().len(), 18);
    }

    #[test]
    fn flower_split_matches_walk() {
        let d = flower();
        let ev = d.e_vertices().to_vec();
        let (x, y) = (ev[0], ev[6]);
        let arcs = d.split_boundary(x, y).unwrap();
        assert_eq!(arcs.right_edges.len() + arcs.left_edges.len(), d.loop_edges().len());
        assert_eq!(arcs.right_edges.first().unwrap().tail(), x);
        assert_eq!(arcs.right_edges.last().unwrap().head(), y);
        // antipodal e-vertices on a symmetric domain
        assert!((arcs.right.len() as i64 - arcs.left.len() as i64).abs() <= 1);
        let mut all: Vec<Hex> = arcs.right.iter().chain(&arcs.left).copied().collect();
        all.sort();
        let mut loop_sorted = d.boundary_loop().to_vec();
        loop_sorted.sort();
        assert_eq!(all, loop_sorted);
        let swapped = d.split_boundary(y, x).unwrap();
        assert_eq!(swapped.right, arcs.left);
        assert_eq!(swapped.left, arcs.right);
        assert!(matches!(d.split_boundary(x, x), Err(Error::SameVertex)));
        // hand walk: 18 edges, 12 e-vertices two per petal, the split halves the loop
        assert_eq!(arcs.right_edges.len(), 9);
    }

    #[test]
    fn rhombus_marks_split_sides() {
        let l = 5;
        let d = LatticeDomain::rhombus(l, 1.0).unwrap();
        let m = d.marks().to_vec();
        let left = d.split_boundary(m[0], m[1]).unwrap().right_edges;
        assert!(left.iter().all(|e| e.left.q == 0));
        let right = d.split_boundary(m[2], m[3]).unwrap().right_edges;
        assert!(right.iter().all(|e| e.left.q == l - 1));
        let bottom = d.split_boundary(m[1], m[2]).unwrap().right_edges;
        assert!(bottom.iter().all(|e| e.left.r == 0));
        let top = d.split_boundary(m[3], m[0]).unwrap().right_edges;
        assert!(top.iter().all(|e| e.left.r == l - 1));
    }

    proptest! {
        #[test]
        fn loop_is_independent_of_input_order(perm in Just(()).prop_perturb(|_, mut rng| {
            let mut v: Vec<Hex> = (0..4).flat_map(|r| (0..5).map(move |q| Hex::new(q, r))).collect();
            for i in (1..v.len()).rev() {
                let j = (rng.next_u32() as usize) % (i + 1);
                v.swap(i, j);
            }
            v
        })) {
            let a = LatticeDomain::from_sites(perm.clone(), 1.0).unwrap();
            let mut sorted = perm.clone();
            sorted.sort();
            let b = LatticeDomain::from_sites(sorted, 1.0).unwrap();
            prop_assert_eq!(a.boundary_loop(), b.boundary_loop());
            prop_assert!(is_t_loop(a.boundary_loop()));
        }

        #[test]
        fn neighbor_relation_is_symmetric(q in -1000i32..1000, r in -1000i32..1000, d in 0usize..6) {
            let h = Hex::new(q, r);
            let n = h.neighbor(d);
            prop_assert!(n.neighbors().contains(&h));
            prop_assert!(((h.center(1.0) - n.center(1.0)).norm() - 3f64.sqrt()).abs() < 1e-9);
        }
    }
}
