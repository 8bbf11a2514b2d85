//! The percolation exploration process.
//!
//! The path runs on hexagonal-lattice edges from an e-vertex `a` to an
//! e-vertex `b`, keeping blue hexagons (and the right external boundary) on
//! its right and yellow hexagons (and the left external boundary) on its
//! left. Interior colors are queried only when the path first meets them.

mod arms;
mod fill;

pub use arms::{annulus_arm_count, ArmCount, ArmGeometry};
pub use fill::{fill, Component, ComponentType, Filling, FillingExport};

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Edge, Hex, LatticeDomain, Vertex};
use crate::rng::site_is_blue;

/// Site colors: `true` is blue.
pub trait Coloring {
    fn is_blue(&mut self, h: Hex) -> bool;
}

/// Colors drawn from the counter-based hash of `(seed, site)`.
#[derive(Debug, Clone, Copy)]
pub struct SeededColoring {
    pub seed: u64,
}

impl Coloring for SeededColoring {
    fn is_blue(&mut self, h: Hex) -> bool {
        site_is_blue(self.seed, h)
    }
}

/// An explicit complete assignment.
#[derive(Debug, Clone, Default)]
pub struct FixedColoring {
    pub colors: HashMap<Hex, bool>,
}

impl FixedColoring {
    pub fn uniform(d: &LatticeDomain, blue: bool) -> Self {
        Self { colors: d.sites().iter().map(|&h| (h, blue)).collect() }
    }

    /// The `k`-th of the `2^n` colorings, bit `i` coloring site `i`.
    pub fn from_bits(d: &LatticeDomain, bits: u64) -> Self {
        Self { colors: d.sites().iter().enumerate().map(|(i, &h)| (h, bits >> i & 1 == 1)).collect() }
    }

    pub fn get(&self, h: Hex) -> Option<bool> {
        self.colors.get(&h).copied()
    }
}

impl Coloring for FixedColoring {
    fn is_blue(&mut self, h: Hex) -> bool {
        self.colors[&h]
    }
}

impl<F: FnMut(Hex) -> bool> Coloring for F {
    fn is_blue(&mut self, h: Hex) -> bool {
        self(h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EndState {
    ReachedTarget { vertex: Vertex },
    ReachedArc { vertex: Vertex, position: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplorationPath {
    /// The first edge separates the two external boundary hexagons at `a`.
    pub edges: Vec<Edge>,
    /// Interior sites in the order they were met, with their colors.
    pub explored: Vec<(Hex, bool)>,
    pub start: Vertex,
    pub end: EndState,
    pub seed: Option<u64>,
}

impl ExplorationPath {
    pub fn tip(&self) -> Vertex {
        self.edges.last().expect("paths are nonempty").head()
    }

    pub fn blue(&self) -> impl Iterator<Item = Hex> + '_ {
        self.explored.iter().filter(|e| e.1).map(|e| e.0)
    }

    pub fn yellow(&self) -> impl Iterator<Item = Hex> + '_ {
        self.explored.iter().filter(|e| !e.1).map(|e| e.0)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// Position of a hit along a target arc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcHit {
    pub vertex: Vertex,
    /// Index of the vertex along the arc, `0..=edges`.
    pub index: usize,
    /// Arc-length fraction `index / edges`.
    pub fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Interior,
    Right,
    Left,
}

/// Precomputed boundary data for exploring `d` from `a` to `b`.
#[derive(Debug, Clone)]
pub struct Explorer<'d> {
    d: &'d LatticeDomain,
    a: Vertex,
    b: Vertex,
    side: HashMap<Hex, Side>,
    start: Edge,
}

impl<'d> Explorer<'d> {
    pub fn new(d: &'d LatticeDomain, a: Vertex, b: Vertex) -> Result<Self> {
        let arcs = d.split_boundary(a, b)?;
        let mut side: HashMap<Hex, Side> = HashMap::new();
        for &h in &arcs.right {
            side.insert(h, Side::Right);
        }
        for &h in &arcs.left {
            side.insert(h, Side::Left);
        }
        let into = arcs.left_edges.last().expect("arcs are nonempty");
        let out = arcs.right_edges.first().expect("arcs are nonempty");
        let start = Edge::new(into.right, out.right);
        debug_assert_eq!(start.head(), a);
        debug_assert_eq!(start.ahead(), into.left);
        Ok(Self { d, a, b, side, start })
    }

    pub fn domain(&self) -> &LatticeDomain {
        self.d
    }

    fn side(&self, h: Hex) -> Option<Side> {
        if self.d.contains(h) {
            Some(Side::Interior)
        } else {
            self.side.get(&h).copied()
        }
    }

    /// Runs the walk until `stop` accepts a head vertex or `b` is reached.
    fn walk<C: Coloring, S: FnMut(Vertex) -> Option<EndState>>(
        &self,
        colors: &mut C,
        mut stop: S,
    ) -> Result<ExplorationPath> {
        let budget = 10 * self.d.len() + 10;
        let mut edges = vec![self.start];
        let mut explored = Vec::new();
        let mut e = self.start;
        loop {
            let v = e.head();
            if let Some(end) = stop(v) {
                return Ok(ExplorationPath { edges, explored, start: self.a, end, seed: None });
            }
            if v == self.b {
                let end = EndState::ReachedTarget { vertex: v };
                return Ok(ExplorationPath { edges, explored, start: self.a, end, seed: None });
            }
            let ahead = e.ahead();
            let blue = match self.side(ahead) {
                Some(Side::Interior) => {
                    let c = colors.is_blue(ahead);
                    explored.push((ahead, c));
                    c
                }
                Some(Side::Right) => true,
                Some(Side::Left) => false,
                None => return Err(Error::InvalidInput(format!("walk left the domain at {ahead:?}"))),
            };
            e = if blue { e.turn_left() } else { e.turn_right() };
            edges.push(e);
            if edges.len() > budget {
                return Err(Error::StepBudgetExceeded(budget));
            }
        }
    }

    pub fn explore<C: Coloring>(&self, colors: &mut C) -> Result<ExplorationPath> {
        self.walk(colors, |_| None)
    }

    /// Explores until the path first touches a vertex of `target`, a
    /// counterclockwise run of boundary edges.
    pub fn explore_until_arc<C: Coloring>(
        &self,
        colors: &mut C,
        target: &TargetArc,
    ) -> Result<(ExplorationPath, ArcHit)> {
        let mut hit = None;
        let path = self.walk(colors, |v| {
            let &index = target.index.get(&v)?;
            let h = ArcHit { vertex: v, index, fraction: index as f64 / target.edges.len() as f64 };
            hit = Some(h);
            Some(EndState::ReachedArc { vertex: v, position: h.fraction })
        })?;
        match hit {
            Some(h) => Ok((path, h)),
            None => Err(Error::TargetUnreachable),
        }
    }
}

/// A counterclockwise run of boundary edges with its vertex positions.
#[derive(Debug, Clone)]
pub struct TargetArc {
    pub edges: Vec<Edge>,
    index: HashMap<Vertex, usize>,
}

impl TargetArc {
    pub fn new(edges: Vec<Edge>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::InvalidInput("target arc is empty".into()));
        }
        let mut index = HashMap::new();
        index.insert(edges[0].tail(), 0);
        for (i, e) in edges.iter().enumerate() {
            // a vertex shared by two arc edges keeps the earlier position
            index.entry(e.head()).or_insert(i + 1);
        }
        Ok(Self { edges, index })
    }

    /// The boundary arc running counterclockwise between two vertices.
    pub fn between(d: &LatticeDomain, from: Vertex, to: Vertex) -> Result<Self> {
        Self::new(d.edge_arc(from, to)?)
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.index.contains_key(&v)
    }
}

pub fn explore<C: Coloring>(d: &LatticeDomain, a: Vertex, b: Vertex, colors: &mut C) -> Result<ExplorationPath> {
    Explorer::new(d, a, b)?.explore(colors)
}

pub fn explore_until_arc<C: Coloring>(
    d: &LatticeDomain,
    a: Vertex,
    b: Vertex,
    colors: &mut C,
    target: &TargetArc,
) -> Result<(ExplorationPath, ArcHit)> {
    if target.contains(a) {
        return Err(Error::InvalidInput("target arc contains the start vertex".into()));
    }
    Explorer::new(d, a, b)?.explore_until_arc(colors, target)
}

/// The interface separating the blue cluster of the right external boundary
/// from the yellow cluster of the left one, found from the clusters alone.
pub fn static_interface(d: &LatticeDomain, a: Vertex, b: Vertex, colors: &FixedColoring) -> Result<ExplorationPath> {
    for &h in d.sites() {
        if colors.get(h).is_none() {
            return Err(Error::IncompleteColoring(h));
        }
    }
    let arcs = d.split_boundary(a, b)?;
    let right: HashSet<Hex> = arcs.right.iter().copied().collect();
    let left: HashSet<Hex> = arcs.left.iter().copied().collect();
    let cluster = |seeds: &HashSet<Hex>, want: bool| -> HashSet<Hex> {
        let mut out: HashSet<Hex> = HashSet::new();
        let mut stack: Vec<Hex> = Vec::new();
        for s in seeds {
            for n in s.neighbors() {
                if d.contains(n) && colors.get(n) == Some(want) && out.insert(n) {
                    stack.push(n);
                }
            }
        }
        while let Some(h) = stack.pop() {
            for n in h.neighbors() {
                if d.contains(n) && colors.get(n) == Some(want) && out.insert(n) {
                    stack.push(n);
                }
            }
        }
        out
    };
    let blue = cluster(&right, true);
    let yellow = cluster(&left, false);
    let is_r = |h: &Hex| blue.contains(h) || right.contains(h);
    let is_l = |h: &Hex| yellow.contains(h) || left.contains(h);

    // every separating edge with an interior side, keyed by its tail
    let mut by_tail: HashMap<Vertex, Vec<Edge>> = HashMap::new();
    for &h in yellow.iter().chain(left.iter()) {
        for n in h.neighbors() {
            if is_r(&n) && (d.contains(h) || d.contains(n)) {
                let e = Edge::new(h, n);
                by_tail.entry(e.tail()).or_default().push(e);
            }
        }
    }
    let into = arcs.left_edges.last().unwrap();
    let out = arcs.right_edges.first().unwrap();
    let start = Edge::new(into.right, out.right);
    let mut edges = vec![start];
    let mut v = start.head();
    while v != b {
        let next = match by_tail.get(&v).map(Vec::as_slice) {
            Some([e]) => *e,
            _ => return Err(Error::InvalidInput(format!("interface does not continue uniquely at {v:?}"))),
        };
        edges.push(next);
        v = next.head();
        if edges.len() > 10 * d.len() + 10 {
            return Err(Error::StepBudgetExceeded(10 * d.len() + 10));
        }
    }
    let mut seen = HashSet::new();
    let mut explored = Vec::new();
    for e in &edges[1..] {
        for h in [e.left, e.right] {
            if d.contains(h) && seen.insert(h) {
                debug_assert!(is_l(&e.left));
                explored.push((h, colors.get(h).unwrap()));
            }
        }
    }
    Ok(ExplorationPath { edges, explored, start: a, end: EndState::ReachedTarget { vertex: b }, seed: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: i32) -> LatticeDomain {
        LatticeDomain::from_sites((0..n).map(|q| Hex::new(q, 0)), 1.0).unwrap()
    }

    fn check_invariants(d: &LatticeDomain, p: &ExplorationPath, colors: &FixedColoring, arcs_r: &HashSet<Hex>, arcs_l: &HashSet<Hex>) {
        let mut seen = HashSet::new();
        for w in p.edges.windows(2) {
            assert_eq!(w[0].head(), w[1].tail());
        }
        for e in &p.edges {
            assert!(seen.insert(*e), "edge repeated");
            let right_ok = if d.contains(e.right) { colors.get(e.right) == Some(true) } else { arcs_r.contains(&e.right) };
            let left_ok = if d.contains(e.left) { colors.get(e.left) == Some(false) } else { arcs_l.contains(&e.left) };
            assert!(right_ok && left_ok);
        }
    }

    /// Every complete coloring of every connected Jordan set in a small
    /// window, for every pair of e-vertices.
    fn small_domains() -> Vec<LatticeDomain> {
        let mut out = vec![line(3), line(5)];
        let c = Hex::new(0, 0);
        out.push(LatticeDomain::from_sites(std::iter::once(c).chain(c.neighbors()), 1.0).unwrap());
        out.push(LatticeDomain::from_sites([Hex::new(0, 0), Hex::new(1, 0), Hex::new(0, 1)], 1.0).unwrap());
        out.push(LatticeDomain::rhombus(3, 1.0).unwrap());
        let twelve = (0..3).flat_map(|r| (0..4).map(move |q| Hex::new(q, r)));
        out.push(LatticeDomain::from_sites(twelve, 1.0).unwrap());
        out
    }

    #[test]
    fn dynamic_matches_static_exhaustively() {
        for d in small_domains() {
            let ev = d.e_vertices().to_vec();
            let pairs: Vec<(Vertex, Vertex)> = vec![(ev[0], ev[ev.len() / 2]), (ev[1], ev[ev.len() - 1])];
            for (a, b) in pairs {
                let arcs = d.split_boundary(a, b).unwrap();
                let r: HashSet<Hex> = arcs.right.iter().copied().collect();
                let l: HashSet<Hex> = arcs.left.iter().copied().collect();
                for bits in 0..(1u64 << d.len()) {
                    let colors = FixedColoring::from_bits(&d, bits);
                    let dyn_path = explore(&d, a, b, &mut colors.clone()).unwrap();
                    let st = static_interface(&d, a, b, &colors).unwrap();
                    assert_eq!(dyn_path.edges, st.edges);
                    let x: HashSet<_> = dyn_path.explored.iter().collect();
                    let y: HashSet<_> = st.explored.iter().collect();
                    assert_eq!(x, y);
                    check_invariants(&d, &dyn_path, &colors, &r, &l);
                }
            }
        }
    }

    #[test]
    fn all_blue_hugs_left_boundary() {
        let d = line(5);
        let ev = d.e_vertices().to_vec();
        let (a, b) = (ev[0], ev[ev.len() / 2]);
        let arcs = d.split_boundary(a, b).unwrap();
        let p = static_interface(&d, a, b, &FixedColoring::uniform(&d, true)).unwrap();
        // every interior edge of the walk runs along the left arc
        let left: HashSet<Edge> = arcs.left_edges.iter().map(|e| e.reversed()).collect();
        for e in &p.edges[1..] {
            assert!(left.contains(e), "{e:?}");
        }
        let py = static_interface(&d, a, b, &FixedColoring::uniform(&d, false)).unwrap();
        let right: HashSet<Edge> = arcs.right_edges.iter().copied().collect();
        for e in &py.edges[1..] {
            assert!(right.contains(e), "{e:?}");
        }
        assert_eq!(p.edges.len(), arcs.left_edges.len() + 1);
        assert_eq!(py.edges.len(), arcs.right_edges.len() + 1);
    }

    #[test]
    fn color_swap_reverses_the_interface() {
        let d = LatticeDomain::rhombus(4, 1.0).unwrap();
        let ev = d.e_vertices().to_vec();
        let (a, b) = (ev[2], ev[9]);
        for seed in 0..50u64 {
            let colors = FixedColoring::from_bits(&d, crate::rng::mix64(seed));
            let swapped = FixedColoring { colors: colors.colors.iter().map(|(&h, &c)| (h, !c)).collect() };
            let p = explore(&d, a, b, &mut colors.clone()).unwrap();
            let q = explore(&d, b, a, &mut swapped.clone()).unwrap();
            let inner_p: Vec<Edge> = p.edges[1..].to_vec();
            let mut inner_q: Vec<Edge> = q.edges[1..].iter().map(|e| e.reversed()).collect();
            inner_q.reverse();
            // the swapped path runs from b to a; its interior edges reverse those of p
            assert_eq!(inner_p, inner_q);
        }
    }

    #[test]
    fn incomplete_coloring_is_reported() {
        let d = line(3);
        let ev = d.e_vertices().to_vec();
        let mut c = FixedColoring::uniform(&d, true);
        c.colors.remove(&Hex::new(1, 0));
        assert!(matches!(static_interface(&d, ev[0], ev[3], &c), Err(Error::IncompleteColoring(_))));
    }

    #[test]
    fn arc_stop_is_a_prefix() {
        let d = LatticeDomain::rhombus(6, 1.0).unwrap();
        let m = d.marks().to_vec();
        let target = TargetArc::between(&d, m[2], m[3]).unwrap();
        for seed in 0..20 {
            let mut col = SeededColoring { seed };
            let full = explore(&d, m[0], m[3], &mut col).unwrap();
            let (part, hit) = explore_until_arc(&d, m[0], m[3], &mut col, &target).unwrap();
            assert_eq!(full.edges[..part.edges.len()], part.edges[..]);
            assert!(target.contains(hit.vertex));
            assert!((0.0..=1.0).contains(&hit.fraction));
        }
        // a target around b alone is the full exploration
        let b = m[3];
        let slot = d.e_vertex_slot(b).unwrap();
        let around = TargetArc::new(vec![d.loop_edges()[slot]]).unwrap();
        let mut col = SeededColoring { seed: 9 };
        let full = explore(&d, m[0], b, &mut col).unwrap();
        let (part, _) = explore_until_arc(&d, m[0], b, &mut col, &around).unwrap();
        assert!(part.edges.len() <= full.edges.len());
    }

    #[test]
    fn target_next_to_start_stops_immediately() {
        let d = LatticeDomain::rhombus(6, 1.0).unwrap();
        let m = d.marks().to_vec();
        let slot = d.e_vertex_slot(m[1]).unwrap();
        let len = d.loop_edges().len();
        let near = TargetArc::new((2..5).map(|k| d.loop_edges()[(slot + k) % len]).collect()).unwrap();
        let mut col = SeededColoring { seed: 4 };
        let (p, _) = explore_until_arc(&d, m[1], m[3], &mut col, &near).unwrap();
        assert!(p.edges.len() <= 12, "{}", p.edges.len());
    }

    #[test]
    fn exploration_is_reproducible() {
        let d = LatticeDomain::rhombus(20, 1.0).unwrap();
        let m = d.marks().to_vec();
        let p1 = explore(&d, m[0], m[2], &mut SeededColoring { seed: 77 }).unwrap();
        let p2 = explore(&d, m[0], m[2], &mut SeededColoring { seed: 77 }).unwrap();
        assert_eq!(p1, p2);
    }
}
