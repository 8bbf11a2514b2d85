use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::ExplorationPath;
use crate::error::Result;
use crate::lattice::{Hex, LatticeDomain, Vertex};

/// Residual component types, by which sets their external site boundary
/// meets: yellow explored sites `Γ_Y`, blue explored sites `Γ_B`, and the
/// left (`b → a`) or right (`a → b`) external boundary arcs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComponentType {
    /// Meets `Γ_Y` and the left arc.
    Type1,
    /// Meets `Γ_B` and the right arc.
    Type2,
    /// Bounded by `Γ_Y` only.
    Type3,
    /// Bounded by `Γ_B` only.
    Type4,
    /// Any other combination, e.g. the component still open towards `b`.
    Open,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub sites: Vec<Hex>,
    pub kind: ComponentType,
    pub contains_b: bool,
}

/// Explored sites plus the unexplored sites cut off from `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Filling {
    pub hexes: Vec<Hex>,
    pub tip: Vertex,
    /// Connected components of the unexplored interior.
    pub components: Vec<Component>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FillingExport {
    pub seed: Option<u64>,
    pub hexes: Vec<Hex>,
    pub components: Vec<(Vec<Hex>, ComponentType)>,
}

impl Filling {
    pub fn export(&self, seed: Option<u64>) -> FillingExport {
        FillingExport {
            seed,
            hexes: self.hexes.clone(),
            components: self.components.iter().map(|c| (c.sites.clone(), c.kind)).collect(),
        }
    }
}

pub fn fill(path: &ExplorationPath, d: &LatticeDomain, b: Vertex) -> Result<Filling> {
    let a = path.start;
    let arcs = d.split_boundary(a, b)?;
    let right: HashSet<Hex> = arcs.right.iter().copied().collect();
    let left: HashSet<Hex> = arcs.left.iter().copied().collect();
    let color: HashMap<Hex, bool> = path.explored.iter().copied().collect();
    let open = |h: Hex| d.contains(h) && !color.contains_key(&h);

    let b_site = b.hexes().into_iter().find(|h| d.contains(*h));
    let mut reach: HashSet<Hex> = HashSet::new();
    if let Some(s) = b_site.filter(|s| open(*s)) {
        reach.insert(s);
        let mut queue = VecDeque::from([s]);
        while let Some(h) = queue.pop_front() {
            for n in h.neighbors() {
                if open(n) && reach.insert(n) {
                    queue.push_back(n);
                }
            }
        }
    }

    let mut hexes: Vec<Hex> = d.sites().iter().copied().filter(|h| !reach.contains(h)).collect();
    hexes.sort_by_key(|h| (h.r, h.q));

    let mut seen: HashSet<Hex> = HashSet::new();
    let mut components = Vec::new();
    for &s in d.sites() {
        if !open(s) || seen.contains(&s) {
            continue;
        }
        seen.insert(s);
        let mut sites = vec![s];
        let mut i = 0;
        let (mut ty, mut tb, mut tl, mut tr) = (false, false, false, false);
        while i < sites.len() {
            for n in sites[i].neighbors() {
                if open(n) {
                    if seen.insert(n) {
                        sites.push(n);
                    }
                } else if let Some(&c) = color.get(&n) {
                    if c {
                        tb = true;
                    } else {
                        ty = true;
                    }
                } else if left.contains(&n) {
                    tl = true;
                } else if right.contains(&n) {
                    tr = true;
                }
            }
            i += 1;
        }
        let kind = match (ty, tb, tl, tr) {
            (true, false, true, false) => ComponentType::Type1,
            (false, true, false, true) => ComponentType::Type2,
            (true, false, false, false) => ComponentType::Type3,
            (false, true, false, false) => ComponentType::Type4,
            _ => ComponentType::Open,
        };
        sites.sort_by_key(|h| (h.r, h.q));
        let contains_b = b_site.is_some_and(|x| sites.contains(&x));
        components.push(Component { sites, kind, contains_b });
    }
    Ok(Filling { hexes, tip: path.tip(), components })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exploration::{explore, explore_until_arc, FixedColoring, SeededColoring, TargetArc};

    /// Reachability of `b` from each site by brute-force path search.
    fn reaches_b(d: &LatticeDomain, blocked: &HashSet<Hex>, from: Hex, target: Hex) -> bool {
        if blocked.contains(&from) || blocked.contains(&target) {
            return false;
        }
        let mut stack = vec![from];
        let mut seen = HashSet::from([from]);
        while let Some(h) = stack.pop() {
            if h == target {
                return true;
            }
            for n in h.neighbors() {
                if d.contains(n) && !blocked.contains(&n) && seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        false
    }

    #[test]
    fn filling_matches_reachability_oracle() {
        let d = LatticeDomain::from_sites((0..3).flat_map(|r| (0..4).map(move |q| Hex::new(q, r))), 1.0).unwrap();
        let ev = d.e_vertices().to_vec();
        let (a, b) = (ev[0], ev[ev.len() / 2]);
        let b_site = b.hexes().into_iter().find(|h| d.contains(*h)).unwrap();
        let len = d.loop_edges().len();
        let slot = d.e_vertex_slot(b).unwrap();
        // stop partway along so that fjords can be cut off
        let target = TargetArc::new((0..3).map(|k| d.loop_edges()[(slot + len - 2 + k) % len]).collect()).unwrap();
        for bits in 0..(1u64 << 12) {
            let colors = FixedColoring::from_bits(&d, bits);
            let path = match explore_until_arc(&d, a, b, &mut colors.clone(), &target) {
                Ok((p, _)) => p,
                Err(_) => explore(&d, a, b, &mut colors.clone()).unwrap(),
            };
            let f = fill(&path, &d, b).unwrap();
            let explored: HashSet<Hex> = path.explored.iter().map(|e| e.0).collect();
            let filled: HashSet<Hex> = f.hexes.iter().copied().collect();
            for &h in d.sites() {
                let want = explored.contains(&h) || !reaches_b(&d, &explored, h, b_site);
                assert_eq!(filled.contains(&h), want, "bits {bits:b} site {h:?}");
            }
            let covered: usize = f.components.iter().map(|c| c.sites.len()).sum();
            assert_eq!(covered + explored.len(), d.len());
        }
    }

    #[test]
    fn straight_path_fills_only_explored() {
        let d = LatticeDomain::from_sites((0..6).map(|q| Hex::new(q, 0)), 1.0).unwrap();
        let ev = d.e_vertices().to_vec();
        let (a, b) = (ev[0], ev[ev.len() / 2]);
        let slot = d.e_vertex_slot(a).unwrap();
        let len = d.loop_edges().len();
        // all blue follows the left arc backwards from a
        let target = TargetArc::new(vec![d.loop_edges()[(slot + len - 3) % len]]).unwrap();
        let colors = FixedColoring::uniform(&d, true);
        let (p, _) = explore_until_arc(&d, a, b, &mut colors.clone(), &target).unwrap();
        let f = fill(&p, &d, b).unwrap();
        let explored: Vec<Hex> = {
            let mut v: Vec<Hex> = p.explored.iter().map(|e| e.0).collect();
            v.sort_by_key(|h| (h.r, h.q));
            v
        };
        assert_eq!(f.hexes, explored);
    }

    #[test]
    fn completed_paths_have_typed_components() {
        let d = LatticeDomain::rhombus(12, 1.0).unwrap();
        let m = d.marks().to_vec();
        for seed in 0..30 {
            let p = explore(&d, m[0], m[2], &mut SeededColoring { seed }).unwrap();
            let f = fill(&p, &d, m[2]).unwrap();
            assert_eq!(f.hexes.len(), d.len());
            for c in &f.components {
                assert_ne!(c.kind, ComponentType::Open, "seed {seed}");
            }
        }
    }
}
