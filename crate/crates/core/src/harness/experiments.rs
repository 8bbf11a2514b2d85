use rayon::prelude::*;
use serde::Serialize;

use crate::cardy::hitting_cdf;
use crate::conformal::MarkedDomain;
use crate::error::{Error, Result};
use crate::exploration::{annulus_arm_count, ArmGeometry, Coloring, ExplorationPath, Explorer, SeededColoring, TargetArc};
use crate::lattice::{build_delta_approximation, LatticeDomain, Vertex};
use crate::rng::{color_word, derive_seed, stream_id};
use crate::sle::{semiball_walk, sle_hitting_sample};
use crate::stats::{
    empirical_cdf, ks_one_sample, ks_two_sample, lag1_permutation_test, weighted_line_fit, EstimateRecord, KsResult,
    LineFit, PermutationResult,
};
use crate::union_find::UnionFind;

/// Runs `f(i)` for `i < n` on `workers` threads and returns the results in
/// index order.
pub fn par_map<T, F>(workers: usize, n: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    pool.install(|| (0..n).into_par_iter().map(&f).collect())
}

/// Sample seeds of one experiment stream.
pub fn sample_seed(root: u64, experiment: &str, i: u64) -> u64 {
    derive_seed(root, stream_id(experiment), i)
}

const NONE: u32 = u32::MAX;

/// Site adjacency and the two arcs of a crossing problem.
#[derive(Debug, Clone)]
pub struct CrossingLattice {
    sites: Vec<(i32, i32)>,
    /// Neighbors in directions 0, 1, 2, so every adjacent pair appears once.
    forward: Vec<[u32; 3]>,
    source: Vec<bool>,
    sink: Vec<bool>,
}

impl CrossingLattice {
    /// Crossing from the arc `m₁m₂` to the arc `m₃m₄` of the marks of `d`.
    pub fn new(d: &LatticeDomain) -> Result<Self> {
        let m = d.marks();
        if m.len() != 4 {
            return Err(Error::InvalidMarks("crossing needs four marked vertices".into()));
        }
        let flag = |x: Vertex, y: Vertex| -> Result<Vec<bool>> {
            let mut f = vec![false; d.len()];
            for e in d.edge_arc(x, y)? {
                f[d.site_index(e.left).expect("loop edges border the interior")] = true;
            }
            Ok(f)
        };
        let forward = d
            .sites()
            .iter()
            .map(|h| {
                let mut out = [NONE; 3];
                for (k, slot) in out.iter_mut().enumerate() {
                    if let Some(j) = d.site_index(h.neighbor(k)) {
                        *slot = j as u32;
                    }
                }
                out
            })
            .collect();
        Ok(Self {
            sites: d.sites().iter().map(|h| (h.q, h.r)).collect(),
            forward,
            source: flag(m[0], m[1])?,
            sink: flag(m[2], m[3])?,
        })
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    fn colors(&self, seed: u64, blue: &mut Vec<bool>) {
        blue.clear();
        let mut key = None;
        let mut word = 0;
        for &(q, r) in &self.sites {
            let k = (r, q.div_euclid(64));
            if key != Some(k) {
                word = color_word(seed, k.0, k.1);
                key = Some(k);
            }
            blue.push(word >> q.rem_euclid(64) & 1 == 1);
        }
    }

    /// Whether a blue path joins the two arcs.
    pub fn crosses(&self, blue: &[bool], uf: &mut UnionFind) -> bool {
        let n = self.sites.len();
        let (s, t) = (n, n + 1);
        uf.reset();
        for i in 0..n {
            if !blue[i] {
                continue;
            }
            for &j in &self.forward[i] {
                if j != NONE && blue[j as usize] {
                    uf.union(i, j as usize);
                }
            }
            if self.source[i] {
                uf.union(i, s);
            }
            if self.sink[i] {
                uf.union(i, t);
            }
        }
        uf.connected(s, t)
    }

    pub fn crosses_seeded(&self, seed: u64) -> bool {
        let mut blue = Vec::with_capacity(self.len());
        self.colors(seed, &mut blue);
        self.crosses(&blue, &mut UnionFind::new(self.len() + 2))
    }
}

/// Monte Carlo estimate of the blue crossing probability between the arcs
/// `m₁m₂` and `m₃m₄` of `d`.
pub fn mc_crossing(d: &LatticeDomain, n: u64, root: u64, workers: usize) -> Result<EstimateRecord> {
    if n == 0 {
        return Err(Error::EmptySamples);
    }
    let lat = CrossingLattice::new(d)?;
    let hits = par_map(workers, n, |i| Ok(lat.crosses_seeded(sample_seed(root, "crossing", i))))?;
    EstimateRecord::bernoulli(hits.iter().filter(|&&h| h).count() as u64, n, "bernoulli-union-find")
}

/// Exploration set-up for hitting the arc `cd` of a domain with marks
/// `[a, c, d]`, aimed at the midpoint `b` of that arc.
#[derive(Debug, Clone)]
pub struct HittingLattice {
    pub md: MarkedDomain,
    pub domain: LatticeDomain,
    a: Vertex,
    b: Vertex,
    target: TargetArc,
}

impl HittingLattice {
    pub fn new(md: &MarkedDomain, mesh: f64) -> Result<Self> {
        if md.marks().len() != 3 {
            return Err(Error::InvalidMarks("hitting needs marks [a, c, d]".into()));
        }
        let m = md.marks();
        let b = md.arc_param(1, 2, 0.5);
        let four = md.with_marks(vec![m[0], m[1], b, m[2]])?;
        let domain = build_delta_approximation(&four, mesh)?;
        let v = domain.marks().to_vec();
        let target = TargetArc::between(&domain, v[1], v[3])?;
        if target.contains(v[0]) {
            return Err(Error::MeshTooCoarse("start vertex lies on the target arc".into()));
        }
        Ok(Self { md: md.clone(), domain, a: v[0], b: v[2], target })
    }

    /// Arc-length fraction from `c` of the continuum boundary point nearest
    /// to a lattice vertex. Points projecting outside the arc go to the
    /// nearer end.
    pub fn fraction(&self, v: Vertex) -> f64 {
        let shape = self.md.shape();
        let s = shape.boundary_param(v.position(self.domain.mesh()));
        let m = self.md.marks();
        let (c, d) = (m[1], m[2]);
        let len = (d - c).rem_euclid(1.0);
        let off = (s - c).rem_euclid(1.0);
        if off <= len {
            off / len
        } else if off - len < 1.0 - off {
            1.0
        } else {
            0.0
        }
    }

    pub fn explore(&self, seed: u64) -> Result<(ExplorationPath, f64)> {
        let explorer = Explorer::new(&self.domain, self.a, self.b)?;
        let mut colors = SeededColoring { seed };
        let (mut path, hit) = explorer.explore_until_arc(&mut colors, &self.target)?;
        path.seed = Some(seed);
        Ok((path, self.fraction(hit.vertex)))
    }

    /// Hit fractions of `n` independent explorations.
    pub fn hits(&self, n: u64, root: u64, workers: usize) -> Result<Vec<f64>> {
        let explorer = Explorer::new(&self.domain, self.a, self.b)?;
        par_map(workers, n, |i| {
            let mut colors = SeededColoring { seed: sample_seed(root, "hitting", i) };
            let (_, hit) = explorer.explore_until_arc(&mut colors, &self.target)?;
            Ok(self.fraction(hit.vertex))
        })
    }
}

/// Hitting fractions of `n` chordal SLE₆ curves in `md`.
pub fn sle_hits(md: &MarkedDomain, n: u64, root: u64, workers: usize) -> Result<Vec<f64>> {
    par_map(workers, n, |i| sle_hitting_sample(md, sample_seed(root, "sle-hitting", i)))
}

#[derive(Debug, Clone, Serialize)]
pub struct HittingReport {
    pub ks: KsResult,
    /// Empirical `P(hit fraction ≤ 1/2)`.
    pub half: EstimateRecord,
    /// The law's value at `1/2`.
    pub half_target: f64,
    pub grid: Vec<f64>,
    pub ecdf: Vec<f64>,
    pub cdf: Vec<f64>,
}

/// Compares hit fractions with the hitting law of `md`.
pub fn hitting_report(md: &MarkedDomain, hits: &[f64], alpha: f64, slack: f64) -> Result<HittingReport> {
    if hits.is_empty() {
        return Err(Error::EmptySamples);
    }
    let ks = ks_one_sample(hits, |s| hitting_cdf(md, s).expect("three marks"), alpha, slack)?;
    let below = hits.iter().filter(|&&x| x <= 0.5).count() as u64;
    let half = EstimateRecord::bernoulli(below, hits.len() as u64, "bernoulli-ecdf")?;
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    let ecdf = empirical_cdf(hits, &grid)?;
    let cdf = grid.iter().map(|&s| hitting_cdf(md, s)).collect::<Result<Vec<_>>>()?;
    Ok(HittingReport { ks, half, half_target: hitting_cdf(md, 0.5)?, grid, ecdf, cdf })
}

/// Percolation hits at mesh `δ` against the hitting law.
pub fn mc_hitting(
    md: &MarkedDomain,
    mesh: f64,
    n: u64,
    root: u64,
    workers: usize,
    alpha: f64,
    slack: f64,
) -> Result<(Vec<f64>, HittingReport)> {
    if n == 0 {
        return Err(Error::EmptySamples);
    }
    let hits = HittingLattice::new(md, mesh)?.hits(n, root, workers)?;
    let report = hitting_report(md, &hits, alpha, slack)?;
    Ok((hits, report))
}

/// Two-sample KS comparison of percolation and SLE hit fractions.
pub fn compare_hitting(perc: &[f64], sle: &[f64], alpha: f64, slack: f64) -> Result<KsResult> {
    ks_two_sample(perc, sle, alpha, slack)
}

/// Seed of walk `i` at scale `ε`. Walks at different scales would otherwise
/// be exact rescalings of each other.
pub fn semiball_seed(root: u64, eps: f64, i: u64) -> u64 {
    sample_seed(derive_seed(root, stream_id("semiball-scale"), eps.to_bits()), "semiball", i)
}

#[derive(Debug, Clone, Serialize)]
pub struct SemiballReport {
    pub eps: f64,
    pub runs: u64,
    pub epochs: usize,
    pub events: u64,
    /// Events with `τ ≤ ε²/2`.
    pub within_bound: u64,
    pub max_tau_ratio: f64,
    pub mean_tau_ratio: f64,
    /// First against last epoch increments.
    pub ks: KsResult,
    pub lag1: PermutationResult,
    pub lag1_accept: bool,
}

/// Semi-ball walks at scale `ε`: stopping-time bound and the i.i.d.
/// property of the recentred driving increments.
pub fn semiball_study(
    eps: f64,
    runs: u64,
    epochs: usize,
    alpha: f64,
    permutations: usize,
    root: u64,
    workers: usize,
) -> Result<SemiballReport> {
    if runs == 0 {
        return Err(Error::EmptySamples);
    }
    if epochs < 2 {
        return Err(Error::InvalidInput("the i.i.d. checks need two epochs".into()));
    }
    let walks = par_map(workers, runs, |i| {
        let w = semiball_walk(eps, epochs, semiball_seed(root, eps, i))?;
        let taus: Vec<f64> = w.snapshots.iter().map(|s| s.tau / (eps * eps)).collect();
        Ok((taus, w.increments))
    })?;
    let ratios: Vec<f64> = walks.iter().flat_map(|w| w.0.iter().copied()).collect();
    let events = ratios.len() as u64;
    let within_bound = ratios.iter().filter(|&&r| r <= 0.5).count() as u64;
    let max_tau_ratio = ratios.iter().cloned().fold(0.0, f64::max);
    let mean_tau_ratio = ratios.iter().sum::<f64>() / events as f64;
    let first: Vec<f64> = walks.iter().map(|w| w.1[0] / eps).collect();
    let last: Vec<f64> = walks.iter().map(|w| w.1[epochs - 1] / eps).collect();
    let ks = ks_two_sample(&first, &last, alpha, 0.0)?;
    let seqs: Vec<Vec<f64>> = walks.into_iter().map(|w| w.1).collect();
    let lag1 = lag1_permutation_test(&seqs, permutations, sample_seed(root, "lag1-permutation", 0))?;
    Ok(SemiballReport {
        eps,
        runs,
        epochs,
        events,
        within_bound,
        max_tau_ratio,
        mean_tau_ratio,
        ks,
        lag1,
        lag1_accept: lag1.p_value > alpha,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ArmRow {
    pub ratio: f64,
    pub r_in: f64,
    pub r_out: f64,
    /// `P(at least six alternating arms)` in the full-plane annulus.
    pub interior: EstimateRecord,
    /// `P(at least three alternating arms)` in the half-annulus.
    pub boundary: EstimateRecord,
}

#[derive(Debug, Clone, Serialize)]
pub struct ArmReport {
    pub rows: Vec<ArmRow>,
    pub interior_fit: Option<LineFit>,
    pub boundary_fit: Option<LineFit>,
}

/// Log-log fit through the rows with a positive estimate; the variance of
/// `log p̂` is taken as `(1 − p)/(n p)`.
fn log_fit(rows: &[(f64, EstimateRecord)]) -> Option<LineFit> {
    let pts: Vec<&(f64, EstimateRecord)> =
        rows.iter().filter(|r| r.0 > 1.0 && r.1.point_estimate > 0.0 && r.1.point_estimate < 1.0).collect();
    let x: Vec<f64> = pts.iter().map(|r| r.0.ln()).collect();
    let y: Vec<f64> = pts.iter().map(|r| r.1.point_estimate.ln()).collect();
    let v: Vec<f64> = pts
        .iter()
        .map(|r| (1.0 - r.1.point_estimate) / (r.1.n_samples as f64 * r.1.point_estimate))
        .collect();
    weighted_line_fit(&x, &y, &v).ok()
}

/// Arm-event probabilities for annuli `r_in ≤ |z| ≤ ratio·r_in` (mesh
/// units) under the colorings `make(seed)`. A ratio of one is an empty
/// annulus, which every coloring crosses.
pub fn arm_scaling_with<C, F>(
    box_size: f64,
    r_in: f64,
    ratios: &[f64],
    n: u64,
    root: u64,
    workers: usize,
    make: F,
) -> Result<ArmReport>
where
    C: Coloring,
    F: Fn(u64) -> C + Sync + Send,
{
    if n == 0 {
        return Err(Error::EmptySamples);
    }
    let mut rows = Vec::new();
    for (k, &ratio) in ratios.iter().enumerate() {
        let r_out = ratio * r_in;
        if !(ratio >= 1.0) || 2.0 * r_out > box_size {
            return Err(Error::InvalidInput(format!("annulus {r_in}..{r_out} does not fit in box {box_size}")));
        }
        let (six, three) = if ratio == 1.0 {
            (n, n)
        } else {
            let counts = par_map(workers, n, |i| {
                let seed = sample_seed(root, "arms", (k as u64) << 40 | i);
                let mut c = make(seed);
                let inner = annulus_arm_count(&mut c, ArmGeometry::Interior, r_in, r_out).arms;
                // k boundary strands separate k + 1 alternating arms
                let edge = annulus_arm_count(&mut c, ArmGeometry::Boundary, r_in, r_out).arms;
                Ok((inner >= 6, edge >= 2))
            })?;
            (counts.iter().filter(|c| c.0).count() as u64, counts.iter().filter(|c| c.1).count() as u64)
        };
        rows.push(ArmRow {
            ratio,
            r_in,
            r_out,
            interior: EstimateRecord::bernoulli(six, n, "bernoulli-six-arm")?,
            boundary: EstimateRecord::bernoulli(three, n, "bernoulli-boundary-three-arm")?,
        });
    }
    let interior_fit = log_fit(&rows.iter().map(|r| (r.ratio, r.interior)).collect::<Vec<_>>());
    let boundary_fit = log_fit(&rows.iter().map(|r| (r.ratio, r.boundary)).collect::<Vec<_>>());
    Ok(ArmReport { rows, interior_fit, boundary_fit })
}

pub fn arm_scaling(box_size: f64, r_in: f64, ratios: &[f64], n: u64, root: u64, workers: usize) -> Result<ArmReport> {
    arm_scaling_with(box_size, r_in, ratios, n, root, workers, |seed| SeededColoring { seed })
}

/// Lattice domain of a crossing experiment.
pub fn crossing_domain(md: Option<&MarkedDomain>, mesh: f64) -> Result<LatticeDomain> {
    match md {
        None => LatticeDomain::rhombus((1.0 / mesh).round() as i32, mesh),
        Some(md) => build_delta_approximation(md, mesh),
    }
}
