//! Monte Carlo experiments, result files and run manifests.
//!
//! Every sample `i` of an experiment draws its randomness from
//! `derive_seed(root, experiment, i)`, and results are aggregated in index
//! order, so estimates depend on `(config, seed)` only.

pub mod config;
pub mod experiments;
pub mod golden;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;

pub use config::{half_disc, ArmsConfig, CompareConfig, Config, CrossingConfig, DomainConfig, HittingConfig, SleConfig};
pub use experiments::{
    arm_scaling, arm_scaling_with, compare_hitting, crossing_domain, hitting_report, mc_crossing, mc_hitting,
    par_map, sample_seed, semiball_study, sle_hits, ArmReport, ArmRow, CrossingLattice, HittingLattice, HittingReport,
    SemiballReport,
};
pub use golden::{GoldenEntry, GoldenKind, GoldenTable};

use crate::cardy::crossing_probability;
use crate::error::{Error, Result};
use crate::sle::{semiball_walk, write_snapshots_csv};
use crate::stats::{EstimateRecord, KsResult};

pub const RESULTS_SCHEMA: &str = "hexsle-results/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Crossing,
    Hitting,
    Compare,
    Sle,
    Arms,
    Goldens,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Crossing => "crossing",
            Experiment::Hitting => "hitting",
            Experiment::Compare => "compare",
            Experiment::Sle => "sle",
            Experiment::Arms => "arms",
            Experiment::Goldens => "goldens",
        }
    }
}

/// One line of `results.csv`; empty cells where a field does not apply.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub schema: &'static str,
    pub experiment: &'static str,
    pub label: String,
    pub mesh: Option<f64>,
    /// ε, annulus ratio or CDF abscissa.
    pub param: Option<f64>,
    pub n_samples: u64,
    pub estimate: f64,
    pub std_error: Option<f64>,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    pub target: Option<f64>,
    pub statistic: Option<f64>,
    pub critical: Option<f64>,
    pub p_value: Option<f64>,
    pub pass: Option<bool>,
}

impl ResultRow {
    fn new(experiment: Experiment, label: impl Into<String>, n_samples: u64, estimate: f64) -> Self {
        Self {
            schema: RESULTS_SCHEMA,
            experiment: experiment.name(),
            label: label.into(),
            mesh: None,
            param: None,
            n_samples,
            estimate,
            std_error: None,
            ci_lo: None,
            ci_hi: None,
            target: None,
            statistic: None,
            critical: None,
            p_value: None,
            pass: None,
        }
    }

    fn estimate(experiment: Experiment, label: impl Into<String>, e: &EstimateRecord) -> Self {
        Self {
            std_error: Some(e.std_error),
            ci_lo: Some(e.ci95[0]),
            ci_hi: Some(e.ci95[1]),
            ..Self::new(experiment, label, e.n_samples, e.point_estimate)
        }
    }

    fn ks(experiment: Experiment, label: impl Into<String>, n: u64, k: &KsResult) -> Self {
        Self {
            statistic: Some(k.statistic),
            critical: Some(k.critical + k.slack),
            p_value: Some(k.p_value),
            pass: Some(k.accept),
            ..Self::new(experiment, label, n, k.statistic)
        }
    }

    fn mesh(mut self, mesh: f64) -> Self {
        self.mesh = Some(mesh);
        self
    }

    fn param(mut self, p: f64) -> Self {
        self.param = Some(p);
        self
    }

    fn target(mut self, t: f64) -> Self {
        self.target = Some(t);
        self
    }

    fn pass(mut self, ok: bool) -> Self {
        self.pass = Some(ok);
        self
    }
}

/// Raw sample for `samples.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleRow {
    pub source: &'static str,
    pub index: u64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

/// Everything an experiment produces before it is written out.
#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub rows: Vec<ResultRow>,
    pub samples: Vec<SampleRow>,
    pub checks: Vec<Check>,
    /// Extra files as `(name, contents)`.
    pub files: Vec<(String, Vec<u8>)>,
}

impl RunOutput {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WallClock {
    pub started_unix_s: f64,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub golden_version: u32,
    pub results_schema: &'static str,
    pub experiment: Experiment,
    pub config_hash: String,
    pub root_seed: u64,
    pub worker_count: usize,
    pub wall_clock: WallClock,
    pub parameters: serde_json::Value,
    pub outputs: Vec<String>,
    pub check_requested: bool,
    pub checks: Vec<Check>,
}

fn section<'a, T>(s: &'a Option<T>, name: &str) -> Result<&'a T> {
    s.as_ref().ok_or_else(|| Error::ConfigInvalid(format!("config has no [{name}] section")))
}

pub fn run_crossing(cfg: &CrossingConfig, root: u64, workers: usize) -> Result<RunOutput> {
    let md = cfg.domain.marked()?;
    let d = crossing_domain(md.as_ref(), cfg.mesh)?;
    let est = mc_crossing(&d, cfg.samples, root, workers)?;
    // the rhombus is self-dual: the crossing has probability exactly 1/2
    let target = match &md {
        None => 0.5,
        Some(md) => crossing_probability(md)?,
    };
    let ok = est.within(target, 3.0, cfg.allowance);
    let row = ResultRow::estimate(Experiment::Crossing, cfg.domain.label(), &est).mesh(cfg.mesh).target(target).pass(ok);
    let detail = format!(
        "estimate {:.5} ± {:.5} vs {target:.5}, allowance {}",
        est.point_estimate, est.std_error, cfg.allowance
    );
    Ok(RunOutput { rows: vec![row], checks: vec![Check::new("crossing", ok, detail)], ..Default::default() })
}

fn hitting_rows(label: &str, mesh: f64, hits: &[f64], r: &HittingReport) -> (Vec<ResultRow>, Vec<Check>) {
    let n = hits.len() as u64;
    let e = Experiment::Hitting;
    let half_ok = r.half.within(r.half_target, 3.0, 0.0);
    let mut rows = vec![
        ResultRow::ks(e, format!("{label} ks"), n, &r.ks).mesh(mesh),
        ResultRow::estimate(e, format!("{label} ecdf"), &r.half).mesh(mesh).param(0.5).target(r.half_target).pass(half_ok),
    ];
    for ((&s, &f), &c) in r.grid.iter().zip(&r.ecdf).zip(&r.cdf) {
        rows.push(ResultRow::new(e, format!("{label} ecdf"), n, f).mesh(mesh).param(s).target(c));
    }
    let checks = vec![
        Check::new(
            "hitting ks",
            r.ks.accept,
            format!("D = {:.4}, critical {:.4} + slack {:.4}", r.ks.statistic, r.ks.critical, r.ks.slack),
        ),
        Check::new(
            "hitting cdf at 1/2",
            half_ok,
            format!("{:.4} ± {:.4} vs {:.4}", r.half.point_estimate, r.half.std_error, r.half_target),
        ),
    ];
    (rows, checks)
}

pub fn run_hitting(cfg: &HittingConfig, root: u64, workers: usize, goldens: &GoldenTable) -> Result<RunOutput> {
    let md = cfg.domain.marked()?.expect("validated");
    let slack = match cfg.slack {
        Some(s) => s,
        None => goldens.get("hitting_ks_slack")?,
    };
    if cfg.samples == 0 {
        return Err(Error::EmptySamples);
    }
    let lattice = HittingLattice::new(&md, cfg.mesh)?;
    let hits = lattice.hits(cfg.samples, root, workers)?;
    let report = hitting_report(&md, &hits, cfg.alpha, slack)?;
    let (rows, checks) = hitting_rows(&cfg.domain.label(), cfg.mesh, &hits, &report);
    let (path, _) = lattice.explore(sample_seed(root, "hitting", 0))?;
    Ok(RunOutput {
        rows,
        checks,
        samples: hits.iter().enumerate().map(|(i, &v)| SampleRow { source: "percolation", index: i as u64, value: v }).collect(),
        files: vec![("path.json".into(), path.to_json()?.into_bytes())],
    })
}

pub fn run_compare(cfg: &CompareConfig, root: u64, workers: usize, goldens: &GoldenTable) -> Result<RunOutput> {
    let md = cfg.domain.marked()?.expect("validated");
    let slack = match cfg.slack {
        Some(s) => s,
        None => goldens.get("compare_ks_slack")?,
    };
    if cfg.perc_samples == 0 || cfg.sle_samples == 0 {
        return Err(Error::EmptySamples);
    }
    let perc = HittingLattice::new(&md, cfg.mesh)?.hits(cfg.perc_samples, root, workers)?;
    let sle = sle_hits(&md, cfg.sle_samples, root, workers)?;
    let ks = compare_hitting(&perc, &sle, cfg.alpha, slack)?;
    let label = cfg.domain.label();
    let rows = vec![ResultRow::ks(Experiment::Compare, format!("{label} percolation vs sle"), perc.len() as u64 + sle.len() as u64, &ks)
        .mesh(cfg.mesh)];
    let checks = vec![Check::new(
        "percolation vs sle ks",
        ks.accept,
        format!("D = {:.4}, critical {:.4} + slack {:.4}", ks.statistic, ks.critical, ks.slack),
    )];
    let mut samples: Vec<SampleRow> =
        perc.iter().enumerate().map(|(i, &v)| SampleRow { source: "percolation", index: i as u64, value: v }).collect();
    samples.extend(sle.iter().enumerate().map(|(i, &v)| SampleRow { source: "sle", index: i as u64, value: v }));
    Ok(RunOutput { rows, checks, samples, files: Vec::new() })
}

pub fn run_sle(cfg: &SleConfig, root: u64, workers: usize) -> Result<RunOutput> {
    let e = Experiment::Sle;
    let mut out = RunOutput::default();
    for &eps in &cfg.eps {
        let r = semiball_study(eps, cfg.runs, cfg.epochs, cfg.alpha, cfg.permutations, root, workers)?;
        let bound_ok = r.within_bound == r.events;
        out.rows.push(
            ResultRow::new(e, "tau within eps^2/2", r.events, r.within_bound as f64 / r.events as f64)
                .param(eps)
                .target(1.0)
                .pass(bound_ok),
        );
        out.rows.push(ResultRow::new(e, "max tau/eps^2", r.events, r.max_tau_ratio).param(eps).target(0.5));
        out.rows.push(ResultRow::new(e, "mean tau/eps^2", r.events, r.mean_tau_ratio).param(eps));
        out.rows.push(ResultRow::ks(e, "increments first vs last epoch", 2 * r.runs, &r.ks).param(eps));
        out.rows.push(ResultRow {
            statistic: Some(r.lag1.statistic),
            p_value: Some(r.lag1.p_value),
            pass: Some(r.lag1_accept),
            ..ResultRow::new(e, "increments lag-1 correlation", r.runs, r.lag1.statistic).param(eps)
        });
        out.checks.push(Check::new(
            format!("tau bound at eps {eps}"),
            bound_ok,
            format!("{} of {} events, max ratio {:.4}", r.within_bound, r.events, r.max_tau_ratio),
        ));
        out.checks.push(Check::new(format!("increment ks at eps {eps}"), r.ks.accept, format!("D = {:.4}", r.ks.statistic)));
        out.checks.push(Check::new(
            format!("increment lag-1 at eps {eps}"),
            r.lag1_accept,
            format!("r = {:.4}, p = {:.3}", r.lag1.statistic, r.lag1.p_value),
        ));
    }
    // trace and stopping snapshots of the first walk at the first scale
    let walk = semiball_walk(cfg.eps[0], cfg.epochs, experiments::semiball_seed(root, cfg.eps[0], 0))?;
    let mut trace = Vec::new();
    walk.state.write_trace_csv(&mut trace)?;
    let mut snaps = Vec::new();
    write_snapshots_csv(&walk.snapshots, &mut snaps)?;
    out.files.push(("trace.csv".into(), trace));
    out.files.push(("snapshots.csv".into(), snaps));
    Ok(out)
}

pub fn run_arms(cfg: &ArmsConfig, root: u64, workers: usize) -> Result<RunOutput> {
    let e = Experiment::Arms;
    let r = arm_scaling(cfg.box_size, cfg.r_in, &cfg.ratios, cfg.samples, root, workers)?;
    let mut out = RunOutput::default();
    for row in &r.rows {
        out.rows.push(ResultRow::estimate(e, "interior six arms", &row.interior).param(row.ratio));
        out.rows.push(ResultRow::estimate(e, "boundary three arms", &row.boundary).param(row.ratio));
    }
    for (name, fit, bound) in [
        ("interior six-arm slope", r.interior_fit, cfg.interior_slope_bound),
        ("boundary three-arm slope", r.boundary_fit, cfg.boundary_slope_bound),
    ] {
        let ok = fit.is_some_and(|f| f.slope + 2.0 * f.slope_se < bound);
        let (slope, se) = fit.map_or((f64::NAN, f64::NAN), |f| (f.slope, f.slope_se));
        out.rows.push(ResultRow { std_error: Some(se), ..ResultRow::new(e, name, cfg.samples, slope).target(bound).pass(ok) });
        out.checks.push(Check::new(name, ok, format!("{slope:.3} ± {se:.3} vs {bound}")));
    }
    Ok(out)
}

pub fn run_goldens(goldens: &GoldenTable) -> Result<RunOutput> {
    let (fresh, drift) = golden::regenerate(goldens)?;
    let mut out = RunOutput::default();
    for d in &drift {
        out.rows.push(ResultRow { target: d.stored, ..ResultRow::new(Experiment::Goldens, d.name.clone(), 0, d.fresh).pass(d.ok) });
        out.checks.push(Check::new(
            d.name.clone(),
            d.ok,
            format!("stored {:?}, fresh {}, tolerance {}", d.stored, d.fresh, d.tolerance),
        ));
    }
    out.files.push(("goldens.json".into(), fresh.to_json()?.into_bytes()));
    Ok(out)
}

/// Runs one experiment of `cfg`.
pub fn run_experiment(experiment: Experiment, cfg: &Config, root: u64, workers: usize) -> Result<RunOutput> {
    let goldens = GoldenTable::embedded();
    match experiment {
        Experiment::Crossing => run_crossing(section(&cfg.crossing, "crossing")?, root, workers),
        Experiment::Hitting => run_hitting(section(&cfg.hitting, "hitting")?, root, workers, &goldens),
        Experiment::Compare => run_compare(section(&cfg.compare, "compare")?, root, workers, &goldens),
        Experiment::Sle => run_sle(section(&cfg.sle, "sle")?, root, workers),
        Experiment::Arms => run_arms(section(&cfg.arms, "arms")?, root, workers),
        Experiment::Goldens => run_goldens(&goldens),
    }
}

fn parameters(experiment: Experiment, cfg: &Config) -> serde_json::Value {
    let v = match experiment {
        Experiment::Crossing => serde_json::to_value(&cfg.crossing),
        Experiment::Hitting => serde_json::to_value(&cfg.hitting),
        Experiment::Compare => serde_json::to_value(&cfg.compare),
        Experiment::Sle => serde_json::to_value(&cfg.sle),
        Experiment::Arms => serde_json::to_value(&cfg.arms),
        Experiment::Goldens => Ok(serde_json::Value::Null),
    };
    v.unwrap_or(serde_json::Value::Null)
}

/// Runs an experiment and writes `results.csv`, `manifest.json`, the
/// optional `samples.csv` and any extra files into `out`.
pub fn run_to_dir(
    experiment: Experiment,
    cfg: &Config,
    root: u64,
    workers: usize,
    check: bool,
    out: &Path,
) -> Result<(RunOutput, RunManifest)> {
    cfg.validate()?;
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
    let clock = Instant::now();
    let result = run_experiment(experiment, cfg, root, workers)?;
    fs::create_dir_all(out)?;
    let mut outputs = vec!["results.csv".to_string()];
    write_rows(&out.join("results.csv"), &result.rows)?;
    if !result.samples.is_empty() {
        write_rows(&out.join("samples.csv"), &result.samples)?;
        outputs.push("samples.csv".into());
    }
    for (name, bytes) in &result.files {
        fs::write(out.join(name), bytes)?;
        outputs.push(name.clone());
    }
    outputs.push("manifest.json".into());
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        tool_version: env!("CARGO_PKG_VERSION"),
        golden_version: GoldenTable::embedded().version,
        results_schema: RESULTS_SCHEMA,
        experiment,
        config_hash: cfg.hash(),
        root_seed: root,
        worker_count: workers,
        wall_clock: WallClock { started_unix_s: started, elapsed_s: clock.elapsed().as_secs_f64() },
        parameters: parameters(experiment, cfg),
        outputs,
        check_requested: check,
        checks: result.checks.clone(),
    };
    fs::write(out.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok((result, manifest))
}

fn write_rows<T: Serialize>(path: &PathBuf, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
