use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use hexsle::cardy;
use hexsle::conformal::{quad_cross_ratio, MarkedDomain};
use hexsle::curvemetric::{self, SpherePoint};
use hexsle::harness::{self, Config, Experiment, HittingLattice};
use hexsle::lattice::{build_delta_approximation, LatticeDomain};
use hexsle::sle;

fn err(e: hexsle::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn c(p: (f64, f64)) -> Complex64 {
    Complex64::new(p.0, p.1)
}

fn pair(z: Complex64) -> (f64, f64) {
    (z.re, z.im)
}

fn workers_or_default(workers: Option<usize>) -> usize {
    workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Domain with marked boundary points, given by boundary parameters.
#[pyclass(name = "MarkedDomain", module = "hexsle_py", from_py_object)]
#[derive(Clone)]
struct PyMarkedDomain(MarkedDomain);

#[pymethods]
impl PyMarkedDomain {
    #[staticmethod]
    fn rectangle(width: f64, height: f64) -> PyResult<Self> {
        MarkedDomain::rectangle(width, height).map(Self).map_err(err)
    }

    #[staticmethod]
    fn half_disc() -> Self {
        Self(harness::half_disc())
    }

    #[getter]
    fn marks(&self) -> Vec<f64> {
        self.0.marks().to_vec()
    }

    fn mark_point(&self, i: usize) -> PyResult<(f64, f64)> {
        if i >= self.0.marks().len() {
            return Err(PyValueError::new_err(format!("no mark {i}")));
        }
        Ok(pair(self.0.mark_point(i)))
    }

    fn cross_ratio(&self) -> PyResult<f64> {
        quad_cross_ratio(&self.0).map_err(err)
    }

    fn crossing_probability(&self) -> PyResult<f64> {
        cardy::crossing_probability(&self.0).map_err(err)
    }

    fn hitting_cdf(&self, s: f64) -> PyResult<f64> {
        cardy::hitting_cdf(&self.0, s).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("MarkedDomain({}, marks={:?})", self.0.shape().name(), self.0.marks())
    }
}

/// Finite hexagonal domain at mesh δ.
#[pyclass(name = "LatticeDomain", module = "hexsle_py")]
struct PyLatticeDomain(LatticeDomain);

#[pymethods]
impl PyLatticeDomain {
    #[staticmethod]
    fn rhombus(side: i32, mesh: f64) -> PyResult<Self> {
        LatticeDomain::rhombus(side, mesh).map(Self).map_err(err)
    }

    #[staticmethod]
    fn approximate(domain: &PyMarkedDomain, mesh: f64) -> PyResult<Self> {
        build_delta_approximation(&domain.0, mesh).map(Self).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    #[getter]
    fn mesh(&self) -> f64 {
        self.0.mesh()
    }

    fn mark_positions(&self) -> Vec<(f64, f64)> {
        self.0.marks().iter().map(|v| pair(v.position(self.0.mesh()))).collect()
    }

    /// Monte Carlo estimate of the crossing probability between the marked arcs.
    #[pyo3(signature = (samples, seed = 0, workers = None))]
    fn crossing(&self, samples: u64, seed: u64, workers: Option<usize>) -> PyResult<(f64, f64)> {
        let est = harness::mc_crossing(&self.0, samples, seed, workers_or_default(workers)).map_err(err)?;
        Ok((est.point_estimate, est.std_error))
    }

    fn to_json(&self, seed: Option<u64>) -> PyResult<String> {
        serde_json::to_string(&self.0.to_export(seed)).map_err(|e| PyValueError::new_err(e.to_string()))
    }
}

/// Exploration hits on the target arc of a three-marked domain.
#[pyclass(name = "HittingLattice", module = "hexsle_py")]
struct PyHittingLattice(HittingLattice);

#[pymethods]
impl PyHittingLattice {
    #[new]
    fn new(domain: &PyMarkedDomain, mesh: f64) -> PyResult<Self> {
        HittingLattice::new(&domain.0, mesh).map(Self).map_err(err)
    }

    /// One exploration; returns the path as JSON and the arc fraction hit.
    fn explore(&self, seed: u64) -> PyResult<(String, f64)> {
        let (path, f) = self.0.explore(seed).map_err(err)?;
        Ok((path.to_json().map_err(err)?, f))
    }

    #[pyo3(signature = (samples, seed = 0, workers = None))]
    fn hits(&self, samples: u64, seed: u64, workers: Option<usize>) -> PyResult<Vec<f64>> {
        self.0.hits(samples, seed, workers_or_default(workers)).map_err(err)
    }
}

/// Loewner chain built from a driving function.
#[pyclass(name = "LoewnerChain", module = "hexsle_py")]
struct PyLoewnerChain(sle::LoewnerState);

#[pymethods]
impl PyLoewnerChain {
    /// Chain driven by √κ·B on a grid of step `dt` up to `t_max`.
    #[staticmethod]
    #[pyo3(signature = (dt, t_max, seed, kappa = 6.0))]
    fn brownian(dt: f64, t_max: f64, seed: u64, kappa: f64) -> PyResult<Self> {
        let w = sle::sample_driving_kappa(dt, t_max, kappa, seed).map_err(err)?;
        sle::loewner_trace(&w).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_driving(dt: f64, samples: Vec<f64>) -> PyResult<Self> {
        let w = sle::DrivingFunction::from_samples(dt, samples).map_err(err)?;
        sle::loewner_trace(&w).map(Self).map_err(err)
    }

    fn times(&self) -> Vec<f64> {
        self.0.times().to_vec()
    }

    fn trace(&self) -> Vec<(f64, f64)> {
        self.0.trace().iter().map(|&z| pair(z)).collect()
    }

    fn capacity_time(&self) -> f64 {
        self.0.capacity_time()
    }

    fn capacity_coefficient(&self) -> f64 {
        self.0.capacity_coefficient()
    }
}

#[pyfunction]
fn cardy_phi(eta: f64) -> f64 {
    cardy::cardy_phi(eta)
}

/// Stopping times, tips and driving increments of successive semi-ball exits.
#[pyfunction]
fn semiball_walk(py: Python<'_>, eps: f64, epochs: usize, seed: u64) -> PyResult<Py<PyAny>> {
    let w = sle::semiball_walk(eps, epochs, seed).map_err(err)?;
    let d = pyo3::types::PyDict::new(py);
    d.set_item("eps", w.eps)?;
    d.set_item("tau", w.snapshots.iter().map(|s| s.tau).collect::<Vec<_>>())?;
    d.set_item("time", w.snapshots.iter().map(|s| s.time).collect::<Vec<_>>())?;
    d.set_item("tip", w.snapshots.iter().map(|s| pair(s.tip)).collect::<Vec<_>>())?;
    d.set_item("increments", w.increments)?;
    Ok(d.into_any().unbind())
}

#[pyfunction]
fn curve_distance(a: Vec<(f64, f64)>, b: Vec<(f64, f64)>) -> f64 {
    let a: Vec<Complex64> = a.into_iter().map(c).collect();
    let b: Vec<Complex64> = b.into_iter().map(c).collect();
    curvemetric::curve_distance(&a, &b)
}

#[pyfunction]
fn hausdorff_points(a: Vec<(f64, f64)>, b: Vec<(f64, f64)>) -> PyResult<f64> {
    let a: Vec<Complex64> = a.into_iter().map(c).collect();
    let b: Vec<Complex64> = b.into_iter().map(c).collect();
    curvemetric::hausdorff_points(&a, &b).map_err(err)
}

/// Spherical distance; `None` stands for the point at infinity.
#[pyfunction]
fn sphere_distance(u: Option<(f64, f64)>, v: Option<(f64, f64)>) -> f64 {
    let p = |x: Option<(f64, f64)>| x.map_or(SpherePoint::Infinity, |x| SpherePoint::Finite(c(x)));
    curvemetric::sphere_distance(p(u), p(v))
}

/// Runs an experiment into `out`, returning `(passed, [(check, passed, detail)])`.
#[pyfunction]
#[pyo3(signature = (experiment, out, config = None, seed = 0, workers = None))]
fn run_experiment(
    experiment: &str,
    out: std::path::PathBuf,
    config: Option<&str>,
    seed: u64,
    workers: Option<usize>,
) -> PyResult<(bool, Vec<(String, bool, String)>)> {
    let exp = match experiment {
        "crossing" => Experiment::Crossing,
        "hitting" => Experiment::Hitting,
        "compare" => Experiment::Compare,
        "sle" => Experiment::Sle,
        "arms" => Experiment::Arms,
        "goldens" => Experiment::Goldens,
        other => return Err(PyValueError::new_err(format!("unknown experiment {other}"))),
    };
    let cfg = match config {
        Some(text) => Config::parse(text).map_err(err)?,
        None => Config::defaults(),
    };
    let (run, _) = harness::run_to_dir(exp, &cfg, seed, workers_or_default(workers), true, &out).map_err(err)?;
    let checks = run.checks.iter().map(|k| (k.name.clone(), k.passed, k.detail.clone())).collect();
    Ok((run.passed(), checks))
}

#[pymodule]
fn hexsle_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMarkedDomain>()?;
    m.add_class::<PyLatticeDomain>()?;
    m.add_class::<PyHittingLattice>()?;
    m.add_class::<PyLoewnerChain>()?;
    m.add_function(wrap_pyfunction!(cardy_phi, m)?)?;
    m.add_function(wrap_pyfunction!(semiball_walk, m)?)?;
    m.add_function(wrap_pyfunction!(curve_distance, m)?)?;
    m.add_function(wrap_pyfunction!(hausdorff_points, m)?)?;
    m.add_function(wrap_pyfunction!(sphere_distance, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
