//! Python bindings: scenarios, sweeps, the metric functions and the
//! recurrence model.

use pyo3::exceptions::{PyKeyError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use viewsim::analytic::ModelState as CoreModel;
use viewsim::experiment::{self, SummaryRow};
use viewsim::metrics::{self, AggregateSeries};
use viewsim::scenario::{bundled, Engine, Scenario as CoreScenario};
use viewsim::traffic;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_error(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn series_dict<'py>(py: Python<'py>, s: &AggregateSeries, sync_messages: f64) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("runs", s.runs)?;
    d.set_item("time", s.times.clone())?;
    d.set_item("xi_f", s.xi_f.clone())?;
    d.set_item("xi_b", s.xi_b.clone())?;
    d.set_item("sigma_f", s.sigma_f.clone())?;
    d.set_item("sigma_b", s.sigma_b.clone())?;
    d.set_item("flows", s.flows.clone())?;
    d.set_item("bytes", s.bytes.clone())?;
    d.set_item("mean_xi_f", s.mean_xi_f())?;
    d.set_item("mean_xi_b", s.mean_xi_b())?;
    d.set_item("mean_sigma_f", s.mean_sigma_f())?;
    d.set_item("mean_sigma_b", s.mean_sigma_b())?;
    d.set_item("sync_messages", sync_messages)?;
    Ok(d)
}

fn row_dict<'py>(py: Python<'py>, r: &SummaryRow) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("value", r.value)?;
    d.set_item("xi_f", r.xi_f)?;
    d.set_item("xi_b", r.xi_b)?;
    d.set_item("sigma_f", r.sigma_f)?;
    d.set_item("sigma_b", r.sigma_b)?;
    d.set_item("runs", r.runs)?;
    d.set_item("sync_messages", r.sync_messages)?;
    Ok(d)
}

/// A validated scenario.
#[pyclass(name = "Scenario", module = "pyviewsim", skip_from_py_object)]
#[derive(Clone)]
struct Scenario {
    inner: CoreScenario,
}

#[pymethods]
impl Scenario {
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        CoreScenario::load(path).map(|inner| Self { inner }).map_err(value_error)
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        CoreScenario::parse(text).map(|inner| Self { inner }).map_err(value_error)
    }

    #[staticmethod]
    fn bundled(name: &str) -> PyResult<Self> {
        match bundled::load(name) {
            Some(r) => r.map(|inner| Self { inner }).map_err(value_error),
            None => Err(PyKeyError::new_err(name.to_string())),
        }
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn description(&self) -> String {
        self.inner.description.clone()
    }

    #[getter]
    fn engine(&self) -> String {
        self.inner.engine.to_string()
    }

    #[setter]
    fn set_engine(&mut self, engine: &str) -> PyResult<()> {
        self.inner.engine = engine.parse::<Engine>().map_err(value_error)?;
        Ok(())
    }

    #[getter]
    fn runs(&self) -> u32 {
        self.inner.runs
    }

    #[setter]
    fn set_runs(&mut self, runs: u32) -> PyResult<()> {
        if runs == 0 {
            return Err(PyValueError::new_err("runs must be at least 1"));
        }
        self.inner.runs = runs;
        Ok(())
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[setter]
    fn set_seed(&mut self, seed: u64) {
        self.inner.seed = seed;
    }

    #[getter]
    fn horizon(&self) -> f64 {
        self.inner.horizon
    }

    #[setter]
    fn set_horizon(&mut self, horizon: f64) -> PyResult<()> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(PyValueError::new_err("horizon must be positive"));
        }
        self.inner.horizon = horizon;
        Ok(())
    }

    #[getter]
    fn domains(&self) -> usize {
        self.inner.topology.domains
    }

    #[getter]
    fn has_sweep(&self) -> bool {
        self.inner.sweep.is_some()
    }

    /// Runs the base setting; returns the run-averaged series and its means.
    fn run<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let scenario = self.inner.clone();
        let result = py.detach(move || experiment::run_scenario(&scenario)).map_err(runtime_error)?;
        series_dict(py, result.output_series(), result.sync_messages)
    }

    /// Runs the `[sweep]`; returns one summary dict per swept value.
    fn sweep<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let scenario = self.inner.clone();
        let result = py.detach(move || experiment::run_sweep(&scenario)).map_err(runtime_error)?;
        result.rows.iter().map(|r| row_dict(py, r)).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario(name={:?}, engine={}, domains={}, runs={}, horizon={})",
            self.inner.name, self.inner.engine, self.inner.topology.domains, self.inner.runs, self.inner.horizon
        )
    }
}

/// The per-arrival recurrence over server loads.
#[pyclass(name = "ModelState", module = "pyviewsim")]
struct ModelState {
    inner: CoreModel,
}

#[pymethods]
impl ModelState {
    #[new]
    fn new(servers: usize) -> PyResult<Self> {
        if servers == 0 {
            return Err(PyValueError::new_err("need at least one server"));
        }
        Ok(Self {
            inner: CoreModel::new(servers),
        })
    }

    #[getter]
    fn loads(&self) -> Vec<f64> {
        self.inner.loads.clone()
    }

    #[getter]
    fn total(&self) -> f64 {
        self.inner.total
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta
    }

    #[getter]
    fn mean(&self) -> f64 {
        self.inner.mean
    }

    #[getter]
    fn index(&self) -> u64 {
        self.inner.index
    }

    fn xi(&self) -> f64 {
        self.inner.xi()
    }

    fn sigma(&self) -> f64 {
        self.inner.sigma()
    }

    /// Two-server step; returns `(server, decision, xi)`.
    #[pyo3(signature = (expired, increment=1.0, decision=None))]
    fn step_xi(&mut self, expired: [f64; 2], increment: f64, decision: Option<[f64; 2]>) -> PyResult<(usize, f64, f64)> {
        if self.inner.servers() != 2 {
            return Err(PyValueError::new_err("step_xi needs two servers"));
        }
        self.check_expired(&expired)?;
        let s = self.inner.step_xi(expired, increment, decision);
        Ok((s.server, s.decision, s.xi))
    }

    /// N-server step; returns `(server, sigma)`.
    #[pyo3(signature = (expired, increment=1.0, decision=None))]
    fn step_sigma(&mut self, expired: Vec<f64>, increment: f64, decision: Option<Vec<f64>>) -> PyResult<(usize, f64)> {
        self.check_expired(&expired)?;
        if decision.as_ref().is_some_and(|d| d.len() != self.inner.servers()) {
            return Err(PyValueError::new_err("decision must have one value per server"));
        }
        let s = self.inner.step_sigma(&expired, increment, decision.as_deref());
        Ok((s.server, s.sigma))
    }
}

impl ModelState {
    fn check_expired(&self, expired: &[f64]) -> PyResult<()> {
        if expired.len() != self.inner.servers() {
            return Err(PyValueError::new_err("expired must have one value per server"));
        }
        if expired.iter().zip(&self.inner.loads).any(|(e, l)| *e < 0.0 || e > l) {
            return Err(PyValueError::new_err("expired counts must lie between 0 and the current load"));
        }
        Ok(())
    }
}

/// Relative difference of two loads.
#[pyfunction]
fn xi(a: f64, b: f64) -> f64 {
    metrics::xi(a, b)
}

/// Population standard deviation of server loads.
#[pyfunction]
fn sigma(loads: Vec<f64>) -> PyResult<f64> {
    if loads.is_empty() {
        return Err(PyValueError::new_err("loads must not be empty"));
    }
    Ok(metrics::sigma(&loads))
}

/// `(on_packets, off_seconds)` scales of the On/Off generator.
#[pyfunction]
fn pareto_scales(shape: f64, burst: f64, idle: f64, packet_rate: f64) -> (f64, f64) {
    let s = traffic::pareto_scales(shape, burst, idle, packet_rate);
    (s.on_packets, s.off_seconds)
}

#[pyfunction]
fn bundled_scenarios() -> Vec<&'static str> {
    bundled::names().collect()
}

#[pymodule]
fn pyviewsim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Scenario>()?;
    m.add_class::<ModelState>()?;
    m.add_function(wrap_pyfunction!(xi, m)?)?;
    m.add_function(wrap_pyfunction!(sigma, m)?)?;
    m.add_function(wrap_pyfunction!(pareto_scales, m)?)?;
    m.add_function(wrap_pyfunction!(bundled_scenarios, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn module_functions_from_python() {
        Python::initialize();
        Python::attach(|py| {
            let m = PyModule::new(py, "pyviewsim").unwrap();
            pyviewsim(&m).unwrap();
            let x: f64 = m.getattr("xi").unwrap().call1((3.0, 1.0)).unwrap().extract().unwrap();
            assert_eq!(x, 0.5);
            let s: f64 = m.getattr("sigma").unwrap().call1((vec![0.0, 2.0],)).unwrap().extract().unwrap();
            assert_eq!(s, 1.0);
            assert!(m.getattr("sigma").unwrap().call1((Vec::<f64>::new(),)).is_err());
        });
    }

    #[test]
    fn scenario_round_trip() {
        Python::initialize();
        Python::attach(|py| {
            let mut s = Scenario::bundled("fig5-LV-DP").unwrap();
            s.set_runs(1).unwrap();
            s.set_horizon(10.0).unwrap();
            let rows = s.sweep(py).unwrap();
            assert_eq!(rows.len(), 6);
            let out = s.run(py).unwrap();
            let times: Vec<f64> = out.get_item("time").unwrap().unwrap().extract().unwrap();
            assert_eq!(times, vec![2.0, 4.0, 6.0, 8.0, 10.0]);
            assert!(Scenario::bundled("missing").is_err());
            assert!(s.set_runs(0).is_err());
        });
    }

    #[test]
    fn model_steps_validate_input() {
        let mut m = ModelState::new(2).unwrap();
        assert_eq!(m.step_xi([0.0, 0.0], 1.0, None).unwrap().0, 0);
        assert!(m.step_xi([2.0, 0.0], 1.0, None).is_err());
        assert!(m.step_sigma(vec![0.0], 1.0, None).is_err());
        let (server, sigma) = m.step_sigma(vec![0.0, 0.0], 1.0, None).unwrap();
        assert_eq!(server, 1);
        assert_eq!(sigma, 0.0);
    }
}
