//! Python bindings for poleflow.

use num_complex::Complex64 as C;
use poleflow_core::analytic::{self, BoundaryInteraction, RefractionOutcome, SelfSimilarSpec};
use poleflow_core::invariants::{self, Quantity};
use poleflow_core::scenario::{self, Scenario};
use poleflow_core::verify::{self, BoundaryGrid};
use poleflow_core::{output, seabed};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyString};
use serde::de::DeserializeOwned;
use serde::Serialize;

fn err(e: poleflow_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Parses a dict (via JSON) or a JSON/TOML string into `T`.
fn from_py<T: DeserializeOwned>(value: &Bound<'_, PyAny>) -> PyResult<T> {
    if let Ok(text) = value.cast::<PyString>() {
        let text = text.to_str()?;
        return match serde_json::from_str(text) {
            Ok(v) => Ok(v),
            Err(json) => toml::from_str(text)
                .map_err(|t| PyValueError::new_err(format!("not JSON ({json}) or TOML ({t})"))),
        };
    }
    let json = value.py().import("json")?;
    let text: String = json.call_method1("dumps", (value,))?.extract()?;
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A point pole with a label, a position and a strength per degree.
#[pyclass(name = "Pole", module = "poleflow", skip_from_py_object)]
#[derive(Clone)]
struct PyPole(poleflow_core::Pole);

#[pymethods]
impl PyPole {
    /// `mu` gives a simple pole; `strengths` maps degree to coefficient.
    #[new]
    #[pyo3(signature = (label, position, mu=None, strengths=None))]
    fn new(
        label: String,
        position: C,
        mu: Option<C>,
        strengths: Option<Vec<(i32, C)>>,
    ) -> PyResult<Self> {
        let mut spec = poleflow_core::StrengthSpec::new();
        if let Some(mu) = mu {
            spec.set(-1, mu);
        }
        for (n, m) in strengths.unwrap_or_default() {
            spec.set(n, m);
        }
        if spec.is_empty() {
            return Err(PyValueError::new_err("a pole needs mu or strengths"));
        }
        Ok(Self(poleflow_core::Pole::new(label, position, spec)))
    }

    #[getter]
    fn label(&self) -> &str {
        &self.0.label
    }

    #[getter]
    fn position(&self) -> C {
        self.0.position
    }

    #[setter]
    fn set_position(&mut self, z: C) {
        self.0.position = z;
    }

    /// `(degree, coefficient)` pairs.
    #[getter]
    fn strengths(&self) -> Vec<(i32, C)> {
        self.0.strength.iter().collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Pole({:?}, {}, {:?})",
            self.0.label,
            self.0.position,
            self.strengths()
        )
    }
}

/// Seabed function `S(z)`.
#[pyclass(name = "Seabed", module = "poleflow", skip_from_py_object)]
#[derive(Clone)]
struct PySeabed(poleflow_core::Seabed);

#[pymethods]
impl PySeabed {
    /// Builds a seabed from a dict or a JSON/TOML string, e.g.
    /// `{"kind": "radial-step", "radius": 1, "inside": 0.5, "outside": 1}`.
    #[new]
    fn new(spec: &Bound<'_, PyAny>) -> PyResult<Self> {
        let s: poleflow_core::Seabed = from_py(spec)?;
        s.validate().map_err(err)?;
        Ok(Self(s))
    }

    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        seabed::preset(name)
            .map(Self)
            .ok_or_else(|| PyValueError::new_err(format!("unknown seabed preset {name:?}")))
    }

    #[staticmethod]
    fn constant(value: f64) -> Self {
        Self(poleflow_core::Seabed::constant(value))
    }

    fn __call__(&self, z: C) -> f64 {
        self.0.eval(z)
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0)
    }

    fn __repr__(&self) -> String {
        format!("Seabed({:?})", self.0)
    }
}

/// Sampled positions and events of a run.
#[pyclass(name = "Trajectory", module = "poleflow")]
struct PyTrajectory(poleflow_core::Trajectory);

#[pymethods]
impl PyTrajectory {
    #[getter]
    fn labels(&self) -> Vec<String> {
        self.0.labels.clone()
    }

    #[getter]
    fn times(&self) -> Vec<f64> {
        self.0.samples.iter().map(|s| s.time).collect()
    }

    /// One list of positions per sample.
    #[getter]
    fn positions(&self) -> Vec<Vec<C>> {
        self.0.samples.iter().map(|s| s.positions.clone()).collect()
    }

    /// Events as dicts with keys `kind`, `t`, `pole`, `x`, `y`.
    #[getter]
    fn events<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.0
            .events
            .iter()
            .map(|e| {
                let d = PyDict::new(py);
                d.set_item("kind", e.kind.as_str())?;
                d.set_item("t", e.time)?;
                d.set_item("pole", e.pole.clone())?;
                d.set_item("x", e.location.re)?;
                d.set_item("y", e.location.im)?;
                Ok(d)
            })
            .collect()
    }

    /// Whether a collision, trap or failure ended the run early.
    fn ended_early(&self) -> bool {
        self.0.ended_early()
    }

    fn to_csv(&self) -> String {
        output::trajectory_csv(&self.0)
    }

    fn events_json(&self) -> String {
        output::events_json(&self.0.events)
    }

    fn __len__(&self) -> usize {
        self.0.samples.len()
    }
}

fn poles_of(poles: &[PyRef<'_, PyPole>]) -> Vec<poleflow_core::Pole> {
    poles.iter().map(|p| p.0.clone()).collect()
}

/// Integrates the poles over the seabed from `t = 0` to `t_end`.
///
/// `config` holds further integrator settings as a dict.
#[pyfunction]
#[pyo3(signature = (poles, seabed, t_end=1.0, sample_interval=None, config=None))]
fn integrate(
    py: Python<'_>,
    poles: Vec<PyRef<'_, PyPole>>,
    seabed: PyRef<'_, PySeabed>,
    t_end: f64,
    sample_interval: Option<f64>,
    config: Option<&Bound<'_, PyAny>>,
) -> PyResult<PyTrajectory> {
    let mut cfg: poleflow_core::IntegratorConfig = match config {
        Some(c) => from_py(c)?,
        None => Default::default(),
    };
    cfg.t_end = t_end;
    if let Some(dt) = sample_interval {
        cfg.sample_interval = dt;
    }
    let poles = poles_of(&poles);
    let seabed = seabed.0.clone();
    py.detach(|| {
        poleflow_core::integrate(
            &poleflow_core::SystemState::from_poles(&poles),
            &poles,
            &seabed,
            &cfg,
        )
    })
    .map(PyTrajectory)
    .map_err(err)
}

/// Drift of a conserved quantity along a trajectory.
///
/// `quantity` is a name such as `"noether-momentum"` or a dict like
/// `{"kind": "pair-distance", "first": 0, "second": 1}`.
#[pyfunction]
fn drift_report<'py>(
    py: Python<'py>,
    trajectory: PyRef<'_, PyTrajectory>,
    poles: Vec<PyRef<'_, PyPole>>,
    seabed: PyRef<'_, PySeabed>,
    quantity: &Bound<'py, PyAny>,
) -> PyResult<Bound<'py, PyAny>> {
    let q: Quantity = match quantity.cast::<PyString>() {
        Ok(name) => serde_json::from_value(serde_json::json!({ "kind": name.to_str()? }))
            .map_err(|e| PyValueError::new_err(e.to_string()))?,
        Err(_) => from_py(quantity)?,
    };
    let report =
        invariants::drift_report(&trajectory.0, &poles_of(&poles), &seabed.0, &q).map_err(err)?;
    to_py(py, &report)
}

fn outcome(o: RefractionOutcome) -> (&'static str, Option<f64>) {
    let kind = match o {
        RefractionOutcome::Refracted { .. } => "refracted",
        RefractionOutcome::Reflected { .. } => "reflected",
        RefractionOutcome::Skid => "skid",
        RefractionOutcome::Trapped => "trapped",
        RefractionOutcome::Separated => "separated",
    };
    (kind, o.angle())
}

/// Outcome of a pair meeting a step `s1 | s2`: `(kind, theta2)`.
#[pyfunction]
#[pyo3(signature = (theta1, s1, s2, mu=C::new(0.0, 1.0)))]
fn snell(theta1: f64, s1: f64, s2: f64, mu: C) -> PyResult<(&'static str, Option<f64>)> {
    let i = BoundaryInteraction { theta1, s1, s2, mu };
    analytic::snell(&i).map(outcome).map_err(err)
}

/// Outcome of a pair meeting a mirror (`-s1` below, `s2` above): `(kind, theta2)`.
#[pyfunction]
#[pyo3(signature = (theta1, s1=1.0, s2=1.0, mu=C::new(0.0, 1.0)))]
fn reflect(theta1: f64, s1: f64, s2: f64, mu: C) -> PyResult<(&'static str, Option<f64>)> {
    let i = BoundaryInteraction { theta1, s1, s2, mu };
    analytic::reflect(&i).map(outcome).map_err(err)
}

#[pyfunction]
fn critical_angle(s1: f64, s2: f64) -> Option<f64> {
    analytic::critical_angle(s1, s2)
}

#[pyfunction]
fn leapfrog_advance(s1: f64, s2: f64, dz: C) -> PyResult<C> {
    analytic::leapfrog_advance(s1, s2, dz).map_err(err)
}

#[pyfunction]
fn rainbow_angle(r: f64, d: f64) -> PyResult<f64> {
    analytic::rainbow_angle(r, d).map_err(err)
}

/// Collapse time of `dz/dt = m / conj(z)` from `z0`, or None if it expands.
#[pyfunction]
fn collapse_time(z0: C, m: C) -> PyResult<Option<f64>> {
    Ok(SelfSimilarSpec::new(z0, m).map_err(err)?.collapse_time())
}

/// Position at time `t` of the self-similar solution of `dz/dt = m / conj(z)`.
#[pyfunction]
fn self_similar(z0: C, m: C, t: f64) -> PyResult<C> {
    analytic::self_similar(&SelfSimilarSpec::new(z0, m).map_err(err)?, t).map_err(err)
}

/// Names of the bundled scenarios.
#[pyfunction]
fn presets() -> Vec<&'static str> {
    scenario::preset_names().collect()
}

type MemberResult<'py> = (String, Option<PyTrajectory>, Bound<'py, PyAny>);

/// Runs a bundled scenario by name, or a scenario given as TOML text.
///
/// Returns `(label, trajectory, drift)` per member; a member whose
/// integration failed has `trajectory` None and the error in `drift`.
#[pyfunction]
fn run_scenario<'py>(py: Python<'py>, source: &str) -> PyResult<Vec<MemberResult<'py>>> {
    let sc = match Scenario::preset(source) {
        Ok(sc) => sc,
        Err(_) => Scenario::from_toml(source).map_err(err)?,
    };
    let runs = py.detach(|| sc.run()).map_err(err)?;
    runs.into_iter()
        .map(|run| {
            let label = run.member.label;
            match run.trajectory {
                Ok(t) => {
                    let drift: Vec<_> = run.drift.into_iter().filter_map(|d| d.ok()).collect();
                    Ok((label, Some(PyTrajectory(t)), to_py(py, &drift)?))
                }
                Err(e) => Ok((label, None, e.to_string().into_pyobject(py)?.into_any())),
            }
        })
        .collect()
}

/// Compares the Snell (or, with `mirror`, reflection) law with simulation
/// over a grid; returns one dict per grid point.
#[pyfunction]
#[pyo3(signature = (theta1_deg, s1, s2, mu=C::new(0.0, 1.0), mirror=false, separation=0.05, tol=1e-3))]
#[allow(clippy::too_many_arguments)]
fn verify_boundary<'py>(
    py: Python<'py>,
    theta1_deg: Vec<f64>,
    s1: Vec<f64>,
    s2: Vec<f64>,
    mu: C,
    mirror: bool,
    separation: f64,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let grid = BoundaryGrid {
        theta1_deg,
        s1,
        s2,
        mu,
        separation,
    };
    let cfg = poleflow_core::IntegratorConfig::default();
    let rows = py.detach(|| verify::verify_boundary(&grid, mirror, tol, &cfg));
    to_py(py, &rows)
}

#[pymodule]
fn poleflow(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPole>()?;
    m.add_class::<PySeabed>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    m.add_function(wrap_pyfunction!(drift_report, m)?)?;
    m.add_function(wrap_pyfunction!(snell, m)?)?;
    m.add_function(wrap_pyfunction!(reflect, m)?)?;
    m.add_function(wrap_pyfunction!(critical_angle, m)?)?;
    m.add_function(wrap_pyfunction!(leapfrog_advance, m)?)?;
    m.add_function(wrap_pyfunction!(rainbow_angle, m)?)?;
    m.add_function(wrap_pyfunction!(collapse_time, m)?)?;
    m.add_function(wrap_pyfunction!(self_similar, m)?)?;
    m.add_function(wrap_pyfunction!(presets, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(verify_boundary, m)?)?;
    Ok(())
}
