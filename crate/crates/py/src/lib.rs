//! Python bindings. Parameters are passed as dicts (missing keys take the
//! defaults); results come back as plain dicts and lists.

use dabkit::geometry::{geometry_at, DEFAULT_REPRESENTATIVE_ANGLE};
use dabkit::optsolve::{
    power_limits as core_power_limits, solve_operating_point_with, summarize_sweep, sweep_power_with, OperatingPoint,
    SolverOptions,
};
use dabkit::simulate::{
    simulate as core_simulate, state_from_envelope, steady_metrics, validate_point, validation_options, SimOptions,
};
use dabkit::stability::{eigen_report, zero_dynamics_verdicts, LoadMode};
use dabkit::zvs::{zvs_check as core_zvs_check, zvs_map};
use dabkit::{Complex64, ConverterParams, DabError};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

create_exception!(dabkit, DabkitError, PyException, "Numerical failure inside the toolkit.");

/// Input problems become `ValueError`; numerical failures `DabkitError`.
pub fn to_py_err(e: DabError) -> PyErr {
    match e {
        DabError::Config(_) | DabError::InvalidParameter { .. } | DabError::Domain { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => DabkitError::new_err(e.to_string()),
    }
}

pub fn params_arg(params: Option<&Bound<'_, PyAny>>) -> PyResult<ConverterParams> {
    let p = match params {
        None => ConverterParams::table_one(),
        Some(obj) if obj.is_none() => ConverterParams::table_one(),
        Some(obj) => pythonize::depythonize(obj).map_err(|e| PyValueError::new_err(format!("params: {e}")))?,
    };
    p.validate().map_err(to_py_err)?;
    Ok(p)
}

fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<PyObject> {
    Ok(pythonize::pythonize(py, value)?.unbind())
}

fn solver(seed: Option<u64>) -> SolverOptions {
    let mut o = SolverOptions::default();
    if let Some(s) = seed {
        o.seed = s;
    }
    o
}

fn mode_arg(mode: &str) -> PyResult<LoadMode> {
    mode.parse().map_err(to_py_err)
}

fn solve(p_target: f64, p: &ConverterParams, seed: Option<u64>) -> PyResult<OperatingPoint> {
    solve_operating_point_with(p_target, p, None, &solver(seed)).map_err(to_py_err)
}

/// Default converter parameters as a dict.
#[pyfunction]
fn default_params(py: Python<'_>) -> PyResult<PyObject> {
    to_py(py, &ConverterParams::table_one())
}

/// Parameters from a TOML file.
#[pyfunction]
fn load_params(py: Python<'_>, path: &str) -> PyResult<PyObject> {
    to_py(py, &ConverterParams::load(path).map_err(to_py_err)?)
}

/// Loss-minimizing operating point for an output power [W].
#[pyfunction]
#[pyo3(signature = (p_target, params=None, seed=None))]
fn solve_operating_point(
    py: Python<'_>,
    p_target: f64,
    params: Option<&Bound<'_, PyAny>>,
    seed: Option<u64>,
) -> PyResult<PyObject> {
    let p = params_arg(params)?;
    let op = solve(p_target, &p, seed)?;
    let d = to_py(py, &op)?;
    d.bind(py).downcast::<PyDict>()?.set_item("delta", op.delta())?;
    Ok(d)
}

/// Warm-started sweep; returns `{"rows": [...], "summary": {...}}`.
#[pyfunction]
#[pyo3(signature = (p_min=-1000.0, p_max=1000.0, steps=41, params=None, seed=None))]
fn sweep(
    py: Python<'_>,
    p_min: f64,
    p_max: f64,
    steps: usize,
    params: Option<&Bound<'_, PyAny>>,
    seed: Option<u64>,
) -> PyResult<PyObject> {
    let p = params_arg(params)?;
    let table = sweep_power_with(p_min, p_max, steps, &p, &solver(seed)).map_err(to_py_err)?;
    let out = PyDict::new(py);
    out.set_item("rows", to_py(py, &table.rows)?)?;
    out.set_item("summary", to_py(py, &summarize_sweep(&table))?)?;
    Ok(out.into_any().unbind())
}

/// ZVS report of one operating point.
#[pyfunction]
#[pyo3(signature = (p_target, params=None))]
fn zvs_check(py: Python<'_>, p_target: f64, params: Option<&Bound<'_, PyAny>>) -> PyResult<PyObject> {
    let p = params_arg(params)?;
    to_py(py, &core_zvs_check(&solve(p_target, &p, None)?, &p))
}

/// ZVS reports over a sweep.
#[pyfunction]
#[pyo3(signature = (p_min=-1000.0, p_max=1000.0, steps=41, params=None))]
fn zvs_sweep(
    py: Python<'_>,
    p_min: f64,
    p_max: f64,
    steps: usize,
    params: Option<&Bound<'_, PyAny>>,
) -> PyResult<PyObject> {
    let p = params_arg(params)?;
    let table = sweep_power_with(p_min, p_max, steps, &p, &SolverOptions::default()).map_err(to_py_err)?;
    to_py(py, &zvs_map(&table, &p).reports)
}

/// Envelope-model eigenvalues (as Python complex numbers) and stability.
#[pyfunction]
#[pyo3(signature = (p_w, mode="cv", params=None))]
fn eigenvalues(
    py: Python<'_>,
    p_w: f64,
    mode: &str,
    params: Option<&Bound<'_, PyAny>>,
) -> PyResult<(Vec<Complex64>, bool)> {
    let p = params_arg(params)?;
    let op = solve(p_w, &p, None)?;
    let r = py.allow_threads(|| eigen_report(&op, mode_arg(mode)?, &p).map_err(to_py_err))?;
    Ok((r.spectrum.eigenvalues().to_vec(), r.stable))
}

/// Real and complex Hurwitz verdicts of the transformer zero dynamics.
#[pyfunction]
#[pyo3(signature = (params=None))]
fn zero_dynamics(py: Python<'_>, params: Option<&Bound<'_, PyAny>>) -> PyResult<PyObject> {
    let p = params_arg(params)?;
    let (real, complex) = zero_dynamics_verdicts(&p).map_err(to_py_err)?;
    let out = PyDict::new(py);
    out.set_item("real", to_py(py, &real)?)?;
    out.set_item("complex", to_py(py, &complex)?)?;
    Ok(out.into_any().unbind())
}

/// Controllability, observability and relative degree at a solved point.
#[pyfunction]
#[pyo3(signature = (p_w, theta=DEFAULT_REPRESENTATIVE_ANGLE, params=None))]
fn geometry(py: Python<'_>, p_w: f64, theta: f64, params: Option<&Bound<'_, PyAny>>) -> PyResult<PyObject> {
    let p = params_arg(params)?;
    let op = solve(p_w, &p, None)?;
    to_py(py, &geometry_at(&op, &p, theta).map_err(to_py_err)?)
}

/// Switched simulation with the optimal controls; returns time, state
/// columns, switching functions and cycle metrics.
#[pyfunction]
#[pyo3(signature = (p_w, mode="cv", cycles=200, steps_per_cycle=1000, record_cycles=2, params=None))]
fn simulate(
    py: Python<'_>,
    p_w: f64,
    mode: &str,
    cycles: usize,
    steps_per_cycle: usize,
    record_cycles: usize,
    params: Option<&Bound<'_, PyAny>>,
) -> PyResult<PyObject> {
    let p = params_arg(params)?;
    let op = solve(p_w, &p, None)?;
    let load = mode_arg(mode)?.load(&op);
    let opts =
        SimOptions { max_cycles: cycles, steps_per_cycle, settle_tol: 0.0, record_last: Some(record_cycles.max(1)) };
    let wf = py
        .allow_threads(|| core_simulate(&op.control, &load, &p, &state_from_envelope(&op), &opts))
        .map_err(|f| to_py_err(f.error))?;
    let out = PyDict::new(py);
    out.set_item("t", &wf.t)?;
    for (k, name) in ["Id", "Vc1", "I1", "I2", "Vc2"].iter().enumerate() {
        out.set_item(*name, wf.states.iter().map(|x| x.to_array()[k]).collect::<Vec<_>>())?;
    }
    out.set_item("s1", &wf.s1)?;
    out.set_item("s2", &wf.s2)?;
    out.set_item("metrics", to_py(py, &steady_metrics(&wf, &p))?)?;
    Ok(out.into_any().unbind())
}

/// Envelope-vs-switched comparison at one power.
#[pyfunction]
#[pyo3(signature = (p_w, params=None, max_cycles=5000))]
fn validate(py: Python<'_>, p_w: f64, params: Option<&Bound<'_, PyAny>>, max_cycles: usize) -> PyResult<PyObject> {
    let p = params_arg(params)?;
    let op = solve(p_w, &p, None)?;
    let opts = SimOptions { max_cycles, ..validation_options() };
    let c = py.allow_threads(|| validate_point(&op, &p, &opts)).map_err(to_py_err)?;
    let d = to_py(py, &c)?;
    d.bind(py).downcast::<PyDict>()?.set_item("within_budget", c.within_budget())?;
    Ok(d)
}

/// Largest transferable output power `(forward, backward)` [W].
#[pyfunction]
#[pyo3(signature = (params=None))]
fn power_limits(params: Option<&Bound<'_, PyAny>>) -> PyResult<(f64, f64)> {
    let l = core_power_limits(&params_arg(params)?).map_err(to_py_err)?;
    Ok((l.forward, l.backward))
}

#[pymodule]
#[pyo3(name = "dabkit")]
pub fn dabkit_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DabkitError", m.py().get_type::<DabkitError>())?;
    m.add_function(wrap_pyfunction!(default_params, m)?)?;
    m.add_function(wrap_pyfunction!(load_params, m)?)?;
    m.add_function(wrap_pyfunction!(solve_operating_point, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(zvs_check, m)?)?;
    m.add_function(wrap_pyfunction!(zvs_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(zero_dynamics, m)?)?;
    m.add_function(wrap_pyfunction!(geometry, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(power_limits, m)?)?;
    Ok(())
}
