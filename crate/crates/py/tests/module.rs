use dabkit::Complex64;
use dabkit_py::dabkit_module;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyModule};

fn with_module<F: FnOnce(Python<'_>, &Bound<'_, PyModule>)>(f: F) {
    Python::with_gil(|py| {
        let m = PyModule::new(py, "dabkit").unwrap();
        dabkit_module(&m).unwrap();
        f(py, &m);
    });
}

#[test]
fn solve_and_sweep_from_python() {
    with_module(|py, m| {
        let op = m.getattr("solve_operating_point").unwrap().call1((500.0,)).unwrap();
        let delta: f64 = op.get_item("delta").unwrap().extract().unwrap();
        assert!(delta > 0.0);
        let conv: bool = op.get_item("converged").unwrap().extract().unwrap();
        assert!(conv);

        let kwargs = PyDict::new(py);
        kwargs.set_item("steps", 5).unwrap();
        let s = m.getattr("sweep").unwrap().call((), Some(&kwargs)).unwrap();
        let rows = s.get_item("rows").unwrap();
        assert_eq!(rows.len().unwrap(), 5);
        let changes = s.get_item("summary").unwrap().get_item("delta_sign_changes").unwrap();
        assert_eq!(changes.len().unwrap(), 1);
    });
}

#[test]
fn eigenvalues_and_verdicts() {
    with_module(|_py, m| {
        let (eigs, stable): (Vec<Complex64>, bool) =
            m.getattr("eigenvalues").unwrap().call1((1000.0, "cpl")).unwrap().extract().unwrap();
        assert_eq!(eigs.len(), 7);
        assert!(!stable);
        let zd = m.getattr("zero_dynamics").unwrap().call0().unwrap();
        let ok: bool = zd.get_item("complex").unwrap().get_item("stable").unwrap().extract().unwrap();
        assert!(ok);
        assert!(m.getattr("eigenvalues").unwrap().call1((300.0, "bogus")).is_err());
    });
}

#[test]
fn params_dict_round_trips() {
    with_module(|py, m| {
        let d = m.getattr("default_params").unwrap().call0().unwrap();
        d.set_item("fs", 50e3).unwrap();
        let (fwd, back): (f64, f64) = m.getattr("power_limits").unwrap().call1((d,)).unwrap().extract().unwrap();
        let (fwd0, _): (f64, f64) = m.getattr("power_limits").unwrap().call0().unwrap().extract().unwrap();
        assert!(fwd < fwd0 && back < 0.0);
        let err = m.getattr("solve_operating_point").unwrap().call1((5000.0,)).unwrap_err();
        assert!(err.is_instance(py, &m.getattr("DabkitError").unwrap().downcast_into().unwrap()));
    });
}
