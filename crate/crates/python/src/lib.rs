//! Python bindings: `import nonherm`.

use nonherm_core::check::{run_checks, Faults};
use nonherm_core::model::hamiltonian_at;
use nonherm_core::output::OutputTable;
use nonherm_core::scenarios::{builtin, builtins};
use nonherm_core::spectral;
use nonherm_core::{ComplexPair, Error};
use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    if e.is_config() {
        PyValueError::new_err(e.to_string())
    } else {
        PyArithmeticError::new_err(e.to_string())
    }
}

/// `H(w, z)` as a nested list of complex numbers.
#[pyfunction]
fn hamiltonian(w: Complex64, z: Complex64) -> Vec<Vec<Complex64>> {
    hamiltonian_at(ComplexPair::new(w, z)).iter().map(|row| row.to_vec()).collect()
}

/// Root `v = z sqrt(1 + |w|²/z²)` on the principal sheet.
#[pyfunction]
fn sheet_sqrt(w: Complex64, z: Complex64) -> PyResult<Complex64> {
    spectral::sheet_sqrt(w, z).map_err(to_py)
}

/// Eigenvalues and biorthogonal eigenvectors at `(w, z)`, normalized as if
/// `(w, z)` were the start of a path.
#[pyfunction]
fn eigenframe<'py>(py: Python<'py>, w: Complex64, z: Complex64) -> PyResult<Bound<'py, PyDict>> {
    let p = ComplexPair::new(w, z);
    let f = spectral::eigenframe(p, p).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("E", f.e.to_vec())?;
    d.set_item("r", f.r.iter().map(|v| v.to_vec()).collect::<Vec<_>>())?;
    d.set_item("l", f.l.iter().map(|v| v.to_vec()).collect::<Vec<_>>())?;
    d.set_item("v", f.v)?;
    Ok(d)
}

/// `|E2 − E1|`, which vanishes at an exceptional point.
#[pyfunction]
fn ep_distance(w: Complex64, z: Complex64) -> PyResult<f64> {
    Ok(2.0 * sheet_sqrt(w, z)?.norm())
}

/// `[(name, description)]` of the builtin scenarios.
#[pyfunction]
fn list_scenarios() -> Vec<(String, String)> {
    builtins().into_iter().map(|c| (c.name, c.description)).collect()
}

/// Runs a builtin scenario and returns `{column: [values]}` plus the
/// artifact flags and, for closed loops, the flip outcome.
#[pyfunction]
#[pyo3(signature = (name, steps=None))]
fn run_scenario<'py>(py: Python<'py>, name: &str, steps: Option<usize>) -> PyResult<Bound<'py, PyDict>> {
    let mut cfg = builtin(name).ok_or_else(|| PyValueError::new_err(format!("unknown scenario '{name}'")))?;
    if let Some(n) = steps {
        cfg.steps = n;
    }
    let run = nonherm_core::scenarios::run_scenario(&cfg).map_err(to_py)?;
    let table = OutputTable::from_run(&run);
    let d = PyDict::new(py);
    for col in &table.header {
        d.set_item(col, table.column(col).unwrap_or_default())?;
    }
    d.set_item("flags", run.artifacts.flags())?;
    d.set_item("flip", run.flip.map(|f| f.as_str()))?;
    Ok(d)
}

/// Runs the invariant suite: `[(name, passed, detail)]`.
#[pyfunction]
#[pyo3(signature = (filter=None))]
fn check(filter: Option<&str>) -> Vec<(String, bool, String)> {
    run_checks(filter, &Faults::default())
        .into_iter()
        .map(|r| (r.name.to_string(), r.passed, r.detail))
        .collect()
}

#[pymodule]
fn nonherm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(hamiltonian, m)?)?;
    m.add_function(wrap_pyfunction!(sheet_sqrt, m)?)?;
    m.add_function(wrap_pyfunction!(eigenframe, m)?)?;
    m.add_function(wrap_pyfunction!(ep_distance, m)?)?;
    m.add_function(wrap_pyfunction!(list_scenarios, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    Ok(())
}
