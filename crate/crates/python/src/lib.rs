//! Python bindings. Labels are passed as text (`"s,s2"`, `"[2,1,3],e"`)
//! together with their grade `m`; subsystem indices are zero-based.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use luinv_core::closedform;
use luinv_core::contract::{self, Kind};
use luinv_core::formula::Formula;
use luinv_core::invgraph;
use luinv_core::perm::{self, PermTuple};
use luinv_core::states::{self, io, CMatrix, Dims, SubsystemSet};
use luinv_core::verify;

fn err(e: luinv_core::Error) -> PyErr {
    if e.is_resource() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn label(text: &str, m: usize) -> PyResult<PermTuple> {
    PermTuple::parse(text, m).map_err(err)
}

fn kind(text: &str) -> PyResult<Kind> {
    text.parse().map_err(err)
}

fn dims(v: Vec<usize>) -> PyResult<Dims> {
    Dims::new(v).map_err(err)
}

#[pyclass(module = "luinv", frozen)]
struct PureState(states::PureState);

#[pymethods]
impl PureState {
    /// Amplitudes in row-major order of `dims`, first subsystem slowest.
    #[new]
    fn new(dims_: Vec<usize>, amplitudes: Vec<Complex64>) -> PyResult<Self> {
        Ok(PureState(states::PureState::new(dims(dims_)?, amplitudes).map_err(err)?))
    }

    /// Standard complex Gaussian amplitudes.
    #[staticmethod]
    fn random(dims_: Vec<usize>, seed: u64) -> PyResult<Self> {
        Ok(PureState(states::random_pure(&dims(dims_)?, seed)))
    }

    /// `Σ_i |i,…,i⟩` on `k` subsystems of dimension `n`, unnormalized.
    #[staticmethod]
    fn ghz(k: usize, n: usize) -> PyResult<Self> {
        Ok(PureState(states::ghz(k, n).map_err(err)?))
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.0.dims().as_slice().to_vec()
    }

    #[getter]
    fn amplitudes(&self) -> Vec<Complex64> {
        self.0.amplitudes().to_vec()
    }

    fn norm_sqr(&self) -> f64 {
        self.0.norm_sqr()
    }

    fn projector(&self) -> DensityMatrix {
        DensityMatrix(self.0.projector())
    }

    /// Same state after independent Haar-random unitaries on each factor.
    fn rotated(&self, seed: u64) -> PyResult<Self> {
        let us = states::random_local_unitaries(self.0.dims(), seed);
        Ok(PureState(self.0.apply_local_unitaries(&us).map_err(err)?))
    }

    fn to_json(&self) -> String {
        io::to_json(&io::State::Pure(self.0.clone()))
    }

    fn __repr__(&self) -> String {
        format!("PureState(dims={:?})", self.0.dims().as_slice())
    }
}

#[pyclass(module = "luinv", frozen)]
struct DensityMatrix(states::DensityMatrix);

#[pymethods]
impl DensityMatrix {
    #[new]
    fn new(dims_: Vec<usize>, rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(PyValueError::new_err("rows must form a square matrix"));
        }
        let flat: Vec<Complex64> = rows.into_iter().flatten().collect();
        let mat = CMatrix::from_row_slice(n, n, &flat);
        Ok(DensityMatrix(states::DensityMatrix::new(dims(dims_)?, mat).map_err(err)?))
    }

    /// `A·A†` with a Gaussian `A` of the given rank (full rank by default).
    #[staticmethod]
    #[pyo3(signature = (dims_, seed, rank=None))]
    fn random(dims_: Vec<usize>, seed: u64, rank: Option<usize>) -> PyResult<Self> {
        let d = dims(dims_)?;
        let rank = rank.unwrap_or(d.total());
        Ok(DensityMatrix(states::random_density(&d, seed, rank).map_err(err)?))
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.0.dims().as_slice().to_vec()
    }

    fn rows(&self) -> Vec<Vec<Complex64>> {
        let m = self.0.matrix();
        (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
    }

    fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    fn partial_trace(&self, traced: Vec<usize>) -> PyResult<Self> {
        let set = SubsystemSet::new(traced, self.0.dims().k()).map_err(err)?;
        Ok(DensityMatrix(self.0.partial_trace(&set).map_err(err)?))
    }

    fn partial_transpose(&self, subsystems: Vec<usize>) -> PyResult<Self> {
        let set = SubsystemSet::new(subsystems, self.0.dims().k()).map_err(err)?;
        Ok(DensityMatrix(self.0.partial_transpose(&set).map_err(err)?))
    }

    /// Pure state with one extra subsystem whose reduction is this matrix.
    fn purify(&self) -> PyResult<PureState> {
        Ok(PureState(self.0.purify().map_err(err)?))
    }

    fn rotated(&self, seed: u64) -> PyResult<Self> {
        let us = states::random_local_unitaries(self.0.dims(), seed);
        Ok(DensityMatrix(self.0.conjugate_by_local_unitaries(&us).map_err(err)?))
    }

    fn to_json(&self) -> String {
        io::to_json(&io::State::Mixed(self.0.clone()))
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(dims={:?})", self.0.dims().as_slice())
    }
}

/// Parses a state file; returns a `PureState` or a `DensityMatrix`.
#[pyfunction]
fn load_state(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    Ok(match io::from_json(text).map_err(err)? {
        io::State::Pure(p) => Py::new(py, PureState(p))?.into_any(),
        io::State::Mixed(r) => Py::new(py, DensityMatrix(r))?.into_any(),
    })
}

/// Canonical labels of `S_m^r / S_m`.
#[pyfunction]
#[pyo3(signature = (m, r, generators_only=false))]
fn enumerate(m: usize, r: usize, generators_only: bool) -> PyResult<Vec<String>> {
    let labels = if generators_only {
        perm::generator_labels(m, r)
    } else {
        perm::enumerate_orbits(m, r)
    }
    .map_err(err)?;
    Ok(labels.iter().map(ToString::to_string).collect())
}

#[pyfunction]
fn canonical_form(text: &str, m: usize) -> PyResult<String> {
    Ok(perm::canonical_form(&label(text, m)?).map_err(err)?.to_string())
}

#[pyfunction]
fn is_transitive(text: &str, m: usize) -> PyResult<bool> {
    Ok(perm::is_transitive(&label(text, m)?))
}

/// The `≈`-classes making up the pure invariant of `text` (arity `k-1`).
#[pyfunction]
fn sim_decompose(text: &str, m: usize) -> PyResult<Vec<String>> {
    let sim = perm::sim_decompose(&label(text, m)?).map_err(err)?;
    Ok(sim.members.iter().map(ToString::to_string).collect())
}

/// Index-contraction value of a pure invariant.
#[pyfunction]
fn eval_pure(text: &str, m: usize, psi: &PureState) -> PyResult<Complex64> {
    contract::eval_pure(&label(text, m)?, &psi.0).map_err(err)
}

#[pyfunction]
fn eval_mixed(text: &str, m: usize, rho: &DensityMatrix) -> PyResult<Complex64> {
    contract::eval_mixed(&label(text, m)?, &rho.0).map_err(err)
}

/// Matrix-formula value for grades 1 to 3.
#[pyfunction]
fn closed_form_pure(text: &str, m: usize, psi: &PureState) -> PyResult<Complex64> {
    closedform::closed_form_pure(&label(text, m)?, &psi.0).map_err(err)
}

#[pyfunction]
fn closed_form_mixed(text: &str, m: usize, rho: &DensityMatrix) -> PyResult<Complex64> {
    closedform::closed_form_mixed(&label(text, m)?, &rho.0).map_err(err)
}

/// The closed form written out, e.g. `Tr(tr[2](rho)^2)`.
#[pyfunction]
#[pyo3(signature = (text, m, kind_="mixed"))]
fn formula(text: &str, m: usize, kind_: &str) -> PyResult<String> {
    let k = kind(kind_)?;
    let sigma = label(text, m)?;
    let full = match k {
        Kind::Pure => sigma.with_identity_appended(),
        Kind::Mixed => sigma,
    };
    Ok(closedform::descriptor(&full, k).map_err(err)?.to_string())
}

/// Evaluates a formula descriptor on a density matrix.
#[pyfunction]
fn eval_formula(text: &str, rho: &DensityMatrix) -> PyResult<Complex64> {
    Formula::parse(text).and_then(|f| f.eval(&rho.0)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (text, m, kind_="pure"))]
fn graph_dot(text: &str, m: usize, kind_: &str) -> PyResult<String> {
    let sigma = label(text, m)?;
    let full = match kind(kind_)? {
        Kind::Pure => sigma.with_identity_appended(),
        Kind::Mixed => sigma,
    };
    Ok(invgraph::dot_export(&invgraph::build_graph(&full), &[]))
}

/// A zero-based cyclic vertex ordering, or `None`.
#[pyfunction]
fn expressible_ordering(text: &str, m: usize) -> PyResult<Option<Vec<usize>>> {
    invgraph::expressible_ordering(&invgraph::build_graph(&label(text, m)?)).map_err(err)
}

/// Runs a verification suite and returns the JSON report array.
#[pyfunction]
#[pyo3(signature = (suite="default", seed=0))]
fn run_suite(suite: &str, seed: u64) -> PyResult<String> {
    let reports = verify::run_suite(suite, seed, None).map_err(err)?;
    serde_json::to_string(&reports).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pymodule]
fn luinv(module: &Bound<'_, PyModule>) -> PyResult<()> {
    module.add_class::<PureState>()?;
    module.add_class::<DensityMatrix>()?;
    module.add_function(wrap_pyfunction!(load_state, module)?)?;
    module.add_function(wrap_pyfunction!(enumerate, module)?)?;
    module.add_function(wrap_pyfunction!(canonical_form, module)?)?;
    module.add_function(wrap_pyfunction!(is_transitive, module)?)?;
    module.add_function(wrap_pyfunction!(sim_decompose, module)?)?;
    module.add_function(wrap_pyfunction!(eval_pure, module)?)?;
    module.add_function(wrap_pyfunction!(eval_mixed, module)?)?;
    module.add_function(wrap_pyfunction!(closed_form_pure, module)?)?;
    module.add_function(wrap_pyfunction!(closed_form_mixed, module)?)?;
    module.add_function(wrap_pyfunction!(formula, module)?)?;
    module.add_function(wrap_pyfunction!(eval_formula, module)?)?;
    module.add_function(wrap_pyfunction!(graph_dot, module)?)?;
    module.add_function(wrap_pyfunction!(expressible_ordering, module)?)?;
    module.add_function(wrap_pyfunction!(run_suite, module)?)?;
    Ok(())
}
