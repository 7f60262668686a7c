//! Python bindings for the antiham toolkit.
//!
//! Matrices cross the boundary as nested lists of Python complex numbers in
//! row-major order, states as flat lists. Operators, the doubled space, the
//! transform, and antilinear terms are exposed as classes; campaign reports
//! are returned as JSON strings so they can be fed straight to `json.loads`.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use antiham::{
    exp_hermitian, run_suites, AntilinearTerm, CampaignConfig, ComplexMatrix, DensityMatrix,
    DoubledSpace, QuantumSystem, RealLinearOp, Suite, SystemLabel, UTransform, Vector,
    DEFAULT_TOL,
};

fn to_py_err(e: antiham::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix_from_rows(rows: Vec<Vec<Complex64>>) -> PyResult<ComplexMatrix> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, Vec::len);
    if nr == 0 || nc == 0 {
        return Err(PyValueError::new_err("matrix must be non-empty"));
    }
    if rows.iter().any(|r| r.len() != nc) {
        return Err(PyValueError::new_err("matrix rows must have equal length"));
    }
    ComplexMatrix::new(nr, nc, rows.into_iter().flatten().collect()).map_err(to_py_err)
}

fn matrix_to_rows(m: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect())
        .collect()
}

fn density_from_rows(rows: Vec<Vec<Complex64>>) -> PyResult<DensityMatrix> {
    DensityMatrix::new(matrix_from_rows(rows)?, DEFAULT_TOL).map_err(to_py_err)
}

fn system_to_dict<'py>(py: Python<'py>, sys: &QuantumSystem) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("label", sys.label.to_string())?;
    d.set_item("dim", sys.dim)?;
    d.set_item("hamiltonian", matrix_to_rows(&sys.hamiltonian))?;
    d.set_item("energy_observable", matrix_to_rows(&sys.energy_observable))?;
    d.set_item(
        "observables",
        sys.observables.iter().map(matrix_to_rows).collect::<Vec<_>>(),
    )?;
    Ok(d)
}

/// Operator with a linear and an antilinear part, acting on column vectors.
#[pyclass(name = "RealLinearOperator", skip_from_py_object)]
#[derive(Clone)]
struct PyRealLinearOperator {
    inner: RealLinearOp,
}

#[pymethods]
impl PyRealLinearOperator {
    #[new]
    fn new(linear: Vec<Vec<Complex64>>, antilinear: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let inner = RealLinearOp::from_parts(matrix_from_rows(linear)?, matrix_from_rows(antilinear)?)
            .map_err(to_py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_linear(m: Vec<Vec<Complex64>>) -> PyResult<Self> {
        Ok(Self {
            inner: RealLinearOp::from_linear(matrix_from_rows(m)?).map_err(to_py_err)?,
        })
    }

    #[staticmethod]
    fn from_antilinear(m: Vec<Vec<Complex64>>) -> PyResult<Self> {
        Ok(Self {
            inner: RealLinearOp::from_antilinear(matrix_from_rows(m)?).map_err(to_py_err)?,
        })
    }

    #[staticmethod]
    fn identity(n: usize) -> Self {
        Self {
            inner: RealLinearOp::identity(n),
        }
    }

    #[staticmethod]
    fn scalar(n: usize, z: Complex64) -> Self {
        Self {
            inner: RealLinearOp::scalar(n, z),
        }
    }

    #[staticmethod]
    fn conjugation(n: usize) -> Self {
        Self {
            inner: RealLinearOp::conjugation(n),
        }
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn linear(&self) -> Vec<Vec<Complex64>> {
        matrix_to_rows(self.inner.linear())
    }

    fn antilinear(&self) -> Vec<Vec<Complex64>> {
        matrix_to_rows(self.inner.antilinear())
    }

    fn apply(&self, psi: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        let out = self
            .inner
            .apply(&Vector::from_vec(psi))
            .map_err(to_py_err)?;
        Ok(out.entries().to_vec())
    }

    fn compose(&self, other: &Self) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.compose(&other.inner).map_err(to_py_err)?,
        })
    }

    fn add(&self, other: &Self) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.add(&other.inner).map_err(to_py_err)?,
        })
    }

    fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    fn scale_left(&self, z: Complex64) -> Self {
        Self {
            inner: self.inner.scale_left(z),
        }
    }

    fn scale_right(&self, z: Complex64) -> Self {
        Self {
            inner: self.inner.scale_right(z),
        }
    }

    fn real_trace(&self) -> f64 {
        self.inner.real_trace()
    }

    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.inner.max_abs_diff(&other.inner)
    }

    fn antilinear_residue(&self) -> f64 {
        self.inner.antilinear_residue()
    }

    fn is_complex_linear(&self, tol: f64) -> bool {
        self.inner.is_complex_linear(tol)
    }

    fn __repr__(&self) -> String {
        format!("RealLinearOperator(dim={})", self.inner.dim())
    }
}

/// Doubled Hilbert space carrying the hidden two-fold vacuum degeneracy.
#[pyclass(name = "DoubledSpace", skip_from_py_object)]
#[derive(Clone)]
struct PyDoubledSpace {
    inner: DoubledSpace,
}

#[pymethods]
impl PyDoubledSpace {
    #[new]
    fn new(base_dim: usize) -> PyResult<Self> {
        Ok(Self {
            inner: DoubledSpace::new(base_dim).map_err(to_py_err)?,
        })
    }

    fn base_dim(&self) -> usize {
        self.inner.base_dim()
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn v(&self) -> Vec<Vec<Complex64>> {
        matrix_to_rows(&self.inner.v())
    }

    fn v_dag(&self) -> Vec<Vec<Complex64>> {
        matrix_to_rows(&self.inner.v_dag())
    }

    fn j(&self) -> Vec<Vec<Complex64>> {
        matrix_to_rows(&self.inner.j())
    }

    fn l(&self) -> Vec<Vec<Complex64>> {
        matrix_to_rows(&self.inner.l())
    }

    fn lift_matrix(&self, m: Vec<Vec<Complex64>>) -> PyResult<Vec<Vec<Complex64>>> {
        let lifted = self
            .inner
            .lift_matrix(&matrix_from_rows(m)?)
            .map_err(to_py_err)?;
        Ok(matrix_to_rows(&lifted))
    }

    fn lift_operator(&self, op: &PyRealLinearOperator) -> PyResult<PyRealLinearOperator> {
        Ok(PyRealLinearOperator {
            inner: self.inner.lift_operator(&op.inner).map_err(to_py_err)?,
        })
    }

    fn lift_state(&self, psi: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        let out = self
            .inner
            .lift_state(&Vector::from_vec(psi))
            .map_err(to_py_err)?;
        Ok(out.entries().to_vec())
    }

    fn degenerate_partner(&self, psi_b: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        let out = self
            .inner
            .degenerate_partner(&Vector::from_vec(psi_b))
            .map_err(to_py_err)?;
        Ok(out.entries().to_vec())
    }

    fn lift_density(&self, rho: Vec<Vec<Complex64>>) -> PyResult<Vec<Vec<Complex64>>> {
        let lifted = self
            .inner
            .lift_density(&density_from_rows(rho)?)
            .map_err(to_py_err)?;
        Ok(matrix_to_rows(lifted.matrix()))
    }

    fn symmetrize_density(&self, rho: Vec<Vec<Complex64>>) -> PyResult<Vec<Vec<Complex64>>> {
        let sym = self
            .inner
            .symmetrize_density(&density_from_rows(rho)?)
            .map_err(to_py_err)?;
        Ok(matrix_to_rows(sym.matrix()))
    }

    fn __repr__(&self) -> String {
        format!("DoubledSpace(base_dim={})", self.inner.base_dim())
    }
}

/// The involution taking the doubled presentation to the transformed one.
#[pyclass(name = "UTransform", skip_from_py_object)]
#[derive(Clone)]
struct PyUTransform {
    inner: UTransform,
}

#[pymethods]
impl PyUTransform {
    #[new]
    fn new(base_dim: usize) -> PyResult<Self> {
        let space = DoubledSpace::new(base_dim).map_err(to_py_err)?;
        Ok(Self {
            inner: UTransform::new(space),
        })
    }

    fn space(&self) -> PyDoubledSpace {
        PyDoubledSpace {
            inner: *self.inner.space(),
        }
    }

    fn operator(&self) -> PyRealLinearOperator {
        PyRealLinearOperator {
            inner: self.inner.operator().clone(),
        }
    }

    fn map_state(&self, psi: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        let out = self
            .inner
            .map_state(&Vector::from_vec(psi))
            .map_err(to_py_err)?;
        Ok(out.entries().to_vec())
    }

    fn map_density(&self, rho: Vec<Vec<Complex64>>) -> PyResult<Vec<Vec<Complex64>>> {
        let mapped = self
            .inner
            .map_density(&density_from_rows(rho)?)
            .map_err(to_py_err)?;
        Ok(matrix_to_rows(mapped.matrix()))
    }

    fn transform_operator(&self, op: &PyRealLinearOperator) -> PyResult<PyRealLinearOperator> {
        Ok(PyRealLinearOperator {
            inner: self.inner.transform_op(&op.inner).map_err(to_py_err)?,
        })
    }

    fn observable_closed_form(&self, o: Vec<Vec<Complex64>>) -> PyResult<Vec<Vec<Complex64>>> {
        let out = self
            .inner
            .observable_closed_form(&matrix_from_rows(o)?)
            .map_err(to_py_err)?;
        Ok(matrix_to_rows(&out))
    }

    #[pyo3(signature = (op, tol = 1e-10))]
    fn transformed_hamiltonian(
        &self,
        op: &PyRealLinearOperator,
        tol: f64,
    ) -> PyResult<Vec<Vec<Complex64>>> {
        let out = self
            .inner
            .transformed_hamiltonian(&op.inner, tol)
            .map_err(to_py_err)?;
        Ok(matrix_to_rows(&out))
    }

    fn __repr__(&self) -> String {
        format!("UTransform(base_dim={})", self.inner.space().base_dim())
    }
}

/// Antilinear Hamiltonian term acting on the base space.
#[pyclass(name = "AntilinearTerm", skip_from_py_object)]
#[derive(Clone)]
struct PyAntilinearTerm {
    inner: AntilinearTerm,
}

#[pymethods]
impl PyAntilinearTerm {
    #[new]
    fn new(matrix: Vec<Vec<Complex64>>) -> PyResult<Self> {
        Ok(Self {
            inner: AntilinearTerm::new(matrix_from_rows(matrix)?).map_err(to_py_err)?,
        })
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        matrix_to_rows(self.inner.matrix())
    }

    fn as_operator(&self) -> PyRealLinearOperator {
        PyRealLinearOperator {
            inner: self.inner.as_operator(),
        }
    }

    fn antisymmetry_violation(&self) -> f64 {
        self.inner.antisymmetry_violation()
    }

    #[pyo3(signature = (tol = 1e-10))]
    fn is_admissible(&self, tol: f64) -> bool {
        self.inner.is_admissible(tol)
    }

    fn __repr__(&self) -> String {
        format!("AntilinearTerm(dim={})", self.inner.dim())
    }
}

/// Evolves a base-space state under a real-linear generator by realifying it.
#[pyfunction]
fn evolve_real_linear(
    generator: &PyRealLinearOperator,
    psi: Vec<Complex64>,
    t: f64,
) -> PyResult<Vec<Complex64>> {
    let out = antiham::evolve_real_linear(&generator.inner, &Vector::from_vec(psi), t)
        .map_err(to_py_err)?;
    Ok(out.entries().to_vec())
}

/// Real 2n x 2n matrix acting on stacked real and imaginary parts.
#[pyfunction]
fn realify(op: &PyRealLinearOperator) -> Vec<Vec<f64>> {
    let m = antiham::realify(&op.inner);
    (0..m.dim())
        .map(|i| (0..m.dim()).map(|j| m.get(i, j)).collect())
        .collect()
}

/// Deviation of i times the operator from anti-self-adjointness.
#[pyfunction]
fn injection_condition_violation(op: &PyRealLinearOperator) -> f64 {
    antiham::injection_condition_violation(&op.inner)
}

/// Injects an admissible antilinear term; returns the transformed term and
/// the total Hamiltonian of the transformed system. Raises for inadmissible
/// terms.
#[pyfunction]
#[pyo3(signature = (ut, hamiltonian_c, term, tol = 1e-10))]
fn inject_term(
    ut: &PyUTransform,
    hamiltonian_c: Vec<Vec<Complex64>>,
    term: &PyAntilinearTerm,
    tol: f64,
) -> PyResult<(Vec<Vec<Complex64>>, Vec<Vec<Complex64>>)> {
    let injected = antiham::inject_term(
        &ut.inner,
        &matrix_from_rows(hamiltonian_c)?,
        &term.inner,
        tol,
    )
    .map_err(to_py_err)?;
    Ok((
        matrix_to_rows(&injected.term),
        matrix_to_rows(&injected.total_hamiltonian),
    ))
}

/// Transforms an antiunitary base-space operator into the linear unitary it
/// becomes in the transformed presentation.
#[pyfunction]
#[pyo3(signature = (ut, base, tol = 1e-10))]
fn build_time_reversal(
    ut: &PyUTransform,
    base: &PyRealLinearOperator,
    tol: f64,
) -> PyResult<Vec<Vec<Complex64>>> {
    let tr = antiham::build_time_reversal(&ut.inner, &base.inner, tol).map_err(to_py_err)?;
    Ok(matrix_to_rows(&tr.transformed))
}

/// exp(-iHt) for a self-adjoint matrix.
#[pyfunction]
fn propagator(h: Vec<Vec<Complex64>>, t: f64) -> PyResult<Vec<Vec<Complex64>>> {
    let out = exp_hermitian(&matrix_from_rows(h)?, Complex64::new(0.0, -t)).map_err(to_py_err)?;
    Ok(matrix_to_rows(&out))
}

/// Eigenvalues and eigenvectors of a self-adjoint matrix, ascending.
#[pyfunction]
fn eigh(m: Vec<Vec<Complex64>>) -> PyResult<(Vec<f64>, Vec<Vec<Complex64>>)> {
    let (vals, vecs) = matrix_from_rows(m)?.eigh().map_err(to_py_err)?;
    Ok((vals, vecs.iter().map(|v| v.entries().to_vec()).collect()))
}

/// Builds the doubled presentation of a closed system given by a Hamiltonian
/// and a list of observables.
#[pyfunction]
fn build_system_b<'py>(
    py: Python<'py>,
    hamiltonian: Vec<Vec<Complex64>>,
    observables: Vec<Vec<Vec<Complex64>>>,
) -> PyResult<Bound<'py, PyDict>> {
    let sys_a = system_a(hamiltonian, observables)?;
    let space = DoubledSpace::new(sys_a.dim).map_err(to_py_err)?;
    let sys_b = space.build_system_b(&sys_a).map_err(to_py_err)?;
    system_to_dict(py, &sys_b)
}

/// Builds the transformed presentation; the dict carries the system plus the
/// matrix form of the operator replacing the imaginary unit.
#[pyfunction]
fn build_system_c<'py>(
    py: Python<'py>,
    hamiltonian: Vec<Vec<Complex64>>,
    observables: Vec<Vec<Vec<Complex64>>>,
) -> PyResult<Bound<'py, PyDict>> {
    let sys_a = system_a(hamiltonian, observables)?;
    let space = DoubledSpace::new(sys_a.dim).map_err(to_py_err)?;
    let sys_b = space.build_system_b(&sys_a).map_err(to_py_err)?;
    let bundle = UTransform::new(space)
        .build_system_c(&sys_b)
        .map_err(to_py_err)?;
    let d = system_to_dict(py, &bundle.system)?;
    d.set_item("j", matrix_to_rows(&bundle.j))?;
    Ok(d)
}

fn system_a(
    hamiltonian: Vec<Vec<Complex64>>,
    observables: Vec<Vec<Vec<Complex64>>>,
) -> PyResult<QuantumSystem> {
    let obs = observables
        .into_iter()
        .map(matrix_from_rows)
        .collect::<PyResult<Vec<_>>>()?;
    QuantumSystem::closed(SystemLabel::A, matrix_from_rows(hamiltonian)?, obs, DEFAULT_TOL)
        .map_err(to_py_err)
}

/// Runs the randomized verification campaign and returns the report as a
/// JSON string.
#[pyfunction]
#[pyo3(signature = (seed = 42, trials = 100, base_dim = 3, tol = 1e-9, suites = None))]
fn run_verification(
    seed: u64,
    trials: usize,
    base_dim: usize,
    tol: f64,
    suites: Option<Vec<String>>,
) -> PyResult<String> {
    let selected = match suites {
        None => Suite::ALL.to_vec(),
        Some(names) => names
            .iter()
            .map(|n| n.parse::<Suite>().map_err(PyValueError::new_err))
            .collect::<PyResult<Vec<_>>>()?,
    };
    let cfg = CampaignConfig {
        base_dim,
        trials,
        tol,
        seed,
        ..CampaignConfig::default()
    };
    let report = run_suites(&selected, &cfg);
    serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Names accepted by run_verification's suites argument.
#[pyfunction]
fn suite_names() -> Vec<String> {
    Suite::ALL.iter().map(|s| s.name().to_string()).collect()
}

#[pymodule]
fn antiham_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRealLinearOperator>()?;
    m.add_class::<PyDoubledSpace>()?;
    m.add_class::<PyUTransform>()?;
    m.add_class::<PyAntilinearTerm>()?;
    m.add_function(wrap_pyfunction!(evolve_real_linear, m)?)?;
    m.add_function(wrap_pyfunction!(realify, m)?)?;
    m.add_function(wrap_pyfunction!(injection_condition_violation, m)?)?;
    m.add_function(wrap_pyfunction!(inject_term, m)?)?;
    m.add_function(wrap_pyfunction!(build_time_reversal, m)?)?;
    m.add_function(wrap_pyfunction!(propagator, m)?)?;
    m.add_function(wrap_pyfunction!(eigh, m)?)?;
    m.add_function(wrap_pyfunction!(build_system_b, m)?)?;
    m.add_function(wrap_pyfunction!(build_system_c, m)?)?;
    m.add_function(wrap_pyfunction!(run_verification, m)?)?;
    m.add_function(wrap_pyfunction!(suite_names, m)?)?;
    Ok(())
}
