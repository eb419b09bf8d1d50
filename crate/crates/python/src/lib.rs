//! Python bindings: measures, β tables, gap distances, exponent-set
//! constructions and the experiment drivers (reports come back as JSON text).

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyComplex;

use opuc::beta;
use opuc::document::{measure_to_value, parse_measure_spec};
use opuc::experiments::{self, LambdaSpec, Thm33Params};
use opuc::exponent;
use opuc::measure::MeasureSpec;
use opuc::precision::PrecisionPolicy;
use opuc::OpucError;

fn err(e: OpucError) -> PyErr {
    match e {
        OpucError::Precision { .. } => PyArithmeticError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

fn policy(precision: u32) -> PyResult<PrecisionPolicy> {
    opuc::complex::check_precision(precision).map_err(err)?;
    Ok(PrecisionPolicy::from_start(precision))
}

#[pyclass(name = "Measure", frozen)]
struct PyMeasure {
    inner: MeasureSpec,
}

#[pymethods]
impl PyMeasure {
    /// Parses a measure-spec JSON document.
    #[new]
    fn new(document: &str) -> PyResult<Self> {
        parse_measure_spec(document)
            .map(|inner| PyMeasure { inner })
            .map_err(|d| PyValueError::new_err(d.to_string()))
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label.clone()
    }

    /// Number of distinct atoms, `None` for measures with infinite support.
    #[getter]
    fn rank(&self) -> Option<usize> {
        self.inner.rank()
    }

    fn to_json(&self) -> String {
        measure_to_value(&self.inner).to_string()
    }

    #[pyo3(signature = (order, precision = 256))]
    fn moments<'py>(
        &self,
        py: Python<'py>,
        order: usize,
        precision: u32,
    ) -> PyResult<Vec<Bound<'py, PyComplex>>> {
        opuc::complex::check_precision(precision).map_err(err)?;
        let m = py
            .detach(|| self.inner.moments(order, precision))
            .map_err(err)?;
        Ok(m.to_f64()
            .into_iter()
            .map(|(re, im)| PyComplex::from_doubles(py, re, im))
            .collect())
    }

    #[pyo3(signature = (length, precision = 256))]
    fn alphas<'py>(
        &self,
        py: Python<'py>,
        length: usize,
        precision: u32,
    ) -> PyResult<Vec<Bound<'py, PyComplex>>> {
        let p = policy(precision)?;
        let a = py
            .detach(|| self.inner.alphas_with(length, p))
            .map_err(err)?;
        Ok(a.values()
            .iter()
            .map(|c| {
                let (re, im) = c.to_f64();
                PyComplex::from_doubles(py, re, im)
            })
            .collect())
    }

    fn __repr__(&self) -> String {
        format!("Measure({})", self.to_json())
    }
}

#[pyclass(name = "BetaEngine", frozen)]
struct PyBetaEngine {
    inner: beta::BetaEngine,
}

#[pymethods]
impl PyBetaEngine {
    #[new]
    #[pyo3(signature = (measure, k_max, n_max, precision = 256))]
    fn new(
        py: Python<'_>,
        measure: &PyMeasure,
        k_max: usize,
        n_max: usize,
        precision: u32,
    ) -> PyResult<Self> {
        let p = policy(precision)?;
        let inner = py
            .detach(|| beta::BetaEngine::new(&measure.inner, k_max, n_max, p))
            .map_err(err)?;
        Ok(PyBetaEngine { inner })
    }

    /// Precision the table was built at after any escalation.
    #[getter]
    fn precision(&self) -> u32 {
        self.inner.precision()
    }

    fn beta(&self, k: usize, n: usize) -> PyResult<f64> {
        Ok(self.inner.beta(k, n).map_err(err)?.value.to_f64())
    }

    fn bound_3_7(&self, k: usize, n: usize) -> PyResult<f64> {
        Ok(self.inner.bound_3_7(k, n).map_err(err)?.to_f64())
    }

    fn bound_3_8(&self, k: usize, n: usize) -> PyResult<f64> {
        Ok(self.inner.bound_3_8(k, n).map_err(err)?.to_f64())
    }

    fn monic_norm(&self, n: usize) -> PyResult<f64> {
        Ok(self.inner.monic_norm(n).map_err(err)?.to_f64())
    }
}

/// `β(k, n)`: distance from `z^{-k}` to polynomials of degree at most `n`.
#[pyfunction]
#[pyo3(name = "beta", signature = (measure, k, n, precision = 256))]
fn beta_value(
    py: Python<'_>,
    measure: &PyMeasure,
    k: usize,
    n: usize,
    precision: u32,
) -> PyResult<f64> {
    let p = policy(precision)?;
    let r = py
        .detach(|| beta::beta(&measure.inner, k, n, p))
        .map_err(err)?;
    Ok(r.value.to_f64())
}

/// Distance from `z^target` to the span of the given monomials.
#[pyfunction]
#[pyo3(signature = (measure, target, exponents, precision = 256))]
fn gap_distance(
    py: Python<'_>,
    measure: &PyMeasure,
    target: u64,
    exponents: Vec<u64>,
    precision: u32,
) -> PyResult<f64> {
    let p = policy(precision)?;
    let r = py
        .detach(|| beta::gap_distance(&measure.inner, target, &exponents, p))
        .map_err(err)?;
    Ok(r.value.to_f64())
}

/// Smallest `n ≤ n_max` with `β(k, n) ≤ tol`, or `None` when the budget runs out.
#[pyfunction]
#[pyo3(signature = (measure, k, tol, n_max = 200, precision = 256))]
fn find_min_degree(
    py: Python<'_>,
    measure: &PyMeasure,
    k: usize,
    tol: f64,
    n_max: usize,
    precision: u32,
) -> PyResult<Option<usize>> {
    let p = policy(precision)?;
    let r = py
        .detach(|| beta::find_min_degree(&measure.inner, k, tol, n_max, p))
        .map_err(err)?;
    Ok(match r {
        beta::MinDegree::Found(b) => Some(b.n),
        beta::MinDegree::Overflow { .. } => None,
    })
}

/// Intervals `(lo, hi)` of the set built by a construction document.
#[pyfunction]
fn lambda_intervals(construction: &str) -> PyResult<Vec<(u128, u128)>> {
    let spec = LambdaSpec::parse(construction).map_err(err)?;
    let set = spec.lambda_set().map_err(err)?;
    Ok(set.intervals().iter().map(|iv| (iv[0], iv[1])).collect())
}

/// `⌊k^s⌋`, exact.
#[pyfunction]
fn floor_pow(k: u128, s: f64) -> PyResult<u128> {
    exponent::floor_pow(k, s).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (measure, k_max, n_max, precision = 256))]
fn run_bound_table(
    py: Python<'_>,
    measure: &PyMeasure,
    k_max: usize,
    n_max: usize,
    precision: u32,
) -> PyResult<String> {
    let p = policy(precision)?;
    let r = py
        .detach(|| experiments::run_bound_table(&measure.inner, k_max, n_max, p))
        .map_err(err)?;
    Ok(r.to_json().to_string())
}

#[pyfunction]
#[pyo3(signature = (measure, targets = vec![0, 1, 2], tol = 0.1, blocks = 4, n_max = 200, precision = 256))]
fn run_thm_3_3(
    py: Python<'_>,
    measure: &PyMeasure,
    targets: Vec<u64>,
    tol: f64,
    blocks: usize,
    n_max: usize,
    precision: u32,
) -> PyResult<String> {
    let p = policy(precision)?;
    let params = Thm33Params {
        targets,
        tol,
        blocks,
        n_max,
        starts: None,
    };
    let r = py
        .detach(|| experiments::run_thm_3_3(&measure.inner, &params, p))
        .map_err(err)?;
    Ok(r.to_json().to_string())
}

#[pyfunction]
fn run_lambda(construction: &str) -> PyResult<String> {
    let spec = LambdaSpec::parse(construction).map_err(err)?;
    Ok(experiments::run_lambda(&spec)
        .map_err(err)?
        .to_json()
        .to_string())
}

#[pymodule]
fn opuc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMeasure>()?;
    m.add_class::<PyBetaEngine>()?;
    m.add_function(wrap_pyfunction!(beta_value, m)?)?;
    m.add_function(wrap_pyfunction!(gap_distance, m)?)?;
    m.add_function(wrap_pyfunction!(find_min_degree, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_intervals, m)?)?;
    m.add_function(wrap_pyfunction!(floor_pow, m)?)?;
    m.add_function(wrap_pyfunction!(run_bound_table, m)?)?;
    m.add_function(wrap_pyfunction!(run_thm_3_3, m)?)?;
    m.add_function(wrap_pyfunction!(run_lambda, m)?)?;
    Ok(())
}
