//! Python module `midscale`: matrices, samplers, exact moments, G-transform
//! evaluators, Monte-Carlo estimators and the CLI harness.

use ::midscale::gtransform as gt;
use ::midscale::partitions::{self as parts, IntegerPartition, RationalFunction};
use ::midscale::symmat as sm;
use ::midscale::tmoments as tm;
use ::midscale::Error;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: Error) -> PyErr {
    match e.exit_code() {
        2 => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

#[pyclass(name = "SymmetricMatrix", from_py_object)]
#[derive(Clone)]
pub struct PySymmetricMatrix {
    inner: sm::SymmetricMatrix,
}

#[pymethods]
impl PySymmetricMatrix {
    /// Build from the row-major upper triangle.
    #[new]
    fn new(dim: usize, upper: Vec<f64>) -> PyResult<Self> {
        Ok(Self { inner: sm::SymmetricMatrix::new(dim, upper).map_err(err)? })
    }

    #[staticmethod]
    fn from_rows(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let p = rows.len();
        if rows.iter().any(|r| r.len() != p) {
            return Err(PyValueError::new_err("rows must form a square matrix"));
        }
        let mut upper = Vec::with_capacity(p * (p + 1) / 2);
        for (i, r) in rows.iter().enumerate() {
            for j in i..p {
                if (r[j] - rows[j][i]).abs() > 1e-12 * (1.0 + r[j].abs()) {
                    return Err(PyValueError::new_err("matrix is not symmetric"));
                }
                upper.push(r[j]);
            }
        }
        Self::new(p, upper)
    }

    #[staticmethod]
    fn identity(dim: usize) -> Self {
        Self { inner: sm::SymmetricMatrix::identity(dim) }
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn upper(&self) -> Vec<f64> {
        self.inner.upper().to_vec()
    }

    fn to_rows(&self) -> Vec<Vec<f64>> {
        let p = self.inner.dim();
        (0..p).map(|i| (0..p).map(|j| self.inner.get(i, j)).collect()).collect()
    }

    fn trace_power(&self, k: u32) -> f64 {
        sm::trace_power(&self.inner, k)
    }

    /// Eigenvalues sorted descending.
    fn eigenvalues(&self) -> PyResult<Vec<f64>> {
        Ok(self.inner.eigenvalues().map_err(err)?.values().to_vec())
    }

    fn scale(&self, a: f64) -> Self {
        Self { inner: self.inner.scale(a) }
    }

    fn __repr__(&self) -> String {
        format!("SymmetricMatrix(dim={}, upper={:?})", self.inner.dim(), self.inner.upper())
    }
}

#[pyclass(name = "MCEstimate", from_py_object)]
#[derive(Clone)]
pub struct PyMCEstimate {
    #[pyo3(get)]
    mean: f64,
    #[pyo3(get)]
    stderr: f64,
    #[pyo3(get)]
    n_samples: usize,
}

impl From<sm::MCEstimate> for PyMCEstimate {
    fn from(e: sm::MCEstimate) -> Self {
        Self { mean: e.mean, stderr: e.stderr, n_samples: e.n_samples }
    }
}

#[pymethods]
impl PyMCEstimate {
    fn __repr__(&self) -> String {
        format!("MCEstimate(mean={}, stderr={}, n_samples={})", self.mean, self.stderr, self.n_samples)
    }
}

#[pyclass(name = "GApprox", from_py_object)]
#[derive(Clone)]
pub struct PyGApprox {
    inner: gt::GApprox,
}

#[pymethods]
impl PyGApprox {
    #[new]
    #[pyo3(signature = (n, p, k = 0))]
    fn new(n: usize, p: usize, k: usize) -> PyResult<Self> {
        Ok(Self { inner: gt::GApprox::new(n, p, k).map_err(err)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn p(&self) -> usize {
        self.inner.p
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k
    }

    /// p^{K+3} / n^{K+1}
    fn classifier(&self) -> f64 {
        self.inner.classifier()
    }
}

#[pyclass(name = "McmcConfig", from_py_object)]
#[derive(Clone)]
pub struct PyMcmcConfig {
    inner: gt::McmcConfig,
}

#[pymethods]
impl PyMcmcConfig {
    #[new]
    #[pyo3(signature = (n_chains = 4, burn_in = 2000, thin = 5, step_scale = 1.0, seed = 0x5EED_2017, stream = 0, kernel = "matrix"))]
    fn new(
        n_chains: usize,
        burn_in: usize,
        thin: usize,
        step_scale: f64,
        seed: u64,
        stream: u64,
        kernel: &str,
    ) -> PyResult<Self> {
        let kernel = match kernel {
            "matrix" => gt::Kernel::Matrix,
            "spectral" => gt::Kernel::Spectral,
            other => return Err(PyValueError::new_err(format!("unknown kernel {:?}", other))),
        };
        let inner = gt::McmcConfig { n_chains, burn_in, thin, step_scale, seed: sm::RngSeed::new(seed, stream), kernel };
        inner.validate().map_err(err)?;
        Ok(Self { inner })
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

fn rng_seed(seed: u64, stream: u64) -> sm::RngSeed {
    sm::RngSeed::new(seed, stream)
}

#[pyfunction]
#[pyo3(signature = (p, seed = 0x5EED_2017, stream = 0))]
fn sample_goe(p: usize, seed: u64, stream: u64) -> PyResult<PySymmetricMatrix> {
    Ok(PySymmetricMatrix { inner: sm::sample_goe(p, rng_seed(seed, stream)).map_err(err)? })
}

#[pyfunction]
#[pyo3(signature = (n, p, seed = 0x5EED_2017, stream = 0))]
fn sample_wishart(n: usize, p: usize, seed: u64, stream: u64) -> PyResult<PySymmetricMatrix> {
    Ok(PySymmetricMatrix { inner: sm::sample_wishart(n, p, rng_seed(seed, stream)).map_err(err)? })
}

#[pyfunction]
fn normalize_wishart(y: &PySymmetricMatrix, n: usize) -> PySymmetricMatrix {
    PySymmetricMatrix { inner: sm::normalize_wishart(&y.inner, n) }
}

/// Kept states of every chain for T ~ T_{n/2}(I_p/8).
#[pyfunction]
fn sample_symmetric_t(
    py: Python<'_>,
    n: usize,
    p: usize,
    cfg: &PyMcmcConfig,
    per_chain: usize,
) -> PyResult<Vec<Vec<PySymmetricMatrix>>> {
    let cfg = cfg.inner;
    let chains = py.detach(|| gt::sample_symmetric_t(n, p, &cfg, per_chain)).map_err(err)?;
    Ok(chains.into_iter().map(|c| c.into_iter().map(|inner| PySymmetricMatrix { inner }).collect()).collect())
}

#[pyfunction]
fn esd_ks_distance(eigenvalues: Vec<f64>) -> f64 {
    sm::esd_ks_distance(&sm::Spectrum::from_values(eigenvalues))
}

fn function_dict<'py>(py: Python<'py>, f: &RationalFunction) -> PyResult<Bound<'py, PyDict>> {
    let rec = f.to_record();
    let d = PyDict::new(py);
    d.set_item("display", rec.display)?;
    d.set_item("numerator", rec.numerator)?;
    let factors: Vec<(String, u32)> = rec.denominator_factors.into_iter().map(|x| (x.factor, x.power)).collect();
    d.set_item("denominator_factors", factors)?;
    Ok(d)
}

fn evaluate(f: &RationalFunction, n: i64, p: i64) -> PyResult<(String, f64)> {
    let v = f.eval_i64(n, p).map_err(err)?;
    Ok((parts::rational_string(&v), parts::rational_to_f64(&v)))
}

/// Exact E[tr T^{2k}] (or E[tr² T^k] when squared) as a dict with
/// display, numerator, denominator_factors and validity.
#[pyfunction]
#[pyo3(signature = (k, squared = false))]
fn moment<'py>(py: Python<'py>, k: u32, squared: bool) -> PyResult<Bound<'py, PyDict>> {
    let r = if squared { tm::moment_tr_squared(k) } else { tm::moment_tr_even(k) }.map_err(err)?;
    let d = function_dict(py, &r.exact)?;
    d.set_item("validity", format!("n >= p + {}", r.min_gap))?;
    Ok(d)
}

/// Exact moment at (n, p) as ("num/den", float).
#[pyfunction]
#[pyo3(signature = (k, n, p, squared = false))]
fn moment_value(k: u32, n: i64, p: i64, squared: bool) -> PyResult<(String, f64)> {
    let r = if squared { tm::moment_tr_squared(k) } else { tm::moment_tr_even(k) }.map_err(err)?;
    evaluate(&r.exact, n, p)
}

#[pyfunction]
fn normalized_l2_error_sq(k: u32, n: i64, p: i64) -> PyResult<(String, f64)> {
    evaluate(&tm::normalized_l2_error_sq(k).map_err(err)?, n, p)
}

#[pyfunction]
fn expected_powersum_inv_wishart<'py>(py: Python<'py>, kappa: Vec<u32>) -> PyResult<Bound<'py, PyDict>> {
    let f = parts::expected_powersum_inv_wishart(&IntegerPartition::new(kappa)).map_err(err)?;
    function_dict(py, &f)
}

#[pyfunction]
fn expected_zonal_inv_wishart<'py>(py: Python<'py>, lambda: Vec<u32>) -> PyResult<Bound<'py, PyDict>> {
    function_dict(py, &parts::expected_zonal_inv_wishart(&IntegerPartition::new(lambda)))
}

/// Zonal/power-sum conversion tables of weight w as a JSON string.
#[pyfunction]
fn zonal_dump_json(w: u32) -> PyResult<String> {
    let t = parts::zonal_table(w).map_err(err)?;
    serde_json::to_string(&t.dump()).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pyfunction]
fn enumerate_partitions(w: u32) -> PyResult<Vec<Vec<u32>>> {
    Ok(parts::enumerate_partitions(w).map_err(err)?.into_iter().map(|k| k.parts().to_vec()).collect())
}

/// (log modulus, phase) of ψ_NW(T).
#[pyfunction]
fn log_psi_nw(t: &PySymmetricMatrix, n: usize) -> PyResult<(f64, f64)> {
    let z = gt::log_psi_nw(&t.inner, n).map_err(err)?;
    Ok((z.log_modulus, z.phase))
}

#[pyfunction]
fn log_psi_k(t: &PySymmetricMatrix, g: &PyGApprox) -> (f64, f64) {
    let z = gt::log_psi_k(&t.inner, &g.inner);
    (z.log_modulus, z.phase)
}

#[pyfunction]
fn log_psi_goe(t: &PySymmetricMatrix) -> (f64, f64) {
    let z = gt::log_psi_goe(&t.inner);
    (z.log_modulus, z.phase)
}

#[pyfunction]
fn log_cnp_exact(n: usize, p: usize) -> PyResult<f64> {
    gt::log_cnp_exact(n, p).map_err(err)
}

#[pyfunction]
fn log_cnp_asymptotic(n: usize, p: usize, k: usize) -> f64 {
    gt::log_cnp_asymptotic(n, p, k)
}

#[pyfunction]
fn log_density_symmetric_t(t: &PySymmetricMatrix, nu: f64, omega: &PySymmetricMatrix) -> PyResult<f64> {
    gt::log_density_symmetric_t(&t.inner, nu, &omega.inner).map_err(err)
}

/// H²(ψ_NW, ψ_K) for target "psik", H²(ψ_GOE, ψ_K) for "psigoe".
#[pyfunction]
#[pyo3(signature = (g, n_samples, cfg, target = "psik"))]
fn estimate_hellinger_sq(
    py: Python<'_>,
    g: &PyGApprox,
    n_samples: usize,
    cfg: &PyMcmcConfig,
    target: &str,
) -> PyResult<PyMCEstimate> {
    let target = match target {
        "psik" => gt::HellingerTarget::PsiK,
        "psigoe" => gt::HellingerTarget::PsiGoe,
        other => return Err(PyValueError::new_err(format!("unknown target {:?}", other))),
    };
    let (g, cfg) = (g.inner, cfg.inner);
    let e = py.detach(|| gt::estimate_hellinger_sq(&g, target, n_samples, &cfg)).map_err(err)?;
    Ok(e.into())
}

/// Dict with bound, l1_norm, mean_re, mean_abs_im as MCEstimate values.
#[pyfunction]
fn estimate_kl_bound<'py>(
    py: Python<'py>,
    g: &PyGApprox,
    n_samples: usize,
    cfg: &PyMcmcConfig,
) -> PyResult<Bound<'py, PyDict>> {
    let (g, cfg) = (g.inner, cfg.inner);
    let kl = py.detach(|| gt::estimate_kl_bound(&g, n_samples, &cfg)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("bound", PyMCEstimate::from(kl.bound))?;
    d.set_item("l1_norm", PyMCEstimate::from(kl.l1_norm))?;
    d.set_item("mean_re", PyMCEstimate::from(kl.mean_re))?;
    d.set_item("mean_abs_im", PyMCEstimate::from(kl.mean_abs_im))?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (x, g, n_z, seed = 0x5EED_2017, stream = 0))]
fn fk_unnormalized(
    py: Python<'_>,
    x: &PySymmetricMatrix,
    g: &PyGApprox,
    n_z: usize,
    seed: u64,
    stream: u64,
) -> PyResult<PyMCEstimate> {
    let (x, g) = (x.inner.clone(), g.inner);
    let e = py.detach(|| gt::fk_unnormalized(&x, &g, n_z, rng_seed(seed, stream))).map_err(err)?;
    Ok(e.into())
}

/// Runs the command-line harness with `args` and returns its output.
#[pyfunction]
fn run_cli(py: Python<'_>, args: Vec<String>) -> PyResult<String> {
    py.detach(|| {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        midscale_cli::run_args(&refs)
    })
    .map_err(|e| match e.exit_code() {
        2 => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    })
}

#[pymodule(name = "midscale")]
fn midscale_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySymmetricMatrix>()?;
    m.add_class::<PyMCEstimate>()?;
    m.add_class::<PyGApprox>()?;
    m.add_class::<PyMcmcConfig>()?;
    m.add_function(wrap_pyfunction!(sample_goe, m)?)?;
    m.add_function(wrap_pyfunction!(sample_wishart, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_wishart, m)?)?;
    m.add_function(wrap_pyfunction!(sample_symmetric_t, m)?)?;
    m.add_function(wrap_pyfunction!(esd_ks_distance, m)?)?;
    m.add_function(wrap_pyfunction!(moment, m)?)?;
    m.add_function(wrap_pyfunction!(moment_value, m)?)?;
    m.add_function(wrap_pyfunction!(normalized_l2_error_sq, m)?)?;
    m.add_function(wrap_pyfunction!(expected_powersum_inv_wishart, m)?)?;
    m.add_function(wrap_pyfunction!(expected_zonal_inv_wishart, m)?)?;
    m.add_function(wrap_pyfunction!(zonal_dump_json, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_partitions, m)?)?;
    m.add_function(wrap_pyfunction!(log_psi_nw, m)?)?;
    m.add_function(wrap_pyfunction!(log_psi_k, m)?)?;
    m.add_function(wrap_pyfunction!(log_psi_goe, m)?)?;
    m.add_function(wrap_pyfunction!(log_cnp_exact, m)?)?;
    m.add_function(wrap_pyfunction!(log_cnp_asymptotic, m)?)?;
    m.add_function(wrap_pyfunction!(log_density_symmetric_t, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_hellinger_sq, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_kl_bound, m)?)?;
    m.add_function(wrap_pyfunction!(fk_unnormalized, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    m.add("DEFAULTS_TOML", midscale_cli::DEFAULTS_TOML)?;
    Ok(())
}
