//! Python bindings for `quartic_toolkit`.

use num_bigint::BigUint;
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use quartic_toolkit::{asym_enum, detkit, exact_count, orthopoly, partition, polytope, quadrature, verify, Error};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::Dimension { .. } | Error::DegenerateNodes => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Fixed diagonal of a symmetric stochastic matrix.
#[pyclass(frozen)]
struct DiagonalSpec {
    inner: polytope::DiagonalSpec,
}

#[pymethods]
impl DiagonalSpec {
    #[new]
    fn new(h: Vec<f64>) -> PyResult<Self> {
        Ok(DiagonalSpec { inner: polytope::DiagonalSpec::new(h).map_err(to_py)? })
    }

    #[getter]
    fn h(&self) -> Vec<f64> {
        self.inner.h.clone()
    }

    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    /// Exact volume for n = 3 or 4.
    fn exact_volume(&self) -> PyResult<f64> {
        match self.inner.n() {
            3 => polytope::exact_volume_n3(&self.inner),
            4 => polytope::exact_volume_n4(&self.inner),
            n => Err(Error::Domain(format!("exact volume needs n = 3 or 4, got {n}"))),
        }
        .map_err(to_py)
    }

    /// Monte Carlo volume `(estimate, std_error)`.
    #[pyo3(signature = (samples, seed = 42))]
    fn mc_volume(&self, samples: u64, seed: u64) -> PyResult<(f64, f64)> {
        let m = if self.inner.n() == 4 {
            polytope::mc_volume(&self.inner, samples, seed)
        } else {
            polytope::mc_volume_sequential(&self.inner, samples, seed)
        }
        .map_err(to_py)?;
        Ok((m.estimate, m.std_error))
    }

    fn asymptotic_volume(&self) -> PyResult<f64> {
        Ok(polytope::asymptotic_volume(&self.inner).map_err(to_py)?.to_f64())
    }

    fn __repr__(&self) -> String {
        format!("DiagonalSpec({:?})", self.inner.h)
    }
}

/// Kinetic eigenvalues and quartic coupling.
#[pyclass(frozen)]
struct KineticSpectrum {
    inner: partition::KineticSpectrum,
}

#[pymethods]
impl KineticSpectrum {
    #[new]
    #[pyo3(signature = (e, g = 0.0))]
    fn new(e: Vec<f64>, g: f64) -> PyResult<Self> {
        Ok(KineticSpectrum { inner: partition::KineticSpectrum::new(e, g).map_err(to_py)? })
    }

    #[getter]
    fn e(&self) -> Vec<f64> {
        self.inner.e.clone()
    }

    #[getter]
    fn g(&self) -> f64 {
        self.inner.g
    }

    fn z_free(&self) -> f64 {
        partition::z_free(&self.inner).to_f64()
    }

    fn z_weak(&self) -> f64 {
        partition::z_weak(&self.inner).to_f64()
    }

    fn z_weak_prefactored(&self) -> f64 {
        partition::z_weak_prefactored(&self.inner).to_f64()
    }

    #[pyo3(signature = (samples, seed = 42))]
    fn z_mc_matrix(&self, samples: u64, seed: u64) -> PyResult<(f64, f64)> {
        let v = partition::z_mc_matrix(&self.inner, samples, seed).map_err(to_py)?;
        Ok((v.estimate, v.std_error))
    }

    #[pyo3(signature = (samples, seed = 42))]
    fn z_mc_eigen(&self, samples: u64, seed: u64) -> PyResult<(f64, f64)> {
        let v = partition::z_mc_eigen(&self.inner, samples, seed).map_err(to_py)?;
        Ok((v.estimate, v.std_error))
    }

    fn __repr__(&self) -> String {
        format!("KineticSpectrum(e={:?}, g={})", self.inner.e, self.inner.g)
    }
}

/// Recursion coefficients and norms for the weight `exp(-x^4)`.
#[pyclass(frozen)]
struct QuarticTable {
    inner: orthopoly::OrthoTable,
}

#[pymethods]
impl QuarticTable {
    #[new]
    fn new(n: usize) -> PyResult<Self> {
        Ok(QuarticTable { inner: orthopoly::quartic_r_sequence(n).map_err(to_py)? })
    }

    /// `R_1..R_n`.
    #[getter]
    fn r(&self) -> Vec<f64> {
        self.inner.r.clone()
    }

    /// `h_0..h_n`.
    #[getter]
    fn h(&self) -> Vec<f64> {
        self.inner.h.clone()
    }

    fn eval(&self, k: usize, x: f64) -> PyResult<f64> {
        if k > self.inner.degree {
            return Err(PyValueError::new_err(format!("degree {k} exceeds {}", self.inner.degree)));
        }
        Ok(self.inner.eval(k, x))
    }

    fn band_violations(&self) -> Vec<usize> {
        orthopoly::band_violations(&self.inner)
    }
}

#[pyfunction]
fn count_row_sums(t: Vec<u64>) -> PyResult<BigUint> {
    let spec = exact_count::RowSumSpec::new(t).map_err(to_py)?;
    exact_count::count_row_sums(&spec).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (t, lam = None))]
fn asymptotic_count<'py>(py: Python<'py>, t: Vec<u64>, lam: Option<f64>) -> PyResult<Bound<'py, PyDict>> {
    let spec = exact_count::RowSumSpec::new(t).map_err(to_py)?;
    let lambda = match lam {
        Some(l) => l,
        None => asym_enum::lambda_star(&spec).map_err(to_py)?,
    };
    let a = asym_enum::asymptotic_count(&spec, lambda).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("value", a.value.to_f64())?;
    d.set_item("ln_value", a.value.log_abs)?;
    d.set_item("lambda", a.lambda)?;
    d.set_item("in_window", a.in_window)?;
    Ok(d)
}

#[pyfunction]
fn gamma_quarter_det(n: usize) -> PyResult<(f64, f64, f64)> {
    let g = orthopoly::gamma_quarter_det(n).map_err(to_py)?;
    Ok((g.direct.to_f64(), g.via_norms.to_f64(), g.rel_diff))
}

/// `(exact, factored, ratio)` for `det(exp(c x_k y_l))`.
#[pyfunction]
#[pyo3(signature = (x, y, c = 1.0))]
fn exp_det_factorization(x: Vec<f64>, y: Vec<f64>, c: f64) -> PyResult<(f64, f64, f64)> {
    if x.len() != y.len() {
        return Err(to_py(Error::Dimension { expected: x.len(), got: y.len() }));
    }
    let r = detkit::exp_det_factorization(&x, &y, Complex64::new(c, 0.0));
    Ok((r.exact.re, r.factored.re, r.ratio.re))
}

#[pyfunction]
fn hciz(x: Vec<f64>, y: Vec<f64>, t: f64) -> PyResult<f64> {
    partition::hciz_value(&x, &y, t).map_err(to_py)
}

#[pyfunction]
fn z_zero_kinetic(n: usize, g: f64) -> PyResult<f64> {
    Ok(partition::z_zero_kinetic(n, g).map_err(to_py)?.to_f64())
}

/// `(direct, saddle, ratio)`; `saddle` and `ratio` are `None` without a middle saddle.
#[pyfunction]
#[pyo3(signature = (a, b, k = 0))]
fn pearcey(a: f64, b: f64, k: u32) -> (Complex64, Option<Complex64>, Option<f64>) {
    let p = quadrature::pearcey_eval(a, b, k);
    (p.direct, p.saddle, p.ratio)
}

/// Acceptance criteria as a list of `(id, name, passed, detail)`.
#[pyfunction]
#[pyo3(signature = (suite = None, seed = 42))]
fn run_verify(suite: Option<&str>, seed: u64) -> PyResult<Vec<(u32, String, bool, String)>> {
    let ids = verify::suite_ids(suite).map_err(to_py)?;
    Ok(verify::run(&ids, seed).into_iter().map(|r| (r.id, r.name.to_string(), r.passed, r.detail)).collect())
}

#[pymodule]
fn quartic(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<DiagonalSpec>()?;
    m.add_class::<KineticSpectrum>()?;
    m.add_class::<QuarticTable>()?;
    m.add_function(wrap_pyfunction!(count_row_sums, m)?)?;
    m.add_function(wrap_pyfunction!(asymptotic_count, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_quarter_det, m)?)?;
    m.add_function(wrap_pyfunction!(exp_det_factorization, m)?)?;
    m.add_function(wrap_pyfunction!(hciz, m)?)?;
    m.add_function(wrap_pyfunction!(z_zero_kinetic, m)?)?;
    m.add_function(wrap_pyfunction!(pearcey, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    Ok(())
}
