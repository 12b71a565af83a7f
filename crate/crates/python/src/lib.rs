//! Python module `pybeurling`: weights, Laurent polynomials, circle sets and the spectral
//! experiments. Structured reports come back as plain dicts and lists.

use beurling::approx_unit::{ditkin_sequence, en_monomial_norm, Truncation};
use beurling::circle_sets::{atw_check, carleson_integral, CircleSet};
use beurling::ideals::{hull as core_hull, jet_membership as core_jet_membership, JetSpec};
use beurling::series::{compare_derivative_norms, LaurentSeries, DEFAULT_ROOT_TOL};
use beurling::spectral::{
    growth_fit as core_growth_fit, inner_taylor, interpolation_constant as core_interp, model_section, power_norms,
    quotient_inverse_norms as core_quotient, AtomicMeasure,
};
use beurling::weights::{asym_weight, power_weight, Weight as CoreWeight};
use beurling::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

create_exception!(pybeurling, NumericalError, PyArithmeticError, "A computation lost accuracy or hit a cap.");

fn err(e: beurling::Error) -> PyErr {
    if e.is_numerical() {
        NumericalError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn report<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let value = serde_json::to_value(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py(py, &value)
}

fn measure(atoms: Vec<(f64, f64)>) -> PyResult<AtomicMeasure> {
    AtomicMeasure::new(atoms).map_err(err)
}

/// A weight on the integers.
#[pyclass(name = "Weight", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct Weight(CoreWeight);

#[pymethods]
impl Weight {
    /// `(1+|n|)^s`.
    #[staticmethod]
    fn power(s: f64) -> PyResult<Self> {
        power_weight(s).map(Self).map_err(err)
    }

    /// `(1+n)^s` for `n ≥ 0` and `(1+|n|)^t` for `n < 0`.
    #[staticmethod]
    fn asym(s: f64, t: f64) -> PyResult<Self> {
        asym_weight(s, t).map(Self).map_err(err)
    }

    /// From the JSON form, e.g. `{"kind": "symmetric_power", "s": 0.5}`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("weights serialize")
    }

    fn value(&self, n: i64) -> PyResult<f64> {
        self.0.value(n).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Weight({})", self.to_json())
    }
}

/// A finitely supported Laurent series `Σ c_n α^n`.
#[pyclass(name = "Series", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct Series(LaurentSeries);

#[pymethods]
impl Series {
    /// From a mapping or a list of `(n, coefficient)` pairs.
    #[new]
    fn new(coeffs: Bound<'_, PyAny>) -> PyResult<Self> {
        let pairs: Vec<(i64, Complex64)> = match coeffs.cast::<PyDict>() {
            Ok(d) => d.iter().map(|(k, v)| Ok((k.extract()?, v.extract()?))).collect::<PyResult<_>>()?,
            Err(_) => coeffs.extract()?,
        };
        if let Some(&(n, c)) = pairs.iter().find(|p| !(p.1.re.is_finite() && p.1.im.is_finite())) {
            return Err(PyValueError::new_err(format!("non-finite coefficient {c} at {n}")));
        }
        Ok(Self(LaurentSeries::from_coeffs(pairs)))
    }

    /// `α − z0`.
    #[staticmethod]
    fn alpha_minus(z0: Complex64) -> Self {
        Self(LaurentSeries::alpha_minus(z0))
    }

    /// `Σ_k coeffs[k] α^k`.
    #[staticmethod]
    fn polynomial(coeffs: Vec<Complex64>) -> Self {
        Self(LaurentSeries::polynomial(&coeffs))
    }

    fn coeffs(&self) -> Vec<(i64, Complex64)> {
        self.0.iter().collect()
    }

    fn coeff(&self, n: i64) -> Complex64 {
        self.0.coeff(n)
    }

    fn pow(&self, k: u32) -> Self {
        Self(self.0.pow(k))
    }

    fn derivative(&self, k: u32) -> Self {
        Self(self.0.derivative(k))
    }

    /// Value at a point of the unit circle.
    fn eval(&self, z: Complex64) -> PyResult<Complex64> {
        self.0.eval(z).map_err(err)
    }

    fn weighted_norm(&self, w: &Weight) -> PyResult<f64> {
        self.0.weighted_norm(&w.0).map_err(err)
    }

    /// `self / (α − z0)`, which requires `self(z0) = 0`.
    #[pyo3(signature = (z0, tol = DEFAULT_ROOT_TOL))]
    fn divide_by_root(&self, z0: Complex64, tol: f64) -> PyResult<Self> {
        self.0.divide_by_root(z0, tol).map(Self).map_err(err)
    }

    /// Both sides of the derivative-norm comparison under `w`.
    fn compare_derivative_norms<'py>(&self, py: Python<'py>, w: &Weight) -> PyResult<Bound<'py, PyAny>> {
        report(py, &compare_derivative_norms(&self.0, &w.0).map_err(err)?)
    }

    fn max_coeff_diff(&self, other: &Series) -> f64 {
        self.0.max_coeff_diff(&other.0)
    }

    fn __add__(&self, other: &Series) -> Self {
        Self(&self.0 + &other.0)
    }

    fn __sub__(&self, other: &Series) -> Self {
        Self(&self.0 - &other.0)
    }

    fn __mul__(&self, other: &Series) -> Self {
        Self(&self.0 * &other.0)
    }

    fn __neg__(&self) -> Self {
        Self(-&self.0)
    }

    fn __eq__(&self, other: &Series) -> bool {
        self.0 == other.0
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("Series({})", serde_json::to_string(&self.0).expect("series serialize"))
    }
}

/// A closed subset of the unit circle, given by angles.
#[pyclass(name = "CircleSet", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyCircleSet(CircleSet);

#[pymethods]
impl PyCircleSet {
    #[new]
    fn new(angles: Vec<f64>) -> PyResult<Self> {
        CircleSet::from_angles(angles).map(Self).map_err(err)
    }

    /// From the JSON form, e.g. `{"points": [0.0, 1.0], "limits": [0]}`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn points(&self) -> Vec<f64> {
        self.0.points().to_vec()
    }

    fn distance(&self, t: f64) -> PyResult<f64> {
        self.0.distance(t).map_err(err)
    }

    /// `(value, tail_bound)` of `∫ log⁺(1/d(t,E)) dt`.
    #[pyo3(signature = (tol = 1e-12))]
    fn carleson_integral(&self, tol: f64) -> PyResult<(f64, f64)> {
        let v = carleson_integral(&self.0, tol).map_err(err)?;
        Ok((v.value, v.tail_bound))
    }

    #[pyo3(signature = (scales = 12, arcs = 64))]
    fn atw_check<'py>(&self, py: Python<'py>, scales: u32, arcs: u32) -> PyResult<Bound<'py, PyAny>> {
        report(py, &atw_check(&self.0, scales, arcs).map_err(err)?)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("CircleSet({:?})", self.0.points())
    }
}

/// `Σ_{k≥j} (1+k)^β x^k` upper bound.
#[pyfunction]
fn tail_bound(beta: f64, j: u64, x: f64) -> PyResult<f64> {
    beurling::series::tail_bound(beta, j, x).map_err(err)
}

/// `(value, tail_bound)` of `‖(e_n − 1)(α^j − 1)‖_ω`.
#[pyfunction]
#[pyo3(signature = (n, j, w, tol = 1e-12))]
fn en_monomial_norm_py(n: u64, j: i64, w: &Weight, tol: f64) -> PyResult<(f64, f64)> {
    let v = en_monomial_norm(n, j, &w.0, tol).map_err(err)?;
    Ok((v.value, v.tail_bound))
}

/// `‖(u_n − 1)f‖_ω` for each `n`, as a list of dicts.
#[pyfunction]
#[pyo3(signature = (f, w, s, n_list, tol = 1e-10))]
fn ditkin_sequence_py<'py>(
    py: Python<'py>,
    f: &Series,
    w: &Weight,
    s: f64,
    n_list: Vec<u64>,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    report(py, &ditkin_sequence(&f.0, &w.0, s, &n_list, Truncation::Tolerance(tol)).map_err(err)?)
}

/// Common zeros of order `k` of the generators.
#[pyfunction]
#[pyo3(signature = (generators, k, grid = beurling::ideals::DEFAULT_GRID, tol = beurling::ideals::DEFAULT_HULL_TOL))]
fn hull(generators: Vec<PyRef<'_, Series>>, k: usize, grid: usize, tol: f64) -> PyResult<PyCircleSet> {
    let gens: Vec<LaurentSeries> = generators.iter().map(|g| g.0.clone()).collect();
    core_hull(&gens, k, grid, tol).map(PyCircleSet).map_err(err)
}

/// Membership report of `f` against nested sets `levels[j]` on which `f^{(j)}` must vanish.
#[pyfunction]
#[pyo3(signature = (f, levels, s, tol = beurling::ideals::DEFAULT_MEMBERSHIP_TOL))]
fn jet_membership<'py>(
    py: Python<'py>,
    f: &Series,
    levels: Vec<PyRef<'_, PyCircleSet>>,
    s: f64,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let spec = JetSpec::new(levels.iter().map(|l| l.0.clone()).collect(), s).map_err(err)?;
    report(py, &core_jet_membership(&f.0, &spec, tol).map_err(err)?)
}

/// Singular inner function of the atoms `[(θ, m), …]` evaluated at `zs`, by Taylor sum and in
/// closed form.
#[pyfunction]
fn inner_eval(atoms: Vec<(f64, f64)>, degree: usize, zs: Vec<Complex64>) -> PyResult<Vec<(Complex64, Complex64)>> {
    let f = inner_taylor(&measure(atoms)?, degree).map_err(err)?;
    Ok(zs.iter().map(|&z| (f.eval_taylor(z), f.eval_direct(z))).collect())
}

/// `(rank, [(n, ‖T^{±n}‖)], overflow_at)`.
type ModelNorms = (usize, Vec<(usize, f64)>, Option<usize>);

/// Rank, power norms and overflow index for the `N`-section of the model operator.
#[pyfunction]
#[pyo3(signature = (atoms, size, n_max, inverse = true))]
fn model_power_norms(atoms: Vec<(f64, f64)>, size: usize, n_max: usize, inverse: bool) -> PyResult<ModelNorms> {
    let t = model_section(&measure(atoms)?, size).map_err(err)?;
    let p = power_norms(&t, n_max, inverse).map_err(err)?;
    Ok((t.dim(), p.norms, p.overflow_at))
}

/// Growth-regime fit of `[(n, norm)]` over the last `window` fraction.
#[pyfunction]
#[pyo3(signature = (norms, window = 0.5))]
fn growth_fit<'py>(py: Python<'py>, norms: Vec<(usize, f64)>, window: f64) -> PyResult<Bound<'py, PyAny>> {
    report(py, &core_growth_fit(&norms, window).map_err(err)?)
}

/// Dual-program estimates of the quotient norms of `α^{−n}`, `n = 1..=n_max`.
#[pyfunction]
#[pyo3(signature = (set, s, n_max, depth = None))]
fn quotient_inverse_norms<'py>(
    py: Python<'py>,
    set: &PyCircleSet,
    s: f64,
    n_max: usize,
    depth: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    report(py, &core_quotient(&set.0, s, n_max, depth).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (set, s, t, depth = None))]
fn interpolation_constant<'py>(
    py: Python<'py>,
    set: &PyCircleSet,
    s: f64,
    t: f64,
    depth: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    report(py, &core_interp(&set.0, s, t, depth).map_err(err)?)
}

#[pymodule]
fn pybeurling(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_class::<Weight>()?;
    m.add_class::<Series>()?;
    m.add_class::<PyCircleSet>()?;
    m.add_function(wrap_pyfunction!(tail_bound, m)?)?;
    m.add("en_monomial_norm", wrap_pyfunction!(en_monomial_norm_py, m)?)?;
    m.add("ditkin_sequence", wrap_pyfunction!(ditkin_sequence_py, m)?)?;
    m.add_function(wrap_pyfunction!(hull, m)?)?;
    m.add_function(wrap_pyfunction!(jet_membership, m)?)?;
    m.add_function(wrap_pyfunction!(inner_eval, m)?)?;
    m.add_function(wrap_pyfunction!(model_power_norms, m)?)?;
    m.add_function(wrap_pyfunction!(growth_fit, m)?)?;
    m.add_function(wrap_pyfunction!(quotient_inverse_norms, m)?)?;
    m.add_function(wrap_pyfunction!(interpolation_constant, m)?)?;
    Ok(())
}
