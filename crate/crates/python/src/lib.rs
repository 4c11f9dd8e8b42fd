//! Python bindings: series arithmetic in the Wick algebra, Berezin-Toeplitz
//! contexts, K-normalization, and the projective-line checks.
//!
//! Rationals cross the boundary as `"p/q"` strings; series as lists of
//! `(k2, I, J, re, im)` tuples or as the JSON record literal.

use engine::bt::{bt_star_eval, rep_act, BTContext};
use engine::cp1::{cp1_inner, FitOutcome, RationalSymbol};
use engine::jets::{k_normalize as normalize, FunctionJets, PotentialJets};
use engine::scalar::format_rational;
use engine::verify;
use engine::wick;
use engine::{Coefficient, FockSeries, HbarSeries, TermRecord};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(wickquant, WickquantError, PyValueError);

fn err(e: engine::Error) -> PyErr {
    WickquantError::new_err(e.to_string())
}

/// `(k2, I, J, re)` or `(k2, I, J, re, im)`.
#[derive(FromPyObject)]
enum Term {
    Complex(i32, Vec<u32>, Vec<u32>, String, String),
    Real(i32, Vec<u32>, Vec<u32>, String),
}

type TermTuple = (i32, Vec<u32>, Vec<u32>, String, String);

fn records(terms: Vec<Term>) -> Vec<TermRecord> {
    terms
        .into_iter()
        .map(|t| {
            let (k2, i, j, re, im) = match t {
                Term::Complex(k2, i, j, re, im) => (k2, i, j, re, im),
                Term::Real(k2, i, j, re) => (k2, i, j, re, "0".into()),
            };
            TermRecord { k2, i, j, re, im }
        })
        .collect()
}

fn coef_str(c: &Coefficient) -> (String, String) {
    (format_rational(&c.re), format_rational(&c.im))
}

fn hbar_list(h: &HbarSeries) -> Vec<(i32, String, String)> {
    h.iter()
        .map(|(k2, c)| {
            let (re, im) = coef_str(c);
            (*k2, re, im)
        })
        .collect()
}

/// A truncated series in `ℏ^{1/2}, y, ȳ`.
#[pyclass(
    name = "WickSeries",
    module = "wickquant",
    frozen,
    eq,
    skip_from_py_object
)]
#[derive(Clone, PartialEq)]
struct PyWickSeries {
    inner: engine::WickSeries,
}

#[pymethods]
impl PyWickSeries {
    /// `terms` is a list of `(k2, I, J, re[, im])` with `k2` twice the ℏ-power.
    #[new]
    #[pyo3(signature = (dim, trunc, terms, lower_bound=0))]
    fn new(dim: usize, trunc: i32, terms: Vec<Term>, lower_bound: i32) -> PyResult<Self> {
        let inner = engine::WickSeries::from_records(dim, trunc, lower_bound, &records(terms))
            .map_err(err)?;
        Ok(PyWickSeries { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (dim, trunc, text, lower_bound=0))]
    fn from_literal(dim: usize, trunc: i32, text: &str, lower_bound: i32) -> PyResult<Self> {
        let inner = engine::WickSeries::from_literal(dim, trunc, lower_bound, text).map_err(err)?;
        Ok(PyWickSeries { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (dim, trunc, i=0))]
    fn y(dim: usize, trunc: i32, i: usize) -> Self {
        PyWickSeries {
            inner: engine::WickSeries::y(dim, trunc, i),
        }
    }

    #[staticmethod]
    #[pyo3(signature = (dim, trunc, i=0))]
    fn ybar(dim: usize, trunc: i32, i: usize) -> Self {
        PyWickSeries {
            inner: engine::WickSeries::ybar(dim, trunc, i),
        }
    }

    #[staticmethod]
    fn one(dim: usize, trunc: i32) -> Self {
        PyWickSeries {
            inner: engine::WickSeries::one(dim, trunc),
        }
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn trunc(&self) -> i32 {
        self.inner.trunc()
    }

    fn terms(&self) -> Vec<TermTuple> {
        self.inner
            .to_records()
            .into_iter()
            .map(|r| (r.k2, r.i, r.j, r.re, r.im))
            .collect()
    }

    fn literal(&self) -> String {
        self.inner.to_literal()
    }

    fn star(&self, other: &PyWickSeries) -> PyResult<Self> {
        let inner = wick::wick_star(&self.inner, &other.inner).map_err(err)?;
        Ok(PyWickSeries { inner })
    }

    fn conjugate(&self) -> Self {
        PyWickSeries {
            inner: wick::conjugate(&self.inner),
        }
    }

    /// Fock action on a holomorphic series.
    fn act(&self, s: &PyWickSeries) -> PyResult<Self> {
        let s = FockSeries::new(s.inner.clone()).map_err(err)?;
        let out = wick::fock_act(&self.inner, &s).map_err(err)?;
        Ok(PyWickSeries {
            inner: out.into_wick(),
        })
    }

    fn star_exp(&self) -> PyResult<Self> {
        let inner = wick::star_exp(&self.inner).map_err(err)?;
        Ok(PyWickSeries { inner })
    }

    fn star_log(&self) -> PyResult<Self> {
        let inner = wick::star_log(&self.inner).map_err(err)?;
        Ok(PyWickSeries { inner })
    }

    fn __add__(&self, other: &PyWickSeries) -> PyResult<Self> {
        let inner = self.inner.add(&other.inner).map_err(err)?;
        Ok(PyWickSeries { inner })
    }

    fn __sub__(&self, other: &PyWickSeries) -> PyResult<Self> {
        let inner = self.inner.sub(&other.inner).map_err(err)?;
        Ok(PyWickSeries { inner })
    }

    fn __neg__(&self) -> Self {
        PyWickSeries {
            inner: self.inner.neg(),
        }
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!(
            "WickSeries(dim={}, trunc={}, '{}')",
            self.inner.dim(),
            self.inner.trunc(),
            self.inner
        )
    }
}

/// Berezin-Toeplitz data at a point: a verified weight series.
#[pyclass(name = "BTContext", module = "wickquant", frozen)]
struct PyBTContext {
    inner: BTContext,
}

fn jets(ctx: &BTContext, terms: Vec<Term>) -> PyResult<FunctionJets> {
    FunctionJets::from_records(ctx.dim(), ctx.trunc().max(0) as u32, &records(terms)).map_err(err)
}

#[pymethods]
impl PyBTContext {
    #[staticmethod]
    fn flat(dim: usize, trunc: i32) -> Self {
        PyBTContext {
            inner: BTContext::flat(dim, trunc),
        }
    }

    #[staticmethod]
    fn fubini_study(trunc: i32) -> Self {
        PyBTContext {
            inner: BTContext::fubini_study(trunc),
        }
    }

    /// K-normalizes raw potential jets and builds their context.
    #[staticmethod]
    fn from_potential(dim: usize, trunc: i32, potential: Vec<Term>) -> PyResult<Self> {
        let raw = PotentialJets::from_records(dim, trunc.max(2) as u32, &records(potential))
            .map_err(err)?;
        let norm = normalize(&raw).map_err(err)?;
        let inner = BTContext::from_potential(&norm.jets, trunc).map_err(err)?;
        Ok(PyBTContext { inner })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn trunc(&self) -> i32 {
        self.inner.trunc()
    }

    fn weight(&self) -> PyWickSeries {
        PyWickSeries {
            inner: self.inner.weight().body().clone(),
        }
    }

    /// The Toeplitz symbol `O_f` of function jets.
    fn symbol(&self, f: Vec<Term>) -> PyResult<PyWickSeries> {
        let inner = self.inner.symbol(&jets(&self.inner, f)?).map_err(err)?;
        Ok(PyWickSeries { inner })
    }

    /// `(f ⋆ g)(z₀)` as `[(k2, re, im), ...]`.
    fn star_eval(&self, f: Vec<Term>, g: Vec<Term>) -> PyResult<Vec<(i32, String, String)>> {
        let v = bt_star_eval(&jets(&self.inner, f)?, &jets(&self.inner, g)?, &self.inner)
            .map_err(err)?;
        Ok(hbar_list(&v))
    }

    /// `T_f(α)` on a holomorphic series.
    fn rep_act(&self, f: Vec<Term>, alpha: &PyWickSeries) -> PyResult<PyWickSeries> {
        let alpha = FockSeries::new(alpha.inner.clone()).map_err(err)?;
        let out = rep_act(&jets(&self.inner, f)?, &alpha, &self.inner).map_err(err)?;
        Ok(PyWickSeries {
            inner: out.into_wick(),
        })
    }
}

/// K-normalizes potential jets; returns `(varphi, coord_change, frame_change)`.
#[pyfunction]
fn k_normalize(
    dim: usize,
    order: u32,
    potential: Vec<Term>,
) -> PyResult<(PyWickSeries, Vec<PyWickSeries>, PyWickSeries)> {
    let raw = PotentialJets::from_records(dim, order, &records(potential)).map_err(err)?;
    let n = normalize(&raw).map_err(err)?;
    let wrap = |w: &engine::WickSeries| PyWickSeries { inner: w.clone() };
    Ok((
        wrap(n.jets.varphi()),
        n.coord_change.iter().map(wrap).collect(),
        wrap(&n.frame_change),
    ))
}

/// Expansion of `‖z^p‖²_m` in `ℏ = 1/m` through `ℏ^order`, as `"p/q"` strings.
#[pyfunction]
fn cp1_norm_expansion(p: u32, order: i32) -> Vec<String> {
    cp1_inner(p, p)
        .expand(order)
        .coeff_vec(order)
        .iter()
        .map(|c| format_rational(&c.re))
        .collect()
}

/// Peak-section identity lines, one per `p ≤ p_max`.
#[pyfunction]
fn cp1_peak_identity(p_max: u32, order: i32) -> PyResult<Vec<(u32, bool, String)>> {
    let checks = verify::peak_identity(p_max, order).map_err(err)?;
    Ok(checks
        .into_iter()
        .map(|c| (c.p, c.matches(), c.report_line()))
        .collect())
}

/// Fitted decay slopes of `T_f T_f − (engine partial sum)` for
/// `f = |z|²/(1+|z|²)`; `None` when the residual vanishes exactly.
#[pyfunction]
fn cp1_composition_slopes(
    pairs: Vec<(u32, u32)>,
    ms: Vec<u32>,
    order: i32,
) -> PyResult<Vec<(u32, u32, Option<f64>)>> {
    let f = RationalSymbol::t_over_one_plus_t();
    let fits = verify::composition_decay(&f, &f, &pairs, &ms, order).map_err(err)?;
    Ok(fits
        .into_iter()
        .map(|fit| {
            let s = match fit.fit {
                FitOutcome::Exact => None,
                FitOutcome::Slope(s) => Some(s),
            };
            (fit.p, fit.q, s)
        })
        .collect())
}

#[pymodule(name = "wickquant")]
fn wickquant_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyWickSeries>()?;
    m.add_class::<PyBTContext>()?;
    m.add_function(wrap_pyfunction!(k_normalize, m)?)?;
    m.add_function(wrap_pyfunction!(cp1_norm_expansion, m)?)?;
    m.add_function(wrap_pyfunction!(cp1_peak_identity, m)?)?;
    m.add_function(wrap_pyfunction!(cp1_composition_slopes, m)?)?;
    m.add("WickquantError", m.py().get_type::<WickquantError>())?;
    Ok(())
}
