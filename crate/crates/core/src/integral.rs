//! Formal Gaussian integrals against a weight `e^{φ/ℏ}`, the formal inner
//! product, formal Toeplitz symbols `O_f`, and the orthogonal projection.
//!
//! The reference measure is normalized by `∫ y^I ȳ^J = δ_{IJ} I! ℏ^{|I|}`.
//! A term of degree `d` integrates to a multiple of `ℏ^{d/2}`, so a
//! truncated integrand gives an exact truncated integral.

use crate::error::{Error, Result};
use crate::index::MultiIndex;
use crate::scalar::Coefficient;
use crate::series::{FockSeries, HbarSeries, WickSeries};
use crate::wick::{classical_exp, fock_act, star_inverse_exp, wick_star};

/// The weight `φ` of a formal integral together with `e^{±φ/ℏ}`.
#[derive(Clone, Debug)]
pub struct WeightSeries {
    body: WickSeries,
    exp_plus: WickSeries,
    exp_minus: WickSeries,
    real: bool,
    toeplitz_admissible: bool,
    refined: bool,
}

impl WeightSeries {
    /// Validates that every term of `body` has degree ≥ 3 and records the
    /// reality, admissibility, and refinement flags.
    pub fn new(body: WickSeries) -> Result<Self> {
        if let Some((k, _)) = body.iter().find(|(k, _)| k.degree() < 3) {
            return Err(Error::InadmissibleWeight(format!(
                "weight term of degree {} (k2={}, I={:?}, J={:?}); all terms need degree ≥ 3",
                k.degree(),
                k.k2,
                k.i,
                k.j
            )));
        }
        let exp_plus = classical_exp(&body, true)?;
        let exp_minus = classical_exp(&body.neg(), true)?;
        let real = body.is_real();
        let toeplitz_admissible = !body.has_purely_holomorphic_terms();
        let refined = !body
            .iter()
            .any(|(k, _)| k.k2 == 0 && (k.i.abs() == 1 || k.j.abs() == 1));
        Ok(WeightSeries {
            body,
            exp_plus,
            exp_minus,
            real,
            toeplitz_admissible,
            refined,
        })
    }

    pub fn zero(dim: usize, trunc: i32) -> Self {
        Self::new(WickSeries::zero(dim, trunc)).expect("zero weight is admissible")
    }

    pub fn body(&self) -> &WickSeries {
        &self.body
    }

    pub fn dim(&self) -> usize {
        self.body.dim()
    }

    pub fn trunc(&self) -> i32 {
        self.body.trunc()
    }

    /// `e^{φ/ℏ}` under the commutative product.
    pub fn exp_plus(&self) -> &WickSeries {
        &self.exp_plus
    }

    /// `e^{−φ/ℏ}` under the commutative product.
    pub fn exp_minus(&self) -> &WickSeries {
        &self.exp_minus
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn is_toeplitz_admissible(&self) -> bool {
        self.toeplitz_admissible
    }

    pub fn is_refined(&self) -> bool {
        self.refined
    }

    fn require_admissible(&self) -> Result<()> {
        if self.toeplitz_admissible {
            Ok(())
        } else {
            Err(Error::InadmissibleWeight(
                "weight contains purely holomorphic terms".into(),
            ))
        }
    }
}

/// `∫ ℏ^{k2/2} y^I ȳ^J = δ_{IJ} I! ℏ^{k2/2 + |I|}` as a one-term series.
pub fn gaussian_moment(i: &MultiIndex, j: &MultiIndex, k2: i32) -> Result<HbarSeries> {
    if i.len() != j.len() {
        return Err(Error::DimensionMismatch(i.len(), j.len()));
    }
    let k2_out = k2 + 2 * i.abs() as i32;
    if i != j {
        return Ok(HbarSeries::zero(k2_out));
    }
    Ok(HbarSeries::from_terms(
        k2_out,
        [(k2_out, Coefficient::from_bigint(i.factorial()))],
    ))
}

/// `∫ h e^{φ/ℏ}` truncated at the common truncation degree.
///
/// Exact for integrands with non-negative degrees; terms of negative degree
/// would need weight data beyond `trunc`.
pub fn formal_integral(h: &WickSeries, w: &WeightSeries) -> Result<HbarSeries> {
    h.check_compatible(&w.body)?;
    let integrand = h.mul(&w.exp_plus)?;
    let mut out = HbarSeries::zero(h.trunc());
    for (k, c) in integrand.iter() {
        if k.i == k.j {
            out.add_term(
                k.k2 + 2 * k.i.abs() as i32,
                c * &Coefficient::from_bigint(k.i.factorial()),
            );
        }
    }
    Ok(out)
}

/// `⟨f, g⟩ = ∫ f ḡ e^{φ/ℏ}`, conjugate-linear in `g`.
pub fn inner_product(f: &WickSeries, g: &WickSeries, w: &WeightSeries) -> Result<HbarSeries> {
    formal_integral(&f.mul(&g.conjugate())?, w)
}

/// `L(g) = e^{−φ/ℏ}(e^{φ/ℏ} ⋆ g − e^{φ/ℏ} g)`: the bidifferential corrections
/// produced by moving `g` across `e^{φ/ℏ}`. Raises degree by at least one.
fn correction(g: &WickSeries, w: &WeightSeries) -> Result<WickSeries> {
    let e = &w.exp_plus;
    let moved = wick_star(e, g)?.sub(&e.mul(g)?)?;
    w.exp_minus.mul(&moved)
}

/// The formal Toeplitz symbol `O_f`, the unique solution of
/// `f e^{φ/ℏ} = e^{φ/ℏ} ⋆ O_f`.
///
/// Solved by repeatedly moving the latest correction across `e^{φ/ℏ}` and
/// re-absorbing it: `O_f = Σ_t (−L)^t f`. Inputs may carry negative
/// `ℏ`-powers but every term must have non-negative degree.
pub fn toeplitz_symbol(f: &WickSeries, w: &WeightSeries) -> Result<WickSeries> {
    w.require_admissible()?;
    f.check_compatible(&w.body)?;
    let Some(start) = f.min_degree() else {
        return Ok(f.clone());
    };
    if start < 0 {
        return Err(Error::Precondition(format!(
            "toeplitz_symbol needs non-negative degrees, found {start}"
        )));
    }
    let budget = (f.trunc() - start + 1).max(1);
    let mut symbol = f.clone();
    let mut step = f.clone();
    for _ in 0..=budget {
        step = correction(&step, w)?.neg();
        if step.is_zero() {
            return Ok(symbol.with_lower_bound(f.lower_bound()));
        }
        symbol = symbol.add(&step)?;
    }
    Err(Error::IterationBudget(format!(
        "O_f correction still nonzero after {budget} steps (min degree {:?})",
        step.min_degree()
    )))
}

/// `O_f` by the second route `(e^{φ/ℏ})^{⋆−1} ⋆ (f e^{φ/ℏ})`.
pub fn toeplitz_symbol_by_inverse(f: &WickSeries, w: &WeightSeries) -> Result<WickSeries> {
    w.require_admissible()?;
    let inverse = star_inverse_exp(&w.exp_plus)?;
    wick_star(&inverse, &f.mul(&w.exp_plus)?)
}

/// Orthogonal projection `π_φ(f)` onto the Fock space, `T_{φ,f}(1)`.
pub fn projection(f: &WickSeries, w: &WeightSeries) -> Result<FockSeries> {
    toeplitz_apply(f, &FockSeries::one(f.dim(), f.trunc()), w)
}

/// The formal Toeplitz operator `T_{φ,f}(s) = π_φ(f s)`, computed as the Fock
/// action of `O_f`.
pub fn toeplitz_apply(f: &WickSeries, s: &FockSeries, w: &WeightSeries) -> Result<FockSeries> {
    fock_act(&toeplitz_symbol(f, w)?, s)
}
