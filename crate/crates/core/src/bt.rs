//! Berezin-Toeplitz data at a marked point: star-product values, the
//! representation on the model Fock space, local asymptotic coefficients,
//! and vacuum reduction.
//!
//! Everything is computed from the weight `|y|² − J_φ + ℏJ_ψ` and the Wick
//! algebra. Identities among engine outputs hold exactly at truncation
//! `trunc`. Compared with the untruncated geometry, results are reliable up
//! to degree `trunc − 2`: weight terms of degree `trunc + 1` and
//! `trunc + 2` already influence degrees `trunc − 1` and `trunc`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::index::{MultiIndex, TermKey};
use crate::integral::{toeplitz_symbol, WeightSeries};
use crate::jets::{function_to_wick, weight_series, FunctionJets, PotentialJets};
use crate::scalar::Coefficient;
use crate::series::{FockSeries, HbarSeries, WickSeries};
use crate::wick::{fock_act_extended, wick_star};

/// A verified weight together with its dimension and truncation degree.
#[derive(Clone, Debug)]
pub struct BTContext {
    weight: WeightSeries,
}

impl BTContext {
    pub fn new(weight: WeightSeries) -> Result<Self> {
        if !(weight.is_real() && weight.is_toeplitz_admissible()) {
            return Err(Error::InadmissibleWeight(
                "context weight must be real and free of purely holomorphic terms".into(),
            ));
        }
        Ok(BTContext { weight })
    }

    /// Zero weight: the flat Wick algebra.
    pub fn flat(dim: usize, trunc: i32) -> Self {
        BTContext {
            weight: WeightSeries::zero(dim, trunc),
        }
    }

    /// Context of K-normalized potential jets.
    pub fn from_potential(p: &PotentialJets, trunc: i32) -> Result<Self> {
        Self::new(weight_series(p, trunc)?)
    }

    /// Fubini-Study metric on the projective line at the origin of an
    /// affine chart.
    pub fn fubini_study(trunc: i32) -> Self {
        Self::from_potential(&PotentialJets::fubini_study(1, trunc.max(2) as u32), trunc)
            .expect("Fubini-Study weight is admissible")
    }

    pub fn weight(&self) -> &WeightSeries {
        &self.weight
    }

    pub fn dim(&self) -> usize {
        self.weight.dim()
    }

    pub fn trunc(&self) -> i32 {
        self.weight.trunc()
    }

    /// Degree up to which outputs agree with the untruncated geometry.
    pub fn geometric_degree(&self) -> i32 {
        self.trunc() - 2
    }

    /// `O_{f,z₀}`, the Toeplitz symbol of the jets of `f`.
    pub fn symbol(&self, f: &FunctionJets) -> Result<WickSeries> {
        if f.dim() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), f.dim()));
        }
        toeplitz_symbol(&function_to_wick(f, self.trunc())?, &self.weight)
    }
}

/// `(f ⋆_BT g)(z₀) = Σ_k C_k(f, g)(z₀) ℏ^k`: the constant term of `O_f ⋆ O_g`.
pub fn bt_star_eval(f: &FunctionJets, g: &FunctionJets, ctx: &BTContext) -> Result<HbarSeries> {
    let prod = wick_star(&ctx.symbol(f)?, &ctx.symbol(g)?)?;
    Ok(prod.constant_part())
}

/// `C_k(f, g)(z₀)`.
pub fn bt_coefficient(
    f: &FunctionJets,
    g: &FunctionJets,
    ctx: &BTContext,
    k: u32,
) -> Result<Coefficient> {
    if 2 * k as i64 > ctx.trunc() as i64 {
        return Err(Error::InsufficientOrder {
            needed: 2 * k,
            available: ctx.trunc().max(0) as u32,
        });
    }
    Ok(bt_star_eval(f, g, ctx)?.coeff(k as i32))
}

/// `T_f(α)`: the Bargmann-Fock action of `O_{f,z₀}` on `α`. The output may
/// carry negative `ℏ`-powers when `f` does.
pub fn rep_act(f: &FunctionJets, alpha: &FockSeries, ctx: &BTContext) -> Result<FockSeries> {
    fock_act_extended(&ctx.symbol(f)?, alpha)
}

/// Coefficients `a_{k,I}` of `T_f(J_s) = Σ a_{k,I} ℏ^k y^I` with
/// `2k + |I| ≤ r`, keyed by the doubled exponent `k2 = 2k` and `I`.
pub fn local_asymptotic_coeffs(
    f: &FunctionJets,
    s: &FunctionJets,
    ctx: &BTContext,
    r: i32,
) -> Result<BTreeMap<(i32, MultiIndex), Coefficient>> {
    if !s.is_holomorphic() {
        return Err(Error::Precondition(
            "section jets must be holomorphic".into(),
        ));
    }
    if r > ctx.trunc() {
        return Err(Error::InsufficientOrder {
            needed: r.max(0) as u32,
            available: ctx.trunc().max(0) as u32,
        });
    }
    let js = FockSeries::new(function_to_wick(s, ctx.trunc())?)?;
    let out = rep_act(f, &js, ctx)?;
    Ok(out
        .iter()
        .filter(|(k, _)| k.degree() <= r)
        .map(|(k, c)| ((k.k2, k.i.clone()), c.clone()))
        .collect())
}

/// Result of [`vacuum_reduce`]: `T_f(a) = ℏ^{l2/2} + residual`, where every
/// residual term has degree above the requested target.
#[derive(Clone, Debug)]
pub struct VacuumReduction {
    pub f: FunctionJets,
    pub l2: i32,
    pub residual: FockSeries,
}

/// Constructs `f` (possibly with negative `ℏ`-powers) with
/// `T_f(a) = ℏ^l + (terms of degree > target)`.
///
/// First `f₀ = z̄^{I₀}/(a_{i₀,I₀} I₀!)` kills the leading term `ℏ^{i₀} y^{I₀}`
/// of lowest degree and least `ℏ`-power down to `ℏ^{i₀+|I₀|}`. Then, degree
/// by degree, the lowest residual part `R_d` is removed by composing with
/// the holomorphic `g = −ℏ^{−l} R_d`, using `O_{g ⋆ F} = J_g ⋆ O_F`.
/// Finally `f` is recovered from its symbol by inverting `f ↦ O_f`.
pub fn vacuum_reduce(a: &FockSeries, ctx: &BTContext, target: i32) -> Result<VacuumReduction> {
    let trunc = ctx.trunc();
    let n = ctx.dim();
    if a.dim() != n {
        return Err(Error::DimensionMismatch(n, a.dim()));
    }
    if a.trunc() != trunc {
        return Err(Error::TruncationMismatch(trunc, a.trunc()));
    }
    if a.is_zero() {
        return Err(Error::Precondition(
            "vacuum reduction of the zero vector".into(),
        ));
    }
    if !a.is_plain() {
        return Err(Error::Precondition(
            "vacuum reduction needs non-negative ℏ-powers".into(),
        ));
    }
    if target > trunc {
        return Err(Error::InsufficientOrder {
            needed: target.max(0) as u32,
            available: trunc.max(0) as u32,
        });
    }
    let w = a.as_wick();
    let lead = w.min_degree().expect("non-zero");
    let (key0, c0) = w
        .iter()
        .filter(|(k, _)| k.degree() == lead)
        .min_by(|(x, _), (y, _)| x.k2.cmp(&y.k2).then_with(|| y.i.cmp(&x.i)))
        .expect("leading term exists");
    let i0 = key0.i.clone();
    let l2 = key0.k2 + 2 * i0.abs() as i32;
    let scale = (c0 * &Coefficient::from_bigint(i0.factorial())).inv()?;
    let f0 = WickSeries::from_terms(
        n,
        trunc,
        [(TermKey::new(0, MultiIndex::zeros(n), i0), scale)],
    )?;
    let hbar_l = WickSeries::from_terms(
        n,
        trunc,
        [(
            TermKey::new(l2, MultiIndex::zeros(n), MultiIndex::zeros(n)),
            Coefficient::one(),
        )],
    )?;

    let mut symbol = toeplitz_symbol(&f0, ctx.weight())?;
    let budget = (trunc - lead + 2).max(1);
    let mut steps = 0;
    loop {
        let residual = fock_act_extended(&symbol, a)?.into_wick().sub(&hbar_l)?;
        let Some(d) = residual.min_degree().filter(|&d| d <= target) else {
            break;
        };
        steps += 1;
        if steps > budget {
            return Err(Error::IterationBudget(format!(
                "vacuum reduction residual still at degree {d} after {budget} corrections"
            )));
        }
        let g = residual.homogeneous_part(d).neg().shift_hbar(-l2);
        symbol = symbol.add(&wick_star(&g, &symbol)?)?;
    }

    let f = invert_symbol(&symbol, ctx.weight())?;
    let f_jets = FunctionJets::from_series(&f);
    let residual = fock_act_extended(&ctx.symbol(&f_jets)?, a)?
        .into_wick()
        .sub(&hbar_l)?;
    if let Some(d) = residual.min_degree().filter(|&d| d <= target) {
        return Err(Error::IterationBudget(format!(
            "recovered function leaves a residual of degree {d} ≤ target {target}"
        )));
    }
    Ok(VacuumReduction {
        f: f_jets,
        l2,
        residual: FockSeries::new(residual)?,
    })
}

/// Solves `toeplitz_symbol(f) = symbol` for `f` by the fixed point
/// `f ← symbol − (O_f − f)`; `O_f − f` raises degree, so this terminates.
pub fn invert_symbol(symbol: &WickSeries, w: &WeightSeries) -> Result<WickSeries> {
    let budget = symbol
        .min_degree()
        .map_or(1, |d| (symbol.trunc() - d + 2).max(1));
    let mut f = symbol.clone();
    for _ in 0..=budget {
        let next = symbol.sub(&toeplitz_symbol(&f, w)?.sub(&f)?)?;
        if next == f {
            return Ok(f);
        }
        f = next;
    }
    Err(Error::IterationBudget(
        "symbol inversion did not settle".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(w: WickSeries) -> FunctionJets {
        FunctionJets::polynomial(&w)
    }

    #[test]
    fn star_eval_examples() {
        let ctx = BTContext::flat(1, 6);
        let z = FunctionJets::z(1, 0);
        let zb = FunctionJets::zbar(1, 0);
        assert!(bt_star_eval(&zb, &z, &ctx).unwrap().is_zero());
        assert_eq!(bt_star_eval(&z, &zb, &ctx).unwrap().to_string(), "−ℏ");
        let fs = BTContext::fubini_study(6);
        let f = poly(
            WickSeries::monomial(1, 6, 0, &[1], &[1], 1.into())
                .unwrap()
                .add(&WickSeries::constant(1, 6, Coefficient::ratio(2, 3)))
                .unwrap(),
        );
        let c = FunctionJets::constant(1, Coefficient::ratio(-5, 2));
        let v = bt_star_eval(&f, &c, &fs).unwrap();
        assert_eq!(v.to_string(), "−5/3");
    }

    #[test]
    fn coefficient_examples() {
        let ctx = BTContext::fubini_study(6);
        let f = poly(WickSeries::monomial(1, 6, 0, &[1], &[2], Coefficient::ratio(1, 2)).unwrap());
        let one = FunctionJets::constant(1, 1.into());
        for k in 1..=3 {
            assert!(bt_coefficient(&one, &f, &ctx, k).unwrap().is_zero());
        }
        assert!(bt_coefficient(&one, &f, &ctx, 4).is_err());
        let g = FunctionJets::constant(1, Coefficient::ratio(3, 1));
        let h = FunctionJets::constant(1, Coefficient::ratio(1, 7));
        assert_eq!(
            bt_coefficient(&g, &h, &ctx, 0).unwrap(),
            Coefficient::ratio(3, 7)
        );
    }

    #[test]
    fn rep_act_examples() {
        let ctx = BTContext::fubini_study(6);
        let hol = WickSeries::monomial(1, 6, 0, &[2], &[0], Coefficient::ratio(1, 3)).unwrap();
        let alpha = FockSeries::monomial(1, 6, 0, &[1], 1.into()).unwrap();
        let out = rep_act(&poly(hol.clone()), &alpha, &ctx).unwrap();
        assert_eq!(out.as_wick(), &hol.mul(alpha.as_wick()).unwrap());
        let flat = BTContext::flat(1, 6);
        let out = rep_act(&FunctionJets::zbar(1, 0), &alpha, &flat).unwrap();
        assert_eq!(out.to_string(), "ℏ");
    }

    #[test]
    fn local_coefficients() {
        let flat = BTContext::flat(1, 6);
        let one = FunctionJets::constant(1, 1.into());
        let a = local_asymptotic_coeffs(&one, &one, &flat, 6).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a[&(0, MultiIndex::zeros(1))], Coefficient::one());
        let z = FunctionJets::z(1, 0);
        let zb = FunctionJets::zbar(1, 0);
        let a = local_asymptotic_coeffs(&zb, &z, &flat, 6).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a[&(2, MultiIndex::zeros(1))], Coefficient::one());
        let fs = BTContext::fubini_study(8);
        let a = local_asymptotic_coeffs(&zb, &z, &fs, 6).unwrap();
        assert_eq!(a[&(2, MultiIndex::zeros(1))], Coefficient::one());
        assert!(a
            .iter()
            .all(|((k2, i), _)| (*k2 == 2 && i.is_zero()) || k2 + i.abs() as i32 >= 4));
        assert!(local_asymptotic_coeffs(&zb, &zb, &fs, 4).is_err());
    }

    #[test]
    fn vacuum_examples() {
        let ctx = BTContext::flat(1, 8);
        let r = vacuum_reduce(&FockSeries::one(1, 8), &ctx, 8).unwrap();
        assert_eq!(r.l2, 0);
        assert_eq!(function_to_wick(&r.f, 8).unwrap(), WickSeries::one(1, 8));
        let y = FockSeries::new(WickSeries::y(1, 8, 0)).unwrap();
        let r = vacuum_reduce(&y, &ctx, 8).unwrap();
        assert_eq!(r.l2, 2);
        assert_eq!(
            function_to_wick(&r.f, 8).unwrap(),
            WickSeries::ybar(1, 8, 0)
        );
        assert!(r.residual.is_zero());
        assert!(vacuum_reduce(&FockSeries::zero(1, 8), &ctx, 8).is_err());
    }

    #[test]
    fn vacuum_reduction_on_curved_context() {
        let ctx = BTContext::fubini_study(8);
        let a = FockSeries::new(
            WickSeries::y(1, 8, 0)
                .add(&WickSeries::monomial(1, 8, 0, &[3], &[0], Coefficient::ratio(2, 3)).unwrap())
                .unwrap()
                .add(&WickSeries::monomial(1, 8, 2, &[2], &[0], Coefficient::ratio(-1, 2)).unwrap())
                .unwrap(),
        )
        .unwrap();
        let r = vacuum_reduce(&a, &ctx, 8).unwrap();
        assert_eq!(r.l2, 2);
        assert!(r.residual.as_wick().min_degree().is_none_or(|d| d > 8));
    }
}
