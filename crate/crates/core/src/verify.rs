//! Comparisons between the formal engine and the projective-line oracle.
//!
//! Engine quantities are formal series in `ℏ`; oracle quantities are exact
//! rational functions of `m`, expanded at `m = ∞` with `1/m ↦ ℏ`. The engine
//! is run with two extra degrees of truncation so every compared order is
//! within its geometric range.

use std::collections::BTreeMap;

use crate::bt::BTContext;
use crate::cp1::{
    composition_residual, cp1_inner, cp1_pairing, exact_string, FitOutcome, RationalSymbol,
    ResidualFit,
};
use crate::error::Result;
use crate::integral::inner_product;
use crate::scalar::Coefficient;
use crate::series::{FockSeries, HbarSeries, WickSeries};
use crate::wick::{fock_act, wick_star};

/// Truncation degree making `ℏ^order` reliable on a curved context.
pub fn working_trunc(order: i32) -> i32 {
    2 * order + 2
}

fn y_power(trunc: i32, p: u32) -> Result<WickSeries> {
    WickSeries::monomial(1, trunc, 0, &[p], &[0], Coefficient::one())
}

/// One compared matrix element.
#[derive(Clone, Debug)]
pub struct ExactCheck {
    pub label: String,
    pub p: u32,
    pub q: u32,
    pub engine: Vec<Coefficient>,
    pub oracle: Vec<Coefficient>,
}

impl ExactCheck {
    pub fn matches(&self) -> bool {
        self.engine == self.oracle
    }

    /// `"EXACT MATCH ..."` or `"MISMATCH ..."` with both coefficient lists.
    pub fn report_line(&self) -> String {
        let fmt = |v: &[Coefficient]| -> String {
            v.iter().map(exact_string).collect::<Vec<_>>().join(", ")
        };
        if self.matches() {
            format!(
                "EXACT MATCH {} p={} q={}: [{}]",
                self.label,
                self.p,
                self.q,
                fmt(&self.engine)
            )
        } else {
            format!(
                "MISMATCH {} p={} q={}: engine [{}] oracle [{}]",
                self.label,
                self.p,
                self.q,
                fmt(&self.engine),
                fmt(&self.oracle)
            )
        }
    }
}

/// `⟨y^p, y^q⟩` under the Fubini-Study weight.
pub fn engine_pairing(ctx: &BTContext, p: u32, q: u32) -> Result<HbarSeries> {
    let t = ctx.trunc();
    inner_product(&y_power(t, p)?, &y_power(t, q)?, ctx.weight())
}

/// `⟨T_f y^p, y^q⟩` from the Fock action of `O_f`.
pub fn engine_single(ctx: &BTContext, f: &RationalSymbol, p: u32, q: u32) -> Result<HbarSeries> {
    let t = ctx.trunc();
    let of = ctx.symbol(&f.jets(t as u32))?;
    let s = fock_act(&of, &FockSeries::new(y_power(t, p)?)?)?;
    inner_product(s.as_wick(), &y_power(t, q)?, ctx.weight())
}

/// The coefficient of `y^q` in the Fock action of `O_f ⋆ O_g` on `y^p`.
pub fn engine_composition(
    ctx: &BTContext,
    f: &RationalSymbol,
    g: &RationalSymbol,
    p: u32,
    q: u32,
) -> Result<HbarSeries> {
    let t = ctx.trunc();
    let of = ctx.symbol(&f.jets(t as u32))?;
    let og = ctx.symbol(&g.jets(t as u32))?;
    let s = fock_act(&wick_star(&of, &og)?, &FockSeries::new(y_power(t, p)?)?)?;
    let mut out = HbarSeries::zero(t);
    for (k, c) in s.iter() {
        if k.i.get(0) == q {
            out.add_term(k.k2, c.clone());
        }
    }
    Ok(out)
}

/// Peak-section identity: the `ℏ`-coefficients of `⟨y^p, y^p⟩` through
/// `ℏ^order` against the expansion of `‖z^p‖²_m`.
pub fn peak_identity(p_max: u32, order: i32) -> Result<Vec<ExactCheck>> {
    let ctx = BTContext::fubini_study(working_trunc(order));
    (0..=p_max)
        .map(|p| {
            Ok(ExactCheck {
                label: "peak-section".into(),
                p,
                q: p,
                engine: engine_pairing(&ctx, p, p)?.coeff_vec(order),
                oracle: cp1_inner(p, p).expand(order).coeff_vec(order),
            })
        })
        .collect()
}

/// Single-operator matrix elements `⟨T_f z^p, z^q⟩` for `p, q ≤ pq_max`.
pub fn single_operator(f: &RationalSymbol, pq_max: u32, order: i32) -> Result<Vec<ExactCheck>> {
    let ctx = BTContext::fubini_study(working_trunc(order));
    let mut out = Vec::new();
    for p in 0..=pq_max {
        for q in 0..=pq_max {
            out.push(ExactCheck {
                label: "single-operator".into(),
                p,
                q,
                engine: engine_single(&ctx, f, p, q)?.coeff_vec(order),
                oracle: cp1_pairing(f, p, q).expand(order).coeff_vec(order),
            });
        }
    }
    Ok(out)
}

/// Residual fits of the composition entries `(T_f T_g)_{qp}` against the engine's partial sum
/// through `ℏ^order`, for each `(p, q)` in `pairs`.
pub fn composition_decay(
    f: &RationalSymbol,
    g: &RationalSymbol,
    pairs: &[(u32, u32)],
    ms: &[u32],
    order: i32,
) -> Result<Vec<ResidualFit>> {
    let ctx = BTContext::fubini_study(working_trunc(order + 1));
    let mut predicted = BTreeMap::new();
    for &(p, q) in pairs {
        predicted.insert(
            (p, q),
            engine_composition(&ctx, f, g, p, q)?.truncated(2 * order),
        );
    }
    composition_residual(f, g, ms, order, &predicted)
}

/// True when the fit is exact or decays at least as fast as `−(order+1) + slack`.
pub fn decay_ok(fit: &FitOutcome, order: i32, slack: f64) -> bool {
    match fit {
        FitOutcome::Exact => true,
        FitOutcome::Slope(s) => *s <= -(order as f64 + 1.0) + slack,
    }
}

/// CSV rows `m,p,q,exact_value,predicted_partial_sum,residual_float,fitted_order`.
pub fn residual_csv(fits: &[ResidualFit]) -> Vec<[String; 7]> {
    let mut rows = Vec::new();
    for fit in fits {
        for r in &fit.rows {
            rows.push([
                r.m.to_string(),
                fit.p.to_string(),
                fit.q.to_string(),
                exact_string(&r.exact),
                exact_string(&r.predicted),
                format!("{:e}", r.residual),
                fit.fit.to_string(),
            ]);
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peak_identity_low_order() {
        for c in peak_identity(2, 3).unwrap() {
            assert!(c.matches(), "{}", c.report_line());
        }
    }

    #[test]
    fn single_operator_low_order() {
        let f = RationalSymbol::t_over_one_plus_t();
        for c in single_operator(&f, 1, 2).unwrap() {
            assert!(c.matches(), "{}", c.report_line());
        }
    }

    #[test]
    fn composition_decays() {
        let f = RationalSymbol::t_over_one_plus_t();
        for order in 0..=1 {
            let fits = composition_decay(&f, &f, &[(0, 0), (1, 1), (0, 1)], &[32, 64, 128], order)
                .unwrap();
            for fit in &fits {
                assert!(
                    decay_ok(&fit.fit, order, 0.3),
                    "{} {} {}",
                    fit.p,
                    fit.q,
                    fit.fit
                );
            }
        }
    }
}
