//! Seed-driven property checks, shared by the test suites and the command
//! line `suite` mode. Each check draws its inputs from the given generator
//! and returns a description of the first violation.

use rand::Rng;

use crate::bt::{bt_star_eval, rep_act, vacuum_reduce, BTContext};
use crate::index::{MultiIndex, TermKey};
use crate::integral::{
    formal_integral, inner_product, toeplitz_apply, toeplitz_symbol, toeplitz_symbol_by_inverse,
    WeightSeries,
};
use crate::jets::{
    k_normalize, substitute, volume_log_jets, weight_series, FunctionJets, PotentialJets,
};
use crate::random::{self, SuiteRng};
use crate::scalar::Coefficient;
use crate::series::{FockSeries, HbarSeries, WickSeries};
use crate::wick::{
    classical_exp, conjugate, fock_act, star_exp, star_inverse_exp, star_log, wick_star,
};

pub type Check = Result<(), String>;

fn fail<T: std::fmt::Display>(what: &str, detail: T) -> Check {
    Err(format!("{what}: {detail}"))
}

fn ok<T>(r: crate::Result<T>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

fn shape(rng: &mut SuiteRng, max_trunc: i32) -> (usize, i32) {
    (rng.gen_range(1..=2), rng.gen_range(2..=max_trunc))
}

fn plain(rng: &mut SuiteRng, n: usize, t: i32) -> WickSeries {
    let terms = rng.gen_range(1..=3);
    random::series(rng, n, t, 0, t as u32, terms)
}

fn fock(rng: &mut SuiteRng, n: usize, t: i32) -> FockSeries {
    let terms = rng.gen_range(1..=3);
    FockSeries::new(random::holomorphic(rng, n, t, 0, t as u32, terms)).expect("holomorphic")
}

fn weight(rng: &mut SuiteRng, n: usize, t: i32, refined: bool) -> WeightSeries {
    let terms = rng.gen_range(1..=2);
    WeightSeries::new(random::weight_body(rng, n, t, 3, 5, terms, refined)).expect("degree ≥ 3")
}

// ---------------------------------------------------------------- wick core

pub fn graded_product(rng: &mut SuiteRng) -> Check {
    let n = rng.gen_range(1..=3);
    let t = rng.gen_range(0..=10);
    let f = random::monomial(rng, n, t);
    let g = random::monomial(rng, n, t);
    let (df, dg) = (f.min_degree().unwrap(), g.min_degree().unwrap());
    // Evaluate with room so no term is cut.
    let wide = ok(wick_star(&f.with_trunc(20), &g.with_trunc(20)), "star")?;
    if let Some(k) = wide.iter().map(|(k, _)| k).find(|k| k.degree() != df + dg) {
        return fail("term of wrong degree", format!("{k:?} in {f} ⋆ {g}"));
    }
    let cut = ok(wick_star(&f, &g), "star")?;
    if cut != wide.truncated(t) {
        return fail("truncation does not commute with ⋆", format!("{f} ⋆ {g}"));
    }
    Ok(())
}

pub fn associativity(rng: &mut SuiteRng) -> Check {
    let (n, t) = shape(rng, 8);
    let (f, g, h) = (plain(rng, n, t), plain(rng, n, t), plain(rng, n, t));
    let l = ok(wick_star(&ok(wick_star(&f, &g), "fg")?, &h), "(fg)h")?;
    let r = ok(wick_star(&f, &ok(wick_star(&g, &h), "gh")?), "f(gh)")?;
    if l != r {
        return fail("associativity", format!("f={f} g={g} h={h}"));
    }
    Ok(())
}

pub fn representation(rng: &mut SuiteRng) -> Check {
    let (n, t) = shape(rng, 8);
    let (f, g, s) = (plain(rng, n, t), plain(rng, n, t), fock(rng, n, t));
    let l = ok(fock_act(&ok(wick_star(&f, &g), "fg")?, &s), "act fg")?;
    let r = ok(fock_act(&f, &ok(fock_act(&g, &s), "act g")?), "act f")?;
    if l != r {
        return fail("representation", format!("f={f} g={g} s={}", s.as_wick()));
    }
    Ok(())
}

pub fn anti_homomorphism(rng: &mut SuiteRng) -> Check {
    let (n, t) = shape(rng, 8);
    let (f, g) = (plain(rng, n, t), plain(rng, n, t));
    let l = conjugate(&ok(wick_star(&f, &g), "fg")?);
    let r = ok(wick_star(&conjugate(&g), &conjugate(&f)), "ḡf̄")?;
    if l != r {
        return fail("anti-homomorphism", format!("f={f} g={g}"));
    }
    Ok(())
}

pub fn exp_round_trip(rng: &mut SuiteRng) -> Check {
    let (n, t) = shape(rng, 6);
    let terms = rng.gen_range(1..=3);
    let a = random::series(rng, n, t, 1, t as u32, terms);
    let u = a.add(&WickSeries::one(n, t)).unwrap();
    let back = ok(star_exp(&ok(star_log(&u), "log")?), "exp")?;
    if back != u {
        return fail("exp(log u) ≠ u", &u);
    }
    let inv = ok(star_inverse_exp(&u), "inverse")?;
    let one = WickSeries::one(n, t);
    if ok(wick_star(&u, &inv), "u⋆u⁻¹")? != one || ok(wick_star(&inv, &u), "u⁻¹⋆u")? != one
    {
        return fail("u ⋆ u⁻¹ ≠ 1", &u);
    }
    let l = ok(star_log(&ok(star_exp(&a), "exp")?), "log")?;
    if l != a {
        return fail("log(exp a) ≠ a", &a);
    }
    Ok(())
}

pub fn fock_closure(rng: &mut SuiteRng) -> Check {
    let (n, t) = shape(rng, 7);
    let t = t.max(3);
    let terms = rng.gen_range(1..=3);
    let h = random::series(rng, n, t, 3, t as u32, terms).filter(|k| !k.j.is_zero());
    let e = ok(classical_exp(&h, true), "exp(h/ℏ)")?;
    let out = ok(fock_act(&e, &fock(rng, n, t)), "fock action")?;
    if !out.is_plain() {
        return fail("negative ℏ-power after Fock action", &h);
    }
    Ok(())
}

// ----------------------------------------------------------- formal integral

pub fn filtration(rng: &mut SuiteRng) -> Check {
    let (n, t) = shape(rng, 8);
    let w = weight(rng, n, t, false);
    let k = rng.gen_range(0..=t);
    let terms = rng.gen_range(1..=3);
    let h = random::series(rng, n, t, k as u32, t as u32, terms);
    let out = ok(formal_integral(&h, &w), "integral")?;
    if out.min_k2().is_some_and(|d| d < k) {
        return fail("filtration not preserved", format!("h={h} gives {out}"));
    }
    Ok(())
}

pub fn hermitian(rng: &mut SuiteRng) -> Check {
    let (n, t) = shape(rng, 8);
    let w = weight(rng, n, t, false);
    let (f, g) = (plain(rng, n, t), plain(rng, n, t));
    let a = ok(inner_product(&f, &g, &w), "⟨f,g⟩")?;
    let b = ok(inner_product(&g, &f, &w), "⟨g,f⟩")?;
    if a != b.conj() {
        return fail("not Hermitian", format!("f={f} g={g}"));
    }
    Ok(())
}

fn y_power(n: usize, t: i32, i: &MultiIndex) -> WickSeries {
    WickSeries::from_terms(
        n,
        t,
        [(
            TermKey::new(0, i.clone(), MultiIndex::zeros(n)),
            Coefficient::one(),
        )],
    )
    .unwrap()
}

pub fn orthonormal_and_leading(rng: &mut SuiteRng) -> Check {
    let n = rng.gen_range(1..=2);
    let t = 10;
    let refined = rng.gen_bool(0.5);
    let w = weight(rng, n, t, refined);
    let (a, b) = (rng.gen_range(0..=4), rng.gen_range(0..=4));
    let i = random::multi_index(rng, n, a);
    let j = random::multi_index(rng, n, b);
    let ip = ok(
        inner_product(&y_power(n, t, &i), &y_power(n, t, &j), &w),
        "⟨y^I,y^J⟩",
    )?;
    let mut rest = ip.clone();
    if i == j {
        let lead =
            HbarSeries::from_terms(t, [(2 * a as i32, Coefficient::from_bigint(i.factorial()))]);
        rest = rest.sub(&lead);
    }
    if rest.min_k2().is_some_and(|d| d <= (a + b) as i32) {
        return fail("not orthonormal mod ℏ", format!("I={i:?} J={j:?}: {ip}"));
    }
    if i != j {
        let bound = 2 * a.max(b) as i32;
        let bad = if w.is_refined() {
            ip.min_k2().is_some_and(|d| d <= bound)
        } else {
            ip.min_k2().is_some_and(|d| d < bound)
        };
        if bad {
            return fail(
                "leading-term bound",
                format!("I={i:?} J={j:?} refined={}: {ip}", w.is_refined()),
            );
        }
    }
    Ok(())
}

pub fn symbol_leading_term(rng: &mut SuiteRng) -> Check {
    let (n, t) = shape(rng, 8);
    let w = weight(rng, n, t, false);
    let f = random::monomial(rng, n, t);
    let d = f.min_degree().unwrap();
    let o = ok(toeplitz_symbol(&f, &w), "O_f")?;
    if o.sub(&f).unwrap().min_degree().is_some_and(|e| e <= d) {
        return fail("O_f − f does not raise degree", &f);
    }
    Ok(())
}

pub fn defining_identity(rng: &mut SuiteRng) -> Check {
    let (n, t) = shape(rng, 8);
    let w = weight(rng, n, t, false);
    let f = plain(rng, n, t);
    let o = ok(toeplitz_symbol(&f, &w), "O_f")?;
    let l = ok(wick_star(w.exp_plus(), &o), "e ⋆ O_f")?;
    let r = ok(f.mul(w.exp_plus()), "f e")?;
    if l != r {
        return fail("e^{φ/ℏ} ⋆ O_f ≠ f e^{φ/ℏ}", &f);
    }
    Ok(())
}

pub fn adjoint(rng: &mut SuiteRng) -> Check {
    let (n, t) = shape(rng, 8);
    let w = weight(rng, n, t, false);
    let f = plain(rng, n, t);
    let (s1, s2) = (fock(rng, n, t), fock(rng, n, t));
    let a = ok(toeplitz_apply(&f, &s1, &w), "T_f s₁")?;
    let b = ok(toeplitz_apply(&conjugate(&f), &s2, &w), "T_f̄ s₂")?;
    let l = ok(inner_product(a.as_wick(), s2.as_wick(), &w), "⟨T_f s₁, s₂⟩")?;
    let r = ok(inner_product(s1.as_wick(), b.as_wick(), &w), "⟨s₁, T_f̄ s₂⟩")?;
    if l != r {
        return fail("adjoint law", &f);
    }
    Ok(())
}

pub fn route_equivalence(rng: &mut SuiteRng) -> Check {
    let (n, t) = shape(rng, 8);
    let w = weight(rng, n, t, false);
    let f = plain(rng, n, t);
    let a = ok(toeplitz_symbol(&f, &w), "iteration")?;
    let b = ok(toeplitz_symbol_by_inverse(&f, &w), "inverse")?;
    if a != b {
        return fail("routes disagree", &f);
    }
    Ok(())
}

// --------------------------------------------------------------------- jets

pub fn normalize_round_trip(rng: &mut SuiteRng) -> Check {
    let n = rng.gen_range(1..=2);
    let order = rng.gen_range(2..=6);
    let raw = PotentialJets::random_with(rng, n, order);
    let norm = ok(k_normalize(&raw), "k_normalize")?;
    if !norm.jets.is_normalized() {
        return fail("output not normalized", raw.varphi());
    }
    let back = ok(substitute(raw.varphi(), &norm.coord_change), "substitute")?
        .sub(&norm.frame_change)
        .and_then(|x| x.sub(&norm.frame_change.conjugate()))
        .unwrap();
    if &back != norm.jets.varphi() {
        return fail("round trip", raw.varphi());
    }
    let again = ok(k_normalize(&norm.jets), "second pass")?;
    let identity: Vec<WickSeries> = (0..n).map(|i| WickSeries::y(n, order as i32, i)).collect();
    if again.jets.varphi() != norm.jets.varphi()
        || again.coord_change != identity
        || !again.frame_change.is_zero()
    {
        return fail("normalization not idempotent", raw.varphi());
    }
    Ok(())
}

pub fn volume_log_vanishing(rng: &mut SuiteRng, order: u32) -> Check {
    let n = rng.gen_range(1..=2);
    let raw = PotentialJets::random_with(rng, n, order);
    let norm = ok(k_normalize(&raw), "k_normalize")?;
    let psi = ok(volume_log_jets(&norm.jets), "volume log")?;
    if psi.iter().any(|(k, _)| k.i.is_zero() || k.j.is_zero()) {
        return fail("purely (anti-)holomorphic volume-log jet", &psi);
    }
    let w = ok(weight_series(&norm.jets, order as i32), "weight")?;
    if !(w.is_real() && w.is_toeplitz_admissible() && w.is_refined()) {
        return fail("weight flags", w.body());
    }
    Ok(())
}

// ----------------------------------------------------------------------- bt

/// `(f ⋆ g)(0) = Σ_A (−ℏ)^{|A|} A! f_{A,0} g_{0,A}` for ℏ-free jets.
fn flat_value_at_point(f: &WickSeries, g: &WickSeries) -> HbarSeries {
    let n = f.dim();
    let mut out = HbarSeries::zero(f.trunc());
    for (kf, cf) in f.iter().filter(|(k, _)| k.j.is_zero()) {
        let cg = g.coefficient(&TermKey::new(0, MultiIndex::zeros(n), kf.i.clone()));
        let a = kf.i.abs() as i64;
        let sign = if a % 2 == 0 { 1 } else { -1 };
        let c = cf * &cg * Coefficient::from_bigint(kf.i.factorial()) * Coefficient::from_int(sign);
        out = out.add(&HbarSeries::from_terms(f.trunc(), [(2 * a as i32, c)]));
    }
    out
}

pub fn flat_reduction(rng: &mut SuiteRng) -> Check {
    let (n, t) = shape(rng, 8);
    let jet = |rng: &mut SuiteRng| {
        let terms = rng.gen_range(1..=4);
        random::series(rng, n, t, 0, t as u32, terms).filter(|k| k.k2 == 0)
    };
    let (f, g) = (jet(rng), jet(rng));
    let ctx = BTContext::flat(n, t);
    let got = ok(
        bt_star_eval(
            &FunctionJets::from_series(&f),
            &FunctionJets::from_series(&g),
            &ctx,
        ),
        "bt_star_eval",
    )?;
    let want = flat_value_at_point(&f, &g);
    if got != want {
        return fail("flat reduction", format!("f={f} g={g}: {got} vs {want}"));
    }
    Ok(())
}

fn curved_context(rng: &mut SuiteRng, n: usize, t: i32) -> Result<BTContext, String> {
    let raw = PotentialJets::random_with(rng, n, t as u32);
    let norm = ok(k_normalize(&raw), "k_normalize")?;
    ok(BTContext::from_potential(&norm.jets, t), "context")
}

pub fn self_adjoint(rng: &mut SuiteRng) -> Check {
    let n = rng.gen_range(1..=2);
    let t = rng.gen_range(3..=6);
    let ctx = curved_context(rng, n, t)?;
    let terms = rng.gen_range(1..=3);
    let f = random::real_series(rng, n, t, 0, t as u32, terms).filter(|k| k.k2 == 0);
    let f = FunctionJets::from_series(&f);
    let (s1, s2) = (fock(rng, n, t), fock(rng, n, t));
    let a = ok(rep_act(&f, &s1, &ctx), "T_f s₁")?;
    let b = ok(rep_act(&f, &s2, &ctx), "T_f s₂")?;
    let l = ok(
        inner_product(a.as_wick(), s2.as_wick(), ctx.weight()),
        "⟨T_f s₁, s₂⟩",
    )?;
    let r = ok(
        inner_product(s1.as_wick(), b.as_wick(), ctx.weight()),
        "⟨s₁, T_f s₂⟩",
    )?;
    if l != r {
        return fail("not self-adjoint", format!("{l} vs {r}"));
    }
    Ok(())
}

pub fn vacuum(rng: &mut SuiteRng, t: i32) -> Check {
    let n = rng.gen_range(1..=2);
    let ctx = match rng.gen_range(0..3) {
        0 => BTContext::flat(n, t),
        1 if n == 1 => BTContext::fubini_study(t),
        _ => curved_context(rng, n, t)?,
    };
    let terms = rng.gen_range(1..=3);
    let a = FockSeries::new(random::holomorphic(rng, n, t, 0, (t / 2) as u32, terms)).unwrap();
    if a.is_zero() {
        return Ok(());
    }
    let target = rng.gen_range(0..=t - 2);
    let red = ok(vacuum_reduce(&a, &ctx, target), "vacuum_reduce")?;
    let hbar_l = WickSeries::from_terms(
        n,
        t,
        [(
            TermKey::new(red.l2, MultiIndex::zeros(n), MultiIndex::zeros(n)),
            Coefficient::one(),
        )],
    )
    .unwrap();
    let out = ok(rep_act(&red.f, &a, &ctx), "T_f a")?;
    let residual = out.as_wick().sub(&hbar_l).unwrap();
    if residual.min_degree().is_some_and(|d| d <= target) {
        return fail(
            "residual at or below target",
            format!("a={} target={target}: {residual}", a.as_wick()),
        );
    }
    Ok(())
}

/// Runs `check` on `cases` generators seeded from `seed`.
pub fn run_cases(seed: u64, cases: usize, mut check: impl FnMut(&mut SuiteRng) -> Check) -> Check {
    for case in 0..cases {
        let mut rng = random::rng(seed.wrapping_mul(1_000_003).wrapping_add(case as u64));
        check(&mut rng).map_err(|e| format!("case {case}: {e}"))?;
    }
    Ok(())
}

/// A named randomized check.
pub struct NamedCheck {
    pub name: &'static str,
    pub check: fn(&mut SuiteRng) -> Check,
}

fn volume_log_order6(rng: &mut SuiteRng) -> Check {
    volume_log_vanishing(rng, 6)
}

fn vacuum_trunc8(rng: &mut SuiteRng) -> Check {
    vacuum(rng, 8)
}

/// Every check, in a fixed order.
pub const ALL: &[NamedCheck] = &[
    NamedCheck {
        name: "graded-product",
        check: graded_product,
    },
    NamedCheck {
        name: "associativity",
        check: associativity,
    },
    NamedCheck {
        name: "representation",
        check: representation,
    },
    NamedCheck {
        name: "anti-homomorphism",
        check: anti_homomorphism,
    },
    NamedCheck {
        name: "exp-round-trip",
        check: exp_round_trip,
    },
    NamedCheck {
        name: "fock-closure",
        check: fock_closure,
    },
    NamedCheck {
        name: "filtration",
        check: filtration,
    },
    NamedCheck {
        name: "hermitian",
        check: hermitian,
    },
    NamedCheck {
        name: "orthonormal-and-leading",
        check: orthonormal_and_leading,
    },
    NamedCheck {
        name: "symbol-leading-term",
        check: symbol_leading_term,
    },
    NamedCheck {
        name: "defining-identity",
        check: defining_identity,
    },
    NamedCheck {
        name: "adjoint",
        check: adjoint,
    },
    NamedCheck {
        name: "route-equivalence",
        check: route_equivalence,
    },
    NamedCheck {
        name: "normalize-round-trip",
        check: normalize_round_trip,
    },
    NamedCheck {
        name: "volume-log-vanishing",
        check: volume_log_order6,
    },
    NamedCheck {
        name: "flat-reduction",
        check: flat_reduction,
    },
    NamedCheck {
        name: "self-adjoint",
        check: self_adjoint,
    },
    NamedCheck {
        name: "vacuum-reduction",
        check: vacuum_trunc8,
    },
];

/// Looks up a check by name.
pub fn find(name: &str) -> Option<&'static NamedCheck> {
    ALL.iter().find(|c| c.name == name)
}
