//! The Wick star product, the two Bargmann-Fock actions, and the
//! exponential calculus of the extended Wick algebra.
//!
//! `f ⋆ g = Σ_α (−ℏ)^{|α|}/α! (∂_y^α f)(∂_ȳ^α g)` is graded: a pair of
//! monomials of degrees `a` and `b` only produces terms of degree `a + b`.
//! Truncation therefore commutes with every product here as long as all
//! factors have non-negative degree.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::index::{MultiIndex, TermKey};
use crate::scalar::{factorial, Coefficient};
use crate::series::{accumulate, by_degree, FockSeries, TermMap, WickSeries};

fn sign(n: u32) -> BigInt {
    if n.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// Contracts two monomials: all terms of `(a) ⋆ (b)`.
fn star_monomials(
    ka: &TermKey,
    ca: &Coefficient,
    kb: &TermKey,
    cb: &Coefficient,
    out: &mut TermMap,
) {
    let base = ca * cb;
    let bound = ka.i.componentwise_min(&kb.j);
    for alpha in bound.sub_indices() {
        // ∂_y^α y^I = I!/(I−α)! y^{I−α}, and likewise on ȳ^J.
        let n = alpha.abs();
        let num = sign(n) * ka.i.falling(&alpha) * kb.j.falling(&alpha);
        let c = Coefficient::real(BigRational::new(num, alpha.factorial()));
        let key = TermKey::new(
            ka.k2 + kb.k2 + 2 * n as i32,
            ka.i.checked_sub(&alpha).expect("α ≤ I").add(&kb.i),
            ka.j.add(&kb.j.checked_sub(&alpha).expect("α ≤ J")),
        );
        accumulate(out, key, &base * &c);
    }
}

/// `f ⋆ g` truncated at the common truncation degree.
pub fn wick_star(f: &WickSeries, g: &WickSeries) -> Result<WickSeries> {
    f.check_compatible(g)?;
    let trunc = f.trunc();
    let mut out = TermMap::new();
    let rhs = by_degree(g.terms());
    for (ka, ca) in f.iter() {
        let room = trunc - ka.degree();
        for (_, kb, cb) in rhs.iter().take_while(|(d, _, _)| *d <= room) {
            star_monomials(ka, ca, kb, cb, &mut out);
        }
    }
    Ok(WickSeries::from_map(
        f.dim(),
        trunc,
        f.lower_bound() + g.lower_bound(),
        out,
    ))
}

/// Complex conjugation: `c ℏ^k y^I ȳ^J ↦ c̄ ℏ^k y^J ȳ^I`.
pub fn conjugate(f: &WickSeries) -> WickSeries {
    f.conjugate()
}

/// Holomorphic Bargmann-Fock action. A monomial `ℏ^k y^I ȳ^J` acts as
/// `ℏ^k (ℏ∂_y)^J ∘ m_{y^I}`. When `s` lies in plain `F` the output must as
/// well; use [`fock_act_extended`] to allow negative `ℏ`-powers.
pub fn fock_act(f: &WickSeries, s: &FockSeries) -> Result<FockSeries> {
    let out = fock_act_extended(f, s)?;
    if s.is_plain() {
        if let Some((k, _)) = out.iter().find(|(k, _)| k.k2 < 0) {
            return Err(Error::DegreeWindow {
                degree: k.degree(),
                lower: 0,
                upper: out.trunc(),
            });
        }
    }
    Ok(out)
}

/// [`fock_act`] without the plain-output check; the result may lie in `F⁺`.
pub fn fock_act_extended(f: &WickSeries, s: &FockSeries) -> Result<FockSeries> {
    let s = s.as_wick();
    f.check_compatible(s)?;
    let trunc = f.trunc();
    let mut out = TermMap::new();
    let rhs = by_degree(s.terms());
    for (ka, ca) in f.iter() {
        let room = trunc - ka.degree();
        for (_, kb, cb) in rhs.iter().take_while(|(d, _, _)| *d <= room) {
            let prod = ka.i.add(&kb.i);
            let Some(rest) = prod.checked_sub(&ka.j) else {
                continue;
            };
            let c = ca * *cb;
            let key = TermKey::new(
                ka.k2 + kb.k2 + 2 * ka.j.abs() as i32,
                rest,
                MultiIndex::zeros(f.dim()),
            );
            accumulate(
                &mut out,
                key,
                &c * &Coefficient::from_bigint(prod.falling(&ka.j)),
            );
        }
    }
    FockSeries::new(WickSeries::from_map(
        f.dim(),
        trunc,
        f.lower_bound() + s.lower_bound(),
        out,
    ))
}

/// Anti-holomorphic Bargmann-Fock action on series in `ȳ` alone. A monomial
/// `ℏ^k y^I ȳ^J` acts as `ℏ^k m_{ȳ^J} ∘ (−ℏ∂_ȳ)^I`.
pub fn anti_fock_act(f: &WickSeries, s: &WickSeries) -> Result<WickSeries> {
    f.check_compatible(s)?;
    if s.iter().any(|(k, _)| !k.i.is_zero()) {
        return Err(Error::Precondition(
            "anti-holomorphic Fock series must not contain y".into(),
        ));
    }
    let trunc = f.trunc();
    let mut out = TermMap::new();
    let rhs = by_degree(s.terms());
    for (ka, ca) in f.iter() {
        let room = trunc - ka.degree();
        for (_, kb, cb) in rhs.iter().take_while(|(d, _, _)| *d <= room) {
            let Some(rest) = kb.j.checked_sub(&ka.i) else {
                continue;
            };
            let n = ka.i.abs();
            let factor = Coefficient::from_bigint(sign(n) * kb.j.falling(&ka.i));
            let key = TermKey::new(
                ka.k2 + kb.k2 + 2 * n as i32,
                MultiIndex::zeros(f.dim()),
                rest.add(&ka.j),
            );
            accumulate(&mut out, key, &(ca * *cb) * &factor);
        }
    }
    Ok(WickSeries::from_map(
        f.dim(),
        trunc,
        f.lower_bound() + s.lower_bound(),
        out,
    ))
}

fn require_min_degree(x: &WickSeries, min: i32, what: &str) -> Result<()> {
    if let Some(d) = x.min_degree() {
        if d < min {
            return Err(Error::Precondition(format!(
                "{what}: every term must have degree ≥ {min}, found degree {d}"
            )));
        }
    }
    Ok(())
}

/// Sums `Σ_j x^j / j!` for a product `mul` under which `x` raises degree.
fn exp_series(
    x: &WickSeries,
    mul: impl Fn(&WickSeries, &WickSeries) -> Result<WickSeries>,
) -> Result<WickSeries> {
    let mut acc = WickSeries::one(x.dim(), x.trunc());
    let mut power = acc.clone();
    let mut j: u32 = 0;
    loop {
        j += 1;
        power = mul(&power, x)?;
        if power.is_zero() {
            break;
        }
        acc = acc.add(&power.scale(&Coefficient::real(BigRational::new(
            BigInt::one(),
            factorial(j),
        ))))?;
    }
    Ok(acc)
}

/// `exp(h/ℏ)` (or `exp(h)` when `divide_by_hbar` is false) under the
/// commutative product. The output keeps `h`'s truncation degree; with the
/// flag set it lies in `W⁺` but still has only non-negative degrees.
pub fn classical_exp(h: &WickSeries, divide_by_hbar: bool) -> Result<WickSeries> {
    let x = if divide_by_hbar {
        require_min_degree(h, 3, "classical_exp(h/ℏ)")?;
        h.shift_hbar(-2)
    } else {
        require_min_degree(h, 1, "classical_exp(h)")?;
        h.clone()
    };
    Ok(exp_series(&x, |a, b| a.mul(b))?.with_lower_bound(0))
}

/// `exp^⋆(l) = Σ_j l^{⋆j}/j!` for `l` with all degrees ≥ 1.
pub fn star_exp(l: &WickSeries) -> Result<WickSeries> {
    require_min_degree(l, 1, "star_exp")?;
    exp_series(l, wick_star)
}

/// `u − 1` after checking that `u` has constant term exactly 1 and every
/// other term has positive degree.
fn unit_offset(u: &WickSeries, what: &str) -> Result<WickSeries> {
    let a = u.sub(&WickSeries::one(u.dim(), u.trunc()))?;
    require_min_degree(&a, 1, what)?;
    Ok(a)
}

/// `Σ_k (−1)^{k+1}/k (u − 1)^{⋆k}`, the star-logarithm of `u`.
pub fn star_log(u: &WickSeries) -> Result<WickSeries> {
    let a = unit_offset(u, "star_log requires constant term 1")?;
    let mut acc = WickSeries::zero(u.dim(), u.trunc());
    let mut power = a.clone();
    let mut k: i64 = 1;
    while !power.is_zero() {
        let c = Coefficient::ratio(if k % 2 == 1 { 1 } else { -1 }, k);
        acc = acc.add(&power.scale(&c))?;
        power = wick_star(&power, &a)?;
        k += 1;
    }
    Ok(acc)
}

/// Two-sided star inverse of `u` by the Neumann series `Σ_k (1 − u)^{⋆k}`.
pub fn star_inverse_exp(u: &WickSeries) -> Result<WickSeries> {
    let a = unit_offset(u, "star_inverse_exp requires constant term 1")?;
    let minus_a = a.neg();
    let mut acc = WickSeries::one(u.dim(), u.trunc());
    let mut power = minus_a.clone();
    while !power.is_zero() {
        acc = acc.add(&power)?;
        power = wick_star(&power, &minus_a)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y(t: i32) -> WickSeries {
        WickSeries::y(1, t, 0)
    }
    fn yb(t: i32) -> WickSeries {
        WickSeries::ybar(1, t, 0)
    }
    fn fock(s: WickSeries) -> FockSeries {
        FockSeries::new(s).unwrap()
    }
    fn mono(t: i32, k2: i32, i: u32, j: u32, c: Coefficient) -> WickSeries {
        WickSeries::monomial(1, t, k2, &[i], &[j], c).unwrap()
    }

    #[test]
    fn star_examples() {
        assert_eq!(wick_star(&y(4), &yb(4)).unwrap().to_string(), "y ȳ − ℏ");
        assert_eq!(wick_star(&yb(4), &y(4)).unwrap().to_string(), "y ȳ");
        let f = mono(6, 2, 2, 1, Coefficient::complex((1, 2), (3, 1)));
        assert_eq!(wick_star(&f, &WickSeries::one(1, 6)).unwrap(), f);
        let y2 = mono(6, 0, 2, 0, 1.into());
        let yb2 = mono(6, 0, 0, 2, 1.into());
        assert_eq!(
            wick_star(&y2, &yb2).unwrap().to_string(),
            "y^2 ȳ^2 − 4 ℏ y ȳ + 2 ℏ^2"
        );
    }

    #[test]
    fn conjugate_examples() {
        let iy = y(3).scale(&Coefficient::i());
        assert_eq!(conjugate(&iy), yb(3).scale(&-Coefficient::i()));
        let hyyb = mono(4, 2, 1, 1, 1.into());
        assert_eq!(conjugate(&hyyb), hyyb);
        let c = mono(3, 0, 2, 1, Coefficient::complex((2, 1), (3, 1)));
        assert_eq!(
            conjugate(&c),
            mono(3, 0, 1, 2, Coefficient::complex((2, 1), (-3, 1)))
        );
    }

    #[test]
    fn fock_examples() {
        let t = 4;
        let one = FockSeries::one(1, t);
        assert_eq!(fock_act(&yb(t), &fock(y(t))).unwrap().to_string(), "ℏ");
        assert_eq!(fock_act(&y(t), &one).unwrap().to_string(), "y");
        let yyb = y(t).mul(&yb(t)).unwrap();
        assert_eq!(fock_act(&yyb, &one).unwrap().to_string(), "ℏ");
    }

    #[test]
    fn fock_rejects_negative_powers_on_plain_input() {
        let f = mono(4, -2, 2, 0, 1.into());
        let err = fock_act(&f, &FockSeries::one(1, 4)).unwrap_err();
        assert!(matches!(err, Error::DegreeWindow { .. }));
        assert!(fock_act_extended(&f, &FockSeries::one(1, 4)).is_ok());
    }

    #[test]
    fn anti_fock_examples() {
        let t = 4;
        let one = WickSeries::one(1, t);
        assert!(anti_fock_act(&y(t), &one).unwrap().is_zero());
        assert_eq!(anti_fock_act(&yb(t), &one).unwrap(), yb(t));
        assert_eq!(anti_fock_act(&y(t), &yb(t)).unwrap().to_string(), "−ℏ");
        assert!(anti_fock_act(&y(t), &y(t)).is_err());
    }

    #[test]
    fn classical_exp_examples() {
        assert_eq!(
            classical_exp(&WickSeries::zero(1, 4), true).unwrap(),
            WickSeries::one(1, 4)
        );
        // Degree-≤2 part of exp(y²ȳ/ℏ); the input itself needs trunc ≥ 3.
        let h = mono(6, 0, 2, 1, 1.into());
        let e = classical_exp(&h, true).unwrap().truncated(2);
        let expected = WickSeries::one(1, 2)
            .add(&mono(2, -2, 2, 1, 1.into()))
            .unwrap()
            .add(&mono(2, -4, 4, 2, Coefficient::ratio(1, 2)))
            .unwrap();
        assert_eq!(e, expected);
        // exp(c y²ȳ²/ℏ) at trunc 4: the c²/2 ℏ⁻² y⁴ȳ⁴ term has degree 4 and stays.
        let c = Coefficient::ratio(3, 5);
        let h = mono(4, 0, 2, 2, c.clone());
        let e = classical_exp(&h, true).unwrap();
        assert_eq!(e.coeff(-2, &[2], &[2]), c);
        assert_eq!(
            e.coeff(-4, &[4], &[4]),
            &(&c * &c) * &Coefficient::ratio(1, 2)
        );
        assert_eq!(e.len(), 3);
        assert!(classical_exp(&y(4), true).is_err());
    }

    #[test]
    fn star_log_examples() {
        assert!(star_log(&WickSeries::one(1, 6)).unwrap().is_zero());
        let u = classical_exp(&mono(8, 0, 2, 1, 1.into()), true).unwrap();
        assert_eq!(star_exp(&star_log(&u).unwrap()).unwrap(), u);
        // log(1 + ℏ) = ℏ − ℏ²/2 + ℏ³/3 − ℏ⁴/4 at trunc 8.
        let u = WickSeries::one(1, 8).add(&WickSeries::hbar(1, 8)).unwrap();
        let l = star_log(&u).unwrap();
        let expected: Vec<Coefficient> = vec![
            0.into(),
            1.into(),
            Coefficient::ratio(-1, 2),
            Coefficient::ratio(1, 3),
            Coefficient::ratio(-1, 4),
        ];
        assert_eq!(l.constant_part().coeff_vec(4), expected);
        assert_eq!(l.len(), 4);
        assert!(star_log(&y(4)).is_err());
    }

    #[test]
    fn star_inverse_examples() {
        let one = WickSeries::one(1, 8);
        assert_eq!(star_inverse_exp(&one).unwrap(), one);
        let u = classical_exp(&mono(8, 0, 2, 2, Coefficient::ratio(-2, 3)), true).unwrap();
        let v = star_inverse_exp(&u).unwrap();
        assert_eq!(wick_star(&u, &v).unwrap(), one);
        assert_eq!(wick_star(&v, &u).unwrap(), one);
        let route = star_exp(&star_log(&u).unwrap().neg()).unwrap();
        assert_eq!(route, v);
    }
}
