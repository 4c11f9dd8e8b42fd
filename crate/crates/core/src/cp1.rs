//! Closed-form oracle on the projective line with the Fubini-Study metric
//! and the hyperplane bundle.
//!
//! With `⟨s₁, s₂⟩_m = m ∫ s₁ s̄₂ (1+|z|²)^{−m} dV`, `dV` the Fubini-Study
//! volume normalized to 1, every matrix element of a Toeplitz operator
//! with symbol `P(z, z̄)/(1+|z|²)^d` is a finite sum of Beta integrals
//!
//! `m ∫ |z|^{2s} (1+|z|²)^{−m−d} dV = m s! (m+d−s)! / (m+d+1)!`,
//!
//! an exact rational function of `m`. These are represented symbolically
//! ([`FactorialRational`], [`FactorialSum`]) so they can be evaluated at
//! any `m` or expanded at `m = ∞` with `1/m ↦ ℏ`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::index::{MultiIndex, TermKey};
use crate::jets::FunctionJets;
use crate::scalar::{binomial, factorial, format_rational, Coefficient};
use crate::series::HbarSeries;

/// `scalar · Π (m + a_i) / Π (m + b_j)` with integer shifts; common shifts
/// are cancelled and both lists are kept sorted.
#[derive(Clone, PartialEq, Eq)]
pub struct FactorialRational {
    scalar: Coefficient,
    num: Vec<i64>,
    den: Vec<i64>,
}

impl FactorialRational {
    pub fn new(scalar: Coefficient, mut num: Vec<i64>, mut den: Vec<i64>) -> Self {
        if scalar.is_zero() {
            return Self::zero();
        }
        num.sort_unstable();
        den.sort_unstable();
        let (mut n, mut d) = (Vec::new(), Vec::new());
        let (mut i, mut j) = (0, 0);
        while i < num.len() && j < den.len() {
            match num[i].cmp(&den[j]) {
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
                std::cmp::Ordering::Less => {
                    n.push(num[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    d.push(den[j]);
                    j += 1;
                }
            }
        }
        n.extend_from_slice(&num[i..]);
        d.extend_from_slice(&den[j..]);
        FactorialRational {
            scalar,
            num: n,
            den: d,
        }
    }

    pub fn zero() -> Self {
        FactorialRational {
            scalar: Coefficient::zero(),
            num: Vec::new(),
            den: Vec::new(),
        }
    }

    pub fn constant(c: Coefficient) -> Self {
        Self::new(c, Vec::new(), Vec::new())
    }

    pub fn is_zero(&self) -> bool {
        self.scalar.is_zero()
    }

    pub fn scalar(&self) -> &Coefficient {
        &self.scalar
    }

    pub fn numerator_shifts(&self) -> &[i64] {
        &self.num
    }

    pub fn denominator_shifts(&self) -> &[i64] {
        &self.den
    }

    pub fn mul(&self, other: &FactorialRational) -> FactorialRational {
        let mut num = self.num.clone();
        num.extend_from_slice(&other.num);
        let mut den = self.den.clone();
        den.extend_from_slice(&other.den);
        Self::new(&self.scalar * &other.scalar, num, den)
    }

    pub fn recip(&self) -> Result<FactorialRational> {
        Ok(Self::new(
            self.scalar.inv()?,
            self.den.clone(),
            self.num.clone(),
        ))
    }

    pub fn scale(&self, c: &Coefficient) -> FactorialRational {
        Self::new(&self.scalar * c, self.num.clone(), self.den.clone())
    }

    /// Exact value at a numeric `m`.
    pub fn eval(&self, m: i64) -> Result<Coefficient> {
        let mut num = BigInt::one();
        for a in &self.num {
            num *= BigInt::from(m + a);
        }
        let mut den = BigInt::one();
        for b in &self.den {
            den *= BigInt::from(m + b);
        }
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.scalar.scale(&BigRational::new(num, den)))
    }

    /// Coefficients of the expansion at `m = ∞` in `ℏ = 1/m` through `ℏ^order`.
    pub fn expand(&self, order: i32) -> HbarSeries {
        let mut out = HbarSeries::zero(2 * order);
        if self.is_zero() {
            return out;
        }
        let lead = self.den.len() as i32 - self.num.len() as i32;
        let len = order - lead;
        if len < 0 {
            return out;
        }
        let len = len as usize + 1;
        // Π (1 + a ℏ) Π (1 + b ℏ)^{−1}, truncated to `len` coefficients.
        let mut poly = vec![BigRational::zero(); len];
        poly[0] = BigRational::one();
        for a in &self.num {
            let a = BigRational::from_integer(BigInt::from(*a));
            for j in (1..len).rev() {
                let t = &poly[j - 1] * &a;
                poly[j] += t;
            }
        }
        for b in &self.den {
            let nb = -BigRational::from_integer(BigInt::from(*b));
            for j in 1..len {
                let t = &poly[j - 1] * &nb;
                poly[j] += t;
            }
        }
        for (j, c) in poly.into_iter().enumerate() {
            out.add_term(2 * (j as i32 + lead), self.scalar.scale(&c));
        }
        out
    }

    pub fn to_f64(&self, m: f64) -> (f64, f64) {
        let mut r = 1.0;
        for a in &self.num {
            r *= m + *a as f64;
        }
        for b in &self.den {
            r /= m + *b as f64;
        }
        let (re, im) = self.scalar.to_f64_parts();
        (re * r, im * r)
    }
}

fn shift_factor(s: i64) -> String {
    match s {
        0 => "m".to_string(),
        s if s > 0 => format!("(m+{s})"),
        s => format!("(m-{})", -s),
    }
}

impl fmt::Display for FactorialRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.scalar)?;
        for a in &self.num {
            write!(f, "·{}", shift_factor(*a))?;
        }
        if !self.den.is_empty() {
            let d: Vec<String> = self.den.iter().map(|b| shift_factor(*b)).collect();
            write!(f, "/({})", d.join("·"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for FactorialRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite sum of [`FactorialRational`]s.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FactorialSum(pub Vec<FactorialRational>);

impl FactorialSum {
    pub fn zero() -> Self {
        FactorialSum(Vec::new())
    }

    pub fn single(x: FactorialRational) -> Self {
        if x.is_zero() {
            Self::zero()
        } else {
            FactorialSum(vec![x])
        }
    }

    pub fn is_structurally_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, x: FactorialRational) {
        if !x.is_zero() {
            self.0.push(x);
        }
    }

    pub fn add(&self, other: &FactorialSum) -> FactorialSum {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        FactorialSum(v)
    }

    pub fn mul(&self, other: &FactorialSum) -> FactorialSum {
        let mut out = FactorialSum::zero();
        for a in &self.0 {
            for b in &other.0 {
                out.push(a.mul(b));
            }
        }
        out
    }

    pub fn mul_single(&self, x: &FactorialRational) -> FactorialSum {
        FactorialSum(
            self.0
                .iter()
                .map(|a| a.mul(x))
                .filter(|t| !t.is_zero())
                .collect(),
        )
    }

    pub fn eval(&self, m: i64) -> Result<Coefficient> {
        let mut acc = Coefficient::zero();
        for t in &self.0 {
            acc += &t.eval(m)?;
        }
        Ok(acc)
    }

    pub fn expand(&self, order: i32) -> HbarSeries {
        self.0.iter().fold(HbarSeries::zero(2 * order), |acc, t| {
            acc.add(&t.expand(order))
        })
    }
}

/// Expansion at `m = ∞` of a closed form, with `1/m ↦ ℏ`, through `ℏ^order`.
pub fn expand_at_infinity(x: &FactorialRational, order: i32) -> HbarSeries {
    x.expand(order)
}

/// A symbol `Σ c_{ab} z^a z̄^b / (1+|z|²)^d` with `a, b ≤ d`, so that it is a
/// smooth function on the whole projective line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalSymbol {
    num: BTreeMap<(u32, u32), Coefficient>,
    denom_power: u32,
}

type Poly = BTreeMap<(u32, u32), Coefficient>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for ((i, j), c) in a {
        for ((k, l), d) in b {
            let e = out.entry((i + k, j + l)).or_default();
            *e += &(c * d);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn poly_pow(a: &Poly, e: u32) -> Poly {
    let mut out = Poly::from([((0, 0), Coefficient::one())]);
    for _ in 0..e {
        out = poly_mul(&out, a);
    }
    out
}

impl RationalSymbol {
    pub fn new<I: IntoIterator<Item = ((u32, u32), Coefficient)>>(
        terms: I,
        denom_power: u32,
    ) -> Result<Self> {
        let mut num = Poly::new();
        for ((a, b), c) in terms {
            if a > denom_power || b > denom_power {
                return Err(Error::Precondition(format!(
                    "numerator term z^{a} z̄^{b} exceeds denominator power {denom_power}"
                )));
            }
            let e = num.entry((a, b)).or_default();
            *e += &c;
        }
        num.retain(|_, c| !c.is_zero());
        Ok(RationalSymbol { num, denom_power })
    }

    pub fn constant(c: Coefficient) -> Self {
        Self::new([((0, 0), c)], 0).expect("constant symbol")
    }

    /// `|z|²/(1+|z|²)`.
    pub fn t_over_one_plus_t() -> Self {
        Self::new([((1, 1), Coefficient::one())], 1).expect("valid symbol")
    }

    pub fn terms(&self) -> &BTreeMap<(u32, u32), Coefficient> {
        &self.num
    }

    pub fn denom_power(&self) -> u32 {
        self.denom_power
    }

    pub fn is_real(&self) -> bool {
        self.num
            .iter()
            .all(|((a, b), c)| self.num.get(&(*b, *a)).cloned().unwrap_or_default() == c.conj())
    }

    /// Pointwise product.
    pub fn mul(&self, other: &RationalSymbol) -> RationalSymbol {
        RationalSymbol {
            num: poly_mul(&self.num, &other.num),
            denom_power: self.denom_power + other.denom_power,
        }
    }

    /// Value at `z` in floating point.
    pub fn eval_f64(&self, re: f64, im: f64) -> (f64, f64) {
        let z = cplx::new(re, im);
        let zb = cplx::new(re, -im);
        let mut acc = cplx::new(0.0, 0.0);
        for ((a, b), c) in &self.num {
            let (cr, ci) = c.to_f64_parts();
            let term = cplx::mul(
                cplx::new(cr, ci),
                cplx::mul(cplx::pow(z, *a), cplx::pow(zb, *b)),
            );
            acc = (acc.0 + term.0, acc.1 + term.1);
        }
        let scale = (1.0 + re * re + im * im).powi(-(self.denom_power as i32));
        (acc.0 * scale, acc.1 * scale)
    }

    /// Value at `z = ∞` (the limit exists because `a, b ≤ d`).
    pub fn value_at_infinity(&self) -> Coefficient {
        let d = self.denom_power;
        self.num.get(&(d, d)).cloned().unwrap_or_default()
    }

    /// Taylor jets at the origin up to total degree `order`.
    pub fn jets(&self, order: u32) -> FunctionJets {
        let d = self.denom_power;
        let mut terms = Vec::new();
        for ((a, b), c) in &self.num {
            let mut k = 0;
            while a + b + 2 * k <= order {
                // (1 + t)^{−d} = Σ_k (−1)^k C(d+k−1, k) t^k.
                let coef = if d == 0 {
                    if k == 0 {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                } else {
                    let s = if k % 2 == 0 {
                        BigInt::one()
                    } else {
                        -BigInt::one()
                    };
                    s * binomial(d + k - 1, k)
                };
                if !coef.is_zero() {
                    terms.push((
                        TermKey::new(
                            0,
                            MultiIndex::from_slice(&[a + k]),
                            MultiIndex::from_slice(&[b + k]),
                        ),
                        c * &Coefficient::from_bigint(coef),
                    ));
                }
                k += 1;
            }
        }
        FunctionJets::new(1, order, terms).expect("dimension 1")
    }
}

impl fmt::Display for RationalSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .num
            .iter()
            .map(|((a, b), c)| format!("{c}·z^{a}·z̄^{b}"))
            .collect();
        let body = if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        };
        write!(f, "({body})/(1+|z|^2)^{}", self.denom_power)
    }
}

/// Minimal complex helpers for floating-point evaluation.
mod cplx {
    pub type C = (f64, f64);
    pub fn new(re: f64, im: f64) -> C {
        (re, im)
    }
    pub fn mul(a: C, b: C) -> C {
        (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
    }
    pub fn pow(a: C, e: u32) -> C {
        (0..e).fold((1.0, 0.0), |acc, _| mul(acc, a))
    }
}

/// `⟨z^p, z^q⟩_m = δ_{pq} m p! (m−p)! / (m+1)!`.
pub fn cp1_inner(p: u32, q: u32) -> FactorialRational {
    if p != q {
        return FactorialRational::zero();
    }
    let den: Vec<i64> = (-(p as i64) + 1..=1).collect();
    FactorialRational::new(Coefficient::from_bigint(factorial(p)), vec![0], den)
}

/// `⟨f z^p, z^q⟩_m` as a finite sum of closed forms.
pub fn cp1_pairing(f: &RationalSymbol, p: u32, q: u32) -> FactorialSum {
    let d = f.denom_power as i64;
    let mut out = FactorialSum::zero();
    for ((a, b), c) in &f.num {
        if p + a != q + b {
            continue;
        }
        let s = (p + a) as i64;
        let den: Vec<i64> = (d - s + 1..=d + 1).collect();
        out.push(FactorialRational::new(
            c * &Coefficient::from_bigint(factorial(p + a)),
            vec![0],
            den,
        ));
    }
    out
}

/// Entry `t_{qp}(m)` of `T_{f,m} z^p = Σ_q t_{qp} z^q`, valid for `m ≥ max(p, q)`.
pub fn toeplitz_entry(f: &RationalSymbol, q: u32, p: u32) -> FactorialSum {
    let gram = cp1_inner(q, q).recip().expect("Gram entries are nonzero");
    cp1_pairing(f, p, q).mul_single(&gram)
}

/// Rows `q` with a possibly nonzero `t_{qp}`.
fn band(f: &RationalSymbol, p: u32) -> Vec<u32> {
    let mut qs: Vec<u32> = f
        .num
        .keys()
        .filter_map(|(a, b)| (p + a).checked_sub(*b))
        .collect();
    qs.sort_unstable();
    qs.dedup();
    qs
}

/// `⟨T_{f,m} T_{g,m} z^p, z^q⟩_m` for symbolic `m ≥ p + (band width)`.
pub fn cp1_composition(f: &RationalSymbol, g: &RationalSymbol, p: u32, q: u32) -> FactorialSum {
    let mut out = FactorialSum::zero();
    for r in band(g, p) {
        let t = toeplitz_entry(g, r, p);
        out = out.add(&t.mul(&cp1_pairing(f, r, q)));
    }
    out
}

/// The coefficient of `z^q` in `T_{f,m} T_{g,m} z^p`, i.e. the composition's
/// matrix element normalized by the Gram diagonal.
pub fn cp1_composition_entry(
    f: &RationalSymbol,
    g: &RationalSymbol,
    p: u32,
    q: u32,
) -> FactorialSum {
    let mut out = FactorialSum::zero();
    for r in band(g, p) {
        out = out.add(&toeplitz_entry(g, r, p).mul(&toeplitz_entry(f, q, r)));
    }
    out
}

/// `T_{f,m}` in the monomial basis `{z^p}_{p ≤ m}`, stored sparsely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToeplitzMatrix {
    pub m: u32,
    pub entries: BTreeMap<(u32, u32), Coefficient>,
}

impl ToeplitzMatrix {
    /// Entry `(q, p)`: the coefficient of `z^q` in `T z^p`.
    pub fn get(&self, q: u32, p: u32) -> Coefficient {
        self.entries.get(&(q, p)).cloned().unwrap_or_default()
    }

    pub fn size(&self) -> usize {
        self.m as usize + 1
    }

    /// Dense row-major floating-point copy.
    pub fn to_dense_f64(&self) -> Vec<Vec<(f64, f64)>> {
        let n = self.size();
        let mut out = vec![vec![(0.0, 0.0); n]; n];
        for ((q, p), c) in &self.entries {
            out[*q as usize][*p as usize] = c.to_f64_parts();
        }
        out
    }

    /// Matrix of the operator in the basis orthonormalized by the Gram
    /// diagonal, where a real symbol gives a Hermitian matrix.
    pub fn orthonormal_f64(&self) -> Vec<Vec<(f64, f64)>> {
        let n = self.size();
        let norms: Vec<f64> = (0..n as u32)
            .map(|p| {
                cp1_inner(p, p)
                    .eval(self.m as i64)
                    .expect("p ≤ m")
                    .to_f64_parts()
                    .0
                    .sqrt()
            })
            .collect();
        let mut out = self.to_dense_f64();
        for (q, row) in out.iter_mut().enumerate() {
            for (p, v) in row.iter_mut().enumerate() {
                let s = norms[q] / norms[p];
                *v = (v.0 * s, v.1 * s);
            }
        }
        out
    }
}

/// Exact `T_{f,m}` for a numeric `m ≥ 1`.
pub fn cp1_toeplitz(m: u32, f: &RationalSymbol) -> Result<ToeplitzMatrix> {
    if m == 0 {
        return Err(Error::Precondition("tensor power must be ≥ 1".into()));
    }
    let mut entries = BTreeMap::new();
    for p in 0..=m {
        for q in band(f, p).into_iter().filter(|&q| q <= m) {
            let v = toeplitz_entry(f, q, p).eval(m as i64)?;
            if !v.is_zero() {
                entries.insert((q, p), v);
            }
        }
    }
    Ok(ToeplitzMatrix { m, entries })
}

/// The monomial `z^p` as a coefficient vector of length `m + 1`; on the
/// projective line it is an exact normalized peak section at the origin.
pub fn peak_section(m: u32, p: u32) -> Result<Vec<Coefficient>> {
    if p > m {
        return Err(Error::Precondition(format!(
            "peak section degree {p} exceeds tensor power {m}"
        )));
    }
    let mut v = vec![Coefficient::zero(); m as usize + 1];
    v[p as usize] = Coefficient::one();
    Ok(v)
}

/// Pulls `f` back by the isometry `z ↦ (z + w)/(1 − w̄ z)` taking `0` to `w`.
pub fn mobius_pullback(f: &RationalSymbol, w: &Coefficient) -> RationalSymbol {
    if w.is_zero() {
        return f.clone();
    }
    let d = f.denom_power;
    let one = Coefficient::one();
    let z_plus_w: Poly = Poly::from([((1, 0), one.clone()), ((0, 0), w.clone())]);
    let one_minus_wbar_z: Poly = Poly::from([((0, 0), one.clone()), ((1, 0), -w.conj())]);
    let zb_plus_wb: Poly = Poly::from([((0, 1), one.clone()), ((0, 0), w.conj())]);
    let one_minus_w_zb: Poly = Poly::from([((0, 0), one), ((0, 1), -w.clone())]);
    let mut num = Poly::new();
    for ((a, b), c) in &f.num {
        let t = poly_mul(
            &poly_mul(
                &poly_pow(&z_plus_w, *a),
                &poly_pow(&one_minus_wbar_z, d - a),
            ),
            &poly_mul(
                &poly_pow(&zb_plus_wb, *b),
                &poly_pow(&one_minus_w_zb, d - b),
            ),
        );
        for (k, v) in t {
            let e = num.entry(k).or_default();
            *e += &(c * &v);
        }
    }
    let norm = BigRational::one() + w.norm_sqr();
    let scale = Coefficient::real(num_traits::pow(norm, d as usize).recip());
    let num = num
        .into_iter()
        .map(|(k, v)| (k, &v * &scale))
        .filter(|(_, v)| !v.is_zero())
        .collect();
    RationalSymbol {
        num,
        denom_power: d,
    }
}

/// Outcome of a log-log decay fit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FitOutcome {
    /// Every residual vanished exactly.
    Exact,
    Slope(f64),
}

impl fmt::Display for FitOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitOutcome::Exact => write!(f, "exact"),
            FitOutcome::Slope(s) => write!(f, "{s:.4}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ResidualRow {
    pub m: u32,
    pub exact: Coefficient,
    pub predicted: Coefficient,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct ResidualFit {
    pub p: u32,
    pub q: u32,
    pub order: i32,
    pub rows: Vec<ResidualRow>,
    pub fit: FitOutcome,
}

/// `Σ_{k ≤ order} c_k m^{−k}` for integer `k`.
pub fn partial_sum(series: &HbarSeries, order: i32, m: u32) -> Result<Coefficient> {
    let inv = BigRational::new(BigInt::one(), BigInt::from(m));
    series.truncated(2 * order).eval(&inv)
}

/// Least-squares slope of `log|r|` against `log m` over the nonzero residuals.
pub fn fit_decay(points: &[(u32, f64)]) -> Result<FitOutcome> {
    let nz: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, r)| *r != 0.0)
        .map(|(m, r)| ((*m as f64).ln(), r.abs().ln()))
        .collect();
    if nz.is_empty() {
        return Ok(FitOutcome::Exact);
    }
    if nz.len() < 2 {
        return Err(Error::Precondition(
            "degenerate fit: fewer than two nonzero residuals".into(),
        ));
    }
    let n = nz.len() as f64;
    let mx = nz.iter().map(|p| p.0).sum::<f64>() / n;
    let my = nz.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = nz.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = nz.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(FitOutcome::Slope(sxy / sxx))
}

/// For each predicted matrix element `(p, q)`, the exact composition entry
/// (coefficient of `z^q` in `T_f T_g z^p`) at each `m`, minus the
/// prediction's partial sum through `ℏ^order`, and the fitted decay order of
/// that residual.
pub fn composition_residual(
    f: &RationalSymbol,
    g: &RationalSymbol,
    ms: &[u32],
    order: i32,
    predicted: &BTreeMap<(u32, u32), HbarSeries>,
) -> Result<Vec<ResidualFit>> {
    let mut out = Vec::new();
    for ((p, q), series) in predicted {
        if series.trunc() < 2 * order {
            return Err(Error::InsufficientOrder {
                needed: 2 * order.max(0) as u32,
                available: series.trunc().max(0) as u32,
            });
        }
        let closed = cp1_composition_entry(f, g, *p, *q);
        let mut rows = Vec::new();
        for &m in ms {
            let exact = closed.eval(m as i64)?;
            let predicted = partial_sum(series, order, m)?;
            let residual = (&exact - &predicted).abs_f64();
            rows.push(ResidualRow {
                m,
                exact,
                predicted,
                residual,
            });
        }
        let fit = fit_decay(&rows.iter().map(|r| (r.m, r.residual)).collect::<Vec<_>>())?;
        out.push(ResidualFit {
            p: *p,
            q: *q,
            order,
            rows,
            fit,
        });
    }
    Ok(out)
}

/// Renders a coefficient as `"num/den"` (real part) or `"re+im i"` pairs.
pub fn exact_string(c: &Coefficient) -> String {
    if c.is_real() {
        format_rational(&c.re)
    } else {
        let sign = if c.im.is_negative() { "-" } else { "+" };
        format!(
            "{}{}{}i",
            format_rational(&c.re),
            sign,
            format_rational(&c.im.abs())
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeffs(h: &HbarSeries, kmax: i32) -> Vec<Coefficient> {
        h.coeff_vec(kmax)
    }

    fn ints(v: &[i64]) -> Vec<Coefficient> {
        v.iter().map(|&x| Coefficient::from_int(x)).collect()
    }

    #[test]
    fn inner_examples() {
        assert_eq!(cp1_inner(0, 0).to_string(), "1·m/((m+1))");
        assert!(cp1_inner(1, 2).is_zero());
        assert_eq!(cp1_inner(1, 1).eval(7).unwrap(), Coefficient::ratio(1, 8));
        assert_eq!(
            cp1_inner(3, 3).eval(10).unwrap(),
            Coefficient::ratio(6 * 10 * 5040, 39916800)
        );
    }

    #[test]
    fn expansion_examples() {
        assert_eq!(
            coeffs(&cp1_inner(0, 0).expand(4), 4),
            ints(&[1, -1, 1, -1, 1])
        );
        let x = FactorialRational::new(1.into(), vec![], vec![1]);
        assert_eq!(
            coeffs(&expand_at_infinity(&x, 4), 4),
            ints(&[0, 1, -1, 1, -1])
        );
        let c = FactorialRational::constant(Coefficient::ratio(2, 9));
        assert_eq!(c.expand(3).to_string(), "2/9");
    }

    #[test]
    fn toeplitz_examples() {
        let one = RationalSymbol::constant(1.into());
        let t = cp1_toeplitz(5, &one).unwrap();
        assert_eq!(t.entries.len(), 6);
        assert!(t.entries.iter().all(|((q, p), c)| q == p && c.is_one()));
        let f = RationalSymbol::t_over_one_plus_t();
        let m = 9;
        let t = cp1_toeplitz(m, &f).unwrap();
        for p in 0..=m {
            assert_eq!(t.get(p, p), Coefficient::ratio(p as i64 + 1, m as i64 + 2));
        }
        assert_eq!(t.entries.len(), m as usize + 1);
    }

    #[test]
    fn peak_section_examples() {
        assert_eq!(peak_section(3, 0).unwrap()[0], Coefficient::one());
        let v = peak_section(4, 2).unwrap();
        assert_eq!(v.iter().filter(|c| !c.is_zero()).count(), 1);
        assert!(peak_section(2, 3).is_err());
    }

    #[test]
    fn mobius_examples() {
        let f = RationalSymbol::t_over_one_plus_t();
        assert_eq!(mobius_pullback(&f, &Coefficient::zero()), f);
        let one = RationalSymbol::constant(Coefficient::ratio(3, 2));
        assert_eq!(mobius_pullback(&one, &Coefficient::ratio(1, 2)), one);
        let w = Coefficient::complex((1, 2), (1, 3));
        let g = mobius_pullback(&f, &w);
        let at0 = g.terms().get(&(0, 0)).cloned().unwrap_or_default();
        let n = w.norm_sqr();
        let expected = Coefficient::real(&n / (BigRational::one() + &n));
        assert_eq!(at0, expected);
        assert!(g.is_real());
        // ∞ maps to −1/w̄, where f = 1/(1+|w|²).
        let expected = Coefficient::real((BigRational::one() + &n).recip());
        assert_eq!(g.value_at_infinity(), expected);
    }

    #[test]
    fn symbol_validation() {
        assert!(RationalSymbol::new([((2, 0), Coefficient::one())], 1).is_err());
    }

    #[test]
    fn composition_of_units_is_exact() {
        let one = RationalSymbol::constant(1.into());
        let predicted = BTreeMap::from([
            ((0, 0), HbarSeries::one(6)),
            ((2, 2), HbarSeries::one(6)),
            ((1, 2), HbarSeries::zero(6)),
        ]);
        let fits = composition_residual(&one, &one, &[32, 64, 128], 3, &predicted).unwrap();
        assert!(fits.iter().all(|f| f.fit == FitOutcome::Exact));
    }

    #[test]
    fn composition_entry_of_diagonal_symbol() {
        let f = RationalSymbol::t_over_one_plus_t();
        let e = cp1_composition_entry(&f, &f, 2, 2);
        assert_eq!(e.eval(10).unwrap(), Coefficient::ratio(9, 144));
        assert!(cp1_composition_entry(&f, &f, 1, 2).is_structurally_zero());
        // Un-normalized pairing carries the Gram factor.
        let raw = cp1_composition(&f, &f, 0, 0).eval(10).unwrap();
        assert_eq!(raw, Coefficient::ratio(1, 144) * Coefficient::ratio(10, 11));
    }
}
