//! Truncated graded series in `y, ȳ, ℏ` and in `ℏ` alone.
//!
//! A term `ℏ^k y^I ȳ^J` has degree `2k + |I| + |J|`. Every series carries
//! its truncation degree `trunc` and a degree floor `lower_bound`; terms
//! above `trunc` are discarded by every operation, and operations on
//! series with different `dim` or `trunc` are rejected.
//!
//! `ℏ`-exponents are stored doubled (`k2 = 2k`) so that the half-integer
//! powers produced by the normalized basis `y^I / sqrt(I! ℏ^{|I|})` need no
//! algebraic extension of the coefficient field.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::{MultiIndex, TermKey};
use crate::scalar::{format_rational, Coefficient};

pub(crate) type TermMap = HashMap<TermKey, Coefficient>;

pub(crate) fn accumulate(map: &mut TermMap, key: TermKey, c: Coefficient) {
    if c.is_zero() {
        return;
    }
    match map.entry(key) {
        std::collections::hash_map::Entry::Occupied(mut e) => {
            *e.get_mut() += &c;
            if e.get().is_zero() {
                e.remove();
            }
        }
        std::collections::hash_map::Entry::Vacant(e) => {
            e.insert(c);
        }
    }
}

/// Element of the (extended) Wick algebra, truncated at total degree `trunc`.
#[derive(Clone)]
pub struct WickSeries {
    dim: usize,
    trunc: i32,
    lower_bound: i32,
    terms: BTreeMap<TermKey, Coefficient>,
}

/// Equality is structural on `(dim, trunc, terms)`; the declared floor is
/// not part of the value.
impl PartialEq for WickSeries {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.trunc == other.trunc && self.terms == other.terms
    }
}

impl Eq for WickSeries {}

impl WickSeries {
    pub fn zero(dim: usize, trunc: i32) -> Self {
        WickSeries {
            dim,
            trunc,
            lower_bound: 0,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, trunc: i32, c: Coefficient) -> Self {
        let mut s = Self::zero(dim, trunc);
        if !c.is_zero() && trunc >= 0 {
            s.terms.insert(TermKey::constant(dim), c);
        }
        s
    }

    pub fn one(dim: usize, trunc: i32) -> Self {
        Self::constant(dim, trunc, Coefficient::one())
    }

    /// `c ℏ^{k2/2} y^I ȳ^J`. Fails if the term's degree exceeds `trunc`.
    pub fn monomial(
        dim: usize,
        trunc: i32,
        k2: i32,
        i: &[u32],
        j: &[u32],
        c: Coefficient,
    ) -> Result<Self> {
        if i.len() != dim {
            return Err(Error::DimensionMismatch(dim, i.len()));
        }
        if j.len() != dim {
            return Err(Error::DimensionMismatch(dim, j.len()));
        }
        let key = TermKey::new(k2, MultiIndex::from_slice(i), MultiIndex::from_slice(j));
        let degree = key.degree();
        if degree > trunc {
            return Err(Error::DegreeWindow {
                degree,
                lower: degree.min(0),
                upper: trunc,
            });
        }
        let mut s = Self::zero(dim, trunc);
        s.lower_bound = degree.min(0);
        if !c.is_zero() {
            s.terms.insert(key, c);
        }
        Ok(s)
    }

    /// The generator `y_i`.
    pub fn y(dim: usize, trunc: i32, i: usize) -> Self {
        let mut s = Self::zero(dim, trunc);
        if trunc >= 1 {
            s.terms.insert(
                TermKey::new(0, MultiIndex::unit(dim, i), MultiIndex::zeros(dim)),
                Coefficient::one(),
            );
        }
        s
    }

    /// The generator `ȳ_i`.
    pub fn ybar(dim: usize, trunc: i32, i: usize) -> Self {
        Self::y(dim, trunc, i).conjugate()
    }

    pub fn hbar(dim: usize, trunc: i32) -> Self {
        let mut s = Self::zero(dim, trunc);
        if trunc >= 2 {
            s.terms.insert(
                TermKey::new(2, MultiIndex::zeros(dim), MultiIndex::zeros(dim)),
                Coefficient::one(),
            );
        }
        s
    }

    /// Builds a series from accumulated terms, dropping zeros and anything
    /// above `trunc`. The floor is the smaller of `lower_bound` and the
    /// minimal degree present.
    pub(crate) fn from_map(dim: usize, trunc: i32, lower_bound: i32, map: TermMap) -> Self {
        let mut terms = BTreeMap::new();
        let mut lb = lower_bound;
        for (k, c) in map {
            if c.is_zero() {
                continue;
            }
            let d = k.degree();
            if d > trunc {
                continue;
            }
            lb = lb.min(d);
            terms.insert(k, c);
        }
        WickSeries {
            dim,
            trunc,
            lower_bound: lb,
            terms,
        }
    }

    /// Builds a series from `(key, coefficient)` pairs; duplicate keys add up.
    pub fn from_terms<I>(dim: usize, trunc: i32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (TermKey, Coefficient)>,
    {
        let mut map = TermMap::new();
        for (k, c) in terms {
            if k.i.len() != dim || k.j.len() != dim {
                return Err(Error::DimensionMismatch(dim, k.i.len().max(k.j.len())));
            }
            let degree = k.degree();
            if degree > trunc {
                return Err(Error::DegreeWindow {
                    degree,
                    lower: i32::MIN,
                    upper: trunc,
                });
            }
            accumulate(&mut map, k, c);
        }
        Ok(Self::from_map(dim, trunc, 0, map))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trunc(&self) -> i32 {
        self.trunc
    }

    pub fn lower_bound(&self) -> i32 {
        self.lower_bound
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TermKey, &Coefficient)> {
        self.terms.iter()
    }

    pub fn terms(&self) -> &BTreeMap<TermKey, Coefficient> {
        &self.terms
    }

    pub fn coefficient(&self, key: &TermKey) -> Coefficient {
        self.terms.get(key).cloned().unwrap_or_default()
    }

    /// Coefficient of `ℏ^{k2/2} y^I ȳ^J`.
    pub fn coeff(&self, k2: i32, i: &[u32], j: &[u32]) -> Coefficient {
        self.coefficient(&TermKey::new(
            k2,
            MultiIndex::from_slice(i),
            MultiIndex::from_slice(j),
        ))
    }

    pub fn min_degree(&self) -> Option<i32> {
        self.terms.keys().map(TermKey::degree).min()
    }

    pub fn max_degree(&self) -> Option<i32> {
        self.terms.keys().map(TermKey::degree).max()
    }

    pub fn min_k2(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.k2).min()
    }

    /// Element of plain `W`: non-negative floor and no negative `ℏ`-powers.
    pub fn is_plain(&self) -> bool {
        self.lower_bound >= 0 && self.terms.keys().all(|k| k.k2 >= 0)
    }

    pub fn is_holomorphic(&self) -> bool {
        self.terms.keys().all(|k| k.j.is_zero())
    }

    pub fn has_purely_holomorphic_terms(&self) -> bool {
        self.terms.keys().any(|k| k.j.is_zero())
    }

    pub fn is_real(&self) -> bool {
        self.conjugate() == *self
    }

    pub fn check_compatible(&self, other: &WickSeries) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        if self.trunc != other.trunc {
            return Err(Error::TruncationMismatch(self.trunc, other.trunc));
        }
        Ok(())
    }

    pub fn add(&self, other: &WickSeries) -> Result<WickSeries> {
        self.check_compatible(other)?;
        let mut map: TermMap = self.terms.clone().into_iter().collect();
        for (k, c) in &other.terms {
            accumulate(&mut map, k.clone(), c.clone());
        }
        Ok(Self::from_map(
            self.dim,
            self.trunc,
            self.lower_bound.min(other.lower_bound),
            map,
        ))
    }

    pub fn sub(&self, other: &WickSeries) -> Result<WickSeries> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> WickSeries {
        self.scale(&Coefficient::from_int(-1))
    }

    pub fn scale(&self, c: &Coefficient) -> WickSeries {
        if c.is_zero() {
            let mut z = WickSeries::zero(self.dim, self.trunc);
            z.lower_bound = self.lower_bound;
            return z;
        }
        WickSeries {
            dim: self.dim,
            trunc: self.trunc,
            lower_bound: self.lower_bound,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    /// Commutative (pointwise) product, truncated.
    pub fn mul(&self, other: &WickSeries) -> Result<WickSeries> {
        self.check_compatible(other)?;
        let lb = self.lower_bound + other.lower_bound;
        let mut map = TermMap::new();
        let rhs = by_degree(&other.terms);
        for (ka, ca) in &self.terms {
            let room = self.trunc - ka.degree();
            for (_, kb, cb) in rhs.iter().take_while(|(d, _, _)| *d <= room) {
                let key = TermKey::new(ka.k2 + kb.k2, ka.i.add(&kb.i), ka.j.add(&kb.j));
                accumulate(&mut map, key, ca * *cb);
            }
        }
        Ok(Self::from_map(self.dim, self.trunc, lb, map))
    }

    /// Multiplication by `ℏ^{k2/2}`. Dividing (`k2 < 0`) keeps `trunc`, so
    /// the result is exact as a polynomial but the top `-k2` degrees may be
    /// incomplete relative to an untruncated source.
    pub fn shift_hbar(&self, k2: i32) -> WickSeries {
        let map: TermMap = self
            .terms
            .iter()
            .map(|(k, c)| (TermKey::new(k.k2 + k2, k.i.clone(), k.j.clone()), c.clone()))
            .collect();
        Self::from_map(self.dim, self.trunc, self.lower_bound + k2, map)
    }

    /// Complex conjugation `c ℏ^k y^I ȳ^J ↦ c̄ ℏ^k y^J ȳ^I`.
    pub fn conjugate(&self) -> WickSeries {
        WickSeries {
            dim: self.dim,
            trunc: self.trunc,
            lower_bound: self.lower_bound,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.conjugate(), c.conj()))
                .collect(),
        }
    }

    /// Drops every term of degree above `d` and lowers `trunc` to `d`.
    pub fn truncated(&self, d: i32) -> WickSeries {
        let d = d.min(self.trunc);
        WickSeries {
            dim: self.dim,
            trunc: d,
            lower_bound: self.lower_bound,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.degree() <= d)
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// Re-labels the series with a larger truncation degree. Only valid for
    /// series known exactly (polynomials), e.g. generators and literals.
    pub fn with_trunc(&self, trunc: i32) -> WickSeries {
        if trunc <= self.trunc {
            return self.truncated(trunc);
        }
        WickSeries {
            dim: self.dim,
            trunc,
            lower_bound: self.lower_bound,
            terms: self.terms.clone(),
        }
    }

    /// Resets the declared floor to `lb`, or to the minimal degree present
    /// if that is lower.
    pub(crate) fn with_lower_bound(mut self, lb: i32) -> WickSeries {
        self.lower_bound = self.min_degree().map_or(lb, |d| d.min(lb));
        self
    }

    /// Terms of degree exactly `d`.
    pub fn homogeneous_part(&self, d: i32) -> WickSeries {
        self.filter(|k| k.degree() == d)
    }

    pub fn filter(&self, mut keep: impl FnMut(&TermKey) -> bool) -> WickSeries {
        WickSeries {
            dim: self.dim,
            trunc: self.trunc,
            lower_bound: self.lower_bound,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// `∂_y^α`. Degrees drop by `|α|`, so the floor drops too.
    pub fn derivative_y(&self, alpha: &MultiIndex) -> WickSeries {
        let mut map = TermMap::new();
        for (k, c) in &self.terms {
            if let Some(rest) = k.i.checked_sub(alpha) {
                let f = k.i.falling(alpha);
                accumulate(
                    &mut map,
                    TermKey::new(k.k2, rest, k.j.clone()),
                    c * &Coefficient::from_bigint(f),
                );
            }
        }
        Self::from_map(
            self.dim,
            self.trunc,
            self.lower_bound - alpha.abs() as i32,
            map,
        )
    }

    /// `∂_ȳ^α`.
    pub fn derivative_ybar(&self, alpha: &MultiIndex) -> WickSeries {
        self.conjugate().derivative_y(alpha).conjugate()
    }

    /// `ℏ`-series of the terms with `I = J = 0`.
    pub fn constant_part(&self) -> HbarSeries {
        let mut out = HbarSeries::zero(self.trunc);
        for (k, c) in &self.terms {
            if k.is_constant_in_y() {
                out.terms.insert(k.k2, c.clone());
            }
        }
        out
    }

    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|(k, c)| TermRecord {
                k2: k.k2,
                i: k.i.entries().to_vec(),
                j: k.j.entries().to_vec(),
                re: format_rational(&c.re),
                im: format_rational(&c.im),
            })
            .collect()
    }

    /// Parses literal records. Every term must lie in `[lower_bound, trunc]`.
    pub fn from_records(
        dim: usize,
        trunc: i32,
        lower_bound: i32,
        records: &[TermRecord],
    ) -> Result<WickSeries> {
        let mut map = TermMap::new();
        for r in records {
            let key = r.key(dim)?;
            let degree = key.degree();
            if degree > trunc || degree < lower_bound {
                return Err(Error::DegreeWindow {
                    degree,
                    lower: lower_bound,
                    upper: trunc,
                });
            }
            accumulate(&mut map, key, r.coefficient()?);
        }
        Ok(Self::from_map(dim, trunc, lower_bound, map))
    }

    /// Canonical JSON text of the literal records.
    pub fn to_literal(&self) -> String {
        serde_json::to_string(&self.to_records()).expect("records serialize")
    }

    pub fn from_literal(dim: usize, trunc: i32, lower_bound: i32, text: &str) -> Result<Self> {
        let records: Vec<TermRecord> =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_records(dim, trunc, lower_bound, &records)
    }
}

/// Terms sorted by degree, for pruning products against the truncation.
pub(crate) fn by_degree(
    terms: &BTreeMap<TermKey, Coefficient>,
) -> Vec<(i32, &TermKey, &Coefficient)> {
    let mut v: Vec<_> = terms.iter().map(|(k, c)| (k.degree(), k, c)).collect();
    v.sort_by_key(|e| e.0);
    v
}

impl fmt::Display for WickSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (idx, (k, c)) in self.terms.iter().enumerate() {
            let factors = monomial_factors(self.dim, k);
            push_term(&mut out, idx == 0, c, &factors);
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

impl fmt::Debug for WickSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "WickSeries(dim={}, trunc={}, lb={}: {})",
            self.dim, self.trunc, self.lower_bound, self
        )
    }
}

fn hbar_factor(k2: i32) -> Option<String> {
    match k2 {
        0 => None,
        2 => Some("ℏ".to_string()),
        k2 if k2 % 2 == 0 => Some(format!("ℏ^{}", k2 / 2)),
        k2 => Some(format!("ℏ^({k2}/2)")),
    }
}

fn var_factor(name: &str, dim: usize, idx: usize, e: u32) -> Option<String> {
    if e == 0 {
        return None;
    }
    let base = if dim == 1 {
        name.to_string()
    } else {
        format!("{name}{}", idx + 1)
    };
    Some(if e == 1 { base } else { format!("{base}^{e}") })
}

fn monomial_factors(dim: usize, k: &TermKey) -> Vec<String> {
    let mut f = Vec::new();
    f.extend(hbar_factor(k.k2));
    for (idx, &e) in k.i.entries().iter().enumerate() {
        f.extend(var_factor("y", dim, idx, e));
    }
    for (idx, &e) in k.j.entries().iter().enumerate() {
        f.extend(var_factor("ȳ", dim, idx, e));
    }
    f
}

/// Appends `± c·factors` in canonical form (U+2212 for minus).
fn push_term(out: &mut String, first: bool, c: &Coefficient, factors: &[String]) {
    let (negative, mag) = if c.is_real() && c.re.is_negative() {
        (true, -c.clone())
    } else {
        (false, c.clone())
    };
    if first {
        if negative {
            out.push('−');
        }
    } else {
        out.push_str(if negative { " − " } else { " + " });
    }
    let body = factors.join(" ");
    if body.is_empty() {
        out.push_str(&mag.to_string());
    } else if mag.is_one() {
        out.push_str(&body);
    } else {
        out.push_str(&mag.to_string());
        out.push(' ');
        out.push_str(&body);
    }
}

/// One record of the series literal format:
/// `{"k2": int, "I": [..], "J": [..], "re": "p/q", "im": "p/q"}`.
/// `k2`, `J`, and `im` may be omitted (they default to zero).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    #[serde(default)]
    pub k2: i32,
    #[serde(rename = "I")]
    pub i: Vec<u32>,
    #[serde(rename = "J", default)]
    pub j: Vec<u32>,
    #[serde(default = "zero_literal")]
    pub re: String,
    #[serde(default = "zero_literal")]
    pub im: String,
}

fn zero_literal() -> String {
    "0".to_string()
}

impl TermRecord {
    pub fn key(&self, dim: usize) -> Result<TermKey> {
        if self.i.len() != dim {
            return Err(Error::Parse(format!(
                "record I={:?} has length {}, expected {dim}",
                self.i,
                self.i.len()
            )));
        }
        let j = if self.j.is_empty() {
            vec![0; dim]
        } else {
            self.j.clone()
        };
        if j.len() != dim {
            return Err(Error::Parse(format!(
                "record J={:?} has length {}, expected {dim}",
                self.j,
                self.j.len()
            )));
        }
        Ok(TermKey::new(
            self.k2,
            MultiIndex::from_slice(&self.i),
            MultiIndex::from_slice(&j),
        ))
    }

    pub fn coefficient(&self) -> Result<Coefficient> {
        Coefficient::parse_parts(&self.re, &self.im)
    }
}

/// Element of the holomorphic Bargmann-Fock space: a [`WickSeries`] with
/// no `ȳ` in any term.
#[derive(Clone, PartialEq, Eq)]
pub struct FockSeries(WickSeries);

impl FockSeries {
    pub fn new(w: WickSeries) -> Result<Self> {
        if !w.is_holomorphic() {
            return Err(Error::Precondition(
                "Fock series must not contain ȳ".to_string(),
            ));
        }
        Ok(FockSeries(w))
    }

    pub fn zero(dim: usize, trunc: i32) -> Self {
        FockSeries(WickSeries::zero(dim, trunc))
    }

    pub fn one(dim: usize, trunc: i32) -> Self {
        FockSeries(WickSeries::one(dim, trunc))
    }

    /// `c ℏ^{k2/2} y^I`.
    pub fn monomial(dim: usize, trunc: i32, k2: i32, i: &[u32], c: Coefficient) -> Result<Self> {
        Ok(FockSeries(WickSeries::monomial(
            dim,
            trunc,
            k2,
            i,
            &vec![0; dim],
            c,
        )?))
    }

    pub fn as_wick(&self) -> &WickSeries {
        &self.0
    }

    pub fn into_wick(self) -> WickSeries {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn trunc(&self) -> i32 {
        self.0.trunc()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_plain(&self) -> bool {
        self.0.is_plain()
    }

    /// Coefficient of `ℏ^{k2/2} y^I`.
    pub fn coeff(&self, k2: i32, i: &[u32]) -> Coefficient {
        self.0.coeff(k2, i, &vec![0; i.len()])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TermKey, &Coefficient)> {
        self.0.iter()
    }

    pub fn add(&self, other: &FockSeries) -> Result<FockSeries> {
        Ok(FockSeries(self.0.add(&other.0)?))
    }

    pub fn sub(&self, other: &FockSeries) -> Result<FockSeries> {
        Ok(FockSeries(self.0.sub(&other.0)?))
    }

    pub fn scale(&self, c: &Coefficient) -> FockSeries {
        FockSeries(self.0.scale(c))
    }

    pub fn truncated(&self, d: i32) -> FockSeries {
        FockSeries(self.0.truncated(d))
    }

    pub fn from_records(dim: usize, trunc: i32, records: &[TermRecord]) -> Result<Self> {
        Self::new(WickSeries::from_records(dim, trunc, 0, records)?)
    }
}

impl fmt::Display for FockSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for FockSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FockSeries({:?})", self.0)
    }
}

/// Truncated series in `ℏ` (half-integer powers allowed), keyed by `k2 = 2k`.
/// A term's degree is `k2`; nothing above `trunc` is stored.
#[derive(Clone, PartialEq, Eq)]
pub struct HbarSeries {
    trunc: i32,
    pub(crate) terms: BTreeMap<i32, Coefficient>,
}

impl HbarSeries {
    pub fn zero(trunc: i32) -> Self {
        HbarSeries {
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(trunc: i32) -> Self {
        Self::from_terms(trunc, [(0, Coefficient::one())])
    }

    pub fn from_terms<I: IntoIterator<Item = (i32, Coefficient)>>(trunc: i32, terms: I) -> Self {
        let mut out = Self::zero(trunc);
        for (k2, c) in terms {
            out.add_term(k2, c);
        }
        out
    }

    /// Integer-power coefficients `c_0 + c_1 ℏ + c_2 ℏ² + ...`.
    pub fn from_coeffs(trunc: i32, coeffs: &[Coefficient]) -> Self {
        Self::from_terms(
            trunc,
            coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| (2 * k as i32, c.clone())),
        )
    }

    pub(crate) fn add_term(&mut self, k2: i32, c: Coefficient) {
        if k2 > self.trunc || c.is_zero() {
            return;
        }
        let e = self.terms.entry(k2).or_default();
        *e += &c;
        if e.is_zero() {
            self.terms.remove(&k2);
        }
    }

    pub fn trunc(&self) -> i32 {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&i32, &Coefficient)> {
        self.terms.iter()
    }

    /// Coefficient of `ℏ^{k2/2}`.
    pub fn coeff_k2(&self, k2: i32) -> Coefficient {
        self.terms.get(&k2).cloned().unwrap_or_default()
    }

    /// Coefficient of `ℏ^k`.
    pub fn coeff(&self, k: i32) -> Coefficient {
        self.coeff_k2(2 * k)
    }

    pub fn min_k2(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn add(&self, other: &HbarSeries) -> HbarSeries {
        let mut out = HbarSeries::zero(self.trunc.min(other.trunc));
        for (k, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &HbarSeries) -> HbarSeries {
        self.add(&other.scale(&Coefficient::from_int(-1)))
    }

    pub fn scale(&self, c: &Coefficient) -> HbarSeries {
        let mut out = HbarSeries::zero(self.trunc);
        for (k, v) in &self.terms {
            out.add_term(*k, v * c);
        }
        out
    }

    /// Product truncated at the smaller `trunc`. Exact when both factors
    /// have no negative powers; otherwise only as a product of polynomials.
    pub fn mul(&self, other: &HbarSeries) -> HbarSeries {
        let mut out = HbarSeries::zero(self.trunc.min(other.trunc));
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                out.add_term(ka + kb, ca * cb);
            }
        }
        out
    }

    pub fn conj(&self) -> HbarSeries {
        HbarSeries {
            trunc: self.trunc,
            terms: self.terms.iter().map(|(k, c)| (*k, c.conj())).collect(),
        }
    }

    pub fn shift(&self, k2: i32) -> HbarSeries {
        let mut out = HbarSeries::zero(self.trunc);
        for (k, c) in &self.terms {
            out.add_term(k + k2, c.clone());
        }
        out
    }

    pub fn truncated(&self, trunc: i32) -> HbarSeries {
        let mut out = HbarSeries::zero(trunc.min(self.trunc));
        for (k, c) in &self.terms {
            out.add_term(*k, c.clone());
        }
        out
    }

    /// Evaluates the polynomial at a rational `ℏ`. Half-integer powers are
    /// rejected.
    pub fn eval(&self, hbar: &BigRational) -> Result<Coefficient> {
        let mut acc = Coefficient::zero();
        for (k2, c) in &self.terms {
            if k2 % 2 != 0 {
                return Err(Error::Precondition(
                    "cannot evaluate half-integer ℏ powers at a rational point".into(),
                ));
            }
            let k = k2 / 2;
            let p = if k >= 0 {
                num_traits::pow(hbar.clone(), k as usize)
            } else {
                num_traits::pow(hbar.recip(), (-k) as usize)
            };
            acc += &c.scale(&p);
        }
        Ok(acc)
    }

    /// `Σ c_k ℏ^k` as `[c_0, c_1, ...]` for `k = 0..=max_k`.
    pub fn coeff_vec(&self, max_k: i32) -> Vec<Coefficient> {
        (0..=max_k).map(|k| self.coeff(k)).collect()
    }
}

impl fmt::Display for HbarSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (idx, (k2, c)) in self.terms.iter().enumerate() {
            let factors: Vec<String> = hbar_factor(*k2).into_iter().collect();
            push_term(&mut out, idx == 0, c, &factors);
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

impl fmt::Debug for HbarSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HbarSeries(trunc={}: {})", self.trunc, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_printing() {
        let y = WickSeries::y(1, 4, 0);
        let yb = WickSeries::ybar(1, 4, 0);
        let h = WickSeries::hbar(1, 4);
        let s = y.mul(&yb).unwrap().sub(&h).unwrap();
        assert_eq!(s.to_string(), "y ȳ − ℏ");
        let t =
            WickSeries::monomial(2, 4, -1, &[1, 0], &[0, 2], Coefficient::ratio(-3, 2)).unwrap();
        assert_eq!(t.to_string(), "−3/2 ℏ^(-1/2) y1 ȳ2^2");
        assert_eq!(WickSeries::zero(1, 3).to_string(), "0");
        assert_eq!(
            HbarSeries::from_coeffs(6, &[1.into(), (-1).into(), 2.into()]).to_string(),
            "1 − ℏ + 2 ℏ^2"
        );
    }

    #[test]
    fn products_respect_truncation() {
        let y = WickSeries::y(1, 3, 0);
        let y2 = y.mul(&y).unwrap();
        let y4 = y2.mul(&y2).unwrap();
        assert!(y4.is_zero());
        assert_eq!(y2.mul(&y).unwrap().coeff(0, &[3], &[0]), Coefficient::one());
    }

    #[test]
    fn mismatches_are_rejected() {
        let a = WickSeries::one(1, 3);
        assert_eq!(
            a.add(&WickSeries::one(1, 4)),
            Err(Error::TruncationMismatch(3, 4))
        );
        assert_eq!(
            a.mul(&WickSeries::one(2, 3)),
            Err(Error::DimensionMismatch(1, 2))
        );
    }

    #[test]
    fn literal_round_trip_and_window() {
        let s = WickSeries::monomial(1, 6, 2, &[1], &[2], Coefficient::complex((2, 3), (-1, 5)))
            .unwrap();
        let text = s.to_literal();
        assert_eq!(text, r#"[{"k2":2,"I":[1],"J":[2],"re":"2/3","im":"-1/5"}]"#);
        assert_eq!(WickSeries::from_literal(1, 6, 0, &text).unwrap(), s);
        assert!(WickSeries::from_literal(1, 4, 0, &text).is_err());
        assert!(WickSeries::from_literal(2, 6, 0, &text).is_err());
    }

    #[test]
    fn derivatives() {
        let s = WickSeries::monomial(1, 8, 0, &[3], &[2], Coefficient::one()).unwrap();
        let d = s.derivative_y(&MultiIndex::from_slice(&[2]));
        assert_eq!(d.coeff(0, &[1], &[2]), Coefficient::from_int(6));
        let e = s.derivative_ybar(&MultiIndex::from_slice(&[1]));
        assert_eq!(e.coeff(0, &[3], &[1]), Coefficient::from_int(2));
    }

    #[test]
    fn fock_rejects_antiholomorphic() {
        assert!(FockSeries::new(WickSeries::ybar(1, 2, 0)).is_err());
        assert!(FockSeries::new(WickSeries::y(1, 2, 0)).is_ok());
    }
}
