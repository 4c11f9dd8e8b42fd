//! Jets of a Kähler potential and of functions at a marked point.
//!
//! Jets are stored as [`WickSeries`] in the variables `z, z̄` (renamed
//! `y, ȳ` when they enter the Wick algebra), with `k2 = 0` for geometric
//! data. Substitution of holomorphic coordinate changes is truncated formal
//! composition; since every coordinate map has no constant term, it is
//! exact up to the jet order.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::Rng;

use crate::error::{Error, Result};
use crate::index::{MultiIndex, TermKey};
use crate::integral::WeightSeries;
use crate::random::{self, SuiteRng};
use crate::scalar::Coefficient;
use crate::series::{TermRecord, WickSeries};

/// Jets of a (possibly `ℏ`-weighted) function at the marked point.
/// `order` is the highest degree to which the jets are known;
/// [`FunctionJets::EXACT`] marks a polynomial known to all orders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionJets {
    dim: usize,
    order: u32,
    terms: BTreeMap<TermKey, Coefficient>,
}

impl FunctionJets {
    pub const EXACT: u32 = u32::MAX;

    /// Jets from `(k2, I, J) → c` data known up to degree `order`. Terms
    /// above `order` are dropped.
    pub fn new<I>(dim: usize, order: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (TermKey, Coefficient)>,
    {
        let mut map: BTreeMap<TermKey, Coefficient> = BTreeMap::new();
        for (k, c) in terms {
            if k.i.len() != dim || k.j.len() != dim {
                return Err(Error::DimensionMismatch(dim, k.i.len().max(k.j.len())));
            }
            if order != Self::EXACT && k.degree() > order as i32 {
                continue;
            }
            let e = map.entry(k.clone()).or_default();
            *e += &c;
            if e.is_zero() {
                map.remove(&k);
            }
        }
        Ok(FunctionJets {
            dim,
            order,
            terms: map,
        })
    }

    /// A polynomial, known exactly.
    pub fn polynomial(w: &WickSeries) -> Self {
        FunctionJets {
            dim: w.dim(),
            order: Self::EXACT,
            terms: w.terms().clone(),
        }
    }

    /// Jets read off a series known up to its truncation degree.
    pub fn from_series(w: &WickSeries) -> Self {
        FunctionJets {
            dim: w.dim(),
            order: w.trunc().max(0) as u32,
            terms: w.terms().clone(),
        }
    }

    pub fn constant(dim: usize, c: Coefficient) -> Self {
        Self::new(dim, Self::EXACT, [(TermKey::constant(dim), c)]).expect("dimension matches")
    }

    /// The coordinate function `z_i`.
    pub fn z(dim: usize, i: usize) -> Self {
        Self::polynomial(&WickSeries::y(dim, 1, i))
    }

    /// The coordinate function `z̄_i`.
    pub fn zbar(dim: usize, i: usize) -> Self {
        Self::polynomial(&WickSeries::ybar(dim, 1, i))
    }

    pub fn from_records(dim: usize, order: u32, records: &[TermRecord]) -> Result<Self> {
        let mut terms = Vec::new();
        for r in records {
            terms.push((r.key(dim)?, r.coefficient()?));
        }
        Self::new(dim, order, terms)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_exact(&self) -> bool {
        self.order == Self::EXACT
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TermKey, &Coefficient)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_holomorphic(&self) -> bool {
        self.terms.keys().all(|k| k.j.is_zero())
    }

    pub fn is_real(&self) -> bool {
        self.terms
            .iter()
            .all(|(k, c)| self.terms.get(&k.conjugate()).cloned().unwrap_or_default() == c.conj())
    }

    /// Value at the marked point as an `ℏ`-series coefficient list
    /// (`(k2, c)` pairs of the `I = J = 0` jets).
    pub fn value_at_point(&self) -> Vec<(i32, Coefficient)> {
        self.terms
            .iter()
            .filter(|(k, _)| k.is_constant_in_y())
            .map(|(k, c)| (k.k2, c.clone()))
            .collect()
    }

    pub fn to_records(&self) -> Vec<TermRecord> {
        self.to_series_unchecked(i32::MAX).to_records()
    }

    fn to_series_unchecked(&self, trunc: i32) -> WickSeries {
        WickSeries::from_terms(
            self.dim,
            trunc,
            self.terms
                .iter()
                .filter(|(k, _)| k.degree() <= trunc)
                .map(|(k, c)| (k.clone(), c.clone())),
        )
        .expect("filtered to trunc")
    }
}

/// `J_f = Σ 1/(I!J!) ∂^{I}∂̄^{J} f(z₀) y^I ȳ^J` truncated at `trunc`. Jets are
/// stored as Taylor coefficients, so this is a transcription; it fails if
/// `f` is not known to degree `trunc`.
pub fn function_to_wick(f: &FunctionJets, trunc: i32) -> Result<WickSeries> {
    if !f.is_exact() && (f.order as i64) < trunc as i64 {
        return Err(Error::InsufficientOrder {
            needed: trunc.max(0) as u32,
            available: f.order,
        });
    }
    Ok(f.to_series_unchecked(trunc))
}

/// Jets of the potential `φ = −log h(e, e)` and of the volume-log density `ψ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialJets {
    dim: usize,
    order: u32,
    varphi: WickSeries,
    psi: Option<WickSeries>,
    normalized: bool,
}

impl PotentialJets {
    /// Validates reality and computes the normalization flag. `ψ` is filled
    /// in whenever the `(1,1)` part is the identity.
    pub fn new(varphi: WickSeries) -> Result<Self> {
        if varphi.trunc() < 2 {
            return Err(Error::InsufficientOrder {
                needed: 2,
                available: varphi.trunc().max(0) as u32,
            });
        }
        if varphi.iter().any(|(k, _)| k.k2 != 0) {
            return Err(Error::Precondition(
                "potential jets must not carry ℏ".into(),
            ));
        }
        if !varphi.is_real() {
            return Err(Error::Precondition("potential jets must be real".into()));
        }
        let mut p = PotentialJets {
            dim: varphi.dim(),
            order: varphi.trunc() as u32,
            normalized: is_k_normalized(&varphi),
            varphi,
            psi: None,
        };
        if p.order >= 2 && hermitian_part(&p.varphi) == identity(p.dim) {
            p.psi = Some(volume_log_jets(&p)?);
        }
        Ok(p)
    }

    pub fn from_records(dim: usize, order: u32, records: &[TermRecord]) -> Result<Self> {
        Self::new(WickSeries::from_records(dim, order as i32, 0, records)?)
    }

    /// `|z|²`.
    pub fn flat(dim: usize, order: u32) -> Self {
        Self::new(norm_squared(dim, order as i32)).expect("flat potential is valid")
    }

    /// `log(1 + |z|²)`, the Fubini-Study potential in affine coordinates.
    pub fn fubini_study(dim: usize, order: u32) -> Self {
        let t = norm_squared(dim, order as i32);
        let mut acc = WickSeries::zero(dim, order as i32);
        let mut power = t.clone();
        let mut k: i64 = 1;
        while !power.is_zero() {
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc = acc
                .add(&power.scale(&Coefficient::ratio(sign, k)))
                .expect("shapes");
            power = power.mul(&t).expect("shapes");
            k += 1;
        }
        Self::new(acc).expect("Fubini-Study jets are valid")
    }

    /// A random real potential with positive-definite `(1,1)` part whose
    /// Hermitian pivots are rational squares, plus random pluriharmonic and
    /// mixed jets up to `order`.
    pub fn random_real_analytic(dim: usize, order: u32, seed: u64) -> Self {
        let mut rng = random::rng(seed);
        Self::random_with(&mut rng, dim, order)
    }

    pub fn random_with(rng: &mut SuiteRng, dim: usize, order: u32) -> Self {
        let trunc = order as i32;
        let mut terms: Vec<(TermKey, Coefficient)> = Vec::new();
        // H = L diag(s²) L† with L unit lower triangular.
        let mut l = identity(dim);
        for (i, row) in l.iter_mut().enumerate() {
            for entry in row.iter_mut().take(i) {
                if rng.gen_bool(0.7) {
                    *entry = random::small_coefficient(rng);
                }
            }
        }
        let squares: Vec<Coefficient> = (0..dim)
            .map(|_| {
                let s = Coefficient::real(BigRational::new(
                    rng.gen_range(1..=3).into(),
                    rng.gen_range(1..=2).into(),
                ));
                &s * &s
            })
            .collect();
        for i in 0..dim {
            for j in 0..dim {
                let mut h = Coefficient::zero();
                for (k, d) in squares.iter().enumerate() {
                    h += &(&(&l[i][k] * d) * &l[j][k].conj());
                }
                terms.push((
                    TermKey::new(0, MultiIndex::unit(dim, i), MultiIndex::unit(dim, j)),
                    h,
                ));
            }
        }
        terms.push((TermKey::constant(dim), random::small_real(rng)));
        for total in 1..=order {
            for idx in MultiIndex::of_total(dim, total) {
                if rng.gen_bool(0.5) {
                    let c = random::small_coefficient(rng);
                    let key = TermKey::new(0, idx, MultiIndex::zeros(dim));
                    terms.push((key.conjugate(), c.conj()));
                    terms.push((key, c));
                }
            }
        }
        for total in 3..=order {
            for a in 1..total {
                for i in MultiIndex::of_total(dim, a) {
                    for j in MultiIndex::of_total(dim, total - a) {
                        if i > j || !rng.gen_bool(0.5) {
                            continue;
                        }
                        let key = TermKey::new(0, i.clone(), j.clone());
                        if i == j {
                            terms.push((key, random::small_real(rng)));
                        } else {
                            let c = random::small_coefficient(rng);
                            terms.push((key.conjugate(), c.conj()));
                            terms.push((key, c));
                        }
                    }
                }
            }
        }
        let varphi = WickSeries::from_terms(dim, trunc, terms).expect("degrees within order");
        Self::new(varphi).expect("random potential is real")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn varphi(&self) -> &WickSeries {
        &self.varphi
    }

    /// `ψ` jets (known to order `order − 2`), when the `(1,1)` part is the identity.
    pub fn psi(&self) -> Option<&WickSeries> {
        self.psi.as_ref()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Taylor coefficient of `z^I z̄^J` in `φ`.
    pub fn coeff(&self, i: &[u32], j: &[u32]) -> Coefficient {
        self.varphi.coeff(0, i, j)
    }
}

fn norm_squared(dim: usize, trunc: i32) -> WickSeries {
    let mut acc = WickSeries::zero(dim, trunc);
    for i in 0..dim {
        acc = acc
            .add(
                &WickSeries::y(dim, trunc, i)
                    .mul(&WickSeries::ybar(dim, trunc, i))
                    .expect("shapes"),
            )
            .expect("shapes");
    }
    acc
}

fn identity(n: usize) -> Vec<Vec<Coefficient>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Coefficient::one()
                    } else {
                        Coefficient::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// `H_{ij}`, the coefficient of `z_i z̄_j`.
fn hermitian_part(phi: &WickSeries) -> Vec<Vec<Coefficient>> {
    let n = phi.dim();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    phi.coefficient(&TermKey::new(
                        0,
                        MultiIndex::unit(n, i),
                        MultiIndex::unit(n, j),
                    ))
                })
                .collect()
        })
        .collect()
}

/// `|z|² + Σ a_{JK} z^J z̄^K` with `|J|, |K| ≥ 2`.
fn is_k_normalized(phi: &WickSeries) -> bool {
    let n = phi.dim();
    phi.iter().all(|(k, c)| {
        let (a, b) = (k.i.abs(), k.j.abs());
        if a == 1 && b == 1 {
            let i = k.i.entries().iter().position(|&e| e == 1);
            let j = k.j.entries().iter().position(|&e| e == 1);
            i == j && c.is_one()
        } else {
            k.k2 == 0 && a >= 2 && b >= 2
        }
    }) && (0..n).all(|i| {
        phi.coefficient(&TermKey::new(
            0,
            MultiIndex::unit(n, i),
            MultiIndex::unit(n, i),
        ))
        .is_one()
    })
}

/// Substitutes `z_i = maps[i](w)` (holomorphic, no constant term) into a
/// series in `z, z̄`; `z̄_i` becomes the conjugate of `maps[i]`.
pub fn substitute(phi: &WickSeries, maps: &[WickSeries]) -> Result<WickSeries> {
    let n = phi.dim();
    if maps.len() != n {
        return Err(Error::DimensionMismatch(n, maps.len()));
    }
    for m in maps {
        phi.check_compatible(m)?;
        if !m.is_holomorphic() || m.min_degree().is_some_and(|d| d < 1) {
            return Err(Error::Precondition(
                "coordinate maps must be holomorphic without constant term".into(),
            ));
        }
    }
    let trunc = phi.trunc();
    let one = WickSeries::one(n, trunc);
    let conj: Vec<WickSeries> = maps.iter().map(WickSeries::conjugate).collect();
    let mut hol_pow: Vec<Vec<WickSeries>> = vec![vec![one.clone()]; n];
    let mut anti_pow: Vec<Vec<WickSeries>> = vec![vec![one.clone()]; n];
    let mut acc = WickSeries::zero(n, trunc);
    for (k, c) in phi.iter() {
        let mut term = one.scale(c);
        for v in 0..n {
            let (a, b) = (k.i.get(v) as usize, k.j.get(v) as usize);
            while hol_pow[v].len() <= a {
                let next = hol_pow[v].last().unwrap().mul(&maps[v])?;
                hol_pow[v].push(next);
            }
            while anti_pow[v].len() <= b {
                let next = anti_pow[v].last().unwrap().mul(&conj[v])?;
                anti_pow[v].push(next);
            }
            term = term.mul(&hol_pow[v][a])?.mul(&anti_pow[v][b])?;
        }
        acc = acc.add(&term.shift_hbar(k.k2))?;
    }
    Ok(acc)
}

/// Output of [`k_normalize`]: K-normalized jets in coordinates `w`, the
/// coordinate change `z = coord_change(w)`, and the holomorphic frame change
/// `F(w)` with `φ_norm(w) = φ(z(w)) − F(w) − F̄(w)`.
#[derive(Clone, Debug)]
pub struct Normalization {
    pub jets: PotentialJets,
    pub coord_change: Vec<WickSeries>,
    pub frame_change: WickSeries,
}

/// Unit lower triangular `L` and real diagonal `D` with `H = L D L†`.
fn hermitian_ldl(h: &[Vec<Coefficient>]) -> Result<(Vec<Vec<Coefficient>>, Vec<BigRational>)> {
    let n = h.len();
    let mut l = identity(n);
    let mut d: Vec<BigRational> = Vec::with_capacity(n);
    for j in 0..n {
        let mut dj = h[j][j].clone();
        for k in 0..j {
            dj -= &Coefficient::real(&l[j][k].norm_sqr() * &d[k]);
        }
        if !dj.is_real() || !dj.re.is_positive() {
            return Err(Error::DegenerateMetric(format!(
                "(1,1) part is not positive definite (pivot {j} = {dj})"
            )));
        }
        let djr = dj.re.clone();
        for i in (j + 1)..n {
            let mut v = h[i][j].clone();
            for k in 0..j {
                v -= &(&l[i][k] * &l[j][k].conj()).scale(&d[k]);
            }
            l[i][j] = v.scale(&djr.recip());
        }
        d.push(djr);
    }
    Ok((l, d))
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    let (p, q) = (r.numer(), r.denom());
    let (sp, sq) = (p.sqrt(), q.sqrt());
    (&sp * &sp == *p && &sq * &sq == *q).then(|| BigRational::new(sp, sq))
}

/// Brings potential jets into K-coordinates with a K-frame:
/// `φ(w) = |w|² + Σ a_{JK} w^J w̄^K` with `|J|, |K| ≥ 2`, up to the jet order.
///
/// Steps: subtract the pluriharmonic part `g + ḡ`; a linear change turning
/// the `(1,1)` part into `|w|²` (its Hermitian pivots must be squares of
/// rationals so the change stays rational); then at each degree `d ≥ 3` a
/// change `w ↦ w + h(w)` with `h` homogeneous of degree `d − 1` removing
/// the `|J| = 1` jets (the `|I| = 1` ones follow by reality).
pub fn k_normalize(raw: &PotentialJets) -> Result<Normalization> {
    let n = raw.dim;
    let trunc = raw.order as i32;
    let phi = &raw.varphi;

    let mut frame = phi.filter(|k| k.j.is_zero());
    let c0 = phi.coefficient(&TermKey::constant(n));
    if !c0.is_zero() {
        let half = c0.scale(&BigRational::new(1.into(), 2.into()));
        frame = frame.sub(&WickSeries::constant(n, trunc, half))?;
    }
    let phi1 = phi.sub(&frame)?.sub(&frame.conjugate())?;

    let (l, d) = hermitian_ldl(&hermitian_part(&phi1))?;
    // z = A w with A = (Lᵀ)⁻¹ D^{−1/2}.
    let mut inv_lt = identity(n);
    #[allow(clippy::needless_range_loop)]
    for col in 0..n {
        for row in (0..n).rev() {
            // Solve Lᵀ x = e_col by back substitution.
            let mut v = if row == col {
                Coefficient::one()
            } else {
                Coefficient::zero()
            };
            for k in (row + 1)..n {
                v -= &(&l[k][row] * &inv_lt[k][col]);
            }
            inv_lt[row][col] = v;
        }
    }
    let mut coord: Vec<WickSeries> = Vec::with_capacity(n);
    for row in inv_lt.iter() {
        let mut zi = WickSeries::zero(n, trunc);
        for (k, dk) in d.iter().enumerate() {
            let s = rational_sqrt(dk).ok_or_else(|| {
                Error::Precondition(format!(
                    "Hermitian pivot {dk} of the (1,1) part is not a rational square"
                ))
            })?;
            let a = row[k].scale(&s.recip());
            zi = zi.add(&WickSeries::y(n, trunc, k).scale(&a))?;
        }
        coord.push(zi);
    }
    let mut current = substitute(&phi1, &coord)?;

    for deg in 3..=trunc {
        let mut step: Vec<WickSeries> = (0..n).map(|i| WickSeries::y(n, trunc, i)).collect();
        let mut changed = false;
        for (i, map) in step.iter_mut().enumerate() {
            let ei = MultiIndex::unit(n, i);
            for idx in MultiIndex::of_total(n, (deg - 1) as u32) {
                let c = current.coefficient(&TermKey::new(0, idx.clone(), ei.clone()));
                if c.is_zero() {
                    continue;
                }
                changed = true;
                let term = WickSeries::from_terms(
                    n,
                    trunc,
                    [(TermKey::new(0, idx, MultiIndex::zeros(n)), -c)],
                )?;
                *map = map.add(&term)?;
            }
        }
        if changed {
            current = substitute(&current, &step)?;
            coord = coord
                .iter()
                .map(|z| substitute(z, &step))
                .collect::<Result<_>>()?;
        }
    }

    let frame_change = substitute(&frame, &coord)?;
    let jets = PotentialJets::new(current)?;
    if !jets.normalized {
        return Err(Error::Precondition(
            "normalization did not reach K-form; input jets are inconsistent".into(),
        ));
    }
    Ok(Normalization {
        jets,
        coord_change: coord,
        frame_change,
    })
}

/// Jets of `ψ = log det(∂²φ/∂z_i∂z̄_j)`, known to order `order − 2`.
///
/// The metric at the point must be the identity (as it is in K-coordinates),
/// so that `ψ(z₀) = 0` and the series `tr log(I + X)` has rational
/// coefficients.
pub fn volume_log_jets(p: &PotentialJets) -> Result<WickSeries> {
    let n = p.dim;
    let trunc = p.order as i32 - 2;
    if trunc < 0 {
        return Err(Error::InsufficientOrder {
            needed: 2,
            available: p.order,
        });
    }
    let mut x: Vec<Vec<WickSeries>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let h = p
                .varphi
                .derivative_y(&MultiIndex::unit(n, i))
                .derivative_ybar(&MultiIndex::unit(n, j))
                .truncated(trunc)
                .with_lower_bound(0);
            let at_point = h.coefficient(&TermKey::constant(n));
            let expected = if i == j {
                Coefficient::one()
            } else {
                Coefficient::zero()
            };
            if at_point != expected {
                if i == j && at_point.is_zero() {
                    return Err(Error::DegenerateMetric(
                        "metric vanishes at the point".into(),
                    ));
                }
                return Err(Error::Precondition(
                    "volume-log jets need the metric to be the identity at the point; \
                     K-normalize first"
                        .into(),
                ));
            }
            row.push(h.sub(&WickSeries::constant(n, trunc, expected))?);
        }
        x.push(row);
    }
    let mut acc = WickSeries::zero(n, trunc);
    let mut power = x.clone();
    let mut k: i64 = 1;
    loop {
        let mut tr = WickSeries::zero(n, trunc);
        for (i, row) in power.iter().enumerate() {
            tr = tr.add(&row[i])?;
        }
        if power.iter().all(|r| r.iter().all(WickSeries::is_zero)) {
            break;
        }
        let sign = if k % 2 == 1 { 1 } else { -1 };
        acc = acc.add(&tr.scale(&Coefficient::ratio(sign, k)))?;
        let mut next = vec![vec![WickSeries::zero(n, trunc); n]; n];
        for i in 0..n {
            for j in 0..n {
                for (m, xm) in x.iter().enumerate() {
                    next[i][j] = next[i][j].add(&power[i][m].mul(&xm[j])?)?;
                }
            }
        }
        power = next;
        k += 1;
    }
    Ok(acc)
}

/// The formal weight `|y|² − J_φ + ℏ J_ψ` of K-normalized jets, truncated at
/// `trunc`, with its flags verified.
pub fn weight_series(p: &PotentialJets, trunc: i32) -> Result<WeightSeries> {
    if !p.normalized {
        return Err(Error::Precondition(
            "weight_series needs K-normalized jets".into(),
        ));
    }
    if (p.order as i64) < trunc as i64 {
        return Err(Error::InsufficientOrder {
            needed: trunc.max(0) as u32,
            available: p.order,
        });
    }
    let psi = match &p.psi {
        Some(psi) => psi.clone(),
        None => volume_log_jets(p)?,
    };
    let body = norm_squared(p.dim, trunc)
        .sub(&p.varphi.truncated(trunc))?
        .add(&psi.with_trunc(trunc).shift_hbar(2).with_lower_bound(0))?;
    let w = WeightSeries::new(body)?;
    if !(w.is_real() && w.is_toeplitz_admissible() && w.is_refined()) {
        return Err(Error::InadmissibleWeight(
            "assembled weight violates reality/admissibility/refinement".into(),
        ));
    }
    Ok(w)
}

/// `R_{ij̄kl̄}` read from the quartic jets `Σ R_{ij̄kl̄} z_i z_k z̄_j z̄_l`,
/// symmetric in `(i, k)` and in `(j, l)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvatureTensor {
    pub dim: usize,
    pub entries: BTreeMap<(usize, usize, usize, usize), Coefficient>,
}

impl CurvatureTensor {
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> Coefficient {
        self.entries.get(&(i, j, k, l)).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn curvature(p: &PotentialJets) -> Result<CurvatureTensor> {
    if !p.normalized {
        return Err(Error::Precondition(
            "curvature needs K-normalized jets".into(),
        ));
    }
    if p.order < 4 {
        return Err(Error::InsufficientOrder {
            needed: 4,
            available: p.order,
        });
    }
    let n = p.dim;
    let mut entries = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let hol = MultiIndex::unit(n, i).add(&MultiIndex::unit(n, k));
                    let anti = MultiIndex::unit(n, j).add(&MultiIndex::unit(n, l));
                    let c = p.varphi.coefficient(&TermKey::new(0, hol, anti));
                    if c.is_zero() {
                        continue;
                    }
                    let mult = (if i == k { 1 } else { 2 }) * (if j == l { 1 } else { 2 });
                    entries.insert(
                        (i, j, k, l),
                        c.scale(&BigRational::new(One::one(), mult.into())),
                    );
                }
            }
        }
    }
    Ok(CurvatureTensor { dim: n, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(t: i32, i: u32, j: u32, c: Coefficient) -> WickSeries {
        WickSeries::monomial(1, t, 0, &[i], &[j], c).unwrap()
    }

    #[test]
    fn fubini_study_is_already_normalized() {
        let fs = PotentialJets::fubini_study(1, 8);
        assert!(fs.is_normalized());
        let norm = k_normalize(&fs).unwrap();
        assert_eq!(norm.jets.varphi(), fs.varphi());
        assert_eq!(norm.coord_change[0], WickSeries::y(1, 8, 0));
        assert!(norm.frame_change.is_zero());
    }

    #[test]
    fn linear_terms_are_removed_by_the_frame() {
        let t = 4;
        let raw = mono(t, 1, 1, 1.into())
            .add(&WickSeries::y(1, t, 0))
            .unwrap()
            .add(&WickSeries::ybar(1, t, 0))
            .unwrap();
        let norm = k_normalize(&PotentialJets::new(raw).unwrap()).unwrap();
        assert_eq!(norm.jets.varphi(), &mono(t, 1, 1, 1.into()));
        assert_eq!(norm.frame_change, WickSeries::y(1, t, 0));
    }

    #[test]
    fn cubic_mixed_terms_are_removed_by_a_coordinate_change() {
        let t = 5;
        let raw = mono(t, 1, 1, 1.into())
            .add(&mono(t, 2, 1, 1.into()))
            .unwrap()
            .add(&mono(t, 1, 2, 1.into()))
            .unwrap();
        let norm = k_normalize(&PotentialJets::new(raw.clone()).unwrap()).unwrap();
        let z = &norm.coord_change[0];
        assert_eq!(z.coeff(0, &[1], &[0]), Coefficient::one());
        assert_eq!(z.coeff(0, &[2], &[0]), Coefficient::from_int(-1));
        assert!(norm.jets.is_normalized());
        let back = substitute(&raw, &norm.coord_change)
            .unwrap()
            .sub(&norm.frame_change)
            .unwrap()
            .sub(&norm.frame_change.conjugate())
            .unwrap();
        assert_eq!(&back, norm.jets.varphi());
    }

    #[test]
    fn volume_log_examples() {
        let flat = PotentialJets::flat(2, 6);
        assert!(volume_log_jets(&flat).unwrap().is_zero());
        let fs = PotentialJets::fubini_study(1, 8);
        let psi = volume_log_jets(&fs).unwrap();
        // −2 log(1 + t) = −2t + t² − 2t³/3 + t⁴/2 − ...
        let expected = PotentialJets::fubini_study(1, 6)
            .varphi()
            .scale(&Coefficient::from_int(-2));
        assert_eq!(psi, expected);
    }

    #[test]
    fn weight_examples() {
        let w = weight_series(&PotentialJets::flat(1, 6), 6).unwrap();
        assert!(w.body().is_zero());
        let fs = weight_series(&PotentialJets::fubini_study(1, 6), 6).unwrap();
        let b = fs.body();
        assert_eq!(b.coeff(0, &[2], &[2]), Coefficient::ratio(1, 2));
        assert_eq!(b.coeff(0, &[3], &[3]), Coefficient::ratio(-1, 3));
        assert_eq!(b.coeff(2, &[1], &[1]), Coefficient::from_int(-2));
        assert_eq!(b.coeff(2, &[2], &[2]), Coefficient::from_int(1));
        assert!(fs.is_real() && fs.is_toeplitz_admissible() && fs.is_refined());
        assert!(matches!(
            weight_series(&PotentialJets::fubini_study(1, 4), 6),
            Err(Error::InsufficientOrder { .. })
        ));
    }

    #[test]
    fn function_jets_examples() {
        let c = FunctionJets::constant(1, Coefficient::ratio(2, 3));
        assert_eq!(function_to_wick(&c, 4).unwrap().to_string(), "2/3");
        let re_z = WickSeries::y(1, 3, 0)
            .add(&WickSeries::ybar(1, 3, 0))
            .unwrap()
            .scale(&Coefficient::ratio(1, 2));
        let f = FunctionJets::polynomial(&re_z);
        assert_eq!(
            function_to_wick(&f, 3).unwrap().to_string(),
            "1/2 ȳ + 1/2 y"
        );
        let partial = FunctionJets::from_series(&re_z);
        assert!(function_to_wick(&partial, 6).is_err());
    }

    #[test]
    fn curvature_examples() {
        assert!(curvature(&PotentialJets::flat(2, 4)).unwrap().is_zero());
        let r = curvature(&PotentialJets::fubini_study(1, 4)).unwrap();
        assert_eq!(r.get(0, 0, 0, 0), Coefficient::ratio(-1, 2));
        assert_eq!(r.entries.len(), 1);
    }

    #[test]
    fn random_jets_normalize() {
        for seed in 0..5 {
            let raw = PotentialJets::random_real_analytic(2, 5, seed);
            let norm = k_normalize(&raw).unwrap();
            assert!(norm.jets.is_normalized());
            assert!(norm.jets.psi().is_some());
        }
    }
}
