//! Seeded generators of random exact inputs for the property suites.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::index::{MultiIndex, TermKey};
use crate::scalar::Coefficient;
use crate::series::WickSeries;

pub type SuiteRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A rational `p/q` with `|p| ≤ max_num`, `1 ≤ q ≤ max_den`.
pub fn small_rational(rng: &mut SuiteRng, max_num: i64, max_den: i64) -> BigRational {
    let p = rng.gen_range(-max_num..=max_num);
    let q = rng.gen_range(1..=max_den);
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// A nonzero complex rational with small parts.
pub fn small_coefficient(rng: &mut SuiteRng) -> Coefficient {
    loop {
        let c = Coefficient::new(small_rational(rng, 4, 3), small_rational(rng, 4, 3));
        if !c.is_zero() {
            return c;
        }
    }
}

/// A nonzero real rational with small parts.
pub fn small_real(rng: &mut SuiteRng) -> Coefficient {
    loop {
        let c = Coefficient::real(small_rational(rng, 4, 3));
        if !c.is_zero() {
            return c;
        }
    }
}

/// Random multi-index of length `n` with total `total`.
pub fn multi_index(rng: &mut SuiteRng, n: usize, total: u32) -> MultiIndex {
    let mut m = MultiIndex::zeros(n);
    for _ in 0..total {
        let i = rng.gen_range(0..n);
        m.set(i, m.get(i) + 1);
    }
    m
}

/// Random key of the given degree with non-negative `ℏ`-power.
pub fn key_of_degree(rng: &mut SuiteRng, n: usize, degree: u32) -> TermKey {
    let k = rng.gen_range(0..=degree / 2);
    let rest = degree - 2 * k;
    let a = rng.gen_range(0..=rest);
    TermKey::new(
        2 * k as i32,
        multi_index(rng, n, a),
        multi_index(rng, n, rest - a),
    )
}

/// Random monomial of degree `≤ trunc` with a nonzero complex coefficient.
pub fn monomial(rng: &mut SuiteRng, n: usize, trunc: i32) -> WickSeries {
    let d = rng.gen_range(0..=trunc.max(0) as u32);
    let key = key_of_degree(rng, n, d);
    WickSeries::from_terms(n, trunc, [(key, small_coefficient(rng))]).expect("degree ≤ trunc")
}

/// Random plain series with up to `terms` terms of degree in `[lo, hi]`.
pub fn series(
    rng: &mut SuiteRng,
    n: usize,
    trunc: i32,
    lo: u32,
    hi: u32,
    terms: usize,
) -> WickSeries {
    let hi = hi.min(trunc.max(0) as u32);
    let mut out = Vec::new();
    if lo <= hi {
        for _ in 0..terms {
            let d = rng.gen_range(lo..=hi);
            out.push((key_of_degree(rng, n, d), small_coefficient(rng)));
        }
    }
    WickSeries::from_terms(n, trunc, out).expect("degrees within trunc")
}

/// Random holomorphic series (no `ȳ`) with degrees in `[lo, hi]`.
pub fn holomorphic(
    rng: &mut SuiteRng,
    n: usize,
    trunc: i32,
    lo: u32,
    hi: u32,
    terms: usize,
) -> WickSeries {
    let hi = hi.min(trunc.max(0) as u32);
    let mut out = Vec::new();
    if lo <= hi {
        for _ in 0..terms {
            let d = rng.gen_range(lo..=hi);
            let k = rng.gen_range(0..=d / 2);
            let key = TermKey::new(
                2 * k as i32,
                multi_index(rng, n, d - 2 * k),
                MultiIndex::zeros(n),
            );
            out.push((key, small_coefficient(rng)));
        }
    }
    WickSeries::from_terms(n, trunc, out).expect("degrees within trunc")
}

/// Random real series `Σ c·m + c̄·m̄` built from `terms` random keys.
pub fn real_series(
    rng: &mut SuiteRng,
    n: usize,
    trunc: i32,
    lo: u32,
    hi: u32,
    terms: usize,
) -> WickSeries {
    let s = series(rng, n, trunc, lo, hi, terms);
    s.add(&s.conjugate()).expect("same shape")
}

/// Random real weight with degrees in `[lo, hi]` (`lo ≥ 3`) and no purely
/// holomorphic or anti-holomorphic terms. With `refined`, the `ℏ⁰` part also
/// avoids `|I| = 1` and `|J| = 1`.
pub fn weight_body(
    rng: &mut SuiteRng,
    n: usize,
    trunc: i32,
    lo: u32,
    hi: u32,
    terms: usize,
    refined: bool,
) -> WickSeries {
    let lo = lo.max(3);
    let hi = hi.min(trunc.max(0) as u32);
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < terms && tries < 50 * terms && lo <= hi {
        tries += 1;
        let d = rng.gen_range(lo..=hi);
        let key = key_of_degree(rng, n, d);
        let (i, j) = (key.i.abs(), key.j.abs());
        if i == 0 || j == 0 {
            continue;
        }
        if refined && key.k2 == 0 && (i == 1 || j == 1) {
            continue;
        }
        let c = small_coefficient(rng);
        out.push((key.conjugate(), c.conj()));
        out.push((key, c));
    }
    WickSeries::from_terms(n, trunc, out).expect("degrees within trunc")
}

/// Picks one element of a non-empty slice.
pub fn choose<'a, T>(rng: &mut SuiteRng, items: &'a [T]) -> &'a T {
    items.choose(rng).expect("non-empty")
}
