//! Local distinct-distance properties and the counting tools around them.
//!
//! A set has the `(k, l)` local property when every `k` of its points span at
//! least `l` distinct distances. The checks here are exhaustive (subject to
//! [`Caps`]) or seeded-random; none of them asserts an asymptotic bound.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::energy::{binomial_saturating, max_codistance_witness, MultiplicitySpectrum};
use crate::error::{check_cap, Error, Result};
use crate::geometry::{Point, PointSet};
use crate::pairs::{with_keys, PairKeys};
use crate::rational::Rational;

/// `(k, l)` with the optional `(c, d)` it was derived from.
///
/// With `(c, d)`, `k = c(d+1)` and `l = C(k,2) − dc + d + 1`. The two forms
/// are stored side by side and never reconciled.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalPropertyParams {
    pub k: usize,
    pub l: usize,
    pub c: Option<u32>,
    pub d: Option<u32>,
}

impl LocalPropertyParams {
    pub fn new(k: usize, l: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::invalid(format!("local property needs k >= 3, got {k}")));
        }
        if l < 1 || l > k * (k - 1) / 2 {
            return Err(Error::invalid(format!("l = {l} must lie in 1..=C({k},2)")));
        }
        Ok(LocalPropertyParams { k, l, c: None, d: None })
    }

    pub fn from_cd(c: u32, d: u32) -> Result<Self> {
        if c < 2 || d < 2 {
            return Err(Error::invalid("c and d must both be at least 2"));
        }
        let k = (c * (d + 1)) as usize;
        let l = k * (k - 1) / 2 - (d * c) as usize + (d + 1) as usize;
        let mut p = Self::new(k, l)?;
        p.c = Some(c);
        p.d = Some(d);
        Ok(p)
    }
}

/// Pairwise class ids (0 on the diagonal) for subset scans.
#[allow(clippy::needless_range_loop)]
fn class_matrix(p: &PointSet) -> Vec<Vec<u32>> {
    with_keys!(p.points(), |keys| {
        let n = keys.len();
        let mut intern = BTreeMap::new();
        let mut m = vec![vec![0u32; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let next = intern.len() as u32 + 1;
                let id = *intern.entry(keys.key(i, j)).or_insert(next);
                m[i][j] = id;
                m[j][i] = id;
            }
        }
        m
    })
}

fn distinct_in(ids: &[Vec<u32>], subset: &[usize], scratch: &mut Vec<u32>) -> usize {
    scratch.clear();
    for (a, &i) in subset.iter().enumerate() {
        for &j in &subset[a + 1..] {
            scratch.push(ids[i][j]);
        }
    }
    scratch.sort_unstable();
    scratch.dedup();
    scratch.len()
}

/// Minimum number of distinct distances and the first subset attaining it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetMinimum {
    pub min_distinct: usize,
    pub witness: Vec<Point>,
}

/// Minimum, over all `k`-subsets of `p`, of the number of distinct distances.
pub fn min_distinct_over_ksubsets(p: &PointSet, k: usize, caps: &Caps) -> Result<SubsetMinimum> {
    let n = p.len();
    if k > n {
        return Err(Error::invalid(format!("k = {k} exceeds |P| = {n}")));
    }
    check_cap("k-subsets", binomial_saturating(n as u128, k as u128), caps.subsets)?;
    if k == 0 {
        return Ok(SubsetMinimum { min_distinct: 0, witness: Vec::new() });
    }
    let ids = class_matrix(p);
    let best = (0..=n - k)
        .into_par_iter()
        .filter_map(|first| {
            let mut subset: Vec<usize> = (first..first + k).collect();
            let mut scratch = Vec::new();
            let mut best: Option<(usize, Vec<usize>)> = None;
            loop {
                let dcount = distinct_in(&ids, &subset, &mut scratch);
                if best.as_ref().is_none_or(|(b, _)| dcount < *b) {
                    best = Some((dcount, subset.clone()));
                }
                if !next_combination_tail(&mut subset, n) {
                    break;
                }
            }
            best
        })
        .reduce_with(|a, b| if (b.0, &b.1) < (a.0, &a.1) { b } else { a });
    let (min_distinct, witness) = best.expect("k <= n gives at least one subset");
    Ok(SubsetMinimum { min_distinct, witness: witness.iter().map(|&i| p.points()[i].clone()).collect() })
}

/// Advances `c[1..]` to the next combination in lexicographic order while
/// keeping `c[0]` fixed.
fn next_combination_tail(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 1 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// JSON report of a local-property check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalPropertyReport {
    pub property_holds: bool,
    pub witness_subset: Vec<Point>,
    pub min_distinct: usize,
}

/// Exhaustive `(k, l)` check; the witness is a minimising subset.
pub fn check_local_property(p: &PointSet, params: &LocalPropertyParams, caps: &Caps) -> Result<LocalPropertyReport> {
    let m = min_distinct_over_ksubsets(p, params.k, caps)?;
    Ok(LocalPropertyReport { property_holds: m.min_distinct >= params.l, witness_subset: m.witness, min_distinct: m.min_distinct })
}

/// Samples `trials` random `k`-subsets and returns the first one spanning
/// fewer than `l` distinct distances.
pub fn random_violation_search(p: &PointSet, params: &LocalPropertyParams, trials: usize, seed: u64) -> Result<Option<Vec<Point>>> {
    let n = p.len();
    if params.k > n {
        return Err(Error::invalid(format!("k = {} exceeds |P| = {n}", params.k)));
    }
    let ids = class_matrix(p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scratch = Vec::new();
    for _ in 0..trials {
        let mut subset = sample(&mut rng, n, params.k).into_vec();
        subset.sort_unstable();
        if distinct_in(&ids, &subset, &mut scratch) < params.l {
            return Ok(Some(subset.iter().map(|&i| p.points()[i].clone()).collect()));
        }
    }
    Ok(None)
}

/// Outcome of the two forbidden-configuration tests for `(c, d)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForbiddenScan {
    pub max_codistance: usize,
    /// `dc − d + 1`: a point with this many equidistant neighbours is forbidden.
    pub codistance_threshold: usize,
    pub codistance_violation: bool,
    pub codistance_witness: Option<(Point, Rational)>,
    /// Largest number of unordered pairs sharing one distance.
    pub max_pair_count: u64,
    /// `d(c−1)n/2`.
    pub pair_ceiling: Rational,
    pub pair_violation: bool,
}

pub fn forbidden_configuration_scan(p: &PointSet, spectrum: &MultiplicitySpectrum, c: u32, d: u32) -> Result<ForbiddenScan> {
    if c < 2 || d < 2 {
        return Err(Error::invalid("c and d must both be at least 2"));
    }
    let (max_codistance, witness) = max_codistance_witness(p);
    let threshold = (d * c - d + 1) as usize;
    let max_pair_count = spectrum.max_multiplicity() / 2;
    let pair_ceiling = Rational::new((d * (c - 1)) as i64 * p.len() as i64, 2);
    Ok(ForbiddenScan {
        max_codistance,
        codistance_threshold: threshold,
        codistance_violation: max_codistance >= threshold,
        codistance_witness: witness,
        max_pair_count,
        pair_violation: Rational::from(max_pair_count) > pair_ceiling,
        pair_ceiling,
    })
}

/// A `d`-tuple of family indices (0-based, increasing) with the largest
/// common intersection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionWitness {
    pub indices: Vec<usize>,
    pub size: usize,
}

/// Exhaustive search over all `d`-subsets of `family` (sets of elements of
/// `0..universe`) for the largest intersection; ties keep the
/// lexicographically first tuple.
pub fn set_intersection_witness(family: &[Vec<usize>], universe: usize, d: usize, caps: &Caps) -> Result<IntersectionWitness> {
    if d < 2 {
        return Err(Error::invalid("d must be at least 2"));
    }
    if d > family.len() {
        return Err(Error::invalid(format!("d = {d} exceeds family size {}", family.len())));
    }
    check_cap("intersection tuples", binomial_saturating(family.len() as u128, d as u128), caps.tuples)?;
    let words = universe.div_ceil(64).max(1);
    let mut bits = Vec::with_capacity(family.len());
    for set in family {
        let mut b = vec![0u64; words];
        for &e in set {
            if e >= universe {
                return Err(Error::invalid(format!("element {e} outside universe of size {universe}")));
            }
            b[e / 64] |= 1 << (e % 64);
        }
        bits.push(b);
    }

    let k = family.len();
    let mut best = IntersectionWitness { indices: (0..d).collect(), size: 0 };
    let mut found = false;
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        let size: u32 = (0..words).map(|w| idx.iter().fold(u64::MAX, |acc, &i| acc & bits[i][w]).count_ones()).sum();
        if !found || size as usize > best.size {
            best = IntersectionWitness { indices: idx.clone(), size: size as usize };
            found = true;
        }
        // next combination of d out of k
        let mut i = d;
        let mut advanced = false;
        while i > 0 {
            i -= 1;
            if idx[i] < k - d + i {
                idx[i] += 1;
                for j in i + 1..d {
                    idx[j] = idx[j - 1] + 1;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            break;
        }
    }
    Ok(best)
}

/// The counting lemma's numbers for a family of `k` subsets of an `n`-set,
/// each of size at least `m`: the family size `2dn^d/m^d` that triggers it
/// and the intersection size `m^d/(2n^{d−1})` it then guarantees.
pub fn intersection_lemma_terms(n: u64, m: u64, d: u32) -> Result<(Rational, Rational)> {
    if m == 0 || n == 0 || d < 2 {
        return Err(Error::invalid("intersection lemma needs n, m >= 1 and d >= 2"));
    }
    let n_r = Rational::from(n);
    let m_r = Rational::from(m);
    let trigger = Rational::from(2 * d as u64) * n_r.pow(d) / m_r.pow(d);
    let guarantee = m_r.pow(d) / (Rational::from(2u64) * n_r.pow(d - 1));
    Ok((trigger, guarantee))
}

/// One row of the rich-distance comparison: measured `k_j` against
/// `2n^d d^{d+1} c^d / j^d` (meaningful once `j >= d(2c^{d+1}n^{d−1})^{1/d}`)
/// and against `n²/j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RichBoundRow {
    pub j: u64,
    pub k_j: usize,
    pub rich_bound: Rational,
    pub rich_regime: bool,
    pub poor_bound: Rational,
}

/// Measured comparison only: nothing here is asserted to hold, since the
/// bounds presuppose the local property.
pub fn rich_distance_comparison(spectrum: &MultiplicitySpectrum, n: u64, c: u32, d: u32) -> Vec<RichBoundRow> {
    let rich = crate::energy::rich_spectrum(spectrum);
    let n_r = Rational::from(n);
    let (c_r, d_r) = (Rational::from(c as u64), Rational::from(d as u64));
    // j^d >= d^d · 2 c^{d+1} n^{d−1}
    let regime_floor = d_r.pow(d) * Rational::from(2u64) * c_r.pow(d + 1) * n_r.pow(d - 1);
    rich.thresholds
        .iter()
        .zip(&rich.counts)
        .map(|(&j, &k_j)| {
            let j_r = Rational::from(j);
            RichBoundRow {
                j,
                k_j,
                rich_bound: Rational::from(2u64) * n_r.pow(d) * d_r.pow(d + 1) * c_r.pow(d) / j_r.pow(d),
                rich_regime: j_r.pow(d) >= regime_floor,
                poor_bound: n_r.square() / j_r,
            }
        })
        .collect()
}
