//! Multiplicity spectra and distance energies.
//!
//! For a point set `P`, `m_δ` is the number of *ordered* pairs `(a, b)` with
//! `|ab|^2 = δ > 0`, and the d-th distance energy is `E_d = Σ m_δ^d`. The
//! spectrum is the only input of the energy functions, so every energy
//! variant agrees on what a distance class is.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{check_cap, Error, Result};
use crate::geometry::{cross_sqdist, sqdist, Point, PointSet, QuadPointSet};
use crate::pairs::{
    apex_keys, dense_unordered_pair_counts, merge_counts, runs, uniform_chunks, unordered_pair_counts, with_keys, PairKeys,
};
use crate::rational::Rational;

/// Map from value (squared distance, or polynomial value) to its multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MultiplicitySpectrum {
    entries: BTreeMap<Rational, u64>,
    total: u64,
}

impl MultiplicitySpectrum {
    /// Builds a spectrum from `(value, count)` pairs, summing repeated values
    /// and dropping zero counts.
    pub fn from_counts(counts: impl IntoIterator<Item = (Rational, u64)>) -> Self {
        let mut entries = BTreeMap::new();
        for (k, c) in counts {
            if c > 0 {
                *entries.entry(k).or_insert(0) += c;
            }
        }
        let total = entries.values().sum();
        MultiplicitySpectrum { entries, total }
    }

    pub fn entries(&self) -> &BTreeMap<Rational, u64> {
        &self.entries
    }

    pub fn multiplicities(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.values().copied()
    }

    /// Σ m_δ.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of distinct values, `D`.
    pub fn distinct(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, value: &Rational) -> u64 {
        self.entries.get(value).copied().unwrap_or(0)
    }

    pub fn max_multiplicity(&self) -> u64 {
        self.entries.values().copied().max().unwrap_or(0)
    }

    /// `k_j`: number of values with multiplicity at least `j`.
    pub fn count_at_least(&self, j: u64) -> usize {
        self.entries.values().filter(|&&m| m >= j).count()
    }

    /// Values with multiplicity at least `j`, ascending.
    pub fn rich_values(&self, j: u64) -> Vec<Rational> {
        self.entries.iter().filter(|(_, &m)| m >= j).map(|(k, _)| k.clone()).collect()
    }

    /// CSV with header `sqdist,multiplicity`, ascending by value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sqdist,multiplicity\n");
        for (k, m) in &self.entries {
            out.push_str(&format!("{k},{m}\n"));
        }
        out
    }
}

/// Ordered-pair multiplicities of the nonzero squared distances of `p`.
pub fn multiplicity_spectrum(p: &PointSet) -> MultiplicitySpectrum {
    if let Some(frame) = p.int_frame() {
        if let Some(dense) = dense_unordered_pair_counts(&frame) {
            return MultiplicitySpectrum::from_counts(
                dense.iter().enumerate().skip(1).filter(|(_, &c)| c > 0).map(|(k, &c)| (frame.key_to_rational(k as u64), 2 * c)),
            );
        }
    }
    with_keys!(p.points(), |keys| spectrum_from_pairs(keys))
}

fn spectrum_from_pairs<K: PairKeys>(keys: &K) -> MultiplicitySpectrum {
    let counts = unordered_pair_counts(keys);
    MultiplicitySpectrum::from_counts(counts.into_iter().filter(|(k, _)| !keys.is_zero(k)).map(|(k, c)| (keys.to_rational(&k), 2 * c)))
}

/// Cross-set spectrum: each pair `(a, b) ∈ P1 × P2` at positive distance
/// counts once.
pub fn bipartite_spectrum(p1: &PointSet, p2: &PointSet) -> MultiplicitySpectrum {
    let all: Vec<Point> = p1.points().iter().chain(p2.points()).cloned().collect();
    let n1 = p1.len();
    with_keys!(&all, |keys| {
        let counts = uniform_chunks(n1)
            .into_par_iter()
            .map(|rows| {
                let mut local = HashMap::new();
                for i in rows {
                    for j in n1..all.len() {
                        *local.entry(keys.key(i, j)).or_insert(0u64) += 1;
                    }
                }
                local
            })
            .reduce(HashMap::new, merge_counts);
        MultiplicitySpectrum::from_counts(counts.into_iter().filter(|(k, _)| !keys.is_zero(k)).map(|(k, c)| (keys.to_rational(&k), c)))
    })
}

/// Cross spectrum between points on the x-axis and [`QuadPoint`](crate::geometry::QuadPoint)s.
pub fn bipartite_spectrum_quad(p1: &PointSet, p2: &QuadPointSet) -> Result<MultiplicitySpectrum> {
    if let Some(bad) = p1.points().iter().find(|p| !p.y.is_zero()) {
        return Err(Error::invalid(format!("QuadPoint spectra need the first set on the x-axis; {bad} is not")));
    }
    let counts = uniform_chunks(p1.len())
        .into_par_iter()
        .map(|rows| {
            let mut local: HashMap<Rational, u64> = HashMap::new();
            for a in &p1.points()[rows] {
                for b in p2.points() {
                    let d = cross_sqdist(a, b).expect("checked on axis");
                    if !d.is_zero() {
                        *local.entry(d).or_insert(0) += 1;
                    }
                }
            }
            local
        })
        .reduce(HashMap::new, merge_counts);
    Ok(MultiplicitySpectrum::from_counts(counts))
}

/// `E_d = Σ m_δ^d`.
pub fn energy(s: &MultiplicitySpectrum, d: u32) -> Result<BigUint> {
    if d < 1 {
        return Err(Error::invalid("energy exponent d must be at least 1"));
    }
    Ok(s.multiplicities().map(|m| BigUint::from(m).pow(d)).sum())
}

/// Signature of [`energy`], so checks can run against substitute implementations.
pub type EnergyFn = fn(&MultiplicitySpectrum, u32) -> Result<BigUint>;

/// Counts the ordered 2d-tuples `(a1, b1, …, ad, bd)` of `P` with
/// `|a1 b1| = … = |ad bd| > 0` one by one. Exponential; oracle use only.
pub fn energy_bruteforce(p: &PointSet, d: u32, caps: &Caps) -> Result<BigUint> {
    if d < 1 {
        return Err(Error::invalid("energy exponent d must be at least 1"));
    }
    check_cap("energy_bruteforce points", p.len() as u128, caps.bruteforce_points as u128)?;
    let ids = class_ids(p);
    let n = p.len();

    fn extend(ids: &[Vec<u32>], n: usize, target: u32, remaining: u32) -> u64 {
        if remaining == 0 {
            return 1;
        }
        let mut count = 0;
        for a in 0..n {
            for b in 0..n {
                if ids[a][b] == target {
                    count += extend(ids, n, target, remaining - 1);
                }
            }
        }
        count
    }

    let mut total = 0u64;
    for a in 0..n {
        for b in 0..n {
            let id = ids[a][b];
            if id != 0 {
                total += extend(&ids, n, id, d - 1);
            }
        }
    }
    Ok(BigUint::from(total))
}

/// Pairwise class ids: 0 for coincident points, otherwise one id per distinct
/// squared distance. Built directly from [`sqdist`].
fn class_ids(p: &PointSet) -> Vec<Vec<u32>> {
    let pts = p.points();
    let mut intern: BTreeMap<Rational, u32> = BTreeMap::new();
    pts.iter()
        .map(|a| {
            pts.iter()
                .map(|b| {
                    let d = sqdist(a, b);
                    if d.is_zero() {
                        0
                    } else {
                        let next = intern.len() as u32 + 1;
                        *intern.entry(d).or_insert(next)
                    }
                })
                .collect()
        })
        .collect()
}

/// `E_d*`: tuples whose 2d points are pairwise distinct.
///
/// Within one distance class such a tuple is an ordered sequence of d
/// vertex-disjoint unordered pairs, each with one of two orientations, so
/// `E_d* = Σ_δ d! · 2^d · (number of d-matchings in the class graph)`.
pub fn distinct_energy(p: &PointSet, d: u32, caps: &Caps) -> Result<BigUint> {
    if d < 1 {
        return Err(Error::invalid("energy exponent d must be at least 1"));
    }
    let classes = distance_classes(p);
    let work: u128 = classes.iter().map(|edges| binomial_saturating(edges.len() as u128, d as u128)).fold(0u128, u128::saturating_add);
    check_cap("distinct_energy tuples", work, caps.tuples)?;

    let factor = BigUint::from((1..=d as u64).product::<u64>()) << d;
    let matchings: u128 = classes
        .par_iter()
        .map(|edges| {
            let mut used = vec![false; p.len()];
            count_matchings(edges, 0, d, &mut used)
        })
        .sum();
    Ok(factor * BigUint::from(matchings))
}

/// Unordered pairs `(i, j)`, `i < j`, grouped by squared distance (ascending).
pub(crate) fn distance_classes(p: &PointSet) -> Vec<Vec<(u32, u32)>> {
    with_keys!(p.points(), |keys| {
        let n = keys.len();
        let mut map: BTreeMap<_, Vec<(u32, u32)>> = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                map.entry(keys.key(i, j)).or_default().push((i as u32, j as u32));
            }
        }
        map.into_values().collect()
    })
}

fn count_matchings(edges: &[(u32, u32)], start: usize, remaining: u32, used: &mut [bool]) -> u128 {
    if remaining == 0 {
        return 1;
    }
    let mut total = 0;
    for (idx, &(a, b)) in edges.iter().enumerate().skip(start) {
        let (a, b) = (a as usize, b as usize);
        if used[a] || used[b] {
            continue;
        }
        used[a] = true;
        used[b] = true;
        total += count_matchings(edges, idx + 1, remaining - 1, used);
        used[a] = false;
        used[b] = false;
    }
    total
}

pub(crate) fn binomial_saturating(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// `k_j` at dyadic thresholds `j = 1, 2, 4, …` up to the largest multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RichSpectrum {
    pub thresholds: Vec<u64>,
    pub counts: Vec<usize>,
}

pub fn rich_spectrum(s: &MultiplicitySpectrum) -> RichSpectrum {
    let max = s.max_multiplicity();
    let mut thresholds = Vec::new();
    let mut j = 1u64;
    while j <= max {
        thresholds.push(j);
        j *= 2;
    }
    let counts = thresholds.iter().map(|&j| s.count_at_least(j)).collect();
    RichSpectrum { thresholds, counts }
}

impl RichSpectrum {
    /// Bounds on `E_d` from the dyadic buckets `[2^i, 2^{i+1})`: a class in
    /// bucket `i` contributes between `2^{id}` and `2^{(i+1)d}`, so
    /// `lower <= E_d < upper = 2^d · lower` (both zero for an empty spectrum).
    pub fn dyadic_energy_bracket(&self, d: u32) -> (BigUint, BigUint) {
        let mut lower = BigUint::zero();
        for (idx, &j) in self.thresholds.iter().enumerate() {
            let next = self.counts.get(idx + 1).copied().unwrap_or(0);
            let in_bucket = self.counts[idx] - next;
            lower += BigUint::from(in_bucket) * BigUint::from(j).pow(d);
        }
        let upper = &lower << d;
        (lower, upper)
    }

    /// The coarser estimate `Σ_i k_{2^i} · 2^{d(i+1)}`.
    pub fn dyadic_rich_upper(&self, d: u32) -> BigUint {
        self.thresholds.iter().zip(&self.counts).map(|(&j, &k)| BigUint::from(k) * (BigUint::from(j) << 1u32).pow(d)).sum()
    }
}

/// `(n² − n)^d / D^{d−1}`, the power-mean lower bound on `E_d`.
pub fn holder_lower_bound(n: u64, distinct: u64, d: u32) -> Result<Rational> {
    if n < 2 {
        return if distinct == 0 {
            Ok(Rational::zero())
        } else {
            Err(Error::invalid(format!("{distinct} distances for a set of {n} points")))
        };
    }
    power_mean_bound(n * (n - 1), distinct, d)
}

/// `total^d / D^{d−1}` for any spectrum with `Σ m_δ = total` over `D` values.
pub fn power_mean_bound(total: u64, distinct: u64, d: u32) -> Result<Rational> {
    if d < 1 {
        return Err(Error::invalid("energy exponent d must be at least 1"));
    }
    if distinct == 0 {
        return if total == 0 { Ok(Rational::zero()) } else { Err(Error::invalid("D = 0 with a nonempty pair set")) };
    }
    let num = Rational::from(total).pow(d);
    let den = Rational::from(distinct).pow(d - 1);
    Ok(num / den)
}

/// Number of unordered triples with at least two equal sides, degenerate
/// (collinear) triples included.
///
/// Sums, over each apex, the pairs of other points at a common distance from
/// it. A triple is isosceles at two apexes only if it is equilateral, which
/// rational points cannot form, so each triple is counted exactly once.
pub fn isosceles_count(p: &PointSet) -> u64 {
    with_keys!(p.points(), |keys| {
        (0..keys.len())
            .into_par_iter()
            .map(|apex| {
                let ks = apex_keys(keys, apex);
                runs(&ks).map(|(_, c)| (c * (c - 1) / 2) as u64).sum::<u64>()
            })
            .sum()
    })
}

/// Largest number of points at one distance from a single point, with a
/// witness `(point, squared distance)` (first in point order, then smallest
/// distance).
// keys are u64 or Rational depending on the coordinate frame
#[allow(clippy::clone_on_copy)]
pub fn max_codistance_witness(p: &PointSet) -> (usize, Option<(Point, Rational)>) {
    let best = with_keys!(p.points(), |keys| {
        (0..keys.len())
            .into_par_iter()
            .filter_map(|apex| {
                let ks = apex_keys(keys, apex);
                let mut best: Option<(usize, _)> = None;
                for (k, c) in runs(&ks) {
                    if best.as_ref().is_none_or(|(bc, _)| c > *bc) {
                        best = Some((c, k.clone()));
                    }
                }
                best.map(|(c, k)| (c, apex, keys.to_rational(&k)))
            })
            .reduce_with(|a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
    });
    match best {
        Some((c, apex, d)) => (c, Some((p.points()[apex].clone(), d))),
        None => (0, None),
    }
}

pub fn max_codistance(p: &PointSet) -> usize {
    max_codistance_witness(p).0
}

/// Summary of one energy computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub n: usize,
    pub d: u32,
    pub distinct: usize,
    #[serde(with = "biguint_string")]
    pub energy: BigUint,
    pub holder_lower: Rational,
    pub max_multiplicity: u64,
}

pub fn energy_report(p: &PointSet, d: u32) -> Result<EnergyReport> {
    let s = multiplicity_spectrum(p);
    report_from_spectrum(p.len(), &s, d)
}

pub fn report_from_spectrum(n: usize, s: &MultiplicitySpectrum, d: u32) -> Result<EnergyReport> {
    Ok(EnergyReport {
        n,
        d,
        distinct: s.distinct(),
        energy: energy(s, d)?,
        holder_lower: holder_lower_bound(n as u64, s.distinct() as u64, d)?,
        max_multiplicity: s.max_multiplicity(),
    })
}

pub(crate) mod biguint_string {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `true` when `big >= bound` exactly.
pub fn at_least(big: &BigUint, bound: &Rational) -> bool {
    let lhs = Rational::from(num_bigint::BigInt::from(big.clone()));
    &lhs >= bound
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> PointSet {
        PointSet::from_integers(&[(0, 0), (1, 0), (0, 1), (1, 1)], "square")
    }

    fn collinear3() -> PointSet {
        PointSet::from_integers(&[(0, 0), (1, 0), (2, 0)], "line")
    }

    fn spectrum_pairs(s: &MultiplicitySpectrum) -> Vec<(String, u64)> {
        s.entries().iter().map(|(k, &m)| (k.to_string(), m)).collect()
    }

    #[test]
    fn spectrum_examples() {
        assert_eq!(spectrum_pairs(&multiplicity_spectrum(&unit_square())), vec![("1".into(), 8), ("2".into(), 4)]);
        assert_eq!(spectrum_pairs(&multiplicity_spectrum(&collinear3())), vec![("1".into(), 4), ("4".into(), 2)]);
        assert!(multiplicity_spectrum(&PointSet::from_integers(&[(3, 3)], "")).is_empty());
        assert_eq!(multiplicity_spectrum(&unit_square()).total(), 12);
    }

    #[test]
    fn rational_path_matches_fast_path() {
        let big = 1i64 << 40;
        let s = PointSet::from_integers(&[(0, 0), (big, 0), (0, big), (big, big)], "");
        assert!(s.int_frame().is_none());
        let spec = multiplicity_spectrum(&s);
        let b2 = Rational::from(big).square();
        assert_eq!(spec.get(&b2), 8);
        assert_eq!(spec.get(&(&b2 + &b2)), 4);
    }

    #[test]
    fn bipartite_examples() {
        let p1 = PointSet::from_integers(&[(0, 0), (1, 0)], "");
        let p2 = PointSet::from_integers(&[(0, 1)], "");
        assert_eq!(spectrum_pairs(&bipartite_spectrum(&p1, &p2)), vec![("1".into(), 1), ("2".into(), 1)]);
        assert_eq!(spectrum_pairs(&bipartite_spectrum(&p1, &p1)), vec![("1".into(), 2)]);
        assert!(bipartite_spectrum(&p1, &PointSet::default()).is_empty());
    }

    #[test]
    fn bipartite_quad_rejects_off_axis() {
        let q = QuadPointSet::new([crate::geometry::QuadPoint::new(0, 1).unwrap()], "");
        let off = PointSet::from_integers(&[(0, 1)], "");
        assert!(bipartite_spectrum_quad(&off, &q).is_err());
        let on = PointSet::from_integers(&[(0, 0), (1, 0)], "");
        let s = bipartite_spectrum_quad(&on, &q).unwrap();
        assert_eq!(spectrum_pairs(&s), vec![("1".into(), 1), ("2".into(), 1)]);
    }

    #[test]
    fn energy_examples() {
        let sq = multiplicity_spectrum(&unit_square());
        assert_eq!(energy(&sq, 2).unwrap(), BigUint::from(80u32));
        assert_eq!(energy(&sq, 1).unwrap(), BigUint::from(sq.total()));
        let two = multiplicity_spectrum(&PointSet::from_integers(&[(0, 0), (5, 7)], ""));
        assert_eq!(energy(&two, 3).unwrap(), BigUint::from(8u32));
        assert_eq!(energy(&multiplicity_spectrum(&collinear3()), 3).unwrap(), BigUint::from(72u32));
        assert!(energy(&sq, 0).is_err());
    }

    #[test]
    fn bruteforce_examples() {
        let caps = Caps::default();
        assert_eq!(energy_bruteforce(&unit_square(), 2, &caps).unwrap(), BigUint::from(80u32));
        assert_eq!(energy_bruteforce(&PointSet::from_integers(&[(0, 0), (2, 1)], ""), 2, &caps).unwrap(), BigUint::from(4u32));
        assert_eq!(energy_bruteforce(&collinear3(), 2, &caps).unwrap(), BigUint::from(20u32));
        let big = crate::constructions::integer_grid(13);
        assert!(energy_bruteforce(&big, 2, &caps).unwrap_err().is_cap_exceeded());
    }

    #[test]
    fn distinct_energy_examples() {
        let caps = Caps::default();
        assert_eq!(distinct_energy(&unit_square(), 2, &caps).unwrap(), BigUint::from(24u32));
        assert_eq!(distinct_energy(&collinear3(), 2, &caps).unwrap(), BigUint::zero());
        assert_eq!(distinct_energy(&collinear3(), 3, &caps).unwrap(), BigUint::zero());
        // d = 1 degenerates to the number of ordered pairs
        assert_eq!(distinct_energy(&unit_square(), 1, &caps).unwrap(), BigUint::from(12u32));
        let tight = Caps { tuples: 1, ..Caps::default() };
        assert!(distinct_energy(&unit_square(), 2, &tight).unwrap_err().is_cap_exceeded());
    }

    #[test]
    fn rich_spectrum_examples() {
        let r = rich_spectrum(&multiplicity_spectrum(&unit_square()));
        assert_eq!(r.thresholds, vec![1, 2, 4, 8]);
        assert_eq!(r.counts, vec![2, 2, 2, 1]);
        assert_eq!(rich_spectrum(&MultiplicitySpectrum::default()), RichSpectrum::default());
        let single = MultiplicitySpectrum::from_counts([(Rational::from(5), 6)]);
        let r = rich_spectrum(&single);
        assert_eq!((r.thresholds, r.counts), (vec![1, 2, 4], vec![1, 1, 1]));
    }

    #[test]
    fn dyadic_bracket_contains_energy() {
        let s = multiplicity_spectrum(&unit_square());
        let r = rich_spectrum(&s);
        for d in 1..5 {
            let e = energy(&s, d).unwrap();
            let (lo, hi) = r.dyadic_energy_bracket(d);
            assert!(lo <= e && e < hi, "d={d}");
            assert!(e < r.dyadic_rich_upper(d));
        }
    }

    #[test]
    fn holder_examples() {
        assert_eq!(holder_lower_bound(4, 2, 2).unwrap(), Rational::from(72));
        assert_eq!(holder_lower_bound(7, 5, 1).unwrap(), Rational::from(42));
        assert_eq!(holder_lower_bound(3, 2, 3).unwrap(), Rational::from(54));
        assert!(holder_lower_bound(3, 0, 2).is_err());
        assert!(holder_lower_bound(3, 1, 0).is_err());
    }

    #[test]
    fn isosceles_examples() {
        assert_eq!(isosceles_count(&collinear3()), 1);
        assert_eq!(isosceles_count(&unit_square()), 4);
        assert_eq!(isosceles_count(&PointSet::from_integers(&[(0, 0), (1, 0)], "")), 0);
    }

    #[test]
    fn codistance_examples() {
        assert_eq!(max_codistance(&unit_square()), 2);
        let (c, w) = max_codistance_witness(&collinear3());
        assert_eq!(c, 2);
        assert_eq!(w.unwrap().0, Point::new(1, 0));
        assert_eq!(max_codistance(&PointSet::from_integers(&[(0, 0)], "")), 0);
    }

    #[test]
    fn report_fields() {
        let r = energy_report(&unit_square(), 2).unwrap();
        assert_eq!((r.n, r.distinct, r.max_multiplicity), (4, 2, 8));
        assert_eq!(r.energy, BigUint::from(80u32));
        assert!(at_least(&r.energy, &r.holder_lower));
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"energy\":\"80\""));
    }

    #[test]
    fn csv_export_sorted() {
        let csv = multiplicity_spectrum(&collinear3()).to_csv();
        assert_eq!(csv, "sqdist,multiplicity\n1,4\n4,2\n");
    }
}
