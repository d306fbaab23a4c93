//! Extremal and structured point sets.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_integer::Roots;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::{bipartite_spectrum_quad, MultiplicitySpectrum};
use crate::error::{Error, Result};
use crate::geometry::{Point, PointSet, QuadPoint, QuadPointSet};
use crate::rational::Rational;

/// The `⌈√n⌉ × ⌈√n⌉` integer grid, first `n` points in row-major order.
pub fn integer_grid(n: usize) -> PointSet {
    let side = ceil_sqrt(n as u64) as i64;
    let pts = (0..side).flat_map(|r| (0..side).map(move |c| (r, c))).take(n).map(|(r, c)| Point::new(r, c));
    PointSet::new(pts, format!("grid n={n}"))
}

fn ceil_sqrt(n: u64) -> u64 {
    let r = n.sqrt();
    if r * r == n {
        r
    } else {
        r + 1
    }
}

/// A 3-AP-free subset of `{1, …, N}` together with the parameters that
/// produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BehrendSet {
    pub elements: Vec<u64>,
    /// Digits are `< q`, written in base `2q − 1`.
    pub q: u64,
    pub dimension: u32,
    /// Squared digit norm of the chosen sphere; `None` for the full
    /// `{0,1}`-digit cube (`q = 2`), which is AP-free without a sphere.
    pub norm: Option<u64>,
}

/// Behrend's construction: numbers `a + 1` whose base-`(2q−1)` digits are
/// all `< q` and whose digit vector lies on a fixed sphere. Adding two such
/// numbers never carries, so `x + z = 2y` holds digitwise, and a sphere
/// contains no three collinear lattice points. The largest level set over all
/// `(q, dimension, norm)` wins; ties keep the first found in ascending order.
pub fn behrend_set(n: u64) -> BehrendSet {
    let mut best = BehrendSet { elements: vec![1], q: 1, dimension: 1, norm: None };
    if n <= 1 {
        if n == 0 {
            best.elements.clear();
        }
        return best;
    }
    let limit = n - 1;

    // q = 2: {0,1} digits in base 3. x_i + z_i = 2 y_i over {0,1} forces
    // x_i = y_i = z_i, so the whole cube is progression free.
    let cube = digit_vectors(2, dims_for(3, limit), limit);
    if cube.len() > best.elements.len() {
        best = BehrendSet { elements: cube.iter().map(|(a, _)| a + 1).collect(), q: 2, dimension: dims_for(3, limit), norm: None };
    }

    let mut q = 2u64;
    loop {
        let base = 2 * q - 1;
        if base > limit {
            break;
        }
        let mut dim = 2u32;
        while base.checked_pow(dim - 1).is_some_and(|p| p <= limit) {
            // A sphere bucket is determined by its top dim−1 digits.
            let top_values = limit / base + 1;
            let bound = q.checked_pow(dim - 1).unwrap_or(u64::MAX).min(top_values);
            if bound as usize > best.elements.len() {
                let vecs = digit_vectors(q, dim, limit);
                let mut buckets: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
                for (a, norm) in vecs {
                    buckets.entry(norm).or_default().push(a);
                }
                for (norm, members) in buckets {
                    if members.len() > best.elements.len() {
                        best = BehrendSet { elements: members.iter().map(|a| a + 1).collect(), q, dimension: dim, norm: Some(norm) };
                    }
                }
            }
            dim += 1;
        }
        q += 1;
    }
    best.elements.sort_unstable();
    best
}

/// Largest dimension with `base^(dim−1) <= limit`.
fn dims_for(base: u64, limit: u64) -> u32 {
    let mut dim = 1;
    while base.checked_pow(dim).is_some_and(|p| p <= limit) {
        dim += 1;
    }
    dim
}

/// All `(value, squared digit norm)` with `dim` digits `< q` in base `2q−1`
/// and value `<= limit`.
fn digit_vectors(q: u64, dim: u32, limit: u64) -> Vec<(u64, u64)> {
    let base = 2 * q - 1;
    let mut out = Vec::new();
    fn rec(q: u64, base: u64, pos: u32, value: u64, norm: u64, limit: u64, out: &mut Vec<(u64, u64)>) {
        if pos == 0 {
            out.push((value, norm));
            return;
        }
        let place = base.pow(pos - 1);
        for d in 0..q {
            let v = value + d * place;
            if v > limit {
                break;
            }
            rec(q, base, pos - 1, v, norm + d * d, limit, out);
        }
    }
    rec(q, base, dim, 0, 0, limit, &mut out);
    out
}

/// `true` iff no `x < y < z` in `s` satisfy `x + z = 2y`. Input order and
/// repeats are ignored.
pub fn is_progression_free(s: &[i64]) -> bool {
    let set: HashSet<i64> = s.iter().copied().collect();
    let mut v: Vec<i64> = set.iter().copied().collect();
    v.sort_unstable();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let sum = v[i] as i128 + v[j] as i128;
            if sum % 2 == 0 && set.contains(&((sum / 2) as i64)) {
                return false;
            }
        }
    }
    true
}

/// [`behrend_set`] placed on the x-axis. A midpoint-free set on a line spans
/// no isosceles triangle, degenerate ones included.
pub fn behrend_collinear(n: u64) -> PointSet {
    let set = behrend_set(n);
    PointSet::new(set.elements.iter().map(|&a| Point::new(a as i64, 0)), format!("behrend collinear N={n}"))
}

/// `n` distinct points with coordinates `u/v`, `|u| <= range`,
/// `1 <= v <= max_denominator`, drawn from a seeded stream.
pub fn random_pointset(n: usize, range: i64, max_denominator: i64, seed: u64) -> Result<PointSet> {
    if range < 0 || max_denominator < 1 {
        return Err(Error::invalid("random point sets need range >= 0 and max_denominator >= 1"));
    }
    let candidates = (2 * range as u128 + 1) * max_denominator as u128;
    let values = if candidates <= 1 << 20 {
        let distinct: HashSet<Rational> = (-range..=range).flat_map(|u| (1..=max_denominator).map(move |v| Rational::new(u, v))).collect();
        distinct.len() as u128
    } else {
        candidates
    };
    if (n as u128) > values.saturating_mul(values) {
        return Err(Error::invalid(format!(
            "cannot place {n} distinct points with range {range} and denominators up to {max_denominator}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coord = |rng: &mut ChaCha8Rng| Rational::new(rng.gen_range(-range..=range), rng.gen_range(1..=max_denominator));
    let mut seen = HashSet::with_capacity(n);
    let mut pts = Vec::with_capacity(n);
    while pts.len() < n {
        let p = Point::new(coord(&mut rng), coord(&mut rng));
        if seen.insert(p.clone()) {
            pts.push(p);
        }
    }
    Ok(PointSet::new(pts, format!("random n={n} seed={seed}")))
}

/// `m` points on the x-axis and `n` points above it with few cross distances.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteConstruction {
    pub line_points: PointSet,
    pub plane_points: QuadPointSet,
    pub m: u64,
    pub a_count: u64,
    pub b_count: u64,
}

impl BipartiteConstruction {
    /// `m² + m·A + B`, an upper bound on the number of cross distances: every
    /// cross squared distance is the integer `i² − a·i + b`.
    pub fn distance_bound(&self) -> u64 {
        self.m * self.m + self.m * self.a_count + self.b_count
    }

    pub fn cross_spectrum(&self) -> MultiplicitySpectrum {
        bipartite_spectrum_quad(&self.line_points, &self.plane_points).expect("line points lie on the x-axis")
    }

    /// Both sets in one point-set file: `x 0` lines then `x sqrt ysq` lines.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("# elekes m={} n={} A={} B={}\n", self.m, self.plane_points.len(), self.a_count, self.b_count);
        out.push_str(&self.line_points.to_file_string());
        out.push_str(&self.plane_points.to_file_string());
        out
    }
}

/// Integer-valued quadratic family realising few bipartite distances.
///
/// Line points are `(i, 0)`, `1 <= i <= m`; plane points are
/// `(a/2, sqrt(b − a²/4))` for `1 <= a <= A`, `b` in a window of `B`
/// consecutive integers starting above `⌈A²/4⌉`. Then
/// `(a/2 − i)² + b − a²/4 = i² − a·i + b`, an integer in a range of size
/// `O(m² + m·A + B)`.
pub fn elekes_bipartite(m: u64, n: u64) -> Result<BipartiteConstruction> {
    if m < 1 {
        return Err(Error::invalid("elekes construction needs m >= 1"));
    }
    let needed = m.checked_pow(3).and_then(|c| c.checked_mul(4)).ok_or_else(|| Error::invalid("m too large"))?;
    if n < needed {
        return Err(Error::invalid(format!("elekes construction needs n >= 4m^3 = {needed}, got n = {n}")));
    }
    let a_count = ceil_sqrt_ratio(n, m);
    let b_count = n.div_ceil(a_count);
    let offset = (a_count * a_count).div_ceil(4);

    let line = PointSet::new((1..=m).map(|i| Point::new(i as i64, 0)), "elekes line");
    let mut plane = Vec::with_capacity(n as usize);
    'outer: for a in 1..=a_count {
        for b in offset + 1..=offset + b_count {
            if plane.len() as u64 == n {
                break 'outer;
            }
            let x = Rational::new(BigInt::from(a), 2);
            let ysq = Rational::from(b) - Rational::new(BigInt::from(a * a), 4);
            plane.push(QuadPoint::new(x, ysq)?);
        }
    }
    Ok(BipartiteConstruction { line_points: line, plane_points: QuadPointSet::new(plane, "elekes plane"), m, a_count, b_count })
}

/// `⌈√(n/m)⌉` in exact integer arithmetic.
fn ceil_sqrt_ratio(n: u64, m: u64) -> u64 {
    // smallest s with s² >= n/m, i.e. s²·m >= n
    let mut s = (n / m).sqrt();
    while (s as u128) * (s as u128) * (m as u128) < n as u128 {
        s += 1;
    }
    while s > 0 && ((s - 1) as u128) * ((s - 1) as u128) * (m as u128) >= n as u128 {
        s -= 1;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{isosceles_count, multiplicity_spectrum};

    #[test]
    fn random_sets() {
        let a = random_pointset(30, 5, 3, 7).unwrap();
        assert_eq!(a.len(), 30);
        assert_eq!(a, random_pointset(30, 5, 3, 7).unwrap());
        assert_ne!(a, random_pointset(30, 5, 3, 8).unwrap());
        assert_eq!(random_pointset(9, 1, 1, 0).unwrap().len(), 9);
        assert!(random_pointset(10, 1, 1, 0).is_err());
        assert!(random_pointset(2, 0, 5, 0).is_err());
    }

    #[test]
    fn grid_examples() {
        let g = integer_grid(4);
        assert_eq!(g.points(), PointSet::from_integers(&[(0, 0), (0, 1), (1, 0), (1, 1)], "").points());
        assert_eq!(multiplicity_spectrum(&g).distinct(), 2);
        assert_eq!(integer_grid(1).points(), &[Point::new(0, 0)]);
        let s = multiplicity_spectrum(&integer_grid(9));
        let keys: Vec<String> = s.entries().keys().map(|k| k.to_string()).collect();
        assert_eq!(keys, ["1", "2", "4", "5", "8"]);
        assert_eq!(integer_grid(7).len(), 7);
    }

    /// Greedy 3-AP-free oracle: scan 1..=n keeping every value that does not
    /// complete a progression with two kept values.
    fn greedy_ap_free(n: i64) -> Vec<i64> {
        let mut kept: Vec<i64> = Vec::new();
        for v in 1..=n {
            let mut trial = kept.clone();
            trial.push(v);
            if is_progression_free(&trial) {
                kept = trial;
            }
        }
        kept
    }

    #[test]
    fn greedy_oracle_at_ten() {
        assert_eq!(greedy_ap_free(10), vec![1, 2, 4, 5, 10]);
    }

    #[test]
    fn behrend_examples() {
        assert_eq!(behrend_set(1).elements, vec![1]);
        let ten = behrend_set(10);
        assert!(ten.elements.len() >= 4);
        assert!(ten.elements.iter().all(|&a| (1..=10).contains(&a)));
        for n in [2u64, 3, 10, 57, 100, 1000, 5000] {
            let s = behrend_set(n);
            let as_i64: Vec<i64> = s.elements.iter().map(|&a| a as i64).collect();
            assert!(is_progression_free(&as_i64), "N={n}");
            assert!(s.elements.iter().all(|&a| a >= 1 && a <= n));
        }
    }

    #[test]
    fn behrend_sphere_beats_cube_eventually() {
        // Spheres only win once q >= 3 has room; just check the search ran.
        let s = behrend_set(1000);
        assert!(s.elements.len() >= greedy_ap_free(1000).len() / 2);
    }

    #[test]
    fn progression_free_examples() {
        assert!(is_progression_free(&[1, 2, 4, 5]));
        assert!(!is_progression_free(&[1, 2, 3]));
        assert!(!is_progression_free(&[3, 1, 5]));
        assert!(is_progression_free(&[]));
        assert!(is_progression_free(&[7, 7]));
    }

    #[test]
    fn behrend_collinear_examples() {
        let p = behrend_collinear(10);
        assert!(p.len() >= 4);
        assert_eq!(isosceles_count(&p), 0);
        assert_eq!(behrend_collinear(1).len(), 1);
    }

    #[test]
    fn elekes_example_m2() {
        let c = elekes_bipartite(2, 32).unwrap();
        assert_eq!((c.a_count, c.b_count), (4, 8));
        assert_eq!(c.plane_points.len(), 32);
        let s = c.cross_spectrum();
        assert_eq!(s.distinct(), 14);
        assert!(s.entries().keys().all(|k| k.is_integer()));
        assert!(14.0 <= 4.0 * (2.0f64 * 32.0).sqrt());
    }

    #[test]
    fn elekes_example_m1() {
        let c = elekes_bipartite(1, 4).unwrap();
        assert_eq!((c.a_count, c.b_count), (2, 2));
        let s = c.cross_spectrum();
        // values 1 - a + b for a in {1,2}, b in {2,3}
        assert_eq!(s.distinct(), 3);
        assert!(s.distinct() as u64 <= c.distance_bound());
    }

    #[test]
    fn elekes_rejects_small_n() {
        assert!(elekes_bipartite(2, 31).is_err());
        assert!(elekes_bipartite(0, 31).is_err());
    }

    #[test]
    fn elekes_heights_positive() {
        let c = elekes_bipartite(3, 150).unwrap();
        assert!(c.plane_points.points().iter().all(|q| q.ysq.is_positive()));
        assert_eq!(c.plane_points.len(), 150);
    }

    #[test]
    fn ceil_sqrt_ratio_exact() {
        assert_eq!(ceil_sqrt_ratio(32, 2), 4);
        assert_eq!(ceil_sqrt_ratio(33, 2), 5);
        assert_eq!(ceil_sqrt_ratio(4, 1), 2);
        assert_eq!(ceil_sqrt_ratio(5, 1), 3);
    }
}
