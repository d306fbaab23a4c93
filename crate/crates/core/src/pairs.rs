//! Pairwise squared-distance keys with an integer fast path.
//!
//! Algorithms that only compare squared distances are written once against
//! [`PairKeys`] and run either on `u64` keys (coordinates over a common
//! denominator, see [`IntFrame`]) or on exact rationals.

use std::collections::HashMap;
use std::hash::Hash;
use std::ops::Range;

use rayon::prelude::*;

use crate::geometry::{sqdist, IntFrame, Point};
use crate::rational::Rational;

pub(crate) trait PairKeys: Sync {
    type Key: Ord + Hash + Clone + Send + Sync;
    fn len(&self) -> usize;
    fn key(&self, i: usize, j: usize) -> Self::Key;
    fn is_zero(&self, k: &Self::Key) -> bool;
    fn to_rational(&self, k: &Self::Key) -> Rational;
}

impl PairKeys for IntFrame {
    type Key = u64;

    fn len(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    fn key(&self, i: usize, j: usize) -> u64 {
        self.sqdist(i, j)
    }

    fn is_zero(&self, k: &u64) -> bool {
        *k == 0
    }

    fn to_rational(&self, k: &u64) -> Rational {
        self.key_to_rational(*k)
    }
}

pub(crate) struct ExactKeys<'a>(pub &'a [Point]);

impl PairKeys for ExactKeys<'_> {
    type Key = Rational;

    fn len(&self) -> usize {
        self.0.len()
    }

    fn key(&self, i: usize, j: usize) -> Rational {
        sqdist(&self.0[i], &self.0[j])
    }

    fn is_zero(&self, k: &Rational) -> bool {
        k.is_zero()
    }

    fn to_rational(&self, k: &Rational) -> Rational {
        k.clone()
    }
}

/// Runs `$body` with `$k` bound to the fastest key source for `$points`.
macro_rules! with_keys {
    ($points:expr, |$k:ident| $body:expr) => {{
        let __pts: &[$crate::geometry::Point] = $points;
        match $crate::geometry::IntFrame::build(__pts.iter()) {
            Some(frame) => {
                let $k = &frame;
                $body
            }
            None => {
                let exact = $crate::pairs::ExactKeys(__pts);
                let $k = &exact;
                $body
            }
        }
    }};
}
pub(crate) use with_keys;

/// Splits the rows `0..n` of the upper triangle `i < j` into ranges of
/// roughly equal pair counts.
pub(crate) fn triangle_chunks(n: usize) -> Vec<Range<usize>> {
    let parts = (rayon::current_num_threads() * 4).max(1);
    let total = n * n.saturating_sub(1) / 2;
    let target = (total / parts).max(1);
    let mut out = Vec::new();
    let mut start = 0;
    let mut acc = 0;
    for i in 0..n {
        acc += n - i - 1;
        if acc >= target {
            out.push(start..i + 1);
            start = i + 1;
            acc = 0;
        }
    }
    if start < n {
        out.push(start..n);
    }
    out
}

/// Even split of `0..n` for row-parallel loops with uniform row cost.
pub(crate) fn uniform_chunks(n: usize) -> Vec<Range<usize>> {
    let parts = (rayon::current_num_threads() * 4).max(1);
    let size = n.div_ceil(parts).max(1);
    (0..n).step_by(size).map(|s| s..(s + size).min(n)).collect()
}

/// Counts of unordered pairs `i < j` per key, merged across threads.
/// Summation makes the result independent of the chunking.
pub(crate) fn unordered_pair_counts<K: PairKeys>(keys: &K) -> HashMap<K::Key, u64> {
    let n = keys.len();
    triangle_chunks(n)
        .into_par_iter()
        .map(|rows| {
            let mut local: HashMap<K::Key, u64> = HashMap::new();
            for i in rows {
                for j in i + 1..n {
                    *local.entry(keys.key(i, j)).or_insert(0) += 1;
                }
            }
            local
        })
        .reduce(HashMap::new, merge_counts)
}

pub(crate) fn merge_counts<K: Hash + Eq>(mut a: HashMap<K, u64>, b: HashMap<K, u64>) -> HashMap<K, u64> {
    if a.len() < b.len() {
        return merge_counts(b, a);
    }
    for (k, v) in b {
        *a.entry(k).or_insert(0) += v;
    }
    a
}

/// Dense counting for small integer frames: returns `None` when the largest
/// possible key is too big for an array.
pub(crate) fn dense_unordered_pair_counts(frame: &IntFrame) -> Option<Vec<u64>> {
    const DENSE_LIMIT: u64 = 1 << 20;
    let (xs, ys): (Vec<i64>, Vec<i64>) = frame.coords.iter().copied().unzip();
    let span = |v: &[i64]| match (v.iter().min(), v.iter().max()) {
        (Some(lo), Some(hi)) => hi.abs_diff(*lo),
        _ => 0,
    };
    let (sx, sy) = (span(&xs), span(&ys));
    let max_key = sx.checked_mul(sx)?.checked_add(sy.checked_mul(sy)?)?;
    if max_key > DENSE_LIMIT {
        return None;
    }
    let width = max_key as usize + 1;
    let n = frame.len();
    let counts = triangle_chunks(n)
        .into_par_iter()
        .map(|rows| {
            let mut local = vec![0u64; width];
            for i in rows {
                for j in i + 1..n {
                    local[frame.sqdist(i, j) as usize] += 1;
                }
            }
            local
        })
        .reduce(
            || vec![0u64; width],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Some(counts)
}

/// Sorted keys from `apex` to every other point.
pub(crate) fn apex_keys<K: PairKeys>(keys: &K, apex: usize) -> Vec<K::Key> {
    let mut v: Vec<K::Key> = (0..keys.len()).filter(|&j| j != apex).map(|j| keys.key(apex, j)).collect();
    v.sort_unstable();
    v
}

/// Run lengths of equal consecutive values in a sorted slice.
pub(crate) fn runs<T: PartialEq>(sorted: &[T]) -> impl Iterator<Item = (&T, usize)> + '_ {
    let mut i = 0;
    std::iter::from_fn(move || {
        if i >= sorted.len() {
            return None;
        }
        let start = i;
        while i < sorted.len() && sorted[i] == sorted[start] {
            i += 1;
        }
        Some((&sorted[start], i - start))
    })
}
