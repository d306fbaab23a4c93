//! Random sampling followed by deterministic deletion, producing subsets in
//! which no distance is spanned by many pairs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::{multiplicity_spectrum, MultiplicitySpectrum};
use crate::error::{Error, Result};
use crate::geometry::{Point, PointSet};
use crate::pairs::{with_keys, PairKeys};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SamplingVariant {
    PlaneE5,
    PlaneE3,
    Curve(u32),
}

impl SamplingVariant {
    /// The per-distance pair bound the deletion step enforces.
    pub fn max_pairs(self) -> u64 {
        match self {
            SamplingVariant::PlaneE5 => 4,
            SamplingVariant::PlaneE3 => 2,
            SamplingVariant::Curve(m) => m as u64 - 1,
        }
    }
}

impl fmt::Display for SamplingVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplingVariant::PlaneE5 => f.write_str("plane-E5"),
            SamplingVariant::PlaneE3 => f.write_str("plane-E3"),
            SamplingVariant::Curve(m) => write!(f, "curve({m})"),
        }
    }
}

/// Accepts `plane-E5`, `plane-E3`, and `curve(m)` or `curve:m` with `m >= 2`.
impl FromStr for SamplingVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "plane-e5" => return Ok(SamplingVariant::PlaneE5),
            "plane-e3" => return Ok(SamplingVariant::PlaneE3),
            _ => {}
        }
        let inner = t
            .strip_prefix("curve(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| t.strip_prefix("curve:"))
            .ok_or_else(|| Error::invalid(format!("unknown sampling variant '{t}'")))?;
        let m: u32 = inner.trim().parse().map_err(|_| Error::invalid(format!("bad curve order in '{t}'")))?;
        if m < 2 {
            return Err(Error::invalid("curve variant needs m >= 2"));
        }
        Ok(SamplingVariant::Curve(m))
    }
}

impl Serialize for SamplingVariant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SamplingVariant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub p: f64,
    pub variant: SamplingVariant,
    pub c: Rational,
    pub seed: u64,
}

/// Keep probability for an `n`-point input, natural logarithms throughout,
/// clamped to `(0, 1]`.
pub fn sampling_plan(n: u64, variant: SamplingVariant, c: &Rational, seed: u64) -> Result<SamplingPlan> {
    if n < 3 {
        return Err(Error::invalid(format!("sampling plan needs n >= 3, got {n}")));
    }
    if !c.is_positive() {
        return Err(Error::invalid("sampling constant c must be positive"));
    }
    let ln_n = (n as f64).ln();
    let ln_2c = (2.0 * c.to_f64()).ln();
    // log of the base, then the outer negative exponent
    let (log_base, outer) = match variant {
        SamplingVariant::PlaneE5 => (ln_2c + 41.0 / 7.0 * ln_n + 13.0 / 7.0 * ln_n.ln(), 1.0 / 9.0),
        SamplingVariant::PlaneE3 => (ln_2c + 23.0 / 7.0 * ln_n + 9.0 / 7.0 * ln_n.ln(), 1.0 / 5.0),
        SamplingVariant::Curve(m) => {
            if m < 2 {
                return Err(Error::invalid("curve variant needs m >= 2"));
            }
            (ln_2c + (m as f64 - 1.0 / 3.0) * ln_n, 1.0 / (2 * m - 1) as f64)
        }
    };
    let p = (-outer * log_base).exp();
    let p = if p.is_nan() || p >= 1.0 { 1.0 } else { p.max(f64::MIN_POSITIVE) };
    Ok(SamplingPlan { p, variant, c: c.clone(), seed })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionResult {
    pub subset: PointSet,
    pub sampled: usize,
    pub removed_isosceles: usize,
    pub removed_multiplicity: usize,
    /// Largest unordered pair count of any distance in `subset`.
    pub max_pair_multiplicity: u64,
}

/// Samples, removes isosceles apexes, then repairs over-full distance
/// classes. Points are visited in sorted order throughout, so the output
/// depends only on `(p, maxpairs, plan)`.
pub fn extract_subset(p: &PointSet, maxpairs: u64, plan: &SamplingPlan) -> Result<ExtractionResult> {
    if maxpairs < 1 {
        return Err(Error::invalid("maxpairs must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let prob = plan.p.clamp(0.0, 1.0);
    let sampled: Vec<Point> = p.points().iter().filter(|_| rng.gen_bool(prob)).cloned().collect();
    let sampled_len = sampled.len();

    let (kept, removed_isosceles, removed_multiplicity) = with_keys!(&sampled, |keys| {
        let mut alive = vec![true; keys.len()];
        let removed_iso = remove_isosceles_apexes(keys, &mut alive);
        let removed_mult = repair_classes(keys, &mut alive, maxpairs);
        (alive, removed_iso, removed_mult)
    });
    let subset = PointSet::new(sampled.into_iter().zip(kept).filter(|(_, k)| *k).map(|(pt, _)| pt), p.label.clone());
    let max_pair_multiplicity = multiplicity_spectrum(&subset).max_multiplicity() / 2;
    Ok(ExtractionResult { subset, sampled: sampled_len, removed_isosceles, removed_multiplicity, max_pair_multiplicity })
}

/// Deleting points never creates an isosceles triple, so a point found not
/// to be an apex stays that way and one forward pass removes the smallest
/// remaining apex at every step.
fn remove_isosceles_apexes<K: PairKeys>(keys: &K, alive: &mut [bool]) -> usize {
    let n = keys.len();
    let mut removed = 0;
    let mut scratch = Vec::with_capacity(n);
    for i in 0..n {
        scratch.clear();
        scratch.extend((0..n).filter(|&j| j != i && alive[j]).map(|j| keys.key(i, j)));
        scratch.sort_unstable();
        if scratch.windows(2).any(|w| w[0] == w[1]) {
            alive[i] = false;
            removed += 1;
        }
    }
    removed
}

fn repair_classes<K: PairKeys>(keys: &K, alive: &mut [bool], maxpairs: u64) -> usize {
    let n = keys.len();
    let mut classes: BTreeMap<K::Key, BTreeSet<(usize, usize)>> = BTreeMap::new();
    for i in (0..n).filter(|&i| alive[i]) {
        for j in (i + 1..n).filter(|&j| alive[j]) {
            classes.entry(keys.key(i, j)).or_default().insert((i, j));
        }
    }
    let mut violating: BTreeSet<K::Key> =
        classes.iter().filter(|(_, pairs)| pairs.len() as u64 > maxpairs).map(|(k, _)| k.clone()).collect();
    let mut removed = 0;
    while let Some(key) = violating.first().cloned() {
        let (victim, _) = *classes[&key].first().expect("violating class is nonempty");
        alive[victim] = false;
        removed += 1;
        for j in (0..n).filter(|&j| alive[j]) {
            let k = keys.key(victim, j);
            let class = classes.get_mut(&k).expect("pair was indexed");
            class.remove(&(victim.min(j), victim.max(j)));
            if class.len() as u64 <= maxpairs {
                violating.remove(&k);
            }
        }
    }
    removed
}

/// True iff no squared distance of `p` is spanned by more than `maxpairs`
/// unordered pairs.
pub fn verify_max_pair_multiplicity(p: &PointSet, maxpairs: u64) -> bool {
    multiplicity_spectrum(p).max_multiplicity() / 2 <= maxpairs
}

/// Certified comparison of one side of an interpolation inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certified {
    Equal,
    Holds,
    Violated,
    Undecided,
}

impl Certified {
    pub fn is_ok(self) -> bool {
        matches!(self, Certified::Equal | Certified::Holds)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterpolationReport {
    /// `Σm⁵ ≤ (Σm^{11/2})^{6/7} (Σm²)^{1/7}`
    pub e5: Certified,
    /// `Σm³ ≤ (Σm^{11/2})^{2/7} (Σm²)^{5/7}`
    pub e3: Certified,
    /// Bits of the fixed-point scale at which both directions were settled.
    pub precision_bits: u32,
}

impl InterpolationReport {
    pub fn holds(&self) -> bool {
        self.e5.is_ok() && self.e3.is_ok()
    }
}

const MAX_PRECISION_BITS: u32 = 1 << 14;

/// Checks both interpolation inequalities after raising them to the 7th
/// power, so the only irrational quantity is `T = Σ m^{11/2}`. `T` is
/// bracketed by integer square roots at scale `2^K`, and `K` doubles until
/// the comparison is certified. A spectrum with one multiplicity value is
/// the equality case and is reported as such.
pub fn holder_interpolation_check(s: &MultiplicitySpectrum) -> Result<InterpolationReport> {
    if s.is_empty() {
        return Err(Error::invalid("interpolation check needs a nonempty spectrum"));
    }
    let ms: Vec<BigUint> = s.multiplicities().map(BigUint::from).collect();
    if ms.iter().all(|m| *m == ms[0]) {
        return Ok(InterpolationReport { e5: Certified::Equal, e3: Certified::Equal, precision_bits: 0 });
    }
    let sum = |e: u32| -> BigUint { ms.iter().map(|m| m.pow(e)).sum() };
    let (s2, s3, s5) = (sum(2), sum(3), sum(5));
    let lhs5 = s5.pow(7);
    let lhs3 = s3.pow(7);

    let mut e5 = Certified::Undecided;
    let mut e3 = Certified::Undecided;
    let mut bits = 32u32;
    loop {
        // T·2^K lies in [lo, hi]
        let mut lo = BigUint::zero();
        let mut hi = BigUint::zero();
        for m in &ms {
            let scaled = m << (2 * bits);
            let r = scaled.sqrt();
            let m5 = m.pow(5);
            hi += &m5 * (if &r * &r == scaled { r.clone() } else { &r + BigUint::one() });
            lo += m5 * r;
        }
        // T^6 Σm² against (Σm⁵)^7, both sides scaled by 2^{6K}
        if e5 == Certified::Undecided {
            let lhs = &lhs5 << (6 * bits);
            if lhs <= lo.pow(6) * &s2 {
                e5 = Certified::Holds;
            } else if lhs > hi.pow(6) * &s2 {
                e5 = Certified::Violated;
            }
        }
        // T² (Σm²)^5 against (Σm³)^7, both sides scaled by 2^{2K}
        if e3 == Certified::Undecided {
            let lhs = &lhs3 << (2 * bits);
            let s2_5 = s2.pow(5);
            if lhs <= lo.pow(2) * &s2_5 {
                e3 = Certified::Holds;
            } else if lhs > hi.pow(2) * &s2_5 {
                e3 = Certified::Violated;
            }
        }
        if (e5 != Certified::Undecided && e3 != Certified::Undecided) || bits >= MAX_PRECISION_BITS {
            return Ok(InterpolationReport { e5, e3, precision_bits: bits });
        }
        bits *= 2;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Line,
    Parabola,
    Circle,
}

impl FromStr for CurveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "line" => Ok(CurveKind::Line),
            "parabola" => Ok(CurveKind::Parabola),
            "circle" => Ok(CurveKind::Circle),
            other => Err(Error::invalid(format!("unknown curve '{other}'"))),
        }
    }
}

/// `n` rational points on the curve at parameters `t = 0, 1, …, n−1`: the
/// line `(t, 0)`, the parabola `(t, t²)`, and the unit circle through
/// `((1−t²)/(1+t²), 2t/(1+t²))`.
pub fn curve_pointset(curve: CurveKind, n: usize) -> Result<PointSet> {
    if n < 1 {
        return Err(Error::invalid("curve point set needs n >= 1"));
    }
    let pts = (0..n as i64).map(|t| match curve {
        CurveKind::Line => Point::new(t, 0),
        CurveKind::Parabola => Point::new(t, t * t),
        CurveKind::Circle => {
            let den = 1 + t * t;
            Point::new(Rational::new(1 - t * t, den), Rational::new(2 * t, den))
        }
    });
    let label = match curve {
        CurveKind::Line => "line",
        CurveKind::Parabola => "parabola",
        CurveKind::Circle => "circle",
    };
    Ok(PointSet::new(pts, format!("{label}({n})")))
}
