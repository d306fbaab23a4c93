//! Exact invariant checks with seeded inputs.
//!
//! Each check builds its own inputs from a seed, compares every case exactly,
//! and reports the failing cases. [`crate::harness::verify_suite`] runs them
//! at desk scale; the acceptance tests run them at larger scales.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::constructions::{behrend_collinear, behrend_set, elekes_bipartite, integer_grid, is_progression_free, random_pointset};
use crate::energy::{
    at_least, bipartite_spectrum, distinct_energy, energy_bruteforce, holder_lower_bound, isosceles_count, max_codistance,
    multiplicity_spectrum, power_mean_bound, rich_spectrum, EnergyFn, MultiplicitySpectrum,
};
use crate::error::Result;
use crate::expansion::{
    additive_degeneracy, compose_structured, constant_difference_direction, curve_family, decompose, expansion_energy,
    expansion_energy_bruteforce, expansion_energy_lower, image_spectrum, richness_incidence_check, structured_curve_family,
    translation_symmetry_search, StructuredSet,
};
use crate::extraction::{
    curve_pointset, extract_subset, holder_interpolation_check, sampling_plan, verify_max_pair_multiplicity, CurveKind, SamplingVariant,
};
use crate::geometry::{sqdist, Point, PointSet};
use crate::incidence::{count_incidences, lattice_bound, variety_lattice_count, PlaneCurve};
use crate::local::{intersection_lemma_terms, min_distinct_over_ksubsets, set_intersection_witness};
use crate::polynomial::{BivariatePolynomial, UnivariatePolynomial};
use crate::rational::Rational;

/// Result of one check: how many cases ran and the first few failures.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub passed: bool,
    pub cases: usize,
    pub detail: String,
}

const MAX_REPORTED_FAILURES: usize = 3;

struct Tally {
    cases: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally { cases: 0, failures: Vec::new(), notes: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn finish(self) -> CheckOutcome {
        let passed = self.failures.is_empty();
        let mut detail = if passed {
            format!("{} cases", self.cases)
        } else {
            let shown: Vec<_> = self.failures.iter().take(MAX_REPORTED_FAILURES).cloned().collect();
            format!("{} of {} cases failed: {}", self.failures.len(), self.cases, shown.join("; "))
        };
        if !self.notes.is_empty() {
            detail.push_str("; ");
            detail.push_str(&self.notes.join("; "));
        }
        CheckOutcome { passed, cases: self.cases, detail }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_rational(rng: &mut ChaCha8Rng, range: i64, den: i64) -> Rational {
    Rational::new(rng.gen_range(-range..=range), rng.gen_range(1..=den))
}

fn random_point(rng: &mut ChaCha8Rng, range: i64, den: i64) -> Point {
    Point::new(random_rational(rng, range, den), random_rational(rng, range, den))
}

/// A random polynomial of total degree at most `deg` with small integer
/// coefficients; never constant.
pub fn random_polynomial(rng: &mut ChaCha8Rng, deg: u32, coeff_range: i64) -> BivariatePolynomial {
    loop {
        let mut terms = Vec::new();
        for i in 0..=deg {
            for j in 0..=deg - i {
                if rng.gen_bool(0.5) {
                    terms.push(((i, j), Rational::from(rng.gen_range(-coeff_range..=coeff_range))));
                }
            }
        }
        let f = BivariatePolynomial::from_terms(terms);
        if !f.is_constant() {
            return f;
        }
    }
}

fn random_int_set(rng: &mut ChaCha8Rng, size: usize, range: i64) -> Vec<Rational> {
    let mut pool: Vec<i64> = (-range..=range).collect();
    pool.shuffle(rng);
    let mut v: Vec<Rational> = pool.into_iter().take(size).map(Rational::from).collect();
    v.sort();
    v
}

/// `sqdist` is symmetric and vanishes exactly on equal points.
pub fn sqdist_basics(trials: usize, seed: u64) -> CheckOutcome {
    let mut rng = rng(seed);
    let mut t = Tally::new();
    for _ in 0..trials {
        let p = random_point(&mut rng, 6, 4);
        let q = if rng.gen_bool(0.2) { p.clone() } else { random_point(&mut rng, 6, 4) };
        let d = sqdist(&p, &q);
        t.check(d == sqdist(&q, &p), || format!("asymmetric at {p} {q}"));
        t.check(d.is_zero() == (p == q), || format!("zero test wrong at {p} {q}"));
    }
    t.finish()
}

/// Spectra are unchanged by translation and axis reflections, and scaling by
/// `s` multiplies every key by `s²`.
pub fn spectrum_invariance(trials: usize, n: usize, seed: u64) -> Result<CheckOutcome> {
    let mut rng = rng(seed);
    let mut t = Tally::new();
    for trial in 0..trials {
        let p = random_pointset(n, 5, 3, seed.wrapping_add(trial as u64))?;
        let s = multiplicity_spectrum(&p);
        let (dx, dy) = (random_rational(&mut rng, 9, 5), random_rational(&mut rng, 9, 5));
        t.check(multiplicity_spectrum(&p.translate(&dx, &dy)) == s, || format!("translation changed trial {trial}"));
        t.check(multiplicity_spectrum(&p.reflect_x()) == s, || format!("x-reflection changed trial {trial}"));
        t.check(multiplicity_spectrum(&p.reflect_y()) == s, || format!("y-reflection changed trial {trial}"));
        let mut k = random_rational(&mut rng, 5, 4);
        if k.is_zero() {
            k = Rational::new(3, 2);
        }
        let scaled = MultiplicitySpectrum::from_counts(s.entries().iter().map(|(d, &m)| (d * k.square(), m)));
        t.check(multiplicity_spectrum(&p.scale(&k)) == scaled, || format!("scaling by {k} broke trial {trial}"));
    }
    Ok(t.finish())
}

/// `energy(spectrum, d)` equals the definitional tuple count on random
/// rational sets with `n <= max_n`.
pub fn oracle_equivalence(energy_fn: EnergyFn, sets: usize, max_n: usize, ds: &[u32], caps: &Caps, seed: u64) -> Result<CheckOutcome> {
    let mut rng = rng(seed);
    let mut t = Tally::new();
    for s in 0..sets {
        let n = rng.gen_range(1..=max_n);
        // small ranges force repeated distances
        let p = random_pointset(n, 2, if s % 3 == 0 { 2 } else { 1 }, seed.wrapping_mul(31).wrapping_add(s as u64))?;
        let spectrum = multiplicity_spectrum(&p);
        for &d in ds {
            let fast = energy_fn(&spectrum, d)?;
            let brute = energy_bruteforce(&p, d, caps)?;
            t.check(fast == brute, || format!("set {s} (n={n}) d={d}: {fast} vs {brute}"));
        }
    }
    Ok(t.finish())
}

/// Unipartite totals are `n² − n`; bipartite totals are `|P₁||P₂| − |P₁∩P₂|`.
pub fn spectrum_totals(trials: usize, seed: u64) -> Result<CheckOutcome> {
    let mut rng = rng(seed);
    let mut t = Tally::new();
    for trial in 0..trials {
        let n = rng.gen_range(0..40);
        let p = random_pointset(n, 6, 2, seed.wrapping_add(2 * trial as u64))?;
        let q = random_pointset(rng.gen_range(0..40), 6, 2, seed.wrapping_add(2 * trial as u64 + 1))?;
        let total = multiplicity_spectrum(&p).total();
        t.check(total == (n * n.saturating_sub(1)) as u64, || format!("unipartite total {total} for n={n}"));
        let common = p.points().iter().filter(|x| q.contains(x)).count();
        let bt = bipartite_spectrum(&p, &q).total();
        t.check(bt == (p.len() * q.len() - common) as u64, || format!("bipartite total {bt}"));
    }
    Ok(t.finish())
}

/// `E_d >= (n² − n)^d / D^{d−1}` on every given set.
pub fn holder_lower(energy_fn: EnergyFn, sets: &[PointSet], ds: &[u32]) -> Result<CheckOutcome> {
    let mut t = Tally::new();
    for p in sets {
        let s = multiplicity_spectrum(p);
        for &d in ds {
            let e = energy_fn(&s, d)?;
            let bound = holder_lower_bound(p.len() as u64, s.distinct() as u64, d)?;
            t.check(at_least(&e, &bound), || format!("{} d={d}: {e} < {bound}", p.label));
        }
    }
    Ok(t.finish())
}

/// `E_d(P₁, P₂) >= (|P₁||P₂|)^d / D^{d−1}` on random disjoint pairs.
pub fn bipartite_holder(energy_fn: EnergyFn, instances: usize, ds: &[u32], seed: u64) -> Result<CheckOutcome> {
    let mut rng = rng(seed);
    let mut t = Tally::new();
    for inst in 0..instances {
        let n1 = rng.gen_range(1..=30);
        let n2 = rng.gen_range(1..=30);
        let both = random_pointset(n1 + n2, 6, if inst % 2 == 0 { 1 } else { 3 }, seed.wrapping_add(inst as u64))?;
        let mut order: Vec<usize> = (0..both.len()).collect();
        order.shuffle(&mut rng);
        let first: BTreeSet<usize> = order[..n1].iter().copied().collect();
        let p1 = both.retain_indices(|i| first.contains(&i));
        let p2 = both.retain_indices(|i| !first.contains(&i));
        let s = bipartite_spectrum(&p1, &p2);
        for &d in ds {
            let e = energy_fn(&s, d)?;
            let bound = power_mean_bound((n1 * n2) as u64, s.distinct() as u64, d)?;
            t.check(at_least(&e, &bound), || format!("instance {inst} d={d}: {e} < {bound}"));
        }
    }
    Ok(t.finish())
}

/// `E_d* <= E_d` and `E_{d+1} >= E_d`.
pub fn energy_orderings(energy_fn: EnergyFn, trials: usize, caps: &Caps, seed: u64) -> Result<CheckOutcome> {
    let mut t = Tally::new();
    for trial in 0..trials {
        let p = random_pointset(6 + trial % 20, 3, 1, seed.wrapping_add(trial as u64))?;
        let s = multiplicity_spectrum(&p);
        for d in 1..=4 {
            let e = energy_fn(&s, d)?;
            let star = distinct_energy(&p, d, caps)?;
            t.check(star <= e, || format!("trial {trial} d={d}: E* {star} > E {e}"));
            let next = energy_fn(&s, d + 1)?;
            t.check(next >= e, || format!("trial {trial}: E_{} < E_{d}", d + 1));
        }
    }
    Ok(t.finish())
}

/// `isosceles_count` against a direct scan of all triples.
pub fn isosceles_oracle(trials: usize, seed: u64) -> Result<CheckOutcome> {
    let mut t = Tally::new();
    for trial in 0..trials {
        let p = random_pointset(3 + trial % 15, 3, 1 + (trial % 2) as i64, seed.wrapping_add(trial as u64))?;
        let pts = p.points();
        let mut brute = 0u64;
        for a in 0..pts.len() {
            for b in a + 1..pts.len() {
                for c in b + 1..pts.len() {
                    let (ab, ac, bc) = (sqdist(&pts[a], &pts[b]), sqdist(&pts[a], &pts[c]), sqdist(&pts[b], &pts[c]));
                    if ab == ac || ab == bc || ac == bc {
                        brute += 1;
                    }
                }
            }
        }
        let fast = isosceles_count(&p);
        t.check(fast == brute, || format!("trial {trial}: {fast} vs {brute}"));
    }
    Ok(t.finish())
}

/// Dyadic buckets bracket the energy: `lower <= E_d < 2^d · lower`; `k_j` is
/// nonincreasing with `k_1 = D`.
pub fn dyadic_bracket(energy_fn: EnergyFn, sets: &[PointSet], ds: &[u32]) -> Result<CheckOutcome> {
    let mut t = Tally::new();
    for p in sets {
        let s = multiplicity_spectrum(p);
        let rich = rich_spectrum(&s);
        t.check(rich.counts.windows(2).all(|w| w[0] >= w[1]), || format!("{}: k_j increases", p.label));
        t.check(rich.counts.first().copied().unwrap_or(0) == s.distinct(), || format!("{}: k_1 != D", p.label));
        for &d in ds {
            let e = energy_fn(&s, d)?;
            let (lo, hi) = rich.dyadic_energy_bracket(d);
            let ok = if s.is_empty() { e == BigUint::from(0u32) } else { lo <= e && e < hi };
            t.check(ok, || format!("{} d={d}: {e} outside [{lo}, {hi})", p.label));
        }
    }
    Ok(t.finish())
}

/// The intersection lemma on random families over `{0, …, n−1}`: whenever
/// `k >= 2dn^d/m^d` sets of size at least `m` are given, some `d` of them
/// share at least `m^d/(2n^{d−1})` elements. Families are sized to meet the
/// hypothesis.
pub fn intersection_lemma(trials: usize, max_n: usize, ds: &[u32], caps: &Caps, seed: u64) -> Result<CheckOutcome> {
    let mut rng = rng(seed);
    let mut t = Tally::new();
    let mut skipped = 0;
    for trial in 0..trials {
        let d = ds[trial % ds.len()];
        let n = rng.gen_range(2..=max_n);
        let m = rng.gen_range((n / 2).max(1)..=n);
        let (trigger, guarantee) = intersection_lemma_terms(n as u64, m as u64, d)?;
        let k = trigger.ceil().to_string().parse::<usize>().unwrap_or(usize::MAX).max(d as usize);
        if crate::energy::binomial_saturating(k as u128, d as u128) > caps.tuples.min(2_000_000) {
            skipped += 1;
            continue;
        }
        let family: Vec<Vec<usize>> = (0..k)
            .map(|_| {
                let size = rng.gen_range(m..=n);
                let mut all: Vec<usize> = (0..n).collect();
                all.shuffle(&mut rng);
                all.truncate(size);
                all
            })
            .collect();
        let w = set_intersection_witness(&family, n, d as usize, caps)?;
        t.check(Rational::from(w.size as u64) >= guarantee, || format!("n={n} m={m} d={d} k={k}: best {} < {guarantee}", w.size));
    }
    if skipped > 0 {
        t.note(format!("{skipped} draws skipped (family too large to enumerate)"));
    }
    Ok(t.finish())
}

/// Behrend sets are progression-free for every `N`, their collinear
/// placements span no isosceles triple and every point sees `n − 1` distinct
/// distances, and when at most `max_points` points are placed every 3-subset
/// spans 3 distances.
pub fn behrend_pipeline(ns: &[u64], max_points: usize, caps: &Caps) -> Result<CheckOutcome> {
    let mut t = Tally::new();
    for &n in ns {
        let set = behrend_set(n);
        let elems: Vec<i64> = set.elements.iter().map(|&e| e as i64).collect();
        t.check(is_progression_free(&elems), || format!("behrend_set({n}) has a 3-AP"));
        t.check(elems.iter().all(|&e| 1 <= e && e <= n as i64), || format!("behrend_set({n}) leaves [1, N]"));
        t.note(format!("|behrend_set({n})| = {}", elems.len()));
        let p = behrend_collinear(n);
        t.check(isosceles_count(&p) == 0, || format!("behrend_collinear({n}) has isosceles triples"));
        t.check(p.len() < 2 || max_codistance(&p) == 1, || format!("behrend_collinear({n}) repeats a distance at a point"));
        if p.len() >= 3 && p.len() <= max_points {
            let m = min_distinct_over_ksubsets(&p, 3, caps)?;
            t.check(m.min_distinct == 3, || format!("behrend_collinear({n}) 3-subset with {} distances", m.min_distinct));
        }
    }
    Ok(t.finish())
}

/// For `n = 4m³`: cross squared distances are integers and
/// `D <= m² + m·A + B <= 4√(mn)` (the last compared as `D² <= 16mn`).
pub fn elekes_bounds(ms: &[u64]) -> Result<CheckOutcome> {
    let mut t = Tally::new();
    let mut worst: f64 = 0.0;
    for &m in ms {
        let n = 4 * m * m * m;
        let c = elekes_bipartite(m, n)?;
        let s = c.cross_spectrum();
        let d = s.distinct() as u64;
        t.check(s.entries().keys().all(Rational::is_integer), || format!("m={m}: non-integer cross distance"));
        t.check(d <= c.distance_bound(), || format!("m={m}: D={d} > {}", c.distance_bound()));
        t.check(d * d <= 16 * m * n, || format!("m={m}: D={d} > 4 sqrt(mn)"));
        worst = worst.max(d as f64 / ((m * n) as f64).sqrt());
    }
    t.note(format!("max D/sqrt(mn) = {worst:.4}"));
    Ok(t.finish())
}

/// `D(grid)/n` strictly decreasing along the given sizes.
pub fn grid_density(ns: &[usize]) -> CheckOutcome {
    let mut t = Tally::new();
    let ratios: Vec<(usize, Rational)> =
        ns.iter().map(|&n| (n, Rational::new(multiplicity_spectrum(&integer_grid(n)).distinct() as i64, n as i64))).collect();
    for w in ratios.windows(2) {
        t.check(w[1].1 < w[0].1, || format!("D/n at n={} is {} >= {} at n={}", w[1].0, w[1].1, w[0].1, w[0].0));
    }
    t.note(ratios.iter().map(|(n, r)| format!("n={n}: {:.4}", r.to_f64())).collect::<Vec<_>>().join(", "));
    t.finish()
}

fn median(v: &mut [usize]) -> f64 {
    v.sort_unstable();
    let k = v.len();
    if k == 0 {
        0.0
    } else if k % 2 == 1 {
        v[k / 2] as f64
    } else {
        (v[k / 2 - 1] + v[k / 2]) as f64 / 2.0
    }
}

/// Every extraction on `integer_grid(n)` passes the pair-multiplicity bound,
/// is isosceles-free and reproducible, and the median output size over the
/// seeds does not decrease along `ns`.
pub fn extraction_runs(ns: &[usize], seeds: u64, variants: &[SamplingVariant]) -> Result<CheckOutcome> {
    let mut t = Tally::new();
    for &variant in variants {
        let maxpairs = variant.max_pairs();
        let mut medians = Vec::new();
        for &n in ns {
            let grid = integer_grid(n);
            let mut sizes = Vec::new();
            for seed in 0..seeds {
                let plan = sampling_plan(n as u64, variant, &Rational::one(), seed)?;
                let r = extract_subset(&grid, maxpairs, &plan)?;
                t.check(verify_max_pair_multiplicity(&r.subset, maxpairs), || format!("{variant} n={n} seed={seed}: bound broken"));
                t.check(isosceles_count(&r.subset) == 0, || format!("{variant} n={n} seed={seed}: isosceles triple left"));
                if seed == 0 {
                    t.check(extract_subset(&grid, maxpairs, &plan)? == r, || format!("{variant} n={n}: rerun differs"));
                }
                sizes.push(r.subset.len());
            }
            medians.push(median(&mut sizes));
        }
        for (w, pair) in medians.windows(2).zip(ns.windows(2)) {
            t.check(w[1] >= w[0], || format!("{variant}: median {} at n={} below {} at n={}", w[1], pair[1], w[0], pair[0]));
        }
        t.note(format!("{variant} medians {medians:?}"));
    }
    Ok(t.finish())
}

/// Both interpolation inequalities, certified, on every given spectrum.
pub fn interpolation(spectra: &[(String, MultiplicitySpectrum)]) -> Result<CheckOutcome> {
    let mut t = Tally::new();
    for (label, s) in spectra.iter().filter(|(_, s)| !s.is_empty()) {
        let r = holder_interpolation_check(s)?;
        t.check(r.holds(), || format!("{label}: {:?}/{:?} at {} bits", r.e5, r.e3, r.precision_bits));
    }
    Ok(t.finish())
}

/// Measured `E_m / n^{m+2/3}` on parabola sets (reported, not bounded).
pub fn curve_energy_ratios(ns: &[usize], ms: &[u32], energy_fn: EnergyFn) -> Result<CheckOutcome> {
    let mut t = Tally::new();
    for &m in ms {
        let mut worst: f64 = 0.0;
        for &n in ns {
            let p = curve_pointset(CurveKind::Parabola, n)?;
            let e = energy_fn(&multiplicity_spectrum(&p), m)?;
            let ratio = Rational::from(e.to_string().parse::<num_bigint::BigInt>().expect("decimal")).to_f64()
                / (n as f64).powf(m as f64 + 2.0 / 3.0);
            t.check(ratio.is_finite(), || format!("non-finite ratio at n={n}"));
            worst = worst.max(ratio);
        }
        t.note(format!("m={m}: max E_m/n^(m+2/3) = {worst:.4}"));
    }
    Ok(t.finish())
}

/// Spectrum-based `E_f` against the quadruple count, plus the
/// Cauchy–Schwarz lower bound.
pub fn expansion_energy_oracle(trials: usize, max_size: usize, caps: &Caps, seed: u64) -> Result<CheckOutcome> {
    let mut rng = rng(seed);
    let mut t = Tally::new();
    for trial in 0..trials {
        let f_size = rng.gen_range(1..=3);
        let f = random_polynomial(&mut rng, f_size, 3);
        let a_size = rng.gen_range(1..=max_size);
        let a = random_int_set(&mut rng, a_size, 6);
        let b_size = rng.gen_range(1..=max_size);
        let b = random_int_set(&mut rng, b_size, 6);
        let s = image_spectrum(&f, &a, &b);
        let e = expansion_energy(&s);
        let brute = expansion_energy_bruteforce(&f, &a, &b, caps)?;
        t.check(e == BigUint::from(brute), || format!("trial {trial} f={f}: {e} vs {brute}"));
        t.check(at_least(&e, &expansion_energy_lower(&s)), || format!("trial {trial}: Cauchy-Schwarz fails"));
    }
    Ok(t.finish())
}

/// Labeled additive-degeneracy cases: `(polynomial, degenerate?)`.
pub fn degeneracy_cases() -> Vec<(BivariatePolynomial, bool)> {
    let p = |s: &str| s.parse::<BivariatePolynomial>().expect("fixture parses");
    let mut out = Vec::new();
    let outers = ["z^2", "z^3 + z", "z^2 - 3 z + 1", "z^4 - z", "z"];
    let linears = [(1, 1), (1, -1), (2, 3), (1, 0), (0, 1)];
    for (h, (a, b)) in outers.iter().zip(linears) {
        let h: UnivariatePolynomial = h.parse().expect("fixture parses");
        out.push((h.apply_linear(&Rational::from(a as i64), &Rational::from(b as i64)), true));
    }
    for (h, l) in [("z^2 + 2 z", "x - 1/2 y"), ("z^3", "3 x + y"), ("2 z^2 - z", "x + 4 y"), ("z^4", "x - 2 y"), ("z^2 + 1", "y")] {
        let h: UnivariatePolynomial = h.parse().expect("fixture parses");
        out.push((h.apply(&p(l)), true));
    }
    for s in [
        "x y",
        "x^2 - 2 x y + 2 y^2",
        "x^2 - 2 x y + 5 y^2",
        "x^2 + y^2",
        "x^3 + y",
        "x y^2 + x",
        "x^2 y",
        "x^2 + y^3",
        "x^2 + x y + y",
        "(x + y)^2 + x",
    ] {
        out.push((p(s), false));
    }
    out
}

/// Labeled decomposition cases: `(polynomial, decomposable?)`.
pub fn decomposition_cases() -> Vec<(BivariatePolynomial, bool)> {
    let p = |s: &str| s.parse::<BivariatePolynomial>().expect("fixture parses");
    let yes = [
        "x^2 y^2",
        "x^2 y^2 + 2 x y + 1",
        "(x + y)^2",
        "(x^2 + y)^3",
        "(x y + x)^2 - (x y + x)",
        "(x - y^2)^2 + 3 (x - y^2)",
        "-2 (x^3 + x y)^2 + 5",
        "(x^2 - 3 y^2 + x)^3 + (x^2 - 3 y^2 + x)",
        "1/2 (2 x + y + 1)^4 - (2 x + y + 1)^2",
        "(x y - 1)^2 (x y - 1) + 7",
    ];
    let no =
        ["x y", "x + y", "x^2 + y", "x^3 + y^3", "x^2 y + y", "x^2 - 2 x y + 2 y^2", "x y + x + y", "x^2 + y^2", "x^4 + y", "x^3 y + x"];
    yes.iter().map(|s| (p(s), true)).chain(no.iter().map(|s| (p(s), false))).collect()
}

/// Additive degeneracy agrees with the labels, every witness recomposes, and
/// the translation search over `{−4..4}²` finds a shift leaving `f` unchanged
/// exactly for the degenerate cases.
pub fn degeneracy_suite(caps: &Caps) -> Result<CheckOutcome> {
    let mut t = Tally::new();
    let grid: Vec<Rational> = (-4..=4).map(Rational::from).collect();
    for (f, degenerate) in degeneracy_cases() {
        let w = additive_degeneracy(&f)?;
        t.check(w.is_some() == degenerate, || format!("{f}: expected degenerate={degenerate}"));
        if let Some(w) = &w {
            t.check(w.h.apply_linear(&w.a, &w.b) == f, || format!("{f}: witness does not recompose"));
        }
        let invariant = translation_symmetry_search(&f, &grid, &grid, caps)?.into_iter().filter(|(x, y)| f.translate(x, y) == f).count();
        t.check((invariant > 0) == degenerate, || format!("{f}: translation search disagrees ({invariant} invariant shifts)"));
    }
    Ok(t.finish())
}

/// Decomposition agrees with the labels and every returned pair recomposes.
pub fn decomposition_suite(caps: &Caps) -> Result<CheckOutcome> {
    let mut t = Tally::new();
    for (f, decomposable) in decomposition_cases() {
        let d = decompose(&f, caps.decompose_degree)?;
        t.check(d.is_some() == decomposable, || format!("{f}: expected decomposable={decomposable}"));
        if let Some(d) = d {
            t.check(d.outer.degree() >= 2 && d.outer.apply(&d.inner) == f, || format!("{f}: bad pair {d}"));
        }
    }
    Ok(t.finish())
}

/// `decompose(f₁ ∘ f₂)` succeeds and recomposes for random `f₁` of degree at
/// least 2 and nonconstant `f₂` within the degree cap.
pub fn random_compositions(trials: usize, caps: &Caps, seed: u64) -> Result<CheckOutcome> {
    let mut rng = rng(seed);
    let mut t = Tally::new();
    for trial in 0..trials {
        let e = rng.gen_range(2..=3u32);
        let inner_deg = rng.gen_range(1..=(caps.decompose_degree / e).clamp(1, 4));
        let inner = random_polynomial(&mut rng, inner_deg, 3);
        let mut coeffs: Vec<Rational> = (0..e).map(|_| Rational::from(rng.gen_range(-3..=3i64))).collect();
        coeffs.push(Rational::from([-2i64, -1, 1, 2, 3][rng.gen_range(0..5)]));
        let outer = UnivariatePolynomial::new(coeffs);
        let f = outer.apply(&inner);
        if f.degree() > caps.decompose_degree {
            continue;
        }
        let d = decompose(&f, caps.decompose_degree)?;
        t.check(d.as_ref().is_some_and(|d| d.outer.degree() >= 2 && d.outer.apply(&d.inner) == f), || {
            format!("trial {trial}: ({outer}) o ({inner}) not recovered")
        });
    }
    Ok(t.finish())
}

/// Non-degenerate polynomials of degree at most 4 used by the curve-family
/// checks.
pub fn family_polynomials() -> Vec<BivariatePolynomial> {
    ["x y", "x^2 - 2 x y + 2 y^2", "x^2 - 2 x y + 5 y^2", "x^2 + y^2", "x^3 + y", "x y^2 + x", "x^2 y - y^3 + x", "x^4 + x y + y^2"]
        .iter()
        .map(|s| s.parse().expect("fixture parses"))
        .collect()
}

/// The richness incidence count reaches `j|A||B|k_j` for every `j` up to the
/// largest multiplicity. No two members of `Γ_j` are proportional when `f`
/// has no constant-difference direction; collisions for the other
/// polynomials are listed in the detail without failing the check.
pub fn family_distinctness(polys: &[BivariatePolynomial], grids: usize, max_size: usize, caps: &Caps, seed: u64) -> Result<CheckOutcome> {
    let mut rng = rng(seed);
    let mut t = Tally::new();
    for f in polys {
        if additive_degeneracy(f)?.is_some() {
            t.check(false, || format!("{f} is additively degenerate"));
            continue;
        }
        for g in 0..grids {
            let a_size = rng.gen_range(2..=max_size);
            let a = random_int_set(&mut rng, a_size, 4);
            let b_size = rng.gen_range(2..=max_size);
            let b = random_int_set(&mut rng, b_size, 4);
            let max_m = image_spectrum(f, &a, &b).max_multiplicity();
            let protected = constant_difference_direction(f).is_none();
            for j in 1..=max_m {
                let fam = curve_family(f, &a, &b, j, caps)?;
                if protected {
                    t.check(fam.collisions == 0, || format!("{f} grid {g} j={j}: {} collisions", fam.collisions));
                } else if fam.collisions > 0 {
                    t.note(format!("{f} grid {g} j={j}: {} collisions (constant-difference direction)", fam.collisions));
                }
                let r = richness_incidence_check(&fam, caps)?;
                t.check(r.holds, || format!("{f} grid {g} j={j}: {} < {}", r.incidences, r.required));
            }
        }
    }
    Ok(t.finish())
}

/// Structured families built from indecomposable compositions with
/// `deg τ_B >= 2` meet the richness count, and have no proportional members
/// when the composition has no constant-difference direction.
pub fn structured_families(caps: &Caps) -> Result<CheckOutcome> {
    let p = |s: &str| s.parse::<BivariatePolynomial>().expect("fixture parses");
    let u = |s: &str| s.parse::<UnivariatePolynomial>().expect("fixture parses");
    let ints = |v: &[i64]| v.iter().map(|&x| Rational::from(x)).collect::<Vec<_>>();
    let cases = [
        ("x + y", "z", "z^2", ints(&[0, 1, 2, 3]), ints(&[1, 2, 3])),
        ("x + y", "z^2 + z", "z^3", ints(&[0, 1, 2]), ints(&[-1, 1, 2])),
        ("x y", "z + 1", "z^2", ints(&[0, 1, 2]), ints(&[1, 2, 3])),
        ("x - y", "z^3", "z^2 + z", ints(&[-1, 0, 1]), ints(&[0, 1, 2, 3])),
        ("x y + x", "z", "z^2 - z", ints(&[1, 2, 3]), ints(&[2, 3, 4])),
    ];
    let mut t = Tally::new();
    for (f, ta, tb, ga, gb) in cases {
        let (f, ta, tb) = (p(f), u(ta), u(tb));
        let g = compose_structured(&f, &ta, &tb);
        if decompose(&g, caps.decompose_degree)?.is_some() {
            t.check(false, || format!("{g} is decomposable"));
            continue;
        }
        let sa = StructuredSet::new(&ga, ta);
        let sb = StructuredSet::new(&gb, tb);
        let max_m = image_spectrum(&f, &sa.values(), &sb.values()).max_multiplicity();
        let protected = constant_difference_direction(&g).is_none();
        for j in 1..=max_m {
            let fam = structured_curve_family(&f, &sa, &sb, j, caps)?;
            if protected {
                t.check(fam.collisions == 0, || format!("{g} j={j}: {} collisions", fam.collisions));
            } else if fam.collisions > 0 {
                t.note(format!("{g} j={j}: {} collisions (constant-difference direction)", fam.collisions));
            }
            let r = richness_incidence_check(&fam, caps)?;
            t.check(r.holds, || format!("{g} j={j}: {} < {}", r.incidences, r.required));
        }
    }
    Ok(t.finish())
}

/// `m_δ <= deg(f)·(|A| + |B|)` whenever `f − δ` has no axis-parallel line
/// through the grid, and the lattice count of `f − δ` equals `m_δ`.
pub fn grid_multiplicity_bound(trials: usize, seed: u64) -> Result<CheckOutcome> {
    let mut rng = rng(seed);
    let mut t = Tally::new();
    for trial in 0..trials {
        let f_size = rng.gen_range(1..=3);
        let f = random_polynomial(&mut rng, f_size, 3);
        let a_size = rng.gen_range(1..=8);
        let a = random_int_set(&mut rng, a_size, 5);
        let b_size = rng.gen_range(1..=8);
        let b = random_int_set(&mut rng, b_size, 5);
        let s = image_spectrum(&f, &a, &b);
        for (delta, &m) in s.entries() {
            let g = &f - &BivariatePolynomial::constant(delta.clone());
            let lc = variety_lattice_count(&g, &a, &b)?;
            t.check(lc.count == m, || format!("trial {trial}: lattice count {} vs m={m}", lc.count));
            if !lc.axis_parallel_factor {
                let bound = lattice_bound(&g, a.len(), b.len());
                t.check(m <= bound, || format!("trial {trial} f={f} δ={delta}: m={m} > {bound}"));
            }
        }
    }
    Ok(t.finish())
}

/// Distinct circles centred on the x-axis share at most one point above it,
/// so the incidence graph with upper-half-plane points is `K_{2,2}`-free.
pub fn upper_half_k22(configs: usize, caps: &Caps, seed: u64) -> Result<CheckOutcome> {
    let mut rng = rng(seed);
    let mut t = Tally::new();
    let mut total_incidences = 0u64;
    for c in 0..configs {
        let centers: BTreeSet<i64> = (0..rng.gen_range(2..=6)).map(|_| rng.gen_range(-6..=6)).collect();
        let pts: BTreeSet<(i64, i64)> = (0..rng.gen_range(3..=12)).map(|_| (rng.gen_range(-6..=6), rng.gen_range(1..=6))).collect();
        // radii through the chosen points so that incidences actually occur
        let mut circles = BTreeSet::new();
        for &cx in &centers {
            for &(px, py) in &pts {
                if rng.gen_bool(0.6) {
                    circles.insert((cx, (px - cx) * (px - cx) + py * py));
                }
            }
        }
        let curves: Vec<PlaneCurve> = circles
            .iter()
            .map(|&(cx, r)| PlaneCurve::circle(&Rational::from(cx), &Rational::zero(), &Rational::from(r)))
            .collect::<Result<_>>()?;
        let p = PointSet::new(pts.iter().map(|&(x, y)| Point::new(x, y)), "");
        let rep = count_incidences(&p, &curves, caps)?;
        total_incidences += rep.count;
        t.check(rep.k22_free, || format!("config {c}: two circles share two upper points"));
    }
    t.note(format!("{total_incidences} incidences"));
    Ok(t.finish())
}

/// `variety_lattice_count <= deg(f)·(|A| + |B|)` whenever the axis flag is
/// clear; some inputs carry a deliberate axis-parallel factor.
pub fn lattice_bounds(trials: usize, seed: u64) -> Result<CheckOutcome> {
    let mut rng = rng(seed);
    let mut t = Tally::new();
    let mut flagged = 0;
    for trial in 0..trials {
        let f_size = rng.gen_range(1..=3);
        let mut f = random_polynomial(&mut rng, f_size, 4);
        if trial % 4 == 0 {
            let line = BivariatePolynomial::from_terms([((1, 0), Rational::one()), ((0, 0), Rational::from(rng.gen_range(-3..=3i64)))]);
            f = &f * &line;
        }
        let a_size = rng.gen_range(1..=9);
        let a = random_int_set(&mut rng, a_size, 4);
        let b_size = rng.gen_range(1..=9);
        let b = random_int_set(&mut rng, b_size, 4);
        let lc = variety_lattice_count(&f, &a, &b)?;
        if lc.axis_parallel_factor {
            flagged += 1;
            continue;
        }
        let bound = lattice_bound(&f, a.len(), b.len());
        t.check(lc.count <= bound, || format!("trial {trial} f={f}: {} > {bound}", lc.count));
    }
    t.note(format!("{flagged} inputs flagged axis-parallel"));
    Ok(t.finish())
}

/// Incidence counts are unchanged when points and curves move together.
pub fn incidence_translation(trials: usize, caps: &Caps, seed: u64) -> Result<CheckOutcome> {
    let mut rng = rng(seed);
    let mut t = Tally::new();
    for trial in 0..trials {
        let p = random_pointset(rng.gen_range(1..=20), 4, 1, seed.wrapping_add(trial as u64))?;
        let mut curves = Vec::new();
        for q in p.points().iter().take(5) {
            curves.push(PlaneCurve::circle(&q.x, &q.y, &Rational::from(rng.gen_range(1..=10i64)))?);
        }
        for _ in 0..3 {
            curves.push(PlaneCurve::new(random_polynomial(&mut rng, 2, 3))?);
        }
        let base = count_incidences(&p, &curves, caps)?;
        let (dx, dy) = (random_rational(&mut rng, 5, 3), random_rational(&mut rng, 5, 3));
        let moved: Vec<PlaneCurve> = curves.iter().map(|c| c.translate(&dx, &dy)).collect();
        let after = count_incidences(&p.translate(&dx, &dy), &moved, caps)?;
        t.check(base == after, || format!("trial {trial}: {} vs {}", base.count, after.count));
    }
    Ok(t.finish())
}
