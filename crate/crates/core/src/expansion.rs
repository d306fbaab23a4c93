//! Expansion of bivariate polynomials on grids: image spectra, expansion
//! energy, degeneracy and decomposability tests, and translated curve
//! families.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::energy::{energy, power_mean_bound, MultiplicitySpectrum};
use crate::error::{check_cap, Error, Result};
use crate::geometry::Point;
use crate::incidence::{incidence_lists, sorted_set};
use crate::polynomial::{BivariatePolynomial, UnivariatePolynomial};
use crate::rational::Rational;

/// Value multiplicities of `f` on the grid `A × B` (both deduplicated).
pub fn image_spectrum(f: &BivariatePolynomial, a: &[Rational], b: &[Rational]) -> MultiplicitySpectrum {
    let (a, b) = (sorted_set(a), sorted_set(b));
    let counts = a
        .par_iter()
        .map(|x| {
            let row = f.at_x(x);
            let mut m: BTreeMap<Rational, u64> = BTreeMap::new();
            for y in &b {
                *m.entry(row.eval(y)).or_insert(0) += 1;
            }
            m
        })
        .reduce(BTreeMap::new, |mut acc, m| {
            for (k, v) in m {
                *acc.entry(k).or_insert(0) += v;
            }
            acc
        });
    MultiplicitySpectrum::from_counts(counts)
}

/// `E_f = Σ m_δ²`.
pub fn expansion_energy(s: &MultiplicitySpectrum) -> BigUint {
    energy(s, 2).expect("d = 2 is a valid exponent")
}

/// `(|A||B|)² / D`, the Cauchy–Schwarz lower bound on `E_f`.
pub fn expansion_energy_lower(s: &MultiplicitySpectrum) -> Rational {
    power_mean_bound(s.total(), s.distinct() as u64, 2).expect("spectrum totals are consistent")
}

/// Counts quadruples `(a₁, a₂, b₁, b₂)` with `f(a₁, b₁) = f(a₂, b₂)` one by one.
pub fn expansion_energy_bruteforce(f: &BivariatePolynomial, a: &[Rational], b: &[Rational], caps: &Caps) -> Result<u64> {
    let (a, b) = (sorted_set(a), sorted_set(b));
    let cells = (a.len() * b.len()) as u128;
    check_cap("expansion quadruples", cells * cells, caps.tuples)?;
    let values: Vec<Rational> = a.iter().flat_map(|x| b.iter().map(move |y| f.eval(x, y))).collect();
    let mut count = 0u64;
    for u in &values {
        for v in &values {
            if u == v {
                count += 1;
            }
        }
    }
    Ok(count)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ArithOp {
    #[serde(rename = "+")]
    Add,
    #[serde(rename = "-")]
    Sub,
    #[serde(rename = "*")]
    Mul,
    #[serde(rename = "/")]
    Div,
}

impl FromStr for ArithOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "sum" => Ok(ArithOp::Add),
            "-" | "diff" => Ok(ArithOp::Sub),
            "*" | "x" | "prod" => Ok(ArithOp::Mul),
            "/" | "quot" => Ok(ArithOp::Div),
            other => Err(Error::invalid(format!("unknown set operation '{other}'"))),
        }
    }
}

/// `{a ∘ a′ : a, a′ ∈ A}`, sorted and deduplicated.
pub fn arithmetic_set(a: &[Rational], op: ArithOp) -> Result<Vec<Rational>> {
    if op == ArithOp::Div && a.iter().any(Rational::is_zero) {
        return Err(Error::invalid("quotient set of a set containing 0"));
    }
    let mut out = BTreeSet::new();
    for u in a {
        for v in a {
            out.insert(match op {
                ArithOp::Add => u + v,
                ArithOp::Sub => u - v,
                ArithOp::Mul => u * v,
                ArithOp::Div => u / v,
            });
        }
    }
    Ok(out.into_iter().collect())
}

/// `f = h(a x + b y)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdditiveWitness {
    pub a: Rational,
    pub b: Rational,
    pub h: UnivariatePolynomial,
}

/// Decides whether `f = h(ax + by)` for some `(a, b) ≠ (0, 0)`.
///
/// That happens exactly when `b·∂f/∂x = a·∂f/∂y`, so it is a linear
/// dependence test on the two partial derivatives. Constant `f` is rejected.
pub fn additive_degeneracy(f: &BivariatePolynomial) -> Result<Option<AdditiveWitness>> {
    if f.is_constant() {
        return Err(Error::invalid("additive degeneracy is undefined for a constant polynomial"));
    }
    let (fx, fy) = (f.partial_x(), f.partial_y());
    let zero = Rational::zero();
    let (a, b, h) = if fx.is_zero() {
        (zero.clone(), Rational::one(), f.at_x(&zero))
    } else if fy.is_zero() {
        (Rational::one(), zero.clone(), f.at_y(&zero))
    } else {
        let ((i, j), lc) = fx.leading_term().expect("nonzero");
        let lambda = fy.coeff(i, j) / lc;
        if fy != fx.scale(&lambda) {
            return Ok(None);
        }
        (Rational::one(), lambda, f.at_y(&zero))
    };
    Ok(Some(AdditiveWitness { a, b, h }))
}

/// A nonzero direction `(α, β)` along which `f` changes by a constant, so
/// that `f(x + tα, y + tβ) − f(x, y)` depends only on `t`.
///
/// This is the case exactly when `α·∂f/∂x + β·∂f/∂y` is constant. Additively
/// degenerate polynomials have such a direction with zero difference, but so
/// does `h(x) + y`, which is not degenerate. Two members of a curve family
/// whose shifts differ along this direction can coincide.
pub fn constant_difference_direction(f: &BivariatePolynomial) -> Option<(Rational, Rational)> {
    let strip = |p: BivariatePolynomial| &p - &BivariatePolynomial::constant(p.coeff(0, 0));
    let (u, w) = (strip(f.partial_x()), strip(f.partial_y()));
    if u.is_zero() {
        return Some((Rational::one(), Rational::zero()));
    }
    if w.is_zero() {
        return Some((Rational::zero(), Rational::one()));
    }
    let ((i, j), lc) = u.leading_term().expect("nonzero");
    let lambda = w.coeff(i, j) / lc;
    (w == u.scale(&lambda)).then(|| (-lambda, Rational::one()))
}

/// Nonzero shifts `(α₀, β₀) ∈ A × B` for which `f(x+α₀, y+β₀) − f(x, y)` is
/// constant.
pub fn translation_symmetry_search(
    f: &BivariatePolynomial,
    a: &[Rational],
    b: &[Rational],
    caps: &Caps,
) -> Result<Vec<(Rational, Rational)>> {
    let (a, b) = (sorted_set(a), sorted_set(b));
    check_cap("translation shifts", (a.len() * b.len()) as u128, caps.structure)?;
    let shifts: Vec<(Rational, Rational)> =
        a.iter().flat_map(|x| b.iter().map(move |y| (x.clone(), y.clone()))).filter(|(x, y)| !(x.is_zero() && y.is_zero())).collect();
    Ok(shifts.into_par_iter().filter(|(x, y)| (&f.translate(x, y) - f).is_constant()).collect())
}

/// `f = outer(inner)` with `deg outer >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub outer: UnivariatePolynomial,
    pub inner: BivariatePolynomial,
}

/// Finds `f = f₁(f₂(x, y))` with univariate `f₁` of degree at least 2, trying
/// the outer degree `e` over divisors of `deg f` from smallest up.
///
/// For each `e` the top form of `f₂` is an `e`-th root of the top form of
/// `f`, and every lower homogeneous part of `f₂` is then forced by one exact
/// division, so the search is complete. `f₂` is returned with zero constant
/// term.
pub fn decompose(f: &BivariatePolynomial, max_degree: u32) -> Result<Option<Decomposition>> {
    let n = f.degree();
    check_cap("decomposition degree", n as u128, max_degree as u128)?;
    if n < 2 {
        return Ok(None);
    }
    let top = f.homogeneous_part(n);
    let u = UnivariatePolynomial::new((0..=n).map(|i| top.coeff(i, n - i)).collect());
    Ok((2..=n).filter(|e| n.is_multiple_of(*e)).find_map(|e| decompose_with_outer_degree(f, &u, n, e)))
}

/// Monic `g` with `g^e = v` for monic `v`, via the power-series root of the
/// reversed polynomial.
fn monic_root(v: &UnivariatePolynomial, e: u32) -> Option<UnivariatePolynomial> {
    let dv = v.degree() as usize;
    if !dv.is_multiple_of(e as usize) {
        return None;
    }
    let r = dv / e as usize;
    let w: Vec<Rational> = v.coeffs().iter().rev().cloned().collect();
    let alpha_plus_one = Rational::new(1, e as i64) + Rational::one();
    let mut b = vec![Rational::one()];
    for m in 1..=r {
        let mut acc = Rational::zero();
        for k in 1..=m.min(dv) {
            let factor = &alpha_plus_one * Rational::from(k as u64) - Rational::from(m as u64);
            acc += &(factor * &w[k] * &b[m - k]);
        }
        b.push(acc / Rational::from(m as u64));
    }
    let g = UnivariatePolynomial::new(b.into_iter().rev().collect());
    (g.pow(e) == *v).then_some(g)
}

fn decompose_with_outer_degree(f: &BivariatePolynomial, u: &UnivariatePolynomial, n: u32, e: u32) -> Option<Decomposition> {
    let k = n / e;
    let c = u.leading_coefficient();
    let g = monic_root(&u.scale(&c.recip()), e)?;
    let top = BivariatePolynomial::from_terms(g.coeffs().iter().enumerate().map(|(i, gi)| ((i as u32, k - i as u32), gi.clone())));

    let divisor = top.pow(e - 1).scale(&(&c * Rational::from(e as u64)));
    let mut inner = top.clone();
    for t in 1..k {
        let rem = f - &inner.pow(e).scale(&c);
        let part = rem.homogeneous_part(n - t);
        inner = &inner + &part.div_exact(&divisor)?;
    }

    let mut rem = f.clone();
    let mut outer = vec![Rational::zero(); e as usize + 1];
    for i in (0..=e).rev() {
        let pi = inner.pow(i);
        let ((mi, mj), lc) = pi.leading_term().expect("powers of a nonzero polynomial are nonzero");
        let ai = rem.coeff(mi, mj) / lc;
        rem = &rem - &pi.scale(&ai);
        outer[i as usize] = ai;
    }
    if !rem.is_zero() {
        return None;
    }
    let outer = UnivariatePolynomial::new(outer);
    (outer.apply(&inner) == *f).then_some(Decomposition { outer, inner })
}

/// `f(τ_A(x), τ_B(y))`.
pub fn compose_structured(f: &BivariatePolynomial, tau_a: &UnivariatePolynomial, tau_b: &UnivariatePolynomial) -> BivariatePolynomial {
    f.substitute(tau_a, tau_b)
}

/// `τ(S)` for a generator set `S`, keeping `S` so that each value has a
/// chosen preimage (the smallest generator mapping to it).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuredSet {
    generators: Vec<Rational>,
    tau: UnivariatePolynomial,
    inverse: BTreeMap<Rational, Rational>,
}

impl StructuredSet {
    pub fn new(generators: &[Rational], tau: UnivariatePolynomial) -> Self {
        let generators = sorted_set(generators);
        let mut inverse = BTreeMap::new();
        for g in &generators {
            inverse.entry(tau.eval(g)).or_insert_with(|| g.clone());
        }
        StructuredSet { generators, tau, inverse }
    }

    pub fn generators(&self) -> &[Rational] {
        &self.generators
    }

    pub fn tau(&self) -> &UnivariatePolynomial {
        &self.tau
    }

    /// `τ(S)`, sorted.
    pub fn values(&self) -> Vec<Rational> {
        self.inverse.keys().cloned().collect()
    }

    pub fn preimage(&self, value: &Rational) -> Option<&Rational> {
        self.inverse.get(value)
    }

    /// The chosen preimages of all values, sorted; one per value.
    pub fn inverse_image(&self) -> Vec<Rational> {
        sorted_set(&self.inverse.values().cloned().collect::<Vec<_>>())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub alpha: Rational,
    pub beta: Rational,
    pub delta: Rational,
    /// `g(x+α, y+β) − δ` divided by its leading coefficient.
    pub polynomial: BivariatePolynomial,
}

/// The curves `g(x+α, y+β) − δ` over shifts `α ∈ X − X`, `β ∈ Y − Y` and
/// rich values `δ`, where `g` is `f` itself or `f(τ_A, τ_B)` and `X × Y` is
/// the grid the curves are tested against.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveFamily {
    pub j: u64,
    pub generator: BivariatePolynomial,
    pub grid_x: Vec<Rational>,
    pub grid_y: Vec<Rational>,
    pub rich_values: Vec<Rational>,
    pub members: Vec<FamilyMember>,
    pub distinct: usize,
    /// Members that are constant multiples of an earlier member.
    pub collisions: usize,
}

impl CurveFamily {
    pub fn k_j(&self) -> usize {
        self.rich_values.len()
    }
}

fn build_family(
    g: &BivariatePolynomial,
    grid_x: Vec<Rational>,
    grid_y: Vec<Rational>,
    rich_values: Vec<Rational>,
    j: u64,
    caps: &Caps,
) -> Result<CurveFamily> {
    if g.is_constant() {
        return Err(Error::invalid("curve family needs a nonconstant polynomial"));
    }
    let alphas = arithmetic_set(&grid_x, ArithOp::Sub)?;
    let betas = arithmetic_set(&grid_y, ArithOp::Sub)?;
    let size = alphas.len() as u128 * betas.len() as u128 * rich_values.len() as u128;
    check_cap("curve family members", size, caps.family)?;
    let shifts: Vec<(Rational, Rational)> = alphas.iter().flat_map(|a| betas.iter().map(move |b| (a.clone(), b.clone()))).collect();
    let members: Vec<FamilyMember> = shifts
        .par_iter()
        .flat_map_iter(|(alpha, beta)| {
            let moved = g.translate(alpha, beta);
            rich_values.iter().map(move |delta| FamilyMember {
                alpha: alpha.clone(),
                beta: beta.clone(),
                delta: delta.clone(),
                polynomial: (&moved - &BivariatePolynomial::constant(delta.clone())).normalized(),
            })
        })
        .collect();
    let distinct = members.iter().map(|m| &m.polynomial).collect::<HashSet<_>>().len();
    Ok(CurveFamily { j, generator: g.clone(), grid_x, grid_y, rich_values, collisions: members.len() - distinct, distinct, members })
}

/// The family for `f` on `A × B`; the rich values are those taken at least
/// `j` times on `A × B`.
pub fn curve_family(f: &BivariatePolynomial, a: &[Rational], b: &[Rational], j: u64, caps: &Caps) -> Result<CurveFamily> {
    let (a, b) = (sorted_set(a), sorted_set(b));
    let rich = image_spectrum(f, &a, &b).rich_values(j);
    build_family(f, a, b, rich, j, caps)
}

/// The family for `f(τ_A, τ_B)` on the grid of chosen preimages; the rich
/// values come from `f` on `τ_A(S_A) × τ_B(S_B)`.
pub fn structured_curve_family(
    f: &BivariatePolynomial,
    sa: &StructuredSet,
    sb: &StructuredSet,
    j: u64,
    caps: &Caps,
) -> Result<CurveFamily> {
    let rich = image_spectrum(f, &sa.values(), &sb.values()).rich_values(j);
    let g = compose_structured(f, sa.tau(), sb.tau());
    build_family(&g, sa.inverse_image(), sb.inverse_image(), rich, j, caps)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RichnessReport {
    pub j: u64,
    pub k_j: usize,
    pub grid_points: usize,
    pub incidences: u64,
    /// `j · |grid| · k_j`.
    pub required: u64,
    pub holds: bool,
}

/// Counts incidences between the family's grid and every indexed member and
/// compares them with `j·|X|·|Y|·k_j`.
pub fn richness_incidence_check(family: &CurveFamily, caps: &Caps) -> Result<RichnessReport> {
    let grid: Vec<Point> = family.grid_x.iter().flat_map(|x| family.grid_y.iter().map(move |y| Point::new(x.clone(), y.clone()))).collect();
    check_cap("incidence evaluations", grid.len() as u128 * family.members.len() as u128, caps.evaluations)?;
    let polys: Vec<&BivariatePolynomial> = family.members.iter().map(|m| &m.polynomial).collect();
    let incidences: u64 = incidence_lists(&grid, &polys).iter().map(|l| l.len() as u64).sum();
    let required = family.j * grid.len() as u64 * family.k_j() as u64;
    Ok(RichnessReport { j: family.j, k_j: family.k_j(), grid_points: grid.len(), incidences, required, holds: incidences >= required })
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) o ({})", self.outer, self.inner)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> BivariatePolynomial {
        s.parse().unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from(x)).collect()
    }

    fn mults(s: &MultiplicitySpectrum) -> Vec<u64> {
        s.multiplicities().collect()
    }

    #[test]
    fn image_spectra() {
        let s = image_spectrum(&p("x+y"), &ints(&[0, 1]), &ints(&[0, 1]));
        assert_eq!(
            s.entries().iter().map(|(k, v)| (k.to_string(), *v)).collect::<Vec<_>>(),
            vec![("0".into(), 1), ("1".into(), 2), ("2".into(), 1)]
        );
        assert_eq!(expansion_energy(&s), BigUint::from(6u32));
        assert!(Rational::from(6i64) >= expansion_energy_lower(&s));
        assert_eq!(expansion_energy_lower(&s), Rational::new(16, 3));
        let s = image_spectrum(&p("x y"), &ints(&[1, 2, 3]), &ints(&[1, 2, 3]));
        assert_eq!(mults(&s), vec![1, 2, 2, 1, 2, 1]);
        assert_eq!(expansion_energy(&s), BigUint::from(15u32));
        let s = image_spectrum(&p("7"), &ints(&[1, 2, 3]), &ints(&[4, 5]));
        assert_eq!(mults(&s), vec![6]);
        assert_eq!(expansion_energy(&s), BigUint::from(36u32));
        assert_eq!(expansion_energy_lower(&s), Rational::from(36i64));
    }

    #[test]
    fn energy_matches_quadruples() {
        let a = ints(&[-2, 0, 1, 3, 4]);
        let b = ints(&[1, 2, 5, 6]);
        for f in ["x y", "x + y", "x^2 + y^2", "x - y^2 + 3 x y"] {
            let s = image_spectrum(&p(f), &a, &b);
            let brute = expansion_energy_bruteforce(&p(f), &a, &b, &Caps::default()).unwrap();
            assert_eq!(expansion_energy(&s), BigUint::from(brute), "{f}");
        }
    }

    #[test]
    fn arithmetic_sets() {
        let a = ints(&[1, 2, 4]);
        assert_eq!(arithmetic_set(&a, ArithOp::Sub).unwrap(), ints(&[-3, -2, -1, 0, 1, 2, 3]));
        let q = arithmetic_set(&a, ArithOp::Div).unwrap();
        assert_eq!(q.iter().map(|r| r.to_string()).collect::<Vec<_>>(), ["1/4", "1/2", "1", "2", "4"]);
        assert_eq!(arithmetic_set(&ints(&[5]), ArithOp::Sub).unwrap(), ints(&[0]));
        assert!(arithmetic_set(&ints(&[0, 1]), ArithOp::Div).is_err());
        assert_eq!("*".parse::<ArithOp>().unwrap(), ArithOp::Mul);
    }

    #[test]
    fn degeneracy() {
        let w = additive_degeneracy(&p("x+y")).unwrap().unwrap();
        assert_eq!((w.a.clone(), w.b.clone()), (Rational::one(), Rational::one()));
        assert_eq!(w.h, UnivariatePolynomial::identity());
        assert_eq!(additive_degeneracy(&p("x y")).unwrap(), None);
        assert_eq!(additive_degeneracy(&p("x^2 - 2 x y + 2 y^2")).unwrap(), None);
        let f = p("(x - 3 y)^3 + 2 (x - 3 y) + 5");
        let w = additive_degeneracy(&f).unwrap().unwrap();
        assert_eq!(w.h.apply_linear(&w.a, &w.b), f);
        let w = additive_degeneracy(&p("y^2 + 1")).unwrap().unwrap();
        assert_eq!((w.a.is_zero(), w.h.apply_linear(&w.a, &w.b)), (true, p("y^2 + 1")));
        assert!(additive_degeneracy(&p("4")).is_err());
    }

    #[test]
    fn translation_search() {
        let s = ints(&[-1, 0, 1]);
        let caps = Caps::default();
        let hits = translation_symmetry_search(&p("x+y"), &s, &s, &caps).unwrap();
        assert_eq!(hits.len(), 8);
        assert!(hits.contains(&(Rational::from(1i64), Rational::from(-1i64))));
        assert!(translation_symmetry_search(&p("x y"), &s, &s, &caps).unwrap().is_empty());
        assert!(translation_symmetry_search(&p("x y"), &ints(&[0]), &ints(&[0]), &caps).unwrap().is_empty());
        let quad = translation_symmetry_search(&p("(x + y)^2"), &s, &s, &caps).unwrap();
        assert_eq!(quad, vec![(Rational::from(-1i64), Rational::from(1i64)), (Rational::from(1i64), Rational::from(-1i64))]);
    }

    #[test]
    fn decompositions() {
        let d = decompose(&p("x^2 y^2"), 12).unwrap().unwrap();
        assert_eq!(d.outer.apply(&d.inner), p("x^2 y^2"));
        assert_eq!(d.outer.degree(), 2);
        assert_eq!(decompose(&p("x y"), 12).unwrap(), None);
        let f = p("x^2 y^2 + 2 x y + 1");
        let d = decompose(&f, 12).unwrap().unwrap();
        assert_eq!(d.outer.apply(&d.inner), f);
        let f = p("(x^3 - y + 2 x y)^2 - 3 (x^3 - y + 2 x y) + 7");
        let d = decompose(&f, 12).unwrap().unwrap();
        assert_eq!((d.outer.degree(), d.outer.apply(&d.inner)), (2, f));
        let f = p("-2 (x^2 + y)^3 + x^2 + y");
        assert_eq!(decompose(&f, 12).unwrap().unwrap().outer.degree(), 3);
        assert_eq!(decompose(&p("x^2 + y"), 12).unwrap(), None);
        assert_eq!(decompose(&p("x^3 + y^3"), 12).unwrap(), None);
        assert!(decompose(&p("x^13"), 12).unwrap_err().is_cap_exceeded());
    }

    #[test]
    fn structured_sets() {
        let sq = UnivariatePolynomial::from_integers(&[0, 0, 1]);
        let s = StructuredSet::new(&ints(&[-2, -1, 1, 2]), sq.clone());
        assert_eq!(s.values(), ints(&[1, 4]));
        assert_eq!(s.preimage(&Rational::from(4i64)), Some(&Rational::from(-2i64)));
        assert_eq!(s.inverse_image(), ints(&[-2, -1]));
        assert_eq!(compose_structured(&p("x y"), &sq, &sq), p("x^2 y^2"));
    }

    #[test]
    fn families() {
        let caps = Caps::default();
        let fam = curve_family(&p("x y"), &ints(&[1, 2]), &ints(&[1, 2]), 1, &caps).unwrap();
        assert_eq!((fam.members.len(), fam.collisions), (27, 0));
        let fam = curve_family(&p("x + y"), &ints(&[1, 2]), &ints(&[1, 2]), 1, &caps).unwrap();
        assert!(fam.collisions > 0);
        let fam = curve_family(&p("x y"), &ints(&[1, 2]), &ints(&[1, 2]), 5, &caps).unwrap();
        assert!(fam.members.is_empty());
        let rep = richness_incidence_check(&fam, &caps).unwrap();
        assert_eq!((rep.incidences, rep.required, rep.holds), (0, 0, true));
    }

    #[test]
    fn richness() {
        let caps = Caps::default();
        let fam = curve_family(&p("x y"), &ints(&[1, 2]), &ints(&[1, 2]), 1, &caps).unwrap();
        let rep = richness_incidence_check(&fam, &caps).unwrap();
        assert_eq!(rep.required, 12);
        assert!(rep.holds);
        let s = ints(&[1, 2, 3]);
        let fam = curve_family(&p("x y"), &s, &s, 2, &caps).unwrap();
        assert_eq!(fam.rich_values, ints(&[2, 3, 6]));
        assert!(richness_incidence_check(&fam, &caps).unwrap().holds);
    }

    #[test]
    fn structured_family() {
        let caps = Caps::default();
        let cube = UnivariatePolynomial::from_integers(&[0, 1, 0, 1]);
        let sq = UnivariatePolynomial::from_integers(&[0, 0, 1]);
        let sa = StructuredSet::new(&ints(&[0, 1, 2]), cube);
        let sb = StructuredSet::new(&ints(&[1, 2, 3]), sq);
        let fam = structured_curve_family(&p("x + y"), &sa, &sb, 1, &caps).unwrap();
        assert_eq!(fam.collisions, 0);
        assert!(richness_incidence_check(&fam, &caps).unwrap().holds);
    }

    #[test]
    fn constant_difference_directions() {
        let p = |s: &str| s.parse::<BivariatePolynomial>().unwrap();
        assert_eq!(constant_difference_direction(&p("x^3 + y")), Some((Rational::zero(), Rational::one())));
        assert_eq!(constant_difference_direction(&p("x y")), None);
        assert_eq!(constant_difference_direction(&p("x^2 + y^2")), None);
        let (a, b) = constant_difference_direction(&p("(x + 2 y)^2 + 3 x + 6 y")).unwrap();
        let f = p("(x + 2 y)^2 + 3 x + 6 y");
        assert!((&f.translate(&a, &b) - &f).is_constant());
    }
}
