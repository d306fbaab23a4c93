//! Exact point–curve incidence counting.
//!
//! A point is incident to a curve when the curve's polynomial vanishes there.
//! Evaluation runs on scaled `i128` integers with overflow checks and falls
//! back to exact rationals whenever a value does not fit.

use std::collections::HashSet;
use std::fmt;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::energy::binomial_saturating;
use crate::error::{check_cap, Error, Result};
use crate::geometry::{Point, PointSet};
use crate::polynomial::BivariatePolynomial;
use crate::rational::{common_denominator, Rational};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlaneCurve {
    polynomial: BivariatePolynomial,
}

impl PlaneCurve {
    pub fn new(polynomial: BivariatePolynomial) -> Result<Self> {
        if polynomial.is_zero() {
            return Err(Error::invalid("a curve needs a nonzero polynomial"));
        }
        Ok(PlaneCurve { polynomial })
    }

    /// The circle `(x − cx)² + (y − cy)² = r²`, stored as
    /// `x² + y² + ux + vy + w`.
    pub fn circle(cx: &Rational, cy: &Rational, sq_radius: &Rational) -> Result<Self> {
        if !sq_radius.is_positive() {
            return Err(Error::invalid(format!("circle needs a positive squared radius, got {sq_radius}")));
        }
        let two = Rational::from(2i64);
        let w = cx.square() + cy.square() - sq_radius;
        let poly = BivariatePolynomial::from_terms([
            ((2, 0), Rational::one()),
            ((0, 2), Rational::one()),
            ((1, 0), -(&two * cx)),
            ((0, 1), -(&two * cy)),
            ((0, 0), w),
        ]);
        Ok(PlaneCurve { polynomial: poly })
    }

    pub fn polynomial(&self) -> &BivariatePolynomial {
        &self.polynomial
    }

    pub fn translate(&self, dx: &Rational, dy: &Rational) -> PlaneCurve {
        PlaneCurve { polynomial: self.polynomial.translate(&-dx, &-dy) }
    }
}

impl fmt::Display for PlaneCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.polynomial)
    }
}

impl fmt::Debug for PlaneCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.polynomial)
    }
}

/// Points over a common denominator `l`, as integers when they fit.
pub(crate) struct ScaledPoints<'a> {
    points: &'a [Point],
    scaled: Option<(i128, Vec<(i128, i128)>)>,
}

impl<'a> ScaledPoints<'a> {
    pub(crate) fn new(points: &'a [Point]) -> Self {
        let l = common_denominator(points.iter().flat_map(|p| [&p.x, &p.y]));
        let scaled = l.to_i64().and_then(|l| {
            let lr = Rational::from(l);
            let coords = points
                .iter()
                .map(|p| {
                    let x = (&p.x * &lr).numer().to_i64()?;
                    let y = (&p.y * &lr).numer().to_i64()?;
                    Some((x as i128, y as i128))
                })
                .collect::<Option<Vec<_>>>()?;
            Some((l as i128, coords))
        });
        ScaledPoints { points, scaled }
    }
}

/// A polynomial with integer coefficients (a positive multiple of the
/// original), when they fit.
pub(crate) struct ZeroTester<'a> {
    poly: &'a BivariatePolynomial,
    int_terms: Option<Vec<(u32, u32, i128)>>,
    degree: u32,
}

impl<'a> ZeroTester<'a> {
    pub(crate) fn new(poly: &'a BivariatePolynomial) -> Self {
        let m = Rational::from(common_denominator(poly.terms().values()));
        let int_terms = poly.terms().iter().map(|(&(i, j), c)| (c * &m).numer().to_i64().map(|v| (i, j, v as i128))).collect();
        ZeroTester { poly, int_terms, degree: poly.degree() }
    }

    fn int_eval(&self, terms: &[(u32, u32, i128)], l: i128, x: i128, y: i128) -> Option<i128> {
        let mut acc: i128 = 0;
        for &(i, j, c) in terms {
            let t = c.checked_mul(x.checked_pow(i)?)?.checked_mul(y.checked_pow(j)?)?.checked_mul(l.checked_pow(self.degree - i - j)?)?;
            acc = acc.checked_add(t)?;
        }
        Some(acc)
    }

    pub(crate) fn vanishes_at(&self, pts: &ScaledPoints<'_>, idx: usize) -> bool {
        if let (Some(terms), Some((l, coords))) = (&self.int_terms, &pts.scaled) {
            let (x, y) = coords[idx];
            if let Some(v) = self.int_eval(terms, *l, x, y) {
                return v == 0;
            }
        }
        let p = &pts.points[idx];
        self.poly.eval(&p.x, &p.y).is_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncidenceReport {
    pub count: u64,
    /// Incident point counts, aligned with the input curves.
    pub per_curve: Vec<u64>,
    /// No two curves share two incident points.
    pub k22_free: bool,
}

/// Incident point indices for every curve, in curve order.
pub(crate) fn incidence_lists(points: &[Point], curves: &[&BivariatePolynomial]) -> Vec<Vec<u32>> {
    let scaled = ScaledPoints::new(points);
    curves
        .par_iter()
        .map(|poly| {
            let tester = ZeroTester::new(poly);
            (0..points.len()).filter(|&i| tester.vanishes_at(&scaled, i)).map(|i| i as u32).collect()
        })
        .collect()
}

pub fn count_incidences(p: &PointSet, curves: &[PlaneCurve], caps: &Caps) -> Result<IncidenceReport> {
    check_cap("incidence evaluations", p.len() as u128 * curves.len() as u128, caps.evaluations)?;
    let polys: Vec<&BivariatePolynomial> = curves.iter().map(PlaneCurve::polynomial).collect();
    let lists = incidence_lists(p.points(), &polys);
    let pair_work: u128 = lists.iter().map(|l| binomial_saturating(l.len() as u128, 2)).fold(0u128, u128::saturating_add);
    check_cap("incident point pairs", pair_work, caps.tuples)?;
    let mut seen = HashSet::new();
    let mut k22_free = true;
    'outer: for list in &lists {
        for (a, &i) in list.iter().enumerate() {
            for &j in &list[a + 1..] {
                if !seen.insert((i, j)) {
                    k22_free = false;
                    break 'outer;
                }
            }
        }
    }
    let per_curve: Vec<u64> = lists.iter().map(|l| l.len() as u64).collect();
    Ok(IncidenceReport { count: per_curve.iter().sum(), per_curve, k22_free })
}

/// Circles of every squared radius around every center; duplicates are
/// removed.
pub fn circles_on_line(centers: &PointSet, sq_radii: &[Rational]) -> Result<Vec<PlaneCurve>> {
    if !centers.is_on_x_axis() {
        return Err(Error::invalid("circle centers must lie on the x-axis"));
    }
    let mut radii = sq_radii.to_vec();
    radii.sort();
    radii.dedup();
    let mut out = Vec::with_capacity(centers.len() * radii.len());
    for c in centers.points() {
        for r in &radii {
            out.push(PlaneCurve::circle(&c.x, &c.y, r)?);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeCount {
    pub count: u64,
    /// Whether `f(a, y) ≡ 0` for some `a ∈ A` or `f(x, b) ≡ 0` for some
    /// `b ∈ B`, i.e. `V(f)` contains an axis-parallel line through the grid.
    pub axis_parallel_factor: bool,
}

/// `|V(f) ∩ (A × B)|` over the deduplicated sets `A`, `B`.
pub fn variety_lattice_count(f: &BivariatePolynomial, a: &[Rational], b: &[Rational]) -> Result<LatticeCount> {
    if f.is_zero() {
        return Err(Error::invalid("lattice count of the zero polynomial"));
    }
    let (a, b) = (sorted_set(a), sorted_set(b));
    let grid: Vec<Point> = a.iter().flat_map(|x| b.iter().map(move |y| Point::new(x.clone(), y.clone()))).collect();
    let count = incidence_lists(&grid, &[f])[0].len() as u64;
    let axis_parallel_factor = a.iter().any(|x| f.at_x(x).is_zero()) || b.iter().any(|y| f.at_y(y).is_zero());
    Ok(LatticeCount { count, axis_parallel_factor })
}

/// `deg(f)·(|A| + |B|)`.
pub fn lattice_bound(f: &BivariatePolynomial, a_len: usize, b_len: usize) -> u64 {
    f.degree() as u64 * (a_len + b_len) as u64
}

pub(crate) fn sorted_set(values: &[Rational]) -> Vec<Rational> {
    let mut v = values.to_vec();
    v.sort();
    v.dedup();
    v
}

/// One polynomial per line; blank lines and `#` comments are skipped.
pub fn parse_curves(text: &str) -> Result<Vec<PlaneCurve>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let poly: BivariatePolynomial = line.parse().map_err(|e: Error| Error::parse(Some(n + 1), e.to_string()))?;
        out.push(PlaneCurve::new(poly).map_err(|e| Error::parse(Some(n + 1), e.to_string()))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from(x)).collect()
    }

    #[test]
    fn unit_circles_on_grid() {
        let grid = PointSet::from_integers(&[(0, 0), (1, 0), (0, 1), (1, 1)], "");
        let one = Rational::one();
        let curves: Vec<_> = grid.points().iter().map(|c| PlaneCurve::circle(&c.x, &c.y, &one).unwrap()).collect();
        let rep = count_incidences(&grid, &curves, &Caps::default()).unwrap();
        assert_eq!(rep.count, 8);
        assert_eq!(rep.per_curve, vec![2, 2, 2, 2]);
        assert!(!rep.k22_free);
        assert_eq!(count_incidences(&grid, &[], &Caps::default()).unwrap().count, 0);
    }

    #[test]
    fn circle_through_none() {
        let line = PointSet::from_integers(&[(0, 0), (1, 0), (2, 0)], "");
        let c = PlaneCurve::circle(&r("10"), &r("10"), &r("1")).unwrap();
        assert_eq!(count_incidences(&line, &[c], &Caps::default()).unwrap().count, 0);
    }

    #[test]
    fn circles_on_axis() {
        let centers = PointSet::from_integers(&[(0, 0), (1, 0)], "");
        let circles = circles_on_line(&centers, &[r("1")]).unwrap();
        assert_eq!(circles.len(), 2);
        assert_eq!(circles_on_line(&centers, &[r("1"), r("1")]).unwrap().len(), 2);
        let upper = PointSet::from_integers(&[(0, 1), (1, 1)], "");
        let rep = count_incidences(&upper, &circles, &Caps::default()).unwrap();
        assert_eq!(rep.count, 2);
        assert!(rep.k22_free);
        assert!(circles_on_line(&centers, &[r("0")]).is_err());
        assert!(circles_on_line(&upper, &[r("1")]).is_err());
    }

    #[test]
    fn lattice_examples() {
        let f: BivariatePolynomial = "x - y".parse().unwrap();
        let s = ints(&[1, 2, 3, 4, 5]);
        assert_eq!(variety_lattice_count(&f, &s, &s).unwrap().count, 5);
        let g: BivariatePolynomial = "y - x^2".parse().unwrap();
        let lc = variety_lattice_count(&g, &ints(&[1, 2, 3]), &ints(&[1, 4, 9])).unwrap();
        assert_eq!((lc.count, lc.axis_parallel_factor), (3, false));
        assert_eq!(variety_lattice_count(&BivariatePolynomial::constant(3), &s, &s).unwrap().count, 0);
        assert!(variety_lattice_count(&BivariatePolynomial::zero(), &s, &s).is_err());
        let axis: BivariatePolynomial = "(x - 2) (x + y)".parse().unwrap();
        let lc = variety_lattice_count(&axis, &s, &s).unwrap();
        assert!(lc.axis_parallel_factor);
        assert_eq!(lc.count, 5);
    }

    #[test]
    fn rational_and_large_coordinates() {
        let pts = PointSet::new([Point::new(r("1/3"), r("0")), Point::new(r("3"), r("4"))], "");
        let c = PlaneCurve::circle(&r("0"), &r("0"), &r("1/9")).unwrap();
        assert_eq!(count_incidences(&pts, &[c], &Caps::default()).unwrap().per_curve, vec![1]);
        let big = Rational::from(10i64).pow(30);
        let far = PointSet::new([Point::new(big.clone(), Rational::zero())], "");
        let c = PlaneCurve::circle(&Rational::zero(), &Rational::zero(), &big.square()).unwrap();
        assert_eq!(count_incidences(&far, &[c], &Caps::default()).unwrap().count, 1);
    }

    #[test]
    fn translation_invariance() {
        let pts = PointSet::from_integers(&[(0, 1), (2, 3), (-1, 4), (3, 0)], "");
        let curves = parse_curves("x^2 + y^2 - 1\n# comment\n\ny - x - 1\n").unwrap();
        let base = count_incidences(&pts, &curves, &Caps::default()).unwrap();
        let (dx, dy) = (r("5/2"), r("-7"));
        let moved: Vec<_> = curves.iter().map(|c| c.translate(&dx, &dy)).collect();
        let shifted = count_incidences(&pts.translate(&dx, &dy), &moved, &Caps::default()).unwrap();
        assert_eq!(base, shifted);
        assert!(parse_curves("x +\n").is_err());
        assert!(parse_curves("0\n").is_err());
    }

    #[test]
    fn caps_are_enforced() {
        let pts = PointSet::from_integers(&[(0, 0), (1, 0)], "");
        let curves = parse_curves("x\ny").unwrap();
        let tight = Caps { evaluations: 3, ..Caps::default() };
        assert!(count_incidences(&pts, &curves, &tight).unwrap_err().is_cap_exceeded());
    }
}
