//! Points, squared distances and point-set files.
//!
//! Distances are never materialised: two distances are equal exactly when
//! their squares are, and squared distances of rational points are rational.
//! Points above the x-axis with irrational height are carried as
//! [`QuadPoint`]s, which store `y^2` and only support distances to points on
//! the axis.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{common_denominator, Rational};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: impl Into<Rational>, y: impl Into<Rational>) -> Self {
        Point { x: x.into(), y: y.into() }
    }

    pub fn translate(&self, dx: &Rational, dy: &Rational) -> Point {
        Point { x: &self.x + dx, y: &self.y + dy }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A point `(x, +sqrt(ysq))` on or above the x-axis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QuadPoint {
    pub x: Rational,
    pub ysq: Rational,
}

impl QuadPoint {
    pub fn new(x: impl Into<Rational>, ysq: impl Into<Rational>) -> Result<Self> {
        let ysq = ysq.into();
        if ysq.is_negative() {
            return Err(Error::invalid(format!("QuadPoint with negative y^2 = {ysq}")));
        }
        Ok(QuadPoint { x: x.into(), ysq })
    }
}

/// Squared Euclidean distance.
pub fn sqdist(p: &Point, q: &Point) -> Rational {
    let dx = &p.x - &q.x;
    let dy = &p.y - &q.y;
    dx.square() + dy.square()
}

/// Squared distance from a point on the x-axis to a [`QuadPoint`].
pub fn cross_sqdist(a: &Point, b: &QuadPoint) -> Result<Rational> {
    if !a.y.is_zero() {
        return Err(Error::invalid(format!("cross distance needs a point on the x-axis, got {a}")));
    }
    Ok((&a.x - &b.x).square() + &b.ysq)
}

/// A finite planar point set, deduplicated and kept in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PointSet {
    points: Vec<Point>,
    pub label: String,
}

impl PointSet {
    pub fn new(points: impl IntoIterator<Item = Point>, label: impl Into<String>) -> Self {
        Self::with_duplicate_count(points, label).0
    }

    /// Builds the set and reports how many input points were duplicates.
    pub fn with_duplicate_count(points: impl IntoIterator<Item = Point>, label: impl Into<String>) -> (Self, usize) {
        let mut seen = 0usize;
        let set: BTreeSet<Point> = points.into_iter().inspect(|_| seen += 1).collect();
        let dups = seen - set.len();
        (PointSet { points: set.into_iter().collect(), label: label.into() }, dups)
    }

    pub fn from_integers(coords: &[(i64, i64)], label: impl Into<String>) -> Self {
        Self::new(coords.iter().map(|&(x, y)| Point::new(x, y)), label)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.points.binary_search(p).is_ok()
    }

    /// Subset selected by a predicate on the sorted index.
    pub fn retain_indices(&self, keep: impl Fn(usize) -> bool) -> PointSet {
        PointSet {
            points: self.points.iter().enumerate().filter(|(i, _)| keep(*i)).map(|(_, p)| p.clone()).collect(),
            label: self.label.clone(),
        }
    }

    pub fn is_on_x_axis(&self) -> bool {
        self.points.iter().all(|p| p.y.is_zero())
    }

    pub fn translate(&self, dx: &Rational, dy: &Rational) -> PointSet {
        PointSet::new(self.points.iter().map(|p| p.translate(dx, dy)), self.label.clone())
    }

    /// Reflection `(x, y) -> (-x, y)`.
    pub fn reflect_x(&self) -> PointSet {
        PointSet::new(self.points.iter().map(|p| Point { x: -&p.x, y: p.y.clone() }), self.label.clone())
    }

    /// Reflection `(x, y) -> (x, -y)`.
    pub fn reflect_y(&self) -> PointSet {
        PointSet::new(self.points.iter().map(|p| Point { x: p.x.clone(), y: -&p.y }), self.label.clone())
    }

    pub fn scale(&self, s: &Rational) -> PointSet {
        PointSet::new(self.points.iter().map(|p| Point { x: &p.x * s, y: &p.y * s }), self.label.clone())
    }

    /// Integer coordinates over a common denominator, when they are small
    /// enough for every squared distance to fit in a `u64`.
    pub(crate) fn int_frame(&self) -> Option<IntFrame> {
        IntFrame::build(self.points.iter())
    }

    /// Text in the point-set file format, one `x y` line per point.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        if !self.label.is_empty() {
            out.push_str(&format!("# {}\n", self.label));
        }
        for p in &self.points {
            out.push_str(&format!("{} {}\n", p.x, p.y));
        }
        out
    }
}

/// Coordinates scaled to integers by a common denominator `L`; a squared
/// distance `k` in this frame stands for `k / L^2`.
pub(crate) struct IntFrame {
    pub scale_sq: BigInt,
    pub coords: Vec<(i64, i64)>,
}

impl IntFrame {
    pub fn build<'a>(points: impl Iterator<Item = &'a Point> + Clone) -> Option<IntFrame> {
        const LIMIT: i64 = 1 << 30;
        let scale = common_denominator(points.clone().flat_map(|p| [&p.x, &p.y]));
        let to_int = |r: &Rational| -> Option<i64> {
            let v = (r.numer() * &scale) / r.denom();
            v.to_i64().filter(|v| v.abs() <= LIMIT)
        };
        let coords = points.map(|p| Some((to_int(&p.x)?, to_int(&p.y)?))).collect::<Option<Vec<_>>>()?;
        Some(IntFrame { scale_sq: &scale * &scale, coords })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    pub fn sqdist(&self, i: usize, j: usize) -> u64 {
        let (xi, yi) = self.coords[i];
        let (xj, yj) = self.coords[j];
        let dx = xi.abs_diff(xj);
        let dy = yi.abs_diff(yj);
        dx * dx + dy * dy
    }

    pub fn key_to_rational(&self, key: u64) -> Rational {
        Rational::new(BigInt::from(key), self.scale_sq.clone())
    }
}

/// A set of [`QuadPoint`]s, deduplicated and sorted.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct QuadPointSet {
    points: Vec<QuadPoint>,
    pub label: String,
}

impl QuadPointSet {
    pub fn new(points: impl IntoIterator<Item = QuadPoint>, label: impl Into<String>) -> Self {
        let set: BTreeSet<QuadPoint> = points.into_iter().collect();
        QuadPointSet { points: set.into_iter().collect(), label: label.into() }
    }

    pub fn points(&self) -> &[QuadPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Lines `x sqrt ysq`.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        if !self.label.is_empty() {
            out.push_str(&format!("# {}\n", self.label));
        }
        for q in &self.points {
            out.push_str(&format!("{} sqrt {}\n", q.x, q.ysq));
        }
        out
    }
}

/// Contents of a point-set file. Two-column lines are ordinary points,
/// three-column lines `x sqrt ysq` are [`QuadPoint`]s.
#[derive(Clone, Debug, Default)]
pub struct PointFile {
    pub points: PointSet,
    pub quads: QuadPointSet,
    pub duplicates: usize,
}

pub fn parse_point_file(text: &str) -> Result<PointFile> {
    let mut plain = Vec::new();
    let mut quads = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let num = |t: &str| t.parse::<Rational>().map_err(|e| Error::parse(Some(line_no), e.to_string()));
        match tokens.as_slice() {
            [x, y] => plain.push(Point { x: num(x)?, y: num(y)? }),
            [x, "sqrt", ysq] => {
                let q = QuadPoint::new(num(x)?, num(ysq)?).map_err(|e| Error::parse(Some(line_no), e.to_string()))?;
                quads.push(q);
            }
            _ => return Err(Error::parse(Some(line_no), format!("expected `x y` or `x sqrt ysq`, got `{line}`"))),
        }
    }
    let n_quads = quads.len();
    let (points, plain_dups) = PointSet::with_duplicate_count(plain, "");
    let quads = QuadPointSet::new(quads, "");
    let duplicates = plain_dups + (n_quads - quads.len());
    if duplicates > 0 {
        log::warn!("point file contained {duplicates} duplicate point(s); they were merged");
    }
    Ok(PointFile { points, quads, duplicates })
}

/// Parses a file of ordinary points. Duplicates are merged with a warning.
pub fn parse_pointset(text: &str) -> Result<PointSet> {
    let file = parse_point_file(text)?;
    if !file.quads.is_empty() {
        return Err(Error::parse(None, "expected plain `x y` points, found `x sqrt ysq` lines"));
    }
    Ok(file.points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn sqdist_examples() {
        assert_eq!(sqdist(&Point::new(0, 0), &Point::new(1, 0)), Rational::from(1));
        assert_eq!(sqdist(&Point::new(0, 0), &Point::new(0, 0)), Rational::zero());
        let p = Point { x: r("1/2"), y: r("0") };
        assert_eq!(sqdist(&p, &Point::new(0, 2)), r("17/4"));
    }

    #[test]
    fn cross_sqdist_examples() {
        let q = QuadPoint::new(r("1/2"), r("3/4")).unwrap();
        assert_eq!(cross_sqdist(&Point::new(1, 0), &q).unwrap(), Rational::from(1));
        let q0 = QuadPoint::new(0, 0).unwrap();
        assert_eq!(cross_sqdist(&Point::new(0, 0), &q0).unwrap(), Rational::zero());
        let q = QuadPoint::new(1, 5).unwrap();
        assert_eq!(cross_sqdist(&Point::new(2, 0), &q).unwrap(), Rational::from(6));
        assert!(cross_sqdist(&Point::new(2, 1), &q).is_err());
        assert!(QuadPoint::new(0, -1).is_err());
    }

    #[test]
    fn parse_examples() {
        let s = parse_pointset("0 0\n1 0\n").unwrap();
        assert_eq!(s.len(), 2);
        let s = parse_pointset("1/2 -3/4\n").unwrap();
        assert_eq!(s.points(), &[Point { x: r("1/2"), y: r("-3/4") }]);
        let f = parse_point_file("0 0\n0 0\n").unwrap();
        assert_eq!(f.points.len(), 1);
        assert_eq!(f.duplicates, 1);
        assert!(parse_pointset("").unwrap().is_empty());
    }

    #[test]
    fn parse_comments_and_quads() {
        let f = parse_point_file("# header\n1 0 # trailing\n\n1/2 sqrt 3/4\n").unwrap();
        assert_eq!(f.points.len(), 1);
        assert_eq!(f.quads.len(), 1);
        assert!(parse_pointset("1/2 sqrt 3/4\n").is_err());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse_pointset("0 0\n1 x\n") {
            Err(Error::Parse { line: Some(2), .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_pointset("1 2 3\n").is_err());
        assert!(parse_pointset("1 sqrt -1\n").is_err());
    }

    #[test]
    fn order_independent() {
        let a = parse_pointset("1 0\n0 0\n").unwrap();
        let b = parse_pointset("0 0\n1 0\n").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn file_round_trip() {
        let s = PointSet::new([Point::new(1, 2), Point { x: r("-1/3"), y: r("5/2") }], "demo");
        assert_eq!(parse_pointset(&s.to_file_string()).unwrap().points(), s.points());
        let q = QuadPointSet::new([QuadPoint::new(r("1/2"), r("7/4")).unwrap()], "");
        assert_eq!(parse_point_file(&q.to_file_string()).unwrap().quads, q);
    }

    #[test]
    fn int_frame_matches_rational() {
        let s = PointSet::new([Point { x: r("1/2"), y: r("0") }, Point::new(0, 2), Point { x: r("1/3"), y: r("-1") }], "");
        let frame = s.int_frame().unwrap();
        for i in 0..s.len() {
            for j in 0..s.len() {
                assert_eq!(frame.key_to_rational(frame.sqdist(i, j)), sqdist(&s.points()[i], &s.points()[j]));
            }
        }
        let huge = PointSet::new([Point::new(0, 0), Point::new(1i64 << 40, 0)], "");
        assert!(huge.int_frame().is_none());
    }
}
