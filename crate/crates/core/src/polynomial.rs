//! Exact univariate and bivariate polynomials over the rationals.
//!
//! Text format: sums of terms such as `3/2 x^2 y - x + 1`. The parser also
//! accepts `*`, division by a nonzero constant, parentheses, and integer
//! powers of any subexpression.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest exponent the parser accepts after `^`.
const MAX_PARSE_EXPONENT: u32 = 256;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BivariatePolynomial {
    terms: BTreeMap<(u32, u32), Rational>,
}

impl BivariatePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<Rational>) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn x() -> Self {
        Self::monomial(1, 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(1, 0, 1)
    }

    pub fn monomial(c: impl Into<Rational>, i: u32, j: u32) -> Self {
        Self::from_terms([((i, j), c.into())])
    }

    /// Sums like terms and drops zero coefficients.
    pub fn from_terms(terms: impl IntoIterator<Item = ((u32, u32), Rational)>) -> Self {
        let mut out = BTreeMap::new();
        for (e, c) in terms {
            *out.entry(e).or_insert_with(Rational::zero) += &c;
        }
        out.retain(|_, c: &mut Rational| !c.is_zero());
        BivariatePolynomial { terms: out }
    }

    pub fn terms(&self) -> &BTreeMap<(u32, u32), Rational> {
        &self.terms
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rational {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|&(i, j)| i == 0 && j == 0)
    }

    /// Total degree; 0 for constants and for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|&(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn degree_x(&self) -> u32 {
        self.terms.keys().map(|&(i, _)| i).max().unwrap_or(0)
    }

    pub fn degree_y(&self) -> u32 {
        self.terms.keys().map(|&(_, j)| j).max().unwrap_or(0)
    }

    /// Leading term in graded order: highest total degree, then highest
    /// power of `x`.
    pub fn leading_term(&self) -> Option<((u32, u32), &Rational)> {
        self.terms.iter().max_by_key(|(&(i, j), _)| (i + j, i)).map(|(&e, c)| (e, c))
    }

    pub fn homogeneous_part(&self, k: u32) -> Self {
        BivariatePolynomial { terms: self.terms.iter().filter(|(&(i, j), _)| i + j == k).map(|(&e, c)| (e, c.clone())).collect() }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        BivariatePolynomial { terms: self.terms.iter().map(|(&e, c)| (e, c * s)).collect() }
    }

    /// Divides by the leading coefficient, giving the representative shared
    /// by all nonzero constant multiples.
    pub fn normalized(&self) -> Self {
        match self.leading_term() {
            Some((_, lc)) => self.scale(&lc.recip()),
            None => Self::zero(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(1);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        let xp = powers(x, self.degree_x());
        let yp = powers(y, self.degree_y());
        self.terms.iter().map(|(&(i, j), c)| c * &xp[i as usize] * &yp[j as usize]).sum()
    }

    pub fn partial_x(&self) -> Self {
        Self::from_terms(self.terms.iter().filter(|(&(i, _), _)| i > 0).map(|(&(i, j), c)| ((i - 1, j), c * Rational::from(i as u64))))
    }

    pub fn partial_y(&self) -> Self {
        Self::from_terms(self.terms.iter().filter(|(&(_, j), _)| j > 0).map(|(&(i, j), c)| ((i, j - 1), c * Rational::from(j as u64))))
    }

    /// `f(x + α, y + β)`, expanded binomially.
    pub fn translate(&self, alpha: &Rational, beta: &Rational) -> Self {
        let ap = powers(alpha, self.degree_x());
        let bp = powers(beta, self.degree_y());
        let mut out = Vec::new();
        for (&(i, j), c) in &self.terms {
            for a in 0..=i {
                let ca = c * Rational::from(binomial(i, a)) * &ap[(i - a) as usize];
                if ca.is_zero() {
                    continue;
                }
                for b in 0..=j {
                    let cb = &bp[(j - b) as usize];
                    if !cb.is_zero() {
                        out.push(((a, b), &ca * Rational::from(binomial(j, b)) * cb));
                    }
                }
            }
        }
        Self::from_terms(out)
    }

    /// `f(τ_x(x), τ_y(y))`.
    pub fn substitute(&self, tau_x: &UnivariatePolynomial, tau_y: &UnivariatePolynomial) -> Self {
        let xp: Vec<UnivariatePolynomial> = univariate_powers(tau_x, self.degree_x());
        let yp: Vec<UnivariatePolynomial> = univariate_powers(tau_y, self.degree_y());
        let mut out = Vec::new();
        for (&(i, j), c) in &self.terms {
            for (a, ca) in xp[i as usize].coeffs().iter().enumerate() {
                if ca.is_zero() {
                    continue;
                }
                for (b, cb) in yp[j as usize].coeffs().iter().enumerate() {
                    if !cb.is_zero() {
                        out.push(((a as u32, b as u32), c * ca * cb));
                    }
                }
            }
        }
        Self::from_terms(out)
    }

    /// `f(a, y)` as a polynomial in `y`.
    pub fn at_x(&self, a: &Rational) -> UnivariatePolynomial {
        let ap = powers(a, self.degree_x());
        let mut coeffs = vec![Rational::zero(); self.degree_y() as usize + 1];
        for (&(i, j), c) in &self.terms {
            coeffs[j as usize] += &(c * &ap[i as usize]);
        }
        UnivariatePolynomial::new(coeffs)
    }

    /// `f(x, b)` as a polynomial in `x`.
    pub fn at_y(&self, b: &Rational) -> UnivariatePolynomial {
        let bp = powers(b, self.degree_y());
        let mut coeffs = vec![Rational::zero(); self.degree_x() as usize + 1];
        for (&(i, j), c) in &self.terms {
            coeffs[i as usize] += &(c * &bp[j as usize]);
        }
        UnivariatePolynomial::new(coeffs)
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    ///
    /// Division by a single polynomial in lex order (`x` before `y`): an exact
    /// quotient exists iff every step finds a divisible leading term.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (&(di, dj), dc) = d.terms.last_key_value()?;
        let mut r = self.clone();
        let mut q = Vec::new();
        while let Some((&(ri, rj), rc)) = r.terms.last_key_value() {
            if ri < di || rj < dj {
                return None;
            }
            let qc = rc / dc;
            let t = Self::monomial(qc.clone(), ri - di, rj - dj);
            r = &r - &(&t * d);
            q.push(((ri - di, rj - dj), qc));
        }
        Some(Self::from_terms(q))
    }
}

fn powers(v: &Rational, max: u32) -> Vec<Rational> {
    let mut out = Vec::with_capacity(max as usize + 1);
    out.push(Rational::one());
    for k in 1..=max as usize {
        let next = &out[k - 1] * v;
        out.push(next);
    }
    out
}

fn univariate_powers(p: &UnivariatePolynomial, max: u32) -> Vec<UnivariatePolynomial> {
    let mut out = vec![UnivariatePolynomial::constant(1)];
    for k in 1..=max as usize {
        let next = &out[k - 1] * p;
        out.push(next);
    }
    out
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

impl Add for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn add(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        BivariatePolynomial::from_terms(self.terms.iter().chain(&rhs.terms).map(|(&e, c)| (e, c.clone())))
    }
}

impl Sub for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn sub(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        BivariatePolynomial::from_terms(self.terms.iter().map(|(&e, c)| (e, c.clone())).chain(rhs.terms.iter().map(|(&e, c)| (e, -c))))
    }
}

impl Mul for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn mul(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        let mut out: BTreeMap<(u32, u32), Rational> = BTreeMap::new();
        for (&(i, j), c) in &self.terms {
            for (&(k, l), d) in &rhs.terms {
                *out.entry((i + k, j + l)).or_insert_with(Rational::zero) += &(c * d);
            }
        }
        out.retain(|_, c| !c.is_zero());
        BivariatePolynomial { terms: out }
    }
}

impl Neg for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn neg(self) -> BivariatePolynomial {
        BivariatePolynomial { terms: self.terms.iter().map(|(&e, c)| (e, -c)).collect() }
    }
}

macro_rules! owned_binop {
    ($ty:ty, $tr:ident, $m:ident) => {
        impl $tr for $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty {
                (&self).$m(&rhs)
            }
        }
    };
}

owned_binop!(BivariatePolynomial, Add, add);
owned_binop!(BivariatePolynomial, Sub, sub);
owned_binop!(BivariatePolynomial, Mul, mul);

impl Neg for BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn neg(self) -> BivariatePolynomial {
        -&self
    }
}

/// Writes `coeff` and a monomial body in the text format.
fn write_term(f: &mut fmt::Formatter<'_>, first: bool, c: &Rational, body: &str) -> fmt::Result {
    let sign = if c.is_negative() { "-" } else { "+" };
    if first {
        if c.is_negative() {
            f.write_str("-")?;
        }
    } else {
        write!(f, " {sign} ")?;
    }
    let a = c.abs();
    match (body.is_empty(), a == Rational::one()) {
        (true, _) => write!(f, "{a}"),
        (false, true) => f.write_str(body),
        (false, false) => write!(f, "{a} {body}"),
    }
}

fn power_text(var: char, e: u32) -> Option<String> {
    match e {
        0 => None,
        1 => Some(var.to_string()),
        _ => Some(format!("{var}^{e}")),
    }
}

impl fmt::Display for BivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut order: Vec<_> = self.terms.iter().collect();
        order.sort_by_key(|(&(i, j), _)| std::cmp::Reverse((i + j, i)));
        for (n, (&(i, j), c)) in order.into_iter().enumerate() {
            let body: Vec<String> = [power_text('x', i), power_text('y', j)].into_iter().flatten().collect();
            write_term(f, n == 0, c, &body.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for BivariatePolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_with(s, |v| match v {
            'x' => Some(BivariatePolynomial::x()),
            'y' => Some(BivariatePolynomial::y()),
            _ => None,
        })
    }
}

impl Serialize for BivariatePolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BivariatePolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Coefficients from the constant term upward, with a nonzero leading
/// coefficient (the zero polynomial has no coefficients).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct UnivariatePolynomial {
    coeffs: Vec<Rational>,
}

impl UnivariatePolynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        UnivariatePolynomial { coeffs }
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<Rational>) -> Self {
        Self::new(vec![c.into()])
    }

    /// The polynomial `z`.
    pub fn identity() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// 0 for constants and for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.coeffs.len().saturating_sub(1) as u32
    }

    pub fn leading_coefficient(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, z: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * z + c)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(1), |acc, _| &acc * self)
    }

    /// `self(inner(z))`.
    pub fn compose(&self, inner: &UnivariatePolynomial) -> Self {
        self.coeffs.iter().rev().fold(Self::zero(), |acc, c| &(&acc * inner) + &Self::constant(c.clone()))
    }

    /// `self(inner(x, y))`.
    pub fn apply(&self, inner: &BivariatePolynomial) -> BivariatePolynomial {
        self.coeffs.iter().rev().fold(BivariatePolynomial::zero(), |acc, c| &(&acc * inner) + &BivariatePolynomial::constant(c.clone()))
    }

    /// `self(a x + b y)`.
    pub fn apply_linear(&self, a: &Rational, b: &Rational) -> BivariatePolynomial {
        let lin = BivariatePolynomial::from_terms([((1, 0), a.clone()), ((0, 1), b.clone())]);
        self.apply(&lin)
    }
}

impl Add for &UnivariatePolynomial {
    type Output = UnivariatePolynomial;
    fn add(self, rhs: &UnivariatePolynomial) -> UnivariatePolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = Rational::zero();
        UnivariatePolynomial::new((0..n).map(|k| self.coeffs.get(k).unwrap_or(&zero) + rhs.coeffs.get(k).unwrap_or(&zero)).collect())
    }
}

impl Sub for &UnivariatePolynomial {
    type Output = UnivariatePolynomial;
    fn sub(self, rhs: &UnivariatePolynomial) -> UnivariatePolynomial {
        self + &rhs.scale(&Rational::from(-1))
    }
}

impl Mul for &UnivariatePolynomial {
    type Output = UnivariatePolynomial;
    fn mul(self, rhs: &UnivariatePolynomial) -> UnivariatePolynomial {
        if self.is_zero() || rhs.is_zero() {
            return UnivariatePolynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        UnivariatePolynomial::new(out)
    }
}

owned_binop!(UnivariatePolynomial, Add, add);
owned_binop!(UnivariatePolynomial, Sub, sub);
owned_binop!(UnivariatePolynomial, Mul, mul);

impl fmt::Display for UnivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            write_term(f, first, c, &power_text('z', k as u32).unwrap_or_default())?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for UnivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Accepts a single variable, written `z`, `x` or `t`.
impl FromStr for UnivariatePolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut var = None;
        let p = parse_with(s, |v| {
            if !matches!(v, 'z' | 'x' | 't') || var.is_some_and(|u| u != v) {
                return None;
            }
            var = Some(v);
            Some(BivariatePolynomial::x())
        })?;
        let mut coeffs = vec![Rational::zero(); p.degree() as usize + 1];
        for (&(i, _), c) in p.terms() {
            coeffs[i as usize] = c.clone();
        }
        Ok(UnivariatePolynomial::new(coeffs))
    }
}

impl Serialize for UnivariatePolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for UnivariatePolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(BigInt),
    Var(char),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Open,
    Close,
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&ch) = chars.peek() {
        match ch {
            c if c.is_whitespace() => {
                chars.next();
            }
            '0'..='9' => {
                let mut digits = String::new();
                while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                    digits.push(d);
                    chars.next();
                }
                out.push(Token::Num(digits.parse().expect("ascii digits")));
            }
            c if c.is_ascii_alphabetic() => {
                out.push(Token::Var(c));
                chars.next();
            }
            _ => {
                out.push(match ch {
                    '+' => Token::Plus,
                    '-' => Token::Minus,
                    '*' => Token::Star,
                    '/' => Token::Slash,
                    '^' => Token::Caret,
                    '(' => Token::Open,
                    ')' => Token::Close,
                    other => return Err(Error::parse(None, format!("unexpected character '{other}' in polynomial"))),
                });
                chars.next();
            }
        }
    }
    Ok(out)
}

struct Parser<'a, F> {
    tokens: &'a [Token],
    pos: usize,
    var: F,
}

fn parse_with(s: &str, var: impl FnMut(char) -> Option<BivariatePolynomial>) -> Result<BivariatePolynomial> {
    let tokens = tokenize(s)?;
    if tokens.is_empty() {
        return Err(Error::parse(None, "empty polynomial"));
    }
    let mut p = Parser { tokens: &tokens, pos: 0, var };
    let out = p.expr()?;
    if p.pos != tokens.len() {
        return Err(Error::parse(None, format!("trailing input in polynomial '{s}'")));
    }
    Ok(out)
}

impl<F: FnMut(char) -> Option<BivariatePolynomial>> Parser<'_, F> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<&Token> {
        self.pos += 1;
        self.tokens.get(self.pos - 1)
    }

    fn expr(&mut self) -> Result<BivariatePolynomial> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some(Token::Minus) => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<BivariatePolynomial> {
        let mut acc = self.signed()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                    acc = &acc * &self.signed()?;
                }
                Some(Token::Slash) => {
                    self.bump();
                    let d = self.signed()?;
                    if !d.is_constant() || d.is_zero() {
                        return Err(Error::parse(None, "division only by a nonzero constant"));
                    }
                    acc = acc.scale(&d.coeff(0, 0).recip());
                }
                Some(Token::Num(_) | Token::Var(_) | Token::Open) => {
                    acc = &acc * &self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn signed(&mut self) -> Result<BivariatePolynomial> {
        match self.peek() {
            Some(Token::Minus) => {
                self.bump();
                Ok(-self.signed()?)
            }
            Some(Token::Plus) => {
                self.bump();
                self.signed()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<BivariatePolynomial> {
        let base = self.primary()?;
        if self.peek() != Some(&Token::Caret) {
            return Ok(base);
        }
        self.bump();
        match self.bump() {
            Some(Token::Num(n)) => {
                let e = u32::try_from(n.clone())
                    .ok()
                    .filter(|&e| e <= MAX_PARSE_EXPONENT)
                    .ok_or_else(|| Error::parse(None, format!("exponent {n} out of range")))?;
                Ok(base.pow(e))
            }
            _ => Err(Error::parse(None, "expected a nonnegative integer exponent after '^'")),
        }
    }

    fn primary(&mut self) -> Result<BivariatePolynomial> {
        match self.bump().cloned() {
            Some(Token::Num(n)) => Ok(BivariatePolynomial::constant(Rational::from(n))),
            Some(Token::Var(v)) => (self.var)(v).ok_or_else(|| Error::parse(None, format!("unexpected variable '{v}'"))),
            Some(Token::Open) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Token::Close) => Ok(inner),
                    _ => Err(Error::parse(None, "unbalanced parentheses")),
                }
            }
            Some(t) => Err(Error::parse(None, format!("unexpected token {t:?}"))),
            None => Err(Error::parse(None, "unexpected end of polynomial")),
        }
    }
}
