//! Hilbert–Poincaré series: exact rational functions over Z[t], truncated
//! coefficient lists, and series of quotients by monomial ideals.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::groebner::GroebnerBasis;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("malformed series: {0}")]
    Malformed(String),
    #[error("series coefficient at degree {0} is not an integer")]
    NonIntegral(usize),
}

/// Polynomial in `t` with integer coefficients, lowest degree first, trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        IntPoly::from_coeffs(vec![c])
    }

    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        let mut p = IntPoly { coeffs };
        p.trim();
        p
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `1 - t^d`.
    pub fn one_minus_t_pow(d: u32) -> Self {
        let mut c = vec![BigInt::zero(); d as usize + 1];
        c[0] += 1;
        c[d as usize] -= 1;
        IntPoly::from_coeffs(c)
    }

    /// `c * t^d`.
    pub fn monomial(c: BigInt, d: usize) -> Self {
        let mut v = vec![BigInt::zero(); d + 1];
        v[d] = c;
        IntPoly::from_coeffs(v)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn add(&self, o: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPoly::from_coeffs((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPoly::from_coeffs((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, o: &IntPoly) -> IntPoly {
        if self.is_zero() || o.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::from_coeffs(out)
    }

    pub fn scale(&self, c: &BigInt) -> IntPoly {
        IntPoly::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn pow(&self, k: u32) -> IntPoly {
        (0..k).fold(IntPoly::one(), |acc, _| acc.mul(self))
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    fn primitive_part(&self) -> IntPoly {
        let c = self.content();
        if c.is_zero() {
            return IntPoly::zero();
        }
        let mut p = IntPoly::from_coeffs(self.coeffs.iter().map(|x| x / &c).collect());
        if p.leading().is_negative() {
            p = p.neg();
        }
        p
    }

    /// Pseudo-remainder of `self` by `d`.
    fn pseudo_rem(&self, d: &IntPoly) -> IntPoly {
        let dd = d.degree().expect("division by zero polynomial");
        let lc = d.leading();
        let mut r = self.clone();
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let c = r.leading();
            let shifted = IntPoly::monomial(c, rd - dd).mul(d);
            r = r.scale(&lc).sub(&shifted);
        }
        r
    }

    /// Greatest common divisor in Z[t], with positive leading coefficient.
    pub fn gcd(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() {
            return other.primitive_part().scale(&other.content());
        }
        if other.is_zero() {
            return self.primitive_part().scale(&self.content());
        }
        let g = self.content().gcd(&other.content());
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        a.primitive_part().scale(&g)
    }

    /// Exact quotient; `None` if `d` does not divide `self` in Z[t].
    pub fn div_exact(&self, d: &IntPoly) -> Option<IntPoly> {
        let dd = d.degree()?;
        let lc = d.leading();
        let mut r = self.clone();
        let mut q = vec![BigInt::zero(); self.coeffs.len().saturating_sub(dd).max(1)];
        while let Some(rd) = r.degree() {
            if rd < dd {
                return None;
            }
            let (quot, rem) = r.leading().div_rem(&lc);
            if !rem.is_zero() {
                return None;
            }
            q[rd - dd] = quot.clone();
            r = r.sub(&IntPoly::monomial(quot, rd - dd).mul(d));
        }
        Some(IntPoly::from_coeffs(q))
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { "-" } else { "+" })?;
            }
            first = false;
            match i {
                0 => write!(f, "{abs}")?,
                _ => {
                    if !abs.is_one() {
                        write!(f, "{abs}")?;
                    }
                    if i == 1 {
                        f.write_str("t")?;
                    } else {
                        write!(f, "t^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Recursive-descent parser for integer polynomials in `t` with `+ - * ^`,
/// parentheses and implicit multiplication (`2t`, `(1-t)(1+t)`).
struct IntPolyParser {
    chars: Vec<char>,
    pos: usize,
}

impl IntPolyParser {
    fn new(s: &str) -> Self {
        IntPolyParser {
            chars: s.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn err(&self, what: &str) -> SeriesError {
        SeriesError::Malformed(format!("{what} at position {}", self.pos + 1))
    }

    fn expr(&mut self) -> Result<IntPoly, SeriesError> {
        let mut acc = IntPoly::zero();
        let mut neg = false;
        match self.peek() {
            Some('-') => {
                neg = true;
                self.pos += 1;
            }
            Some('+') => self.pos += 1,
            _ => {}
        }
        loop {
            let t = self.term()?;
            acc = if neg { acc.sub(&t) } else { acc.add(&t) };
            match self.peek() {
                Some('+') => {
                    neg = false;
                    self.pos += 1;
                }
                Some('-') => {
                    neg = true;
                    self.pos += 1;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<IntPoly, SeriesError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?);
                }
                Some(c) if c.is_ascii_digit() || c == 't' || c == '(' => {
                    acc = acc.mul(&self.factor()?)
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<IntPoly, SeriesError> {
        let base = match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                e
            }
            Some('t') => {
                self.pos += 1;
                IntPoly::monomial(BigInt::one(), 1)
            }
            Some(c) if c.is_ascii_digit() => IntPoly::constant(BigInt::from(self.number()?)),
            _ => return Err(self.err("expected a number, 't' or '('")),
        };
        if self.peek() == Some('^') {
            self.pos += 1;
            let k = self.number()?;
            let k = u32::try_from(k).map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn number(&mut self) -> Result<u64, SeriesError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.err("expected a number"))
    }
}

pub fn parse_int_poly(s: &str) -> Result<IntPoly, SeriesError> {
    let mut p = IntPolyParser::new(s);
    let e = p.expr()?;
    if p.pos != p.chars.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

/// Exact Hilbert–Poincaré series `numerator / denominator`, kept gcd-reduced
/// with positive denominator constant term.
#[derive(Debug, Clone, Eq, serde::Serialize, serde::Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct RationalSeries {
    num: IntPoly,
    den: IntPoly,
}

impl RationalSeries {
    pub fn new(num: IntPoly, den: IntPoly) -> Result<Self, SeriesError> {
        if den.is_zero() {
            return Err(SeriesError::Malformed("zero denominator".into()));
        }
        let g = num.gcd(&den);
        let mut num = num.div_exact(&g).expect("gcd divides numerator");
        let mut den = den.div_exact(&g).expect("gcd divides denominator");
        let d0 = den.coeff(0);
        if d0.is_zero() {
            return Err(SeriesError::Malformed(
                "denominator vanishes at t = 0 after reduction".into(),
            ));
        }
        if d0.is_negative() {
            num = num.neg();
            den = den.neg();
        }
        Ok(RationalSeries { num, den })
    }

    pub fn polynomial(p: IntPoly) -> Self {
        RationalSeries {
            num: p,
            den: IntPoly::one(),
        }
    }

    /// `num / prod (1 - t^{d})`.
    pub fn over_cyclotomic_product(num: IntPoly, degrees: &[u32]) -> Result<Self, SeriesError> {
        let den = degrees.iter().fold(IntPoly::one(), |acc, &d| {
            acc.mul(&IntPoly::one_minus_t_pow(d))
        });
        RationalSeries::new(num, den)
    }

    pub fn parse(s: &str) -> Result<Self, SeriesError> {
        let (n, d) = match split_top_level_slash(s) {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        RationalSeries::new(parse_int_poly(n)?, parse_int_poly(d)?)
    }

    pub fn numerator(&self) -> &IntPoly {
        &self.num
    }

    pub fn denominator(&self) -> &IntPoly {
        &self.den
    }

    /// First `n_max + 1` coefficients via the shift recurrence
    /// `P^{(n)} = (P^{(n-1)} - dim_{n-1}) / t`, `dim_n = P^{(n)}(0)`.
    pub fn dims(&self, n_max: usize) -> Result<Vec<BigInt>, SeriesError> {
        dims_from_series(self, n_max)
    }

    /// Cancels factors `1 - t^d` from the denominator, largest first, when
    /// the denominator is a product of such factors.
    pub fn display_factored(&self) -> Option<String> {
        let mut rest = self.den.clone();
        let mut factors: Vec<(u32, u32)> = Vec::new();
        let top = rest.degree().unwrap_or(0) as u32;
        for d in (1..=top).rev() {
            let f = IntPoly::one_minus_t_pow(d);
            let mut k = 0;
            while let Some(q) = rest.div_exact(&f) {
                rest = q;
                k += 1;
            }
            if k > 0 {
                factors.push((d, k));
            }
        }
        if rest != IntPoly::one() {
            return None;
        }
        factors.reverse();
        Some(format_over(&self.num, &factors))
    }

    /// The series over `prod (1 - t^d)` for `d` in `degrees`, cancelling
    /// factors shared with the numerator. Falls back to
    /// [`display_factored`](Self::display_factored), then the plain form.
    pub fn display_over(&self, degrees: &[u32]) -> String {
        if let Some(s) = self.display_factored() {
            return s;
        }
        let full = degrees
            .iter()
            .fold(IntPoly::one(), |acc, &d| acc.mul(&IntPoly::one_minus_t_pow(d)));
        let Some(mult) = full.div_exact(&self.den) else {
            return self.to_string();
        };
        let mut num = self.num.mul(&mult);
        let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
        for &d in degrees {
            *counts.entry(d).or_insert(0) += 1;
        }
        for (&d, k) in counts.iter_mut().rev() {
            let f = IntPoly::one_minus_t_pow(d);
            while *k > 0 {
                match num.div_exact(&f) {
                    Some(q) => {
                        num = q;
                        *k -= 1;
                    }
                    None => break,
                }
            }
        }
        let factors: Vec<(u32, u32)> = counts.into_iter().filter(|&(_, k)| k > 0).collect();
        format_over(&num, &factors)
    }
}

/// `num/(1-t^d1)^k1...`, factors in the given order.
fn format_over(num: &IntPoly, factors: &[(u32, u32)]) -> String {
    if factors.is_empty() {
        return num.to_string();
    }
    let den: Vec<String> = factors
        .iter()
        .map(|&(d, k)| {
            let base = if d == 1 {
                "(1-t)".to_string()
            } else {
                format!("(1-t^{d})")
            };
            if k == 1 {
                base
            } else {
                format!("{base}^{k}")
            }
        })
        .collect();
    let num = if num.coeffs().len() > 1 {
        format!("({num})")
    } else {
        num.to_string()
    };
    format!("{num}/{}", den.join(""))
}

fn split_top_level_slash(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}

impl PartialEq for RationalSeries {
    fn eq(&self, other: &Self) -> bool {
        equal(self, other)
    }
}

impl fmt::Display for RationalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} / {}", self.num, self.den)
    }
}

impl From<RationalSeries> for String {
    fn from(s: RationalSeries) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for RationalSeries {
    type Error = SeriesError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        RationalSeries::parse(&s)
    }
}

/// Dimensions from a rational series by the shift recurrence.
pub fn dims_from_series(p: &RationalSeries, n_max: usize) -> Result<Vec<BigInt>, SeriesError> {
    let d0 = p.den.coeff(0);
    if d0.is_zero() {
        return Err(SeriesError::Malformed(
            "denominator constant term is zero".into(),
        ));
    }
    let mut cur = p.num.clone();
    let mut dims = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let (c, r) = cur.coeff(0).div_rem(&d0);
        if !r.is_zero() {
            return Err(SeriesError::NonIntegral(n));
        }
        // (cur/den - c) / t  =  ((cur - c*den) / t) / den
        let shifted = cur.sub(&p.den.scale(&c));
        debug_assert!(shifted.coeff(0).is_zero());
        cur = IntPoly::from_coeffs(shifted.coeffs.into_iter().skip(1).collect());
        dims.push(c);
    }
    Ok(dims)
}

/// Exact equality by cross-multiplication.
pub fn equal(p: &RationalSeries, q: &RationalSeries) -> bool {
    p.num.mul(&q.den) == q.num.mul(&p.den)
}

/// Degree-bounded coefficient list.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TruncatedSeries {
    coeffs: Vec<BigInt>,
}

impl TruncatedSeries {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        TruncatedSeries { coeffs }
    }

    pub fn from_dims(dims: &[usize]) -> Self {
        TruncatedSeries {
            coeffs: dims.iter().map(|&d| BigInt::from(d)).collect(),
        }
    }

    /// Highest degree covered.
    pub fn bound(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{} + O(t^{})", parts.join(" "), self.coeffs.len())
    }
}

/// A series that is either known exactly or only up to a degree bound.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum HilbertSeries {
    Exact(RationalSeries),
    Truncated(TruncatedSeries),
}

impl HilbertSeries {
    pub fn is_exact(&self) -> bool {
        matches!(self, HilbertSeries::Exact(_))
    }

    /// Coefficients `c_0..c_n`, if this series determines them.
    pub fn coefficients(&self, n: usize) -> Option<Vec<BigInt>> {
        match self {
            HilbertSeries::Exact(r) => r.dims(n).ok(),
            HilbertSeries::Truncated(t) => (n <= t.bound()).then(|| t.coeffs[..=n].to_vec()),
        }
    }

    /// Largest degree this series determines.
    pub fn known_bound(&self) -> Option<usize> {
        match self {
            HilbertSeries::Exact(_) => None,
            HilbertSeries::Truncated(t) => Some(t.bound()),
        }
    }
}

impl fmt::Display for HilbertSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HilbertSeries::Exact(r) => write!(f, "{r}"),
            HilbertSeries::Truncated(t) => write!(f, "{t}"),
        }
    }
}

/// Coefficientwise comparison through degree `d`; exact series are expanded.
/// Degrees beyond what a truncated operand knows are not compared.
pub fn equal_truncated(p: &HilbertSeries, q: &HilbertSeries, d: usize) -> bool {
    let bound = [p.known_bound(), q.known_bound()]
        .into_iter()
        .flatten()
        .fold(d, |acc, b| acc.min(b));
    match (p.coefficients(bound), q.coefficients(bound)) {
        (Some(a), Some(b)) => a == b,
        _ => false,
    }
}

/// Exact comparison when both are exact, else coefficientwise to the common bound.
pub fn series_agree(p: &HilbertSeries, q: &HilbertSeries, d: usize) -> bool {
    match (p, q) {
        (HilbertSeries::Exact(a), HilbertSeries::Exact(b)) => equal(a, b),
        _ => equal_truncated(p, q, d),
    }
}

/// `p^dim - 1`, the number of nonzero vectors in GF(p)^dim.
pub fn count_nonzero_vectors(dim: usize, p: u32) -> BigUint {
    BigUint::from(p).pow(dim as u32) - BigUint::one()
}

fn divides(a: &[u16], b: &[u16]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn minimize(gens: &mut Vec<Vec<u16>>) {
    gens.sort_by_key(|g| g.iter().map(|&e| e as u32).sum::<u32>());
    gens.dedup();
    let mut kept: Vec<Vec<u16>> = Vec::with_capacity(gens.len());
    for g in gens.drain(..) {
        if !kept.iter().any(|k| divides(k, &g)) {
            kept.push(g);
        }
    }
    *gens = kept;
}

fn weighted_degree(m: &[u16], degrees: &[u32]) -> usize {
    m.iter()
        .zip(degrees)
        .map(|(&e, &d)| e as usize * d as usize)
        .sum()
}

/// Numerator `K(t)` of the Hilbert series `K(t) / prod (1 - t^{d_i})` of
/// `k[x_1..x_n] / M` for the monomial ideal `M` generated by `gens`.
///
/// Pivots on the variable occurring in the most generators, raised to its
/// smallest positive exponent: `K(M) = K(M + p) + t^{|p|} K(M : p)`.
pub fn monomial_ideal_numerator(gens: &[Vec<u16>], degrees: &[u32]) -> IntPoly {
    let mut gens = gens.to_vec();
    numerator_rec(&mut gens, degrees)
}

fn numerator_rec(gens: &mut Vec<Vec<u16>>, degrees: &[u32]) -> IntPoly {
    minimize(gens);
    if gens.is_empty() {
        return IntPoly::one();
    }
    let n = degrees.len();
    let mut counts = vec![0usize; n];
    for g in gens.iter() {
        for (i, &e) in g.iter().enumerate() {
            if e > 0 {
                counts[i] += 1;
            }
        }
    }
    let (var, &best) = counts
        .iter()
        .enumerate()
        .max_by_key(|&(i, c)| (*c, std::cmp::Reverse(i)))
        .unwrap();
    if best <= 1 {
        // pairwise coprime: Koszul product
        return gens.iter().fold(IntPoly::one(), |acc, g| {
            acc.mul(&IntPoly::one_minus_t_pow(weighted_degree(g, degrees) as u32))
        });
    }
    let e = gens
        .iter()
        .map(|g| g[var])
        .filter(|&e| e > 0)
        .min()
        .unwrap();
    let mut pivot = vec![0u16; n];
    pivot[var] = e;

    let mut plus: Vec<Vec<u16>> = gens.iter().filter(|g| g[var] < e).cloned().collect();
    plus.push(pivot);
    let mut colon: Vec<Vec<u16>> = gens
        .iter()
        .map(|g| {
            let mut h = g.clone();
            h[var] = h[var].saturating_sub(e);
            h
        })
        .collect();

    let a = numerator_rec(&mut plus, degrees);
    let b = numerator_rec(&mut colon, degrees);
    a.add(&IntPoly::monomial(BigInt::one(), e as usize * degrees[var] as usize).mul(&b))
}

/// Hilbert series of the quotient presented by a Gröbner basis.
///
/// Exterior variables contribute their implicit square-zero relation to the
/// leading-monomial ideal. A degree-capped basis yields a truncated series up
/// to its cap.
pub fn series_of_quotient(gb: &GroebnerBasis) -> HilbertSeries {
    match gb.degree_cap() {
        None => {
            let mut lms: Vec<Vec<u16>> = gb.leading_exponents();
            let degrees = gb.ring().degrees().to_vec();
            for i in 0..degrees.len() {
                if gb.ring().is_exterior(i) {
                    let mut sq = vec![0u16; degrees.len()];
                    sq[i] = 2;
                    lms.push(sq);
                }
            }
            let num = monomial_ideal_numerator(&lms, &degrees);
            HilbertSeries::Exact(
                RationalSeries::over_cyclotomic_product(num, &degrees)
                    .expect("cyclotomic denominators are valid"),
            )
        }
        Some(cap) => {
            let dims: Vec<usize> = (0..=cap).map(|n| gb.standard_monomials(n).len()).collect();
            HilbertSeries::Truncated(TruncatedSeries::from_dims(&dims))
        }
    }
}
