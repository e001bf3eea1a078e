//! Exact coefficient rings: integers, rationals and dense polynomials over them.

use rug::{Integer, Rational};
use std::fmt;

/// Tag describing which exact ring a series lives in.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CoefficientRing {
    Integer,
    Rational,
    Polynomial(Box<CoefficientRing>),
}

impl CoefficientRing {
    /// Short stable name, used in cache keys and reports.
    pub fn name(&self) -> String {
        match self {
            CoefficientRing::Integer => "integer".into(),
            CoefficientRing::Rational => "rational".into(),
            CoefficientRing::Polynomial(inner) => match inner.as_ref() {
                CoefficientRing::Integer => "int-poly-u".into(),
                CoefficientRing::Polynomial(q) if **q == CoefficientRing::Integer => {
                    "int-poly-uq".into()
                }
                other => format!("poly({})", other.name()),
            },
        }
    }
}

impl fmt::Display for CoefficientRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Commutative ring with exact arithmetic.
pub trait Ring: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_integer(v: &Integer) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, k: &Integer) -> Self;
    /// Inverse when `self` is a unit of the ring.
    fn unit_inverse(&self) -> Option<Self>;
    fn ring() -> CoefficientRing;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn add_assign(&mut self, other: &Self) {
        *self = Ring::add(self, other);
    }

    fn sub_assign(&mut self, other: &Self) {
        *self = Ring::sub(self, other);
    }

    /// `self += a * b`
    fn add_mul(&mut self, a: &Self, b: &Self) {
        let p = a.mul(b);
        self.add_assign(&p);
    }
}

impl Ring for Integer {
    fn zero() -> Self {
        Integer::new()
    }
    fn one() -> Self {
        Integer::from(1)
    }
    fn from_i64(v: i64) -> Self {
        Integer::from(v)
    }
    fn from_integer(v: &Integer) -> Self {
        v.clone()
    }
    fn is_zero(&self) -> bool {
        self.cmp0() == std::cmp::Ordering::Equal
    }
    fn add(&self, other: &Self) -> Self {
        Integer::from(self + other)
    }
    fn sub(&self, other: &Self) -> Self {
        Integer::from(self - other)
    }
    fn mul(&self, other: &Self) -> Self {
        Integer::from(self * other)
    }
    fn neg(&self) -> Self {
        Integer::from(-self)
    }
    fn scale(&self, k: &Integer) -> Self {
        Integer::from(self * k)
    }
    fn unit_inverse(&self) -> Option<Self> {
        if *self == 1 || *self == -1 {
            Some(self.clone())
        } else {
            None
        }
    }
    fn ring() -> CoefficientRing {
        CoefficientRing::Integer
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign(&mut self, other: &Self) {
        *self -= other;
    }
    fn add_mul(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
}

impl Ring for Rational {
    fn zero() -> Self {
        Rational::new()
    }
    fn one() -> Self {
        Rational::from(1)
    }
    fn from_i64(v: i64) -> Self {
        Rational::from(v)
    }
    fn from_integer(v: &Integer) -> Self {
        Rational::from(v)
    }
    fn is_zero(&self) -> bool {
        self.cmp0() == std::cmp::Ordering::Equal
    }
    fn add(&self, other: &Self) -> Self {
        Rational::from(self + other)
    }
    fn sub(&self, other: &Self) -> Self {
        Rational::from(self - other)
    }
    fn mul(&self, other: &Self) -> Self {
        Rational::from(self * other)
    }
    fn neg(&self) -> Self {
        Rational::from(-self)
    }
    fn scale(&self, k: &Integer) -> Self {
        Rational::from(self * k)
    }
    fn unit_inverse(&self) -> Option<Self> {
        if Ring::is_zero(self) {
            None
        } else {
            Some(Rational::from(self.recip_ref()))
        }
    }
    fn ring() -> CoefficientRing {
        CoefficientRing::Rational
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign(&mut self, other: &Self) {
        *self -= other;
    }
}

/// Dense univariate polynomial, trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<R> {
    coeffs: Vec<R>,
}

impl<R: Ring> Poly<R> {
    pub fn new(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: R) -> Self {
        Poly::new(vec![c])
    }

    /// `c * x^k`
    pub fn monomial(c: R, k: usize) -> Self {
        let mut coeffs = vec![R::zero(); k + 1];
        coeffs[k] = c;
        Poly::new(coeffs)
    }

    pub fn x() -> Self {
        Poly::monomial(R::one(), 1)
    }

    pub fn from_i64s(cs: &[i64]) -> Self {
        Poly::new(cs.iter().map(|&c| R::from_i64(c)).collect())
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> R {
        self.coeffs.get(k).cloned().unwrap_or_else(R::zero)
    }

    /// Lowest power with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn eval(&self, x: &R) -> R {
        let mut acc = R::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x);
            acc.add_assign(c);
        }
        acc
    }

    /// Evaluate into another ring through a coefficient map (Horner).
    pub fn eval_with<S: Ring>(&self, x: &S, f: impl Fn(&R) -> S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x);
            acc.add_assign(&f(c));
        }
        acc
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Poly<S> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    /// Sum of coefficients, i.e. the value at 1.
    pub fn coeff_sum(&self) -> R {
        let mut acc = R::zero();
        for c in &self.coeffs {
            acc.add_assign(c);
        }
        acc
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&R, &R) -> R) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = R::zero();
        let out = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).unwrap_or(&zero);
                let b = other.coeffs.get(i).unwrap_or(&zero);
                f(a, b)
            })
            .collect();
        Poly::new(out)
    }
}

impl<R: Ring + fmt::Display> Poly<R> {
    /// Expanded form in the given variable, lowest degree first.
    pub fn to_string_in(&self, var: &str) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let text = c.to_string();
            let (neg, body) = match text.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, text),
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let needs_parens = body.contains(' ');
            let body = if needs_parens { format!("({body})") } else { body };
            match k {
                0 => out.push_str(&body),
                _ => {
                    if body != "1" {
                        out.push_str(&body);
                        out.push('*');
                    }
                    out.push_str(var);
                    if k > 1 {
                        out.push('^');
                        out.push_str(&k.to_string());
                    }
                }
            }
        }
        out
    }
}

impl<R: Ring + fmt::Display> fmt::Display for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_in("x"))
    }
}

impl<R: Ring> fmt::Debug for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

impl<R: Ring> Ring for Poly<R> {
    fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }
    fn one() -> Self {
        Poly::constant(R::one())
    }
    fn from_i64(v: i64) -> Self {
        Poly::constant(R::from_i64(v))
    }
    fn from_integer(v: &Integer) -> Self {
        Poly::constant(R::from_integer(v))
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.add(b))
    }
    fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.sub(b))
    }
    fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![R::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j].add_mul(a, b);
            }
        }
        Poly::new(out)
    }
    fn neg(&self) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.neg()).collect())
    }
    fn scale(&self, k: &Integer) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.scale(k)).collect())
    }
    fn unit_inverse(&self) -> Option<Self> {
        if self.coeffs.len() == 1 {
            self.coeffs[0].unit_inverse().map(Poly::constant)
        } else {
            None
        }
    }
    fn ring() -> CoefficientRing {
        CoefficientRing::Polynomial(Box::new(R::ring()))
    }
    fn add_assign(&mut self, other: &Self) {
        if other.coeffs.len() > self.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), R::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            a.add_assign(b);
        }
        self.trim();
    }
    fn add_mul(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        let len = a.coeffs.len() + b.coeffs.len() - 1;
        if len > self.coeffs.len() {
            self.coeffs.resize(len, R::zero());
        }
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                self.coeffs[i + j].add_mul(x, y);
            }
        }
        self.trim();
    }
}

impl<R: Ring> Poly<R> {
    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }
}

/// Integer polynomial in one variable, e.g. m_n^{(u)}.
pub type IntPoly = Poly<Integer>;
/// Polynomial in u whose coefficients are integer polynomials in q.
pub type IntPoly2 = Poly<Poly<Integer>>;
