//! Truncated power series with exact coefficients.

use crate::ring::{CoefficientRing, Ring};
use rug::Integer;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("truncation orders differ ({left} vs {right})")]
    OrderMismatch { left: usize, right: usize },
    #[error("tree equation is degenerate: phi has zero constant term")]
    DegenerateTree,
    #[error("constant term must be 1, found {0}")]
    ConstantTermNotOne(String),
    #[error("constant term is not a unit of the ring")]
    NotInvertible,
    #[error("inner series of a composition must have zero constant term")]
    NonZeroInnerConstant,
    #[error("series known to order {available}, order {needed} requested")]
    InsufficientOrder { needed: usize, available: usize },
    #[error("unsupported exponent a = {0} (expected 0, 1 or 2)")]
    BadExponent(u32),
    #[error("order must be at least 1")]
    ZeroOrder,
}

/// Power series known through `z^order`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<R> {
    coeffs: Vec<R>,
}

impl<R: Ring> TruncatedSeries<R> {
    /// Pads with zeros or truncates so that the result is known through `order`.
    pub fn new(mut coeffs: Vec<R>, order: usize) -> Self {
        coeffs.resize(order + 1, R::zero());
        TruncatedSeries { coeffs }
    }

    /// Order is `coeffs.len() - 1`; an empty vector gives the order-0 zero series.
    pub fn from_coeffs(coeffs: Vec<R>) -> Self {
        if coeffs.is_empty() {
            return TruncatedSeries::new(coeffs, 0);
        }
        TruncatedSeries { coeffs }
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> R) -> Self {
        TruncatedSeries { coeffs: (0..=order).map(f).collect() }
    }

    pub fn zero(order: usize) -> Self {
        TruncatedSeries::new(Vec::new(), order)
    }

    pub fn one(order: usize) -> Self {
        TruncatedSeries::new(vec![R::one()], order)
    }

    pub fn constant(c: R, order: usize) -> Self {
        TruncatedSeries::new(vec![c], order)
    }

    /// The series `z`.
    pub fn variable(order: usize) -> Self {
        TruncatedSeries::new(vec![R::zero(), R::one()], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn ring(&self) -> CoefficientRing {
        R::ring()
    }

    pub fn coeff(&self, n: usize) -> &R {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R> {
        self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        TruncatedSeries::new(self.coeffs[..=order.min(self.order())].to_vec(), order)
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> TruncatedSeries<S> {
        TruncatedSeries { coeffs: self.coeffs.iter().map(f).collect() }
    }

    fn check_order(&self, other: &Self) -> Result<(), SeriesError> {
        if self.order() != other.order() {
            return Err(SeriesError::OrderMismatch { left: self.order(), right: other.order() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_order(other)?;
        Ok(TruncatedSeries {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_order(other)?;
        Ok(TruncatedSeries {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.sub(b)).collect(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_order(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let mut out = vec![R::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                out[i + j].add_mul(a, b);
            }
        }
        TruncatedSeries { coeffs: out }
    }

    pub fn scale(&self, c: &R) -> Self {
        self.map(|a| a.mul(c))
    }

    pub fn scale_int(&self, k: &Integer) -> Self {
        self.map(|a| a.scale(k))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = TruncatedSeries::one(self.order());
        for _ in 0..e {
            out = out.mul_unchecked(self);
        }
        out
    }

    /// Multiplicative inverse; the constant term must be a unit.
    pub fn recip(&self) -> Result<Self, SeriesError> {
        let inv0 = self.coeffs[0].unit_inverse().ok_or(SeriesError::NotInvertible)?;
        let n = self.order();
        let mut out: Vec<R> = Vec::with_capacity(n + 1);
        out.push(inv0.clone());
        for k in 1..=n {
            let mut acc = R::zero();
            for j in 1..=k {
                acc.add_mul(&self.coeffs[j], &out[k - j]);
            }
            out.push(acc.neg().mul(&inv0));
        }
        Ok(TruncatedSeries { coeffs: out })
    }

    /// Formal derivative, known through one order less.
    pub fn derivative(&self) -> Self {
        let n = self.order();
        if n == 0 {
            return TruncatedSeries::zero(0);
        }
        TruncatedSeries::from_fn(n - 1, |k| self.coeffs[k + 1].scale(&Integer::from(k + 1)))
    }

    /// `self(inner)`; `inner` must vanish at 0.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        self.check_order(inner)?;
        if !inner.coeffs[0].is_zero() {
            return Err(SeriesError::NonZeroInnerConstant);
        }
        let n = self.order();
        let mut out = TruncatedSeries::zero(n);
        for c in self.coeffs.iter().rev() {
            out = out.mul_unchecked(inner);
            out.coeffs[0].add_assign(c);
        }
        Ok(out)
    }

    /// `(2z d/dz + 1) m`: coefficient n becomes `(2n+1) m_n`.
    pub fn point_series(&self) -> Self {
        TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| c.scale(&Integer::from(2 * n + 1)))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    fn s(cs: &[i64]) -> TruncatedSeries<Integer> {
        TruncatedSeries::from_coeffs(cs.iter().map(|&c| Integer::from(c)).collect())
    }

    #[test]
    fn order_mismatch_is_an_error() {
        let a = s(&[1, 1]);
        let b = s(&[1, 1, 1]);
        assert_eq!(a.add(&b), Err(SeriesError::OrderMismatch { left: 1, right: 2 }));
        assert!(a.mul(&b).is_err());
    }

    #[test]
    fn geometric_inverse() {
        let one_minus_z = s(&[1, -1, 0, 0, 0]);
        assert_eq!(one_minus_z.recip().unwrap(), s(&[1, 1, 1, 1, 1]));
        assert_eq!(s(&[2, 1]).recip(), Err(SeriesError::NotInvertible));
        let r = TruncatedSeries::from_coeffs(vec![Rational::from(2), Rational::from(1)]);
        assert_eq!(r.recip().unwrap().coeffs()[1], Rational::from((-1, 4)));
    }

    #[test]
    fn composition() {
        // 1/(1-z) at z -> z + z^2
        let geo = s(&[1, 1, 1, 1, 1]);
        let inner = s(&[0, 1, 1, 0, 0]);
        // 1/(1-z-z^2) = Fibonacci
        assert_eq!(geo.compose(&inner).unwrap(), s(&[1, 1, 2, 3, 5]));
        assert_eq!(geo.compose(&s(&[1, 1, 0, 0, 0])), Err(SeriesError::NonZeroInnerConstant));
    }

    #[test]
    fn point_series_and_derivative() {
        assert_eq!(s(&[1, 2, 9]).point_series(), s(&[1, 6, 45]));
        assert_eq!(s(&[1]).point_series(), s(&[1]));
        assert_eq!(s(&[5, 1, 3, 2]).derivative(), s(&[1, 6, 6]));
    }

    #[test]
    fn truncate_and_pow() {
        let a = s(&[1, 1, 0, 0]);
        assert_eq!(a.pow(3), s(&[1, 3, 3, 1]));
        assert_eq!(a.pow(3).truncate(1), s(&[1, 3]));
        assert_eq!(a.truncate(5).order(), 5);
    }
}
