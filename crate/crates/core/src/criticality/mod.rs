//! Critical block weight, critical couplings and the exponent algebra.

pub mod blocks;
pub mod exponents;

use crate::models::Family;
use rug::float::Constant;
use rug::{Float, Rational};
use std::cmp::Ordering;
use std::fmt;
use thiserror::Error;

pub use blocks::{
    elliptic_ke, solve_tc, BlockFunction, BlockPoint, EllipticBlocks, QuadBlocks, SeriesBlocks, TcSolution,
};
pub use exponents::{
    a_gamma, dual_dimension, dual_dimension_inverse, hausdorff_dimensions, kpz, kpz_inverse, lqg_exponents,
    lqg_string_exact, meander_central_charge, q_gamma, quad_mu_residual, quantum_ball_density,
    quantum_ball_mass, quantum_ball_mass_expected, sle_coupling, ExponentSet, HausdorffDimensions, Surd,
};

/// Working precision for transcendental critical data, in bits.
pub const CRITICAL_PREC: u32 = 256;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CriticalError {
    #[error("inputs must be positive")]
    NonPositiveInput,
    #[error("denominator M1(1-M1) + 2 g1 M1' is not positive; model outside the substitution picture")]
    DenominatorNotPositive,
    #[error("M1'(g1) vanishes")]
    ZeroDerivative,
    #[error("u = {u} is below u_cr = {u_cr}: no solution with t_c <= t_cr")]
    BelowUcrit { u: f64, u_cr: f64 },
    #[error("bisection did not converge in {0} iterations")]
    NoConvergence(usize),
    #[error("central charge c = {0} exceeds 1")]
    CentralChargeAboveOne(f64),
    #[error("q = {0} outside [0, 2]")]
    QOutOfRange(f64),
    #[error("{0} has no closed-form critical data")]
    NoClosedForm(Family),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
}

/// The arithmetic needed by the critical formulas.
pub trait Field: Clone + fmt::Debug {
    /// An integer in the same precision as `self`.
    fn int_like(&self, v: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn sign(&self) -> Ordering;
    fn to_f64(&self) -> f64;
}

impl Field for Rational {
    fn int_like(&self, v: i64) -> Self {
        Rational::from(v)
    }
    fn add(&self, o: &Self) -> Self {
        Rational::from(self + o)
    }
    fn sub(&self, o: &Self) -> Self {
        Rational::from(self - o)
    }
    fn mul(&self, o: &Self) -> Self {
        Rational::from(self * o)
    }
    fn div(&self, o: &Self) -> Self {
        Rational::from(self / o)
    }
    fn sign(&self) -> Ordering {
        self.cmp0()
    }
    fn to_f64(&self) -> f64 {
        Rational::to_f64(self)
    }
}

impl Field for Float {
    fn int_like(&self, v: i64) -> Self {
        Float::with_val(self.prec(), v)
    }
    fn add(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self + o)
    }
    fn sub(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self - o)
    }
    fn mul(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self * o)
    }
    fn div(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self / o)
    }
    fn sign(&self) -> Ordering {
        self.cmp0().unwrap_or(Ordering::Equal)
    }
    fn to_f64(&self) -> f64 {
        Float::to_f64(self)
    }
}

impl Field for f64 {
    fn int_like(&self, v: i64) -> Self {
        v as f64
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn sign(&self) -> Ordering {
        self.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

fn check_positive<F: Field>(xs: &[&F]) -> Result<(), CriticalError> {
    if xs.iter().all(|x| x.sign() == Ordering::Greater) {
        Ok(())
    } else {
        Err(CriticalError::NonPositiveInput)
    }
}

/// u_cr = (M1 + 2 g1 M1') / (M1 (1 - M1) + 2 g1 M1').
pub fn ucrit_from_u1_data<F: Field>(g1: &F, m1: &F, m1p: &F) -> Result<F, CriticalError> {
    check_positive(&[g1, m1, m1p])?;
    let one = g1.int_like(1);
    let two_gmp = g1.int_like(2).mul(g1).mul(m1p);
    let den = m1.mul(&one.sub(m1)).add(&two_gmp);
    if den.sign() != Ordering::Greater {
        return Err(CriticalError::DenominatorNotPositive);
    }
    Ok(m1.add(&two_gmp).div(&den))
}

/// g_c(u_cr) = g1 (1 + M1 (1 - M1) / (2 g1 M1'))^2.
pub fn gc_at_ucrit<F: Field>(g1: &F, m1: &F, m1p: &F) -> Result<F, CriticalError> {
    if m1p.sign() == Ordering::Equal {
        return Err(CriticalError::ZeroDerivative);
    }
    let one = g1.int_like(1);
    let two_gmp = g1.int_like(2).mul(g1).mul(m1p);
    let f = one.add(&m1.mul(&one.sub(m1)).div(&two_gmp));
    Ok(g1.mul(&f).mul(&f))
}

/// A constant known in high precision, with its exact rational value when there is one.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalValue {
    pub exact: Option<Rational>,
    pub value: Float,
    /// Closed form in text, when one exists.
    pub formula: Option<&'static str>,
}

impl CriticalValue {
    fn rational(r: Rational) -> Self {
        CriticalValue { value: Float::with_val(CRITICAL_PREC, &r), exact: Some(r), formula: None }
    }

    fn float(value: Float, formula: &'static str) -> Self {
        CriticalValue { exact: None, value, formula: Some(formula) }
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }
}

impl fmt::Display for CriticalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(r) => write!(f, "{r}"),
            None => write!(f, "{:.20}", self.value),
        }
    }
}

/// Critical data of a family with closed-form u = 1 input.
#[derive(Clone, Debug)]
pub struct CriticalData {
    pub family: Family,
    pub g1: CriticalValue,
    pub m1_at_g1: CriticalValue,
    pub m1prime_at_g1: CriticalValue,
    pub u_cr: CriticalValue,
    pub g_c_at_ucr: CriticalValue,
    pub t_cr: CriticalValue,
    /// B'(t_cr), set only where a closed form exists.
    pub k_b: Option<Rational>,
}

impl CriticalData {
    /// g_cr(u) = t_cr / (1 + u (B(t_cr) - 1))^2, with B(t_cr) = M1(g1).
    pub fn g_cr_of_u(&self, u: f64) -> f64 {
        let d = 1.0 + u * (self.m1_at_g1.to_f64() - 1.0);
        self.t_cr.to_f64() / (d * d)
    }

    /// g_c(u) for u >= u_cr through `solve_tc` on the family's block function.
    pub fn g_c_of_u(&self, u: f64) -> Result<f64, CriticalError> {
        let blocks: Box<dyn BlockFunction> = match self.family {
            Family::Quad => Box::new(QuadBlocks),
            Family::Cubic | Family::OpenPath => Box::new(EllipticBlocks::cubic()),
            Family::Meander => Box::new(EllipticBlocks::meander()),
            f => return Err(CriticalError::NoClosedForm(f)),
        };
        Ok(solve_tc(u, blocks.as_ref())?.g_c)
    }
}

fn pi() -> Float {
    Float::with_val(CRITICAL_PREC, Constant::Pi)
}

fn fl(v: i64) -> Float {
    Float::with_val(CRITICAL_PREC, v)
}

/// Closed-form critical data. The open-path family shares the cubic maps.
pub fn critical_data(family: Family) -> Result<CriticalData, CriticalError> {
    let (g1, m1, m1p, formulas) = match family {
        Family::Quad => {
            let g1 = Rational::from((1, 12));
            let m1 = Rational::from((4, 3));
            let m1p = Rational::from(16);
            let u_cr = ucrit_from_u1_data(&g1, &m1, &m1p)?;
            let g_c = gc_at_ucrit(&g1, &m1, &m1p)?;
            let t_cr = Rational::from(&g1 * &m1) * &m1;
            return Ok(CriticalData {
                family,
                g1: CriticalValue::rational(g1),
                m1_at_g1: CriticalValue::rational(m1),
                m1prime_at_g1: CriticalValue::rational(m1p),
                u_cr: CriticalValue::rational(u_cr),
                g_c_at_ucr: CriticalValue::rational(g_c),
                t_cr: CriticalValue::rational(t_cr),
                k_b: Some(Rational::from(3)),
            });
        }
        Family::Cubic | Family::OpenPath => {
            let three_pi = pi() * 3u32;
            let m1 = (fl(1) - fl(8) / &three_pi) * 8u32;
            let m1p = (fl(10) / &three_pi - 1u32) * 128u32;
            (
                Rational::from((1, 16)),
                m1,
                m1p,
                [
                    "8(1 - 8/(3π))",
                    "128(10/(3π) - 1)",
                    "9π(4 - π)/(420π - 81π² - 512)",
                    "(420π - 81π² - 512)²/(576π²(10 - 3π)²)",
                ],
            )
        }
        Family::Meander => {
            let m1 = (fl(4) / pi() - 1u32) * 4u32;
            let m1p = (fl(1) - fl(3) / pi()) * 64u32;
            (
                Rational::from((1, 16)),
                m1,
                m1p,
                [
                    "4(4/π - 1)",
                    "64(1 - 3/π)",
                    "π(π - 2)/(30π - 3π² - 64)",
                    "(30π - 3π² - 64)²/(64π²(π - 3)²)",
                ],
            )
        }
        f => return Err(CriticalError::NoClosedForm(f)),
    };
    let g1f = Float::with_val(CRITICAL_PREC, &g1);
    let u_cr = ucrit_from_u1_data(&g1f, &m1, &m1p)?;
    let g_c = gc_at_ucrit(&g1f, &m1, &m1p)?;
    let t_cr = Float::with_val(CRITICAL_PREC, &g1f * &m1) * &m1;
    Ok(CriticalData {
        family,
        g1: CriticalValue::rational(g1),
        m1_at_g1: CriticalValue::float(m1, formulas[0]),
        m1prime_at_g1: CriticalValue::float(m1p, formulas[1]),
        u_cr: CriticalValue::float(u_cr, formulas[2]),
        g_c_at_ucr: CriticalValue::float(g_c, formulas[3]),
        t_cr: CriticalValue { exact: None, value: t_cr, formula: None },
        k_b: None,
    })
}
