//! KPZ, string susceptibility duality and related closed forms.

use super::{CriticalError, Field};
use crate::quadrature::integrate;
use rug::{Integer, Rational};
use std::fmt;

/// a_γ = 2/γ - γ/2.
pub fn a_gamma(gamma: f64) -> f64 {
    2.0 / gamma - gamma / 2.0
}

/// Q_γ = 2/γ + γ/2, invariant under γ -> 4/γ.
pub fn q_gamma(gamma: f64) -> f64 {
    2.0 / gamma + gamma / 2.0
}

/// Exponents attached to a central charge, with a boundary dimension Δ
/// (0 by default, the marked-edge correlator).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentSet {
    pub c: f64,
    pub gamma: f64,
    pub gamma_prime: f64,
    pub gamma_s: f64,
    pub gamma_s_prime: f64,
    pub alpha: f64,
    pub delta: f64,
    pub beta: f64,
    pub delta_prime: f64,
}

impl ExponentSet {
    /// Same central charge, correlator of dimension `delta`.
    pub fn with_delta(self, delta: f64) -> Self {
        ExponentSet {
            delta,
            beta: 2.0 * delta - self.gamma_s,
            delta_prime: dual_dimension(delta, self.gamma_s),
            ..self
        }
    }

    /// Exponent of n in the critical correlator: 1 + β/α.
    pub fn critical_correlator_exponent(&self) -> f64 {
        1.0 + self.beta / self.alpha
    }
}

pub fn lqg_exponents(c: f64) -> Result<ExponentSet, CriticalError> {
    if !(c <= 1.0) {
        return Err(CriticalError::CentralChargeAboveOne(c));
    }
    let (r25, r1) = ((25.0 - c).sqrt(), (1.0 - c).sqrt());
    let s6 = 6f64.sqrt();
    let root = ((1.0 - c) * (25.0 - c)).sqrt();
    let gamma_s = (c - 1.0 - root) / 12.0;
    let base = ExponentSet {
        c,
        gamma: (r25 - r1) / s6,
        gamma_prime: (r25 + r1) / s6,
        gamma_s,
        gamma_s_prime: (c - 1.0 + root) / 12.0,
        alpha: 1.0 - gamma_s,
        delta: 0.0,
        beta: 0.0,
        delta_prime: 0.0,
    };
    Ok(base.with_delta(0.0))
}

/// `a + b √d` with rational a, b and square-free d (d = 1 only when b = 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surd {
    pub a: Rational,
    pub b: Rational,
    pub d: Integer,
}

/// Largest s with s^2 | m, and m / s^2.
fn square_part(m: &Integer) -> (Integer, Integer) {
    let mut rest = m.clone();
    let mut s = Integer::from(1);
    let mut p = Integer::from(2);
    while Integer::from(&p * &p) <= rest && p < 1_000_000 {
        let pp = Integer::from(&p * &p);
        while rest.is_divisible(&pp) {
            rest /= &pp;
            s *= &p;
        }
        p += 1;
    }
    if rest.is_perfect_square() {
        s *= rest.clone().sqrt();
        rest = Integer::from(1);
    }
    (s, rest)
}

impl Surd {
    pub fn rational(a: Rational) -> Self {
        Surd { a, b: Rational::new(), d: Integer::from(1) }
    }

    /// `a + b √r` for a non-negative rational r, reduced.
    pub fn new(a: Rational, b: Rational, r: &Rational) -> Self {
        let m = Integer::from(r.numer() * r.denom());
        let (s, d) = square_part(&m);
        let b = b * Rational::from((s, r.denom().clone()));
        if d == 1 || b == 0 {
            let shift = if d == 1 { b } else { Rational::new() };
            return Surd::rational(a + shift);
        }
        Surd { a, b, d }
    }

    pub fn is_rational(&self) -> bool {
        self.b == 0
    }

    fn same_field(&self, o: &Self) -> Integer {
        match (self.is_rational(), o.is_rational()) {
            (true, _) => o.d.clone(),
            (_, true) => self.d.clone(),
            _ => {
                assert_eq!(self.d, o.d, "surds from different quadratic fields");
                self.d.clone()
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let d = self.same_field(o);
        let b = Rational::from(&self.b + &o.b);
        let d = if b == 0 { Integer::from(1) } else { d };
        Surd { a: Rational::from(&self.a + &o.a), b, d }
    }

    pub fn neg(&self) -> Self {
        Surd { a: Rational::from(-&self.a), b: Rational::from(-&self.b), d: self.d.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let d = self.same_field(o);
        let a = Rational::from(&self.a * &o.a) + Rational::from(&self.b * &o.b) * &d;
        let b = Rational::from(&self.a * &o.b) + Rational::from(&self.b * &o.a);
        let d = if b == 0 { Integer::from(1) } else { d };
        Surd { a, b, d }
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64() + self.b.to_f64() * self.d.to_f64().sqrt()
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.a);
        }
        let b_abs = Rational::from(self.b.abs_ref());
        let sign = if self.b < 0 { "-" } else { "+" };
        let coeff = if b_abs == 1 { String::new() } else { format!("{b_abs}*") };
        if self.a == 0 {
            let lead = if self.b < 0 { "-" } else { "" };
            write!(f, "{lead}{coeff}sqrt({})", self.d)
        } else {
            write!(f, "{} {sign} {coeff}sqrt({})", self.a, self.d)
        }
    }
}

/// Exact (γ_S, γ′_S) = ((c - 1) ∓ √((1 - c)(25 - c)))/12 for rational c ≤ 1.
pub fn lqg_string_exact(c: &Rational) -> Result<(Surd, Surd), CriticalError> {
    if *c > 1 {
        return Err(CriticalError::CentralChargeAboveOne(c.to_f64()));
    }
    let one_minus = Rational::from(1 - c);
    let disc = Rational::from(&one_minus * Rational::from(25 - c));
    let a = Rational::from(c - 1u32) / 12u32;
    let twelfth = Rational::from((1, 12));
    let gs = Surd::new(a.clone(), Rational::from(-&twelfth), &disc);
    let gsp = Surd::new(a, twelfth, &disc);
    Ok((gs, gsp))
}

/// Positive root Δ of x = (γ²/4)Δ² + (1 - γ²/4)Δ: Δ = (√(4x + a_γ²) - a_γ)/γ.
pub fn kpz(x: f64, gamma: f64) -> f64 {
    let a = a_gamma(gamma);
    ((4.0 * x + a * a).sqrt() - a) / gamma
}

/// x = (γ²/4)Δ² + (1 - γ²/4)Δ.
pub fn kpz_inverse(delta: f64, gamma: f64) -> f64 {
    let g2 = gamma * gamma / 4.0;
    g2 * delta * delta + (1.0 - g2) * delta
}

/// Δ′ = (Δ - γ_S)/(1 - γ_S).
pub fn dual_dimension<F: Field>(delta: F, gamma_s: F) -> F {
    let one = delta.int_like(1);
    delta.sub(&gamma_s).div(&one.sub(&gamma_s))
}

/// Δ = (Δ′ - γ′_S)/(1 - γ′_S), the inverse of `dual_dimension`.
pub fn dual_dimension_inverse<F: Field>(delta_prime: F, gamma_s_prime: F) -> F {
    dual_dimension(delta_prime, gamma_s_prime)
}

/// P_A(t) = A/√(2π t³) exp(-(A - a_γ t)²/(2t)).
pub fn quantum_ball_density(area: f64, t: f64, gamma: f64) -> f64 {
    let a = a_gamma(gamma);
    let d = area - a * t;
    area / (2.0 * std::f64::consts::PI * t * t * t).sqrt() * (-d * d / (2.0 * t)).exp()
}

/// ∫_0^∞ P_A(t) dt by quadrature in log t.
pub fn quantum_ball_mass(area: f64, gamma: f64) -> Result<f64, CriticalError> {
    let breaks: Vec<f64> = (0..=24).map(|i| -40.0 + 5.0 * i as f64).collect();
    integrate(
        |x| {
            let t = x.exp();
            t * quantum_ball_density(area, t, gamma)
        },
        &breaks,
        1e-15,
        1e-13,
        4000,
    )
    .map(|q| q.value)
    .map_err(|e| CriticalError::Quadrature(e.to_string()))
}

/// 1 when a_γ ≥ 0, exp(2 A a_γ) otherwise.
pub fn quantum_ball_mass_expected(area: f64, gamma: f64) -> f64 {
    let a = a_gamma(gamma);
    if a >= 0.0 {
        1.0
    } else {
        (2.0 * area * a).exp()
    }
}

/// γ² = min(κ, 16/κ), γ′² = max(κ, 16/κ).
pub fn sle_coupling(kappa: f64) -> (f64, f64) {
    let (a, b) = (kappa, 16.0 / kappa);
    (a.min(b).sqrt(), a.max(b).sqrt())
}

/// c = -1 - 6e²/(1 - e) with e = arccos(q/2)/π.
pub fn meander_central_charge(q: f64) -> Result<f64, CriticalError> {
    if !(0.0..=2.0).contains(&q) {
        return Err(CriticalError::QOutOfRange(q));
    }
    let e = (q / 2.0).acos() / std::f64::consts::PI;
    Ok(-1.0 - 6.0 * e * e / (1.0 - e))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HausdorffDimensions {
    /// Dimension of the whole map, 1/(1 - 4/γ′²).
    pub whole: f64,
    /// Dimension of a single large bubble, (4/γ²) d_γ.
    pub bubble: Option<f64>,
    /// γ (2/γ + γ/2 + 1/√6).
    pub quad_form: f64,
}

pub fn hausdorff_dimensions(gamma_prime: f64, d_gamma: Option<f64>) -> HausdorffDimensions {
    let gamma = 4.0 / gamma_prime;
    HausdorffDimensions {
        whole: 1.0 / (1.0 - 4.0 / (gamma_prime * gamma_prime)),
        bubble: d_gamma.map(|d| 4.0 / (gamma * gamma) * d),
        quad_form: gamma * (q_gamma(gamma) + 1.0 / 6f64.sqrt()),
    }
}

/// Left side of the quartic satisfied by the quadrangulation series M_u(g).
pub fn quad_mu_residual<F: Field>(u: &F, g: &F, m: &F) -> F {
    let i = |v| u.int_like(v);
    let u2 = u.mul(u);
    let u3 = u2.mul(u);
    let m2 = m.mul(m);
    let m3 = m2.mul(m);
    let m4 = m3.mul(m);
    let c4 = i(27).mul(&u3).mul(g).mul(g);
    let c3 = i(1).sub(&i(18).mul(&u2).mul(g));
    let c2 = i(3).sub(&i(2).mul(u)).add(&i(2).mul(&u3).mul(g)).sub(&i(18).mul(&u2).mul(g));
    let c1 = i(3).sub(&i(4).mul(u)).add(&u2);
    let one_minus_u = i(1).sub(u);
    c4.mul(&m4).add(&c3.mul(&m3)).sub(&c2.mul(&m2)).add(&c1.mul(m)).sub(&one_minus_u.mul(&one_minus_u))
}
