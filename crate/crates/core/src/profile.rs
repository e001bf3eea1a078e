//! Scaling limit of the distance profile inside the root block at u = u_cr.
//!
//! With x = μ r², A = √3/2^{2/3} and B = 3/2^{2/3}, the kernels are
//! c = cos(A√x), ch = cosh(B√x), s = sin(A√x), sh = sinh(B√x).

use crate::quadrature::integrate;
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("r must be {0}")]
    BadRadius(&'static str),
    #[error("quadrature did not reach tolerance at r = {r} (error {error:.3e})")]
    Quadrature { r: f64, error: f64 },
    #[error("rho underflows at r = {0}; the fit window is too deep in the tail")]
    Underflow(f64),
    #[error("need at least four points in the window")]
    TooFewPoints,
}

/// Upper end of the μ-integrals: e^{-μ³} μ⁴ < 1e-18 beyond it.
pub const MU_MAX: f64 = 4.2;
const REL_TOL: f64 = 1e-10;
/// Below this x the kernels are replaced by their Taylor series.
const SERIES_X: f64 = 0.1;

const GAMMA_4_3: f64 = 0.892_979_511_569_249_2;
const GAMMA_5_3: f64 = 0.902_745_292_950_933_6;

fn cbrt2() -> f64 {
    2f64.cbrt()
}

/// Φ(r) ~ K₂ r² and ρ(r) ~ 2K₂ r as r -> 0, K₂ = 3Γ(5/3)/(5·2^{4/3}Γ(4/3)).
pub fn small_r_constant() -> f64 {
    3.0 * GAMMA_5_3 / (5.0 * 2f64.powf(4.0 / 3.0) * GAMMA_4_3)
}

struct Kernels {
    c: f64,
    s: f64,
    /// 1/ch
    w: f64,
    /// sh/ch
    th: f64,
}

fn kernels(x: f64) -> Kernels {
    let k = 2f64.powf(2.0 / 3.0);
    let (a, b) = (3f64.sqrt() / k * x.sqrt(), 3.0 / k * x.sqrt());
    let e = (-2.0 * b).exp();
    Kernels { c: a.cos(), s: a.sin(), w: 2.0 * (-b).exp() / (1.0 + e), th: (1.0 - e) / (1.0 + e) }
}

/// 1 - 6 (1 - c ch + s sh/√3)/(c - ch)², divided through by ch² for large x.
pub fn phi_bracket(x: f64) -> f64 {
    if x < SERIES_X {
        let t2 = cbrt2() * cbrt2();
        let x3 = x * x * x;
        return x * (3.0 * t2 / 20.0)
            - x3 * (3.0 / 400.0)
            + x3 * x * (9.0 * t2 / 12320.0)
            - x3 * x3 * (3.0 / 123200.0)
            + x3 * x3 * x * (32553.0 * t2 / 15247232000.0);
    }
    let Kernels { c, s, w, th } = kernels(x);
    let num = w * w - c * w + s * th * w / 3f64.sqrt();
    let den = (c * w - 1.0) * (c * w - 1.0);
    1.0 - 6.0 * num / den
}

/// sh (c (c + ch) - 2) / ((c - ch)³ √x).
pub fn rho_kernel(x: f64) -> f64 {
    if x < SERIES_X {
        let (t, t2) = (cbrt2(), cbrt2() * cbrt2());
        let x2 = x * x;
        let x3 = x2 * x;
        return t / 40.0 - x2 * (3.0 * t2 / 1600.0) + x3 * (3.0 * t / 6160.0)
            - x3 * x2 * (3.0 * t2 / 246400.0)
            + x3 * x3 * (10851.0 * t / 4356352000.0);
    }
    let Kernels { c, w, th, .. } = kernels(x);
    let num = th * (c * c * w * w + c * w - 2.0 * w * w);
    let d = c * w - 1.0;
    num / (d * d * d * x.sqrt())
}

/// Panels on [0, MU_MAX]: geometric towards 0 so that the scale μ ~ 1/r² is resolved.
fn mu_breaks(r: f64) -> Vec<f64> {
    let mut out = vec![0.0];
    let lo = (1e-3 / (r * r).max(1.0)).min(1e-3);
    let mut m = lo;
    while m < 0.5 {
        out.push(m);
        m *= 2.0;
    }
    let mut m = 0.5;
    while m < MU_MAX - 1e-12 {
        out.push(m);
        m += 0.25;
    }
    out.push(MU_MAX);
    out
}

fn quad(r: f64, abs_tol: f64, f: impl FnMut(f64) -> f64) -> Result<f64, ProfileError> {
    integrate(f, &mu_breaks(r), abs_tol, REL_TOL, 20_000)
        .map(|q| q.value)
        .map_err(|e| ProfileError::Quadrature { r, error: e.estimate.error })
}

/// Cumulative profile Φ(r).
pub fn phi(r: f64) -> Result<f64, ProfileError> {
    if !(r >= 0.0) {
        return Err(ProfileError::BadRadius("non-negative"));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let r2 = r * r;
    let v = quad(r, 1e-300, |mu| (-mu * mu * mu).exp() * mu.powi(3) * phi_bracket(mu * r2))?;
    Ok(3.0 / GAMMA_4_3 * v)
}

/// Density ρ(r) = Φ'(r).
pub fn rho(r: f64) -> Result<f64, ProfileError> {
    if !(r > 0.0) {
        return Err(ProfileError::BadRadius("positive"));
    }
    let r2 = r * r;
    let v = quad(r, 1e-300, |mu| (-mu * mu * mu).exp() * mu.powi(4) * rho_kernel(mu * r2))?;
    Ok(9.0 * 2f64.powf(7.0 / 3.0) / GAMMA_4_3 * r * v)
}

/// (2/3)σ²(1 + 3/sinh²(σL)).
fn big_f(l: Complex64, sigma: f64) -> Complex64 {
    let z = l * sigma;
    let inv_sinh2 = if z.norm() < 0.1 {
        let z2 = z * z;
        z2.inv() - 1.0 / 3.0 + z2 / 15.0 - z2 * z2 * (2.0 / 189.0) + z2 * z2 * z2 / 675.0
    } else {
        let e = (-2.0 * z).exp();
        4.0 * e / ((1.0 - e) * (1.0 - e))
    };
    (1.0 + 3.0 * inv_sinh2) * (2.0 / 3.0 * sigma * sigma)
}

/// The two conjugate branches of the contour integrand at (μ, r), before
/// multiplication by e^{-μ³} μ³.
pub fn contour_branches(mu: f64, r: f64) -> (Complex64, Complex64) {
    let kappa = 3f64.powf(0.25) / 2f64.powf(1.0 / 6.0);
    let sigma = 3f64.powf(0.25) / 2f64.sqrt();
    let rot = Complex64::from_polar(1.0, PI / 6.0);
    let l = kappa * mu.sqrt() * r;
    (rot.conj() * big_f(rot * l, sigma), rot * big_f(rot.conj() * l, sigma))
}

/// Φ(r) from the complex form of the integrand, an independent check of `phi`.
pub fn phi_contour_crosscheck(r: f64) -> Result<f64, ProfileError> {
    if !(r > 0.0) {
        return Err(ProfileError::BadRadius("positive"));
    }
    // the branches cancel like 1/(μ r²) near μ = 0, so only an absolute tolerance is attainable
    let v = quad(r, 1e-13, |mu| {
        let (a, b) = contour_branches(mu, r);
        (-mu * mu * mu).exp() * mu.powi(3) * (a + b).re
    })?;
    Ok(3.0 / GAMMA_4_3 * v)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileCurve {
    pub r: Vec<f64>,
    pub phi: Vec<f64>,
    pub rho: Vec<f64>,
    pub quadrature_tolerance: f64,
}

impl ProfileCurve {
    /// Φ and ρ on `points` equally spaced radii in [r_min, r_max]; ρ(0) is 0.
    pub fn sample(r_min: f64, r_max: f64, points: usize) -> Result<Self, ProfileError> {
        if !(r_min >= 0.0 && r_max > r_min) || points < 2 {
            return Err(ProfileError::BadRadius("an increasing non-negative range"));
        }
        let r: Vec<f64> = (0..points).map(|i| r_min + (r_max - r_min) * i as f64 / (points - 1) as f64).collect();
        let phi = r.iter().map(|&x| phi(x)).collect::<Result<Vec<_>, _>>()?;
        let rho = r.iter().map(|&x| if x == 0.0 { Ok(0.0) } else { rho(x) }).collect::<Result<Vec<_>, _>>()?;
        Ok(ProfileCurve { r, phi, rho, quadrature_tolerance: REL_TOL })
    }
}

/// Least-squares fit of log ρ = c + p log r - k r^δ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FisherFit {
    pub delta: f64,
    pub k: f64,
    pub p: f64,
    pub c: f64,
    pub rms: f64,
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    if d.abs() < 1e-300 {
        return None;
    }
    let mut out = [0.0; 3];
    for (j, o) in out.iter_mut().enumerate() {
        let mut m = a;
        for i in 0..3 {
            m[i][j] = b[i];
        }
        *o = det(m) / d;
    }
    Some(out)
}

/// For fixed δ the model is linear in (c, p, k); returns the fit and its residual sum of squares.
fn fit_at(delta: f64, r: &[f64], y: &[f64]) -> Option<(FisherFit, f64)> {
    let rows: Vec<[f64; 3]> = r.iter().map(|&x| [1.0, x.ln(), -x.powf(delta)]).collect();
    let mut ata = [[0.0; 3]; 3];
    let mut aty = [0.0; 3];
    for (row, &yi) in rows.iter().zip(y) {
        for i in 0..3 {
            aty[i] += row[i] * yi;
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let [c, p, k] = solve3(ata, aty)?;
    let sse: f64 = rows.iter().zip(y).map(|(row, &yi)| (c + p * row[1] + k * row[2] - yi).powi(2)).sum();
    Some((FisherFit { delta, k, p, c, rms: (sse / y.len() as f64).sqrt() }, sse))
}

/// Fits log ρ = c + p log r - k r^δ to the samples, minimising over δ in [0.3, 3].
pub fn fit_stretched_exponential(r: &[f64], log_rho: &[f64]) -> Result<FisherFit, ProfileError> {
    if r.len() < 4 {
        return Err(ProfileError::TooFewPoints);
    }
    let sse = |d: f64| fit_at(d, r, log_rho).map(|(_, s)| s).unwrap_or(f64::INFINITY);
    // coarse scan, then golden section around the best node
    let grid: Vec<f64> = (0..=270).map(|i| 0.3 + 0.01 * i as f64).collect();
    let best = grid.iter().copied().min_by(|a, b| sse(*a).total_cmp(&sse(*b))).unwrap();
    let (mut a, mut b) = ((best - 0.01).max(0.3), (best + 0.01).min(3.0));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let (x1, x2) = (b - g * (b - a), a + g * (b - a));
        if sse(x1) < sse(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    fit_at(0.5 * (a + b), r, log_rho).map(|(f, _)| f).ok_or(ProfileError::TooFewPoints)
}

/// Tail exponent δ of log ρ(r) ≈ -k r^δ on [r_min, r_max], from `points` samples.
pub fn fisher_tail_exponent(r_min: f64, r_max: f64, points: usize) -> Result<FisherFit, ProfileError> {
    if !(r_min >= 2.0 && r_max > r_min) {
        return Err(ProfileError::BadRadius("a window with r_max > r_min >= 2"));
    }
    let (r, y) = tail_samples(r_min, r_max, points)?;
    fit_stretched_exponential(&r, &y)
}

/// Plain least-squares slope of log(-log ρ) against log r.
pub fn fisher_tail_slope(r_min: f64, r_max: f64, points: usize) -> Result<f64, ProfileError> {
    if !(r_min >= 2.0 && r_max > r_min) {
        return Err(ProfileError::BadRadius("a window with r_max > r_min >= 2"));
    }
    let (r, y) = tail_samples(r_min, r_max, points)?;
    let xs: Vec<f64> = r.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = y.iter().map(|v| (-v).ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = xs.iter().map(|a| (a - mx) * (a - mx)).sum();
    Ok(sxy / sxx)
}

fn tail_samples(r_min: f64, r_max: f64, points: usize) -> Result<(Vec<f64>, Vec<f64>), ProfileError> {
    if points < 4 {
        return Err(ProfileError::TooFewPoints);
    }
    let r: Vec<f64> = (0..points).map(|i| r_min + (r_max - r_min) * i as f64 / (points - 1) as f64).collect();
    let mut y = Vec::with_capacity(points);
    for &x in &r {
        let v = rho(x).map_err(|e| match e {
            ProfileError::Quadrature { r, .. } => ProfileError::Underflow(r),
            e => e,
        })?;
        // below ~1e-250 the quadrature no longer resolves the tail
        if !(v > 1e-250) || !v.is_finite() {
            return Err(ProfileError::Underflow(x));
        }
        y.push(v.ln());
    }
    Ok((r, y))
}
