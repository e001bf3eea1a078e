//! Block generating functions B(t) and the solution of u = 1/(1 - B + 2tB').

use super::CriticalError;
use crate::ring::Ring;
use crate::series::TruncatedSeries;
use std::f64::consts::PI;

const MAX_ITER: usize = 200;
const REL_TOL: f64 = 1e-14;

/// A point on the curve t -> (B(t), B'(t)).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockPoint {
    pub t: f64,
    pub b: f64,
    pub bp: f64,
}

impl BlockPoint {
    /// 1 - B + 2tB', the inverse of the block weight at which t is critical.
    pub fn inverse_weight(&self) -> f64 {
        1.0 - self.b + 2.0 * self.t * self.bp
    }
}

/// B(t) on [0, t_cr], given through a parameter running over `[0, param_max()]`
/// with t increasing in the parameter and `at(param_max())` at t_cr.
pub trait BlockFunction {
    fn param_max(&self) -> f64;
    fn at(&self, s: f64) -> BlockPoint;

    fn critical_point(&self) -> BlockPoint {
        self.at(self.param_max())
    }
}

/// Simple quadrangulations: t = (4w/27)(3-4w)^2, B = 1 + (8w/3)(1-2w), B' = 6/(3-4w).
#[derive(Clone, Copy, Debug, Default)]
pub struct QuadBlocks;

impl BlockFunction for QuadBlocks {
    fn param_max(&self) -> f64 {
        0.25
    }

    fn at(&self, w: f64) -> BlockPoint {
        let a = 3.0 - 4.0 * w;
        BlockPoint { t: 4.0 * w / 27.0 * a * a, b: 1.0 + 8.0 * w / 3.0 * (1.0 - 2.0 * w), bp: 6.0 / a }
    }
}

/// Complete elliptic integrals K and E at parameter m = k^2 < 1, by the AGM.
pub fn elliptic_ke(m: f64) -> (f64, f64) {
    let (mut a, mut b) = (1.0f64, (1.0 - m).sqrt());
    let mut c = m.sqrt();
    let mut sum = 0.5 * c * c;
    let mut pow = 0.5;
    while c.abs() > 1e-15 * a {
        let a1 = 0.5 * (a + b);
        c = 0.5 * (a - b);
        b = (a * b).sqrt();
        a = a1;
        pow *= 2.0;
        sum += pow * c * c;
    }
    let k = PI / (2.0 * a);
    (k, k * (1.0 - sum))
}

/// E(z) and (1 - z) K(z), with the limits at z = 1.
fn e_and_damped_k(z: f64) -> (f64, f64) {
    if z >= 1.0 {
        return (1.0, 0.0);
    }
    let (k, e) = elliptic_ke(z);
    (e, (1.0 - z) * k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum EllipticKind {
    Cubic,
    Meander,
}

/// Arch-system families whose M_1 is a complete elliptic integral at z = 16g.
///
/// The parameter is g in [0, 1/16]; t = g M1^2, B = M1 and
/// B' = M1' / (M1^2 + 2 g M1 M1'). Below g1/2 the power series is used.
#[derive(Clone, Debug)]
pub struct EllipticBlocks {
    kind: EllipticKind,
    counts: Vec<f64>,
}

impl EllipticBlocks {
    pub fn cubic() -> Self {
        let cat = catalans(66);
        EllipticBlocks { kind: EllipticKind::Cubic, counts: (0..65).map(|n| cat[n] * cat[n + 1]).collect() }
    }

    pub fn meander() -> Self {
        let cat = catalans(65);
        EllipticBlocks { kind: EllipticKind::Meander, counts: cat.iter().map(|c| c * c).collect() }
    }

    /// M1(g) and M1'(g).
    pub fn m1(&self, g: f64) -> (f64, f64) {
        if g <= self.param_max() / 2.0 {
            let (mut m, mut mp, mut pw) = (0.0, 0.0, 1.0);
            for (n, c) in self.counts.iter().enumerate() {
                if n > 0 {
                    mp += n as f64 * c * pw;
                    pw *= g;
                    m += c * pw;
                } else {
                    m += c;
                }
            }
            return (m, mp);
        }
        let z = 16.0 * g;
        let (e, dk) = e_and_damped_k(z);
        match self.kind {
            EllipticKind::Cubic => {
                let nn = (1.0 + z) * e - dk;
                let f = 4.0 / (3.0 * PI * z) * nn;
                let fp = 4.0 / (3.0 * PI) * (1.5 * z * e - nn) / (z * z);
                ((1.0 - f) / (2.0 * g), -8.0 * fp / g - (1.0 - f) / (2.0 * g * g))
            }
            EllipticKind::Meander => {
                let h = 2.0 / PI * (2.0 * e - dk);
                let hp = 2.0 / PI * (e - dk) / (2.0 * z);
                ((h - 1.0) / (4.0 * g), 4.0 * hp / g - (h - 1.0) / (4.0 * g * g))
            }
        }
    }
}

fn catalans(n: usize) -> Vec<f64> {
    let mut out = vec![1.0f64];
    for k in 0..n {
        let last = out[k];
        out.push(last * 2.0 * (2 * k + 1) as f64 / (k + 2) as f64);
    }
    out
}

impl BlockFunction for EllipticBlocks {
    fn param_max(&self) -> f64 {
        1.0 / 16.0
    }

    fn at(&self, g: f64) -> BlockPoint {
        let (m, mp) = self.m1(g);
        BlockPoint { t: g * m * m, b: m, bp: mp / (m * m + 2.0 * g * m * mp) }
    }
}

/// B(t) as a truncated series evaluated directly on [0, t_cr].
#[derive(Clone, Debug)]
pub struct SeriesBlocks {
    coeffs: Vec<f64>,
    t_cr: f64,
}

impl SeriesBlocks {
    pub fn new(coeffs: Vec<f64>, t_cr: f64) -> Self {
        SeriesBlocks { coeffs, t_cr }
    }

    pub fn from_series<R: Ring>(b: &TruncatedSeries<R>, to_f64: impl Fn(&R) -> f64, t_cr: f64) -> Self {
        SeriesBlocks::new(b.coeffs().iter().map(to_f64).collect(), t_cr)
    }
}

impl BlockFunction for SeriesBlocks {
    fn param_max(&self) -> f64 {
        self.t_cr
    }

    fn at(&self, t: f64) -> BlockPoint {
        let (mut b, mut bp) = (0.0, 0.0);
        for (j, c) in self.coeffs.iter().enumerate().rev() {
            b = b * t + c;
            if j > 0 {
                bp = bp * t + j as f64 * c;
            }
        }
        BlockPoint { t, b, bp }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TcSolution {
    pub t_c: f64,
    pub g_c: f64,
    pub point: BlockPoint,
    pub iterations: usize,
}

/// Solves u = 1/(1 - B(t_c) + 2 t_c B'(t_c)) by bisection and returns
/// t_c with g_c(u) = t_c / (1 + u (B(t_c) - 1))^2.
pub fn solve_tc(u: f64, blocks: &dyn BlockFunction) -> Result<TcSolution, CriticalError> {
    let top = blocks.critical_point();
    let u_cr = 1.0 / top.inverse_weight();
    if !(u > 0.0) || u < u_cr * (1.0 - 1e-13) {
        return Err(CriticalError::BelowUcrit { u, u_cr });
    }
    let target = 1.0 / u;
    let finish = |s: f64, iterations| {
        let point = blocks.at(s);
        let d = 1.0 + u * (point.b - 1.0);
        Ok(TcSolution { t_c: point.t, g_c: point.t / (d * d), point, iterations })
    };
    if top.inverse_weight() <= target {
        return finish(blocks.param_max(), 0);
    }
    let (mut lo, mut hi) = (0.0, blocks.param_max());
    for it in 1..=MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if blocks.at(mid).inverse_weight() < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= REL_TOL * hi {
            return finish(0.5 * (lo + hi), it);
        }
    }
    Err(CriticalError::NoConvergence(MAX_ITER))
}
