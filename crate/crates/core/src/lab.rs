//! Exponent and limit estimation from finitely many coefficients.
//!
//! Everything runs in 256-bit floats: the p-th differences below lose about
//! p log10(N) digits.

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use thiserror::Error;

pub const LAB_PREC: u32 = 256;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("t_{0} is not strictly positive")]
    NonPositive(usize),
    #[error("need {needed} terms, have {available}")]
    InsufficientLength { needed: usize, available: usize },
    #[error("p = {0} outside 1..=10")]
    BadP(usize),
    #[error("t_{0} vanishes")]
    ZeroTerm(usize),
    #[error("g1 must be positive")]
    BadG1,
    #[error("denominator of the u_cr sequence is not positive at n = {0}")]
    DenominatorSignChange(usize),
    #[error("singular extrapolation system")]
    Singular,
}

/// A `LAB_PREC` float from anything `Float` can be assigned from.
pub fn fl<T>(v: T) -> Float
where
    Float: rug::Assign<T>,
{
    let mut f = Float::new(LAB_PREC);
    rug::Assign::assign(&mut f, v);
    f
}

/// Coefficients t_0..t_N, optionally multiplied by (log n)^η.
#[derive(Clone, Debug)]
pub struct SequenceWindow {
    values: Vec<Float>,
    pub label: String,
    pub log_power_eta: f64,
}

impl SequenceWindow {
    /// t_0 may vanish (pointed series); every later term must be positive.
    pub fn new(values: Vec<Float>, label: impl Into<String>) -> Result<Self, LabError> {
        if let Some(n) = values.iter().skip(1).position(|v| v.cmp0() != Some(std::cmp::Ordering::Greater)) {
            return Err(LabError::NonPositive(n + 1));
        }
        Ok(SequenceWindow { values, label: label.into(), log_power_eta: 0.0 })
    }

    pub fn from_integers(values: &[Integer], label: impl Into<String>) -> Result<Self, LabError> {
        SequenceWindow::new(values.iter().map(fl).collect(), label)
    }

    pub fn from_rationals(values: &[Rational], label: impl Into<String>) -> Result<Self, LabError> {
        SequenceWindow::new(values.iter().map(fl).collect(), label)
    }

    pub fn from_f64(values: &[f64], label: impl Into<String>) -> Result<Self, LabError> {
        SequenceWindow::new(values.iter().map(|&v| fl(v)).collect(), label)
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.log_power_eta = eta;
        self
    }

    /// Largest index N.
    pub fn n_max(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn raw(&self) -> &[Float] {
        &self.values
    }

    /// First n for which δ_n is formed: 1, or 2 with a log correction (log 1 = 0).
    pub fn first_index(&self) -> usize {
        if self.log_power_eta == 0.0 {
            1
        } else {
            2
        }
    }

    /// t_n with the log correction applied.
    pub fn term(&self, n: usize) -> Float {
        let t = self.values[n].clone();
        if self.log_power_eta == 0.0 {
            return t;
        }
        let log = fl(n as u32).ln();
        t * log.pow(fl(self.log_power_eta))
    }

    pub fn truncate(&self, n: usize) -> Self {
        SequenceWindow { values: self.values[..=n.min(self.n_max())].to_vec(), ..self.clone() }
    }
}

/// δ_n = n² (t_{n+2} t_n / t_{n+1}² - 1) for n = `first_index()`..=N-2.
pub fn delta_sequence(t: &SequenceWindow) -> Result<Vec<Float>, LabError> {
    let n_max = t.n_max();
    let start = t.first_index();
    if n_max < start + 2 {
        return Err(LabError::InsufficientLength { needed: start + 3, available: t.values.len() });
    }
    let terms: Vec<Float> = (0..=n_max).map(|n| if n < start { fl(0) } else { t.term(n) }).collect();
    (start..=n_max - 2)
        .map(|n| {
            if terms[n + 1].is_zero() {
                return Err(LabError::ZeroTerm(n + 1));
            }
            let ratio = fl(&terms[n + 2] * &terms[n]) / fl(terms[n + 1].square_ref());
            Ok((ratio - 1u32) * (n * n) as u64)
        })
        .collect()
}

/// δ̂^{(p)}_n = n^p δ_n for a sequence starting at index `start`.
pub fn hat_sequence(seq: &[Float], start: usize, p: usize) -> Vec<Float> {
    seq.iter()
        .enumerate()
        .map(|(i, d)| fl(d * fl((start + i) as u32).pow(p as u32)))
        .collect()
}

/// δ̃^{(p)}_n = Δ^p(n^p δ_n)/p!, for n = start..=start + len - 1 - p.
pub fn accelerate(seq: &[Float], start: usize, p: usize) -> Result<Vec<Float>, LabError> {
    if p == 0 {
        return Ok(seq.to_vec());
    }
    if seq.len() <= p {
        return Err(LabError::InsufficientLength { needed: p + 1, available: seq.len() });
    }
    let mut diff = hat_sequence(seq, start, p);
    for _ in 0..p {
        diff = diff.windows(2).map(|w| fl(&w[1] - &w[0])).collect();
    }
    let fact = Integer::from(Integer::factorial(p as u32));
    Ok(diff.into_iter().map(|d| d / &fact).collect())
}

#[derive(Clone, Debug)]
pub struct EstimateReport {
    pub n: usize,
    pub p: usize,
    pub estimate: f64,
    /// Index of the first entry of each trail.
    pub start: usize,
    pub deltas: Vec<f64>,
    pub hat: Vec<f64>,
    pub tilde: Vec<f64>,
    pub target_description: String,
}

fn check_p(p: usize) -> Result<(), LabError> {
    if (1..=10).contains(&p) {
        Ok(())
    } else {
        Err(LabError::BadP(p))
    }
}

/// The (N, p)-estimate δ̃^{(p)}_{N-2-p} of δ in t_n ∝ g*^{-n} / n^δ.
pub fn np_estimate(t: &SequenceWindow, n: usize, p: usize) -> Result<EstimateReport, LabError> {
    check_p(p)?;
    let start = t.first_index();
    if n > t.n_max() || n < start + 2 + p {
        return Err(LabError::InsufficientLength { needed: (start + 3 + p).max(n + 1), available: t.values.len() });
    }
    let window = t.truncate(n);
    let deltas = delta_sequence(&window)?;
    let tilde = accelerate(&deltas, start, p)?;
    let estimate = tilde[n - 2 - p - start].to_f64();
    let f = |v: &[Float]| v.iter().map(Float::to_f64).collect::<Vec<_>>();
    Ok(EstimateReport {
        n,
        p,
        estimate,
        start,
        hat: f(&hat_sequence(&deltas, start, p)),
        deltas: f(&deltas),
        tilde: f(&tilde),
        target_description: format!("({n},{p})-estimate of the exponent of {}", t.label),
    })
}

/// Limit of `a_n` (given from index `start`) by Δ^p(n^p a_n)/p! at the last admissible n.
pub fn richardson_limit(a: &[Float], start: usize, p: usize) -> Result<Float, LabError> {
    let acc = accelerate(a, start, p)?;
    Ok(acc.last().cloned().expect("nonempty after length check"))
}

/// g* from the ratios t_n/t_{n+1}, n ≥ 1, extrapolated at order p.
pub fn growth_rate_estimate(t: &SequenceWindow, p: usize) -> Result<f64, LabError> {
    check_p(p)?;
    let n_max = t.n_max();
    if n_max < p + 3 {
        return Err(LabError::InsufficientLength { needed: p + 4, available: t.values.len() });
    }
    let ratios: Vec<Float> = (1..n_max).map(|n| fl(&t.values[n] / &t.values[n + 1])).collect();
    Ok(richardson_limit(&ratios, 1, p)?.to_f64())
}

/// u_n = (M + 2 g1 M') / (M (1 - M) + 2 g1 M') on the partial sums M^{[n]}, n = 1..=N.
pub fn ucrit_sequence(m1: &[Float], g1: &Float) -> Result<Vec<Float>, LabError> {
    if g1.cmp0() != Some(std::cmp::Ordering::Greater) {
        return Err(LabError::BadG1);
    }
    let mut m = fl(0);
    let mut mp = fl(0);
    let mut pw = fl(1);
    let mut out = Vec::with_capacity(m1.len());
    for (n, c) in m1.iter().enumerate() {
        if n > 0 {
            mp += fl(c * &pw) * n as u32;
            pw *= g1;
        }
        m += fl(c * &pw);
        if n == 0 {
            continue;
        }
        let two_gmp = fl(g1 * &mp) * 2u32;
        let den = fl(&m * fl(1 - &m)) + &two_gmp;
        if den.cmp0() != Some(std::cmp::Ordering::Greater) {
            return Err(LabError::DenominatorSignChange(n));
        }
        out.push((fl(&m + &two_gmp)) / den);
    }
    Ok(out)
}

/// The first `p` exponents of the ladder {iθ + k : i ≥ 1, k ≥ 0}.
pub fn correction_ladder(theta: f64, p: usize) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for i in 1..=p {
        for k in 0..=p {
            out.push(i as f64 * theta + k as f64);
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    out.truncate(p);
    out
}

fn solve_linear(mut a: Vec<Vec<Float>>, mut b: Vec<Float>) -> Result<Vec<Float>, LabError> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].clone().abs().partial_cmp(&a[j][col].clone().abs()).unwrap())
            .unwrap();
        if a[piv][col].is_zero() {
            return Err(LabError::Singular);
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = fl(&a[row][col] / &a[col][col]);
            for k in col..n {
                let sub = fl(&f * &a[col][k]);
                a[row][k] -= sub;
            }
            let sub = fl(&f * &b[col]);
            b[row] -= sub;
        }
    }
    let mut x = vec![fl(0); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..n {
            acc -= fl(&a[row][k] * &x[k]);
        }
        x[row] = acc / &a[row][row];
    }
    Ok(x)
}

/// Limit of `a_n` (from index `start`) assuming a_n = L + Σ_j c_j n^{-e_j}, fitted
/// exactly on the last `exponents.len() + 1` terms.
pub fn generalized_richardson(a: &[Float], start: usize, exponents: &[f64]) -> Result<Float, LabError> {
    let k = exponents.len() + 1;
    if a.len() < k {
        return Err(LabError::InsufficientLength { needed: k, available: a.len() });
    }
    let first = a.len() - k;
    let mut rows = Vec::with_capacity(k);
    let mut rhs = Vec::with_capacity(k);
    for i in first..a.len() {
        let n = fl((start + i) as u32);
        let mut row = vec![fl(1)];
        for &e in exponents {
            row.push(fl(n.clone().pow(fl(-e))));
        }
        rows.push(row);
        rhs.push(a[i].clone());
    }
    Ok(solve_linear(rows, rhs)?.swap_remove(0))
}

#[derive(Clone, Debug)]
pub struct UcritEstimate {
    pub estimate: f64,
    /// u_n for n = 1..=N.
    pub sequence: Vec<f64>,
    pub theta: f64,
    pub p: usize,
}

/// u_cr from the partial-sum sequence, extrapolated with correction exponents
/// {iθ + k}; θ = 1 is the plain Δ^p(n^p a_n)/p! operator.
pub fn ucrit_extrapolate(m1: &[Float], g1: &Float, theta: f64, p: usize) -> Result<UcritEstimate, LabError> {
    check_p(p)?;
    if m1.len() < 10 {
        return Err(LabError::InsufficientLength { needed: 10, available: m1.len() });
    }
    let seq = ucrit_sequence(m1, g1)?;
    let estimate = generalized_richardson(&seq, 1, &correction_ladder(theta, p))?.to_f64();
    Ok(UcritEstimate { estimate, sequence: seq.iter().map(Float::to_f64).collect(), theta, p })
}

/// θ = δ̂ - 2 from the (N, 5)-estimate δ̂ of the u = 1 coefficients, N = len - 1.
pub fn ucrit_theta(m1: &[Float]) -> Result<f64, LabError> {
    let window = SequenceWindow::new(m1.to_vec(), "m_n at u = 1")?;
    let n = window.n_max();
    Ok(np_estimate(&window, n, 5.min(n.saturating_sub(3)).max(1))?.estimate - 2.0)
}
