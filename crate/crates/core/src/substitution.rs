//! The substitution scheme M_u(g) = 1 + u[B(g M_u(g)^2) - 1] and its relatives.
//!
//! Every solver here is coefficient-by-coefficient: the order-n coefficient of
//! the equation is linear in the order-n unknown, so each step is a short
//! triangular update against the powers of the substituted series.

use crate::ring::{Poly, Ring};
use crate::series::{SeriesError, TruncatedSeries};
use rug::Integer;

/// Columns of the powers of a series T with T(0) = 0, filled as T becomes known.
///
/// `col(k)[j]` is `[z^k] T^j` for `j <= k`; column k needs t_1..t_k only.
struct PowerTable<R> {
    t: Vec<R>,
    cols: Vec<Vec<R>>,
}

impl<R: Ring> PowerTable<R> {
    fn new() -> Self {
        PowerTable { t: vec![R::zero()], cols: vec![vec![R::one()]] }
    }

    fn known(&self) -> usize {
        self.cols.len() - 1
    }

    fn push(&mut self, t_k: R) {
        let k = self.t.len();
        self.t.push(t_k);
        let mut col = Vec::with_capacity(k + 1);
        col.push(R::zero());
        for j in 1..=k {
            let mut acc = R::zero();
            for i in 1..=(k - j + 1) {
                acc.add_mul(&self.t[i], &self.cols[k - i][j - 1]);
            }
            col.push(acc);
        }
        self.cols.push(col);
    }

    fn col(&self, k: usize) -> &[R] {
        &self.cols[k]
    }
}

/// Coefficient `k` of `a * b` given both through order `k`.
fn conv_at<R: Ring>(a: &[R], b: &[R], k: usize) -> R {
    let mut acc = R::zero();
    for i in 0..=k {
        acc.add_mul(&a[i], &b[k - i]);
    }
    acc
}

/// Table of `T = g M^2` for a known series M.
fn substitution_powers<R: Ring>(m: &TruncatedSeries<R>) -> PowerTable<R> {
    let n = m.order();
    let mut table = PowerTable::new();
    for k in 1..=n {
        table.push(conv_at(m.coeffs(), m.coeffs(), k - 1));
    }
    table
}

fn require_unit_constant<R: Ring>(s: &TruncatedSeries<R>) -> Result<(), SeriesError> {
    if !s.coeff(0).is_one() {
        return Err(SeriesError::ConstantTermNotOne(format!("{:?}", s.coeff(0))));
    }
    Ok(())
}

/// Solves `y = z * phi(y)` through order `order`.
pub fn solve_tree_fixed_point<R: Ring>(
    phi: &TruncatedSeries<R>,
    order: usize,
) -> Result<TruncatedSeries<R>, SeriesError> {
    if order == 0 {
        return Err(SeriesError::ZeroOrder);
    }
    if phi.coeff(0).is_zero() {
        return Err(SeriesError::DegenerateTree);
    }
    if phi.order() + 1 < order {
        return Err(SeriesError::InsufficientOrder { needed: order - 1, available: phi.order() });
    }
    let mut powers = PowerTable::new();
    let mut y = vec![R::zero()];
    for n in 1..=order {
        let col = powers.col(n - 1);
        let mut acc = R::zero();
        for (i, p) in col.iter().enumerate() {
            acc.add_mul(phi.coeff(i), p);
        }
        powers.push(acc.clone());
        y.push(acc);
    }
    Ok(TruncatedSeries::from_coeffs(y))
}

/// Solves `S = M^a * C(g M^2)` for C, given S and M through the same order.
pub fn extract_outer_coefficients<R: Ring>(
    s: &TruncatedSeries<R>,
    m: &TruncatedSeries<R>,
    a: u32,
) -> Result<TruncatedSeries<R>, SeriesError> {
    if a > 2 {
        return Err(SeriesError::BadExponent(a));
    }
    if s.order() != m.order() {
        return Err(SeriesError::OrderMismatch { left: s.order(), right: m.order() });
    }
    require_unit_constant(m)?;
    let n = m.order();
    let r = if a == 0 { s.clone() } else { s.mul_unchecked(&m.pow(a).recip()?) };
    let powers = substitution_powers(m);
    let mut c: Vec<R> = Vec::with_capacity(n + 1);
    c.push(r.coeff(0).clone());
    for k in 1..=n {
        let col = powers.col(k);
        let mut acc = r.coeff(k).clone();
        for (j, cj) in c.iter().enumerate().skip(1) {
            acc.sub_assign(&cj.mul(&col[j]));
        }
        // col[k] = t_1^k = m_0^(2k) = 1
        c.push(acc);
    }
    Ok(TruncatedSeries::from_coeffs(c))
}

/// Block series B(t) = 1 + sum b_j t^j with M_1(g) = B(g M_1(g)^2).
pub fn extract_block_coefficients<R: Ring>(
    m1: &TruncatedSeries<R>,
) -> Result<TruncatedSeries<R>, SeriesError> {
    extract_outer_coefficients(m1, m1, 0)
}

/// M_u(g) = 1 + u[B(g M_u^2) - 1] with u as a polynomial variable over R.
///
/// The constant term of `b` is ignored (it is 1 by convention).
pub fn weighted_map_series<R: Ring>(b: &TruncatedSeries<R>) -> TruncatedSeries<Poly<R>> {
    let n = b.order();
    let mut powers: PowerTable<Poly<R>> = PowerTable::new();
    let mut m: Vec<Poly<R>> = vec![Poly::one()];
    for k in 1..=n {
        powers.push(conv_at(&m, &m, k - 1));
        debug_assert_eq!(powers.known(), k);
        let col = powers.col(k);
        let mut acc = Poly::<R>::zero();
        for j in 1..=k {
            if b.coeff(j).is_zero() {
                continue;
            }
            acc.add_assign(&col[j].map(|c| c.mul(b.coeff(j))));
        }
        let mut shifted = vec![R::zero()];
        shifted.extend(acc.into_coeffs());
        let mk = Poly::new(shifted);
        assert!(mk.degree().map_or(true, |d| d <= k), "degree in u exceeds n = {k}");
        m.push(mk);
    }
    TruncatedSeries::from_coeffs(m)
}

/// C(t) = 1 - B(t) + 2t B'(t), i.e. c_j = (2j-1) b_j and c_0 = 0.
pub fn correlator_from_blocks<R: Ring>(b: &TruncatedSeries<R>) -> TruncatedSeries<R> {
    TruncatedSeries::from_fn(b.order(), |j| {
        if j == 0 {
            R::zero()
        } else {
            b.coeff(j).scale(&Integer::from(2 * j - 1))
        }
    })
}

/// S(g) = M(g)^a * C(g M(g)^2) through the order of M.
pub fn compose_outer<R: Ring>(
    c: &TruncatedSeries<R>,
    m: &TruncatedSeries<R>,
    a: u32,
) -> Result<TruncatedSeries<R>, SeriesError> {
    if a > 2 {
        return Err(SeriesError::BadExponent(a));
    }
    let n = m.order();
    if c.order() < n {
        return Err(SeriesError::InsufficientOrder { needed: n, available: c.order() });
    }
    let powers = substitution_powers(m);
    let inner = TruncatedSeries::from_fn(n, |k| {
        let col = powers.col(k);
        let mut acc = R::zero();
        for (j, p) in col.iter().enumerate() {
            acc.add_mul(c.coeff(j), p);
        }
        acc
    });
    Ok(if a == 0 { inner } else { inner.mul_unchecked(&m.pow(a)) })
}

/// Lifts integer-ring series to constant polynomials in u.
pub fn lift<R: Ring>(s: &TruncatedSeries<R>) -> TruncatedSeries<Poly<R>> {
    s.map(|c| Poly::constant(c.clone()))
}

/// Evaluates each polynomial coefficient at u.
pub fn specialize<R: Ring>(s: &TruncatedSeries<Poly<R>>, u: &R) -> TruncatedSeries<R> {
    s.map(|p| p.eval(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::IntPoly;
    use rug::ops::Pow;

    fn s(cs: &[i64]) -> TruncatedSeries<Integer> {
        TruncatedSeries::from_coeffs(cs.iter().map(|&c| Integer::from(c)).collect())
    }

    fn catalan(n: u32) -> Integer {
        Integer::from(Integer::binomial_u(2 * n, n)) / (n + 1)
    }

    #[test]
    fn plane_trees_give_catalan() {
        let phi = s(&[1; 7]);
        let y = solve_tree_fixed_point(&phi, 6).unwrap();
        assert_eq!(y, s(&[0, 1, 1, 2, 5, 14, 42]));
    }

    #[test]
    fn constant_phi_gives_single_vertex() {
        let y = solve_tree_fixed_point(&s(&[1, 0, 0, 0]), 4).unwrap();
        assert_eq!(y, s(&[0, 1, 0, 0, 0]));
    }

    #[test]
    fn degenerate_tree_equation() {
        assert_eq!(solve_tree_fixed_point(&s(&[0, 1, 1]), 2), Err(SeriesError::DegenerateTree));
        assert_eq!(solve_tree_fixed_point(&s(&[1, 1]), 0), Err(SeriesError::ZeroOrder));
    }

    #[test]
    fn quad_blocks_from_closed_form() {
        // m_n = 2 3^n Cat(n)/(n+2)
        let m1 = TruncatedSeries::from_fn(8, |n| {
            Integer::from(2) * Integer::from(3).pow(n as u32) * catalan(n as u32) / (n as u32 + 2)
        });
        assert_eq!(m1.coeffs()[..5], s(&[1, 2, 9, 54, 378]).coeffs()[..]);
        let b = extract_block_coefficients(&m1).unwrap();
        assert_eq!(b.coeffs()[..6], s(&[1, 2, 1, 2, 6, 22]).coeffs()[..]);
    }

    #[test]
    fn cubic_blocks_by_hand() {
        let b = extract_block_coefficients(&s(&[1, 2, 10])).unwrap();
        assert_eq!(b, s(&[1, 2, 2]));
    }

    #[test]
    fn empty_family_has_no_blocks() {
        let b = extract_block_coefficients(&s(&[1, 0, 0, 0])).unwrap();
        assert_eq!(b, s(&[1, 0, 0, 0]));
        assert!(extract_block_coefficients(&s(&[2, 1])).is_err());
    }

    #[test]
    fn weighted_series_small_orders() {
        let m = weighted_map_series(&s(&[1, 2, 1, 2, 6]));
        assert_eq!(m.coeff(1), &IntPoly::from_i64s(&[0, 2]));
        assert_eq!(m.coeff(2), &IntPoly::from_i64s(&[0, 1, 8]));
        assert_eq!(m.coeff(3), &IntPoly::from_i64s(&[0, 2, 12, 40]));
        assert_eq!(m.coeff(4), &IntPoly::from_i64s(&[0, 6, 36, 112, 224]));
    }

    #[test]
    fn zero_weight_gives_one() {
        let m = weighted_map_series(&s(&[1, 2, 1, 2, 6]));
        let m0 = specialize(&m, &Integer::from(0));
        assert_eq!(m0, s(&[1, 0, 0, 0, 0]));
    }

    #[test]
    fn correlator_coefficients() {
        assert_eq!(correlator_from_blocks(&s(&[1, 2, 1, 2])), s(&[0, 2, 3, 10]));
        assert_eq!(correlator_from_blocks(&s(&[0, 0, 0])), s(&[0, 0, 0]));
    }

    #[test]
    fn compose_outer_identity_series() {
        let m = s(&[1, 2, 9, 54]);
        let t = s(&[0, 1, 0, 0]);
        let got = compose_outer(&t, &m, 0).unwrap();
        let gm2 = TruncatedSeries::from_fn(3, |k| {
            if k == 0 {
                Integer::new()
            } else {
                m.mul(&m).unwrap().coeff(k - 1).clone()
            }
        });
        assert_eq!(got, gm2);
        assert_eq!(
            compose_outer(&s(&[0, 1]), &m, 0),
            Err(SeriesError::InsufficientOrder { needed: 3, available: 1 })
        );
        assert_eq!(compose_outer(&t, &m, 3), Err(SeriesError::BadExponent(3)));
    }

    #[test]
    fn outer_extraction_inverts_composition() {
        let m = s(&[1, 2, 10, 70, 588]);
        let c = s(&[3, 1, 4, 1, 5]);
        for a in 0..=2 {
            let sa = compose_outer(&c, &m, a).unwrap();
            assert_eq!(extract_outer_coefficients(&sa, &m, a).unwrap(), c);
        }
    }
}
