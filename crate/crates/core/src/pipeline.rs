//! Routes from a model and a count source to exact series and to the numeric
//! sequences fed to the exponent lab.

use crate::lab::{
    fl, growth_rate_estimate, ucrit_extrapolate, ucrit_theta, LabError, SequenceWindow, UcritEstimate, LAB_PREC,
};
use crate::models::{
    brute_force_counts, closed_form_m1, meander_component_counts, open_path_point_series, CoefficientTable,
    CountSource, Family, ModelError, ModelSpec,
};
use crate::ring::{IntPoly, IntPoly2, Poly, Ring};
use crate::series::{SeriesError, TruncatedSeries};
use crate::substitution::{
    compose_outer, correlator_from_blocks, extract_block_coefficients, extract_outer_coefficients, lift,
    weighted_map_series,
};
use rug::{Float, Integer};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("{0}")]
    Unsupported(String),
}

/// M_1 through `order` for a single-variable family.
///
/// The open-path family shares its maps with the cubic one. `table` is only
/// read for `CountSource::ExternalFile`.
pub fn m1_series(
    spec: ModelSpec,
    order: usize,
    table: Option<&CoefficientTable>,
) -> Result<TruncatedSeries<Integer>, PipelineError> {
    let family = match spec.family {
        Family::OpenPath => Family::Cubic,
        Family::MeanderQ => {
            return Err(PipelineError::Unsupported("meander-q has a q-resolved series; use m1_series_q".into()))
        }
        f => f,
    };
    let coeffs = match spec.count_source {
        CountSource::ClosedForm => return Ok(closed_form_m1(family, order)?),
        CountSource::BruteForce => brute_force_counts(family, order)?,
        CountSource::ExternalFile => {
            let table = table.ok_or_else(|| {
                PipelineError::Unsupported(format!("{} needs a coefficient file for this source", spec.family))
            })?;
            let totals = table.totals();
            if totals.len() <= order {
                return Err(ModelError::CapExceeded { n: order, cap: table.max_n() }.into());
            }
            totals[..=order].to_vec()
        }
    };
    Ok(TruncatedSeries::from_coeffs(coeffs))
}

/// M_1(g; q) for meandric systems, from brute force or a component-resolved table.
pub fn m1_series_q(order: usize, table: Option<&CoefficientTable>) -> Result<TruncatedSeries<IntPoly>, PipelineError> {
    let rows = match table {
        None => meander_component_counts(order)?,
        Some(CoefficientTable::Resolved(rows)) if rows.len() > order => rows[..=order].to_vec(),
        Some(CoefficientTable::Resolved(rows)) => {
            return Err(ModelError::CapExceeded { n: order, cap: rows.len() - 1 }.into())
        }
        Some(CoefficientTable::Plain(_)) => {
            return Err(PipelineError::Unsupported("meander-q needs records `n k value`".into()))
        }
    };
    Ok(TruncatedSeries::from_coeffs(rows.into_iter().map(Poly::new).collect()))
}

/// Exact series attached to a family: blocks, M_u and the correlators.
#[derive(Clone, Debug)]
pub struct ModelSeries<R: Ring> {
    pub m1: TruncatedSeries<R>,
    pub blocks: TruncatedSeries<R>,
    pub m_u: TruncatedSeries<Poly<R>>,
}

impl<R: Ring> ModelSeries<R> {
    pub fn from_m1(m1: TruncatedSeries<R>) -> Result<Self, PipelineError> {
        let blocks = extract_block_coefficients(&m1)?;
        let m_u = weighted_map_series(&blocks);
        Ok(ModelSeries { m1, blocks, m_u })
    }

    pub fn order(&self) -> usize {
        self.m1.order()
    }

    /// c_j = (2j - 1) b_j.
    pub fn correlator(&self) -> TruncatedSeries<R> {
        correlator_from_blocks(&self.blocks)
    }

    /// Two-point function s_n^{(u)}: S_u = C(g M_u^2).
    pub fn two_point(&self) -> Result<TruncatedSeries<Poly<R>>, PipelineError> {
        Ok(compose_outer(&lift(&self.correlator()), &self.m_u, 0)?)
    }
}

impl ModelSeries<Integer> {
    pub fn build(spec: ModelSpec, order: usize, table: Option<&CoefficientTable>) -> Result<Self, PipelineError> {
        ModelSeries::from_m1(m1_series(spec, order, table)?)
    }

    /// Irreducible open configurations C̃(t), from 4^n Cat(n) = M_1 C̃(g M_1^2).
    pub fn open_correlator(&self) -> Result<TruncatedSeries<Integer>, PipelineError> {
        let s = open_path_point_series(self.order());
        Ok(extract_outer_coefficients(&s, &self.m1, 1)?)
    }

    /// Open-path correlator ς_n^{(u)}: M_u C̃(g M_u^2).
    pub fn open_path(&self) -> Result<TruncatedSeries<IntPoly>, PipelineError> {
        Ok(compose_outer(&lift(&self.open_correlator()?), &self.m_u, 1)?)
    }
}

/// Which coefficient sequence of a family to study.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Observable {
    /// m_n^{(u)}
    Maps,
    /// s_n^{(u)}
    TwoPoint,
    /// ς_n^{(u)}
    OpenPath,
}

impl Observable {
    pub fn default_for(family: Family) -> Self {
        if family == Family::OpenPath {
            Observable::OpenPath
        } else {
            Observable::Maps
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Observable::Maps => "maps",
            Observable::TwoPoint => "two-point",
            Observable::OpenPath => "open-path",
        }
    }
}

/// Evaluates every polynomial coefficient at u in 256-bit floats.
pub fn eval_at(series: &TruncatedSeries<IntPoly>, u: &Float) -> Vec<Float> {
    series.coeffs().iter().map(|p| eval_poly(p, u)).collect()
}

fn eval_poly(p: &IntPoly, x: &Float) -> Float {
    let mut acc = Float::new(LAB_PREC);
    for c in p.coeffs().iter().rev() {
        acc *= x;
        acc += c;
    }
    acc
}

/// Evaluates q first, then u.
pub fn eval_at_q(series: &TruncatedSeries<IntPoly2>, u: &Float, q: &Float) -> Vec<Float> {
    series
        .coeffs()
        .iter()
        .map(|p| {
            let mut acc = Float::new(LAB_PREC);
            for c in p.coeffs().iter().rev() {
                acc *= u;
                acc += eval_poly(c, q);
            }
            acc
        })
        .collect()
}

/// Σ_k m_{n,k} q^k for each n.
pub fn m1_at_q(m1: &TruncatedSeries<IntPoly>, q: &Float) -> Vec<Float> {
    m1.coeffs().iter().map(|p| eval_poly(p, q)).collect()
}

/// The sequence behind an (N,p)-estimate for a single-variable family at weight u.
pub fn observable_at(
    series: &ModelSeries<Integer>,
    observable: Observable,
    u: &Float,
) -> Result<Vec<Float>, PipelineError> {
    let s = match observable {
        Observable::Maps => series.m_u.clone(),
        Observable::TwoPoint => series.two_point()?,
        Observable::OpenPath => series.open_path()?,
    };
    Ok(eval_at(&s, u))
}

pub fn to_floats(values: &[Integer]) -> Vec<Float> {
    values.iter().map(fl).collect()
}

/// u_cr from u = 1 counts alone: g1 from the ratios, θ from the exponent of m_n.
#[derive(Clone, Debug)]
pub struct UcritFromCounts {
    pub g1: f64,
    pub theta: f64,
    pub ucrit: UcritEstimate,
}

/// θ is the estimated δ - 2 snapped to the nearest multiple of 1/2 (it enters
/// only as the spacing of the correction ladder).
pub fn ucrit_from_counts(m1: &[Float], p: usize) -> Result<UcritFromCounts, LabError> {
    let window = SequenceWindow::new(m1.to_vec(), "m_n at u = 1")?;
    let g1 = growth_rate_estimate(&window, p)?;
    let theta = ((ucrit_theta(m1)? * 2.0).round() / 2.0).max(0.5);
    let ucrit = ucrit_extrapolate(m1, &fl(g1), theta, p)?;
    Ok(UcritFromCounts { g1, theta, ucrit })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quad_two_point_first_terms() {
        let s = ModelSeries::build(ModelSpec::default_for(Family::Quad), 6, None).unwrap();
        let sp = s.two_point().unwrap();
        assert_eq!(sp.coeff(1), &IntPoly::from_i64s(&[2]));
        assert!(sp.coeff(3).degree() <= Some(2));
    }

    #[test]
    fn open_path_at_one_is_the_point_series() {
        let s = ModelSeries::build(ModelSpec::default_for(Family::OpenPath), 8, None).unwrap();
        let at_one: Vec<Integer> = s.open_path().unwrap().coeffs().iter().map(|p| p.coeff_sum()).collect();
        assert_eq!(at_one, open_path_point_series(8).coeffs());
        let ct = s.open_correlator().unwrap();
        assert_eq!(ct.coeff(0), &Integer::from(1));
        assert!(ct.coeffs().iter().all(|c| *c >= 0));
    }

    #[test]
    fn sources_agree_for_cubic() {
        let closed = m1_series(ModelSpec::default_for(Family::Cubic), 7, None).unwrap();
        let bf = m1_series(ModelSpec { family: Family::Cubic, count_source: CountSource::BruteForce }, 7, None).unwrap();
        assert_eq!(closed, bf);
        let ext = ModelSpec { family: Family::Bicubic, count_source: CountSource::ExternalFile };
        assert!(matches!(m1_series(ext, 5, None), Err(PipelineError::Unsupported(_))));
    }

    #[test]
    fn ucrit_from_closed_form_counts() {
        let quad = to_floats(closed_form_m1(Family::Quad, 50).unwrap().coeffs());
        let r = ucrit_from_counts(&quad, 5).unwrap();
        assert!((r.g1 - 1.0 / 12.0).abs() < 1e-9 && r.theta == 0.5);
        assert!((r.ucrit.estimate - 1.8).abs() < 1e-4, "{}", r.ucrit.estimate);
        let cubic = to_floats(closed_form_m1(Family::Cubic, 34).unwrap().coeffs());
        let r = ucrit_from_counts(&cubic, 5).unwrap();
        assert!(r.theta == 1.0);
        assert!((r.ucrit.estimate - 3.0221669520088748).abs() < 1e-6, "{}", r.ucrit.estimate);
    }

    #[test]
    fn meander_q_series_at_q_one() {
        let m = m1_series_q(5, None).unwrap();
        let one = fl(1);
        let tot = m1_at_q(&m, &one);
        let plain = m1_series(ModelSpec::default_for(Family::Meander), 5, None).unwrap();
        for (a, b) in tot.iter().zip(plain.coeffs()) {
            assert_eq!(a, b);
        }
    }
}
