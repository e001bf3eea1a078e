//! Map families, closed-form counts and the brute-force oracle layer.

pub mod arch;
pub mod enumerate;
pub mod external;

use crate::series::TruncatedSeries;
use rug::ops::Pow;
use rug::Integer;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

pub use arch::{ArchSystem, BlockStructure, MeanderSystem, Side};
pub use enumerate::{
    brute_force_counts, brute_force_meander_q, brute_force_weighted_counts, enumerate_arch_systems,
    enumerate_meander_systems, meander_component_counts, noncrossing_matchings, ArchConstraints, ArchSystems, ARCH_CAP, MEANDER_CAP,
};
pub use external::{load_external_counts, parse_counts, validate_counts, CoefficientTable};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{family} has no closed form; use brute force or an external file")]
    NoClosedForm { family: Family },
    #[error("n = {n} exceeds the enumeration cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("{family} has no brute-force enumerator")]
    NoEnumerator { family: Family },
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("insufficient data")]
    InsufficientData,
    #[error("row n = {n}{k}: file has {found}, brute force gives {expected}", k = .k.map(|k| format!(", k = {k}")).unwrap_or_default())]
    Mismatch { n: usize, k: Option<usize>, expected: Integer, found: Integer },
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// The map families of the toolkit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// Rooted quadrangulations, blocks are simple quadrangulations.
    Quad,
    /// Hamiltonian cycles on cubic maps, i.e. arch systems above and below a line.
    Cubic,
    /// Cubic maps with a Hamiltonian path (arches may wind around the end).
    OpenPath,
    /// Bicolored cubic maps with a Hamiltonian cycle.
    Bicubic,
    /// Meandric systems.
    Meander,
    /// Meandric systems with a weight per connected component.
    MeanderQ,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Quad,
        Family::Cubic,
        Family::OpenPath,
        Family::Bicubic,
        Family::Meander,
        Family::MeanderQ,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Quad => "quad",
            Family::Cubic => "cubic",
            Family::OpenPath => "open-path",
            Family::Bicubic => "bicubic",
            Family::Meander => "meander",
            Family::MeanderQ => "meander-q",
        }
    }

    pub fn has_closed_form(self) -> bool {
        self != Family::Bicubic
    }

    /// Largest n accepted by the brute-force enumerators.
    pub fn enumeration_cap(self) -> Option<usize> {
        match self {
            Family::Quad => None,
            Family::Cubic | Family::OpenPath | Family::Bicubic => Some(12),
            Family::Meander | Family::MeanderQ => Some(10),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown model '{s}'"))
    }
}

/// Where the u = 1 counts come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CountSource {
    ClosedForm,
    BruteForce,
    ExternalFile,
}

impl CountSource {
    pub fn tag(self) -> &'static str {
        match self {
            CountSource::ClosedForm => "closed-form",
            CountSource::BruteForce => "brute-force",
            CountSource::ExternalFile => "external-file",
        }
    }
}

impl fmt::Display for CountSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModelSpec {
    pub family: Family,
    pub count_source: CountSource,
}

impl ModelSpec {
    /// Closed form where available, brute force otherwise.
    pub fn default_for(family: Family) -> Self {
        let count_source = if family.has_closed_form() && family != Family::MeanderQ {
            CountSource::ClosedForm
        } else {
            CountSource::BruteForce
        };
        ModelSpec { family, count_source }
    }

    /// Default truncation order: 50 for closed forms, 30 otherwise (capped by enumeration).
    pub fn default_order(&self) -> usize {
        match self.count_source {
            CountSource::ClosedForm => 50,
            CountSource::BruteForce => self.family.enumeration_cap().unwrap_or(30).min(30),
            CountSource::ExternalFile => 30,
        }
    }
}

pub fn catalan(n: usize) -> Integer {
    let n = n as u32;
    Integer::from(Integer::binomial_u(2 * n, n)) / (n + 1)
}

/// m_n^{(1)} for the families with a product formula.
pub fn closed_form_count(family: Family, n: usize) -> Result<Integer, ModelError> {
    if n == 0 {
        return match family {
            Family::Bicubic => Err(ModelError::NoClosedForm { family }),
            _ => Ok(Integer::from(1)),
        };
    }
    Ok(match family {
        Family::Quad => Integer::from(2) * Integer::from(3).pow(n as u32) * catalan(n) / (n as u32 + 2),
        Family::Cubic => catalan(n) * catalan(n + 1),
        Family::OpenPath => Integer::from(4).pow(n as u32) * catalan(n),
        Family::Meander | Family::MeanderQ => catalan(n).square(),
        Family::Bicubic => return Err(ModelError::NoClosedForm { family }),
    })
}

/// The u = 1 map series M_1 through `order` from the closed form.
///
/// For the open-path family this is the cubic M_1 (the maps are the same,
/// only the marked correlator differs).
pub fn closed_form_m1(family: Family, order: usize) -> Result<TruncatedSeries<Integer>, ModelError> {
    let family = if family == Family::OpenPath { Family::Cubic } else { family };
    let coeffs = (0..=order).map(|n| closed_form_count(family, n)).collect::<Result<Vec<_>, _>>()?;
    Ok(TruncatedSeries::from_coeffs(coeffs))
}

/// The open-path point series 4^n Cat(n).
pub fn open_path_point_series(order: usize) -> TruncatedSeries<Integer> {
    TruncatedSeries::from_fn(order, |n| Integer::from(4).pow(n as u32) * catalan(n))
}
