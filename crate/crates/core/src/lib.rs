//! Exact series, enumeration oracles, critical points, exponent estimation and
//! distance profiles for planar maps with a weight per block.

pub mod criticality;
pub mod lab;
pub mod models;
pub mod pipeline;
pub mod profile;
pub mod quadrature;
pub mod ring;
pub mod series;
pub mod substitution;

pub use ring::{CoefficientRing, IntPoly, IntPoly2, Poly, Ring};
pub use series::{SeriesError, TruncatedSeries};
pub use rug;
