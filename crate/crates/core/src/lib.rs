//! Exact symbolic and numeric workbench for superintegrable geodesic flows
//! on surfaces of revolution with integrals of arbitrary degree.
#![allow(clippy::result_large_err)]

pub mod appendix;
pub mod bracket;
pub mod geodesic;
pub mod global;
pub mod model;
pub mod numeric;
pub mod phase;
pub mod poly;
pub mod radical;
pub mod ratfunc;
pub mod sweep;
pub mod symmetric;

/// Exact rational scalar used throughout the exact layer.
pub type Rational = num_rational::BigRational;
