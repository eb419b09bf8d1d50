//! Orthogonal polynomials on the unit circle and sparse exponential systems.

pub mod beta;
pub mod complex;
pub mod document;
pub mod error;
pub mod experiments;
pub mod exponent;
pub mod markoff;
pub mod measure;
pub mod precision;
pub mod szego;

pub use complex::{Complex, DEFAULT_PRECISION};
pub use error::{OpucError, Result};
