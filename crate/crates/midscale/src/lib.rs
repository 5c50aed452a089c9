//! Exact moments of the symmetric matrix-variate t distribution, G-transform
//! evaluators for normalized Wishart and GOE matrices, and Monte-Carlo
//! estimators for their distances at middle scales.

pub mod error;
pub mod gtransform;
pub mod partitions;
pub mod symmat;
pub mod tmoments;

pub use error::{Error, Result};
