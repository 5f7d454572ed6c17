//! Numerical laboratory for sampling numbers, entropy numbers and widths of
//! discretized function classes under the uniform norm.

pub mod classes;
pub mod config;
pub mod entropy;
pub mod error;
pub mod geometry;
pub mod lp;
pub mod recovery;
pub mod report;
pub mod theorem;
pub mod widths;

pub use error::{Error, Result};
