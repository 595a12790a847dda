//! Exact minimal model program on toric fans and rational surfaces.

pub mod arith;
pub mod error;
pub mod mmp;
pub mod sections;
pub mod singularities;
pub mod surface;
pub mod toric;

pub use error::{Error, Result};
