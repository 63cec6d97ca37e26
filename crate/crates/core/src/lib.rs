//! Circle-method machinery for sums of three squares with one small square.

pub mod arith;
pub mod circle;
pub mod density;
pub mod error;
pub mod expsum;
pub mod quad;
pub mod reps;
pub mod sphere;
pub mod survey;

pub use error::{Error, Result};
