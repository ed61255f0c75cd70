//! Scaling-covariant maps from the p-adic numbers into the complex plane,
//! their pushforward measures, and Haar-measure quadrature with certified
//! truncation errors.

pub mod disk;
pub mod error;
pub mod integrate;
pub mod maps;
pub mod measures;
pub mod padic;
pub mod profiles;

pub use error::{Error, Result};
