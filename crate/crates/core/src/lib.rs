//! Chernoff-exponent design of correlation and correlation+energy detectors
//! for known signals in non-Gaussian white noise.

pub mod error;
pub mod exponents;
pub mod joint_design;
pub mod lp;
pub mod noise;
pub mod optim;
pub mod optimal_correlator;
pub mod quad;
pub mod serde_f64;
pub mod simulate;
pub mod specfun;

pub use error::{Error, Result};
