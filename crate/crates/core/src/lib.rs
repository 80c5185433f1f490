//! Verification-based error mitigation for measurement-based computations.
//!
//! Blinded computation rounds are interleaved with trap-based test rounds
//! under time-varying noise. Low-noise stretches ("baskets") are selected
//! from the test failure rate, certified with a concentration bound and
//! combined by Bayesian updating into a decision with a confidence.

pub mod angle;
pub mod cli;
pub mod calibrate;
pub mod estimate;
pub mod io;
pub mod mitigate;
pub mod noise;
mod error;
pub mod pattern;
pub mod report;
pub mod rounds;
pub mod sim;

pub use error::Error;
