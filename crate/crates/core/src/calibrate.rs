//! Fits the overall scale of a base noise model to a target test-failure rate.

use serde::{Deserialize, Serialize};

use crate::mitigate::{run_schedule, MitigateError, RunSetup, Schedule};
use crate::noise::NoiseSchedule;
use crate::rounds::RoundKind;
use crate::sim::NoiseModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    /// Factor applied to the shape model.
    pub factor: f64,
    pub model: NoiseModel,
    pub target: f64,
    /// Failure rate of `model` at the calibration level.
    pub measured: f64,
    pub level: f64,
    pub gain: f64,
    pub rounds: usize,
}

/// Mean failure rate of `rounds` test rounds at constant level `level`.
pub fn test_failure_rate(setup: &RunSetup<'_>, level: f64, rounds: usize) -> Result<f64, MitigateError> {
    let schedule = Schedule {
        kinds: vec![RoundKind::Test; rounds],
        groups: vec![0..rounds],
    };
    let setup = RunSetup {
        noise: NoiseSchedule::constant(level),
        ..setup.clone()
    };
    let out = run_schedule(&schedule, &setup, 0)?;
    Ok(out.iter().filter(|t| t.is_test_failure()).count() as f64 / rounds.max(1) as f64)
}

/// Bisects on the factor multiplying `shape` (passed as `setup.base`) until the
/// failure rate at `level` matches `target`. Every evaluation reuses the same
/// round seeds, which keeps the rate monotone in the factor.
pub fn calibrate(
    setup: &RunSetup<'_>,
    target: f64,
    level: f64,
    rounds: usize,
    iterations: usize,
) -> Result<Calibration, MitigateError> {
    if !(target > 0.0 && target < 0.5) {
        return Err(MitigateError::Config(format!("target {target} must lie in (0, 1/2)")));
    }
    let shape = setup.base;
    let peak = shape.named().iter().map(|&(_, p)| p).fold(0.0, f64::max);
    if peak <= 0.0 {
        return Err(MitigateError::Config("shape model is noiseless".into()));
    }
    let rate = |factor: f64| {
        let s = RunSetup {
            base: shape.scaled(factor),
            ..setup.clone()
        };
        test_failure_rate(&s, level, rounds)
    };
    let (mut lo, mut hi) = (0.0, 1.0 / peak);
    if rate(hi)? < target {
        return Err(MitigateError::Config(format!("target {target} is out of reach of this shape")));
    }
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        if rate(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let factor = 0.5 * (lo + hi);
    let model = shape.scaled(factor);
    Ok(Calibration {
        factor,
        model,
        target,
        measured: rate(factor)?,
        level,
        gain: setup.gain,
        rounds,
    })
}
