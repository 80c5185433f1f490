//! Round-indexed noise: a reflecting random walk `s_i` on `[s_lo, s_hi]`
//! (or a constant level) and the map from `s` to scaled error rates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sim::NoiseModel;

/// Range of `s` accepted by [`scale_model`].
pub const S_RANGE: (f64, f64) = (0.8, 1.0);

/// Calibrated default base model (see `calibrate`), shipped with the crate.
pub const DEFAULT_BASE_MODEL_JSON: &str = include_str!("../data/noise/calibrated_base.json");

/// Gain used with [`DEFAULT_BASE_MODEL_JSON`] by the built-in experiment.
pub const DEFAULT_EXPERIMENT_GAIN: f64 = 4.0;

pub fn default_base_model() -> NoiseModel {
    serde_json::from_str(DEFAULT_BASE_MODEL_JSON).expect("shipped noise model parses")
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("scale s = {0} outside [{lo}, {hi}]", lo = S_RANGE.0, hi = S_RANGE.1)]
    ScaleOutOfRange(f64),
    #[error("invalid noise schedule: {0}")]
    BadSchedule(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    RandomWalk,
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSchedule {
    pub kind: ScheduleKind,
    #[serde(default = "default_s_lo")]
    pub s_lo: f64,
    #[serde(default = "default_s_hi")]
    pub s_hi: f64,
    /// Rounds per walk step.
    #[serde(default = "default_step_period")]
    pub step_period: u64,
    #[serde(default = "default_step_size")]
    pub step_size: f64,
    #[serde(default = "default_constant_level")]
    pub constant_level: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_s_lo() -> f64 {
    0.8
}
fn default_s_hi() -> f64 {
    1.0
}
fn default_step_period() -> u64 {
    1000
}
fn default_step_size() -> f64 {
    0.01
}
fn default_constant_level() -> f64 {
    0.9
}

impl NoiseSchedule {
    pub fn random_walk(seed: u64) -> Self {
        Self {
            kind: ScheduleKind::RandomWalk,
            s_lo: default_s_lo(),
            s_hi: default_s_hi(),
            step_period: default_step_period(),
            step_size: default_step_size(),
            constant_level: default_constant_level(),
            seed,
        }
    }

    pub fn constant(level: f64) -> Self {
        Self {
            kind: ScheduleKind::Constant,
            constant_level: level,
            ..Self::random_walk(0)
        }
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        let bad = |m: String| Err(NoiseError::BadSchedule(m));
        if !(self.s_lo <= self.s_hi) || !self.s_lo.is_finite() || !self.s_hi.is_finite() {
            return bad(format!("bounds [{}, {}] are not ordered", self.s_lo, self.s_hi));
        }
        if self.step_period == 0 {
            return bad("step_period must be positive".into());
        }
        if !(self.step_size >= 0.0 && self.step_size <= self.s_hi - self.s_lo) {
            return bad(format!("step_size {} must lie in [0, s_hi − s_lo]", self.step_size));
        }
        if self.kind == ScheduleKind::Constant && !(self.s_lo..=self.s_hi).contains(&self.constant_level) {
            return bad(format!("constant_level {} outside the bounds", self.constant_level));
        }
        Ok(())
    }

    fn midpoint(&self) -> f64 {
        0.5 * (self.s_lo + self.s_hi)
    }

    /// The walk's first `steps` positions, starting at the midpoint.
    pub fn walk(&self, steps: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut s = self.midpoint();
        let mut out = Vec::with_capacity(steps);
        for i in 0..steps {
            if i > 0 {
                s += if rng.random::<bool>() { self.step_size } else { -self.step_size };
                if s > self.s_hi {
                    s = 2.0 * self.s_hi - s;
                } else if s < self.s_lo {
                    s = 2.0 * self.s_lo - s;
                }
                s = s.clamp(self.s_lo, self.s_hi);
            }
            out.push(s);
        }
        out
    }

    /// `s_i`; a pure function of the schedule and `i`.
    pub fn s_at_round(&self, i: u64) -> f64 {
        match self.kind {
            ScheduleKind::Constant => self.constant_level,
            ScheduleKind::RandomWalk => {
                let step = (i / self.step_period) as usize;
                self.walk(step + 1)[step]
            }
        }
    }

    /// `s_i` for `i` in `start..start + len`, computing the walk once.
    pub fn series(&self, start: u64, len: usize) -> Vec<f64> {
        match self.kind {
            ScheduleKind::Constant => vec![self.constant_level; len],
            ScheduleKind::RandomWalk => {
                if len == 0 {
                    return Vec::new();
                }
                let last = ((start + len as u64 - 1) / self.step_period) as usize;
                let walk = self.walk(last + 1);
                (start..start + len as u64)
                    .map(|i| walk[(i / self.step_period) as usize])
                    .collect()
            }
        }
    }
}

/// A base model scaled by `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledModel {
    pub base: NoiseModel,
    pub s: f64,
    pub effective: NoiseModel,
}

/// Multiplies every rate by `1 + gain·(1 − s)`, clamped to `[0, 1]`.
/// With `gain = 1` this is `2 − s`: `s = 1` keeps the base rates, `s = 0.8` gives 1.2×.
pub fn scale_model_with_gain(base: &NoiseModel, s: f64, gain: f64) -> Result<ScaledModel, NoiseError> {
    if !(S_RANGE.0 - 1e-12..=S_RANGE.1 + 1e-12).contains(&s) {
        return Err(NoiseError::ScaleOutOfRange(s));
    }
    Ok(ScaledModel {
        base: *base,
        s,
        effective: base.scaled(1.0 + gain * (1.0 - s)),
    })
}

pub fn scale_model(base: &NoiseModel, s: f64) -> Result<ScaledModel, NoiseError> {
    scale_model_with_gain(base, s, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_schedule() {
        let s = NoiseSchedule::constant(0.9);
        assert!([0, 1, 999, 1000, 123_456].iter().all(|&i| s.s_at_round(i) == 0.9));
    }

    #[test]
    fn walk_is_blockwise_and_bounded() {
        let s = NoiseSchedule::random_walk(42);
        assert_eq!(s.s_at_round(0), 0.9);
        assert_eq!(s.s_at_round(1000), s.s_at_round(1999));
        let series = s.series(0, 100_000);
        assert!(series.iter().all(|&v| (0.8..=1.0).contains(&v)));
        for (i, v) in series.iter().enumerate().step_by(997) {
            assert_eq!(*v, s.s_at_round(i as u64));
        }
        let steps = s.walk(1_000_000);
        assert!(steps.iter().all(|&v| (0.8..=1.0).contains(&v)));
        assert!(steps.windows(2).all(|w| ((w[1] - w[0]).abs() - 0.01).abs() < 1e-9));
    }

    #[test]
    fn equal_seeds_equal_walks() {
        assert_eq!(NoiseSchedule::random_walk(5).walk(5000), NoiseSchedule::random_walk(5).walk(5000));
        assert_ne!(NoiseSchedule::random_walk(5).walk(5000), NoiseSchedule::random_walk(6).walk(5000));
    }

    #[test]
    fn scaling_examples() {
        let base = NoiseModel {
            single_qubit_depolarizing: 0.05,
            two_qubit_depolarizing: 0.9,
            readout_flip: 0.01,
            state_prep_flip: 0.0,
        };
        assert_eq!(scale_model(&base, 1.0).unwrap().effective, base);
        let m = scale_model(&base, 0.8).unwrap().effective;
        assert!((m.single_qubit_depolarizing - 0.06).abs() < 1e-15);
        let m = scale_model(&base, 0.9).unwrap().effective;
        assert!((m.two_qubit_depolarizing - 0.99).abs() < 1e-15);
        let m = scale_model_with_gain(&base, 0.8, 10.0).unwrap().effective;
        assert_eq!(m.two_qubit_depolarizing, 1.0);
        assert!(scale_model(&base, 0.7).is_err());
    }

    #[test]
    fn schedule_json_defaults() {
        let s: NoiseSchedule = serde_json::from_str(r#"{"kind":"random-walk","seed":3}"#).unwrap();
        assert_eq!(s, NoiseSchedule::random_walk(3));
        assert!(s.validate().is_ok());
        let bad: NoiseSchedule = serde_json::from_str(r#"{"kind":"constant","constant_level":0.5}"#).unwrap();
        assert!(bad.validate().is_err());
    }

    #[test]
    fn shipped_model_is_valid() {
        default_base_model().validate().unwrap();
    }
}
