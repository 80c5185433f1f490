//! Round order and group partition.

use std::ops::Range;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::MitigateError;
use crate::noise::{scale_model_with_gain, NoiseSchedule};
use crate::rounds::{
    run_computation_round, run_test_round, ComputationRoundSpec, ExecOrder, RoundKind, RoundTranscript, TestRoundSpec,
    Verdict,
};
use crate::sim::NoiseModel;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub kinds: Vec<RoundKind>,
    pub groups: Vec<Range<usize>>,
}

impl Schedule {
    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn test_count(&self) -> usize {
        self.kinds.iter().filter(|&&k| k == RoundKind::Test).count()
    }
}

/// `g` contiguous groups of `total / g` rounds, the remainder going to the last.
pub fn equal_groups(total: usize, g: usize) -> Vec<Range<usize>> {
    let size = total / g.max(1);
    (0..g)
        .map(|j| j * size..if j + 1 == g { total } else { (j + 1) * size })
        .collect()
}

/// `round(τN′)` tests and the rest computations in uniformly random order.
pub fn make_schedule<R: Rng + ?Sized>(
    total: usize,
    tau: f64,
    groups: usize,
    min_group: usize,
    rng: &mut R,
) -> Result<Schedule, MitigateError> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(MitigateError::Config(format!("tau = {tau} must lie in (0, 1)")));
    }
    if groups == 0 {
        return Err(MitigateError::Config("at least one group is required".into()));
    }
    if total < groups.saturating_mul(min_group) || total == 0 {
        return Err(MitigateError::Config(format!(
            "{total} rounds cannot hold {groups} groups of at least {min_group}"
        )));
    }
    let tests = (tau * total as f64).round() as usize;
    let mut kinds = vec![RoundKind::Test; tests];
    kinds.resize(total, RoundKind::Computation);
    kinds.shuffle(rng);
    Ok(Schedule {
        kinds,
        groups: equal_groups(total, groups),
    })
}

/// What every round of a run needs.
#[derive(Debug, Clone)]
pub struct RunSetup<'a> {
    pub computation: ComputationRoundSpec<'a>,
    pub test: TestRoundSpec<'a>,
    pub base: NoiseModel,
    pub gain: f64,
    pub noise: NoiseSchedule,
    pub master_seed: u64,
    pub order: ExecOrder,
}

/// RNG of the round with global index `i`: ChaCha8 keyed by the master seed, stream `i`.
pub fn round_rng(master_seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(i);
    rng
}

/// Runs every round in parallel. Round `i` uses global index `offset + i`
/// for its noise level and RNG stream.
pub fn run_schedule(schedule: &Schedule, setup: &RunSetup<'_>, offset: u64) -> Result<Vec<RoundTranscript>, MitigateError> {
    setup.noise.validate()?;
    let levels = setup.noise.series(offset, schedule.len());
    let models = levels
        .iter()
        .map(|&s| scale_model_with_gain(&setup.base, s, setup.gain).map(|m| m.effective))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(schedule
        .kinds
        .par_iter()
        .enumerate()
        .map(|(i, &kind)| {
            let index = offset + i as u64;
            let mut rng = round_rng(setup.master_seed, index);
            let res = match kind {
                RoundKind::Test => run_test_round(&setup.test, &models[i], index, setup.order, &mut rng),
                RoundKind::Computation => {
                    run_computation_round(&setup.computation, &models[i], index, setup.order, &mut rng)
                }
            };
            res.unwrap_or_else(|_| failed_round(index, kind))
        })
        .collect())
}

fn failed_round(round_index: u64, kind: RoundKind) -> RoundTranscript {
    RoundTranscript {
        round_index,
        kind,
        colour: None,
        theta: Vec::new(),
        r: Vec::new(),
        d: Vec::new(),
        delta: Vec::new(),
        b: Vec::new(),
        verdict: match kind {
            RoundKind::Test => Verdict::Fail,
            RoundKind::Computation => Verdict::Discarded,
        },
    }
}
