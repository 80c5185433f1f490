//! Basketing: schedules, execution, rolling failure rates, basket
//! certification and Bayesian combination into a final verdict.

mod basket;
mod bayes;
mod protocol;
pub mod schedule;
pub mod stats;

use thiserror::Error;

use crate::noise::NoiseError;

pub use basket::{
    basket_certify, basket_vote, evaluate_basket, Basket, BasketStatus, Certificate, CertifyDiscard, VoteDiscard,
};
pub use bayes::{BayesError, Posterior};
pub use protocol::{
    analyse_repetition, drive_protocol, plan, AbortCause, Plan, ProtocolOutcome, ProtocolParams, ProtocolStatus,
    RepetitionReport, ReplaySource, RoundSource, SimulationSource,
};
pub use schedule::{equal_groups, make_schedule, round_rng, run_schedule, RunSetup, Schedule};
pub use protocol::{schedule_rng, BayesStep};
pub use stats::{find_baskets, rolling_failure_rate, test_outcomes, RollingStats};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MitigateError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Bayes(#[from] BayesError),
}
