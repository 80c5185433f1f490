//! The protocol driver: plan, schedule, run, basket, certify, combine.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::basket::{evaluate_basket, Basket};
use super::bayes::Posterior;
use super::schedule::{equal_groups, make_schedule, run_schedule, RunSetup};
use super::stats::{find_baskets, rolling_failure_rate, test_outcomes, RollingStats};
use super::MitigateError;
use crate::estimate::{
    minimize_eps_given_n, minimize_n_given_eps, AbortReason, BoundInputs, Estimate, EstimationResult,
    DEFAULT_N_CEILING,
};
use crate::rounds::{RoundKind, RoundTranscript};

fn default_eps_target() -> f64 {
    0.05
}
fn default_window() -> usize {
    1000
}
fn default_p_tilde() -> f64 {
    0.15
}
fn default_groups() -> usize {
    1
}
fn default_repetition_cap() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolParams {
    #[serde(default = "default_eps_target")]
    pub eps_target: f64,
    /// Basket scale `N`; estimated from `eps_target` when absent.
    #[serde(default)]
    pub n: Option<u64>,
    /// Rounds per repetition, `N′`.
    pub n_prime: usize,
    #[serde(default)]
    pub tau: Option<f64>,
    /// Rolling window `T`.
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default = "default_p_tilde")]
    pub p_tilde: f64,
    #[serde(default = "default_groups")]
    pub groups: usize,
    /// Inherent error of the computation used for certification.
    #[serde(default)]
    pub p: f64,
    #[serde(default = "default_repetition_cap")]
    pub repetition_cap: usize,
}

impl ProtocolParams {
    pub fn new(n_prime: usize) -> Self {
        Self {
            eps_target: default_eps_target(),
            n: None,
            n_prime,
            tau: None,
            window: default_window(),
            p_tilde: default_p_tilde(),
            groups: default_groups(),
            p: 0.0,
            repetition_cap: default_repetition_cap(),
        }
    }

    pub fn validate(&self) -> Result<(), MitigateError> {
        let bad = |m: String| Err(MitigateError::Config(m));
        if !(self.eps_target > 0.0 && self.eps_target < 0.5) {
            return bad(format!("eps_target = {} must lie in (0, 1/2)", self.eps_target));
        }
        if let Some(t) = self.tau {
            if !(t > 0.0 && t < 1.0) {
                return bad(format!("tau = {t} must lie in (0, 1)"));
            }
        }
        if self.n == Some(0) {
            return bad("n must be positive".into());
        }
        if self.window < 2 {
            return bad("window must be at least 2".into());
        }
        if !(self.p_tilde > 0.0 && self.p_tilde < 1.0) {
            return bad(format!("p_tilde = {} must lie in (0, 1)", self.p_tilde));
        }
        if self.groups == 0 || self.repetition_cap == 0 {
            return bad("groups and repetition_cap must be at least 1".into());
        }
        Ok(())
    }
}

/// Step 1 result: `N`, `τ` and the estimate they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub n: u64,
    pub tau: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<Estimate>,
}

/// Picks `N` and `τ` with `p_max = p̃`. An explicit `N` is kept even if its
/// bound misses `eps_target`; only input errors abort then.
pub fn plan(params: &ProtocolParams, k: usize) -> Result<Plan, AbortReason> {
    let inputs = BoundInputs::new(k, params.p, params.p_tilde, params.tau);
    let res = match params.n {
        Some(n) => minimize_eps_given_n(&inputs, n),
        None => minimize_n_given_eps(&inputs, params.eps_target, DEFAULT_N_CEILING),
    };
    match (res, params.n) {
        (EstimationResult::Done(e), n) => Ok(Plan {
            n: n.unwrap_or(e.n),
            tau: e.tau,
            estimate: Some(e),
        }),
        (
            EstimationResult::Abort {
                reason: AbortReason::NotBelowHalf,
                best: Some(e),
            },
            Some(n),
        ) => Ok(Plan {
            n,
            tau: e.tau,
            estimate: Some(e),
        }),
        (EstimationResult::Abort { reason, .. }, _) => Err(reason),
    }
}

/// Supplies the transcripts of repetition `rep`; `None` when no more rounds
/// may be spent.
pub trait RoundSource {
    fn repetition(
        &mut self,
        rep: usize,
        plan: &Plan,
        params: &ProtocolParams,
    ) -> Result<Option<Vec<RoundTranscript>>, MitigateError>;
}

/// Simulates each repetition with a fresh schedule. Repetition `rep` uses
/// global round indices `rep·N′ ..`.
pub struct SimulationSource<'a> {
    pub setup: RunSetup<'a>,
    /// Keep a copy of every repetition's transcripts in `produced`.
    pub keep: bool,
    pub produced: Vec<Vec<RoundTranscript>>,
}

impl<'a> SimulationSource<'a> {
    pub fn new(setup: RunSetup<'a>) -> Self {
        Self {
            setup,
            keep: false,
            produced: Vec::new(),
        }
    }

    pub fn keeping(mut self) -> Self {
        self.keep = true;
        self
    }
}

/// RNG for the round order of repetition `rep`. Round streams count up from
/// 0, so these count down from the top.
pub fn schedule_rng(master_seed: u64, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(u64::MAX - rep as u64);
    rng
}

impl RoundSource for SimulationSource<'_> {
    fn repetition(
        &mut self,
        rep: usize,
        plan: &Plan,
        params: &ProtocolParams,
    ) -> Result<Option<Vec<RoundTranscript>>, MitigateError> {
        let mut rng = schedule_rng(self.setup.master_seed, rep);
        let schedule = make_schedule(params.n_prime, plan.tau, params.groups, plan.n as usize, &mut rng)?;
        let out = run_schedule(&schedule, &self.setup, (rep * params.n_prime) as u64)?;
        if self.keep {
            self.produced.push(out.clone());
        }
        Ok(Some(out))
    }
}

/// Persisted transcripts, one list per repetition.
pub struct ReplaySource {
    reps: Vec<Vec<RoundTranscript>>,
}

impl ReplaySource {
    pub fn new(reps: Vec<Vec<RoundTranscript>>) -> Self {
        Self { reps }
    }

    /// Splits a flat stream into repetitions of `n_prime` rounds.
    pub fn from_stream(stream: Vec<RoundTranscript>, n_prime: usize) -> Self {
        let mut reps = Vec::new();
        let mut it = stream.into_iter().peekable();
        while it.peek().is_some() {
            reps.push(it.by_ref().take(n_prime.max(1)).collect());
        }
        Self { reps }
    }
}

impl RoundSource for ReplaySource {
    fn repetition(
        &mut self,
        rep: usize,
        _plan: &Plan,
        _params: &ProtocolParams,
    ) -> Result<Option<Vec<RoundTranscript>>, MitigateError> {
        Ok(self.reps.get_mut(rep).map(std::mem::take))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionReport {
    pub repetition: usize,
    pub rounds: usize,
    pub tests: usize,
    pub failures: usize,
    pub mean_failure_rate: f64,
    pub empty_windows: usize,
    pub baskets: Vec<Basket>,
}

/// Steps 5 to 7 on one repetition's transcripts.
pub fn analyse_repetition(
    transcripts: &[RoundTranscript],
    repetition: usize,
    params: &ProtocolParams,
    plan: &Plan,
    k: usize,
) -> (RepetitionReport, RollingStats) {
    let groups = equal_groups(transcripts.len(), params.groups);
    let outcomes = test_outcomes(transcripts);
    let stats = rolling_failure_rate(&outcomes, params.window, &groups);
    let baskets = find_baskets(&stats.phi, params.p_tilde, plan.n as usize, &groups)
        .into_iter()
        .map(|(g, range)| evaluate_basket(transcripts, repetition, g, range, params.p, params.p_tilde, k))
        .collect();
    let tests = transcripts.iter().filter(|t| t.kind == RoundKind::Test).count();
    let failures = outcomes.iter().filter(|o| **o == Some(true)).count();
    let report = RepetitionReport {
        repetition,
        rounds: transcripts.len(),
        tests,
        failures,
        mean_failure_rate: if tests == 0 { 0.0 } else { failures as f64 / tests as f64 },
        empty_windows: stats.empty_windows.len(),
        baskets,
    };
    (report, stats)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolStatus {
    True,
    False,
    Abort,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum AbortCause {
    /// No repetition produced a basket.
    NoBaskets { repetitions: usize },
    EstimationInfeasible { detail: AbortReason },
    /// Repetitions used up (or replayed transcripts exhausted) short of the target.
    RepetitionCap { repetitions: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesStep {
    pub repetition: usize,
    pub basket: usize,
    pub q: [f64; 2],
    pub posterior: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolOutcome {
    pub status: ProtocolStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abort: Option<AbortCause>,
    /// Posterior of the returned outcome; absent on abort.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
    pub posterior: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<Plan>,
    pub repetitions: Vec<RepetitionReport>,
    pub updates: Vec<BayesStep>,
}

impl ProtocolOutcome {
    fn abort(cause: AbortCause, posterior: &Posterior, plan: Option<Plan>, reps: Vec<RepetitionReport>, updates: Vec<BayesStep>) -> Self {
        Self {
            status: ProtocolStatus::Abort,
            abort: Some(cause),
            confidence: None,
            posterior: posterior.probabilities(),
            plan,
            repetitions: reps,
            updates,
        }
    }

    pub fn is_abort(&self) -> bool {
        self.status == ProtocolStatus::Abort
    }

    pub fn baskets(&self) -> impl Iterator<Item = &Basket> {
        self.repetitions.iter().flat_map(|r| r.baskets.iter())
    }
}

/// Runs the protocol. A repetition that runs out of baskets short of
/// `1 − eps_target`, including one with no baskets at all, is followed by a
/// fresh one; the posterior carries over.
pub fn drive_protocol<S: RoundSource + ?Sized>(
    params: &ProtocolParams,
    k: usize,
    source: &mut S,
) -> Result<ProtocolOutcome, MitigateError> {
    params.validate()?;
    let mut posterior = Posterior::uniform();
    let mut reports = Vec::new();
    let mut updates = Vec::new();
    let plan = match plan(params, k) {
        Ok(p) => p,
        Err(detail) => {
            return Ok(ProtocolOutcome::abort(
                AbortCause::EstimationInfeasible { detail },
                &posterior,
                None,
                reports,
                updates,
            ))
        }
    };
    if (params.n_prime as u64) < params.groups as u64 * plan.n {
        return Err(MitigateError::Config(format!(
            "n_prime = {} is below groups·N = {}",
            params.n_prime,
            params.groups as u64 * plan.n
        )));
    }
    let target = 1.0 - params.eps_target;
    for rep in 0..params.repetition_cap {
        let Some(transcripts) = source.repetition(rep, &plan, params)? else {
            break;
        };
        let (report, _) = analyse_repetition(&transcripts, rep, params, &plan, k);
        drop(transcripts);
        for (j, basket) in report.baskets.iter().enumerate() {
            let Some(cert) = basket.certificate() else { continue };
            posterior.update(cert.q)?;
            updates.push(BayesStep {
                repetition: rep,
                basket: j,
                q: cert.q,
                posterior: posterior.probabilities(),
            });
            if let Some((i, conf)) = posterior.leader() {
                if conf >= target {
                    reports.push(report);
                    return Ok(ProtocolOutcome {
                        status: if i == 1 { ProtocolStatus::True } else { ProtocolStatus::False },
                        abort: None,
                        confidence: Some(conf),
                        posterior: posterior.probabilities(),
                        plan: Some(plan),
                        repetitions: reports,
                        updates,
                    });
                }
            }
        }
        reports.push(report);
    }
    let repetitions = reports.len();
    let cause = if reports.iter().all(|r| r.baskets.is_empty()) {
        AbortCause::NoBaskets { repetitions }
    } else {
        AbortCause::RepetitionCap { repetitions }
    };
    Ok(ProtocolOutcome::abort(
        cause,
        &posterior,
        Some(plan),
        reports,
        updates,
    ))
}
