//! Per-basket majority vote and certification.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::estimate::{minimize_eps_given_n, AbortReason, BoundInputs, Estimate, EstimationResult};
use crate::rounds::{RoundKind, RoundTranscript, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VoteDiscard {
    Tie,
    NoComputationRounds,
}

/// Majority of the decision bits: `Q = 1` if `μ > d/2`, `0` if `μ < d/2`.
pub fn basket_vote(decisions: &[u8]) -> Result<u8, VoteDiscard> {
    if decisions.is_empty() {
        return Err(VoteDiscard::NoComputationRounds);
    }
    let mu: usize = decisions.iter().map(|&q| usize::from(q & 1)).sum();
    match (2 * mu).cmp(&decisions.len()) {
        std::cmp::Ordering::Greater => Ok(1),
        std::cmp::Ordering::Less => Ok(0),
        std::cmp::Ordering::Equal => Err(VoteDiscard::Tie),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum CertifyDiscard {
    Estimation { detail: AbortReason },
    EpsNotBelowHalf { eps: f64 },
    FailureAboveThreshold { failure_fraction: f64, phi: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub eps: f64,
    pub phi: f64,
    /// `(q_0, q_1)`, with `1 − ε` on the voted outcome.
    pub q: [f64; 2],
    pub estimate: Estimate,
}

/// Runs the estimator with `n = |B|`, `τ = τ_j`, `p_max = p̃` and checks `f_j < Φ_j`.
pub fn basket_certify(
    n: u64,
    tau_j: f64,
    failure_fraction: f64,
    vote: u8,
    p: f64,
    p_tilde: f64,
    k: usize,
) -> Result<Certificate, CertifyDiscard> {
    let inputs = BoundInputs::new(k, p, p_tilde, Some(tau_j));
    let est = match minimize_eps_given_n(&inputs, n) {
        EstimationResult::Done(e) => e,
        EstimationResult::Abort {
            reason: AbortReason::NotBelowHalf,
            best: Some(e),
        } => return Err(CertifyDiscard::EpsNotBelowHalf { eps: e.eps_max }),
        EstimationResult::Abort { reason, .. } => return Err(CertifyDiscard::Estimation { detail: reason }),
    };
    if est.eps_max >= 0.5 {
        return Err(CertifyDiscard::EpsNotBelowHalf { eps: est.eps_max });
    }
    if failure_fraction >= est.phi {
        return Err(CertifyDiscard::FailureAboveThreshold {
            failure_fraction,
            phi: est.phi,
        });
    }
    // The bound is a sum of exponentials and never 0; keep it representable.
    let eps = est.eps_max.max(f64::MIN_POSITIVE);
    let q = if vote == 1 { [eps, 1.0 - eps] } else { [1.0 - eps, eps] };
    Ok(Certificate {
        eps,
        phi: est.phi,
        q,
        estimate: est,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BasketStatus {
    Certified(Certificate),
    VoteDiscarded { reason: VoteDiscard },
    CertifyDiscarded(CertifyDiscard),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Basket {
    pub repetition: usize,
    pub group: usize,
    /// Half-open range of round positions within the repetition.
    pub range: Range<usize>,
    pub size: usize,
    pub tests: usize,
    pub computations: usize,
    pub tau: f64,
    pub failure_fraction: f64,
    pub majority_sum: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vote: Option<u8>,
    pub status: BasketStatus,
}

impl Basket {
    pub fn certificate(&self) -> Option<&Certificate> {
        match &self.status {
            BasketStatus::Certified(c) => Some(c),
            _ => None,
        }
    }
}

/// Counts, vote and certification of the rounds `range` of `transcripts`.
pub fn evaluate_basket(
    transcripts: &[RoundTranscript],
    repetition: usize,
    group: usize,
    range: Range<usize>,
    p: f64,
    p_tilde: f64,
    k: usize,
) -> Basket {
    let rounds = &transcripts[range.clone()];
    let tests = rounds.iter().filter(|t| t.kind == RoundKind::Test).count();
    let failures = rounds.iter().filter(|t| t.is_test_failure()).count();
    let decisions: Vec<u8> = rounds
        .iter()
        .filter_map(|t| match t.verdict {
            Verdict::Decision(q) if t.kind == RoundKind::Computation => Some(q),
            _ => None,
        })
        .collect();
    let size = range.len();
    let tau = tests as f64 / size as f64;
    let failure_fraction = if tests == 0 { 0.0 } else { failures as f64 / tests as f64 };
    let majority_sum = decisions.iter().map(|&q| usize::from(q)).sum();
    let (vote, status) = match basket_vote(&decisions) {
        Err(reason) => (None, BasketStatus::VoteDiscarded { reason }),
        Ok(q) if tests == 0 => (
            Some(q),
            BasketStatus::CertifyDiscarded(CertifyDiscard::Estimation {
                detail: AbortReason::InvalidInput("basket has no test rounds".into()),
            }),
        ),
        Ok(q) => match basket_certify(size as u64, tau, failure_fraction, q, p, p_tilde, k) {
            Ok(c) => (Some(q), BasketStatus::Certified(c)),
            Err(d) => (Some(q), BasketStatus::CertifyDiscarded(d)),
        },
    };
    Basket {
        repetition,
        group,
        range,
        size,
        tests,
        computations: rounds.len() - tests,
        tau,
        failure_fraction,
        majority_sum,
        vote,
        status,
    }
}
