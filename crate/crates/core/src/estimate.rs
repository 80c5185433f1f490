//! Resource estimation: the local-correctness bound and its minimisation.
//!
//! With `r = (2p−1)/(2p−2)`, `δ = 1 − τ`:
//!
//! ```text
//! ε_max  = ε_ver + ε_rej
//! ε_ver  = max( exp(−2(1−r+ψ−ε3)·δ·ε4²·n) + exp(−2δ²ε3²n/(r−ψ)),
//!               exp(−2(r−ψ−ε1)·τ·ε2²·n)   + exp(−2τ²ε1²n/(r−ψ)) )
//! ε_rej  = exp(−2(Φ−p_max)²τn)
//! ε4     = (1/2−r+ψ−ε3)/(1−r+ψ−ε3) − p
//! Φ      = (1/k−ε2)(r−ψ−ε1)
//! ```
//!
//! The search runs over a unit cube that maps onto the feasible region
//! (apart from `ε4 > 0`, checked per point), so no start is wasted.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Default upper limit on `n` for [`minimize_n_given_eps`].
pub const DEFAULT_N_CEILING: u64 = 10_000_000;

const STARTS: usize = 64;
const POLL_SEED: u64 = 0x5eed_e57;
const MIN_STEP: f64 = 1e-9;
const U_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub k: usize,
    /// Inherent error probability of the computation.
    pub p: f64,
    /// Upper bound on the test-round failure probability.
    pub p_max: f64,
    /// Fixed test fraction; `None` leaves it to the optimiser.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
}

impl BoundInputs {
    pub fn new(k: usize, p: f64, p_max: f64, tau: Option<f64>) -> Self {
        Self { k, p, p_max, tau }
    }

    /// `(2p−1)/(2p−2)`.
    pub fn r(&self) -> f64 {
        (2.0 * self.p - 1.0) / (2.0 * self.p - 2.0)
    }

    fn check(&self) -> Result<(), AbortReason> {
        let bad = |m: &str| Err(AbortReason::InvalidInput(m.to_string()));
        if self.k == 0 {
            return bad("k must be at least 1");
        }
        if !(0.0..0.5).contains(&self.p) {
            return bad("p must lie in [0, 1/2)");
        }
        if !(0.0..1.0).contains(&self.p_max) {
            return bad("p_max must lie in [0, 1)");
        }
        if let Some(t) = self.tau {
            if !(t > 0.0 && t < 1.0) {
                return bad("tau must lie in (0, 1)");
            }
        }
        if self.p_max >= self.r() / self.k as f64 {
            return Err(AbortReason::PmaxTooLarge);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeParams {
    pub tau: f64,
    pub psi: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
}

impl FreeParams {
    fn as_array(&self) -> [f64; 5] {
        [self.tau, self.psi, self.eps1, self.eps2, self.eps3]
    }
}

/// A broken inequality of the constraint block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// `0 < τ < 1`
    Tau,
    /// `0 < ψ < r`
    Psi,
    /// `0 < ε1 < 1/2 − ψ`
    Eps1,
    /// `0 < ε2 < 1/k`
    Eps2,
    /// `0 < ε3 < ψ`
    Eps3,
    /// `ε4 > 0`
    Eps4,
    /// `Φ > p_max`
    PhiAbovePmax,
    /// `Φ < r/k`
    PhiBelowLimit,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Constraint::Tau => "0 < τ < 1",
            Constraint::Psi => "0 < ψ < r",
            Constraint::Eps1 => "0 < ε1 < 1/2 − ψ",
            Constraint::Eps2 => "0 < ε2 < 1/k",
            Constraint::Eps3 => "0 < ε3 < ψ",
            Constraint::Eps4 => "ε4 > 0",
            Constraint::PhiAbovePmax => "Φ > p_max",
            Constraint::PhiBelowLimit => "Φ < r/k",
        };
        f.write_str(s)
    }
}

pub fn eps4(params: &FreeParams, inputs: &BoundInputs) -> f64 {
    let r = inputs.r();
    let base = params.psi - params.eps3 - r;
    (0.5 + base) / (1.0 + base) - inputs.p
}

pub fn phi_of(params: &FreeParams, inputs: &BoundInputs) -> f64 {
    (1.0 / inputs.k as f64 - params.eps2) * (inputs.r() - params.psi - params.eps1)
}

/// Every violated constraint; empty means feasible.
pub fn feasible(params: &FreeParams, inputs: &BoundInputs) -> Vec<Constraint> {
    let r = inputs.r();
    let k = inputs.k as f64;
    let FreeParams { tau, psi, eps1, eps2, eps3 } = *params;
    let phi = phi_of(params, inputs);
    let open = |x: f64, lo: f64, hi: f64| x > lo && x < hi;
    let mut out = Vec::new();
    if !open(tau, 0.0, 1.0) {
        out.push(Constraint::Tau);
    }
    if !open(psi, 0.0, r) {
        out.push(Constraint::Psi);
    }
    if !open(eps1, 0.0, 0.5 - psi) {
        out.push(Constraint::Eps1);
    }
    if !open(eps2, 0.0, 1.0 / k) {
        out.push(Constraint::Eps2);
    }
    if !open(eps3, 0.0, psi) {
        out.push(Constraint::Eps3);
    }
    if !(eps4(params, inputs) > 0.0) {
        out.push(Constraint::Eps4);
    }
    if !(phi > inputs.p_max) {
        out.push(Constraint::PhiAbovePmax);
    }
    if !(phi < r / k) {
        out.push(Constraint::PhiBelowLimit);
    }
    out
}

/// Natural logs of the bound's pieces at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
struct LogBound {
    branch1: f64,
    branch2: f64,
    rej: f64,
}

impl LogBound {
    fn ver(&self) -> f64 {
        self.branch1.max(self.branch2)
    }

    fn total(&self) -> f64 {
        log_add(self.ver(), self.rej)
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

fn log_bound(params: &FreeParams, inputs: &BoundInputs, n: f64) -> LogBound {
    let r = inputs.r();
    let FreeParams { tau, psi, eps1, eps2, eps3 } = *params;
    let delta = 1.0 - tau;
    let e4 = eps4(params, inputs);
    let phi = phi_of(params, inputs);
    let a1 = -2.0 * (1.0 - r + psi - eps3) * delta * e4 * e4 * n;
    let a2 = -2.0 * delta * delta * eps3 * eps3 * n / (r - psi);
    let a3 = -2.0 * (r - psi - eps1) * tau * eps2 * eps2 * n;
    let a4 = -2.0 * tau * tau * eps1 * eps1 * n / (r - psi);
    LogBound {
        branch1: log_add(a1, a2),
        branch2: log_add(a3, a4),
        rej: -2.0 * (phi - inputs.p_max).powi(2) * tau * n,
    }
}

/// Why a bound could not be evaluated or minimised.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", content = "detail", rename_all = "snake_case")]
pub enum AbortReason {
    /// Condition `p_max < r/k` fails.
    PmaxTooLarge,
    InvalidInput(String),
    Infeasible(Vec<Constraint>),
    NoFeasiblePoint,
    /// Best bound found is not below 1/2.
    NotBelowHalf,
    /// No `n` up to the ceiling reaches the target.
    CeilingExceeded(u64),
}

impl fmt::Display for AbortReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbortReason::PmaxTooLarge => write!(f, "p_max ≥ r/k"),
            AbortReason::InvalidInput(m) => write!(f, "invalid input: {m}"),
            AbortReason::Infeasible(v) => {
                let s: Vec<String> = v.iter().map(ToString::to_string).collect();
                write!(f, "infeasible parameters: {}", s.join(", "))
            }
            AbortReason::NoFeasiblePoint => write!(f, "no feasible parameter point"),
            AbortReason::NotBelowHalf => write!(f, "best ε_max is not below 1/2"),
            AbortReason::CeilingExceeded(c) => write!(f, "target not reached for n ≤ {c}"),
        }
    }
}

impl std::error::Error for AbortReason {}

fn require_feasible(params: &FreeParams, inputs: &BoundInputs) -> Result<(), AbortReason> {
    let v = feasible(params, inputs);
    if v.is_empty() {
        Ok(())
    } else {
        Err(AbortReason::Infeasible(v))
    }
}

/// `ε_ver` with both branches, in that order.
pub fn epsilon_ver_branches(params: &FreeParams, inputs: &BoundInputs, n: f64) -> Result<(f64, f64, f64), AbortReason> {
    require_feasible(params, inputs)?;
    let b = log_bound(params, inputs, n);
    Ok((b.ver().exp(), b.branch1.exp(), b.branch2.exp()))
}

pub fn epsilon_ver(params: &FreeParams, inputs: &BoundInputs, n: f64) -> Result<f64, AbortReason> {
    epsilon_ver_branches(params, inputs, n).map(|v| v.0)
}

pub fn epsilon_rej(params: &FreeParams, inputs: &BoundInputs, n: f64) -> Result<f64, AbortReason> {
    let phi = phi_of(params, inputs);
    if !(phi > inputs.p_max) {
        return Err(AbortReason::Infeasible(vec![Constraint::PhiAbovePmax]));
    }
    Ok((-2.0 * (phi - inputs.p_max).powi(2) * params.tau * n).exp())
}

/// The optimum found at one `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub n: u64,
    pub eps_max: f64,
    pub eps_ver: f64,
    pub eps_rej: f64,
    pub branch1: f64,
    pub branch2: f64,
    pub phi: f64,
    pub tau: f64,
    /// Test rounds, `τn` rounded.
    pub t: u64,
    /// Computation rounds, `(1−τ)n` rounded.
    pub d: u64,
    pub params: FreeParams,
}

impl Estimate {
    fn at(params: FreeParams, inputs: &BoundInputs, n: u64) -> Self {
        let b = log_bound(&params, inputs, n as f64);
        Self {
            n,
            eps_max: b.total().exp(),
            eps_ver: b.ver().exp(),
            eps_rej: b.rej.exp(),
            branch1: b.branch1.exp(),
            branch2: b.branch2.exp(),
            phi: phi_of(&params, inputs),
            tau: params.tau,
            t: (params.tau * n as f64).round() as u64,
            d: ((1.0 - params.tau) * n as f64).round() as u64,
            params,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EstimationResult {
    Done(Estimate),
    Abort {
        #[serde(flatten)]
        reason: AbortReason,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        best: Option<Estimate>,
    },
}

impl EstimationResult {
    pub fn done(&self) -> Option<&Estimate> {
        match self {
            EstimationResult::Done(e) => Some(e),
            EstimationResult::Abort { .. } => None,
        }
    }

    pub fn is_done(&self) -> bool {
        self.done().is_some()
    }

    fn abort(reason: AbortReason) -> Self {
        EstimationResult::Abort { reason, best: None }
    }
}

/// One evaluated point, for `--trace`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub n: u64,
    pub params: FreeParams,
    /// `ln ε_max`, or `null` for a rejected point.
    pub log_eps_max: Option<f64>,
}

/// Optimiser state: the unit-cube coordinates and how they map to [`FreeParams`].
struct Space<'a> {
    inputs: &'a BoundInputs,
    slack: f64,
}

impl<'a> Space<'a> {
    fn new(inputs: &'a BoundInputs) -> Self {
        Self {
            inputs,
            slack: inputs.r() - inputs.k as f64 * inputs.p_max,
        }
    }

    fn dim(&self) -> usize {
        if self.inputs.tau.is_some() {
            4
        } else {
            5
        }
    }

    // u = [ψ, ε1, ε2, ε3, τ?]
    fn params(&self, u: &[f64]) -> FreeParams {
        let r = self.inputs.r();
        let k = self.inputs.k as f64;
        let psi = u[0] * self.slack;
        let eps1 = u[1] * (0.5 - psi).min(self.slack - psi);
        let eps2 = u[2] * (1.0 / k - self.inputs.p_max / (r - psi - eps1));
        let eps3 = u[3] * psi;
        let tau = self.inputs.tau.unwrap_or_else(|| u[4]);
        FreeParams { tau, psi, eps1, eps2, eps3 }
    }

    fn unit(&self, p: &FreeParams) -> Option<Vec<f64>> {
        let r = self.inputs.r();
        let k = self.inputs.k as f64;
        let mut u = vec![
            p.psi / self.slack,
            p.eps1 / (0.5 - p.psi).min(self.slack - p.psi),
            p.eps2 / (1.0 / k - self.inputs.p_max / (r - p.psi - p.eps1)),
            p.eps3 / p.psi,
        ];
        if self.inputs.tau.is_none() {
            u.push(p.tau);
        }
        u.iter().all(|x| x.is_finite() && *x > 0.0 && *x < 1.0).then_some(u)
    }

    fn value(&self, u: &[f64], n: f64) -> Option<f64> {
        let p = self.params(u);
        if !feasible(&p, self.inputs).is_empty() {
            return None;
        }
        let v = log_bound(&p, self.inputs, n).total();
        v.is_finite().then_some(v)
    }
}

fn radical_inverse(mut i: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut out = 0.0;
    while i > 0 {
        f /= base as f64;
        out += f * (i % base) as f64;
        i /= base;
    }
    out
}

fn halton(i: usize, dim: usize) -> Vec<f64> {
    const PRIMES: [usize; 5] = [2, 3, 5, 7, 11];
    (0..dim).map(|d| radical_inverse(i + 1, PRIMES[d])).collect()
}

fn clamp_unit(x: f64) -> f64 {
    x.clamp(U_EPS, 1.0 - U_EPS)
}

/// Coordinate descent with halving steps and random-direction polls.
fn local_search(
    space: &Space<'_>,
    n: f64,
    mut u: Vec<f64>,
    mut value: f64,
    rng: &mut ChaCha8Rng,
    trace: &mut Option<&mut Vec<TracePoint>>,
) -> (Vec<f64>, f64) {
    let dim = u.len();
    let mut step = 0.125;
    let eval = |x: &[f64], trace: &mut Option<&mut Vec<TracePoint>>| {
        let v = space.value(x, n);
        if let Some(t) = trace.as_deref_mut() {
            t.push(TracePoint {
                n: n as u64,
                params: space.params(x),
                log_eps_max: v,
            });
        }
        v
    };
    while step > MIN_STEP {
        let mut improved = false;
        for d in 0..dim {
            for sign in [1.0, -1.0] {
                let mut trial = u.clone();
                trial[d] = clamp_unit(trial[d] + sign * step);
                if let Some(v) = eval(&trial, trace) {
                    if v < value {
                        u = trial;
                        value = v;
                        improved = true;
                        break;
                    }
                }
            }
        }
        if !improved {
            for _ in 0..2 * dim {
                let dir: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
                let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
                let trial: Vec<f64> = u
                    .iter()
                    .zip(&dir)
                    .map(|(x, d)| clamp_unit(x + step * d / norm))
                    .collect();
                if let Some(v) = eval(&trial, trace) {
                    if v < value {
                        u = trial;
                        value = v;
                        improved = true;
                        break;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (u, value)
}

fn better(a: &(Vec<f64>, f64, FreeParams), b: &(Vec<f64>, f64, FreeParams)) -> bool {
    match a.1.partial_cmp(&b.1) {
        Some(std::cmp::Ordering::Less) => true,
        Some(std::cmp::Ordering::Greater) => false,
        _ => a.2.as_array() < b.2.as_array(),
    }
}

/// Minimises `ε_max` at fixed `n`; see [`minimize_eps_given_n_warm`].
pub fn minimize_eps_given_n(inputs: &BoundInputs, n: u64) -> EstimationResult {
    minimize_eps_given_n_warm(inputs, n, &[], None)
}

/// Minimises `ε_max` at fixed `n` from 64 quasi-random starts plus `warm`
/// points. The result is never worse than any feasible warm point.
pub fn minimize_eps_given_n_warm(
    inputs: &BoundInputs,
    n: u64,
    warm: &[FreeParams],
    mut trace: Option<&mut Vec<TracePoint>>,
) -> EstimationResult {
    if let Err(reason) = inputs.check() {
        return EstimationResult::abort(reason);
    }
    if n == 0 {
        return EstimationResult::abort(AbortReason::InvalidInput("n must be at least 1".into()));
    }
    let space = Space::new(inputs);
    let nf = n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(POLL_SEED);
    let mut starts: Vec<Vec<f64>> = warm.iter().filter_map(|p| space.unit(p)).collect();
    starts.extend((0..STARTS).map(|i| halton(i, space.dim())));
    let mut best: Option<(Vec<f64>, f64, FreeParams)> = None;
    for u0 in starts {
        let Some(v0) = space.value(&u0, nf) else {
            continue;
        };
        let (u, v) = local_search(&space, nf, u0, v0, &mut rng, &mut trace);
        let cand = (u.clone(), v, space.params(&u));
        if best.as_ref().is_none_or(|b| better(&cand, b)) {
            best = Some(cand);
        }
    }
    // Warm points are kept verbatim when the search could not improve them.
    for p in warm {
        if feasible(p, inputs).is_empty() && inputs.tau.is_none_or(|t| t == p.tau) {
            let v = log_bound(p, inputs, nf).total();
            if best.as_ref().is_none_or(|b| v < b.1) {
                best = Some((Vec::new(), v, *p));
            }
        }
    }
    let Some((_, _, params)) = best else {
        return EstimationResult::abort(AbortReason::NoFeasiblePoint);
    };
    let est = Estimate::at(params, inputs, n);
    if est.eps_max >= 0.5 {
        return EstimationResult::Abort {
            reason: AbortReason::NotBelowHalf,
            best: Some(est),
        };
    }
    EstimationResult::Done(est)
}

/// Optimised bound over increasing `ns`, each run warm-started from the
/// previous optimum, so the values are non-increasing by construction.
pub fn minimize_eps_over_grid(inputs: &BoundInputs, ns: &[u64]) -> Vec<EstimationResult> {
    let mut warm: Vec<FreeParams> = Vec::new();
    ns.iter()
        .map(|&n| {
            let res = minimize_eps_given_n_warm(inputs, n, &warm, None);
            if let EstimationResult::Done(e) | EstimationResult::Abort { best: Some(e), .. } = &res {
                warm = vec![e.params];
            }
            res
        })
        .collect()
}

fn best_point(res: &EstimationResult) -> Option<Estimate> {
    match res {
        EstimationResult::Done(e) | EstimationResult::Abort { best: Some(e), .. } => Some(*e),
        EstimationResult::Abort { best: None, .. } => None,
    }
}

/// Smallest `n` whose optimised bound is at most `eps_target`.
pub fn minimize_n_given_eps(inputs: &BoundInputs, eps_target: f64, ceiling: u64) -> EstimationResult {
    if !(eps_target > 0.0 && eps_target < 0.5) {
        return EstimationResult::abort(AbortReason::InvalidInput("eps_target must lie in (0, 1/2)".into()));
    }
    if let Err(reason) = inputs.check() {
        return EstimationResult::abort(reason);
    }
    let reaches = |n: u64, warm: &[FreeParams]| {
        let res = minimize_eps_given_n_warm(inputs, n, warm, None);
        let ok = res.done().is_some_and(|e| e.eps_max <= eps_target);
        (ok, res)
    };
    let mut warm: Vec<FreeParams> = Vec::new();
    let mut lo = 0u64;
    let mut hi = 64u64;
    loop {
        let (ok, res) = reaches(hi, &warm);
        if let Some(e) = best_point(&res) {
            warm = vec![e.params];
        }
        if ok {
            break;
        }
        if hi >= ceiling {
            return EstimationResult::Abort {
                reason: AbortReason::CeilingExceeded(ceiling),
                best: best_point(&res),
            };
        }
        lo = hi;
        hi = (hi * 2).min(ceiling);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let (ok, res) = reaches(mid, &warm);
        if ok {
            hi = mid;
            warm = vec![best_point(&res).expect("done").params];
        } else {
            lo = mid;
        }
    }
    // Warm starts may have helped; settle on an n the plain search also reaches.
    let mut extra = 1u64;
    loop {
        let res = minimize_eps_given_n(inputs, hi);
        if res.done().is_some_and(|e| e.eps_max <= eps_target) {
            return res;
        }
        if hi >= ceiling {
            return EstimationResult::Abort {
                reason: AbortReason::CeilingExceeded(ceiling),
                best: best_point(&res),
            };
        }
        hi = (hi + extra).min(ceiling);
        extra *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_point() -> FreeParams {
        FreeParams {
            tau: 0.9,
            psi: 0.15,
            eps1: 0.01,
            eps2: 0.01,
            eps3: 0.1,
        }
    }

    fn inputs(p_max: f64, tau: Option<f64>) -> BoundInputs {
        BoundInputs::new(2, 0.0, p_max, tau)
    }

    #[test]
    fn phi_examples() {
        let i = inputs(0.15, None);
        assert!((phi_of(&reference_point(), &i) - 0.1666).abs() < 1e-12);
        let p = FreeParams { eps2: 0.5, ..reference_point() };
        assert_eq!(phi_of(&p, &i), 0.0);
        let p = FreeParams { psi: 0.3, eps1: 0.2, ..reference_point() };
        assert!(phi_of(&p, &i).abs() < 1e-15);
    }

    #[test]
    fn feasibility_examples() {
        assert!(feasible(&reference_point(), &inputs(0.15, None)).is_empty());
        assert_eq!(feasible(&reference_point(), &inputs(0.17, None)), vec![Constraint::PhiAbovePmax]);
        let p = FreeParams { eps3: 0.15, ..reference_point() };
        let v = feasible(&p, &inputs(0.15, None));
        assert!(v.contains(&Constraint::Eps3));
    }

    #[test]
    fn eps4_vanishes_as_eps3_reaches_psi() {
        let i = inputs(0.15, None);
        let p = FreeParams { eps3: 0.15 - 1e-9, ..reference_point() };
        assert!(eps4(&p, &i) < 1e-8);
        let b1 = epsilon_ver_branches(&p, &i, 5198.0).unwrap().1;
        assert!(b1 > 0.999);
    }

    #[test]
    fn rejection_term() {
        let i = inputs(0.15, None);
        let p = reference_point();
        let a = epsilon_rej(&p, &i, 5198.0).unwrap();
        let b = epsilon_rej(&p, &i, 2.0 * 5198.0).unwrap();
        assert!((b - a * a).abs() < 1e-15);
        assert!(epsilon_rej(&p, &inputs(0.1666, None), 100.0).is_err());
    }

    #[test]
    fn bound_decreases_in_n() {
        let i = inputs(0.15, None);
        let mut last = f64::INFINITY;
        for n in [100.0, 1000.0, 1e4, 1e5, 1e6] {
            let v = epsilon_ver(&reference_point(), &i, n).unwrap();
            assert!(v < last);
            last = v;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn unit_cube_round_trips() {
        let i = inputs(0.15, None);
        let s = Space::new(&i);
        let u = vec![0.3, 0.4, 0.5, 0.6, 0.7];
        let p = s.params(&u);
        let back = s.unit(&p).unwrap();
        for (a, b) in u.iter().zip(back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn abort_when_pmax_too_large() {
        let res = minimize_eps_given_n(&inputs(0.3, Some(0.9)), 5198);
        assert_eq!(res, EstimationResult::abort(AbortReason::PmaxTooLarge));
        let res = minimize_n_given_eps(&inputs(0.3, None), 0.05, DEFAULT_N_CEILING);
        assert!(!res.is_done());
    }

    #[test]
    fn result_json_shape() {
        let res = minimize_eps_given_n(&inputs(0.15, Some(0.9)), 5198);
        let json = serde_json::to_value(&res).unwrap();
        assert_eq!(json["status"], "done");
        let abort = serde_json::to_value(EstimationResult::abort(AbortReason::PmaxTooLarge)).unwrap();
        assert_eq!(abort["status"], "abort");
        assert_eq!(abort["reason"], "pmax_too_large");
    }
}
