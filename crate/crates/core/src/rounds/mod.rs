//! Blinded computation rounds and trap/dummy test rounds.

pub mod exec;

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::angle::Angle;
use crate::pattern::{compile_round, KColouring, MeasurementPattern, MeasurementRule, Preparation, RoundProgram};
use crate::sim::NoiseModel;
use crate::Error;

pub use exec::{execute, execute_with_readout_mask, resource_state, ExecOrder, ExecRecord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RoundError {
    #[error("classical input has {found} bits, pattern has {expected} inputs")]
    InputLength { expected: usize, found: usize },
    #[error("decision map covers {found} output strings, expected {expected}")]
    DecisionSize { expected: usize, found: usize },
    #[error("bad output string `{0}` in decision map")]
    BadOutputString(String),
    #[error("transcript incomplete: {0}")]
    Incomplete(String),
    #[error("colouring has {colouring} vertices, pattern has {pattern}")]
    ColouringSize { colouring: usize, pattern: usize },
}

/// `q : {0,1}^|O| → {0,1}`, indexed by the output string with the first output most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionMap {
    accept: Vec<bool>,
}

impl DecisionMap {
    pub fn from_table(accept: Vec<bool>) -> Result<Self, RoundError> {
        if !accept.len().is_power_of_two() {
            return Err(RoundError::DecisionSize {
                expected: accept.len().next_power_of_two(),
                found: accept.len(),
            });
        }
        Ok(Self { accept })
    }

    /// `q = 1` exactly on the listed strings, such as `["10"]`.
    pub fn accepting<S: AsRef<str>>(num_outputs: usize, strings: &[S]) -> Result<Self, RoundError> {
        let mut accept = vec![false; 1 << num_outputs];
        for s in strings {
            let s = s.as_ref();
            if s.len() != num_outputs || !s.bytes().all(|c| c == b'0' || c == b'1') {
                return Err(RoundError::BadOutputString(s.to_string()));
            }
            accept[usize::from_str_radix(s, 2).expect("binary digits")] = true;
        }
        Ok(Self { accept })
    }

    pub fn num_outputs(&self) -> usize {
        self.accept.len().trailing_zeros() as usize
    }

    pub fn eval(&self, output: &[u8]) -> u8 {
        let key = output.iter().fold(0usize, |k, &b| (k << 1) | usize::from(b & 1));
        u8::from(self.accept[key])
    }
}

#[derive(Debug, Clone)]
pub struct ComputationRoundSpec<'a> {
    pub pattern: &'a MeasurementPattern,
    pub input: Vec<u8>,
    pub decision: DecisionMap,
}

impl<'a> ComputationRoundSpec<'a> {
    pub fn new(pattern: &'a MeasurementPattern, input: Vec<u8>, decision: DecisionMap) -> Result<Self, RoundError> {
        if input.len() != pattern.inputs().len() {
            return Err(RoundError::InputLength {
                expected: pattern.inputs().len(),
                found: input.len(),
            });
        }
        if decision.num_outputs() != pattern.outputs().len() {
            return Err(RoundError::DecisionSize {
                expected: 1 << pattern.outputs().len(),
                found: 1 << decision.num_outputs(),
            });
        }
        Ok(Self { pattern, input, decision })
    }
}

#[derive(Debug, Clone)]
pub struct TestRoundSpec<'a> {
    pub pattern: &'a MeasurementPattern,
    pub colouring: &'a KColouring,
}

impl<'a> TestRoundSpec<'a> {
    pub fn new(pattern: &'a MeasurementPattern, colouring: &'a KColouring) -> Result<Self, RoundError> {
        let coloured: usize = colouring.classes().iter().map(Vec::len).sum();
        if coloured != pattern.num_vertices() {
            return Err(RoundError::ColouringSize {
                colouring: coloured,
                pattern: pattern.num_vertices(),
            });
        }
        Ok(Self { pattern, colouring })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoundKind {
    Computation,
    Test,
}

/// Serialized as `"pass"`, `"fail"`, `0`, `1` or `"discarded"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail,
    Decision(u8),
    /// Computation round lost to a simulator failure.
    Discarded,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => write!(f, "pass"),
            Verdict::Fail => write!(f, "fail"),
            Verdict::Decision(q) => write!(f, "{q}"),
            Verdict::Discarded => write!(f, "discarded"),
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Verdict::Decision(q) => s.serialize_u8(*q),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Verdict {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Bit(u8),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Bit(q @ (0 | 1)) => Ok(Verdict::Decision(q)),
            Raw::Word(w) if w == "pass" => Ok(Verdict::Pass),
            Raw::Word(w) if w == "fail" => Ok(Verdict::Fail),
            Raw::Word(w) if w == "discarded" => Ok(Verdict::Discarded),
            _ => Err(serde::de::Error::custom("verdict must be pass, fail, 0, 1 or discarded")),
        }
    }
}

/// Every random choice and blind outcome of one round. `null` entries mark
/// values that do not exist for that vertex (θ, r of a dummy; d of a trap).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundTranscript {
    pub round_index: u64,
    pub kind: RoundKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colour: Option<usize>,
    pub theta: Vec<Option<Angle>>,
    pub r: Vec<Option<u8>>,
    pub d: Vec<Option<u8>>,
    pub delta: Vec<Angle>,
    pub b: Vec<u8>,
    pub verdict: Verdict,
}

impl RoundTranscript {
    /// `s_v = b_v ⊕ r_v` where `r_v` exists.
    pub fn decoded(&self) -> Vec<Option<u8>> {
        self.b
            .iter()
            .zip(&self.r)
            .map(|(&b, r)| r.map(|r| b ^ r))
            .collect()
    }

    /// Decoded output bits of a computation round.
    pub fn output_bits(&self, pattern: &MeasurementPattern) -> Result<Vec<u8>, RoundError> {
        let s = self.decoded();
        pattern
            .outputs()
            .iter()
            .map(|&o| {
                s.get(o)
                    .copied()
                    .flatten()
                    .ok_or_else(|| RoundError::Incomplete(format!("no decoded outcome for output {o}")))
            })
            .collect()
    }

    pub fn is_test_failure(&self) -> bool {
        self.kind == RoundKind::Test && self.verdict != Verdict::Pass
    }
}

/// Draws θ and r for every vertex and compiles the blinded round.
pub fn plan_computation_round<R: Rng + ?Sized>(
    spec: &ComputationRoundSpec<'_>,
    rng: &mut R,
) -> Result<(Vec<Angle>, Vec<u8>, RoundProgram), Error> {
    let pattern = spec.pattern;
    let n = pattern.num_vertices();
    let theta: Vec<Angle> = (0..n).map(|_| Angle::random(rng)).collect();
    let r: Vec<u8> = (0..n).map(|_| rng.random_range(0..2u8)).collect();
    let preps: Vec<Preparation> = theta.iter().map(|&t| Preparation::Plus(t)).collect();
    let rules: Vec<MeasurementRule> = (0..n)
        .map(|v| {
            let x = pattern.input_index(v).map_or(0, |i| spec.input[i]);
            MeasurementRule::Adaptive {
                offset: theta[v] + Angle::pi_times(r[v]) + Angle::pi_times(x),
                pad: r[v],
            }
        })
        .collect();
    let program = compile_round(pattern, &preps, &rules)?;
    Ok((theta, r, program))
}

/// Subroutine for one blinded computation round.
pub fn run_computation_round<R: Rng + ?Sized>(
    spec: &ComputationRoundSpec<'_>,
    noise: &NoiseModel,
    round_index: u64,
    order: ExecOrder,
    rng: &mut R,
) -> Result<RoundTranscript, Error> {
    let pattern = spec.pattern;
    let n = pattern.num_vertices();
    let (theta, r, program) = plan_computation_round(spec, rng)?;
    let rec = execute(pattern, &program, noise, order, rng)?;
    let output: Vec<u8> = pattern.outputs().iter().map(|&o| rec.decoded[o]).collect();
    Ok(RoundTranscript {
        round_index,
        kind: RoundKind::Computation,
        colour: None,
        theta: theta.into_iter().map(Some).collect(),
        r: r.into_iter().map(Some).collect(),
        d: vec![None; n],
        delta: rec.delta,
        b: rec.b,
        verdict: Verdict::Decision(spec.decision.eval(&output)),
    })
}

/// Subroutine for one trap/dummy test round.
pub fn run_test_round<R: Rng + ?Sized>(
    spec: &TestRoundSpec<'_>,
    noise: &NoiseModel,
    round_index: u64,
    order: ExecOrder,
    rng: &mut R,
) -> Result<RoundTranscript, Error> {
    let pattern = spec.pattern;
    let n = pattern.num_vertices();
    let j = rng.random_range(0..spec.colouring.k());
    let mut theta = vec![None; n];
    let mut r = vec![None; n];
    let mut d = vec![None; n];
    let mut preps = Vec::with_capacity(n);
    let mut rules = Vec::with_capacity(n);
    for v in 0..n {
        if spec.colouring.colour(v) == j {
            let t = Angle::random(rng);
            let bit = rng.random_range(0..2u8);
            theta[v] = Some(t);
            r[v] = Some(bit);
            preps.push(Preparation::Plus(t));
            rules.push(MeasurementRule::Fixed(t + Angle::pi_times(bit)));
        } else {
            let bit = rng.random_range(0..2u8);
            d[v] = Some(bit);
            preps.push(Preparation::Basis(bit));
            rules.push(MeasurementRule::Fixed(Angle::random(rng)));
        }
    }
    let program = compile_round(pattern, &preps, &rules)?;
    let rec = execute(pattern, &program, noise, order, rng)?;
    let mut transcript = RoundTranscript {
        round_index,
        kind: RoundKind::Test,
        colour: Some(j),
        theta,
        r,
        d,
        delta: rec.delta,
        b: rec.b,
        verdict: Verdict::Fail,
    };
    transcript.verdict = evaluate_test_predicate(&transcript, pattern, spec.colouring)?;
    Ok(transcript)
}

/// `Pass` iff `b_v = r_v ⊕ (⊕_{i ∈ N(v)} d_i)` for every trap `v` of colour `j`.
pub fn evaluate_test_predicate(
    transcript: &RoundTranscript,
    pattern: &MeasurementPattern,
    colouring: &KColouring,
) -> Result<Verdict, RoundError> {
    let n = pattern.num_vertices();
    if transcript.kind != RoundKind::Test {
        return Err(RoundError::Incomplete("not a test round".into()));
    }
    let j = transcript
        .colour
        .ok_or_else(|| RoundError::Incomplete("missing colour".into()))?;
    if j >= colouring.k() {
        return Err(RoundError::Incomplete(format!("colour {j} outside colouring")));
    }
    if transcript.b.len() != n || transcript.r.len() != n || transcript.d.len() != n {
        return Err(RoundError::Incomplete("per-vertex arrays have the wrong length".into()));
    }
    let mut pass = true;
    for &v in colouring.class(j) {
        let r = transcript.r[v].ok_or_else(|| RoundError::Incomplete(format!("trap {v} has no r")))?;
        let mut expected = r;
        for &w in pattern.graph().neighbours(v) {
            expected ^= transcript.d[w]
                .ok_or_else(|| RoundError::Incomplete(format!("dummy {w} has no d")))?;
        }
        pass &= transcript.b[v] == expected;
    }
    Ok(if pass { Verdict::Pass } else { Verdict::Fail })
}
