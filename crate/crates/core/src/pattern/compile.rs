//! Lowering of one round into the circuit model: a layer of preparations,
//! a layer of CZ gates, then flow-ordered measurements.

use serde::{Deserialize, Serialize};

use super::{MeasurementPattern, PatternError, Vertex};
use crate::angle::Angle;

/// How a vertex is initialised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preparation {
    /// `|+_θ⟩ = Rz(θ) H |0⟩`.
    Plus(Angle),
    /// Computational basis state `|d⟩`.
    Basis(u8),
}

/// How a vertex's measurement angle is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasurementRule {
    /// Measure at this angle regardless of earlier outcomes. The decoded outcome is the raw bit.
    Fixed(Angle),
    /// Measure at `φ′_v + offset`, where `φ′_v` is corrected from decoded
    /// earlier outcomes, and decode the result as `b ⊕ pad`.
    Adaptive { offset: Angle, pad: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Prepare { vertex: Vertex, prep: Preparation },
    Cz(Vertex, Vertex),
    Measure { vertex: Vertex, rule: MeasurementRule },
}

impl Op {
    /// Vertices the op acts on.
    pub fn support(&self) -> ([Vertex; 2], usize) {
        match *self {
            Op::Prepare { vertex, .. } | Op::Measure { vertex, .. } => ([vertex, vertex], 1),
            Op::Cz(a, b) => ([a, b], 2),
        }
    }
}

/// Gate-level view of an [`Op`] list, as the simulator executes it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    X(Vertex),
    H(Vertex),
    Rz(Vertex, Angle),
    /// `Rz(−δ_v)` with `δ_v` resolved at run time.
    RzMinusDelta(Vertex),
    Cz(Vertex, Vertex),
    MeasureZ(Vertex),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundProgram {
    num_vertices: usize,
    ops: Vec<Op>,
}

impl RoundProgram {
    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    /// Expands ops into gates, dropping rotations by a fixed zero angle.
    pub fn gates(&self) -> Vec<Gate> {
        let mut out = Vec::new();
        for op in &self.ops {
            match *op {
                Op::Prepare { vertex, prep: Preparation::Plus(theta) } => {
                    out.push(Gate::H(vertex));
                    if theta != Angle::ZERO {
                        out.push(Gate::Rz(vertex, theta));
                    }
                }
                Op::Prepare { vertex, prep: Preparation::Basis(d) } => {
                    if d & 1 == 1 {
                        out.push(Gate::X(vertex));
                    }
                }
                Op::Cz(a, b) => out.push(Gate::Cz(a, b)),
                Op::Measure { vertex, rule } => {
                    match rule {
                        MeasurementRule::Fixed(a) if a == Angle::ZERO => {}
                        MeasurementRule::Fixed(a) => out.push(Gate::Rz(vertex, -a)),
                        MeasurementRule::Adaptive { .. } => out.push(Gate::RzMinusDelta(vertex)),
                    }
                    out.push(Gate::H(vertex));
                    out.push(Gate::MeasureZ(vertex));
                }
            }
        }
        out
    }
}

/// Builds the op sequence for one round. CZ gates are ordered by the earlier
/// endpoint's flow position so a lazy executor can keep few qubits alive.
pub fn compile_round(
    pattern: &MeasurementPattern,
    preparations: &[Preparation],
    rules: &[MeasurementRule],
) -> Result<RoundProgram, PatternError> {
    let n = pattern.num_vertices();
    if preparations.len() < n {
        return Err(PatternError::MissingPreparation(preparations.len()));
    }
    if rules.len() < n {
        return Err(PatternError::MissingMeasurement(rules.len()));
    }
    let mut ops = Vec::with_capacity(2 * n + pattern.graph().edges().len());
    for (vertex, &prep) in preparations.iter().enumerate().take(n) {
        ops.push(Op::Prepare { vertex, prep });
    }
    let pos = |v: Vertex| pattern.position(v);
    let mut edges = pattern.graph().edges().to_vec();
    edges.sort_by_key(|&(a, b)| (pos(a).min(pos(b)), pos(a).max(pos(b))));
    ops.extend(edges.into_iter().map(|(a, b)| Op::Cz(a, b)));
    for &vertex in pattern.flow_order() {
        ops.push(Op::Measure {
            vertex,
            rule: rules[vertex],
        });
    }
    Ok(RoundProgram { num_vertices: n, ops })
}
