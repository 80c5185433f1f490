//! Executes a compiled round on the trajectory simulator.
//!
//! All noise events are drawn first, one per noise site, in program order.
//! Measurement outcomes are drawn afterwards in flow order. Because of that,
//! any schedule that keeps each qubit's own ops in program order yields the
//! same record for the same RNG state, and the lazy schedule can prepare a
//! qubit just before its first CZ and drop it right after its measurement.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::pattern::{corrected_angle, MeasurementPattern, MeasurementRule, Op, Preparation, RoundProgram, Vertex};
use crate::sim::{sample_noise, NoiseEvent, NoiseModel, NoiseSite, StateVector};
use crate::Error;

/// Order in which ops reach the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExecOrder {
    /// Pull each measurement's prerequisites in just in time.
    #[default]
    Lazy,
    /// Program order: all preparations, all CZs, then measurements.
    Layered,
}

/// Raw per-vertex results of one execution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecRecord {
    /// Reported bits, after any readout flip.
    pub b: Vec<u8>,
    /// Angle each vertex was measured at.
    pub delta: Vec<Angle>,
    /// `b ⊕ pad` for adaptive rules, `b` otherwise.
    pub decoded: Vec<u8>,
    /// Largest register size reached.
    pub peak_qubits: usize,
}

fn noise_sites(op: &Op) -> Vec<NoiseSite> {
    match *op {
        Op::Prepare { vertex, prep: Preparation::Plus(_) } => vec![
            NoiseSite::StatePrep(vertex),
            NoiseSite::OneQubitGate(vertex),
            NoiseSite::OneQubitGate(vertex),
        ],
        Op::Prepare { vertex, prep: Preparation::Basis(_) } => {
            vec![NoiseSite::StatePrep(vertex), NoiseSite::OneQubitGate(vertex)]
        }
        Op::Cz(a, b) => vec![NoiseSite::TwoQubitGate(a, b)],
        Op::Measure { vertex, .. } => vec![
            NoiseSite::OneQubitGate(vertex),
            NoiseSite::OneQubitGate(vertex),
            NoiseSite::Readout,
        ],
    }
}

struct Machine<'a> {
    pattern: &'a MeasurementPattern,
    ops: &'a [Op],
    events: Vec<Vec<NoiseEvent>>,
    per_qubit: Vec<Vec<usize>>,
    cursor: Vec<usize>,
    done: Vec<bool>,
    state: StateVector,
    slot: Vec<usize>,
    outcomes: Vec<Option<u8>>,
    record: ExecRecord,
}

impl Machine<'_> {
    fn apply_event(&mut self, event: &NoiseEvent) -> Result<(), Error> {
        if let NoiseEvent::Pauli(err) = event {
            for (&v, &p) in err.qubits.iter().zip(&err.labels) {
                self.state.apply_pauli(self.slot[v], p)?;
            }
        }
        Ok(())
    }

    fn run_op<R: Rng + ?Sized>(&mut self, i: usize, rng: &mut R) -> Result<(), Error> {
        if self.done[i] {
            return Ok(());
        }
        let (support, len) = self.ops[i].support();
        for &q in &support[..len] {
            while self.per_qubit[q][self.cursor[q]] != i {
                let earlier = self.per_qubit[q][self.cursor[q]];
                self.run_op(earlier, rng)?;
            }
        }
        self.execute(i, rng)?;
        self.done[i] = true;
        for &q in &support[..len] {
            self.cursor[q] += 1;
        }
        Ok(())
    }

    fn execute<R: Rng + ?Sized>(&mut self, i: usize, rng: &mut R) -> Result<(), Error> {
        let events = std::mem::take(&mut self.events[i]);
        match self.ops[i] {
            Op::Prepare { vertex, prep } => {
                let s = self.state.push_qubit()?;
                self.slot[vertex] = s;
                self.record.peak_qubits = self.record.peak_qubits.max(self.state.num_qubits());
                self.apply_event(&events[0])?;
                match prep {
                    Preparation::Plus(theta) => {
                        self.state.apply_h(s)?;
                        self.apply_event(&events[1])?;
                        self.state.apply_rz(s, theta.radians())?;
                        self.apply_event(&events[2])?;
                    }
                    Preparation::Basis(d) => {
                        if d & 1 == 1 {
                            self.state.apply_pauli(s, crate::sim::Pauli::X)?;
                        }
                        self.apply_event(&events[1])?;
                    }
                }
            }
            Op::Cz(a, b) => {
                self.state.apply_cz(self.slot[a], self.slot[b])?;
                self.apply_event(&events[0])?;
            }
            Op::Measure { vertex, rule } => {
                let (delta, pad) = match rule {
                    MeasurementRule::Fixed(angle) => (angle, 0),
                    MeasurementRule::Adaptive { offset, pad } => {
                        (corrected_angle(self.pattern, vertex, &self.outcomes)? + offset, pad)
                    }
                };
                let s = self.slot[vertex];
                self.state.apply_rz(s, -delta.radians())?;
                self.apply_event(&events[0])?;
                self.state.apply_h(s)?;
                self.apply_event(&events[1])?;
                let mut bit = self.state.measure_z(s, rng)?;
                self.state.remove_qubit(s)?;
                for other in self.slot.iter_mut() {
                    if *other != usize::MAX && *other > s {
                        *other -= 1;
                    }
                }
                self.slot[vertex] = usize::MAX;
                if events[2] == NoiseEvent::ReadoutFlip {
                    bit ^= 1;
                }
                self.record.b[vertex] = bit;
                self.record.delta[vertex] = delta;
                self.record.decoded[vertex] = bit ^ (pad & 1);
                self.outcomes[vertex] = Some(bit ^ (pad & 1));
            }
        }
        Ok(())
    }
}

/// Runs `program` once under `noise`.
pub fn execute<R: Rng + ?Sized>(
    pattern: &MeasurementPattern,
    program: &RoundProgram,
    noise: &NoiseModel,
    order: ExecOrder,
    rng: &mut R,
) -> Result<ExecRecord, Error> {
    execute_with_readout_mask(pattern, program, noise, order, None, rng)
}

/// Like [`execute`], with readout noise restricted to vertices whose mask entry is set.
pub fn execute_with_readout_mask<R: Rng + ?Sized>(
    pattern: &MeasurementPattern,
    program: &RoundProgram,
    noise: &NoiseModel,
    order: ExecOrder,
    readout_mask: Option<&[bool]>,
    rng: &mut R,
) -> Result<ExecRecord, Error> {
    let n = program.num_vertices();
    let ops = program.ops();
    let events: Vec<Vec<NoiseEvent>> = ops
        .iter()
        .map(|op| {
            let masked = match (op, readout_mask) {
                (Op::Measure { vertex, .. }, Some(mask)) => !mask.get(*vertex).copied().unwrap_or(false),
                _ => false,
            };
            noise_sites(op)
                .into_iter()
                .map(|site| match site {
                    NoiseSite::Readout if masked => NoiseEvent::None,
                    _ => sample_noise(noise, site, rng),
                })
                .collect()
        })
        .collect();
    let mut per_qubit = vec![Vec::new(); n];
    for (i, op) in ops.iter().enumerate() {
        let (support, len) = op.support();
        for &q in &support[..len] {
            per_qubit[q].push(i);
        }
    }
    let mut m = Machine {
        pattern,
        ops,
        events,
        per_qubit,
        cursor: vec![0; n],
        done: vec![false; ops.len()],
        state: StateVector::empty(),
        slot: vec![usize::MAX; n],
        outcomes: vec![None; n],
        record: ExecRecord {
            b: vec![0; n],
            delta: vec![Angle::ZERO; n],
            decoded: vec![0; n],
            peak_qubits: 0,
        },
    };
    match order {
        ExecOrder::Layered => {
            for i in 0..ops.len() {
                m.run_op(i, rng)?;
            }
        }
        ExecOrder::Lazy => {
            for i in 0..ops.len() {
                if matches!(ops[i], Op::Measure { .. }) {
                    m.run_op(i, rng)?;
                }
            }
        }
    }
    Ok(m.record)
}

/// Noiseless state after the preparation and CZ layers, qubit `v` = vertex `v`.
pub fn resource_state(program: &RoundProgram) -> Result<StateVector, Error> {
    let mut state = StateVector::empty();
    let mut slot: Vec<Vertex> = vec![usize::MAX; program.num_vertices()];
    for op in program.ops() {
        match *op {
            Op::Prepare { vertex, prep } => {
                slot[vertex] = state.push_qubit()?;
                match prep {
                    Preparation::Plus(theta) => {
                        state.apply_h(slot[vertex])?;
                        state.apply_rz(slot[vertex], theta.radians())?;
                    }
                    Preparation::Basis(d) => {
                        if d & 1 == 1 {
                            state.apply_pauli(slot[vertex], crate::sim::Pauli::X)?;
                        }
                    }
                }
            }
            Op::Cz(a, b) => state.apply_cz(slot[a], slot[b])?,
            Op::Measure { .. } => {}
        }
    }
    Ok(state)
}
