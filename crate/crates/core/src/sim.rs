//! Dense statevector simulation with trajectory-sampled Pauli noise.
//!
//! Qubit `q` is bit `q` of the amplitude index. Registers can grow and shrink
//! at run time ([`StateVector::push_qubit`], [`StateVector::remove_qubit`]),
//! which lets the round executor keep only the live part of a graph state in
//! memory.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 24;

/// Norm tolerance checked after collapses and in tests.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("register size {0} outside supported range 1..={MAX_QUBITS}")]
    UnsupportedSize(usize),
    #[error("qubit index {index} out of range for {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },
    #[error("two-qubit gate needs distinct qubits, got {0} twice")]
    RepeatedQubit(usize),
    #[error("measurement branch for outcome {outcome} on qubit {qubit} has zero norm")]
    DegenerateCollapse { qubit: usize, outcome: u8 },
    #[error("qubit {0} is not in a computational basis state and cannot be removed")]
    NotInBasisState(usize),
    #[error("amplitude vector length {0} is not a power of two")]
    BadLength(usize),
    #[error("noise probability `{name}` = {value} outside [0, 1]")]
    BadProbability { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `num_qubits` qubits.
    pub fn new(num_qubits: usize) -> Result<Self, SimError> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(SimError::UnsupportedSize(num_qubits));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// A register with no qubits, holding the scalar 1.
    pub fn empty() -> Self {
        Self {
            num_qubits: 0,
            amplitudes: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self, SimError> {
        let len = amplitudes.len();
        if !len.is_power_of_two() {
            return Err(SimError::BadLength(len));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(SimError::UnsupportedSize(num_qubits));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check(&self, q: usize) -> Result<usize, SimError> {
        if q >= self.num_qubits {
            Err(SimError::QubitOutOfRange {
                index: q,
                num_qubits: self.num_qubits,
            })
        } else {
            Ok(1 << q)
        }
    }

    /// Visits every index pair `(i, i | mask)` with bit `q` clear in `i`.
    fn for_each_pair(&mut self, mask: usize, mut f: impl FnMut(&mut Complex64, &mut Complex64)) {
        let len = self.amplitudes.len();
        let mut base = 0;
        while base < len {
            for i in base..base + mask {
                let (lo, hi) = self.amplitudes.split_at_mut(i + mask);
                f(&mut lo[i], &mut hi[0]);
            }
            base += mask << 1;
        }
    }

    pub fn apply_h(&mut self, q: usize) -> Result<(), SimError> {
        let mask = self.check(q)?;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        self.for_each_pair(mask, |a, b| {
            let (x, y) = (*a, *b);
            *a = (x + y) * s;
            *b = (x - y) * s;
        });
        Ok(())
    }

    /// `diag(1, e^{iθ})` on qubit `q`.
    pub fn apply_rz(&mut self, q: usize, angle: f64) -> Result<(), SimError> {
        let mask = self.check(q)?;
        let phase = Complex64::from_polar(1.0, angle);
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if i & mask != 0 {
                *a *= phase;
            }
        }
        Ok(())
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) -> Result<(), SimError> {
        if a == b {
            return Err(SimError::RepeatedQubit(a));
        }
        let mask = self.check(a)? | self.check(b)?;
        for (i, amp) in self.amplitudes.iter_mut().enumerate() {
            if i & mask == mask {
                *amp = -*amp;
            }
        }
        Ok(())
    }

    pub fn apply_pauli(&mut self, q: usize, pauli: Pauli) -> Result<(), SimError> {
        let mask = self.check(q)?;
        match pauli {
            Pauli::I => {}
            Pauli::X => self.for_each_pair(mask, std::mem::swap),
            Pauli::Y => {
                let i = Complex64::new(0.0, 1.0);
                self.for_each_pair(mask, |a, b| {
                    let (x, y) = (*a, *b);
                    *a = -i * y;
                    *b = i * x;
                });
            }
            Pauli::Z => {
                for (idx, a) in self.amplitudes.iter_mut().enumerate() {
                    if idx & mask != 0 {
                        *a = -*a;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_pauli_error(&mut self, err: &PauliError) -> Result<(), SimError> {
        for (&q, &p) in err.qubits.iter().zip(&err.labels) {
            self.apply_pauli(q, p)?;
        }
        Ok(())
    }

    /// Born probability of reading 1 on qubit `q`.
    pub fn probability_one(&self, q: usize) -> Result<f64, SimError> {
        let mask = self.check(q)?;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Samples a computational-basis outcome, collapses and renormalises.
    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<u8, SimError> {
        let p1 = self.probability_one(q)?;
        let outcome = u8::from(rng.random::<f64>() < p1);
        self.collapse(q, outcome)?;
        Ok(outcome)
    }

    /// Projects qubit `q` onto `|outcome⟩` and renormalises.
    pub fn collapse(&mut self, q: usize, outcome: u8) -> Result<(), SimError> {
        let mask = self.check(q)?;
        let keep_set = outcome == 1;
        let mut norm = 0.0;
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if (i & mask != 0) == keep_set {
                norm += a.norm_sqr();
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        if norm <= f64::EPSILON {
            return Err(SimError::DegenerateCollapse { qubit: q, outcome });
        }
        let scale = norm.sqrt().recip();
        for a in &mut self.amplitudes {
            *a *= scale;
        }
        Ok(())
    }

    /// Appends a fresh `|0⟩` qubit and returns its index.
    pub fn push_qubit(&mut self) -> Result<usize, SimError> {
        if self.num_qubits >= MAX_QUBITS {
            return Err(SimError::UnsupportedSize(self.num_qubits + 1));
        }
        let len = self.amplitudes.len();
        self.amplitudes.resize(2 * len, Complex64::new(0.0, 0.0));
        self.num_qubits += 1;
        Ok(self.num_qubits - 1)
    }

    /// Drops a qubit that sits in a basis state (e.g. right after
    /// measurement), returning its value. Higher qubit indices shift down.
    pub fn remove_qubit(&mut self, q: usize) -> Result<u8, SimError> {
        let p1 = self.probability_one(q)?;
        let value = if p1 < 1e-12 {
            0u8
        } else if p1 > 1.0 - 1e-12 {
            1u8
        } else {
            return Err(SimError::NotInBasisState(q));
        };
        let low = (1usize << q) - 1;
        let half = self.amplitudes.len() / 2;
        let compact: Vec<Complex64> = (0..half)
            .map(|j| {
                let idx = ((j & !low) << 1) | (usize::from(value) << q) | (j & low);
                self.amplitudes[idx]
            })
            .collect();
        self.amplitudes = compact;
        self.num_qubits -= 1;
        Ok(value)
    }
}

/// Single-qubit Pauli label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
}

/// A Pauli string restricted to the support of one gate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliError {
    pub qubits: Vec<usize>,
    pub labels: Vec<Pauli>,
}

/// Per-site error probabilities. Rates are configuration, not constants.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    pub single_qubit_depolarizing: f64,
    pub two_qubit_depolarizing: f64,
    pub readout_flip: f64,
    pub state_prep_flip: f64,
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for (name, value) in self.named() {
            if !(0.0..=1.0).contains(&value) {
                return Err(SimError::BadProbability { name, value });
            }
        }
        Ok(())
    }

    pub fn named(&self) -> [(&'static str, f64); 4] {
        [
            ("single_qubit_depolarizing", self.single_qubit_depolarizing),
            ("two_qubit_depolarizing", self.two_qubit_depolarizing),
            ("readout_flip", self.readout_flip),
            ("state_prep_flip", self.state_prep_flip),
        ]
    }

    /// Every rate multiplied by `factor`, clamped to `[0, 1]`.
    pub fn scaled(&self, factor: f64) -> Self {
        let f = |p: f64| (p * factor).clamp(0.0, 1.0);
        Self {
            single_qubit_depolarizing: f(self.single_qubit_depolarizing),
            two_qubit_depolarizing: f(self.two_qubit_depolarizing),
            readout_flip: f(self.readout_flip),
            state_prep_flip: f(self.state_prep_flip),
        }
    }

    pub fn is_noiseless(&self) -> bool {
        self.named().iter().all(|&(_, p)| p == 0.0)
    }
}

/// Where a noise channel acts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseSite {
    /// Bit flip before a qubit's preparation gates.
    StatePrep(usize),
    OneQubitGate(usize),
    TwoQubitGate(usize, usize),
    /// Classical flip of a reported measurement bit.
    Readout,
}

/// Outcome of sampling one noise site.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NoiseEvent {
    None,
    Pauli(PauliError),
    ReadoutFlip,
}

/// Draws the error (if any) at `site`. Depolarizing sites pick uniformly
/// among the 3 (one qubit) or 15 (two qubits) non-identity Paulis.
pub fn sample_noise<R: Rng + ?Sized>(model: &NoiseModel, site: NoiseSite, rng: &mut R) -> NoiseEvent {
    let p = match site {
        NoiseSite::StatePrep(_) => model.state_prep_flip,
        NoiseSite::OneQubitGate(_) => model.single_qubit_depolarizing,
        NoiseSite::TwoQubitGate(..) => model.two_qubit_depolarizing,
        NoiseSite::Readout => model.readout_flip,
    };
    if p <= 0.0 || rng.random::<f64>() >= p {
        return NoiseEvent::None;
    }
    match site {
        NoiseSite::StatePrep(q) => NoiseEvent::Pauli(PauliError {
            qubits: vec![q],
            labels: vec![Pauli::X],
        }),
        NoiseSite::OneQubitGate(q) => NoiseEvent::Pauli(PauliError {
            qubits: vec![q],
            labels: vec![Pauli::ALL[rng.random_range(1..4usize)]],
        }),
        NoiseSite::TwoQubitGate(a, b) => {
            let k = rng.random_range(1..16usize);
            NoiseEvent::Pauli(PauliError {
                qubits: vec![a, b],
                labels: vec![Pauli::ALL[k % 4], Pauli::ALL[k / 4]],
            })
        }
        NoiseSite::Readout => NoiseEvent::ReadoutFlip,
    }
}

/// Samples the channel at `site` and applies any Pauli to `state`.
/// A readout flip is returned to the caller, who owns the classical bit.
pub fn apply_noise<R: Rng + ?Sized>(
    state: &mut StateVector,
    model: &NoiseModel,
    site: NoiseSite,
    rng: &mut R,
) -> Result<NoiseEvent, SimError> {
    let event = sample_noise(model, site, rng);
    if let NoiseEvent::Pauli(err) = &event {
        state.apply_pauli_error(err)?;
    }
    Ok(event)
}
