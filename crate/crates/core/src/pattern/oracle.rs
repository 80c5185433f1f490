//! Direct statevector semantics of a pattern, independent of blinding and
//! of the round executor.
//!
//! All non-output vertices are post-selected on outcome 0, where no
//! corrections apply; for a pattern with flow every branch gives the same
//! map, so this branch is the pattern's semantics.

use super::{MeasurementPattern, PatternError};
use crate::sim::StateVector;
use crate::Error;

/// Probability of each output string (first output most significant) for a
/// classical input `x`, encoded as `Z^x|+⟩` on each input vertex.
pub fn exact_output_distribution(pattern: &MeasurementPattern, x: &[u8]) -> Result<Vec<f64>, Error> {
    if x.len() != pattern.inputs().len() {
        return Err(PatternError::InputLength {
            expected: pattern.inputs().len(),
            found: x.len(),
        }
        .into());
    }
    let n = pattern.num_vertices();
    let mut state = StateVector::new(n)?;
    for v in 0..n {
        state.apply_h(v)?;
    }
    for (&v, &bit) in pattern.inputs().iter().zip(x) {
        if bit & 1 == 1 {
            state.apply_rz(v, std::f64::consts::PI)?;
        }
    }
    for &(a, b) in pattern.graph().edges() {
        state.apply_cz(a, b)?;
    }
    for v in 0..n {
        state.apply_rz(v, -pattern.angle(v).radians())?;
        state.apply_h(v)?;
    }
    for &v in pattern.flow_order() {
        if !pattern.outputs().contains(&v) {
            state.collapse(v, 0)?;
        }
    }
    let outputs = pattern.outputs();
    let mut dist = vec![0.0; 1 << outputs.len()];
    for (index, amp) in state.amplitudes().iter().enumerate() {
        let mut key = 0;
        for &o in outputs {
            key = (key << 1) | ((index >> o) & 1);
        }
        dist[key] += amp.norm_sqr();
    }
    Ok(dist)
}

/// The output string when it occurs with probability above `1 − 1e-9`.
pub fn deterministic_output(pattern: &MeasurementPattern, x: &[u8]) -> Result<Option<Vec<u8>>, Error> {
    let dist = exact_output_distribution(pattern, x)?;
    let m = pattern.outputs().len();
    Ok(dist.iter().position(|&p| p > 1.0 - 1e-9).map(|key| {
        (0..m).map(|i| ((key >> (m - 1 - i)) & 1) as u8).collect()
    }))
}

/// Every classical input of the pattern, first input most significant.
pub fn all_inputs(num_inputs: usize) -> Vec<Vec<u8>> {
    (0..1usize << num_inputs)
        .map(|k| (0..num_inputs).map(|i| ((k >> (num_inputs - 1 - i)) & 1) as u8).collect())
        .collect()
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::Angle;
    use crate::pattern::{cnot15, cnot_truth_table};

    #[test]
    fn cnot15_matches_cnot_unitary() {
        let (p, _) = cnot15();
        for x in all_inputs(2) {
            let out = deterministic_output(&p, &x).unwrap().expect("deterministic");
            assert_eq!(out, cnot_truth_table([x[0], x[1]]).to_vec(), "input {x:?}");
        }
    }

    #[test]
    fn corrupted_angle_breaks_cnot() {
        let (p, _) = cnot15();
        let bad = p.with_angle(5, Angle::ZERO).unwrap();
        let mismatch = all_inputs(2).into_iter().any(|x| {
            deterministic_output(&bad, &x).unwrap() != Some(cnot_truth_table([x[0], x[1]]).to_vec())
        });
        assert!(mismatch);
    }
}
