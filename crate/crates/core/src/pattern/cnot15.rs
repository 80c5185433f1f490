//! Built-in 15-vertex CNOT pattern.
//!
//! Two wires joined by one edge. Wire A (vertices 0–7) carries the control
//! and wire B (8–14) the target; the cross edge (3, 8) acts as a CZ between
//! the logical qubits, and the π/2 measurements on 4, 5, 6 turn the
//! surrounding Hadamards on wire A into the frame change that makes the
//! overall map a CNOT. The pattern has a causal flow along each wire.

use std::collections::BTreeMap;

use super::{KColouring, MeasurementPattern, PatternFile};

/// Output strings (first output most significant) on which `q = 1`.
pub const CNOT15_DECISION_ACCEPT: &[&str] = &["10"];

pub fn cnot15_file() -> PatternFile {
    let mut edges: Vec<[usize; 2]> = (0..7).map(|i| [i, i + 1]).collect();
    edges.extend((8..14).map(|i| [i, i + 1]));
    edges.push([3, 8]);
    let mut angles = vec![0i64; 15];
    for v in [4, 5, 6] {
        angles[v] = 2;
    }
    let flow_successor: BTreeMap<usize, usize> =
        (0..7).chain(8..14).map(|i| (i, i + 1)).collect();
    let flow_order = (0..7).chain(8..14).chain([7, 14]).collect();
    PatternFile {
        vertices: 15,
        edges,
        inputs: vec![0, 8],
        outputs: vec![7, 14],
        angles,
        flow_order,
        flow_successor,
    }
}

/// The pattern and its 2-colouring.
pub fn cnot15() -> (MeasurementPattern, KColouring) {
    let pattern = MeasurementPattern::from_file(&cnot15_file()).expect("built-in pattern is valid");
    let classes = vec![
        vec![0, 2, 4, 6, 8, 10, 12, 14],
        vec![1, 3, 5, 7, 9, 11, 13],
    ];
    let colouring = KColouring::new(classes, pattern.graph()).expect("built-in colouring is proper");
    (pattern, colouring)
}

/// `CNOT|a b⟩ = |a, a⊕b⟩`, control first.
pub fn cnot_truth_table(input: [u8; 2]) -> [u8; 2] {
    [input[0], input[0] ^ input[1]]
}
