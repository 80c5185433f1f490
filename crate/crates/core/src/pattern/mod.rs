//! Measurement patterns: graph, inputs/outputs, quantised angles and flow.

mod cnot15;
mod colouring;
mod compile;
mod embed;
pub mod oracle;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angle::Angle;

pub use cnot15::{cnot15, cnot15_file, cnot_truth_table, CNOT15_DECISION_ACCEPT};
pub use colouring::{two_colour, ColouringError, KColouring, OddCycle};
pub use compile::{compile_round, Gate, MeasurementRule, Op, Preparation, RoundProgram};
pub use embed::{check_embedding, CouplingMap};

pub type Vertex = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PatternError {
    #[error("invalid pattern: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("vertex {0} does not exist")]
    UnknownVertex(Vertex),
    #[error("corrected angle of vertex {vertex} requested before vertex {missing} was measured")]
    OutOfOrder { vertex: Vertex, missing: Vertex },
    #[error("no preparation given for vertex {0}")]
    MissingPreparation(Vertex),
    #[error("no measurement rule given for vertex {0}")]
    MissingMeasurement(Vertex),
    #[error("classical input has {found} bits, pattern has {expected} inputs")]
    InputLength { expected: usize, found: usize },
}

fn join(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// One broken structural rule of a pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EdgeOutOfRange(Vertex, Vertex),
    SelfLoop(Vertex),
    DuplicateEdge(Vertex, Vertex),
    VertexOutOfRange(&'static str, Vertex),
    DuplicateVertex(&'static str, Vertex),
    AngleCount { expected: usize, found: usize },
    AngleOutsideTheta { vertex: Vertex, index: i64 },
    FlowOrderNotPermutation,
    MissingSuccessor(Vertex),
    SuccessorOnOutput(Vertex),
    SuccessorNotNeighbour { from: Vertex, to: Vertex },
    SuccessorNotLater { from: Vertex, to: Vertex },
    SuccessorIsInput { from: Vertex, to: Vertex },
    SuccessorNotInjective(Vertex),
    /// A neighbour of `f(vertex)` is measured before `vertex`.
    CausalOrder { vertex: Vertex, neighbour: Vertex },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EdgeOutOfRange(a, b) => write!(f, "edge ({a},{b}) references a missing vertex"),
            Violation::SelfLoop(v) => write!(f, "self-loop on vertex {v}"),
            Violation::DuplicateEdge(a, b) => write!(f, "duplicate edge ({a},{b})"),
            Violation::VertexOutOfRange(set, v) => write!(f, "{set} vertex {v} does not exist"),
            Violation::DuplicateVertex(set, v) => write!(f, "{set} lists vertex {v} twice"),
            Violation::AngleCount { expected, found } => {
                write!(f, "expected {expected} angles, found {found}")
            }
            Violation::AngleOutsideTheta { vertex, index } => {
                write!(f, "angle outside Θ: vertex {vertex} has index {index}")
            }
            Violation::FlowOrderNotPermutation => write!(f, "flow order is not a permutation of the vertices"),
            Violation::MissingSuccessor(v) => write!(f, "measured vertex {v} has no flow successor"),
            Violation::SuccessorOnOutput(v) => write!(f, "output vertex {v} has a flow successor"),
            Violation::SuccessorNotNeighbour { from, to } => {
                write!(f, "flow successor not neighbour: f({from}) = {to}")
            }
            Violation::SuccessorNotLater { from, to } => {
                write!(f, "flow successor not later: f({from}) = {to}")
            }
            Violation::SuccessorIsInput { from, to } => {
                write!(f, "flow successor is an input: f({from}) = {to}")
            }
            Violation::SuccessorNotInjective(v) => write!(f, "vertex {v} is the flow successor of two vertices"),
            Violation::CausalOrder { vertex, neighbour } => write!(
                f,
                "neighbour {neighbour} of f({vertex}) is measured before {vertex}"
            ),
        }
    }
}

/// Undirected simple graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<(Vertex, Vertex)>,
    adjacency: Vec<Vec<Vertex>>,
}

impl Graph {
    pub fn new(num_vertices: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, PatternError> {
        let violations = edge_violations(num_vertices, edges);
        if !violations.is_empty() {
            return Err(PatternError::Invalid(violations));
        }
        let mut adjacency = vec![Vec::new(); num_vertices];
        for &(a, b) in edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self {
            num_vertices,
            edges: edges.to_vec(),
            adjacency,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn neighbours(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        a < self.num_vertices && self.adjacency[a].binary_search(&b).is_ok()
    }
}

fn edge_violations(n: usize, edges: &[(Vertex, Vertex)]) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for &(a, b) in edges {
        if a >= n || b >= n {
            out.push(Violation::EdgeOutOfRange(a, b));
        } else if a == b {
            out.push(Violation::SelfLoop(a));
        } else if !seen.insert((a.min(b), a.max(b))) {
            out.push(Violation::DuplicateEdge(a, b));
        }
    }
    out
}

/// On-disk pattern schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternFile {
    pub vertices: usize,
    pub edges: Vec<[Vertex; 2]>,
    pub inputs: Vec<Vertex>,
    pub outputs: Vec<Vertex>,
    /// Multiples of π/4, each in `0..8`.
    pub angles: Vec<i64>,
    pub flow_order: Vec<Vertex>,
    pub flow_successor: BTreeMap<Vertex, Vertex>,
}

/// Lists every structural problem of a pattern file; empty means valid.
pub fn validate_pattern(file: &PatternFile) -> Vec<Violation> {
    let n = file.vertices;
    let edges: Vec<(Vertex, Vertex)> = file.edges.iter().map(|e| (e[0], e[1])).collect();
    let mut out = edge_violations(n, &edges);

    for (set, list) in [("input", &file.inputs), ("output", &file.outputs)] {
        let mut seen = vec![false; n];
        for &v in list {
            if v >= n {
                out.push(Violation::VertexOutOfRange(set, v));
            } else if std::mem::replace(&mut seen[v], true) {
                out.push(Violation::DuplicateVertex(set, v));
            }
        }
    }

    if file.angles.len() != n {
        out.push(Violation::AngleCount {
            expected: n,
            found: file.angles.len(),
        });
    }
    for (v, &a) in file.angles.iter().enumerate() {
        if !(0..8).contains(&a) {
            out.push(Violation::AngleOutsideTheta { vertex: v, index: a });
        }
    }

    let mut position = vec![usize::MAX; n];
    let mut permutation = file.flow_order.len() == n;
    for (i, &v) in file.flow_order.iter().enumerate() {
        if v >= n || position[v] != usize::MAX {
            permutation = false;
        } else {
            position[v] = i;
        }
    }
    if !permutation {
        out.push(Violation::FlowOrderNotPermutation);
    }

    let mut adjacency = vec![Vec::new(); n];
    for &(a, b) in &edges {
        if a < n && b < n && a != b {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
    }
    let is_output = |v: Vertex| file.outputs.contains(&v);
    let is_input = |v: Vertex| file.inputs.contains(&v);

    for v in 0..n {
        if !is_output(v) && !file.flow_successor.contains_key(&v) {
            out.push(Violation::MissingSuccessor(v));
        }
    }
    let mut targeted = vec![false; n];
    for (&from, &to) in &file.flow_successor {
        if from >= n || to >= n {
            out.push(Violation::VertexOutOfRange("flow_successor", from.max(to)));
            continue;
        }
        if is_output(from) {
            out.push(Violation::SuccessorOnOutput(from));
        }
        if !adjacency[from].contains(&to) {
            out.push(Violation::SuccessorNotNeighbour { from, to });
        }
        if is_input(to) {
            out.push(Violation::SuccessorIsInput { from, to });
        }
        if std::mem::replace(&mut targeted[to], true) {
            out.push(Violation::SuccessorNotInjective(to));
        }
        if permutation {
            if position[to] <= position[from] {
                out.push(Violation::SuccessorNotLater { from, to });
            }
            for &w in &adjacency[to] {
                if w != from && position[w] < position[from] {
                    out.push(Violation::CausalOrder {
                        vertex: from,
                        neighbour: w,
                    });
                }
            }
        }
    }
    out
}

/// A validated pattern. Immutable once built; share it read-only.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementPattern {
    graph: Graph,
    inputs: Vec<Vertex>,
    outputs: Vec<Vertex>,
    angles: Vec<Angle>,
    flow_order: Vec<Vertex>,
    flow_successor: Vec<Option<Vertex>>,
    position: Vec<usize>,
    x_dependency: Vec<Option<Vertex>>,
    z_dependencies: Vec<Vec<Vertex>>,
}

impl MeasurementPattern {
    pub fn from_file(file: &PatternFile) -> Result<Self, PatternError> {
        let violations = validate_pattern(file);
        if !violations.is_empty() {
            return Err(PatternError::Invalid(violations));
        }
        let n = file.vertices;
        let edges: Vec<(Vertex, Vertex)> = file.edges.iter().map(|e| (e[0], e[1])).collect();
        let graph = Graph::new(n, &edges)?;
        let angles = file
            .angles
            .iter()
            .map(|&a| Angle::wrapping(a))
            .collect::<Vec<_>>();
        let mut flow_successor = vec![None; n];
        let mut x_dependency = vec![None; n];
        for (&from, &to) in &file.flow_successor {
            flow_successor[from] = Some(to);
            x_dependency[to] = Some(from);
        }
        let mut z_dependencies = vec![Vec::new(); n];
        for (&from, &to) in &file.flow_successor {
            for &w in graph.neighbours(to) {
                if w != from {
                    z_dependencies[w].push(from);
                }
            }
        }
        let mut position = vec![0; n];
        for (i, &v) in file.flow_order.iter().enumerate() {
            position[v] = i;
        }
        for deps in &mut z_dependencies {
            deps.sort_by_key(|&d| position[d]);
        }
        Ok(Self {
            graph,
            inputs: file.inputs.clone(),
            outputs: file.outputs.clone(),
            angles,
            flow_order: file.flow_order.clone(),
            flow_successor,
            position,
            x_dependency,
            z_dependencies,
        })
    }

    pub fn to_file(&self) -> PatternFile {
        PatternFile {
            vertices: self.num_vertices(),
            edges: self.graph.edges().iter().map(|&(a, b)| [a, b]).collect(),
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            angles: self.angles.iter().map(|a| i64::from(a.index())).collect(),
            flow_order: self.flow_order.clone(),
            flow_successor: self
                .flow_successor
                .iter()
                .enumerate()
                .filter_map(|(v, s)| s.map(|s| (v, s)))
                .collect(),
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    pub fn inputs(&self) -> &[Vertex] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Vertex] {
        &self.outputs
    }

    pub fn angle(&self, v: Vertex) -> Angle {
        self.angles[v]
    }

    pub fn angles(&self) -> &[Angle] {
        &self.angles
    }

    pub fn flow_order(&self) -> &[Vertex] {
        &self.flow_order
    }

    pub fn flow_successor(&self, v: Vertex) -> Option<Vertex> {
        self.flow_successor[v]
    }

    /// Index of `v` in the measurement order.
    pub fn position(&self, v: Vertex) -> usize {
        self.position[v]
    }

    /// Position of `v` among the inputs, if it is one.
    pub fn input_index(&self, v: Vertex) -> Option<usize> {
        self.inputs.iter().position(|&i| i == v)
    }

    /// `f⁻¹(v)`: the vertex whose outcome sets `s_X(v)`.
    pub fn x_dependency(&self, v: Vertex) -> Option<Vertex> {
        self.x_dependency[v]
    }

    /// Vertices `i` with `v ∈ N(f(i))`, whose outcome parity sets `s_Z(v)`.
    pub fn z_dependencies(&self, v: Vertex) -> &[Vertex] {
        &self.z_dependencies[v]
    }

    /// Returns a copy with one angle replaced; used for perturbation checks.
    pub fn with_angle(&self, v: Vertex, angle: Angle) -> Result<Self, PatternError> {
        if v >= self.num_vertices() {
            return Err(PatternError::UnknownVertex(v));
        }
        let mut p = self.clone();
        p.angles[v] = angle;
        Ok(p)
    }
}

/// Byproduct bits accumulated for one vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CorrectionState {
    pub s_x: u8,
    pub s_z: u8,
}

/// Computes `s_X`, `s_Z` for `v`, reading earlier outcomes through `outcome`.
pub fn corrections_with(
    pattern: &MeasurementPattern,
    v: Vertex,
    mut outcome: impl FnMut(Vertex) -> Option<u8>,
) -> Result<CorrectionState, PatternError> {
    if v >= pattern.num_vertices() {
        return Err(PatternError::UnknownVertex(v));
    }
    let mut state = CorrectionState::default();
    if let Some(i) = pattern.x_dependency(v) {
        state.s_x = outcome(i).ok_or(PatternError::OutOfOrder { vertex: v, missing: i })? & 1;
    }
    for &i in pattern.z_dependencies(v) {
        state.s_z ^= outcome(i).ok_or(PatternError::OutOfOrder { vertex: v, missing: i })? & 1;
    }
    Ok(state)
}

/// `φ′_v = (−1)^{s_X} φ_v + s_Z π`, from decoded outcomes measured so far.
pub fn corrected_angle(
    pattern: &MeasurementPattern,
    v: Vertex,
    outcomes: &[Option<u8>],
) -> Result<Angle, PatternError> {
    let c = corrections_with(pattern, v, |i| outcomes.get(i).copied().flatten())?;
    let phi = pattern.angle(v);
    let signed = if c.s_x == 1 { -phi } else { phi };
    Ok(signed + Angle::pi_times(c.s_z))
}
