//! Hardware coupling maps and subgraph embedding of pattern graphs.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{Graph, PatternError, Vertex};

/// Physical qubits `0..num_qubits` and their couplings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingMap {
    pub edges: Vec<[usize; 2]>,
}

impl CouplingMap {
    pub fn num_qubits(&self) -> usize {
        self.edges.iter().flatten().map(|&q| q + 1).max().unwrap_or(0)
    }

    pub fn to_graph(&self) -> Result<Graph, PatternError> {
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::new(self.num_qubits(), &edges)
    }

    pub fn from_graph(graph: &Graph) -> Self {
        Self {
            edges: graph.edges().iter().map(|&(a, b)| [a, b]).collect(),
        }
    }

    /// Heavy-hex lattice: `rows` lines of `row_len` qubits, with a bridge
    /// qubit between consecutive rows every fourth column. Bridge columns
    /// start at 0 below even rows and at 2 below odd rows.
    pub fn heavy_hex(rows: usize, row_len: usize) -> Self {
        let row_qubit = |r: usize, c: usize| r * row_len + c;
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..row_len.saturating_sub(1) {
                edges.push([row_qubit(r, c), row_qubit(r, c + 1)]);
            }
        }
        let mut next = rows * row_len;
        for r in 0..rows.saturating_sub(1) {
            let start = if r % 2 == 0 { 0 } else { 2 };
            for c in (start..row_len).step_by(4) {
                edges.push([row_qubit(r, c), next]);
                edges.push([next, row_qubit(r + 1, c)]);
                next += 1;
            }
        }
        Self { edges }
    }
}

/// Finds an injective map `pattern vertex → physical qubit` under which every
/// pattern edge is a coupling edge. Backtracking, trying the same index first.
pub fn check_embedding(pattern: &Graph, coupling: &Graph) -> Option<Vec<usize>> {
    let n = pattern.num_vertices();
    if n > coupling.num_vertices() {
        return None;
    }
    let order = search_order(pattern);
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; coupling.num_vertices()];
    extend(pattern, coupling, &order, 0, &mut image, &mut used).then_some(image)
}

fn search_order(g: &Graph) -> Vec<Vertex> {
    let n = g.num_vertices();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &w in g.neighbours(u) {
                if !std::mem::replace(&mut seen[w], true) {
                    queue.push_back(w);
                }
            }
        }
    }
    order
}

fn extend(
    pattern: &Graph,
    coupling: &Graph,
    order: &[Vertex],
    depth: usize,
    image: &mut [usize],
    used: &mut [bool],
) -> bool {
    let Some(&v) = order.get(depth) else {
        return true;
    };
    let anchor = pattern
        .neighbours(v)
        .iter()
        .find(|&&w| image[w] != usize::MAX)
        .map(|&w| image[w]);
    let mut candidates: Vec<usize> = match anchor {
        Some(a) => coupling.neighbours(a).to_vec(),
        None => (0..coupling.num_vertices()).collect(),
    };
    if let Some(i) = candidates.iter().position(|&c| c == v) {
        candidates[..=i].rotate_right(1);
    }
    for c in candidates {
        if used[c] || coupling.degree(c) < pattern.degree(v) {
            continue;
        }
        let fits = pattern
            .neighbours(v)
            .iter()
            .all(|&w| image[w] == usize::MAX || coupling.has_edge(c, image[w]));
        if !fits {
            continue;
        }
        image[v] = c;
        used[c] = true;
        if extend(pattern, coupling, order, depth + 1, image, used) {
            return true;
        }
        image[v] = usize::MAX;
        used[c] = false;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::cnot15;

    fn assert_embedding(p: &Graph, c: &Graph, map: &[usize]) {
        let mut seen = std::collections::HashSet::new();
        assert!(map.iter().all(|&q| seen.insert(q)));
        for &(a, b) in p.edges() {
            assert!(c.has_edge(map[a], map[b]));
        }
    }

    #[test]
    fn heavy_hex_shape() {
        let hh = CouplingMap::heavy_hex(7, 15).to_graph().unwrap();
        assert_eq!(hh.num_vertices(), 129);
        assert!((0..129).all(|q| hh.degree(q) <= 3));
        // no triangles
        for &(a, b) in hh.edges() {
            for &w in hh.neighbours(a) {
                assert!(!hh.has_edge(w, b));
            }
        }
    }

    #[test]
    fn cnot15_embeds_in_heavy_hex() {
        let (p, _) = cnot15();
        let hh = CouplingMap::heavy_hex(7, 15).to_graph().unwrap();
        let map = check_embedding(p.graph(), &hh).unwrap();
        assert_embedding(p.graph(), &hh, &map);
    }

    #[test]
    fn triangle_does_not_embed() {
        let tri = Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let hh = CouplingMap::heavy_hex(7, 15).to_graph().unwrap();
        assert_eq!(check_embedding(&tri, &hh), None);
    }

    #[test]
    fn self_embedding_is_identity() {
        let (p, _) = cnot15();
        let map = check_embedding(p.graph(), p.graph()).unwrap();
        assert_eq!(map, (0..15).collect::<Vec<_>>());
        let hh = CouplingMap::heavy_hex(3, 9).to_graph().unwrap();
        let map = check_embedding(&hh, &hh).unwrap();
        assert_eq!(map, (0..hh.num_vertices()).collect::<Vec<_>>());
    }

    #[test]
    fn coupling_map_round_trips() {
        let cm = CouplingMap::heavy_hex(2, 5);
        let json = serde_json::to_string(&cm).unwrap();
        assert_eq!(serde_json::from_str::<CouplingMap>(&json).unwrap(), cm);
        assert_eq!(CouplingMap::from_graph(&cm.to_graph().unwrap()), cm);
    }
}
