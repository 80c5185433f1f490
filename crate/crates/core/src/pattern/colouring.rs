//! Proper vertex colourings; a test round traps one colour class.

use std::collections::VecDeque;

use thiserror::Error;

use super::{Graph, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColouringError {
    #[error("colouring has no classes")]
    Empty,
    #[error("vertex {0} does not exist")]
    UnknownVertex(Vertex),
    #[error("vertex {0} appears in more than one class")]
    Repeated(Vertex),
    #[error("vertex {0} has no colour")]
    Uncovered(Vertex),
    #[error("edge ({0},{1}) is monochromatic")]
    Monochromatic(Vertex, Vertex),
}

/// Odd cycle found while 2-colouring, listed as a closed walk without the repeated endpoint.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("graph is not bipartite: odd cycle {cycle:?}")]
pub struct OddCycle {
    pub cycle: Vec<Vertex>,
}

/// A partition `V_1 … V_k` of the vertex set with no monochromatic edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KColouring {
    classes: Vec<Vec<Vertex>>,
    colour_of: Vec<usize>,
}

impl KColouring {
    /// Checks that `classes` partition `graph`'s vertices properly.
    pub fn new(classes: Vec<Vec<Vertex>>, graph: &Graph) -> Result<Self, ColouringError> {
        if classes.is_empty() {
            return Err(ColouringError::Empty);
        }
        let n = graph.num_vertices();
        let mut colour_of = vec![usize::MAX; n];
        for (j, class) in classes.iter().enumerate() {
            for &v in class {
                if v >= n {
                    return Err(ColouringError::UnknownVertex(v));
                }
                if colour_of[v] != usize::MAX {
                    return Err(ColouringError::Repeated(v));
                }
                colour_of[v] = j;
            }
        }
        if let Some(v) = colour_of.iter().position(|&c| c == usize::MAX) {
            return Err(ColouringError::Uncovered(v));
        }
        for &(a, b) in graph.edges() {
            if colour_of[a] == colour_of[b] {
                return Err(ColouringError::Monochromatic(a, b));
            }
        }
        let mut classes = classes;
        for class in &mut classes {
            class.sort_unstable();
        }
        Ok(Self { classes, colour_of })
    }

    pub fn k(&self) -> usize {
        self.classes.len()
    }

    pub fn class(&self, j: usize) -> &[Vertex] {
        &self.classes[j]
    }

    pub fn classes(&self) -> &[Vec<Vertex>] {
        &self.classes
    }

    pub fn colour(&self, v: Vertex) -> usize {
        self.colour_of[v]
    }
}

/// Breadth-first 2-colouring. Graphs without edges get a single class.
pub fn two_colour(graph: &Graph) -> Result<KColouring, OddCycle> {
    let n = graph.num_vertices();
    let mut colour = vec![u8::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    for root in 0..n {
        if colour[root] != u8::MAX {
            continue;
        }
        colour[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &w in graph.neighbours(u) {
                if colour[w] == u8::MAX {
                    colour[w] = 1 - colour[u];
                    parent[w] = u;
                    depth[w] = depth[u] + 1;
                    queue.push_back(w);
                } else if colour[w] == colour[u] {
                    return Err(OddCycle {
                        cycle: tree_cycle(u, w, &parent, &depth),
                    });
                }
            }
        }
    }
    let k = if graph.edges().is_empty() { 1 } else { 2 };
    let mut classes = vec![Vec::new(); k];
    for (v, &c) in colour.iter().enumerate() {
        classes[usize::from(c).min(k - 1)].push(v);
    }
    Ok(KColouring::new(classes, graph).expect("breadth-first colouring is proper"))
}

// Closes the non-tree edge (a,b) through the BFS tree into a cycle.
fn tree_cycle(mut a: Vertex, mut b: Vertex, parent: &[usize], depth: &[usize]) -> Vec<Vertex> {
    let mut left = vec![a];
    let mut right = vec![b];
    while depth[a] > depth[b] {
        a = parent[a];
        left.push(a);
    }
    while depth[b] > depth[a] {
        b = parent[b];
        right.push(b);
    }
    while a != b {
        a = parent[a];
        b = parent[b];
        left.push(a);
        right.push(b);
    }
    right.pop();
    right.reverse();
    left.extend(right);
    left
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_of_three() {
        let g = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let c = two_colour(&g).unwrap();
        assert_eq!(c.classes(), &[vec![0, 2], vec![1]]);
    }

    #[test]
    fn triangle_has_odd_cycle() {
        let g = Graph::new(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let err = two_colour(&g).unwrap_err();
        assert_eq!(err.cycle.len() % 2, 1);
        for i in 0..err.cycle.len() {
            let (a, b) = (err.cycle[i], err.cycle[(i + 1) % err.cycle.len()]);
            assert!(g.has_edge(a, b));
        }
    }

    #[test]
    fn pentagon_witness_is_a_cycle() {
        let g = Graph::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let cycle = two_colour(&g).unwrap_err().cycle;
        assert_eq!(cycle.len(), 5);
    }

    #[test]
    fn single_vertex_gets_one_class() {
        let g = Graph::new(1, &[]).unwrap();
        assert_eq!(two_colour(&g).unwrap().k(), 1);
    }

    #[test]
    fn rejects_bad_partitions() {
        let g = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            KColouring::new(vec![vec![0, 1], vec![2]], &g),
            Err(ColouringError::Monochromatic(0, 1))
        );
        assert_eq!(KColouring::new(vec![vec![0, 2]], &g), Err(ColouringError::Uncovered(1)));
        assert_eq!(
            KColouring::new(vec![vec![0, 2], vec![1, 2]], &g),
            Err(ColouringError::Repeated(2))
        );
    }
}
