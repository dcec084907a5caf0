//! Simple undirected graphs with degree bookkeeping.
//!
//! A [`Graph`] is immutable once built. Every node has degree at least one,
//! adjacency lists are sorted, and the degree classes present in the graph
//! are cached as a [`DegreeDistribution`] so the simulation and mean-field
//! code can index per-class vectors without re-scanning the graph.

mod generate;
mod io;
mod rewire;
mod sample;
mod stats;

use std::collections::HashSet;

use thiserror::Error;

pub use generate::{
    build_configuration_model, build_configuration_model_with, sample_degree_sequence, ConfigModelOptions,
    ConfigModelReport, DegreeSpec,
};
pub use io::{
    parse_degree_sequence, parse_edge_list, read_degree_sequence, read_edge_list, write_degree_sequence,
    write_edge_list,
};
pub use rewire::{rewire_to_assortativity, RewireOutcome};
pub use sample::{sample_edge_end_y, sample_neighbor_z, sample_node, sample_node_x, Sampler};
pub use stats::{assortativity, degree_law, expected_degree, fosd_check, DegreeDistribution, JointDegreeStats};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("node {node} out of range for a graph with {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },
    #[error("node {0} is isolated; every node needs degree >= 1")]
    IsolatedNode(usize),
    #[error(
        "configuration model failed after {restarts} restarts: erasing collisions removed \
         {erased_stubs} of {total_stubs} stubs ({isolated} nodes left isolated)"
    )]
    ConstructionFailure {
        restarts: usize,
        erased_stubs: usize,
        total_stubs: usize,
        isolated: usize,
    },
    #[error("assortativity is undefined when every edge end has the same degree")]
    UndefinedAssortativity,
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A simple undirected graph without isolated nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    /// Canonical edge list: `u < v`, sorted lexicographically.
    edges: Vec<(usize, usize)>,
    class_of: Vec<usize>,
    distribution: DegreeDistribution,
}

impl Graph {
    /// Builds a graph on `node_count` nodes, validating simplicity and that
    /// no node is isolated. Edge orientation and order in the input do not
    /// matter.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if node_count == 0 {
            return Err(GraphError::InvalidArgument("graph needs at least one node".into()));
        }
        let mut canonical = Vec::new();
        for (u, v) in edges {
            for node in [u, v] {
                if node >= node_count {
                    return Err(GraphError::NodeOutOfRange { node, node_count });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            canonical.push((u.min(v), u.max(v)));
        }
        canonical.sort_unstable();
        if let Some(w) = canonical.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
        }

        let mut adjacency = vec![Vec::new(); node_count];
        for &(u, v) in &canonical {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        if let Some(v) = adjacency.iter().position(Vec::is_empty) {
            return Err(GraphError::IsolatedNode(v));
        }

        let degrees: Vec<usize> = adjacency.iter().map(Vec::len).collect();
        let distribution = DegreeDistribution::from_degrees(&degrees)?;
        let class_of = degrees
            .iter()
            .map(|&d| distribution.class_index(d).expect("degree present"))
            .collect();

        Ok(Graph {
            adjacency,
            edges: canonical,
            class_of,
            distribution,
        })
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    /// Largest degree `D`.
    pub fn max_degree(&self) -> usize {
        self.distribution.max_degree()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn degree_distribution(&self) -> &DegreeDistribution {
        &self.distribution
    }

    /// Index of `v`'s degree class within [`Graph::degree_distribution`].
    pub fn class_of(&self, v: usize) -> usize {
        self.class_of[v]
    }

    /// Copy of the graph with node `v` renamed to `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Graph, GraphError> {
        let n = self.node_count();
        if perm.len() != n {
            return Err(GraphError::InvalidArgument(format!(
                "permutation has length {} for {} nodes",
                perm.len(),
                n
            )));
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(GraphError::InvalidArgument("not a permutation".into()));
            }
        }
        Graph::from_edges(n, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))
    }

    /// Disjoint union; nodes of `other` are shifted past this graph's nodes.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let offset = self.node_count();
        let edges = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|&(u, v)| (u + offset, v + offset)));
        Graph::from_edges(offset + other.node_count(), edges).expect("union of valid graphs is valid")
    }

    pub(crate) fn edge_set(&self) -> HashSet<(usize, usize)> {
        self.edges.iter().copied().collect()
    }
}
