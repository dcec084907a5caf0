use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Graph;

/// How a node is drawn from a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sampler {
    /// Uniform random node.
    X,
    /// Uniform end of a uniform edge; node `v` has weight `d(v) / Σ d`.
    Y,
    /// Uniform neighbour of a uniform node.
    Z,
}

impl Sampler {
    pub const ALL: [Sampler; 3] = [Sampler::X, Sampler::Y, Sampler::Z];

    pub fn name(self) -> &'static str {
        match self {
            Sampler::X => "X",
            Sampler::Y => "Y",
            Sampler::Z => "Z",
        }
    }
}

pub fn sample_node_x<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> usize {
    rng.gen_range(0..g.node_count())
}

pub fn sample_edge_end_y<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> usize {
    let (u, v) = g.edges()[rng.gen_range(0..g.edge_count())];
    if rng.gen::<bool>() {
        u
    } else {
        v
    }
}

pub fn sample_neighbor_z<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> usize {
    let x = sample_node_x(g, rng);
    let adj = g.neighbors(x);
    adj[rng.gen_range(0..adj.len())]
}

pub fn sample_node<R: Rng + ?Sized>(g: &Graph, sampler: Sampler, rng: &mut R) -> usize {
    match sampler {
        Sampler::X => sample_node_x(g, rng),
        Sampler::Y => sample_edge_end_y(g, rng),
        Sampler::Z => sample_neighbor_z(g, rng),
    }
}
