//! Degree-preserving double-edge swaps toward a target assortativity.

use rand::Rng;

use super::{Graph, GraphError};

#[derive(Debug, Clone)]
pub struct RewireOutcome {
    pub graph: Graph,
    /// Assortativity of `graph`.
    pub assortativity: f64,
    pub converged: bool,
    pub accepted_swaps: usize,
    pub attempts: usize,
}

/// Pearson correlation of edge-end degrees, kept as integer sums.
///
/// Swaps preserve every degree, so the first and second moments of the
/// edge-end degree law never change and only `Σ_edges d(u) d(v)` moves.
struct EndDegreeMoments {
    edges: f64,
    mean: f64,
    variance: f64,
    cross: u64,
}

impl EndDegreeMoments {
    fn new(g: &Graph) -> Self {
        let (mut first, mut second, mut cross) = (0u64, 0u64, 0u64);
        for &(u, v) in g.edges() {
            let (a, b) = (g.degree(u) as u64, g.degree(v) as u64);
            first += a + b;
            second += a * a + b * b;
            cross += a * b;
        }
        let ends = 2.0 * g.edge_count() as f64;
        let mean = first as f64 / ends;
        EndDegreeMoments {
            edges: g.edge_count() as f64,
            mean,
            variance: second as f64 / ends - mean * mean,
            cross,
        }
    }

    fn r_with(&self, cross: u64) -> f64 {
        (cross as f64 / self.edges - self.mean * self.mean) / self.variance
    }
}

/// Greedy double-edge-swap rewiring.
///
/// Each attempt picks two distinct edges `(a,b)`, `(c,d)` uniformly and scores
/// both alternative pairings, `{(a,c),(b,d)}` and `{(a,d),(b,c)}`. The pairing
/// that lands closer to `target_r` is applied if it keeps the graph simple and
/// strictly reduces `|r − target_r|`; otherwise the other pairing is tried
/// under the same rule. The loop ends once `|r − target_r| ≤ tolerance` or
/// after `max_swaps` attempts, in which case the outcome is flagged as not
/// converged.
pub fn rewire_to_assortativity<R: Rng + ?Sized>(
    g: &Graph,
    target_r: f64,
    max_swaps: usize,
    tolerance: f64,
    rng: &mut R,
) -> Result<RewireOutcome, GraphError> {
    if g.edge_count() < 2 {
        return Err(GraphError::InvalidArgument("rewiring needs at least two edges".into()));
    }
    let mut moments = EndDegreeMoments::new(g);
    if moments.variance <= 1e-12 * moments.mean * moments.mean {
        return Err(GraphError::UndefinedAssortativity);
    }

    let key = |u: usize, v: usize| (u.min(v), u.max(v));
    let degree = |v: usize| g.degree(v) as u64;
    let mut edges = g.edges().to_vec();
    let mut present = g.edge_set();
    let mut r = moments.r_with(moments.cross);
    let mut accepted = 0;
    let mut attempts = 0;

    while (r - target_r).abs() > tolerance && attempts < max_swaps {
        attempts += 1;
        let i = rng.gen_range(0..edges.len());
        let j = rng.gen_range(0..edges.len() - 1);
        let j = if j >= i { j + 1 } else { j };
        let (a, b) = edges[i];
        let (c, d) = edges[j];
        let old = degree(a) * degree(b) + degree(c) * degree(d);

        let mut candidates = [((a, c), (b, d)), ((a, d), (b, c))].map(|(e1, e2)| {
            let cross = moments.cross - old + degree(e1.0) * degree(e1.1) + degree(e2.0) * degree(e2.1);
            (e1, e2, cross, (moments.r_with(cross) - target_r).abs())
        });
        if candidates[1].3 < candidates[0].3 {
            candidates.swap(0, 1);
        }
        let current = (r - target_r).abs();
        for (e1, e2, cross, distance) in candidates {
            if distance >= current {
                break;
            }
            let (k1, k2) = (key(e1.0, e1.1), key(e2.0, e2.1));
            if e1.0 == e1.1 || e2.0 == e2.1 || k1 == k2 || present.contains(&k1) || present.contains(&k2) {
                continue;
            }
            present.remove(&edges[i]);
            present.remove(&edges[j]);
            present.insert(k1);
            present.insert(k2);
            edges[i] = k1;
            edges[j] = k2;
            moments.cross = cross;
            r = moments.r_with(cross);
            accepted += 1;
            break;
        }
    }

    let graph = Graph::from_edges(g.node_count(), edges)?;
    Ok(RewireOutcome {
        graph,
        assortativity: r,
        converged: (r - target_r).abs() <= tolerance,
        accepted_swaps: accepted,
        attempts,
    })
}
