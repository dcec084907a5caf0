//! Degree and joint-degree statistics.
//!
//! All per-class vectors are indexed by *class index*, i.e. the position of
//! a degree among the degrees actually present, in ascending order. Classes
//! with `P(k) = 0` never appear.

use super::{Graph, GraphError, Sampler};

/// `P(k)` over the degree classes present, with the class counts `M(k)` when
/// built from a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    degrees: Vec<usize>,
    counts: Option<Vec<usize>>,
    probs: Vec<f64>,
}

impl DegreeDistribution {
    /// From a per-node degree sequence; `P(k) = M(k) / M`.
    pub fn from_degrees(degrees: &[usize]) -> Result<Self, GraphError> {
        if degrees.is_empty() {
            return Err(GraphError::InvalidArgument("empty degree sequence".into()));
        }
        if degrees.contains(&0) {
            return Err(GraphError::InvalidArgument("degree 0 is not allowed".into()));
        }
        let mut sorted = degrees.to_vec();
        sorted.sort_unstable();
        let mut classes = Vec::new();
        let mut counts = Vec::new();
        for d in sorted {
            if classes.last() == Some(&d) {
                *counts.last_mut().unwrap() += 1;
            } else {
                classes.push(d);
                counts.push(1usize);
            }
        }
        let m = degrees.len() as f64;
        let probs = counts.iter().map(|&c| c as f64 / m).collect();
        Ok(DegreeDistribution {
            degrees: classes,
            counts: Some(counts),
            probs,
        })
    }

    /// From `(k, P(k))` pairs. Zero-probability classes are dropped; the
    /// remaining weights must sum to one within `1e-9` and are renormalised.
    pub fn from_probabilities(pairs: &[(usize, f64)]) -> Result<Self, GraphError> {
        let mut pairs: Vec<(usize, f64)> = pairs.iter().copied().filter(|&(_, p)| p != 0.0).collect();
        pairs.sort_by_key(|&(k, _)| k);
        if pairs.is_empty() {
            return Err(GraphError::InvalidArgument("distribution has no mass".into()));
        }
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(GraphError::InvalidArgument(format!("degree {} listed twice", w[0].0)));
            }
        }
        for &(k, p) in &pairs {
            if k == 0 {
                return Err(GraphError::InvalidArgument("degree 0 is not allowed".into()));
            }
            if !(p.is_finite() && p > 0.0) {
                return Err(GraphError::InvalidArgument(format!(
                    "P({k}) = {p} is not a probability"
                )));
            }
        }
        let total: f64 = pairs.iter().map(|&(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(GraphError::InvalidArgument(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(DegreeDistribution {
            degrees: pairs.iter().map(|&(k, _)| k).collect(),
            counts: None,
            probs: pairs.iter().map(|&(_, p)| p / total).collect(),
        })
    }

    /// Degrees present, ascending.
    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `M(k)` per class, when built from a degree sequence.
    pub fn counts(&self) -> Option<&[usize]> {
        self.counts.as_deref()
    }

    pub fn class_count(&self) -> usize {
        self.degrees.len()
    }

    pub fn class_index(&self, k: usize) -> Option<usize> {
        self.degrees.binary_search(&k).ok()
    }

    /// `P(k)`, zero for absent degrees.
    pub fn prob(&self, k: usize) -> f64 {
        self.class_index(k).map_or(0.0, |i| self.probs[i])
    }

    pub fn max_degree(&self) -> usize {
        *self.degrees.last().expect("nonempty")
    }

    /// Average degree `k̄ = E[d(X)]`.
    pub fn mean_degree(&self) -> f64 {
        expected_degree(self, &self.probs)
    }

    /// Population-weighted average `Σ_k P(k) x(k)` of a per-class vector.
    pub fn average(&self, x: &[f64]) -> f64 {
        self.probs.iter().zip(x).map(|(p, v)| p * v).sum()
    }
}

/// Joint degree statistics of the edge ends of a graph.
///
/// `e(k, k')` is the fraction of ordered edge-end pairs joining degrees `k`
/// and `k'`, `q(k)` its marginal (the degree law of a random edge end), and
/// `P(k | k') = e(k, k') / q(k')` the probability that a random neighbour of
/// a degree-`k'` node has degree `k`. Dividing by `q(k')` (rather than
/// `q(k)`) is what makes each column of the conditional a distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDegreeStats {
    distribution: DegreeDistribution,
    joint: Vec<f64>,
    edge_marginal: Vec<f64>,
    conditional: Vec<f64>,
    z_law: Vec<f64>,
    sigma_q: f64,
}

impl JointDegreeStats {
    pub fn from_graph(g: &Graph) -> Self {
        let distribution = g.degree_distribution().clone();
        let c = distribution.class_count();
        let mut counts = vec![0u64; c * c];
        for &(u, v) in g.edges() {
            let (i, j) = (g.class_of(u), g.class_of(v));
            counts[i * c + j] += 1;
            counts[j * c + i] += 1;
        }
        let ends = 2.0 * g.edge_count() as f64;
        let joint = counts.iter().map(|&n| n as f64 / ends).collect();
        Self::from_parts(distribution, joint)
    }

    /// Degree-uncorrelated statistics for a bare distribution:
    /// `e(k, k') = q(k) q(k')` with `q(k) = k P(k) / k̄`.
    pub fn uncorrelated(distribution: &DegreeDistribution) -> Self {
        let mean = distribution.mean_degree();
        let q: Vec<f64> = distribution
            .degrees()
            .iter()
            .zip(distribution.probs())
            .map(|(&k, &p)| k as f64 * p / mean)
            .collect();
        let joint = q.iter().flat_map(|&a| q.iter().map(move |&b| a * b)).collect();
        Self::from_parts(distribution.clone(), joint)
    }

    fn from_parts(distribution: DegreeDistribution, joint: Vec<f64>) -> Self {
        let c = distribution.class_count();
        let edge_marginal: Vec<f64> = (0..c).map(|i| joint[i * c..(i + 1) * c].iter().sum()).collect();
        let mut conditional = vec![0.0; c * c];
        for i in 0..c {
            for j in 0..c {
                if edge_marginal[j] > 0.0 {
                    conditional[i * c + j] = joint[i * c + j] / edge_marginal[j];
                }
            }
        }
        let probs = distribution.probs();
        let z_law = (0..c)
            .map(|i| (0..c).map(|j| probs[j] * conditional[i * c + j]).sum())
            .collect();
        let ks = distribution.degrees();
        let mean_q: f64 = ks.iter().zip(&edge_marginal).map(|(&k, q)| k as f64 * q).sum();
        let second_q: f64 = ks.iter().zip(&edge_marginal).map(|(&k, q)| (k * k) as f64 * q).sum();
        let sigma_q = (second_q - mean_q * mean_q).max(0.0).sqrt();
        JointDegreeStats {
            distribution,
            joint,
            edge_marginal,
            conditional,
            z_law,
            sigma_q,
        }
    }

    pub fn distribution(&self) -> &DegreeDistribution {
        &self.distribution
    }

    pub fn class_count(&self) -> usize {
        self.distribution.class_count()
    }

    pub fn degrees(&self) -> &[usize] {
        self.distribution.degrees()
    }

    /// `e(k_i, k_j)` by class index.
    pub fn joint(&self, i: usize, j: usize) -> f64 {
        self.joint[i * self.class_count() + j]
    }

    /// `q(k_i)`.
    pub fn edge_marginal(&self) -> &[f64] {
        &self.edge_marginal
    }

    /// `P(k_i | k_j)`: probability that a random neighbour of a degree-`k_j`
    /// node has degree `k_i`.
    pub fn conditional(&self, i: usize, j: usize) -> f64 {
        self.conditional[i * self.class_count() + j]
    }

    /// `Pr[d(Z) = k] = Σ_{k'} P(k') P(k | k')`.
    pub fn z_law(&self) -> &[f64] {
        &self.z_law
    }

    /// Standard deviation of `q`.
    pub fn sigma_q(&self) -> f64 {
        self.sigma_q
    }
}

/// Neighbour-degree correlation
/// `r = σ_q⁻² Σ_{k,k'} k k' (e(k,k') − q(k) q(k'))`.
pub fn assortativity(stats: &JointDegreeStats) -> Result<f64, GraphError> {
    let ks = stats.degrees();
    let q = stats.edge_marginal();
    let second: f64 = ks.iter().zip(q).map(|(&k, q)| (k * k) as f64 * q).sum();
    let variance = stats.sigma_q * stats.sigma_q;
    if variance <= 1e-12 * second {
        return Err(GraphError::UndefinedAssortativity);
    }
    let c = ks.len();
    let mut covariance = 0.0;
    for i in 0..c {
        for j in 0..c {
            covariance += (ks[i] * ks[j]) as f64 * (stats.joint(i, j) - q[i] * q[j]);
        }
    }
    Ok(covariance / variance)
}

/// Exact degree law of the node returned by `sampler`, per class.
pub fn degree_law(stats: &JointDegreeStats, sampler: Sampler) -> Vec<f64> {
    match sampler {
        Sampler::X => stats.distribution().probs().to_vec(),
        Sampler::Y => stats.edge_marginal().to_vec(),
        Sampler::Z => stats.z_law().to_vec(),
    }
}

pub fn expected_degree(distribution: &DegreeDistribution, law: &[f64]) -> f64 {
    distribution.degrees().iter().zip(law).map(|(&k, p)| k as f64 * p).sum()
}

/// True when `law_a` first-order stochastically dominates `law_b`: the CDF of
/// `a` lies on or below that of `b` everywhere (within `1e-12`). Laws on a
/// shorter support are padded with zeros.
pub fn fosd_check(law_a: &[f64], law_b: &[f64]) -> bool {
    let n = law_a.len().max(law_b.len());
    let (mut cdf_a, mut cdf_b) = (0.0, 0.0);
    for i in 0..n {
        cdf_a += law_a.get(i).copied().unwrap_or(0.0);
        cdf_b += law_b.get(i).copied().unwrap_or(0.0);
        if cdf_a > cdf_b + 1e-12 {
            return false;
        }
    }
    true
}
