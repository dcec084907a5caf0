//! Degree sequences and configuration-model graphs.

use std::collections::HashSet;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Graph, GraphError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DegreeSpec {
    /// `P(k) ∝ k^-alpha` on `k_min..=k_max`.
    PowerLaw { alpha: f64, k_min: usize, k_max: usize },
    /// A fixed sequence; its length must match the requested node count.
    Explicit { degrees: Vec<usize> },
}

/// Draws `n` degrees and repairs the parity of their sum.
///
/// If the sum is odd one uniformly chosen entry is bumped by one: up when it
/// is below the upper bound, otherwise down (when above the lower bound). The
/// bounds are `[k_min, k_max]` for power laws and `[1, n - 1]` for explicit
/// sequences.
pub fn sample_degree_sequence<R: Rng + ?Sized>(
    spec: &DegreeSpec,
    n: usize,
    rng: &mut R,
) -> Result<Vec<usize>, GraphError> {
    if n < 2 {
        return Err(GraphError::InvalidArgument(format!("need at least 2 nodes, got {n}")));
    }
    let (mut degrees, lo, hi) = match spec {
        &DegreeSpec::PowerLaw { alpha, k_min, k_max } => {
            if !(alpha > 1.0) {
                return Err(GraphError::InvalidArgument(format!(
                    "power-law exponent {alpha} must exceed 1"
                )));
            }
            if k_min == 0 || k_min > k_max || k_max >= n {
                return Err(GraphError::InvalidArgument(format!(
                    "degree range [{k_min}, {k_max}] infeasible for {n} nodes"
                )));
            }
            let weights = (k_min..=k_max).map(|k| (k as f64).powf(-alpha));
            let dist = WeightedIndex::new(weights).map_err(|e| GraphError::InvalidArgument(e.to_string()))?;
            let degrees = (0..n).map(|_| k_min + dist.sample(rng)).collect();
            (degrees, k_min, k_max)
        }
        DegreeSpec::Explicit { degrees } => {
            if degrees.len() != n {
                return Err(GraphError::InvalidArgument(format!(
                    "explicit sequence has {} entries, expected {n}",
                    degrees.len()
                )));
            }
            if degrees.contains(&0) {
                return Err(GraphError::InvalidArgument("degree 0 is not allowed".into()));
            }
            (degrees.clone(), 1, n - 1)
        }
    };

    if degrees.iter().sum::<usize>() % 2 == 1 {
        let i = rng.gen_range(0..n);
        if degrees[i] < hi {
            degrees[i] += 1;
        } else if degrees[i] > lo {
            degrees[i] -= 1;
        } else {
            degrees[i] += 1;
        }
    }
    Ok(degrees)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfigModelOptions {
    /// Fresh stub matchings tried before falling back to edge erasure.
    pub max_restarts: usize,
    /// Swap partners tried per colliding edge before a matching is abandoned.
    pub repair_attempts: usize,
    /// Largest fraction of stubs the erasure fallback may drop.
    pub max_erased_fraction: f64,
}

impl Default for ConfigModelOptions {
    fn default() -> Self {
        ConfigModelOptions {
            max_restarts: 100,
            repair_attempts: 200,
            max_erased_fraction: 0.01,
        }
    }
}

/// How a configuration-model graph was obtained.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigModelReport {
    pub restarts: usize,
    /// Colliding edges resolved by degree-preserving swaps.
    pub repaired_edges: usize,
    /// Stubs dropped by the erasure fallback; zero unless every restart failed.
    pub erased_stubs: usize,
    pub total_stubs: usize,
    /// Largest `|requested − realised|` degree over all nodes.
    pub max_degree_deviation: usize,
}

pub fn build_configuration_model<R: Rng + ?Sized>(degrees: &[usize], rng: &mut R) -> Result<Graph, GraphError> {
    build_configuration_model_with(degrees, ConfigModelOptions::default(), rng).map(|(g, _)| g)
}

/// Random simple graph with the requested degree sequence.
///
/// Each attempt shuffles the stub list and pairs consecutive stubs. Pairs that
/// form self-loops or repeat an earlier edge are then resolved by swapping
/// endpoints with a uniformly chosen good edge, which keeps every degree
/// unchanged. An attempt whose collisions cannot be resolved is discarded and
/// the matching restarts. When the restart budget is spent, the collisions of
/// the last attempt are erased instead; that fails if it drops more than
/// `max_erased_fraction` of the stubs or isolates a node.
pub fn build_configuration_model_with<R: Rng + ?Sized>(
    degrees: &[usize],
    opts: ConfigModelOptions,
    rng: &mut R,
) -> Result<(Graph, ConfigModelReport), GraphError> {
    let n = degrees.len();
    if n < 2 {
        return Err(GraphError::InvalidArgument("need at least 2 nodes".into()));
    }
    if let Some(v) = degrees.iter().position(|&d| d == 0) {
        return Err(GraphError::IsolatedNode(v));
    }
    let total: usize = degrees.iter().sum();
    if total % 2 == 1 {
        return Err(GraphError::InvalidArgument(format!("degree sum {total} is odd")));
    }
    if let Some(&d) = degrees.iter().find(|&&d| d >= n) {
        return Err(GraphError::InvalidArgument(format!(
            "degree {d} needs more than {n} nodes"
        )));
    }

    let mut stubs: Vec<usize> = degrees
        .iter()
        .enumerate()
        .flat_map(|(v, &d)| std::iter::repeat_n(v, d))
        .collect();
    let mut report = ConfigModelReport {
        total_stubs: total,
        ..Default::default()
    };

    let mut last_failure = None;
    for attempt in 0..=opts.max_restarts {
        report.restarts = attempt;
        stubs.shuffle(rng);
        match match_stubs(&stubs, opts.repair_attempts, rng) {
            Ok((edges, repaired)) => {
                report.repaired_edges = repaired;
                let g = Graph::from_edges(n, edges)?;
                return Ok((g, report));
            }
            Err(partial) => last_failure = Some(partial),
        }
    }

    // Erasure fallback on the last attempt.
    let (good, bad) = last_failure.expect("at least one attempt");
    report.erased_stubs = 2 * bad;
    let g_edges: Vec<(usize, usize)> = good.into_iter().collect();
    let mut realised = vec![0usize; n];
    for &(u, v) in &g_edges {
        realised[u] += 1;
        realised[v] += 1;
    }
    report.max_degree_deviation = degrees.iter().zip(&realised).map(|(a, b)| a - b).max().unwrap_or(0);
    let isolated = realised.iter().filter(|&&d| d == 0).count();
    if isolated > 0 || report.erased_stubs as f64 > opts.max_erased_fraction * total as f64 {
        return Err(GraphError::ConstructionFailure {
            restarts: report.restarts,
            erased_stubs: report.erased_stubs,
            total_stubs: total,
            isolated,
        });
    }
    log::warn!(
        "configuration model erased {} of {} stubs after {} restarts",
        report.erased_stubs,
        total,
        report.restarts
    );
    Ok((Graph::from_edges(n, g_edges)?, report))
}

type Edge = (usize, usize);

/// Pairs consecutive stubs and repairs collisions. On success returns the
/// edges and how many collisions were repaired; on failure returns the good
/// edge set and the number of unresolved collisions.
fn match_stubs<R: Rng + ?Sized>(
    stubs: &[usize],
    repair_attempts: usize,
    rng: &mut R,
) -> Result<(Vec<Edge>, usize), (HashSet<Edge>, usize)> {
    let key = |u: usize, v: usize| (u.min(v), u.max(v));
    let mut good: Vec<(usize, usize)> = Vec::with_capacity(stubs.len() / 2);
    let mut present = HashSet::with_capacity(stubs.len() / 2);
    let mut bad = Vec::new();
    for pair in stubs.chunks_exact(2) {
        let (u, v) = (pair[0], pair[1]);
        if u == v || !present.insert(key(u, v)) {
            bad.push((u, v));
        } else {
            good.push(key(u, v));
        }
    }
    let repaired = bad.len();

    let mut unresolved = 0;
    for &(a, b) in &bad {
        let mut fixed = false;
        for _ in 0..repair_attempts {
            if good.is_empty() {
                break;
            }
            let idx = rng.gen_range(0..good.len());
            let (mut c, mut d) = good[idx];
            if rng.gen::<bool>() {
                std::mem::swap(&mut c, &mut d);
            }
            // Replace (a,b) + (c,d) by (a,c) + (b,d).
            if a == c || b == d || key(a, c) == key(b, d) {
                continue;
            }
            if present.contains(&key(a, c)) || present.contains(&key(b, d)) {
                continue;
            }
            present.remove(&good[idx]);
            good.swap_remove(idx);
            for e in [key(a, c), key(b, d)] {
                present.insert(e);
                good.push(e);
            }
            fixed = true;
            break;
        }
        if !fixed {
            unresolved += 1;
        }
    }
    if unresolved == 0 {
        Ok((good, repaired))
    } else {
        Err((good.into_iter().collect(), unresolved))
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(2024)
    }

    #[test]
    fn explicit_even_sequence_passes_through() {
        let spec = DegreeSpec::Explicit {
            degrees: vec![4, 1, 1, 1, 1],
        };
        assert_eq!(
            sample_degree_sequence(&spec, 5, &mut rng()).unwrap(),
            vec![4, 1, 1, 1, 1]
        );
    }

    #[test]
    fn explicit_odd_sequence_is_parity_repaired() {
        let spec = DegreeSpec::Explicit { degrees: vec![3, 1, 1] };
        for seed in 0..20 {
            let seq = sample_degree_sequence(&spec, 3, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            assert_eq!(seq.iter().sum::<usize>() % 2, 0);
            let changed: usize = seq
                .iter()
                .zip([3, 1, 1])
                .map(|(&a, b): (&usize, usize)| a.abs_diff(b))
                .sum();
            assert_eq!(changed, 1);
            assert!(seq.iter().all(|&d| d >= 1));
        }
    }

    #[test]
    fn rejects_bad_specs() {
        let bad = [
            DegreeSpec::PowerLaw {
                alpha: 2.5,
                k_min: 5,
                k_max: 3,
            },
            DegreeSpec::PowerLaw {
                alpha: 1.0,
                k_min: 1,
                k_max: 3,
            },
            DegreeSpec::PowerLaw {
                alpha: 2.0,
                k_min: 1,
                k_max: 10,
            },
            DegreeSpec::PowerLaw {
                alpha: 2.0,
                k_min: 0,
                k_max: 3,
            },
            DegreeSpec::Explicit {
                degrees: vec![1, 1, 0, 2],
            },
            DegreeSpec::Explicit { degrees: vec![1, 1] },
        ];
        for spec in &bad {
            assert!(matches!(
                sample_degree_sequence(spec, 4, &mut rng()),
                Err(GraphError::InvalidArgument(_))
            ));
        }
    }

    #[test]
    fn power_law_is_deterministic_and_in_range() {
        let spec = DegreeSpec::PowerLaw {
            alpha: 2.2,
            k_min: 2,
            k_max: 40,
        };
        let a = sample_degree_sequence(&spec, 1000, &mut rng()).unwrap();
        let b = sample_degree_sequence(&spec, 1000, &mut rng()).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|&d| (2..=40).contains(&d)));
        assert_eq!(a.iter().sum::<usize>() % 2, 0);
    }

    #[test]
    fn forced_realisations() {
        let g = build_configuration_model(&[1, 1], &mut rng()).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
        let g = build_configuration_model(&[4, 1, 1, 1, 1], &mut rng()).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let g = build_configuration_model(&[2, 2, 2], &mut rng()).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn realised_degrees_match_request() {
        let spec = DegreeSpec::PowerLaw {
            alpha: 2.5,
            k_min: 1,
            k_max: 60,
        };
        let mut r = rng();
        let seq = sample_degree_sequence(&spec, 3000, &mut r).unwrap();
        let (g, report) = build_configuration_model_with(&seq, ConfigModelOptions::default(), &mut r).unwrap();
        assert_eq!(g.degrees(), seq);
        assert_eq!(report.erased_stubs, 0);
        assert_eq!(report.max_degree_deviation, 0);
    }

    #[test]
    fn rejects_infeasible_sequences() {
        assert!(build_configuration_model(&[1, 1, 1], &mut rng()).is_err());
        assert!(build_configuration_model(&[3, 1, 1, 1, 0], &mut rng()).is_err());
        assert!(build_configuration_model(&[2, 2], &mut rng()).is_err());
    }

    #[test]
    fn non_graphical_sequence_reports_construction_failure() {
        // Two nodes of degree 3 among four: 3,3,1,1 is not graphical.
        let opts = ConfigModelOptions {
            max_restarts: 5,
            ..Default::default()
        };
        match build_configuration_model_with(&[3, 3, 1, 1], opts, &mut rng()) {
            Err(GraphError::ConstructionFailure {
                erased_stubs,
                total_stubs,
                ..
            }) => {
                assert!(erased_stubs > 0);
                assert_eq!(total_stubs, 8);
            }
            other => panic!("expected construction failure, got {other:?}"),
        }
    }
}
