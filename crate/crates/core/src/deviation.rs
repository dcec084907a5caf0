//! Sup-norm gap between a Monte Carlo path and its mean-field recursion.

use rand::Rng;
use thiserror::Error;

use crate::graph::{Graph, JointDegreeStats, Sampler};
use crate::meanfield::{MeanFieldError, MeanFieldRecursion, Step1Weights};
use crate::sis::{init_population, sis_step, NodeStates, Rule, SisError, SisParams};

#[derive(Debug, Error)]
pub enum DeviationError {
    #[error(transparent)]
    Sis(#[from] SisError),
    #[error(transparent)]
    MeanField(#[from] MeanFieldError),
}

/// `max_{0 ≤ n ≤ steps} ‖x̄_n − x_n‖_∞` for one Monte Carlo run started from
/// `init_fraction` and the mean-field recursion started from the same
/// population state, with the Step-1 weights matching `sampler`.
#[allow(clippy::too_many_arguments)]
pub fn meanfield_deviation<R: Rng + ?Sized>(
    g: &Graph,
    params: &SisParams,
    rule: Rule,
    sampler: Sampler,
    init_fraction: f64,
    steps: u64,
    rng: &mut R,
) -> Result<f64, DeviationError> {
    let states = init_population(g, init_fraction, rng)?;
    deviation_from(states, g, params, rule, sampler, steps, rng)
}

#[allow(clippy::too_many_arguments)]
pub fn deviation_from<R: Rng + ?Sized>(
    mut states: NodeStates,
    g: &Graph,
    params: &SisParams,
    rule: Rule,
    sampler: Sampler,
    steps: u64,
    rng: &mut R,
) -> Result<f64, DeviationError> {
    if params.max_degree() < g.max_degree() {
        return Err(SisError::InvalidArgument("D below the graph's max degree".into()).into());
    }
    let stats = JointDegreeStats::from_graph(g);
    let weights = Step1Weights::new(&stats, sampler.into());
    let x0 = states.population_state(g).0;
    let mut recursion = MeanFieldRecursion::new(x0, &weights, &stats, *params, rule, g.node_count() as f64)?;
    let counts: Vec<f64> = g
        .degree_distribution()
        .counts()
        .expect("graph classes carry counts")
        .iter()
        .map(|&c| c as f64)
        .collect();

    let mut worst: f64 = 0.0;
    for _ in 0..steps {
        sis_step(&mut states, g, params, rule, sampler, rng);
        recursion.step()?;
        let gap = states
            .infected_per_class()
            .iter()
            .zip(&counts)
            .zip(recursion.state())
            .map(|((&i, &m), &x)| (i as f64 / m - x).abs())
            .fold(0.0, f64::max);
        worst = worst.max(gap);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn zero_start_has_zero_deviation() {
        let g = Graph::from_edges(6, (0..6).map(|v| (v, (v + 1) % 6))).unwrap();
        let p = SisParams::new(0.8, 0.2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let d = meanfield_deviation(&g, &p, Rule::Monophilic, Sampler::X, 0.0, 1000, &mut rng).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn deviation_is_a_fraction() {
        let g = Graph::from_edges(8, (1..8).map(|v| (0, v))).unwrap();
        let p = SisParams::new(0.8, 0.2, 7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = meanfield_deviation(&g, &p, Rule::NonMonophilic, Sampler::Y, 0.5, 500, &mut rng).unwrap();
        assert!(d > 0.0 && d <= 1.0);
    }
}
