//! Monte Carlo of the discrete-time SIS chain.
//!
//! Each step one node `m` is drawn by a [`Sampler`]. An infected `m` recovers
//! with probability `δ`. A susceptible `m` of degree `k` draws `k` agents
//! uniformly with replacement from the whole population (unbiased-degree
//! semantics, `m` itself included) and counts `a` infected among them
//! ([`Rule::NonMonophilic`]) or among one uniform neighbour of each drawn
//! agent ([`Rule::Monophilic`]); it then becomes infected with probability
//! `ν a / D`.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{sample_node, DegreeDistribution, Graph, Sampler};

#[derive(Debug, Error)]
pub enum SisError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// Observe the drawn agents themselves.
    NonMonophilic,
    /// Observe one random friend of each drawn agent.
    Monophilic,
}

impl Rule {
    pub const ALL: [Rule; 2] = [Rule::NonMonophilic, Rule::Monophilic];

    pub fn name(self) -> &'static str {
        match self {
            Rule::NonMonophilic => "non-monophilic",
            Rule::Monophilic => "monophilic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SisParams {
    nu: f64,
    delta: f64,
    max_degree: usize,
}

impl SisParams {
    pub fn new(nu: f64, delta: f64, max_degree: usize) -> Result<Self, SisError> {
        if !(0.0..=1.0).contains(&nu) {
            return Err(SisError::InvalidArgument(format!("nu = {nu} outside [0, 1]")));
        }
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(SisError::InvalidArgument(format!("delta = {delta} outside (0, 1]")));
        }
        if max_degree == 0 {
            return Err(SisError::InvalidArgument("max degree must be positive".into()));
        }
        Ok(SisParams { nu, delta, max_degree })
    }

    /// `ν = λ δ`; fails when that exceeds one.
    pub fn from_lambda(lambda: f64, delta: f64, max_degree: usize) -> Result<Self, SisError> {
        Self::new(lambda * delta, delta, max_degree)
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `D`, the normaliser of the infection probability.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Effective spreading rate `λ = ν / δ`.
    pub fn lambda(&self) -> f64 {
        self.nu / self.delta
    }

    pub(crate) fn check_graph(&self, g: &Graph) -> Result<(), SisError> {
        if self.max_degree < g.max_degree() {
            return Err(SisError::InvalidArgument(format!(
                "D = {} is below the graph's max degree {}",
                self.max_degree,
                g.max_degree()
            )));
        }
        Ok(())
    }
}

/// Fraction of infected nodes per degree class.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationState(pub Vec<f64>);

impl PopulationState {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// `ρ = Σ_k P(k) x(k)`.
    pub fn rho(&self, dist: &DegreeDistribution) -> f64 {
        dist.average(&self.0)
    }
}

/// Per-node infection flags with per-class infected counts `M¹(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeStates {
    infected: Vec<bool>,
    infected_per_class: Vec<usize>,
    total_infected: usize,
}

impl NodeStates {
    pub fn susceptible(g: &Graph) -> Self {
        NodeStates {
            infected: vec![false; g.node_count()],
            infected_per_class: vec![0; g.degree_distribution().class_count()],
            total_infected: 0,
        }
    }

    pub fn from_infected(g: &Graph, nodes: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::susceptible(g);
        for v in nodes {
            s.set(g, v, true);
        }
        s
    }

    pub fn is_infected(&self, v: usize) -> bool {
        self.infected[v]
    }

    pub fn infected_count(&self) -> usize {
        self.total_infected
    }

    pub fn infected_per_class(&self) -> &[usize] {
        &self.infected_per_class
    }

    pub fn population_state(&self, g: &Graph) -> PopulationState {
        let counts = g.degree_distribution().counts().expect("graph classes carry counts");
        PopulationState(
            self.infected_per_class
                .iter()
                .zip(counts)
                .map(|(&i, &m)| i as f64 / m as f64)
                .collect(),
        )
    }

    /// Overall infected fraction.
    pub fn rho(&self) -> f64 {
        self.total_infected as f64 / self.infected.len() as f64
    }

    pub(crate) fn set(&mut self, g: &Graph, v: usize, infected: bool) {
        if self.infected[v] == infected {
            return;
        }
        self.infected[v] = infected;
        let c = g.class_of(v);
        if infected {
            self.infected_per_class[c] += 1;
            self.total_infected += 1;
        } else {
            self.infected_per_class[c] -= 1;
            self.total_infected -= 1;
        }
    }
}

/// Infects exactly `round(fraction · M)` nodes chosen without replacement.
pub fn init_population<R: Rng + ?Sized>(g: &Graph, fraction: f64, rng: &mut R) -> Result<NodeStates, SisError> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(SisError::InvalidArgument(format!(
            "initial fraction {fraction} outside [0, 1]"
        )));
    }
    let m = g.node_count();
    let count = (fraction * m as f64).round() as usize;
    Ok(NodeStates::from_infected(g, index::sample(rng, m, count)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transition {
    Infected,
    Recovered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepOutcome {
    pub node: usize,
    pub was_infected: bool,
    /// Infected agents observed by a susceptible node (`a`).
    pub observed_infected: Option<usize>,
    pub transition: Option<Transition>,
}

/// One step of the chain; only the sampled node can change.
pub fn sis_step<R: Rng + ?Sized>(
    states: &mut NodeStates,
    g: &Graph,
    params: &SisParams,
    rule: Rule,
    sampler: Sampler,
    rng: &mut R,
) -> StepOutcome {
    debug_assert!(params.max_degree >= g.max_degree());
    let m = sample_node(g, sampler, rng);
    if states.infected[m] {
        let recovers = rng.gen::<f64>() < params.delta;
        if recovers {
            states.set(g, m, false);
        }
        return StepOutcome {
            node: m,
            was_infected: true,
            observed_infected: None,
            transition: recovers.then_some(Transition::Recovered),
        };
    }

    let population = g.node_count();
    let mut observed = 0;
    for _ in 0..g.degree(m) {
        let agent = rng.gen_range(0..population);
        let watched = match rule {
            Rule::NonMonophilic => agent,
            Rule::Monophilic => {
                let friends = g.neighbors(agent);
                friends[rng.gen_range(0..friends.len())]
            }
        };
        if states.infected[watched] {
            observed += 1;
        }
    }
    let p = params.nu * observed as f64 / params.max_degree as f64;
    let infected = observed > 0 && rng.gen::<f64>() < p;
    if infected {
        states.set(g, m, true);
    }
    StepOutcome {
        node: m,
        was_infected: false,
        observed_infected: Some(observed),
        transition: infected.then_some(Transition::Infected),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub step: u64,
    pub state: PopulationState,
    pub rho: f64,
}

/// Runs `steps` steps from `states`, recording step 0, every `record_every`
/// steps, and the final step.
#[allow(clippy::too_many_arguments)]
pub fn simulate<R: Rng + ?Sized>(
    mut states: NodeStates,
    g: &Graph,
    params: &SisParams,
    rule: Rule,
    sampler: Sampler,
    steps: u64,
    record_every: u64,
    rng: &mut R,
) -> Result<Vec<TrajectoryRecord>, SisError> {
    params.check_graph(g)?;
    if record_every == 0 {
        return Err(SisError::InvalidArgument("record_every must be positive".into()));
    }
    let record = |step, s: &NodeStates| TrajectoryRecord {
        step,
        state: s.population_state(g),
        rho: s.rho(),
    };
    let mut out = vec![record(0, &states)];
    for step in 1..=steps {
        sis_step(&mut states, g, params, rule, sampler, rng);
        if step % record_every == 0 || step == steps {
            out.push(record(step, &states));
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
pub fn run_trajectory<R: Rng + ?Sized>(
    g: &Graph,
    params: &SisParams,
    rule: Rule,
    sampler: Sampler,
    init_fraction: f64,
    steps: u64,
    record_every: u64,
    rng: &mut R,
) -> Result<Vec<TrajectoryRecord>, SisError> {
    if steps == 0 {
        return Err(SisError::InvalidArgument("need at least one step".into()));
    }
    let states = init_population(g, init_fraction, rng)?;
    simulate(states, g, params, rule, sampler, steps, record_every, rng)
}

/// Mean `ρ` over the trailing `fraction` of the records after step 0.
pub fn terminal_rho(records: &[TrajectoryRecord], fraction: f64) -> f64 {
    let after_start = records.len().saturating_sub(1).max(1);
    let take = ((fraction * after_start as f64).round() as usize).clamp(1, records.len());
    let tail = &records[records.len() - take..];
    tail.iter().map(|r| r.rho).sum::<f64>() / take as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Recovery probability; each grid point uses `ν = λ δ`.
    pub delta: f64,
    pub init_fraction: f64,
    /// Horizon in sweeps; `T = sweeps · M` steps.
    pub sweeps: f64,
    /// Recording period in steps; `None` records once per sweep.
    pub record_every: Option<u64>,
    /// Trailing fraction of the records averaged into the terminal `ρ`.
    pub terminal_fraction: f64,
    pub rho_cut: f64,
    pub seeds: Vec<u64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            delta: 0.1,
            init_fraction: 0.05,
            sweeps: 200.0,
            record_every: None,
            terminal_fraction: 0.1,
            rho_cut: 0.01,
            seeds: vec![1],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub seed: u64,
    pub rho_terminal: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSummary {
    pub lambda: f64,
    pub mean_rho: f64,
    pub std_rho: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdEstimate {
    pub rows: Vec<SweepRow>,
    pub summary: Vec<SweepSummary>,
    /// Smallest grid `λ` whose mean terminal `ρ` exceeds the cut.
    pub lambda_star: Option<f64>,
}

/// Generator for one `(seed, cell)` replicate; independent of scheduling.
pub fn cell_rng(seed: u64, cell: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(cell);
    rng
}

/// Monte Carlo threshold sweep. Replicates run in parallel on the current
/// rayon pool; each uses [`cell_rng`]`(seed, grid index)`, so results do not
/// depend on the pool size.
pub fn estimate_threshold(
    g: &Graph,
    rule: Rule,
    sampler: Sampler,
    grid: &[f64],
    cfg: &SweepConfig,
) -> Result<ThresholdEstimate, SisError> {
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SisError::InvalidArgument("lambda grid must be increasing".into()));
    }
    if cfg.seeds.is_empty() {
        return Err(SisError::InvalidArgument("no seeds".into()));
    }
    let m = g.node_count() as u64;
    let steps = ((cfg.sweeps * m as f64).round() as u64).max(1);
    let record_every = cfg.record_every.unwrap_or(m);
    let params: Vec<SisParams> = grid
        .iter()
        .map(|&l| SisParams::from_lambda(l, cfg.delta, g.max_degree()))
        .collect::<Result<_, _>>()?;

    let cells: Vec<(usize, u64)> = (0..grid.len())
        .flat_map(|i| cfg.seeds.iter().map(move |&s| (i, s)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(i, seed)| {
            let mut rng = cell_rng(seed, i as u64);
            let records = run_trajectory(
                g,
                &params[i],
                rule,
                sampler,
                cfg.init_fraction,
                steps,
                record_every,
                &mut rng,
            )?;
            Ok(SweepRow {
                lambda: grid[i],
                seed,
                rho_terminal: terminal_rho(&records, cfg.terminal_fraction),
            })
        })
        .collect::<Result<Vec<_>, SisError>>()?;

    let summary: Vec<SweepSummary> = rows
        .chunks(cfg.seeds.len())
        .map(|chunk| {
            let n = chunk.len() as f64;
            let mean = chunk.iter().map(|r| r.rho_terminal).sum::<f64>() / n;
            let var = if chunk.len() > 1 {
                chunk.iter().map(|r| (r.rho_terminal - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            SweepSummary {
                lambda: chunk[0].lambda,
                mean_rho: mean,
                std_rho: var.sqrt(),
            }
        })
        .collect();
    let lambda_star = summary.iter().find(|s| s.mean_rho > cfg.rho_cut).map(|s| s.lambda);
    Ok(ThresholdEstimate {
        rows,
        summary,
        lambda_star,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn star(leaves: usize) -> Graph {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v))).unwrap()
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn params_validate_ranges() {
        assert!(SisParams::new(1.2, 0.5, 3).is_err());
        assert!(SisParams::new(0.5, 0.0, 3).is_err());
        assert!(SisParams::new(0.5, 0.5, 0).is_err());
        let p = SisParams::new(0.5, 0.25, 3).unwrap();
        assert_eq!(p.lambda(), 2.0);
        assert!(SisParams::from_lambda(3.0, 0.5, 3).is_err());
    }

    #[test]
    fn init_counts() {
        let g = Graph::from_edges(1000, (0..1000).map(|v| (v, (v + 1) % 1000))).unwrap();
        assert_eq!(init_population(&g, 0.0, &mut rng(0)).unwrap().infected_count(), 0);
        assert_eq!(init_population(&g, 1.0, &mut rng(0)).unwrap().infected_count(), 1000);
        assert_eq!(init_population(&g, 0.1, &mut rng(0)).unwrap().infected_count(), 100);
        assert!(init_population(&g, 1.5, &mut rng(0)).is_err());
        let a = init_population(&g, 0.3, &mut rng(5)).unwrap();
        let b = init_population(&g, 0.3, &mut rng(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn all_susceptible_is_absorbing() {
        let g = star(5);
        let params = SisParams::new(1.0, 0.5, 5).unwrap();
        let mut s = NodeStates::susceptible(&g);
        let mut r = rng(1);
        for rule in Rule::ALL {
            for sampler in Sampler::ALL {
                for _ in 0..500 {
                    let out = sis_step(&mut s, &g, &params, rule, sampler, &mut r);
                    assert_eq!(out.observed_infected, Some(0));
                    assert_eq!(out.transition, None);
                }
            }
        }
        assert_eq!(s.infected_count(), 0);
    }

    #[test]
    fn no_infection_pressure_means_monotone_decay() {
        let g = star(6);
        let params = SisParams::new(0.0, 0.3, 6).unwrap();
        let mut s = NodeStates::from_infected(&g, 0..7);
        let mut r = rng(2);
        let mut last = s.infected_count();
        for _ in 0..2000 {
            sis_step(&mut s, &g, &params, Rule::Monophilic, Sampler::Y, &mut r);
            assert!(s.infected_count() <= last);
            last = s.infected_count();
        }
        assert_eq!(last, 0);
    }

    #[test]
    fn certain_recovery() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let params = SisParams::new(0.0, 1.0, 1).unwrap();
        let mut s = NodeStates::from_infected(&g, [0, 1]);
        let out = sis_step(&mut s, &g, &params, Rule::NonMonophilic, Sampler::X, &mut rng(3));
        assert_eq!(out.transition, Some(Transition::Recovered));
        assert!(!s.is_infected(out.node));
        assert_eq!(s.infected_count(), 1);
    }

    #[test]
    fn at_most_one_node_changes_per_step() {
        let g = star(8);
        let params = SisParams::new(1.0, 0.2, 8).unwrap();
        let mut s = init_population(&g, 0.5, &mut rng(4)).unwrap();
        let mut r = rng(5);
        for _ in 0..1000 {
            let before = s.clone();
            let out = sis_step(&mut s, &g, &params, Rule::Monophilic, Sampler::Z, &mut r);
            let changed: Vec<usize> = (0..9).filter(|&v| before.is_infected(v) != s.is_infected(v)).collect();
            match out.transition {
                None => assert!(changed.is_empty()),
                Some(_) => assert_eq!(changed, vec![out.node]),
            }
            let x = s.population_state(&g);
            let counts = g.degree_distribution().counts().unwrap();
            for (c, &m) in counts.iter().enumerate() {
                assert_eq!(x.values()[c], s.infected_per_class()[c] as f64 / m as f64);
            }
        }
    }

    #[test]
    fn trajectory_records_and_zero_start() {
        let g = star(9);
        let params = SisParams::new(0.9, 0.3, 9).unwrap();
        let recs = run_trajectory(&g, &params, Rule::NonMonophilic, Sampler::X, 0.0, 95, 10, &mut rng(6)).unwrap();
        let steps: Vec<u64> = recs.iter().map(|r| r.step).collect();
        assert_eq!(steps, vec![0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 95]);
        assert!(recs.iter().all(|r| r.rho == 0.0));
        assert!(run_trajectory(&g, &params, Rule::NonMonophilic, Sampler::X, 0.1, 0, 1, &mut rng(6)).is_err());
    }

    #[test]
    fn trajectory_is_reproducible() {
        let g = star(9);
        let params = SisParams::new(0.9, 0.3, 9).unwrap();
        let run =
            |seed| run_trajectory(&g, &params, Rule::Monophilic, Sampler::Y, 0.5, 500, 7, &mut rng(seed)).unwrap();
        assert_eq!(run(11), run(11));
        assert_ne!(run(11), run(12));
    }

    #[test]
    fn undersized_max_degree_is_rejected() {
        let g = star(4);
        let params = SisParams::new(0.5, 0.5, 3).unwrap();
        assert!(run_trajectory(&g, &params, Rule::NonMonophilic, Sampler::X, 0.2, 10, 1, &mut rng(0)).is_err());
    }

    #[test]
    fn terminal_rho_averages_tail() {
        let recs: Vec<TrajectoryRecord> = (0..=20)
            .map(|i| TrajectoryRecord {
                step: i,
                state: PopulationState(vec![]),
                rho: i as f64,
            })
            .collect();
        assert_eq!(terminal_rho(&recs, 0.1), 19.5);
        assert_eq!(terminal_rho(&recs[..1], 0.1), 0.0);
    }
}
