use rand::Rng;

use crate::graph::Sampler;
use crate::sis::{sis_step, NodeStates, PopulationState, Rule, SisParams};

use super::family::GraphFamily;
use super::kernel::{KernelState, TransitionKernel};
use super::ReactiveError;

/// Which half of a coupled step comes first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepOrder {
    /// Move the graph chain using the current state, then update a node.
    #[default]
    TransitionFirst,
    /// Update a node on the current graph, then move the graph chain.
    UpdateFirst,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledRecord {
    pub step: u64,
    /// Graph in use after this step.
    pub member: usize,
    pub state: PopulationState,
    pub rho: f64,
}

fn fill_state(states: &NodeStates, counts: &[f64], out: &mut [f64]) {
    for ((o, &i), &m) in out.iter_mut().zip(states.infected_per_class()).zip(counts) {
        *o = i as f64 / m;
    }
}

/// Joint chain of graph member and node states.
///
/// Each step moves the graph chain with `P_x` at the current population state
/// and applies one monophilic SIS step (uniform node sampler) on the graph in
/// use; `order` decides which comes first. Members must be graphs on the same
/// node set in which every node keeps its degree. A single-member family
/// consumes no randomness for the graph chain.
#[allow(clippy::too_many_arguments)]
pub fn simulate_coupled<R: Rng + ?Sized>(
    mut states: NodeStates,
    family: &GraphFamily,
    kernel: &dyn TransitionKernel,
    params: &SisParams,
    initial_member: usize,
    order: StepOrder,
    steps: u64,
    record_every: u64,
    rng: &mut R,
) -> Result<Vec<CoupledRecord>, ReactiveError> {
    let graphs = family
        .graphs()
        .ok_or_else(|| ReactiveError::InvalidArgument("coupled simulation needs concrete graphs".into()))?;
    let n = family.len();
    if kernel.member_count() != n || initial_member >= n || record_every == 0 {
        return Err(ReactiveError::InvalidArgument(
            "kernel size, initial member or record interval is invalid".into(),
        ));
    }
    let base = &graphs[0];
    for (i, g) in graphs.iter().enumerate().skip(1) {
        if g.degrees() != base.degrees() {
            return Err(ReactiveError::InvalidArgument(format!(
                "member {i} does not preserve every node's degree"
            )));
        }
    }
    params.check_graph(base)?;

    let dist = family.distribution();
    let counts: Vec<f64> = base
        .degree_distribution()
        .counts()
        .expect("graph classes carry counts")
        .iter()
        .map(|&c| c as f64)
        .collect();
    let mut x = vec![0.0; counts.len()];
    let mut row = vec![0.0; n];
    let mut member = initial_member;

    let mut transition = |states: &NodeStates, member: &mut usize, rng: &mut R| {
        if n == 1 {
            return;
        }
        fill_state(states, &counts, &mut x);
        let state = KernelState {
            x: &x,
            rho: dist.average(&x),
        };
        kernel.row(state, *member, &mut row);
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        *member = n - 1;
        for (j, &p) in row.iter().enumerate() {
            acc += p;
            if u < acc {
                *member = j;
                break;
            }
        }
    };

    let record = |step, member, s: &NodeStates| CoupledRecord {
        step,
        member,
        state: s.population_state(base),
        rho: s.rho(),
    };
    let mut out = vec![record(0, member, &states)];
    for step in 1..=steps {
        match order {
            StepOrder::TransitionFirst => {
                transition(&states, &mut member, rng);
                sis_step(&mut states, &graphs[member], params, Rule::Monophilic, Sampler::X, rng);
            }
            StepOrder::UpdateFirst => {
                sis_step(&mut states, &graphs[member], params, Rule::Monophilic, Sampler::X, rng);
                transition(&states, &mut member, rng);
            }
        }
        if step % record_every == 0 || step == steps {
            out.push(record(step, member, &states));
        }
    }
    Ok(out)
}
