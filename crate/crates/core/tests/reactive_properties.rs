use contagion::deviation::deviation_from;
use contagion::graph::{build_configuration_model, rewire_to_assortativity, sample_degree_sequence, DegreeSpec};
use contagion::reactive::{
    averaged_drift, deviation_report, drift_h, integrate_constrained_ode, lipschitz_estimate, simulate_coupled,
    stationary_distribution, validate_kernel, ConstantKernel, CoupledRecord, GraphFamily, KernelState, LogisticKernel,
    ReactiveError, StepOrder,
};
use contagion::sis::{init_population, NodeStates, PopulationState};
use contagion::{Graph, Rule, Sampler, SisParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn hub_family() -> GraphFamily {
    let mixed = Graph::from_edges(8, [(0, 1), (0, 2), (0, 3), (1, 4), (1, 5), (6, 7)]).unwrap();
    let split = Graph::from_edges(8, [(0, 2), (0, 3), (0, 4), (1, 5), (1, 6), (1, 7)]).unwrap();
    GraphFamily::from_graphs(vec![mixed, split]).unwrap()
}

fn rewired_family(n: usize, seed: u64) -> GraphFamily {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = DegreeSpec::PowerLaw {
        alpha: 2.5,
        k_min: 2,
        k_max: 20,
    };
    let degrees = sample_degree_sequence(&spec, n, &mut rng).unwrap();
    let base = build_configuration_model(&degrees, &mut rng).unwrap();
    let members = [0.2, -0.2]
        .map(|r| {
            rewire_to_assortativity(&base, r, 1_000_000, 0.02, &mut rng)
                .unwrap()
                .graph
        })
        .to_vec();
    GraphFamily::from_graphs(members).unwrap()
}

#[test]
fn member_drifts_differ_only_through_theta_z() {
    let family = hub_family();
    let params = SisParams::new(0.6, 0.2, 3).unwrap();
    // Classes are degrees (1, 3).
    let uniform = [0.1, 0.1];
    assert_eq!(
        drift_h(&uniform, &family, 0, &params),
        drift_h(&uniform, &family, 1, &params)
    );
    let hubs = [0.0, 1.0];
    // Pr[d(Z) = 3] is 7/12 with the hub-hub edge and 3/4 without it.
    for (member, theta) in [(0, 7.0 / 12.0), (1, 0.75)] {
        let h = drift_h(&hubs, &family, member, &params);
        assert!((h[0] - 0.6 * theta / 3.0).abs() < 1e-15);
        assert!((h[1] + 0.2).abs() < 1e-15);
    }
    assert_eq!(drift_h(&[0.0, 0.0], &family, 1, &params), vec![0.0, 0.0]);

    let twins = GraphFamily::from_graphs(vec![family.graph(0).unwrap().clone(); 2]).unwrap();
    let x = [0.3, 0.8];
    assert_eq!(drift_h(&x, &twins, 0, &params), drift_h(&x, &twins, 1, &params));
}

#[test]
fn averaged_drift_reductions() {
    let family = hub_family();
    let params = SisParams::new(0.6, 0.2, 3).unwrap();
    let x = [0.4, 0.7];
    let sym = ConstantKernel::new(vec![vec![0.8, 0.2], vec![0.2, 0.8]]).unwrap();
    let (avg, pi) = averaged_drift(&x, &family, &sym, &params).unwrap();
    assert!((pi[0] - 0.5).abs() < 1e-12);
    let (h0, h1) = (drift_h(&x, &family, 0, &params), drift_h(&x, &family, 1, &params));
    for k in 0..2 {
        assert!((avg[k] - 0.5 * (h0[k] + h1[k])).abs() < 1e-12);
    }
    let (zero, _) = averaged_drift(&[0.0, 0.0], &family, &LogisticKernel::default(), &params).unwrap();
    assert_eq!(zero, vec![0.0, 0.0]);
}

#[test]
fn euler_is_first_order() {
    let family = rewired_family(1000, 3);
    let params = SisParams::from_lambda(3.0, 0.2, family.max_degree()).unwrap();
    let kernel = LogisticKernel::default();
    let x0 = vec![0.05; family.class_count()];
    let finals: Vec<Vec<f64>> = [1e-3, 5e-4, 2.5e-4]
        .iter()
        .map(|&h| {
            let traj = integrate_constrained_ode(&x0, &family, &kernel, &params, h, 10.0, 1000).unwrap();
            assert!(traj.points.iter().all(|p| p.residual <= 1e-10));
            traj.points.last().unwrap().x.clone()
        })
        .collect();
    let gap = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    let coarse = gap(&finals[0], &finals[1]);
    let fine = gap(&finals[1], &finals[2]);
    assert!(fine > 0.0);
    // Exactly 2 in the limit; allow the O(h) correction to the ratio.
    let ratio = coarse / fine;
    assert!((1.9..=2.1).contains(&ratio), "ratio {ratio}");

    let zero = integrate_constrained_ode(
        &vec![0.0; family.class_count()],
        &family,
        &kernel,
        &params,
        0.01,
        5.0,
        1,
    )
    .unwrap();
    assert!(zero.points.iter().all(|p| p.x.iter().all(|&v| v == 0.0)));
}

fn occupancy_within_three_se(stickiness: f64) {
    let family = hub_family();
    let params = SisParams::new(0.0, 0.5, 3).unwrap();
    let kernel = LogisticKernel::new(10.0, 0.05, 1, stickiness).unwrap();
    let g = family.graph(0).unwrap();
    let steps = 400_000;
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    // The all-susceptible state is absorbing, so x̄ stays frozen at 0.
    let rec = simulate_coupled(
        NodeStates::susceptible(g),
        &family,
        &kernel,
        &params,
        0,
        StepOrder::TransitionFirst,
        steps,
        1,
        &mut rng,
    )
    .unwrap();
    let pi = stationary_distribution(
        &kernel,
        KernelState {
            x: &[0.0, 0.0],
            rho: 0.0,
        },
    )
    .unwrap();
    let visits = rec.iter().skip(1).filter(|r| r.member == 1).count() as f64;
    let freq = visits / steps as f64;
    let p = pi[1];
    let inflation = (1.0 + stickiness) / (1.0 - stickiness);
    let se = (p * (1.0 - p) * inflation / steps as f64).sqrt();
    assert!(
        (freq - p).abs() <= 3.0 * se,
        "kappa {stickiness}: {freq} vs {p} (se {se})"
    );
}

#[test]
fn frozen_state_occupancy_matches_stationary_law() {
    occupancy_within_three_se(0.0);
    occupancy_within_three_se(0.6);
}

#[test]
fn no_infection_pressure_means_die_out_while_the_chain_moves() {
    let family = hub_family();
    let params = SisParams::new(0.0, 0.3, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let s0 = init_population(family.graph(0).unwrap(), 1.0, &mut rng).unwrap();
    let rec = simulate_coupled(
        s0,
        &family,
        &LogisticKernel::default(),
        &params,
        0,
        StepOrder::default(),
        2000,
        1,
        &mut rng,
    )
    .unwrap();
    assert!(rec.windows(2).all(|w| w[1].rho <= w[0].rho));
    assert_eq!(rec.last().unwrap().rho, 0.0);
    assert!(rec.iter().any(|r| r.member == 0) && rec.iter().any(|r| r.member == 1));
}

#[test]
fn single_member_deviation_equals_plain_deviation() {
    let family = rewired_family(500, 8);
    let g = family.graph(0).unwrap().clone();
    let single = GraphFamily::from_graphs(vec![g.clone()]).unwrap();
    let kernel = ConstantKernel::new(vec![vec![1.0]]).unwrap();
    let params = SisParams::from_lambda(3.0, 0.2, g.max_degree()).unwrap();
    let m = g.node_count();
    let steps = 20 * m as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let s0 = init_population(&g, 0.1, &mut rng).unwrap();
    let x0 = s0.population_state(&g).0;

    let coupled = simulate_coupled(
        s0.clone(),
        &single,
        &kernel,
        &params,
        0,
        StepOrder::TransitionFirst,
        steps,
        1,
        &mut rng.clone(),
    )
    .unwrap();
    let ode = integrate_constrained_ode(
        &x0,
        &single,
        &kernel,
        &params,
        1.0 / m as f64,
        steps as f64 / m as f64,
        1,
    )
    .unwrap();
    let reactive = deviation_report(&coupled, &ode, m).unwrap();
    let plain = deviation_from(s0, &g, &params, Rule::Monophilic, Sampler::X, steps, &mut rng).unwrap();
    assert_eq!(reactive, plain);
    assert!(reactive > 0.0);
}

#[test]
fn deviation_report_checks_windows() {
    let family = hub_family();
    let kernel = LogisticKernel::default();
    let params = SisParams::new(0.9, 0.2, 3).unwrap();
    let m = family.graph(0).unwrap().node_count();
    let ode = integrate_constrained_ode(&[0.5, 0.5], &family, &kernel, &params, 1.0 / m as f64, 2.0, 1).unwrap();
    let mirror: Vec<CoupledRecord> = ode
        .points
        .iter()
        .enumerate()
        .map(|(n, p)| CoupledRecord {
            step: n as u64,
            member: 0,
            state: PopulationState(p.x.clone()),
            rho: 0.0,
        })
        .collect();
    assert_eq!(deviation_report(&mirror, &ode, m).unwrap(), 0.0);
    assert!(matches!(
        deviation_report(&mirror[..mirror.len() / 2], &ode, m),
        Err(ReactiveError::InvalidArgument(_))
    ));
}

#[test]
fn reference_kernel_is_valid_and_lipschitz() {
    let family = rewired_family(1000, 5);
    let kernel = LogisticKernel::default();
    let c = family.class_count();
    let grid: Vec<Vec<f64>> = (0..=10).map(|i| vec![i as f64 / 10.0; c]).collect();
    validate_kernel(
        &kernel,
        grid.iter().map(|x| KernelState {
            x,
            rho: family.distribution().average(x),
        }),
    )
    .unwrap();
    let params = SisParams::from_lambda(3.0, 0.2, family.max_degree()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let l = lipschitz_estimate(&family, &kernel, &params, 10_000, &mut rng).unwrap();
    assert!(l.is_finite() && l < 10.0, "{l}");
}
