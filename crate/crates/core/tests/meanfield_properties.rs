use contagion::graph::{
    build_configuration_model, degree_law, expected_degree, sample_degree_sequence, DegreeDistribution, DegreeSpec,
};
use contagion::meanfield::{
    critical_threshold, h_map, iterate, iterate_to_fixed_point, rho_lambda_curve, stationary_solve, SolverOptions,
    Step1Weights, WeightScheme,
};
use contagion::{Graph, JointDegreeStats, Rule, Sampler, SisParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn power_law_graph(seed: u64, n: usize) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = DegreeSpec::PowerLaw {
        alpha: 2.3,
        k_min: 1,
        k_max: 40,
    };
    let degrees = sample_degree_sequence(&spec, n, &mut rng).unwrap();
    build_configuration_model(&degrees, &mut rng).unwrap()
}

fn star_union() -> Graph {
    let star = Graph::from_edges(11, (1..=10).map(|v| (0, v))).unwrap();
    (0..4).fold(star.clone(), |acc, _| acc.disjoint_union(&star))
}

fn test_graphs() -> Vec<Graph> {
    vec![power_law_graph(1, 500), power_law_graph(2, 2000), star_union()]
}

#[test]
fn h_is_monotone_and_concave() {
    let h = 1e-3;
    for g in test_graphs() {
        let s = JointDegreeStats::from_graph(&g);
        let d = g.max_degree();
        for rule in Rule::ALL {
            for lambda in [0.5, 2.0, 8.0] {
                let f = |t: f64| h_map(t, lambda, &s, d, rule);
                let mut t = 0.0;
                while t + 2.0 * h <= 1.0 {
                    assert!(f(t + h) >= f(t));
                    assert!(f(t + h) >= 0.5 * (f(t) + f(t + 2.0 * h)) - 1e-15);
                    t += h;
                }
            }
        }
    }
}

#[test]
fn slope_at_origin_is_lambda_mean_degree_over_d() {
    for g in test_graphs() {
        let s = JointDegreeStats::from_graph(&g);
        let d = g.max_degree();
        for (rule, sampler) in [(Rule::NonMonophilic, Sampler::X), (Rule::Monophilic, Sampler::Z)] {
            let mean = expected_degree(s.distribution(), &degree_law(&s, sampler));
            for lambda in [0.7, 3.0] {
                let fd = h_map(1e-8, lambda, &s, d, rule) / 1e-8;
                let closed = lambda * mean / d as f64;
                assert!((fd / closed - 1.0).abs() < 1e-4, "{fd} vs {closed}");
                assert!((critical_threshold(&s, d, rule) - d as f64 / mean).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn uncorrelated_z_weights_reduce_to_edge_weights() {
    let dist = DegreeDistribution::from_probabilities(&[(1, 0.4), (2, 0.3), (5, 0.2), (9, 0.1)]).unwrap();
    let s = JointDegreeStats::uncorrelated(&dist);
    let y = Step1Weights::new(&s, WeightScheme::Y);
    let z = Step1Weights::new(&s, WeightScheme::Z);
    let mean = dist.mean_degree();
    for ((a, b), &k) in y.values().iter().zip(z.values()).zip(dist.degrees()) {
        assert!((a - b).abs() < 1e-12);
        assert!((a - k as f64 / mean).abs() < 1e-12);
    }
    // The literal printed factor does not reduce to k / mean degree.
    let printed = Step1Weights::new(&s, WeightScheme::ZAsPrinted);
    assert!(printed
        .values()
        .iter()
        .zip(y.values())
        .any(|(a, b)| (a - b).abs() > 1e-3));
}

#[test]
fn regular_recursion_converges_for_every_sampler() {
    let g = Graph::from_edges(100, (0..100).map(|v| (v, (v + 1) % 100))).unwrap();
    let s = JointDegreeStats::from_graph(&g);
    let params = SisParams::from_lambda(2.0, 0.5, 2).unwrap();
    let m = g.node_count() as f64;
    for scheme in [WeightScheme::X, WeightScheme::Y, WeightScheme::Z] {
        let w = Step1Weights::new(&s, scheme);
        let traj = iterate(
            vec![0.01],
            &w,
            &s,
            &params,
            Rule::NonMonophilic,
            m,
            10_000 * 100,
            100_000,
        )
        .unwrap();
        let last = &traj.last().unwrap().1;
        assert!((last[0] - 0.5).abs() < 1e-6);
    }
    let zero = iterate(
        vec![0.0],
        &Step1Weights::new(&s, WeightScheme::X),
        &s,
        &params,
        Rule::Monophilic,
        m,
        500,
        1,
    )
    .unwrap();
    assert!(zero.iter().all(|(_, x)| x[0] == 0.0));
}

#[test]
fn fixed_points_agree_across_sampler_weights() {
    for g in test_graphs() {
        let s = JointDegreeStats::from_graph(&g);
        let d = g.max_degree();
        for rule in Rule::ALL {
            let lambda = 1.5 * critical_threshold(&s, d, rule);
            let delta = (1.0 / lambda).min(1.0);
            let params = SisParams::from_lambda(lambda, delta, d).unwrap();
            let x0 = vec![0.2; s.class_count()];
            let solved = stationary_solve(lambda, &s, d, rule, &SolverOptions::default()).unwrap();
            let mut previous: Option<Vec<f64>> = None;
            for scheme in [WeightScheme::X, WeightScheme::Y, WeightScheme::Z] {
                let w = Step1Weights::new(&s, scheme);
                let scale = w.values().iter().cloned().fold(1.0, f64::max);
                let (x, _) =
                    iterate_to_fixed_point(x0.clone(), &w, &s, &params, rule, 2.0 * scale, 1e-13, 50_000_000).unwrap();
                for (a, b) in x.iter().zip(&solved.x) {
                    assert!((a - b).abs() < 1e-6, "{scheme:?}: {a} vs {b}");
                }
                if let Some(p) = &previous {
                    assert!(x.iter().zip(p).all(|(a, b)| (a - b).abs() < 1e-6));
                }
                previous = Some(x);
            }
        }
    }
}

#[test]
fn curves_are_monotone_with_onsets_at_thresholds() {
    let grid: Vec<f64> = (1..=200).map(|i| i as f64 * 0.1).collect();
    for g in test_graphs() {
        let s = JointDegreeStats::from_graph(&g);
        let d = g.max_degree();
        let mut curves = Vec::new();
        for rule in Rule::ALL {
            let curve = rho_lambda_curve(&s, d, rule, &grid, &SolverOptions::default()).unwrap();
            let star = critical_threshold(&s, d, rule);
            for w in curve.windows(2) {
                assert!(w[1].rho >= w[0].rho - 1e-9);
            }
            for p in &curve {
                assert_eq!(
                    p.rho > 0.0,
                    p.lambda > star * (1.0 + 1e-9),
                    "lambda {} star {star}",
                    p.lambda
                );
            }
            curves.push(curve);
        }
        // Pointwise dominance holds on these graphs; only the threshold
        // ordering is guaranteed in general.
        for (a, b) in curves[0].iter().zip(&curves[1]) {
            assert!(b.rho >= a.rho - 1e-9, "lambda {}: {} vs {}", a.lambda, b.rho, a.rho);
        }
    }
}

#[test]
fn regular_closed_forms() {
    let g = Graph::from_edges(12, (0..12).flat_map(|v| [(v, (v + 1) % 12), (v, (v + 3) % 12)])).unwrap();
    let s = JointDegreeStats::from_graph(&g);
    for rule in Rule::ALL {
        assert!((critical_threshold(&s, 4, rule) - 1.0).abs() < 1e-12);
        for lambda in [1.5, 2.0, 4.0] {
            let sol = stationary_solve(lambda, &s, 4, rule, &SolverOptions::default()).unwrap();
            assert!((sol.rho - (1.0 - 1.0 / lambda)).abs() < 1e-8);
            assert!((sol.theta - sol.rho).abs() < 1e-8);
        }
        for lambda in [0.5, 1.0] {
            let sol = stationary_solve(lambda, &s, 4, rule, &SolverOptions::default()).unwrap();
            assert_eq!(sol.rho, 0.0);
        }
    }
}
