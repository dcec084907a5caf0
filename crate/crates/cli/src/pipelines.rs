//! One function per experiment kind. Each writes its CSVs through an
//! [`OutputDir`] and reports stage timings.

use std::path::Path;
use std::time::Instant;

use contagion::deviation::meanfield_deviation;
use contagion::graph::{
    assortativity, build_configuration_model_with, degree_law, expected_degree, read_degree_sequence, read_edge_list,
    rewire_to_assortativity, sample_degree_sequence, write_degree_sequence, write_edge_list, ConfigModelOptions,
    DegreeDistribution, DegreeSpec,
};
use contagion::meanfield::{critical_threshold, iterate, rho_lambda_curve, SolverOptions, Step1Weights};
use contagion::reactive::{deviation_report, integrate_constrained_ode, simulate_coupled, FamilyManifest};
use contagion::sis::{cell_rng, estimate_threshold, init_population, run_trajectory, SweepConfig};
use contagion::{Graph, JointDegreeStats, Rule, Sampler, SisParams};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::output::{fmt_sig, fmt_signed, push_state_rows, Csv, OutputDir};
use crate::RunError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageTiming {
    pub name: String,
    pub seconds: f64,
}

#[derive(Debug, Default)]
pub struct Stages(pub Vec<StageTiming>);

impl Stages {
    fn time<T>(&mut self, name: &str, f: impl FnOnce() -> Result<T, RunError>) -> Result<T, RunError> {
        let start = Instant::now();
        let out = f()?;
        self.0.push(StageTiming {
            name: name.to_string(),
            seconds: start.elapsed().as_secs_f64(),
        });
        Ok(out)
    }
}

fn runtime<E: std::fmt::Display>(stage: &'static str) -> impl Fn(E) -> RunError {
    move |e| RunError::Runtime {
        stage: stage.to_string(),
        message: e.to_string(),
    }
}

fn io_error(e: std::io::Error) -> RunError {
    RunError::Runtime {
        stage: "output".into(),
        message: e.to_string(),
    }
}

/// Parses a `k,P_k` CSV; a non-numeric first line is taken as a header.
pub fn parse_distribution(text: &str) -> Result<DegreeDistribution, String> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, p) = line
            .split_once(',')
            .ok_or_else(|| format!("line {}: expected `k,P_k`", i + 1))?;
        match (k.trim().parse::<usize>(), p.trim().parse::<f64>()) {
            (Ok(k), Ok(p)) => pairs.push((k, p)),
            _ if pairs.is_empty() && i == 0 => continue,
            _ => return Err(format!("line {}: cannot parse `{line}`", i + 1)),
        }
    }
    DegreeDistribution::from_probabilities(&pairs).map_err(|e| e.to_string())
}

/// Joint statistics from a graph, or degree-uncorrelated ones from a `k,P_k`
/// file, with the step-size scale for the recursion.
struct StatsSource {
    stats: JointDegreeStats,
    max_degree: usize,
    population: f64,
    graph: Option<Graph>,
}

fn load_graph(path: &Path) -> Result<Graph, RunError> {
    read_edge_list(path).map_err(runtime("load graph"))
}

fn load_stats(cfg: &ExperimentConfig) -> Result<StatsSource, RunError> {
    if let Some(path) = &cfg.inputs.graph {
        let g = load_graph(path)?;
        Ok(StatsSource {
            stats: JointDegreeStats::from_graph(&g),
            max_degree: g.max_degree(),
            population: g.node_count() as f64,
            graph: Some(g),
        })
    } else {
        let path = cfg.inputs.distribution.as_ref().expect("validated");
        let text = std::fs::read_to_string(path).map_err(runtime("load distribution"))?;
        let dist = parse_distribution(&text).map_err(runtime("load distribution"))?;
        Ok(StatsSource {
            max_degree: dist.max_degree(),
            stats: JointDegreeStats::uncorrelated(&dist),
            population: cfg.params.population,
            graph: None,
        })
    }
}

fn sis_params(cfg: &ExperimentConfig, max_degree: usize) -> Result<SisParams, RunError> {
    let nu = cfg.params.nu().expect("validated");
    SisParams::new(nu, cfg.params.delta, max_degree).map_err(runtime("parameters"))
}

fn horizon(cfg: &ExperimentConfig, m: usize) -> u64 {
    cfg.params
        .steps
        .unwrap_or_else(|| ((cfg.params.sweeps * m as f64).round() as u64).max(1))
}

fn r_or_blank(stats: &JointDegreeStats) -> String {
    assortativity(stats).map(fmt_sig).unwrap_or_default()
}

pub fn run_kind(cfg: &ExperimentConfig, out: &mut OutputDir, stages: &mut Stages) -> Result<(), RunError> {
    match cfg.kind {
        ExperimentKind::Generate => generate(cfg, out, stages),
        ExperimentKind::Rewire => rewire(cfg, out, stages),
        ExperimentKind::Stats => stats(cfg, out, stages),
        ExperimentKind::Simulate => simulate(cfg, out, stages),
        ExperimentKind::Meanfield => meanfield(cfg, out, stages),
        ExperimentKind::Thresholds => thresholds(cfg, out, stages),
        ExperimentKind::Sweep => sweep(cfg, out, stages),
        ExperimentKind::Reactive => reactive(cfg, out, stages),
        ExperimentKind::Compare => compare(cfg, out, stages),
        ExperimentKind::Figure1 => figure1(cfg, out, stages),
    }
}

fn generate(cfg: &ExperimentConfig, out: &mut OutputDir, stages: &mut Stages) -> Result<(), RunError> {
    let fixed = match &cfg.inputs.degrees {
        Some(p) => Some(read_degree_sequence(p).map_err(runtime("load degrees"))?),
        None => None,
    };
    let built = stages.time("generate", || {
        cfg.seeds
            .par_iter()
            .map(|&seed| {
                let mut rng = cell_rng(seed, 0);
                let degrees = match &fixed {
                    Some(d) => d.clone(),
                    None => sample_degree_sequence(
                        cfg.inputs.degree_spec.as_ref().expect("validated"),
                        cfg.inputs.nodes.expect("validated"),
                        &mut rng,
                    )
                    .map_err(runtime("degree sequence"))?,
                };
                let (g, report) = build_configuration_model_with(&degrees, ConfigModelOptions::default(), &mut rng)
                    .map_err(runtime("configuration model"))?;
                Ok((seed, degrees, g, report))
            })
            .collect::<Result<Vec<_>, RunError>>()
    })?;

    let mut summary = Csv::new(&[
        "seed",
        "nodes",
        "edges",
        "max_degree",
        "restarts",
        "repaired_edges",
        "erased_stubs",
        "max_degree_deviation",
    ]);
    for (seed, degrees, g, report) in &built {
        let mut edges = Vec::new();
        write_edge_list(g, &mut edges).map_err(runtime("output"))?;
        out.write(&format!("graph_s{seed}.txt"), &String::from_utf8_lossy(&edges))
            .map_err(io_error)?;
        let mut seq = Vec::new();
        write_degree_sequence(degrees, &mut seq).map_err(runtime("output"))?;
        out.write(&format!("degrees_s{seed}.txt"), &String::from_utf8_lossy(&seq))
            .map_err(io_error)?;
        summary.row([
            seed.to_string(),
            g.node_count().to_string(),
            g.edge_count().to_string(),
            g.max_degree().to_string(),
            report.restarts.to_string(),
            report.repaired_edges.to_string(),
            report.erased_stubs.to_string(),
            report.max_degree_deviation.to_string(),
        ]);
    }
    out.write_csv("generate.csv", &summary).map_err(io_error)
}

fn rewire(cfg: &ExperimentConfig, out: &mut OutputDir, stages: &mut Stages) -> Result<(), RunError> {
    let g = load_graph(cfg.inputs.graph.as_ref().expect("validated"))?;
    let p = &cfg.params;
    let cells: Vec<(u64, usize)> = cfg
        .seeds
        .iter()
        .flat_map(|&s| (0..p.targets.len()).map(move |i| (s, i)))
        .collect();
    let results = stages.time("rewire", || {
        cells
            .par_iter()
            .map(|&(seed, i)| {
                let mut rng = cell_rng(seed, i as u64);
                rewire_to_assortativity(&g, p.targets[i], p.max_swaps, p.rewire_tolerance, &mut rng)
                    .map_err(runtime("rewire"))
            })
            .collect::<Result<Vec<_>, RunError>>()
    })?;
    let mut table = Csv::new(&[
        "seed",
        "target",
        "assortativity",
        "converged",
        "accepted_swaps",
        "attempts",
    ]);
    for (&(seed, i), r) in cells.iter().zip(&results) {
        let label = fmt_signed(p.targets[i]);
        let mut edges = Vec::new();
        write_edge_list(&r.graph, &mut edges).map_err(runtime("output"))?;
        out.write(
            &format!("rewired_s{seed}_r{label}.txt"),
            &String::from_utf8_lossy(&edges),
        )
        .map_err(io_error)?;
        table.row([
            seed.to_string(),
            fmt_sig(p.targets[i]),
            fmt_sig(r.assortativity),
            r.converged.to_string(),
            r.accepted_swaps.to_string(),
            r.attempts.to_string(),
        ]);
    }
    out.write_csv("rewire.csv", &table).map_err(io_error)
}

fn stats(cfg: &ExperimentConfig, out: &mut OutputDir, stages: &mut Stages) -> Result<(), RunError> {
    let src = stages.time("load", || load_stats(cfg))?;
    let g = src.graph.as_ref().expect("validated");
    let s = &src.stats;
    let dist = s.distribution();
    let laws: Vec<Vec<f64>> = Sampler::ALL.iter().map(|&x| degree_law(s, x)).collect();

    let mut laws_csv = Csv::new(&["k", "P_X", "P_Y", "P_Z"]);
    for (i, &k) in dist.degrees().iter().enumerate() {
        laws_csv.row([
            k.to_string(),
            fmt_sig(laws[0][i]),
            fmt_sig(laws[1][i]),
            fmt_sig(laws[2][i]),
        ]);
    }
    let mut joint = Csv::new(&["k", "k_prime", "e", "P_k_given_k_prime"]);
    for (i, &k) in dist.degrees().iter().enumerate() {
        for (j, &kp) in dist.degrees().iter().enumerate() {
            if s.joint(i, j) > 0.0 {
                joint.row([
                    k.to_string(),
                    kp.to_string(),
                    fmt_sig(s.joint(i, j)),
                    fmt_sig(s.conditional(i, j)),
                ]);
            }
        }
    }
    let mut summary = Csv::new(&["metric", "value"]);
    let d = g.max_degree();
    for (name, value) in [
        ("nodes", g.node_count().to_string()),
        ("edges", g.edge_count().to_string()),
        ("max_degree", d.to_string()),
        ("mean_degree_x", fmt_sig(expected_degree(dist, &laws[0]))),
        ("mean_degree_y", fmt_sig(expected_degree(dist, &laws[1]))),
        ("mean_degree_z", fmt_sig(expected_degree(dist, &laws[2]))),
        ("assortativity", r_or_blank(s)),
        ("lambda_star_x", fmt_sig(critical_threshold(s, d, Rule::NonMonophilic))),
        ("lambda_star_z", fmt_sig(critical_threshold(s, d, Rule::Monophilic))),
    ] {
        summary.row([name.to_string(), value]);
    }
    out.write_csv("degree_laws.csv", &laws_csv).map_err(io_error)?;
    out.write_csv("joint.csv", &joint).map_err(io_error)?;
    out.write_csv("summary.csv", &summary).map_err(io_error)
}

fn simulate(cfg: &ExperimentConfig, out: &mut OutputDir, stages: &mut Stages) -> Result<(), RunError> {
    let g = load_graph(cfg.inputs.graph.as_ref().expect("validated"))?;
    let params = sis_params(cfg, g.max_degree())?;
    let m = g.node_count();
    let steps = horizon(cfg, m);
    let every = cfg.params.record_every.unwrap_or(m as u64);
    let rules = &cfg.params.rules;
    let cells: Vec<(usize, u64)> = (0..rules.len())
        .flat_map(|r| cfg.seeds.iter().map(move |&s| (r, s)))
        .collect();
    let runs = stages.time("simulate", || {
        cells
            .par_iter()
            .map(|&(r, seed)| {
                let mut rng = cell_rng(seed, r as u64);
                run_trajectory(
                    &g,
                    &params,
                    rules[r],
                    cfg.params.sampler,
                    cfg.params.init_fraction,
                    steps,
                    every,
                    &mut rng,
                )
                .map_err(runtime("simulate"))
            })
            .collect::<Result<Vec<_>, RunError>>()
    })?;
    let degrees = g.degree_distribution().degrees();
    for (&(r, seed), records) in cells.iter().zip(&runs) {
        let mut traj = Csv::new(&["step", "k", "x_k"]);
        let mut rho = Csv::new(&["step", "rho"]);
        for rec in records {
            push_state_rows(&mut traj, &[rec.step.to_string()], degrees, rec.state.values());
            rho.row([rec.step.to_string(), fmt_sig(rec.rho)]);
        }
        let tag = format!("{}_s{seed}", rules[r].name());
        out.write_csv(&format!("trajectory_{tag}.csv"), &traj)
            .map_err(io_error)?;
        out.write_csv(&format!("rho_{tag}.csv"), &rho).map_err(io_error)?;
    }
    Ok(())
}

fn meanfield(cfg: &ExperimentConfig, out: &mut OutputDir, stages: &mut Stages) -> Result<(), RunError> {
    let src = stages.time("load", || load_stats(cfg))?;
    let p = &cfg.params;
    let grid = p.lambda_grid.as_ref().expect("validated").values();
    let opts = SolverOptions {
        tol: p.tol,
        max_iters: p.max_iters,
        ..SolverOptions::default()
    };
    let curves = stages.time("curves", || {
        p.rules
            .par_iter()
            .map(|&rule| rho_lambda_curve(&src.stats, src.max_degree, rule, &grid, &opts).map_err(runtime("meanfield")))
            .collect::<Result<Vec<_>, RunError>>()
    })?;
    let r = r_or_blank(&src.stats);
    let mut csv = Csv::new(&["lambda", "rho", "rule", "assortativity"]);
    for (rule, curve) in p.rules.iter().zip(&curves) {
        for pt in curve {
            csv.row([fmt_sig(pt.lambda), fmt_sig(pt.rho), rule.name().to_string(), r.clone()]);
        }
    }
    out.write_csv("curve.csv", &csv).map_err(io_error)?;

    if let Some(steps) = p.steps {
        let params = sis_params(cfg, src.max_degree)?;
        let weights = Step1Weights::new(&src.stats, p.sampler.into());
        let every = p.record_every.unwrap_or(src.population.round().max(1.0) as u64);
        let x0 = vec![p.init_fraction; src.stats.class_count()];
        for &rule in &p.rules {
            let traj = stages.time("iterate", || {
                iterate(
                    x0.clone(),
                    &weights,
                    &src.stats,
                    &params,
                    rule,
                    src.population,
                    steps,
                    every,
                )
                .map_err(runtime("meanfield"))
            })?;
            let mut states = Csv::new(&["step", "k", "x_k"]);
            let mut rho = Csv::new(&["step", "rho"]);
            for (n, x) in &traj {
                push_state_rows(&mut states, &[n.to_string()], src.stats.degrees(), x);
                rho.row([n.to_string(), fmt_sig(src.stats.distribution().average(x))]);
            }
            out.write_csv(&format!("meanfield_trajectory_{}.csv", rule.name()), &states)
                .map_err(io_error)?;
            out.write_csv(&format!("meanfield_rho_{}.csv", rule.name()), &rho)
                .map_err(io_error)?;
        }
    }
    Ok(())
}

fn thresholds(cfg: &ExperimentConfig, out: &mut OutputDir, stages: &mut Stages) -> Result<(), RunError> {
    let src = stages.time("load", || load_stats(cfg))?;
    let mut csv = Csv::new(&["rule", "lambda_star", "expected_degree"]);
    for &rule in &cfg.params.rules {
        let sampler = match rule {
            Rule::NonMonophilic => Sampler::X,
            Rule::Monophilic => Sampler::Z,
        };
        let mean = expected_degree(src.stats.distribution(), &degree_law(&src.stats, sampler));
        csv.row([
            rule.name().to_string(),
            fmt_sig(critical_threshold(&src.stats, src.max_degree, rule)),
            fmt_sig(mean),
        ]);
    }
    out.write_csv("thresholds.csv", &csv).map_err(io_error)
}

fn sweep(cfg: &ExperimentConfig, out: &mut OutputDir, stages: &mut Stages) -> Result<(), RunError> {
    let g = load_graph(cfg.inputs.graph.as_ref().expect("validated"))?;
    let p = &cfg.params;
    let grid = p.lambda_grid.as_ref().expect("validated").values();
    let m = g.node_count() as f64;
    let sweep_cfg = SweepConfig {
        delta: p.delta,
        init_fraction: p.init_fraction,
        sweeps: p.steps.map_or(p.sweeps, |s| s as f64 / m),
        record_every: p.record_every,
        terminal_fraction: p.terminal_fraction,
        rho_cut: p.rho_cut,
        seeds: cfg.seeds.clone(),
    };
    let stats = JointDegreeStats::from_graph(&g);
    let mut estimates = Csv::new(&["rule", "sampler", "lambda_star", "lambda_star_meanfield"]);
    for &rule in &p.rules {
        let est = stages.time("sweep", || {
            estimate_threshold(&g, rule, p.sampler, &grid, &sweep_cfg).map_err(runtime("sweep"))
        })?;
        let mut rows = Csv::new(&["lambda", "seed", "rho_terminal"]);
        for r in &est.rows {
            rows.row([fmt_sig(r.lambda), r.seed.to_string(), fmt_sig(r.rho_terminal)]);
        }
        let mut summary = Csv::new(&["lambda", "mean_rho", "std_rho"]);
        for s in &est.summary {
            summary.row([fmt_sig(s.lambda), fmt_sig(s.mean_rho), fmt_sig(s.std_rho)]);
        }
        out.write_csv(&format!("sweep_{}.csv", rule.name()), &rows)
            .map_err(io_error)?;
        out.write_csv(&format!("sweep_summary_{}.csv", rule.name()), &summary)
            .map_err(io_error)?;
        estimates.row([
            rule.name().to_string(),
            p.sampler.name().to_string(),
            est.lambda_star.map(fmt_sig).unwrap_or_default(),
            fmt_sig(critical_threshold(&stats, g.max_degree(), rule)),
        ]);
    }
    out.write_csv("threshold_estimates.csv", &estimates).map_err(io_error)
}

fn compare(cfg: &ExperimentConfig, out: &mut OutputDir, stages: &mut Stages) -> Result<(), RunError> {
    let g = load_graph(cfg.inputs.graph.as_ref().expect("validated"))?;
    let params = sis_params(cfg, g.max_degree())?;
    let steps = horizon(cfg, g.node_count());
    let rules = &cfg.params.rules;
    let cells: Vec<(usize, u64)> = (0..rules.len())
        .flat_map(|r| cfg.seeds.iter().map(move |&s| (r, s)))
        .collect();
    let devs = stages.time("compare", || {
        cells
            .par_iter()
            .map(|&(r, seed)| {
                let mut rng = cell_rng(seed, r as u64);
                meanfield_deviation(
                    &g,
                    &params,
                    rules[r],
                    cfg.params.sampler,
                    cfg.params.init_fraction,
                    steps,
                    &mut rng,
                )
                .map_err(runtime("compare"))
            })
            .collect::<Result<Vec<_>, RunError>>()
    })?;
    let mut csv = Csv::new(&["rule", "seed", "max_deviation"]);
    for (&(r, seed), d) in cells.iter().zip(&devs) {
        csv.row([rules[r].name().to_string(), seed.to_string(), fmt_sig(*d)]);
    }
    out.write_csv("compare.csv", &csv).map_err(io_error)
}

fn reactive(cfg: &ExperimentConfig, out: &mut OutputDir, stages: &mut Stages) -> Result<(), RunError> {
    let (_, family, kernel) = stages.time("load", || {
        FamilyManifest::load(cfg.inputs.family.as_ref().expect("validated")).map_err(runtime("family"))
    })?;
    let base = family.graph(0).expect("manifest families carry graphs").clone();
    let m = base.node_count();
    let params = sis_params(cfg, family.max_degree())?;
    let p = &cfg.params;
    let steps = horizon(cfg, m);
    let every = p.record_every.unwrap_or(m as u64);
    let h = p.ode_step.unwrap_or(1.0 / m as f64);
    let ode_every = ((every as f64 / m as f64 / h).round() as usize).max(1);
    let n = family.len();
    let degrees = family.distribution().degrees().to_vec();

    let runs = stages.time("reactive", || {
        cfg.seeds
            .par_iter()
            .map(|&seed| {
                let mut rng = cell_rng(seed, 0);
                let s0 = init_population(&base, p.init_fraction, &mut rng).map_err(runtime("reactive"))?;
                let x0 = s0.population_state(&base).0;
                let coupled = simulate_coupled(
                    s0,
                    &family,
                    kernel.as_ref(),
                    &params,
                    p.initial_member,
                    p.order,
                    steps,
                    every,
                    &mut rng,
                )
                .map_err(runtime("reactive"))?;
                let ode = integrate_constrained_ode(
                    &x0,
                    &family,
                    kernel.as_ref(),
                    &params,
                    h,
                    steps as f64 / m as f64,
                    ode_every,
                )
                .map_err(runtime("reactive"))?;
                let dev = deviation_report(&coupled, &ode, m).map_err(runtime("reactive"))?;
                Ok((coupled, ode, dev))
            })
            .collect::<Result<Vec<_>, RunError>>()
    })?;

    let mut header = vec!["t".to_string(), "k".to_string(), "x_k".to_string()];
    header.extend((1..=n).map(|i| format!("pi_{i}")));
    let mut deviations = Csv::new(&["seed", "deviation"]);
    for (&seed, (coupled, ode, dev)) in cfg.seeds.iter().zip(&runs) {
        let mut ode_csv = Csv::new(&header);
        for pt in &ode.points {
            for (&k, &x) in degrees.iter().zip(&pt.x) {
                let mut row = vec![fmt_sig(pt.t), k.to_string(), fmt_sig(x)];
                row.extend(pt.pi.iter().map(|&v| fmt_sig(v)));
                ode_csv.row(row);
            }
        }
        let mut sim = Csv::new(&["n", "member", "k", "x_k"]);
        for rec in coupled {
            push_state_rows(
                &mut sim,
                &[rec.step.to_string(), (rec.member + 1).to_string()],
                &degrees,
                rec.state.values(),
            );
        }
        out.write_csv(&format!("ode_s{seed}.csv"), &ode_csv).map_err(io_error)?;
        out.write_csv(&format!("coupled_s{seed}.csv"), &sim).map_err(io_error)?;
        deviations.row([seed.to_string(), fmt_sig(*dev)]);
    }
    out.write_csv("deviation.csv", &deviations).map_err(io_error)
}

/// One rewired variant of the Figure 1 base graph.
#[derive(Debug, Clone)]
pub struct RewiredVariant {
    pub target: f64,
    pub graph: Graph,
    pub stats: JointDegreeStats,
    pub assortativity: f64,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct Figure1Data {
    pub base: Graph,
    pub variants: Vec<RewiredVariant>,
    /// Degree classes shared by all variants.
    pub degrees: Vec<usize>,
    /// `cdfs[i][c]`: CDF of `d(Z)` for variant `i` at class `c`.
    pub cdfs: Vec<Vec<f64>>,
    /// `(variant, rule, curve)`.
    pub curves: Vec<(usize, Rule, Vec<contagion::meanfield::CurvePoint>)>,
}

#[derive(Debug, Clone)]
pub struct Figure1Options {
    pub spec: DegreeSpec,
    pub nodes: usize,
    pub targets: Vec<f64>,
    pub tolerance: f64,
    pub max_swaps: usize,
    pub grid: Vec<f64>,
    pub solver: SolverOptions,
    pub seed: u64,
}

/// Builds one base graph, rewires it to each target assortativity and
/// evaluates the `d(Z)` CDFs and both `ρ`–`λ` curves of every variant.
pub fn figure1_pipeline(opts: &Figure1Options) -> Result<Figure1Data, RunError> {
    let mut rng = cell_rng(opts.seed, 0);
    let degrees = sample_degree_sequence(&opts.spec, opts.nodes, &mut rng).map_err(runtime("degree sequence"))?;
    let (base, _) = build_configuration_model_with(&degrees, ConfigModelOptions::default(), &mut rng)
        .map_err(runtime("configuration model"))?;

    let variants = opts
        .targets
        .par_iter()
        .enumerate()
        .map(|(i, &target)| {
            let mut rng = cell_rng(opts.seed, i as u64 + 1);
            let out = rewire_to_assortativity(&base, target, opts.max_swaps, opts.tolerance, &mut rng)
                .map_err(runtime("rewire"))?;
            Ok(RewiredVariant {
                target,
                stats: JointDegreeStats::from_graph(&out.graph),
                graph: out.graph,
                assortativity: out.assortativity,
                converged: out.converged,
            })
        })
        .collect::<Result<Vec<_>, RunError>>()?;

    let classes = base.degree_distribution().degrees().to_vec();
    let cdfs = variants
        .iter()
        .map(|v| {
            degree_law(&v.stats, Sampler::Z)
                .iter()
                .scan(0.0, |acc, p| {
                    *acc += p;
                    Some(*acc)
                })
                .collect()
        })
        .collect();

    let d = base.max_degree();
    let jobs: Vec<(usize, Rule)> = (0..variants.len())
        .flat_map(|i| Rule::ALL.into_iter().map(move |r| (i, r)))
        .collect();
    let curves = jobs
        .par_iter()
        .map(|&(i, rule)| {
            rho_lambda_curve(&variants[i].stats, d, rule, &opts.grid, &opts.solver)
                .map(|c| (i, rule, c))
                .map_err(runtime("meanfield"))
        })
        .collect::<Result<Vec<_>, RunError>>()?;

    Ok(Figure1Data {
        base,
        variants,
        degrees: classes,
        cdfs,
        curves,
    })
}

fn figure1(cfg: &ExperimentConfig, out: &mut OutputDir, stages: &mut Stages) -> Result<(), RunError> {
    let p = &cfg.params;
    let opts = Figure1Options {
        spec: cfg.inputs.degree_spec.clone().expect("validated"),
        nodes: cfg.inputs.nodes.expect("validated"),
        targets: p.targets.clone(),
        tolerance: p.rewire_tolerance,
        max_swaps: p.max_swaps,
        grid: p.lambda_grid.as_ref().expect("validated").values(),
        solver: SolverOptions {
            tol: p.tol,
            max_iters: p.max_iters,
            ..SolverOptions::default()
        },
        seed: cfg.seeds[0],
    };
    let data = stages.time("figure1", || figure1_pipeline(&opts))?;
    let labels: Vec<String> = data.variants.iter().map(|v| fmt_signed(v.target)).collect();

    let mut header = vec!["k".to_string()];
    header.extend(labels.iter().map(|l| format!("cdf_r{l}")));
    let mut cdf = Csv::new(&header);
    for (c, &k) in data.degrees.iter().enumerate() {
        let mut row = vec![k.to_string()];
        row.extend(data.cdfs.iter().map(|v| fmt_sig(v[c])));
        cdf.row(row);
    }
    let mut curves = Csv::new(&["lambda", "rho", "rule", "r"]);
    for (i, rule, curve) in &data.curves {
        for pt in curve {
            curves.row([
                fmt_sig(pt.lambda),
                fmt_sig(pt.rho),
                rule.name().to_string(),
                labels[*i].clone(),
            ]);
        }
    }
    let d = data.base.max_degree();
    let mut graphs = Csv::new(&[
        "target",
        "assortativity",
        "converged",
        "expected_degree_x",
        "expected_degree_z",
        "lambda_star_x",
        "lambda_star_z",
    ]);
    for v in &data.variants {
        let dist = v.stats.distribution();
        graphs.row([
            fmt_sig(v.target),
            fmt_sig(v.assortativity),
            v.converged.to_string(),
            fmt_sig(expected_degree(dist, &degree_law(&v.stats, Sampler::X))),
            fmt_sig(expected_degree(dist, &degree_law(&v.stats, Sampler::Z))),
            fmt_sig(critical_threshold(&v.stats, d, Rule::NonMonophilic)),
            fmt_sig(critical_threshold(&v.stats, d, Rule::Monophilic)),
        ]);
    }
    out.write_csv("figure1a_cdf.csv", &cdf).map_err(io_error)?;
    out.write_csv("figure1b_curves.csv", &curves).map_err(io_error)?;
    out.write_csv("figure1_graphs.csv", &graphs).map_err(io_error)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distribution_csv() {
        let d = parse_distribution("k,P_k\n1,0.5\n3,0.5\n").unwrap();
        assert_eq!(d.degrees(), &[1, 3]);
        assert!(parse_distribution("1,0.5\n3,0.4\n").is_err());
        assert!(parse_distribution("k,P_k\n1;0.5\n").is_err());
    }
}
