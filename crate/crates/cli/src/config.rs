//! Experiment configuration and its validation.

use std::path::{Path, PathBuf};

use contagion::graph::DegreeSpec;
use contagion::reactive::StepOrder;
use contagion::{Rule, Sampler};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Generate,
    Rewire,
    Stats,
    Simulate,
    Meanfield,
    Thresholds,
    Sweep,
    Reactive,
    Compare,
    Figure1,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Generate => "generate",
            ExperimentKind::Rewire => "rewire",
            ExperimentKind::Stats => "stats",
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::Meanfield => "meanfield",
            ExperimentKind::Thresholds => "thresholds",
            ExperimentKind::Sweep => "sweep",
            ExperimentKind::Reactive => "reactive",
            ExperimentKind::Compare => "compare",
            ExperimentKind::Figure1 => "figure1",
        }
    }
}

/// An explicit list of values or an inclusive arithmetic range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            GridSpec::List(v) => v.clone(),
            GridSpec::Range { start, stop, step } => {
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                (0..=n).map(|i| start + i as f64 * step).collect()
            }
        }
    }
}

/// Where the graph (or degree law) comes from. Paths are relative to the
/// config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degrees: Option<PathBuf>,
    /// CSV `k,P_k`; treated as degree-uncorrelated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<PathBuf>,
    /// Reactive family manifest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_spec: Option<DegreeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    /// Infection scale; when absent it is `lambda · delta`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_grid: Option<GridSpec>,
    pub rules: Vec<Rule>,
    pub sampler: Sampler,
    pub init_fraction: f64,
    /// Horizon in sweeps (`T = sweeps · M`) unless `steps` is set.
    pub sweeps: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record_every: Option<u64>,
    pub terminal_fraction: f64,
    pub rho_cut: f64,
    pub tol: f64,
    pub max_iters: usize,
    /// Step size scale for distribution-only inputs.
    pub population: f64,
    pub targets: Vec<f64>,
    pub rewire_tolerance: f64,
    pub max_swaps: usize,
    /// Euler step for the reactive ODE; defaults to `1 / M`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ode_step: Option<f64>,
    pub initial_member: usize,
    pub order: StepOrder,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            nu: None,
            delta: 0.1,
            lambda: None,
            lambda_grid: None,
            rules: Rule::ALL.to_vec(),
            sampler: Sampler::X,
            init_fraction: 0.05,
            sweeps: 200.0,
            steps: None,
            record_every: None,
            terminal_fraction: 0.1,
            rho_cut: 0.01,
            tol: 1e-10,
            max_iters: 1_000_000,
            population: 1e4,
            targets: vec![-0.3, 0.0, 0.3],
            rewire_tolerance: 0.02,
            max_swaps: 5_000_000,
            ode_step: None,
            initial_member: 0,
            order: StepOrder::TransitionFirst,
        }
    }
}

impl Params {
    /// `ν`, from `nu` or from `lambda · delta`.
    pub fn nu(&self) -> Option<f64> {
        self.nu.or(self.lambda.map(|l| l * self.delta))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub output_dir: PathBuf,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub inputs: Inputs,
    #[serde(default)]
    pub params: Params,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String, ConfigError> {
        toml::to_string(self).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    /// Rewrites relative paths against `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.output_dir);
        for p in [
            &mut self.inputs.graph,
            &mut self.inputs.degrees,
            &mut self.inputs.distribution,
            &mut self.inputs.family,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
    }

    /// Checks inputs and parameter ranges for the configured kind.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.seeds.is_empty() {
            return bad("seeds must be nonempty".into());
        }
        let inputs = &self.inputs;
        for p in [&inputs.graph, &inputs.degrees, &inputs.distribution, &inputs.family]
            .into_iter()
            .flatten()
        {
            if !p.exists() {
                return bad(format!("input {} does not exist", p.display()));
            }
        }

        let p = &self.params;
        if !(p.delta > 0.0 && p.delta <= 1.0) {
            return bad(format!("delta = {} outside (0, 1]", p.delta));
        }
        if let Some(nu) = p.nu() {
            if !(0.0..=1.0).contains(&nu) {
                return bad(format!("nu = {nu} outside [0, 1]"));
            }
        }
        if !(0.0..=1.0).contains(&p.init_fraction) {
            return bad(format!("init_fraction = {} outside [0, 1]", p.init_fraction));
        }
        if !(p.terminal_fraction > 0.0 && p.terminal_fraction <= 1.0) {
            return bad("terminal_fraction must be in (0, 1]".into());
        }
        if !(p.sweeps > 0.0) || p.steps == Some(0) || p.record_every == Some(0) {
            return bad("horizon and record interval must be positive".into());
        }
        if !(p.tol > 0.0) || p.max_iters == 0 || !(p.population > 0.0) {
            return bad("tol, max_iters and population must be positive".into());
        }
        if p.rules.is_empty() {
            return bad("rules must be nonempty".into());
        }
        if p.ode_step.is_some_and(|h| !(h > 0.0)) {
            return bad("ode_step must be positive".into());
        }
        if let Some(grid) = &p.lambda_grid {
            if let GridSpec::Range { step, .. } = grid {
                if !(*step > 0.0) {
                    return bad("grid step must be positive".into());
                }
            }
            let values = grid.values();
            if values.is_empty() || values.windows(2).any(|w| w[0] >= w[1]) || values[0] <= 0.0 {
                return bad("lambda grid must be positive and increasing".into());
            }
        }

        let has_graph = inputs.graph.is_some();
        let has_stats = has_graph || inputs.distribution.is_some();
        let needs = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(ConfigError::Invalid(format!("{} needs {what}", self.kind.name())))
            }
        };
        let grid_fits_delta = || match &p.lambda_grid {
            Some(g) if g.values().iter().all(|l| l * p.delta <= 1.0) => Ok(()),
            Some(_) => Err(ConfigError::Invalid(
                "every lambda · delta on the grid must be at most 1".into(),
            )),
            None => Err(ConfigError::Invalid(format!(
                "{} needs params.lambda_grid",
                self.kind.name()
            ))),
        };
        match self.kind {
            ExperimentKind::Generate => needs(
                inputs.degrees.is_some() || (inputs.degree_spec.is_some() && inputs.nodes.is_some()),
                "inputs.degrees or inputs.degree_spec with inputs.nodes",
            ),
            ExperimentKind::Rewire => {
                needs(has_graph, "inputs.graph")?;
                needs(!p.targets.is_empty(), "params.targets")
            }
            ExperimentKind::Stats => needs(has_graph, "inputs.graph"),
            ExperimentKind::Thresholds => needs(has_stats, "inputs.graph or inputs.distribution"),
            ExperimentKind::Meanfield => {
                needs(has_stats, "inputs.graph or inputs.distribution")?;
                needs(p.lambda_grid.is_some(), "params.lambda_grid")?;
                needs(
                    p.steps.is_none() || p.nu().is_some(),
                    "params.nu or params.lambda with params.steps",
                )
            }
            ExperimentKind::Simulate | ExperimentKind::Compare => {
                needs(has_graph, "inputs.graph")?;
                needs(p.nu().is_some(), "params.nu or params.lambda")
            }
            ExperimentKind::Sweep => {
                needs(has_graph, "inputs.graph")?;
                grid_fits_delta()
            }
            ExperimentKind::Reactive => {
                needs(inputs.family.is_some(), "inputs.family")?;
                needs(p.nu().is_some(), "params.nu or params.lambda")
            }
            ExperimentKind::Figure1 => {
                needs(
                    inputs.degree_spec.is_some() && inputs.nodes.is_some(),
                    "inputs.degree_spec and inputs.nodes",
                )?;
                needs(p.lambda_grid.is_some(), "params.lambda_grid")?;
                needs(!p.targets.is_empty(), "params.targets")
            }
        }
    }
}
