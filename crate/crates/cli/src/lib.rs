//! Config-driven experiment runner for the `contagion` toolkit.
//!
//! A run reads one TOML [`ExperimentConfig`], executes the pipeline for its
//! kind, writes CSV outputs and a `manifest.json` into the output directory,
//! and reports failures as [`RunError`] with exit codes 2 (validation) or 1
//! (runtime).

// `!(a > b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod pipelines;

use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

pub use config::{ConfigError, ExperimentConfig, ExperimentKind, GridSpec, Inputs, Params};
pub use pipelines::{figure1_pipeline, Figure1Data, Figure1Options, StageTiming};

use output::{sha256_hex, OutputDir, OutputFile};
use pipelines::Stages;

/// Environment variable capping the worker pool.
pub const WORKERS_ENV: &str = "CONTAGION_WORKERS";
/// Environment variable overriding `output_dir`.
pub const OUTPUT_DIR_ENV: &str = "CONTAGION_OUTPUT_DIR";

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{stage}: {message}")]
    Runtime { stage: String, message: String },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Runtime { .. } => 1,
        }
    }

    /// Machine-readable error report.
    pub fn report(&self) -> serde_json::Value {
        match self {
            RunError::Config(e) => serde_json::json!({ "error": "validation", "message": e.to_string() }),
            RunError::Runtime { stage, message } => {
                serde_json::json!({ "error": "runtime", "stage": stage, "message": message })
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub validate_only: bool,
    pub output_dir: Option<PathBuf>,
    pub workers: Option<usize>,
}

impl RunOptions {
    /// Reads the worker-pool and output-directory overrides from the
    /// environment.
    pub fn from_env(mut self) -> Self {
        if let Some(w) = std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse().ok()) {
            self.workers = Some(w);
        }
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
            self.output_dir = Some(PathBuf::from(dir));
        }
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub kind: String,
    pub config_hash: String,
    pub seeds: Vec<u64>,
    pub tool_version: String,
    pub outputs: Vec<OutputFile>,
    pub stages: Vec<StageTiming>,
}

/// Loads, validates and (unless `validate_only`) runs one config. Returns
/// the manifest of a completed run.
pub fn run(config_path: &Path, opts: &RunOptions) -> Result<Option<RunManifest>, RunError> {
    let mut cfg = ExperimentConfig::load(config_path)?;
    if let Some(seed) = opts.seed {
        cfg.seeds = vec![seed];
    }
    let config_hash = sha256_hex(cfg.to_toml()?.as_bytes());
    let base = config_path.parent().unwrap_or(Path::new("."));
    cfg.resolve_paths(base);
    if let Some(dir) = &opts.output_dir {
        cfg.output_dir = dir.clone();
    }
    cfg.validate()?;
    if opts.validate_only {
        return Ok(None);
    }

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = opts.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| RunError::Runtime {
        stage: "workers".into(),
        message: e.to_string(),
    })?;

    let mut out = OutputDir::create(&cfg.output_dir).map_err(|e| RunError::Runtime {
        stage: "output".into(),
        message: e.to_string(),
    })?;
    let mut stages = Stages::default();
    log::info!("running {} into {}", cfg.kind.name(), out.root().display());
    pool.install(|| pipelines::run_kind(&cfg, &mut out, &mut stages))?;

    let manifest = RunManifest {
        kind: cfg.kind.name().to_string(),
        config_hash,
        seeds: cfg.seeds.clone(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        outputs: out.into_files(),
        stages: stages.0,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(cfg.output_dir.join("manifest.json"), json).map_err(|e| RunError::Runtime {
        stage: "output".into(),
        message: e.to_string(),
    })?;
    Ok(Some(manifest))
}
