//! SIS over a reactive network.
//!
//! The network is a Markov chain over a finite [`GraphFamily`] whose members
//! share one degree distribution but differ in degree correlations. Its
//! transition matrix depends on the current population state through a
//! [`TransitionKernel`]. For large populations the infected fractions follow
//!
//! ```text
//! dx/dt = Σ_i π_x(i) H(x, G_i),    P_x' π_x = π_x
//! ```
//!
//! where `H(x, G)` is the monophilic mean-field drift evaluated with `G`'s
//! conditional degree law and `π_x` the stationary distribution of the graph
//! chain frozen at `x`. One chain step corresponds to `1 / M` units of ODE
//! time.

mod coupled;
mod family;
mod kernel;
mod manifest;
mod ode;
mod stationary;

use thiserror::Error;

use crate::graph::GraphError;
use crate::meanfield::MeanFieldError;
use crate::sis::SisError;

pub use coupled::{simulate_coupled, CoupledRecord, StepOrder};
pub use family::{GraphFamily, MAX_MEMBERS};
pub use kernel::{transition_matrix, validate_kernel, ConstantKernel, KernelState, LogisticKernel, TransitionKernel};
pub use manifest::{FamilyManifest, KernelSpec};
pub use ode::{
    averaged_drift, deviation_report, drift_h, integrate_constrained_ode, lipschitz_estimate, ConstrainedTrajectory,
    OdePoint,
};
pub use stationary::{stationary_distribution, stationary_residual};

#[derive(Debug, Error)]
pub enum ReactiveError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("member {member} has a different degree distribution from member 0")]
    MismatchedDistribution { member: usize },
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("graph chain is reducible: stationary null space has dimension {dimension}")]
    Reducible { dimension: usize },
    #[error("at t = {t}: {source}")]
    AtTime {
        t: f64,
        x: Vec<f64>,
        #[source]
        source: Box<ReactiveError>,
    },
    #[error("state left [0,1] at t = {t}: x[{class}] = {value}")]
    LeftUnitCube { t: f64, class: usize, value: f64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sis(#[from] SisError),
    #[error(transparent)]
    MeanField(#[from] MeanFieldError),
    #[error("manifest: {0}")]
    Manifest(String),
}
