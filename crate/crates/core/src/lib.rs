//! Discrete-time SIS contagion on networks.
//!
//! * [`graph`]: graphs, joint degree statistics, assortativity rewiring and
//!   the random-node / random-edge-end / random-neighbour samplers.
//! * [`sis`]: exact Monte Carlo of the one-node-per-step SIS chain on
//!   unbiased-degree networks, with non-monophilic or monophilic adoption.
//! * [`meanfield`]: the deterministic mean-field recursion, critical
//!   thresholds and stationary fixed points.
//! * [`deviation`]: lockstep comparison of Monte Carlo against mean field.
//! * [`reactive`]: SIS over a graph process whose transitions depend on the
//!   population state, and the constrained ODE that approximates it.

// `!(a > b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod deviation;
pub mod graph;
pub mod meanfield;
pub mod reactive;
pub mod sis;

pub use graph::{Graph, GraphError, JointDegreeStats, Sampler};
pub use sis::{Rule, SisParams};
