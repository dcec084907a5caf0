use nalgebra::DMatrix;

use super::ReactiveError;

/// What a kernel may condition on.
#[derive(Debug, Clone, Copy)]
pub struct KernelState<'a> {
    /// Infected fraction per degree class.
    pub x: &'a [f64],
    /// Overall infected fraction `Σ_k P(k) x(k)`.
    pub rho: f64,
}

/// Population-state-dependent transition law of the graph chain.
///
/// Rows must be probability vectors and should vary smoothly with the state;
/// the averaged ODE is only well posed when they are Lipschitz in `x`.
pub trait TransitionKernel: Send + Sync {
    fn member_count(&self) -> usize;

    /// Writes `P_x(· | from)` into `out`.
    fn row(&self, state: KernelState<'_>, from: usize, out: &mut [f64]);
}

/// Row-stochastic `P_x` with `P[i][j] = P_x(j | i)`.
pub fn transition_matrix(kernel: &dyn TransitionKernel, state: KernelState<'_>) -> DMatrix<f64> {
    let n = kernel.member_count();
    let mut m = DMatrix::zeros(n, n);
    let mut row = vec![0.0; n];
    for i in 0..n {
        kernel.row(state, i, &mut row);
        for (j, &p) in row.iter().enumerate() {
            m[(i, j)] = p;
        }
    }
    m
}

/// Checks stochasticity and irreducibility at each sample state.
pub fn validate_kernel<'a>(
    kernel: &dyn TransitionKernel,
    samples: impl IntoIterator<Item = KernelState<'a>>,
) -> Result<(), ReactiveError> {
    let n = kernel.member_count();
    for state in samples {
        let p = transition_matrix(kernel, state);
        for i in 0..n {
            let row = p.row(i);
            if row.iter().any(|&v| !(v >= 0.0)) {
                return Err(ReactiveError::InvalidKernel(format!(
                    "row {i} has a negative or NaN entry"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(ReactiveError::InvalidKernel(format!("row {i} sums to {sum}")));
            }
        }
        // (I + P)^(N-1) is entrywise positive iff the chain is irreducible.
        let step = DMatrix::identity(n, n) + &p;
        let mut reach = DMatrix::identity(n, n);
        for _ in 1..n {
            reach = &reach * &step;
        }
        if reach.iter().any(|&v| v <= 0.0) {
            return Err(ReactiveError::InvalidKernel(format!(
                "chain is reducible at rho = {}",
                state.rho
            )));
        }
    }
    Ok(())
}

/// Two-member reference kernel.
///
/// From any member the chain moves to member `towards` with probability
/// `s = σ(β (ρ − ρ₀))` and to the other member with probability `1 − s`,
/// where `σ` is the logistic function. With `stickiness κ > 0` each row is
/// mixed with staying put: `(1 − κ)·target + κ·e_from`, which leaves the
/// stationary law `(1 − s, s)` unchanged but correlates successive members.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticKernel {
    pub beta: f64,
    pub rho0: f64,
    pub towards: usize,
    pub stickiness: f64,
}

impl Default for LogisticKernel {
    fn default() -> Self {
        LogisticKernel {
            beta: 10.0,
            rho0: 0.2,
            towards: 1,
            stickiness: 0.0,
        }
    }
}

impl LogisticKernel {
    pub fn new(beta: f64, rho0: f64, towards: usize, stickiness: f64) -> Result<Self, ReactiveError> {
        if towards > 1 {
            return Err(ReactiveError::InvalidKernel(format!(
                "towards = {towards}; the kernel has two members"
            )));
        }
        if !(0.0..1.0).contains(&stickiness) {
            return Err(ReactiveError::InvalidKernel(format!(
                "stickiness {stickiness} outside [0, 1)"
            )));
        }
        if !beta.is_finite() || !rho0.is_finite() {
            return Err(ReactiveError::InvalidKernel("beta and rho0 must be finite".into()));
        }
        Ok(LogisticKernel {
            beta,
            rho0,
            towards,
            stickiness,
        })
    }

    /// Probability of moving to member `towards`.
    pub fn switch_probability(&self, rho: f64) -> f64 {
        1.0 / (1.0 + (-self.beta * (rho - self.rho0)).exp())
    }
}

impl TransitionKernel for LogisticKernel {
    fn member_count(&self) -> usize {
        2
    }

    fn row(&self, state: KernelState<'_>, from: usize, out: &mut [f64]) {
        let s = self.switch_probability(state.rho);
        out[self.towards] = s;
        out[1 - self.towards] = 1.0 - s;
        for v in out.iter_mut() {
            *v *= 1.0 - self.stickiness;
        }
        out[from] += self.stickiness;
    }
}

/// State-independent kernel given by a fixed row-stochastic matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantKernel {
    rows: Vec<Vec<f64>>,
}

impl ConstantKernel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, ReactiveError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(ReactiveError::InvalidKernel(
                "matrix must be square and nonempty".into(),
            ));
        }
        for (i, r) in rows.iter().enumerate() {
            let sum: f64 = r.iter().sum();
            if r.iter().any(|&v| !(v >= 0.0)) || (sum - 1.0).abs() > 1e-12 {
                return Err(ReactiveError::InvalidKernel(format!(
                    "row {i} is not a probability vector"
                )));
            }
        }
        Ok(ConstantKernel { rows })
    }
}

impl TransitionKernel for ConstantKernel {
    fn member_count(&self) -> usize {
        self.rows.len()
    }

    fn row(&self, _: KernelState<'_>, from: usize, out: &mut [f64]) {
        out.copy_from_slice(&self.rows[from]);
    }
}
