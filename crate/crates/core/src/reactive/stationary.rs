use nalgebra::{DMatrix, DVector};

use super::kernel::{transition_matrix, KernelState, TransitionKernel};
use super::ReactiveError;

/// `‖P' π − π‖_∞`.
pub fn stationary_residual(p: &DMatrix<f64>, pi: &[f64]) -> f64 {
    let v = DVector::from_column_slice(pi);
    (p.transpose() * &v - &v).amax()
}

/// Stationary law `π_x` of the graph chain frozen at `state`.
///
/// Solves `(P' − I) π = 0` together with `Σ π = 1` by least squares. A null
/// space of dimension above one (singular values below `1e-8`) means the
/// chain has several stationary laws and is rejected. If the direct solution
/// misses the `1e-12` residual it is polished by iterating the lazy chain
/// `(I + P) / 2`, which has the same stationary law and is aperiodic.
pub fn stationary_distribution(
    kernel: &dyn TransitionKernel,
    state: KernelState<'_>,
) -> Result<Vec<f64>, ReactiveError> {
    let p = transition_matrix(kernel, state);
    let n = p.nrows();
    let balance = p.transpose() - DMatrix::identity(n, n);

    let dimension = balance.singular_values().iter().filter(|&&s| s < 1e-8).count();
    if dimension > 1 {
        return Err(ReactiveError::Reducible { dimension });
    }

    let mut system = DMatrix::zeros(n + 1, n);
    system.view_mut((0, 0), (n, n)).copy_from(&balance);
    system.row_mut(n).fill(1.0);
    let mut rhs = DVector::zeros(n + 1);
    rhs[n] = 1.0;
    let solution = system
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| ReactiveError::InvalidKernel(e.to_string()))?;

    let mut pi: Vec<f64> = solution.iter().map(|&v| v.max(0.0)).collect();
    normalise(&mut pi);
    if stationary_residual(&p, &pi) > 1e-12 {
        let lazy = (DMatrix::identity(n, n) + &p) * 0.5;
        let lazy_t = lazy.transpose();
        let mut v = DVector::from_vec(pi);
        for _ in 0..100_000 {
            v = &lazy_t * &v;
            let s = v.sum();
            v /= s;
            if stationary_residual(&p, v.as_slice()) <= 1e-12 {
                break;
            }
        }
        pi = v.iter().map(|&x| x.max(0.0)).collect();
        normalise(&mut pi);
    }
    Ok(pi)
}

fn normalise(v: &mut [f64]) {
    let s: f64 = v.iter().sum();
    for x in v.iter_mut() {
        *x /= s;
    }
}
