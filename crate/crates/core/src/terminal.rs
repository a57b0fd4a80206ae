//! Terminal ingredients computed from the data-driven predictor.
//!
//! When the learned state map is stable the terminal penalty solves the
//! discrete Lyapunov equation with zero feedback; otherwise penalty and
//! feedback come from the infinite-horizon LQR problem on the learned maps.
//! Either way no model of the plant is involved.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::predictor::Predictor;
use crate::tol::Tolerances;

const LYAPUNOV_RESIDUAL: f64 = 1e-10;
const RICCATI_STEP_TOL: f64 = 1e-11;
const RICCATI_MAX_SWEEPS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalMethod {
    Lyapunov,
    Lqr,
    UserSupplied,
}

/// Terminal penalty and feedback gain.
#[derive(Debug, Clone, PartialEq)]
pub struct TerminalDesign {
    pub penalty: DMatrix<f64>,
    pub gain: DMatrix<f64>,
    pub method: TerminalMethod,
}

impl TerminalDesign {
    /// Wrap user-provided terminal ingredients, checking shapes and the
    /// semidefiniteness of the penalty.
    pub fn user_supplied(
        penalty: DMatrix<f64>,
        gain: DMatrix<f64>,
        tol: &Tolerances,
    ) -> Result<Self> {
        if !linalg::is_symmetric(&penalty, 1e-12)
            || linalg::min_symmetric_eigenvalue(&penalty) < -tol.psd_floor
        {
            return Err(Error::NotPsd("terminal penalty"));
        }
        if gain.ncols() != penalty.nrows() {
            return Err(Error::Dimension("gain must be m x n".into()));
        }
        Ok(Self {
            penalty,
            gain,
            method: TerminalMethod::UserSupplied,
        })
    }
}

/// Terminal penalty for a stable plant: solve `P = A' P A + Q` on the
/// learned state map via the vectorized linear system, with zero feedback.
///
/// Errs when the learned map is not certifiably stable; the LQR design is
/// the fallback for that case.
pub fn solve_dd_lyapunov(pred: &Predictor, q: &DMatrix<f64>, tol: &Tolerances) -> Result<TerminalDesign> {
    let n = pred.state_dim();
    if q.nrows() != n || q.ncols() != n {
        return Err(Error::Dimension("Q must be n x n".into()));
    }
    if !linalg::is_symmetric(q, 1e-12) || linalg::min_symmetric_eigenvalue(q) < -tol.psd_floor {
        return Err(Error::NotPsd("Q"));
    }
    let xi = pred.state_map();
    let rho = linalg::spectral_radius(xi);
    if rho >= 1.0 - 1e-9 {
        return Err(Error::Unstable { rho });
    }
    let xi_t = xi.transpose();
    let system = DMatrix::identity(n * n, n * n) - xi_t.kronecker(&xi_t);
    let rhs = linalg::vectorize(q);
    let solution = system
        .lu()
        .solve(&rhs)
        .ok_or(Error::Numerics("Lyapunov system is singular"))?;
    let p = linalg::unvectorize(&solution, n, n);
    let p = (&p + p.transpose()) * 0.5;
    let residual = linalg::max_abs_diff(&p, &(xi.transpose() * &p * xi + q))?;
    if residual > LYAPUNOV_RESIDUAL {
        return Err(Error::Numerics("Lyapunov residual out of tolerance"));
    }
    Ok(TerminalDesign {
        penalty: p,
        gain: DMatrix::zeros(pred.input_dim(), n),
        method: TerminalMethod::Lyapunov,
    })
}

/// Terminal penalty and gain from the infinite-horizon LQR problem on the
/// learned maps, via Riccati value iteration.
pub fn solve_dd_lqr(
    pred: &Predictor,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
    tol: &Tolerances,
) -> Result<TerminalDesign> {
    let n = pred.state_dim();
    let m = pred.input_dim();
    if q.nrows() != n || q.ncols() != n || r.nrows() != m || r.ncols() != m {
        return Err(Error::Dimension("Q must be n x n and R must be m x m".into()));
    }
    if !linalg::is_symmetric(q, 1e-12) || linalg::min_symmetric_eigenvalue(q) < -tol.psd_floor {
        return Err(Error::NotPsd("Q"));
    }
    if !linalg::is_symmetric(r, 1e-12) || linalg::min_symmetric_eigenvalue(r) < tol.pd_floor {
        return Err(Error::NotPd("R"));
    }
    let xi = pred.state_map();
    let gamma = pred.input_map();
    let mut p = q.clone();
    let mut converged = false;
    for _ in 0..RICCATI_MAX_SWEEPS {
        let gpg = r + gamma.transpose() * &p * gamma;
        let inv = gpg
            .try_inverse()
            .ok_or(Error::Numerics("Riccati inner matrix is singular"))?;
        let next = q + xi.transpose() * &p * xi
            - xi.transpose() * &p * gamma * &inv * gamma.transpose() * &p * xi;
        let next = (&next + next.transpose()) * 0.5;
        let step = linalg::max_abs_diff(&next, &p)?;
        p = next;
        if step <= RICCATI_STEP_TOL {
            converged = true;
            break;
        }
        if !linalg::all_finite(&p) {
            return Err(Error::RiccatiDiverged(RICCATI_MAX_SWEEPS));
        }
    }
    if !converged {
        return Err(Error::RiccatiDiverged(RICCATI_MAX_SWEEPS));
    }
    let gpg = r + gamma.transpose() * &p * gamma;
    let gain = -(gpg
        .try_inverse()
        .ok_or(Error::Numerics("Riccati inner matrix is singular"))?
        * gamma.transpose()
        * &p
        * xi);
    let closed = xi + gamma * &gain;
    let rho = linalg::spectral_radius(&closed);
    if rho >= 1.0 {
        return Err(Error::Unstable { rho });
    }
    Ok(TerminalDesign {
        penalty: p,
        gain,
        method: TerminalMethod::Lqr,
    })
}
