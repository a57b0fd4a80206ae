//! One-step predictor learned from data and its stacked multi-step form.
//!
//! With a persistently exciting record, the next state is reproduced
//! exactly by `x(t+1) = M [u(t); x(t)]` where `M` is the shifted state
//! matrix times a right inverse of the stacked input/state matrix. Splitting
//! `M` by columns gives the input map and the state map, from which the
//! free response (effect of the initial state) and the forced response
//! (effect of the planned inputs) over the prediction horizon are stacked.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::data::{check_rank_condition, DataMatrices};
use crate::error::{Error, Result};
use crate::tol::Tolerances;

/// One-step predictor `x(t+1) = M [u(t); x(t)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Predictor {
    one_step: DMatrix<f64>,
    state_map: DMatrix<f64>,
    input_map: DMatrix<f64>,
}

impl Predictor {
    /// Build the predictor from shifted data matrices.
    ///
    /// The right inverse of the stacked matrix is computed through an SVD
    /// pseudoinverse; the rank condition is re-checked first so that a bad
    /// record fails with a report instead of a silently wrong predictor.
    pub fn from_data(dm: &DataMatrices, tol: &Tolerances) -> Result<Self> {
        let report = check_rank_condition(dm, tol)?;
        if !report.is_pe {
            return Err(Error::RankDeficient {
                rank: report.rank,
                required: report.required_rank,
            });
        }
        let stacked = dm.stacked();
        let svd = stacked.clone().svd(true, true);
        let sigma_max = svd.singular_values.max();
        let pinv = svd
            .pseudo_inverse(tol.data_rank_rel * sigma_max)
            .map_err(|_| Error::Numerics("SVD pseudoinverse failed"))?;
        let one_step = dm.states_next() * pinv;
        Self::from_one_step(one_step, dm.input_dim(), dm.state_dim())
    }

    /// Predictor of a known state-space model; used by the oracle pipeline
    /// and by tests that compare the data-driven route against the truth.
    pub fn from_state_space(state_map: DMatrix<f64>, input_map: DMatrix<f64>) -> Result<Self> {
        if !state_map.is_square() || state_map.nrows() != input_map.nrows() {
            return Err(Error::Dimension(format!(
                "state map {}x{} does not match input map {}x{}",
                state_map.nrows(),
                state_map.ncols(),
                input_map.nrows(),
                input_map.ncols()
            )));
        }
        let n = state_map.nrows();
        let m = input_map.ncols();
        let mut one_step = DMatrix::zeros(n, m + n);
        one_step.columns_mut(0, m).copy_from(&input_map);
        one_step.columns_mut(m, n).copy_from(&state_map);
        Ok(Self {
            one_step,
            state_map,
            input_map,
        })
    }

    fn from_one_step(one_step: DMatrix<f64>, m: usize, n: usize) -> Result<Self> {
        if one_step.nrows() != n || one_step.ncols() != m + n {
            return Err(Error::Dimension("one-step map has the wrong shape".into()));
        }
        let input_map = one_step.columns(0, m).into_owned();
        let state_map = one_step.columns(m, n).into_owned();
        Ok(Self {
            one_step,
            state_map,
            input_map,
        })
    }

    pub fn state_dim(&self) -> usize {
        self.state_map.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.input_map.ncols()
    }

    /// The full map acting on `[u; x]`.
    pub fn one_step(&self) -> &DMatrix<f64> {
        &self.one_step
    }

    /// Map applied to the current state (the transition-matrix surrogate).
    pub fn state_map(&self) -> &DMatrix<f64> {
        &self.state_map
    }

    /// Map applied to the current input.
    pub fn input_map(&self) -> &DMatrix<f64> {
        &self.input_map
    }

    /// Predict the next state for one input/state pair.
    pub fn predict(&self, input: &DVector<f64>, state: &DVector<f64>) -> Result<DVector<f64>> {
        if input.len() != self.input_dim() || state.len() != self.state_dim() {
            return Err(Error::Dimension(format!(
                "predict expects u of length {} and x of length {}",
                self.input_dim(),
                self.state_dim()
            )));
        }
        Ok(&self.input_map * input + &self.state_map * state)
    }

    /// Augment the predictor for increment-based tracking: the state grows
    /// to `[x; u_prev]` and the input becomes the increment `du`, so that
    /// holding `du = 0` beyond the control horizon freezes the input.
    pub fn tracking_augmented(&self) -> Predictor {
        let n = self.state_dim();
        let m = self.input_dim();
        let mut a = DMatrix::zeros(n + m, n + m);
        a.view_mut((0, 0), (n, n)).copy_from(&self.state_map);
        a.view_mut((0, n), (n, m)).copy_from(&self.input_map);
        a.view_mut((n, n), (m, m)).fill_with_identity();
        let mut b = DMatrix::zeros(n + m, m);
        b.view_mut((0, 0), (n, m)).copy_from(&self.input_map);
        b.view_mut((n, 0), (m, m)).fill_with_identity();
        Predictor::from_state_space(a, b).expect("augmented dimensions are consistent")
    }
}

/// Prediction, control and constraint horizons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Horizons {
    /// Steps of predicted state (often written `N_x`).
    pub prediction: usize,
    /// Steps of free input moves (`N_u`).
    pub control: usize,
    /// Steps over which the stage constraints are imposed (`N_c`).
    pub constraint: usize,
}

impl Horizons {
    pub fn new(prediction: usize, control: usize, constraint: usize) -> Result<Self> {
        let h = Self {
            prediction,
            control,
            constraint,
        };
        h.validate()?;
        Ok(h)
    }

    /// All three horizons equal, as in the benchmark problems.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(n, n, n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.control == 0 || self.control > self.prediction {
            return Err(Error::Horizon(format!(
                "need 1 <= control ({}) <= prediction ({})",
                self.control, self.prediction
            )));
        }
        if self.constraint == 0 || self.constraint > self.prediction {
            return Err(Error::Horizon(format!(
                "need 1 <= constraint ({}) <= prediction ({})",
                self.constraint, self.prediction
            )));
        }
        Ok(())
    }
}

/// How to stack the response blocks past the control horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailForm {
    /// Tail blocks continue the closed loop from the end of the open-loop
    /// segment, so the stacked form reproduces a step-by-step rollout with
    /// `u = K x` after the last free move. This is the default.
    Consistent,
    /// Tail blocks use the raw closed-loop powers and a zero-padded forced
    /// response. Kept for comparison; it ignores the effect of the planned
    /// inputs on the tail states whenever the horizons differ.
    ZeroPadded,
}

/// Stacked responses of the predicted states `x(1..N_x)`:
/// `X = free_response * x + forced_response * U`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionMatrices {
    free_response: DMatrix<f64>,
    forced_response: DMatrix<f64>,
    horizons: Horizons,
    feedback: DMatrix<f64>,
    state_dim: usize,
    input_dim: usize,
}

impl PredictionMatrices {
    pub fn free_response(&self) -> &DMatrix<f64> {
        &self.free_response
    }

    pub fn forced_response(&self) -> &DMatrix<f64> {
        &self.forced_response
    }

    pub fn horizons(&self) -> Horizons {
        self.horizons
    }

    pub fn feedback(&self) -> &DMatrix<f64> {
        &self.feedback
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    /// Free-response block of `x(k)`, `1 <= k <= prediction`.
    pub fn free_block(&self, k: usize) -> DMatrix<f64> {
        let n = self.state_dim;
        self.free_response.rows((k - 1) * n, n).into_owned()
    }

    /// Forced-response block of `x(k)`, `1 <= k <= prediction`.
    pub fn forced_block(&self, k: usize) -> DMatrix<f64> {
        let n = self.state_dim;
        self.forced_response.rows((k - 1) * n, n).into_owned()
    }
}

/// Stack the free and forced responses over the prediction horizon.
///
/// Inputs are free for the first `control` steps and generated by the
/// feedback `u = K x` afterwards. `K` may be zero (and must have shape
/// `m x n` regardless).
pub fn build_prediction_matrices(
    pred: &Predictor,
    horizons: Horizons,
    feedback: &DMatrix<f64>,
    tail: TailForm,
) -> Result<PredictionMatrices> {
    horizons.validate()?;
    let n = pred.state_dim();
    let m = pred.input_dim();
    if feedback.nrows() != m || feedback.ncols() != n {
        return Err(Error::Dimension(format!(
            "feedback gain must be {m}x{n}, got {}x{}",
            feedback.nrows(),
            feedback.ncols()
        )));
    }
    let (nx, nu) = (horizons.prediction, horizons.control);
    let xi = pred.state_map();
    let gamma = pred.input_map();
    let xi_k = xi + gamma * feedback;

    // Powers of the open-loop map up to N_u.
    let mut xi_pows: Vec<DMatrix<f64>> = Vec::with_capacity(nu + 1);
    xi_pows.push(DMatrix::identity(n, n));
    for k in 1..=nu {
        let next = xi * &xi_pows[k - 1];
        xi_pows.push(next);
    }

    let mut free = DMatrix::zeros(n * nx, n);
    let mut forced = DMatrix::zeros(n * nx, m * nu);

    // Open-loop segment: x(k) = xi^k x + sum_j xi^{k-1-j} gamma u(j).
    for k in 1..=nu {
        free.view_mut(((k - 1) * n, 0), (n, n)).copy_from(&xi_pows[k]);
        for j in 0..k {
            let block = &xi_pows[k - 1 - j] * gamma;
            forced
                .view_mut(((k - 1) * n, j * m), (n, m))
                .copy_from(&block);
        }
    }

    // Closed-loop tail past the control horizon.
    let mut cl_pow = DMatrix::identity(n, n);
    for k in (nu + 1)..=nx {
        cl_pow = &xi_k * cl_pow; // xi_k^(k - nu)
        match tail {
            TailForm::Consistent => {
                let free_block = &cl_pow * &xi_pows[nu];
                free.view_mut(((k - 1) * n, 0), (n, n)).copy_from(&free_block);
                let last_open = forced.rows((nu - 1) * n, n).into_owned();
                let forced_block = &cl_pow * last_open;
                forced
                    .view_mut(((k - 1) * n, 0), (n, m * nu))
                    .copy_from(&forced_block);
            }
            TailForm::ZeroPadded => {
                // Raw power of the closed-loop map, forced rows left zero.
                let mut raw = DMatrix::identity(n, n);
                for _ in 0..k {
                    raw = &xi_k * raw;
                }
                free.view_mut(((k - 1) * n, 0), (n, n)).copy_from(&raw);
            }
        }
    }

    Ok(PredictionMatrices {
        free_response: free,
        forced_response: forced,
        horizons,
        feedback: feedback.clone(),
        state_dim: n,
        input_dim: m,
    })
}
