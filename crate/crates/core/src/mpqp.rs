//! Condensed multi-parametric quadratic program.
//!
//! Cost and constraints of the predictive control problem are condensed
//! onto the planned input sequence, giving `min_U U'HU + 2 theta'FU` subject
//! to `G U <= W + E theta`. Completing the squares in `z = U + H^{-1}F'theta`
//! yields the canonical form solved by the explicit stage:
//!
//! ```text
//! min_z  z' H z      s.t.  G z <= W + S theta,      S = E + G H^{-1} F'.
//! ```
//!
//! The parameter `theta` is the measured state in regulation mode and the
//! stacked `[x; u_prev; r]` vector in tracking mode.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::predictor::{Horizons, PredictionMatrices};
use crate::tol::Tolerances;

/// Stage, input and terminal weights of the quadratic cost.
#[derive(Debug, Clone, PartialEq)]
pub struct CostSpec {
    /// State weight `Q` (symmetric PSD, n x n).
    pub state: DMatrix<f64>,
    /// Input weight `R` (symmetric PD, m x m).
    pub input: DMatrix<f64>,
    /// Terminal weight `P` (symmetric PSD, n x n).
    pub terminal: DMatrix<f64>,
}

impl CostSpec {
    pub fn new(state: DMatrix<f64>, input: DMatrix<f64>, terminal: DMatrix<f64>) -> Self {
        Self {
            state,
            input,
            terminal,
        }
    }

    pub fn validate(&self, n: usize, m: usize, tol: &Tolerances) -> Result<()> {
        for (mat, name, dim) in [
            (&self.state, "Q", n),
            (&self.input, "R", m),
            (&self.terminal, "P", n),
        ] {
            if mat.nrows() != dim || mat.ncols() != dim {
                return Err(Error::Dimension(format!(
                    "{name} must be {dim}x{dim}, got {}x{}",
                    mat.nrows(),
                    mat.ncols()
                )));
            }
        }
        for (mat, name) in [(&self.state, "Q"), (&self.terminal, "P")] {
            if !linalg::is_symmetric(mat, 1e-12)
                || linalg::min_symmetric_eigenvalue(mat) < -tol.psd_floor
            {
                return Err(Error::NotPsd(if name == "Q" { "Q" } else { "P" }));
            }
        }
        if !linalg::is_symmetric(&self.input, 1e-12)
            || linalg::min_symmetric_eigenvalue(&self.input) < tol.pd_floor
        {
            return Err(Error::NotPd("R"));
        }
        Ok(())
    }
}

/// Polytopic stage constraints `Cx x(k) + Cu u(k) <= d`, imposed for
/// `k = 0 .. constraint_horizon - 1`. Zero rows mean "unconstrained".
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSpec {
    pub state: DMatrix<f64>,
    pub input: DMatrix<f64>,
    pub bound: DVector<f64>,
}

impl ConstraintSpec {
    pub fn new(state: DMatrix<f64>, input: DMatrix<f64>, bound: DVector<f64>) -> Self {
        Self {
            state,
            input,
            bound,
        }
    }

    /// No stage constraints.
    pub fn unconstrained(n: usize, m: usize) -> Self {
        Self {
            state: DMatrix::zeros(0, n),
            input: DMatrix::zeros(0, m),
            bound: DVector::zeros(0),
        }
    }

    /// Symmetric input box `|u_i| <= limit` on every channel.
    pub fn input_box(n: usize, m: usize, limit: f64) -> Self {
        let mut input = DMatrix::zeros(2 * m, m);
        let mut bound = DVector::zeros(2 * m);
        for i in 0..m {
            input[(2 * i, i)] = 1.0;
            input[(2 * i + 1, i)] = -1.0;
            bound[2 * i] = limit;
            bound[2 * i + 1] = limit;
        }
        Self {
            state: DMatrix::zeros(2 * m, n),
            input,
            bound,
        }
    }

    pub fn rows(&self) -> usize {
        self.bound.len()
    }

    pub fn validate(&self, n: usize, m: usize) -> Result<()> {
        if self.state.ncols() != n || self.input.ncols() != m {
            return Err(Error::Dimension(format!(
                "constraints must act on x ({n}) and u ({m}); got Cx with {} and Cu with {} columns",
                self.state.ncols(),
                self.input.ncols()
            )));
        }
        if self.state.nrows() != self.rows() || self.input.nrows() != self.rows() {
            return Err(Error::Dimension(
                "Cx, Cu and d must have the same number of rows".into(),
            ));
        }
        Ok(())
    }
}

/// What the parameter vector of the program means.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlMode {
    /// Parameter is the measured state; decision variables are the inputs.
    Regulation,
    /// Parameter is `[x; u_prev; r]`; decision variables are input
    /// increments that freeze after the control horizon.
    Tracking,
}

/// Where the program's matrices came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    DataDriven,
    ModelBased,
}

/// Condensed program in the completed-squares variable.
#[derive(Debug, Clone, PartialEq)]
pub struct MpQp {
    /// Quadratic term `H` (symmetric PD, nu x nu with nu = m * control).
    pub h: DMatrix<f64>,
    /// Cross term `F` (param_dim x nu): the U-space cost is
    /// `U'HU + 2 theta' F U`.
    pub f: DMatrix<f64>,
    /// Constraint rows `G` (c x nu).
    pub g: DMatrix<f64>,
    /// Constant right-hand side `W` (c).
    pub w: DVector<f64>,
    /// Raw parameter coefficient `E` of the U-space constraints (c x p).
    pub e: DMatrix<f64>,
    /// Folded coefficient `S = E + G H^{-1} F'` of the z-space constraints.
    pub s: DMatrix<f64>,
    pub param_dim: usize,
    /// Width of one input block inside the decision vector.
    pub input_dim: usize,
    pub horizons: Horizons,
    pub mode: ControlMode,
    pub provenance: Provenance,
}

impl MpQp {
    /// Length of the decision vector.
    pub fn decision_dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn constraint_rows(&self) -> usize {
        self.g.nrows()
    }

    /// `H^{-1} F'` (p columns), the slope of the completed-squares shift.
    pub fn shift_gain(&self) -> Result<DMatrix<f64>> {
        let chol = Cholesky::new(self.h.clone()).ok_or(Error::HessianNotPd)?;
        Ok(chol.solve(&self.f.transpose()))
    }

    /// Map a z-space optimizer back to the decision vector.
    pub fn decision_from_z(&self, z: &DVector<f64>, theta: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(z - self.shift_gain()? * theta)
    }
}

/// Complete the squares on a raw U-space program, producing the canonical
/// z-space form. Fails when the quadratic term is not positive definite.
pub fn complete_squares(
    h: DMatrix<f64>,
    f: DMatrix<f64>,
    g: DMatrix<f64>,
    w: DVector<f64>,
    e: DMatrix<f64>,
    input_dim: usize,
    horizons: Horizons,
    mode: ControlMode,
    provenance: Provenance,
) -> Result<MpQp> {
    let h = (&h + h.transpose()) * 0.5;
    let chol = Cholesky::new(h.clone()).ok_or(Error::HessianNotPd)?;
    let param_dim = f.nrows();
    if g.ncols() != h.nrows() && g.nrows() > 0 {
        return Err(Error::Dimension("G must have nu columns".into()));
    }
    if e.nrows() != g.nrows() || w.len() != g.nrows() {
        return Err(Error::Dimension("G, W and E must agree in rows".into()));
    }
    let shift = chol.solve(&f.transpose()); // H^{-1} F'
    let s = if g.nrows() > 0 {
        &e + &g * &shift
    } else {
        DMatrix::zeros(0, param_dim)
    };
    Ok(MpQp {
        h,
        f,
        g,
        w,
        e,
        s,
        param_dim,
        input_dim,
        horizons,
        mode,
        provenance,
    })
}

/// Block-diagonal state weight over the stacked prediction: `Q` while the
/// input is free, `Q + K'RK` while the terminal feedback runs, and the
/// terminal weight on the last block.
fn stage_weights(
    cost: &CostSpec,
    feedback: &DMatrix<f64>,
    horizons: Horizons,
) -> Vec<DMatrix<f64>> {
    let (nx, nu) = (horizons.prediction, horizons.control);
    let q_fb = &cost.state + feedback.transpose() * &cost.input * feedback;
    (1..=nx)
        .map(|k| {
            if k == nx {
                cost.terminal.clone()
            } else if k < nu {
                cost.state.clone()
            } else {
                q_fb.clone()
            }
        })
        .collect()
}

/// Condense the regulation problem onto the input sequence.
///
/// The parameter is the measured state (`param_dim = n`). Constraint rows
/// follow the stage order: step 0 first (acting on the given state), then
/// each predicted step, with the terminal feedback substituted for the
/// input once the free moves run out.
pub fn assemble_regulation(
    pm: &PredictionMatrices,
    cost: &CostSpec,
    cons: &ConstraintSpec,
    provenance: Provenance,
) -> Result<MpQp> {
    let n = pm.state_dim();
    let m = pm.input_dim();
    let horizons = pm.horizons();
    cost.validate(n, m, &Tolerances::default())?;
    cons.validate(n, m)?;
    let (nx, nu, nc) = (horizons.prediction, horizons.control, horizons.constraint);
    let nu_dim = m * nu;
    let q = cons.rows();

    let weights = stage_weights(cost, pm.feedback(), horizons);

    // H = R-blockdiag + forced' Qbar forced, F = free' Qbar forced.
    let mut h = DMatrix::zeros(nu_dim, nu_dim);
    for j in 0..nu {
        h.view_mut((j * m, j * m), (m, m)).copy_from(&cost.input);
    }
    let mut f = DMatrix::zeros(n, nu_dim);
    for k in 1..=nx {
        let forced_k = pm.forced_response().rows((k - 1) * n, n);
        let free_k = pm.free_response().rows((k - 1) * n, n);
        let wq = &weights[k - 1];
        h += forced_k.transpose() * wq * forced_k;
        f += free_k.transpose() * wq * forced_k;
    }

    // Stage constraints rearranged to G U <= W + E x.
    let mut g = DMatrix::zeros(q * nc, nu_dim);
    let mut w = DVector::zeros(q * nc);
    let mut e = DMatrix::zeros(q * nc, n);
    let closed = &cons.state + &cons.input * pm.feedback();
    for k in 0..nc {
        let rows = k * q..(k + 1) * q;
        w.rows_mut(k * q, q).copy_from(&cons.bound);
        if k == 0 {
            g.view_mut((rows.start, 0), (q, m)).copy_from(&cons.input);
            e.rows_mut(rows.start, q).copy_from(&(-&cons.state));
        } else if k < nu {
            let forced_k = pm.forced_response().rows((k - 1) * n, n);
            let free_k = pm.free_response().rows((k - 1) * n, n);
            let mut gk = &cons.state * forced_k;
            let mut u_cols = gk.view_mut((0, k * m), (q, m));
            u_cols += &cons.input;
            g.rows_mut(rows.start, q).copy_from(&gk);
            e.rows_mut(rows.start, q).copy_from(&(-(&cons.state * free_k)));
        } else {
            let forced_k = pm.forced_response().rows((k - 1) * n, n);
            let free_k = pm.free_response().rows((k - 1) * n, n);
            g.rows_mut(rows.start, q).copy_from(&(&closed * forced_k));
            e.rows_mut(rows.start, q).copy_from(&(-(&closed * free_k)));
        }
    }

    complete_squares(
        h,
        f,
        g,
        w,
        e,
        m,
        horizons,
        ControlMode::Regulation,
        provenance,
    )
}

/// Condense the offset-free tracking problem onto the input increments.
///
/// Expects prediction matrices built from the tracking-augmented predictor
/// with zero feedback: the augmented state is `[x; u_prev]` and the planned
/// moves are increments `du(0..control-1)`, frozen to zero afterwards. The
/// stage cost penalizes `||x(k) - r||_Q`, `||du(k)||_R` and the terminal
/// deviation `||x(N) - r||_P`; constraints act on the reconstructed pairs
/// `(x(k), u(k))`. The parameter is `[x; u_prev; r]`.
pub fn assemble_tracking(
    pm: &PredictionMatrices,
    cost: &CostSpec,
    cons: &ConstraintSpec,
    provenance: Provenance,
) -> Result<MpQp> {
    let n_aug = pm.state_dim();
    let m = pm.input_dim();
    let n = n_aug
        .checked_sub(m)
        .filter(|&n| n >= 1)
        .ok_or_else(|| Error::Dimension("augmented predictor is too small".into()))?;
    if pm.feedback().amax() != 0.0 {
        return Err(Error::Dimension(
            "tracking expects prediction matrices built with zero feedback".into(),
        ));
    }
    let horizons = pm.horizons();
    cost.validate(n, m, &Tolerances::default())?;
    cons.validate(n, m)?;
    let (nx, nu, nc) = (horizons.prediction, horizons.control, horizons.constraint);
    let nu_dim = m * nu;
    let q = cons.rows();
    let p = n_aug + n; // [x; u_prev] plus the reference

    // Selectors into the augmented state.
    let mut sel_x = DMatrix::zeros(n, n_aug);
    sel_x.view_mut((0, 0), (n, n)).fill_with_identity();
    let mut sel_u = DMatrix::zeros(m, n_aug);
    sel_u.view_mut((0, n), (m, m)).fill_with_identity();

    let mut h = DMatrix::zeros(nu_dim, nu_dim);
    for j in 0..nu {
        h.view_mut((j * m, j * m), (m, m)).copy_from(&cost.input);
    }
    let mut f = DMatrix::zeros(p, nu_dim);
    for k in 1..=nx {
        let wq = if k == nx { &cost.terminal } else { &cost.state };
        let forced_k = pm.forced_response().rows((k - 1) * n_aug, n_aug);
        let free_k = pm.free_response().rows((k - 1) * n_aug, n_aug);
        let cf = &sel_x * forced_k; // n x nu_dim, the predicted state rows
        h += cf.transpose() * wq * &cf;
        let f_aug = (&sel_x * free_k).transpose() * wq * &cf;
        let mut f_top = f.view_mut((0, 0), (n_aug, nu_dim));
        f_top += &f_aug;
        let f_ref = -(wq * &cf);
        let mut f_bottom = f.view_mut((n_aug, 0), (n, nu_dim));
        f_bottom += &f_ref;
    }

    // Constraints on (x(k), u(k)) with u(k) read off the next augmented
    // state; the reference never enters the constraint rows.
    let mut g = DMatrix::zeros(q * nc, nu_dim);
    let mut w = DVector::zeros(q * nc);
    let mut e = DMatrix::zeros(q * nc, p);
    let eye_aug = DMatrix::identity(n_aug, n_aug);
    for k in 0..nc {
        w.rows_mut(k * q, q).copy_from(&cons.bound);
        let (free_k, forced_k) = if k == 0 {
            (eye_aug.clone(), DMatrix::zeros(n_aug, nu_dim))
        } else {
            (
                pm.free_response().rows((k - 1) * n_aug, n_aug).into_owned(),
                pm.forced_response()
                    .rows((k - 1) * n_aug, n_aug)
                    .into_owned(),
            )
        };
        let free_next = pm.free_response().rows(k * n_aug, n_aug).into_owned();
        let forced_next = pm.forced_response().rows(k * n_aug, n_aug).into_owned();
        let gk = &cons.state * (&sel_x * &forced_k) + &cons.input * (&sel_u * &forced_next);
        let ek = -(&cons.state * (&sel_x * &free_k) + &cons.input * (&sel_u * &free_next));
        g.rows_mut(k * q, q).copy_from(&gk);
        e.view_mut((k * q, 0), (q, n_aug)).copy_from(&ek);
    }

    complete_squares(
        h,
        f,
        g,
        w,
        e,
        m,
        horizons,
        ControlMode::Tracking,
        provenance,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predictor::{build_prediction_matrices, Predictor, TailForm};
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn bench_plant() -> (DMatrix<f64>, DMatrix<f64>) {
        (
            DMatrix::from_row_slice(2, 2, &[0.7326, -0.0861, 0.1722, 0.9909]),
            DMatrix::from_row_slice(2, 1, &[0.0609, 0.0064]),
        )
    }

    fn scalar_qp() -> MpQp {
        // a = 0.5, b = 1, single step, Q = P = R = 1.
        let pred = Predictor::from_state_space(
            DMatrix::from_element(1, 1, 0.5),
            DMatrix::from_element(1, 1, 1.0),
        )
        .unwrap();
        let pm = build_prediction_matrices(
            &pred,
            Horizons::uniform(1).unwrap(),
            &DMatrix::zeros(1, 1),
            TailForm::Consistent,
        )
        .unwrap();
        let cost = CostSpec::new(
            DMatrix::identity(1, 1),
            DMatrix::identity(1, 1),
            DMatrix::identity(1, 1),
        );
        assemble_regulation(
            &pm,
            &cost,
            &ConstraintSpec::unconstrained(1, 1),
            Provenance::ModelBased,
        )
        .unwrap()
    }

    #[test]
    fn scalar_assembly_matches_hand_computation() {
        let qp = scalar_qp();
        assert!((qp.h[(0, 0)] - 2.0).abs() <= 1e-12); // R + b P b
        assert!((qp.f[(0, 0)] - 0.5).abs() <= 1e-12); // a P b
        assert_eq!(qp.constraint_rows(), 0);
        // Completed squares: z = U + 0.25 x.
        let shift = qp.shift_gain().unwrap();
        assert!((shift[(0, 0)] - 0.25).abs() <= 1e-12);
    }

    #[test]
    fn unconstrained_assembly_has_empty_constraint_blocks() {
        let (a, b) = bench_plant();
        let pred = Predictor::from_state_space(a, b).unwrap();
        let pm = build_prediction_matrices(
            &pred,
            Horizons::uniform(2).unwrap(),
            &DMatrix::zeros(1, 2),
            TailForm::Consistent,
        )
        .unwrap();
        let qp = assemble_regulation(
            &pm,
            &CostSpec::new(
                DMatrix::identity(2, 2),
                DMatrix::from_element(1, 1, 0.01),
                DMatrix::identity(2, 2),
            ),
            &ConstraintSpec::unconstrained(2, 1),
            Provenance::ModelBased,
        )
        .unwrap();
        assert_eq!(qp.g.nrows(), 0);
        assert_eq!(qp.s.nrows(), 0);
        assert!(Cholesky::new(qp.h.clone()).is_some());
    }

    #[test]
    fn hessian_is_symmetric_after_assembly() {
        let (a, b) = bench_plant();
        let pred = Predictor::from_state_space(a, b).unwrap();
        let pm = build_prediction_matrices(
            &pred,
            Horizons::new(4, 2, 4).unwrap(),
            &DMatrix::from_row_slice(1, 2, &[0.1, -0.2]),
            TailForm::Consistent,
        )
        .unwrap();
        let qp = assemble_regulation(
            &pm,
            &CostSpec::new(
                DMatrix::identity(2, 2),
                DMatrix::from_element(1, 1, 0.01),
                DMatrix::identity(2, 2),
            ),
            &ConstraintSpec::input_box(2, 1, 2.0),
            Provenance::ModelBased,
        )
        .unwrap();
        assert!(linalg::max_abs_diff(&qp.h, &qp.h.transpose()).unwrap() <= 1e-12);
        assert_eq!(qp.constraint_rows(), 2 * 4);
    }

    /// Rollout-based oracle for the constraint stacking: G U <= W + E x must
    /// hold exactly when the simulated trajectory satisfies the stage
    /// constraints.
    #[test]
    fn constraint_rows_match_the_rollout() {
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        let (a, b) = bench_plant();
        let pred = Predictor::from_state_space(a.clone(), b.clone()).unwrap();
        let k_fb = DMatrix::from_row_slice(1, 2, &[0.15, -0.05]);
        let horizons = Horizons::new(4, 2, 3).unwrap();
        let pm = build_prediction_matrices(&pred, horizons, &k_fb, TailForm::Consistent).unwrap();
        let cons = ConstraintSpec::new(
            DMatrix::from_row_slice(3, 2, &[1.0, 0.0, -0.3, 0.4, 0.0, 0.0]),
            DMatrix::from_row_slice(3, 1, &[0.2, 0.0, 1.0]),
            DVector::from_column_slice(&[1.5, 1.0, 2.0]),
        );
        let qp = assemble_regulation(
            &pm,
            &CostSpec::new(
                DMatrix::identity(2, 2),
                DMatrix::from_element(1, 1, 0.1),
                DMatrix::identity(2, 2),
            ),
            &cons,
            Provenance::ModelBased,
        )
        .unwrap();

        for _ in 0..200 {
            let x0 = DVector::from_fn(2, |_, _| 6.0 * rng.random::<f64>() - 3.0);
            let u_seq = DVector::from_fn(2, |_, _| 6.0 * rng.random::<f64>() - 3.0);
            let condensed_ok = {
                let lhs = &qp.g * &u_seq;
                let rhs = &qp.w + &qp.e * &x0;
                (0..lhs.len()).all(|i| lhs[i] <= rhs[i] + 1e-9)
            };
            // Independent rollout with the terminal feedback.
            let mut x = x0.clone();
            let mut rollout_ok = true;
            for k in 0..horizons.constraint {
                let u = if k < horizons.control {
                    DVector::from_element(1, u_seq[k])
                } else {
                    &k_fb * &x
                };
                let lhs = &cons.state * &x + &cons.input * &u;
                for i in 0..cons.rows() {
                    if lhs[i] > cons.bound[i] + 1e-9 {
                        rollout_ok = false;
                    }
                }
                x = &a * &x + &b * &u;
            }
            assert_eq!(condensed_ok, rollout_ok);
        }
    }

    /// Model/data assembly equivalence on noiseless benchmark data.
    #[test]
    fn data_driven_assembly_equals_model_based_on_noiseless_data() {
        let (a, b) = bench_plant();
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let t = 20;
        let mut inputs = DMatrix::zeros(1, t + 1);
        let mut states = DMatrix::zeros(2, t + 1);
        let mut x = DVector::zeros(2);
        for k in 0..=t {
            let u = 10.0 * rng.random::<f64>() - 5.0;
            inputs[(0, k)] = u;
            states.set_column(k, &x);
            x = &a * &x + &b * DVector::from_element(1, u);
        }
        let ds = crate::data::Dataset::new(inputs, states).unwrap();
        let learned = Predictor::from_data(&ds.data_matrices(), &Tolerances::default()).unwrap();
        let exact = Predictor::from_state_space(a, b).unwrap();

        let cost = CostSpec::new(
            DMatrix::identity(2, 2),
            DMatrix::from_element(1, 1, 0.01),
            DMatrix::identity(2, 2),
        );
        let cons = ConstraintSpec::input_box(2, 1, 2.0);
        let horizons = Horizons::uniform(2).unwrap();
        let k0 = DMatrix::zeros(1, 2);
        let build = |p: &Predictor, prov| {
            let pm = build_prediction_matrices(p, horizons, &k0, TailForm::Consistent).unwrap();
            assemble_regulation(&pm, &cost, &cons, prov).unwrap()
        };
        let dd = build(&learned, Provenance::DataDriven);
        let mb = build(&exact, Provenance::ModelBased);
        assert!(linalg::max_abs_diff(&dd.h, &mb.h).unwrap() <= 1e-8);
        assert!(linalg::max_abs_diff(&dd.f, &mb.f).unwrap() <= 1e-8);
        assert!(linalg::max_abs_diff(&dd.g, &mb.g).unwrap() <= 1e-8);
        assert!((&dd.w - &mb.w).amax() <= 1e-8);
        assert!(linalg::max_abs_diff(&dd.s, &mb.s).unwrap() <= 1e-8);
    }

    #[test]
    fn zero_cross_term_leaves_constraints_unshifted() {
        // With F = 0 the z variable coincides with U and S = E.
        let qp = complete_squares(
            DMatrix::identity(2, 2),
            DMatrix::zeros(3, 2),
            DMatrix::from_row_slice(1, 2, &[1.0, 1.0]),
            DVector::from_element(1, 1.0),
            DMatrix::from_row_slice(1, 3, &[0.5, 0.0, -0.5]),
            1,
            Horizons::uniform(2).unwrap(),
            ControlMode::Regulation,
            Provenance::ModelBased,
        )
        .unwrap();
        assert_eq!(qp.s, qp.e);
        assert_eq!(qp.shift_gain().unwrap(), DMatrix::zeros(2, 3));
    }

    #[test]
    fn indefinite_hessian_is_rejected() {
        let res = complete_squares(
            DMatrix::from_row_slice(1, 1, &[-1.0]),
            DMatrix::zeros(1, 1),
            DMatrix::zeros(0, 1),
            DVector::zeros(0),
            DMatrix::zeros(0, 1),
            1,
            Horizons::uniform(1).unwrap(),
            ControlMode::Regulation,
            Provenance::ModelBased,
        );
        assert!(matches!(res, Err(Error::HessianNotPd)));
    }

    fn tracking_qp_for_integrator(n_steps: usize) -> MpQp {
        // Scalar integrator x+ = x + u.
        let pred = Predictor::from_state_space(
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::from_element(1, 1, 1.0),
        )
        .unwrap();
        let aug = pred.tracking_augmented();
        let pm = build_prediction_matrices(
            &aug,
            Horizons::uniform(n_steps).unwrap(),
            &DMatrix::zeros(1, 2),
            TailForm::Consistent,
        )
        .unwrap();
        assemble_tracking(
            &pm,
            &CostSpec::new(
                DMatrix::identity(1, 1),
                DMatrix::from_element(1, 1, 0.1),
                DMatrix::identity(1, 1),
            ),
            &ConstraintSpec::unconstrained(1, 1),
            Provenance::ModelBased,
        )
        .unwrap()
    }

    #[test]
    fn tracking_parameter_dimension_is_state_input_state() {
        let qp = tracking_qp_for_integrator(3);
        assert_eq!(qp.param_dim, 1 + 1 + 1);
        assert_eq!(qp.mode, ControlMode::Tracking);
        // Quadrotor-sized check: n = 2, m = 1 gives p = 5.
        let pred = Predictor::from_state_space(
            DMatrix::from_row_slice(2, 2, &[1.0, 0.025, 0.0, 1.0]),
            DMatrix::from_column_slice(2, 1, &[0.0003125, 0.025]),
        )
        .unwrap();
        let pm = build_prediction_matrices(
            &pred.tracking_augmented(),
            Horizons::uniform(5).unwrap(),
            &DMatrix::zeros(1, 3),
            TailForm::Consistent,
        )
        .unwrap();
        let qp = assemble_tracking(
            &pm,
            &CostSpec::new(
                DMatrix::from_partial_diagonal(2, 2, &[1.0, 0.0]),
                DMatrix::from_element(1, 1, 0.01),
                DMatrix::from_diagonal(&DVector::from_column_slice(&[100.0, 100.0])),
            ),
            &ConstraintSpec::unconstrained(2, 1),
            Provenance::DataDriven,
        )
        .unwrap();
        assert_eq!(qp.param_dim, 5);
    }

    #[test]
    fn tracking_at_the_reference_with_steady_input_is_stationary() {
        // At x = r with u_prev holding the state there, zero increments are
        // optimal: the unconstrained minimizer -H^{-1}F'theta must be zero.
        let qp = tracking_qp_for_integrator(4);
        let theta = DVector::from_column_slice(&[2.5, 0.0, 2.5]); // x = r, u_prev = 0
        let du = -qp.shift_gain().unwrap() * theta;
        assert!(du.amax() <= 1e-10);
    }

    #[test]
    fn tracking_with_zero_reference_matches_regulation_at_single_step() {
        // With one free move, r = 0 and u_prev = 0 the increment program is
        // the regulation program in disguise: du(0) = u(0).
        let pred = Predictor::from_state_space(
            DMatrix::from_element(1, 1, 0.5),
            DMatrix::from_element(1, 1, 1.0),
        )
        .unwrap();
        let cost = CostSpec::new(
            DMatrix::identity(1, 1),
            DMatrix::from_element(1, 1, 0.1),
            DMatrix::identity(1, 1),
        );
        let k0 = DMatrix::zeros(1, 1);
        let pm_reg = build_prediction_matrices(
            &pred,
            Horizons::uniform(1).unwrap(),
            &k0,
            TailForm::Consistent,
        )
        .unwrap();
        let reg = assemble_regulation(
            &pm_reg,
            &cost,
            &ConstraintSpec::unconstrained(1, 1),
            Provenance::ModelBased,
        )
        .unwrap();
        let pm_trk = build_prediction_matrices(
            &pred.tracking_augmented(),
            Horizons::uniform(1).unwrap(),
            &DMatrix::zeros(1, 2),
            TailForm::Consistent,
        )
        .unwrap();
        let trk = assemble_tracking(
            &pm_trk,
            &cost,
            &ConstraintSpec::unconstrained(1, 1),
            Provenance::ModelBased,
        )
        .unwrap();
        for x in [-2.0, -0.5, 0.0, 1.0, 3.0] {
            let u_reg = -reg.shift_gain().unwrap() * DVector::from_element(1, x);
            let du_trk =
                -trk.shift_gain().unwrap() * DVector::from_column_slice(&[x, 0.0, 0.0]);
            assert!((u_reg[0] - du_trk[0]).abs() <= 1e-10, "x = {x}");
        }
    }
}
