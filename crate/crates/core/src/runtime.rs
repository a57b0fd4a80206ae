//! Online evaluation of the stored controller.
//!
//! Point location is a sequential scan in stored region order; the first
//! region containing the parameter wins. Ties on shared facets are harmless
//! because the law is continuous across boundaries, which the offline
//! continuity probe verifies rather than assumes. The controller is
//! immutable, so concurrent evaluation from many threads is safe.

use alloc::format;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::explicit::PwaController;
use crate::mpqp::ControlMode;
use crate::tol::Tolerances;

/// A located control move.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlMove {
    /// First input block of the planned sequence (the move to apply).
    pub input: DVector<f64>,
    /// Index of the region that produced it, in stored order.
    pub region_index: usize,
}

impl PwaController {
    /// Locate `theta` and return the first control move, or `None` when no
    /// region admits the parameter (the program is infeasible there).
    pub fn evaluate(&self, theta: &DVector<f64>, tol: &Tolerances) -> Result<Option<ControlMove>> {
        let region_index = match self.locate(theta, tol)? {
            Some(i) => i,
            None => return Ok(None),
        };
        let region = &self.regions[region_index];
        Ok(Some(ControlMove {
            input: &region.gain * theta + &region.offset,
            region_index,
        }))
    }

    /// Full planned sequence at `theta`; its first `input_dim` entries are
    /// bit-identical to [`PwaController::evaluate`] because both read the
    /// same stored first-move rows.
    pub fn full_sequence(
        &self,
        theta: &DVector<f64>,
        tol: &Tolerances,
    ) -> Result<Option<DVector<f64>>> {
        let region_index = match self.locate(theta, tol)? {
            Some(i) => i,
            None => return Ok(None),
        };
        let region = &self.regions[region_index];
        let mut seq = &region.sequence_gain * theta + &region.sequence_offset;
        // The stored first-move rows are authoritative; overwrite so the
        // sequence head matches `evaluate` exactly.
        let head = &region.gain * theta + &region.offset;
        seq.rows_mut(0, self.input_dim).copy_from(&head);
        Ok(Some(seq))
    }

    /// Tracking-mode evaluation: assemble `theta = [x; u_prev; r]`, read the
    /// optimal increment and return the updated input `u_prev + du`.
    pub fn evaluate_tracking(
        &self,
        state: &DVector<f64>,
        previous_input: &DVector<f64>,
        reference: &DVector<f64>,
        tol: &Tolerances,
    ) -> Result<Option<DVector<f64>>> {
        if self.mode != ControlMode::Tracking {
            return Err(Error::ModeMismatch {
                expected: "tracking",
            });
        }
        if state.len() + previous_input.len() + reference.len() != self.param_dim {
            return Err(Error::Dimension(format!(
                "[x; u_prev; r] must have length {}",
                self.param_dim
            )));
        }
        let mut theta = DVector::zeros(self.param_dim);
        theta.rows_mut(0, state.len()).copy_from(state);
        theta
            .rows_mut(state.len(), previous_input.len())
            .copy_from(previous_input);
        theta
            .rows_mut(state.len() + previous_input.len(), reference.len())
            .copy_from(reference);
        Ok(self
            .evaluate(&theta, tol)?
            .map(|mv| previous_input + mv.input))
    }

    fn locate(&self, theta: &DVector<f64>, tol: &Tolerances) -> Result<Option<usize>> {
        if theta.len() != self.param_dim {
            return Err(Error::Dimension(format!(
                "parameter must have length {}, got {}",
                self.param_dim,
                theta.len()
            )));
        }
        Ok(self
            .regions
            .iter()
            .position(|r| r.region.contains(theta, tol.location_slack)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explicit::enumerate_partition;
    use crate::mpqp::{assemble_regulation, ConstraintSpec, CostSpec, Provenance};
    use crate::predictor::{build_prediction_matrices, Horizons, Predictor, TailForm};
    use crate::terminal::solve_dd_lyapunov;
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn bench_controller(constrained: bool) -> PwaController {
        let a = DMatrix::from_row_slice(2, 2, &[0.7326, -0.0861, 0.1722, 0.9909]);
        let b = DMatrix::from_row_slice(2, 1, &[0.0609, 0.0064]);
        let pred = Predictor::from_state_space(a, b).unwrap();
        let design = solve_dd_lyapunov(&pred, &DMatrix::identity(2, 2), &tol()).unwrap();
        let pm = build_prediction_matrices(
            &pred,
            Horizons::uniform(2).unwrap(),
            &design.gain,
            TailForm::Consistent,
        )
        .unwrap();
        let cons = if constrained {
            ConstraintSpec::input_box(2, 1, 2.0)
        } else {
            ConstraintSpec::unconstrained(2, 1)
        };
        let qp = assemble_regulation(
            &pm,
            &CostSpec::new(
                DMatrix::identity(2, 2),
                DMatrix::from_element(1, 1, 0.01),
                design.penalty,
            ),
            &cons,
            Provenance::ModelBased,
        )
        .unwrap();
        enumerate_partition(&qp, &tol()).unwrap()
    }

    #[test]
    fn single_region_controller_is_affine_at_the_origin() {
        let ctrl = bench_controller(false);
        assert_eq!(ctrl.regions.len(), 1);
        let mv = ctrl
            .evaluate(&DVector::zeros(2), &tol())
            .unwrap()
            .expect("origin must be feasible");
        assert_eq!(mv.region_index, 0);
        assert!((mv.input[0] - ctrl.regions[0].offset[0]).abs() <= 1e-15);
    }

    #[test]
    fn origin_is_the_regulation_fixed_point() {
        let ctrl = bench_controller(true);
        let mv = ctrl
            .evaluate(&DVector::zeros(2), &tol())
            .unwrap()
            .expect("origin must be feasible");
        assert!(mv.input.amax() <= 1e-8);
    }

    #[test]
    fn repeated_evaluation_is_deterministic() {
        let ctrl = bench_controller(true);
        let theta = DVector::from_column_slice(&[3.7, -1.9]);
        let first = ctrl.evaluate(&theta, &tol()).unwrap().unwrap();
        for _ in 0..10 {
            let again = ctrl.evaluate(&theta, &tol()).unwrap().unwrap();
            assert_eq!(again.region_index, first.region_index);
            assert_eq!(again.input, first.input);
        }
    }

    #[test]
    fn sequence_head_matches_the_first_move_bit_for_bit() {
        let ctrl = bench_controller(true);
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        for _ in 0..100 {
            let theta = DVector::from_fn(2, |_, _| 20.0 * rng.random::<f64>() - 10.0);
            let mv = ctrl.evaluate(&theta, &tol()).unwrap();
            let seq = ctrl.full_sequence(&theta, &tol()).unwrap();
            match (mv, seq) {
                (Some(mv), Some(seq)) => {
                    assert_eq!(mv.input[0].to_bits(), seq[0].to_bits());
                }
                (None, None) => {}
                _ => panic!("evaluate and full_sequence disagreed on feasibility"),
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let ctrl = bench_controller(true);
        assert!(ctrl.evaluate(&DVector::zeros(3), &tol()).is_err());
    }

    #[test]
    fn tracking_mode_is_required_for_tracking_evaluation() {
        let ctrl = bench_controller(true);
        let res = ctrl.evaluate_tracking(
            &DVector::zeros(2),
            &DVector::zeros(1),
            &DVector::zeros(2),
            &tol(),
        );
        assert!(matches!(res, Err(Error::ModeMismatch { .. })));
    }

    #[test]
    fn far_away_states_are_infeasible_for_state_constrained_problems() {
        // Build a problem with a state bound so that far states fall outside
        // every region.
        let a = DMatrix::from_row_slice(1, 1, &[1.0]);
        let b = DMatrix::from_row_slice(1, 1, &[1.0]);
        let pred = Predictor::from_state_space(a, b).unwrap();
        let pm = build_prediction_matrices(
            &pred,
            Horizons::uniform(1).unwrap(),
            &DMatrix::zeros(1, 1),
            TailForm::Consistent,
        )
        .unwrap();
        let cons = ConstraintSpec::new(
            DMatrix::from_row_slice(3, 1, &[1.0, -1.0, 0.0]),
            DMatrix::from_row_slice(3, 1, &[0.0, 0.0, 1.0]),
            DVector::from_column_slice(&[1.0, 1.0, 0.5]),
        );
        let qp = assemble_regulation(
            &pm,
            &CostSpec::new(
                DMatrix::identity(1, 1),
                DMatrix::identity(1, 1),
                DMatrix::identity(1, 1),
            ),
            &cons,
            Provenance::ModelBased,
        )
        .unwrap();
        let ctrl = enumerate_partition(&qp, &tol()).unwrap();
        assert!(ctrl
            .evaluate(&DVector::from_element(1, 50.0), &tol())
            .unwrap()
            .is_none());
        assert!(ctrl
            .evaluate(&DVector::from_element(1, 0.2), &tol())
            .unwrap()
            .is_some());
    }
}
