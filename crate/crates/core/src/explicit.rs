//! Closed-form solution of the parametric program over active constraint
//! sets, and assembly of the piecewise-affine controller.
//!
//! Every subset of constraint rows with independent gradients yields one
//! candidate piece: the equality-constrained optimizer is affine in the
//! parameter, and the primal/dual feasibility conditions carve out the
//! polyhedron where that piece is optimal. Enumerating subsets by size and
//! lexicographic order, pruning empty pieces and merging same-law neighbors
//! gives the complete controller.

use alloc::boxed::Box;
use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::mpqp::{
    assemble_regulation, assemble_tracking, ConstraintSpec, ControlMode, CostSpec, MpQp,
    Provenance,
};
use crate::polyhedra::{merge_partition_traced, LawRegion, Polyhedron};
use crate::predictor::{build_prediction_matrices, Horizons, Predictor, TailForm};
use crate::terminal::TerminalDesign;
use crate::tol::Tolerances;

/// Hard cap on the number of candidate active sets one build may visit.
pub const ENUMERATION_BUDGET: u128 = 20_000_000;

/// Strictly increasing constraint-row indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActiveSet {
    indices: Vec<usize>,
}

impl ActiveSet {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Dimension(
                "active-set indices must be strictly increasing".into(),
            ));
        }
        Ok(Self { indices })
    }

    pub fn empty() -> Self {
        Self { indices: Vec::new() }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// One piece of the controller: the affine law for the whole planned
/// sequence, its first-move restriction, and the region where it is optimal.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionLaw {
    /// Gain of the full planned sequence (nu x p).
    pub sequence_gain: DMatrix<f64>,
    /// Offset of the full planned sequence (nu).
    pub sequence_offset: DVector<f64>,
    /// First-move gain (m x p): the first block of `sequence_gain`.
    pub gain: DMatrix<f64>,
    /// First-move offset (m).
    pub offset: DVector<f64>,
    pub region: Polyhedron,
    pub active_set: ActiveSet,
}

/// Verdict for one candidate active set.
#[derive(Debug, Clone, PartialEq)]
pub enum ActiveSetOutcome {
    Region(Box<RegionLaw>),
    /// The selected rows are linearly dependent; the candidate is skipped
    /// and counted. Coverage is guaranteed by the independent subsets of
    /// the same rows, which are all enumerated.
    Degenerate,
    /// The optimality region has no interior.
    Empty,
}

/// Counters accumulated by [`enumerate_partition`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildReport {
    pub enumerated: usize,
    pub degenerate: usize,
    pub empty: usize,
    pub merged: usize,
}

/// The explicit controller: an ordered list of regions with affine laws.
#[derive(Debug, Clone, PartialEq)]
pub struct PwaController {
    pub regions: Vec<RegionLaw>,
    pub param_dim: usize,
    pub input_dim: usize,
    pub mode: ControlMode,
    pub provenance: Provenance,
    pub report: BuildReport,
}

/// Cholesky factor of `H` plus the completed-squares shift, shared by all
/// active-set solves of one program.
struct SolveContext {
    chol: Cholesky<f64, nalgebra::Dyn>,
    shift: DMatrix<f64>,
}

impl SolveContext {
    fn new(qp: &MpQp) -> Result<Self> {
        let chol = Cholesky::new(qp.h.clone()).ok_or(Error::HessianNotPd)?;
        let shift = chol.solve(&qp.f.transpose());
        Ok(Self { chol, shift })
    }
}

/// Solve one active set in closed form.
pub fn solve_active_set(qp: &MpQp, set: &ActiveSet, tol: &Tolerances) -> Result<ActiveSetOutcome> {
    let ctx = SolveContext::new(qp)?;
    solve_with_context(qp, &ctx, set, tol)
}

fn solve_with_context(
    qp: &MpQp,
    ctx: &SolveContext,
    set: &ActiveSet,
    tol: &Tolerances,
) -> Result<ActiveSetOutcome> {
    let nu = qp.decision_dim();
    let p = qp.param_dim;
    let c = qp.constraint_rows();
    let k = set.len();
    if set.indices().iter().any(|&i| i >= c) {
        return Err(Error::Dimension("active-set index out of range".into()));
    }
    if k > nu {
        // More active rows than decision variables cannot be independent.
        return Ok(ActiveSetOutcome::Degenerate);
    }

    let inactive: Vec<usize> = (0..c).filter(|i| !set.indices().contains(i)).collect();

    let (z_gain, z_offset, dual_gain, dual_offset) = if k == 0 {
        (
            DMatrix::zeros(nu, p),
            DVector::zeros(nu),
            DMatrix::zeros(0, p),
            DVector::zeros(0),
        )
    } else {
        let g_act = qp.g.select_rows(set.indices());
        let w_act = DVector::from_fn(k, |i, _| qp.w[set.indices()[i]]);
        let s_act = qp.s.select_rows(set.indices());
        let (rank, _) = crate::linalg::numerical_rank(&g_act, tol.active_rank_rel);
        if rank < k {
            return Ok(ActiveSetOutcome::Degenerate);
        }
        let hi_gt = ctx.chol.solve(&g_act.transpose()); // H^{-1} G~'
        let schur = &g_act * &hi_gt;
        let schur = (&schur + schur.transpose()) * 0.5;
        let Some(schur_chol) = Cholesky::new(schur) else {
            return Ok(ActiveSetOutcome::Degenerate);
        };
        // lambda(x) = -(schur)^{-1} (W~ + S~ x); optimal when >= 0.
        let lam_gain = schur_chol.solve(&s_act);
        let lam_offset = schur_chol.solve(&w_act);
        (
            &hi_gt * &lam_gain,
            &hi_gt * &lam_offset,
            lam_gain,
            lam_offset,
        )
    };

    // Sequence law in the original decision variable: U = z - shift * x.
    let sequence_gain = &z_gain - &ctx.shift;
    let sequence_offset = z_offset.clone();

    // Region: dual feasibility rows, then primal feasibility of the
    // inactive constraints evaluated at the optimizer z(x).
    let rows = k + inactive.len();
    let mut a = DMatrix::zeros(rows, p);
    let mut b = DVector::zeros(rows);
    a.view_mut((0, 0), (k, p)).copy_from(&dual_gain);
    b.rows_mut(0, k).copy_from(&(-&dual_offset));
    if !inactive.is_empty() {
        let g_inact = qp.g.select_rows(&inactive);
        let s_inact = qp.s.select_rows(&inactive);
        let w_inact = DVector::from_fn(inactive.len(), |i, _| qp.w[inactive[i]]);
        let primal_gain = &g_inact * &z_gain - s_inact;
        let primal_offset = w_inact - &g_inact * &z_offset;
        a.view_mut((k, 0), (inactive.len(), p))
            .copy_from(&primal_gain);
        b.rows_mut(k, inactive.len()).copy_from(&primal_offset);
    }

    let polyhedron = Polyhedron::new(a, b)?;
    if polyhedron.is_empty(tol)? {
        return Ok(ActiveSetOutcome::Empty);
    }
    let region = polyhedron.remove_redundancy(tol)?;

    let m = qp.input_dim;
    Ok(ActiveSetOutcome::Region(Box::new(RegionLaw {
        gain: sequence_gain.rows(0, m).into_owned(),
        offset: sequence_offset.rows(0, m).into_owned(),
        sequence_gain,
        sequence_offset,
        region,
        active_set: set.clone(),
    })))
}

/// Number of candidate sets for `c` rows and sizes `0..=k_max`.
fn candidate_count(c: usize, k_max: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for k in 0..=k_max.min(c) {
        if k > 0 {
            binom = binom.saturating_mul((c - k + 1) as u128) / k as u128;
        }
        total = total.saturating_add(binom);
        if total > ENUMERATION_BUDGET {
            return total;
        }
    }
    total
}

/// Visit all k-subsets of `0..n` in lexicographic order.
fn visit_combinations<F>(n: usize, k: usize, mut f: F) -> Result<()>
where
    F: FnMut(&[usize]) -> Result<()>,
{
    if k == 0 {
        return f(&[]);
    }
    if k > n {
        return Ok(());
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx)?;
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + (i - 1) {
            i -= 1;
        }
        if i == 0 {
            return Ok(());
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Enumerate every candidate active set, keep the non-degenerate non-empty
/// pieces, and merge neighbors whose first-move laws coincide.
///
/// The enumeration order (size ascending, lexicographic within a size) fixes
/// the region order of the resulting controller, and with it the online
/// tie-breaking on shared facets.
pub fn enumerate_partition(qp: &MpQp, tol: &Tolerances) -> Result<PwaController> {
    let ctx = SolveContext::new(qp)?;
    let nu = qp.decision_dim();
    let c = qp.constraint_rows();
    let k_max = nu.min(c);
    let total = candidate_count(c, k_max);
    if total > ENUMERATION_BUDGET {
        return Err(Error::EnumerationBudget {
            total,
            cap: ENUMERATION_BUDGET,
        });
    }

    let mut report = BuildReport::default();
    let mut regions: Vec<RegionLaw> = Vec::new();
    for k in 0..=k_max {
        visit_combinations(c, k, |indices| {
            report.enumerated += 1;
            let set = ActiveSet {
                indices: indices.to_vec(),
            };
            match solve_with_context(qp, &ctx, &set, tol)? {
                ActiveSetOutcome::Region(region) => regions.push(*region),
                ActiveSetOutcome::Degenerate => report.degenerate += 1,
                ActiveSetOutcome::Empty => report.empty += 1,
            }
            Ok(())
        })?;
    }

    // Merge on the full sequence law, so the stored law (first move and
    // planned tail alike) stays exact across every point of a merged
    // region. Keying on the first move alone would merge more aggressively
    // but leave the stored tail wrong on the absorbed side.
    let items: Vec<LawRegion> = regions
        .iter()
        .map(|r| LawRegion {
            polyhedron: r.region.clone(),
            gain: r.sequence_gain.clone(),
            offset: r.sequence_offset.clone(),
        })
        .collect();
    let (merged, reps, merges) = merge_partition_traced(items, tol)?;
    report.merged = merges;
    let final_regions: Vec<RegionLaw> = merged
        .into_iter()
        .zip(reps)
        .map(|(item, rep)| RegionLaw {
            region: item.polyhedron,
            ..regions[rep].clone()
        })
        .collect();

    Ok(PwaController {
        regions: final_regions,
        param_dim: qp.param_dim,
        input_dim: qp.input_dim,
        mode: qp.mode,
        provenance: qp.provenance,
        report,
    })
}

/// End-to-end synthesis: stack the responses, condense the program and
/// enumerate the partition. In tracking mode the predictor is augmented
/// with the previous input and the decision variables become increments.
#[allow(clippy::too_many_arguments)]
pub fn build_controller(
    pred: &Predictor,
    horizons: Horizons,
    state_weight: &DMatrix<f64>,
    input_weight: &DMatrix<f64>,
    terminal: &TerminalDesign,
    cons: &ConstraintSpec,
    mode: ControlMode,
    tail: TailForm,
    provenance: Provenance,
    tol: &Tolerances,
) -> Result<(MpQp, PwaController)> {
    let cost = CostSpec::new(
        state_weight.clone(),
        input_weight.clone(),
        terminal.penalty.clone(),
    );
    let qp = match mode {
        ControlMode::Regulation => {
            let pm = build_prediction_matrices(pred, horizons, &terminal.gain, tail)?;
            assemble_regulation(&pm, &cost, cons, provenance)?
        }
        ControlMode::Tracking => {
            let aug = pred.tracking_augmented();
            let zero_fb = DMatrix::zeros(aug.input_dim(), aug.state_dim());
            let pm = build_prediction_matrices(&aug, horizons, &zero_fb, tail)?;
            assemble_tracking(&pm, &cost, cons, provenance)?
        }
    };
    let controller = enumerate_partition(&qp, tol)?;
    Ok((qp, controller))
}

/// Probe the law across shared facets: for facet points that belong to two
/// regions, both first-move laws must agree. Returns the largest observed
/// mismatch over up to `samples` facet points.
pub fn check_continuity(ctrl: &PwaController, samples: usize) -> Result<f64> {
    let mut max_gap = 0.0f64;
    let mut count = 0usize;
    let n_regions = ctrl.regions.len();
    'outer: for i in 0..n_regions {
        let ri = &ctrl.regions[i];
        for facet in 0..ri.region.rows() {
            for (j, rj) in ctrl.regions.iter().enumerate() {
                if j == i {
                    continue;
                }
                // Pin a point onto facet `facet` of region i while requiring
                // membership of region j.
                let p = ctrl.param_dim;
                let extra = 1;
                let rows = ri.region.rows() + extra + rj.region.rows();
                let mut a = DMatrix::zeros(rows, p);
                let mut b = DVector::zeros(rows);
                a.view_mut((0, 0), (ri.region.rows(), p))
                    .copy_from(ri.region.a());
                b.rows_mut(0, ri.region.rows()).copy_from(ri.region.b());
                a.row_mut(ri.region.rows())
                    .copy_from(&(ri.region.a().row(facet) * -1.0));
                b[ri.region.rows()] = -ri.region.b()[facet];
                a.view_mut((ri.region.rows() + extra, 0), (rj.region.rows(), p))
                    .copy_from(rj.region.a());
                b.rows_mut(ri.region.rows() + extra, rj.region.rows())
                    .copy_from(rj.region.b());
                let shared = Polyhedron::new(a, b)?;
                let Some((point, _radius)) = shared.chebyshev()? else {
                    continue;
                };
                // The LP can return slightly off-facet points; only compare
                // where both regions actually admit the point.
                if !ri.region.contains(&point, 1e-7) || !rj.region.contains(&point, 1e-7) {
                    continue;
                }
                let ui = &ri.gain * &point + &ri.offset;
                let uj = &rj.gain * &point + &rj.offset;
                max_gap = max_gap.max((ui - uj).amax());
                count += 1;
                if count >= samples {
                    break 'outer;
                }
            }
        }
    }
    Ok(max_gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predictor::{build_prediction_matrices, Predictor, TailForm};
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    /// The two-state benchmark problem: Q = I, R = 0.01, |u| <= 2, N = 2,
    /// terminal penalty from the Lyapunov design.
    fn bench_qp() -> MpQp {
        let a = DMatrix::from_row_slice(2, 2, &[0.7326, -0.0861, 0.1722, 0.9909]);
        let b = DMatrix::from_row_slice(2, 1, &[0.0609, 0.0064]);
        let pred = Predictor::from_state_space(a, b).unwrap();
        let design =
            crate::terminal::solve_dd_lyapunov(&pred, &DMatrix::identity(2, 2), &tol()).unwrap();
        let pm = build_prediction_matrices(
            &pred,
            Horizons::uniform(2).unwrap(),
            &design.gain,
            TailForm::Consistent,
        )
        .unwrap();
        let cost = CostSpec::new(
            DMatrix::identity(2, 2),
            DMatrix::from_element(1, 1, 0.01),
            design.penalty.clone(),
        );
        assemble_regulation(
            &pm,
            &cost,
            &ConstraintSpec::input_box(2, 1, 2.0),
            Provenance::ModelBased,
        )
        .unwrap()
    }

    #[test]
    fn empty_active_set_yields_the_unconstrained_law() {
        let qp = bench_qp();
        let outcome = solve_active_set(&qp, &ActiveSet::empty(), &tol()).unwrap();
        let ActiveSetOutcome::Region(region) = outcome else {
            panic!("unconstrained piece must exist");
        };
        let shift = qp.shift_gain().unwrap();
        assert!((&region.sequence_gain + &shift).amax() <= 1e-12);
        assert!(region.sequence_offset.amax() <= 1e-12);
        // Region is G (-shift x) <= W + E x, equivalently -S x <= W.
        assert!(region.region.contains(&DVector::zeros(2), 1e-9));
    }

    #[test]
    fn scalar_hand_kkt_case() {
        // min z^2 s.t. z <= 1 - x, constraint active:
        // z(x) = 1 - x and dual feasibility demands x >= 1.
        let qp = crate::mpqp::complete_squares(
            DMatrix::identity(1, 1),
            DMatrix::zeros(1, 1),
            DMatrix::from_element(1, 1, 1.0),
            DVector::from_element(1, 1.0),
            DMatrix::from_element(1, 1, -1.0),
            1,
            Horizons::uniform(1).unwrap(),
            ControlMode::Regulation,
            Provenance::ModelBased,
        )
        .unwrap();
        let set = ActiveSet::new(vec![0]).unwrap();
        let ActiveSetOutcome::Region(region) = solve_active_set(&qp, &set, &tol()).unwrap() else {
            panic!("active piece must exist");
        };
        // Law: U(x) = z(x) = 1 - x (F = 0, so no shift).
        assert!((region.gain[(0, 0)] + 1.0).abs() <= 1e-12);
        assert!((region.offset[0] - 1.0).abs() <= 1e-12);
        // Region x >= 1.
        assert!(region.region.contains(&DVector::from_element(1, 1.5), 1e-9));
        assert!(!region.region.contains(&DVector::from_element(1, 0.5), 1e-9));
    }

    #[test]
    fn dependent_rows_are_flagged_degenerate() {
        let qp = bench_qp();
        // Rows 0 and 1 are u(0) <= 2 and -u(0) <= 2: dependent.
        let set = ActiveSet::new(vec![0, 1]).unwrap();
        assert_eq!(
            solve_active_set(&qp, &set, &tol()).unwrap(),
            ActiveSetOutcome::Degenerate
        );
    }

    #[test]
    fn oversized_sets_are_degenerate_without_work() {
        let qp = bench_qp();
        let set = ActiveSet::new(vec![0, 2, 3]).unwrap();
        assert_eq!(
            solve_active_set(&qp, &set, &tol()).unwrap(),
            ActiveSetOutcome::Degenerate
        );
    }

    #[test]
    fn benchmark_partition_has_nine_regions() {
        let qp = bench_qp();
        let ctrl = enumerate_partition(&qp, &tol()).unwrap();
        assert_eq!(ctrl.regions.len(), 9);
        assert_eq!(ctrl.report.enumerated, 11); // C(4,0)+C(4,1)+C(4,2)
        assert_eq!(ctrl.report.degenerate, 2); // the two conflicting pairs
        assert_eq!(ctrl.report.empty, 0);
    }

    #[test]
    fn unconstrained_program_yields_a_single_global_region() {
        let pred = Predictor::from_state_space(
            DMatrix::from_row_slice(2, 2, &[0.7326, -0.0861, 0.1722, 0.9909]),
            DMatrix::from_row_slice(2, 1, &[0.0609, 0.0064]),
        )
        .unwrap();
        let design =
            crate::terminal::solve_dd_lyapunov(&pred, &DMatrix::identity(2, 2), &tol()).unwrap();
        let pm = build_prediction_matrices(
            &pred,
            Horizons::uniform(2).unwrap(),
            &design.gain,
            TailForm::Consistent,
        )
        .unwrap();
        let qp = assemble_regulation(
            &pm,
            &CostSpec::new(
                DMatrix::identity(2, 2),
                DMatrix::from_element(1, 1, 0.01),
                design.penalty,
            ),
            &ConstraintSpec::unconstrained(2, 1),
            Provenance::ModelBased,
        )
        .unwrap();
        let ctrl = enumerate_partition(&qp, &tol()).unwrap();
        assert_eq!(ctrl.regions.len(), 1);
        let shift = qp.shift_gain().unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..50 {
            let x = DVector::from_fn(2, |_, _| 20.0 * rng.random::<f64>() - 10.0);
            assert!(ctrl.regions[0].region.contains(&x, 1e-9));
            let u = &ctrl.regions[0].sequence_gain * &x;
            let expected = -&shift * &x;
            assert!((u - expected).amax() <= 1e-10);
        }
    }

    /// KKT certificate at each region's Chebyshev center: stationarity,
    /// complementary slackness, dual sign and primal feasibility.
    #[test]
    fn every_region_satisfies_the_kkt_conditions_at_its_center() {
        let qp = bench_qp();
        let ctrl = enumerate_partition(&qp, &tol()).unwrap();
        let shift = qp.shift_gain().unwrap();
        for region in &ctrl.regions {
            let (center, _) = region.region.chebyshev().unwrap().unwrap();
            let u = &region.sequence_gain * &center + &region.sequence_offset;
            let z = &u + &shift * &center;
            // Multipliers on the active rows (scaled stationarity
            // H z + G~' lambda = 0).
            let act = region.active_set.indices();
            let lambda = if act.is_empty() {
                DVector::zeros(0)
            } else {
                let g_act = qp.g.select_rows(act);
                let schur = &g_act * Cholesky::new(qp.h.clone()).unwrap().solve(&g_act.transpose());
                let w_act = DVector::from_fn(act.len(), |i, _| qp.w[act[i]]);
                let s_act = qp.s.select_rows(act);
                -(schur.try_inverse().unwrap() * (w_act + s_act * &center))
            };
            // Stationarity.
            let mut grad = &qp.h * &z;
            if !act.is_empty() {
                grad += qp.g.select_rows(act).transpose() * &lambda;
            }
            assert!(grad.amax() <= 1e-7, "stationarity residual {}", grad.amax());
            // Dual sign.
            assert!(lambda.iter().all(|&l| l >= -1e-7));
            // Primal feasibility and complementary slackness.
            let slack = &qp.w + &qp.s * &center - &qp.g * &z;
            assert!(slack.min() >= -1e-7);
            for &row in act {
                assert!(slack[row].abs() <= 1e-7);
            }
        }
    }

    #[test]
    fn continuity_holds_across_the_benchmark_partition() {
        let qp = bench_qp();
        let ctrl = enumerate_partition(&qp, &tol()).unwrap();
        let gap = check_continuity(&ctrl, 200).unwrap();
        assert!(gap <= 1e-6, "boundary mismatch {gap}");
    }

    #[test]
    fn corrupting_one_offset_is_detected_by_the_continuity_probe() {
        let qp = bench_qp();
        let mut ctrl = enumerate_partition(&qp, &tol()).unwrap();
        let clean = check_continuity(&ctrl, 200).unwrap();
        let bump = 2.5e-3;
        ctrl.regions[0].offset[0] += bump;
        let corrupted = check_continuity(&ctrl, 400).unwrap();
        assert!(
            (corrupted - bump).abs() <= 1e-9 + clean,
            "expected a mismatch near {bump}, saw {corrupted}"
        );
    }

    #[test]
    fn single_region_controller_reports_zero_mismatch() {
        let qp = bench_qp();
        let mut ctrl = enumerate_partition(&qp, &tol()).unwrap();
        ctrl.regions.truncate(1);
        assert_eq!(check_continuity(&ctrl, 100).unwrap(), 0.0);
    }

    #[test]
    fn enumeration_budget_guard_trips() {
        // 60 rows at size <= 12 exceeds the budget by orders of magnitude.
        let nu = 12;
        let c = 60;
        let qp = crate::mpqp::complete_squares(
            DMatrix::identity(nu, nu),
            DMatrix::zeros(2, nu),
            DMatrix::from_fn(c, nu, |i, j| ((i + j) % 5) as f64 - 2.0),
            DVector::from_element(c, 1.0),
            DMatrix::zeros(c, 2),
            1,
            Horizons::uniform(nu).unwrap(),
            ControlMode::Regulation,
            Provenance::ModelBased,
        )
        .unwrap();
        assert!(matches!(
            enumerate_partition(&qp, &tol()),
            Err(Error::EnumerationBudget { .. })
        ));
    }

    #[test]
    fn combination_visitor_is_lexicographic() {
        let mut seen = Vec::new();
        visit_combinations(4, 2, |c| {
            seen.push(c.to_vec());
            Ok(())
        })
        .unwrap();
        assert_eq!(
            seen,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
    }
}
