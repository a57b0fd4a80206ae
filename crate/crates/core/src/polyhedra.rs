//! Halfspace polyhedra and the dense LP machinery behind the explicit
//! solver: feasibility and full-dimensionality certificates, redundancy
//! removal, and convex-union merging of adjacent regions.
//!
//! The LP solver is a dense two-phase simplex with Bland's rule. Bland's
//! rule is slower than steepest-edge pivoting but cannot cycle, which keeps
//! partitions reproducible across runs and platforms; the problems solved
//! here are small by construction.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tol::Tolerances;

/// Entering-column threshold on reduced costs.
const EPS_COST: f64 = 1e-9;
/// Smallest usable pivot element.
const EPS_PIVOT: f64 = 1e-11;
/// Rows with a norm below this count as all-zero.
const EPS_ROW_NORM: f64 = 1e-12;
/// Cap on the Chebyshev radius so the certificate LP stays bounded for
/// unbounded polyhedra. Kept moderate: vertex coordinates scale with the
/// cap, and with them the floating-point error of the certificate.
const RADIUS_CAP: f64 = 1e3;

/// `{ theta : A theta <= b }` with unit-norm rows.
///
/// Construction normalizes every row by its Euclidean norm, drops vacuous
/// all-zero rows with a nonnegative bound, and keeps all-zero rows with a
/// negative bound (they certify emptiness).
#[derive(Debug, Clone, PartialEq)]
pub struct Polyhedron {
    a: DMatrix<f64>,
    b: DVector<f64>,
}

impl Polyhedron {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(Error::Dimension(alloc::format!(
                "A has {} rows but b has {} entries",
                a.nrows(),
                b.len()
            )));
        }
        if !crate::linalg::all_finite(&a) || b.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("polyhedron"));
        }
        let dim = a.ncols();
        let mut rows: Vec<(DVector<f64>, f64)> = Vec::with_capacity(a.nrows());
        for i in 0..a.nrows() {
            let row = a.row(i).transpose();
            let norm = row.norm();
            if norm <= EPS_ROW_NORM {
                if b[i] >= 0.0 {
                    continue; // vacuous
                }
                rows.push((DVector::zeros(dim), b[i]));
            } else {
                rows.push((row / norm, b[i] / norm));
            }
        }
        let mut na = DMatrix::zeros(rows.len(), dim);
        let mut nb = DVector::zeros(rows.len());
        for (i, (row, bound)) in rows.iter().enumerate() {
            na.row_mut(i).copy_from(&row.transpose());
            nb[i] = *bound;
        }
        Ok(Self { a: na, b: nb })
    }

    /// The whole parameter space (no constraints).
    pub fn universe(dim: usize) -> Self {
        Self {
            a: DMatrix::zeros(0, dim),
            b: DVector::zeros(0),
        }
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn contains(&self, theta: &DVector<f64>, slack: f64) -> bool {
        if theta.len() != self.dim() {
            return false;
        }
        (0..self.rows()).all(|i| self.a.row(i).transpose().dot(theta) <= self.b[i] + slack)
    }

    /// Chebyshev center and radius: the largest ball inscribed in the
    /// polyhedron, with the radius capped at `RADIUS_CAP` so unbounded sets
    /// yield a finite certificate. A negative radius certifies an empty
    /// set (the rows cannot even be met pointwise); `None` means the
    /// certificate program itself was infeasible, which also implies
    /// emptiness.
    pub fn chebyshev(&self) -> Result<Option<(DVector<f64>, f64)>> {
        let p = self.dim();
        let r = self.rows();
        let mut a = DMatrix::zeros(r + 1, p + 1);
        let mut b = DVector::zeros(r + 1);
        for i in 0..r {
            a.view_mut((i, 0), (1, p)).copy_from(&self.a.row(i));
            a[(i, p)] = self.a.row(i).norm();
            b[i] = self.b[i];
        }
        a[(r, p)] = 1.0;
        b[r] = RADIUS_CAP;
        let mut cost = DVector::zeros(p + 1);
        cost[p] = -1.0;
        let res = solve_lp(&cost, &a, &b)?;
        match res.status {
            LpStatus::Infeasible => Ok(None),
            LpStatus::Unbounded => Err(Error::Numerics("capped certificate LP came back unbounded")),
            LpStatus::Optimal => {
                let center = res.point.rows(0, p).into_owned();
                Ok(Some((center, res.point[p])))
            }
        }
    }

    /// True when the polyhedron has no interior worth keeping: infeasible,
    /// or thinner than the full-dimensionality threshold in every direction.
    pub fn is_empty(&self, tol: &Tolerances) -> Result<bool> {
        Ok(match self.chebyshev()? {
            None => true,
            Some((_, radius)) => radius < tol.empty_radius,
        })
    }

    /// Drop rows implied by the others. Sequential: each row is tested
    /// against the rows still kept, so duplicate faces collapse to one.
    pub fn remove_redundancy(&self, tol: &Tolerances) -> Result<Polyhedron> {
        let r = self.rows();
        let p = self.dim();
        let mut kept: Vec<bool> = vec![true; r];
        for i in 0..r {
            let objective = -self.a.row(i).transpose();
            // Others plus a relaxed copy of row i, which keeps the LP bounded.
            let live: Vec<usize> = (0..r).filter(|&j| j != i && kept[j]).collect();
            let mut a = DMatrix::zeros(live.len() + 1, p);
            let mut b = DVector::zeros(live.len() + 1);
            for (slot, &j) in live.iter().enumerate() {
                a.row_mut(slot).copy_from(&self.a.row(j));
                b[slot] = self.b[j];
            }
            a.row_mut(live.len()).copy_from(&self.a.row(i));
            b[live.len()] = self.b[i] + 1.0;
            let res = solve_lp(&objective, &a, &b)?;
            let max_over_others = match res.status {
                LpStatus::Optimal => -res.objective,
                LpStatus::Unbounded => f64::INFINITY,
                LpStatus::Infeasible => {
                    // Cannot happen for a nonempty polyhedron; keep the row.
                    kept[i] = true;
                    continue;
                }
            };
            if max_over_others <= self.b[i] + tol.redundancy {
                kept[i] = false;
            }
        }
        let live: Vec<usize> = (0..r).filter(|&j| kept[j]).collect();
        let mut a = DMatrix::zeros(live.len(), p);
        let mut b = DVector::zeros(live.len());
        for (slot, &j) in live.iter().enumerate() {
            a.row_mut(slot).copy_from(&self.a.row(j));
            b[slot] = self.b[j];
        }
        Polyhedron::new(a, b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Outcome of a linear program `min c'theta : A theta <= b`.
///
/// `point` is meaningful only for `Optimal`; the objective is `+inf` for
/// infeasible and `-inf` for unbounded problems.
#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    pub objective: f64,
    pub point: DVector<f64>,
}

/// Minimize `c'theta` over `{A theta <= b}` with free variables.
///
/// Dense two-phase simplex, Bland's rule throughout, deterministic. The
/// pivot budget `10 (rows + dim)^2` guards against numerical stalling.
pub fn solve_lp(cost: &DVector<f64>, a: &DMatrix<f64>, b: &DVector<f64>) -> Result<LpResult> {
    let r = a.nrows();
    let p = a.ncols();
    if cost.len() != p || b.len() != r {
        return Err(Error::Dimension("LP shapes do not line up".into()));
    }
    if !crate::linalg::all_finite(a)
        || b.iter().any(|v| !v.is_finite())
        || cost.iter().any(|v| !v.is_finite())
    {
        return Err(Error::NonFinite("linear program"));
    }

    let pivot_budget = 10 * (r + p) * (r + p);
    let cost_scale = cost.amax().max(1.0);

    // Columns: theta+ (p) | theta- (p) | slack (r) | artificial (as needed).
    let n_real = 2 * p + r;
    let mut needs_artificial: Vec<bool> = vec![false; r];
    for i in 0..r {
        if b[i] < 0.0 {
            needs_artificial[i] = true;
        }
    }
    let n_art = needs_artificial.iter().filter(|&&x| x).count();
    let n_cols = n_real + n_art;

    // Tableau rows 0..r hold constraints, row r holds reduced costs; the
    // last column is the right-hand side.
    let mut t = DMatrix::zeros(r + 1, n_cols + 1);
    let mut basis: Vec<usize> = vec![0; r];
    let mut art_slot = 0;
    for i in 0..r {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..p {
            t[(i, j)] = sign * a[(i, j)];
            t[(i, p + j)] = -sign * a[(i, j)];
        }
        t[(i, 2 * p + i)] = sign;
        t[(i, n_cols)] = sign * b[i];
        if needs_artificial[i] {
            let col = n_real + art_slot;
            t[(i, col)] = 1.0;
            basis[i] = col;
            art_slot += 1;
        } else {
            basis[i] = 2 * p + i;
        }
    }

    let mut pivots_left = pivot_budget.max(100);

    if n_art > 0 {
        // Phase 1: minimize the sum of artificials.
        for j in n_real..n_cols {
            t[(r, j)] = 1.0;
        }
        for i in 0..r {
            if basis[i] >= n_real {
                let row = t.row(i).into_owned();
                let mut obj = t.row_mut(r);
                obj -= row;
            }
        }
        // The phase-1 objective is bounded below by zero, so an "unbounded"
        // outcome can only be a numerical stall at the optimum; either way
        // the objective threshold below decides feasibility.
        let _ = run_simplex(&mut t, &mut basis, &[], &mut pivots_left, pivot_budget)?;
        let phase1 = -t[(r, n_cols)];
        if phase1 > 1e-8 * b.amax().max(1.0) {
            return Ok(LpResult {
                status: LpStatus::Infeasible,
                objective: f64::INFINITY,
                point: DVector::zeros(p),
            });
        }
        // Pivot leftover artificials out of the basis where possible.
        for i in 0..r {
            if basis[i] >= n_real {
                if let Some(col) = (0..n_real).find(|&j| t[(i, j)].abs() > EPS_PIVOT) {
                    pivot(&mut t, &mut basis, i, col);
                }
            }
        }
    }

    // Phase 2: rebuild the reduced-cost row for the real objective.
    let mut c2 = vec![0.0; n_cols];
    for j in 0..p {
        c2[j] = cost[j] / cost_scale;
        c2[p + j] = -cost[j] / cost_scale;
    }
    for j in 0..=n_cols {
        t[(r, j)] = 0.0;
    }
    for (j, &cj) in c2.iter().enumerate() {
        t[(r, j)] = cj;
    }
    for i in 0..r {
        let cb = c2[basis[i]];
        if cb != 0.0 {
            let row = t.row(i).into_owned();
            let mut obj = t.row_mut(r);
            obj -= row * cb;
        }
    }
    let blocked: Vec<usize> = (n_real..n_cols).collect();
    let outcome = run_simplex(&mut t, &mut basis, &blocked, &mut pivots_left, pivot_budget)?;

    match outcome {
        SimplexOutcome::Unbounded => Ok(LpResult {
            status: LpStatus::Unbounded,
            objective: f64::NEG_INFINITY,
            point: DVector::zeros(p),
        }),
        SimplexOutcome::Optimal => {
            let mut point = DVector::zeros(p);
            for i in 0..r {
                let j = basis[i];
                if j < p {
                    point[j] += t[(i, n_cols)];
                } else if j < 2 * p {
                    point[j - p] -= t[(i, n_cols)];
                }
            }
            let objective = cost.dot(&point);
            debug_assert!(
                {
                    let scale = 1.0 + b.amax() + point.amax();
                    (0..r).all(|i| a.row(i).transpose().dot(&point) <= b[i] + 1e-8 * scale)
                },
                "simplex returned an infeasible optimum"
            );
            debug_assert!(
                (0..n_real).all(|j| t[(r, j)] >= -1e-7),
                "simplex returned with negative reduced costs"
            );
            Ok(LpResult {
                status: LpStatus::Optimal,
                objective,
                point,
            })
        }
    }
}

enum SimplexOutcome {
    Optimal,
    Unbounded,
}

fn run_simplex(
    t: &mut DMatrix<f64>,
    basis: &mut [usize],
    blocked: &[usize],
    pivots_left: &mut usize,
    budget: usize,
) -> Result<SimplexOutcome> {
    let r = t.nrows() - 1;
    let n_cols = t.ncols() - 1;
    loop {
        // Bland: first column with a negative reduced cost enters.
        let entering = (0..n_cols).find(|j| !blocked.contains(j) && t[(r, *j)] < -EPS_COST);
        let Some(col) = entering else {
            return Ok(SimplexOutcome::Optimal);
        };
        // Ratio test; ties resolved by the smallest basic variable index.
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..r {
            let denom = t[(i, col)];
            if denom > EPS_PIVOT {
                let ratio = t[(i, n_cols)] / denom;
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((best_row, best)) => {
                        if ratio < best - EPS_PIVOT
                            || (ratio <= best + EPS_PIVOT && basis[i] < basis[best_row])
                        {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((row, _)) = leave else {
            return Ok(SimplexOutcome::Unbounded);
        };
        if *pivots_left == 0 {
            return Err(Error::LpPivotLimit(budget));
        }
        *pivots_left -= 1;
        pivot(t, basis, row, col);
    }
}

fn pivot(t: &mut DMatrix<f64>, basis: &mut [usize], row: usize, col: usize) {
    let denom = t[(row, col)];
    {
        let mut pr = t.row_mut(row);
        pr /= denom;
    }
    let pivot_row = t.row(row).into_owned();
    for i in 0..t.nrows() {
        if i != row {
            let factor = t[(i, col)];
            if factor != 0.0 {
                let mut target = t.row_mut(i);
                target -= &pivot_row * factor;
            }
        }
    }
    basis[row] = col;
}

/// Can the union of two nonempty polyhedra be replaced by one polyhedron?
///
/// Implements the envelope test: a facet of one region that cuts into the
/// other is flagged; the union is convex exactly when each side flags a
/// single facet, the two flagged facets are the same hyperplane seen from
/// opposite sides, and the envelope of the remaining facets contains no
/// point beyond the union (verified by one more emptiness LP).
pub fn union_is_convex(p1: &Polyhedron, p2: &Polyhedron, tol: &Tolerances) -> Result<bool> {
    Ok(try_merge(p1, p2, tol)?.is_some())
}

/// Merge two polyhedra whose union is convex; `None` when it is not.
pub fn try_merge(
    p1: &Polyhedron,
    p2: &Polyhedron,
    tol: &Tolerances,
) -> Result<Option<Polyhedron>> {
    if p1.dim() != p2.dim() {
        return Err(Error::Dimension("regions live in different spaces".into()));
    }
    let flags1 = cutting_rows(p1, p2)?;
    let flags2 = cutting_rows(p2, p1)?;
    if flags1.is_empty() {
        // Every facet of p1 is valid for p2, so p2 lies inside p1.
        return Ok(Some(p1.clone()));
    }
    if flags2.is_empty() {
        return Ok(Some(p2.clone()));
    }
    if flags1.len() != 1 || flags2.len() != 1 {
        return Ok(None);
    }
    let (i1, i2) = (flags1[0], flags2[0]);
    // The flagged facets must be one shared hyperplane with opposite senses.
    let opposite_norm = (p1.a().row(i1).transpose() + p2.a().row(i2).transpose()).amax();
    let opposite_bound = (p1.b()[i1] + p2.b()[i2]).abs();
    if opposite_norm > 1e-7 || opposite_bound > 1e-7 {
        return Ok(None);
    }

    let dim = p1.dim();
    let mut rows: Vec<(DVector<f64>, f64)> = Vec::new();
    let mut push_unique = |row: DVector<f64>, bound: f64| {
        let duplicate = rows
            .iter()
            .any(|(a, b)| (a - &row).amax() <= 1e-9 && (b - bound).abs() <= 1e-9);
        if !duplicate {
            rows.push((row, bound));
        }
    };
    for i in 0..p1.rows() {
        if i != i1 {
            push_unique(p1.a().row(i).transpose(), p1.b()[i]);
        }
    }
    for i in 0..p2.rows() {
        if i != i2 {
            push_unique(p2.a().row(i).transpose(), p2.b()[i]);
        }
    }

    // Belt check: no envelope point may violate both flagged facets.
    let mut check_a = DMatrix::zeros(rows.len() + 2, dim);
    let mut check_b = DVector::zeros(rows.len() + 2);
    for (slot, (row, bound)) in rows.iter().enumerate() {
        check_a.row_mut(slot).copy_from(&row.transpose());
        check_b[slot] = *bound;
    }
    check_a
        .row_mut(rows.len())
        .copy_from(&(-p1.a().row(i1).into_owned()));
    check_b[rows.len()] = -p1.b()[i1] - tol.empty_radius;
    check_a
        .row_mut(rows.len() + 1)
        .copy_from(&(-p2.a().row(i2).into_owned()));
    check_b[rows.len() + 1] = -p2.b()[i2] - tol.empty_radius;
    let beyond = Polyhedron::new(check_a, check_b)?;
    if !beyond.is_empty(tol)? {
        return Ok(None);
    }

    let mut env_a = DMatrix::zeros(rows.len(), dim);
    let mut env_b = DVector::zeros(rows.len());
    for (slot, (row, bound)) in rows.iter().enumerate() {
        env_a.row_mut(slot).copy_from(&row.transpose());
        env_b[slot] = *bound;
    }
    let envelope = Polyhedron::new(env_a, env_b)?;
    Ok(Some(envelope.remove_redundancy(tol)?))
}

/// Rows of `of` whose halfspace cuts into `other`.
fn cutting_rows(of: &Polyhedron, other: &Polyhedron) -> Result<Vec<usize>> {
    let mut flagged = Vec::new();
    for i in 0..of.rows() {
        let objective = -of.a().row(i).transpose();
        let res = solve_lp(&objective, other.a(), other.b())?;
        let max_val = match res.status {
            LpStatus::Optimal => -res.objective,
            LpStatus::Unbounded => f64::INFINITY,
            LpStatus::Infeasible => {
                return Err(Error::Numerics("cut test ran on an empty polyhedron"))
            }
        };
        if max_val > of.b()[i] + 1e-9 {
            flagged.push(i);
        }
    }
    Ok(flagged)
}

/// A polyhedron paired with the affine law it carries.
#[derive(Debug, Clone, PartialEq)]
pub struct LawRegion {
    pub polyhedron: Polyhedron,
    pub gain: DMatrix<f64>,
    pub offset: DVector<f64>,
}

/// Greedy pairwise merging of regions that carry the same affine law.
///
/// Deterministic given the input order; iterates to a fixpoint and never
/// increases the region count. Returns the reduced list, the index of the
/// surviving representative of each output region, and the merge count.
pub fn merge_partition_traced(
    items: Vec<LawRegion>,
    tol: &Tolerances,
) -> Result<(Vec<LawRegion>, Vec<usize>, usize)> {
    let mut regions = items;
    let mut reps: Vec<usize> = (0..regions.len()).collect();
    let mut merges = 0;
    'again: loop {
        for i in 0..regions.len() {
            for j in (i + 1)..regions.len() {
                if !laws_equal(&regions[i], &regions[j], tol.law_equality) {
                    continue;
                }
                if !share_hyperplane(&regions[i].polyhedron, &regions[j].polyhedron) {
                    continue;
                }
                if let Some(merged) =
                    try_merge(&regions[i].polyhedron, &regions[j].polyhedron, tol)?
                {
                    regions[i].polyhedron = merged;
                    regions.remove(j);
                    reps.remove(j);
                    merges += 1;
                    continue 'again;
                }
            }
        }
        break;
    }
    Ok((regions, reps, merges))
}

/// [`merge_partition_traced`] without the provenance bookkeeping.
pub fn merge_partition(items: Vec<LawRegion>, tol: &Tolerances) -> Result<(Vec<LawRegion>, usize)> {
    let (regions, _, merges) = merge_partition_traced(items, tol)?;
    Ok((regions, merges))
}

fn laws_equal(a: &LawRegion, b: &LawRegion, tol: f64) -> bool {
    a.gain.shape() == b.gain.shape()
        && (&a.gain - &b.gain).amax() <= tol
        && (&a.offset - &b.offset).amax() <= tol
}

/// Cheap adjacency prefilter: merging needs one hyperplane present in both
/// regions with opposite orientation.
fn share_hyperplane(p1: &Polyhedron, p2: &Polyhedron) -> bool {
    for i in 0..p1.rows() {
        let row = p1.a().row(i);
        let bound = p1.b()[i];
        for j in 0..p2.rows() {
            if (row.transpose() + p2.a().row(j).transpose()).amax() <= 1e-6
                && (bound + p2.b()[j]).abs() <= 1e-6
            {
                return true;
            }
        }
    }
    false
}
