//! Experiment data: datasets, block-Hankel matrices, excitation checks,
//! noise injection and the multi-run averaging that suppresses measurement
//! noise before the controller is designed.
//!
//! A dataset holds one input sequence `u(0..T)` and the synchronized state
//! measurements `y(0..T)`; the state is fully measured, so `y` equals the
//! true state plus (possibly zero) noise. All values are immutable after
//! construction and all operations are pure.

use alloc::format;

#[allow(unused_imports)]
use nalgebra::ComplexField; // sqrt on f64 under no_std
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg;
use crate::tol::Tolerances;

/// One experiment: inputs `u(0..T)` (m x (T+1)) and measured states
/// `y(0..T)` (n x (T+1)), column `t` holding the sample at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    inputs: DMatrix<f64>,
    states: DMatrix<f64>,
}

impl Dataset {
    pub fn new(inputs: DMatrix<f64>, states: DMatrix<f64>) -> Result<Self> {
        if inputs.ncols() != states.ncols() {
            return Err(Error::Dimension(format!(
                "inputs have {} samples, states have {}",
                inputs.ncols(),
                states.ncols()
            )));
        }
        if inputs.nrows() == 0 || states.nrows() == 0 {
            return Err(Error::Dimension("need m >= 1 and n >= 1".into()));
        }
        if inputs.ncols() < 2 {
            return Err(Error::Dimension("need T >= 1, i.e. at least two samples".into()));
        }
        if !linalg::all_finite(&inputs) || !linalg::all_finite(&states) {
            return Err(Error::NonFinite("dataset"));
        }
        Ok(Self { inputs, states })
    }

    pub fn input_dim(&self) -> usize {
        self.inputs.nrows()
    }

    pub fn state_dim(&self) -> usize {
        self.states.nrows()
    }

    /// Number of transitions T; the dataset holds T+1 samples.
    pub fn sample_count(&self) -> usize {
        self.inputs.ncols() - 1
    }

    pub fn inputs(&self) -> &DMatrix<f64> {
        &self.inputs
    }

    pub fn states(&self) -> &DMatrix<f64> {
        &self.states
    }

    /// Shift-split the dataset into the matrices used by the predictor.
    pub fn data_matrices(&self) -> DataMatrices {
        let t = self.sample_count();
        let input_block = self.inputs.columns(0, t).into_owned();
        let states_now = self.states.columns(0, t).into_owned();
        let states_next = self.states.columns(1, t).into_owned();
        let mut stacked = DMatrix::zeros(self.input_dim() + self.state_dim(), t);
        stacked.rows_mut(0, self.input_dim()).copy_from(&input_block);
        stacked
            .rows_mut(self.input_dim(), self.state_dim())
            .copy_from(&states_now);
        DataMatrices {
            input_block,
            states_now,
            states_next,
            stacked,
        }
    }
}

/// Zero-mean white measurement noise with a fixed covariance and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    covariance: DMatrix<f64>,
    seed: u64,
}

impl NoiseModel {
    pub fn new(covariance: DMatrix<f64>, seed: u64) -> Result<Self> {
        let tol = Tolerances::default();
        if !linalg::is_symmetric(&covariance, tol.covariance_floor) {
            return Err(Error::NotPsd("noise covariance"));
        }
        if linalg::min_symmetric_eigenvalue(&covariance) < -tol.covariance_floor {
            return Err(Error::NotPsd("noise covariance"));
        }
        Ok(Self { covariance, seed })
    }

    /// Isotropic noise with per-channel standard deviation `std`.
    pub fn isotropic(dim: usize, std: f64, seed: u64) -> Result<Self> {
        Self::new(DMatrix::identity(dim, dim) * std * std, seed)
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dim(&self) -> usize {
        self.covariance.nrows()
    }

    /// Square root of the covariance via symmetric eigendecomposition, so
    /// that singular covariances sample correctly.
    fn sqrt_factor(&self) -> DMatrix<f64> {
        let eig = self.covariance.clone().symmetric_eigen();
        let mut scaled = eig.eigenvectors.clone();
        for (j, lambda) in eig.eigenvalues.iter().enumerate() {
            let s = lambda.max(0.0).sqrt();
            scaled.column_mut(j).scale_mut(s);
        }
        scaled
    }
}

/// Shifted data matrices: the first-block-row input Hankel matrix, the
/// state samples `x(0..T-1)` and `x(1..T)`, and the stacked input/state
/// matrix whose rank certifies that the data describe the system.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrices {
    input_block: DMatrix<f64>,
    states_now: DMatrix<f64>,
    states_next: DMatrix<f64>,
    stacked: DMatrix<f64>,
}

impl DataMatrices {
    pub fn input_block(&self) -> &DMatrix<f64> {
        &self.input_block
    }

    pub fn states_now(&self) -> &DMatrix<f64> {
        &self.states_now
    }

    pub fn states_next(&self) -> &DMatrix<f64> {
        &self.states_next
    }

    pub fn stacked(&self) -> &DMatrix<f64> {
        &self.stacked
    }

    pub fn input_dim(&self) -> usize {
        self.input_block.nrows()
    }

    pub fn state_dim(&self) -> usize {
        self.states_now.nrows()
    }

    pub fn sample_count(&self) -> usize {
        self.input_block.ncols()
    }
}

/// Outcome of an excitation or rank check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcitationReport {
    /// Whether the checked matrix reached the required full rank.
    pub is_pe: bool,
    pub rank: usize,
    pub required_rank: usize,
    pub min_singular_value: f64,
}

/// Block-Hankel matrix of depth `depth`: block row `i`, column `j` holds
/// sequence column `i + j`. A `q x (T+1)` sequence yields a
/// `q*depth x (T - depth + 1)` matrix, so depth 1 returns the first `T`
/// columns unchanged.
pub fn hankel(seq: &DMatrix<f64>, depth: usize) -> Result<DMatrix<f64>> {
    let q = seq.nrows();
    let samples = seq.ncols().saturating_sub(1); // T
    if depth == 0 {
        return Err(Error::Dimension("depth must be >= 1".into()));
    }
    if depth > samples {
        return Err(Error::DepthTooLarge {
            depth,
            samples,
        });
    }
    let cols = samples - depth + 1;
    let mut out = DMatrix::zeros(q * depth, cols);
    for block in 0..depth {
        for j in 0..cols {
            out.view_mut((block * q, j), (q, 1))
                .copy_from(&seq.column(block + j));
        }
    }
    Ok(out)
}

/// Check persistency of excitation of the input of order `order`: the
/// depth-`order` input Hankel matrix must have full row rank.
pub fn check_persistency(ds: &Dataset, order: usize, tol: &Tolerances) -> Result<ExcitationReport> {
    let h = hankel(ds.inputs(), order)?;
    let (rank, min_sv) = linalg::numerical_rank(&h, tol.data_rank_rel);
    let required = ds.input_dim() * order;
    Ok(ExcitationReport {
        is_pe: rank == required,
        rank,
        required_rank: required,
        min_singular_value: min_sv,
    })
}

/// Check the rank condition on the stacked input/state matrix: with a long
/// enough record (`T >= (m+1)n + m`) the stacked matrix must have rank
/// `n + m` for the data to represent the system.
pub fn check_rank_condition(dm: &DataMatrices, tol: &Tolerances) -> Result<ExcitationReport> {
    let (m, n, t) = (dm.input_dim(), dm.state_dim(), dm.sample_count());
    let required_len = (m + 1) * n + m;
    if t < required_len {
        return Err(Error::DatasetTooShort {
            len: t,
            required: required_len,
        });
    }
    let (rank, min_sv) = linalg::numerical_rank(dm.stacked(), tol.data_rank_rel);
    Ok(ExcitationReport {
        is_pe: rank == n + m,
        rank,
        required_rank: n + m,
        min_singular_value: min_sv,
    })
}

/// Average repeated experiments that share the same input sequence.
///
/// The output keeps the shared inputs and replaces each state sample by its
/// arithmetic mean over the runs, which preserves persistency of excitation
/// by construction. Inputs must match exactly: averaging is meant for
/// repetitions of one experiment, not for merely similar ones.
pub fn average_datasets(runs: &[Dataset]) -> Result<Dataset> {
    let first = runs
        .first()
        .ok_or_else(|| Error::Dimension("averaging needs at least one run".into()))?;
    for run in &runs[1..] {
        if run.inputs() != first.inputs() {
            return Err(Error::MismatchedInputs);
        }
        if run.state_dim() != first.state_dim() {
            return Err(Error::Dimension("state dimension differs across runs".into()));
        }
    }
    let mut mean = DMatrix::zeros(first.state_dim(), first.states().ncols());
    for run in runs {
        mean += run.states();
    }
    mean /= runs.len() as f64;
    Dataset::new(first.inputs().clone(), mean)
}

/// Add one independent noise draw per time step to the measured states.
/// Deterministic for a fixed seed.
pub fn inject_noise(ds: &Dataset, noise: &NoiseModel) -> Result<Dataset> {
    if noise.dim() != ds.state_dim() {
        return Err(Error::Dimension(format!(
            "noise covariance is {}x{} but the state dimension is {}",
            noise.dim(),
            noise.dim(),
            ds.state_dim()
        )));
    }
    let factor = noise.sqrt_factor();
    let mut rng = ChaCha12Rng::seed_from_u64(noise.seed());
    let n = ds.state_dim();
    let mut states = ds.states().clone();
    for mut col in states.column_iter_mut() {
        let draw = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
        col += &factor * draw;
    }
    Dataset::new(ds.inputs().clone(), states)
}
