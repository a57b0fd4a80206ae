//! Central numeric tolerances.
//!
//! Every threshold used by the pipeline lives here so that a controller
//! bundle records exactly the numbers it was built with.


#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative singular-value cutoff for the numerical rank of data
    /// matrices (threshold `max(rows, cols) * sigma_max * data_rank_rel`).
    pub data_rank_rel: f64,
    /// Relative singular-value cutoff when testing active-constraint rows
    /// for linear independence.
    pub active_rank_rel: f64,
    /// Chebyshev radius below which a region counts as empty or
    /// lower-dimensional and is discarded.
    pub empty_radius: f64,
    /// Slack when deciding that a halfspace is implied by the others.
    pub redundancy: f64,
    /// Max entrywise gap under which two affine laws count as identical
    /// when merging regions.
    pub law_equality: f64,
    /// Slack used by the online point-location scan.
    pub location_slack: f64,
    /// KKT residual bound accepted by the reference active-set search.
    pub kkt_residual: f64,
    /// Eigenvalue floor for positive-semidefiniteness of cost weights.
    pub psd_floor: f64,
    /// Eigenvalue floor for positive-definiteness of `R`.
    pub pd_floor: f64,
    /// Symmetry and eigenvalue floor for noise covariances.
    pub covariance_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            data_rank_rel: 1e-12,
            active_rank_rel: 1e-9,
            empty_radius: 1e-9,
            redundancy: 1e-9,
            law_equality: 1e-8,
            location_slack: 1e-9,
            kkt_residual: 1e-9,
            psd_floor: 1e-10,
            pd_floor: 1e-10,
            covariance_floor: 1e-12,
        }
    }
}
