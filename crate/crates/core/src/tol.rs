//! Default numerical thresholds shared by the solvers and checks.

/// Relation residual below which a representation counts as flat.
pub const FLAT_TOL: f64 = 1e-10;

/// Normalized singular-value cutoff for rank decisions.
pub const RANK_TOL: f64 = 1e-8;

/// Rank decisions are refused when a normalized singular value lies within
/// this factor of the cutoff on either side.
pub const RANK_BAND_FACTOR: f64 = 100.0;

/// Cocycle membership tolerance for pairing inputs.
pub const COCYCLE_TOL: f64 = 1e-8;

/// Relative agreement required between independent pairing routes.
pub const PAIRING_TOL: f64 = 1e-8;

/// Determinant deviation allowed for SL elements.
pub const DET_TOL: f64 = 1e-10;

/// Relative period drift allowed when the quadrature order is doubled.
pub const QUADRATURE_DRIFT_TOL: f64 = 1e-8;

/// Relative residual allowed in the first Riemann bilinear relation.
pub const RIEMANN_RELATION_TOL: f64 = 1e-6;

/// Default Gauss-Newton iteration cap.
pub const MAX_ITER: usize = 100;

/// Rank decision policy: a cutoff plus an indeterminate band around it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankPolicy {
    pub tol: f64,
    pub band_low: f64,
    pub band_high: f64,
}

impl RankPolicy {
    pub fn new(tol: f64) -> Self {
        Self { tol, band_low: tol / RANK_BAND_FACTOR, band_high: tol * RANK_BAND_FACTOR }
    }
}

impl Default for RankPolicy {
    fn default() -> Self {
        Self::new(RANK_TOL)
    }
}
