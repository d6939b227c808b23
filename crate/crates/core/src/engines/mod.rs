//! Constructive transversal search: Stiefel-manifold descent, the test map
//! and its Carathéodory step, an alternating-fit baseline, verification, and
//! re-exports of the exact small-case oracles.

pub mod altfit;
pub mod stiefel;
pub mod test_map;
pub mod verify;

pub use crate::exact::{hyperplane_transversal_2d_exact, point_family_transversal_exact};
pub use altfit::{affine_pca, alternating_flat_fit};
pub use stiefel::{
    find_transversal_stiefel, objective_at_matrix, orthogonal_frame_of_flat, random_frame, recovery_constant,
    stiefel_euclidean_gradient, stiefel_gradient, stiefel_objective, StiefelState,
};
pub use test_map::{
    extract_caratheodory_subfamily, find_test_map_zero, singleton_test_map_zero, test_map, test_map_norm,
    CaratheodoryExtraction,
};
pub use verify::{translate_to_transversal, verify_transversal, TransversalCheck, TRANSLATE_TOL};

use crate::geometry::{AffineFlat, Frame};

/// Engine configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineOpts {
    pub restarts: usize,
    pub max_iters: usize,
    /// Objective threshold for declaring convergence.
    pub tol: f64,
    pub seed: u64,
}

impl EngineOpts {
    pub fn new(seed: u64) -> Self {
        EngineOpts { restarts: 16, max_iters: 2000, tol: 1e-14, seed }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartLog {
    pub restart: usize,
    pub value: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EngineOutcome {
    /// A flat re-verified against every set; `residual` is the largest
    /// set-to-flat distance.
    Found { flat: AffineFlat, residual: f64, restart: usize },
    /// Inconclusive: no restart converged to a verified transversal.
    NotFound { best_value: f64, frame: Option<Frame>, restart_log: Vec<RestartLog> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineReport {
    pub outcome: EngineOutcome,
    /// Iterations summed over the restarts that ran.
    pub iterations: usize,
    pub seed: u64,
}

impl EngineReport {
    pub fn is_found(&self) -> bool {
        matches!(self.outcome, EngineOutcome::Found { .. })
    }

    pub fn flat(&self) -> Option<&AffineFlat> {
        match &self.outcome {
            EngineOutcome::Found { flat, .. } => Some(flat),
            EngineOutcome::NotFound { .. } => None,
        }
    }
}
