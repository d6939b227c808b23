//! The inner condition for one tuple of dependencies.

use crate::error::{Error, Result};
use crate::geometry::Polytope;
use crate::solvers::{
    build_dependency_lp, lp_feasible, witness_residual, DependencyTuple, FeasibilityOutcome, ScaledWitness,
};

use super::assignment::{dependency_residual, PointAssignment};

/// Relative tolerance for membership of a tuple in the dependency space.
pub const DEPENDENCY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum TupleCheck {
    /// `r_F`, `q_F` realizing the scaled dependencies.
    Satisfied(ScaledWitness),
    /// Farkas functional for the tuple's LP (see `build_dependency_lp`).
    Violated { farkas: Vec<f64> },
}

impl TupleCheck {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, TupleCheck::Satisfied(_))
    }
}

/// Scale used to make the dependency tolerance relative.
fn tuple_scale(tuple: &DependencyTuple, assignment: &PointAssignment) -> f64 {
    let pmax = tuple.subfamily.iter().map(|&f| assignment.image(f).norm()).fold(0.0, f64::max);
    tuple.norm().max(1e-300) * (1.0 + pmax)
}

/// Errors with `NotADependency` unless the tuple lies in the dependency space
/// of the assigned points.
pub fn ensure_dependency(tuple: &DependencyTuple, assignment: &PointAssignment) -> Result<()> {
    let res = dependency_residual(tuple, assignment);
    if res > DEPENDENCY_TOL * tuple_scale(tuple, assignment).max(1.0) {
        return Err(Error::NotADependency(res));
    }
    Ok(())
}

/// Decides whether some `r_F >= 0`, `q_F in F` realize the scaled tuple.
pub fn check_tuple(tuple: &DependencyTuple, family: &[Polytope], assignment: &PointAssignment) -> Result<TupleCheck> {
    ensure_dependency(tuple, assignment)?;
    let lp = build_dependency_lp(tuple, family)?;
    match lp_feasible(&lp.problem)? {
        FeasibilityOutcome::Feasible { point } => Ok(TupleCheck::Satisfied(lp.recover(tuple, family, &point))),
        FeasibilityOutcome::Infeasible { farkas } => Ok(TupleCheck::Violated { farkas }),
    }
}

/// Re-validates a check result: substitution for a witness, the Farkas
/// inequalities for a violation.
pub fn validate_tuple_check(tuple: &DependencyTuple, family: &[Polytope], check: &TupleCheck) -> Result<bool> {
    match check {
        TupleCheck::Satisfied(w) => {
            let support: f64 = tuple.support().iter().map(|&p| w.r[p]).sum();
            let inside = w
                .q_weights
                .iter()
                .all(|ws| ws.iter().all(|&x| x >= -1e-12) && (ws.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            Ok(inside && w.r.iter().all(|&r| r >= 0.0) && support > 1e-9 && witness_residual(tuple, w) < 1e-8)
        }
        TupleCheck::Violated { farkas } => {
            let lp = build_dependency_lp(tuple, family)?;
            Ok(lp.problem.validate_farkas(farkas))
        }
    }
}
