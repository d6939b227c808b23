//! Certified convex feasibility kernels.

pub mod caratheodory;
pub mod dependency;
pub mod lp;
pub mod min_norm;
pub mod simplex;

pub use caratheodory::{caratheodory_reduce, CaratheodoryReduction};
pub use dependency::{
    build_dependency_lp, scaled_dependency_feasible, witness_residual, DependencyLp, DependencyTuple, ScaledWitness,
};
pub use lp::{
    lp_feasible, lp_feasible_exact, lp_feasible_point, lp_minimize, FeasibilityOutcome, LpProblem, CERT_TOL, FEAS_TOL,
};
pub use min_norm::{min_norm_point, MinNormResult};

use crate::error::{Error, Result};
use crate::geometry::{AffineFlat, Polytope, Vector};

/// Default distance tolerance for flat stabbing.
pub const STAB_TOL: f64 = 1e-6;

fn check_common_space(ps: &[Polytope]) -> Result<()> {
    let Some(first) = ps.first() else {
        return Err(Error::InvalidInput("empty family".into()));
    };
    for p in ps {
        if p.field() != first.field() {
            return Err(Error::FieldMismatch("family over mixed fields".into()));
        }
        if p.ambient_dim() != first.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: first.ambient_dim(), found: p.ambient_dim() });
        }
    }
    Ok(())
}

/// The LP behind [`polytopes_intersect`]: convex weights per polytope, with
/// every reconstruction equal to the first one.
pub fn intersection_lp(ps: &[Polytope]) -> Result<LpProblem> {
    check_common_space(ps)?;
    let rdim = ps[0].ambient_dim() * ps[0].field().real_dim();
    let offsets: Vec<usize> = ps
        .iter()
        .scan(0, |acc, p| {
            let o = *acc;
            *acc += p.len();
            Some(o)
        })
        .collect();
    let nvars: usize = ps.iter().map(|p| p.len()).sum();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (pi, p) in ps.iter().enumerate() {
        let mut row = vec![0.0; nvars];
        for j in 0..p.len() {
            row[offsets[pi] + j] = 1.0;
        }
        a.push(row);
        b.push(1.0);
    }
    for pi in 1..ps.len() {
        for c in 0..rdim {
            let mut row = vec![0.0; nvars];
            for (j, v) in ps[0].vertices().iter().enumerate() {
                row[j] = v.coords()[c];
            }
            for (j, v) in ps[pi].vertices().iter().enumerate() {
                row[offsets[pi] + j] -= v.coords()[c];
            }
            a.push(row);
            b.push(0.0);
        }
    }
    LpProblem::new(a, b, vec![true; nvars])
}

/// Common point of the polytopes, or a Farkas certificate for
/// [`intersection_lp`] proving the intersection empty.
pub fn polytopes_intersect(ps: &[Polytope]) -> Result<FeasibilityOutcome> {
    let lp = intersection_lp(ps)?;
    Ok(match lp_feasible(&lp)? {
        FeasibilityOutcome::Feasible { point } => {
            let w = &point[..ps[0].len()];
            FeasibilityOutcome::Feasible { point: ps[0].combination(w).coords().to_vec() }
        }
        infeasible => infeasible,
    })
}

/// Evidence that a polytope comes within `distance` of a flat.
#[derive(Debug, Clone, PartialEq)]
pub struct StabCertificate {
    pub distance: f64,
    /// Convex weights of `point` over the polytope's vertices.
    pub coefficients: Vec<f64>,
    pub point: Vector,
}

/// Nearest point of the polytope to the flat: the min-norm point of the
/// vertices' components orthogonal to the flat directions.
pub fn stab_certificate(fl: &AffineFlat, p: &Polytope) -> Result<StabCertificate> {
    if fl.field() != p.field() {
        return Err(Error::FieldMismatch("flat and polytope fields differ".into()));
    }
    if fl.ambient_dim() != p.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: fl.ambient_dim(), found: p.ambient_dim() });
    }
    let residuals: Vec<Vector> = p.vertices().iter().map(|v| v.sub(&fl.nearest_point(v))).collect();
    let mn = min_norm_point(&residuals)?;
    let point = p.combination(&mn.coefficients);
    let distance = fl.distance_to(&point);
    Ok(StabCertificate { distance, coefficients: mn.coefficients, point })
}

/// Whether some point of `p` lies within `tol` of the flat.
pub fn flat_stabs(fl: &AffineFlat, p: &Polytope, tol: f64) -> bool {
    stab_certificate(fl, p).map(|c| c.distance <= tol).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Frame, ScalarField};

    #[test]
    fn same_singleton_twice() {
        let p = Polytope::singleton(Vector::real(vec![0.25, -3.0]));
        let out = polytopes_intersect(&[p.clone(), p]).unwrap();
        assert_eq!(out.point().unwrap(), &[0.25, -3.0]);
    }

    #[test]
    fn distinct_singletons_do_not_meet() {
        let a = Polytope::singleton(Vector::real(vec![0.0]));
        let b = Polytope::singleton(Vector::real(vec![1.0]));
        let lp = intersection_lp(&[a.clone(), b.clone()]).unwrap();
        let out = polytopes_intersect(&[a, b]).unwrap();
        assert!(lp.validate_farkas(out.farkas().unwrap()));
    }

    #[test]
    fn three_squares_pairwise_meeting_without_common_point() {
        let sq =
            |x0: f64, y0: f64, x1: f64, y1: f64| Polytope::real(&[&[x0, y0], &[x1, y0], &[x1, y1], &[x0, y1]]).unwrap();
        let a = sq(0.0, 0.0, 2.0, 1.0);
        let b = sq(0.0, 0.0, 1.0, 3.0);
        // C = {2.2 <= x + y <= 3, x >= 0.5, y >= 0.5}
        let c = Polytope::real(&[&[1.7, 0.5], &[2.5, 0.5], &[0.5, 2.5], &[0.5, 1.7]]).unwrap();
        // A∩B = [0,1]^2 has x + y <= 2 < 2.2; (1.8, 0.75) ∈ A∩C; (0.75, 1.8) ∈ B∩C.
        assert!(polytopes_intersect(&[a.clone(), b.clone()]).unwrap().is_feasible());
        assert!(polytopes_intersect(&[a.clone(), c.clone()]).unwrap().is_feasible());
        assert!(polytopes_intersect(&[b.clone(), c.clone()]).unwrap().is_feasible());
        assert!(!polytopes_intersect(&[a, b, c]).unwrap().is_feasible());
    }

    #[test]
    fn stabbing_examples() {
        let fr = Frame::new(ScalarField::Real, 2, vec![Vector::real(vec![1.0, 0.0])]).unwrap();
        let flat = AffineFlat::new(Vector::real(vec![0.0, 0.0]), fr).unwrap();
        let tri = Polytope::real(&[&[3.0, 0.0], &[4.0, 1.0], &[5.0, 2.0]]).unwrap();
        assert!(flat_stabs(&flat, &tri, 1e-12));
        let far = Polytope::singleton(Vector::real(vec![0.0, 1.0]));
        assert!(!flat_stabs(&flat, &far, 1e-6));
        let cert = stab_certificate(&flat, &far).unwrap();
        assert!((cert.distance - 1.0).abs() < 1e-15);
    }
}
