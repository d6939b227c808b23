//! Transversal verification with per-set certificates.

use crate::error::Result;
use crate::geometry::{AffineFlat, Frame, Polytope, ScalarField, Vector};
use crate::linalg::C64;
use crate::solvers::{lp_feasible_point, stab_certificate, LpProblem, StabCertificate};

/// Residual accepted for flats produced by [`translate_to_transversal`].
pub const TRANSLATE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct TransversalCheck {
    pub passes: bool,
    /// Largest set-to-flat distance.
    pub residual: f64,
    /// One certificate per set, in family order.
    pub certificates: Vec<StabCertificate>,
}

/// Whether every set comes within `tol` of the flat.
pub fn verify_transversal(flat: &AffineFlat, family: &[Polytope], tol: f64) -> Result<TransversalCheck> {
    let certificates = family.iter().map(|p| stab_certificate(flat, p)).collect::<Result<Vec<_>>>()?;
    let residual = certificates.iter().map(|c| c.distance).fold(0.0, f64::max);
    Ok(TransversalCheck { passes: residual <= tol, residual, certificates })
}

/// A translate of the direction space meeting every set, found by the LP
/// `x + D t_F = sum_j lambda_{F,j} v_{F,j}`, `lambda_F` convex, `x` and `t_F`
/// free. Returns the flat and its residual, or `None` when the float solve
/// finds no translate that verifies. `None` proves nothing.
pub fn translate_to_transversal(family: &[Polytope], directions: &Frame) -> Result<Option<(AffineFlat, f64)>> {
    let field = directions.field();
    let rdim = directions.ambient_dim() * field.real_dim();
    let units: &[C64] = match field {
        ScalarField::Real => &[C64::new(1.0, 0.0)],
        ScalarField::Complex => &[C64::new(1.0, 0.0), C64::new(0.0, 1.0)],
    };
    // realified columns of D acting on the real coordinates of t
    let dcols: Vec<Vec<f64>> =
        directions.vectors().iter().flat_map(|v| units.iter().map(move |u| v.scale(*u).coords().to_vec())).collect();
    let nt = dcols.len();
    let nvars = rdim + family.iter().map(|p| nt + p.len()).sum::<usize>();
    let mut nonneg = vec![false; nvars];
    let (mut a, mut b) = (Vec::new(), Vec::new());
    let mut off = rdim;
    for p in family {
        let lam = off + nt;
        nonneg[lam..lam + p.len()].iter_mut().for_each(|x| *x = true);
        let mut row = vec![0.0; nvars];
        row[lam..lam + p.len()].iter_mut().for_each(|x| *x = 1.0);
        a.push(row);
        b.push(1.0);
        for c in 0..rdim {
            let mut row = vec![0.0; nvars];
            row[c] = 1.0;
            for (i, col) in dcols.iter().enumerate() {
                row[off + i] = col[c];
            }
            for (j, v) in p.vertices().iter().enumerate() {
                row[lam + j] = -v.coords()[c];
            }
            a.push(row);
            b.push(0.0);
        }
        off = lam + p.len();
    }
    let Some(point) = lp_feasible_point(&LpProblem::new(a, b, nonneg)?)? else {
        return Ok(None);
    };
    let flat = AffineFlat::new(Vector::new(field, point[..rdim].to_vec())?, directions.clone())?;
    let check = verify_transversal(&flat, family, TRANSLATE_TOL)?;
    Ok(check.passes.then_some((flat, check.residual)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn translated_flat_fails() {
        let fr = Frame::new(ScalarField::Real, 2, vec![Vector::real(vec![1.0, 0.0])]).unwrap();
        let flat = AffineFlat::new(Vector::real(vec![0.0, 0.0]), fr).unwrap();
        let family = vec![Polytope::singleton(Vector::real(vec![3.0, 0.0]))];
        assert!(verify_transversal(&flat, &family, 1e-9).unwrap().passes);
        let moved = flat.translated(&Vector::real(vec![0.0, 1e-8]));
        assert!(!verify_transversal(&moved, &family, 1e-9).unwrap().passes);
    }

    #[test]
    fn horizontal_translate_through_vertical_segments() {
        let fr = Frame::new(ScalarField::Real, 2, vec![Vector::real(vec![1.0, 0.0])]).unwrap();
        let family = vec![
            Polytope::real(&[&[0.0, -1.0], &[0.0, 1.0]]).unwrap(),
            Polytope::real(&[&[1.0, 0.0], &[1.0, 2.0]]).unwrap(),
            Polytope::real(&[&[3.0, 0.5], &[3.0, 3.0]]).unwrap(),
        ];
        let (flat, _) = translate_to_transversal(&family, &fr).unwrap().expect("heights 0.5..1 work");
        let y = flat.basepoint().coords()[1];
        assert!((0.5 - 1e-9..=1.0 + 1e-9).contains(&y));
        let raised = vec![family[0].clone(), Polytope::real(&[&[1.0, 1.5], &[1.0, 2.0]]).unwrap()];
        assert!(translate_to_transversal(&raised, &fr).unwrap().is_none());
    }
}
