//! Point assignments read off a transversal flat.

use crate::error::{Error, Result};
use crate::geometry::{AffineFlat, Polytope};
use crate::solvers::stab_certificate;

use super::assignment::PointAssignment;
use super::realization::AffineRealization;

/// Stabbing tolerance for witness points.
pub const WITNESS_TOL: f64 = 1e-8;

/// Points `q_F in F` on a transversal flat, with `phi(F) = psi(q_F)` for the
/// flat's coordinate map `psi`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransversalWitness {
    pub flat: AffineFlat,
    pub points: Vec<crate::geometry::Vector>,
    /// Convex weights of each `q_F` over the vertices of its set.
    pub weights: Vec<Vec<f64>>,
    pub assignment: PointAssignment,
}

impl TransversalWitness {
    /// Re-checks membership in the sets and on the flat, and the coordinates.
    pub fn validate(&self, family: &[Polytope]) -> bool {
        if self.points.len() != family.len() || self.weights.len() != family.len() {
            return false;
        }
        family.iter().enumerate().all(|(f, p)| {
            let w = &self.weights[f];
            let convex =
                w.len() == p.len() && w.iter().all(|&x| x >= -1e-12) && (w.iter().sum::<f64>() - 1.0).abs() < 1e-9;
            let q = &self.points[f];
            convex
                && p.combination(w).distance(q) < 1e-9
                && self.flat.distance_to(q) <= WITNESS_TOL
                && self.flat.coordinates(q).distance(self.assignment.image(f)) < 1e-9
        })
    }

    /// The witness as an affine realization on the whole family: `A` is the
    /// direction frame and `c` the basepoint.
    pub fn as_realization(&self) -> AffineRealization {
        AffineRealization {
            subfamily: (0..self.points.len()).collect(),
            matrix: self.flat.directions().vectors().to_vec(),
            offset: self.flat.basepoint().clone(),
            points: self.points.clone(),
            weights: self.weights.clone(),
        }
    }
}

/// Picks `q_F` as the point of `F` nearest to the flat and sets
/// `phi(F) = psi(q_F)`.
pub fn witness_from_transversal(family: &[Polytope], flat: &AffineFlat) -> Result<TransversalWitness> {
    let mut points = Vec::with_capacity(family.len());
    let mut weights = Vec::with_capacity(family.len());
    let mut coords = Vec::with_capacity(family.len());
    for (f, p) in family.iter().enumerate() {
        let cert = stab_certificate(flat, p)?;
        if cert.distance > WITNESS_TOL {
            return Err(Error::NotATransversal(f));
        }
        coords.push(flat.coordinates(&cert.point));
        points.push(cert.point);
        weights.push(cert.coefficients);
    }
    let assignment = PointAssignment::injective(flat.field(), flat.dim(), coords)?;
    Ok(TransversalWitness { flat: flat.clone(), points, weights, assignment })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Frame, ScalarField, Vector};

    #[test]
    fn common_point_gives_origin_assignment() {
        let x = Vector::real(vec![0.25, 0.25]);
        let family = vec![
            Polytope::real(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]).unwrap(),
            Polytope::real(&[&[0.25, 0.25], &[2.0, 2.0]]).unwrap(),
        ];
        let w = witness_from_transversal(&family, &AffineFlat::point(x.clone())).unwrap();
        assert!(w.validate(&family));
        assert_eq!(w.assignment.k(), 0);
        for q in &w.points {
            assert!(q.distance(&x) < 1e-9);
        }
    }

    #[test]
    fn missed_set_is_reported() {
        let fr = Frame::new(ScalarField::Real, 2, vec![Vector::real(vec![1.0, 0.0])]).unwrap();
        let flat = AffineFlat::new(Vector::real(vec![0.0, 0.0]), fr).unwrap();
        let family = vec![
            Polytope::real(&[&[0.0, -1.0], &[0.0, 1.0]]).unwrap(),
            Polytope::singleton(Vector::real(vec![3.0, 0.5])),
        ];
        assert_eq!(witness_from_transversal(&family, &flat), Err(Error::NotATransversal(1)));
    }
}
