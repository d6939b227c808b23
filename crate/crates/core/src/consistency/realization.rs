//! Affine realizations: points `q_F in F` with `q_F = A phi(F) + c` for one
//! affine map `F^k -> F^d`.
//!
//! A realization on a subfamily satisfies every tuple of dependencies there
//! with `r_F` constant on the support, since `sum a_F q_F = A sum a_F phi(F)
//! + c sum a_F = 0`. Finding one is a single LP.

use crate::error::Result;
use crate::geometry::{Polytope, ScalarField, Vector};
use crate::linalg::C64;
use crate::solvers::{lp_feasible, FeasibilityOutcome, LpProblem};

use super::assignment::PointAssignment;

/// Distance tolerance between `q_F` and `A phi(F) + c`.
pub const REALIZATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct AffineRealization {
    pub subfamily: Vec<usize>,
    /// Columns of `A`, one per coordinate of `F^k`, each in `F^d`.
    pub matrix: Vec<Vector>,
    pub offset: Vector,
    /// `q_F` per subfamily position.
    pub points: Vec<Vector>,
    /// Convex weights of `q_F` over the vertices of its set.
    pub weights: Vec<Vec<f64>>,
}

impl AffineRealization {
    /// `A x + c`.
    pub fn apply(&self, x: &Vector) -> Vector {
        let mut acc = self.offset.clone();
        for (l, col) in self.matrix.iter().enumerate() {
            acc = acc.add(&col.scale(x.entry(l)));
        }
        acc
    }

    /// Independent re-check of the realization against the family.
    pub fn validate(&self, family: &[Polytope], assignment: &PointAssignment) -> bool {
        if self.points.len() != self.subfamily.len() || self.weights.len() != self.subfamily.len() {
            return false;
        }
        self.subfamily.iter().enumerate().all(|(pos, &f)| {
            let w = &self.weights[pos];
            let convex = w.len() == family[f].len()
                && w.iter().all(|&x| x >= -1e-12)
                && (w.iter().sum::<f64>() - 1.0).abs() < 1e-9;
            let inside = family[f].combination(w).distance(&self.points[pos]) < 1e-9;
            let mapped = self.apply(assignment.image(f)).distance(&self.points[pos]) <= REALIZATION_TOL;
            convex && inside && mapped
        })
    }
}

/// Searches for an affine realization on `subfamily`; `None` when the LP is
/// infeasible.
pub fn find_affine_realization(
    family: &[Polytope],
    assignment: &PointAssignment,
    subfamily: &[usize],
) -> Result<Option<AffineRealization>> {
    let Some(&first) = subfamily.first() else {
        return Ok(None);
    };
    let field = family[first].field();
    let rd = field.real_dim();
    let d = family[first].ambient_dim();
    let k = assignment.k();

    let offsets: Vec<usize> = subfamily
        .iter()
        .scan(0, |acc, &f| {
            let o = *acc;
            *acc += family[f].len();
            Some(o)
        })
        .collect();
    let nlambda: usize = subfamily.iter().map(|&f| family[f].len()).sum();
    let a_base = nlambda;
    let c_base = a_base + d * k * rd;
    let nvars = c_base + d * rd;
    let a_var = |r: usize, l: usize, part: usize| a_base + (r * k + l) * rd + part;

    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (pos, &f) in subfamily.iter().enumerate() {
        let mut row = vec![0.0; nvars];
        for j in 0..family[f].len() {
            row[offsets[pos] + j] = 1.0;
        }
        rows.push(row);
        rhs.push(1.0);
        let phi = assignment.image(f);
        for r in 0..d {
            for part in 0..rd {
                let mut row = vec![0.0; nvars];
                for (j, v) in family[f].vertices().iter().enumerate() {
                    row[offsets[pos] + j] = v.coords()[r * rd + part];
                }
                for l in 0..k {
                    let z = phi.entry(l);
                    match (field, part) {
                        (ScalarField::Real, _) => row[a_var(r, l, 0)] = -z.re,
                        // Re(A z) = Re A Re z - Im A Im z
                        (ScalarField::Complex, 0) => {
                            row[a_var(r, l, 0)] = -z.re;
                            row[a_var(r, l, 1)] = z.im;
                        }
                        // Im(A z) = Re A Im z + Im A Re z
                        (ScalarField::Complex, _) => {
                            row[a_var(r, l, 0)] = -z.im;
                            row[a_var(r, l, 1)] = -z.re;
                        }
                    }
                }
                row[c_base + r * rd + part] = -1.0;
                rows.push(row);
                rhs.push(0.0);
            }
        }
    }
    let mut nonneg = vec![true; nvars];
    for flag in nonneg[a_base..].iter_mut() {
        *flag = false;
    }
    let lp = LpProblem::new(rows, rhs, nonneg)?;
    let FeasibilityOutcome::Feasible { point } = lp_feasible(&lp)? else {
        return Ok(None);
    };

    let mut weights = Vec::with_capacity(subfamily.len());
    let mut points = Vec::with_capacity(subfamily.len());
    for (pos, &f) in subfamily.iter().enumerate() {
        let mut w: Vec<f64> = point[offsets[pos]..offsets[pos] + family[f].len()].iter().map(|x| x.max(0.0)).collect();
        let s: f64 = w.iter().sum();
        for x in w.iter_mut() {
            *x /= s;
        }
        points.push(family[f].combination(&w));
        weights.push(w);
    }
    let entry = |idx: usize| -> C64 {
        match field {
            ScalarField::Real => C64::new(point[idx], 0.0),
            ScalarField::Complex => C64::new(point[idx], point[idx + 1]),
        }
    };
    let matrix = (0..k)
        .map(|l| {
            let col: Vec<C64> = (0..d).map(|r| entry(a_var(r, l, 0))).collect();
            Vector::from_complex(field, &col)
        })
        .collect();
    let offset_entries: Vec<C64> = (0..d).map(|r| entry(c_base + r * rd)).collect();
    let offset = Vector::from_complex(field, &offset_entries);
    Ok(Some(AffineRealization { subfamily: subfamily.to_vec(), matrix, offset, points, weights }))
}
