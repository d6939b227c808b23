//! Point assignments `phi: family -> P ⊆ F^k`, the subfamily bound and the
//! space of affine dependencies on assigned points.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::{ScalarField, Vector, RANK_TOL};
use crate::linalg::C64;
use crate::solvers::DependencyTuple;

/// A finite point set `P ⊆ F^k` together with a map from family indices
/// into it.
#[derive(Debug, Clone, PartialEq)]
pub struct PointAssignment {
    field: ScalarField,
    k: usize,
    points: Vec<Vector>,
    phi: Vec<usize>,
}

impl PointAssignment {
    pub fn new(field: ScalarField, k: usize, points: Vec<Vector>, phi: Vec<usize>) -> Result<Self> {
        for p in &points {
            if p.field() != field {
                return Err(Error::FieldMismatch("assignment point over a different field".into()));
            }
            if p.dim() != k {
                return Err(Error::DimensionMismatch { expected: k, found: p.dim() });
            }
        }
        if let Some(&bad) = phi.iter().find(|&&t| t >= points.len()) {
            return Err(Error::InvalidInput(format!("phi target {bad} out of range for {} points", points.len())));
        }
        Ok(PointAssignment { field, k, points, phi })
    }

    /// `P = {0} ⊆ F^0` with every set mapped to it.
    pub fn origin(field: ScalarField, n: usize) -> Self {
        PointAssignment { field, k: 0, points: vec![Vector::zeros(field, 0)], phi: vec![0; n] }
    }

    /// One point per set, `phi` the identity.
    pub fn injective(field: ScalarField, k: usize, points: Vec<Vector>) -> Result<Self> {
        let phi = (0..points.len()).collect();
        PointAssignment::new(field, k, points, phi)
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn phi(&self) -> &[usize] {
        &self.phi
    }

    /// Number of family members the assignment covers.
    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    /// `phi(F)` for family index `f`.
    pub fn image(&self, f: usize) -> &Vector {
        &self.points[self.phi[f]]
    }

    /// Checks that the assignment covers a family of `n` sets over `field`.
    pub fn check_family(&self, field: ScalarField, n: usize) -> Result<()> {
        if field != self.field {
            return Err(Error::FieldMismatch("assignment and family fields differ".into()));
        }
        if self.phi.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.phi.len() });
        }
        Ok(())
    }
}

/// Largest subfamily size the dependency condition quantifies over:
/// `(k + 1)(d - k) dim_R F + 1`.
pub fn subfamily_bound(k: usize, d: usize, field: ScalarField) -> Result<usize> {
    if k >= d {
        return Err(Error::InvalidRange { k, d });
    }
    Ok((k + 1) * (d - k) * field.real_dim() + 1)
}

/// Realified `(1 + k) x m` constraint matrix whose kernel is the dependency
/// space of the subfamily.
fn dependency_matrix(assignment: &PointAssignment, subfamily: &[usize]) -> DMatrix<f64> {
    let k = assignment.k();
    let m = subfamily.len();
    let entry = |row: usize, col: usize| -> C64 {
        if row == 0 {
            C64::new(1.0, 0.0)
        } else {
            assignment.image(subfamily[col]).entry(row - 1)
        }
    };
    match assignment.field() {
        ScalarField::Real => DMatrix::from_fn(1 + k, m, |r, c| entry(r, c).re),
        ScalarField::Complex => {
            let cm = crate::linalg::CMat::from_fn(1 + k, m, entry);
            crate::linalg::realify(&cm)
        }
    }
}

/// Orthonormal real basis of the dependency space
/// `D = {a in F^m : sum a_F = 0, sum a_F phi(F) = 0}` of the subfamily, as
/// vectors over the assignment's field. Over `C` the basis spans `D` as a
/// real vector space, so it has `2 dim_C D` members.
pub fn dependency_space(assignment: &PointAssignment, subfamily: &[usize]) -> Vec<Vector> {
    if subfamily.is_empty() {
        return Vec::new();
    }
    let field = assignment.field();
    let m = dependency_matrix(assignment, subfamily);
    crate::linalg::real_null_space(&m, RANK_TOL)
        .into_iter()
        .map(|v| Vector::new(field, v.iter().copied().collect()).expect("finite null vector"))
        .collect()
}

/// Dimension of the dependency space over the field.
pub fn dependency_dim(assignment: &PointAssignment, subfamily: &[usize]) -> usize {
    dependency_space(assignment, subfamily).len() / assignment.field().real_dim()
}

/// Largest violation of `sum a_F = 0`, `sum a_F phi(F) = 0` over the tuple's
/// components.
pub fn dependency_residual(tuple: &DependencyTuple, assignment: &PointAssignment) -> f64 {
    let k = assignment.k();
    let mut worst: f64 = 0.0;
    for comp in &tuple.components {
        let mut s = C64::new(0.0, 0.0);
        let mut v = vec![C64::new(0.0, 0.0); k];
        for (pos, &f) in tuple.subfamily.iter().enumerate() {
            let a = comp.entry(pos);
            s += a;
            let p = assignment.image(f);
            for (l, vl) in v.iter_mut().enumerate() {
                *vl += a * p.entry(l);
            }
        }
        worst = worst.max(s.norm());
        for vl in v {
            worst = worst.max(vl.norm());
        }
    }
    worst
}

/// Tuple with components `sum_b coeffs[i][b] * basis[b]`.
pub fn tuple_from_coefficients(
    field: ScalarField,
    subfamily: &[usize],
    basis: &[Vector],
    coeffs: &[Vec<f64>],
) -> DependencyTuple {
    let m = subfamily.len();
    let components = coeffs
        .iter()
        .map(|row| {
            let mut acc = Vector::zeros(field, m);
            for (b, &c) in basis.iter().zip(row) {
                acc = acc.add(&b.scale(C64::new(c, 0.0)));
            }
            acc
        })
        .collect();
    DependencyTuple { field, subfamily: subfamily.to_vec(), components }
}
