//! Scalar fields, vectors, polytopes, orthonormal frames and affine flats.
//!
//! Complex vectors of complex dimension `d` are stored as `2d` reals with
//! coordinate `j` in slots `(2j, 2j + 1)`. The Hermitian product is linear
//! in its first argument: `<x, y> = sum_j x_j conj(y_j)`.

use std::fmt;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hdot, CMat, CVec, C64};

/// Tolerance for orthonormality checks on frames.
pub const ORTHO_TOL: f64 = 1e-10;
/// Singular-value threshold for numerical rank decisions.
pub const RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScalarField {
    Real,
    Complex,
}

impl ScalarField {
    /// `dim_R` of the field.
    pub fn real_dim(self) -> usize {
        match self {
            ScalarField::Real => 1,
            ScalarField::Complex => 2,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            ScalarField::Real => "R",
            ScalarField::Complex => "C",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "R" => Some(ScalarField::Real),
            "C" => Some(ScalarField::Complex),
            _ => None,
        }
    }

    /// Restricts a scalar to the field (drops the imaginary part over R).
    pub fn coerce(self, z: C64) -> C64 {
        match self {
            ScalarField::Real => C64::new(z.re, 0.0),
            ScalarField::Complex => z,
        }
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A point of `F^d` in realified storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    field: ScalarField,
    coords: Vec<f64>,
}

impl Vector {
    pub fn new(field: ScalarField, coords: Vec<f64>) -> Result<Self> {
        if !coords.len().is_multiple_of(field.real_dim()) {
            return Err(Error::InvalidInput(format!("{} real coordinates do not form a complex vector", coords.len())));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite coordinate".into()));
        }
        Ok(Vector { field, coords })
    }

    pub fn real(coords: Vec<f64>) -> Self {
        Vector::new(ScalarField::Real, coords).expect("finite real coordinates")
    }

    pub fn zeros(field: ScalarField, dim: usize) -> Self {
        Vector { field, coords: vec![0.0; dim * field.real_dim()] }
    }

    /// Builds a vector from complex entries; imaginary parts are dropped over R.
    pub fn from_complex(field: ScalarField, entries: &[C64]) -> Self {
        let coords = match field {
            ScalarField::Real => entries.iter().map(|z| z.re).collect(),
            ScalarField::Complex => entries.iter().flat_map(|z| [z.re, z.im]).collect(),
        };
        Vector { field, coords }
    }

    pub fn from_cvec(field: ScalarField, v: &CVec) -> Self {
        Vector::from_complex(field, v.as_slice())
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    /// Dimension over the field.
    pub fn dim(&self) -> usize {
        self.coords.len() / self.field.real_dim()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn entry(&self, j: usize) -> C64 {
        match self.field {
            ScalarField::Real => C64::new(self.coords[j], 0.0),
            ScalarField::Complex => C64::new(self.coords[2 * j], self.coords[2 * j + 1]),
        }
    }

    pub fn to_cvec(&self) -> CVec {
        CVec::from_iterator(self.dim(), (0..self.dim()).map(|j| self.entry(j)))
    }

    pub fn to_real(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.coords)
    }

    pub fn norm_sq(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.coords.len(), other.coords.len());
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect();
        Vector { field: self.field, coords }
    }

    pub fn add(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.coords.len(), other.coords.len());
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect();
        Vector { field: self.field, coords }
    }

    /// Multiplies by a field scalar.
    pub fn scale(&self, s: C64) -> Vector {
        let s = self.field.coerce(s);
        let entries: Vec<C64> = (0..self.dim()).map(|j| self.entry(j) * s).collect();
        Vector::from_complex(self.field, &entries)
    }

    /// Appends one field coordinate.
    pub fn push(&self, z: C64) -> Vector {
        let mut entries: Vec<C64> = (0..self.dim()).map(|j| self.entry(j)).collect();
        entries.push(z);
        Vector::from_complex(self.field, &entries)
    }

    pub fn distance(&self, other: &Vector) -> f64 {
        self.sub(other).norm()
    }
}

/// Hermitian inner product `<x, y>`, linear in `x`.
pub fn inner(x: &Vector, y: &Vector) -> C64 {
    (0..x.dim().min(y.dim())).map(|j| x.entry(j) * y.entry(j).conj()).sum()
}

/// Real inner product of the realified vectors, `Re <x, y>`.
pub fn inner_real(x: &Vector, y: &Vector) -> f64 {
    x.coords.iter().zip(&y.coords).map(|(a, b)| a * b).sum()
}

/// A polytope given by its vertex list.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    field: ScalarField,
    ambient_dim: usize,
    vertices: Vec<Vector>,
}

impl Polytope {
    pub fn new(vertices: Vec<Vector>) -> Result<Self> {
        let first = vertices.first().ok_or_else(|| Error::InvalidInput("polytope needs at least one vertex".into()))?;
        let (field, ambient_dim) = (first.field(), first.dim());
        for v in &vertices {
            if v.field() != field {
                return Err(Error::FieldMismatch("vertices over different fields".into()));
            }
            if v.dim() != ambient_dim {
                return Err(Error::DimensionMismatch { expected: ambient_dim, found: v.dim() });
            }
        }
        Ok(Polytope { field, ambient_dim, vertices })
    }

    pub fn singleton(point: Vector) -> Self {
        Polytope::new(vec![point]).expect("one vertex")
    }

    /// Convenience constructor for real polytopes from coordinate rows.
    pub fn real(rows: &[&[f64]]) -> Result<Self> {
        Polytope::new(rows.iter().map(|r| Vector::real(r.to_vec())).collect())
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// The point `sum_j weights[j] * vertex_j`.
    pub fn combination(&self, weights: &[f64]) -> Vector {
        let mut coords = vec![0.0; self.ambient_dim * self.field.real_dim()];
        for (w, v) in weights.iter().zip(&self.vertices) {
            for (c, x) in coords.iter_mut().zip(v.coords()) {
                *c += w * x;
            }
        }
        Vector { field: self.field, coords }
    }
}

/// Embeds `F^d` as the slice `F^d + e_{d+1}` of `F^{d+1}`.
pub fn lift_to_slice(p: &Polytope) -> Polytope {
    let vertices = p.vertices.iter().map(|v| v.push(C64::new(1.0, 0.0))).collect();
    Polytope { field: p.field, ambient_dim: p.ambient_dim + 1, vertices }
}

/// Drops the last field coordinate of every vertex.
pub fn delift(p: &Polytope) -> Polytope {
    let rd = p.field.real_dim();
    let vertices = p
        .vertices
        .iter()
        .map(|v| Vector { field: p.field, coords: v.coords[..v.coords.len() - rd].to_vec() })
        .collect();
    Polytope { field: p.field, ambient_dim: p.ambient_dim.saturating_sub(1), vertices }
}

/// An ordered orthonormal family of vectors in `F^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    field: ScalarField,
    ambient_dim: usize,
    vectors: Vec<Vector>,
}

impl Frame {
    /// Wraps vectors that are already orthonormal within [`ORTHO_TOL`].
    pub fn new(field: ScalarField, ambient_dim: usize, vectors: Vec<Vector>) -> Result<Self> {
        for v in &vectors {
            if v.field() != field {
                return Err(Error::FieldMismatch("frame vector over a different field".into()));
            }
            if v.dim() != ambient_dim {
                return Err(Error::DimensionMismatch { expected: ambient_dim, found: v.dim() });
            }
        }
        let frame = Frame { field, ambient_dim, vectors };
        let err = frame.orthonormality_error();
        if err > ORTHO_TOL {
            return Err(Error::InvalidInput(format!("frame is not orthonormal (error {err:.3e})")));
        }
        Ok(frame)
    }

    pub fn empty(field: ScalarField, ambient_dim: usize) -> Self {
        Frame { field, ambient_dim, vectors: Vec::new() }
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Columns are the frame vectors.
    pub fn to_matrix(&self) -> CMat {
        let mut m = CMat::zeros(self.ambient_dim, self.vectors.len());
        for (c, v) in self.vectors.iter().enumerate() {
            for r in 0..self.ambient_dim {
                m[(r, c)] = v.entry(r);
            }
        }
        m
    }

    pub fn from_matrix(field: ScalarField, m: &CMat) -> Frame {
        let vectors = (0..m.ncols()).map(|c| Vector::from_cvec(field, &m.column(c).into_owned())).collect();
        Frame { field, ambient_dim: m.nrows(), vectors }
    }

    /// Max entry of `|Gram - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((inner(a, b) - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Negates the listed vectors (the product-antipodal action).
    pub fn flip_signs(&self, signs: &[bool]) -> Frame {
        let vectors = self
            .vectors
            .iter()
            .zip(signs)
            .map(|(v, &neg)| if neg { v.scale(C64::new(-1.0, 0.0)) } else { v.clone() })
            .collect();
        Frame { field: self.field, ambient_dim: self.ambient_dim, vectors }
    }
}

/// Gram-Schmidt (two passes) under the Hermitian product.
pub fn orthonormalize(vs: &[Vector], field: ScalarField) -> Result<Frame> {
    let Some(first) = vs.first() else {
        return Err(Error::InvalidInput("nothing to orthonormalize".into()));
    };
    let n = first.dim();
    for v in vs {
        if v.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: v.dim() });
        }
    }
    let mut m = CMat::zeros(n, vs.len());
    for (c, v) in vs.iter().enumerate() {
        for r in 0..n {
            m[(r, c)] = field.coerce(v.entry(r));
        }
    }
    let rank = crate::linalg::complex_rank(&m, RANK_TOL);
    if rank < vs.len() {
        return Err(Error::DependentInput { rank, count: vs.len() });
    }
    let cols = gram_schmidt(&m);
    Ok(Frame::from_matrix(field, &cols))
}

/// Orthonormalizes the columns of `m` (assumed independent).
pub(crate) fn gram_schmidt(m: &CMat) -> CMat {
    let mut q = m.clone();
    for c in 0..q.ncols() {
        let mut v: CVec = q.column(c).into_owned();
        for _ in 0..2 {
            for p in 0..c {
                let u: CVec = q.column(p).into_owned();
                let coef = hdot(&v, &u);
                v -= u * coef;
            }
        }
        let norm = v.norm();
        q.set_column(c, &(v / C64::new(norm, 0.0)));
    }
    q
}

/// Coefficients `(<x, v_1>, ..., <x, v_n>)` of the orthogonal projection.
pub fn project_to_frame(fr: &Frame, x: &Vector) -> Result<Vector> {
    if x.dim() != fr.ambient_dim {
        return Err(Error::DimensionMismatch { expected: fr.ambient_dim, found: x.dim() });
    }
    let coeffs: Vec<C64> = fr.vectors.iter().map(|v| inner(x, v)).collect();
    Ok(Vector::from_complex(fr.field, &coeffs))
}

/// `sum_i coeffs_i v_i`.
pub fn reconstruct(fr: &Frame, coeffs: &Vector) -> Vector {
    let mut acc = Vector::zeros(fr.field, fr.ambient_dim);
    for (i, v) in fr.vectors.iter().enumerate() {
        acc = acc.add(&v.scale(coeffs.entry(i)));
    }
    acc
}

/// A k-flat: basepoint plus an orthonormal direction frame.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineFlat {
    basepoint: Vector,
    directions: Frame,
}

impl AffineFlat {
    pub fn new(basepoint: Vector, directions: Frame) -> Result<Self> {
        if basepoint.field() != directions.field() {
            return Err(Error::FieldMismatch("basepoint and directions disagree".into()));
        }
        if basepoint.dim() != directions.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: directions.ambient_dim(), found: basepoint.dim() });
        }
        Ok(AffineFlat { basepoint, directions })
    }

    /// The 0-flat `{x}`.
    pub fn point(x: Vector) -> Self {
        let directions = Frame::empty(x.field(), x.dim());
        AffineFlat { basepoint: x, directions }
    }

    pub fn field(&self) -> ScalarField {
        self.basepoint.field()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basepoint.dim()
    }

    /// Dimension over the field.
    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    pub fn basepoint(&self) -> &Vector {
        &self.basepoint
    }

    pub fn directions(&self) -> &Frame {
        &self.directions
    }

    /// Flat coordinates `psi(x) = (<x - b, e_j>)_j`, an affine isomorphism onto `F^k`.
    pub fn coordinates(&self, x: &Vector) -> Vector {
        project_to_frame(&self.directions, &x.sub(&self.basepoint)).expect("matching dimension")
    }

    pub fn point_at(&self, coords: &Vector) -> Vector {
        self.basepoint.add(&reconstruct(&self.directions, coords))
    }

    /// Orthogonal projection of `x` onto the flat.
    pub fn nearest_point(&self, x: &Vector) -> Vector {
        self.point_at(&self.coordinates(x))
    }

    pub fn distance_to(&self, x: &Vector) -> f64 {
        x.distance(&self.nearest_point(x))
    }

    /// Translates the flat by `offset`.
    pub fn translated(&self, offset: &Vector) -> AffineFlat {
        AffineFlat { basepoint: self.basepoint.add(offset), directions: self.directions.clone() }
    }

    /// Largest distance from `J e` to the real direction span over the
    /// directions `e` (zero for real flats).
    pub fn complex_closure_residual(&self) -> f64 {
        if self.field() == ScalarField::Real {
            return 0.0;
        }
        let origin = AffineFlat::new(Vector::zeros(self.field(), self.ambient_dim()), self.directions.clone())
            .expect("same shape");
        self.directions.vectors().iter().map(|e| origin.distance_to(&e.scale(C64::new(0.0, 1.0)))).fold(0.0, f64::max)
    }
}

/// The flat `{x in F^d : <(x, 1), v_i> = 0 for all i}` cut out of the slice
/// `F^d + e_{d+1}` by the orthogonal complement of the frame span.
pub fn flat_from_orthogonal_frame(fr: &Frame) -> Result<AffineFlat> {
    let field = fr.field();
    let n1 = fr.ambient_dim();
    if n1 == 0 {
        return Err(Error::InvalidInput("frame lives in F^0".into()));
    }
    let d = n1 - 1;
    // v_i = (u_i, c_i)
    let lasts: Vec<C64> = fr.vectors().iter().map(|v| v.entry(d)).collect();
    let slice_weight: f64 = lasts.iter().map(|c| c.norm_sqr()).sum();
    if 1.0 - slice_weight < RANK_TOL {
        return Err(Error::SliceDegenerate(slice_weight));
    }
    let heads: Vec<CVec> = fr.vectors().iter().map(|v| CVec::from_iterator(d, (0..d).map(|j| v.entry(j)))).collect();

    // Orthonormal basis of span{u_i}, then its complement via the standard basis.
    let mut cols: Vec<CVec> = Vec::new();
    let push_if_new = |cand: &CVec, cols: &mut Vec<CVec>, min_norm: f64| {
        let mut w = cand.clone();
        for _ in 0..2 {
            for q in cols.iter() {
                let coef = hdot(&w, q);
                w -= q * coef;
            }
        }
        let norm = w.norm();
        if norm > min_norm {
            cols.push(w / C64::new(norm, 0.0));
        }
    };
    // The heads are independent whenever e_{d+1} is outside the span.
    for u in &heads {
        push_if_new(u, &mut cols, 1e-14);
    }
    let span_dim = cols.len();
    for j in 0..d {
        if cols.len() == d {
            break;
        }
        let mut e = CVec::zeros(d);
        e[j] = C64::new(1.0, 0.0);
        push_if_new(&e, &mut cols, 1e-6);
    }

    // Basepoint x0 = sum_j beta_j w_j with <x0, u_i> = -conj(c_i).
    let mut basepoint = CVec::zeros(d);
    if span_dim > 0 {
        let m = CMat::from_fn(heads.len(), span_dim, |i, j| hdot(&cols[j], &heads[i]));
        let rhs = CVec::from_iterator(heads.len(), lasts.iter().map(|c| -c.conj()));
        let svd = m.svd(true, true);
        let beta = svd.solve(&rhs, 1e-12).map_err(|e| Error::NumericalFailure(format!("flat basepoint solve: {e}")))?;
        for (j, b) in beta.iter().enumerate() {
            basepoint += &cols[j] * *b;
        }
    }
    let dirs: Vec<Vector> = cols[span_dim..].iter().map(|c| Vector::from_cvec(field, c)).collect();
    let directions = Frame { field, ambient_dim: d, vectors: dirs };
    AffineFlat::new(Vector::from_cvec(field, &basepoint), directions)
}

/// Whether `x` lies within `tol` of the flat.
pub fn flat_contains_point(fl: &AffineFlat, x: &Vector, tol: f64) -> bool {
    fl.distance_to(x) <= tol
}
