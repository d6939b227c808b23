//! The scaled-dependency LP: given `d - k` affine dependencies on a
//! subfamily, find `r_F >= 0` and `q_F in F` with
//! `sum_F r_F a_F^(i) = 0` and `sum_F r_F a_F^(i) q_F = 0` for every `i`,
//! not all `r_F a_F^(i)` zero.
//!
//! Substituting `lambda_{F,j} >= 0` over the vertices of `F`, with
//! `r_F = sum_j lambda_{F,j}` and `r_F q_F = sum_j lambda_{F,j} vertex_{F,j}`,
//! makes every constraint linear. Nontriviality becomes
//! `sum_{F in S} r_F = 1`, `S` the sets with some nonzero coefficient.

use super::lp::{lp_feasible, lp_minimize, FeasibilityOutcome, LpProblem};
use crate::error::{Error, Result};
use crate::geometry::{Polytope, ScalarField, Vector};
use crate::linalg::C64;

/// `d - k` coefficient vectors over a subfamily; component `i` has one
/// field entry per subfamily member.
#[derive(Debug, Clone, PartialEq)]
pub struct DependencyTuple {
    pub field: ScalarField,
    pub subfamily: Vec<usize>,
    pub components: Vec<Vector>,
}

impl DependencyTuple {
    pub fn new(field: ScalarField, subfamily: Vec<usize>, components: Vec<Vector>) -> Result<Self> {
        for c in &components {
            if c.field() != field {
                return Err(Error::FieldMismatch("tuple component over a different field".into()));
            }
            if c.dim() != subfamily.len() {
                return Err(Error::DimensionMismatch { expected: subfamily.len(), found: c.dim() });
            }
        }
        Ok(DependencyTuple { field, subfamily, components })
    }

    pub fn coefficient(&self, component: usize, position: usize) -> C64 {
        self.components[component].entry(position)
    }

    /// Positions (into `subfamily`) with some nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        (0..self.subfamily.len())
            .filter(|&p| self.components.iter().any(|c| c.entry(p) != C64::new(0.0, 0.0)))
            .collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.support().is_empty()
    }

    /// Multiplies component `i` by `factors[i]`.
    pub fn rescaled(&self, factors: &[C64]) -> DependencyTuple {
        let components = self.components.iter().zip(factors).map(|(c, f)| c.scale(*f)).collect();
        DependencyTuple { field: self.field, subfamily: self.subfamily.clone(), components }
    }

    pub fn norm(&self) -> f64 {
        self.components.iter().map(|c| c.norm_sq()).sum::<f64>().sqrt()
    }
}

/// The linear program for one tuple together with the bookkeeping needed to
/// read `r_F` and `q_F` back out of a feasible point.
#[derive(Debug, Clone)]
pub struct DependencyLp {
    pub problem: LpProblem,
    /// `(position in subfamily, vertex index)` per LP variable.
    pub columns: Vec<(usize, usize)>,
    /// Positions in the nontriviality support.
    pub support: Vec<usize>,
    /// Number of dependency rows (the normalization row comes last).
    pub dependency_rows: usize,
}

/// Scaled weights and points recovered from a feasible LP point.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledWitness {
    /// `r_F` per subfamily position.
    pub r: Vec<f64>,
    /// `q_F` per subfamily position (first vertex where `r_F = 0`).
    pub q: Vec<Vector>,
    /// Convex weights of `q_F` over the vertices of `F`.
    pub q_weights: Vec<Vec<f64>>,
}

pub fn build_dependency_lp(tuple: &DependencyTuple, family: &[Polytope]) -> Result<DependencyLp> {
    if family.is_empty() {
        return Err(Error::InvalidInput("empty family".into()));
    }
    let support = tuple.support();
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    let field = tuple.field;
    let rd = field.real_dim();
    let mut d = None;
    for &idx in &tuple.subfamily {
        let p = family.get(idx).ok_or_else(|| Error::InvalidInput(format!("subfamily index {idx} out of range")))?;
        if p.field() != field {
            return Err(Error::FieldMismatch("tuple and family fields differ".into()));
        }
        match d {
            None => d = Some(p.ambient_dim()),
            Some(d0) if d0 != p.ambient_dim() => {
                return Err(Error::DimensionMismatch { expected: d0, found: p.ambient_dim() })
            }
            _ => {}
        }
    }
    let d = d.unwrap_or(0);

    let mut columns = Vec::new();
    for &pos in &support {
        for j in 0..family[tuple.subfamily[pos]].len() {
            columns.push((pos, j));
        }
    }
    let nvars = columns.len();
    let comps = tuple.components.len();
    let rows_per_comp = (1 + d) * rd;
    let dependency_rows = comps * rows_per_comp;
    let mut a = vec![vec![0.0; nvars]; dependency_rows + 1];
    for (col, &(pos, j)) in columns.iter().enumerate() {
        let vertex = &family[tuple.subfamily[pos]].vertices()[j];
        for i in 0..comps {
            let coef = tuple.coefficient(i, pos);
            let base = i * rows_per_comp;
            // sum_F a_F r_F
            put(&mut a, base, col, coef, field);
            // sum_F a_F w_F, coordinate by coordinate
            for c in 0..d {
                put(&mut a, base + (1 + c) * rd, col, coef * vertex.entry(c), field);
            }
        }
        a[dependency_rows][col] = 1.0;
    }
    let mut b = vec![0.0; dependency_rows + 1];
    b[dependency_rows] = 1.0;
    let problem = LpProblem::new(a, b, vec![true; nvars])?;
    Ok(DependencyLp { problem, columns, support, dependency_rows })
}

fn put(a: &mut [Vec<f64>], row: usize, col: usize, z: C64, field: ScalarField) {
    a[row][col] = z.re;
    if field == ScalarField::Complex {
        a[row + 1][col] = z.im;
    }
}

impl DependencyLp {
    pub fn recover(&self, tuple: &DependencyTuple, family: &[Polytope], point: &[f64]) -> ScaledWitness {
        let m = tuple.subfamily.len();
        let mut q_weights: Vec<Vec<f64>> = tuple.subfamily.iter().map(|&idx| vec![0.0; family[idx].len()]).collect();
        let mut r = vec![0.0; m];
        for (&(pos, j), &x) in self.columns.iter().zip(point) {
            let x = x.max(0.0);
            q_weights[pos][j] += x;
            r[pos] += x;
        }
        let mut q = Vec::with_capacity(m);
        for pos in 0..m {
            let poly = &family[tuple.subfamily[pos]];
            if r[pos] > 0.0 {
                for w in q_weights[pos].iter_mut() {
                    *w /= r[pos];
                }
            } else {
                q_weights[pos] = vec![0.0; poly.len()];
                q_weights[pos][0] = 1.0;
            }
            q.push(poly.combination(&q_weights[pos]));
        }
        ScaledWitness { r, q, q_weights }
    }

    /// `min sum |E lambda|_1` over the normalization simplex: zero exactly
    /// when the tuple is satisfiable, and continuous in the coefficients.
    pub fn infeasibility_merit(&self) -> Result<f64> {
        let rows = self.dependency_rows;
        let n = self.problem.vars();
        let mut a = Vec::with_capacity(rows + 1);
        for (i, row) in self.problem.a.iter().enumerate() {
            let mut r = row.clone();
            r.resize(n + 2 * rows, 0.0);
            if i < rows {
                r[n + 2 * i] = 1.0;
                r[n + 2 * i + 1] = -1.0;
            }
            a.push(r);
        }
        let mut c = vec![0.0; n + 2 * rows];
        for v in c[n..].iter_mut() {
            *v = 1.0;
        }
        let lp = LpProblem::new(a, self.problem.b.clone(), vec![true; n + 2 * rows])?;
        match lp_minimize(&lp, &c)? {
            Some((_, value)) => Ok(value.max(0.0)),
            None => Err(Error::NumericalFailure("merit LP failed".into())),
        }
    }
}

/// Decides the scaled-dependency condition for one tuple; Farkas
/// certificate on infeasibility.
pub fn scaled_dependency_feasible(tuple: &DependencyTuple, family: &[Polytope]) -> Result<FeasibilityOutcome> {
    let lp = build_dependency_lp(tuple, family)?;
    lp_feasible(&lp.problem)
}

/// Largest residual of the equations `sum r a = 0`, `sum r a q = 0`.
pub fn witness_residual(tuple: &DependencyTuple, w: &ScaledWitness) -> f64 {
    let mut worst: f64 = 0.0;
    let d = w.q.first().map_or(0, |q| q.dim());
    for comp in &tuple.components {
        let mut s = C64::new(0.0, 0.0);
        let mut v = vec![C64::new(0.0, 0.0); d];
        for pos in 0..tuple.subfamily.len() {
            let ra = comp.entry(pos) * w.r[pos];
            s += ra;
            for (c, vc) in v.iter_mut().enumerate() {
                *vc += ra * w.q[pos].entry(c);
            }
        }
        worst = worst.max(s.norm());
        for vc in v {
            worst = worst.max(vc.norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn singleton(x: f64) -> Polytope {
        Polytope::singleton(Vector::real(vec![x]))
    }

    #[test]
    fn singletons_zero_and_one_are_infeasible() {
        let family = vec![singleton(0.0), singleton(1.0)];
        let tuple = DependencyTuple::new(ScalarField::Real, vec![0, 1], vec![Vector::real(vec![1.0, -1.0])]).unwrap();
        let out = scaled_dependency_feasible(&tuple, &family).unwrap();
        let lp = build_dependency_lp(&tuple, &family).unwrap();
        assert!(lp.problem.validate_farkas(out.farkas().expect("infeasible")));
    }

    #[test]
    fn helly_encoding_with_common_point() {
        // three triangles all containing the origin, k = 0 in R^2
        let family = vec![
            Polytope::real(&[&[-1.0, -1.0], &[2.0, 0.0], &[0.0, 2.0]]).unwrap(),
            Polytope::real(&[&[1.0, 1.0], &[-2.0, 0.0], &[0.0, -2.0]]).unwrap(),
            Polytope::real(&[&[-1.0, 1.0], &[1.0, 1.0], &[0.0, -1.0]]).unwrap(),
        ];
        let tuple = DependencyTuple::new(
            ScalarField::Real,
            vec![0, 1, 2],
            vec![Vector::real(vec![1.0, -1.0, 0.0]), Vector::real(vec![1.0, 0.0, -1.0])],
        )
        .unwrap();
        let lp = build_dependency_lp(&tuple, &family).unwrap();
        let out = lp_feasible(&lp.problem).unwrap();
        let w = lp.recover(&tuple, &family, out.point().expect("feasible"));
        // the constraints force equal r_F = 1/3 and a common point
        for r in &w.r {
            assert!((r - 1.0 / 3.0).abs() < 1e-9);
        }
        assert!(w.q[0].distance(&w.q[1]) < 1e-8);
        assert!(w.q[0].distance(&w.q[2]) < 1e-8);
        assert!(witness_residual(&tuple, &w) < 1e-8);
        assert!(lp.infeasibility_merit().unwrap() < 1e-12);
    }

    #[test]
    fn empty_support_is_an_error() {
        let family = vec![singleton(0.0), singleton(1.0)];
        let tuple = DependencyTuple::new(ScalarField::Real, vec![0, 1], vec![Vector::real(vec![0.0, 0.0])]).unwrap();
        assert_eq!(scaled_dependency_feasible(&tuple, &family), Err(Error::EmptySupport));
    }

    #[test]
    fn merit_positive_when_infeasible() {
        let family = vec![singleton(0.0), singleton(1.0)];
        let tuple = DependencyTuple::new(ScalarField::Real, vec![0, 1], vec![Vector::real(vec![1.0, -1.0])]).unwrap();
        let lp = build_dependency_lp(&tuple, &family).unwrap();
        assert!(lp.infeasibility_merit().unwrap() > 0.1);
    }
}
