//! Certified LP feasibility: `A x = b` with a nonnegativity mask.
//!
//! Every answer carries a certificate that is re-checked before it is
//! returned. When the floating-point solve does not produce a certificate
//! that validates, cheaper float rescues run before an exact rational
//! re-solve.

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::simplex::{self, LpNum, SimplexOutcome};
use crate::error::{Error, Result};
use crate::linalg::{lstsq, nnls};

/// Tolerance on constraint residuals of a feasible point.
pub const FEAS_TOL: f64 = 1e-8;
/// Tolerance on `y^T A` entries of a Farkas functional.
pub const CERT_TOL: f64 = 1e-10;

const MAX_PIVOTS: usize = 100_000;

/// Float solves give up early and defer to the exact solver.
fn float_pivots(prob: &LpProblem) -> usize {
    (1000 + 50 * (prob.rows() + prob.vars())).min(MAX_PIVOTS)
}

/// `A x = b` with `x_j >= 0` wherever `nonneg[j]`, other variables free.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub nonneg: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FeasibilityOutcome {
    Feasible { point: Vec<f64> },
    Infeasible { farkas: Vec<f64> },
}

impl FeasibilityOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityOutcome::Feasible { .. })
    }

    pub fn point(&self) -> Option<&[f64]> {
        match self {
            FeasibilityOutcome::Feasible { point } => Some(point),
            FeasibilityOutcome::Infeasible { .. } => None,
        }
    }

    pub fn farkas(&self) -> Option<&[f64]> {
        match self {
            FeasibilityOutcome::Infeasible { farkas } => Some(farkas),
            FeasibilityOutcome::Feasible { .. } => None,
        }
    }
}

impl LpProblem {
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>, nonneg: Vec<bool>) -> Result<Self> {
        let p = LpProblem { a, b, nonneg };
        p.check_shape()?;
        Ok(p)
    }

    pub fn rows(&self) -> usize {
        self.a.len()
    }

    pub fn vars(&self) -> usize {
        self.nonneg.len()
    }

    fn check_shape(&self) -> Result<()> {
        if self.a.len() != self.b.len() {
            return Err(Error::DimensionMismatch { expected: self.a.len(), found: self.b.len() });
        }
        for row in &self.a {
            if row.len() != self.nonneg.len() {
                return Err(Error::DimensionMismatch { expected: self.nonneg.len(), found: row.len() });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput("non-finite LP coefficient".into()));
            }
        }
        if self.b.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite LP right-hand side".into()));
        }
        Ok(())
    }

    /// Standard form: free variables split into a difference of two.
    fn standard_columns(&self) -> Vec<(usize, f64)> {
        let mut cols = Vec::new();
        for (j, &nn) in self.nonneg.iter().enumerate() {
            cols.push((j, 1.0));
            if !nn {
                cols.push((j, -1.0));
            }
        }
        cols
    }

    fn standard_matrix<T: LpNum>(&self, cols: &[(usize, f64)]) -> Vec<Vec<T>> {
        self.a.iter().map(|row| cols.iter().map(|&(j, s)| T::from_f64(s * row[j])).collect()).collect()
    }

    fn fold_solution<T: LpNum>(&self, cols: &[(usize, f64)], xs: &[T]) -> Vec<f64> {
        let mut x = vec![0.0; self.vars()];
        // accumulate in T so that exact solutions round only once
        let mut acc: Vec<T> = vec![T::zero(); self.vars()];
        for (&(j, s), v) in cols.iter().zip(xs) {
            acc[j] = if s > 0.0 { acc[j].clone() + v.clone() } else { acc[j].clone() - v.clone() };
        }
        for (xi, a) in x.iter_mut().zip(acc) {
            *xi = a.to_f64();
        }
        x
    }

    /// Largest constraint violation of `x` (equalities and sign constraints).
    pub fn residual(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (row, bi) in self.a.iter().zip(&self.b) {
            let lhs: f64 = row.iter().zip(x).map(|(a, v)| a * v).sum();
            worst = worst.max((lhs - bi).abs());
        }
        for (v, &nn) in x.iter().zip(&self.nonneg) {
            if nn {
                worst = worst.max(-v);
            }
        }
        worst
    }

    pub fn validate_point(&self, x: &[f64]) -> bool {
        x.len() == self.vars() && self.residual(x) <= FEAS_TOL
    }

    /// Checks `y^T A <= CERT_TOL` on nonnegative columns, `|y^T A| <= CERT_TOL`
    /// on free columns and `y^T b > FEAS_TOL`.
    pub fn validate_farkas(&self, y: &[f64]) -> bool {
        if y.len() != self.rows() || y.iter().any(|v| !v.is_finite()) {
            return false;
        }
        for j in 0..self.vars() {
            let ya: f64 = self.a.iter().zip(y).map(|(row, yi)| row[j] * yi).sum();
            if ya > CERT_TOL || (!self.nonneg[j] && ya < -CERT_TOL) {
                return false;
            }
        }
        let yb: f64 = self.b.iter().zip(y).map(|(b, yi)| b * yi).sum();
        yb > FEAS_TOL
    }

    /// Exact validation of a Farkas functional.
    pub fn validate_farkas_exact(&self, y: &[f64]) -> bool {
        let yq: Vec<BigRational> = y.iter().map(|v| BigRational::from_f64(*v)).collect();
        for j in 0..self.vars() {
            let mut ya = BigRational::zero();
            for (row, yi) in self.a.iter().zip(&yq) {
                ya += BigRational::from_f64(row[j]) * yi;
            }
            if ya > BigRational::zero() || (!self.nonneg[j] && ya < BigRational::zero()) {
                return false;
            }
        }
        let mut yb = BigRational::zero();
        for (b, yi) in self.b.iter().zip(&yq) {
            yb += BigRational::from_f64(*b) * yi;
        }
        yb > BigRational::zero()
    }
}

fn normalize_farkas(y: Vec<f64>) -> Vec<f64> {
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale > 0.0 {
        y.into_iter().map(|v| v / scale).collect()
    } else {
        y
    }
}

fn outcome_from<T: LpNum>(p: &LpProblem, cols: &[(usize, f64)], out: SimplexOutcome<T>) -> Option<FeasibilityOutcome> {
    match out {
        SimplexOutcome::Optimal { x, .. } => {
            let point = p.fold_solution(cols, &x);
            Some(FeasibilityOutcome::Feasible { point })
        }
        SimplexOutcome::Infeasible { y, .. } => {
            let farkas = normalize_farkas(y.iter().map(|v| v.to_f64()).collect());
            Some(FeasibilityOutcome::Infeasible { farkas })
        }
        SimplexOutcome::Unbounded | SimplexOutcome::IterationLimit => None,
    }
}

fn certified(p: &LpProblem, out: &FeasibilityOutcome) -> bool {
    match out {
        FeasibilityOutcome::Feasible { point } => p.validate_point(point),
        FeasibilityOutcome::Infeasible { farkas } => p.validate_farkas(farkas),
    }
}

/// Recomputes the basic variables of a float solve from the original data
/// by least squares; the basis is usually right even when the tableau
/// values have drifted.
fn refine(a: &[Vec<f64>], b: &[f64], basis: &[usize], n: usize) -> Vec<f64> {
    let ab = DMatrix::from_fn(a.len(), basis.len(), |i, j| a[i][basis[j]]);
    let xb = lstsq(&ab, &DVector::from_column_slice(b));
    let mut x = vec![0.0; n];
    for (&j, v) in basis.iter().zip(xb.iter()) {
        x[j] = v.max(0.0);
    }
    x
}

/// Float solve of the standard-form problem with the refinement fallback.
/// `Some` only with a validated point.
fn float_point(prob: &LpProblem, c: Option<&[f64]>) -> Option<Vec<f64>> {
    let cols = prob.standard_columns();
    let a: Vec<Vec<f64>> = prob.standard_matrix(&cols);
    let cs: Option<Vec<f64>> = c.map(|c| cols.iter().map(|&(j, s)| s * c[j]).collect());
    let scale = 1.0 + prob.b.iter().map(|v| v.abs()).sum::<f64>();
    let SimplexOutcome::Optimal { x, basis, .. } =
        simplex::solve(&a, &prob.b, cs.as_deref(), &(1e-11 * scale), float_pivots(prob))
    else {
        return None;
    };
    let point = prob.fold_solution(&cols, &x);
    if prob.validate_point(&point) {
        return Some(point);
    }
    let point = prob.fold_solution(&cols, &refine(&a, &prob.b, &basis, cols.len()));
    prob.validate_point(&point).then_some(point)
}

/// Nonnegative least squares on the standard form. Settles most problems
/// that are feasible only to within rounding; otherwise the optimal residual
/// `r = b - A x` satisfies `A^T r <= 0` and `r^T b = |r|^2`, so it is a
/// Farkas functional.
fn nnls_outcome(prob: &LpProblem, a: &[Vec<f64>]) -> Option<FeasibilityOutcome> {
    let cols = prob.standard_columns();
    let m = DMatrix::from_fn(a.len(), cols.len(), |i, j| a[i][j]);
    let b = DVector::from_column_slice(&prob.b);
    let x = nnls(&m, &b);
    let point = prob.fold_solution(&cols, x.as_slice());
    if prob.validate_point(&point) {
        return Some(FeasibilityOutcome::Feasible { point });
    }
    let farkas = normalize_farkas((b - m * x).iter().copied().collect());
    prob.validate_farkas(&farkas).then_some(FeasibilityOutcome::Infeasible { farkas })
}

/// Solves with `b` randomly perturbed, which breaks the degeneracy that
/// stalls the float simplex, then refines the basis against the true `b`.
fn perturbed_point(prob: &LpProblem, a: &[Vec<f64>]) -> Option<Vec<f64>> {
    let cols = prob.standard_columns();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let noise: Vec<f64> = prob.b.iter().map(|v| (1.0 + v.abs()) * rng.random_range(-1.0..1.0)).collect();
    let scale = 1.0 + prob.b.iter().map(|v| v.abs()).sum::<f64>();
    [1e-9, 1e-7].into_iter().find_map(|eps| {
        let b: Vec<f64> = prob.b.iter().zip(&noise).map(|(v, u)| v + eps * u).collect();
        let SimplexOutcome::Optimal { basis, .. } = simplex::solve(a, &b, None, &(1e-11 * scale), float_pivots(prob))
        else {
            return None;
        };
        let point = prob.fold_solution(&cols, &refine(a, &prob.b, &basis, cols.len()));
        prob.validate_point(&point).then_some(point)
    })
}

/// Decides feasibility with a validated certificate; deterministic for a
/// fixed input.
///
/// Order of attempts: float simplex, basis refinement, nonnegative least
/// squares (point or Farkas functional), perturbed float simplex, float least-violation point (which also settles problems that
/// are infeasible by less than `FEAS_TOL`), exact rational simplex.
pub fn lp_feasible(prob: &LpProblem) -> Result<FeasibilityOutcome> {
    prob.check_shape()?;
    let cols = prob.standard_columns();
    let a: Vec<Vec<f64>> = prob.standard_matrix(&cols);
    let scale = 1.0 + prob.b.iter().map(|v| v.abs()).sum::<f64>();
    let float = simplex::solve(&a, &prob.b, None, &(1e-11 * scale), float_pivots(prob));
    let basis = match &float {
        SimplexOutcome::Optimal { basis, .. } => Some(basis.clone()),
        _ => None,
    };
    if let Some(out) = outcome_from(prob, &cols, float) {
        if certified(prob, &out) {
            return Ok(out);
        }
    }
    if let Some(basis) = basis {
        let point = prob.fold_solution(&cols, &refine(&a, &prob.b, &basis, cols.len()));
        if prob.validate_point(&point) {
            return Ok(FeasibilityOutcome::Feasible { point });
        }
    }
    if let Some(out) = nnls_outcome(prob, &a) {
        return Ok(out);
    }
    if let Some(point) = perturbed_point(prob, &a).or_else(|| least_violation_float(prob)) {
        return Ok(FeasibilityOutcome::Feasible { point });
    }
    lp_feasible_exact(prob)
}

/// Float-only search for a validated feasible point: the attempts of
/// [`lp_feasible`] without the exact solve. `None` decides nothing; use it
/// where only a point is wanted and an infeasibility proof is not.
pub fn lp_feasible_point(prob: &LpProblem) -> Result<Option<Vec<f64>>> {
    prob.check_shape()?;
    if let Some(point) = float_point(prob, None) {
        return Ok(Some(point));
    }
    let a: Vec<Vec<f64>> = prob.standard_matrix(&prob.standard_columns());
    if let Some(FeasibilityOutcome::Feasible { point }) = nnls_outcome(prob, &a) {
        return Ok(Some(point));
    }
    Ok(perturbed_point(prob, &a).or_else(|| least_violation_float(prob)))
}

/// Exact rational solve; the certificate is validated in floating point.
/// A problem that is exactly infeasible but within `FEAS_TOL` of feasible
/// is reported feasible with its least-violation point.
pub fn lp_feasible_exact(prob: &LpProblem) -> Result<FeasibilityOutcome> {
    let cols = prob.standard_columns();
    let a: Vec<Vec<BigRational>> = prob.standard_matrix(&cols);
    let b: Vec<BigRational> = prob.b.iter().map(|v| BigRational::from_f64(*v)).collect();
    let exact = simplex::solve(&a, &b, None, &BigRational::zero(), MAX_PIVOTS);
    let out = outcome_from(prob, &cols, exact)
        .ok_or_else(|| Error::NumericalFailure("exact simplex did not terminate".into()))?;
    if certified(prob, &out) {
        return Ok(out);
    }
    // exactly infeasible, but by less than the tolerance
    if !out.is_feasible() {
        if let Some(point) = least_violation_float(prob).or_else(|| least_violation_exact(prob)) {
            return Ok(FeasibilityOutcome::Feasible { point });
        }
    }
    Err(Error::NumericalFailure(match out {
        FeasibilityOutcome::Feasible { .. } => "feasible point fails validation after exact re-solve".into(),
        FeasibilityOutcome::Infeasible { .. } => "Farkas functional too weak after exact re-solve".into(),
    }))
}

/// `A x + s - t = b` with `s, t >= 0`, objective `sum (s + t)`.
fn violation_problem(prob: &LpProblem) -> (LpProblem, Vec<f64>) {
    let (m, n) = (prob.rows(), prob.vars());
    let a: Vec<Vec<f64>> = prob
        .a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..m).map(|l| if l == i { 1.0 } else { 0.0 }));
            r.extend((0..m).map(|l| if l == i { -1.0 } else { 0.0 }));
            r
        })
        .collect();
    let mut nonneg = prob.nonneg.clone();
    nonneg.extend(std::iter::repeat_n(true, 2 * m));
    let c = (0..n + 2 * m).map(|j| if j < n { 0.0 } else { 1.0 }).collect();
    (LpProblem { a, b: prob.b.clone(), nonneg }, c)
}

/// The minimizer of `sum |(A x - b)_i|`, when it validates at `FEAS_TOL`.
fn least_violation_float(prob: &LpProblem) -> Option<Vec<f64>> {
    let (aug, c) = violation_problem(prob);
    let point = float_point(&aug, Some(&c))?;
    let x = point[..prob.vars()].to_vec();
    prob.validate_point(&x).then_some(x)
}

fn least_violation_exact(prob: &LpProblem) -> Option<Vec<f64>> {
    let (aug, c) = violation_problem(prob);
    let cols = aug.standard_columns();
    let a: Vec<Vec<BigRational>> = aug.standard_matrix(&cols);
    let b: Vec<BigRational> = aug.b.iter().map(|v| BigRational::from_f64(*v)).collect();
    let cs: Vec<BigRational> = cols.iter().map(|&(j, s)| BigRational::from_f64(s * c[j])).collect();
    let SimplexOutcome::Optimal { x, .. } = simplex::solve(&a, &b, Some(&cs), &BigRational::zero(), MAX_PIVOTS) else {
        return None;
    };
    let x = aug.fold_solution(&cols, &x)[..prob.vars()].to_vec();
    prob.validate_point(&x).then_some(x)
}

/// `min c^T x` over the feasible set; `None` if infeasible or unbounded.
pub fn lp_minimize(prob: &LpProblem, c: &[f64]) -> Result<Option<(Vec<f64>, f64)>> {
    prob.check_shape()?;
    if c.len() != prob.vars() {
        return Err(Error::DimensionMismatch { expected: prob.vars(), found: c.len() });
    }
    let cols = prob.standard_columns();
    let a: Vec<Vec<f64>> = prob.standard_matrix(&cols);
    let cs: Vec<f64> = cols.iter().map(|&(j, s)| s * c[j]).collect();
    let scale = 1.0 + prob.b.iter().map(|v| v.abs()).sum::<f64>();
    match simplex::solve(&a, &prob.b, Some(&cs), &(1e-11 * scale), MAX_PIVOTS) {
        SimplexOutcome::Optimal { x, value, .. } => Ok(Some((prob.fold_solution(&cols, &x), value))),
        SimplexOutcome::Infeasible { .. } | SimplexOutcome::Unbounded => Ok(None),
        SimplexOutcome::IterationLimit => Err(Error::IterationLimit(MAX_PIVOTS)),
    }
}
