//! Wolfe's minimum-norm-point algorithm for the convex hull of finitely many
//! points, run on the realified coordinates.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{ScalarField, Vector};

const MAX_ITERS: usize = 100_000;

/// Nearest point of `conv(vertices)` to the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct MinNormResult {
    pub point: Vector,
    /// Convex weights over the input vertices.
    pub coefficients: Vec<f64>,
    /// Indices with positive weight (the final corral).
    pub support: Vec<usize>,
}

impl MinNormResult {
    pub fn norm_sq(&self) -> f64 {
        self.point.norm_sq()
    }

    /// `min_j <p, v_j - p>_R`; nonnegative at the optimum.
    pub fn optimality_gap(&self, vertices: &[Vector]) -> f64 {
        optimality_gap(self.point.coords(), vertices.iter().map(|v| v.coords()))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn optimality_gap<'a>(p: &[f64], vs: impl Iterator<Item = &'a [f64]>) -> f64 {
    let pp = dot(p, p);
    vs.map(|v| dot(p, v) - pp).fold(f64::INFINITY, f64::min)
}

/// Weights `alpha` (summing to one) of the point of the affine hull of the
/// corral nearest to the origin.
fn affine_minimizer(pts: &[&[f64]]) -> Vec<f64> {
    let m = pts.len();
    if m == 1 {
        return vec![1.0];
    }
    let dim = pts[0].len();
    // x = p0 + Q beta, minimize |x|  =>  Q beta ~ -p0 in least squares
    let q = DMatrix::from_fn(dim, m - 1, |r, c| pts[c + 1][r] - pts[0][r]);
    let rhs = -DVector::from_column_slice(pts[0]);
    let beta = crate::linalg::lstsq(&q, &rhs);
    let mut alpha = Vec::with_capacity(m);
    alpha.push(1.0 - beta.sum());
    alpha.extend(beta.iter().copied());
    alpha
}

/// Computes the minimum-norm point of `conv(vertices)`.
pub fn min_norm_point(vertices: &[Vector]) -> Result<MinNormResult> {
    let first = vertices.first().ok_or_else(|| Error::InvalidInput("min-norm point of an empty set".into()))?;
    let field = first.field();
    let rdim = first.coords().len();
    if vertices.iter().any(|v| v.coords().len() != rdim) {
        return Err(Error::DimensionMismatch { expected: rdim, found: 0 });
    }
    let pts: Vec<&[f64]> = vertices.iter().map(|v| v.coords()).collect();
    let (weights, support) = wolfe(&pts)?;
    let mut coords = vec![0.0; rdim];
    for (&w, p) in weights.iter().zip(&pts) {
        if w != 0.0 {
            for (c, x) in coords.iter_mut().zip(p.iter()) {
                *c += w * x;
            }
        }
    }
    Ok(MinNormResult { point: vector_from(field, coords), coefficients: weights, support })
}

fn vector_from(field: ScalarField, coords: Vec<f64>) -> Vector {
    Vector::new(field, coords).expect("finite combination")
}

/// Wolfe's method on raw real points; returns full-length convex weights and
/// the support set.
pub(crate) fn wolfe(pts: &[&[f64]]) -> Result<(Vec<f64>, Vec<usize>)> {
    let n = pts.len();
    let dim = pts[0].len();
    let scale = pts.iter().map(|p| dot(p, p)).fold(1.0f64, f64::max);
    let tol = 1e-13 * scale;

    let start = (0..n).min_by(|&a, &b| dot(pts[a], pts[a]).total_cmp(&dot(pts[b], pts[b]))).expect("nonempty");
    let mut corral: Vec<usize> = vec![start];
    let mut lambda: Vec<f64> = vec![1.0];
    let mut x: Vec<f64> = pts[start].to_vec();

    let combine = |corral: &[usize], lambda: &[f64]| {
        let mut x = vec![0.0; dim];
        for (&i, &l) in corral.iter().zip(lambda) {
            for (c, v) in x.iter_mut().zip(pts[i]) {
                *c += l * v;
            }
        }
        x
    };

    let mut iters = 0;
    loop {
        iters += 1;
        if iters > MAX_ITERS {
            return Err(Error::IterationLimit(MAX_ITERS));
        }
        let xx = dot(&x, &x);
        let (j, best) = (0..n).map(|j| (j, dot(&x, pts[j]))).min_by(|a, b| a.1.total_cmp(&b.1)).expect("nonempty");
        if xx - best <= tol || corral.contains(&j) {
            break;
        }
        corral.push(j);
        lambda.push(0.0);

        // minor cycles
        loop {
            iters += 1;
            if iters > MAX_ITERS {
                return Err(Error::IterationLimit(MAX_ITERS));
            }
            let sub: Vec<&[f64]> = corral.iter().map(|&i| pts[i]).collect();
            let alpha = affine_minimizer(&sub);
            if alpha.iter().all(|&a| a > 1e-14) {
                lambda = alpha;
                break;
            }
            let mut theta: f64 = 1.0;
            for (&a, &l) in alpha.iter().zip(&lambda) {
                if a <= 1e-14 && l - a > 0.0 {
                    theta = theta.min(l / (l - a));
                }
            }
            for (l, a) in lambda.iter_mut().zip(&alpha) {
                *l = theta * a + (1.0 - theta) * *l;
            }
            let mut keep_c = Vec::with_capacity(corral.len());
            let mut keep_l = Vec::with_capacity(corral.len());
            for (&c, &l) in corral.iter().zip(&lambda) {
                if l > 1e-14 {
                    keep_c.push(c);
                    keep_l.push(l);
                }
            }
            if keep_c.is_empty() {
                return Err(Error::NumericalFailure("Wolfe corral emptied".into()));
            }
            corral = keep_c;
            lambda = keep_l;
        }
        let total: f64 = lambda.iter().sum();
        for l in lambda.iter_mut() {
            *l /= total;
        }
        let next = combine(&corral, &lambda);
        // guard against stalling on rounding noise
        let stalled = dot(&next, &next) >= xx * (1.0 - 1e-15) && iters > 4 * n + 16;
        x = next;
        if stalled {
            break;
        }
    }

    let mut weights = vec![0.0; n];
    for (&c, &l) in corral.iter().zip(&lambda) {
        weights[c] += l;
    }
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    let mut support: Vec<usize> = corral;
    support.sort_unstable();
    Ok((weights, support))
}
