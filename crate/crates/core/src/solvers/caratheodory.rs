//! Carathéodory reduction of a convex combination equal to zero.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{lstsq, real_null_space};

/// Reduced support and its convex weights.
#[derive(Debug, Clone, PartialEq)]
pub struct CaratheodoryReduction {
    pub indices: Vec<usize>,
    pub weights: Vec<f64>,
}

/// Given real points with convex weights whose weighted sum vanishes, returns
/// at most `N + 1` of them (`N` the dimension) with new convex weights whose
/// weighted sum still vanishes.
pub fn caratheodory_reduce(points: &[Vec<f64>], weights: &[f64]) -> Result<CaratheodoryReduction> {
    reduce_with_tol(points, weights, 1e-9, 1e-8)
}

/// As [`caratheodory_reduce`] with explicit precondition and postcondition
/// tolerances on the weighted sum.
pub(crate) fn reduce_with_tol(
    points: &[Vec<f64>],
    weights: &[f64],
    pre_tol: f64,
    post_tol: f64,
) -> Result<CaratheodoryReduction> {
    if points.is_empty() || points.len() != weights.len() {
        return Err(Error::InvalidInput("points and weights must be nonempty and aligned".into()));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::InvalidInput("points of different dimensions".into()));
    }
    if weights.iter().any(|w| *w < -1e-12 || !w.is_finite()) {
        return Err(Error::InvalidInput("weights must be nonnegative".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!("weights sum to {total}, not 1")));
    }
    let initial = weighted_sum_norm(points, weights, &(0..points.len()).collect::<Vec<_>>());
    if initial > pre_tol {
        return Err(Error::InvalidInput(format!("weighted sum is not zero (norm {initial:.3e})")));
    }

    let mut idx: Vec<usize> = (0..points.len()).filter(|&i| weights[i] > 0.0).collect();
    let mut w: Vec<f64> = idx.iter().map(|&i| weights[i]).collect();

    while idx.len() > dim + 1 {
        // affine dependence mu: sum mu_i p_i = 0, sum mu_i = 0
        let m = DMatrix::from_fn(dim + 1, idx.len(), |r, c| if r < dim { points[idx[c]][r] } else { 1.0 });
        let null = real_null_space(&m, 1e-12);
        let mu = match null.into_iter().next() {
            Some(mu) => mu,
            None => {
                // more columns than rows always leaves a null vector; fall back to the last one
                let svd = m.clone().svd(false, true);
                svd.v_t.expect("v_t").row(idx.len() - 1).transpose()
            }
        };
        let mu = if mu.iter().any(|v| *v > 0.0) { mu } else { -mu };
        let mut t = f64::INFINITY;
        let mut drop = 0;
        for (i, (&wi, &mi)) in w.iter().zip(mu.iter()).enumerate() {
            if mi > 1e-15 && wi / mi < t {
                t = wi / mi;
                drop = i;
            }
        }
        for (wi, mi) in w.iter_mut().zip(mu.iter()) {
            *wi -= t * mi;
        }
        w[drop] = 0.0;
        let keep: Vec<usize> = (0..idx.len()).filter(|&i| w[i] > 1e-15).collect();
        idx = keep.iter().map(|&i| idx[i]).collect();
        w = keep.iter().map(|&i| w[i]).collect();
        let s: f64 = w.iter().sum();
        for wi in w.iter_mut() {
            *wi /= s;
        }
    }

    polish(points, &idx, &mut w);
    let residual = weighted_sum_norm(points, &w, &idx);
    if residual > post_tol.max(2.0 * initial) {
        return Err(Error::NumericalFailure(format!("reduction residual {residual:.3e}")));
    }
    Ok(CaratheodoryReduction { indices: idx, weights: w })
}

/// Re-solves for the weights on the final support when that improves the
/// residual and keeps them positive.
fn polish(points: &[Vec<f64>], idx: &[usize], w: &mut Vec<f64>) {
    let dim = points[0].len();
    let m = DMatrix::from_fn(dim + 1, idx.len(), |r, c| if r < dim { points[idx[c]][r] } else { 1.0 });
    let mut rhs = DVector::zeros(dim + 1);
    rhs[dim] = 1.0;
    let cand = lstsq(&m, &rhs);
    if cand.iter().all(|v| *v > 0.0) {
        let cand: Vec<f64> = cand.iter().copied().collect();
        if weighted_sum_norm(points, &cand, idx) < weighted_sum_norm(points, w, idx) {
            let s: f64 = cand.iter().sum();
            *w = cand.into_iter().map(|v| v / s).collect();
        }
    }
}

fn weighted_sum_norm(points: &[Vec<f64>], w: &[f64], idx: &[usize]) -> f64 {
    let dim = points[0].len();
    let mut acc = vec![0.0; dim];
    for (&i, &wi) in idx.iter().zip(w) {
        for (a, p) in acc.iter_mut().zip(&points[i]) {
            *a += wi * p;
        }
    }
    acc.iter().map(|a| a * a).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn two_points_on_a_line_unchanged() {
        let r = caratheodory_reduce(&[vec![1.0], vec![-1.0]], &[0.5, 0.5]).unwrap();
        assert_eq!(r.indices, vec![0, 1]);
        assert!((r.weights[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn symmetric_points_reduce_to_two() {
        let pts: Vec<Vec<f64>> = [-2.0, -1.0, 1.0, 2.0].iter().map(|&x| vec![x]).collect();
        let w = [0.25, 0.25, 0.25, 0.25];
        let mean: f64 = pts.iter().zip(&w).map(|(p, wi)| p[0] * wi).sum();
        assert!(mean.abs() < 1e-12);
        let r = caratheodory_reduce(&pts, &w).unwrap();
        assert!(r.indices.len() <= 2);
    }

    #[test]
    fn rejects_nonzero_sum() {
        assert!(matches!(caratheodory_reduce(&[vec![1.0], vec![2.0]], &[0.5, 0.5]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn random_instances_in_r3() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..50 {
            // weights first, then points shifted so the weighted mean is zero
            let raw: Vec<f64> = (0..10).map(|_| rng.random_range(0.05..1.0)).collect();
            let s: f64 = raw.iter().sum();
            let w: Vec<f64> = raw.iter().map(|v| v / s).collect();
            let mut pts: Vec<Vec<f64>> =
                (0..10).map(|_| (0..3).map(|_| rng.sample(StandardNormal)).collect()).collect();
            let mean: Vec<f64> = (0..3).map(|c| pts.iter().zip(&w).map(|(p, wi)| p[c] * wi).sum()).collect();
            for p in pts.iter_mut() {
                for (x, m) in p.iter_mut().zip(&mean) {
                    *x -= m;
                }
            }
            let r = caratheodory_reduce(&pts, &w).unwrap();
            assert!(r.indices.len() <= 4, "trial {trial}");
            assert!(r.weights.iter().all(|&x| x > 0.0));
            assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(weighted_sum_norm(&pts, &r.weights, &r.indices) < 1e-8);
        }
    }
}
