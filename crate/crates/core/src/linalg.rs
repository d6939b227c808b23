//! Small dense helpers shared by the geometry and solver modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Real 2x2-block form of a complex matrix, matching the interleaved
/// (re, im) storage of complex vectors.
pub fn realify(m: &CMat) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(2 * m.nrows(), 2 * m.ncols());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            out[(2 * r, 2 * c)] = z.re;
            out[(2 * r, 2 * c + 1)] = -z.im;
            out[(2 * r + 1, 2 * c)] = z.im;
            out[(2 * r + 1, 2 * c + 1)] = z.re;
        }
    }
    out
}

/// Singular values of `m`, padded with zero rows so that there is one value
/// per column.
fn padded_svd(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let cols = m.ncols();
    let rows = m.nrows().max(cols);
    let mut padded = DMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    (svd.singular_values, v_t)
}

/// Orthonormal basis of the null space of `m`; singular values below
/// `tol * max(1, sigma_max)` count as zero.
pub fn real_null_space(m: &DMatrix<f64>, tol: f64) -> Vec<DVector<f64>> {
    let cols = m.ncols();
    if cols == 0 {
        return Vec::new();
    }
    if m.nrows() == 0 {
        return (0..cols)
            .map(|j| {
                let mut e = DVector::zeros(cols);
                e[j] = 1.0;
                e
            })
            .collect();
    }
    let (sv, v_t) = padded_svd(m);
    let cutoff = tol * sv.max().max(1.0);
    let mut basis: Vec<(usize, DVector<f64>)> =
        (0..sv.len()).filter(|&i| sv[i] <= cutoff).map(|i| (i, v_t.row(i).transpose())).collect();
    basis.sort_by_key(|(i, _)| *i);
    basis.into_iter().map(|(_, v)| v).collect()
}

/// Numerical rank with the same relative threshold as [`real_null_space`].
pub fn real_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let cutoff = tol * sv.max().max(1.0);
    sv.iter().filter(|&&s| s > cutoff).count()
}

/// Complex rank: half the rank of the realified matrix.
pub fn complex_rank(m: &CMat, tol: f64) -> usize {
    real_rank(&realify(m), tol) / 2
}

pub fn real_to_complex(v: &DVector<f64>) -> CVec {
    CVec::from_iterator(v.len() / 2, (0..v.len() / 2).map(|j| C64::new(v[2 * j], v[2 * j + 1])))
}

pub fn complex_to_real(v: &CVec) -> DVector<f64> {
    DVector::from_iterator(2 * v.len(), v.iter().flat_map(|z| [z.re, z.im]))
}

/// Hermitian product, linear in the first argument.
pub fn hdot(x: &CVec, y: &CVec) -> C64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b.conj()).sum()
}

/// Least-squares solution of `m x = b` via the pseudo-inverse.
pub fn lstsq(m: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let svd = m.clone().svd(true, true);
    let eps = 1e-12 * svd.singular_values.max().max(1e-300);
    svd.solve(b, eps).unwrap_or_else(|_| DVector::zeros(m.ncols()))
}

/// `argmin ||m x - b||` over `x >= 0` by the Lawson-Hanson active-set
/// method.
pub fn nnls(m: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = m.ncols();
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let tol = 1e-13 * (1.0 + m.abs().max()) * (1.0 + b.abs().max());
    let solve_passive = |passive: &[bool]| {
        let idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
        let sub = DMatrix::from_fn(m.nrows(), idx.len(), |i, k| m[(i, idx[k])]);
        let zs = lstsq(&sub, b);
        let mut z = DVector::zeros(n);
        for (k, &j) in idx.iter().enumerate() {
            z[j] = zs[k];
        }
        z
    };
    for _ in 0..3 * n.max(1) {
        let w = m.transpose() * (b - m * &x);
        let Some(j) = (0..n).filter(|&j| !passive[j] && w[j] > tol).max_by(|&i, &j| w[i].total_cmp(&w[j])) else {
            break;
        };
        passive[j] = true;
        loop {
            let z = solve_passive(&passive);
            let blocking: Vec<usize> = (0..n).filter(|&i| passive[i] && z[i] <= 0.0).collect();
            if blocking.is_empty() {
                x = z;
                break;
            }
            let alpha = blocking.iter().map(|&i| x[i] / (x[i] - z[i])).fold(f64::INFINITY, f64::min);
            x += (z - &x) * alpha;
            for i in 0..n {
                if passive[i] && x[i] <= tol {
                    passive[i] = false;
                    x[i] = 0.0;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nnls_clamps_at_the_boundary() {
        // unconstrained solution (-1, 2) has a negative entry
        let m = DMatrix::<f64>::identity(2, 2);
        let x = nnls(&m, &DVector::from_vec(vec![-1.0, 2.0]));
        assert_eq!(x.as_slice(), &[0.0, 2.0]);
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 1.0, 0.0, 1.0, 1.0]);
        let x = nnls(&m, &DVector::from_vec(vec![1.0, 1.0]));
        assert!((m * &x - DVector::from_vec(vec![1.0, 1.0])).norm() < 1e-12);
        assert!(x.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]);
        let ns = real_null_space(&m, 1e-9);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!((m.clone() * v).norm() < 1e-12);
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
        assert!(ns[0].dot(&ns[1]).abs() < 1e-12);
    }

    #[test]
    fn realify_matches_complex_product() {
        let m = CMat::from_row_slice(1, 2, &[C64::new(1.0, 2.0), C64::new(-0.5, 0.25)]);
        let x = CVec::from_vec(vec![C64::new(0.3, -1.0), C64::new(2.0, 0.5)]);
        let direct = complex_to_real(&(m.clone() * x.clone()));
        let via = realify(&m) * complex_to_real(&x);
        assert!((direct - via).norm() < 1e-14);
    }

    #[test]
    fn complex_rank_of_scaled_rows() {
        let i = C64::new(0.0, 1.0);
        let m = CMat::from_row_slice(2, 2, &[C64::new(1.0, 0.0), i, i, C64::new(-1.0, 0.0)]);
        assert_eq!(complex_rank(&m, 1e-9), 1);
    }
}
