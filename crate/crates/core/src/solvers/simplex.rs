//! Dense two-phase primal simplex with Bland's rule, generic over the number
//! type so the same code runs in `f64` and in exact rationals.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub trait LpNum: Clone + Debug + PartialOrd + Signed {
    /// Entries with magnitude at or below this are treated as zero.
    fn pivot_eps() -> Self;
    /// Reduced costs must be below `-cost_eps` to enter.
    fn cost_eps() -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
}

impl LpNum for f64 {
    fn pivot_eps() -> Self {
        1e-11
    }
    fn cost_eps() -> Self {
        1e-12
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl LpNum for BigRational {
    fn pivot_eps() -> Self {
        BigRational::zero()
    }
    fn cost_eps() -> Self {
        BigRational::zero()
    }
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).unwrap_or_else(|| BigRational::from_integer(BigInt::zero()))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone)]
pub enum SimplexOutcome<T> {
    /// `basis` lists the original columns basic in live rows.
    Optimal {
        x: Vec<T>,
        value: T,
        basis: Vec<usize>,
    },
    /// Farkas functional: `y^T A <= 0`, `y^T b > 0`.
    Infeasible {
        y: Vec<T>,
        infeasibility: T,
    },
    Unbounded,
    IterationLimit,
}

struct Tableau<T> {
    rows: usize,
    cols: usize, // original + artificial columns
    n: usize,    // original columns
    t: Vec<Vec<T>>,
    obj: Vec<T>,
    obj_rhs: T,
    basis: Vec<usize>,
    live: Vec<bool>,
}

impl<T: LpNum> Tableau<T> {
    fn rhs(&self, i: usize) -> &T {
        &self.t[i][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c].clone();
        for v in self.t[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let prow = self.t[r].clone();
        for i in 0..self.rows {
            if i == r || !self.live[i] {
                continue;
            }
            let f = self.t[i][c].clone();
            if f.is_zero() {
                continue;
            }
            for (v, pv) in self.t[i].iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
            self.t[i][c] = T::zero();
        }
        let f = self.obj[c].clone();
        if !f.is_zero() {
            for (v, pv) in self.obj.iter_mut().zip(&prow[..self.cols]) {
                *v = v.clone() - f.clone() * pv.clone();
            }
            self.obj_rhs = self.obj_rhs.clone() - f * prow[self.cols].clone();
            self.obj[c] = T::zero();
        }
        self.basis[r] = c;
    }

    /// Bland's rule iterations on the current objective row. Columns for
    /// which `allowed` is false never enter. When the objective is known to
    /// be `bounded`, a column without a leaving row only has a rounding-level
    /// reduced cost and is skipped until the next pivot.
    fn run(&mut self, allowed: &dyn Fn(usize) -> bool, bounded: bool, max_iters: usize) -> Result<(), bool> {
        let eps_c = T::cost_eps();
        let eps_p = T::pivot_eps();
        let mut skipped = vec![false; self.cols];
        for _ in 0..max_iters {
            let entering = (0..self.cols).find(|&j| !skipped[j] && allowed(j) && self.obj[j] < -eps_c.clone());
            let Some(c) = entering else {
                return Ok(());
            };
            let mut best: Option<(usize, T)> = None;
            for i in 0..self.rows {
                if !self.live[i] || self.t[i][c] <= eps_p {
                    continue;
                }
                // rounding can leave a basic value slightly negative
                let rhs = if self.rhs(i).is_negative() { T::zero() } else { self.rhs(i).clone() };
                let ratio = rhs / self.t[i][c].clone();
                // ratios within eps_c of each other tie, so that rounding
                // noise cannot defeat the lowest-index rule
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        let slack = eps_c.clone() * (T::one() + br.abs());
                        ratio < br.clone() - slack.clone()
                            || (ratio <= br.clone() + slack && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                None if bounded => skipped[c] = true,
                // unbounded direction
                None => return Err(true),
                Some((r, _)) => {
                    self.pivot(r, c);
                    skipped.iter_mut().for_each(|s| *s = false);
                }
            }
        }
        Err(false)
    }
}

/// Solves `min c^T x` subject to `A x = b`, `x >= 0`. With `c = None` only
/// phase one runs and any feasible point is returned with value zero.
pub fn solve<T: LpNum>(a: &[Vec<T>], b: &[T], c: Option<&[T]>, feas_tol: &T, max_iters: usize) -> SimplexOutcome<T> {
    let m = a.len();
    let n = a.first().map_or(c.map_or(0, |c| c.len()), |r| r.len());
    let cols = n + m;
    let mut signs = vec![T::one(); m];
    let mut t = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = Vec::with_capacity(cols + 1);
        let flip = b[i].is_negative();
        if flip {
            signs[i] = -T::one();
        }
        for aij in &a[i][..n] {
            row.push(if flip { -aij.clone() } else { aij.clone() });
        }
        for k in 0..m {
            row.push(if k == i { T::one() } else { T::zero() });
        }
        row.push(if flip { -b[i].clone() } else { b[i].clone() });
        t.push(row);
    }
    let mut obj = vec![T::zero(); cols];
    let mut obj_rhs = T::zero();
    for row in &t {
        for j in 0..n {
            obj[j] = obj[j].clone() - row[j].clone();
        }
        obj_rhs = obj_rhs - row[cols].clone();
    }
    let mut tab = Tableau { rows: m, cols, n, t, obj, obj_rhs, basis: (n..n + m).collect(), live: vec![true; m] };

    // phase one is bounded below by zero
    if tab.run(&|_| true, true, max_iters).is_err() {
        return SimplexOutcome::IterationLimit;
    }
    let infeasibility = -tab.obj_rhs.clone();
    if infeasibility > *feas_tol {
        // y_i = 1 - reduced cost of artificial i, then undo the row flips.
        let y = (0..m).map(|i| (T::one() - tab.obj[n + i].clone()) * signs[i].clone()).collect();
        return SimplexOutcome::Infeasible { y, infeasibility };
    }

    // Drive zero-level artificials out of the basis; drop redundant rows.
    let eps_p = T::pivot_eps();
    for i in 0..m {
        if tab.basis[i] < n {
            continue;
        }
        match (0..n).find(|&j| tab.t[i][j].abs() > eps_p) {
            Some(j) => tab.pivot(i, j),
            None => tab.live[i] = false,
        }
    }

    let value = match c {
        None => T::zero(),
        Some(c) => {
            let mut obj = vec![T::zero(); cols];
            obj[..n].clone_from_slice(c);
            let mut obj_rhs = T::zero();
            for i in 0..m {
                if !tab.live[i] {
                    continue;
                }
                let cb = c[tab.basis[i]].clone();
                if cb.is_zero() {
                    continue;
                }
                for (o, tv) in obj.iter_mut().zip(&tab.t[i][..cols]) {
                    *o = o.clone() - cb.clone() * tv.clone();
                }
                obj_rhs = obj_rhs - cb * tab.t[i][cols].clone();
            }
            tab.obj = obj;
            tab.obj_rhs = obj_rhs;
            let n_orig = tab.n;
            match tab.run(&|j| j < n_orig, false, max_iters) {
                Ok(()) => {}
                Err(true) => return SimplexOutcome::Unbounded,
                Err(false) => return SimplexOutcome::IterationLimit,
            }
            -tab.obj_rhs.clone()
        }
    };
    let mut x = vec![T::zero(); n];
    for i in 0..m {
        if tab.live[i] && tab.basis[i] < n {
            x[tab.basis[i]] = tab.t[i][cols].clone();
        }
    }
    let basis = (0..m).filter(|&i| tab.live[i] && tab.basis[i] < n).map(|i| tab.basis[i]).collect();
    SimplexOutcome::Optimal { x, value, basis }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn feasible_unit_system() {
        let out = solve(&[vec![1.0]], &[1.0], None, &1e-9, 100);
        match out {
            SimplexOutcome::Optimal { x, .. } => assert_eq!(x, vec![1.0]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_sign_gives_farkas() {
        let out = solve(&[vec![1.0]], &[-1.0], None, &1e-9, 100);
        match out {
            SimplexOutcome::Infeasible { y, .. } => {
                // y^T A = y_0 <= 0 and y^T b = -y_0 > 0
                assert!(y[0] < 0.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn exact_minimization() {
        // min -x1 - x2 s.t. x1 + 2 x2 + s1 = 4, 3 x1 + x2 + s2 = 6
        let a = vec![vec![rat(1), rat(2), rat(1), rat(0)], vec![rat(3), rat(1), rat(0), rat(1)]];
        let b = vec![rat(4), rat(6)];
        let c = vec![rat(-1), rat(-1), rat(0), rat(0)];
        match solve(&a, &b, Some(&c), &BigRational::zero(), 100) {
            SimplexOutcome::Optimal { x, value, .. } => {
                assert_eq!(value, BigRational::new(BigInt::from(-14), BigInt::from(5)));
                assert_eq!(x[0], BigRational::new(BigInt::from(8), BigInt::from(5)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unbounded_detected() {
        // min -x1 s.t. x1 - x2 = 0
        let out = solve(&[vec![1.0, -1.0]], &[0.0], Some(&[-1.0, 0.0]), &1e-9, 100);
        assert!(matches!(out, SimplexOutcome::Unbounded));
    }
}
