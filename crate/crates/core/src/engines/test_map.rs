//! The equivariant test map on frames and the Carathéodory step at its
//! zeros.
//!
//! With `c_F` the frame coordinates of `p_{V,F}`, so `<v_i, p_{V,F}> =
//! conj(c_{F,i})`, block `i` of the map is
//! `(sum_F conj(c_{F,i}), sum_F conj(c_{F,i}) phi(F))`. Negating `v_i` negates
//! block `i` and nothing else.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::consistency::{subfamily_bound, PointAssignment};
use crate::error::{Error, Result};
use crate::geometry::{gram_schmidt, Frame, Polytope, ScalarField, Vector};
use crate::linalg::{hdot, CMat, CVec, C64};
use crate::solvers::caratheodory::reduce_with_tol;
use crate::solvers::DependencyTuple;

use super::stiefel::{evaluate, random_frame, restart_seed, tangent_projection, Evaluation, LiftedFamily};

/// Test-map norm below which a frame counts as a zero.
pub const ZERO_TOL: f64 = 1e-6;
/// `|p_{V,F}|` below this (relative to the lifted vertex scale) means the
/// projection of `F` contains the origin.
pub const CONTAINS_ORIGIN_TOL: f64 = 1e-9;

const SEARCH_RESTARTS: usize = 4;
const SEARCH_ITERS: usize = 200;
const FD_STEP: f64 = 1e-7;

fn check_inputs(frame: &Frame, lifted: &LiftedFamily, assignment: &PointAssignment) -> Result<()> {
    assignment.check_family(lifted.field, lifted.sets.len())?;
    if frame.field() != lifted.field {
        return Err(Error::FieldMismatch("frame and family fields differ".into()));
    }
    if frame.ambient_dim() != lifted.d + 1 {
        return Err(Error::DimensionMismatch { expected: lifted.d + 1, found: frame.ambient_dim() });
    }
    Ok(())
}

fn blocks_from(ev: &Evaluation, assignment: &PointAssignment, n: usize) -> Vec<Vector> {
    let k = assignment.k();
    (0..n)
        .map(|i| {
            let mut block = vec![C64::new(0.0, 0.0); k + 1];
            for (f, c) in ev.coords.iter().enumerate() {
                let a = c[i].conj();
                block[0] += a;
                let phi = assignment.image(f);
                for l in 0..k {
                    block[l + 1] += a * phi.entry(l);
                }
            }
            Vector::from_complex(assignment.field(), &block)
        })
        .collect()
}

/// The `d - k` blocks in `F^{k+1}`.
pub fn test_map(frame: &Frame, family: &[Polytope], assignment: &PointAssignment) -> Result<Vec<Vector>> {
    let lifted = LiftedFamily::new(family)?;
    check_inputs(frame, &lifted, assignment)?;
    let ev = evaluate(&frame.to_matrix(), &lifted)?;
    Ok(blocks_from(&ev, assignment, frame.len()))
}

pub fn test_map_norm(blocks: &[Vector]) -> f64 {
    blocks.iter().map(|b| b.norm_sq()).sum::<f64>().sqrt()
}

/// For singleton families the map vanishes exactly on frames orthogonal to
/// `Y_0 = sum_F x_F` and `Y_l = sum_F conj(phi_l(F)) x_F` (lifted points).
/// The returned frame spans a seeded choice inside that complement.
pub fn singleton_test_map_zero(family: &[Polytope], assignment: &PointAssignment, seed: u64) -> Result<Frame> {
    let lifted = LiftedFamily::new(family)?;
    assignment.check_family(lifted.field, family.len())?;
    if lifted.sets.iter().any(|s| s.len() != 1) {
        return Err(Error::InvalidInput("closed-form zero needs a singleton family".into()));
    }
    let (d, k) = (lifted.d, assignment.k());
    if k >= d {
        return Err(Error::InvalidRange { k, d });
    }
    let mut ys = vec![CVec::zeros(d + 1); k + 1];
    for (f, set) in lifted.sets.iter().enumerate() {
        let x = &set[0];
        ys[0] += x;
        let phi = assignment.image(f);
        for l in 0..k {
            ys[l + 1] += x * phi.entry(l).conj();
        }
    }
    let mut basis: Vec<CVec> = Vec::new();
    let reduce = |v: &CVec, basis: &[CVec]| {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in basis {
                let coef = hdot(&w, q);
                w -= q * coef;
            }
        }
        w
    };
    let scale = ys.iter().map(|y| y.norm()).fold(1.0, f64::max);
    for y in &ys {
        let w = reduce(y, &basis);
        let norm = w.norm();
        if norm > 1e-10 * scale {
            basis.push(w / C64::new(norm, 0.0));
        }
    }
    let span = basis.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while basis.len() < span + (d - k) {
        let g = CVec::from_fn(d + 1, |_, _| match lifted.field {
            ScalarField::Real => C64::new(rng.sample(StandardNormal), 0.0),
            ScalarField::Complex => C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)),
        });
        let w = reduce(&g, &basis);
        let norm = w.norm();
        if norm > 1e-6 * g.norm() {
            basis.push(w / C64::new(norm, 0.0));
        }
    }
    let vectors = basis[span..].iter().map(|c| Vector::from_cvec(lifted.field, c)).collect();
    Frame::new(lifted.field, d + 1, vectors)
}

fn map_norm_sq(w: &CMat, lifted: &LiftedFamily, assignment: &PointAssignment) -> Result<f64> {
    let ev = evaluate(w, lifted)?;
    Ok(blocks_from(&ev, assignment, w.ncols()).iter().map(|b| b.norm_sq()).sum())
}

/// Central-difference gradient of `|T|^2` in the ambient coordinates.
fn fd_gradient(w: &CMat, lifted: &LiftedFamily, assignment: &PointAssignment) -> Result<CMat> {
    let parts: &[C64] = match lifted.field {
        ScalarField::Real => &[C64::new(1.0, 0.0)],
        ScalarField::Complex => &[C64::new(1.0, 0.0), C64::new(0.0, 1.0)],
    };
    let mut g = CMat::zeros(w.nrows(), w.ncols());
    for r in 0..w.nrows() {
        for c in 0..w.ncols() {
            for &dir in parts {
                let mut plus = w.clone();
                plus[(r, c)] += dir * FD_STEP;
                let mut minus = w.clone();
                minus[(r, c)] -= dir * FD_STEP;
                let slope = (map_norm_sq(&plus, lifted, assignment)? - map_norm_sq(&minus, lifted, assignment)?)
                    / (2.0 * FD_STEP);
                g[(r, c)] += dir * slope;
            }
        }
    }
    Ok(g)
}

/// A frame where the test map vanishes to [`ZERO_TOL`]: closed form for
/// singleton families, seeded numerical minimization of `|T|^2` otherwise.
/// `None` when the search ends above the tolerance.
pub fn find_test_map_zero(family: &[Polytope], assignment: &PointAssignment, seed: u64) -> Result<Option<Frame>> {
    let lifted = LiftedFamily::new(family)?;
    assignment.check_family(lifted.field, family.len())?;
    let (d, k) = (lifted.d, assignment.k());
    if k >= d {
        return Err(Error::InvalidRange { k, d });
    }
    if lifted.sets.iter().all(|s| s.len() == 1) {
        return singleton_test_map_zero(family, assignment, seed).map(Some);
    }
    let n = d - k;
    for r in 0..SEARCH_RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(seed, r));
        let mut w = random_frame(lifted.field, d + 1, n, &mut rng).to_matrix();
        let mut h = map_norm_sq(&w, &lifted, assignment)?;
        let mut t = 1.0;
        for _ in 0..SEARCH_ITERS {
            if h < ZERO_TOL * ZERO_TOL * 1e-4 {
                break;
            }
            let z = tangent_projection(&w, &fd_gradient(&w, &lifted, assignment)?);
            let zz: f64 = z.iter().map(|x| x.norm_sqr()).sum();
            if zz < 1e-30 {
                break;
            }
            let mut accepted = false;
            for _ in 0..40 {
                let cand = gram_schmidt(&(&w - &z * C64::new(t, 0.0)));
                let hc = map_norm_sq(&cand, &lifted, assignment)?;
                if hc <= h - 1e-4 * t * zz {
                    w = cand;
                    h = hc;
                    t *= 2.0;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if h.sqrt() < ZERO_TOL {
            return Ok(Some(Frame::from_matrix(lifted.field, &w)));
        }
    }
    Ok(None)
}

/// A subfamily of the sets whose projections miss the origin, at most
/// `subfamily_bound` of them, with positive weights `a_F` summing to one and
/// the tuple `a_F^{(i)} = a_F <v_i, p_{V,F}>`.
#[derive(Debug, Clone, PartialEq)]
pub struct CaratheodoryExtraction {
    pub subfamily: Vec<usize>,
    pub weights: Vec<f64>,
    pub tuple: DependencyTuple,
}

pub fn extract_caratheodory_subfamily(
    frame: &Frame,
    family: &[Polytope],
    assignment: &PointAssignment,
) -> Result<CaratheodoryExtraction> {
    let lifted = LiftedFamily::new(family)?;
    check_inputs(frame, &lifted, assignment)?;
    let field = lifted.field;
    let n = frame.len();
    let ev = evaluate(&frame.to_matrix(), &lifted)?;
    let norm = blocks_from(&ev, assignment, n).iter().map(|b| b.norm_sq()).sum::<f64>().sqrt();
    if norm >= ZERO_TOL {
        return Err(Error::InvalidInput(format!("frame is not a test-map zero (norm {norm:.3e})")));
    }
    let scale = lifted.sets.iter().flatten().map(|x| x.norm()).fold(1.0, f64::max);
    let g: Vec<usize> = (0..family.len()).filter(|&f| ev.coords[f].norm() > CONTAINS_ORIGIN_TOL * scale).collect();
    if g.is_empty() {
        return Err(Error::AllProjectionsContainOrigin);
    }
    let k = assignment.k();
    let points: Vec<Vec<f64>> = g
        .iter()
        .map(|&f| {
            let phi = assignment.image(f);
            let mut out = Vec::new();
            for i in 0..n {
                let a = ev.coords[f][i].conj();
                let mut entries = vec![a];
                entries.extend((0..k).map(|l| a * phi.entry(l)));
                for z in entries {
                    out.push(z.re);
                    if field == ScalarField::Complex {
                        out.push(z.im);
                    }
                }
            }
            out
        })
        .collect();
    let uniform = vec![1.0 / g.len() as f64; g.len()];
    let red = reduce_with_tol(&points, &uniform, ZERO_TOL, ZERO_TOL)?;
    let mut order: Vec<usize> = (0..red.indices.len()).collect();
    order.sort_by_key(|&j| g[red.indices[j]]);
    let subfamily: Vec<usize> = order.iter().map(|&j| g[red.indices[j]]).collect();
    let weights: Vec<f64> = order.iter().map(|&j| red.weights[j]).collect();
    let components = (0..n)
        .map(|i| {
            let entries: Vec<C64> = subfamily.iter().zip(&weights).map(|(&f, &w)| ev.coords[f][i].conj() * w).collect();
            Vector::from_complex(field, &entries)
        })
        .collect();
    let tuple = DependencyTuple::new(field, subfamily.clone(), components)?;
    debug_assert!(subfamily.len() <= subfamily_bound(k, lifted.d, field).unwrap_or(usize::MAX));
    Ok(CaratheodoryExtraction { subfamily, weights, tuple })
}
