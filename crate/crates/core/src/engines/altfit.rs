//! Baseline engine: alternate nearest points `q_F in F` to the current flat
//! with a top-k affine principal-subspace fit of the `q_F`. Both half-steps
//! minimize `sum_F |q_F - pi(q_F)|^2`, so the objective never increases.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{AffineFlat, Frame, Polytope, Vector};
use crate::linalg::{CMat, CVec, C64};
use crate::solvers::stab_certificate;

use super::stiefel::{orthogonal_frame_of_flat, restart_seed, POLISH_GATE, SLOW_TAIL};
use super::verify::{translate_to_transversal, verify_transversal};
use super::{EngineOpts, EngineOutcome, EngineReport, RestartLog};

/// Relative slack allowed in the monotonicity check.
pub const MONOTONE_SLACK: f64 = 1e-12;

/// Best-fitting affine `k`-flat of the points in the least-squares sense.
pub fn affine_pca(points: &[Vector], k: usize) -> Result<AffineFlat> {
    let first = points.first().ok_or_else(|| Error::InvalidInput("no points to fit".into()))?;
    let (field, d) = (first.field(), first.dim());
    if k > d {
        return Err(Error::InvalidRange { k, d });
    }
    let m = points.len() as f64;
    let mut mean = CVec::zeros(d);
    for p in points {
        mean += p.to_cvec();
    }
    mean /= C64::new(m, 0.0);
    let base = Vector::from_cvec(field, &mean);
    if k == 0 {
        return Ok(AffineFlat::point(base));
    }
    // columns are the centered points, padded so the SVD has d left vectors
    let cols = points.len().max(d);
    let mut x = CMat::zeros(d, cols);
    for (c, p) in points.iter().enumerate() {
        x.set_column(c, &(p.to_cvec() - &mean));
    }
    let svd = x.svd(true, false);
    let u = svd.u.expect("u requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]).then(a.cmp(&b)));
    let dirs: Vec<Vector> = order[..k].iter().map(|&c| Vector::from_cvec(field, &u.column(c).into_owned())).collect();
    let frame = crate::geometry::orthonormalize(&dirs, field)?;
    AffineFlat::new(base, frame)
}

fn random_point(p: &Polytope, rng: &mut ChaCha8Rng) -> Vector {
    let mut w: Vec<f64> = (0..p.len()).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    for x in w.iter_mut() {
        *x /= s;
    }
    p.combination(&w)
}

/// Multi-start alternating fit. The per-iteration objective trace is checked
/// for monotonicity; a violation is reported as an error.
pub fn alternating_flat_fit(family: &[Polytope], k: usize, opts: &EngineOpts) -> Result<EngineReport> {
    let first = family.first().ok_or_else(|| Error::InvalidInput("empty family".into()))?;
    let d = first.ambient_dim();
    if k >= d {
        return Err(Error::InvalidRange { k, d });
    }
    let mut log = Vec::with_capacity(opts.restarts);
    let mut best: Option<(f64, AffineFlat)> = None;
    let mut total = 0;
    for r in 0..opts.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(opts.seed, r));
        let start: Vec<Vector> = family.iter().map(|p| random_point(p, &mut rng)).collect();
        let mut flat = affine_pca(&start, k)?;
        let mut prev = f64::INFINITY;
        let mut value = f64::INFINITY;
        let mut iterations = 0;
        let mut polish_below = POLISH_GATE;
        let mut found = None;
        while iterations < opts.max_iters {
            iterations += 1;
            let certs = family.iter().map(|p| stab_certificate(&flat, p)).collect::<Result<Vec<_>>>()?;
            value = certs.iter().map(|c| c.distance * c.distance).sum();
            if value > prev + MONOTONE_SLACK * prev.max(1.0) {
                return Err(Error::InvariantViolation(format!(
                    "alternating fit objective rose from {prev:.6e} to {value:.6e}"
                )));
            }
            if value < opts.tol {
                let check = verify_transversal(&flat, family, opts.tol.sqrt() + 1e-10)?;
                if check.passes {
                    found = Some((flat.clone(), check.residual));
                }
                break;
            }
            let decrease = prev - value;
            if value < polish_below && decrease <= SLOW_TAIL * prev {
                // slow tail of the alternation: keep the directions, solve for the offset
                found = translate_to_transversal(family, flat.directions())?;
                if found.is_some() {
                    break;
                }
                polish_below = value / 2.0;
            }
            if prev.is_finite() && decrease <= 1e-15 * prev.max(1.0) {
                break;
            }
            prev = value;
            let qs: Vec<Vector> = certs.into_iter().map(|c| c.point).collect();
            flat = affine_pca(&qs, k)?;
        }
        total += iterations;
        log.push(RestartLog { restart: r, value, iterations });
        if let Some((flat, residual)) = found {
            return Ok(EngineReport {
                outcome: EngineOutcome::Found { flat, residual, restart: r },
                iterations: total,
                seed: opts.seed,
            });
        }
        if best.as_ref().is_none_or(|(v, _)| value < *v) {
            best = Some((value, flat));
        }
    }
    let (best_value, flat) = best.expect("at least one restart");
    let frame: Option<Frame> = orthogonal_frame_of_flat(&flat).ok();
    Ok(EngineReport {
        outcome: EngineOutcome::NotFound { best_value, frame, restart_log: log },
        iterations: total,
        seed: opts.seed,
    })
}
