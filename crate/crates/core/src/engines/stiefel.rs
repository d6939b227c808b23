//! Descent on orthonormal `(d - k)`-frames in `F^{d+1}` for the objective
//! `g(V) = sum_F |p_{V,F}|^2`, where `p_{V,F}` is the point of the projection
//! of the lifted set onto `V` nearest to the origin. Zeros of `g` with
//! `e_{d+1}` outside `V` are exactly the frames whose orthogonal complement
//! cuts a transversal out of the slice `F^d + e_{d+1}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{flat_from_orthogonal_frame, gram_schmidt, AffineFlat, Frame, Polytope, ScalarField, Vector};
use crate::linalg::{hdot, CMat, CVec, C64};
use crate::solvers::min_norm::wolfe;

use super::verify::{translate_to_transversal, verify_transversal};
use super::{EngineOpts, EngineOutcome, EngineReport, RestartLog};

const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;
/// Frames whose span carries more than `1 - SLICE_GUARD` of `e_{d+1}` get a
/// random tangent kick.
const SLICE_GUARD: f64 = 1e-6;
const KICK: f64 = 1e-6;
/// Below this objective a slowly converging run gets an LP fit of the
/// offset along its current directions.
pub const POLISH_GATE: f64 = 1e-4;
/// Relative per-iteration decrease that counts as slow convergence.
pub(crate) const SLOW_TAIL: f64 = 1e-2;

/// A family lifted to the slice `F^d + e_{d+1}`, stored as complex columns.
#[derive(Debug, Clone)]
pub struct LiftedFamily {
    pub field: ScalarField,
    pub d: usize,
    pub sets: Vec<Vec<CVec>>,
}

impl LiftedFamily {
    pub fn new(family: &[Polytope]) -> Result<Self> {
        let first = family.first().ok_or_else(|| Error::InvalidInput("empty family".into()))?;
        let (field, d) = (first.field(), first.ambient_dim());
        let mut sets = Vec::with_capacity(family.len());
        for p in family {
            if p.field() != field {
                return Err(Error::FieldMismatch("family over mixed fields".into()));
            }
            if p.ambient_dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: p.ambient_dim() });
            }
            sets.push(
                p.vertices()
                    .iter()
                    .map(|v| CVec::from_iterator(d + 1, (0..d).map(|j| v.entry(j)).chain([C64::new(1.0, 0.0)])))
                    .collect(),
            );
        }
        Ok(LiftedFamily { field, d, sets })
    }
}

/// Per-set min-norm data at a frame matrix `W`: frame coordinates `c_F` of
/// `p_{V,F}` and the convex weights realizing it.
#[derive(Debug, Clone)]
pub(crate) struct Evaluation {
    pub value: f64,
    pub coords: Vec<CVec>,
    pub weights: Vec<Vec<f64>>,
}

fn realified(field: ScalarField, v: &CVec) -> Vec<f64> {
    match field {
        ScalarField::Real => v.iter().map(|z| z.re).collect(),
        ScalarField::Complex => v.iter().flat_map(|z| [z.re, z.im]).collect(),
    }
}

/// `c_j = W^H x_j` for every lifted vertex, then the min-norm point of their
/// hull; `W` need not be orthonormal.
pub(crate) fn evaluate(w: &CMat, lifted: &LiftedFamily) -> Result<Evaluation> {
    let n = w.ncols();
    let wh = w.adjoint();
    let mut value = 0.0;
    let mut coords = Vec::with_capacity(lifted.sets.len());
    let mut weights = Vec::with_capacity(lifted.sets.len());
    for set in &lifted.sets {
        let ys: Vec<CVec> = set.iter().map(|x| &wh * x).collect();
        let flat: Vec<Vec<f64>> = ys.iter().map(|y| realified(lifted.field, y)).collect();
        let refs: Vec<&[f64]> = flat.iter().map(|v| v.as_slice()).collect();
        let (lambda, _) = wolfe(&refs)?;
        let mut c = CVec::zeros(n);
        for (l, y) in lambda.iter().zip(&ys) {
            if *l != 0.0 {
                c += y * C64::new(*l, 0.0);
            }
        }
        value += c.norm_squared();
        coords.push(c);
        weights.push(lambda);
    }
    Ok(Evaluation { value, coords, weights })
}

/// Objective value at a frame together with the nearest points.
#[derive(Debug, Clone, PartialEq)]
pub struct StiefelState {
    pub frame: Frame,
    pub value: f64,
    /// `p_{V,F}` in frame coordinates, one per set.
    pub nearest: Vec<Vector>,
    /// Convex weights of `p_{V,F}` over the set's vertices.
    pub weights: Vec<Vec<f64>>,
}

impl StiefelState {
    /// `|g - sum |p_{V,F}|^2|`.
    pub fn consistency_error(&self) -> f64 {
        (self.value - self.nearest.iter().map(|p| p.norm_sq()).sum::<f64>()).abs()
    }
}

fn check_frame(frame: &Frame, lifted: &LiftedFamily) -> Result<()> {
    if frame.field() != lifted.field {
        return Err(Error::FieldMismatch("frame and family fields differ".into()));
    }
    if frame.ambient_dim() != lifted.d + 1 {
        return Err(Error::DimensionMismatch { expected: lifted.d + 1, found: frame.ambient_dim() });
    }
    Ok(())
}

pub fn stiefel_objective(frame: &Frame, family: &[Polytope]) -> Result<StiefelState> {
    let lifted = LiftedFamily::new(family)?;
    check_frame(frame, &lifted)?;
    let ev = evaluate(&frame.to_matrix(), &lifted)?;
    Ok(StiefelState {
        frame: frame.clone(),
        value: ev.value,
        nearest: ev.coords.iter().map(|c| Vector::from_cvec(lifted.field, c)).collect(),
        weights: ev.weights,
    })
}

/// `G = 2 sum_F q_F c_F^H` with `q_F = sum_j lambda_j x_j` the lifted
/// combination behind `p_{V,F}`: the gradient of `g` with every min-norm
/// weight vector held fixed.
pub(crate) fn euclidean_gradient_from(ev: &Evaluation, lifted: &LiftedFamily, n: usize) -> CMat {
    let mut g = CMat::zeros(lifted.d + 1, n);
    for ((set, lambda), c) in lifted.sets.iter().zip(&ev.weights).zip(&ev.coords) {
        let mut q = CVec::zeros(lifted.d + 1);
        for (l, x) in lambda.iter().zip(set) {
            if *l != 0.0 {
                q += x * C64::new(*l, 0.0);
            }
        }
        g += (q * c.adjoint()) * C64::new(2.0, 0.0);
    }
    g
}

/// `Z - W herm(W^H Z)`.
pub(crate) fn tangent_projection(w: &CMat, z: &CMat) -> CMat {
    let m = w.adjoint() * z;
    let herm = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    z - w * herm
}

/// Euclidean gradient of `g` at the frame, columns aligned with the frame
/// vectors.
pub fn stiefel_euclidean_gradient(frame: &Frame, family: &[Polytope]) -> Result<CMat> {
    let lifted = LiftedFamily::new(family)?;
    check_frame(frame, &lifted)?;
    let ev = evaluate(&frame.to_matrix(), &lifted)?;
    Ok(euclidean_gradient_from(&ev, &lifted, frame.len()))
}

/// Riemannian gradient: the Euclidean gradient projected to the tangent
/// space of the Stiefel manifold at the frame.
pub fn stiefel_gradient(frame: &Frame, family: &[Polytope]) -> Result<CMat> {
    let g = stiefel_euclidean_gradient(frame, family)?;
    Ok(tangent_projection(&frame.to_matrix(), &g))
}

/// `g` at an arbitrary (not necessarily orthonormal) matrix of columns.
pub fn objective_at_matrix(w: &CMat, family: &[Polytope]) -> Result<f64> {
    let lifted = LiftedFamily::new(family)?;
    Ok(evaluate(w, &lifted)?.value)
}

/// Standard Gaussian matrix over the field, orthonormalized.
pub fn random_frame(field: ScalarField, ambient: usize, n: usize, rng: &mut ChaCha8Rng) -> Frame {
    loop {
        let m = CMat::from_fn(ambient, n, |_, _| match field {
            ScalarField::Real => C64::new(rng.sample(StandardNormal), 0.0),
            ScalarField::Complex => {
                C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
                    * std::f64::consts::FRAC_1_SQRT_2
            }
        });
        if let Ok(fr) = crate::geometry::orthonormalize(&columns(field, &m), field) {
            return fr;
        }
    }
}

fn columns(field: ScalarField, m: &CMat) -> Vec<Vector> {
    (0..m.ncols()).map(|c| Vector::from_cvec(field, &m.column(c).into_owned())).collect()
}

/// Mixes a base seed with a restart index.
pub(crate) fn restart_seed(seed: u64, restart: usize) -> u64 {
    let mut z = seed ^ (restart as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn frame_norm_sq(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// Weight of `e_{d+1}` in the span of the columns.
fn slice_weight(w: &CMat) -> f64 {
    let last = w.nrows() - 1;
    (0..w.ncols()).map(|c| w[(last, c)].norm_sqr()).sum()
}

pub(crate) struct Descent {
    pub w: CMat,
    pub value: f64,
    pub iterations: usize,
    /// Transversal returned by the polish callback.
    pub polished: Option<(AffineFlat, f64)>,
}

/// Tries to turn a frame matrix into a verified transversal.
pub(crate) type Polish<'a> = dyn FnMut(&CMat) -> Result<Option<(AffineFlat, f64)>> + 'a;

/// Armijo descent with re-orthonormalization as the retraction.
pub(crate) fn descend(
    w0: CMat,
    lifted: &LiftedFamily,
    max_iters: usize,
    tol: f64,
    rng: &mut ChaCha8Rng,
    polish: &mut Polish<'_>,
) -> Result<Descent> {
    let n = w0.ncols();
    let mut w = w0;
    let mut ev = evaluate(&w, lifted)?;
    let mut t = 1.0;
    let mut iterations = 0;
    let mut polish_below = POLISH_GATE;
    let mut polished = None;
    while iterations < max_iters && ev.value >= tol {
        iterations += 1;
        let z = tangent_projection(&w, &euclidean_gradient_from(&ev, lifted, n));
        let zz = frame_norm_sq(&z);
        if zz < 1e-30 {
            break;
        }
        let before = ev.value;
        let mut accepted = false;
        for _ in 0..MAX_BACKTRACKS {
            let cand = gram_schmidt(&(&w - &z * C64::new(t, 0.0)));
            let cev = evaluate(&cand, lifted)?;
            if cev.value <= ev.value - ARMIJO * t * zz {
                w = cand;
                ev = cev;
                accepted = true;
                t *= 2.0;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
        if ev.value < polish_below && before - ev.value <= SLOW_TAIL * before {
            polished = polish(&w)?;
            if polished.is_some() {
                break;
            }
            polish_below = ev.value / 2.0;
        }
        if 1.0 - slice_weight(&w) < SLICE_GUARD {
            let kick = CMat::from_fn(w.nrows(), n, |_, _| C64::new(rng.sample::<f64, _>(StandardNormal) * KICK, 0.0));
            w = gram_schmidt(&(&w + tangent_projection(&w, &kick)));
            ev = evaluate(&w, lifted)?;
        }
    }
    Ok(Descent { w, value: ev.value, iterations, polished })
}

/// `sqrt(1 + |x0|^2)` for the flat's point `x0` nearest the origin:
/// `dist(F, flat) <= sqrt(1 + |x0|^2) |p_{V,F}|` for the recovered flat.
pub fn recovery_constant(flat: &AffineFlat) -> f64 {
    let origin = Vector::zeros(flat.field(), flat.ambient_dim());
    (1.0 + flat.nearest_point(&origin).norm_sq()).sqrt()
}

/// An orthonormal basis of the complement in `F^{d+1}` of the linear span of
/// the lifted flat; its orthogonal flat is `flat` again.
pub fn orthogonal_frame_of_flat(flat: &AffineFlat) -> Result<Frame> {
    let field = flat.field();
    let d = flat.ambient_dim();
    let origin = Vector::zeros(field, d);
    let x0 = flat.nearest_point(&origin);
    let mut span: Vec<CVec> = flat
        .directions()
        .vectors()
        .iter()
        .map(|u| CVec::from_iterator(d + 1, (0..d).map(|j| u.entry(j)).chain([C64::new(0.0, 0.0)])))
        .collect();
    let s = (1.0 + x0.norm_sq()).sqrt();
    span.push(CVec::from_iterator(d + 1, (0..d).map(|j| x0.entry(j) / s).chain([C64::new(1.0 / s, 0.0)])));
    let fixed = span.len();
    for j in 0..=d {
        if span.len() == d + 1 {
            break;
        }
        let mut e = CVec::zeros(d + 1);
        e[j] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for q in &span {
                let coef = hdot(&e, q);
                e -= q * coef;
            }
        }
        let norm = e.norm();
        if norm > 1e-6 {
            span.push(e / C64::new(norm, 0.0));
        }
    }
    let vectors = span[fixed..].iter().map(|c| Vector::from_cvec(field, c)).collect();
    Frame::new(field, d + 1, vectors)
}

/// Multi-start descent on `W_{d-k}(F^{d+1})`. Restarts run in order; the
/// first verified transversal wins. `NotFound` is not evidence that no
/// transversal exists.
pub fn find_transversal_stiefel(family: &[Polytope], k: usize, opts: &EngineOpts) -> Result<EngineReport> {
    let lifted = LiftedFamily::new(family)?;
    let d = lifted.d;
    if k >= d {
        return Err(Error::InvalidRange { k, d });
    }
    let n = d - k;
    let mut log = Vec::with_capacity(opts.restarts);
    let mut best: Option<(f64, Frame)> = None;
    let mut total = 0;
    for r in 0..opts.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(opts.seed, r));
        let start = random_frame(lifted.field, d + 1, n, &mut rng);
        let mut polish = |w: &CMat| match flat_from_orthogonal_frame(&Frame::from_matrix(lifted.field, w)) {
            Ok(flat) => translate_to_transversal(family, flat.directions()),
            Err(_) => Ok(None),
        };
        let run = descend(start.to_matrix(), &lifted, opts.max_iters, opts.tol, &mut rng, &mut polish)?;
        total += run.iterations;
        let frame = Frame::from_matrix(lifted.field, &run.w);
        log.push(RestartLog { restart: r, value: run.value, iterations: run.iterations });
        if let Some((flat, residual)) = run.polished {
            return Ok(EngineReport {
                outcome: EngineOutcome::Found { flat, residual, restart: r },
                iterations: total,
                seed: opts.seed,
            });
        }
        if run.value < POLISH_GATE {
            if let Ok(flat) = flat_from_orthogonal_frame(&frame) {
                let tol = recovery_constant(&flat) * opts.tol.sqrt() + 1e-10;
                let check = verify_transversal(&flat, family, tol)?;
                let found = if run.value < opts.tol && check.passes {
                    Some((flat, check.residual))
                } else {
                    // slow tail of the descent: keep the directions, solve for the offset
                    translate_to_transversal(family, flat.directions())?
                };
                if let Some((flat, residual)) = found {
                    return Ok(EngineReport {
                        outcome: EngineOutcome::Found { flat, residual, restart: r },
                        iterations: total,
                        seed: opts.seed,
                    });
                }
            }
        }
        if best.as_ref().is_none_or(|(v, _)| run.value < *v) {
            best = Some((run.value, frame));
        }
    }
    let (best_value, frame) = best.expect("at least one restart");
    Ok(EngineReport {
        outcome: EngineOutcome::NotFound { best_value, frame: Some(frame), restart_log: log },
        iterations: total,
        seed: opts.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lifted_unit(x: &[f64]) -> Vector {
        let mut c = x.to_vec();
        c.push(1.0);
        let n = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        Vector::real(c.iter().map(|v| v / n).collect())
    }

    #[test]
    fn singleton_orthogonal_frame_gives_zero() {
        let x = [0.3, -1.2];
        let flat = AffineFlat::point(Vector::real(x.to_vec()));
        let fr = orthogonal_frame_of_flat(&flat).unwrap();
        let family = vec![Polytope::singleton(Vector::real(x.to_vec()))];
        assert!(stiefel_objective(&fr, &family).unwrap().value < 1e-24);
    }

    #[test]
    fn singleton_along_the_frame_gives_full_norm() {
        let x = [0.3, -1.2];
        let fr = Frame::new(ScalarField::Real, 3, vec![lifted_unit(&x)]).unwrap();
        let family = vec![Polytope::singleton(Vector::real(x.to_vec()))];
        let expected = 1.0 + x.iter().map(|v| v * v).sum::<f64>();
        assert!((stiefel_objective(&fr, &family).unwrap().value - expected).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_frame_round_trip() {
        let u = Vector::real(vec![0.6, 0.8, 0.0]);
        let flat =
            AffineFlat::new(Vector::real(vec![1.0, -0.75, 2.0]), Frame::new(ScalarField::Real, 3, vec![u]).unwrap())
                .unwrap();
        let fr = orthogonal_frame_of_flat(&flat).unwrap();
        assert_eq!(fr.len(), 2);
        let back = flat_from_orthogonal_frame(&fr).unwrap();
        for t in [-1.0, 0.0, 2.5] {
            let p = flat.point_at(&Vector::real(vec![t]));
            assert!(back.distance_to(&p) < 1e-12);
        }
    }

    #[test]
    fn gradient_is_tangent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let fr = random_frame(ScalarField::Real, 3, 2, &mut rng);
        let family = vec![
            Polytope::real(&[&[0.0, 0.0], &[1.0, 0.0]]).unwrap(),
            Polytope::real(&[&[3.0, 2.0], &[2.0, 4.0], &[5.0, 5.0]]).unwrap(),
        ];
        let z = stiefel_gradient(&fr, &family).unwrap();
        let w = fr.to_matrix();
        let m = w.adjoint() * &z;
        let skew = &m + m.adjoint();
        assert!(skew.iter().all(|x| x.norm() < 1e-12));
    }

    #[test]
    fn k0_common_point_found() {
        let family = vec![
            Polytope::real(&[&[0.0, 0.0], &[2.0, 0.0], &[0.0, 2.0]]).unwrap(),
            Polytope::real(&[&[1.0, 1.0], &[-1.0, 0.0], &[1.0, -1.0]]).unwrap(),
        ];
        let report = find_transversal_stiefel(&family, 0, &EngineOpts::new(1)).unwrap();
        let EngineOutcome::Found { flat, residual, .. } = report.outcome else {
            panic!("expected a common point");
        };
        assert!(residual < 1e-6);
        assert!(verify_transversal(&flat, &family, 1e-6).unwrap().passes);
    }

    #[test]
    fn four_generic_points_have_no_line() {
        let family: Vec<Polytope> = [[0.0, 0.0], [1.0, 0.1], [0.2, 1.0], [1.3, 1.7]]
            .iter()
            .map(|p| Polytope::singleton(Vector::real(p.to_vec())))
            .collect();
        let opts = EngineOpts { restarts: 4, max_iters: 200, ..EngineOpts::new(5) };
        let report = find_transversal_stiefel(&family, 1, &opts).unwrap();
        assert!(!report.is_found());
    }
}
