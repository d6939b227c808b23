//! Seeded instance generators. Every label comes from the construction or an
//! exact oracle, never from a heuristic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::consistency::PointAssignment;
use crate::error::{Error, Result};
use crate::exact::{affine_rank_exact, hyperplane_transversal_2d_exact};
use crate::geometry::{orthonormalize, AffineFlat, Polytope, ScalarField, Vector};
use crate::linalg::C64;
use crate::solvers::polytopes_intersect;

use super::scene::{Label, Scene, SceneLabel};

/// Rejections allowed before a generator gives up.
pub const MAX_REJECTIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub seed: u64,
    pub d: usize,
    pub k: usize,
    pub n: usize,
    pub vertices: usize,
    /// Scale of the vertex cloud around each anchor.
    pub spread: f64,
    pub field: ScalarField,
}

impl GenSpec {
    pub fn new(seed: u64, d: usize, k: usize, n: usize, field: ScalarField) -> Self {
        GenSpec { seed, d, k, n, vertices: 4, spread: 0.5, field }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("need at least one set".into()));
        }
        if self.k >= self.d {
            return Err(Error::InvalidRange { k: self.k, d: self.d });
        }
        if self.vertices == 0 {
            return Err(Error::InvalidInput("need at least one vertex per set".into()));
        }
        if !(self.spread.is_finite() && self.spread > 0.0) {
            return Err(Error::InvalidInput("spread must be positive".into()));
        }
        Ok(())
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

fn gaussian(field: ScalarField, dim: usize, scale: f64, rng: &mut ChaCha8Rng) -> Vector {
    let coords = (0..dim * field.real_dim()).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
    Vector::new(field, coords).expect("finite")
}

/// Exponential weights normalized to sum one (uniform on the simplex).
fn simplex_weights(m: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut w: Vec<f64> = (0..m).map(|_| -(1.0 - rng.random::<f64>()).ln() + 1e-3).collect();
    let s: f64 = w.iter().sum();
    for x in w.iter_mut() {
        *x /= s;
    }
    w
}

/// `m` vertices whose hull contains `anchor`: random offsets re-centered so
/// that a random convex combination of them is exactly zero.
fn cloud_around(anchor: &Vector, m: usize, spread: f64, rng: &mut ChaCha8Rng) -> Polytope {
    if m == 1 {
        return Polytope::singleton(anchor.clone());
    }
    let offsets: Vec<Vector> = (0..m).map(|_| gaussian(anchor.field(), anchor.dim(), spread, rng)).collect();
    let w = simplex_weights(m, rng);
    let mut center = Vector::zeros(anchor.field(), anchor.dim());
    for (o, wi) in offsets.iter().zip(&w) {
        center = center.add(&o.scale(C64::new(*wi, 0.0)));
    }
    let vs = offsets.iter().map(|o| anchor.add(&o.sub(&center))).collect();
    Polytope::new(vs).expect("nonempty")
}

fn random_flat(field: ScalarField, d: usize, k: usize, rng: &mut ChaCha8Rng) -> AffineFlat {
    let base = gaussian(field, d, 1.0, rng);
    if k == 0 {
        return AffineFlat::point(base);
    }
    loop {
        let dirs: Vec<Vector> = (0..k).map(|_| gaussian(field, d, 1.0, rng)).collect();
        if let Ok(frame) = orthonormalize(&dirs, field) {
            return AffineFlat::new(base, frame).expect("matching shapes");
        }
    }
}

/// Sets built around anchors on a random k-flat; the flat is stored and the
/// anchors' flat coordinates form the assignment.
pub fn gen_planted(spec: &GenSpec) -> Result<Scene> {
    spec.validate()?;
    let mut rng = spec.rng();
    let flat = random_flat(spec.field, spec.d, spec.k, &mut rng);
    let mut sets = Vec::with_capacity(spec.n);
    let mut coords = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let t = gaussian(spec.field, spec.k, 1.0, &mut rng);
        let anchor = flat.point_at(&t);
        sets.push(cloud_around(&anchor, spec.vertices, spec.spread, &mut rng));
        coords.push(t);
    }
    let assignment = PointAssignment::injective(spec.field, spec.k, coords)?;
    let scene = Scene {
        field: spec.field,
        d: spec.d,
        k: spec.k,
        sets,
        assignment: Some(assignment),
        planted: Some(flat),
        label: Some(SceneLabel { value: Label::HasTransversal, provenance: "planted flat".into() }),
    };
    scene.validate()?;
    Ok(scene)
}

/// Gaussian singletons labeled by exact affine rank. Samples whose numerical
/// rank is degenerate are redrawn so that labels are stable under rounding.
pub fn gen_singletons(spec: &GenSpec) -> Result<Scene> {
    spec.validate()?;
    let mut rng = spec.rng();
    let rd = spec.field.real_dim();
    let generic_rank = (spec.n - 1).min(spec.d);
    for _ in 0..MAX_REJECTIONS {
        let pts: Vec<Vector> = (0..spec.n).map(|_| gaussian(spec.field, spec.d, 1.0, &mut rng)).collect();
        let diffs = nalgebra::DMatrix::from_fn(spec.d * rd, spec.n.saturating_sub(1), |r, c| {
            pts[c + 1].coords()[r] - pts[0].coords()[r]
        });
        let numeric = match spec.field {
            ScalarField::Real => crate::linalg::real_rank(&diffs, 1e-6),
            ScalarField::Complex => {
                let cm = crate::linalg::CMat::from_fn(spec.d, spec.n.saturating_sub(1), |r, c| {
                    pts[c + 1].entry(r) - pts[0].entry(r)
                });
                crate::linalg::complex_rank(&cm, 1e-6)
            }
        };
        if numeric < generic_rank {
            continue;
        }
        let rank = affine_rank_exact(&pts);
        let (value, provenance) = if rank <= spec.k {
            (Label::HasTransversal, format!("exact affine rank {rank} <= k"))
        } else {
            (Label::NoTransversal, format!("exact affine rank {rank} > k"))
        };
        let assign_pts = (0..spec.n).map(|_| gaussian(spec.field, spec.k, 1.0, &mut rng)).collect();
        let scene = Scene {
            field: spec.field,
            d: spec.d,
            k: spec.k,
            sets: pts.into_iter().map(Polytope::singleton).collect(),
            assignment: Some(PointAssignment::injective(spec.field, spec.k, assign_pts)?),
            planted: None,
            label: Some(SceneLabel { value, provenance }),
        };
        scene.validate()?;
        return Ok(scene);
    }
    Err(Error::GenerationTimeout(MAX_REJECTIONS))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DisjointMode {
    /// Polygons around anchors spaced along a random line.
    PlantedOnLine,
    /// Polygons at uniform random centers.
    Random,
    /// Three regular octagons of radius 1 centered at `(0, 0)`, `(10, 0)`
    /// and `(5, 8)`; no line meets all three.
    TriangleCorners,
}

impl DisjointMode {
    pub fn tag(self) -> &'static str {
        match self {
            DisjointMode::PlantedOnLine => "planted-on-line",
            DisjointMode::Random => "random",
            DisjointMode::TriangleCorners => "triangle-corners",
        }
    }
}

fn octagon(cx: f64, cy: f64, r: f64) -> Polytope {
    let vs = (0..8)
        .map(|j| {
            let a = std::f64::consts::FRAC_PI_4 * j as f64;
            Vector::real(vec![cx + r * a.cos(), cy + r * a.sin()])
        })
        .collect();
    Polytope::new(vs).expect("eight vertices")
}

fn pairwise_disjoint(sets: &[Polytope], new: &Polytope) -> Result<bool> {
    for s in sets {
        if polytopes_intersect(&[s.clone(), new.clone()])?.is_feasible() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Pairwise-disjoint polygons in the plane, labeled by the exact line sweep.
pub fn gen_disjoint_2d(spec: &GenSpec, mode: DisjointMode) -> Result<Scene> {
    spec.validate()?;
    if spec.d != 2 || spec.field != ScalarField::Real || spec.k != 1 {
        return Err(Error::InvalidInput("disjoint planar scenes need d = 2, k = 1 over R".into()));
    }
    let mut rng = spec.rng();
    let sets = match mode {
        DisjointMode::TriangleCorners => vec![octagon(0.0, 0.0, 1.0), octagon(10.0, 0.0, 1.0), octagon(5.0, 8.0, 1.0)],
        DisjointMode::PlantedOnLine | DisjointMode::Random => {
            let angle: f64 = rng.random::<f64>() * std::f64::consts::PI;
            let dir = Vector::real(vec![angle.cos(), angle.sin()]);
            let base = gaussian(ScalarField::Real, 2, 1.0, &mut rng);
            let gap = 3.0 * spec.spread;
            let half_box = gap * spec.n as f64;
            let mut sets: Vec<Polytope> = Vec::with_capacity(spec.n);
            let mut rejections = 0;
            while sets.len() < spec.n {
                let anchor = match mode {
                    DisjointMode::PlantedOnLine => {
                        let t = gap * sets.len() as f64 + spec.spread * (rng.random::<f64>() - 0.5);
                        base.add(&dir.scale(C64::new(t, 0.0)))
                    }
                    _ => Vector::real(vec![
                        half_box * (2.0 * rng.random::<f64>() - 1.0),
                        half_box * (2.0 * rng.random::<f64>() - 1.0),
                    ]),
                };
                let cand = cloud_around(&anchor, spec.vertices.max(1), spec.spread, &mut rng);
                if pairwise_disjoint(&sets, &cand)? {
                    sets.push(cand);
                } else {
                    rejections += 1;
                    if rejections >= MAX_REJECTIONS {
                        return Err(Error::GenerationTimeout(MAX_REJECTIONS));
                    }
                }
            }
            sets
        }
    };
    let line = hyperplane_transversal_2d_exact(&sets)?;
    let label = SceneLabel {
        value: if line.is_some() { Label::HasTransversal } else { Label::NoTransversal },
        provenance: format!("exact line sweep ({})", mode.tag()),
    };
    let scene =
        Scene { field: ScalarField::Real, d: 2, k: 1, sets, assignment: None, planted: line, label: Some(label) };
    scene.validate()?;
    Ok(scene)
}

/// A seeded injective assignment of Gaussian points in `F^k`.
pub fn random_assignment(field: ScalarField, k: usize, n: usize, seed: u64) -> PointAssignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = (0..n).map(|_| gaussian(field, k, 1.0, &mut rng)).collect();
    PointAssignment::injective(field, k, pts).expect("matching shapes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::flat_stabs;

    #[test]
    fn planted_k0_shares_the_point() {
        let scene = gen_planted(&GenSpec::new(1, 3, 0, 5, ScalarField::Real)).unwrap();
        let flat = scene.planted.as_ref().unwrap();
        assert!(scene.sets.iter().all(|p| flat_stabs(flat, p, 1e-12)));
    }

    #[test]
    fn planted_complex_is_valid() {
        let scene = gen_planted(&GenSpec::new(4, 3, 1, 6, ScalarField::Complex)).unwrap();
        assert!(scene.validate().is_ok());
    }

    #[test]
    fn singleton_labels() {
        let yes = gen_singletons(&GenSpec::new(2, 3, 1, 2, ScalarField::Real)).unwrap();
        assert_eq!(yes.label.unwrap().value, Label::HasTransversal);
        let no = gen_singletons(&GenSpec::new(2, 3, 1, 3, ScalarField::Real)).unwrap();
        assert_eq!(no.label.unwrap().value, Label::NoTransversal);
    }

    #[test]
    fn triangle_corners_have_no_line() {
        let spec = GenSpec::new(0, 2, 1, 3, ScalarField::Real);
        let scene = gen_disjoint_2d(&spec, DisjointMode::TriangleCorners).unwrap();
        assert_eq!(scene.label.unwrap().value, Label::NoTransversal);
    }

    #[test]
    fn planted_on_line_has_a_line() {
        let spec = GenSpec { vertices: 5, ..GenSpec::new(7, 2, 1, 6, ScalarField::Real) };
        let scene = gen_disjoint_2d(&spec, DisjointMode::PlantedOnLine).unwrap();
        assert_eq!(scene.label.unwrap().value, Label::HasTransversal);
    }

    #[test]
    fn one_set_is_trivially_stabbed() {
        let spec = GenSpec::new(3, 2, 1, 1, ScalarField::Real);
        let scene = gen_disjoint_2d(&spec, DisjointMode::Random).unwrap();
        assert_eq!(scene.label.unwrap().value, Label::HasTransversal);
    }
}
