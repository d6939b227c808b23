//! The outer quantifier: every subfamily up to the bound and every nonzero
//! tuple of dependencies on it.
//!
//! Violations are certified by Farkas functionals and therefore sound. The
//! search for them is sampling plus local search, so a clean run is only
//! consistent up to the sampling resolution, unless an affine realization
//! certifies the whole family.

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Polytope, Vector};
use crate::linalg::C64;
use crate::solvers::{build_dependency_lp, lp_feasible, DependencyTuple, FeasibilityOutcome};

use super::assignment::{dependency_space, subfamily_bound, tuple_from_coefficients, PointAssignment};
use super::realization::{find_affine_realization, AffineRealization};
use super::tuple::ensure_dependency;

pub const DEFAULT_SAMPLES: usize = 4096;
pub const DEFAULT_RESTARTS: usize = 32;
const LOCAL_STEPS: usize = 16;
const INITIAL_STEP: f64 = 0.5;
/// Sets are shrunk by this factor toward their vertex centroid when ranking
/// satisfied tuples for local search.
const GUIDE_SHRINK: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Enumeration {
    /// Subfamilies of size exactly `min(n, bound)`.
    Pruned,
    /// Every subfamily of size `2..=min(n, bound)`.
    Full,
}

/// Sampling configuration for [`check_dependency_consistency`].
#[derive(Debug, Clone, PartialEq)]
pub struct Budget {
    /// Unit-sphere samples per subfamily.
    pub samples: usize,
    /// Local searches per subfamily, started from the best-ranked samples.
    pub restarts: usize,
    pub seed: u64,
    pub enumeration: Enumeration,
    /// Try an affine realization (one LP) before sampling.
    pub realization: bool,
    /// After a clean sampling pass, extract a tuple from a test-map zero.
    pub proof_guided: bool,
}

impl Budget {
    pub fn new(seed: u64) -> Self {
        Budget {
            samples: DEFAULT_SAMPLES,
            restarts: DEFAULT_RESTARTS,
            seed,
            enumeration: Enumeration::Pruned,
            realization: true,
            proof_guided: true,
        }
    }

    /// Plain sampling and local search, nothing else.
    pub fn sampling_only(seed: u64, samples: usize, restarts: usize) -> Self {
        Budget { samples, restarts, seed, enumeration: Enumeration::Pruned, realization: false, proof_guided: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationSource {
    Sampling,
    LocalSearch,
    TestMapZero,
}

impl ViolationSource {
    pub fn tag(self) -> &'static str {
        match self {
            ViolationSource::Sampling => "sampling",
            ViolationSource::LocalSearch => "local-search",
            ViolationSource::TestMapZero => "test-map-zero",
        }
    }
}

/// A tuple of dependencies no scaling can realize, with its certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub subfamily: Vec<usize>,
    pub tuple: DependencyTuple,
    /// Farkas functional for `build_dependency_lp(tuple, family)`.
    pub farkas: Vec<f64>,
    pub source: ViolationSource,
}

impl Violation {
    /// Tuple membership in the dependency space, nontriviality and the
    /// Farkas inequalities, checked from scratch.
    pub fn validate(&self, family: &[Polytope], assignment: &PointAssignment) -> bool {
        if self.tuple.is_trivial() || ensure_dependency(&self.tuple, assignment).is_err() {
            return false;
        }
        match build_dependency_lp(&self.tuple, family) {
            Ok(lp) => lp.problem.validate_farkas(&self.farkas),
            Err(_) => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConsistencyVerdict {
    /// An affine realization on the whole family satisfies every tuple.
    Consistent {
        realization: AffineRealization,
    },
    /// No violation found within the budget.
    ConsistentUpToResolution {
        samples_used: usize,
        subfamilies_checked: usize,
        subfamilies_realized: usize,
        /// Largest infeasibility merit seen; every satisfied tuple has merit 0.
        max_merit: f64,
    },
    Inconsistent(Violation),
}

impl ConsistencyVerdict {
    pub fn is_inconsistent(&self) -> bool {
        matches!(self, ConsistencyVerdict::Inconsistent(_))
    }

    pub fn violation(&self) -> Option<&Violation> {
        match self {
            ConsistencyVerdict::Inconsistent(v) => Some(v),
            _ => None,
        }
    }
}

/// All `size`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if size > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..size).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..size).rev().find(|&i| cur[i] < n - size + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..size {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Subfamilies visited by the checker, in visiting order.
pub fn enumerate_subfamilies(n: usize, bound: usize, enumeration: Enumeration) -> Vec<Vec<usize>> {
    let top = n.min(bound);
    match enumeration {
        Enumeration::Pruned => subsets(n, top),
        Enumeration::Full => (2.min(top)..=top).flat_map(|s| subsets(n, s)).collect(),
    }
}

/// Seed for one subfamily; depends on its members, not on the enumeration.
fn subfamily_seed(seed: u64, subfamily: &[usize]) -> u64 {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for &i in subfamily {
        h = splitmix(h ^ (i as u64).wrapping_add(1));
    }
    h
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Gaussian coefficients over the basis for each component, normalized to
/// the unit sphere of `D^comps` (real inner product).
pub fn random_coefficients(rng: &mut ChaCha8Rng, comps: usize, basis_len: usize) -> Vec<Vec<f64>> {
    let mut c: Vec<Vec<f64>> =
        (0..comps).map(|_| (0..basis_len).map(|_| rng.sample(StandardNormal)).collect()).collect();
    normalize(&mut c);
    c
}

fn normalize(c: &mut [Vec<f64>]) {
    let n: f64 = c.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        for x in c.iter_mut().flatten() {
            *x /= n;
        }
    }
}

/// A random unit tuple of `comps` dependencies on the subfamily, or `None`
/// when the dependency space is trivial.
pub fn random_tuple(
    assignment: &PointAssignment,
    subfamily: &[usize],
    comps: usize,
    rng: &mut ChaCha8Rng,
) -> Option<DependencyTuple> {
    let basis = dependency_space(assignment, subfamily);
    if basis.is_empty() {
        return None;
    }
    let coeffs = random_coefficients(rng, comps, basis.len());
    Some(tuple_from_coefficients(assignment.field(), subfamily, &basis, &coeffs))
}

/// `F` shrunk by `factor` toward its vertex centroid.
fn shrink(p: &Polytope, factor: f64) -> Polytope {
    let n = p.len() as f64;
    let centroid = p.combination(&vec![1.0 / n; p.len()]);
    let vs = p.vertices().iter().map(|v| centroid.add(&v.sub(&centroid).scale(C64::new(factor, 0.0)))).collect();
    Polytope::new(vs).expect("same shape")
}

enum TupleOutcome {
    Satisfied,
    Violated(Vec<f64>),
}

fn decide(tuple: &DependencyTuple, family: &[Polytope]) -> Result<TupleOutcome> {
    let lp = build_dependency_lp(tuple, family)?;
    Ok(match lp_feasible(&lp.problem)? {
        FeasibilityOutcome::Feasible { .. } => TupleOutcome::Satisfied,
        FeasibilityOutcome::Infeasible { farkas } => TupleOutcome::Violated(farkas),
    })
}

fn guide_merit(tuple: &DependencyTuple, shrunk: &[Polytope]) -> Result<f64> {
    let lp = build_dependency_lp(tuple, shrunk)?;
    if lp_feasible(&lp.problem)?.is_feasible() {
        return Ok(0.0);
    }
    lp.infeasibility_merit()
}

struct SubfamilyRun {
    realized: bool,
}

struct Context<'a> {
    family: &'a [Polytope],
    shrunk: Vec<Polytope>,
    assignment: &'a PointAssignment,
    comps: usize,
    budget: &'a Budget,
}

impl Context<'_> {
    fn violation(
        &self,
        subfamily: &[usize],
        tuple: DependencyTuple,
        farkas: Vec<f64>,
        source: ViolationSource,
    ) -> Violation {
        Violation { subfamily: subfamily.to_vec(), tuple, farkas, source }
    }

    fn run(
        &self,
        subfamily: &[usize],
        samples_used: &AtomicUsize,
    ) -> Result<std::result::Result<SubfamilyRun, Violation>> {
        if self.budget.realization && find_affine_realization(self.family, self.assignment, subfamily)?.is_some() {
            return Ok(Ok(SubfamilyRun { realized: true }));
        }
        let basis = dependency_space(self.assignment, subfamily);
        if basis.is_empty() {
            return Ok(Ok(SubfamilyRun { realized: false }));
        }
        let field = self.assignment.field();
        let mut rng = ChaCha8Rng::seed_from_u64(subfamily_seed(self.budget.seed, subfamily));
        let mut ranked: Vec<(f64, usize, Vec<Vec<f64>>)> = Vec::new();
        let mut used = 0;
        for s in 0..self.budget.samples {
            let coeffs = random_coefficients(&mut rng, self.comps, basis.len());
            let tuple = tuple_from_coefficients(field, subfamily, &basis, &coeffs);
            used += 1;
            if let TupleOutcome::Violated(farkas) = decide(&tuple, self.family)? {
                samples_used.fetch_add(used, Ordering::Relaxed);
                return Ok(Err(self.violation(subfamily, tuple, farkas, ViolationSource::Sampling)));
            }
            if self.budget.restarts > 0 {
                ranked.push((guide_merit(&tuple, &self.shrunk)?, s, coeffs));
            }
        }
        // best guide merit first, sample index breaks ties
        ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        ranked.truncate(self.budget.restarts);
        for (merit, _, start) in ranked {
            let (mut cur, mut cur_merit, mut sigma) = (start, merit, INITIAL_STEP);
            for _ in 0..LOCAL_STEPS {
                let mut cand: Vec<Vec<f64>> = cur
                    .iter()
                    .map(|row| row.iter().map(|x| x + sigma * rng.sample::<f64, _>(StandardNormal)).collect())
                    .collect();
                normalize(&mut cand);
                let tuple = tuple_from_coefficients(field, subfamily, &basis, &cand);
                used += 1;
                if let TupleOutcome::Violated(farkas) = decide(&tuple, self.family)? {
                    samples_used.fetch_add(used, Ordering::Relaxed);
                    return Ok(Err(self.violation(subfamily, tuple, farkas, ViolationSource::LocalSearch)));
                }
                let m = guide_merit(&tuple, &self.shrunk)?;
                if m >= cur_merit {
                    cur = cand;
                    cur_merit = m;
                } else {
                    sigma *= 0.5;
                }
            }
        }
        samples_used.fetch_add(used, Ordering::Relaxed);
        Ok(Ok(SubfamilyRun { realized: false }))
    }
}

/// Checks the dependency condition for `assignment` over all subfamilies up
/// to the bound. `Inconsistent` is certified; the first violating subfamily
/// in enumeration order is reported, whatever the execution order.
pub fn check_dependency_consistency(
    family: &[Polytope],
    assignment: &PointAssignment,
    budget: &Budget,
) -> Result<ConsistencyVerdict> {
    let first = family.first().ok_or_else(|| Error::InvalidInput("empty family".into()))?;
    let (field, d) = (first.field(), first.ambient_dim());
    for p in family {
        if p.field() != field {
            return Err(Error::FieldMismatch("family over mixed fields".into()));
        }
        if p.ambient_dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: p.ambient_dim() });
        }
    }
    assignment.check_family(field, family.len())?;
    let k = assignment.k();
    let bound = subfamily_bound(k, d, field)?;
    let all: Vec<usize> = (0..family.len()).collect();

    if budget.realization {
        if let Some(realization) = find_affine_realization(family, assignment, &all)? {
            return Ok(ConsistencyVerdict::Consistent { realization });
        }
    }

    let ctx = Context {
        family,
        shrunk: family.iter().map(|p| shrink(p, GUIDE_SHRINK)).collect(),
        assignment,
        comps: d - k,
        budget,
    };
    let subfamilies = enumerate_subfamilies(family.len(), bound, budget.enumeration);
    let samples_used = AtomicUsize::new(0);
    let realized = AtomicUsize::new(0);
    let found = subfamilies.par_iter().find_map_first(|sub| match ctx.run(sub, &samples_used) {
        Ok(Ok(run)) => {
            if run.realized {
                realized.fetch_add(1, Ordering::Relaxed);
            }
            None
        }
        Ok(Err(v)) => Some(Ok(v)),
        Err(e) => Some(Err(e)),
    });
    if let Some(v) = found {
        return Ok(ConsistencyVerdict::Inconsistent(v?));
    }

    if budget.proof_guided {
        if let Some(v) = test_map_violation(family, assignment, budget.seed)? {
            return Ok(ConsistencyVerdict::Inconsistent(v));
        }
    }
    Ok(ConsistencyVerdict::ConsistentUpToResolution {
        samples_used: samples_used.load(Ordering::Relaxed),
        subfamilies_checked: subfamilies.len(),
        subfamilies_realized: realized.load(Ordering::Relaxed),
        max_merit: 0.0,
    })
}

/// Tuple read off a zero of the test map. Whenever some projected set misses
/// the origin at such a zero, the extracted tuple cannot be realized.
pub fn test_map_violation(family: &[Polytope], assignment: &PointAssignment, seed: u64) -> Result<Option<Violation>> {
    let Some(frame) = crate::engines::find_test_map_zero(family, assignment, seed)? else {
        return Ok(None);
    };
    let ex = match crate::engines::extract_caratheodory_subfamily(&frame, family, assignment) {
        Ok(ex) => ex,
        Err(Error::AllProjectionsContainOrigin) | Err(Error::NumericalFailure(_)) | Err(Error::InvalidInput(_)) => {
            return Ok(None)
        }
        Err(e) => return Err(e),
    };
    if ensure_dependency(&ex.tuple, assignment).is_err() || ex.tuple.is_trivial() {
        return Ok(None);
    }
    match decide(&ex.tuple, family)? {
        TupleOutcome::Violated(farkas) => Ok(Some(Violation {
            subfamily: ex.subfamily.clone(),
            tuple: ex.tuple,
            farkas,
            source: ViolationSource::TestMapZero,
        })),
        TupleOutcome::Satisfied => Ok(None),
    }
}

/// Direct k = d - 1 real check of one dependence: `r_F >= 0`, `q_F in F` with
/// `sum r_F a_F = 0`, `sum r_F a_F q_F = 0` and `sum |a_F| r_F = 1`, solved in
/// exact arithmetic. Independent of the general LP encoding.
pub fn single_dependency_satisfiable(coeffs: &[f64], subfamily: &[usize], family: &[Polytope]) -> Result<bool> {
    let Some(&f0) = subfamily.first() else {
        return Err(Error::InvalidInput("empty subfamily".into()));
    };
    if family[f0].field() != crate::geometry::ScalarField::Real {
        return Err(Error::FieldMismatch("the single-dependence check is real-only".into()));
    }
    let d = family[f0].ambient_dim();
    let mut vars: Vec<(f64, &Vector)> = Vec::new();
    for (pos, &f) in subfamily.iter().enumerate() {
        if coeffs[pos] != 0.0 {
            for v in family[f].vertices() {
                vars.push((coeffs[pos], v));
            }
        }
    }
    if vars.is_empty() {
        return Err(Error::EmptySupport);
    }
    let mut a = vec![vec![0.0; vars.len()]; d + 2];
    for (j, (c, v)) in vars.iter().enumerate() {
        a[0][j] = *c;
        for r in 0..d {
            a[1 + r][j] = c * v.coords()[r];
        }
        a[d + 1][j] = c.abs();
    }
    let mut b = vec![0.0; d + 2];
    b[d + 1] = 1.0;
    let lp = crate::solvers::LpProblem::new(a, b, vec![true; vars.len()])?;
    Ok(crate::solvers::lp_feasible_exact(&lp)?.is_feasible())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ScalarField;

    #[test]
    fn subsets_in_lexicographic_order() {
        assert_eq!(subsets(4, 2), vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(subsets(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
        assert!(subsets(2, 3).is_empty());
        assert_eq!(subsets(6, 3).len(), 20);
    }

    #[test]
    fn full_enumeration_includes_smaller_sizes() {
        let subs = enumerate_subfamilies(4, 3, Enumeration::Full);
        assert_eq!(subs.len(), 6 + 4);
        assert_eq!(enumerate_subfamilies(4, 3, Enumeration::Pruned).len(), 4);
    }

    #[test]
    fn disjoint_singletons_are_inconsistent_for_points() {
        let family = vec![Polytope::singleton(Vector::real(vec![0.0])), Polytope::singleton(Vector::real(vec![1.0]))];
        let a = PointAssignment::origin(ScalarField::Real, 2);
        let v = check_dependency_consistency(&family, &a, &Budget::new(1)).unwrap();
        let viol = v.violation().expect("inconsistent");
        assert!(viol.validate(&family, &a));
    }

    #[test]
    fn sampling_alone_reports_resolution_limited_consistency() {
        let family = vec![
            Polytope::real(&[&[-1.0, -1.0], &[2.0, 0.0], &[0.0, 2.0]]).unwrap(),
            Polytope::real(&[&[1.0, 1.0], &[-2.0, 0.0], &[0.0, -2.0]]).unwrap(),
            Polytope::real(&[&[-1.0, 1.0], &[1.0, 1.0], &[0.0, -1.0]]).unwrap(),
        ];
        let a = PointAssignment::origin(ScalarField::Real, 3);
        let v = check_dependency_consistency(&family, &a, &Budget::sampling_only(3, 64, 2)).unwrap();
        match v {
            ConsistencyVerdict::ConsistentUpToResolution { samples_used, subfamilies_checked, .. } => {
                assert_eq!(subfamilies_checked, 1);
                assert!(samples_used >= 64);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn single_dependency_check_matches_hand_cases() {
        let family = vec![
            Polytope::singleton(Vector::real(vec![0.0])),
            Polytope::singleton(Vector::real(vec![1.0])),
            Polytope::real(&[&[-1.0], &[2.0]]).unwrap(),
        ];
        assert!(!single_dependency_satisfiable(&[1.0, -1.0], &[0, 1], &family).unwrap());
        assert!(single_dependency_satisfiable(&[1.0, -1.0], &[0, 2], &family).unwrap());
    }
}
