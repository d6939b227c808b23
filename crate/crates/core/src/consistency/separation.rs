//! Separation consistency: disjoint hulls of two subfamilies must have
//! disjoint assigned hulls.

use crate::error::{Error, Result};
use crate::geometry::{Polytope, ScalarField};
use crate::solvers::{intersection_lp, polytopes_intersect, FeasibilityOutcome};

use super::assignment::PointAssignment;

#[derive(Debug, Clone, PartialEq)]
pub enum SeparationVerdict {
    Ok {
        pairs_checked: usize,
    },
    Counterexample {
        first: Vec<usize>,
        second: Vec<usize>,
        /// Farkas functional for the intersection LP of the two merged hulls.
        sets_farkas: Vec<f64>,
        /// A point of `conv(phi(first)) ∩ conv(phi(second))`.
        common_point: Vec<f64>,
    },
}

impl SeparationVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, SeparationVerdict::Ok { .. })
    }
}

/// Unordered pairs of disjoint nonempty subfamilies with
/// `|first| + |second| <= max_total`, `first` holding the smallest index.
pub fn subfamily_pairs(n: usize, max_total: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    // labels: 0 unused, 1 first, 2 second
    let mut labels = vec![0u8; n];
    fn rec(i: usize, labels: &mut Vec<u8>, used: usize, max_total: usize, out: &mut Vec<(Vec<usize>, Vec<usize>)>) {
        if i == labels.len() {
            let first: Vec<usize> = (0..labels.len()).filter(|&j| labels[j] == 1).collect();
            let second: Vec<usize> = (0..labels.len()).filter(|&j| labels[j] == 2).collect();
            if !first.is_empty() && !second.is_empty() && first[0] < second[0] {
                out.push((first, second));
            }
            return;
        }
        for l in 0..3u8 {
            if l > 0 && used == max_total {
                continue;
            }
            labels[i] = l;
            rec(i + 1, labels, used + usize::from(l > 0), max_total, out);
        }
        labels[i] = 0;
    }
    rec(0, &mut labels, 0, max_total, &mut out);
    out.sort();
    out
}

fn merged(family: &[Polytope], idx: &[usize]) -> Polytope {
    Polytope::new(idx.iter().flat_map(|&i| family[i].vertices().iter().cloned()).collect()).expect("nonempty")
}

fn point_hull(assignment: &PointAssignment, idx: &[usize]) -> Polytope {
    Polytope::new(idx.iter().map(|&i| assignment.image(i).clone()).collect()).expect("nonempty")
}

/// Checks every pair with `|first| + |second| <= k + 2`, `k` the assignment
/// dimension. Real families only.
pub fn check_separation_consistency(family: &[Polytope], assignment: &PointAssignment) -> Result<SeparationVerdict> {
    let first = family.first().ok_or_else(|| Error::InvalidInput("empty family".into()))?;
    if first.field() != ScalarField::Real || assignment.field() != ScalarField::Real {
        return Err(Error::FieldMismatch("separation consistency is defined over R only".into()));
    }
    assignment.check_family(ScalarField::Real, family.len())?;
    let pairs = subfamily_pairs(family.len(), assignment.k() + 2);
    for (a, b) in &pairs {
        let sets = [merged(family, a), merged(family, b)];
        let FeasibilityOutcome::Infeasible { farkas } = polytopes_intersect(&sets)? else {
            continue;
        };
        let images = [point_hull(assignment, a), point_hull(assignment, b)];
        if let FeasibilityOutcome::Feasible { point } = polytopes_intersect(&images)? {
            return Ok(SeparationVerdict::Counterexample {
                first: a.clone(),
                second: b.clone(),
                sets_farkas: farkas,
                common_point: point,
            });
        }
    }
    Ok(SeparationVerdict::Ok { pairs_checked: pairs.len() })
}

/// Re-checks a counterexample's two certificates.
pub fn validate_counterexample(family: &[Polytope], assignment: &PointAssignment, verdict: &SeparationVerdict) -> bool {
    let SeparationVerdict::Counterexample { first, second, sets_farkas, common_point } = verdict else {
        return true;
    };
    let Ok(lp) = intersection_lp(&[merged(family, first), merged(family, second)]) else {
        return false;
    };
    if !lp.validate_farkas(sets_farkas) {
        return false;
    }
    // the common point must be in both assigned hulls
    [first, second].iter().all(|idx| {
        let hull = point_hull(assignment, idx);
        let target = crate::geometry::Vector::real(common_point.clone());
        crate::solvers::min_norm_point(&hull.vertices().iter().map(|v| v.sub(&target)).collect::<Vec<_>>())
            .map(|m| m.point.norm() < 1e-8)
            .unwrap_or(false)
    })
}
