//! Planar ordering condition: pairwise-disjoint sets in the plane have a line
//! transversal iff they can be ordered so that every three of them are met
//! in that order by some line.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::exact::{possible_middles, IPoint, IntFamily};
use crate::geometry::Polytope;
use crate::solvers::polytopes_intersect;

/// Largest family accepted by the factorial order search.
pub const MAX_ORDER_SEARCH: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HadwigerCheck {
    Ok,
    /// Positions `i < j < l` in the given order with no line meeting the
    /// three sets in that order.
    BadTriple(usize, usize, usize),
}

impl HadwigerCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, HadwigerCheck::Ok)
    }
}

fn ensure_disjoint(family: &[Polytope]) -> Result<()> {
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            if polytopes_intersect(&[family[i].clone(), family[j].clone()])?.is_feasible() {
                return Err(Error::NotDisjoint(i, j));
            }
        }
    }
    Ok(())
}

/// Middle feasibility per sorted triple, computed once.
struct MiddleTable<'a> {
    sets: &'a [Vec<IPoint>],
    cache: HashMap<(usize, usize, usize), [bool; 3]>,
}

impl<'a> MiddleTable<'a> {
    fn new(sets: &'a [Vec<IPoint>]) -> Self {
        MiddleTable { sets, cache: HashMap::new() }
    }

    /// Whether some line meets `a`, `b`, `c` with `b` between the others.
    fn middle_ok(&mut self, a: usize, b: usize, c: usize) -> bool {
        let mut key = [a, b, c];
        key.sort_unstable();
        let sets = self.sets;
        let row = *self
            .cache
            .entry((key[0], key[1], key[2]))
            .or_insert_with(|| possible_middles([&sets[key[0]], &sets[key[1]], &sets[key[2]]]));
        let pos = key.iter().position(|&x| x == b).expect("b is in the triple");
        row[pos]
    }
}

/// Checks the family in its given order; the first failing triple in
/// lexicographic order is reported.
pub fn hadwiger_order_check(family: &[Polytope]) -> Result<HadwigerCheck> {
    let ints = IntFamily::from_family(family)?;
    ensure_disjoint(family)?;
    let mut table = MiddleTable::new(&ints.sets);
    let n = family.len();
    for i in 0..n {
        for j in i + 1..n {
            for l in j + 1..n {
                if !table.middle_ok(i, j, l) {
                    return Ok(HadwigerCheck::BadTriple(i, j, l));
                }
            }
        }
    }
    Ok(HadwigerCheck::Ok)
}

/// First ordering in lexicographic order passing the triple condition, or
/// `None` when no ordering does.
pub fn find_hadwiger_order(family: &[Polytope]) -> Result<Option<Vec<usize>>> {
    let n = family.len();
    if n > MAX_ORDER_SEARCH {
        return Err(Error::TooLarge { n, max: MAX_ORDER_SEARCH });
    }
    let ints = IntFamily::from_family(family)?;
    ensure_disjoint(family)?;
    let mut table = MiddleTable::new(&ints.sets);
    let mut order = Vec::with_capacity(n);
    let mut used = vec![false; n];
    Ok(extend(&mut table, &mut order, &mut used).then_some(order))
}

fn extend(table: &mut MiddleTable<'_>, order: &mut Vec<usize>, used: &mut [bool]) -> bool {
    if order.len() == used.len() {
        return true;
    }
    for x in 0..used.len() {
        if used[x] {
            continue;
        }
        // every new triple ends at x, so its middle is the later prefix element
        let fits = (0..order.len()).all(|i| (i + 1..order.len()).all(|j| table.middle_ok(order[i], order[j], x)));
        if !fits {
            continue;
        }
        used[x] = true;
        order.push(x);
        if extend(table, order, used) {
            return true;
        }
        order.pop();
        used[x] = false;
    }
    false
}

/// The family re-indexed by `order`.
pub fn reorder(family: &[Polytope], order: &[usize]) -> Vec<Polytope> {
    order.iter().map(|&i| family[i].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vector;

    fn seg(a: [f64; 2], b: [f64; 2]) -> Polytope {
        Polytope::real(&[&a, &b]).unwrap()
    }

    fn square(cx: f64, cy: f64, r: f64) -> Polytope {
        Polytope::real(&[&[cx - r, cy - r], &[cx + r, cy - r], &[cx + r, cy + r], &[cx - r, cy + r]]).unwrap()
    }

    #[test]
    fn stacked_segments_bottom_to_top() {
        let family = vec![seg([-1.0, 0.0], [1.0, 0.0]), seg([-0.5, 1.0], [2.0, 1.0]), seg([-3.0, 2.0], [0.2, 2.0])];
        assert_eq!(hadwiger_order_check(&family).unwrap(), HadwigerCheck::Ok);
    }

    #[test]
    fn far_apart_triangle_has_no_order() {
        let family = vec![square(0.0, 0.0, 0.1), square(10.0, 0.0, 0.1), square(5.0, 8.0, 0.1)];
        assert_eq!(hadwiger_order_check(&family).unwrap(), HadwigerCheck::BadTriple(0, 1, 2));
        assert_eq!(find_hadwiger_order(&family).unwrap(), None);
    }

    #[test]
    fn collinear_squares_out_of_order() {
        let family = vec![square(0.0, 0.0, 0.1), square(10.0, 0.0, 0.1), square(5.0, 0.0, 0.1)];
        assert_eq!(hadwiger_order_check(&family).unwrap(), HadwigerCheck::BadTriple(0, 1, 2));
        assert_eq!(find_hadwiger_order(&family).unwrap(), Some(vec![0, 2, 1]));
    }

    #[test]
    fn small_families_are_vacuous() {
        let one = vec![Polytope::singleton(Vector::real(vec![0.0, 0.0]))];
        assert_eq!(find_hadwiger_order(&one).unwrap(), Some(vec![0]));
        let two = vec![square(0.0, 0.0, 1.0), square(5.0, 5.0, 1.0)];
        assert!(hadwiger_order_check(&two).unwrap().is_ok());
    }

    #[test]
    fn overlapping_sets_rejected() {
        let family = vec![square(0.0, 0.0, 1.0), square(0.5, 0.5, 1.0)];
        assert_eq!(hadwiger_order_check(&family), Err(Error::NotDisjoint(0, 1)));
    }

    #[test]
    fn ten_sets_too_large() {
        let family: Vec<Polytope> = (0..10).map(|i| square(3.0 * i as f64, 0.0, 0.5)).collect();
        assert_eq!(find_hadwiger_order(&family), Err(Error::TooLarge { n: 10, max: 9 }));
    }
}
