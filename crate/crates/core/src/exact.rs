//! Exact small-case oracles: planar line transversals by a critical-direction
//! sweep in integer arithmetic, and affine rank of point families over `Q`
//! or `Q(i)`.
//!
//! Every `f64` is a dyadic rational, so scaling all coordinates of a planar
//! family by a common power of two makes them integers without rounding.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::geometry::{AffineFlat, Frame, Polytope, ScalarField, Vector};

/// A lattice point or direction.
pub type IPoint = (BigInt, BigInt);

/// A planar family with integer coordinates `2^scale * x`.
#[derive(Debug, Clone)]
pub struct IntFamily {
    pub sets: Vec<Vec<IPoint>>,
    pub scale: u32,
}

/// `(mantissa, exponent)` with `x = mantissa * 2^exponent`.
fn dyadic(x: f64) -> (BigInt, i32) {
    if x == 0.0 {
        return (BigInt::zero(), 0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, exp) = if exp_bits == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp_bits - 1075) };
    (BigInt::from(mant) * sign, exp)
}

impl IntFamily {
    /// Exact conversion of a real planar family.
    pub fn from_family(family: &[Polytope]) -> Result<Self> {
        for p in family {
            if p.field() != ScalarField::Real {
                return Err(Error::FieldMismatch("planar oracles are real-only".into()));
            }
            if p.ambient_dim() != 2 {
                return Err(Error::DimensionMismatch { expected: 2, found: p.ambient_dim() });
            }
        }
        let decoded: Vec<Vec<[(BigInt, i32); 2]>> = family
            .iter()
            .map(|p| p.vertices().iter().map(|v| [dyadic(v.coords()[0]), dyadic(v.coords()[1])]).collect())
            .collect();
        let min_exp =
            decoded.iter().flatten().flatten().filter(|(m, _)| !m.is_zero()).map(|(_, e)| *e).min().unwrap_or(0).min(0);
        let scale = (-min_exp) as u32;
        let lift = |(m, e): &(BigInt, i32)| -> BigInt {
            if m.is_zero() {
                BigInt::zero()
            } else {
                m << ((*e + scale as i32) as usize)
            }
        };
        let sets = decoded.iter().map(|vs| vs.iter().map(|[x, y]| (lift(x), lift(y))).collect()).collect();
        Ok(IntFamily { sets, scale })
    }
}

fn dot(a: &IPoint, b: &IPoint) -> BigInt {
    &a.0 * &b.0 + &a.1 * &b.1
}

fn cross(a: &IPoint, b: &IPoint) -> BigInt {
    &a.0 * &b.1 - &a.1 * &b.0
}

fn perp(a: &IPoint) -> IPoint {
    (-a.1.clone(), a.0.clone())
}

fn sub(a: &IPoint, b: &IPoint) -> IPoint {
    (&a.0 - &b.0, &a.1 - &b.1)
}

fn add(a: &IPoint, b: &IPoint) -> IPoint {
    (&a.0 + &b.0, &a.1 + &b.1)
}

fn neg(a: &IPoint) -> IPoint {
    (-a.0.clone(), -a.1.clone())
}

fn is_zero(a: &IPoint) -> bool {
    a.0.is_zero() && a.1.is_zero()
}

/// Representative of `{a, -a}` in the half-plane `y > 0` or `y = 0, x > 0`.
fn canonical(a: IPoint) -> IPoint {
    if a.1.is_negative() || (a.1.is_zero() && a.0.is_negative()) {
        neg(&a)
    } else {
        a
    }
}

/// Angular order on canonical directions.
fn angle_cmp(a: &IPoint, b: &IPoint) -> Ordering {
    match cross(a, b).sign() {
        num_bigint::Sign::Plus => Ordering::Less,
        num_bigint::Sign::Minus => Ordering::Greater,
        num_bigint::Sign::NoSign => Ordering::Equal,
    }
}

/// Normals of lines through two vertices of different sets, up to sign,
/// sorted by angle and deduplicated.
pub fn critical_normals(sets: &[&[IPoint]]) -> Vec<IPoint> {
    let mut out = Vec::new();
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            for v in a.iter() {
                for w in b.iter() {
                    let dw = sub(w, v);
                    if !is_zero(&dw) {
                        out.push(canonical(perp(&dw)));
                    }
                }
            }
        }
    }
    out.sort_by(angle_cmp);
    out.dedup_by(|a, b| angle_cmp(a, b) == Ordering::Equal);
    out
}

/// Critical normals, one normal strictly inside each arc between them, and
/// the two axis directions.
pub fn candidate_normals(critical: &[IPoint]) -> Vec<IPoint> {
    let mut out: Vec<IPoint> = critical.to_vec();
    for w in critical.windows(2) {
        out.push(add(&w[0], &w[1]));
    }
    if let (Some(first), Some(last)) = (critical.first(), critical.last()) {
        let wrap = add(last, &neg(first));
        out.push(if is_zero(&wrap) { perp(first) } else { wrap });
    }
    out.push((BigInt::one(), BigInt::zero()));
    out.push((BigInt::zero(), BigInt::one()));
    out
}

/// `[min, max]` of `<n, v>` over the vertices.
fn support_interval(n: &IPoint, set: &[IPoint]) -> (BigInt, BigInt) {
    let vals: Vec<BigInt> = set.iter().map(|v| dot(n, v)).collect();
    let lo = vals.iter().min().expect("nonempty").clone();
    let hi = vals.iter().max().expect("nonempty").clone();
    (lo, hi)
}

/// Offsets `[L, H]` of lines `<n, x> = c` meeting every set, if any.
pub fn stabbing_offsets(n: &IPoint, sets: &[&[IPoint]]) -> Option<(BigInt, BigInt)> {
    let mut lo: Option<BigInt> = None;
    let mut hi: Option<BigInt> = None;
    for s in sets {
        let (l, h) = support_interval(n, s);
        lo = Some(lo.map_or(l.clone(), |x| x.max(l)));
        hi = Some(hi.map_or(h.clone(), |x| x.min(h)));
    }
    let (lo, hi) = (lo?, hi?);
    (lo <= hi).then_some((lo, hi))
}

/// A line meeting every set: normal and the offset range.
pub fn find_stabbing_direction(sets: &[&[IPoint]]) -> Option<(IPoint, BigInt, BigInt)> {
    let crit = critical_normals(sets);
    candidate_normals(&crit).into_iter().find_map(|n| stabbing_offsets(&n, sets).map(|(l, h)| (n, l, h)))
}

/// Rational `num / den` with `den > 0`.
#[derive(Debug, Clone)]
struct Frac {
    num: BigInt,
    den: BigInt,
}

impl Frac {
    fn cmp(&self, other: &Frac) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

/// Parameter interval along `u = perp(n)` of the set's slice by the line
/// `2 <n, x> = two_c`.
fn slice_interval(n: &IPoint, two_c: &BigInt, set: &[IPoint]) -> Option<(Frac, Frac)> {
    let u = perp(n);
    let mut lo: Option<Frac> = None;
    let mut hi: Option<Frac> = None;
    let mut push = |t: Frac| {
        if lo.as_ref().is_none_or(|l| t.cmp(l) == Ordering::Less) {
            lo = Some(t.clone());
        }
        if hi.as_ref().is_none_or(|h| t.cmp(h) == Ordering::Greater) {
            hi = Some(t);
        }
    };
    let level: Vec<BigInt> = set.iter().map(|v| dot(n, v) * 2 - two_c).collect();
    for (i, v) in set.iter().enumerate() {
        let a = &level[i];
        if a.is_zero() {
            push(Frac { num: dot(&u, v), den: BigInt::one() });
            continue;
        }
        for (j, w) in set.iter().enumerate() {
            let b = &level[j];
            if a.is_negative() && b.is_positive() {
                // point where the segment v -> w crosses the line
                let den = b - a;
                let num = b * dot(&u, v) - a * dot(&u, w);
                push(Frac { num, den });
            }
            let _ = j;
        }
    }
    Some((lo?, hi?))
}

/// For three pairwise-disjoint sets, which of them can be met second by some
/// line meeting all three.
pub fn possible_middles(sets: [&[IPoint]; 3]) -> [bool; 3] {
    let mut out = [false; 3];
    let crit = critical_normals(&sets);
    for n in candidate_normals(&crit) {
        let Some((l, h)) = stabbing_offsets(&n, &sets) else {
            continue;
        };
        let two_c = l + h;
        let mut ivs: Vec<(usize, Frac, Frac)> = Vec::with_capacity(3);
        for (i, s) in sets.iter().enumerate() {
            let (a, b) = slice_interval(&n, &two_c, s).expect("line meets the set");
            ivs.push((i, a, b));
        }
        ivs.sort_by(|x, y| x.1.cmp(&y.1));
        let disjoint = ivs[0].2.cmp(&ivs[1].1) == Ordering::Less && ivs[1].2.cmp(&ivs[2].1) == Ordering::Less;
        if disjoint {
            out[ivs[1].0] = true;
        }
        if out.iter().all(|&b| b) {
            break;
        }
    }
    out
}

fn to_f64(num: &BigInt, shift: u32) -> f64 {
    BigRational::new(num.clone(), BigInt::one() << shift as usize).to_f64().unwrap_or(f64::NAN)
}

/// A line meeting every polygon of a real planar family, found by the
/// critical-direction sweep; `None` when no line exists.
pub fn hyperplane_transversal_2d_exact(family: &[Polytope]) -> Result<Option<AffineFlat>> {
    if family.is_empty() {
        return Err(Error::InvalidInput("empty family".into()));
    }
    let fam = IntFamily::from_family(family)?;
    let sets: Vec<&[IPoint]> = fam.sets.iter().map(|s| s.as_slice()).collect();
    let Some((n, l, h)) = find_stabbing_direction(&sets) else {
        return Ok(None);
    };
    // true normal n / 2^s, offset (l + h) / 2 / 2^(2s)
    let s = fam.scale;
    let (nx, ny) = (to_f64(&n.0, s), to_f64(&n.1, s));
    let c = to_f64(&(l + h), 2 * s + 1);
    let nn = nx * nx + ny * ny;
    let norm = nn.sqrt();
    let base = Vector::real(vec![c * nx / nn, c * ny / nn]);
    let dir = Vector::real(vec![-ny / norm, nx / norm]);
    let frame = Frame::new(ScalarField::Real, 2, vec![dir])?;
    Ok(Some(AffineFlat::new(base, frame)?))
}

fn exact_rational(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

/// Rank of the rows over an exact field by Gaussian elimination.
fn exact_rank<T>(mut rows: Vec<Vec<T>>) -> usize
where
    T: Clone + num_traits::Zero + std::ops::Sub<Output = T> + std::ops::Mul<Output = T> + std::ops::Div<Output = T>,
{
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][c].clone();
        for r in 0..rows.len() {
            if r == rank || rows[r][c].is_zero() {
                continue;
            }
            let f = rows[r][c].clone() / pivot.clone();
            let prow = rows[rank][c..cols].to_vec();
            for (v, p) in rows[r][c..cols].iter_mut().zip(prow) {
                *v = v.clone() - f.clone() * p;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Affine rank (dimension of the affine hull) computed exactly.
pub fn affine_rank_exact(points: &[Vector]) -> usize {
    let Some(p0) = points.first() else {
        return 0;
    };
    match p0.field() {
        ScalarField::Real => {
            let rows: Vec<Vec<BigRational>> = points[1..]
                .iter()
                .map(|p| {
                    p.coords().iter().zip(p0.coords()).map(|(a, b)| exact_rational(*a) - exact_rational(*b)).collect()
                })
                .collect();
            exact_rank(rows)
        }
        ScalarField::Complex => {
            let rows: Vec<Vec<Complex<BigRational>>> = points[1..]
                .iter()
                .map(|p| {
                    (0..p.dim())
                        .map(|j| {
                            let (a, b) = (p.entry(j), p0.entry(j));
                            Complex::new(
                                exact_rational(a.re) - exact_rational(b.re),
                                exact_rational(a.im) - exact_rational(b.im),
                            )
                        })
                        .collect()
                })
                .collect();
            exact_rank(rows)
        }
    }
}

/// Whether some k-flat contains every point: affine rank at most `k`.
pub fn point_family_transversal_exact(points: &[Vector], k: usize) -> bool {
    affine_rank_exact(points) <= k
}
