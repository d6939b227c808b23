//! JSON encodings of verdict certificates and their inverses, used by the
//! `verify --report` path.

use ktransversal::consistency::{
    AffineRealization, ConsistencyVerdict, SeparationVerdict, TransversalWitness, Violation,
};
use ktransversal::engines::TransversalCheck;
use ktransversal::geometry::{AffineFlat, Frame, ScalarField, Vector};
use ktransversal::solvers::DependencyTuple;
use ktransversal::{Error, Result};
use serde_json::{json, Map, Value};

pub fn vector(v: &Vector) -> Value {
    json!(v.coords())
}

pub fn vectors(vs: &[Vector]) -> Value {
    Value::Array(vs.iter().map(vector).collect())
}

pub fn flat(f: &AffineFlat) -> Value {
    json!({ "base": vector(f.basepoint()), "dirs": vectors(f.directions().vectors()) })
}

pub fn realization(r: &AffineRealization) -> Value {
    json!({
        "subfamily": r.subfamily,
        "matrix": vectors(&r.matrix),
        "offset": vector(&r.offset),
        "points": vectors(&r.points),
        "weights": r.weights,
    })
}

pub fn violation(v: &Violation) -> Value {
    json!({
        "subfamily": v.subfamily,
        "source": v.source.tag(),
        "tuple": vectors(&v.tuple.components),
        "farkas": v.farkas,
    })
}

/// Verdict tag and certificate of a consistency check.
pub fn consistency(verdict: &ConsistencyVerdict) -> (&'static str, Value) {
    match verdict {
        ConsistencyVerdict::Consistent { realization: r } => ("consistent", json!({ "realization": realization(r) })),
        ConsistencyVerdict::ConsistentUpToResolution {
            samples_used,
            subfamilies_checked,
            subfamilies_realized,
            max_merit,
        } => (
            "consistent-up-to-resolution",
            json!({
                "samples_used": samples_used,
                "subfamilies_checked": subfamilies_checked,
                "subfamilies_realized": subfamilies_realized,
                "max_merit": max_merit,
            }),
        ),
        ConsistencyVerdict::Inconsistent(v) => ("inconsistent", json!({ "violation": violation(v) })),
    }
}

pub fn separation(verdict: &SeparationVerdict) -> (&'static str, Value) {
    match verdict {
        SeparationVerdict::Ok { pairs_checked } => ("separation-consistent", json!({ "pairs_checked": pairs_checked })),
        SeparationVerdict::Counterexample { first, second, sets_farkas, common_point } => (
            "separation-violated",
            json!({
                "first": first,
                "second": second,
                "sets_farkas": sets_farkas,
                "common_point": common_point,
            }),
        ),
    }
}

pub fn stab_check(check: &TransversalCheck) -> Value {
    Value::Array(
        check
            .certificates
            .iter()
            .map(|c| json!({ "distance": c.distance, "point": vector(&c.point), "weights": c.coefficients }))
            .collect(),
    )
}

pub fn witness(w: &TransversalWitness) -> Value {
    json!({
        "flat": flat(&w.flat),
        "points": vectors(&w.points),
        "weights": w.weights,
        "assignment": { "points": vectors(w.assignment.points()), "phi": w.assignment.phi() },
    })
}

fn bad(path: &str, message: impl std::fmt::Display) -> Error {
    Error::Parse { line: 0, message: format!("{path}: {message}") }
}

pub fn get<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(path, format!("missing field {key:?}")))
}

pub fn as_f64s(v: &Value, path: &str) -> Result<Vec<f64>> {
    v.as_array()
        .ok_or_else(|| bad(path, "expected an array of numbers"))?
        .iter()
        .map(|x| x.as_f64().ok_or_else(|| bad(path, "expected a number")))
        .collect()
}

pub fn as_usizes(v: &Value, path: &str) -> Result<Vec<usize>> {
    v.as_array()
        .ok_or_else(|| bad(path, "expected an array of indices"))?
        .iter()
        .map(|x| x.as_u64().map(|u| u as usize).ok_or_else(|| bad(path, "expected an index")))
        .collect()
}

pub fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(path, "expected an array"))
}

pub fn to_vector(field: ScalarField, dim: usize, v: &Value, path: &str) -> Result<Vector> {
    let coords = as_f64s(v, path)?;
    if coords.len() != dim * field.real_dim() {
        return Err(bad(path, format!("expected {} numbers, found {}", dim * field.real_dim(), coords.len())));
    }
    Vector::new(field, coords)
}

pub fn to_vectors(field: ScalarField, dim: usize, v: &Value, path: &str) -> Result<Vec<Vector>> {
    as_array(v, path)?.iter().enumerate().map(|(i, x)| to_vector(field, dim, x, &format!("{path}[{i}]"))).collect()
}

pub fn to_weights(v: &Value, path: &str) -> Result<Vec<Vec<f64>>> {
    as_array(v, path)?.iter().enumerate().map(|(i, w)| as_f64s(w, &format!("{path}[{i}]"))).collect()
}

pub fn to_flat(field: ScalarField, d: usize, v: &Value, path: &str) -> Result<AffineFlat> {
    let base = to_vector(field, d, get(v, "base", path)?, &format!("{path}.base"))?;
    let dirs = to_vectors(field, d, get(v, "dirs", path)?, &format!("{path}.dirs"))?;
    AffineFlat::new(base, Frame::new(field, d, dirs)?)
}

pub fn check_indices(idx: &[usize], n: usize, path: &str) -> Result<()> {
    match idx.iter().find(|&&i| i >= n) {
        Some(i) => Err(bad(path, format!("set index {i} out of range for {n} sets"))),
        None => Ok(()),
    }
}

pub fn to_realization(field: ScalarField, d: usize, k: usize, n: usize, v: &Value) -> Result<AffineRealization> {
    let path = "certificate.realization";
    let subfamily = as_usizes(get(v, "subfamily", path)?, &format!("{path}.subfamily"))?;
    check_indices(&subfamily, n, path)?;
    let matrix = to_vectors(field, d, get(v, "matrix", path)?, &format!("{path}.matrix"))?;
    if matrix.len() != k {
        return Err(bad(path, format!("expected {k} matrix columns, found {}", matrix.len())));
    }
    Ok(AffineRealization {
        subfamily,
        matrix,
        offset: to_vector(field, d, get(v, "offset", path)?, &format!("{path}.offset"))?,
        points: to_vectors(field, d, get(v, "points", path)?, &format!("{path}.points"))?,
        weights: to_weights(get(v, "weights", path)?, &format!("{path}.weights"))?,
    })
}

pub fn to_violation(field: ScalarField, n: usize, v: &Value) -> Result<Violation> {
    let path = "certificate.violation";
    let subfamily = as_usizes(get(v, "subfamily", path)?, &format!("{path}.subfamily"))?;
    check_indices(&subfamily, n, path)?;
    let components = to_vectors(field, subfamily.len(), get(v, "tuple", path)?, &format!("{path}.tuple"))?;
    let source = match get(v, "source", path)?.as_str() {
        Some("sampling") => ktransversal::consistency::ViolationSource::Sampling,
        Some("local-search") => ktransversal::consistency::ViolationSource::LocalSearch,
        Some("test-map-zero") => ktransversal::consistency::ViolationSource::TestMapZero,
        _ => return Err(bad(&format!("{path}.source"), "unknown source")),
    };
    Ok(Violation {
        tuple: DependencyTuple::new(field, subfamily.clone(), components)?,
        subfamily,
        farkas: as_f64s(get(v, "farkas", path)?, &format!("{path}.farkas"))?,
        source,
    })
}

pub fn to_separation(n: usize, v: &Value) -> Result<SeparationVerdict> {
    let path = "certificate";
    let first = as_usizes(get(v, "first", path)?, "certificate.first")?;
    let second = as_usizes(get(v, "second", path)?, "certificate.second")?;
    check_indices(&first, n, path)?;
    check_indices(&second, n, path)?;
    Ok(SeparationVerdict::Counterexample {
        first,
        second,
        sets_farkas: as_f64s(get(v, "sets_farkas", path)?, "certificate.sets_farkas")?,
        common_point: as_f64s(get(v, "common_point", path)?, "certificate.common_point")?,
    })
}

/// The standard report envelope. `timing` is attached by the caller.
pub fn envelope(
    command: &str,
    verdict: &str,
    certificate: Value,
    residuals: Value,
    seed: Option<u64>,
) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("verdict".into(), json!(verdict));
    m.insert("certificate".into(), certificate);
    m.insert("residuals".into(), residuals);
    m.insert("seed".into(), json!(seed));
    m
}
