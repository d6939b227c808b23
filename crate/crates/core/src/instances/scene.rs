//! Scenes and their JSON form.
//!
//! ```text
//! {"field":"R"|"C","d":int,"k":int,
//!  "sets":[[[x...]...]...],
//!  "assignment":{"points":[[...]...],"phi":[int...]},   optional
//!  "planted":{"base":[...],"dirs":[[...]...]},          optional
//!  "label":{"value":"yes"|"no"|"unknown","provenance":str}  optional}
//! ```
//!
//! Complex vectors list `2d` reals with real and imaginary parts
//! interleaved. Numbers are written in shortest round-trip form, so parsing
//! an emitted scene reproduces every float bit for bit.

use serde::{Deserialize, Serialize};

use crate::consistency::PointAssignment;
use crate::error::{Error, Result};
use crate::geometry::{AffineFlat, Frame, Polytope, ScalarField, Vector};
use crate::solvers::flat_stabs;

/// Distance within which a planted flat must meet every set.
pub const PLANTED_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    HasTransversal,
    NoTransversal,
    Unknown,
}

impl Label {
    pub fn tag(self) -> &'static str {
        match self {
            Label::HasTransversal => "yes",
            Label::NoTransversal => "no",
            Label::Unknown => "unknown",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "yes" => Some(Label::HasTransversal),
            "no" => Some(Label::NoTransversal),
            "unknown" => Some(Label::Unknown),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneLabel {
    pub value: Label,
    /// Which oracle or construction produced the label.
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub field: ScalarField,
    pub d: usize,
    pub k: usize,
    pub sets: Vec<Polytope>,
    pub assignment: Option<PointAssignment>,
    pub planted: Option<AffineFlat>,
    pub label: Option<SceneLabel>,
}

impl Scene {
    /// Dimensions, fields, `k < d`, assignment shape and the planted stab
    /// condition.
    pub fn validate(&self) -> Result<()> {
        if self.k >= self.d {
            return Err(Error::InvalidRange { k: self.k, d: self.d });
        }
        for (i, p) in self.sets.iter().enumerate() {
            if p.field() != self.field {
                return Err(Error::InvariantViolation(format!("set {i} is over the wrong field")));
            }
            if p.ambient_dim() != self.d {
                return Err(Error::InvariantViolation(format!(
                    "set {i} lives in dimension {}, scene has d = {}",
                    p.ambient_dim(),
                    self.d
                )));
            }
        }
        if let Some(a) = &self.assignment {
            if a.field() != self.field || a.k() != self.k || a.len() != self.sets.len() {
                return Err(Error::InvariantViolation("assignment does not match the scene".into()));
            }
        }
        if let Some(flat) = &self.planted {
            if flat.field() != self.field || flat.ambient_dim() != self.d || flat.dim() != self.k {
                return Err(Error::InvariantViolation("planted flat does not match the scene".into()));
            }
            if let Some(i) = self.sets.iter().position(|p| !flat_stabs(flat, p, PLANTED_TOL)) {
                return Err(Error::InvariantViolation(format!("planted flat misses set {i}")));
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneDoc {
    field: String,
    d: usize,
    k: usize,
    sets: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    assignment: Option<AssignmentDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    planted: Option<FlatDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<LabelDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AssignmentDoc {
    points: Vec<Vec<f64>>,
    phi: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct FlatDoc {
    base: Vec<f64>,
    dirs: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LabelDoc {
    value: String,
    provenance: String,
}

fn field_error(path: &str, message: impl std::fmt::Display) -> Error {
    Error::Parse { line: 0, message: format!("{path}: {message}") }
}

fn vector(field: ScalarField, dim: usize, coords: &[f64], path: &str) -> Result<Vector> {
    let want = dim * field.real_dim();
    if coords.len() != want {
        return Err(field_error(path, format!("expected {want} numbers, found {}", coords.len())));
    }
    Vector::new(field, coords.to_vec()).map_err(|e| field_error(path, e))
}

impl FlatDoc {
    pub(crate) fn from_flat(flat: &AffineFlat) -> Self {
        FlatDoc {
            base: flat.basepoint().coords().to_vec(),
            dirs: flat.directions().vectors().iter().map(|v| v.coords().to_vec()).collect(),
        }
    }

    pub(crate) fn to_flat(&self, field: ScalarField, d: usize, path: &str) -> Result<AffineFlat> {
        let base = vector(field, d, &self.base, &format!("{path}.base"))?;
        let dirs = self
            .dirs
            .iter()
            .enumerate()
            .map(|(j, v)| vector(field, d, v, &format!("{path}.dirs[{j}]")))
            .collect::<Result<Vec<_>>>()?;
        let frame = Frame::new(field, d, dirs).map_err(|e| field_error(&format!("{path}.dirs"), e))?;
        AffineFlat::new(base, frame).map_err(|e| field_error(path, e))
    }
}

fn to_doc(scene: &Scene) -> SceneDoc {
    SceneDoc {
        field: scene.field.tag().to_string(),
        d: scene.d,
        k: scene.k,
        sets: scene.sets.iter().map(|p| p.vertices().iter().map(|v| v.coords().to_vec()).collect()).collect(),
        assignment: scene.assignment.as_ref().map(|a| AssignmentDoc {
            points: a.points().iter().map(|p| p.coords().to_vec()).collect(),
            phi: a.phi().to_vec(),
        }),
        planted: scene.planted.as_ref().map(FlatDoc::from_flat),
        label: scene
            .label
            .as_ref()
            .map(|l| LabelDoc { value: l.value.tag().to_string(), provenance: l.provenance.clone() }),
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn emit_scene(scene: &Scene) -> Result<String> {
    scene.validate()?;
    let mut s = serde_json::to_string_pretty(&to_doc(scene)).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Parses and validates a scene.
pub fn parse_scene(text: &str) -> Result<Scene> {
    let doc: SceneDoc =
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })?;
    let field = ScalarField::from_tag(&doc.field)
        .ok_or_else(|| field_error("field", format!("unknown field tag {:?}", doc.field)))?;
    let d = doc.d;
    let mut sets = Vec::with_capacity(doc.sets.len());
    for (i, verts) in doc.sets.iter().enumerate() {
        if verts.is_empty() {
            return Err(field_error(&format!("sets[{i}]"), "a set needs at least one vertex"));
        }
        let vs = verts
            .iter()
            .enumerate()
            .map(|(j, v)| vector(field, d, v, &format!("sets[{i}][{j}]")))
            .collect::<Result<Vec<_>>>()?;
        sets.push(Polytope::new(vs).map_err(|e| field_error(&format!("sets[{i}]"), e))?);
    }
    let assignment = match &doc.assignment {
        None => None,
        Some(a) => {
            let points = a
                .points
                .iter()
                .enumerate()
                .map(|(j, p)| vector(field, doc.k, p, &format!("assignment.points[{j}]")))
                .collect::<Result<Vec<_>>>()?;
            Some(PointAssignment::new(field, doc.k, points, a.phi.clone()).map_err(|e| field_error("assignment", e))?)
        }
    };
    let planted = doc.planted.as_ref().map(|p| p.to_flat(field, d, "planted")).transpose()?;
    let label = match &doc.label {
        None => None,
        Some(l) => Some(SceneLabel {
            value: Label::from_tag(&l.value)
                .ok_or_else(|| field_error("label.value", format!("unknown label {:?}", l.value)))?,
            provenance: l.provenance.clone(),
        }),
    };
    let scene = Scene { field, d, k: doc.k, sets, assignment, planted, label };
    scene.validate()?;
    Ok(scene)
}

/// A flat on its own, in the scene's `planted` format.
pub fn emit_flat(flat: &AffineFlat) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&FlatDoc::from_flat(flat)).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn parse_flat(text: &str, field: ScalarField, d: usize) -> Result<AffineFlat> {
    let doc: FlatDoc =
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })?;
    doc.to_flat(field, d, "flat")
}
