//! Deterministic SVG figures of planar scenes (or of a user-chosen 2-plane
//! projection of higher-dimensional ones).

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::{AffineFlat, Vector};

use super::scene::Scene;

const SIZE: f64 = 800.0;
const MARGIN: f64 = 40.0;

/// Two linear functionals on the realified coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Projection {
    fn apply(&self, v: &Vector) -> (f64, f64) {
        let dot = |r: &[f64]| r.iter().zip(v.coords()).map(|(a, b)| a * b).sum::<f64>();
        (dot(&self.x), dot(&self.y))
    }
}

fn resolve(scene: &Scene, projection: Option<&Projection>) -> Result<Projection> {
    let rdim = scene.d * scene.field.real_dim();
    match projection {
        Some(p) if p.x.len() == rdim && p.y.len() == rdim => Ok(p.clone()),
        Some(p) => Err(Error::DimensionMismatch { expected: rdim, found: p.x.len().min(p.y.len()) }),
        None if rdim == 2 => Ok(Projection { x: vec![1.0, 0.0], y: vec![0.0, 1.0] }),
        None => Err(Error::UnsupportedDimension(scene.d)),
    }
}

/// Counter-clockwise hull of planar points (monotone chain), collinear
/// points dropped.
fn hull(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Maps scene coordinates to the viewBox with a common scale and `y` up.
struct Viewport {
    min: (f64, f64),
    scale: f64,
    offset: (f64, f64),
}

impl Viewport {
    fn fit(points: &[(f64, f64)]) -> Self {
        let (mut lo, mut hi) = ((-1.0f64, -1.0f64), (1.0f64, 1.0f64));
        if !points.is_empty() {
            lo = (f64::INFINITY, f64::INFINITY);
            hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for p in points {
                lo = (lo.0.min(p.0), lo.1.min(p.1));
                hi = (hi.0.max(p.0), hi.1.max(p.1));
            }
        }
        let span = (hi.0 - lo.0).max(hi.1 - lo.1).max(1e-9);
        let pad = 0.05 * span;
        let min = (lo.0 - pad, lo.1 - pad);
        let scale = (SIZE - 2.0 * MARGIN) / (span + 2.0 * pad);
        let used = ((hi.0 - lo.0 + 2.0 * pad) * scale, (hi.1 - lo.1 + 2.0 * pad) * scale);
        let offset = (MARGIN + 0.5 * (SIZE - 2.0 * MARGIN - used.0), MARGIN + 0.5 * (SIZE - 2.0 * MARGIN - used.1));
        Viewport { min, scale, offset }
    }

    fn map(&self, p: (f64, f64)) -> (f64, f64) {
        (self.offset.0 + (p.0 - self.min.0) * self.scale, SIZE - (self.offset.1 + (p.1 - self.min.1) * self.scale))
    }

    /// Scene-space rectangle covered by the drawing area.
    fn bounds(&self) -> ((f64, f64), (f64, f64)) {
        let inv = |sx: f64, sy: f64| {
            ((sx - self.offset.0) / self.scale + self.min.0, (SIZE - sy - self.offset.1) / self.scale + self.min.1)
        };
        let a = inv(0.0, SIZE);
        let b = inv(SIZE, 0.0);
        (a, b)
    }
}

/// Part of the line `p + t u` inside the rectangle, by slab clipping.
fn clip_line(p: (f64, f64), u: (f64, f64), lo: (f64, f64), hi: (f64, f64)) -> Option<((f64, f64), (f64, f64))> {
    let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
    for (pc, uc, l, h) in [(p.0, u.0, lo.0, hi.0), (p.1, u.1, lo.1, hi.1)] {
        if uc.abs() < 1e-15 {
            if pc < l || pc > h {
                return None;
            }
        } else {
            let (a, b) = ((l - pc) / uc, (h - pc) / uc);
            t0 = t0.max(a.min(b));
            t1 = t1.min(a.max(b));
        }
    }
    (t0 <= t1).then_some(((p.0 + t0 * u.0, p.1 + t0 * u.1), (p.0 + t1 * u.0, p.1 + t1 * u.1)))
}

fn fmt(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// Renders sets, then the flat, then witness points.
pub fn render_svg(
    scene: &Scene,
    flat: Option<&AffineFlat>,
    witness: &[Vector],
    projection: Option<&Projection>,
) -> Result<String> {
    let proj = resolve(scene, projection)?;
    let polys: Vec<Vec<(f64, f64)>> =
        scene.sets.iter().map(|p| hull(p.vertices().iter().map(|v| proj.apply(v)).collect())).collect();
    let wit: Vec<(f64, f64)> = witness.iter().map(|v| proj.apply(v)).collect();
    let mut all: Vec<(f64, f64)> = polys.iter().flatten().copied().collect();
    all.extend(&wit);
    let flat_base = flat.map(|f| proj.apply(f.basepoint()));
    all.extend(flat_base);
    let vp = Viewport::fit(&all);
    let (lo, hi) = vp.bounds();

    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="800" viewBox="0 0 800 800">"#);
    let _ = writeln!(out, r#"<rect x="0" y="0" width="800" height="800" fill="white"/>"#);
    if lo.1 <= 0.0 && 0.0 <= hi.1 {
        let (a, b) = (vp.map((lo.0, 0.0)), vp.map((hi.0, 0.0)));
        let _ = writeln!(
            out,
            r##"<line class="axis" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#bbbbbb" stroke-width="1"/>"##,
            fmt(a.0),
            fmt(a.1),
            fmt(b.0),
            fmt(b.1)
        );
    }
    if lo.0 <= 0.0 && 0.0 <= hi.0 {
        let (a, b) = (vp.map((0.0, lo.1)), vp.map((0.0, hi.1)));
        let _ = writeln!(
            out,
            r##"<line class="axis" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#bbbbbb" stroke-width="1"/>"##,
            fmt(a.0),
            fmt(a.1),
            fmt(b.0),
            fmt(b.1)
        );
    }
    for poly in &polys {
        let mapped: Vec<(f64, f64)> = poly.iter().map(|&p| vp.map(p)).collect();
        match mapped.len() {
            1 => {
                let _ = writeln!(
                    out,
                    r##"<circle class="set" cx="{}" cy="{}" r="3" fill="#4477aa"/>"##,
                    fmt(mapped[0].0),
                    fmt(mapped[0].1)
                );
            }
            _ => {
                let pts: Vec<String> = mapped.iter().map(|p| format!("{},{}", fmt(p.0), fmt(p.1))).collect();
                let _ = writeln!(
                    out,
                    r##"<polygon class="set" points="{}" fill="#4477aa" fill-opacity="0.35" stroke="#224466" stroke-width="1.5"/>"##,
                    pts.join(" ")
                );
            }
        }
    }
    if let (Some(f), Some(base)) = (flat, flat_base) {
        match f.dim() {
            0 => {
                let c = vp.map(base);
                let _ = writeln!(
                    out,
                    r##"<circle class="flat" cx="{}" cy="{}" r="5" fill="#cc3311"/>"##,
                    fmt(c.0),
                    fmt(c.1)
                );
            }
            _ => {
                let dir = proj.apply(&f.basepoint().add(&f.directions().vectors()[0]));
                let u = (dir.0 - base.0, dir.1 - base.1);
                if let Some((a, b)) = clip_line(base, u, lo, hi) {
                    let (a, b) = (vp.map(a), vp.map(b));
                    let _ = writeln!(
                        out,
                        r##"<line class="flat" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#cc3311" stroke-width="2"/>"##,
                        fmt(a.0),
                        fmt(a.1),
                        fmt(b.0),
                        fmt(b.1)
                    );
                }
            }
        }
    }
    for w in &wit {
        let c = vp.map(*w);
        let _ =
            writeln!(out, r##"<circle class="witness" cx="{}" cy="{}" r="4" fill="#228833"/>"##, fmt(c.0), fmt(c.1));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Writes [`render_svg`] output to `path`.
pub fn emit_svg(
    scene: &Scene,
    flat: Option<&AffineFlat>,
    witness: &[Vector],
    projection: Option<&Projection>,
    path: &std::path::Path,
) -> Result<()> {
    let svg = render_svg(scene, flat, witness, projection)?;
    std::fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ScalarField;

    fn empty(d: usize) -> Scene {
        Scene { field: ScalarField::Real, d, k: 0, sets: vec![], assignment: None, planted: None, label: None }
    }

    #[test]
    fn empty_scene_draws_axes() {
        let svg = render_svg(&empty(2), None, &[], None).unwrap();
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("class=\"axis\"").count(), 2);
        assert!(!svg.contains("class=\"set\""));
    }

    #[test]
    fn three_dimensions_need_a_projection() {
        assert_eq!(render_svg(&empty(3), None, &[], None), Err(Error::UnsupportedDimension(3)));
        let p = Projection { x: vec![1.0, 0.0, 0.0], y: vec![0.0, 0.0, 1.0] };
        assert!(render_svg(&empty(3), None, &[], Some(&p)).is_ok());
    }

    #[test]
    fn hull_drops_interior_points() {
        let h = hull(vec![(0.0, 0.0), (1.0, 0.0), (0.2, 0.2), (0.0, 1.0), (1.0, 1.0)]);
        assert_eq!(h.len(), 4);
    }
}
