//! Seeded instance generators with ground-truth labels, scene JSON and SVG
//! figures.

pub mod generate;
pub mod scene;
pub mod svg;

pub use generate::{gen_disjoint_2d, gen_planted, gen_singletons, random_assignment, DisjointMode, GenSpec};
pub use scene::{emit_flat, emit_scene, parse_flat, parse_scene, Label, Scene, SceneLabel};
pub use svg::{emit_svg, render_svg, Projection};
