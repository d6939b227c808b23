//! Deciding, certifying and searching for k-transversals to finite families
//! of convex polytopes in `R^d` and `C^d`.
//!
//! The modules build on each other bottom-up:
//!
//! - [`geometry`]: scalar fields, vectors, polytopes, frames, flats, lifting.
//! - [`solvers`]: certified LP feasibility, Wolfe's min-norm point,
//!   Carathéodory reduction and the scaled-dependency LP.
//! - [`consistency`]: the dependency-consistency conditions as checkers.
//! - [`engines`]: Stiefel-manifold and alternating-fit transversal search,
//!   exact small-case oracles, verification.
//! - [`instances`]: seeded generators, scene JSON, SVG output.

pub mod consistency;
pub mod engines;
pub mod error;
pub mod exact;
pub mod geometry;
pub mod instances;
pub mod linalg;
pub mod solvers;

pub use error::{Error, Result};
pub use geometry::{AffineFlat, Frame, Polytope, ScalarField, Vector};
