//! The dependency-consistency conditions as executable checkers, the
//! separation and planar ordering conditions, and witness construction from
//! a known transversal.

pub mod assignment;
pub mod checker;
pub mod hadwiger;
pub mod realization;
pub mod separation;
pub mod tuple;
pub mod witness;

pub use assignment::{
    dependency_dim, dependency_residual, dependency_space, subfamily_bound, tuple_from_coefficients, PointAssignment,
};
pub use checker::{
    check_dependency_consistency, enumerate_subfamilies, single_dependency_satisfiable, subsets, test_map_violation,
    Budget, ConsistencyVerdict, Enumeration, Violation, ViolationSource,
};
pub use hadwiger::{find_hadwiger_order, hadwiger_order_check, HadwigerCheck};
pub use realization::{find_affine_realization, AffineRealization};
pub use separation::{check_separation_consistency, subfamily_pairs, validate_counterexample, SeparationVerdict};
pub use tuple::{check_tuple, validate_tuple_check, TupleCheck};
pub use witness::{witness_from_transversal, TransversalWitness};
