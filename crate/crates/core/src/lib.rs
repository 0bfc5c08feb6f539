//! k-center clustering for uncertain points.
//!
//! Each uncertain point is an independent discrete distribution over locations
//! in a Euclidean space or a finite metric. The crate provides:
//!
//! - exact expected-cost evaluation ([`cost`]), polynomial in the input size;
//! - replace-and-solve approximation pipelines with their guaranteed factors
//!   ([`solver`]);
//! - brute-force optimum providers for small instances ([`oracle`]);
//! - seeded suites that check every guarantee against those oracles ([`verify`]).

pub mod cost;
pub mod deterministic;
pub mod error;
pub mod metric;
pub mod model;
pub mod oracle;
pub mod solver;
pub mod verify;

pub use cost::{
    distance_distribution, ecost_assigned, ecost_enumerated, ecost_unassigned, expected_distance,
    expected_max, Assignment, DiscreteDist,
};
pub use deterministic::{
    deterministic_cost, exact_discrete_kcenter, expected_point, gonzalez, weighted_one_median,
    CenterSet, DetSolver,
};
pub use error::{Error, Result};
pub use metric::{validate_space, Point, Space, SpaceKind, Violation};
pub use model::{
    enumerate_realizations, generate_instance, parse_instance, GenSpace, Instance, Realization,
    UncertainPoint,
};
pub use oracle::{opt_restricted, opt_unassigned, opt_unrestricted, OracleBudget};
pub use solver::{
    approximation_bound, assign, solve_kcenter, solve_one_center, Solution, Strategy, Version,
};
