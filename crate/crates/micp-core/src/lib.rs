//! Desk-scale toolkit for mixed-integer convex programs: represent small
//! instances exactly, construct and verify optimality certificates built
//! from lattice-free polyhedra, derive the matching exact dual, and check
//! everything against a brute-force oracle.

pub mod certificate;
pub mod cutting;
pub mod dual;
pub mod error;
pub mod expr;
pub mod fiber;
pub mod geometry;
pub mod linalg;
pub mod oracle;
pub mod problem;
pub mod scalar;
pub mod simplex;
pub mod tol;

pub use error::{CoreError, Result};
pub use expr::ConvexExpr;
pub use problem::{BoundingBox, Point, Problem};
pub use tol::Tolerances;
