//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by solvers, geometry routines, and certificate machinery.
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid expression: {0}")]
    InvalidExpression(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Iteration cap hit before the model gap closed. Carries the best
    /// iterate seen so the caller can inspect how far the solve got.
    #[error("solver stalled at value {value} (gap {gap})")]
    SolverStalled {
        value: f64,
        gap: f64,
        point: Vec<f64>,
    },

    #[error("stationarity residual {residual} exceeds tolerance {tolerance}")]
    StationarityResidualTooLarge { residual: f64, tolerance: f64 },

    #[error("enumeration budget of {budget} fibers exceeded")]
    BudgetExceeded { budget: usize },

    /// No lattice-free sub-selection of the requested size exists. For
    /// half-space systems whose normals vanish on the continuous block this
    /// would contradict the lattice Helly bound under exact arithmetic, so
    /// it signals either numerical trouble or a genuinely mixed system.
    #[error("no lattice-free subset of size <= {limit} found")]
    NoValidSubset { limit: usize },

    #[error("no feasible fiber in the box")]
    NoFeasibleFiber,

    #[error("mixed-integer Slater condition violated at fiber {fiber:?} (minimax value {value})")]
    SlaterViolated { fiber: Vec<i64>, value: f64 },

    /// Construction could not certify lattice-freeness (unbounded polyhedron
    /// or an integer witness outside the enumerated box).
    #[error("construction inconclusive: {0}")]
    Inconclusive(String),

    #[error("degenerate dual row {row}: infeasible-point normalizer is not positive")]
    DegenerateRow { row: usize },

    #[error("guard violated: {0}")]
    GuardViolated(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
