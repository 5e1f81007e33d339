use thiserror::Error;

use crate::exact::RationalVector;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("degenerate basis: rows are linearly dependent")]
    DegenerateBasis,

    #[error("max-coordinates are undefined for zero vector")]
    ZeroVector,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("D_{n}^+ is not a lattice: {x} + {y} = {sum} is not in the set")]
    NotALattice {
        n: usize,
        x: RationalVector,
        y: RationalVector,
        sum: RationalVector,
    },

    #[error("search infeasible: dimension {n} exceeds the limit {limit}")]
    SearchInfeasible { n: usize, limit: usize },

    #[error("size guard exceeded: {work} evaluations > {limit}")]
    SizeGuard { work: u128, limit: u128 },

    #[error("formula outside validity range: requires m2 < m1/2 (m1={m1}, m2={m2})")]
    FormulaRange { m1: usize, m2: usize },

    #[error("infeasible parameters: {0}")]
    InfeasibleParams(String),

    #[error("cap interval empty; alpha vacuously 0")]
    EmptyCapInterval,

    #[error("Blichfeldt branch infeasible for these parameters (alpha sup = {alpha})")]
    BlichfeldtInfeasible { alpha: f64 },

    #[error("arithmetic overflow in integer enumeration")]
    Overflow,

    #[error("unknown name {name:?}; known: {known}")]
    UnknownName { name: String, known: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
