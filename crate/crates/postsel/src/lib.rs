//! Exact tools for post-selected classical query algorithms.
//!
//! A post-selected algorithm is a probability distribution over decision trees
//! whose leaves output 0, 1 or bot ("abort"); its answer on an input is the
//! output conditioned on not aborting.  This crate simulates such algorithms
//! with exact rational arithmetic, converts them to and from rational
//! functions with nonnegative coefficients over the literals `x_i` and
//! `1 - x_i`, computes certificate and degree complexity measures, and decides
//! existence of low-degree rational approximations by exact linear
//! programming.
//!
//! Module map:
//!
//! * [`boolean`] - bit strings, (partial) Boolean functions, certificates.
//! * [`poly`] - literal monomials/polynomials, positive rational functions,
//!   symmetrization.
//! * [`program`] - randomized decision trees with abort leaves, exact
//!   distributions and seeded sampling.
//! * [`transforms`] - conversions between programs and rational functions,
//!   plus the named program constructions.
//! * [`degree`] - exact-LP feasibility of degree-d approximations and the
//!   derived degree bounds.
//! * [`counting`] - post-selected approximate counting.
//! * [`acceptance`] - self-contained end-to-end checks, also reachable from
//!   the CLI.

pub mod acceptance;
pub mod boolean;
pub mod counting;
pub mod degree;
pub mod poly;
pub mod program;
pub mod rat;
mod sampling;
pub mod transforms;

use num_rational::BigRational;
use thiserror::Error as ThisError;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Eq, ThisError)]
pub enum Error {
    #[error("bit string has length {got}, expected {expected}")]
    BitLength { expected: usize, got: usize },
    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("{what} supports at most n = {cap} (got n = {n})")]
    TooManyVariables {
        what: &'static str,
        n: usize,
        cap: usize,
    },
    #[error("function has an empty domain")]
    EmptyDomain,
    #[error("function is not symmetric")]
    NotSymmetric,
    #[error("function is not total")]
    NotTotal,
    #[error("function is constant{}", match value { Some(b) => format!("-{}", u8::from(*b)), None => String::new() })]
    ConstantFunction { value: Option<bool> },
    #[error("no inputs with value {}", u8::from(*value))]
    NoInputsWithValue { value: bool },
    #[error("variable {var} appears both plain and negated in one monomial")]
    OverlappingLiterals { var: usize },
    #[error("coefficients must be positive (got {coeff})")]
    NonpositiveCoefficient { coeff: BigRational },
    #[error("denominator vanishes at x = {x}")]
    DenominatorVanishes { x: String },
    #[error("chance-node weights sum to {sum}, expected 1")]
    WeightSum { sum: BigRational },
    #[error("chance-node weights must be positive")]
    NonpositiveWeight,
    #[error("program queries {depth} variables on one path but only {n} exist")]
    DepthExceedsVariables { depth: usize, n: usize },
    #[error("post-selection impossible: program aborts with certainty on x = {x}")]
    PostselectionImpossible { x: String },
    #[error("no non-abort outcome after {attempts} attempts")]
    AttemptsExhausted { attempts: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("internal error: {0}")]
    Internal(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
