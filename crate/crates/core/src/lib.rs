//! Exact-arithmetic toolkit for elliptic root systems, Bridgeland walls on
//! Hilbert schemes of points of `T*E`, a Fock-space model of the toroidal
//! algebra attached to `T*E`, and the local calculus of cyclic orbifold
//! points.
//!
//! Everything is computed over Q or a cyclotomic field; there is no floating
//! point outside SVG coordinates.

pub mod arith;
pub mod coh_lattice;
pub mod cyclotomic;
pub mod fock;
pub mod linalg;
pub mod local_model;
pub mod root_system;
pub mod walls;
pub mod weyl;

pub use arith::Q;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown root system type {0:?}")]
    UnknownType(String),
    #[error("type {0} is wild and has no wall description; only A-1, D4, E6, E7, E8 are supported")]
    WildType(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("not a root of the system: {0}")]
    NotARoot(String),
    #[error("root {0} is imaginary and has no reflection")]
    ImaginaryRoot(String),
    #[error("matrix does not preserve the bilinear form")]
    NotFormPreserving,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("mode index {0} exceeds the truncation {1}")]
    Truncation(i64, usize),
    #[error("{0} needs the extended vertex conventions")]
    ExtendedModeRequired(String),
    #[error("state mixes weights {0} and {1}")]
    MixedWeight(u32, u32),
}

pub type Result<T> = std::result::Result<T, Error>;
