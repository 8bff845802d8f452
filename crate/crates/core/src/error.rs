use thiserror::Error;

use crate::spaces::SpaceKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a mesh needs at least one subdivision per axis")]
    EmptyMesh,

    #[error("n = {n} is not divisible by 3; macroelement postprocessing is undefined")]
    NonDivisibleMesh { n: usize },

    #[error("quadrature order must be at least 1")]
    ZeroQuadratureOrder,

    #[error("{space:?}: spanning set has numerical rank {rank}, expected {expected}")]
    DegenerateSpan {
        space: SpaceKind,
        rank: usize,
        expected: usize,
    },

    #[error("{space:?}: DoF Vandermonde matrix is singular (condition number {condition:e})")]
    SingularVandermonde { space: SpaceKind, condition: f64 },

    #[error("derivative order {order} is above the supported maximum of 3")]
    UnsupportedOrder { order: usize },

    #[error("solver stopped after {iterations} iterations at relative residual {residual:e}")]
    MaxIterations { iterations: usize, residual: f64 },

    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("convergence order undefined for non-positive error {value:e}")]
    DegenerateError { value: f64 },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
}
