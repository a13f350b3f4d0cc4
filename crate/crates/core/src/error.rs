use thiserror::Error;

use crate::operator::OperatorError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("invalid exponent {p}: must be {requirement}")]
    InvalidExponent { p: f64, requirement: &'static str },
    #[error("generator is not unital: |L(1)| = {residual:.3e}")]
    NotUnital { residual: f64 },
    #[error("argument is not positive semidefinite (eigenvalue {min_eigenvalue:e})")]
    NegativeInput { min_eigenvalue: f64 },
    #[error("generator is not primitive: kernel dimension {kernel_dim}, stationary minimum eigenvalue {min_eigenvalue:e}")]
    NotPrimitive { kernel_dim: usize, min_eigenvalue: f64 },
    #[error("generator is not reversible (asymmetry {asymmetry:.3e})")]
    NotReversible { asymmetry: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("Gibbs state is not stationary (residual {residual:.3e})")]
    GibbsNotStationary { residual: f64 },
    #[error("geometric series diverges: t = {t} <= ln(C)/λ = {threshold}")]
    SeriesDiverges { t: f64, threshold: f64 },
    #[error("all variational restarts collapsed onto constant witnesses")]
    DegenerateWitness,
    #[error("negative rate {eigenvalue:e} in coupling matrix")]
    NegativeRate { eigenvalue: f64 },
    #[error("eigen-operator residual {residual:.3e} for string {string}")]
    EigenResidualExceeded { string: String, residual: f64 },
    #[error("bound violated: {what} = {value:e} exceeds {bound:e}")]
    BoundViolated { what: String, value: f64, bound: f64 },
    #[error("epsilon {epsilon} outside (0, 1)")]
    InvalidEpsilon { epsilon: f64 },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
