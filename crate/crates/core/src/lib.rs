//! Quantum dynamical semigroups at desk scale: Lindblad and Davies generators,
//! σ-weighted L_p functionals, log-Sobolev brackets and hypercontractivity checks
//! for product, graph-state and linear fermionic models.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod davies;
pub mod error;
pub mod fermion;
pub mod graph;
pub mod lindblad;
pub mod operator;
pub mod optimize;
pub mod product;
pub mod random;
pub mod weighted;

pub use error::{Error, Result};
pub use operator::{CMatrix, FullRankState, HermitianOperator, Superoperator, C64};
pub use weighted::WeightedContext;

/// Largest Hilbert-space dimension for superoperator work (d² ≤ 4096).
pub const SUPEROPERATOR_DIM_CAP: usize = 64;
