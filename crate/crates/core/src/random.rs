//! Seeded random operators for tests, restarts and sampling.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::operator::{c, hermitian_part, CMatrix, FullRankState, HermitianOperator};

/// Complex Ginibre matrix with standard normal real and imaginary parts.
pub fn complex_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

pub fn hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianOperator {
    HermitianOperator::from_hermitian_part(&complex_matrix(d, rng))
}

/// A A† for Ginibre A, so generically full rank but with a spread spectrum.
pub fn psd<R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianOperator {
    let a = complex_matrix(d, rng);
    HermitianOperator::from_hermitian_part(&(&a * a.adjoint()))
}

/// PSD operator whose rank is drawn uniformly from 1..=d.
pub fn psd_random_rank<R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianOperator {
    let rank = rng.random_range(1..=d);
    let a = CMatrix::from_fn(d, rank, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    HermitianOperator::from_hermitian_part(&(&a * a.adjoint()))
}

pub fn full_rank_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> FullRankState {
    let a = complex_matrix(d, rng);
    let m = hermitian_part(&(&a * a.adjoint())) + CMatrix::identity(d, d).scale(0.05 * d as f64);
    FullRankState::from_unnormalized(HermitianOperator::from_hermitian_part(&m)).expect("shifted Gram matrix is positive")
}

/// Haar-ish unitary from the QR factor of a Ginibre matrix.
pub fn unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    complex_matrix(d, rng).qr().q()
}
