//! Dense Hermitian operators, spectral calculus, tensor embedding and
//! superoperators acting on column-stacked operators.

use std::borrow::Cow;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::random;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative Hermiticity tolerance (relative to the largest entry magnitude).
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Exponents whose state powers are computed when a [`FullRankState`] is built.
const STANDARD_POWERS: [f64; 8] = [1.0, -1.0, 0.5, -0.5, 0.25, -0.25, 0.125, -0.125];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("input is not Hermitian: deviation {deviation:.3e} exceeds {tolerance:.3e}")]
    NonHermitianInput { deviation: f64, tolerance: f64 },
    #[error("matrix function undefined at eigenvalue {eigenvalue:e}")]
    DomainError { eigenvalue: f64 },
    #[error("site {site} out of range for a register of {n_sites} sites")]
    IndexError { site: usize, n_sites: usize },
    #[error("action is not linear (probe residual {residual:.3e})")]
    NonLinearAction { residual: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("state is not full rank (minimum eigenvalue {min_eigenvalue:e})")]
    NotFullRank { min_eigenvalue: f64 },
    #[error("state trace {trace} is not 1")]
    NotNormalized { trace: f64 },
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Largest entry magnitude.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// Kronecker product of a list of factors (left factor most significant).
pub fn kron_all<'a, I>(factors: I) -> CMatrix
where
    I: IntoIterator<Item = &'a CMatrix>,
{
    factors
        .into_iter()
        .fold(CMatrix::from_element(1, 1, cr(1.0)), |acc, f| acc.kronecker(f))
}

/// Single-qubit Pauli matrices and a few standard gates.
pub mod pauli {
    use super::{c, cr, CMatrix};

    pub fn x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)])
    }

    pub fn y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[cr(0.0), c(0.0, -1.0), c(0.0, 1.0), cr(0.0)])
    }

    pub fn z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(-1.0)])
    }

    /// |0><1|
    pub fn lowering() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(0.0), cr(0.0)])
    }

    /// |1><0|
    pub fn raising() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(0.0), cr(1.0), cr(0.0)])
    }

    pub fn hadamard() -> CMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        CMatrix::from_row_slice(2, 2, &[cr(h), cr(h), cr(h), cr(-h)])
    }

    /// |k><k| on a d-dimensional space.
    pub fn projector(d: usize, k: usize) -> CMatrix {
        let mut m = CMatrix::zeros(d, d);
        m[(k, k)] = cr(1.0);
        m
    }
}

fn check_square(m: &CMatrix) -> Result<usize, OperatorError> {
    if m.nrows() != m.ncols() {
        return Err(OperatorError::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(m.nrows())
}

/// Hermitian part (m + m†)/2.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// A d×d complex Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    entries: CMatrix,
}

impl HermitianOperator {
    /// Validates Hermiticity (relative tolerance [`HERMITIAN_TOL`]) and
    /// symmetrizes the stored entries.
    pub fn new(entries: CMatrix) -> Result<Self, OperatorError> {
        check_square(&entries)?;
        let scale = max_abs(&entries);
        let deviation = max_abs(&(&entries - entries.adjoint()));
        let tolerance = HERMITIAN_TOL * scale;
        if deviation > tolerance {
            return Err(OperatorError::NonHermitianInput { deviation, tolerance });
        }
        Ok(Self { entries: hermitian_part(&entries) })
    }

    /// Takes the Hermitian part of an arbitrary square matrix.
    pub fn from_hermitian_part(m: &CMatrix) -> Self {
        Self { entries: hermitian_part(m) }
    }

    pub fn identity(d: usize) -> Self {
        Self { entries: identity(d) }
    }

    pub fn zeros(d: usize) -> Self {
        Self { entries: CMatrix::zeros(d, d) }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        let mut m = CMatrix::zeros(d, d);
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = cr(v);
        }
        Self { entries: m }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn trace(&self) -> f64 {
        trace(&self.entries).re
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { entries: self.entries.scale(s) }
    }

    pub fn spectral(&self) -> SpectralDecomposition {
        spectral_decompose(self)
    }

    /// Sum of absolute eigenvalues.
    pub fn trace_norm(&self) -> f64 {
        self.spectral().eigenvalues.iter().map(|e| e.abs()).sum()
    }

    pub fn operator_norm(&self) -> f64 {
        self.spectral().eigenvalues.iter().fold(0.0, |acc: f64, e| acc.max(e.abs()))
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator { entries: &self.entries + &rhs.entries }
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator { entries: &self.entries - &rhs.entries }
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;
    fn mul(self, rhs: f64) -> HermitianOperator {
        self.scaled(rhs)
    }
}

/// Eigenvalues in ascending order with the matching unitary eigenvector matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// V diag(e) V†.
    pub fn reconstruct(&self) -> CMatrix {
        self.with_eigenvalues(|e| e)
    }

    /// V diag(φ(e)) V† without any domain check.
    fn with_eigenvalues<F: Fn(f64) -> f64>(&self, phi: F) -> CMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &e) in self.eigenvalues.iter().enumerate() {
            let w = cr(phi(e));
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= w);
        }
        scaled * v.adjoint()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

/// Hermitian eigendecomposition with ascending eigenvalues.
pub fn spectral_decompose(h: &HermitianOperator) -> SpectralDecomposition {
    hermitian_eigen(h.matrix())
}

/// Eigendecomposition of a matrix that is Hermitian up to rounding. The
/// Hermitian part is decomposed.
pub(crate) fn hermitian_eigen(m: &CMatrix) -> SpectralDecomposition {
    let d = m.nrows();
    if d == 0 {
        return SpectralDecomposition { eigenvalues: vec![], eigenvectors: CMatrix::zeros(0, 0) };
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = CMatrix::zeros(d, d);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    SpectralDecomposition { eigenvalues, eigenvectors }
}

/// Applies a scalar function through the spectral decomposition. Fails when
/// φ is not finite at some eigenvalue.
pub fn matrix_function<F: Fn(f64) -> f64>(
    s: &SpectralDecomposition,
    phi: F,
) -> Result<HermitianOperator, OperatorError> {
    for &e in &s.eigenvalues {
        if !phi(e).is_finite() {
            return Err(OperatorError::DomainError { eigenvalue: e });
        }
    }
    Ok(HermitianOperator { entries: hermitian_part(&s.with_eigenvalues(phi)) })
}

/// x log x with the convention 0 log 0 = 0 below `cutoff`. Negative inputs
/// beyond the cutoff are outside the domain.
pub fn xlogx(x: f64, cutoff: f64) -> f64 {
    if x.abs() <= cutoff {
        0.0
    } else if x < 0.0 {
        f64::NAN
    } else {
        x * x.ln()
    }
}

/// Positive-definite, trace-one state with its spectral data and cached
/// fractional powers.
#[derive(Debug, Clone)]
pub struct FullRankState {
    op: HermitianOperator,
    spectral: SpectralDecomposition,
    powers: Vec<(f64, CMatrix)>,
}

impl FullRankState {
    pub fn new(op: HermitianOperator) -> Result<Self, OperatorError> {
        let tr = op.trace();
        if (tr - 1.0).abs() > 1e-12 {
            return Err(OperatorError::NotNormalized { trace: tr });
        }
        let spectral = op.spectral();
        let min = spectral.min_eigenvalue();
        if !(min > 0.0) {
            return Err(OperatorError::NotFullRank { min_eigenvalue: min });
        }
        let mut state = Self { op, spectral, powers: Vec::new() };
        state.powers = STANDARD_POWERS.iter().map(|&r| (r, state.compute_power(r))).collect();
        Ok(state)
    }

    /// Normalizes the trace before validation.
    pub fn from_unnormalized(op: HermitianOperator) -> Result<Self, OperatorError> {
        let tr = op.trace();
        if !(tr > 0.0) {
            return Err(OperatorError::NotNormalized { trace: tr });
        }
        Self::new(op.scaled(1.0 / tr))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self::new(HermitianOperator::identity(d).scaled(1.0 / d as f64)).expect("I/d is a full-rank state")
    }

    /// exp(-βH)/tr exp(-βH).
    pub fn gibbs(h: &HermitianOperator, beta: f64) -> Result<Self, OperatorError> {
        let s = h.spectral();
        let shift = s.min_eigenvalue();
        let weights = matrix_function(&s, |e| (-beta * (e - shift)).exp())?;
        Self::from_unnormalized(weights)
    }

    pub fn from_diagonal(p: &[f64]) -> Result<Self, OperatorError> {
        Self::new(HermitianOperator::from_real_diagonal(p))
    }

    /// Also caches the listed exponents; use before sharing the state.
    pub fn with_cached_powers(mut self, exponents: &[f64]) -> Self {
        for &r in exponents {
            if self.cached(r).is_none() {
                let m = self.compute_power(r);
                self.powers.push((r, m));
            }
        }
        self
    }

    fn cached(&self, r: f64) -> Option<&CMatrix> {
        self.powers.iter().find(|(e, _)| e.to_bits() == r.to_bits()).map(|(_, m)| m)
    }

    fn compute_power(&self, r: f64) -> CMatrix {
        hermitian_part(&self.spectral.with_eigenvalues(|e| e.powf(r)))
    }

    /// σ^r.
    pub fn power(&self, r: f64) -> Cow<'_, CMatrix> {
        match self.cached(r) {
            Some(m) => Cow::Borrowed(m),
            None => Cow::Owned(self.compute_power(r)),
        }
    }

    /// log σ.
    pub fn log(&self) -> CMatrix {
        hermitian_part(&self.spectral.with_eigenvalues(f64::ln))
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn spectral(&self) -> &SpectralDecomposition {
        &self.spectral
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.spectral.min_eigenvalue()
    }

    /// ‖σ^{-1}‖, the operator norm of the inverse.
    pub fn inverse_norm(&self) -> f64 {
        1.0 / self.min_eigenvalue()
    }

    pub fn tensor(&self, other: &FullRankState) -> FullRankState {
        let op = HermitianOperator::from_hermitian_part(&self.matrix().kronecker(other.matrix()));
        let tr = op.trace();
        FullRankState::new(op.scaled(1.0 / tr)).expect("tensor product of full-rank states")
    }

    /// Trace distance ‖σ - ρ‖₁ to another state given as a matrix.
    pub fn trace_distance(&self, rho: &CMatrix) -> f64 {
        HermitianOperator::from_hermitian_part(&(self.matrix() - rho)).trace_norm()
    }
}

/// I^{⊗site} ⊗ local ⊗ I^{⊗(n_sites-site-1)} for an arbitrary square matrix.
pub fn embed_matrix(local: &CMatrix, site: usize, n_sites: usize) -> Result<CMatrix, OperatorError> {
    let d = check_square(local)?;
    if site >= n_sites {
        return Err(OperatorError::IndexError { site, n_sites });
    }
    let left = identity(d.pow(site as u32));
    let right = identity(d.pow((n_sites - site - 1) as u32));
    Ok(left.kronecker(local).kronecker(&right))
}

pub fn embed(local: &HermitianOperator, site: usize, n_sites: usize) -> Result<HermitianOperator, OperatorError> {
    Ok(HermitianOperator { entries: embed_matrix(local.matrix(), site, n_sites)? })
}

/// Column-stacking vectorization.
pub fn vectorize(f: &CMatrix) -> CVector {
    CVector::from_column_slice(f.as_slice())
}

pub fn unvectorize(v: &CVector, d: usize) -> CMatrix {
    CMatrix::from_column_slice(d, d, v.as_slice())
}

/// Linear map on d×d operators, stored as a d²×d² matrix acting on
/// column-stacked operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: CMatrix,
}

impl Superoperator {
    pub fn new(dim: usize, matrix: CMatrix) -> Result<Self, OperatorError> {
        let n = dim * dim;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(OperatorError::DimensionMismatch { expected: n, found: matrix.nrows().max(matrix.ncols()) });
        }
        Ok(Self { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, matrix: identity(dim * dim) }
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, matrix: CMatrix::zeros(dim * dim, dim * dim) }
    }

    /// f ↦ left · f · right, i.e. rightᵀ ⊗ left.
    pub fn sandwich(left: &CMatrix, right: &CMatrix) -> Self {
        Self { dim: left.nrows(), matrix: right.transpose().kronecker(left) }
    }

    /// f ↦ a f + f b.
    pub fn left_right_sum(a: &CMatrix, b: &CMatrix) -> Self {
        let d = a.nrows();
        let id = identity(d);
        Self { dim: d, matrix: id.kronecker(a) + b.transpose().kronecker(&id) }
    }

    /// Samples the action on the matrix-unit basis. Linearity is probed on
    /// random pairs and the sampled matrix is checked against direct
    /// application.
    pub fn from_action<F>(dim: usize, action: F) -> Result<Self, OperatorError>
    where
        F: Fn(&CMatrix) -> CMatrix,
    {
        let n = dim * dim;
        let mut matrix = CMatrix::zeros(n, n);
        for col in 0..n {
            let mut unit = CMatrix::zeros(dim, dim);
            unit[(col % dim, col / dim)] = cr(1.0);
            let image = action(&unit);
            if image.nrows() != dim || image.ncols() != dim {
                return Err(OperatorError::DimensionMismatch { expected: dim, found: image.nrows() });
            }
            matrix.set_column(col, &vectorize(&image));
        }
        let sup = Self { dim, matrix };

        let mut rng = ChaCha8Rng::seed_from_u64(0x5e_ed0f_11ea);
        for _ in 0..3 {
            let f = random::complex_matrix(dim, &mut rng);
            let g = random::complex_matrix(dim, &mut rng);
            let (a, b) = (c(0.7, -0.3), c(-1.1, 0.4));
            let combined = action(&(f.map(|z| z * a) + g.map(|z| z * b)));
            let separate = action(&f).map(|z| z * a) + action(&g).map(|z| z * b);
            let scale = 1.0 + max_abs(&combined).max(max_abs(&separate));
            let mut residual = max_abs(&(&combined - &separate)) / scale;
            let sampled = sup.apply(&f);
            residual = residual.max(max_abs(&(sampled - action(&f))) / scale);
            if residual > 1e-10 {
                return Err(OperatorError::NonLinearAction { residual });
            }
        }
        Ok(sup)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn apply(&self, f: &CMatrix) -> CMatrix {
        unvectorize(&(&self.matrix * vectorize(f)), self.dim)
    }

    pub fn apply_hermitian(&self, f: &HermitianOperator) -> CMatrix {
        self.apply(f.matrix())
    }

    /// self ∘ other.
    pub fn compose(&self, other: &Superoperator) -> Superoperator {
        Self { dim: self.dim, matrix: &self.matrix * &other.matrix }
    }

    /// Hilbert–Schmidt adjoint. For a Heisenberg-picture generator this is the
    /// Schrödinger-picture generator.
    pub fn adjoint(&self) -> Superoperator {
        Self { dim: self.dim, matrix: self.matrix.adjoint() }
    }

    pub fn scaled(&self, s: f64) -> Superoperator {
        Self { dim: self.dim, matrix: self.matrix.scale(s) }
    }

    /// Extends a map on one site of dimension `self.dim` to a register of
    /// `n_sites` such sites, acting trivially elsewhere.
    pub fn lift(&self, site: usize, n_sites: usize) -> Result<Superoperator, OperatorError> {
        if site >= n_sites {
            return Err(OperatorError::IndexError { site, n_sites });
        }
        let d = self.dim;
        let big = d.pow(n_sites as u32);
        let stride = d.pow((n_sites - site - 1) as u32);
        let digit = |x: usize| (x / stride) % d;
        let replace = |x: usize, v: usize| x - digit(x) * stride + v * stride;
        let n = big * big;
        let mut matrix = CMatrix::zeros(n, n);
        for col_op in 0..big {
            for row_op in 0..big {
                let target = row_op + col_op * big;
                let local_target = digit(row_op) + digit(col_op) * d;
                for jp in 0..d {
                    for ip in 0..d {
                        let v = self.matrix[(local_target, ip + jp * d)];
                        if v == C64::new(0.0, 0.0) {
                            continue;
                        }
                        let source = replace(row_op, ip) + replace(col_op, jp) * big;
                        matrix[(target, source)] += v;
                    }
                }
            }
        }
        Ok(Self { dim: big, matrix })
    }

    /// Superoperator of the Hermitian-positive map f ↦ a f a for Hermitian a.
    pub fn congruence(a: &CMatrix) -> Superoperator {
        Self::sandwich(a, a)
    }
}

impl Add for &Superoperator {
    type Output = Superoperator;
    fn add(self, rhs: &Superoperator) -> Superoperator {
        Superoperator { dim: self.dim, matrix: &self.matrix + &rhs.matrix }
    }
}

impl Sub for &Superoperator {
    type Output = Superoperator;
    fn sub(self, rhs: &Superoperator) -> Superoperator {
        Superoperator { dim: self.dim, matrix: &self.matrix - &rhs.matrix }
    }
}

/// Anything that exposes a dense square matrix.
pub trait AsMatrix {
    fn as_matrix(&self) -> &CMatrix;
}

impl AsMatrix for CMatrix {
    fn as_matrix(&self) -> &CMatrix {
        self
    }
}

impl AsMatrix for HermitianOperator {
    fn as_matrix(&self) -> &CMatrix {
        self.matrix()
    }
}

impl<T: AsMatrix + ?Sized> AsMatrix for &T {
    fn as_matrix(&self) -> &CMatrix {
        (*self).as_matrix()
    }
}

/// Hilbert–Schmidt orthonormal basis of d×d Hermitian matrices (d² elements):
/// diagonal units, then symmetric and antisymmetric off-diagonal pairs.
pub fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for k in 0..d {
        out.push(pauli::projector(d, k));
    }
    for j in 0..d {
        for k in (j + 1)..d {
            let mut s = CMatrix::zeros(d, d);
            s[(j, k)] = cr(h);
            s[(k, j)] = cr(h);
            out.push(s);
            let mut a = CMatrix::zeros(d, d);
            a[(j, k)] = c(0.0, -h);
            a[(k, j)] = c(0.0, h);
            out.push(a);
        }
    }
    out
}

/// Coordinates of a Hermitian matrix in [`hermitian_basis`].
pub fn hermitian_coordinates(basis: &[CMatrix], f: &CMatrix) -> Vec<f64> {
    basis.iter().map(|b| b.conjugate().component_mul(f).iter().sum::<C64>().re).collect()
}

pub fn from_coordinates(basis: &[CMatrix], x: &[f64]) -> CMatrix {
    let d = basis[0].nrows();
    let mut m = CMatrix::zeros(d, d);
    for (b, &xi) in basis.iter().zip(x) {
        m += b.scale(xi);
    }
    m
}


#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn pauli_z_spectrum() {
        let z = HermitianOperator::new(pauli::z()).unwrap();
        let s = spectral_decompose(&z);
        assert_abs_diff_eq!(s.eigenvalues[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.eigenvalues[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn identity_spectrum() {
        let s = spectral_decompose(&HermitianOperator::identity(4));
        assert!(s.eigenvalues.iter().all(|&e| (e - 1.0).abs() < 1e-14));
    }

    #[test]
    fn random_reconstruction_and_unitarity() {
        let h = random::hermitian(8, &mut rng(11));
        let s = spectral_decompose(&h);
        assert!(frobenius(&(s.reconstruct() - h.matrix())) <= 1e-10);
        let v = &s.eigenvectors;
        assert!(frobenius(&(v.adjoint() * v - identity(8))) <= 1e-10);
        assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rejects_non_hermitian() {
        let err = HermitianOperator::new(pauli::lowering()).unwrap_err();
        assert!(matches!(err, OperatorError::NonHermitianInput { .. }));
    }

    #[test]
    fn quarter_power_of_maximally_mixed() {
        let sigma = FullRankState::maximally_mixed(2);
        let q = matrix_function(sigma.spectral(), |x| x.powf(0.25)).unwrap();
        let expected = identity(2).scale(2f64.powf(-0.25));
        assert!(max_abs(&(q.matrix() - expected)) < 1e-14);
    }

    #[test]
    fn square_root_of_diagonal_state() {
        let sigma = FullRankState::from_diagonal(&[1.0 / 3.0, 2.0 / 3.0]).unwrap();
        let r = matrix_function(sigma.spectral(), f64::sqrt).unwrap();
        assert_abs_diff_eq!(r.matrix()[(0, 0)].re, 0.5773503, epsilon = 1e-7);
        assert_abs_diff_eq!(r.matrix()[(1, 1)].re, 0.8164966, epsilon = 1e-7);
    }

    #[test]
    fn log_of_singular_is_domain_error() {
        let p = HermitianOperator::from_real_diagonal(&[1.0, 0.0]);
        let err = matrix_function(&p.spectral(), f64::ln).unwrap_err();
        assert!(matches!(err, OperatorError::DomainError { .. }));
        // 0 log 0 convention succeeds
        assert!(matrix_function(&p.spectral(), |x| xlogx(x, 1e-14)).is_ok());
    }

    #[test]
    fn fourth_power_of_quarter_power() {
        let sigma = random::full_rank_state(4, &mut rng(3));
        let q = sigma.power(0.25).into_owned();
        let back = &q * &q * &q * &q;
        assert!(frobenius(&(back - sigma.matrix())) < 1e-10);
        let half = sigma.power(0.5);
        assert!(frobenius(&(&q * &q - half.as_ref())) < 1e-10);
    }

    #[test]
    fn cached_and_computed_powers_agree() {
        let sigma = random::full_rank_state(3, &mut rng(5));
        let uncached = sigma.power(0.3).into_owned();
        let cached_state = sigma.clone().with_cached_powers(&[0.3]);
        assert!(matches!(cached_state.power(0.3), Cow::Borrowed(_)));
        assert!(frobenius(&(uncached - cached_state.power(0.3).as_ref())) < 1e-14);
    }

    #[test]
    fn rejects_rank_deficient_and_unnormalized_states() {
        let p = HermitianOperator::from_real_diagonal(&[1.0, 0.0]);
        assert!(matches!(FullRankState::new(p), Err(OperatorError::NotFullRank { .. })));
        let q = HermitianOperator::from_real_diagonal(&[1.0, 1.0]);
        assert!(matches!(FullRankState::new(q), Err(OperatorError::NotNormalized { .. })));
    }

    #[test]
    fn embed_examples() {
        let z = HermitianOperator::new(pauli::z()).unwrap();
        let e = embed(&z, 1, 3).unwrap();
        let expected = kron_all([&identity(2), &pauli::z(), &identity(2)]);
        assert_eq!(e.matrix(), &expected);
        let x = HermitianOperator::new(pauli::x()).unwrap();
        assert_eq!(embed(&x, 0, 1).unwrap(), x);
        assert!(matches!(embed(&x, 3, 3), Err(OperatorError::IndexError { .. })));
    }

    #[test]
    fn embed_trace_multiplicativity() {
        let a = random::hermitian(2, &mut rng(9));
        for n in 1..=4 {
            for k in 0..n {
                let e = embed(&a, k, n).unwrap();
                assert_abs_diff_eq!(e.trace(), a.trace() * 2f64.powi(n as i32 - 1), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn identity_action_gives_identity_matrix() {
        let s = Superoperator::from_action(3, |f| f.clone()).unwrap();
        assert!(max_abs(&(s.matrix() - identity(9))) < 1e-15);
    }

    #[test]
    fn commutator_action_on_x() {
        let z = pauli::z();
        let s = Superoperator::from_action(2, |f| commutator(&z, f).map(|v| v * c(0.0, 1.0))).unwrap();
        let image = s.apply(&pauli::x());
        assert!(max_abs(&(image + pauli::y().scale(2.0))) < 1e-14);
    }

    #[test]
    fn conjugation_action_matches_kronecker() {
        let a = random::complex_matrix(3, &mut rng(21));
        let s = Superoperator::from_action(3, |f| &a * f * a.adjoint()).unwrap();
        let expected = a.map(|z| z.conj()).kronecker(&a);
        assert!(max_abs(&(s.matrix() - &expected)) < 1e-12);
        let f = random::complex_matrix(3, &mut rng(22));
        assert!(max_abs(&(s.apply(&f) - &a * &f * a.adjoint())) < 1e-12);
        assert_eq!(Superoperator::sandwich(&a, &a.adjoint()).matrix(), &expected);
    }

    #[test]
    fn nonlinear_action_rejected() {
        let err = Superoperator::from_action(2, |f| f.map(|z| z * z.norm())).unwrap_err();
        assert!(matches!(err, OperatorError::NonLinearAction { .. }));
    }

    #[test]
    fn lift_matches_embedded_sandwich() {
        let mut r = rng(31);
        let a = random::complex_matrix(2, &mut r);
        let b = random::complex_matrix(2, &mut r);
        let local = Superoperator::sandwich(&a, &b);
        for site in 0..3 {
            let lifted = local.lift(site, 3).unwrap();
            let direct = Superoperator::sandwich(
                &embed_matrix(&a, site, 3).unwrap(),
                &embed_matrix(&b, site, 3).unwrap(),
            );
            assert!(max_abs(&(lifted.matrix() - direct.matrix())) < 1e-13);
        }
    }

    #[test]
    fn gibbs_of_z() {
        let z = HermitianOperator::new(pauli::z()).unwrap();
        let beta: f64 = 0.8;
        let s = FullRankState::gibbs(&z, beta).unwrap();
        let zpart = 2.0 * beta.cosh();
        assert_abs_diff_eq!(s.matrix()[(0, 0)].re, (-beta).exp() / zpart, epsilon = 1e-14);
        assert_abs_diff_eq!(s.matrix()[(1, 1)].re, beta.exp() / zpart, epsilon = 1e-14);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn reconstruction_is_idempotent(seed in any::<u64>(), d in 1usize..7) {
                let h = random::hermitian(d, &mut rng(seed));
                let once = HermitianOperator::from_hermitian_part(&spectral_decompose(&h).reconstruct());
                let twice = spectral_decompose(&once).reconstruct();
                prop_assert!(frobenius(&(twice - h.matrix())) <= 1e-10);
            }

            #[test]
            fn powers_compose(seed in any::<u64>(), a in -1.5f64..1.5, b in -1.5f64..1.5) {
                let sigma = random::full_rank_state(4, &mut rng(seed));
                let pa = matrix_function(sigma.spectral(), |x| x.powf(a)).unwrap();
                let composed = matrix_function(&pa.spectral(), |x| x.powf(b)).unwrap();
                let direct = matrix_function(sigma.spectral(), |x| x.powf(a * b)).unwrap();
                let scale = 1.0 + max_abs(direct.matrix());
                prop_assert!(max_abs(&(composed.matrix() - direct.matrix())) <= 1e-10 * scale);
                // exponents add under multiplication
                let pb = matrix_function(sigma.spectral(), |x| x.powf(b)).unwrap();
                let sum = matrix_function(sigma.spectral(), |x| x.powf(a + b)).unwrap();
                let scale = 1.0 + max_abs(sum.matrix());
                prop_assert!(max_abs(&(pa.matrix() * pb.matrix() - sum.matrix())) <= 1e-10 * scale);
            }

            #[test]
            fn composition_is_matrix_product(seed in any::<u64>()) {
                let mut r = rng(seed);
                let a = random::complex_matrix(3, &mut r);
                let b = random::complex_matrix(3, &mut r);
                let first = Superoperator::from_action(3, |f| &a * f).unwrap();
                let second = Superoperator::from_action(3, |f| f * &b + f.transpose()).unwrap();
                let both = Superoperator::from_action(3, |f| {
                    let g = &a * f;
                    &g * &b + g.transpose()
                }).unwrap();
                let product = second.compose(&first);
                prop_assert!(max_abs(&(product.matrix() - both.matrix())) <= 1e-10);
            }
        }
    }
}
