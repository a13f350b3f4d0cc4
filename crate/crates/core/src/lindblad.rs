//! Lindblad generators in the Heisenberg picture, detailed balance, primitivity,
//! spectral gap, semigroup exponentials and trace-distance decay.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::operator::{
    c, frobenius, hermitian_eigen, max_abs, unvectorize, vectorize, CMatrix, FullRankState, HermitianOperator,
    Superoperator, C64,
};
use crate::random;
use crate::weighted::{unital_residual, WeightedContext};

/// Detailed balance is accepted when ‖K − K†‖_F is below this times (1 + ‖K‖_F).
pub const REVERSIBLE_TOL: f64 = 1e-10;

/// Singular values of the Schrödinger generator below this times its norm count
/// towards the kernel.
const KERNEL_TOL: f64 = 1e-9;

/// Minimum eigenvalue for the stationary state to count as full rank.
pub const FULL_RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct LindbladSpec {
    pub hamiltonian: HermitianOperator,
    pub lindblad_ops: Vec<CMatrix>,
}

/// ℒ(f) = i[H,f] + Σ L† f L − ½{L†L, f}.
pub fn build_lindblad(spec: &LindbladSpec) -> Result<Superoperator> {
    let d = spec.hamiltonian.dim();
    let ih = spec.hamiltonian.matrix().map(|z| z * c(0.0, 1.0));
    let mut gen = Superoperator::left_right_sum(&ih, &(-&ih));
    for l in &spec.lindblad_ops {
        if l.nrows() != d || l.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: l.nrows().max(l.ncols()) });
        }
        gen = &gen + &dissipator(l);
    }
    Ok(gen)
}

/// f ↦ L† f L − ½{L†L, f}.
pub fn dissipator(l: &CMatrix) -> Superoperator {
    let ld = l.adjoint();
    let half = (&ld * l).scale(-0.5);
    &Superoperator::sandwich(&ld, l) + &Superoperator::left_right_sum(&half, &half)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetailedBalanceReport {
    /// ‖ΓℒΓ⁻¹ − (ΓℒΓ⁻¹)†‖_F with Γ(f) = σ^{1/4} f σ^{1/4}.
    pub exact: f64,
    /// max |⟨f,ℒg⟩_σ − ⟨ℒf,g⟩_σ| over sampled Hermitian pairs.
    pub sampled: f64,
}

/// Exact and sampled asymmetry of ℒ under ⟨·,·⟩_σ.
pub fn check_detailed_balance(l: &Superoperator, sigma: &FullRankState, samples: usize, seed: u64) -> DetailedBalanceReport {
    let ctx = WeightedContext::new(sigma.clone());
    let k = ctx.gamma().compose(l).compose(&ctx.gamma_inverse());
    let exact = frobenius(&(k.matrix() - k.matrix().adjoint()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sampled: f64 = 0.0;
    for _ in 0..samples {
        let f = random::hermitian(l.dim(), &mut rng).into_matrix();
        let g = random::hermitian(l.dim(), &mut rng).into_matrix();
        let lhs = ctx.inner(&f, l.apply(&g));
        let rhs = ctx.inner(l.apply(&f), &g);
        sampled = sampled.max((lhs - rhs).norm());
    }
    DetailedBalanceReport { exact, sampled }
}

/// Eigensystem of the σ-symmetrized generator K = ΓℒΓ⁻¹ (Hermitian when ℒ is
/// reversible). Eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymmetrizedSystem {
    pub gamma: Superoperator,
    pub gamma_inverse: Superoperator,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SymmetrizedSystem {
    /// T_t = Γ⁻¹ V e^{tΛ} V† Γ.
    pub fn exp(&self, t: f64) -> Superoperator {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &e) in self.eigenvalues.iter().enumerate() {
            let w = c((t * e).exp(), 0.0);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= w);
        }
        let core = scaled * v.adjoint();
        let d = self.gamma.dim();
        let core = Superoperator::new(d, core).expect("square by construction");
        self.gamma_inverse.compose(&core).compose(&self.gamma)
    }

    /// Eigen-operator for the j-th eigenvalue (ascending order), σ-normalized.
    pub fn eigen_operator(&self, j: usize) -> CMatrix {
        let v = self.eigenvectors.column(j).into_owned();
        let d = self.gamma.dim();
        self.gamma_inverse.apply(&unvectorize(&v, d))
    }
}

#[derive(Debug, Clone)]
pub struct SemigroupAnalysis {
    /// Heisenberg-picture generator.
    pub generator: Superoperator,
    pub fixed_point: FullRankState,
    pub gap: f64,
    pub reversible: bool,
    /// Eigenvalues, sorted by decreasing real part.
    pub spectrum: Vec<C64>,
    pub asymmetry: f64,
    /// ‖ℒ*(σ)‖_F.
    pub stationarity_residual: f64,
    pub symmetrized: Option<SymmetrizedSystem>,
}

impl SemigroupAnalysis {
    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    pub fn context(&self) -> WeightedContext {
        WeightedContext::new(self.fixed_point.clone())
    }

    /// e^{tℒ}; exact diagonalization for reversible generators.
    pub fn evolve(&self, t: f64) -> Superoperator {
        match &self.symmetrized {
            Some(sym) => sym.exp(t),
            None => evolve(&self.generator, t),
        }
    }

    /// ‖T*_t(ρ0) − σ‖₁ at each time.
    pub fn decay_curve(&self, rho0: &CMatrix, times: &[f64]) -> Result<Vec<f64>> {
        let d = self.dim();
        if rho0.nrows() != d || rho0.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: rho0.nrows() });
        }
        Ok(times
            .iter()
            .map(|&t| {
                let rho_t = self.evolve(t).adjoint().apply(rho0);
                self.fixed_point.trace_distance(&rho_t)
            })
            .collect())
    }
}

fn schrodinger_kernel(m: &CMatrix) -> (usize, CMatrix) {
    let n = m.nrows();
    let svd = m.adjoint().svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let scale = 1.0 + svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let (mut best, mut best_val) = (0, f64::INFINITY);
    let mut kernel_dim = 0;
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= KERNEL_TOL * scale {
            kernel_dim += 1;
        }
        if s < best_val {
            best_val = s;
            best = i;
        }
    }
    let v = v_t.row(best).adjoint();
    let d = (n as f64).sqrt().round() as usize;
    (kernel_dim, unvectorize(&v, d))
}

/// Fixed point, primitivity, reversibility and spectrum of a unital generator.
pub fn analyze(l: &Superoperator) -> Result<SemigroupAnalysis> {
    let residual = unital_residual(l);
    if residual > 1e-10 * (1.0 + max_abs(l.matrix())) {
        return Err(Error::NotUnital { residual });
    }
    let (kernel_dim, rho) = schrodinger_kernel(l.matrix());
    let tr = crate::operator::trace(&rho);
    let rho = HermitianOperator::from_hermitian_part(&rho.map(|z| z / tr));
    let min_eig = rho.spectral().min_eigenvalue();
    if kernel_dim != 1 || min_eig <= FULL_RANK_TOL {
        return Err(Error::NotPrimitive { kernel_dim, min_eigenvalue: min_eig });
    }
    let fixed_point = FullRankState::from_unnormalized(rho)?;
    let stationarity_residual = (l.matrix().adjoint() * vectorize(fixed_point.matrix())).norm();

    let ctx = WeightedContext::new(fixed_point.clone());
    let gamma = ctx.gamma();
    let gamma_inverse = ctx.gamma_inverse();
    let k = gamma.compose(l).compose(&gamma_inverse);
    let asymmetry = frobenius(&(k.matrix() - k.matrix().adjoint()));
    let reversible = asymmetry <= REVERSIBLE_TOL * (1.0 + frobenius(k.matrix()));

    let (spectrum, gap, symmetrized) = if reversible {
        let sym = hermitian_eigen(k.matrix());
        let mut spectrum: Vec<C64> = sym.eigenvalues.iter().rev().map(|&e| c(e, 0.0)).collect();
        spectrum.sort_by(|a, b| b.re.total_cmp(&a.re));
        let n = sym.eigenvalues.len();
        let gap = if n >= 2 { -sym.eigenvalues[n - 2] } else { 0.0 };
        let system = SymmetrizedSystem { gamma, gamma_inverse, eigenvalues: sym.eigenvalues, eigenvectors: sym.eigenvectors };
        (spectrum, gap, Some(system))
    } else {
        let mut spectrum = general_eigenvalues(l.matrix());
        spectrum.sort_by(|a, b| b.re.total_cmp(&a.re));
        let gap = if spectrum.len() >= 2 { -spectrum[1].re } else { 0.0 };
        (spectrum, gap, None)
    };

    Ok(SemigroupAnalysis {
        generator: l.clone(),
        fixed_point,
        gap,
        reversible,
        spectrum,
        asymmetry,
        stationarity_residual,
        symmetrized,
    })
}

/// Eigenvalues of a general complex matrix via the complex Schur form.
pub fn general_eigenvalues(m: &CMatrix) -> Vec<C64> {
    let schur = m.clone().schur();
    match schur.eigenvalues() {
        Some(e) => e.iter().copied().collect(),
        None => {
            let (_, t) = schur.unpack();
            t.diagonal().iter().copied().collect()
        }
    }
}

/// e^{tℒ} by scaling-and-squaring Padé.
pub fn evolve(l: &Superoperator, t: f64) -> Superoperator {
    if t == 0.0 {
        return Superoperator::identity(l.dim());
    }
    let m = l.matrix().map(|z| z * t).exp();
    Superoperator::new(l.dim(), m).expect("square by construction")
}

/// Decay of ‖T*_t(ρ0) − σ‖₁ for a primitive generator.
pub fn decay_curve(l: &Superoperator, rho0: &CMatrix, times: &[f64]) -> Result<Vec<f64>> {
    analyze(l)?.decay_curve(rho0, times)
}

/// √‖σ⁻¹‖ e^{−tλ}.
pub fn mixing_bound_gap(sigma: &FullRankState, lambda: f64, t: f64) -> f64 {
    sigma.inverse_norm().sqrt() * (-t * lambda).exp()
}

/// √(2 log ‖σ⁻¹‖) e^{−tα}.
pub fn mixing_bound_lsi(sigma: &FullRankState, alpha: f64, t: f64) -> f64 {
    (2.0 * sigma.inverse_norm().ln()).sqrt() * (-t * alpha).exp()
}
