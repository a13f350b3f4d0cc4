//! Linear fermionic Davies generators: reduction to canonical form, the mode
//! operator basis and its block checks.
//!
//! Modes are realized by Jordan–Wigner on qubits with
//! w_{2k−1} = Z^{⊗(k−1)}⊗X, w_{2k} = Z^{⊗(k−1)}⊗Y and d_k = (w_{2k−1} + i w_{2k})/2,
//! so d_k = |0⟩⟨1| on site k and w_{2k−1}w_{2k} = iZ_k.

use std::f64::consts::LN_2;

use log::warn;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::bounds::{bound_fermion_lsi, BoundReport};
use crate::davies::{BathSpectralDensity, DaviesModel};
use crate::error::{Error, Result};
use crate::lindblad::{check_detailed_balance, dissipator};
use crate::operator::{
    c, frobenius, hermitian_eigen, identity, kron_all, max_abs, pauli, vectorize, CMatrix, FullRankState,
    HermitianOperator, Superoperator, C64,
};
use crate::weighted::WeightedContext;

/// Mode cap for superoperator-level work (Hilbert dimension 8).
pub const MODE_CAP: usize = 3;

/// The 2N Majorana operators w_1 … w_{2N}.
pub fn jordan_wigner(n: usize) -> Result<Vec<CMatrix>> {
    if n == 0 {
        return Err(Error::InvalidInput("need at least one mode".into()));
    }
    if n > MODE_CAP {
        return Err(Error::DimensionCap { dim: 1 << n, cap: 1 << MODE_CAP });
    }
    let mut out = Vec::with_capacity(2 * n);
    for k in 0..n {
        for local in [pauli::x(), pauli::y()] {
            let factors: Vec<CMatrix> = (0..n)
                .map(|j| match j.cmp(&k) {
                    std::cmp::Ordering::Less => pauli::z(),
                    std::cmp::Ordering::Equal => local.clone(),
                    std::cmp::Ordering::Greater => identity(2),
                })
                .collect();
            out.push(kron_all(factors.iter()));
        }
    }
    Ok(out)
}

/// d_k = (w_{2k−1} + i w_{2k})/2 (0-based k).
pub fn annihilator(w: &[CMatrix], k: usize) -> CMatrix {
    (&w[2 * k] + w[2 * k + 1].map(|z| z * c(0.0, 1.0))).scale(0.5)
}

#[derive(Debug, Clone)]
pub struct FermionModel {
    pub frequencies: Vec<f64>,
    /// s_{α,k}: one row per coupling α, one column per mode k.
    pub couplings: Vec<Vec<C64>>,
    pub beta: f64,
    pub bath: BathSpectralDensity,
}

impl FermionModel {
    pub fn new(frequencies: Vec<f64>, couplings: Vec<Vec<C64>>, bath: BathSpectralDensity) -> Result<Self> {
        let n = frequencies.len();
        if n == 0 {
            return Err(Error::InvalidInput("need at least one mode".into()));
        }
        if let Some(nu) = frequencies.iter().find(|nu| !(**nu >= 0.0) || !nu.is_finite()) {
            return Err(Error::InvalidInput(format!("mode frequencies must be non-negative, got {nu}")));
        }
        if let Some(row) = couplings.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: row.len() });
        }
        if couplings.is_empty() {
            return Err(Error::InvalidInput("need at least one coupling".into()));
        }
        Ok(Self { frequencies, couplings, beta: bath.beta(), bath })
    }

    pub fn n_modes(&self) -> usize {
        self.frequencies.len()
    }

    /// Same model as a generic Davies input: H = Σ ν_k d_k†d_k and
    /// S^α = Σ_k (s_{α,k} d_k + s*_{α,k} d_k†).
    pub fn davies_model(&self) -> Result<DaviesModel> {
        let w = jordan_wigner(self.n_modes())?;
        let dim = w[0].nrows();
        let mut h = CMatrix::zeros(dim, dim);
        for (k, nu) in self.frequencies.iter().enumerate() {
            let d = annihilator(&w, k);
            h += (d.adjoint() * d).scale(*nu);
        }
        let couplings = self
            .couplings
            .iter()
            .map(|row| {
                let s = row.iter().enumerate().fold(CMatrix::zeros(dim, dim), |acc, (k, z)| acc + annihilator(&w, k).map(|x| x * z));
                HermitianOperator::from_hermitian_part(&(&s + s.adjoint()))
            })
            .collect();
        DaviesModel::new(HermitianOperator::from_hermitian_part(&h), couplings, self.bath.clone())
    }
}

/// One canonical mode: frequency ν, rate λ and (for ν = 0) the partner rate λ′ ≥ λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalMode {
    pub nu: f64,
    pub lambda: f64,
    pub lambda_prime: f64,
}

impl CanonicalMode {
    pub fn is_zero_mode(&self) -> bool {
        self.nu == 0.0
    }

    /// Λ_k = λ_k(1 + e^{−βν_k})/2.
    pub fn big_lambda(&self, beta: f64) -> f64 {
        self.lambda * (1.0 + (-beta * self.nu).exp()) / 2.0
    }
}

#[derive(Debug, Clone)]
pub struct CanonicalFermionGenerator {
    pub modes: Vec<CanonicalMode>,
    pub beta: f64,
    pub majoranas: Vec<CMatrix>,
    pub generator: Superoperator,
    pub gibbs: FullRankState,
    pub primitive: bool,
    /// ‖Σ(physical couplings) − Σ(rotated canonical modes)‖_F in the original
    /// mode basis; `None` when built directly from canonical data.
    pub reduction_residual: Option<f64>,
}

/// Single-mode generator from the d-operator form: λ D[d] + λe^{−βν} D[d†].
fn mode_generator_d(d: &CMatrix, lambda: f64, nu: f64, beta: f64) -> Superoperator {
    &dissipator(d).scaled(lambda) + &dissipator(&d.adjoint()).scaled(lambda * (-beta * nu).exp())
}

/// Zero-mode generator: (λ/2) D[w_even] + (λ′/2) D[w_odd].
fn mode_generator_zero(w_odd: &CMatrix, w_even: &CMatrix, lambda: f64, lambda_prime: f64) -> Superoperator {
    &dissipator(w_even).scaled(lambda / 2.0) + &dissipator(w_odd).scaled(lambda_prime / 2.0)
}

fn canonical_superoperator(modes: &[CanonicalMode], w: &[CMatrix], beta: f64) -> Superoperator {
    let d = w[0].nrows();
    let mut total = Superoperator::zero(d);
    for (k, m) in modes.iter().enumerate() {
        let term = if m.is_zero_mode() {
            mode_generator_zero(&w[2 * k], &w[2 * k + 1], m.lambda, m.lambda_prime)
        } else {
            mode_generator_d(&annihilator(w, k), m.lambda, m.nu, beta)
        };
        total = &total + &term;
    }
    total
}

/// Product form ∏_k e^{−iβν_k w_{2k−1}w_{2k}/2} / (2 cosh(βν_k/2)).
pub fn gibbs_product_form(modes: &[CanonicalMode], w: &[CMatrix], beta: f64) -> CMatrix {
    let d = w[0].nrows();
    let mut sigma = identity(d);
    for (k, m) in modes.iter().enumerate() {
        let a = &w[2 * k] * &w[2 * k + 1];
        let theta = beta * m.nu / 2.0;
        // (iA)² = 𝟙, so e^{−iθA} = cosh θ − i A sinh θ
        let eta = (identity(d).scale(theta.cosh()) - a.map(|z| z * c(0.0, theta.sinh()))).unscale(2.0 * theta.cosh());
        sigma *= eta;
    }
    sigma
}

fn fermion_hamiltonian(modes: &[CanonicalMode], w: &[CMatrix]) -> HermitianOperator {
    let d = w[0].nrows();
    let mut h = CMatrix::zeros(d, d);
    for (k, m) in modes.iter().enumerate() {
        let dk = annihilator(w, k);
        h += (dk.adjoint() * dk).scale(m.nu);
    }
    HermitianOperator::from_hermitian_part(&h)
}

/// Builds the canonical generator from canonical data and validates the Gibbs
/// state in both forms.
pub fn canonical_from_modes(modes: Vec<CanonicalMode>, beta: f64) -> Result<CanonicalFermionGenerator> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidInput(format!("inverse temperature must be positive, got {beta}")));
    }
    for m in &modes {
        if !(m.nu >= 0.0) || !(m.lambda >= 0.0) || !(m.lambda_prime >= m.lambda) {
            return Err(Error::InvalidInput(format!("invalid canonical mode {m:?}: need nu >= 0 and lambda' >= lambda >= 0")));
        }
    }
    let w = jordan_wigner(modes.len())?;
    let generator = canonical_superoperator(&modes, &w, beta);
    let product = gibbs_product_form(&modes, &w, beta);
    let thermal = FullRankState::gibbs(&fermion_hamiltonian(&modes, &w), beta)?;
    let mismatch = max_abs(&(&product - thermal.matrix()));
    if mismatch > 1e-10 {
        return Err(Error::InvalidInput(format!("product-form Gibbs state differs from exp(-beta H) by {mismatch:.3e}")));
    }
    let stationarity = (generator.matrix().adjoint() * vectorize(thermal.matrix())).norm();
    if stationarity > 1e-9 {
        return Err(Error::GibbsNotStationary { residual: stationarity });
    }
    let primitive = modes.iter().all(|m| m.lambda > 0.0);
    if !primitive {
        warn!("fermionic generator has an uncoupled mode and is not primitive");
    }
    Ok(CanonicalFermionGenerator { modes, beta, majoranas: w, generator, gibbs: thermal, primitive, reduction_residual: None })
}

fn cluster_frequencies(nu: &[f64]) -> Vec<Vec<usize>> {
    let scale = nu.iter().cloned().fold(0.0, f64::max);
    let tol = 1e-9 * scale.max(f64::MIN_POSITIVE);
    let mut order: Vec<usize> = (0..nu.len()).collect();
    order.sort_by(|&a, &b| nu[a].total_cmp(&nu[b]));
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in order {
        match clusters.last_mut() {
            Some(cl) if (nu[i] - nu[*cl.last().expect("non-empty")]).abs() <= tol => cl.push(i),
            _ => clusters.push(vec![i]),
        }
    }
    clusters
}

fn check_rates(eigs: &[f64]) -> Result<()> {
    if let Some(&e) = eigs.iter().find(|&&e| e < -1e-12) {
        return Err(Error::NegativeRate { eigenvalue: e });
    }
    Ok(())
}

/// Reduces a linearly coupled model to canonical form.
///
/// Degenerate positive frequencies are rotated by the eigenvectors of
/// χ_kl = Σ_α G^α(ξ) s*_{α,k} s_{α,l}. Zero modes are rotated in Majorana space by
/// the real symmetric χ over (Re s, −Im s); its eigenvalues μ (descending) give
/// rates 2μ paired as (λ′, λ).
pub fn canonicalize(model: &FermionModel) -> Result<CanonicalFermionGenerator> {
    let n = model.n_modes();
    let beta = model.beta;
    let w = jordan_wigner(n)?;
    let dim = w[0].nrows();
    let clusters = cluster_frequencies(&model.frequencies);

    let mut modes: Vec<CanonicalMode> = Vec::with_capacity(n);
    // Rotated operators expressed on the original JW register, one entry per canonical mode.
    let mut rotated: Vec<(CMatrix, CMatrix)> = Vec::with_capacity(n);
    let mut physical = Superoperator::zero(dim);

    for cluster in &clusters {
        let xi = cluster.iter().map(|&k| model.frequencies[k]).sum::<f64>() / cluster.len() as f64;
        let zero = model.frequencies[cluster[0]] == 0.0 || xi <= 1e-12 * model.frequencies.iter().cloned().fold(1.0, f64::max);
        if !zero {
            let m = cluster.len();
            let mut chi = CMatrix::zeros(m, m);
            for (alpha, row) in model.couplings.iter().enumerate() {
                let g = model.bath.rate(alpha, xi);
                for (a, &k) in cluster.iter().enumerate() {
                    for (b, &l) in cluster.iter().enumerate() {
                        chi[(a, b)] += row[k].conj() * row[l] * g;
                    }
                }
                let l_op = cluster.iter().fold(CMatrix::zeros(dim, dim), |acc, &l| acc + annihilator(&w, l).map(|z| z * row[l]));
                physical = &physical + &mode_generator_d(&l_op, 1.0, xi, beta).scaled(g);
            }
            let eig = hermitian_eigen(&crate::operator::hermitian_part(&chi));
            check_rates(&eig.eigenvalues)?;
            // descending so the strongest combination comes first
            for a in (0..m).rev() {
                let lambda = eig.eigenvalues[a].max(0.0);
                let d_tilde = cluster
                    .iter()
                    .enumerate()
                    .fold(CMatrix::zeros(dim, dim), |acc, (j, &l)| acc + annihilator(&w, l).map(|z| z * eig.eigenvectors[(j, a)].conj()));
                modes.push(CanonicalMode { nu: xi, lambda, lambda_prime: lambda });
                rotated.push((d_tilde, CMatrix::zeros(0, 0)));
            }
        } else {
            let m = cluster.len();
            let mut chi = DMatrix::<f64>::zeros(2 * m, 2 * m);
            for (alpha, row) in model.couplings.iter().enumerate() {
                let g = model.bath.rate(alpha, 0.0);
                let coeffs: Vec<f64> = cluster.iter().flat_map(|&k| [row[k].re, -row[k].im]).collect();
                for a in 0..2 * m {
                    for b in 0..2 * m {
                        chi[(a, b)] += g * coeffs[a] * coeffs[b];
                    }
                }
                let l_op = cluster.iter().fold(CMatrix::zeros(dim, dim), |acc, &k| {
                    acc + annihilator(&w, k).map(|z| z * row[k]) + annihilator(&w, k).adjoint().map(|z| z * row[k].conj())
                });
                physical = &physical + &dissipator(&l_op).scaled(g);
            }
            let eig = SymmetricEigen::new(chi);
            let mut order: Vec<usize> = (0..2 * m).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
            let mus: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
            check_rates(&mus)?;
            let majorana_index = |j: usize| 2 * cluster[j / 2] + j % 2;
            let rotated_w = |col: usize| {
                (0..2 * m).fold(CMatrix::zeros(dim, dim), |acc, j| acc + w[majorana_index(j)].scale(eig.eigenvectors[(j, col)]))
            };
            for pair in 0..m {
                let (hi, lo) = (order[2 * pair], order[2 * pair + 1]);
                let lambda_prime = 2.0 * eig.eigenvalues[hi].max(0.0);
                let lambda = 2.0 * eig.eigenvalues[lo].max(0.0);
                modes.push(CanonicalMode { nu: 0.0, lambda, lambda_prime });
                rotated.push((rotated_w(hi), rotated_w(lo)));
            }
        }
    }

    let mut reconstructed = Superoperator::zero(dim);
    for (m, (a, b)) in modes.iter().zip(&rotated) {
        let term = if m.is_zero_mode() {
            mode_generator_zero(a, b, m.lambda, m.lambda_prime)
        } else {
            mode_generator_d(a, m.lambda, m.nu, beta)
        };
        reconstructed = &reconstructed + &term;
    }
    let residual = frobenius(&(physical.matrix() - reconstructed.matrix()));

    let mut g = canonical_from_modes(modes, beta)?;
    g.reduction_residual = Some(residual);
    if residual > 1e-9 * (1.0 + frobenius(physical.matrix())) {
        return Err(Error::EigenResidualExceeded { string: "canonical reduction".into(), residual });
    }
    Ok(g)
}

impl CanonicalFermionGenerator {
    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn context(&self) -> WeightedContext {
        WeightedContext::new(self.gibbs.clone())
    }

    /// Λ = min_k Λ_k.
    pub fn big_lambda(&self) -> f64 {
        self.modes.iter().map(|m| m.big_lambda(self.beta)).fold(f64::INFINITY, f64::min)
    }

    /// ν = max_k ν_k.
    pub fn max_frequency(&self) -> f64 {
        self.modes.iter().map(|m| m.nu).fold(0.0, f64::max)
    }

    /// C = 4 e^{βν/4}.
    pub fn block_constant(&self) -> f64 {
        4.0 * (self.beta * self.max_frequency() / 4.0).exp()
    }

    pub fn lsi_bound(&self) -> Result<BoundReport> {
        bound_fermion_lsi(self.big_lambda(), self.max_frequency(), self.beta)
    }

    /// Exact ΓℒΓ⁻¹ asymmetry with respect to the Gibbs state.
    pub fn detailed_balance_residual(&self) -> f64 {
        check_detailed_balance(&self.generator, &self.gibbs, 0, 0).exact
    }

    /// Predicted eigenvalue of f(b).
    pub fn mu(&self, b: &[u8]) -> f64 {
        -self
            .modes
            .iter()
            .enumerate()
            .map(|(k, m)| {
                let (b1, b2) = (b[2 * k] as f64, b[2 * k + 1] as f64);
                if m.is_zero_mode() {
                    m.lambda_prime * b1 + m.lambda * b2
                } else {
                    m.big_lambda(self.beta) * (b1 + b2)
                }
            })
            .sum::<f64>()
    }
}

/// Max Frobenius residual between the d-operator and Majorana forms of each
/// single-mode generator with ν ≠ 0:
/// λ(1+e^{−βν})/4 (w₁fw₁ + w₂fw₂ − 2f) + iλ(1−e^{−βν})/4 (w₁fw₂ − w₂fw₁ − {w₁w₂, f}).
pub fn majorana_decomposition_check(g: &CanonicalFermionGenerator) -> f64 {
    let w = &g.majoranas;
    let d = w[0].nrows();
    let mut worst: f64 = 0.0;
    for (k, m) in g.modes.iter().enumerate() {
        if m.is_zero_mode() {
            continue;
        }
        let via_d = mode_generator_d(&annihilator(w, k), m.lambda, m.nu, g.beta);
        let (w1, w2) = (&w[2 * k], &w[2 * k + 1]);
        let e = (-g.beta * m.nu).exp();
        let sym = &(&Superoperator::sandwich(w1, w1) + &Superoperator::sandwich(w2, w2)) - &Superoperator::identity(d).scaled(2.0);
        let a = w1 * w2;
        let cross = &(&Superoperator::sandwich(w1, w2) - &Superoperator::sandwich(w2, w1)) - &Superoperator::left_right_sum(&a, &a);
        let cross = Superoperator::new(d, cross.matrix().map(|z| z * c(0.0, m.lambda * (1.0 - e) / 4.0))).expect("square");
        let via_w = &sym.scaled(m.lambda * (1.0 + e) / 4.0) + &cross;
        worst = worst.max(frobenius(&(via_d.matrix() - via_w.matrix())));
    }
    worst
}

#[derive(Debug, Clone)]
pub struct ModeOperator {
    pub bits: Vec<u8>,
    pub operator: CMatrix,
}

impl ModeOperator {
    pub fn weight(&self) -> usize {
        self.bits.iter().map(|&b| b as usize).sum()
    }
}

#[derive(Debug, Clone)]
pub struct ModeOperatorBasis {
    pub elements: Vec<ModeOperator>,
}

impl ModeOperatorBasis {
    pub fn block(&self, n: usize) -> impl Iterator<Item = &ModeOperator> {
        self.elements.iter().filter(move |e| e.weight() == n)
    }

    pub fn get(&self, bits: &[u8]) -> Option<&ModeOperator> {
        self.elements.iter().find(|e| e.bits == bits)
    }
}

/// f_k(b_{2k−1}, b_{2k}) on the full register.
fn even_mode_operator(g: &CanonicalFermionGenerator, k: usize, b1: u8, b2: u8) -> CMatrix {
    let w = &g.majoranas;
    let d = w[0].nrows();
    let theta = g.beta * g.modes[k].nu / 2.0;
    let root = theta.cosh().sqrt();
    match (b1, b2) {
        (0, 0) => identity(d),
        (1, 0) => w[2 * k].scale(root),
        (0, 1) => w[2 * k + 1].scale(root),
        _ => {
            // A e^{iθA} = A cosh θ − i sinh θ, using (iA)² = 𝟙
            let a = &w[2 * k] * &w[2 * k + 1];
            a.scale(theta.cosh()) - identity(d).map(|z| z * c(0.0, theta.sinh()))
        }
    }
}

/// Operator f(b) for one bit string; odd-weight strings use f̃_k = w_{2k−1}w_{2k} f_k
/// on every mode.
pub fn mode_operator(g: &CanonicalFermionGenerator, bits: &[u8]) -> Result<CMatrix> {
    let n = g.n_modes();
    if bits.len() != 2 * n || bits.iter().any(|&b| b > 1) {
        return Err(Error::InvalidInput(format!("bit string must have length {} with entries 0/1", 2 * n)));
    }
    let odd = bits.iter().map(|&b| b as usize).sum::<usize>() % 2 == 1;
    let w = &g.majoranas;
    let mut f = identity(w[0].nrows());
    for k in 0..n {
        let mut fk = even_mode_operator(g, k, bits[2 * k], bits[2 * k + 1]);
        if odd {
            fk = &w[2 * k] * &w[2 * k + 1] * fk;
        }
        f *= fk;
    }
    Ok(f)
}

/// All 4^N mode operators, ordered by the bit string read as a binary number.
pub fn mode_basis(g: &CanonicalFermionGenerator) -> Result<ModeOperatorBasis> {
    let n = g.n_modes();
    if n > MODE_CAP {
        return Err(Error::DimensionCap { dim: 1 << n, cap: 1 << MODE_CAP });
    }
    let elements = (0..1usize << (2 * n))
        .map(|idx| {
            let bits: Vec<u8> = (0..2 * n).map(|i| ((idx >> (2 * n - 1 - i)) & 1) as u8).collect();
            let operator = mode_operator(g, &bits)?;
            Ok(ModeOperator { bits, operator })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModeOperatorBasis { elements })
}

/// max |G − 𝟙| over the weighted Gram matrix, and its rank.
pub fn gram_check(g: &CanonicalFermionGenerator, basis: &ModeOperatorBasis) -> (f64, usize) {
    let ctx = g.context();
    let m = basis.elements.len();
    let mut gram = CMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            gram[(i, j)] = ctx.inner(&basis.elements[i].operator, &basis.elements[j].operator);
        }
    }
    let deviation = max_abs(&(&gram - identity(m)));
    let rank = gram.singular_values().iter().filter(|&&s| s > 1e-8).count();
    (deviation, rank)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenReport {
    pub bits: Vec<u8>,
    pub mu: f64,
    pub residual: f64,
    /// μ(b) + Λ|b|, which must be ≤ 0.
    pub containment_margin: f64,
}

/// Checks ℒ f(b) = μ(b) f(b) and μ(b) ≤ −Λ|b| for every string.
pub fn verify_block_structure(g: &CanonicalFermionGenerator, basis: &ModeOperatorBasis) -> Result<Vec<EigenReport>> {
    let big_lambda = g.big_lambda();
    let mut out = Vec::with_capacity(basis.elements.len());
    for e in &basis.elements {
        let mu = g.mu(&e.bits);
        let image = g.generator.apply(&e.operator);
        let residual = frobenius(&(image - e.operator.map(|z| z * mu)));
        let label: String = e.bits.iter().map(|b| char::from(b'0' + b)).collect();
        if residual > 1e-10 {
            return Err(Error::EigenResidualExceeded { string: label, residual });
        }
        let margin = mu + big_lambda * e.weight() as f64;
        if margin > 1e-12 {
            return Err(Error::BoundViolated { what: format!("spectral containment for {label}"), value: mu, bound: -big_lambda * e.weight() as f64 });
        }
        out.push(EigenReport { bits: e.bits.clone(), mu, residual, containment_margin: margin });
    }
    Ok(out)
}

fn xor_allowed(tuple: [&[u8]; 4]) -> bool {
    let len = tuple[0].len();
    (0..len / 2).all(|k| {
        let x1 = tuple.iter().fold(0u8, |acc, b| acc ^ b[2 * k]);
        let x2 = tuple.iter().fold(0u8, |acc, b| acc ^ b[2 * k + 1]);
        x1 == x2
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FermionQReport {
    pub n: usize,
    pub max_q: f64,
    pub ceiling: f64,
    /// max |Q| over tuples whose XOR is outside {(00),(11)}^N.
    pub max_forbidden: f64,
    pub tuples: usize,
}

/// Exhaustive |Q| over 4-tuples from block n (N ≤ 2).
pub fn fermion_q_bound_check(g: &CanonicalFermionGenerator, basis: &ModeOperatorBasis, n: usize) -> Result<FermionQReport> {
    if g.n_modes() > 2 {
        return Err(Error::DimensionCap { dim: 1 << g.n_modes(), cap: 4 });
    }
    if n > 2 * g.n_modes() {
        return Err(Error::InvalidInput(format!("block {n} is empty for {} modes", g.n_modes())));
    }
    let ctx = g.context();
    let block: Vec<&ModeOperator> = basis.block(n).collect();
    let (mut max_q, mut max_forbidden, mut tuples) = (0.0f64, 0.0f64, 0usize);
    for a in &block {
        for b in &block {
            for cc in &block {
                for dd in &block {
                    let q = ctx.q_form(&a.operator, &b.operator, &cc.operator, &dd.operator).magnitude;
                    max_q = max_q.max(q);
                    if !xor_allowed([&a.bits, &b.bits, &cc.bits, &dd.bits]) {
                        max_forbidden = max_forbidden.max(q);
                    }
                    tuples += 1;
                }
            }
        }
    }
    let ceiling = (n as f64 * g.beta * g.max_frequency()).exp();
    if max_q > ceiling * (1.0 + 1e-10) {
        return Err(Error::BoundViolated { what: format!("Q-form ceiling in block {n}"), value: max_q, bound: ceiling });
    }
    if max_forbidden > 1e-12 {
        return Err(Error::BoundViolated { what: format!("Q-form parity rule in block {n}"), value: max_forbidden, bound: 0.0 });
    }
    Ok(FermionQReport { n, max_q, ceiling, max_forbidden, tuples })
}

/// max over random f_n ∈ B_n of ‖f_n‖⁴_{4,σ}/‖f_n‖⁴_{2,σ}, checked against 2^{8n}e^{nβν}.
pub fn fermion_block_norm_check(
    g: &CanonicalFermionGenerator,
    basis: &ModeOperatorBasis,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let ctx = g.context();
    let block: Vec<&ModeOperator> = basis.block(n).collect();
    if block.is_empty() {
        return Err(Error::InvalidInput(format!("block {n} is empty")));
    }
    let d = block[0].operator.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let mut f = CMatrix::zeros(d, d);
        for e in &block {
            let (re, im): (f64, f64) = (StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
            f += e.operator.map(|z| z * c(re, im));
        }
        worst = worst.max((ctx.lp_norm(&f, 4.0)? / ctx.norm2(&f)).powi(4));
    }
    let bound = (8.0 * n as f64 * LN_2 + n as f64 * g.beta * g.max_frequency()).exp();
    if worst > bound * (1.0 + 1e-10) {
        return Err(Error::BoundViolated { what: format!("fermion block {n} norm ratio"), value: worst, bound });
    }
    Ok(worst)
}

/// Q(f(1,1), f(1,1), f(1,1), f(1,1)) for a single mode in closed form.
pub fn single_mode_q_closed_form(beta: f64, nu: f64) -> f64 {
    let x = beta * nu / 2.0;
    (3.0 * x).cosh() / x.cosh()
}
