//! Davies generators from a Hamiltonian, Hermitian couplings and a KMS bath.
//!
//! Convention: Bohr frequencies are ω = ε_k − ε_m for the component
//! S(ω) = Σ S_km |k⟩⟨m|, so σ S(ω) = e^{−βω} S(ω) σ for σ ∝ e^{−βH}. The rate
//! G(ω) multiplies the dissipator whose Lindblad operator is S(ω)†, which makes
//! the energy-lowering jump the fast one and the Gibbs state stationary.

use std::fmt;
use std::sync::Arc;

use log::warn;

use crate::error::{Error, Result};
use crate::lindblad::{analyze, dissipator, SemigroupAnalysis};
use crate::operator::{c, frobenius, max_abs, spectral_decompose, vectorize, CMatrix, FullRankState, HermitianOperator, Superoperator};

/// Probe frequencies used when validating a user-supplied density.
const KMS_PROBES: [f64; 9] = [0.0, 0.1, 0.5, 1.0, 1.7, 2.0, 3.0, 4.5, 6.0];

pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum DensityRule {
    /// γ₀ for ω ≥ 0 and γ₀ e^{βω} for ω < 0.
    Flat { gamma0: f64 },
    Custom(DensityFn),
}

impl fmt::Debug for DensityRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DensityRule::Flat { gamma0 } => write!(f, "Flat {{ gamma0: {gamma0} }}"),
            DensityRule::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Bath spectral densities G^α(ω), one rule per coupling or a single shared rule.
#[derive(Debug, Clone)]
pub struct BathSpectralDensity {
    rules: Vec<DensityRule>,
    beta: f64,
}

impl BathSpectralDensity {
    pub fn flat(beta: f64, gamma0: f64) -> Result<Self> {
        Self::new(beta, vec![DensityRule::Flat { gamma0 }])
    }

    /// Validates β > 0 (finite), non-negative rates and the KMS relation on a
    /// probe grid.
    pub fn new(beta: f64, rules: Vec<DensityRule>) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidInput(format!("inverse temperature must be positive, got {beta}")));
        }
        if rules.is_empty() {
            return Err(Error::InvalidInput("at least one density rule is required".into()));
        }
        for rule in &rules {
            if let DensityRule::Flat { gamma0 } = rule {
                if !(*gamma0 > 0.0) || !gamma0.is_finite() {
                    return Err(Error::InvalidInput(format!("flat bath rate must be positive, got {gamma0}")));
                }
            }
        }
        let bath = Self { rules, beta };
        let residual = bath.kms_residual(&KMS_PROBES);
        if residual > 1e-10 {
            return Err(Error::InvalidInput(format!("bath density violates KMS (relative residual {residual:.3e})")));
        }
        for alpha in 0..bath.rules.len() {
            for &w in &KMS_PROBES {
                for s in [w, -w] {
                    let g = bath.rate(alpha, s);
                    if !(g >= 0.0) || !g.is_finite() {
                        return Err(Error::InvalidInput(format!("bath density G({s}) = {g} is not a finite non-negative rate")));
                    }
                }
            }
        }
        Ok(bath)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn rate(&self, alpha: usize, omega: f64) -> f64 {
        let rule = &self.rules[alpha.min(self.rules.len() - 1)];
        match rule {
            DensityRule::Flat { gamma0 } => {
                if omega >= 0.0 {
                    *gamma0
                } else {
                    gamma0 * (self.beta * omega).exp()
                }
            }
            DensityRule::Custom(f) => f(omega),
        }
    }

    /// max over rules and probes of |G(−ω) − e^{−βω}G(ω)| / max(G(ω), G(−ω), tiny).
    pub fn kms_residual(&self, probes: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for alpha in 0..self.rules.len() {
            for &w in probes {
                let (gp, gm) = (self.rate(alpha, w), self.rate(alpha, -w));
                let scale = gp.abs().max(gm.abs()).max(1e-300);
                worst = worst.max((gm - (-self.beta * w).exp() * gp).abs() / scale);
            }
        }
        worst
    }
}

#[derive(Debug, Clone)]
pub struct DaviesModel {
    pub hamiltonian: HermitianOperator,
    pub couplings: Vec<HermitianOperator>,
    pub bath: BathSpectralDensity,
    /// Bohr clustering tolerance; defaults to 1e-9 × spectral range of H.
    pub bohr_tolerance: Option<f64>,
}

impl DaviesModel {
    pub fn new(hamiltonian: HermitianOperator, couplings: Vec<HermitianOperator>, bath: BathSpectralDensity) -> Result<Self> {
        let d = hamiltonian.dim();
        if let Some(s) = couplings.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: s.dim() });
        }
        Ok(Self { hamiltonian, couplings, bath, bohr_tolerance: None })
    }

    pub fn tolerance(&self) -> f64 {
        self.bohr_tolerance.unwrap_or_else(|| {
            let s = self.hamiltonian.spectral();
            1e-9 * (s.max_eigenvalue() - s.min_eigenvalue()).max(1.0)
        })
    }

    pub fn gibbs(&self) -> Result<FullRankState> {
        Ok(FullRankState::gibbs(&self.hamiltonian, self.bath.beta())?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyWarning {
    pub separation: f64,
    pub tolerance: f64,
}

/// Bohr frequencies (ascending, symmetric about zero) with the matching
/// components S(ω).
#[derive(Debug, Clone)]
pub struct BohrDecomposition {
    pub frequencies: Vec<f64>,
    pub components: Vec<CMatrix>,
    pub warning: Option<DegeneracyWarning>,
}

impl BohrDecomposition {
    pub fn component(&self, omega: f64, tol: f64) -> Option<&CMatrix> {
        self.frequencies.iter().position(|w| (w - omega).abs() <= tol).map(|i| &self.components[i])
    }

    /// ‖Σ_ω S(ω) − S‖ (max entry).
    pub fn completeness_residual(&self, s: &CMatrix) -> f64 {
        let mut sum = CMatrix::zeros(s.nrows(), s.ncols());
        for comp in &self.components {
            sum += comp;
        }
        max_abs(&(sum - s))
    }

    /// max ‖S(−ω) − S(ω)†‖ over frequencies.
    pub fn conjugation_residual(&self) -> f64 {
        let n = self.frequencies.len();
        (0..n)
            .map(|i| max_abs(&(&self.components[n - 1 - i] - self.components[i].adjoint())))
            .fold(0.0, f64::max)
    }
}

/// Groups eigenvalue differences of H into Bohr frequencies and splits S into
/// its Fourier components in the eigenbasis of H.
pub fn bohr_decompose(h: &HermitianOperator, s: &HermitianOperator, tol: f64) -> Result<BohrDecomposition> {
    if h.dim() != s.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: s.dim() });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("Bohr tolerance must be positive, got {tol}")));
    }
    let d = h.dim();
    let spec = spectral_decompose(h);
    let e = &spec.eigenvalues;
    let v = &spec.eigenvectors;
    let s_eig = v.adjoint() * s.matrix() * v;

    // Cluster |ε_k − ε_m| by single linkage; the sign is restored per pair so
    // the frequency set is symmetric by construction.
    let mut magnitudes: Vec<f64> = Vec::with_capacity(d * d);
    for k in 0..d {
        for m in 0..d {
            magnitudes.push((e[k] - e[m]).abs());
        }
    }
    magnitudes.sort_by(f64::total_cmp);
    let mut clusters: Vec<Vec<f64>> = Vec::new();
    let mut warning: Option<DegeneracyWarning> = None;
    for &w in &magnitudes {
        match clusters.last_mut() {
            Some(cl) if w - cl.last().copied().unwrap_or(w) <= tol => cl.push(w),
            Some(cl) => {
                let separation = w - cl.last().copied().unwrap_or(w);
                if separation < 10.0 * tol && warning.is_none() {
                    warning = Some(DegeneracyWarning { separation, tolerance: tol });
                }
                clusters.push(vec![w]);
            }
            None => clusters.push(vec![w]),
        }
    }
    if let Some(w) = &warning {
        warn!("Bohr frequency clusters separated by {:.3e} are ambiguous at tolerance {:.3e}", w.separation, w.tolerance);
    }
    let reps: Vec<f64> = clusters
        .iter()
        .enumerate()
        .map(|(i, cl)| if i == 0 && cl[0] <= tol { 0.0 } else { cl.iter().sum::<f64>() / cl.len() as f64 })
        .collect();
    let cluster_of = |w: f64| -> usize {
        clusters
            .iter()
            .position(|cl| w >= cl[0] - 0.5 * tol && w <= cl[cl.len() - 1] + 0.5 * tol)
            .expect("every difference belongs to a cluster")
    };

    let mut frequencies: Vec<f64> = Vec::new();
    for &r in &reps {
        if r == 0.0 {
            frequencies.push(0.0);
        } else {
            frequencies.push(r);
            frequencies.push(-r);
        }
    }
    frequencies.sort_by(f64::total_cmp);
    let mut comps_eig: Vec<CMatrix> = vec![CMatrix::zeros(d, d); frequencies.len()];
    for k in 0..d {
        for m in 0..d {
            let diff = e[k] - e[m];
            let rep = reps[cluster_of(diff.abs())];
            let omega = if rep == 0.0 { 0.0 } else { rep.copysign(diff) };
            let idx = frequencies.iter().position(|&w| w == omega).expect("frequency present");
            comps_eig[idx][(k, m)] = s_eig[(k, m)];
        }
    }
    let scale = max_abs(s.matrix()).max(1e-300);
    let mut out_f = Vec::new();
    let mut out_c = Vec::new();
    let n = frequencies.len();
    for i in 0..n {
        // keep ±ω together so the set stays symmetric
        let mirror = n - 1 - i;
        let negligible = max_abs(&comps_eig[i]) <= 1e-14 * scale && max_abs(&comps_eig[mirror]) <= 1e-14 * scale;
        if negligible {
            continue;
        }
        out_f.push(frequencies[i]);
        out_c.push(v * &comps_eig[i] * v.adjoint());
    }
    Ok(BohrDecomposition { frequencies: out_f, components: out_c, warning })
}

/// The Davies superoperator together with the data it was assembled from.
#[derive(Debug, Clone)]
pub struct DaviesGenerator {
    pub generator: Superoperator,
    pub gibbs: FullRankState,
    pub decompositions: Vec<BohrDecomposition>,
    /// Dimension of the commutant of {H, S^α}; 1 means trivial.
    pub commutant_dim: usize,
    /// ‖ℒ*(σ_Gibbs)‖.
    pub gibbs_residual: f64,
}

/// ℒ(f) = Σ_{α,ω} G^α(ω) (S^α(ω) f S^α(ω)† − ½{S^α(ω) S^α(ω)†, f}).
/// Fails only if the Gibbs state is not stationary.
pub fn davies_generator(model: &DaviesModel) -> Result<DaviesGenerator> {
    let d = model.hamiltonian.dim();
    let tol = model.tolerance();
    let mut generator = Superoperator::zero(d);
    let mut decompositions = Vec::with_capacity(model.couplings.len());
    for (alpha, s) in model.couplings.iter().enumerate() {
        let bohr = bohr_decompose(&model.hamiltonian, s, tol)?;
        for (omega, comp) in bohr.frequencies.iter().zip(&bohr.components) {
            let g = model.bath.rate(alpha, *omega);
            if g == 0.0 {
                continue;
            }
            generator = &generator + &dissipator(&comp.adjoint()).scaled(g);
        }
        decompositions.push(bohr);
    }
    let gibbs = model.gibbs()?;
    let gibbs_residual = (generator.matrix().adjoint() * vectorize(gibbs.matrix())).norm();
    if gibbs_residual > 1e-9 * (1.0 + frobenius(generator.matrix())) {
        return Err(Error::GibbsNotStationary { residual: gibbs_residual });
    }
    let mut algebra: Vec<&CMatrix> = vec![model.hamiltonian.matrix()];
    algebra.extend(model.couplings.iter().map(|s| s.matrix()));
    let commutant_dim = commutant_dimension(&algebra);
    Ok(DaviesGenerator { generator, gibbs, decompositions, commutant_dim, gibbs_residual })
}

/// Builds and analyzes the Davies generator. Non-trivial commutants surface as
/// `NotPrimitive` from the analysis.
pub fn build_davies(model: &DaviesModel) -> Result<SemigroupAnalysis> {
    let gen = davies_generator(model)?;
    if gen.commutant_dim > 1 {
        warn!("coupling algebra has a commutant of dimension {}", gen.commutant_dim);
    }
    analyze(&gen.generator)
}

/// Dimension of {X : [X, A] = 0 for all A in the list}.
pub fn commutant_dimension(ops: &[&CMatrix]) -> usize {
    let d = ops[0].nrows();
    let n = d * d;
    let mut stacked = CMatrix::zeros(n * ops.len(), n);
    for (i, a) in ops.iter().enumerate() {
        let neg = a.map(|z| -z);
        let ad = Superoperator::left_right_sum(a, &neg);
        stacked.view_mut((i * n, 0), (n, n)).copy_from(ad.matrix());
    }
    let sv = stacked.singular_values();
    let scale = 1.0 + sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s <= 1e-9 * scale).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignConvention {
    Minus,
    Plus,
    Both,
    Neither,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KmsReport {
    pub rate_residual: f64,
    /// max relative ‖σS(ω) − e^{−βω}S(ω)σ‖.
    pub minus_residual: f64,
    /// max relative ‖σS(ω) − e^{+βω}S(ω)σ‖.
    pub plus_residual: f64,
    pub validated: SignConvention,
}

/// Residuals of the bath KMS relation and of the operator relation under both
/// exponent signs.
pub fn check_kms_relations(model: &DaviesModel, decomposition: &BohrDecomposition) -> Result<KmsReport> {
    let beta = model.bath.beta();
    let sigma = model.gibbs()?;
    let sm = sigma.matrix();
    let rate_residual = model.bath.kms_residual(&decomposition.frequencies.iter().map(|w| w.abs()).collect::<Vec<_>>());
    let (mut minus, mut plus): (f64, f64) = (0.0, 0.0);
    for (omega, comp) in decomposition.frequencies.iter().zip(&decomposition.components) {
        let left = sm * comp;
        let right = comp * sm;
        let scale = max_abs(&left).max(max_abs(&right)).max(1e-300);
        minus = minus.max(max_abs(&(&left - right.map(|z| z * c((-beta * omega).exp(), 0.0)))) / scale);
        plus = plus.max(max_abs(&(&left - right.map(|z| z * c((beta * omega).exp(), 0.0)))) / scale);
    }
    let ok = |r: f64| r <= 1e-10;
    let validated = match (ok(minus), ok(plus)) {
        (true, true) => SignConvention::Both,
        (true, false) => SignConvention::Minus,
        (false, true) => SignConvention::Plus,
        (false, false) => SignConvention::Neither,
    };
    Ok(KmsReport { rate_residual, minus_residual: minus, plus_residual: plus, validated })
}
