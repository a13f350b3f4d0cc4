//! Closed-form log-Sobolev lower bounds, the variational upper estimate and
//! the hypercontractivity sweep.
//!
//! Every closed-form bound is returned as a [`BoundReport`] whose bracket
//! places α between the formula (below) and the spectral gap (above).

use std::f64::consts::LN_2;
use std::fmt;

use log::{info, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::lindblad::{evolve, REVERSIBLE_TOL};
use crate::operator::{
    frobenius, hermitian_basis, hermitian_coordinates, hermitian_eigen, hermitian_part, matrix_function, from_coordinates,
    unvectorize, CMatrix, FullRankState, HermitianOperator, Superoperator, c,
};
use crate::optimize::{argmin_of, multistart, SimplexOptions};
use crate::random;
use crate::weighted::{unital_residual, WeightedContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    Interpolation,
    InterpolationQ4,
    GeneralLower,
    BlockNormM4,
    BlockLsi,
    ProductLsi,
    GraphLsi,
    FermionLsi,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Interpolation => "interpolation",
            BoundKind::InterpolationQ4 => "interpolation_q4",
            BoundKind::GeneralLower => "general_lower",
            BoundKind::BlockNormM4 => "block_norm_M4",
            BoundKind::BlockLsi => "block_lsi",
            BoundKind::ProductLsi => "product_lsi",
            BoundKind::GraphLsi => "graph_lsi",
            BoundKind::FermionLsi => "fermion_lsi",
        }
    }

    /// Tag of the closed form this kind evaluates, as written into result tables.
    pub fn equation(self) -> &'static str {
        match self {
            BoundKind::Interpolation => "Eq.11",
            BoundKind::InterpolationQ4 => "Eq.29",
            BoundKind::GeneralLower => "Eq.30",
            BoundKind::BlockNormM4 => "Eq.33",
            BoundKind::BlockLsi => "Eq.36",
            BoundKind::ProductLsi => "Eq.38",
            BoundKind::GraphLsi => "Eq.76",
            BoundKind::FermionLsi => "Eq.137",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub inputs: Vec<(&'static str, f64)>,
    pub value: f64,
    pub bracket: Bracket,
}

impl BoundReport {
    fn new(kind: BoundKind, inputs: Vec<(&'static str, f64)>, value: f64, upper: f64) -> Self {
        Self { kind, inputs, value, bracket: Bracket { lower: value, upper: upper.max(value) } }
    }

    pub fn equation(&self) -> &'static str {
        self.kind.equation()
    }

    pub fn input(&self, name: &str) -> Option<f64> {
        self.inputs.iter().find(|(k, _)| *k == name).map(|(_, v)| *v)
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be positive and finite, got {v}")))
    }
}

/// α ≥ (1 − 2/q)λ / (2(λt_q + log M_q + (q−2)/q)).
pub fn bound_interpolation(lambda: f64, q: f64, t_q: f64, m_q: f64) -> Result<BoundReport> {
    if !(q > 2.0) {
        return Err(Error::InvalidExponent { p: q, requirement: "greater than 2" });
    }
    positive("lambda", lambda)?;
    if !(t_q >= 0.0) || !(m_q >= 1.0) {
        return Err(Error::InvalidInput(format!("need t_q >= 0 and M_q >= 1, got t_q = {t_q}, M_q = {m_q}")));
    }
    let value = if q.is_infinite() {
        lambda / (2.0 * (lambda * t_q + m_q.ln() + 1.0))
    } else {
        (1.0 - 2.0 / q) * lambda / (2.0 * (lambda * t_q + m_q.ln() + (q - 2.0) / q))
    };
    Ok(BoundReport::new(BoundKind::Interpolation, vec![("lambda", lambda), ("q", q), ("t_q", t_q), ("M_q", m_q)], value, lambda))
}

/// q = 4 specialization: λ / (2(2λt₄ + 2 log M₄ + 1)).
pub fn bound_interpolation_q4(lambda: f64, t4: f64, m4: f64) -> Result<BoundReport> {
    positive("lambda", lambda)?;
    if !(t4 >= 0.0) || !(m4 >= 1.0) {
        return Err(Error::InvalidInput(format!("need t_4 >= 0 and M_4 >= 1, got t_4 = {t4}, M_4 = {m4}")));
    }
    let value = lambda / (2.0 * (2.0 * lambda * t4 + 2.0 * m4.ln() + 1.0));
    Ok(BoundReport::new(BoundKind::InterpolationQ4, vec![("lambda", lambda), ("t_q", t4), ("M_q", m4)], value, lambda))
}

/// λ / (log ‖σ⁻¹‖ + 2) ≤ α ≤ λ.
pub fn bound_general(lambda: f64, sigma: &FullRankState) -> Result<BoundReport> {
    positive("lambda", lambda)?;
    let inv = sigma.inverse_norm();
    let value = lambda / (inv.ln() + 2.0);
    Ok(BoundReport::new(BoundKind::GeneralLower, vec![("lambda", lambda), ("sigma_inv_norm", inv)], value, lambda))
}

/// M₄ = 1/(1 − C e^{−λt}), valid for t > log(C)/λ.
pub fn block_norm_bound(c_const: f64, lambda: f64, t: f64) -> Result<f64> {
    positive("lambda", lambda)?;
    if !(c_const >= 1.0) {
        return Err(Error::InvalidInput(format!("block constant must be >= 1, got {c_const}")));
    }
    let threshold = c_const.ln() / lambda;
    if !(t > threshold) {
        return Err(Error::SeriesDiverges { t, threshold });
    }
    Ok(1.0 / (1.0 - c_const * (-lambda * t).exp()))
}

/// λ / log(C⁴ 2⁸ e²).
pub fn bound_block_lsi(c_const: f64, lambda: f64) -> Result<BoundReport> {
    positive("lambda", lambda)?;
    if !(c_const >= 1.0) {
        return Err(Error::InvalidInput(format!("block constant must be >= 1, got {c_const}")));
    }
    let value = lambda / (4.0 * c_const.ln() + 8.0 * LN_2 + 2.0);
    Ok(BoundReport::new(BoundKind::BlockLsi, vec![("C", c_const), ("lambda", lambda)], value, lambda))
}

/// Λ / (log(d⁴s) + 11), independent of the number of factors.
pub fn bound_product_lsi(big_lambda: f64, d: usize, s: f64) -> Result<BoundReport> {
    positive("Lambda", big_lambda)?;
    if d < 2 || !(s >= 1.0) {
        return Err(Error::InvalidInput(format!("need d >= 2 and s >= 1, got d = {d}, s = {s}")));
    }
    let df = d as f64;
    let value = big_lambda / (4.0 * df.ln() + s.ln() + 11.0);
    Ok(BoundReport::new(BoundKind::ProductLsi, vec![("Lambda", big_lambda), ("d", df), ("s", s)], value, big_lambda))
}

/// (G(2) + G(−2)) / (2 log(e^{2β} + 1) + 28), bracketed above by the local gap.
pub fn bound_graph_lsi_rates(beta: f64, g_up: f64, g_down: f64) -> Result<BoundReport> {
    positive("beta", beta)?;
    positive("G2", g_up)?;
    if !(g_down >= 0.0) {
        return Err(Error::InvalidInput(format!("G(-2) must be non-negative, got {g_down}")));
    }
    let value = (g_up + g_down) / (2.0 * ((2.0 * beta).exp() + 1.0).ln() + 28.0);
    Ok(BoundReport::new(
        BoundKind::GraphLsi,
        vec![("beta", beta), ("G2", g_up), ("Gm2", g_down)],
        value,
        (g_up + g_down) / 2.0,
    ))
}

/// Λ / (βν + 14).
pub fn bound_fermion_lsi(big_lambda: f64, nu: f64, beta: f64) -> Result<BoundReport> {
    positive("Lambda", big_lambda)?;
    positive("beta", beta)?;
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::InvalidInput(format!("nu must be non-negative, got {nu}")));
    }
    let value = big_lambda / (beta * nu + 14.0);
    Ok(BoundReport::new(BoundKind::FermionLsi, vec![("Lambda", big_lambda), ("beta", beta), ("nu", nu)], value, big_lambda))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsiOptions {
    pub restarts: usize,
    pub seed: u64,
    pub simplex: SimplexOptions,
    /// Perturbation sizes ε for the 𝟙 ± ε·g seeds along the slowest modes.
    pub seed_epsilons: [f64; 3],
}

impl Default for LsiOptions {
    fn default() -> Self {
        Self { restarts: 128, seed: 0, simplex: SimplexOptions::default(), seed_epsilons: [1e-4, 1e-3, 1e-2] }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LsiEstimate {
    /// Best ℰ(f)/Ent(f) found; an upper bound on α.
    pub alpha_upper: f64,
    pub witness: HermitianOperator,
    pub alpha_lower: f64,
    pub lower_report: BoundReport,
    pub gap: f64,
    pub restarts_used: usize,
    pub converged: bool,
}

impl LsiEstimate {
    /// Replaces the default general lower bound with a model-specific one.
    pub fn with_lower_bound(mut self, report: BoundReport) -> Self {
        self.alpha_lower = report.bracket.lower;
        self.lower_report = report;
        self
    }

    pub fn is_closed(&self, slack: f64) -> bool {
        self.alpha_lower <= self.alpha_upper + slack && self.alpha_upper <= self.gap + slack
    }
}

/// Symmetrized generator ΓℒΓ⁻¹, checked for Hermiticity.
fn symmetrize(ctx: &WeightedContext, l: &Superoperator) -> Result<CMatrix> {
    if l.dim() != ctx.dim() {
        return Err(Error::DimensionMismatch { expected: ctx.dim(), found: l.dim() });
    }
    let residual = unital_residual(l);
    if residual > 1e-10 * (1.0 + crate::operator::max_abs(l.matrix())) {
        return Err(Error::NotUnital { residual });
    }
    let k = ctx.gamma().compose(l).compose(&ctx.gamma_inverse()).into_matrix();
    let asymmetry = frobenius(&(&k - k.adjoint()));
    if asymmetry > REVERSIBLE_TOL * (1.0 + frobenius(&k)) {
        return Err(Error::NotReversible { asymmetry });
    }
    Ok(k)
}

/// Variational upper estimate of α: minimizes ℰ(f)/Ent(f) over f = exp(h),
/// plus 𝟙 ± εg seeds along the slowest eigen-operators.
pub fn estimate_lsi(ctx: &WeightedContext, l: &Superoperator, opts: &LsiOptions) -> Result<LsiEstimate> {
    let k = symmetrize(ctx, l)?;
    let d = ctx.dim();
    let sym = hermitian_eigen(&k);
    let n = sym.eigenvalues.len();
    if n < 2 {
        return Err(Error::InvalidInput("generator on a one-dimensional space has no gap".into()));
    }
    let gap = -sym.eigenvalues[n - 2];
    if !(gap > 0.0) {
        return Err(Error::NotPrimitive { kernel_dim: 2, min_eigenvalue: 0.0 });
    }

    let basis = hermitian_basis(d);
    let sigma_half = ctx.sigma().power(0.5).into_owned();
    let ratio = |f: &CMatrix| -> Option<f64> {
        let fh = HermitianOperator::from_hermitian_part(f);
        let ent = ctx.ent(&fh).ok()?;
        let norm_sq = ctx.norm2(f).powi(2);
        if !(ent > 1e-12 * norm_sq) {
            return None;
        }
        let lf = l.apply(f);
        let energy = -(&sigma_half * f.adjoint() * &sigma_half * lf).trace().re;
        Some(energy / ent)
    };
    let objective = |x: &[f64]| -> f64 {
        let h = from_coordinates(&basis, x);
        let spec = hermitian_eigen(&h);
        if spec.eigenvalues.iter().any(|e| e.abs() > 40.0) {
            return f64::MAX;
        }
        let f = matrix_function(&spec, f64::exp).expect("exp is finite");
        ratio(f.matrix()).unwrap_or(f64::MAX)
    };

    // Seeds along the slow eigenspace (gap eigenvalue and anything within 1e-9).
    let mut seed_best: Option<(f64, CMatrix)> = None;
    let gamma_inv = ctx.gamma_inverse();
    for j in (0..n - 1).rev() {
        if (sym.eigenvalues[j] + gap).abs() > 1e-9 * (1.0 + gap) {
            break;
        }
        let g = gamma_inv.apply(&unvectorize(&sym.eigenvectors.column(j).into_owned(), d));
        for dir in [hermitian_part(&g), hermitian_part(&g.map(|z| z * c(0.0, 1.0)))] {
            let scale = crate::operator::max_abs(&dir);
            if scale < 1e-12 {
                continue;
            }
            let dir = dir.unscale(scale);
            for &eps in &opts.seed_epsilons {
                for sign in [1.0, -1.0] {
                    let f = CMatrix::identity(d, d) + dir.scale(sign * eps);
                    if let Some(v) = ratio(&f) {
                        if seed_best.as_ref().is_none_or(|(b, _)| v < *b) {
                            seed_best = Some((v, f));
                        }
                    }
                }
            }
        }
    }

    let starts: Vec<Vec<f64>> = (0..opts.restarts)
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_mul(0x9e37_79b9).wrapping_add(k as u64));
            let width = 0.2 + 1.8 * (k as f64 / opts.restarts.max(1) as f64);
            (0..d * d).map(|_| { let z: f64 = StandardNormal.sample(&mut rng); width * z }).collect::<Vec<f64>>()
        })
        .collect();
    // One start from the best seed, so the simplex can refine it.
    let mut all_starts = starts;
    if let Some((_, f)) = &seed_best {
        let logf = matrix_function(&hermitian_eigen(f), f64::ln).map_err(Error::from)?;
        all_starts.push(hermitian_coordinates(&basis, logf.matrix()));
    }
    let minima = multistart(&objective, all_starts, &opts.simplex);
    let best_nm = argmin_of(&minima).filter(|&i| minima[i].value < f64::MAX);

    let nm_candidate = best_nm.map(|i| {
        let m = &minima[i];
        let h = from_coordinates(&basis, &m.point);
        let f = matrix_function(&hermitian_eigen(&h), f64::exp).expect("finite");
        (m.value, f.into_matrix(), m.converged)
    });
    let (alpha_upper, witness, converged) = match (nm_candidate, seed_best) {
        (Some((v, f, conv)), Some((sv, sf))) => {
            if sv < v {
                (sv, sf, true)
            } else {
                (v, f, conv)
            }
        }
        (Some((v, f, conv)), None) => (v, f, conv),
        (None, Some((sv, sf))) => (sv, sf, true),
        (None, None) => return Err(Error::DegenerateWitness),
    };
    if !converged {
        warn!("best log-Sobolev witness did not meet the simplex tolerance");
    }
    let lower_report = bound_general(gap, ctx.sigma())?;
    Ok(LsiEstimate {
        alpha_upper,
        witness: HermitianOperator::from_hermitian_part(&witness),
        alpha_lower: lower_report.bracket.lower,
        lower_report,
        gap,
        restarts_used: opts.restarts,
        converged,
    })
}

/// p(t) = 1 + e^{2αt}.
pub fn hypercontractive_exponent(alpha: f64, t: f64) -> f64 {
    1.0 + (2.0 * alpha * t).exp()
}

/// Largest exponent evaluated by [`verify_hypercontractivity`].
pub const P_CAP: f64 = 64.0;

#[derive(Debug, Clone, PartialEq)]
pub struct HypercontractivityReport {
    /// max over samples and evaluated times of ‖T_t f‖_{p(t),σ} − ‖f‖_{2,σ}, floored at 0.
    pub max_violation: f64,
    pub evaluated_times: Vec<f64>,
    pub skipped_times: Vec<f64>,
}

/// Samples random PSD f and checks ‖T_t f‖_{p(t),σ} ≤ ‖f‖_{2,σ} on the grid.
/// Times with p(t) > 64 are skipped.
pub fn verify_hypercontractivity(
    ctx: &WeightedContext,
    l: &Superoperator,
    alpha: f64,
    times: &[f64],
    samples: usize,
    seed: u64,
) -> Result<HypercontractivityReport> {
    positive("alpha", alpha)?;
    if l.dim() != ctx.dim() {
        return Err(Error::DimensionMismatch { expected: ctx.dim(), found: l.dim() });
    }
    let d = ctx.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fs: Vec<HermitianOperator> = (0..samples)
        .map(|i| if i % 2 == 0 { random::psd(d, &mut rng) } else { random::psd_random_rank(d, &mut rng) })
        .collect();
    let norms: Vec<f64> = fs.iter().map(|f| ctx.norm2(f)).collect();
    let mut worst: f64 = 0.0;
    let (mut evaluated, mut skipped) = (Vec::new(), Vec::new());
    for &t in times {
        let p = hypercontractive_exponent(alpha, t);
        if p > P_CAP {
            info!("skipping t = {t}: p(t) = {p:.3} exceeds {P_CAP}");
            skipped.push(t);
            continue;
        }
        evaluated.push(t);
        let tt = evolve(l, t);
        for (f, n2) in fs.iter().zip(&norms) {
            let image = tt.apply(f.matrix());
            let lhs = ctx.lp_norm(&image, p)?;
            worst = worst.max(lhs - n2);
        }
    }
    Ok(HypercontractivityReport { max_violation: worst, evaluated_times: evaluated, skipped_times: skipped })
}

/// d/dt ‖T_t f‖_{p(t),σ} at t = 0 for p(t) = 1 + e^{2αt}:
/// ‖f‖⁻¹ (ṗ(0)/p(0)² · Ent₂(f) − ℰ(f)), with Ent₂ the classical-normalization
/// entropy (twice the quantity returned by [`WeightedContext::ent`]).
pub fn norm_derivative_at_zero(ctx: &WeightedContext, l: &Superoperator, f: &HermitianOperator, alpha: f64) -> Result<f64> {
    let p0 = 2.0;
    let pdot = 2.0 * alpha;
    let ent2 = ctx.ent_squared(f)?;
    let energy = ctx.dirichlet_form(l, f)?;
    Ok((pdot / (p0 * p0) * ent2 - energy) / ctx.norm2(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::davies::{build_davies, BathSpectralDensity, DaviesModel};
    use crate::operator::pauli;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn depolarizing(sigma: &FullRankState) -> Superoperator {
        let s = sigma.matrix().clone();
        let d = sigma.dim();
        Superoperator::from_action(d, |f| {
            let tr = (&s * f).trace();
            CMatrix::identity(d, d).map(|z| z * tr) - f
        })
        .unwrap()
    }

    fn qubit_davies(beta: f64) -> Superoperator {
        let model = DaviesModel::new(
            HermitianOperator::new(pauli::z()).unwrap(),
            vec![HermitianOperator::new(pauli::x()).unwrap()],
            BathSpectralDensity::flat(beta, 1.0).unwrap(),
        )
        .unwrap();
        build_davies(&model).unwrap().generator
    }

    #[test]
    fn interpolation_examples() {
        let r = bound_interpolation(1.0, 4.0, 1.0, 2.0).unwrap();
        assert_abs_diff_eq!(r.value, 1.0 / (2.0 * (2.0 + 2.0 * LN_2 + 1.0)), epsilon = 1e-15);
        assert_abs_diff_eq!(r.value, 0.11400, epsilon = 1e-5);
        let q4 = bound_interpolation_q4(1.0, 1.0, 2.0).unwrap();
        assert_relative_eq!(r.value, q4.value, max_relative = 1e-15);
        let inf = bound_interpolation(3.0, f64::INFINITY, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(inf.value, 1.5, epsilon = 1e-15);
        let big = bound_interpolation(3.0, 1e12, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(big.value, 1.5, epsilon = 1e-9);
        assert!(bound_interpolation(1e-300, 4.0, 1.0, 2.0).unwrap().value < 1e-299);
        assert!(matches!(bound_interpolation(1.0, 2.0, 1.0, 2.0), Err(Error::InvalidExponent { .. })));
        assert_eq!(r.equation(), "Eq.11");
    }

    #[test]
    fn general_examples() {
        let r = bound_general(1.0, &FullRankState::maximally_mixed(2)).unwrap();
        assert_abs_diff_eq!(r.value, 1.0 / (LN_2 + 2.0), epsilon = 1e-15);
        assert_abs_diff_eq!(r.value, 0.371313, epsilon = 1e-6);
        assert_eq!(r.bracket.upper, 1.0);
        let vals: Vec<f64> = (2..6).map(|d| bound_general(1.0, &FullRankState::maximally_mixed(d)).unwrap().value).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn block_norm_examples() {
        assert_abs_diff_eq!(block_norm_bound(2.0, 1.0, 2.0).unwrap(), 1.0 / (1.0 - 2.0 * (-2.0f64).exp()), epsilon = 1e-15);
        assert_abs_diff_eq!(block_norm_bound(2.0, 1.0, 2.0).unwrap(), 1.371123, epsilon = 1e-6);
        assert_abs_diff_eq!(block_norm_bound(1.0, 1.0, 50.0).unwrap(), 1.0, epsilon = 1e-15);
        for c in [1.0, 2.0, 7.3] {
            for lam in [0.3, 1.0] {
                assert_abs_diff_eq!(block_norm_bound(c, lam, (2.0 * c).ln() / lam).unwrap(), 2.0, epsilon = 1e-12);
            }
        }
        assert!(matches!(block_norm_bound(2.0, 1.0, LN_2), Err(Error::SeriesDiverges { .. })));
    }

    #[test]
    fn block_lsi_examples() {
        assert_abs_diff_eq!(bound_block_lsi(2.0, 1.0).unwrap().value, 1.0 / (12.0 * LN_2 + 2.0), epsilon = 1e-15);
        assert_abs_diff_eq!(bound_block_lsi(2.0, 1.0).unwrap().value, 0.096920, epsilon = 1e-6);
        assert_abs_diff_eq!(bound_block_lsi(1.0, 1.0).unwrap().value, 1.0 / (8.0 * LN_2 + 2.0), epsilon = 1e-15);
        // block LSI equals the q = 4 interpolation bound at t₄ = log(2C)/λ, M₄ = 2
        for (c, lam) in [(2.0, 1.0), (5.0, 0.3)] {
            let via = bound_interpolation_q4(lam, (2.0f64 * c).ln() / lam, 2.0).unwrap().value;
            assert_relative_eq!(via, bound_block_lsi(c, lam).unwrap().value, max_relative = 1e-14);
        }
        // product chain: C = 2 s^{1/4} d gives λ / (log(d⁴ s) + 12 log 2 + 2) ≥ Eq. 38's value
        let (d, s, lam) = (2usize, 1.0 + 1f64.exp().powi(2), 1.0);
        let c = 2.0 * s.powf(0.25) * d as f64;
        let chain = bound_block_lsi(c, lam).unwrap().value;
        let exact = lam / ((d as f64).powi(4) * s).ln().mul_add(1.0, 12.0 * LN_2 + 2.0);
        assert_relative_eq!(chain, exact, max_relative = 1e-14);
        assert!(chain >= bound_product_lsi(lam, d, s).unwrap().value);
    }

    #[test]
    fn product_graph_fermion_examples() {
        let s = 1.0 + 2f64.exp();
        let p = bound_product_lsi(1.0, 2, s).unwrap();
        assert_abs_diff_eq!(p.value, 1.0 / ((16.0 * s).ln() + 11.0), epsilon = 1e-15);
        assert_abs_diff_eq!(p.value, 0.0629, epsilon = 1e-4);
        let g = bound_graph_lsi_rates(1.0, 1.0, (-2f64).exp()).unwrap();
        assert_abs_diff_eq!(g.value, 0.035200, epsilon = 1e-6);
        assert_abs_diff_eq!(g.bracket.upper, (1.0 + (-2f64).exp()) / 2.0, epsilon = 1e-15);
        let hot = bound_graph_lsi_rates(1e-12, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(hot.value, 2.0 / (2.0 * LN_2 + 28.0), epsilon = 1e-9);
        assert_abs_diff_eq!(bound_fermion_lsi(0.5, 2.0, 1.0).unwrap().value, 0.03125, epsilon = 1e-15);
        assert_abs_diff_eq!(bound_fermion_lsi(0.7, 0.0, 3.0).unwrap().value, 0.05, epsilon = 1e-15);
    }

    #[test]
    fn depolarizing_bracket() {
        let sigma = FullRankState::maximally_mixed(2);
        let ctx = WeightedContext::new(sigma.clone());
        let l = depolarizing(&sigma);
        let opts = LsiOptions { restarts: 16, ..Default::default() };
        let est = estimate_lsi(&ctx, &l, &opts).unwrap();
        assert_abs_diff_eq!(est.gap, 1.0, epsilon = 1e-12);
        assert!(est.alpha_lower <= est.alpha_upper + 1e-6, "{est:?}");
        assert!(est.alpha_upper <= est.gap + 1e-6, "{est:?}");
    }

    #[test]
    fn non_reversible_is_rejected() {
        let h = HermitianOperator::new(pauli::x()).unwrap();
        let l = crate::lindblad::build_lindblad(&crate::lindblad::LindbladSpec {
            hamiltonian: h,
            lindblad_ops: vec![pauli::lowering()],
        })
        .unwrap();
        let a = crate::lindblad::analyze(&l).unwrap();
        let ctx = a.context();
        assert!(matches!(estimate_lsi(&ctx, &l, &LsiOptions { restarts: 2, ..Default::default() }), Err(Error::NotReversible { .. })));
    }

    #[test]
    fn hypercontractivity_trivial_cases() {
        let beta = 0.8;
        let l = qubit_davies(beta);
        let ctx = crate::lindblad::analyze(&l).unwrap().context();
        let r = verify_hypercontractivity(&ctx, &l, 0.2, &[0.0], 20, 1).unwrap();
        assert!(r.max_violation <= 1e-12);
        let one = HermitianOperator::identity(2);
        for t in [0.1, 1.0, 5.0] {
            let p = hypercontractive_exponent(0.2, t);
            let image = evolve(&l, t).apply(one.matrix());
            assert_abs_diff_eq!(ctx.lp_norm(&image, p).unwrap(), 1.0, epsilon = 1e-10);
        }
        let capped = verify_hypercontractivity(&ctx, &l, 1.0, &[1.0, 10.0], 2, 1).unwrap();
        assert_eq!(capped.skipped_times, vec![10.0]);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let l = qubit_davies(0.6);
        let ctx = crate::lindblad::analyze(&l).unwrap().context();
        let alpha = 0.3;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let f = random::psd(2, &mut rng);
            let h = 1e-5;
            let at = |t: f64| ctx.lp_norm(evolve(&l, t).apply(f.matrix()), hypercontractive_exponent(alpha, t)).unwrap();
            let fd = (at(h) - at(-h)) / (2.0 * h);
            let exact = norm_derivative_at_zero(&ctx, &l, &f, alpha).unwrap();
            assert!((fd - exact).abs() <= 1e-4 * exact.abs().max(1e-3), "fd {fd} exact {exact}");
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(256))]

            #[test]
            fn q4_interpolation_is_eq29(lam in 1e-3f64..10.0, t in 0.0f64..10.0, m in 1.0f64..50.0) {
                let a = bound_interpolation(lam, 4.0, t, m).unwrap().value;
                let b = bound_interpolation_q4(lam, t, m).unwrap().value;
                prop_assert!((a - b).abs() <= 4.0 * f64::EPSILON * a);
            }

            #[test]
            fn general_is_interpolation_at_zero_time(seed in any::<u64>(), lam in 1e-2f64..5.0) {
                let sigma = random::full_rank_state(3, &mut ChaCha8Rng::seed_from_u64(seed));
                let g = bound_general(lam, &sigma).unwrap().value;
                let i = bound_interpolation(lam, 4.0, 0.0, sigma.inverse_norm().powf(0.25)).unwrap().value;
                prop_assert!((g - i).abs() <= 8.0 * f64::EPSILON * g);
            }

            #[test]
            fn bracket_ordered(lam in 1e-3f64..10.0, c in 1.0f64..20.0) {
                let r = bound_block_lsi(c, lam).unwrap();
                prop_assert!(r.bracket.lower <= r.bracket.upper);
                prop_assert!(r.value > 0.0);
            }

            #[test]
            fn weighted_modulus_preserves_norm(seed in any::<u64>()) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let ctx = WeightedContext::new(random::full_rank_state(3, &mut rng));
                let f = random::hermitian(3, &mut rng);
                let a = ctx.abs_two(&f);
                prop_assert!((ctx.norm2(&a) - ctx.norm2(&f)).abs() <= 1e-10 * (1.0 + ctx.norm2(&f)));
            }
        }
    }
}
