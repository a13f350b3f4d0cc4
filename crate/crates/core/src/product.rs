//! Product Liouvillians ℒ = Σ_k ℒ_k, their excitation blocks and the
//! block-wise norm and Q-form checks behind the N-independent bound.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::bounds::{bound_product_lsi, BoundReport};
use crate::error::{Error, Result};
use crate::lindblad::{analyze, build_lindblad, LindbladSpec, SemigroupAnalysis};
use crate::operator::{c, pauli, vectorize, CMatrix, FullRankState, HermitianOperator, Superoperator};
use crate::weighted::WeightedContext;
use crate::SUPEROPERATOR_DIM_CAP;

/// Two-level thermal generator with decay |1⟩ → |0⟩ at rate
/// G(2) and excitation at G(−2) = e^{−2β}G(2). Its fixed point puts weight
/// e^{2β}/(1 + e^{2β}) on |0⟩.
pub fn thermal_qubit(beta: f64, g2: f64) -> Result<SemigroupAnalysis> {
    if !(beta >= 0.0) || !(g2 > 0.0) {
        return Err(Error::InvalidInput(format!("need beta >= 0 and G2 > 0, got beta = {beta}, G2 = {g2}")));
    }
    let gm2 = (-2.0 * beta).exp() * g2;
    let spec = LindbladSpec {
        hamiltonian: HermitianOperator::zeros(2),
        lindblad_ops: vec![pauli::lowering().scale(g2.sqrt()), pauli::raising().scale(gm2.sqrt())],
    };
    analyze(&build_lindblad(&spec)?)
}

#[derive(Debug, Clone)]
pub struct ProductLiouvillian {
    pub factors: Vec<SemigroupAnalysis>,
    pub assembled: Superoperator,
    pub fixed_point: FullRankState,
    pub local_dim: usize,
    /// ‖ℒ*(⊗σ_k)‖.
    pub stationarity_residual: f64,
}

/// Σ_k embed(ℒ_k) over identical-dimension, primitive, reversible factors.
pub fn build_product(factors: Vec<SemigroupAnalysis>) -> Result<ProductLiouvillian> {
    let first = factors.first().ok_or_else(|| Error::InvalidInput("product needs at least one factor".into()))?;
    let d = first.dim();
    let n = factors.len();
    if let Some(f) = factors.iter().find(|f| f.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: f.dim() });
    }
    let total = (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > SUPEROPERATOR_DIM_CAP as u128 {
        return Err(Error::DimensionCap { dim: total.min(usize::MAX as u128) as usize, cap: SUPEROPERATOR_DIM_CAP });
    }
    if let Some(f) = factors.iter().find(|f| !f.reversible) {
        return Err(Error::NotReversible { asymmetry: f.asymmetry });
    }
    let big = total as usize;
    let mut assembled = Superoperator::zero(big);
    for (k, f) in factors.iter().enumerate() {
        assembled = &assembled + &f.generator.lift(k, n)?;
    }
    let fixed_point = factors[1..].iter().fold(first.fixed_point.clone(), |acc, f| acc.tensor(&f.fixed_point));
    let stationarity_residual = (assembled.matrix().adjoint() * vectorize(fixed_point.matrix())).norm();
    if stationarity_residual > 1e-9 {
        return Err(Error::GibbsNotStationary { residual: stationarity_residual });
    }
    Ok(ProductLiouvillian { factors, assembled, fixed_point, local_dim: d, stationarity_residual })
}

impl ProductLiouvillian {
    pub fn n_sites(&self) -> usize {
        self.factors.len()
    }

    pub fn dim(&self) -> usize {
        self.assembled.dim()
    }

    /// Λ = min_k Λ_k.
    pub fn gap(&self) -> f64 {
        self.factors.iter().map(|f| f.gap).fold(f64::INFINITY, f64::min)
    }

    /// s = max_k ‖σ_k⁻¹‖.
    pub fn s(&self) -> f64 {
        self.factors.iter().map(|f| f.fixed_point.inverse_norm()).fold(0.0, f64::max)
    }

    pub fn context(&self) -> WeightedContext {
        WeightedContext::new(self.fixed_point.clone())
    }

    pub fn block_constant(&self) -> f64 {
        product_block_norm_constant(self.local_dim, self.s())
    }

    pub fn lsi_bound(&self) -> Result<BoundReport> {
        bound_product_lsi(self.gap(), self.local_dim, self.s())
    }
}

/// C = 2 s^{1/4} d.
pub fn product_block_norm_constant(d: usize, s: f64) -> f64 {
    2.0 * s.powf(0.25) * d as f64
}

/// σ_k-orthonormal eigen-operators of one factor, identity first, then by
/// decreasing eigenvalue.
pub fn local_eigenbasis(factor: &SemigroupAnalysis) -> Result<Vec<(f64, CMatrix)>> {
    let sym = factor.symmetrized.as_ref().ok_or(Error::NotReversible { asymmetry: factor.asymmetry })?;
    let d = factor.dim();
    let n = sym.eigenvalues.len();
    let mut out = Vec::with_capacity(n);
    out.push((0.0, CMatrix::identity(d, d)));
    for j in (0..n - 1).rev() {
        out.push((sym.eigenvalues[j], sym.eigen_operator(j)));
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct BlockElement {
    /// Index into each factor's local eigenbasis; 0 is the identity.
    pub labels: Vec<usize>,
    pub eigenvalue: f64,
    pub operator: CMatrix,
}

impl BlockElement {
    pub fn support(&self) -> Vec<usize> {
        self.labels.iter().enumerate().filter(|(_, &l)| l != 0).map(|(k, _)| k).collect()
    }
}

#[derive(Debug, Clone)]
pub struct ExcitationBlock {
    pub n: usize,
    pub elements: Vec<BlockElement>,
}

/// Tensor-product eigen-operators grouped by the number of non-identity factors.
pub fn excitation_blocks(p: &ProductLiouvillian) -> Result<Vec<ExcitationBlock>> {
    let locals: Vec<Vec<(f64, CMatrix)>> = p.factors.iter().map(local_eigenbasis).collect::<Result<_>>()?;
    let n_sites = p.n_sites();
    let per = locals[0].len();
    let mut blocks: Vec<ExcitationBlock> = (0..=n_sites).map(|n| ExcitationBlock { n, elements: Vec::new() }).collect();
    let count = per.pow(n_sites as u32);
    for idx in 0..count {
        let labels: Vec<usize> = (0..n_sites).map(|k| (idx / per.pow((n_sites - 1 - k) as u32)) % per).collect();
        let eigenvalue = labels.iter().enumerate().map(|(k, &l)| locals[k][l].0).sum();
        let operator = labels
            .iter()
            .enumerate()
            .skip(1)
            .fold(locals[0][labels[0]].1.clone(), |acc, (k, &l)| acc.kronecker(&locals[k][l].1));
        let n = labels.iter().filter(|&&l| l != 0).count();
        blocks[n].elements.push(BlockElement { labels, eigenvalue, operator });
    }
    Ok(blocks)
}

/// Random complex combination of a block's elements.
pub fn random_block_element(block: &ExcitationBlock, rng: &mut ChaCha8Rng) -> CMatrix {
    let d = block.elements[0].operator.nrows();
    let mut f = CMatrix::zeros(d, d);
    for e in &block.elements {
        let (re, im): (f64, f64) = (StandardNormal.sample(rng), StandardNormal.sample(rng));
        f += e.operator.map(|z| z * c(re, im));
    }
    f
}

/// max over samples of ‖f_n‖_{4,σ}/‖f_n‖_{2,σ} for random f_n in a block.
pub fn block_norm_ratio(ctx: &WeightedContext, block: &ExcitationBlock, samples: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let f = random_block_element(block, &mut rng);
        worst = worst.max(ctx.lp_norm(&f, 4.0)? / ctx.norm2(&f));
    }
    Ok(worst)
}

/// Verifies ‖f_n‖₄ ≤ C^n ‖f_n‖₂ on every block; returns the worst ratio per block.
pub fn check_block_norms(p: &ProductLiouvillian, samples: usize, seed: u64) -> Result<Vec<f64>> {
    let ctx = p.context();
    let c_const = p.block_constant();
    let blocks = excitation_blocks(p)?;
    let mut out = Vec::with_capacity(blocks.len());
    for b in &blocks {
        let ratio = block_norm_ratio(&ctx, b, samples, seed.wrapping_add(b.n as u64))?;
        let bound = c_const.powi(b.n as i32);
        if ratio > bound * (1.0 + 1e-12) {
            return Err(Error::BoundViolated { what: format!("block {} 4-norm ratio", b.n), value: ratio, bound });
        }
        out.push(ratio);
    }
    Ok(out)
}

fn some_support_uncovered(supports: [&[usize]; 4]) -> bool {
    (0..4).any(|l| {
        supports[l].iter().any(|site| (0..4).filter(|&j| j != l).all(|j| !supports[j].contains(site)))
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QFormProductReport {
    /// max |Q| over tuples where some support is not covered by the other three.
    pub max_uncovered: f64,
    pub uncovered_tuples: usize,
    /// max |Q| over all tuples drawn from block `n`.
    pub max_in_block: f64,
    pub ceiling: f64,
}

/// Exhaustive Q-form checks: vanishing on uncovered supports (all tuples) and
/// the s^n ceiling inside block n.
pub fn q_form_product_check(p: &ProductLiouvillian, n: usize) -> Result<QFormProductReport> {
    let ctx = p.context();
    let blocks = excitation_blocks(p)?;
    if n >= blocks.len() {
        return Err(Error::InvalidInput(format!("block {n} does not exist for {} sites", p.n_sites())));
    }
    let all: Vec<&BlockElement> = blocks.iter().flat_map(|b| b.elements.iter()).collect();
    let supports: Vec<Vec<usize>> = all.iter().map(|e| e.support()).collect();
    let (mut max_uncovered, mut uncovered) = (0.0f64, 0usize);
    let m = all.len();
    for a in 0..m {
        for b in 0..m {
            for cc in 0..m {
                for dd in 0..m {
                    let sup = [supports[a].as_slice(), &supports[b], &supports[cc], &supports[dd]];
                    if some_support_uncovered(sup) {
                        let q = ctx.q_form(&all[a].operator, &all[b].operator, &all[cc].operator, &all[dd].operator);
                        max_uncovered = max_uncovered.max(q.magnitude);
                        uncovered += 1;
                    }
                }
            }
        }
    }
    let block = &blocks[n].elements;
    let mut max_in_block: f64 = 0.0;
    for a in block {
        for b in block {
            for cc in block {
                for dd in block {
                    max_in_block = max_in_block.max(ctx.q_form(&a.operator, &b.operator, &cc.operator, &dd.operator).magnitude);
                }
            }
        }
    }
    let ceiling = p.s().powi(n as i32);
    if max_in_block > ceiling * (1.0 + 1e-10) {
        return Err(Error::BoundViolated { what: format!("Q-form ceiling in block {n}"), value: max_in_block, bound: ceiling });
    }
    Ok(QFormProductReport { max_uncovered, uncovered_tuples: uncovered, max_in_block, ceiling })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::check_detailed_balance;
    use crate::operator::max_abs;
    use approx::assert_abs_diff_eq;

    fn two_thermal(beta: f64) -> ProductLiouvillian {
        build_product(vec![thermal_qubit(beta, 1.0).unwrap(), thermal_qubit(beta, 1.0).unwrap()]).unwrap()
    }

    #[test]
    fn thermal_qubit_basics() {
        let beta: f64 = 1.0;
        let q = thermal_qubit(beta, 1.0).unwrap();
        assert_abs_diff_eq!(q.gap, (1.0 + (-2.0 * beta).exp()) / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q.fixed_point.matrix()[(0, 0)].re, (2.0 * beta).exp() / (1.0 + (2.0 * beta).exp()), epsilon = 1e-12);
        assert_abs_diff_eq!(q.fixed_point.inverse_norm(), 1.0 + (2.0 * beta).exp(), epsilon = 1e-10);
    }

    #[test]
    fn single_factor_is_identity_construction() {
        let q = thermal_qubit(0.5, 1.0).unwrap();
        let p = build_product(vec![q.clone()]).unwrap();
        assert_eq!(p.assembled.matrix(), q.generator.matrix());
    }

    #[test]
    fn spectrum_is_sum_of_local_spectra() {
        let p = two_thermal(0.7);
        assert_abs_diff_eq!(p.gap(), p.factors[0].gap, epsilon = 1e-15);
        let a = analyze(&p.assembled).unwrap();
        assert_abs_diff_eq!(a.gap, p.gap(), epsilon = 1e-10);
        let local: Vec<f64> = p.factors[0].spectrum.iter().map(|z| z.re).collect();
        let mut sums: Vec<f64> = local.iter().flat_map(|a| local.iter().map(move |b| a + b)).collect();
        let mut got: Vec<f64> = a.spectrum.iter().map(|z| z.re).collect();
        sums.sort_by(f64::total_cmp);
        got.sort_by(f64::total_cmp);
        for (x, y) in sums.iter().zip(&got) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-10);
        }
        let tensor = p.factors[0].fixed_point.tensor(&p.factors[1].fixed_point);
        assert!(a.fixed_point.trace_distance(tensor.matrix()) < 1e-9);
        assert!(check_detailed_balance(&p.assembled, &p.fixed_point, 4, 0).exact < 1e-10);
    }

    #[test]
    fn block_sizes() {
        let one = build_product(vec![thermal_qubit(1.0, 1.0).unwrap()]).unwrap();
        let sizes: Vec<usize> = excitation_blocks(&one).unwrap().iter().map(|b| b.elements.len()).collect();
        assert_eq!(sizes, vec![1, 3]);
        let sizes: Vec<usize> = excitation_blocks(&two_thermal(1.0)).unwrap().iter().map(|b| b.elements.len()).collect();
        assert_eq!(sizes, vec![1, 6, 9]);
    }

    #[test]
    fn blocks_are_orthonormal_eigen_operators() {
        let p = two_thermal(1.0);
        let ctx = p.context();
        let blocks = excitation_blocks(&p).unwrap();
        let all: Vec<&BlockElement> = blocks.iter().flat_map(|b| b.elements.iter()).collect();
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                let ip = ctx.inner(&a.operator, &b.operator);
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((ip - c(expected, 0.0)).norm() < 1e-10);
            }
        }
        for b in &blocks {
            for e in &b.elements {
                let image = p.assembled.apply(&e.operator);
                assert!(max_abs(&(image - e.operator.map(|z| z * e.eigenvalue))) < 1e-10);
                assert!(e.eigenvalue <= -(b.n as f64) * p.gap() + 1e-9);
            }
        }
    }

    #[test]
    fn block_constant_examples() {
        assert_abs_diff_eq!(product_block_norm_constant(2, 1.0), 4.0, epsilon = 1e-15);
        let s = 1.0 + 2f64.exp();
        assert_abs_diff_eq!(product_block_norm_constant(2, s), 4.0 * s.powf(0.25), epsilon = 1e-15);
        assert_abs_diff_eq!(product_block_norm_constant(2, s), 6.8075, epsilon = 1e-4);
    }

    #[test]
    fn block_norms_hold() {
        let p = two_thermal(1.0);
        let ratios = check_block_norms(&p, 200, 3).unwrap();
        assert_abs_diff_eq!(ratios[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn q_form_checks() {
        let p = two_thermal(0.8);
        for n in 0..=2 {
            let r = q_form_product_check(&p, n).unwrap();
            assert!(r.max_uncovered < 1e-12, "{r:?}");
            assert!(r.uncovered_tuples > 0);
            assert!(r.max_in_block <= r.ceiling);
        }
    }

    #[test]
    fn cap_and_mismatch() {
        let q = thermal_qubit(1.0, 1.0).unwrap();
        assert!(matches!(build_product(vec![q.clone(); 7]), Err(Error::DimensionCap { .. })));
        assert!(build_product(vec![]).is_err());
    }

    #[test]
    fn n_independent_report() {
        let reports: Vec<f64> = (1..=3)
            .map(|n| build_product(vec![thermal_qubit(1.0, 1.0).unwrap(); n]).unwrap().lsi_bound().unwrap().value)
            .collect();
        assert!(reports.iter().all(|&r| r == reports[0]));
    }
}
