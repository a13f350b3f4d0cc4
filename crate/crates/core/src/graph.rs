//! Graph-state Hamiltonians, the graph-basis unitary and the thermal graph
//! semigroup.
//!
//! Labeling: the single-qubit Gibbs factor in the graph basis puts weight
//! e^{2β}/(1 + e^{2β}) on |0⟩, so the target graph state U|0…0⟩ is the ground
//! state. The direct Davies construction therefore uses H′ = −Σ_j S_j.

use std::collections::BTreeSet;

use crate::bounds::{bound_graph_lsi_rates, BoundReport};
use crate::davies::{davies_generator, BathSpectralDensity, DaviesModel};
use crate::error::{Error, Result};
use crate::operator::{c, cr, embed_matrix, identity, kron_all, max_abs, pauli, CMatrix, HermitianOperator, Superoperator};
use crate::product::{build_product, thermal_qubit, ProductLiouvillian};

/// Largest vertex count for Hamiltonian- and unitary-level work.
pub const HAMILTONIAN_VERTEX_CAP: usize = 6;
/// Largest vertex count for superoperator-level work.
pub const SUPEROPERATOR_VERTEX_CAP: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct GraphModel {
    pub vertices: usize,
    /// Unordered edges stored with u < v, sorted, without duplicates.
    pub edges: Vec<(usize, usize)>,
    pub beta: f64,
    pub g2: f64,
}

impl GraphModel {
    pub fn new(vertices: usize, edges: &[(usize, usize)], beta: f64, g2: f64) -> Result<Self> {
        if vertices == 0 {
            return Err(Error::InvalidGraph("graph needs at least one vertex".into()));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidInput(format!("inverse temperature must be positive, got {beta}")));
        }
        if !(g2 > 0.0) || !g2.is_finite() {
            return Err(Error::InvalidInput(format!("G(2) must be positive, got {g2}")));
        }
        let mut set = BTreeSet::new();
        for &(u, v) in edges {
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            if u >= vertices || v >= vertices {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) out of range for {vertices} vertices")));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Self { vertices, edges: set.into_iter().collect(), beta, g2 })
    }

    /// Path 0 – 1 – … – (n−1).
    pub fn path(vertices: usize, beta: f64, g2: f64) -> Result<Self> {
        let edges: Vec<(usize, usize)> = (1..vertices).map(|v| (v - 1, v)).collect();
        Self::new(vertices, &edges, beta, g2)
    }

    /// G(−2) = e^{−2β} G(2).
    pub fn g_minus2(&self) -> f64 {
        (-2.0 * self.beta).exp() * self.g2
    }

    pub fn neighbors(&self, j: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(u, v)| if u == j { Some(v) } else if v == j { Some(u) } else { None })
            .collect()
    }

    fn check_cap(&self, cap: usize) -> Result<()> {
        if self.vertices > cap {
            return Err(Error::DimensionCap { dim: 1 << self.vertices, cap: 1 << cap });
        }
        Ok(())
    }
}

/// Parses `u v` pairs, one per line. Blank lines and `#` comments are skipped.
pub fn parse_edge_list(text: &str) -> Result<Vec<(usize, usize)>> {
    let mut edges = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::InvalidGraph(format!("line {}: '{s}' is not a vertex index", lineno + 1)))
        };
        match fields.as_slice() {
            [u, v] => edges.push((parse(u)?, parse(v)?)),
            _ => return Err(Error::InvalidGraph(format!("line {}: expected two vertex indices", lineno + 1))),
        }
    }
    Ok(edges)
}

/// S_j = X_j ∏_{k ~ j} Z_k.
pub fn stabilizers(g: &GraphModel) -> Result<Vec<CMatrix>> {
    g.check_cap(HAMILTONIAN_VERTEX_CAP)?;
    let n = g.vertices;
    Ok((0..n)
        .map(|j| {
            let nbrs = g.neighbors(j);
            let factors: Vec<CMatrix> = (0..n)
                .map(|k| {
                    if k == j {
                        pauli::x()
                    } else if nbrs.contains(&k) {
                        pauli::z()
                    } else {
                        identity(2)
                    }
                })
                .collect();
            kron_all(factors.iter())
        })
        .collect())
}

/// H = Σ_j S_j. Fails if two stabilizers do not commute.
pub fn graph_hamiltonian(g: &GraphModel) -> Result<HermitianOperator> {
    let s = stabilizers(g)?;
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            let comm = &s[i] * &s[j] - &s[j] * &s[i];
            if max_abs(&comm) > 1e-12 {
                return Err(Error::InvalidGraph(format!("stabilizers {i} and {j} do not commute")));
            }
        }
    }
    let d = 1 << g.vertices;
    let h = s.iter().fold(CMatrix::zeros(d, d), |acc, m| acc + m);
    Ok(HermitianOperator::from_hermitian_part(&h))
}

/// U = (∏ CZ_{kj}) H^{⊗N}.
pub fn graph_unitary(g: &GraphModel) -> Result<CMatrix> {
    g.check_cap(HAMILTONIAN_VERTEX_CAP)?;
    let n = g.vertices;
    let d = 1usize << n;
    let bit = |x: usize, k: usize| (x >> (n - 1 - k)) & 1;
    let cz = CMatrix::from_fn(d, d, |r, col| {
        if r != col {
            return cr(0.0);
        }
        let parity: usize = g.edges.iter().map(|&(u, v)| bit(r, u) & bit(r, v)).sum();
        if parity.is_multiple_of(2) {
            cr(1.0)
        } else {
            cr(-1.0)
        }
    });
    let hadamards = kron_all(std::iter::repeat_n(pauli::hadamard(), n).collect::<Vec<_>>().iter());
    Ok(cz * hadamards)
}

/// max_j ‖U† S_j U − Z_j‖.
pub fn stabilizer_conjugation_residual(g: &GraphModel) -> Result<f64> {
    let u = graph_unitary(g)?;
    let s = stabilizers(g)?;
    let mut worst: f64 = 0.0;
    for (j, sj) in s.iter().enumerate() {
        let zj = embed_matrix(&pauli::z(), j, g.vertices)?;
        worst = worst.max(max_abs(&(u.adjoint() * sj * &u - zj)));
    }
    Ok(worst)
}

/// Thermal graph semigroup in the graph basis: a product of identical
/// two-level generators.
pub fn graph_davies(g: &GraphModel) -> Result<ProductLiouvillian> {
    g.check_cap(SUPEROPERATOR_VERTEX_CAP)?;
    let local = thermal_qubit(g.beta, g.g2)?;
    build_product(vec![local; g.vertices])
}

/// Davies generator built directly from H′ = −Σ S_j with couplings {Z_j} and a
/// flat bath of rate G(2).
pub fn graph_davies_direct(g: &GraphModel) -> Result<Superoperator> {
    g.check_cap(SUPEROPERATOR_VERTEX_CAP)?;
    let h = graph_hamiltonian(g)?.scaled(-1.0);
    let couplings = (0..g.vertices)
        .map(|j| Ok(HermitianOperator::from_hermitian_part(&embed_matrix(&pauli::z(), j, g.vertices)?)))
        .collect::<Result<Vec<_>>>()?;
    let model = DaviesModel::new(h, couplings, BathSpectralDensity::flat(g.beta, g.g2)?)?;
    Ok(davies_generator(&model)?.generator)
}

/// ‖Ad_U ∘ ℒ_graph ∘ Ad_U† − ℒ_direct‖ (max entry).
pub fn graph_cross_check(g: &GraphModel) -> Result<f64> {
    let u = graph_unitary(g)?;
    let product = graph_davies(g)?;
    let direct = graph_davies_direct(g)?;
    let ad_u = Superoperator::sandwich(&u, &u.adjoint());
    let ad_u_dag = Superoperator::sandwich(&u.adjoint(), &u);
    let conjugated = ad_u.compose(&product.assembled).compose(&ad_u_dag);
    Ok(max_abs(&(conjugated.matrix() - direct.matrix())))
}

pub fn bound_graph_lsi(g: &GraphModel) -> Result<BoundReport> {
    bound_graph_lsi_rates(g.beta, g.g2, g.g_minus2())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrepTime {
    pub beta_required: f64,
    pub t_epsilon: f64,
}

/// β ≥ log(4N/ε)/2 and t_ε = log(4N/ε) log(8N log(4N/ε)/ε²), which uses the
/// low-temperature estimate α⁻¹ ≈ 4β. The rate G(2) does not enter.
pub fn prep_time(n: usize, epsilon: f64, g2: f64) -> Result<PrepTime> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidEpsilon { epsilon });
    }
    if n == 0 {
        return Err(Error::InvalidInput("need at least one vertex".into()));
    }
    log::debug!("prep_time ignores G(2) = {g2}");
    let nf = n as f64;
    let l = (4.0 * nf / epsilon).ln();
    Ok(PrepTime { beta_required: l / 2.0, t_epsilon: l * (8.0 * nf * l / (epsilon * epsilon)).ln() })
}

/// ‖σ − |0…0⟩⟨0…0|‖₁ = 2 − 2(1 − (e^{2β}+1)⁻¹)^N for the graph-basis Gibbs state.
pub fn gibbs_target_distance(n: usize, beta: f64) -> f64 {
    2.0 - 2.0 * (1.0 - 1.0 / ((2.0 * beta).exp() + 1.0)).powi(n as i32)
}

/// |0…0⟩⟨0…0| on n qubits.
pub fn target_state(n: usize) -> CMatrix {
    let d = 1 << n;
    let mut m = CMatrix::zeros(d, d);
    m[(0, 0)] = c(1.0, 0.0);
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::{analyze, check_detailed_balance};
    use approx::assert_abs_diff_eq;

    #[test]
    fn parse_edges() {
        let e = parse_edge_list("# square\n0 1\n1 2\n\n2 3 # last\n3 0\n").unwrap();
        assert_eq!(e, vec![(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert!(parse_edge_list("0 1 2").is_err());
        assert!(parse_edge_list("a b").is_err());
        assert!(GraphModel::new(2, &[(0, 0)], 1.0, 1.0).is_err());
        assert!(GraphModel::new(2, &[(0, 2)], 1.0, 1.0).is_err());
        assert_eq!(GraphModel::new(2, &[(1, 0), (0, 1)], 1.0, 1.0).unwrap().edges, vec![(0, 1)]);
    }

    #[test]
    fn hamiltonian_examples() {
        let single = GraphModel::new(1, &[], 1.0, 1.0).unwrap();
        assert!(max_abs(&(graph_hamiltonian(&single).unwrap().matrix() - pauli::x())) < 1e-15);
        let pair = GraphModel::new(2, &[(0, 1)], 1.0, 1.0).unwrap();
        let expected = pauli::x().kronecker(&pauli::z()) + pauli::z().kronecker(&pauli::x());
        assert!(max_abs(&(graph_hamiltonian(&pair).unwrap().matrix() - expected)) < 1e-15);
        let square = GraphModel::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], 1.0, 1.0).unwrap();
        assert!(graph_hamiltonian(&square).is_ok());
        let big = GraphModel::path(7, 1.0, 1.0).unwrap();
        assert!(matches!(graph_hamiltonian(&big), Err(Error::DimensionCap { .. })));
    }

    #[test]
    fn unitary_examples() {
        let single = GraphModel::new(1, &[], 1.0, 1.0).unwrap();
        let u = graph_unitary(&single).unwrap();
        assert!(max_abs(&(&u - pauli::hadamard())) < 1e-15);
        assert!(max_abs(&(u.adjoint() * pauli::x() * &u - pauli::z())) < 1e-15);
        let pair = GraphModel::path(2, 1.0, 1.0).unwrap();
        let u = graph_unitary(&pair).unwrap();
        let xz = pauli::x().kronecker(&pauli::z());
        assert!(max_abs(&(u.adjoint() * xz * &u - pauli::z().kronecker(&identity(2)))) < 1e-14);
        for g in [GraphModel::path(5, 1.0, 1.0).unwrap(), GraphModel::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)], 1.0, 1.0).unwrap()] {
            let u = graph_unitary(&g).unwrap();
            assert!(max_abs(&(u.adjoint() * &u - identity(u.nrows()))) < 1e-12);
            assert!(stabilizer_conjugation_residual(&g).unwrap() < 1e-12);
        }
        let a = GraphModel::new(3, &[(0, 1), (1, 2), (0, 2)], 1.0, 1.0).unwrap();
        let b = GraphModel::new(3, &[(0, 2), (1, 2), (0, 1)], 1.0, 1.0).unwrap();
        assert_eq!(graph_unitary(&a).unwrap(), graph_unitary(&b).unwrap());
    }

    #[test]
    fn graph_davies_matches_direct() {
        for g in [GraphModel::path(2, 1.0, 1.0).unwrap(), GraphModel::path(3, 0.6, 0.8).unwrap()] {
            assert!(graph_cross_check(&g).unwrap() < 1e-9);
        }
    }

    #[test]
    fn local_gap_and_fixed_point() {
        let beta: f64 = 1.0;
        let g = GraphModel::path(2, beta, 1.0).unwrap();
        let p = graph_davies(&g).unwrap();
        assert_abs_diff_eq!(p.gap(), (g.g2 + g.g_minus2()) / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.factors[0].fixed_point.inverse_norm(), (2.0 * beta).exp() + 1.0, epsilon = 1e-10);
        let a = analyze(&p.assembled).unwrap();
        assert!(a.fixed_point.trace_distance(p.fixed_point.matrix()) < 1e-9);
        assert!(check_detailed_balance(&p.assembled, &p.fixed_point, 4, 1).exact < 1e-10);
    }

    #[test]
    fn graph_bound_examples() {
        let r = bound_graph_lsi(&GraphModel::path(3, 1.0, 1.0).unwrap()).unwrap();
        assert_abs_diff_eq!(r.value, (1.0 + (-2f64).exp()) / (2.0 * (1f64 + 2f64.exp()).ln() + 28.0), epsilon = 1e-15);
        assert_abs_diff_eq!(r.value, 0.03520, epsilon = 1e-5);
        let n1 = bound_graph_lsi(&GraphModel::path(1, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!(n1.value, r.value);
    }

    #[test]
    fn prep_time_examples() {
        let p = prep_time(4, 0.1, 1.0).unwrap();
        assert_abs_diff_eq!(p.beta_required, 160f64.ln() / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.t_epsilon, 49.205, epsilon = 1e-3);
        let big = prep_time(16, 0.1, 1.0).unwrap();
        let ratio = big.t_epsilon / p.t_epsilon;
        let log_sq = |n: f64| (4.0 * n / 0.1f64).ln().powi(2);
        assert!((ratio / (log_sq(16.0) / log_sq(4.0)) - 1.0).abs() < 0.15, "ratio {ratio}");
        assert!(matches!(prep_time(4, 0.0, 1.0), Err(Error::InvalidEpsilon { .. })));
        assert!(matches!(prep_time(4, 1.0, 1.0), Err(Error::InvalidEpsilon { .. })));
    }

    #[test]
    fn gibbs_overlap_formula() {
        for n in 1..=3 {
            for beta in [0.3, 1.0, 2.0] {
                let p = graph_davies(&GraphModel::path(n, beta, 1.0).unwrap()).unwrap();
                let direct = p.fixed_point.trace_distance(&target_state(n));
                assert_abs_diff_eq!(direct, gibbs_target_distance(n, beta), epsilon = 1e-12);
            }
        }
    }
}
