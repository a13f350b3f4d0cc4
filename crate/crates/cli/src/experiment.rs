//! Model construction from config, single runs and parameter sweeps.

use log::{info, warn};
use lsq_core::bounds::{
    bound_general, estimate_lsi, verify_hypercontractivity, BoundKind, BoundReport, LsiOptions,
};
use lsq_core::davies::{build_davies, BathSpectralDensity, DaviesModel};
use lsq_core::fermion::{canonicalize, FermionModel};
use lsq_core::graph::{bound_graph_lsi, graph_davies, parse_edge_list, prep_time, target_state, GraphModel};
use lsq_core::lindblad::{analyze, build_lindblad, mixing_bound_gap, mixing_bound_lsi, LindbladSpec, SemigroupAnalysis};
use lsq_core::operator::{c, CMatrix, HermitianOperator};
use lsq_core::product::{build_product, thermal_qubit};
use lsq_core::{FullRankState, Superoperator};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::{ExperimentConfig, GraphstateConfig, Kind, ModelSpec};
use crate::error::CliError;
use crate::table::ResultTable;

/// Largest Hilbert dimension for the full spectral analysis.
pub const ANALYSIS_DIM_CAP: usize = 16;

const HC_TIMES: [f64; 4] = [0.1, 0.5, 1.0, 5.0];
const BRACKET_SLACK: f64 = 1e-6;
const HC_TOL: f64 = 1e-9;
const DECAY_TOL: f64 = 1e-9;

pub struct BuiltModel {
    pub generator: Superoperator,
    pub sigma: FullRankState,
    pub gap: f64,
    /// Certified lower bound on α; `None` for non-reversible generators.
    pub lower: Option<BoundReport>,
    pub analysis: Option<SemigroupAnalysis>,
}

impl BuiltModel {
    fn analysis(&self) -> Result<&SemigroupAnalysis, CliError> {
        self.analysis.as_ref().ok_or_else(|| {
            CliError::Config(format!("dimension {} exceeds {ANALYSIS_DIM_CAP} for dynamical analysis", self.sigma.dim()))
        })
    }
}

pub fn lower_bound_kind(kind: Kind) -> BoundKind {
    match kind {
        Kind::Lindblad | Kind::Davies => BoundKind::GeneralLower,
        Kind::Graphstate => BoundKind::GraphLsi,
        Kind::Fermion => BoundKind::FermionLsi,
        Kind::Product => BoundKind::ProductLsi,
    }
}

/// `alpha_lower_eq76` for "Eq.76".
pub fn lower_column_name(kind: Kind) -> String {
    let tag = lower_bound_kind(kind).equation();
    format!("alpha_lower_{}", tag.replace('.', "").to_lowercase())
}

fn graph_model(cfg: &ExperimentConfig, m: &GraphstateConfig, beta: f64) -> Result<GraphModel, CliError> {
    let edges: Vec<(usize, usize)> = match (&m.edges, &m.edge_file) {
        (Some(e), _) => e.iter().map(|[u, v]| (*u, *v)).collect(),
        (None, Some(path)) => {
            let path = cfg.resolve(path);
            let text = std::fs::read_to_string(&path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            parse_edge_list(&text)?
        }
        (None, None) => (1..m.vertices).map(|j| (j - 1, j)).collect(),
    };
    Ok(GraphModel::new(m.vertices, &edges, beta, m.g2)?)
}

fn from_analysis(a: SemigroupAnalysis, lower: Option<BoundReport>) -> BuiltModel {
    BuiltModel { generator: a.generator.clone(), sigma: a.fixed_point.clone(), gap: a.gap, lower, analysis: Some(a) }
}

fn general_lower(a: &SemigroupAnalysis) -> Result<Option<BoundReport>, CliError> {
    if a.reversible {
        Ok(Some(bound_general(a.gap, &a.fixed_point)?))
    } else {
        warn!("generator is not reversible; no certified lower bound");
        Ok(None)
    }
}

pub fn build_model(cfg: &ExperimentConfig) -> Result<BuiltModel, CliError> {
    match &cfg.model {
        ModelSpec::Lindblad(m) => {
            let jumps = m.jumps.iter().map(|j| j.to_matrix()).collect::<Result<Vec<_>, _>>()?;
            let d = jumps[0].nrows();
            let hamiltonian = match &m.hamiltonian {
                Some(h) => HermitianOperator::new(h.to_matrix()?).map_err(lsq_core::Error::from)?,
                None => HermitianOperator::zeros(d),
            };
            if d > ANALYSIS_DIM_CAP {
                return Err(CliError::Config(format!("dimension {d} exceeds {ANALYSIS_DIM_CAP}")));
            }
            let l = build_lindblad(&LindbladSpec { hamiltonian, lindblad_ops: jumps })?;
            let a = analyze(&l)?;
            let lower = general_lower(&a)?;
            Ok(from_analysis(a, lower))
        }
        ModelSpec::Davies(m) => {
            let h = HermitianOperator::new(m.hamiltonian.to_matrix()?).map_err(lsq_core::Error::from)?;
            if h.dim() > ANALYSIS_DIM_CAP {
                return Err(CliError::Config(format!("dimension {} exceeds {ANALYSIS_DIM_CAP}", h.dim())));
            }
            let couplings = m
                .couplings
                .iter()
                .map(|s| Ok(HermitianOperator::new(s.to_matrix()?).map_err(lsq_core::Error::from)?))
                .collect::<Result<Vec<_>, CliError>>()?;
            let mut model = DaviesModel::new(h, couplings, BathSpectralDensity::flat(m.beta, m.gamma0)?)?;
            model.bohr_tolerance = m.bohr_tolerance;
            let a = build_davies(&model)?;
            let lower = general_lower(&a)?;
            Ok(from_analysis(a, lower))
        }
        ModelSpec::Graphstate(m) => {
            let g = graph_model(cfg, m, m.beta)?;
            let p = graph_davies(&g)?;
            let lower = Some(bound_graph_lsi(&g)?);
            Ok(from_analysis(analyze(&p.assembled)?, lower))
        }
        ModelSpec::Fermion(m) => {
            let couplings = m.couplings.iter().map(|row| row.iter().map(|[re, im]| c(*re, *im)).collect()).collect();
            let model = FermionModel::new(m.frequencies.clone(), couplings, BathSpectralDensity::flat(m.beta, m.gamma0)?)?;
            let g = canonicalize(&model)?;
            if !g.primitive {
                return Err(lsq_core::Error::NotPrimitive { kernel_dim: 0, min_eigenvalue: 0.0 }.into());
            }
            let lower = Some(g.lsi_bound()?);
            Ok(from_analysis(analyze(&g.generator)?, lower))
        }
        ModelSpec::Product(m) => {
            let factors = (0..m.sites).map(|_| thermal_qubit(m.beta, m.g2)).collect::<lsq_core::Result<Vec<_>>>()?;
            let p = build_product(factors)?;
            let lower = Some(p.lsi_bound()?);
            let analysis = if p.dim() <= ANALYSIS_DIM_CAP { Some(analyze(&p.assembled)?) } else { None };
            Ok(BuiltModel { generator: p.assembled.clone(), sigma: p.fixed_point.clone(), gap: p.gap(), lower, analysis })
        }
    }
}

/// Pure state on the least populated eigenvector of σ.
pub fn far_initial_state(sigma: &FullRankState) -> CMatrix {
    let spec = sigma.spectral();
    let (idx, _) = spec
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty spectrum");
    let v = spec.eigenvectors.column(idx).into_owned();
    &v * v.adjoint()
}

fn report_inputs(r: &BoundReport) -> Value {
    let mut m: Map<String, Value> = r.inputs.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    m.insert("equation".into(), json!(r.equation()));
    m.insert("value".into(), json!(r.value));
    m.into()
}

pub struct RunOutput {
    pub table: ResultTable,
    /// Hard-invariant failures; non-empty means exit code 3.
    pub violations: Vec<String>,
}

/// Summary columns for a kind and set of flags, in output order.
pub fn summary_columns(cfg: &ExperimentConfig) -> Vec<(String, Option<String>)> {
    let mut cols = vec![("gap".to_string(), None)];
    if cfg.analysis.bounds {
        cols.push((lower_column_name(cfg.kind), Some(lower_bound_kind(cfg.kind).equation().to_string())));
    }
    if cfg.analysis.estimate_lsi {
        cols.push(("alpha_upper".into(), None));
    }
    if cfg.analysis.verify_hc {
        cols.push(("hc_max_violation".into(), Some("Eq.5".into())));
    }
    if cfg.analysis.prep_time {
        cols.push(("beta_required".into(), Some("Eq.85".into())));
        cols.push(("t_epsilon".into(), Some("Eq.86".into())));
        cols.push(("prep_distance".into(), None));
    }
    cols
}

struct Summary {
    values: Vec<f64>,
    inputs: Map<String, Value>,
    violations: Vec<String>,
}

fn summarize(cfg: &ExperimentConfig, model: &BuiltModel) -> Result<Summary, CliError> {
    let a = &cfg.analysis;
    let mut values = vec![model.gap];
    let mut inputs = Map::new();
    let mut violations = Vec::new();
    let alpha_lower = model.lower.as_ref().map_or(f64::NAN, |r| r.value);
    if a.bounds {
        values.push(alpha_lower);
        if let Some(r) = &model.lower {
            inputs.insert(lower_column_name(cfg.kind), report_inputs(r));
        }
    }
    if a.estimate_lsi {
        let opts = LsiOptions { restarts: a.restarts, seed: cfg.seed, ..LsiOptions::default() };
        let est = estimate_lsi(&model.sigma_context(), &model.generator, &opts)?;
        info!("alpha bracket [{alpha_lower:.6e}, {:.6e}], gap {:.6e}", est.alpha_upper, model.gap);
        if alpha_lower > est.alpha_upper + BRACKET_SLACK || est.alpha_upper > model.gap + BRACKET_SLACK {
            violations.push(format!("bracket not closed: {alpha_lower} <= {} <= {}", est.alpha_upper, model.gap));
        }
        values.push(est.alpha_upper);
    }
    if a.verify_hc {
        let r = model.lower.as_ref().ok_or_else(|| CliError::Config("verify_hc needs a certified lower bound".into()))?;
        let rep = verify_hypercontractivity(&model.sigma_context(), &model.generator, r.value, &HC_TIMES, a.hc_samples, cfg.seed)?;
        if rep.max_violation > HC_TOL {
            violations.push(format!("hypercontractivity violated by {:e}", rep.max_violation));
        }
        values.push(rep.max_violation);
    }
    if a.prep_time {
        let ModelSpec::Graphstate(m) = &cfg.model else { unreachable!("validated") };
        let pt = prep_time(m.vertices, a.epsilon, m.g2)?;
        let cold = graph_model(cfg, m, pt.beta_required)?;
        let p = graph_davies(&cold)?;
        let cold_analysis = analyze(&p.assembled)?;
        let rho0 = far_initial_state(&p.fixed_point);
        let rho_t = cold_analysis.evolve(pt.t_epsilon).adjoint().apply(&rho0);
        let target = target_state(m.vertices);
        let dist = HermitianOperator::from_hermitian_part(&(rho_t - target)).trace_norm();
        if dist > a.epsilon {
            violations.push(format!("prepared state at distance {dist} > {}", a.epsilon));
        }
        inputs.insert("t_epsilon".into(), json!({"N": m.vertices, "epsilon": a.epsilon, "G2": m.g2}));
        values.extend([pt.beta_required, pt.t_epsilon, dist]);
    }
    Ok(Summary { values, inputs, violations })
}

impl BuiltModel {
    fn sigma_context(&self) -> lsq_core::WeightedContext {
        lsq_core::WeightedContext::new(self.sigma.clone())
    }
}

fn base_metadata(cfg: &ExperimentConfig) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("artifact_version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("kind".into(), json!(cfg.kind.to_string()));
    m.insert("seed".into(), json!(cfg.seed));
    m.insert("config".into(), cfg.echo());
    m
}

/// One experiment: the time series when `decay` is set, else a one-row summary.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let model = build_model(cfg)?;
    let summary = summarize(cfg, &model)?;
    let mut violations = summary.violations;
    let mut meta = base_metadata(cfg);

    let table = if cfg.analysis.decay {
        let analysis = model.analysis()?;
        let lower = model.lower.as_ref().ok_or_else(|| CliError::Config("decay bounds need a certified lower bound".into()))?;
        let lower_name = lower_column_name(cfg.kind);
        let tag = lower.equation();
        let mut table = ResultTable::new(&[
            ("t", None),
            ("trace_distance", None),
            ("eq9_bound", Some("Eq.9")),
            ("eq10_bound", Some("Eq.10")),
            (lower_name.as_str(), Some(tag)),
        ]);
        let rho0 = far_initial_state(&model.sigma);
        let times = &cfg.analysis.times;
        let curve = analysis.decay_curve(&rho0, times)?;
        for (&t, &td) in times.iter().zip(&curve) {
            let eq9 = mixing_bound_gap(&model.sigma, model.gap, t);
            let eq10 = mixing_bound_lsi(&model.sigma, lower.value, t);
            if td > eq10 + DECAY_TOL || td > eq9 + DECAY_TOL {
                violations.push(format!("trace distance {td} above mixing bound at t = {t}"));
            }
            table.push_row(&[t, td, eq9, eq10, lower.value]);
        }
        let inv = model.sigma.inverse_norm();
        let mut inputs = summary.inputs.clone();
        inputs.insert("eq9_bound".into(), json!({"sigma_inv_norm": inv, "gap": model.gap}));
        inputs.insert("eq10_bound".into(), json!({"sigma_inv_norm": inv, "alpha": lower.value}));
        let names: Vec<String> = summary_columns(cfg).into_iter().map(|(n, _)| n).collect();
        let summary_map: Map<String, Value> = names.into_iter().zip(summary.values.iter().map(|v| json!(v))).collect();
        meta.insert("summary".into(), summary_map.into());
        meta.insert("bound_inputs".into(), inputs.into());
        table
    } else {
        let cols = summary_columns(cfg);
        let spec: Vec<(&str, Option<&str>)> = cols.iter().map(|(n, t)| (n.as_str(), t.as_deref())).collect();
        let mut table = ResultTable::new(&spec);
        table.push_row(&summary.values);
        meta.insert("bound_inputs".into(), summary.inputs.into());
        table
    };
    meta.insert("violations".into(), json!(violations));
    let mut table = table;
    table.metadata = meta;
    Ok(RunOutput { table, violations })
}

/// One summary row per value; row i uses seed + i. Rows run in parallel.
pub fn sweep(cfg: &ExperimentConfig, parameter: &str, values: &[f64]) -> Result<RunOutput, CliError> {
    let mut base = cfg.clone();
    base.analysis.decay = false;
    // reject unknown names even when the list is empty
    if let Some(first) = values.first() {
        base.with_parameter(parameter, *first)?;
    } else if !base.model_table.contains_key(parameter) {
        base.with_parameter(parameter, 1.0)?;
    }
    let rows: Vec<Result<Summary, CliError>> = values
        .par_iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut row_cfg = base.with_parameter(parameter, v)?;
            row_cfg.seed = base.seed.wrapping_add(i as u64);
            let model = build_model(&row_cfg)?;
            summarize(&row_cfg, &model)
        })
        .collect();

    let cols = summary_columns(&base);
    let mut spec: Vec<(&str, Option<&str>)> = vec![(parameter, None)];
    spec.extend(cols.iter().map(|(n, t)| (n.as_str(), t.as_deref())));
    let mut table = ResultTable::new(&spec);
    let mut violations = Vec::new();
    let mut per_row = Vec::with_capacity(values.len());
    for (v, row) in values.iter().zip(rows) {
        let s = row?;
        let mut r = vec![*v];
        r.extend(&s.values);
        table.push_row(&r);
        violations.extend(s.violations.into_iter().map(|m| format!("{parameter} = {v}: {m}")));
        per_row.push(Value::Object(s.inputs));
    }
    let mut meta = base_metadata(&base);
    meta.insert("sweep".into(), json!({"parameter": parameter, "values": values}));
    meta.insert("bound_inputs".into(), json!(per_row));
    meta.insert("violations".into(), json!(violations));
    table.metadata = meta;
    Ok(RunOutput { table, violations })
}
