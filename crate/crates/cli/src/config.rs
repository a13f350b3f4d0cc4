//! Experiment configuration: one TOML file, strict schema per model kind.

use std::fmt;
use std::path::{Path, PathBuf};

use lsq_core::operator::c;
use lsq_core::CMatrix;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Lindblad,
    Davies,
    Graphstate,
    Fermion,
    Product,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Kind::Lindblad => "lindblad",
            Kind::Davies => "davies",
            Kind::Graphstate => "graphstate",
            Kind::Fermion => "fermion",
            Kind::Product => "product",
        };
        f.write_str(s)
    }
}

/// Dense complex matrix as two row-major real arrays; `im` may be omitted.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixSpec {
    pub fn to_matrix(&self) -> Result<CMatrix, CliError> {
        let d = self.re.len();
        if d == 0 || self.re.iter().any(|r| r.len() != d) {
            return Err(CliError::Config("matrix `re` must be square and non-empty".into()));
        }
        if let Some(im) = &self.im {
            if im.len() != d || im.iter().any(|r| r.len() != d) {
                return Err(CliError::Config("matrix `im` must match the shape of `re`".into()));
            }
        }
        Ok(CMatrix::from_fn(d, d, |i, j| c(self.re[i][j], self.im.as_ref().map_or(0.0, |m| m[i][j]))))
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladConfig {
    #[serde(default)]
    pub hamiltonian: Option<MatrixSpec>,
    pub jumps: Vec<MatrixSpec>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DaviesConfig {
    pub hamiltonian: MatrixSpec,
    pub couplings: Vec<MatrixSpec>,
    pub beta: f64,
    #[serde(default = "one")]
    pub gamma0: f64,
    #[serde(default)]
    pub bohr_tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GraphstateConfig {
    pub vertices: usize,
    /// Omitted together with `edge_file` means the path graph.
    #[serde(default)]
    pub edges: Option<Vec<[usize; 2]>>,
    #[serde(default)]
    pub edge_file: Option<PathBuf>,
    pub beta: f64,
    #[serde(default = "one")]
    pub g2: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FermionConfig {
    pub frequencies: Vec<f64>,
    /// One row per coupling, entries `[re, im]` per mode.
    pub couplings: Vec<Vec<[f64; 2]>>,
    pub beta: f64,
    #[serde(default = "one")]
    pub gamma0: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProductConfig {
    pub sites: usize,
    pub beta: f64,
    #[serde(default = "one")]
    pub g2: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Lindblad(LindbladConfig),
    Davies(DaviesConfig),
    Graphstate(GraphstateConfig),
    Fermion(FermionConfig),
    Product(ProductConfig),
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisFlags {
    pub estimate_lsi: bool,
    pub verify_hc: bool,
    pub bounds: bool,
    /// Emit the time series instead of the one-row summary.
    pub decay: bool,
    pub prep_time: bool,
    pub times: Vec<f64>,
    pub restarts: usize,
    pub hc_samples: usize,
    pub epsilon: f64,
}

impl Default for AnalysisFlags {
    fn default() -> Self {
        Self {
            estimate_lsi: false,
            verify_hc: false,
            bounds: true,
            decay: false,
            prep_time: false,
            times: (0..=20).map(|i| 0.5 * i as f64).collect(),
            restarts: 32,
            hc_samples: 200,
            epsilon: 0.1,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kind: Kind,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    output: Option<PathBuf>,
    model: toml::Table,
    #[serde(default)]
    analysis: AnalysisFlags,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub model: ModelSpec,
    pub analysis: AnalysisFlags,
    /// The `[model]` table as parsed, kept for echoing and sweeps.
    pub model_table: toml::Table,
    /// Directory that relative paths inside the config resolve against.
    pub base_dir: Option<PathBuf>,
}

fn model_from_table(kind: Kind, table: &toml::Table) -> Result<ModelSpec, CliError> {
    let value = toml::Value::Table(table.clone());
    let err = |e: toml::de::Error| CliError::Config(format!("[model] for kind `{kind}`: {}", e.message()));
    Ok(match kind {
        Kind::Lindblad => ModelSpec::Lindblad(value.try_into().map_err(err)?),
        Kind::Davies => ModelSpec::Davies(value.try_into().map_err(err)?),
        Kind::Graphstate => ModelSpec::Graphstate(value.try_into().map_err(err)?),
        Kind::Fermion => ModelSpec::Fermion(value.try_into().map_err(err)?),
        Kind::Product => ModelSpec::Product(value.try_into().map_err(err)?),
    })
}

fn finite_positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("`{name}` must be positive and finite, got {v}")))
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))?;
        let model = model_from_table(raw.kind, &raw.model)?;
        let cfg = Self {
            kind: raw.kind,
            seed: raw.seed,
            output: raw.output,
            model,
            analysis: raw.analysis,
            model_table: raw.model,
            base_dir: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    /// Schema-level checks that do not need a model build.
    pub fn validate(&self) -> Result<(), CliError> {
        match &self.model {
            ModelSpec::Lindblad(m) => {
                if m.jumps.is_empty() {
                    return Err(CliError::Config("`jumps` must not be empty".into()));
                }
            }
            ModelSpec::Davies(m) => {
                finite_positive("beta", m.beta)?;
                finite_positive("gamma0", m.gamma0)?;
                if m.couplings.is_empty() {
                    return Err(CliError::Config("`couplings` must not be empty".into()));
                }
            }
            ModelSpec::Graphstate(m) => {
                finite_positive("beta", m.beta)?;
                finite_positive("g2", m.g2)?;
                if m.edges.is_some() && m.edge_file.is_some() {
                    return Err(CliError::Config("give either `edges` or `edge_file`, not both".into()));
                }
            }
            ModelSpec::Fermion(m) => {
                finite_positive("beta", m.beta)?;
                finite_positive("gamma0", m.gamma0)?;
            }
            ModelSpec::Product(m) => {
                finite_positive("beta", m.beta)?;
                finite_positive("g2", m.g2)?;
                if m.sites == 0 {
                    return Err(CliError::Config("`sites` must be at least 1".into()));
                }
            }
        }
        let a = &self.analysis;
        if a.times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
            return Err(CliError::Config("`times` must be finite and non-negative".into()));
        }
        if !(a.epsilon > 0.0 && a.epsilon < 1.0) {
            return Err(CliError::Config(format!("`epsilon` must lie in (0, 1), got {}", a.epsilon)));
        }
        if a.estimate_lsi && a.restarts == 0 {
            return Err(CliError::Config("`restarts` must be positive".into()));
        }
        if a.prep_time && self.kind != Kind::Graphstate {
            return Err(CliError::Config("`prep_time` applies to graphstate models only".into()));
        }
        Ok(())
    }

    /// Copy with one `[model]` key replaced; the result is re-validated, so
    /// names outside the schema are rejected.
    pub fn with_parameter(&self, name: &str, value: f64) -> Result<Self, CliError> {
        let mut table = self.model_table.clone();
        let integral = matches!(table.get(name), Some(toml::Value::Integer(_))) || matches!(name, "vertices" | "sites");
        let v = if integral {
            if value.fract() != 0.0 || value < 0.0 {
                return Err(CliError::Config(format!("parameter `{name}` takes non-negative integers, got {value}")));
            }
            toml::Value::Integer(value as i64)
        } else {
            toml::Value::Float(value)
        };
        table.insert(name.to_string(), v);
        let model = model_from_table(self.kind, &table)?;
        let cfg = Self { model, model_table: table, ..self.clone() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        match &self.base_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.to_path_buf(),
        }
    }

    pub fn echo(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": self.kind,
            "seed": self.seed,
            "model": serde_json::to_value(&self.model_table).unwrap_or(serde_json::Value::Null),
            "analysis": serde_json::to_value(&self.analysis).unwrap_or(serde_json::Value::Null),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRAPH: &str = r#"
kind = "graphstate"
seed = 3

[model]
vertices = 3
beta = 1.0

[analysis]
decay = true
"#;

    #[test]
    fn parses_graphstate() {
        let cfg = ExperimentConfig::parse(GRAPH).unwrap();
        assert_eq!(cfg.kind, Kind::Graphstate);
        assert_eq!(cfg.seed, 3);
        match &cfg.model {
            ModelSpec::Graphstate(g) => {
                assert_eq!(g.vertices, 3);
                assert_eq!(g.g2, 1.0);
                assert!(g.edges.is_none());
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(cfg.analysis.decay);
        assert_eq!(cfg.analysis.times.len(), 21);
    }

    #[test]
    fn rejects_unknown_keys() {
        let bad = GRAPH.replace("beta = 1.0", "beta = 1.0\nbeat = 2.0");
        assert!(matches!(ExperimentConfig::parse(&bad), Err(CliError::Config(_))));
        let bad = GRAPH.replace("decay = true", "decya = true");
        assert!(ExperimentConfig::parse(&bad).is_err());
        let bad = GRAPH.replace("seed = 3", "seed = 3\ncolour = 1");
        assert!(ExperimentConfig::parse(&bad).is_err());
    }

    #[test]
    fn rejects_negative_beta() {
        let bad = GRAPH.replace("beta = 1.0", "beta = -1.0");
        assert!(matches!(ExperimentConfig::parse(&bad), Err(CliError::Config(_))));
    }

    #[test]
    fn parameter_override() {
        let cfg = ExperimentConfig::parse(GRAPH).unwrap();
        let hot = cfg.with_parameter("beta", 0.5).unwrap();
        assert!(matches!(&hot.model, ModelSpec::Graphstate(g) if g.beta == 0.5));
        let bigger = cfg.with_parameter("vertices", 2.0).unwrap();
        assert!(matches!(&bigger.model, ModelSpec::Graphstate(g) if g.vertices == 2));
        assert!(cfg.with_parameter("vertices", 2.5).is_err());
        assert!(cfg.with_parameter("temperature", 1.0).is_err());
    }

    #[test]
    fn matrix_spec() {
        let m = MatrixSpec { re: vec![vec![0.0, 1.0], vec![1.0, 0.0]], im: Some(vec![vec![0.0, -1.0], vec![1.0, 0.0]]) };
        let x = m.to_matrix().unwrap();
        assert_eq!(x[(0, 1)], c(1.0, -1.0));
        let ragged = MatrixSpec { re: vec![vec![0.0, 1.0], vec![1.0]], im: None };
        assert!(ragged.to_matrix().is_err());
    }
}
