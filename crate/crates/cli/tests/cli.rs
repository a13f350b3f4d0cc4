use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lsq_cli::table::{parse_plotdata, ResultTable};
use lsq_core::bounds::{bound_fermion_lsi, bound_graph_lsi_rates};
use lsq_core::graph::{graph_davies, GraphModel};
use lsq_core::lindblad::{analyze, mixing_bound_gap, mixing_bound_lsi};

const GRAPH: &str = r#"
kind = "graphstate"
seed = 5

[model]
vertices = 3
beta = 1.0

[analysis]
decay = true
times = [0.0, 0.25, 1.0, 2.5, 6.0, 12.0]
"#;

fn lsq(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lsq"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn read_table(p: &Path) -> ResultTable {
    ResultTable::read_csv(std::fs::File::open(p).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn graphstate_decay_table_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "g.toml", GRAPH);
    let out = dir.path().join("g.csv");
    let o = lsq(&["run", "--config", s(&cfg), "--out", s(&out)], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let t = read_table(&out);
    assert_eq!(t.names(), ["t", "trace_distance", "eq9_bound", "eq10_bound", "alpha_lower_eq76"]);
    assert_eq!(t.n_rows(), 6);

    let g = GraphModel::path(3, 1.0, 1.0).unwrap();
    let p = graph_davies(&g).unwrap();
    let a = analyze(&p.assembled).unwrap();
    let alpha = bound_graph_lsi_rates(1.0, 1.0, (-2.0f64).exp()).unwrap().value;
    let times = &t.column("t").unwrap().values;
    let rho0 = lsq_cli::experiment::far_initial_state(&p.fixed_point);
    let curve = a.decay_curve(&rho0, times).unwrap();
    for (i, &time) in times.iter().enumerate() {
        assert!((t.column("trace_distance").unwrap().values[i] - curve[i]).abs() < 1e-12);
        assert!((t.column("eq9_bound").unwrap().values[i] - mixing_bound_gap(&p.fixed_point, a.gap, time)).abs() < 1e-12);
        assert!((t.column("eq10_bound").unwrap().values[i] - mixing_bound_lsi(&p.fixed_point, alpha, time)).abs() < 1e-12);
        assert!((t.column("alpha_lower_eq76").unwrap().values[i] - alpha).abs() < 1e-12);
    }

    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("g.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["equation_tags"]["alpha_lower_eq76"], "Eq.76");
    assert_eq!(meta["equation_tags"]["eq10_bound"], "Eq.10");
    assert_eq!(meta["equation_tags"]["eq9_bound"], "Eq.9");
    assert_eq!(meta["artifact_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(meta["config"]["model"]["vertices"], 3);
    // re-evaluate every bound column from its logged inputs
    let inputs = &meta["bound_inputs"];
    let eq76 = &inputs["alpha_lower_eq76"];
    let again = bound_graph_lsi_rates(eq76["beta"].as_f64().unwrap(), eq76["G2"].as_f64().unwrap(), eq76["Gm2"].as_f64().unwrap()).unwrap();
    assert!((again.value - alpha).abs() < 1e-12);
    let inv = inputs["eq10_bound"]["sigma_inv_norm"].as_f64().unwrap();
    for (i, &time) in times.iter().enumerate() {
        let eq10 = (2.0 * inv.ln()).sqrt() * (-time * inputs["eq10_bound"]["alpha"].as_f64().unwrap()).exp();
        let eq9 = inv.sqrt() * (-time * inputs["eq9_bound"]["gap"].as_f64().unwrap()).exp();
        assert!((t.column("eq10_bound").unwrap().values[i] - eq10).abs() < 1e-12);
        assert!((t.column("eq9_bound").unwrap().values[i] - eq9).abs() < 1e-12);
    }
}

#[test]
fn negative_beta_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", &GRAPH.replace("beta = 1.0", "beta = -1.0"));
    let out = dir.path().join("bad.csv");
    let o = lsq(&["run", "--config", s(&cfg), "--out", s(&out)], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    assert!(!dir.path().join("bad.csv.meta.json").exists());
}

#[test]
fn unknown_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "typo.toml", &GRAPH.replace("vertices = 3", "vertices = 3\nvertex = 4"));
    let o = lsq(&["run", "--config", s(&cfg)], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("vertex"));
}

#[test]
fn fermion_row_carries_alpha_bracket() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
kind = "fermion"
[model]
frequencies = [2.0]
couplings = [[[1.0, 0.0]]]
beta = 1.0
[analysis]
estimate_lsi = true
restarts = 8
"#;
    let cfg = write_config(dir.path(), "f.toml", text);
    let out = dir.path().join("f.csv");
    let o = lsq(&["run", "--config", s(&cfg), "--out", s(&out)], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let t = read_table(&out);
    assert_eq!(t.n_rows(), 1);
    let gap = t.column("gap").unwrap().values[0];
    let lower = t.column("alpha_lower_eq137").unwrap().values[0];
    let upper = t.column("alpha_upper").unwrap().values[0];
    let big_lambda = (1.0 + (-2.0f64).exp()) / 2.0;
    assert!((gap - big_lambda).abs() < 1e-10);
    assert!((lower - bound_fermion_lsi(big_lambda, 2.0, 1.0).unwrap().value).abs() < 1e-12);
    assert!(lower <= upper && upper <= gap + 1e-6);
}

#[test]
fn beta_sweep_on_graphstate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "g.toml", GRAPH);
    let out = dir.path().join("sweep.csv");
    let o = lsq(&["sweep", "--config", s(&cfg), "--param", "beta", "--values", "0.5,1,2", "--out", s(&out)], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let t = read_table(&out);
    assert_eq!(t.n_rows(), 3);
    assert_eq!(t.column("beta").unwrap().values, vec![0.5, 1.0, 2.0]);
    let a = &t.column("alpha_lower_eq76").unwrap().values;
    assert!(a[0] > a[1] && a[1] > a[2]);
}

#[test]
fn site_sweep_on_product_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let text = "kind = \"product\"\n[model]\nsites = 1\nbeta = 1.0\n";
    let cfg = write_config(dir.path(), "p.toml", text);
    let out = dir.path().join("p.csv");
    let o = lsq(&["sweep", "--config", s(&cfg), "--param", "sites", "--values", "1,2,3", "--out", s(&out)], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let col = read_table(&out).column("alpha_lower_eq38").unwrap().values.clone();
    assert_eq!(col.len(), 3);
    assert!(col.iter().all(|v| v.to_bits() == col[0].to_bits()));
}

#[test]
fn empty_sweep_and_unknown_parameter() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "g.toml", GRAPH);
    let out = dir.path().join("empty.csv");
    let o = lsq(&["sweep", "--config", s(&cfg), "--param", "beta", "--values", "", "--out", s(&out)], &[]);
    assert_eq!(o.status.code(), Some(0));
    let t = read_table(&out);
    assert_eq!(t.n_rows(), 0);
    assert_eq!(t.names()[0], "beta");
    let o = lsq(&["sweep", "--config", s(&cfg), "--param", "temperature", "--values", "1"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let text = "kind = \"product\"\nseed = 9\n[model]\nsites = 2\nbeta = 1.0\n[analysis]\nestimate_lsi = true\nrestarts = 8\n";
    let cfg = write_config(dir.path(), "p.toml", text);
    let a = lsq(&["run", "--config", s(&cfg)], &[]);
    let b = lsq(&["run", "--config", s(&cfg)], &[("LSQ_THREADS", "1")]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = lsq(&["run", "--config", s(&cfg), "--seed", "9"], &[]);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn plotdata_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "g.toml", GRAPH);
    let csv = dir.path().join("g.csv");
    assert_eq!(lsq(&["run", "--config", s(&cfg), "--out", s(&csv)], &[]).status.code(), Some(0));
    let dat = dir.path().join("g.dat");
    let o = lsq(&["plotdata", "--input", s(&csv), "--x", "t", "--y", "trace_distance,eq10_bound", "--out", s(&dat)], &[]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&dat).unwrap();
    assert_eq!(text.lines().next().unwrap(), "# t trace_distance eq10_bound");
    let back = parse_plotdata(&text).unwrap();
    let orig = read_table(&csv);
    for name in ["t", "trace_distance", "eq10_bound"] {
        for (x, y) in back.column(name).unwrap().values.iter().zip(&orig.column(name).unwrap().values) {
            assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0));
        }
    }
    let o = lsq(&["plotdata", "--input", s(&csv), "--x", "t", "--y", "missing"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn edge_file_and_prep_time() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("star.edges"), "# star\n0 1\n0 2\n").unwrap();
    let text = "kind = \"graphstate\"\n[model]\nvertices = 3\nedge_file = \"star.edges\"\nbeta = 1.0\n[analysis]\nprep_time = true\n";
    let cfg = write_config(dir.path(), "star.toml", text);
    let o = lsq(&["run", "--config", s(&cfg)], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let t = ResultTable::read_csv(o.stdout.as_slice()).unwrap();
    assert!(t.column("prep_distance").unwrap().values[0] <= 0.1);
    let expected_beta = (4.0f64 * 3.0 / 0.1).ln() / 2.0;
    assert!((t.column("beta_required").unwrap().values[0] - expected_beta).abs() < 1e-12);
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "toml") {
            lsq_cli::ExperimentConfig::load(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            n += 1;
        }
    }
    assert!(n >= 5);
}
