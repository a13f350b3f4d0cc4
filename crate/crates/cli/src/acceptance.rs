//! Acceptance criteria 1–10. Each check builds its own models and compares
//! library output against closed forms written out independently here.

use std::fmt;

use lsq_core::bounds::{
    block_norm_bound, bound_fermion_lsi, bound_general, bound_graph_lsi_rates, bound_interpolation, bound_interpolation_q4,
    estimate_lsi, hypercontractive_exponent, norm_derivative_at_zero, verify_hypercontractivity, BoundReport, LsiOptions,
};
use lsq_core::davies::{build_davies, BathSpectralDensity, DaviesModel};
use lsq_core::fermion::{
    canonical_from_modes, canonicalize, fermion_block_norm_check, fermion_q_bound_check, mode_basis, verify_block_structure,
    CanonicalFermionGenerator, CanonicalMode, FermionModel,
};
use lsq_core::graph::{graph_davies, graph_davies_direct, graph_hamiltonian, graph_unitary, prep_time, GraphModel};
use lsq_core::lindblad::{analyze, check_detailed_balance, evolve, mixing_bound_lsi, SemigroupAnalysis};
use lsq_core::operator::{c, cr, identity, max_abs, vectorize, CMatrix, HermitianOperator};
use lsq_core::product::{build_product, check_block_norms, q_form_product_check, thermal_qubit, ProductLiouvillian};
use lsq_core::weighted::AscentOptions;
use lsq_core::{random, FullRankState, Superoperator, WeightedContext};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20240917;

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2} {status}: {} ({})", self.id, self.name, self.detail)
    }
}

/// Collects failures while a criterion runs.
struct Check {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Self { failures: Vec::new(), notes: Vec::new() }
    }

    fn expect(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn ok<T>(&mut self, r: lsq_core::Result<T>, what: &str) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.failures.push(format!("{what}: {e}"));
                None
            }
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn finish(self, id: u8, name: &'static str) -> CriterionResult {
        let passed = self.failures.is_empty();
        let detail = if passed { self.notes.join("; ") } else { self.failures.join("; ") };
        CriterionResult { id, name, passed, detail }
    }
}

fn flat(beta: f64) -> BathSpectralDensity {
    BathSpectralDensity::flat(beta, 1.0).expect("valid bath")
}

fn two_mode_fermion() -> lsq_core::Result<CanonicalFermionGenerator> {
    let couplings = vec![vec![c(1.0, 0.2), c(0.4, -0.3)], vec![c(0.1, 0.8), c(-0.5, 0.6)]];
    canonicalize(&FermionModel::new(vec![0.0, 1.5], couplings, flat(1.0))?)
}

fn single_mode_fermion(nu: f64, beta: f64) -> lsq_core::Result<CanonicalFermionGenerator> {
    canonicalize(&FermionModel::new(vec![nu], vec![vec![cr(1.0)]], flat(beta))?)
}

fn product_of(n: usize, beta: f64) -> lsq_core::Result<ProductLiouvillian> {
    build_product((0..n).map(|_| thermal_qubit(beta, 1.0)).collect::<lsq_core::Result<Vec<_>>>()?)
}

/// Davies-built generator together with the Gibbs state it must preserve.
struct Case {
    name: String,
    generator: Superoperator,
    gibbs: FullRankState,
    lower: Option<BoundReport>,
}

fn catalog(ck: &mut Check) -> Vec<Case> {
    let mut out = Vec::new();
    for beta in [0.5, 1.0, 2.0] {
        if let Some(a) = ck.ok(thermal_qubit(beta, 1.0), "qubit thermal") {
            let lower = bound_general(a.gap, &a.fixed_point).ok();
            out.push(Case { name: format!("qubit beta={beta}"), gibbs: a.fixed_point.clone(), generator: a.generator, lower });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let h = random::hermitian(3, &mut rng);
    let s = random::hermitian(3, &mut rng);
    if let Some(model) = ck.ok(DaviesModel::new(h, vec![s], flat(0.8)), "qutrit model") {
        if let (Some(a), Some(g)) = (ck.ok(build_davies(&model), "qutrit davies"), ck.ok(model.gibbs(), "qutrit gibbs")) {
            let lower = bound_general(a.gap, &a.fixed_point).ok();
            out.push(Case { name: "qutrit".into(), generator: a.generator, gibbs: g, lower });
        }
    }
    for n in 1..=3 {
        if let Some(p) = ck.ok(product_of(n, 1.0), "product") {
            let lower = p.lsi_bound().ok();
            out.push(Case { name: format!("product K={n}"), generator: p.assembled, gibbs: p.fixed_point, lower });
        }
    }
    for n in 1..=3 {
        let Some(g) = ck.ok(GraphModel::path(n, 1.0, 1.0), "graph") else { continue };
        if let Some(p) = ck.ok(graph_davies(&g), "graph davies") {
            let lower = lsq_core::graph::bound_graph_lsi(&g).ok();
            out.push(Case { name: format!("graph N={n}"), generator: p.assembled, gibbs: p.fixed_point, lower: lower.clone() });
            let direct = ck.ok(graph_davies_direct(&g), "graph direct");
            let gibbs = graph_hamiltonian(&g).and_then(|h| Ok(FullRankState::gibbs(&h.scaled(-1.0), g.beta)?));
            if let (Some(direct), Some(gibbs)) = (direct, ck.ok(gibbs, "graph gibbs")) {
                out.push(Case { name: format!("graph direct N={n}"), generator: direct, gibbs, lower });
            }
        }
    }
    for (name, g) in [("fermion N=1", single_mode_fermion(2.0, 1.0)), ("fermion N=2", two_mode_fermion())] {
        if let Some(g) = ck.ok(g, name) {
            let lower = g.lsi_bound().ok();
            out.push(Case { name: name.into(), generator: g.generator, gibbs: g.gibbs, lower });
        }
    }
    out
}

pub fn criterion_1() -> CriterionResult {
    let mut ck = Check::new();
    let cases = catalog(&mut ck);
    let (mut worst_db, mut worst_stat) = (0.0f64, 0.0f64);
    for case in &cases {
        let db = check_detailed_balance(&case.generator, &case.gibbs, 0, SEED).exact;
        let stat = (case.generator.matrix().adjoint() * vectorize(case.gibbs.matrix())).norm();
        ck.expect(db <= 1e-10, format!("{}: detailed balance {db:e}", case.name));
        ck.expect(stat <= 1e-9, format!("{}: stationarity {stat:e}", case.name));
        worst_db = worst_db.max(db);
        worst_stat = worst_stat.max(stat);
    }
    ck.note(format!("{} generators, max db {worst_db:.1e}, max stationarity {worst_stat:.1e}", cases.len()));
    ck.finish(1, "detailed balance")
}

pub fn criterion_2() -> CriterionResult {
    let mut ck = Check::new();
    let mode = |nu: f64, lambda: f64, lambda_prime: f64| CanonicalMode { nu, lambda, lambda_prime };
    let models = vec![
        ("N=1 nu=2", canonical_from_modes(vec![mode(2.0, 1.0, 1.0)], 1.0)),
        ("N=1 zero mode", canonical_from_modes(vec![mode(0.0, 0.3, 0.7)], 1.0)),
        ("N=2 nu=(2,0.5)", canonical_from_modes(vec![mode(0.5, 0.8, 0.8), mode(2.0, 1.0, 1.0)], 0.7)),
        ("N=2 zero pair", canonical_from_modes(vec![mode(0.0, 0.2, 0.9), mode(0.0, 0.5, 0.5)], 1.3)),
        ("N=2 coupled", two_mode_fermion()),
    ];
    let mut strings = 0;
    let mut worst = 0.0f64;
    for (name, g) in models {
        let Some(g) = ck.ok(g, name) else { continue };
        let Some(basis) = ck.ok(mode_basis(&g), name) else { continue };
        if let Some(reports) = ck.ok(verify_block_structure(&g, &basis), name) {
            ck.expect(reports.len() == 1 << (2 * g.n_modes()), format!("{name}: incomplete string set"));
            strings += reports.len();
            worst = reports.iter().map(|r| r.residual).fold(worst, f64::max);
        }
    }
    // μ(1,0) at ν = 2, λ = 1, β = 1
    if let Some(g) = ck.ok(canonical_from_modes(vec![mode(2.0, 1.0, 1.0)], 1.0), "example") {
        let oracle = -(1.0 + (-2.0f64).exp()) / 2.0;
        ck.expect((g.mu(&[1, 0]) - oracle).abs() < 1e-14, "mu(1,0) example");
    }
    // zero mode: ℒ(w₁) = −λ w₁
    if let Some(g) = ck.ok(canonical_from_modes(vec![mode(0.0, 0.3, 0.7)], 1.0), "zero mode") {
        let w1 = &g.majoranas[0];
        ck.expect(max_abs(&(g.generator.apply(w1) + w1.scale(0.3))) < 1e-12, "L(w1) = -0.3 w1");
    }
    ck.note(format!("{strings} strings, max residual {worst:.1e}"));
    ck.finish(2, "fermion eigen-operators")
}

pub fn criterion_3() -> CriterionResult {
    let mut ck = Check::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let lambda = rng.random_range(1e-3..10.0);
        let t = rng.random_range(0.0..10.0);
        let m = rng.random_range(1.0..100.0);
        let (Some(a), Some(b)) = (ck.ok(bound_interpolation(lambda, 4.0, t, m), "eq11"), ck.ok(bound_interpolation_q4(lambda, t, m), "eq29")) else {
            break;
        };
        worst = worst.max((a.value - b.value).abs() / b.value);
    }
    ck.expect(worst <= 4.0 * f64::EPSILON, format!("q=4 specialization differs by {worst:e}"));
    for d in 2..=8 {
        let sigma = random::full_rank_state(d, &mut rng);
        let lambda = rng.random_range(0.01..5.0);
        if let (Some(g), Some(i)) = (
            ck.ok(bound_general(lambda, &sigma), "general"),
            ck.ok(bound_interpolation(lambda, 4.0, 0.0, sigma.inverse_norm().powf(0.25)), "interp"),
        ) {
            ck.expect((g.value - i.value).abs() <= 1e-14 * g.value, "general bound vs interpolation at t=0");
        }
    }
    let e2 = (-2.0f64).exp();
    let eq76_oracle = (1.0 + e2) / (2.0 * (2.0f64.exp() + 1.0).ln() + 28.0);
    if let Some(r) = ck.ok(bound_graph_lsi_rates(1.0, 1.0, e2), "eq76") {
        ck.expect((r.value - eq76_oracle).abs() <= 1e-9, "eq76 vs oracle");
        ck.expect((r.value - 0.03520).abs() <= 5e-6, format!("eq76 = {} not ~0.03520", r.value));
        ck.note(format!("eq76 = {:.6}", r.value));
    }
    if let Some(r) = ck.ok(bound_fermion_lsi(0.5, 2.0, 1.0), "eq137") {
        ck.expect((r.value - 0.03125).abs() <= 1e-9, format!("eq137 = {}", r.value));
    }
    ck.note(format!("1000 samples, max rel diff {worst:.1e}"));
    ck.finish(3, "bound arithmetic")
}

fn bracket(ck: &mut Check, name: &str, a: &SemigroupAnalysis, lower: Option<BoundReport>, seed: u64) -> Option<f64> {
    let lower = lower?;
    let opts = LsiOptions { seed, ..LsiOptions::default() };
    let est = ck.ok(estimate_lsi(&a.context(), &a.generator, &opts), name)?;
    let slack = 1e-6;
    ck.expect(
        lower.value <= est.alpha_upper + slack && est.alpha_upper <= a.gap + slack,
        format!("{name}: {} <= {} <= {} fails", lower.value, est.alpha_upper, a.gap),
    );
    ck.note(format!("{name} [{:.4}, {:.4}, {:.4}]", lower.value, est.alpha_upper, a.gap));
    Some(est.alpha_upper)
}

pub fn criterion_4() -> CriterionResult {
    let mut ck = Check::new();
    for beta in [0.5, 1.0, 2.0] {
        if let Some(a) = ck.ok(thermal_qubit(beta, 1.0), "qubit") {
            let lower = bound_general(a.gap, &a.fixed_point).ok();
            bracket(&mut ck, &format!("qubit b={beta}"), &a, lower, SEED);
        }
    }
    if let Some(p) = ck.ok(product_of(2, 1.0), "product") {
        if let Some(a) = ck.ok(analyze(&p.assembled), "product analysis") {
            bracket(&mut ck, "product K=2", &a, p.lsi_bound().ok(), SEED);
        }
    }
    if let Some(g) = ck.ok(GraphModel::path(2, 1.0, 1.0), "graph") {
        if let Some(a) = ck.ok(graph_davies(&g).and_then(|p| analyze(&p.assembled)), "graph analysis") {
            bracket(&mut ck, "graph N=2", &a, lsq_core::graph::bound_graph_lsi(&g).ok(), SEED);
        }
    }
    if let Some(g) = ck.ok(single_mode_fermion(2.0, 1.0), "fermion") {
        if let Some(a) = ck.ok(analyze(&g.generator), "fermion analysis") {
            bracket(&mut ck, "fermion N=1", &a, g.lsi_bound().ok(), SEED);
        }
    }
    ck.finish(4, "bracket closure")
}

pub fn criterion_5() -> CriterionResult {
    let mut ck = Check::new();
    let cases = catalog(&mut ck);
    let times = [0.1, 0.5, 1.0, 5.0];
    let mut worst = 0.0f64;
    let mut checked = 0;
    for case in cases.iter().filter(|c| c.gibbs.dim() <= 8) {
        let Some(lower) = &case.lower else {
            ck.expect(false, format!("{}: no certified lower bound", case.name));
            continue;
        };
        let ctx = WeightedContext::new(case.gibbs.clone());
        if let Some(rep) = ck.ok(verify_hypercontractivity(&ctx, &case.generator, lower.value, &times, 200, SEED), &case.name) {
            ck.expect(rep.skipped_times.is_empty(), format!("{}: skipped times {:?}", case.name, rep.skipped_times));
            ck.expect(rep.max_violation <= 1e-9, format!("{}: violation {:e}", case.name, rep.max_violation));
            worst = worst.max(rep.max_violation);
            checked += 1;
        }
    }
    ck.note(format!("{checked} models x 4 times x 200 samples, max violation {worst:.1e}"));
    ck.finish(5, "hypercontractivity")
}

/// Numerically maximized ‖T_t‖_{2→4} at t = log(2C)/Λ against M₄ = 2.
fn lemma7(ck: &mut Check, name: &str, a: &SemigroupAnalysis, c_const: f64, big_lambda: f64) {
    let t = (2.0 * c_const).ln() / big_lambda;
    let Some(m4) = ck.ok(block_norm_bound(c_const, big_lambda, t), name) else { return };
    ck.expect((m4 - 2.0).abs() < 1e-12, format!("{name}: M4 = {m4}"));
    let opts = AscentOptions { seed: SEED, ..AscentOptions::default() };
    if let Some(nb) = ck.ok(a.context().norm_2_to_q(&a.evolve(t), 4.0, &opts), name) {
        ck.expect(nb.lower <= 2.0 + 1e-6, format!("{name}: 2->4 norm {} above 2", nb.lower));
        ck.note(format!("{name}: t={t:.3}, 2->4 norm {:.6}", nb.lower));
    }
}

pub fn criterion_6() -> CriterionResult {
    let mut ck = Check::new();
    if let Some(p) = ck.ok(product_of(2, 1.0), "product") {
        if let Some(ratios) = ck.ok(check_block_norms(&p, 500, SEED), "product blocks") {
            ck.note(format!("product ratios {:?}", ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>()));
        }
        if let Some(a) = ck.ok(analyze(&p.assembled), "product analysis") {
            lemma7(&mut ck, "product", &a, p.block_constant(), p.gap());
        }
    }
    if let Some(g) = ck.ok(two_mode_fermion(), "fermion") {
        if let Some(basis) = ck.ok(mode_basis(&g), "fermion basis") {
            for n in 0..=4 {
                ck.ok(fermion_block_norm_check(&g, &basis, n, 500, SEED + n as u64), &format!("fermion block {n}"));
            }
        }
        if let Some(a) = ck.ok(analyze(&g.generator), "fermion analysis") {
            lemma7(&mut ck, "fermion", &a, g.block_constant(), g.big_lambda());
        }
    }
    ck.finish(6, "block norm bounds")
}

pub fn criterion_7() -> CriterionResult {
    let mut ck = Check::new();
    let (beta, nu) = (1.0, 2.0);
    if let Some(g) = ck.ok(single_mode_fermion(nu, beta), "single mode") {
        if let Some(basis) = ck.ok(mode_basis(&g), "basis") {
            let f = &basis.get(&[1, 1]).expect("string exists").operator;
            let q = g.context().q_form(f, f, f, f).value;
            let x: f64 = beta * nu / 2.0;
            let oracle = (3.0 * x).cosh() / x.cosh();
            ck.expect((q.re - oracle).abs() <= 1e-10 && q.im.abs() <= 1e-10, format!("Q = {q} vs {oracle}"));
            ck.note(format!("cosh ratio {oracle:.10}"));
        }
    }
    let mut tuples = 0;
    for (name, g) in [("N=1", single_mode_fermion(0.8, 1.5)), ("N=2", two_mode_fermion())] {
        let Some(g) = ck.ok(g, name) else { continue };
        let Some(basis) = ck.ok(mode_basis(&g), name) else { continue };
        for n in 1..=2 {
            if let Some(r) = ck.ok(fermion_q_bound_check(&g, &basis, n), name) {
                tuples += r.tuples;
            }
        }
    }
    if let Some(p) = ck.ok(product_of(2, 1.0), "product") {
        if let Some(r) = ck.ok(q_form_product_check(&p, 1), "product q") {
            ck.expect(r.max_uncovered <= 1e-12, format!("product uncovered Q = {:e}", r.max_uncovered));
        }
    }
    ck.note(format!("{tuples} fermion tuples"));
    ck.finish(7, "Q-form")
}

pub fn criterion_8() -> CriterionResult {
    let mut ck = Check::new();
    let n = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    if let Some(g) = ck.ok(GraphModel::path(n, 1.0, 1.0), "graph") {
        let alpha = lsq_core::graph::bound_graph_lsi(&g).map(|r| r.value);
        if let (Some(p), Some(alpha)) = (ck.ok(graph_davies(&g), "graph davies"), ck.ok(alpha, "eq76")) {
            if let Some(a) = ck.ok(analyze(&p.assembled), "analysis") {
                let times: Vec<f64> = (0..=80).map(|i| 0.5 * i as f64).collect();
                let mut starts = vec![crate::experiment::far_initial_state(&p.fixed_point)];
                starts.extend((0..3).map(|_| random_pure(8, &mut rng)));
                let mut margin = f64::INFINITY;
                for rho0 in &starts {
                    if let Some(curve) = ck.ok(a.decay_curve(rho0, &times), "decay") {
                        for (&t, &d) in times.iter().zip(&curve) {
                            margin = margin.min(mixing_bound_lsi(&p.fixed_point, alpha, t) - d);
                        }
                    }
                }
                ck.expect(margin >= 0.0, format!("decay exceeds bound by {:e}", -margin));
                ck.note(format!("min bound margin {margin:.3e}"));
            }
        }
    }
    let eps = 0.1;
    if let Some(pt) = ck.ok(prep_time(n, eps, 1.0), "prep time") {
        ck.expect((pt.beta_required - (4.0 * n as f64 / eps).ln() / 2.0).abs() < 1e-14, "beta requirement");
        if let Some(g) = ck.ok(GraphModel::path(n, pt.beta_required, 1.0), "cold graph") {
            let (u, direct) = (ck.ok(graph_unitary(&g), "unitary"), ck.ok(graph_davies_direct(&g), "direct"));
            if let (Some(u), Some(direct)) = (u, direct) {
                let mut zero = CMatrix::zeros(8, 8);
                zero[(0, 0)] = cr(1.0);
                let target = &u * zero * u.adjoint();
                let tt = evolve(&direct, pt.t_epsilon).adjoint();
                let mut starts = vec![identity(8).unscale(8.0)];
                let mut ones = CMatrix::zeros(8, 8);
                ones[(7, 7)] = cr(1.0);
                starts.push(&u * ones * u.adjoint());
                starts.extend((0..3).map(|_| random_pure(8, &mut rng)));
                let mut worst = 0.0f64;
                for rho0 in &starts {
                    let rho_t = tt.apply(rho0);
                    worst = worst.max(HermitianOperator::from_hermitian_part(&(rho_t - &target)).trace_norm());
                }
                ck.expect(worst <= eps, format!("prepared state at distance {worst}"));
                ck.note(format!("t_eps = {:.3}, distance {worst:.3e}", pt.t_epsilon));
            }
        }
    }
    ck.finish(8, "mixing and preparation")
}

fn random_pure(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let u = random::unitary(d, rng);
    let v = u.column(0).into_owned();
    &v * v.adjoint()
}

pub fn criterion_9() -> CriterionResult {
    let mut ck = Check::new();
    let Some(a) = ck.ok(thermal_qubit(1.0, 1.0), "qubit") else { return ck.finish(9, "derivative identity") };
    let Some(lower) = ck.ok(bound_general(a.gap, &a.fixed_point), "alpha") else { return ck.finish(9, "derivative identity") };
    let alpha = lower.value;
    let ctx = a.context();
    let h = 1e-5;
    let (tp, tm) = (a.evolve(h), a.evolve(-h));
    let (pp, pm) = (hypercontractive_exponent(alpha, h), hypercontractive_exponent(alpha, -h));
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let f = random::psd(2, &mut rng);
        let plus = ctx.lp_norm(tp.apply(f.matrix()), pp);
        let minus = ctx.lp_norm(tm.apply(f.matrix()), pm);
        let analytic = norm_derivative_at_zero(&ctx, &a.generator, &f, alpha);
        if let (Some(plus), Some(minus), Some(analytic)) = (ck.ok(plus, "norm"), ck.ok(minus, "norm"), ck.ok(analytic, "derivative")) {
            let fd = (plus - minus) / (2.0 * h);
            let rel = (fd - analytic).abs() / analytic.abs();
            worst = worst.max(rel);
        }
    }
    ck.expect(worst <= 1e-4, format!("relative error {worst:e}"));
    ck.note(format!("50 samples, max relative error {worst:.1e}"));
    ck.finish(9, "derivative identity")
}

pub fn criterion_10() -> CriterionResult {
    let mut ck = Check::new();
    let mut values = Vec::new();
    let mut two = None;
    for n in 1..=3 {
        if let Some(p) = ck.ok(product_of(n, 1.0), "product") {
            if let Some(r) = ck.ok(p.lsi_bound(), "eq38") {
                values.push((r.value.to_bits(), r.inputs.clone()));
            }
            if n == 2 {
                two = Some(p);
            }
        }
    }
    ck.expect(values.len() == 3 && values.windows(2).all(|w| w[0] == w[1]), "product bound varies with N");
    if let (Some(p), Some((bits, _))) = (two, values.first()) {
        let lower = f64::from_bits(*bits);
        if let Some(a) = ck.ok(analyze(&p.assembled), "analysis") {
            let opts = LsiOptions { seed: SEED, ..LsiOptions::default() };
            if let Some(est) = ck.ok(estimate_lsi(&a.context(), &a.generator, &opts), "estimate") {
                ck.expect(est.alpha_upper >= lower - 1e-6, format!("alpha_hat {} below {lower}", est.alpha_upper));
                ck.note(format!("bound {lower:.6} constant over N=1..3, alpha_hat(N=2) {:.6}", est.alpha_upper));
            }
        }
    }
    ck.finish(10, "N-independence")
}

pub fn run_all() -> Vec<CriterionResult> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
    ]
}
