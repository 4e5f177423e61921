//! Acceptance criteria, one printed verdict per criterion. Run with
//! `cargo test --test acceptance -- --nocapture` to see the table.

use std::process::Command;
use std::time::Instant;

use qmetric_core::channel::{cptp_contraction_check, ChannelFamily, ContractionSweep};
use qmetric_core::monotone::{
    derivative_at_zero_plus, log_grid, matrix_monotonicity_witness, MonotoneFunctionSpec,
};
use qmetric_core::petz::{build_k, MetricSpec};
use qmetric_core::random::Sampler;
use qmetric_core::verify::{
    suite_action_structure, suite_commutators, suite_gradient_equals_fundamental, suite_metric_properties, SuiteConfig,
    SuiteReport,
};

const ANALYTIC_TOL: f64 = 1e-9;
const NUMERIC_TOL: f64 = 1e-6;
const SPECIAL_CASE_TOL: f64 = 1e-12;
const WITNESS_TOL: f64 = -1e-8;
const SLOPE_TOL: f64 = 1e-3;
const KILLING_TOL: f64 = 1e-10;
const CONTRACTION_TOL: f64 = -1e-8;
const FISHER_RAO_TOL: f64 = 1e-10;
const K_SQUARE_TOL: f64 = 1e-10;
const I_RELATED_TOL: f64 = 1e-12;
const INTERTWINING_TOL: f64 = 1e-12;
const ZETA_TOL: f64 = 1e-10;
const AXIOM_TOL: f64 = 1e-10;
const BRACKET_TOL: f64 = 1e-5;
const GRADIENT_BUDGET_S: f64 = 20.0;
const RUN_ALL_BUDGET_S: f64 = 60.0;

const SPECS: [&str; 5] = ["bh", "wy", "bkm", "gl:0.3", "gl:0.8"];

fn spec(s: &str) -> MonotoneFunctionSpec {
    s.parse().unwrap()
}

fn config(dims: &[usize], trials: usize) -> SuiteConfig {
    SuiteConfig { dims: dims.to_vec(), trials, ..SuiteConfig::default() }
}

/// Largest residual over cells whose check name starts with `prefix`,
/// with the number of such cells.
fn worst(report: &SuiteReport, prefix: &str) -> (f64, usize) {
    let cells: Vec<_> = report.cells.iter().filter(|c| c.check.starts_with(prefix)).collect();
    (cells.iter().map(|c| c.max_abs_residual).fold(0.0, f64::max), cells.len())
}

struct Verdicts(Vec<(String, bool)>);

impl Verdicts {
    fn record(&mut self, id: &str, ok: bool, detail: String) {
        println!("{} [{id}] {detail}", if ok { "PASS" } else { "FAIL" });
        self.0.push((id.to_string(), ok));
    }

    fn within(&mut self, id: &str, what: &str, (value, cells): (f64, usize), tol: f64) {
        self.record(id, cells > 0 && value <= tol, format!("{what}: max {value:.3e} <= {tol:e} over {cells} cells"));
    }
}

fn gradient(v: &mut Verdicts) {
    let cfg = config(&[2, 3, 4], 100);
    let started = Instant::now();
    let r = suite_gradient_equals_fundamental(&cfg).unwrap();
    let elapsed = started.elapsed().as_secs_f64();
    v.within("1", "GL gradient vs Z^phi (relative)", worst(&r, "gl-gradient"), ANALYTIC_TOL);
    v.within("1", "BKM gradient vs W^phi (relative)", worst(&r, "bkm-gradient"), ANALYTIC_TOL);
    v.within("1", "beta-kappa field vs flow", worst(&r, "beta-kappa-field"), NUMERIC_TOL);
    v.within("1", "gamma-kappa field vs flow", worst(&r, "gamma-kappa-field"), NUMERIC_TOL);
    v.record("1", elapsed < GRADIENT_BUDGET_S, format!("gradient suite time {elapsed:.2} s < {GRADIENT_BUDGET_S} s"));
}

fn special_cases(v: &mut Verdicts) {
    let grid = log_grid(1e-3, 1e3, 50);
    let bh = spec("gl:1");
    let wy = spec("gl:0.5");
    let mut worst_bh = 0.0f64;
    let mut worst_wy = 0.0f64;
    for &x in &grid {
        let want = (1.0 + x) / 2.0;
        worst_bh = worst_bh.max((bh.eval(x).unwrap() - want).abs() / want);
        let want = (x.sqrt() + 1.0).powi(2) / 4.0;
        worst_wy = worst_wy.max((wy.eval(x).unwrap() - want).abs() / want);
    }
    // Petz coefficients p_k f(p_j/p_k) at kappa = 1 are arithmetic means.
    let rho = Sampler::new(2).density(4);
    let k = build_k(&rho, &bh).unwrap();
    let p = rho.spectral().eigenvalues();
    let mut worst_coeff = 0.0f64;
    for j in 0..4 {
        for l in 0..4 {
            let want = 0.5 * (p[j] + p[l]);
            worst_coeff = worst_coeff.max((k.coeffs()[j][l] - want).abs() / want);
        }
    }
    v.record("2", worst_bh <= SPECIAL_CASE_TOL, format!("f_1 vs (1+x)/2 on 50 points: {worst_bh:.3e} <= {SPECIAL_CASE_TOL:e}"));
    v.record("2", worst_wy <= SPECIAL_CASE_TOL, format!("f_1/2 vs (sqrt x+1)^2/4 on 50 points: {worst_wy:.3e} <= {SPECIAL_CASE_TOL:e}"));
    v.record("2", worst_coeff <= SPECIAL_CASE_TOL, format!("kappa = 1 Petz coefficients vs (p_j+p_k)/2: {worst_coeff:.3e}"));
}

fn monotonicity_boundary(v: &mut Verdicts) {
    for kappa in [1.1, 1.25, 1.5, 2.0] {
        let w = matrix_monotonicity_witness(&MonotoneFunctionSpec::gl(kappa).unwrap(), 2, 2000, 1).unwrap();
        let ok = w.as_ref().is_some_and(|w| w.min_eigenvalue < WITNESS_TOL);
        let detail = match &w {
            Some(w) => format!("kappa {kappa}: witness at trial {}, lambda_min {:.3e} < {WITNESS_TOL:e}", w.trial, w.min_eigenvalue),
            None => format!("kappa {kappa}: no witness in 2000 trials"),
        };
        v.record("3", ok, detail);
    }
    for kappa in [0.1, 0.25, 0.5, 0.75, 1.0] {
        let spec = MonotoneFunctionSpec::gl(kappa).unwrap();
        let found: Vec<usize> =
            [2, 3, 4].into_iter().filter(|&n| matrix_monotonicity_witness(&spec, n, 2000, 1).unwrap().is_some()).collect();
        v.record("3", found.is_empty(), format!("kappa {kappa}: witnesses at n in {found:?} over 2000 trials, n = 2..4"));
    }
    for kappa in [1.5, 2.0] {
        let d = derivative_at_zero_plus(&MonotoneFunctionSpec::gl(kappa).unwrap()).unwrap();
        let err = d.finite().map_or(f64::INFINITY, |x| (x + 0.5 * kappa).abs());
        v.record("3", err <= SLOPE_TOL, format!("kappa {kappa}: f'(0+) = {d:?}, |f'(0+) + kappa/2| = {err:.3e} <= {SLOPE_TOL:e}"));
    }
}

fn metric(v: &mut Verdicts, r: &SuiteReport) {
    v.within("4", "Killing property, 100 unitaries x 5 specs x n = 2..4", worst(r, "killing"), KILLING_TOL);

    let monotone = ["bh", "wy", "bkm", "gl:0.1", "gl:0.25", "gl:0.3", "gl:0.5", "gl:0.75", "gl:0.8", "gl:1"];
    let mut min_margin = f64::INFINITY;
    let mut violations = 0;
    for s in monotone {
        for n in [2, 3] {
            let sweep = ContractionSweep::new(ChannelFamily::Random, n, 200, 5);
            let rep = cptp_contraction_check(&MetricSpec::unit(spec(s)), &sweep).unwrap();
            min_margin = min_margin.min(rep.min_margin);
            violations += rep.violations.len();
        }
    }
    v.record(
        "5",
        violations == 0 && min_margin >= CONTRACTION_TOL,
        format!("CPTP contraction, 200 channels x {} specs x n in {{2,3}}: {violations} violations, min margin {min_margin:.3e}", monotone.len()),
    );

    v.within("6", "commuting tangents vs Fisher-Rao", worst(r, "fisher-rao"), FISHER_RAO_TOL);
    v.within("7", "K(rho) = rho^2", worst(r, "k-rho-squared"), K_SQUARE_TOL);
}

fn structure(v: &mut Verdicts) {
    let r = suite_action_structure(&config(&[2, 3, 4], 50)).unwrap();
    v.within("7", "i-relatedness of Y", worst(&r, "i-relatedness-y"), I_RELATED_TOL);
    v.within("7", "i-relatedness of W", worst(&r, "i-relatedness-w"), I_RELATED_TOL);
    v.within("7", "intertwining beta = pi o beta-hat o i", worst(&r, "intertwining-beta"), INTERTWINING_TOL);
    v.within("7", "zeta conjugation", worst(&r, "zeta-conjugation"), ZETA_TOL);
    v.within("7", "action identity", worst(&r, "identity:"), AXIOM_TOL);
    v.within("7", "action composition", worst(&r, "composition:"), AXIOM_TOL);
}

fn commutators(v: &mut Verdicts) {
    let r = suite_commutators(&config(&[2, 3], 100)).unwrap();
    v.within("8", "[X_b, X_c] = X_[b,c]", worst(&r, "x-x"), BRACKET_TOL);
    v.within("8", "[X_b, grad l_c] = grad l_[b,c]", worst(&r, "x-grad"), BRACKET_TOL);
    v.within("8", "[Y_a, Y_b] = X_[b,a] on the cone", worst(&r, "yhat-yhat"), BRACKET_TOL);
}

fn determinism(v: &mut Verdicts) {
    let run = || {
        let started = Instant::now();
        let o = Command::new(env!("CARGO_BIN_EXE_qmetric")).args(["run-all", "--seed", "7"]).output().unwrap();
        (o, started.elapsed().as_secs_f64())
    };
    let (a, ta) = run();
    let (b, _) = run();
    let identical = a.status.code() == Some(0) && a.stdout == b.stdout && !a.stdout.is_empty();
    v.record("9", identical, format!("run-all --seed 7 twice: {} bytes, identical = {}", a.stdout.len(), a.stdout == b.stdout));
    v.record("9", ta < RUN_ALL_BUDGET_S, format!("run-all at defaults: {ta:.2} s < {RUN_ALL_BUDGET_S} s, exit {:?}", a.status.code()));
}

#[test]
fn acceptance() {
    let mut v = Verdicts(Vec::new());
    gradient(&mut v);
    special_cases(&mut v);
    monotonicity_boundary(&mut v);
    let metric_report = suite_metric_properties(&config(&[2, 3, 4], 100)).unwrap();
    assert_eq!(metric_report.config.specs, SPECS.map(String::from));
    metric(&mut v, &metric_report);
    structure(&mut v);
    commutators(&mut v);
    determinism(&mut v);
    let failed: Vec<&str> = v.0.iter().filter(|(_, ok)| !ok).map(|(id, _)| id.as_str()).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
