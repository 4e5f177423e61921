//! Browser bindings: Petz function curves, the kappa boundary scan, and a
//! gradient-versus-fundamental-field check on a random state. Each entry
//! point returns a JSON string.

use qmetric_core::actions::{flow_fundamental_numeric, fund_w_phi, fund_z_phi, Action, DeformationParam, LieDirection, Point};
use qmetric_core::monotone::{derivative_at_zero_plus, log_grid, matrix_monotonicity_witness, DerivativeAtZero, MonotoneFunctionSpec};
use qmetric_core::petz::{gradient_field, MetricSpec};
use qmetric_core::random::Sampler;
use qmetric_core::Result;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const MAX_DIM: usize = 6;
const MAX_TRIALS: usize = 20_000;

fn to_js(r: Result<Value>) -> std::result::Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e.to_string()))
}

fn check_dim(n: usize) -> Result<()> {
    if !(2..=MAX_DIM).contains(&n) {
        return Err(qmetric_core::Error::InvalidParameter(format!("dimension must be in 2..={MAX_DIM}")));
    }
    Ok(())
}

/// `{"x": [...], "curves": [{"spec", "f": [...]}]}` on a log grid.
pub fn curves(specs: &str, lo: f64, hi: f64, points: usize) -> Result<Value> {
    if !(lo > 0.0 && hi > lo) || !(2..=2000).contains(&points) {
        return Err(qmetric_core::Error::InvalidParameter("need 0 < lo < hi and 2..=2000 points".into()));
    }
    let x = log_grid(lo, hi, points);
    let mut out = Vec::new();
    for s in specs.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let spec: MonotoneFunctionSpec = s.parse()?;
        let f = x.iter().map(|&t| spec.eval(t)).collect::<Result<Vec<f64>>>()?;
        out.push(json!({ "spec": spec.to_string(), "f": f }));
    }
    Ok(json!({ "x": x, "curves": out }))
}

/// Witness search and slope at `0+` for one `kappa`.
pub fn scan(kappa: f64, n: usize, trials: usize, seed: u64) -> Result<Value> {
    check_dim(n)?;
    if !(1..=MAX_TRIALS).contains(&trials) {
        return Err(qmetric_core::Error::InvalidParameter(format!("trials must be in 1..={MAX_TRIALS}")));
    }
    let spec = MonotoneFunctionSpec::gl(kappa)?;
    let witness = matrix_monotonicity_witness(&spec, n, trials, seed)?
        .map(|w| json!({ "trial": w.trial, "min_eigenvalue": w.min_eigenvalue }));
    let slope = match derivative_at_zero_plus(&spec)? {
        DerivativeAtZero::Finite(v) => json!(v),
        DerivativeAtZero::PosInfinity => json!("+inf"),
    };
    Ok(json!({ "kappa": kappa, "n": n, "trials": trials, "witness": witness, "slope_at_zero": slope }))
}

/// Relative residuals between the gradients of a random expectation value
/// and the fundamental fields of the deformed actions, plus the fields
/// against finite differences of the flows.
pub fn gradient_check(n: usize, kappa: f64, seed: u64) -> Result<Value> {
    check_dim(n)?;
    let k = DeformationParam::new(kappa)?;
    let mut s = Sampler::new(seed);
    let rho = s.density(n);
    let a = s.hermitian(n);
    let rel = |x: &qmetric_core::HermitianMatrix, y: &qmetric_core::HermitianMatrix| x.distance(y) / y.frobenius_norm();

    let gl = gradient_field(&MetricSpec::new(MonotoneFunctionSpec::gl(kappa)?, kappa)?, &a, &rho)?;
    let z = fund_z_phi(&a, &rho, k)?;
    let bkm = gradient_field(&MetricSpec::new(MonotoneFunctionSpec::bkm(), kappa)?, &a, &rho)?;
    let w = fund_w_phi(&a, &rho, k)?;

    let dir = LieDirection::dilation(a.clone());
    let x = Point::State(rho.clone());
    let beta_flow = flow_fundamental_numeric(&Action::BetaKappa(k), &dir, &x, 1e-5, true)?;
    let gamma_flow = flow_fundamental_numeric(&Action::GammaKappa(k), &dir, &x, 1e-5, true)?;

    Ok(json!({
        "n": n,
        "kappa": kappa,
        "eigenvalues": rho.spectral().eigenvalues(),
        "gl_gradient_vs_z_phi": rel(gl.matrix(), z.matrix()),
        "bkm_gradient_vs_w_phi": rel(bkm.matrix(), w.matrix()),
        "beta_kappa_flow_vs_z_phi": rel(&beta_flow, z.matrix()),
        "gamma_kappa_flow_vs_w_phi": rel(&gamma_flow, w.matrix()),
    }))
}

#[wasm_bindgen(js_name = petzCurves)]
pub fn petz_curves(specs: &str, lo: f64, hi: f64, points: usize) -> std::result::Result<String, JsError> {
    to_js(curves(specs, lo, hi, points))
}

#[wasm_bindgen(js_name = kappaScan)]
pub fn kappa_scan(kappa: f64, n: usize, trials: usize, seed: u32) -> std::result::Result<String, JsError> {
    to_js(scan(kappa, n, trials, seed as u64))
}

#[wasm_bindgen(js_name = gradientCheck)]
pub fn gradient_check_js(n: usize, kappa: f64, seed: u32) -> std::result::Result<String, JsError> {
    to_js(gradient_check(n, kappa, seed as u64))
}
