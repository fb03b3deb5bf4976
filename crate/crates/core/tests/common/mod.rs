//! Helpers shared by the invariant tests and the acceptance runner.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use sparselab::boosting::{Booster, BoostingConfig};
use sparselab::counterexample::{analytic_step, AnalyticState, SparseInstance};
use sparselab::DenseMatrix;

pub fn gaussian_instance(rng: &mut ChaCha8Rng, n: usize, p: usize) -> (DenseMatrix, Vec<f64>) {
    let data: Vec<f64> = (0..n * p).map(|_| rng.sample(StandardNormal)).collect();
    let y: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    (DenseMatrix::new(n, p, data).unwrap(), y)
}

#[derive(Debug, Default)]
pub struct StepAudit {
    pub steps: usize,
    /// Largest `|‖R_k‖² − (‖R_{k−1}‖² − ν(2−ν)ρ²)| / ‖R_{k−1}‖²`.
    pub max_energy_error: f64,
    /// Steps where the max-|ρ| set and the min-RSS set differ.
    pub selection_mismatches: usize,
}

/// Runs boosting and audits every step: the energy identity, and that the
/// columns maximizing `|ρ_j|` are exactly those minimizing `‖R − b̂_j X_j‖²`.
pub fn audit_boosting(x: &DenseMatrix, y: &[f64], nu: f64, iterations: usize) -> StepAudit {
    let mut booster = Booster::new(x, y, BoostingConfig::new(nu, iterations).unwrap()).unwrap();
    let mut audit = StepAudit::default();
    while booster.stop_reason().is_none() {
        let before = booster.state().residual.clone();
        let e0: f64 = before.iter().map(|r| r * r).sum();
        let rho = booster.state().rho.clone();
        let tol = 1e-9 * e0;

        let rho_max = rho.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
        let by_corr: Vec<usize> = (0..x.cols())
            .filter(|&j| rho_max * rho_max - rho[j] * rho[j] <= tol)
            .collect();
        let rss: Vec<f64> = (0..x.cols())
            .map(|j| {
                let col = x.column(j);
                let sq: f64 = col.iter().map(|v| v * v).sum();
                let b = col.iter().zip(&before).map(|(a, r)| a * r).sum::<f64>() / sq;
                before
                    .iter()
                    .zip(&col)
                    .map(|(r, a)| (r - b * a).powi(2))
                    .sum()
            })
            .collect();
        let rss_min = rss.iter().copied().fold(f64::INFINITY, f64::min);
        let by_rss: Vec<usize> = (0..x.cols()).filter(|&j| rss[j] - rss_min <= tol).collect();
        if by_corr != by_rss {
            audit.selection_mismatches += 1;
        }

        let record = booster.step().unwrap();
        let e1: f64 = booster.state().residual.iter().map(|r| r * r).sum();
        let predicted = e0 - nu * (2.0 - nu) * record.rho_selected * record.rho_selected;
        if e0 > 0.0 {
            audit.max_energy_error = audit.max_energy_error.max((e1 - predicted).abs() / e0);
        }
        audit.steps += 1;
    }
    audit
}

/// Describes the first way `beta` departs from `(0,…,0, −c_mid, c_p)` with
/// every `c ∈ [0, 1 + 1e-12]`.
pub fn reduced_form_violation(inst: &SparseInstance, beta: &[f64]) -> Option<String> {
    const HI: f64 = 1.0 + 1e-12;
    if let Some(j) = (0..inst.s).find(|&j| beta[j] != 0.0) {
        return Some(format!("active coordinate {} = {}", j + 1, beta[j]));
    }
    if let Some(j) = inst.middle().find(|&j| !(0.0..=HI).contains(&-beta[j])) {
        return Some(format!("middle coordinate {} = {}", j + 1, beta[j]));
    }
    let last = beta[inst.p - 1];
    (!(0.0..=HI).contains(&last)).then(|| format!("last coordinate = {last}"))
}

/// Applies one analytic step to `samples` uniformly drawn reduced states and
/// returns the failures.
pub fn reduced_form_closure(
    inst: &SparseInstance,
    nu: f64,
    samples: usize,
    seed: u64,
) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for i in 0..samples {
        let c_mid: Vec<f64> = (0..inst.n - inst.s).map(|_| rng.random::<f64>()).collect();
        let c_p: f64 = rng.random();
        let state = AnalyticState::new(inst, c_mid, c_p).unwrap();
        match analytic_step(&state, inst, nu) {
            Ok(step) => {
                if let Some(v) = reduced_form_violation(inst, &step.state.beta(inst)) {
                    failures.push(format!("sample {i}: {v}"));
                }
            }
            Err(e) => failures.push(format!("sample {i}: {e}")),
        }
    }
    failures
}
