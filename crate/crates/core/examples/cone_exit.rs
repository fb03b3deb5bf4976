// Tracks the cone ratio ‖Δ_{Sᶜ}‖₁ / ‖Δ_S‖₁ of the boosting error on the
// n = 25 instance for several step lengths. The ratio climbs past
// (n + 1 − √n)/(2√n) = 2.1 and settles at 21/5.

use sparselab::boosting::{Booster, BoostingConfig};
use sparselab::counterexample::construct;
use sparselab::properties::cone_ratio;
use sparselab::report::sustained_exit;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let inst = construct(4.0)?;
    let threshold = inst.cone_exit_threshold();
    for nu in [1.0, 0.5, 0.1] {
        let mut booster = Booster::new(&inst.x, &inst.y, BoostingConfig::new(nu, 2000)?)?;
        let mut ratios = Vec::new();
        let delta =
            |b: &[f64]| -> Vec<f64> { b.iter().zip(&inst.beta).map(|(a, t)| a - t).collect() };
        ratios.push(cone_ratio(&delta(&booster.state().beta), &inst.support));
        while booster.stop_reason().is_none() {
            booster.step()?;
            ratios.push(cone_ratio(&delta(&booster.state().beta), &inst.support));
        }
        let converged = booster.state().residual_norm() <= booster.config().residual_stop;
        let exit = sustained_exit(&ratios, threshold, 100, converged);
        println!(
            "nu = {nu:>3}: {:>4} iterations, exit at k = {:?}, final ratio {:.6}",
            ratios.len() - 1,
            exit,
            ratios.last().copied().unwrap_or(0.0)
        );
        assert!(exit.is_some());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
