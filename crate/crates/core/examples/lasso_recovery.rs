// Lasso path and basis pursuit on the n = 9 and n = 25 instances: the path
// error stays inside the cone C(S, 1), shrinks linearly in λ, and the
// polished terminal solution is exactly β.

use sparselab::counterexample::construct;
use sparselab::lasso::{basis_pursuit, lasso_path, LassoPathConfig};
use sparselab::linalg::l1_norm;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for c in [1.0, 4.0] {
        let inst = construct(c)?;
        let config = LassoPathConfig::with_lambda_min_ratio(1e-7);
        let path = lasso_path(&inst.x, &inst.y, &config)?;
        println!("n = {}: {} path points", inst.n, path.len());
        for point in path.iter().step_by(6).chain(path.last()) {
            let delta: Vec<f64> = point
                .fit
                .beta
                .iter()
                .zip(&inst.beta)
                .map(|(a, b)| a - b)
                .collect();
            println!(
                "  lambda {:>12.4e}  dist_l1 {:>12.4e}  sweeps {:>6}",
                point.lambda,
                l1_norm(&delta),
                point.fit.sweeps
            );
        }
        let bp = basis_pursuit(&inst.x, &inst.y, &config)?;
        let support: Vec<usize> = bp.support.iter().map(|j| j + 1).collect();
        println!(
            "  basis pursuit support {support:?}, residual {:e}",
            bp.residual_norm
        );
        assert_eq!(bp.beta, inst.beta);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
