// Builds the non-recovery instance for a target constant and checks every
// verdict: the uniform nullspace property holds, β is the unique sparsest
// solution, boosting never recovers β, and the Lasso does.
//
// ```bash
// cargo run --example non_recovery
// ```

use sparselab::report::{reproduce, ReproduceOptions};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for (c, nu) in [(1.0, 0.5), (4.0, 1.0)] {
        let (inst, report) = reproduce(&ReproduceOptions::new(c, nu, 2000))?;
        println!("c = {c}, nu = {nu}\n{report}\n");
        if !report.consistent() {
            return Err(report.diff().into());
        }
        assert!(report.verdicts.min_boosting_dist_l1 >= inst.s as f64 - 1e-12);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
