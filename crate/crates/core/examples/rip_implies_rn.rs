// Random column-normalized 8×9 Gaussian designs: whenever δ₂ < 1/3 the
// uniform nullspace property RN_unif(1, 1) must hold.

use sparselab::properties::rip_implies_rn_test;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let report = rip_implies_rn_test(8, 200, 1, 7)?;
    println!(
        "{} trials, premise met in {}, vacuous {}, violations {:?}",
        report.trials, report.premise_met, report.vacuous, report.violations
    );
    println!(
        "delta_2 range [{:.4}, {:.4}]",
        report.min_delta_2t, report.max_delta_2t
    );
    assert!(report.violations.is_empty());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
