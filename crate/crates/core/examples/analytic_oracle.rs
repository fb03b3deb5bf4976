// The reduced recursion for the counterexample family, stepped by hand and
// checked against full-matrix boosting.

use sparselab::counterexample::{
    analytic_step, construct, equivalence_check, AnalyticState, StepCase,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let inst = construct(4.0)?;
    let mut state = AnalyticState::initial(&inst);
    for _ in 0..4 {
        let step = analytic_step(&state, &inst, 1.0)?;
        let what = match step.case {
            StepCase::LastColumn { delta } => format!("last column, delta = {delta:.6}"),
            StepCase::Middle { column } => format!("middle column {}", column + 1),
            StepCase::Stationary => "stationary".to_string(),
        };
        state = step.state;
        println!(
            "k = {}: j = {:>2} ({what}), c_p = {:.6}",
            state.k,
            step.selected + 1,
            state.c_p
        );
    }
    for (c, nu) in [(1.0, 0.1), (1.0, 1.0), (4.0, 0.1), (4.0, 1.0)] {
        let inst = construct(c)?;
        let report = equivalence_check(&inst, nu, 200)?;
        println!(
            "n = {:>2}, nu = {nu}: {} steps agree, max deviation {:e}",
            inst.n, report.steps_compared, report.max_deviation
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
