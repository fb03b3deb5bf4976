//! An instance family on which L₂Boosting never selects an active column.
//!
//! For `n = N²`, `s = N`, `γ = n` and `p = n + 1` the design is
//!
//! ```text
//!        s cols      n−s cols   last
//!     ┌ γ·I_s      0          γ·1 ┐   s rows
//! X = └ 0          I_{n−s}    1   ┘   n−s rows
//! ```
//!
//! with `β = (1,…,1, 0,…,0)` (s ones) and `Y = Xβ = (γ,…,γ, 0,…,0)`. The
//! nullspace is spanned by `z = (−1,…,−1, 1)`, and `N` is the smallest value
//! with `(n + 1 − √n)/√n > c`, so `RN_unif(s, c)` holds.
//!
//! Boosting iterates keep the shape `(0,…,0, −c_{s+1},…,−c_n, c_p)` with
//! every `c_j ∈ [0, 1]`. [`AnalyticState`] tracks those reduced coordinates
//! and steps them in closed form, which gives an oracle for the full-matrix
//! run.

use crate::boosting::{
    select_index_with_tolerance, Booster, BoostingConfig, DEFAULT_TIE_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Slack allowed on the `[0, 1]` bounds of the reduced coordinates.
const BOUND_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct SparseInstance {
    pub x: DenseMatrix,
    pub beta: Vec<f64>,
    pub y: Vec<f64>,
    /// Active set `{0, …, s−1}`.
    pub support: Vec<usize>,
    pub s: usize,
    pub n: usize,
    pub p: usize,
    pub gamma: f64,
    pub c_target: f64,
    /// Spanning nullspace vector `(−1, …, −1, 1)`.
    pub z: Vec<f64>,
}

impl SparseInstance {
    /// `(n + 1 − √n)/√n`, the supremum of admissible RN constants.
    pub fn rn_bound(&self) -> f64 {
        (self.n as f64 + 1.0 - self.s as f64) / self.s as f64
    }

    /// `(n + 1 − √n)/(2√n)`, the cone ratio the boosting residual eventually exceeds.
    pub fn cone_exit_threshold(&self) -> f64 {
        self.rn_bound() / 2.0
    }

    /// Index range of the middle identity block.
    pub fn middle(&self) -> std::ops::Range<usize> {
        self.s..self.n
    }
}

/// Smallest `N >= 3` with `n = N² >= 5` and `(n + 1 − N)/N > c`.
pub fn admissible_root(c: f64) -> Result<usize> {
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "target constant must be positive and finite, got {c}"
        )));
    }
    let mut root = 3usize;
    loop {
        let n = root * root;
        if n >= 5 && (n + 1 - root) as f64 > c * root as f64 {
            return Ok(root);
        }
        root += 1;
    }
}

pub fn construct(c: f64) -> Result<SparseInstance> {
    let root = admissible_root(c)?;
    let n = root * root;
    let s = root;
    let p = n + 1;
    let gamma = n as i64;

    let mut entries = vec![0i64; n * p];
    for i in 0..n {
        let scale = if i < s { gamma } else { 1 };
        entries[i * p + i] = scale;
        entries[i * p + (p - 1)] = scale;
    }
    let beta: Vec<i64> = (0..p).map(|j| i64::from(j < s)).collect();
    let z: Vec<i64> = (0..p).map(|j| if j + 1 == p { 1 } else { -1 }).collect();
    let apply = |v: &[i64]| -> Vec<i64> {
        (0..n)
            .map(|i| (0..p).map(|j| entries[i * p + j] * v[j]).sum())
            .collect()
    };
    let y = apply(&beta);
    if apply(&z).iter().any(|&v| v != 0) {
        return Err(Error::InvariantViolation(
            "Xz != 0 in the constructed design".into(),
        ));
    }

    let to_f64 = |v: &[i64]| v.iter().map(|&e| e as f64).collect::<Vec<f64>>();
    Ok(SparseInstance {
        x: DenseMatrix::new(n, p, to_f64(&entries))?,
        beta: to_f64(&beta),
        y: to_f64(&y),
        support: (0..s).collect(),
        s,
        n,
        p,
        gamma: gamma as f64,
        c_target: c,
        z: to_f64(&z),
    })
}

/// Closed-form column norms: `γ` on the active block, 1 on the middle block,
/// `√((γ² − 1)s + n)` for the last column.
pub fn column_norms(inst: &SparseInstance) -> Vec<f64> {
    let last = last_column_sq_norm(inst).sqrt();
    (0..inst.p)
        .map(|j| {
            if j < inst.s {
                inst.gamma
            } else if j < inst.n {
                1.0
            } else {
                last
            }
        })
        .collect()
}

fn last_column_sq_norm(inst: &SparseInstance) -> f64 {
    (inst.gamma * inst.gamma - 1.0) * inst.s as f64 + inst.n as f64
}

/// Reduced coordinates of an iterate `β = (0,…,0, −c_mid, c_p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticState {
    /// `c_{s+1}, …, c_n`.
    pub c_mid: Vec<f64>,
    pub c_p: f64,
    pub k: usize,
}

impl AnalyticState {
    pub fn initial(inst: &SparseInstance) -> Self {
        AnalyticState {
            c_mid: vec![0.0; inst.n - inst.s],
            c_p: 0.0,
            k: 0,
        }
    }

    /// Validates that every coordinate lies in `[0, 1]`.
    pub fn new(inst: &SparseInstance, c_mid: Vec<f64>, c_p: f64) -> Result<Self> {
        if c_mid.len() != inst.n - inst.s {
            return Err(Error::DimensionMismatch {
                context: "analytic middle block",
                expected: inst.n - inst.s,
                found: c_mid.len(),
            });
        }
        let state = AnalyticState { c_mid, c_p, k: 0 };
        state.check_bounds()?;
        Ok(state)
    }

    fn check_bounds(&self) -> Result<()> {
        let ok = |c: f64| (-BOUND_SLACK..=1.0 + BOUND_SLACK).contains(&c);
        if let Some(j) = self.c_mid.iter().position(|&c| !ok(c)) {
            return Err(Error::InvariantViolation(format!(
                "middle coordinate {} = {} left [0, 1] at k = {}",
                j, self.c_mid[j], self.k
            )));
        }
        if !ok(self.c_p) {
            return Err(Error::InvariantViolation(format!(
                "last coordinate {} left [0, 1] at k = {}",
                self.c_p, self.k
            )));
        }
        Ok(())
    }

    /// The full parameter vector this state stands for.
    pub fn beta(&self, inst: &SparseInstance) -> Vec<f64> {
        let mut b = vec![0.0; inst.p];
        for (slot, &c) in b[inst.s..inst.n].iter_mut().zip(&self.c_mid) {
            *slot = -c;
        }
        b[inst.p - 1] = self.c_p;
        b
    }

    /// `‖R‖₂` in closed form: `R = (γ(1−c_p) ×s, c_j − c_p)`.
    pub fn residual_norm(&self, inst: &SparseInstance) -> f64 {
        let head = inst.s as f64 * (inst.gamma * (1.0 - self.c_p)).powi(2);
        let tail: f64 = self.c_mid.iter().map(|c| (c - self.c_p).powi(2)).sum();
        (head + tail).sqrt()
    }
}

/// Normalized correlations of the residual at `state`.
pub fn analytic_rho(state: &AnalyticState, inst: &SparseInstance) -> Vec<f64> {
    let head = inst.gamma * (1.0 - state.c_p);
    let mut rho = vec![head; inst.p];
    for (slot, &c) in rho[inst.s..inst.n].iter_mut().zip(&state.c_mid) {
        *slot = c - state.c_p;
    }
    rho[inst.p - 1] = last_numerator(state, inst) / last_column_sq_norm(inst).sqrt();
    rho
}

/// `sγ²(1 − c_p) + Σ_j (c_j − c_p)`.
fn last_numerator(state: &AnalyticState, inst: &SparseInstance) -> f64 {
    let mid: f64 = state.c_mid.iter().map(|c| c - state.c_p).sum();
    inst.s as f64 * inst.gamma * inst.gamma * (1.0 - state.c_p) + mid
}

/// Which branch of the recursion a step took.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepCase {
    /// The last column was selected; `c_p` moved by `ν·delta`.
    LastColumn { delta: f64 },
    /// A middle column was selected and pulled toward `c_p`.
    Middle { column: usize },
    /// Zero residual: nothing moves.
    Stationary,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticStep {
    pub state: AnalyticState,
    /// Selected column (0-based).
    pub selected: usize,
    pub case: StepCase,
}

/// One boosting step in reduced coordinates.
///
/// Fails with [`Error::InvariantViolation`] if an active column would be
/// selected or any coordinate leaves `[0, 1]`.
pub fn analytic_step(
    state: &AnalyticState,
    inst: &SparseInstance,
    nu: f64,
) -> Result<AnalyticStep> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "step length nu must lie in (0, 1], got {nu}"
        )));
    }
    let rho = analytic_rho(state, inst);
    let selected = select_index_with_tolerance(&rho, DEFAULT_TIE_TOLERANCE);
    let mut next = state.clone();
    next.k += 1;

    if rho.iter().all(|r| *r == 0.0) {
        return Ok(AnalyticStep {
            state: next,
            selected,
            case: StepCase::Stationary,
        });
    }
    if selected < inst.s {
        return Err(Error::InvariantViolation(format!(
            "active column {} selected at k = {}",
            selected + 1,
            next.k
        )));
    }

    let case = if selected == inst.p - 1 {
        let delta = last_numerator(state, inst) / last_column_sq_norm(inst);
        if delta > 1.0 - state.c_p + BOUND_SLACK {
            return Err(Error::InvariantViolation(format!(
                "step {delta} exceeds 1 - c_p = {} at k = {}",
                1.0 - state.c_p,
                next.k
            )));
        }
        let head = inst.gamma * (1.0 - state.c_p);
        let spread = state
            .c_mid
            .iter()
            .fold(0.0_f64, |m, c| m.max((c - state.c_p).abs()));
        if head >= spread && delta < -BOUND_SLACK {
            return Err(Error::InvariantViolation(format!(
                "negative step {delta} while the active block dominates at k = {}",
                next.k
            )));
        }
        next.c_p = state.c_p + nu * delta;
        StepCase::LastColumn { delta }
    } else {
        let m = selected - inst.s;
        next.c_mid[m] = (1.0 - nu) * state.c_mid[m] + nu * state.c_p;
        StepCase::Middle { column: selected }
    };
    next.check_bounds()?;
    Ok(AnalyticStep {
        state: next,
        selected,
        case,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceReport {
    /// `max_k ‖β_matrix^[k] − β_analytic^[k]‖_∞`.
    pub max_deviation: f64,
    /// Common selection sequence (0-based).
    pub selections: Vec<usize>,
    pub steps_compared: usize,
}

/// Runs full-matrix boosting and the analytic recursion side by side.
///
/// Both sides stop at `iterations` or once their residual norm reaches the
/// boosting residual floor; reaching the floor on one side only is treated
/// as divergence.
pub fn equivalence_check(
    inst: &SparseInstance,
    nu: f64,
    iterations: usize,
) -> Result<EquivalenceReport> {
    let config = BoostingConfig::new(nu, iterations)?;
    let floor = config.residual_stop;
    let mut booster = Booster::new(&inst.x, &inst.y, config)?;
    let mut analytic = AnalyticState::initial(inst);
    let mut report = EquivalenceReport {
        max_deviation: 0.0,
        selections: Vec::new(),
        steps_compared: 0,
    };
    for k in 1..=iterations {
        let matrix_done = booster.state().residual_norm() <= floor;
        let analytic_done = analytic.residual_norm(inst) <= floor;
        if matrix_done || analytic_done {
            if matrix_done != analytic_done {
                return Err(Error::InvariantViolation(format!(
                    "only the {} side reached the residual floor at k = {}",
                    if matrix_done { "matrix" } else { "analytic" },
                    k - 1
                )));
            }
            break;
        }
        let record = booster.step()?;
        let step = analytic_step(&analytic, inst, nu)?;
        if record.selected != step.selected {
            return Err(Error::SelectionMismatch {
                k,
                matrix: record.selected + 1,
                analytic: step.selected + 1,
            });
        }
        analytic = step.state;
        let beta_a = analytic.beta(inst);
        let dev = booster
            .state()
            .beta
            .iter()
            .zip(&beta_a)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        report.max_deviation = report.max_deviation.max(dev);
        report.selections.push(record.selected);
        report.steps_compared = k;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boosting::correlations;
    use approx::assert_relative_eq;

    #[test]
    fn smallest_admissible_root() {
        // brute-force scan of the inequality
        let scan = |c: f64| {
            (3usize..)
                .find(|&r| (r * r + 1 - r) as f64 / r as f64 > c)
                .unwrap()
        };
        for c in [0.5, 1.0, 2.0, 3.25, 4.0, 4.2, 10.0] {
            assert_eq!(admissible_root(c).unwrap(), scan(c), "c = {c}");
        }
        assert_eq!(construct(1.0).unwrap().n, 9);
        let inst = construct(4.0).unwrap();
        assert_eq!((inst.n, inst.p, inst.s, inst.gamma), (25, 26, 5, 25.0));
        let inst = construct(10.0).unwrap();
        assert_eq!((inst.n, inst.p, inst.s, inst.gamma), (121, 122, 11, 121.0));
        assert!(construct(0.0).is_err());
        assert!(construct(f64::NAN).is_err());
    }

    #[test]
    fn construction_is_exact() {
        for c in [0.5, 1.0, 4.0] {
            let inst = construct(c).unwrap();
            let xz = inst.x.mul_vec(&inst.z).unwrap();
            assert!(xz.iter().all(|&v| v == 0.0));
            assert_eq!(inst.x.mul_vec(&inst.beta).unwrap(), inst.y);
            assert!(inst.rn_bound() > c);
        }
    }

    #[test]
    fn closed_form_column_norms() {
        let inst = construct(4.0).unwrap();
        let closed = column_norms(&inst);
        let direct = inst.x.column_norms();
        for (a, b) in closed.iter().zip(&direct) {
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
        assert_relative_eq!(closed[25], 3145f64.sqrt());
        let nine = column_norms(&construct(1.0).unwrap());
        assert_eq!(&nine[..3], &[9.0, 9.0, 9.0]);
        assert_relative_eq!(nine[9], 249f64.sqrt());
    }

    #[test]
    fn initial_correlations_match_the_matrix() {
        let inst = construct(4.0).unwrap();
        let analytic = analytic_rho(&AnalyticState::initial(&inst), &inst);
        let direct = correlations(&inst.x, &inst.y).unwrap();
        for (a, b) in analytic.iter().zip(&direct) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
        assert_eq!(analytic[0], 25.0);
        assert_eq!(analytic[10], 0.0);
        assert_relative_eq!(analytic[25], 3125.0 / 3145f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn fixed_point_has_zero_correlations() {
        let inst = construct(1.0).unwrap();
        let state = AnalyticState::new(&inst, vec![1.0; 6], 1.0).unwrap();
        assert!(analytic_rho(&state, &inst).iter().all(|r| *r == 0.0));
        let step = analytic_step(&state, &inst, 1.0).unwrap();
        assert_eq!(step.case, StepCase::Stationary);
    }

    #[test]
    fn first_two_full_steps() {
        let inst = construct(4.0).unwrap();
        let first = analytic_step(&AnalyticState::initial(&inst), &inst, 1.0).unwrap();
        assert_eq!(first.selected, 25);
        assert_relative_eq!(first.state.c_p, 3125.0 / 3145.0, max_relative = 1e-15);
        let rho = analytic_rho(&first.state, &inst);
        assert!(rho[25].abs() < 1e-12);
        assert_relative_eq!(rho[5], -3125.0 / 3145.0, max_relative = 1e-15);

        let second = analytic_step(&first.state, &inst, 1.0).unwrap();
        assert_eq!(second.selected, 5);
        assert_eq!(second.case, StepCase::Middle { column: 5 });
        assert_eq!(second.state.c_mid[0], first.state.c_p);
    }

    #[test]
    fn half_step_from_zero() {
        let inst = construct(4.0).unwrap();
        let step = analytic_step(&AnalyticState::initial(&inst), &inst, 0.5).unwrap();
        assert_relative_eq!(step.state.c_p, 0.5 * 3125.0 / 3145.0, max_relative = 1e-15);
        assert!(step.state.c_mid.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn out_of_range_state_is_rejected() {
        let inst = construct(1.0).unwrap();
        assert!(AnalyticState::new(&inst, vec![0.0; 6], 1.5).is_err());
        assert!(AnalyticState::new(&inst, vec![0.0; 5], 0.5).is_err());
    }

    #[test]
    fn zero_iterations_compare_nothing() {
        let inst = construct(1.0).unwrap();
        let report = equivalence_check(&inst, 1.0, 0).unwrap();
        assert_eq!(report.max_deviation, 0.0);
        assert_eq!(report.steps_compared, 0);
    }
}
