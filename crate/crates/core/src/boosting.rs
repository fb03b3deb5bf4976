//! L₂Boosting for the noiseless linear model.
//!
//! Each iteration fits the current residual by the single column with the
//! largest absolute normalized correlation, then moves that coordinate by a
//! fraction `nu` of its univariate least-squares coefficient:
//!
//! ```text
//! ρ_j   = ⟨R, X_j⟩ / ‖X_j‖₂
//! j_k   = smallest j maximizing |ρ_j|
//! b̂_j   = ⟨R, X_j⟩ / ‖X_j‖₂²
//! R    ← R − ν b̂_{j_k} X_{j_k}
//! β    ← β + ν b̂_{j_k} e_{j_k}
//! ```

use crate::error::{Error, Result};
use crate::linalg::{l2_norm, DenseMatrix};

/// Relative gap below which two `|ρ_j|` are treated as tied.
pub const DEFAULT_TIE_TOLERANCE: f64 = 1e-12;
/// Absolute residual-norm floor at which a run stops.
pub const DEFAULT_RESIDUAL_STOP: f64 = 1e-12;

/// Which states a [`run`] keeps as snapshots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SnapshotPolicy {
    /// Every state with `k <= dense_until` is kept.
    pub dense_until: usize,
    /// Beyond `dense_until`, every `stride`-th state is kept.
    pub stride: usize,
}

impl Default for SnapshotPolicy {
    fn default() -> Self {
        SnapshotPolicy {
            dense_until: 1000,
            stride: 10,
        }
    }
}

impl SnapshotPolicy {
    pub fn keeps(&self, k: usize) -> bool {
        k <= self.dense_until || k.is_multiple_of(self.stride.max(1))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoostingConfig {
    /// Step length in `(0, 1]`.
    pub nu: f64,
    pub max_iterations: usize,
    /// Stop once `‖R‖₂ <= residual_stop`.
    pub residual_stop: f64,
    pub tie_tolerance: f64,
    pub snapshots: SnapshotPolicy,
}

impl Default for BoostingConfig {
    fn default() -> Self {
        BoostingConfig {
            nu: 1.0,
            max_iterations: 1000,
            residual_stop: DEFAULT_RESIDUAL_STOP,
            tie_tolerance: DEFAULT_TIE_TOLERANCE,
            snapshots: SnapshotPolicy::default(),
        }
    }
}

impl BoostingConfig {
    pub fn new(nu: f64, max_iterations: usize) -> Result<Self> {
        let config = BoostingConfig {
            nu,
            max_iterations,
            ..BoostingConfig::default()
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "step length nu must lie in (0, 1], got {}",
                self.nu
            )));
        }
        if self.residual_stop.is_nan()
            || self.residual_stop < 0.0
            || self.tie_tolerance.is_nan()
            || self.tie_tolerance < 0.0
        {
            return Err(Error::InvalidParameter(
                "residual_stop and tie_tolerance must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// State after `k` boosting iterations.
#[derive(Clone, Debug, PartialEq)]
pub struct BoostingState {
    pub k: usize,
    pub beta: Vec<f64>,
    pub residual: Vec<f64>,
    /// Normalized correlations of `residual` with every column.
    pub rho: Vec<f64>,
    /// Selected columns `j_1, …, j_k` (0-based).
    pub history: Vec<usize>,
    /// Applied increments `ν b̂_{j_k}`.
    pub history_steps: Vec<f64>,
}

impl BoostingState {
    /// `β = 0`, `R = Y`. The correlations are zero until computed against a design.
    pub fn init(y: &[f64], p: usize) -> Self {
        BoostingState {
            k: 0,
            beta: vec![0.0; p],
            residual: y.to_vec(),
            rho: vec![0.0; p],
            history: Vec::new(),
            history_steps: Vec::new(),
        }
    }

    pub fn residual_norm(&self) -> f64 {
        l2_norm(&self.residual)
    }
}

fn squared_column_norms(x: &DenseMatrix) -> Result<Vec<f64>> {
    (0..x.cols())
        .map(|j| {
            let sq: f64 = (0..x.rows()).map(|i| x.get(i, j).powi(2)).sum();
            if sq > 0.0 {
                Ok(sq)
            } else {
                Err(Error::ZeroColumn { column: j + 1 })
            }
        })
        .collect()
}

/// `ρ_j = ⟨R, X_j/‖X_j‖₂⟩` for every column.
pub fn correlations(x: &DenseMatrix, residual: &[f64]) -> Result<Vec<f64>> {
    let norms: Vec<f64> = squared_column_norms(x)?
        .into_iter()
        .map(f64::sqrt)
        .collect();
    correlations_with_norms(x, residual, &norms)
}

fn correlations_with_norms(x: &DenseMatrix, residual: &[f64], norms: &[f64]) -> Result<Vec<f64>> {
    let dots = x.tr_mul_vec(residual)?;
    Ok(dots.iter().zip(norms).map(|(d, n)| d / n).collect())
}

/// Smallest index attaining `max|ρ_j|`, with the default tie tolerance.
pub fn select_index(rho: &[f64]) -> usize {
    select_index_with_tolerance(rho, DEFAULT_TIE_TOLERANCE)
}

/// Smallest `j` with `|ρ_j| >= (1 − tie_tolerance)·max|ρ|`. An all-zero `ρ` selects 0.
pub fn select_index_with_tolerance(rho: &[f64], tie_tolerance: f64) -> usize {
    let max = rho.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    if max == 0.0 {
        return 0;
    }
    let floor = max - tie_tolerance * max;
    rho.iter().position(|r| r.abs() >= floor).unwrap_or(0)
}

/// What one iteration did.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepRecord {
    pub k: usize,
    pub selected: usize,
    /// `ρ_{j_k}` of the residual before the step.
    pub rho_selected: f64,
    /// `ν b̂_{j_k}`.
    pub increment: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    MaxIterations,
    ResidualFloor,
}

/// Incremental driver that owns the current state, so callers can inspect
/// every iterate without storing all of them.
#[derive(Clone, Debug)]
pub struct Booster<'a> {
    x: &'a DenseMatrix,
    sq_norms: Vec<f64>,
    norms: Vec<f64>,
    config: BoostingConfig,
    state: BoostingState,
}

impl<'a> Booster<'a> {
    pub fn new(x: &'a DenseMatrix, y: &[f64], config: BoostingConfig) -> Result<Self> {
        config.validate()?;
        if y.len() != x.rows() {
            return Err(Error::DimensionMismatch {
                context: "boosting response",
                expected: x.rows(),
                found: y.len(),
            });
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("response"));
        }
        let sq_norms = squared_column_norms(x)?;
        let norms: Vec<f64> = sq_norms.iter().map(|s| s.sqrt()).collect();
        let mut state = BoostingState::init(y, x.cols());
        state.rho = correlations_with_norms(x, &state.residual, &norms)?;
        Ok(Booster {
            x,
            sq_norms,
            norms,
            config,
            state,
        })
    }

    pub fn state(&self) -> &BoostingState {
        &self.state
    }

    pub fn into_state(self) -> BoostingState {
        self.state
    }

    pub fn config(&self) -> &BoostingConfig {
        &self.config
    }

    /// Why the run should stop now, if it should.
    pub fn stop_reason(&self) -> Option<StopReason> {
        if self.state.residual_norm() <= self.config.residual_stop {
            Some(StopReason::ResidualFloor)
        } else if self.state.k >= self.config.max_iterations {
            Some(StopReason::MaxIterations)
        } else {
            None
        }
    }

    /// One iteration, regardless of the stopping rule.
    pub fn step(&mut self) -> Result<StepRecord> {
        let state = &mut self.state;
        let j = select_index_with_tolerance(&state.rho, self.config.tie_tolerance);
        let rho_selected = state.rho[j];
        let b_hat = self.x.column_dot(j, &state.residual) / self.sq_norms[j];
        let increment = self.config.nu * b_hat;
        for (i, r) in state.residual.iter_mut().enumerate() {
            *r -= increment * self.x.get(i, j);
        }
        state.beta[j] += increment;
        state.k += 1;
        state.history.push(j);
        state.history_steps.push(increment);
        state.rho = correlations_with_norms(self.x, &state.residual, &self.norms)?;
        Ok(StepRecord {
            k: state.k,
            selected: j,
            rho_selected,
            increment,
        })
    }
}

/// Functional single step: returns the successor of `state`.
pub fn step(
    state: &BoostingState,
    x: &DenseMatrix,
    config: &BoostingConfig,
) -> Result<BoostingState> {
    config.validate()?;
    let sq_norms = squared_column_norms(x)?;
    let norms: Vec<f64> = sq_norms.iter().map(|s| s.sqrt()).collect();
    let rho = correlations_with_norms(x, &state.residual, &norms)?;
    let j = select_index_with_tolerance(&rho, config.tie_tolerance);
    let b_hat = x.column_dot(j, &state.residual) / sq_norms[j];
    let increment = config.nu * b_hat;
    let mut next = state.clone();
    for (i, r) in next.residual.iter_mut().enumerate() {
        *r -= increment * x.get(i, j);
    }
    next.beta[j] += increment;
    next.k += 1;
    next.history.push(j);
    next.history_steps.push(increment);
    next.rho = correlations_with_norms(x, &next.residual, &norms)?;
    Ok(next)
}

/// A state kept by [`run`].
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub k: usize,
    pub beta: Vec<f64>,
    pub residual: Vec<f64>,
    pub rho: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    /// Thinned according to the config's [`SnapshotPolicy`]; always contains
    /// `k = 0` and the final state.
    pub snapshots: Vec<Snapshot>,
    pub final_state: BoostingState,
    pub stop: StopReason,
}

impl Trajectory {
    pub fn history(&self) -> &[usize] {
        &self.final_state.history
    }
}

fn snapshot(state: &BoostingState) -> Snapshot {
    Snapshot {
        k: state.k,
        beta: state.beta.clone(),
        residual: state.residual.clone(),
        rho: state.rho.clone(),
    }
}

/// Iterates until `max_iterations` or the residual floor.
pub fn run(x: &DenseMatrix, y: &[f64], config: BoostingConfig) -> Result<Trajectory> {
    let policy = config.snapshots;
    let mut booster = Booster::new(x, y, config)?;
    let mut snapshots = vec![snapshot(booster.state())];
    let stop = loop {
        if let Some(reason) = booster.stop_reason() {
            break reason;
        }
        booster.step()?;
        if policy.keeps(booster.state().k) {
            snapshots.push(snapshot(booster.state()));
        }
    };
    let final_state = booster.into_state();
    if snapshots.last().map(|s| s.k) != Some(final_state.k) {
        snapshots.push(snapshot(&final_state));
    }
    Ok(Trajectory {
        snapshots,
        final_state,
        stop,
    })
}
