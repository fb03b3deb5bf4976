//! End-to-end commands: construct an instance, reproduce the non-recovery
//! verdicts, certify a property of a user matrix, and compare boosting with
//! the Lasso path on arbitrary data.
//!
//! Column indices in every record and file produced here are 1-based.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::boosting::{Booster, BoostingConfig, StopReason};
use crate::counterexample::{construct, SparseInstance};
use crate::error::{Error, Result};
use crate::io;
use crate::lasso::{basis_pursuit, kkt_residual, lasso_path, LassoPathConfig};
use crate::linalg::{l1_norm, lq_norm, nullspace, DenseMatrix, Norm, DEFAULT_RANK_TOLERANCE};
use crate::properties::{
    self, l1_split, re_lower_bound, rip_constant, rn_check_with, rn_uniform, unique_sparsest,
    ConeSpec, HeuristicConfig, RnMethod, Spark,
};

/// One boosting iterate. Truth-dependent fields are `None` without a reference β.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationRecord {
    pub k: usize,
    pub j_k: Option<usize>,
    /// `max_j |ρ_j|` of the residual at this iterate.
    pub rho_max: f64,
    pub resid_l2: f64,
    pub dist_l1: Option<f64>,
    pub delta_s_l1: Option<f64>,
    pub delta_sc_l1: Option<f64>,
    pub cone_ratio: Option<f64>,
}

/// Row of the boosting trajectory CSV.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub k: usize,
    pub j_k: Option<usize>,
    pub rho_max: f64,
    pub resid_l2: f64,
    pub dist_l1: Option<f64>,
    pub cone_ratio: Option<f64>,
}

impl From<&IterationRecord> for TrajectoryRow {
    fn from(r: &IterationRecord) -> Self {
        TrajectoryRow {
            k: r.k,
            j_k: r.j_k,
            rho_max: r.rho_max,
            resid_l2: r.resid_l2,
            dist_l1: r.dist_l1,
            cone_ratio: r.cone_ratio,
        }
    }
}

/// Row of the Lasso path CSV.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LassoRow {
    pub lambda: f64,
    pub l1_norm: f64,
    pub kkt_residual: f64,
    pub dist_l1_to_truth: Option<f64>,
    pub cone_ratio: Option<f64>,
}

struct Truth<'a> {
    beta: &'a [f64],
    support: Vec<usize>,
}

impl<'a> Truth<'a> {
    fn new(beta: &'a [f64]) -> Self {
        Truth {
            support: (0..beta.len()).filter(|&j| beta[j] != 0.0).collect(),
            beta,
        }
    }

    /// `(‖Δ‖₁, ‖Δ_S‖₁, ‖Δ_{Sᶜ}‖₁, ratio)` for `Δ = b − β`.
    fn split(&self, b: &[f64]) -> (f64, f64, f64, f64) {
        let delta: Vec<f64> = b.iter().zip(self.beta).map(|(a, t)| a - t).collect();
        let (on, off) = l1_split(&delta, &self.support);
        (
            on + off,
            on,
            off,
            properties::cone_ratio(&delta, &self.support),
        )
    }
}

/// Boosting records for every iterate, plus why the run stopped.
fn boosting_records(
    x: &DenseMatrix,
    y: &[f64],
    config: BoostingConfig,
    truth: Option<&Truth>,
    mut on_state: impl FnMut(&crate::boosting::BoostingState),
) -> Result<(Vec<IterationRecord>, StopReason)> {
    let mut booster = Booster::new(x, y, config)?;
    let mut records = Vec::new();
    let mut push = |state: &crate::boosting::BoostingState, j_k: Option<usize>| {
        let split = truth.map(|t| t.split(&state.beta));
        records.push(IterationRecord {
            k: state.k,
            j_k: j_k.map(|j| j + 1),
            rho_max: lq_norm(&state.rho, Norm::Infinity),
            resid_l2: state.residual_norm(),
            dist_l1: split.map(|s| s.0),
            delta_s_l1: split.map(|s| s.1),
            delta_sc_l1: split.map(|s| s.2),
            cone_ratio: split.map(|s| s.3),
        });
    };
    on_state(booster.state());
    push(booster.state(), None);
    let stop = loop {
        if let Some(reason) = booster.stop_reason() {
            break reason;
        }
        let step = booster.step()?;
        on_state(booster.state());
        push(booster.state(), Some(step.selected));
    };
    Ok((records, stop))
}

fn lasso_rows(
    x: &DenseMatrix,
    y: &[f64],
    config: &LassoPathConfig,
    truth: Option<&Truth>,
) -> Result<Vec<LassoRow>> {
    lasso_path(x, y, config)?
        .iter()
        .map(|point| {
            let split = truth.map(|t| t.split(&point.fit.beta));
            Ok(LassoRow {
                lambda: point.lambda,
                l1_norm: l1_norm(&point.fit.beta),
                kkt_residual: kkt_residual(x, y, &point.fit.beta, point.lambda)?,
                dist_l1_to_truth: split.map(|s| s.0),
                cone_ratio: split.map(|s| s.3),
            })
        })
        .collect()
}

/// First `k` after which the ratio stays above `threshold` for `window`
/// consecutive iterates. A run that stopped on the residual floor sits at a
/// fixed point, so a shorter tail above the threshold also counts.
pub fn sustained_exit(
    ratios: &[f64],
    threshold: f64,
    window: usize,
    stationary_tail: bool,
) -> Option<usize> {
    let window = window.max(1);
    let mut run = 0usize;
    let mut best = None;
    for k in (0..ratios.len()).rev() {
        if ratios[k] > threshold {
            run += 1;
            let reaches_end = k + run == ratios.len();
            if run >= window || (stationary_tail && reaches_end) {
                best = Some(k);
            }
        } else {
            run = 0;
        }
    }
    // the earliest qualifying start is the answer
    best
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReproduceOptions {
    pub c: f64,
    pub nu: f64,
    pub iterations: usize,
    pub seed: u64,
    /// Terminal λ of the Lasso path relative to `λ_max`.
    pub lasso_lambda_min_ratio: f64,
    /// `‖β̂ − β‖₁` at or below this counts as recovery.
    pub recovery_tolerance: f64,
    /// Consecutive iterates the cone ratio must stay above its threshold.
    pub cone_window: usize,
    pub re_samples: usize,
}

impl ReproduceOptions {
    pub fn new(c: f64, nu: f64, iterations: usize) -> Self {
        ReproduceOptions {
            c,
            nu,
            iterations,
            seed: 0,
            lasso_lambda_min_ratio: 1e-7,
            recovery_tolerance: 1e-3,
            cone_window: 100,
            re_samples: 10_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceSummary {
    pub n: usize,
    pub p: usize,
    pub s: usize,
    pub gamma: f64,
    pub c_target: f64,
    /// `(n + 1 − √n)/√n`.
    pub rn_bound: f64,
    /// `(n + 1 − √n)/(2√n)`.
    pub cone_exit_threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum UniquenessEvidence {
    /// Every support of size at most `s` was fitted.
    Enumerated {
        unique: bool,
        support: Vec<usize>,
        supports_enumerated: u128,
    },
    /// Spark from the one-dimensional nullspace: `z` has full support.
    SparkBound { spark: usize, s: usize, holds: bool },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdicts {
    pub rn_holds: bool,
    pub unique_sparsest: bool,
    pub re_positive: bool,
    pub never_selects_active: bool,
    pub boosting_recovers: bool,
    pub min_boosting_dist_l1: f64,
    pub cone_exit_k: Option<usize>,
    /// False when the run was too short to judge the cone exit.
    pub cone_exit_conclusive: bool,
    pub lasso_recovers: bool,
    pub lasso_stays_in_cone: bool,
    pub basis_pursuit_error_inf: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Discrepancy {
    pub claim: String,
    pub expected: String,
    pub observed: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoveryReport {
    pub instance: InstanceSummary,
    pub options: ReproduceOptions,
    pub rn_critical_c: f64,
    pub rn_worst_support: Vec<usize>,
    pub uniqueness: UniquenessEvidence,
    pub re_phi_estimate: f64,
    pub boosting_stop: String,
    pub boosting: Vec<IterationRecord>,
    pub lasso: Vec<LassoRow>,
    pub verdicts: Verdicts,
    pub discrepancies: Vec<Discrepancy>,
}

impl RecoveryReport {
    pub fn consistent(&self) -> bool {
        self.discrepancies.is_empty()
    }

    pub fn trajectory_rows(&self) -> Vec<TrajectoryRow> {
        self.boosting.iter().map(TrajectoryRow::from).collect()
    }

    /// Diff-style listing of the discrepancies.
    pub fn diff(&self) -> String {
        let mut out = String::from("--- expected\n+++ observed\n");
        for d in &self.discrepancies {
            out.push_str(&format!(
                "@@ {} @@\n- {}\n+ {}\n",
                d.claim, d.expected, d.observed
            ));
        }
        out
    }
}

impl fmt::Display for RecoveryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = &self.instance;
        let v = &self.verdicts;
        writeln!(
            f,
            "instance: n={} p={} s={} gamma={} (c target {})",
            i.n, i.p, i.s, i.gamma, i.c_target
        )?;
        writeln!(
            f,
            "RN_unif(s, c): holds={} critical_c={}",
            v.rn_holds, self.rn_critical_c
        )?;
        writeln!(f, "unique sparsest solution: {}", v.unique_sparsest)?;
        writeln!(
            f,
            "restricted eigenvalue estimate: {:.6e}",
            self.re_phi_estimate
        )?;
        writeln!(
            f,
            "boosting: {} iterations ({}), never active={}, min dist_l1={:.6}, recovers={}",
            self.boosting.len() - 1,
            self.boosting_stop,
            v.never_selects_active,
            v.min_boosting_dist_l1,
            v.boosting_recovers
        )?;
        match v.cone_exit_k {
            Some(k) => writeln!(
                f,
                "cone exit: ratio > {:.6} from k={} on (final ratio {:.6})",
                i.cone_exit_threshold,
                k,
                self.boosting
                    .last()
                    .and_then(|r| r.cone_ratio)
                    .unwrap_or(f64::NAN)
            )?,
            None => writeln!(
                f,
                "cone exit: not observed (conclusive={})",
                v.cone_exit_conclusive
            )?,
        }
        let last = self.lasso.last();
        writeln!(
            f,
            "lasso: terminal lambda={:.3e} dist_l1={:.3e} recovers={} in cone(S,1)={}",
            last.map_or(f64::NAN, |r| r.lambda),
            last.and_then(|r| r.dist_l1_to_truth).unwrap_or(f64::NAN),
            v.lasso_recovers,
            v.lasso_stays_in_cone
        )?;
        writeln!(
            f,
            "basis pursuit: max error {:.3e}",
            v.basis_pursuit_error_inf
        )?;
        write!(
            f,
            "verdict: {}",
            if self.consistent() {
                "consistent"
            } else {
                "DISCREPANCIES"
            }
        )
    }
}

/// Builds the instance for `c` and checks every non-recovery and recovery
/// claim on it.
pub fn reproduce(options: &ReproduceOptions) -> Result<(SparseInstance, RecoveryReport)> {
    let inst = construct(options.c)?;
    let config = BoostingConfig::new(options.nu, options.iterations)?;
    let mut discrepancies = Vec::new();
    let mut flag = |ok: bool, claim: &str, expected: String, observed: String| {
        if !ok {
            discrepancies.push(Discrepancy {
                claim: claim.to_string(),
                expected,
                observed,
            });
        }
    };

    let ns = nullspace(&inst.x, DEFAULT_RANK_TOLERANCE);
    let rn = rn_uniform(&inst.x, inst.s, options.c, &ns)?;
    flag(
        rn.holds,
        "uniform restricted nullspace property of order s",
        format!("holds for c = {}", options.c),
        format!("fails, critical c = {}", rn.critical_c),
    );

    let uniqueness = if inst.n <= 25 {
        let sol = unique_sparsest(&inst.x, &inst.y, inst.s)?;
        UniquenessEvidence::Enumerated {
            unique: sol.unique && sol.support == inst.support,
            support: sol.support.iter().map(|j| j + 1).collect(),
            supports_enumerated: sol.supports_enumerated,
        }
    } else {
        let spark = if ns.dim == 1 {
            ns.basis[0].iter().filter(|v| **v != 0.0).count()
        } else {
            0
        };
        UniquenessEvidence::SparkBound {
            spark,
            s: inst.s,
            holds: 2 * inst.s < spark,
        }
    };
    let unique = match &uniqueness {
        UniquenessEvidence::Enumerated { unique, .. } => *unique,
        UniquenessEvidence::SparkBound { holds, .. } => *holds,
    };
    flag(
        unique,
        "beta is the unique sparsest solution",
        "unique with support S".into(),
        format!("{uniqueness:?}"),
    );

    let re = re_lower_bound(
        &inst.x,
        &ConeSpec::new(inst.support.clone(), 1.0)?,
        options.re_samples,
        options.seed,
    )?;
    flag(
        re.phi_estimate > 0.0,
        "restricted eigenvalue over C(S, 1) is positive",
        "phi > 0".into(),
        format!("phi estimate {:e}", re.phi_estimate),
    );

    let truth = Truth::new(&inst.beta);
    let mut active_touched = false;
    let (records, stop) = boosting_records(&inst.x, &inst.y, config, Some(&truth), |state| {
        if inst.support.iter().any(|&j| state.beta[j] != 0.0) {
            active_touched = true;
        }
    })?;
    let dists: Vec<f64> = records.iter().filter_map(|r| r.dist_l1).collect();
    let min_dist = dists.iter().copied().fold(f64::INFINITY, f64::min);
    let never_active = !active_touched && records.iter().filter_map(|r| r.j_k).all(|j| j > inst.s);
    flag(
        never_active,
        "boosting never selects an active column",
        "beta_S = 0 at every k".into(),
        "an active coordinate moved".into(),
    );
    let floor = inst.s as f64 - 1e-12;
    flag(
        min_dist >= floor,
        "||beta^k - beta||_1 >= s at every k",
        format!(">= {floor}"),
        format!("min {min_dist}"),
    );
    let boosting_recovers = dists
        .last()
        .is_some_and(|&d| d <= options.recovery_tolerance);
    flag(
        !boosting_recovers,
        "boosting does not recover beta",
        "boosting_recovers = false".into(),
        "boosting_recovers = true".into(),
    );

    let ratios: Vec<f64> = records.iter().filter_map(|r| r.cone_ratio).collect();
    let stationary = stop == StopReason::ResidualFloor;
    let cone_exit_k = sustained_exit(
        &ratios,
        inst.cone_exit_threshold(),
        options.cone_window,
        stationary,
    );
    let conclusive = stationary || ratios.len() > options.cone_window;
    flag(
        cone_exit_k.is_some() || !conclusive,
        "boosting residual eventually leaves the cone C(S, c)",
        format!(
            "ratio > {} for {} consecutive iterates",
            inst.cone_exit_threshold(),
            options.cone_window
        ),
        format!("final ratio {:?}", ratios.last()),
    );

    let path_config = LassoPathConfig::with_lambda_min_ratio(options.lasso_lambda_min_ratio);
    let lasso = lasso_rows(&inst.x, &inst.y, &path_config, Some(&truth))?;
    let lasso_terminal = lasso
        .last()
        .and_then(|r| r.dist_l1_to_truth)
        .unwrap_or(f64::NAN);
    let lasso_recovers = lasso_terminal <= options.recovery_tolerance;
    flag(
        lasso_recovers,
        "Lasso recovers beta as lambda -> 0",
        format!("dist_l1 <= {}", options.recovery_tolerance),
        format!("dist_l1 = {lasso_terminal:e}"),
    );
    let lasso_in_cone = lasso_path(&inst.x, &inst.y, &path_config)?
        .iter()
        .all(|point| {
            let (_, on, off, _) = truth.split(&point.fit.beta);
            off <= on + 1e-6
        });
    flag(
        lasso_in_cone,
        "Lasso error stays in C(S, 1)",
        "||D_Sc||_1 <= ||D_S||_1 + 1e-6 on the whole path".into(),
        "violated at some lambda".into(),
    );
    let (bp_error, bp_observed) = match basis_pursuit(&inst.x, &inst.y, &path_config) {
        Ok(bp) => {
            let err = bp
                .beta
                .iter()
                .zip(&inst.beta)
                .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
            (err, format!("max error {err:e}"))
        }
        Err(e @ Error::InfeasibleAfterPolish { .. }) => (f64::INFINITY, e.to_string()),
        Err(e) => return Err(e),
    };
    flag(
        bp_error <= 1e-10,
        "basis pursuit returns beta",
        "max error <= 1e-10".into(),
        bp_observed,
    );

    let report = RecoveryReport {
        instance: InstanceSummary {
            n: inst.n,
            p: inst.p,
            s: inst.s,
            gamma: inst.gamma,
            c_target: inst.c_target,
            rn_bound: inst.rn_bound(),
            cone_exit_threshold: inst.cone_exit_threshold(),
        },
        options: options.clone(),
        rn_critical_c: rn.critical_c,
        rn_worst_support: rn.worst_support.iter().map(|j| j + 1).collect(),
        uniqueness,
        re_phi_estimate: re.phi_estimate,
        boosting_stop: match stop {
            StopReason::MaxIterations => "max-iterations".into(),
            StopReason::ResidualFloor => "residual-floor".into(),
        },
        boosting: records,
        lasso,
        verdicts: Verdicts {
            rn_holds: rn.holds,
            unique_sparsest: unique,
            re_positive: re.phi_estimate > 0.0,
            never_selects_active: never_active,
            boosting_recovers,
            min_boosting_dist_l1: min_dist,
            cone_exit_k,
            cone_exit_conclusive: conclusive,
            lasso_recovers,
            lasso_stays_in_cone: lasso_in_cone,
            basis_pursuit_error_inf: bp_error,
        },
        discrepancies,
    };
    Ok((inst, report))
}

pub const TRAJECTORY_CSV: &str = "boosting_trajectory.csv";
pub const LASSO_CSV: &str = "lasso_path.csv";
pub const REPORT_JSON: &str = "report.json";

/// Writes the instance files for `construct(c)` into `out`.
pub fn cmd_construct(c: f64, out: &Path) -> Result<SparseInstance> {
    let inst = construct(c)?;
    io::write_instance(out, &inst)?;
    Ok(inst)
}

/// [`reproduce`], writing instance files, both CSVs and `report.json` when
/// `out` is given.
pub fn cmd_reproduce(options: &ReproduceOptions, out: Option<&Path>) -> Result<RecoveryReport> {
    let (inst, report) = reproduce(options)?;
    if let Some(dir) = out {
        io::write_instance(dir, &inst)?;
        io::write_csv(&dir.join(TRAJECTORY_CSV), &report.trajectory_rows())?;
        io::write_csv(&dir.join(LASSO_CSV), &report.lasso)?;
        io::write_json(&dir.join(REPORT_JSON), &report)?;
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareOutput {
    pub boosting: Vec<TrajectoryRow>,
    pub lasso: Vec<LassoRow>,
}

/// Boosting and the Lasso path on an arbitrary instance, without verdicts.
pub fn compare(
    x: &DenseMatrix,
    y: &[f64],
    truth: Option<&[f64]>,
    nu: f64,
    iterations: usize,
    lambda_min_ratio: f64,
) -> Result<CompareOutput> {
    if let Some(beta) = truth {
        if beta.len() != x.cols() {
            return Err(Error::DimensionMismatch {
                context: "reference beta",
                expected: x.cols(),
                found: beta.len(),
            });
        }
    }
    let truth = truth.map(Truth::new);
    let (records, _) = boosting_records(
        x,
        y,
        BoostingConfig::new(nu, iterations)?,
        truth.as_ref(),
        |_| {},
    )?;
    let lasso = lasso_rows(
        x,
        y,
        &LassoPathConfig::with_lambda_min_ratio(lambda_min_ratio),
        truth.as_ref(),
    )?;
    Ok(CompareOutput {
        boosting: records.iter().map(TrajectoryRow::from).collect(),
        lasso,
    })
}

pub fn cmd_compare(
    x: &DenseMatrix,
    y: &[f64],
    truth: Option<&[f64]>,
    nu: f64,
    iterations: usize,
    lambda_min_ratio: f64,
    out: &Path,
) -> Result<CompareOutput> {
    let result = compare(x, y, truth, nu, iterations, lambda_min_ratio)?;
    io::write_csv(&out.join(TRAJECTORY_CSV), &result.boosting)?;
    io::write_csv(&out.join(LASSO_CSV), &result.lasso)?;
    Ok(result)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Property {
    Rn,
    RnUniform,
    Re,
    Rip,
    Spark,
    UniqueSparsest,
}

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Property::Rn => "rn",
            Property::RnUniform => "rn_uniform",
            Property::Re => "re",
            Property::Rip => "rip",
            Property::Spark => "spark",
            Property::UniqueSparsest => "unique_sparsest",
        }
    }
}

impl std::str::FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "rn" => Property::Rn,
            "rn_uniform" | "rn-uniform" => Property::RnUniform,
            "re" => Property::Re,
            "rip" => Property::Rip,
            "spark" => Property::Spark,
            "unique_sparsest" | "unique-sparsest" => Property::UniqueSparsest,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown property `{other}` (expected rn, rn_uniform, re, rip, spark, unique_sparsest)"
                )))
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertifyParams {
    pub t: Option<usize>,
    pub c: Option<f64>,
    pub s: Option<usize>,
    pub seed: u64,
    /// Index set `T` for `rn` and `re`, 1-based; defaults to `{1, …, t}`.
    pub support: Option<Vec<usize>>,
    /// Response for `unique_sparsest`.
    pub y: Option<Vec<f64>>,
    pub samples: usize,
}

impl Default for CertifyParams {
    fn default() -> Self {
        CertifyParams {
            t: None,
            c: None,
            s: None,
            seed: 0,
            support: None,
            y: None,
            samples: 10_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub property: String,
    pub parameters: BTreeMap<String, Value>,
    pub verdict: Value,
    pub witness: Option<Value>,
    /// `null` stands for an unbounded constant.
    pub critical_constants: BTreeMap<String, Option<f64>>,
    pub enumeration_counts: BTreeMap<String, u128>,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn method_name(m: RnMethod) -> &'static str {
    match m {
        RnMethod::TrivialNullspace => "trivial-nullspace",
        RnMethod::Exact1d => "exact-1d",
        RnMethod::Heuristic => "heuristic",
    }
}

/// Runs one certifier and packages the outcome.
pub fn certify(x: &DenseMatrix, property: Property, params: &CertifyParams) -> Result<Certificate> {
    let mut cert = Certificate {
        property: property.name().to_string(),
        parameters: BTreeMap::new(),
        verdict: Value::Null,
        witness: None,
        critical_constants: BTreeMap::new(),
        enumeration_counts: BTreeMap::new(),
    };
    cert.parameters.insert("n".into(), json!(x.rows()));
    cert.parameters.insert("p".into(), json!(x.cols()));
    let t = params.t.unwrap_or(1);
    let c = params.c.unwrap_or(1.0);
    let cone = || -> Result<ConeSpec> {
        let support: Vec<usize> = match &params.support {
            Some(s) => s
                .iter()
                .map(|&j| {
                    if j == 0 || j > x.cols() {
                        Err(Error::InvalidParameter(format!(
                            "support index {j} outside 1..={}",
                            x.cols()
                        )))
                    } else {
                        Ok(j - 1)
                    }
                })
                .collect::<Result<_>>()?,
            None => (0..t.min(x.cols())).collect(),
        };
        ConeSpec::new(support, c)
    };

    match property {
        Property::Rn => {
            let spec = cone()?;
            let ns = nullspace(x, DEFAULT_RANK_TOLERANCE);
            let verdict = rn_check_with(
                x,
                &spec,
                &ns,
                &HeuristicConfig {
                    samples: params.samples,
                    seed: params.seed,
                    ..HeuristicConfig::default()
                },
            );
            cert.parameters
                .insert("T".into(), json!(one_based(&spec.support)));
            cert.parameters.insert("c".into(), json!(c));
            cert.parameters.insert("seed".into(), json!(params.seed));
            cert.verdict = json!({ "holds": verdict.holds, "method": method_name(verdict.method) });
            cert.witness = verdict.witness.map(|w| json!(w));
            cert.critical_constants
                .insert("critical_c".into(), verdict.critical_c.and_then(finite));
            cert.enumeration_counts
                .insert("nullspace_dim".into(), ns.dim as u128);
        }
        Property::RnUniform => {
            let ns = nullspace(x, DEFAULT_RANK_TOLERANCE);
            let result = rn_uniform(x, t, c, &ns)?;
            cert.parameters.insert("t".into(), json!(t));
            cert.parameters.insert("c".into(), json!(c));
            cert.verdict = json!({ "holds": result.holds, "method": method_name(result.method) });
            cert.witness = result.witness.map(|w| json!(w));
            cert.critical_constants
                .insert("critical_c".into(), finite(result.critical_c));
            cert.parameters
                .insert("worst_T".into(), json!(one_based(&result.worst_support)));
            cert.enumeration_counts
                .insert("sets_checked".into(), result.sets_checked);
            cert.enumeration_counts
                .insert("nullspace_dim".into(), ns.dim as u128);
        }
        Property::Re => {
            let spec = cone()?;
            let est = re_lower_bound(x, &spec, params.samples, params.seed)?;
            cert.parameters
                .insert("T".into(), json!(one_based(&spec.support)));
            cert.parameters.insert("c".into(), json!(c));
            cert.parameters.insert("seed".into(), json!(params.seed));
            cert.verdict = json!({ "positive": est.phi_estimate > 0.0 });
            cert.witness = Some(json!(est.min_witness));
            cert.critical_constants
                .insert("phi_estimate".into(), finite(est.phi_estimate));
            cert.enumeration_counts
                .insert("samples".into(), est.samples_drawn as u128);
        }
        Property::Rip => {
            let r = rip_constant(x, t)?;
            cert.parameters.insert("t".into(), json!(t));
            cert.verdict = json!({ "delta_t": r.delta_t });
            cert.witness = Some(json!(one_based(&r.extremal_subset)));
            cert.critical_constants
                .insert("delta_t".into(), finite(r.delta_t));
            cert.enumeration_counts
                .insert("subsets".into(), r.subsets_checked);
        }
        Property::Spark => {
            let sc = properties::spark(x);
            let (kind, value) = match sc.spark {
                Spark::Exact(k) => ("exact", Some(k as f64)),
                Spark::AtLeast(k) => ("lower-bound", Some(k as f64)),
                Spark::Infinite => ("infinite", None),
            };
            cert.verdict = json!({ "spark": kind });
            cert.witness = Some(json!(one_based(&sc.witness_columns)));
            cert.critical_constants.insert("spark".into(), value);
            cert.enumeration_counts
                .insert("subsets".into(), sc.subsets_tested);
        }
        Property::UniqueSparsest => {
            let s = params.s.ok_or_else(|| {
                Error::InvalidParameter("unique_sparsest needs the sparsity s".into())
            })?;
            let y = params.y.as_ref().ok_or_else(|| {
                Error::InvalidParameter("unique_sparsest needs a response vector".into())
            })?;
            let sol = unique_sparsest(x, y, s)?;
            cert.parameters.insert("s".into(), json!(s));
            cert.verdict = json!({ "unique": sol.unique, "sparsity": sol.sparsity });
            cert.witness = Some(json!({
                "support": one_based(&sol.support),
                "coefficients": sol.coefficients,
            }));
            cert.enumeration_counts
                .insert("supports".into(), sol.supports_enumerated);
            cert.enumeration_counts.insert(
                "fitting_supports".into(),
                sol.fitting_supports.len() as u128,
            );
        }
    }
    Ok(cert)
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|j| j + 1).collect()
}
