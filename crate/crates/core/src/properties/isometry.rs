use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::cone::rn_uniform;
use super::{binomial, DEFAULT_ENUMERATION_BUDGET};
use crate::error::{Error, Result};
use crate::linalg::{nullspace, symmetric_eigenvalues, DenseMatrix, DEFAULT_RANK_TOLERANCE};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RipResult {
    pub t: usize,
    pub delta_t: f64,
    /// First subset (lexicographically) attaining `delta_t`, 0-based.
    pub extremal_subset: Vec<usize>,
    pub subsets_checked: u128,
}

pub fn rip_constant(x: &DenseMatrix, t: usize) -> Result<RipResult> {
    rip_constant_with_budget(x, t, DEFAULT_ENUMERATION_BUDGET)
}

/// Restricted isometry constant of order `t`.
///
/// Only subsets of size exactly `t` are visited: by eigenvalue interlacing the
/// spectrum of a principal submatrix of `X_TᵀX_T` lies inside that of the full
/// Gram block, so smaller subsets never give a larger deviation.
pub fn rip_constant_with_budget(x: &DenseMatrix, t: usize, budget: u128) -> Result<RipResult> {
    let p = x.cols();
    if t > p {
        return Err(Error::InvalidParameter(format!(
            "RIP order {t} exceeds the {p} columns"
        )));
    }
    let needed = binomial(p, t);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut best = (0.0_f64, (0..t).collect::<Vec<_>>());
    if t == 0 {
        return Ok(RipResult {
            t,
            delta_t: 0.0,
            extremal_subset: Vec::new(),
            subsets_checked: 1,
        });
    }
    let mut first = true;
    for subset in (0..p).combinations(t) {
        let ev = symmetric_eigenvalues(&x.select_columns(&subset).gram())?;
        let lo = ev[0];
        let hi = ev[ev.len() - 1];
        let dev = (hi - 1.0).max(1.0 - lo).max(0.0);
        if first || dev > best.0 {
            best = (dev, subset);
            first = false;
        }
    }
    Ok(RipResult {
        t,
        delta_t: best.0,
        extremal_subset: best.1,
        subsets_checked: needed,
    })
}

/// The implication `δ_{2t} < 1/3 ⇒ RN_unif(t, 1)` checked on one matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RipRnOutcome {
    pub delta_2t: f64,
    pub premise: bool,
    /// Only evaluated when the premise holds.
    pub rn_uniform_holds: Option<bool>,
}

impl RipRnOutcome {
    pub fn violated(&self) -> bool {
        self.premise && self.rn_uniform_holds == Some(false)
    }
}

pub fn check_rip_implies_rn(x: &DenseMatrix, t: usize) -> Result<RipRnOutcome> {
    let delta_2t = rip_constant(x, (2 * t).min(x.cols()))?.delta_t;
    let premise = delta_2t < 1.0 / 3.0;
    let rn_uniform_holds = if premise {
        let ns = nullspace(x, DEFAULT_RANK_TOLERANCE);
        Some(rn_uniform(x, t, 1.0, &ns)?.holds)
    } else {
        None
    };
    Ok(RipRnOutcome {
        delta_2t,
        premise,
        rn_uniform_holds,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RipRnReport {
    pub n: usize,
    pub p: usize,
    pub t: usize,
    pub trials: usize,
    /// Trials with `δ_{2t} < 1/3`.
    pub premise_met: usize,
    /// Trials where the implication says nothing.
    pub vacuous: usize,
    /// Trial indices where the premise held and `RN_unif(t, 1)` failed.
    pub violations: Vec<usize>,
    pub min_delta_2t: f64,
    pub max_delta_2t: f64,
}

/// Draws `trials` Gaussian `n × (n+1)` matrices with unit-norm columns and
/// checks the implication on each. With `p = n + 1` the nullspace is at most
/// one-dimensional, so the RN side is exact.
pub fn rip_implies_rn_test(n: usize, trials: usize, t: usize, seed: u64) -> Result<RipRnReport> {
    if n == 0 || t == 0 {
        return Err(Error::InvalidParameter("need n >= 1 and t >= 1".into()));
    }
    let p = n + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = RipRnReport {
        n,
        p,
        t,
        trials,
        premise_met: 0,
        vacuous: 0,
        violations: Vec::new(),
        min_delta_2t: f64::INFINITY,
        max_delta_2t: 0.0,
    };
    for trial in 0..trials {
        let columns: Vec<Vec<f64>> = (0..p)
            .map(|_| {
                let mut c: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
                c.iter_mut().for_each(|v| *v /= norm);
                c
            })
            .collect();
        let x = DenseMatrix::from_columns(&columns)?;
        let outcome = check_rip_implies_rn(&x, t)?;
        report.min_delta_2t = report.min_delta_2t.min(outcome.delta_2t);
        report.max_delta_2t = report.max_delta_2t.max(outcome.delta_2t);
        if outcome.premise {
            report.premise_met += 1;
        } else {
            report.vacuous += 1;
        }
        if outcome.violated() {
            report.violations.push(trial);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn orthonormal_columns_are_isometric() {
        let (c, s) = (0.6, 0.8);
        let x = DenseMatrix::from_rows(&[vec![c, -s, 0.0], vec![s, c, 0.0], vec![0.0, 0.0, 1.0]])
            .unwrap();
        for t in 0..=3 {
            assert!(rip_constant(&x, t).unwrap().delta_t < 1e-14);
        }
    }

    #[test]
    fn scalar_matrix() {
        let x = DenseMatrix::diagonal(&[2.0]).unwrap();
        let r = rip_constant(&x, 1).unwrap();
        assert_relative_eq!(r.delta_t, 3.0);
        assert_eq!(r.extremal_subset, vec![0]);
    }

    #[test]
    fn duplicated_column_makes_the_premise_vacuous() {
        let x = DenseMatrix::from_rows(&[vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let outcome = check_rip_implies_rn(&x, 1).unwrap();
        assert!(outcome.delta_2t >= 1.0 - 1e-12);
        assert!(!outcome.premise);
        assert_eq!(outcome.rn_uniform_holds, None);
    }

    #[test]
    fn delta_is_monotone_in_t() {
        let x = DenseMatrix::from_rows(&[
            vec![1.0, 0.2, -0.3, 0.5],
            vec![0.1, 0.9, 0.4, -0.2],
            vec![0.0, 0.3, 1.1, 0.6],
        ])
        .unwrap();
        let deltas: Vec<f64> = (1..=4)
            .map(|t| rip_constant(&x, t).unwrap().delta_t)
            .collect();
        assert!(
            deltas.windows(2).all(|w| w[1] >= w[0] - 1e-12),
            "{deltas:?}"
        );
    }

    #[test]
    fn budget_refusal() {
        let x = DenseMatrix::identity(10);
        assert!(matches!(
            rip_constant_with_budget(&x, 5, 100),
            Err(Error::BudgetExceeded { needed: 252, .. })
        ));
    }
}
