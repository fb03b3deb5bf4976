//! Lasso by cyclic coordinate descent and basis pursuit as its λ → 0 limit.
//!
//! The objective is `‖Y − Xb‖₂² + λ‖b‖₁` with no `1/(2n)` factor, so the
//! coordinate update soft-thresholds at `λ/2`.

use crate::error::{Error, Result};
use crate::linalg::{l1_norm, l2_norm, least_squares_on_support, DenseMatrix};

#[derive(Clone, Debug, PartialEq)]
pub struct LassoConfig {
    pub lambda: f64,
    pub max_sweeps: usize,
    pub kkt_tolerance: f64,
    pub warm_start: Option<Vec<f64>>,
}

impl LassoConfig {
    pub fn new(lambda: f64) -> Self {
        LassoConfig {
            lambda,
            max_sweeps: 100_000,
            kkt_tolerance: 1e-10,
            warm_start: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LassoFit {
    pub beta: Vec<f64>,
    pub objective: f64,
    pub sweeps: usize,
    pub converged: bool,
    pub kkt_residual: f64,
    /// Largest increase of the objective between consecutive sweeps
    /// (non-positive for a monotone run).
    pub max_objective_increase: f64,
}

pub fn soft_threshold(z: f64, tau: f64) -> f64 {
    z.signum() * (z.abs() - tau).max(0.0)
}

pub fn objective(x: &DenseMatrix, y: &[f64], b: &[f64], lambda: f64) -> Result<f64> {
    let xb = x.mul_vec(b)?;
    let rss: f64 = y.iter().zip(&xb).map(|(a, c)| (a - c).powi(2)).sum();
    Ok(rss + lambda * l1_norm(b))
}

/// Largest violation of the Lasso optimality conditions at `b`.
///
/// For `b_j = 0` this is `max(|X_jᵀr| − λ/2, 0)`, otherwise
/// `|X_jᵀr − (λ/2)·sign(b_j)|`, with `r = Y − Xb`.
pub fn kkt_residual(x: &DenseMatrix, y: &[f64], b: &[f64], lambda: f64) -> Result<f64> {
    let xb = x.mul_vec(b)?;
    if y.len() != x.rows() {
        return Err(Error::DimensionMismatch {
            context: "kkt response",
            expected: x.rows(),
            found: y.len(),
        });
    }
    let r: Vec<f64> = y.iter().zip(&xb).map(|(a, c)| a - c).collect();
    let grad = x.tr_mul_vec(&r)?;
    let half = lambda / 2.0;
    Ok(grad.iter().zip(b).fold(0.0_f64, |worst, (&g, &bj)| {
        let v = if bj == 0.0 {
            (g.abs() - half).max(0.0)
        } else {
            (g - half * bj.signum()).abs()
        };
        worst.max(v)
    }))
}

fn check_inputs(x: &DenseMatrix, y: &[f64]) -> Result<Vec<f64>> {
    if y.len() != x.rows() {
        return Err(Error::DimensionMismatch {
            context: "lasso response",
            expected: x.rows(),
            found: y.len(),
        });
    }
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

/// Cyclic coordinate descent over columns `0..p`.
///
/// Non-convergence within `max_sweeps` is reported through
/// [`LassoFit::converged`], not as an error.
pub fn lasso(x: &DenseMatrix, y: &[f64], config: &LassoConfig) -> Result<LassoFit> {
    if config.lambda.is_nan() || config.lambda <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "lambda must be positive, got {}",
            config.lambda
        )));
    }
    let sq_norms = check_inputs(x, y)?;
    let p = x.cols();
    let mut b = match &config.warm_start {
        Some(w) if w.len() == p => w.clone(),
        Some(w) => {
            return Err(Error::DimensionMismatch {
                context: "lasso warm start",
                expected: p,
                found: w.len(),
            })
        }
        None => vec![0.0; p],
    };
    let half = config.lambda / 2.0;
    let xb = x.mul_vec(&b)?;
    let mut r: Vec<f64> = y.iter().zip(&xb).map(|(a, c)| a - c).collect();

    let mut prev_objective = objective(x, y, &b, config.lambda)?;
    let mut max_increase = f64::NEG_INFINITY;
    let mut kkt = kkt_residual(x, y, &b, config.lambda)?;
    let mut sweeps = 0;
    while kkt > config.kkt_tolerance && sweeps < config.max_sweeps {
        for j in 0..p {
            let z = x.column_dot(j, &r) + sq_norms[j] * b[j];
            let updated = soft_threshold(z, half) / sq_norms[j];
            let delta = updated - b[j];
            if delta != 0.0 {
                for (i, ri) in r.iter_mut().enumerate() {
                    *ri -= delta * x.get(i, j);
                }
                b[j] = updated;
            }
        }
        sweeps += 1;
        // refresh the running residual so rounding drift cannot accumulate
        let xb = x.mul_vec(&b)?;
        r.iter_mut()
            .zip(y.iter().zip(&xb))
            .for_each(|(ri, (a, c))| *ri = a - c);
        let obj = l2_norm(&r).powi(2) + config.lambda * l1_norm(&b);
        max_increase = max_increase.max(obj - prev_objective);
        prev_objective = obj;
        kkt = kkt_residual(x, y, &b, config.lambda)?;
    }
    Ok(LassoFit {
        objective: objective(x, y, &b, config.lambda)?,
        beta: b,
        sweeps,
        converged: kkt <= config.kkt_tolerance,
        kkt_residual: kkt,
        max_objective_increase: if sweeps == 0 { 0.0 } else { max_increase },
    })
}

/// Smallest λ whose Lasso solution is zero: `2·max_j|⟨X_j, Y⟩|`.
pub fn lambda_max(x: &DenseMatrix, y: &[f64]) -> Result<f64> {
    let g = x.tr_mul_vec(y)?;
    Ok(2.0 * g.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LassoPathConfig {
    /// The path starts at `lambda_max_factor · λ_max`.
    pub lambda_max_factor: f64,
    /// Geometric decay between consecutive λ, in `(0, 1)`.
    pub decay: f64,
    /// Terminal λ as a fraction of `λ_max`.
    pub lambda_min_ratio: f64,
    pub max_sweeps: usize,
    pub kkt_tolerance: f64,
    /// Relative threshold `|b_j| > support_threshold · max|b|` used by the
    /// basis-pursuit polish.
    pub support_threshold: f64,
}

impl Default for LassoPathConfig {
    fn default() -> Self {
        LassoPathConfig {
            lambda_max_factor: 1.0,
            decay: 0.5,
            lambda_min_ratio: 1e-6,
            max_sweeps: 100_000,
            kkt_tolerance: 1e-10,
            support_threshold: 1e-6,
        }
    }
}

impl LassoPathConfig {
    pub fn with_lambda_min_ratio(lambda_min_ratio: f64) -> Self {
        LassoPathConfig {
            lambda_min_ratio,
            ..LassoPathConfig::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.decay > 0.0 && self.decay < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "path decay must lie in (0, 1), got {}",
                self.decay
            )));
        }
        if !(self.lambda_min_ratio > 0.0 && self.lambda_min_ratio < self.lambda_max_factor) {
            return Err(Error::InvalidParameter(format!(
                "lambda_min_ratio {} must lie in (0, lambda_max_factor = {})",
                self.lambda_min_ratio, self.lambda_max_factor
            )));
        }
        Ok(())
    }

    /// The λ grid for a given `λ_max`.
    pub fn lambdas(&self, lambda_max: f64) -> Vec<f64> {
        let lambda_min = self.lambda_min_ratio * lambda_max;
        let mut out = vec![self.lambda_max_factor * lambda_max];
        while *out.last().unwrap() > lambda_min {
            let next = (out.last().unwrap() * self.decay).max(lambda_min);
            out.push(next);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathPoint {
    pub lambda: f64,
    pub fit: LassoFit,
}

/// Warm-started Lasso solutions along a geometric λ grid from `λ_max` down to
/// `lambda_min_ratio · λ_max`. A response orthogonal to every column yields
/// the single point `(0, 0)`.
pub fn lasso_path(x: &DenseMatrix, y: &[f64], config: &LassoPathConfig) -> Result<Vec<PathPoint>> {
    config.validate()?;
    check_inputs(x, y)?;
    let lmax = lambda_max(x, y)?;
    if lmax == 0.0 {
        return Ok(vec![PathPoint {
            lambda: 0.0,
            fit: LassoFit {
                beta: vec![0.0; x.cols()],
                objective: l2_norm(y).powi(2),
                sweeps: 0,
                converged: true,
                kkt_residual: 0.0,
                max_objective_increase: 0.0,
            },
        }]);
    }
    let mut warm: Option<Vec<f64>> = None;
    let mut out = Vec::new();
    for lambda in config.lambdas(lmax) {
        let fit = lasso(
            x,
            y,
            &LassoConfig {
                lambda,
                max_sweeps: config.max_sweeps,
                kkt_tolerance: config.kkt_tolerance,
                warm_start: warm.take(),
            },
        )?;
        warm = Some(fit.beta.clone());
        out.push(PathPoint { lambda, fit });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisPursuitFit {
    pub beta: Vec<f64>,
    /// Columns kept by the polish (0-based).
    pub support: Vec<usize>,
    pub terminal_lambda: f64,
    pub residual_norm: f64,
}

/// Minimum-ℓ₁ solution of `Y = Xb`, taken as the terminal point of the Lasso
/// path and polished by least squares on its support.
pub fn basis_pursuit(
    x: &DenseMatrix,
    y: &[f64],
    config: &LassoPathConfig,
) -> Result<BasisPursuitFit> {
    let path = lasso_path(x, y, config)?;
    let terminal = path.last().expect("path is never empty");
    let b = &terminal.fit.beta;
    let top = b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let support: Vec<usize> = (0..b.len())
        .filter(|&j| top > 0.0 && b[j].abs() > config.support_threshold * top)
        .collect();
    let fit = least_squares_on_support(x, y, &support)?;
    let mut beta = vec![0.0; x.cols()];
    for (&j, &c) in support.iter().zip(&fit.coefficients) {
        beta[j] = c;
    }
    let tolerance = 1e-8 * l2_norm(y);
    if fit.residual_norm > tolerance {
        return Err(Error::InfeasibleAfterPolish {
            residual: fit.residual_norm,
            tolerance,
        });
    }
    Ok(BasisPursuitFit {
        beta,
        support,
        terminal_lambda: terminal.lambda,
        residual_norm: fit.residual_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn orthonormal() -> DenseMatrix {
        let (c, s) = (0.6, 0.8);
        DenseMatrix::from_rows(&[vec![c, -s, 0.0], vec![s, c, 0.0], vec![0.0, 0.0, 1.0]]).unwrap()
    }

    fn generic() -> (DenseMatrix, Vec<f64>) {
        let x = DenseMatrix::from_rows(&[
            vec![1.0, 0.3, -0.2, 0.5, 0.1],
            vec![0.2, 1.0, 0.4, -0.1, 0.3],
            vec![-0.1, 0.2, 1.0, 0.3, -0.4],
            vec![0.4, -0.3, 0.1, 1.0, 0.2],
        ])
        .unwrap();
        (x, vec![1.0, -0.5, 0.25, 2.0])
    }

    #[test]
    fn soft_threshold_cases() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
        assert_eq!(soft_threshold(0.5, 1.0), 0.0);
    }

    #[test]
    fn orthonormal_closed_form() {
        let x = orthonormal();
        let y: Vec<f64> = x.column(0).iter().map(|v| 3.0 * v).collect();
        let fit = lasso(&x, &y, &LassoConfig::new(2.0)).unwrap();
        assert!(fit.converged);
        assert_relative_eq!(fit.beta[0], 2.0, epsilon = 1e-12);
        assert!(fit.beta[1].abs() < 1e-12 && fit.beta[2].abs() < 1e-12);
        assert!(kkt_residual(&x, &y, &[2.0, 0.0, 0.0], 2.0).unwrap() < 1e-14);
    }

    #[test]
    fn large_lambda_gives_zero() {
        let (x, y) = generic();
        let lmax = lambda_max(&x, &y).unwrap();
        let g = x.tr_mul_vec(&y).unwrap();
        assert!(g.iter().all(|v| v.abs() <= lmax / 2.0));
        let fit = lasso(&x, &y, &LassoConfig::new(lmax * 1.5)).unwrap();
        assert_eq!(fit.beta, vec![0.0; 5]);
        assert_eq!(fit.sweeps, 0);
        assert_eq!(kkt_residual(&x, &y, &[0.0; 5], lmax).unwrap(), 0.0);
    }

    #[test]
    fn invalid_lambda_is_rejected() {
        let (x, y) = generic();
        assert!(lasso(&x, &y, &LassoConfig::new(0.0)).is_err());
    }

    #[test]
    fn non_convergence_is_flagged() {
        let (x, y) = generic();
        let mut config = LassoConfig::new(1e-3);
        config.max_sweeps = 1;
        let fit = lasso(&x, &y, &config).unwrap();
        assert!(!fit.converged);
        assert_eq!(fit.sweeps, 1);
    }

    #[test]
    fn path_starts_at_zero_and_grows() {
        let (x, y) = generic();
        let path = lasso_path(&x, &y, &LassoPathConfig::default()).unwrap();
        assert_eq!(path[0].fit.beta, vec![0.0; 5]);
        let norms: Vec<f64> = path.iter().map(|p| l1_norm(&p.fit.beta)).collect();
        assert!(norms.windows(2).all(|w| w[1] >= w[0] - 1e-8), "{norms:?}");
        for point in &path {
            assert!(point.fit.converged);
            assert!(point.fit.max_objective_increase <= 1e-10);
        }
    }

    #[test]
    fn warm_and_cold_paths_agree() {
        let (x, y) = generic();
        let config = LassoPathConfig::with_lambda_min_ratio(1e-4);
        for point in lasso_path(&x, &y, &config).unwrap() {
            let cold = lasso(&x, &y, &LassoConfig::new(point.lambda)).unwrap();
            for (a, b) in cold.beta.iter().zip(&point.fit.beta) {
                assert!((a - b).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn zero_response() {
        let (x, _) = generic();
        let bp = basis_pursuit(&x, &[0.0; 4], &LassoPathConfig::default()).unwrap();
        assert_eq!(bp.beta, vec![0.0; 5]);
        assert!(bp.support.is_empty());
    }

    #[test]
    fn lambda_grid_ends_exactly_at_lambda_min() {
        let config = LassoPathConfig::with_lambda_min_ratio(1e-3);
        let grid = config.lambdas(8.0);
        assert_eq!(grid[0], 8.0);
        assert_eq!(*grid.last().unwrap(), 8e-3);
        assert!(grid.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn infeasible_polish_is_an_error() {
        // Y outside the column span: no exact fit exists
        let x = DenseMatrix::from_rows(&[vec![1.0], vec![0.0]]).unwrap();
        assert!(matches!(
            basis_pursuit(&x, &[1.0, 1.0], &LassoPathConfig::default()),
            Err(Error::InfeasibleAfterPolish { .. })
        ));
    }
}
