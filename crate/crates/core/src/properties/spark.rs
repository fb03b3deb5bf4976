use itertools::Itertools;
use serde::Serialize;

use super::{binomial, DEFAULT_ENUMERATION_BUDGET};
use crate::error::{Error, Result};
use crate::linalg::{l2_norm, least_squares_on_support, rank, DenseMatrix, DEFAULT_RANK_TOLERANCE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Spark {
    Exact(usize),
    /// The budget ran out before subsets of this size were tested; the spark
    /// is at least this value.
    AtLeast(usize),
    /// All columns are linearly independent.
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SparsityCertificate {
    pub spark: Spark,
    /// Minimal dependent column set (0-based); empty unless the spark is exact.
    pub witness_columns: Vec<usize>,
    pub subsets_tested: u128,
}

impl SparsityCertificate {
    /// Whether `s < spark / 2` is established by this certificate.
    pub fn guarantees_uniqueness(&self, s: usize) -> bool {
        match self.spark {
            Spark::Exact(k) => 2 * s < k,
            Spark::AtLeast(k) => 2 * s < k,
            Spark::Infinite => true,
        }
    }
}

pub fn spark(x: &DenseMatrix) -> SparsityCertificate {
    spark_with(x, DEFAULT_RANK_TOLERANCE, DEFAULT_ENUMERATION_BUDGET)
}

/// Smallest number of linearly dependent columns, by enumerating subsets of
/// increasing size.
pub fn spark_with(x: &DenseMatrix, rank_tolerance: f64, budget: u128) -> SparsityCertificate {
    let p = x.cols();
    let mut tested: u128 = 0;
    for k in 1..=p {
        if tested.saturating_add(binomial(p, k)) > budget {
            return SparsityCertificate {
                spark: Spark::AtLeast(k),
                witness_columns: Vec::new(),
                subsets_tested: tested,
            };
        }
        for subset in (0..p).combinations(k) {
            tested += 1;
            if rank(&x.select_columns(&subset), rank_tolerance) < k {
                return SparsityCertificate {
                    spark: Spark::Exact(k),
                    witness_columns: subset,
                    subsets_tested: tested,
                };
            }
        }
    }
    SparsityCertificate {
        spark: Spark::Infinite,
        witness_columns: Vec::new(),
        subsets_tested: tested,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SparsestSolution {
    pub unique: bool,
    /// Size of the sparsest fitting support.
    pub sparsity: usize,
    /// Every fitting support of that size (0-based).
    pub fitting_supports: Vec<Vec<usize>>,
    /// The fitting support when unique, else the first one found.
    pub support: Vec<usize>,
    /// Coefficients of `support`, in its order.
    pub coefficients: Vec<f64>,
    pub supports_enumerated: u128,
}

pub fn unique_sparsest(x: &DenseMatrix, y: &[f64], s: usize) -> Result<SparsestSolution> {
    unique_sparsest_with_budget(x, y, s, DEFAULT_ENUMERATION_BUDGET)
}

/// Enumerates every support of size at most `s` and collects the exact fits
/// (`residual <= 1e-8·‖Y‖₂`).
pub fn unique_sparsest_with_budget(
    x: &DenseMatrix,
    y: &[f64],
    s: usize,
    budget: u128,
) -> Result<SparsestSolution> {
    let p = x.cols();
    let s = s.min(p);
    let needed = (0..=s).fold(0u128, |acc, k| acc.saturating_add(binomial(p, k)));
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let tolerance = 1e-8 * l2_norm(y);
    // (sparsity, [(support, coefficients)])
    type Fits = Vec<(Vec<usize>, Vec<f64>)>;
    let mut minimal: Option<(usize, Fits)> = None;
    let mut enumerated: u128 = 0;
    for k in 0..=s {
        for support in (0..p).combinations(k) {
            enumerated += 1;
            let fit = least_squares_on_support(x, y, &support)?;
            if fit.residual_norm > tolerance {
                continue;
            }
            match &mut minimal {
                None => minimal = Some((k, vec![(support, fit.coefficients)])),
                Some((size, fits)) if *size == k => fits.push((support, fit.coefficients)),
                Some(_) => {}
            }
        }
    }
    let (sparsity, fits) = minimal.ok_or(Error::NoSparseSolution { s })?;
    let unique = fits.len() == 1;
    let (support, coefficients) = fits[0].clone();
    Ok(SparsestSolution {
        unique,
        sparsity,
        fitting_supports: fits.into_iter().map(|(t, _)| t).collect(),
        support,
        coefficients,
        supports_enumerated: enumerated,
    })
}
