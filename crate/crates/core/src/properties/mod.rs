//! Certifiers for sparsity properties of a design matrix: cone membership,
//! restricted nullspace (exact when the nullspace is at most one-dimensional),
//! restricted eigenvalue estimates, restricted isometry constants, spark and
//! sparsest-solution uniqueness.
//!
//! Subset enumerations run in lexicographic order and break ties in favor of
//! the lexicographically first subset, so results are deterministic.

mod cone;
mod isometry;
mod spark;

pub use cone::{
    cone_ratio, in_cone, l1_split, re_lower_bound, rn_check, rn_check_with, rn_uniform,
    rn_uniform_with, ConeSpec, HeuristicConfig, ReEstimate, RnMethod, RnUniformOptions,
    RnUniformResult, RnVerdict,
};
pub use isometry::{
    check_rip_implies_rn, rip_constant, rip_constant_with_budget, rip_implies_rn_test, RipResult,
    RipRnOutcome, RipRnReport,
};
pub use spark::{
    spark, spark_with, unique_sparsest, unique_sparsest_with_budget, Spark, SparsestSolution,
    SparsityCertificate,
};

/// Largest number of subsets an enumeration may visit before refusing.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 10_000_000;

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}
