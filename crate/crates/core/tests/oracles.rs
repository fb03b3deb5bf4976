//! Frozen values for the counterexample family, each checked against an
//! independent computation.

use approx::assert_relative_eq;
use itertools::Itertools;

use sparselab::boosting::{
    correlations, run, select_index, Booster, BoostingConfig, BoostingState,
};
use sparselab::counterexample::{
    analytic_rho, analytic_step, column_norms, construct, equivalence_check, AnalyticState,
    StepCase,
};
use sparselab::lasso::{
    basis_pursuit, kkt_residual, lambda_max, lasso, lasso_path, LassoConfig, LassoPathConfig,
};
use sparselab::linalg::{
    inner, l1_norm, least_squares_on_support, nullspace, symmetric_eigenvalues,
    DEFAULT_RANK_TOLERANCE,
};
use sparselab::properties::{
    re_lower_bound, rip_constant, rn_check, rn_uniform, rn_uniform_with, spark, unique_sparsest,
    ConeSpec, RnMethod, RnUniformOptions, Spark,
};
use sparselab::DenseMatrix;

/// `min over |T| = t` of `‖z_{Tᶜ}‖₁ / ‖z_T‖₁`, by brute force.
fn enumerated_critical_c(z: &[f64], t: usize) -> f64 {
    let total: f64 = z.iter().map(|v| v.abs()).sum();
    (0..z.len())
        .combinations(t)
        .map(|set| {
            let on: f64 = set.iter().map(|&j| z[j].abs()).sum();
            (total - on) / on
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn response_times_last_column() {
    let inst = construct(4.0).unwrap();
    assert_eq!(inner(&inst.y, &inst.x.column(25)).unwrap(), 3125.0);
}

#[test]
fn nullspace_is_spanned_by_z() {
    for c in [1.0, 4.0] {
        let inst = construct(c).unwrap();
        let ns = nullspace(&inst.x, DEFAULT_RANK_TOLERANCE);
        assert_eq!(ns.dim, 1);
        let v = &ns.basis[0];
        let scale = v[inst.p - 1];
        for (a, b) in v.iter().zip(&inst.z) {
            assert_relative_eq!(*a, scale * b, epsilon = 1e-12);
        }
    }
}

#[test]
fn least_squares_on_the_active_block() {
    let inst = construct(4.0).unwrap();
    let fit = least_squares_on_support(&inst.x, &inst.y, &[0, 1, 2, 3, 4]).unwrap();
    for b in &fit.coefficients {
        assert_relative_eq!(*b, 1.0, epsilon = 1e-12);
    }
    assert!(fit.residual_norm < 1e-10);

    let nine = construct(1.0).unwrap();
    assert!(
        least_squares_on_support(&nine.x, &nine.y, &[0, 1])
            .unwrap()
            .residual_norm
            > 1.0
    );
    // no 2-sparse fit anywhere
    for pair in (0..nine.p).combinations(2) {
        let fit = least_squares_on_support(&nine.x, &nine.y, &pair).unwrap();
        assert!(fit.residual_norm > 1e-6, "{pair:?}");
    }
}

#[test]
fn small_eigenvalue_cases() {
    assert_eq!(
        symmetric_eigenvalues(&DenseMatrix::identity(2)).unwrap(),
        vec![1.0, 1.0]
    );
    let d = symmetric_eigenvalues(&DenseMatrix::diagonal(&[2.0, 5.0]).unwrap()).unwrap();
    assert_eq!(d, vec![2.0, 5.0]);
}

#[test]
fn initial_boosting_state() {
    let inst = construct(4.0).unwrap();
    let state = BoostingState::init(&inst.y, inst.p);
    let mut expected = vec![0.0; 25];
    expected[..5].fill(25.0);
    assert_eq!(state.residual, expected);

    let rho = correlations(&inst.x, &inst.y).unwrap();
    assert_eq!(&rho[..5], &[25.0; 5]);
    assert!(rho[5..25].iter().all(|r| *r == 0.0));
    assert_relative_eq!(rho[25], 3125.0 / 3145f64.sqrt(), max_relative = 1e-14);
    assert_relative_eq!(rho[25], 55.7237, epsilon = 1e-4);
    assert_eq!(select_index(&rho), 25);

    assert_eq!(correlations(&inst.x, &[0.0; 25]).unwrap(), vec![0.0; 26]);
}

#[test]
fn first_two_full_steps() {
    let inst = construct(4.0).unwrap();
    let mut booster =
        Booster::new(&inst.x, &inst.y, BoostingConfig::new(1.0, 10).unwrap()).unwrap();
    let first = booster.step().unwrap();
    assert_eq!(first.selected, 25);
    let beta = &booster.state().beta;
    assert!(beta[..25].iter().all(|b| *b == 0.0));
    assert_relative_eq!(beta[25], 3125.0 / 3145.0, max_relative = 1e-14);
    // middle block ties at -3125/3145, smallest index wins
    let rho = &booster.state().rho;
    assert!(rho[25].abs() < 1e-12);
    for r in &rho[5..25] {
        assert_relative_eq!(*r, -3125.0 / 3145.0, max_relative = 1e-12);
    }
    assert_eq!(booster.step().unwrap().selected, 5);
}

#[test]
fn zero_residual_step_is_a_no_op() {
    let inst = construct(1.0).unwrap();
    let zero = vec![0.0; inst.n];
    let config = BoostingConfig::new(1.0, 5).unwrap();
    let state = BoostingState::init(&zero, inst.p);
    let next = sparselab::boosting::step(&state, &inst.x, &config).unwrap();
    assert_eq!(next.beta, state.beta);
    assert_eq!(next.residual, state.residual);
    assert_eq!(next.history, vec![0]);
}

#[test]
fn active_block_is_never_touched() {
    let inst = construct(4.0).unwrap();
    for nu in [1.0, 0.5] {
        let mut booster =
            Booster::new(&inst.x, &inst.y, BoostingConfig::new(nu, 500).unwrap()).unwrap();
        while booster.stop_reason().is_none() {
            let record = booster.step().unwrap();
            assert!(record.selected >= inst.s);
            assert!(booster.state().beta[..inst.s].iter().all(|b| *b == 0.0));
        }
    }
}

#[test]
fn orthonormal_design_converges_in_one_step() {
    let x = DenseMatrix::identity(4);
    let traj = run(&x, &x.column(0), BoostingConfig::new(1.0, 10).unwrap()).unwrap();
    assert_eq!(traj.final_state.k, 1);
    assert_eq!(traj.final_state.beta, vec![1.0, 0.0, 0.0, 0.0]);
}

#[test]
fn column_norm_closed_forms() {
    let inst = construct(4.0).unwrap();
    let norms = column_norms(&inst);
    assert_eq!(&norms[..5], &[25.0; 5]);
    assert_eq!(&norms[5..25], &[1.0; 20]);
    assert_relative_eq!(norms[25], 3145f64.sqrt());
    let nine = column_norms(&construct(1.0).unwrap());
    assert_relative_eq!(nine[9], 249f64.sqrt());
}

#[test]
fn analytic_recursion_examples() {
    let inst = construct(4.0).unwrap();
    let zero = AnalyticState::initial(&inst);
    let step = analytic_step(&zero, &inst, 1.0).unwrap();
    assert!(matches!(step.case, StepCase::LastColumn { .. }));
    assert_relative_eq!(step.state.c_p, 3125.0 / 3145.0, max_relative = 1e-14);
    assert_relative_eq!(step.state.c_p, 0.993641, epsilon = 1e-6);

    let rho = analytic_rho(&step.state, &inst);
    assert!(rho[25].abs() < 1e-12);
    let second = analytic_step(&step.state, &inst, 1.0).unwrap();
    assert_eq!(second.case, StepCase::Middle { column: 5 });
    assert_relative_eq!(second.state.c_mid[0], 3125.0 / 3145.0, max_relative = 1e-14);

    let half = analytic_step(&zero, &inst, 0.5).unwrap().state;
    assert_relative_eq!(half.c_p, 0.496820, epsilon = 1e-6);
    assert!(half.c_mid.iter().all(|c| *c == 0.0));

    let fixed = AnalyticState::new(&inst, vec![1.0; 20], 1.0).unwrap();
    assert!(analytic_rho(&fixed, &inst).iter().all(|r| *r == 0.0));
}

#[test]
fn recursion_matches_the_matrix_run() {
    let n25 = construct(4.0).unwrap();
    let r = equivalence_check(&n25, 1.0, 200).unwrap();
    assert!(r.max_deviation <= 1e-10);
    assert_eq!(r.selections[..2], [25, 5]);
    let n9 = construct(1.0).unwrap();
    assert!(equivalence_check(&n9, 0.1, 500).unwrap().max_deviation <= 1e-10);
    assert_eq!(equivalence_check(&n9, 0.5, 0).unwrap().max_deviation, 0.0);
}

#[test]
fn lasso_orthonormal_closed_form() {
    let x = DenseMatrix::identity(3);
    let y = [3.0, 0.0, 0.0];
    let fit = lasso(&x, &y, &LassoConfig::new(2.0)).unwrap();
    assert_eq!(fit.beta, vec![2.0, 0.0, 0.0]);
    assert_eq!(kkt_residual(&x, &y, &[2.0, 0.0, 0.0], 2.0).unwrap(), 0.0);

    let inst = construct(1.0).unwrap();
    let lmax = lambda_max(&inst.x, &inst.y).unwrap();
    let xty = inst.x.tr_mul_vec(&inst.y).unwrap();
    assert!(xty.iter().all(|v| v.abs() <= lmax / 2.0));
    assert!(lasso(&inst.x, &inst.y, &LassoConfig::new(lmax))
        .unwrap()
        .beta
        .iter()
        .all(|b| *b == 0.0));
    assert_eq!(
        kkt_residual(&inst.x, &inst.y, &vec![0.0; inst.p], lmax).unwrap(),
        0.0
    );
}

/// For small λ the n = 25 Lasso solution has support `S ∪ {p}` with
/// `b_j = 1 − λ/1250 − λ/10` on `S` and `b_p = λ/10`, so `‖b − β‖₁ = 0.604·λ`.
#[test]
fn lasso_closed_form_on_the_larger_instance() {
    let inst = construct(4.0).unwrap();
    assert_eq!(lambda_max(&inst.x, &inst.y).unwrap(), 6250.0);
    for lambda in [6.25, 0.625, 6.25e-3] {
        let fit = lasso(&inst.x, &inst.y, &LassoConfig::new(lambda)).unwrap();
        assert!(fit.converged);
        for j in 0..5 {
            assert_relative_eq!(
                fit.beta[j],
                1.0 - lambda / 1250.0 - lambda / 10.0,
                epsilon = 1e-9
            );
        }
        assert!(fit.beta[5..25].iter().all(|b| *b == 0.0));
        assert_relative_eq!(fit.beta[25], lambda / 10.0, epsilon = 1e-9);
        let dist: f64 = fit
            .beta
            .iter()
            .zip(&inst.beta)
            .map(|(a, b)| (a - b).abs())
            .sum();
        assert_relative_eq!(dist, 0.604 * lambda, max_relative = 1e-6);
    }
}

#[test]
fn lasso_path_limits() {
    let inst = construct(4.0).unwrap();
    let path = lasso_path(
        &inst.x,
        &inst.y,
        &LassoPathConfig::with_lambda_min_ratio(1e-6),
    )
    .unwrap();
    assert!(path[0].fit.beta.iter().all(|b| *b == 0.0));
    let last = path.last().unwrap();
    assert_relative_eq!(last.lambda, 6250.0 * 1e-6, max_relative = 1e-12);
    let dist: f64 = last
        .fit
        .beta
        .iter()
        .zip(&inst.beta)
        .map(|(a, b)| (a - b).abs())
        .sum();
    // closed form value, above the 1e-3 target at this lambda
    assert_relative_eq!(dist, 0.604 * last.lambda, max_relative = 1e-4);
    for pair in path.windows(2) {
        assert!(l1_norm(&pair[1].fit.beta) >= l1_norm(&pair[0].fit.beta) - 1e-8);
    }

    let deeper = lasso_path(
        &inst.x,
        &inst.y,
        &LassoPathConfig::with_lambda_min_ratio(1e-7),
    )
    .unwrap();
    let last = deeper.last().unwrap();
    let dist: f64 = last
        .fit
        .beta
        .iter()
        .zip(&inst.beta)
        .map(|(a, b)| (a - b).abs())
        .sum();
    assert!(dist <= 1e-3);
}

#[test]
fn basis_pursuit_returns_beta() {
    for c in [1.0, 4.0] {
        let inst = construct(c).unwrap();
        let bp = basis_pursuit(&inst.x, &inst.y, &LassoPathConfig::default()).unwrap();
        assert_eq!(bp.beta, inst.beta);
        // the polish may keep column p, which then drops to exactly zero
        let nonzero: Vec<usize> = (0..inst.p).filter(|&j| bp.beta[j] != 0.0).collect();
        assert_eq!(nonzero, inst.support);
        if inst.n == 9 {
            let sparsest = unique_sparsest(&inst.x, &inst.y, 3).unwrap();
            assert_eq!(sparsest.support, nonzero);
        }
    }
    let inst = construct(1.0).unwrap();
    let bp = basis_pursuit(&inst.x, &vec![0.0; inst.n], &LassoPathConfig::default()).unwrap();
    assert!(bp.beta.iter().all(|b| *b == 0.0));
}

#[test]
fn restricted_nullspace_certificates() {
    let inst = construct(4.0).unwrap();
    let ns = nullspace(&inst.x, DEFAULT_RANK_TOLERANCE);
    let holds = rn_check(&inst.x, &ConeSpec::new(0..5, 4.0).unwrap(), &ns);
    assert!(holds.holds);
    assert_eq!(holds.method, RnMethod::Exact1d);
    assert_relative_eq!(holds.critical_c.unwrap(), 4.2, epsilon = 1e-12);

    let fails = rn_check(&inst.x, &ConeSpec::new(0..5, 5.0).unwrap(), &ns);
    assert!(!fails.holds);
    let w = fails.witness.unwrap();
    let scale = w[25];
    for (a, b) in w.iter().zip(&inst.z) {
        assert_relative_eq!(*a, scale * b, epsilon = 1e-12);
    }

    let square = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
    let trivial = rn_check(
        &square,
        &ConeSpec::new([0], 100.0).unwrap(),
        &nullspace(&square, 1e-10),
    );
    assert!(trivial.holds);
    assert_eq!(trivial.method, RnMethod::TrivialNullspace);
}

#[test]
fn uniform_nullspace_constant_matches_enumeration() {
    for (c, t, expected) in [(4.0, 5, 4.2), (1.0, 3, 7.0 / 3.0)] {
        let inst = construct(c).unwrap();
        let ns = nullspace(&inst.x, DEFAULT_RANK_TOLERANCE);
        let oracle = enumerated_critical_c(&inst.z, t);
        assert_relative_eq!(oracle, expected, epsilon = 1e-12);
        let closed = rn_uniform(&inst.x, t, c, &ns).unwrap();
        assert_relative_eq!(closed.critical_c, expected, epsilon = 1e-12);
        let exhaustive = rn_uniform_with(
            &inst.x,
            t,
            c,
            &ns,
            &RnUniformOptions {
                exhaustive: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_relative_eq!(exhaustive.critical_c, expected, epsilon = 1e-12);
        assert!(closed.holds && exhaustive.holds);
    }
    let id = DenseMatrix::identity(4);
    assert!(
        rn_uniform(&id, 4, 1e6, &nullspace(&id, 1e-10))
            .unwrap()
            .holds
    );
}

#[test]
fn restricted_eigenvalue_is_positive() {
    let inst = construct(4.0).unwrap();
    let est = re_lower_bound(&inst.x, &ConeSpec::new(0..5, 1.0).unwrap(), 10_000, 0).unwrap();
    assert!(est.phi_estimate > 0.0);
}

#[test]
fn isometry_constants() {
    assert_eq!(
        rip_constant(&DenseMatrix::identity(5), 3).unwrap().delta_t,
        0.0
    );
    let inst = construct(1.0).unwrap();
    // the last column has ‖X_p‖² = (γ² − 1)s + n = 249
    let full = rip_constant(&inst.x, 1).unwrap();
    assert_eq!(full.delta_t, 248.0);
    assert_eq!(full.extremal_subset, vec![9]);
    let active = rip_constant(&inst.x.select_columns(&[0, 1, 2]), 1).unwrap();
    assert_eq!(active.delta_t, 80.0);
}

#[test]
fn spark_and_uniqueness_on_the_small_instance() {
    let inst = construct(1.0).unwrap();
    let cert = spark(&inst.x);
    // z has full support, so all p columns are needed for a dependency
    assert_eq!(cert.spark, Spark::Exact(10));
    assert!(cert.guarantees_uniqueness(3));
    let sol = unique_sparsest(&inst.x, &inst.y, 3).unwrap();
    assert!(sol.unique);
    assert_eq!(sol.support, vec![0, 1, 2]);
    assert_eq!(sol.supports_enumerated, 1 + 10 + 45 + 120);
}
