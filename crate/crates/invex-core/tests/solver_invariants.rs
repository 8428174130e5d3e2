//! Solver-level invariants: monotone descent, sufficient decrease,
//! stationarity at exit, global-optimality spot checks, and the
//! plug-and-play residual bound.

use invex_core::checks;
use invex_core::linalg::{norm2, norm2_diff};
use invex_core::linops::{estimate_lipschitz, DenseMatrix, LinearOperator};
use invex_core::regularizers::{min_epsilon, Regularizer};
use invex_core::rng;
use invex_core::solvers::{apg, prox_gradient_residual, Problem, SolverConfig};
use nalgebra::DMatrix;

fn study_regularizers() -> Vec<Regularizer> {
    checks::study_regularizers()
}

/// Well-conditioned square operator `I + s G` with seeded Gaussian `G`.
fn near_identity(n: usize, s: f64, seed: u64) -> DenseMatrix {
    let mut r = rng::seeded(seed);
    DenseMatrix::from_fn(n, n, |i, j| {
        let base = if i == j { 1.0 } else { 0.0 };
        base + s * rng::gaussian(&mut r) / (n as f64).sqrt()
    })
}

#[test]
fn apg_descent_suite() {
    let report = checks::check_apg_descent(8);
    assert!(
        report.passed(),
        "{} failures: {}",
        report.failures,
        report.details.join("\n")
    );
}

#[test]
fn folded_decrease_suite() {
    let report = checks::check_folded_decrease(8);
    assert!(
        report.passed(),
        "{} failures: {}",
        report.failures,
        report.details.join("\n")
    );
}

#[test]
fn pnp_residual_suite() {
    let report = checks::check_pnp_residual();
    assert!(
        report.passed(),
        "{} failures: {}",
        report.failures,
        report.details.join("\n")
    );
}

#[test]
fn stationarity_at_exit() {
    // On well-conditioned instances the proximal-gradient residual at the
    // final iterate must drop below 1e-5 after a long run.
    let n = 16;
    let op = near_identity(n, 0.1, 51);
    let mut r = rng::seeded(52);
    let b: Vec<f64> = (0..n).map(|_| rng::gaussian(&mut r)).collect();
    let l = estimate_lipschitz(&op, 3000, 1e-13, 53);
    for reg in study_regularizers() {
        let prob = Problem::new(op.clone(), b.clone(), reg, 0.3).unwrap();
        let cfg = SolverConfig::new(2000, l);
        let alpha = cfg.alpha1;
        let (x, _) = apg(&prob, &cfg).unwrap();
        let res = prox_gradient_residual(&prob, &x, alpha).unwrap();
        assert!(res < 1e-5, "{}: residual {res}", reg.kind().name());
    }
}

#[test]
fn multistart_reaches_common_objective() {
    // Global-optimality spot check: ten random starts land on objective
    // values within 1e-6 of each other on a 16-dim well-conditioned
    // instance, for every kind.
    let n = 16;
    let op = near_identity(n, 0.1, 61);
    let mut r = rng::seeded(62);
    let b: Vec<f64> = (0..n).map(|_| rng::gaussian(&mut r)).collect();
    let l = estimate_lipschitz(&op, 3000, 1e-13, 63);
    for reg in study_regularizers() {
        let prob = Problem::new(op.clone(), b.clone(), reg, 0.1).unwrap();
        let mut best = f64::INFINITY;
        let mut worst = f64::NEG_INFINITY;
        for start in 0..10 {
            let mut rs = rng::seeded(700 + start);
            let x0: Vec<f64> = (0..n).map(|_| rng::gaussian(&mut rs)).collect();
            let cfg = SolverConfig::new(2500, l).with_x0(x0);
            let (_, trace) = apg(&prob, &cfg).unwrap();
            let f = trace.final_objective();
            best = best.min(f);
            worst = worst.max(f);
        }
        assert!(
            worst - best <= 1e-6,
            "{}: objective spread {:.3e} over starts",
            reg.kind().name(),
            worst - best
        );
    }
}

#[test]
fn vanishing_penalty_recovers_linear_solve() {
    // With lambda -> 0 on an invertible system, the minimizer is H^{-1} b;
    // dense LU on the 8x8 instance is the oracle.
    let n = 8;
    let op = near_identity(n, 0.3, 71);
    let mut r = rng::seeded(72);
    let b: Vec<f64> = (0..n).map(|_| rng::gaussian(&mut r)).collect();
    let dense = DMatrix::from_row_slice(n, n, op.as_slice());
    let rhs = nalgebra::DVector::from_column_slice(&b);
    let solved = dense.lu().solve(&rhs).expect("oracle solve");

    let l = estimate_lipschitz(&op, 3000, 1e-13, 73);
    let prob = Problem::new(op, b, Regularizer::l1(), 1e-12).unwrap();
    let cfg = SolverConfig::new(3000, l);
    let (x, _) = apg(&prob, &cfg).unwrap();
    let err = norm2_diff(&x, solved.as_slice());
    assert!(err < 1e-4, "APG vs dense solve differ by {err}");
}

#[test]
fn momentum_first_step_is_literal() {
    // With r0 = 0 and r1 = 1 the first extrapolation has coefficients
    // 0 and -1, i.e. it evaluates the gradient at the initial point. The
    // run from an exact minimizer must therefore stay put from step one.
    let n = 4;
    let op = invex_core::linops::Identity::new(n);
    let prob = Problem::new(op, vec![2.0, 0.5, -1.0, 0.0], Regularizer::l1(), 1.0).unwrap();
    let minimizer = vec![1.0, 0.0, 0.0, 0.0];
    let cfg = SolverConfig::new(5, 1.0).with_x0(minimizer.clone());
    let (x, trace) = apg(&prob, &cfg).unwrap();
    assert!(norm2_diff(&x, &minimizer) < 1e-9, "{x:?}");
    for e in &trace.entries {
        assert!(e.residual < 1e-9);
    }
}

#[test]
fn lp_epsilon_floor_guards_descent() {
    // At the tightest admissible shift the subproblem is exactly convex;
    // descent must hold there too (the floor is what makes it safe).
    let reg = Regularizer::lp(0.5, min_epsilon(0.5).unwrap()).unwrap();
    let op = near_identity(12, 0.2, 81);
    let mut r = rng::seeded(82);
    let b: Vec<f64> = (0..12).map(|_| rng::gaussian(&mut r)).collect();
    let l = estimate_lipschitz(&op, 2000, 1e-12, 83);
    let prob = Problem::new(op, b, reg, 1.0).unwrap();
    let cfg = SolverConfig::new(500, l);
    let (_, trace) = apg(&prob, &cfg).unwrap();
    for pair in trace.entries.windows(2) {
        assert!(pair[1].objective <= pair[0].objective + 1e-10);
    }
}

#[test]
fn residual_norms_match_trace() {
    let op = near_identity(10, 0.2, 91);
    let mut r = rng::seeded(92);
    let b: Vec<f64> = (0..10).map(|_| rng::gaussian(&mut r)).collect();
    let l = estimate_lipschitz(&op, 2000, 1e-12, 93);
    let prob = Problem::new(op, b, Regularizer::ratio(), 0.5).unwrap();
    let cfg = SolverConfig::new(100, l);
    let (x, trace) = apg(&prob, &cfg).unwrap();
    assert!(norm2(&x).is_finite());
    assert_eq!(trace.entries.len(), 101);
    assert_eq!(trace.entries[0].residual, 0.0);
}
