mod common;

use arbk::experiments::{generate, ProblemSpec};
use arbk::linsys::{LinearSystem, RowSampler};
use arbk::potentials::Potential;
use arbk::solvers::{
    next_theta, run, AcdState, ArbkState, BkState, Method, SolverOptions, StoppingRule,
    ThetaSchedule,
};
use common::{consistent_system, max_abs_diff, min_norm_solution};

#[test]
fn theta_recurrence_and_bracket() {
    for theta0 in [1.0, 0.5, 0.1, 0.01, 0.001] {
        let mut s = ThetaSchedule::new(theta0).unwrap();
        let mut prev = s.theta();
        for _ in 0..100_000 {
            s.advance();
            let t = s.theta();
            let lhs = (1.0 - t) / (t * t);
            let rhs = 1.0 / (prev * prev);
            assert!(
                (lhs - rhs).abs() <= 1e-10 * rhs,
                "k={} {lhs} vs {rhs}",
                s.k()
            );
            assert!(t <= prev);
            let (lo, hi) = ThetaSchedule::bounds(theta0, s.k());
            assert!(t >= lo * (1.0 - 1e-10) && t <= hi * (1.0 + 1e-10));
            prev = t;
        }
    }
    assert_eq!(next_theta(1.0), (5f64.sqrt() - 1.0) / 2.0);
}

#[test]
fn constant_theta_arbk_reproduces_bk() {
    for (seed, lambda) in [(1u64, 0.0), (2, 1.0), (3, 30.0)] {
        let (sys, _) = consistent_system(23, 17, seed);
        let p = Potential::new(lambda).unwrap();
        let mut bk = BkState::zeros(sys.cols());
        let theta = ThetaSchedule::constant(1.0 / sys.rows() as f64).unwrap();
        let mut arbk = ArbkState::zeros(sys.cols(), theta);
        let mut rows = RowSampler::new(&sys, seed);
        for _ in 0..1000 {
            let i = rows.sample();
            bk.step(&sys, &p, i).unwrap();
            arbk.step(&sys, &p, i).unwrap();
            assert!(max_abs_diff(bk.x_star(), arbk.x_star()) <= 1e-12);
        }
    }
}

#[test]
fn acd_dual_image_tracks_arbk() {
    for (seed, lambda) in [(4u64, 0.0), (5, 1.0), (6, 30.0)] {
        let (sys, _) = consistent_system(31, 44, seed);
        let p = Potential::new(lambda).unwrap();
        let mut acd = AcdState::zeros(&sys, ThetaSchedule::for_rows(sys.rows()));
        let mut arbk = ArbkState::zeros(sys.cols(), ThetaSchedule::for_rows(sys.rows()));
        let mut rows = RowSampler::new(&sys, seed);
        for _ in 0..1000 {
            let i = rows.sample();
            acd.step(&sys, &p, i).unwrap();
            arbk.step(&sys, &p, i).unwrap();
            let diff = max_abs_diff(&acd.x_star(&sys), arbk.x_star());
            assert!(diff <= 1e-9, "k={} diff={diff:e}", arbk.iterations());
        }
    }
}

#[test]
fn identity_system_converges_within_a_few_epochs() {
    let n = 6;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    let sys = LinearSystem::from_rows(&rows, e1.clone()).unwrap();
    let stop = StoppingRule {
        max_epochs: 50,
        residual_tol: 1e-12,
    };
    let out = run(
        Method::Bk,
        &sys,
        &Potential::quadratic(),
        &e1,
        3,
        stop,
        &SolverOptions::default(),
    )
    .unwrap();
    assert!(out.converged);
    assert_eq!(out.x, e1);
    // Row 0 is drawn with probability 1/n per step: expected n steps, one epoch.
    assert!(out.log.records.len() <= 2 + n);
}

#[test]
fn quadratic_bk_finds_minimum_norm_solution() {
    for seed in 0..3 {
        let (sys, _) = consistent_system(20, 10, 100 + seed);
        let reference = min_norm_solution(&sys);
        let out = run(
            Method::Bk,
            &sys,
            &Potential::quadratic(),
            &reference,
            seed,
            StoppingRule::epochs(500),
            &SolverOptions::default(),
        )
        .unwrap();
        let err = out.log.last().unwrap().metrics.rel_error;
        assert!(err <= 1e-6, "seed {seed}: {err:e}");
    }
}

#[test]
fn underdetermined_quadratic_bk_finds_minimum_norm_solution() {
    let (sys, _) = consistent_system(8, 20, 7);
    let reference = min_norm_solution(&sys);
    let out = run(
        Method::Bk,
        &sys,
        &Potential::quadratic(),
        &reference,
        1,
        StoppingRule::epochs(2000),
        &SolverOptions::default(),
    )
    .unwrap();
    assert!(out.log.last().unwrap().metrics.rel_error <= 1e-6);
}

#[test]
fn runs_are_reproducible() {
    let g = generate(&ProblemSpec::new(40, 25, 1.0, 9).unwrap()).unwrap();
    for method in Method::ALL {
        let go = || {
            run(
                method,
                &g.sys,
                &g.potential(),
                &g.x_hat,
                5,
                StoppingRule::epochs(10),
                &SolverOptions::default(),
            )
            .unwrap()
        };
        let (a, b) = (go(), go());
        assert_eq!(a.log.to_csv(), b.log.to_csv());
        assert_eq!(a, b);
    }
}

#[test]
fn run_stops_at_tolerance_or_epoch_cap() {
    let g = generate(&ProblemSpec::new(60, 20, 0.5, 2).unwrap()).unwrap();
    let stop = StoppingRule {
        max_epochs: 1000,
        residual_tol: 1e-6,
    };
    let out = run(
        Method::Bk,
        &g.sys,
        &g.potential(),
        &g.x_hat,
        0,
        stop,
        &SolverOptions::default(),
    )
    .unwrap();
    assert!(out.converged);
    assert!(out.log.last().unwrap().metrics.rel_residual <= 1e-6);
    assert!(out.log.records.len() < 1001);

    let out = run(
        Method::Arbk,
        &g.sys,
        &g.potential(),
        &g.x_hat,
        0,
        StoppingRule::epochs(3),
        &SolverOptions::default(),
    )
    .unwrap();
    assert_eq!(out.log.records.len(), 4);
    assert_eq!(out.iterations, 3 * 60);
    let epochs: Vec<usize> = out.log.records.iter().map(|r| r.epoch).collect();
    assert_eq!(epochs, vec![0, 1, 2, 3]);
}

#[test]
fn acd_and_arbk_runs_agree() {
    let g = generate(&ProblemSpec::new(30, 40, 1.0, 4).unwrap()).unwrap();
    let go = |m| {
        run(
            m,
            &g.sys,
            &g.potential(),
            &g.x_hat,
            8,
            StoppingRule::epochs(20),
            &SolverOptions::default(),
        )
        .unwrap()
    };
    let (acd, arbk) = (go(Method::AcdDual), go(Method::Arbk));
    assert!(max_abs_diff(&acd.x, &arbk.x) <= 1e-8);
    for (a, b) in acd.log.records.iter().zip(&arbk.log.records) {
        assert!((a.metrics.rel_error - b.metrics.rel_error).abs() <= 1e-6);
    }
}

#[test]
fn bregman_distance_decays_in_median() {
    let epochs = 5;
    for method in [Method::Bk, Method::Arbk] {
        let mut at_e = Vec::new();
        let mut at_2e = Vec::new();
        for seed in 0..20 {
            let g = generate(&ProblemSpec::new(80, 40, 1.0, seed).unwrap()).unwrap();
            let out = run(
                method,
                &g.sys,
                &g.potential(),
                &g.x_hat,
                seed,
                StoppingRule::epochs(2 * epochs),
                &SolverOptions::default(),
            )
            .unwrap();
            at_e.push(out.log.at_epoch(epochs).unwrap().bregman);
            at_2e.push(out.log.at_epoch(2 * epochs).unwrap().bregman);
        }
        let median = |v: &mut Vec<f64>| {
            v.sort_by(f64::total_cmp);
            0.5 * (v[9] + v[10])
        };
        let (me, m2e) = (median(&mut at_e), median(&mut at_2e));
        assert!(m2e < me, "{method}: {m2e:e} !< {me:e}");
    }
}

#[test]
fn rejects_invalid_run_configuration() {
    let g = generate(&ProblemSpec::new(5, 5, 0.0, 1).unwrap()).unwrap();
    let p = g.potential();
    let opts = SolverOptions::default();
    assert!(run(
        Method::Bk,
        &g.sys,
        &p,
        &g.x_hat,
        0,
        StoppingRule::epochs(0),
        &opts
    )
    .is_err());
    let bad_tol = StoppingRule {
        max_epochs: 1,
        residual_tol: -1.0,
    };
    assert!(run(Method::Bk, &g.sys, &p, &g.x_hat, 0, bad_tol, &opts).is_err());
    let bad_theta = SolverOptions {
        theta0: Some(2.0),
        ..SolverOptions::default()
    };
    assert!(run(
        Method::Arbk,
        &g.sys,
        &p,
        &g.x_hat,
        0,
        StoppingRule::epochs(1),
        &bad_theta
    )
    .is_err());
    let bad_start = SolverOptions {
        x_star0: Some(vec![0.0; 3]),
        ..SolverOptions::default()
    };
    assert!(run(
        Method::Bk,
        &g.sys,
        &p,
        &g.x_hat,
        0,
        StoppingRule::epochs(1),
        &bad_start
    )
    .is_err());
    assert!(run(
        Method::Bk,
        &g.sys,
        &p,
        &g.x_hat[..2],
        0,
        StoppingRule::epochs(1),
        &opts
    )
    .is_err());
}
