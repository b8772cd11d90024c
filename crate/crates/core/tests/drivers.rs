//! Driver loops: fixed points, reproducibility and trace invariants.

use gaugevqa::drivers::{
    run_temperature_sweep, run_vqe, run_vqe_from, run_vqe_penalty, run_vqe_restarts, run_vqt,
    run_vqt_restarts, Mode, RunConfig, RunTrace,
};
use gaugevqa::model::ModelSpec;
use gaugevqa::objectives::ThetaPhi;

fn config(mode: Mode, n: usize, max_iters: usize) -> RunConfig {
    let mut c = RunConfig::new(mode, ModelSpec::periodic(n, 1.0, 0.5));
    c.max_iters = max_iters;
    c
}

/// Whenever L₂ is above tolerance and α < 1, L₂ fifty iterations later is not
/// larger by more than 1e-3.
fn assert_constraint_progress(trace: &RunTrace, l2_tol: f64) {
    let r = &trace.records;
    for k in 0..r.len().saturating_sub(50) {
        if r[k].l2 > l2_tol && r[k].alpha < 1.0 {
            assert!(
                r[k + 50].l2 <= r[k].l2 + 1e-3,
                "L2 rose from {} to {} after iteration {k}",
                r[k].l2,
                r[k + 50].l2
            );
        }
    }
}

fn assert_well_formed(trace: &RunTrace) {
    assert_eq!(trace.records.len(), trace.summary.iterations);
    for (k, r) in trace.records.iter().enumerate() {
        assert_eq!(r.iteration, k);
        assert!((0.0..=1.0).contains(&r.alpha));
    }
    let last = trace.records.last().unwrap();
    assert_eq!(last.l1, trace.summary.final_l1);
    assert_eq!((last.l1 - trace.summary.oracle_value).abs(), trace.summary.abs_error_l1);
}

#[test]
fn vqe_traces_make_constraint_progress() {
    for n in [2, 3] {
        let c = config(Mode::VqeMoo, n, 3000);
        for t in run_vqe_restarts(&c).unwrap() {
            assert_well_formed(&t);
            assert_constraint_progress(&t, c.l2_tol);
            if t.summary.converged {
                assert!(t.summary.final_kkt_residual < c.kkt_tol);
                assert!(t.summary.final_l2 < c.l2_tol);
            }
        }
    }
}

#[test]
fn vqt_traces_make_constraint_progress() {
    let mut c = config(Mode::VqtMoo, 2, 1500);
    c.temperature = Some(1.0);
    c.restarts = 3;
    for t in run_vqt_restarts(&c).unwrap() {
        assert_well_formed(&t);
        assert_constraint_progress(&t, c.l2_tol);
        // MGDA steps descend both objectives to first order
        for w in t.records.windows(2) {
            assert!(w[1].l1 <= w[0].l1 + 1e-6);
            assert!(w[1].l2 <= w[0].l2 + 1e-6);
        }
    }
}

#[test]
fn vacuum_start_is_physical_and_never_climbs() {
    let c = config(Mode::VqeMoo, 3, 200);
    let t = run_vqe_from(&c, ThetaPhi::pure(vec![0.0; 36])).unwrap();
    assert_eq!(t.records[0].l2, 0.0);
    assert!((t.records[0].l1 + 1.5).abs() < 1e-12);
    for w in t.records.windows(2) {
        assert!(w[1].l1 <= w[0].l1 + 1e-12);
    }
}

#[test]
fn converged_point_is_a_fixed_point() {
    let c = config(Mode::VqeMoo, 2, 20_000);
    let best = run_vqe(&c).unwrap();
    assert!(best.summary.converged);
    let again = run_vqe_from(&c, best.summary.final_params.clone()).unwrap();
    assert!(again.records[0].kkt_residual < c.kkt_tol);
    assert!(again.summary.converged);
    assert_eq!(again.summary.iterations, 1);
}

#[test]
fn runs_are_reproducible_and_seed_dependent() {
    let mut c = config(Mode::VqtMoo, 2, 200);
    c.temperature = Some(0.7);
    let a = run_vqt_restarts(&c).unwrap();
    let b = run_vqt_restarts(&c).unwrap();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.records, y.records);
        assert_eq!(x.summary.final_params, y.summary.final_params);
    }
    c.seed = 1;
    let other = run_vqt_restarts(&c).unwrap();
    assert_ne!(a[0].records[0], other[0].records[0]);
}

#[test]
fn penalty_grid_shares_starting_points() {
    let mut c = config(Mode::VqePenalty, 2, 300);
    c.mu_grid = vec![0.0, 1.0, 5.0];
    let traces = run_vqe_penalty(&c).unwrap();
    assert_eq!(traces.len(), 3);
    for (t, mu) in traces.iter().zip([0.0, 1.0, 5.0]) {
        assert_eq!(t.summary.mu, Some(mu));
        assert!((t.records[0].alpha - 1.0 / (1.0 + mu)).abs() < 1e-15);
    }
    let starts: Vec<_> = traces.iter().map(|t| t.summary.restart).collect();
    // every μ picks among the same seeded starts, so restart 0 values coincide
    let r0: Vec<_> = run_vqe_restarts(&config(Mode::VqeMoo, 2, 1)).unwrap();
    for (t, &k) in traces.iter().zip(&starts) {
        assert_eq!(t.records[0].l1, r0[k].records[0].l1);
    }
}

#[test]
fn single_temperature_sweep_is_a_plain_run() {
    let mut c = config(Mode::VqtMoo, 2, 100);
    c.restarts = 2;
    c.temperatures = vec![0.9];
    let sweep = run_temperature_sweep(&c).unwrap();
    c.temperature = Some(0.9);
    let single = run_vqt(&c).unwrap();
    assert_eq!(sweep.len(), 1);
    assert_eq!(sweep[0].records, single.records);
    assert_eq!(sweep[0].summary.oracle_value, single.summary.oracle_value);
}

#[test]
fn bad_configs_are_rejected() {
    let mut c = config(Mode::VqeMoo, 2, 10);
    c.max_iters = 0;
    assert!(run_vqe(&c).is_err());
    let mut c = config(Mode::VqtMoo, 2, 10);
    c.temperatures = vec![1.0, -2.0];
    assert!(run_temperature_sweep(&c).is_err());
    assert!(run_vqe(&config(Mode::VqePenalty, 2, 10)).is_err());
}
