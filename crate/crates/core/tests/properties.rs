//! Randomized invariants of the simulator, the objectives and the MGDA solvers.

mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use gaugevqa::ansatz::AnsatzTemplate;
use gaugevqa::model::ModelSpec;
use gaugevqa::moo::{combine, frank_wolfe_weights, solve_alpha_two_task, WeightVector};
use gaugevqa::objectives::{GradientMethod, Objective, Problem, ThetaPhi};
use gaugevqa::sim::{DensityMatrix, StateVector};
use proptest::collection::vec;
use proptest::prelude::*;

fn sq_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn combined_sq(g1: &[f64], g2: &[f64], a: f64) -> f64 {
    sq_norm(&combine(&[g1, g2], &WeightVector::two_task(a)).unwrap())
}

fn two_site() -> Problem {
    Problem::with_blocks(ModelSpec::periodic(2, 1.0, 0.5), 3).unwrap()
}

fn pairs() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..8).prop_flat_map(|n| (vec(-3.0..3.0f64, n), vec(-3.0..3.0f64, n)))
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn two_task_alpha_beats_a_grid((g1, g2) in pairs()) {
        let a = solve_alpha_two_task(&g1, &g2).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        let best = combined_sq(&g1, &g2, a);
        for k in 0..=200 {
            prop_assert!(best <= combined_sq(&g1, &g2, k as f64 / 200.0) + 1e-12);
        }
    }

    #[test]
    fn min_norm_is_below_both_gradients((g1, g2) in pairs()) {
        let a = solve_alpha_two_task(&g1, &g2).unwrap();
        let d = combined_sq(&g1, &g2, a);
        prop_assert!(d <= sq_norm(&g1).min(sq_norm(&g2)) + 1e-12);
        // common descent: g_i · d ≥ ‖d‖² for both tasks
        let dir = combine(&[&g1, &g2], &WeightVector::two_task(a)).unwrap();
        for g in [&g1, &g2] {
            let dot: f64 = g.iter().zip(&dir).map(|(x, y)| x * y).sum();
            prop_assert!(dot >= d - 1e-9);
        }
    }

    #[test]
    fn frank_wolfe_is_monotone_and_agrees((g1, g2) in pairs(), g3 in vec(-3.0..3.0f64, 7)) {
        let out = frank_wolfe_weights(&[&g1, &g2], 500, 1e-14).unwrap();
        for w in out.history.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-15);
        }
        let a = solve_alpha_two_task(&g1, &g2).unwrap();
        let fw = sq_norm(&combine(&[&g1, &g2], &out.weights).unwrap());
        prop_assert!((fw - combined_sq(&g1, &g2, a)).abs() < 1e-9);
        let g3 = &g3[..g1.len()];
        let three = frank_wolfe_weights(&[&g1, &g2, g3], 5000, 1e-14).unwrap();
        let s: f64 = three.weights.as_slice().iter().sum();
        prop_assert!((s - 1.0).abs() < 1e-12);
        let last = *three.history.last().unwrap();
        let best_vertex = [&g1[..], &g2[..], g3].iter().map(|g| sq_norm(g)).fold(f64::INFINITY, f64::min);
        prop_assert!(last <= best_vertex + 1e-15);
        // a third task can only lower the optimum; Frank–Wolfe closes in at rate O(1/k)
        prop_assert!(last <= fw + 1e-2);
    }

    #[test]
    fn circuits_preserve_norm(theta in vec(-PI..PI, 24)) {
        let t = AnsatzTemplate::new(4, 3).unwrap();
        let mut s = StateVector::new(4).unwrap();
        s.apply_circuit(&t.bind(&theta).unwrap()).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_and_density_paths_agree(theta in vec(-PI..PI, 24)) {
        let p = two_site();
        let pure = p.pure_observables(&theta).unwrap();
        // φ = π/2 puts every latent qubit in |0⟩
        let mixed = p.mixed_observables(&theta, &[FRAC_PI_2; 4]).unwrap();
        prop_assert!((pure.energy - mixed.energy).abs() < 1e-12);
        for (a, b) in pure.gauss.iter().zip(&mixed.gauss) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        let rho = DensityMatrix::from_pure(&p.prepare_state(&theta).unwrap());
        let e = rho.expectation(p.hamiltonian()).unwrap();
        prop_assert!((e - pure.energy).abs() < 1e-12);
    }

    #[test]
    fn two_pi_shift_is_invisible(theta in vec(-PI..PI, 24), k in 0usize..24, phi in vec(0.1..1.4f64, 4)) {
        let p = two_site();
        let mut shifted = theta.clone();
        shifted[k] += 2.0 * PI;
        let a = p.pure_observables(&theta).unwrap();
        let b = p.pure_observables(&shifted).unwrap();
        prop_assert!((a.energy - b.energy).abs() < 1e-10);
        let a = p.mixed_observables(&theta, &phi).unwrap();
        let b = p.mixed_observables(&shifted, &phi).unwrap();
        prop_assert!((a.energy - b.energy).abs() < 1e-10);
        for (x, y) in a.gauss.iter().zip(&b.gauss) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn parameter_shift_matches_finite_differences(theta in vec(-PI..PI, 24)) {
        let p = two_site().with_gradient_method(GradientMethod::ParameterShift);
        let obj = Objective::VqeEnergy;
        let grad = p.gradient(obj, &ThetaPhi::pure(theta.clone())).unwrap();
        let fd = common::central_difference(
            |x| p.value(obj, &ThetaPhi::pure(x.to_vec())).unwrap(),
            &theta,
            1e-5,
        );
        prop_assert!(common::max_abs_diff(&grad, &fd) < 1e-6);
    }

    #[test]
    fn mixed_states_stay_valid(theta in vec(-PI..PI, 24), phi in vec(-PI..PI, 4)) {
        let rho = two_site().prepare_density(&theta, &phi).unwrap();
        prop_assert!((rho.trace() - 1.0).abs() < 1e-12);
        prop_assert!(rho.is_hermitian(1e-12));
        prop_assert!(rho.eigenvalues()[0] > -1e-12);
        // unitary evolution leaves the spectrum, hence the entropy, unchanged
        let s = gaugevqa::objectives::entropy(&phi);
        prop_assert!((rho.von_neumann_entropy() - s).abs() < 1e-9);
    }
}
