//! The exact-diagonalization oracle against an independent Fock-space build.

mod common;

use common::{max_abs_diff, FockModel};
use gaugevqa::model::{
    ed_ground, ed_thermal, enumerate_physical_basis, unrestricted_spectrum, Boundary, ConstraintSet,
    ModelSpec, PhysicalSpectrum,
};

fn spec(n: usize, t: f64, h: f64, boundary: Boundary) -> ModelSpec {
    ModelSpec {
        n_sites: n,
        hopping: t,
        field: h,
        boundary,
        constraints: ConstraintSet::All,
    }
}

#[test]
fn physical_spectrum_matches_fock_construction() {
    for (n, t, h) in [(2, 1.0, 0.5), (3, 1.0, 0.5), (3, 0.7, -1.3), (4, 1.0, 0.5), (5, 1.2, 0.3)] {
        for periodic in [true, false] {
            let boundary = if periodic { Boundary::Periodic } else { Boundary::OpenDangling };
            let fock = FockModel { n_sites: n, t, h, periodic };
            let ours = PhysicalSpectrum::new(&spec(n, t, h, boundary)).unwrap();
            let theirs = fock.physical_spectrum();
            assert_eq!(ours.energies().len(), theirs.len(), "N={n} periodic={periodic}");
            let diff = max_abs_diff(ours.energies(), &theirs);
            assert!(diff < 1e-10, "N={n} periodic={periodic}: {diff}");
        }
    }
}

#[test]
fn full_spectrum_matches_fock_construction() {
    for n in [2, 3] {
        for periodic in [true, false] {
            let boundary = if periodic { Boundary::Periodic } else { Boundary::OpenDangling };
            let fock = FockModel { n_sites: n, t: 1.0, h: 0.5, periodic };
            let ours = unrestricted_spectrum(&spec(n, 1.0, 0.5, boundary)).unwrap();
            assert!(max_abs_diff(&ours, &fock.full_spectrum()) < 1e-10);
        }
    }
}

#[test]
fn physical_basis_matches_fock_gauss_eigenvalues() {
    for n in 2..=5 {
        let fock = FockModel { n_sites: n, t: 1.0, h: 0.5, periodic: true };
        let basis = enumerate_physical_basis(&ModelSpec::periodic(n, 1.0, 0.5)).unwrap();
        assert_eq!(basis.states(), fock.physical_states().as_slice());
        assert_eq!(basis.dim(), 1 << n);
    }
}

#[test]
fn reference_values_for_default_couplings() {
    // two sites: the empty lattice with both links at +1 is the physical ground state
    let g2 = ed_ground(&ModelSpec::periodic(2, 1.0, 0.5)).unwrap();
    assert!((g2.energy + 1.0).abs() < 1e-12);
    // three sites: −sqrt(17)/2
    let g3 = ed_ground(&ModelSpec::periodic(3, 1.0, 0.5)).unwrap();
    assert!((g3.energy + 17f64.sqrt() / 2.0).abs() < 1e-12, "{}", g3.energy);
    // without the Gauss law the two-site ground state is −sqrt(5)
    let free = unrestricted_spectrum(&ModelSpec::periodic(2, 1.0, 0.5)).unwrap();
    assert!((free[0] + 5f64.sqrt()).abs() < 1e-12, "{}", free[0]);
}

#[test]
fn thermal_state_is_gibbs_in_physical_subspace() {
    let s = ModelSpec::periodic(2, 1.0, 0.5);
    let fock = FockModel { n_sites: 2, t: 1.0, h: 0.5, periodic: true };
    for t in [0.3, 1.0, 2.5] {
        let th = ed_thermal(&s, t).unwrap();
        let ev = fock.physical_spectrum();
        let z: f64 = ev.iter().map(|e| (-e / t).exp()).sum();
        assert!((th.thermo.free_energy + t * z.ln()).abs() < 1e-10);
        let e: f64 = ev.iter().map(|e| e * (-e / t).exp()).sum::<f64>() / z;
        assert!((th.thermo.energy - e).abs() < 1e-10);
        assert!((th.rho.trace() - 1.0).abs() < 1e-12);
        assert!((th.rho.von_neumann_entropy() - th.thermo.entropy).abs() < 1e-9);
    }
}
