//! One-dimensional Z₂ lattice gauge theory with spinless fermions.
//!
//! Qubit layout: the fermion on site `j` sits on qubit `2j`, the link between
//! sites `j` and `j+1` on qubit `2j+1`. Occupation is `n = (1 − Z)/2`, so
//! `|0⟩` is an empty site and `(−1)^n` is `Z`. The Jordan–Wigner string runs
//! over fermion qubits only.
//!
//! ```text
//! H   = −t Σⱼ (c†ⱼ Xⱼ,ⱼ₊₁ cⱼ₊₁ + h.c.) − h Σⱼ Zⱼ,ⱼ₊₁
//! G_j = Zⱼ₋₁,ⱼ · Z_fermion(j) · Zⱼ,ⱼ₊₁
//! ```
//!
//! With periodic boundaries the hopping term across the boundary carries the
//! Jordan–Wigner string through every interior fermion. The exact oracle
//! diagonalizes `H` restricted to the computational basis states that satisfy
//! all enforced Gauss constraints.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::pauli::{MaskedTerm, PauliSum, PauliTerm};
use crate::sim::{DensityMatrix, StateVector};

/// Largest register the ground-state oracle accepts.
pub const MAX_GROUND_QUBITS: usize = 14;
/// Largest register the thermal oracle accepts.
pub const MAX_THERMAL_QUBITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Ring of N sites and N links.
    Periodic,
    /// Open chain: no hopping across the end, the last link dangles to the
    /// right and site 0 has no left link.
    OpenDangling,
}

/// Which Gauss constraints define the physical subspace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintSet {
    All,
    Sites(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub n_sites: usize,
    pub hopping: f64,
    pub field: f64,
    pub boundary: Boundary,
    pub constraints: ConstraintSet,
}

impl ModelSpec {
    /// Periodic chain with every constraint enforced.
    pub fn periodic(n_sites: usize, hopping: f64, field: f64) -> Self {
        Self {
            n_sites,
            hopping,
            field,
            boundary: Boundary::Periodic,
            constraints: ConstraintSet::All,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::Validation(format!(
                "n_sites must be at least 2, got {}",
                self.n_sites
            )));
        }
        if self.n_qubits() > MAX_GROUND_QUBITS {
            return Err(Error::Size(format!(
                "{} sites need {} qubits; at most {MAX_GROUND_QUBITS} are supported",
                self.n_sites,
                self.n_qubits()
            )));
        }
        if !self.hopping.is_finite() || !self.field.is_finite() {
            return Err(Error::Validation("couplings must be finite".into()));
        }
        if let ConstraintSet::Sites(sites) = &self.constraints {
            if let Some(&j) = sites.iter().find(|&&j| j >= self.n_sites) {
                return Err(Error::Validation(format!(
                    "constraint site {j} out of range for {} sites",
                    self.n_sites
                )));
            }
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.n_sites
    }

    pub fn fermion_qubit(&self, site: usize) -> usize {
        2 * site
    }

    /// Qubit of the link between `site` and `site + 1`.
    pub fn link_qubit(&self, site: usize) -> usize {
        2 * site + 1
    }

    /// Site indices whose Gauss operators are enforced, ascending and deduplicated.
    pub fn enforced_sites(&self) -> Vec<usize> {
        match &self.constraints {
            ConstraintSet::All => (0..self.n_sites).collect(),
            ConstraintSet::Sites(s) => {
                let mut s = s.clone();
                s.sort_unstable();
                s.dedup();
                s
            }
        }
    }

    /// Qubits of the Z string of `G_site`.
    pub fn gauss_qubits(&self, site: usize) -> Vec<usize> {
        let mut qubits = Vec::with_capacity(3);
        match (self.boundary, site) {
            (Boundary::OpenDangling, 0) => {}
            (_, 0) => qubits.push(self.link_qubit(self.n_sites - 1)),
            _ => qubits.push(self.link_qubit(site - 1)),
        }
        qubits.push(self.fermion_qubit(site));
        qubits.push(self.link_qubit(site));
        qubits
    }

    /// Annihilation operator `c_site` after Jordan–Wigner.
    pub fn annihilation(&self, site: usize) -> PauliSum {
        let string: Vec<usize> = (0..site).map(|l| self.fermion_qubit(l)).collect();
        let z = PauliSum::from(PauliTerm::z_string(&string));
        &z * &PauliSum::sigma_plus(self.fermion_qubit(site))
    }

    /// Sites `j` that carry a hopping term to `j + 1` (mod N).
    fn hopping_sites(&self) -> std::ops::Range<usize> {
        match self.boundary {
            Boundary::Periodic => 0..self.n_sites,
            Boundary::OpenDangling => 0..self.n_sites - 1,
        }
    }
}

/// Qubit Hamiltonian as a simplified [`PauliSum`].
pub fn build_hamiltonian(spec: &ModelSpec) -> Result<PauliSum> {
    spec.validate()?;
    let minus_t = Complex64::new(-spec.hopping, 0.0);
    let mut h = PauliSum::zero();
    for j in spec.hopping_sites() {
        let k = (j + 1) % spec.n_sites;
        let link = PauliSum::single(spec.link_qubit(j), crate::pauli::Pauli::X);
        let forward = &(&spec.annihilation(j).adjoint() * &link) * &spec.annihilation(k);
        let hop = forward.clone() + forward.adjoint();
        h = h + hop.scaled(minus_t);
    }
    for j in 0..spec.n_sites {
        h = h + PauliSum::single(spec.link_qubit(j), crate::pauli::Pauli::Z)
            .scaled(Complex64::new(-spec.field, 0.0));
    }
    Ok(h.simplify())
}

/// One Gauss operator per site, in site order.
pub fn gauss_operators(spec: &ModelSpec) -> Result<Vec<PauliSum>> {
    spec.validate()?;
    Ok((0..spec.n_sites)
        .map(|j| PauliSum::from(PauliTerm::z_string(&spec.gauss_qubits(j))))
        .collect())
}

/// Gauss operators of the enforced sites only.
pub fn enforced_gauss_operators(spec: &ModelSpec) -> Result<Vec<PauliSum>> {
    let all = gauss_operators(spec)?;
    Ok(spec.enforced_sites().into_iter().map(|j| all[j].clone()).collect())
}

/// Computational basis states in the joint +1 eigenspace of a set of Z strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhysicalBasis {
    n_qubits: usize,
    states: Vec<usize>,
    n_constraints: usize,
    independent_constraints: usize,
}

impl PhysicalBasis {
    /// Enumerate all `x` with even parity on every mask.
    pub fn from_z_masks(n_qubits: usize, masks: &[usize]) -> Self {
        let states = (0..1usize << n_qubits)
            .filter(|&x| masks.iter().all(|&m| (x & m).count_ones() % 2 == 0))
            .collect();
        Self {
            n_qubits,
            states,
            n_constraints: masks.len(),
            independent_constraints: gf2_rank(masks),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn n_constraints(&self) -> usize {
        self.n_constraints
    }

    /// Rank of the constraint masks over GF(2).
    pub fn independent_constraints(&self) -> usize {
        self.independent_constraints
    }

    /// `2^{n_qubits − rank}`.
    pub fn expected_dim(&self) -> usize {
        1 << (self.n_qubits - self.independent_constraints)
    }

    pub fn index_of(&self, x: usize) -> Option<usize> {
        self.states.binary_search(&x).ok()
    }

    /// Diagonal projector onto the physical subspace.
    pub fn projector(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut p = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for &x in &self.states {
            p[(x, x)] = Complex64::new(1.0, 0.0);
        }
        p
    }

    /// `⟨a|O|b⟩` for `a, b` in the basis.
    pub fn restrict(&self, terms: &[MaskedTerm]) -> DMatrix<Complex64> {
        let d = self.dim();
        let mut m = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
        for t in terms {
            for (col, &x) in self.states.iter().enumerate() {
                let (amp, y) = t.apply(x);
                if let Some(row) = self.index_of(y) {
                    m[(row, col)] += amp;
                }
            }
        }
        m
    }
}

fn gf2_rank(masks: &[usize]) -> usize {
    let mut rows: Vec<usize> = masks.to_vec();
    let mut rank = 0;
    for bit in 0..usize::BITS {
        let b = 1usize << bit;
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i] & b != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let p = rows[rank];
        for (i, r) in rows.iter_mut().enumerate() {
            if i != rank && *r & b != 0 {
                *r ^= p;
            }
        }
        rank += 1;
    }
    rank
}

fn z_mask(qubits: &[usize]) -> usize {
    qubits.iter().fold(0, |m, q| m | (1 << q))
}

pub fn enumerate_physical_basis(spec: &ModelSpec) -> Result<PhysicalBasis> {
    spec.validate()?;
    let masks: Vec<usize> = spec
        .enforced_sites()
        .into_iter()
        .map(|j| z_mask(&spec.gauss_qubits(j)))
        .collect();
    Ok(PhysicalBasis::from_z_masks(spec.n_qubits(), &masks))
}

/// Eigen-decomposition of the Hamiltonian restricted to the physical subspace.
#[derive(Debug, Clone)]
pub struct PhysicalSpectrum {
    basis: PhysicalBasis,
    /// Ascending.
    energies: Vec<f64>,
    /// Columns are eigenvectors in physical-basis coordinates, same order as `energies`.
    vectors: DMatrix<Complex64>,
}

impl PhysicalSpectrum {
    pub fn new(spec: &ModelSpec) -> Result<Self> {
        let h = build_hamiltonian(spec)?;
        let basis = enumerate_physical_basis(spec)?;
        Ok(Self::from_parts(&h, basis))
    }

    pub fn from_parts(hamiltonian: &PauliSum, basis: PhysicalBasis) -> Self {
        let restricted = basis.restrict(&hamiltonian.masked());
        let eig = SymmetricEigen::new(restricted);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let energies = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(basis.dim(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
        Self {
            basis,
            energies,
            vectors,
        }
    }

    pub fn basis(&self) -> &PhysicalBasis {
        &self.basis
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Embed column `k` into the full `2ⁿ` space.
    fn embedded(&self, k: usize) -> Vec<Complex64> {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << self.basis.n_qubits];
        for (row, &x) in self.basis.states.iter().enumerate() {
            amps[x] = self.vectors[(row, k)];
        }
        amps
    }

    pub fn ground(&self) -> Result<GroundState> {
        let state = StateVector::from_amplitudes(self.basis.n_qubits, self.embedded(0))?;
        Ok(GroundState {
            energy: self.energies[0],
            state,
        })
    }

    /// `log Σ_k e^{−E_k/T}` evaluated stably.
    pub fn log_partition(&self, temperature: f64) -> f64 {
        let e0 = self.energies[0];
        let tail: f64 = self
            .energies
            .iter()
            .map(|&e| (-(e - e0) / temperature).exp())
            .sum();
        -e0 / temperature + tail.ln()
    }

    /// Gibbs populations in eigenvalue order.
    pub fn populations(&self, temperature: f64) -> Vec<f64> {
        let e0 = self.energies[0];
        let w: Vec<f64> = self
            .energies
            .iter()
            .map(|&e| (-(e - e0) / temperature).exp())
            .collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|x| x / z).collect()
    }

    /// Free energy, energy and entropy only; skips building the density matrix.
    pub fn thermodynamics(&self, temperature: f64) -> Result<Thermodynamics> {
        if !(temperature > 0.0) || !temperature.is_finite() {
            return arg(format!("temperature must be positive, got {temperature}"));
        }
        let p = self.populations(temperature);
        let energy: f64 = p.iter().zip(&self.energies).map(|(p, e)| p * e).sum();
        let entropy: f64 = p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum();
        Ok(Thermodynamics {
            temperature,
            free_energy: energy - temperature * entropy,
            energy,
            entropy,
            log_partition: self.log_partition(temperature),
        })
    }

    pub fn thermal(&self, temperature: f64) -> Result<ThermalState> {
        if self.basis.n_qubits > MAX_THERMAL_QUBITS {
            return Err(Error::Size(format!(
                "thermal oracle supports at most {MAX_THERMAL_QUBITS} qubits"
            )));
        }
        let thermo = self.thermodynamics(temperature)?;
        let p = self.populations(temperature);
        let local = &self.vectors
            * DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                p.len(),
                p.iter().map(|&x| Complex64::new(x, 0.0)),
            ))
            * self.vectors.adjoint();
        let dim = 1usize << self.basis.n_qubits;
        let mut full = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for (r, &x) in self.basis.states.iter().enumerate() {
            for (c, &y) in self.basis.states.iter().enumerate() {
                full[(x, y)] = local[(r, c)];
            }
        }
        Ok(ThermalState {
            thermo,
            rho: DensityMatrix::from_matrix_unchecked(self.basis.n_qubits, full),
        })
    }
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub state: StateVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thermodynamics {
    pub temperature: f64,
    /// `Tr(ρH) − T·S`.
    pub free_energy: f64,
    pub energy: f64,
    /// Natural log.
    pub entropy: f64,
    pub log_partition: f64,
}

impl Thermodynamics {
    /// `−T log Z`; equals `free_energy` up to rounding.
    pub fn free_energy_from_partition(&self) -> f64 {
        -self.temperature * self.log_partition
    }
}

#[derive(Debug, Clone)]
pub struct ThermalState {
    pub thermo: Thermodynamics,
    pub rho: DensityMatrix,
}

fn check_oracle_size(spec: &ModelSpec, limit: usize) -> Result<()> {
    spec.validate()?;
    if spec.n_qubits() > limit {
        return Err(Error::Size(format!(
            "exact diagonalization limited to {limit} qubits, model has {}",
            spec.n_qubits()
        )));
    }
    Ok(())
}

/// Ground energy and state in the physical subspace.
pub fn ed_ground(spec: &ModelSpec) -> Result<GroundState> {
    check_oracle_size(spec, MAX_GROUND_QUBITS)?;
    PhysicalSpectrum::new(spec)?.ground()
}

/// Gibbs state of `H̃ = PHP` at temperature `T`, zero outside the physical subspace.
pub fn ed_thermal(spec: &ModelSpec, temperature: f64) -> Result<ThermalState> {
    if !(temperature > 0.0) {
        return arg(format!("temperature must be positive, got {temperature}"));
    }
    check_oracle_size(spec, MAX_THERMAL_QUBITS)?;
    PhysicalSpectrum::new(spec)?.thermal(temperature)
}

/// Ascending spectrum of the full Hamiltonian, ignoring the Gauss law.
pub fn unrestricted_spectrum(spec: &ModelSpec) -> Result<Vec<f64>> {
    check_oracle_size(spec, 12)?;
    let dense = build_hamiltonian(spec)?.to_dense(spec.n_qubits());
    let mut ev: Vec<f64> = dense.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

pub fn unrestricted_ground_energy(spec: &ModelSpec) -> Result<f64> {
    Ok(unrestricted_spectrum(spec)?[0])
}

/// Spectral norm `‖H‖` of the full Hamiltonian.
pub fn hamiltonian_norm(spec: &ModelSpec) -> Result<f64> {
    let ev = unrestricted_spectrum(spec)?;
    Ok(ev[0].abs().max(ev[ev.len() - 1].abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Pauli;

    fn n2() -> ModelSpec {
        ModelSpec::periodic(2, 1.0, 0.5)
    }

    #[test]
    fn gauss_strings_for_two_sites() {
        let g = gauss_operators(&n2()).unwrap();
        assert_eq!(g.len(), 2);
        let keys = |s: &PauliSum| s.terms[0].factors.keys().copied().collect::<Vec<_>>();
        assert_eq!(keys(&g[0]), vec![0, 1, 3]);
        assert_eq!(keys(&g[1]), vec![1, 2, 3]);
        let vac = StateVector::new(4).unwrap();
        for gj in &g {
            assert_eq!(vac.expectation(gj).unwrap(), 1.0);
            assert_eq!((gj * gj).simplify(), PauliSum::identity());
        }
    }

    #[test]
    fn hamiltonian_is_hermitian_and_traceless() {
        let h = build_hamiltonian(&n2()).unwrap();
        assert!(h.is_hermitian(1e-14));
        let dense = h.to_dense(4);
        assert!((&dense - dense.adjoint()).camax() < 1e-14);
        assert!(dense.trace().norm() < 1e-14);
        assert!(h.terms.iter().all(|t| !t.factors.is_empty()));
    }

    #[test]
    fn vacuum_energy() {
        let h = build_hamiltonian(&n2()).unwrap();
        let vac = StateVector::new(4).unwrap();
        assert!((vac.expectation(&h).unwrap() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn bulk_hopping_has_no_string() {
        let spec = ModelSpec::periodic(4, 1.0, 0.0);
        let h = build_hamiltonian(&spec).unwrap();
        // c†_1 X c_2 touches exactly qubits 2, 3, 4
        let bulk: Vec<_> = h
            .terms
            .iter()
            .filter(|t| t.factors.get(&3) == Some(&Pauli::X))
            .collect();
        assert_eq!(bulk.len(), 2);
        for t in bulk {
            assert_eq!(t.factors.keys().copied().collect::<Vec<_>>(), vec![2, 3, 4]);
            assert!((t.coefficient.re + 0.5).abs() < 1e-15);
        }
        // the wrap term c†_3 X_7 c_0 carries Z on fermions 1 and 2
        let wrap: Vec<_> = h
            .terms
            .iter()
            .filter(|t| t.factors.get(&7) == Some(&Pauli::X))
            .collect();
        assert_eq!(wrap.len(), 2);
        for t in wrap {
            assert_eq!(t.factors.get(&2), Some(&Pauli::Z));
            assert_eq!(t.factors.get(&4), Some(&Pauli::Z));
        }
    }

    #[test]
    fn symbolic_gauge_invariance() {
        for spec in [
            ModelSpec::periodic(2, 1.0, 0.5),
            ModelSpec::periodic(3, 0.7, -0.2),
            ModelSpec {
                boundary: Boundary::OpenDangling,
                ..ModelSpec::periodic(3, 1.0, 0.5)
            },
        ] {
            let h = build_hamiltonian(&spec).unwrap();
            let g = gauss_operators(&spec).unwrap();
            for gj in &g {
                assert!(h.commutator(gj).is_empty(), "[H, G] != 0 for {spec:?}");
                for gk in &g {
                    assert!(gj.commutator(gk).is_empty());
                }
            }
        }
    }

    #[test]
    fn single_site_configurations() {
        // link, fermion, link
        let basis = PhysicalBasis::from_z_masks(3, &[0b111]);
        assert_eq!(basis.states(), &[0b000, 0b011, 0b101, 0b110]);
        assert_eq!(basis.independent_constraints(), 1);
    }

    #[test]
    fn empty_constraints_keep_everything() {
        let spec = ModelSpec {
            constraints: ConstraintSet::Sites(vec![]),
            ..n2()
        };
        let b = enumerate_physical_basis(&spec).unwrap();
        assert_eq!(b.dim(), 16);
        assert_eq!(b.independent_constraints(), 0);
    }

    #[test]
    fn physical_dimension_is_two_to_the_n() {
        for n in 2..=5 {
            let b = enumerate_physical_basis(&ModelSpec::periodic(n, 1.0, 0.5)).unwrap();
            assert_eq!(b.independent_constraints(), n);
            assert_eq!(b.dim(), 1 << n);
            assert_eq!(b.dim(), b.expected_dim());
        }
        // dropping one constraint gives 2^{N+1}
        let spec = ModelSpec {
            constraints: ConstraintSet::Sites(vec![0, 1]),
            ..ModelSpec::periodic(3, 1.0, 0.5)
        };
        assert_eq!(enumerate_physical_basis(&spec).unwrap().dim(), 16);
    }

    #[test]
    fn gf2_rank_detects_dependence() {
        assert_eq!(gf2_rank(&[0b011, 0b110, 0b101]), 2);
        assert_eq!(gf2_rank(&[0b001, 0b010, 0b100]), 3);
        assert_eq!(gf2_rank(&[]), 0);
    }

    #[test]
    fn invalid_specs() {
        assert!(ModelSpec::periodic(1, 1.0, 0.5).validate().is_err());
        assert!(matches!(
            ModelSpec::periodic(8, 1.0, 0.5).validate(),
            Err(Error::Size(_))
        ));
        let bad = ModelSpec {
            constraints: ConstraintSet::Sites(vec![5]),
            ..n2()
        };
        assert!(bad.validate().is_err());
        assert!(ed_thermal(&n2(), 0.0).is_err());
        assert!(ed_thermal(&n2(), -1.0).is_err());
        assert!(matches!(
            ed_thermal(&ModelSpec::periodic(7, 1.0, 0.5), 1.0),
            Err(Error::Size(_))
        ));
    }

    #[test]
    fn ground_state_is_physical() {
        for n in [2, 3] {
            let spec = ModelSpec::periodic(n, 1.0, 0.5);
            let gs = ed_ground(&spec).unwrap();
            for g in gauss_operators(&spec).unwrap() {
                assert!((gs.state.expectation(&g).unwrap() - 1.0).abs() < 1e-10);
            }
            let h = build_hamiltonian(&spec).unwrap();
            assert!((gs.state.expectation(&h).unwrap() - gs.energy).abs() < 1e-10);
            assert!(unrestricted_ground_energy(&spec).unwrap() <= gs.energy + 1e-12);
        }
    }

    #[test]
    fn thermal_entropy_bounds() {
        let spec = n2();
        let d = enumerate_physical_basis(&spec).unwrap().dim() as f64;
        for t in [0.01, 0.5, 1.0, 10.0, 1e4] {
            let th = ed_thermal(&spec, t).unwrap();
            assert!(th.thermo.entropy >= -1e-15 && th.thermo.entropy <= d.ln() + 1e-12);
            assert!((th.rho.trace() - 1.0).abs() < 1e-12);
            assert!(
                (th.thermo.free_energy - th.thermo.free_energy_from_partition()).abs() < 1e-8
            );
        }
    }
}
