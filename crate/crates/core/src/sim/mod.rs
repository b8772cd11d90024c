//! Dense n-qubit simulation.
//!
//! Basis states are little-endian: qubit `q` is bit `q` of the basis index.
//! All expectation values are exact; there is no sampling.

pub(crate) mod adjoint;
mod density;
mod gate;
mod state;

pub use density::DensityMatrix;
pub(crate) use density::product_probabilities;
pub use gate::{Gate, UNITARY_TOL};
pub use state::{StateVector, MAX_QUBITS};

use crate::ansatz::Circuit;
use crate::pauli::PauliSum;
use crate::Result;

/// Imaginary parts larger than this (relative to the coefficient 1-norm) are
/// reported as a non-Hermitian observable.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub fn new_statevector(n_qubits: usize) -> Result<StateVector> {
    StateVector::new(n_qubits)
}

pub fn apply_gate(mut state: StateVector, gate: &Gate) -> Result<StateVector> {
    state.apply_gate(gate)?;
    Ok(state)
}

pub fn pauli_expectation(state: &StateVector, observable: &PauliSum) -> Result<f64> {
    state.expectation(observable)
}

pub fn density_from_angles(phi: &[f64]) -> Result<DensityMatrix> {
    DensityMatrix::from_angles(phi)
}

pub fn evolve_density(mut rho: DensityMatrix, circuit: &Circuit) -> Result<DensityMatrix> {
    rho.evolve(circuit)?;
    Ok(rho)
}

pub fn density_expectation(rho: &DensityMatrix, observable: &PauliSum) -> Result<f64> {
    rho.expectation(observable)
}

pub(crate) fn real_part_checked(value: num_complex::Complex64, observable: &PauliSum) -> Result<f64> {
    let scale = observable
        .terms
        .iter()
        .map(|t| t.coefficient.norm())
        .sum::<f64>()
        .max(1.0);
    if value.im.abs() > HERMITIAN_TOL * scale {
        return Err(crate::Error::Validation(format!(
            "expectation has imaginary part {:e}; observable is not Hermitian",
            value.im
        )));
    }
    Ok(value.re)
}
