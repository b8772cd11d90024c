use num_complex::Complex64;

use crate::ansatz::Circuit;
use crate::error::{arg, Error, Result};
use crate::pauli::{MaskedTerm, PauliSum};
use crate::sim::Gate;

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 14;

/// A normalized pure state of `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn new(n_qubits: usize) -> Result<Self> {
        check_size(n_qubits)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut s = Self::new(n_qubits)?;
        if index >= s.amps.len() {
            return arg(format!("basis index {index} out of range"));
        }
        s.amps[0] = Complex64::new(0.0, 0.0);
        s.amps[index] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    /// Wraps raw amplitudes. The vector must have length `2ⁿ` and unit norm within 1e-10.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_size(n_qubits)?;
        if amps.len() != 1 << n_qubits {
            return Err(Error::Size(format!(
                "expected {} amplitudes, got {}",
                1usize << n_qubits,
                amps.len()
            )));
        }
        let s = Self { n_qubits, amps };
        if (s.norm_sqr() - 1.0).abs() > 1e-10 {
            return Err(Error::Validation(format!(
                "state is not normalized (norm² = {})",
                s.norm_sqr()
            )));
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.check_range(self.n_qubits)?;
        gate.apply_unchecked(&mut self.amps);
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits {
            return arg(format!(
                "circuit acts on {} qubits, state has {}",
                circuit.n_qubits(),
                self.n_qubits
            ));
        }
        for g in circuit.gates() {
            g.apply_unchecked(&mut self.amps);
        }
        Ok(())
    }

    /// `Re⟨ψ|O|ψ⟩`; errors if the imaginary part is not negligible.
    pub fn expectation(&self, observable: &PauliSum) -> Result<f64> {
        let value = self.expectation_complex(observable)?;
        super::real_part_checked(value, observable)
    }

    pub fn expectation_complex(&self, observable: &PauliSum) -> Result<Complex64> {
        if observable.min_qubits() > self.n_qubits {
            return arg(format!(
                "observable touches qubit {} but state has {} qubits",
                observable.min_qubits() - 1,
                self.n_qubits
            ));
        }
        Ok(self.expectation_masked(&observable.masked()))
    }

    pub(crate) fn expectation_masked(&self, terms: &[MaskedTerm]) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for t in terms {
            let mut acc = Complex64::new(0.0, 0.0);
            for (y, &a) in self.amps.iter().enumerate() {
                let (amp, x) = t.apply(y);
                acc += self.amps[x].conj() * amp * a;
            }
            total += acc;
        }
        total
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

fn check_size(n_qubits: usize) -> Result<()> {
    if !(1..=MAX_QUBITS).contains(&n_qubits) {
        return Err(Error::Size(format!(
            "n_qubits must be in 1..={MAX_QUBITS}, got {n_qubits}"
        )));
    }
    Ok(())
}
