use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::ansatz::Circuit;
use crate::error::{arg, Error, Result};
use crate::pauli::{MaskedTerm, PauliSum};
use crate::sim::{Gate, StateVector, MAX_QUBITS};

/// A mixed state of `n_qubits` qubits stored as a dense `2ⁿ × 2ⁿ` matrix.
///
/// Storage is column-major, so entry `(r, c)` sits at `r + c·2ⁿ`. Viewed as a
/// vector of `2n` qubits, the row index occupies qubits `0..n` and the column
/// index qubits `n..2n`; `UρU†` is then `U` on the low half and `U*` on the
/// high half.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Product state `⊗ᵢ (sin²φᵢ |0⟩⟨0| + cos²φᵢ |1⟩⟨1|)`.
    pub fn from_angles(phi: &[f64]) -> Result<Self> {
        let n = phi.len();
        check_size(n)?;
        let probs = product_probabilities(phi);
        let entries = DMatrix::from_diagonal(&DVector::from_iterator(
            probs.len(),
            probs.iter().map(|&p| Complex64::new(p, 0.0)),
        ));
        Ok(Self {
            n_qubits: n,
            entries,
        })
    }

    pub fn from_pure(state: &StateVector) -> Self {
        let v = DVector::from_column_slice(state.amplitudes());
        Self {
            n_qubits: state.n_qubits(),
            entries: &v * v.adjoint(),
        }
    }

    /// Wraps a matrix after checking shape, Hermiticity, unit trace and positivity within 1e-10.
    pub fn from_matrix(n_qubits: usize, entries: DMatrix<Complex64>) -> Result<Self> {
        check_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        if entries.shape() != (dim, dim) {
            return Err(Error::Size(format!(
                "expected a {dim}×{dim} matrix, got {:?}",
                entries.shape()
            )));
        }
        let rho = Self { n_qubits, entries };
        if !rho.is_hermitian(1e-10) {
            return Err(Error::Validation("density matrix is not Hermitian".into()));
        }
        if (rho.trace() - 1.0).abs() > 1e-10 {
            return Err(Error::Validation(format!("trace is {}", rho.trace())));
        }
        if rho.eigenvalues().iter().any(|&e| e < -1e-10) {
            return Err(Error::Validation("density matrix has a negative eigenvalue".into()));
        }
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(n_qubits: usize, entries: DMatrix<Complex64>) -> Self {
        Self { n_qubits, entries }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.entries - self.entries.adjoint()).camax() <= tol
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.entries.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// `−Tr ρ log ρ` from the spectrum, natural log, `0·log 0 = 0`.
    pub fn von_neumann_entropy(&self) -> f64 {
        self.eigenvalues()
            .into_iter()
            .filter(|&p| p > 0.0)
            .map(|p| -p * p.ln())
            .sum()
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.check_range(self.n_qubits)?;
        self.apply_unchecked(gate);
        Ok(())
    }

    fn apply_unchecked(&mut self, gate: &Gate) {
        let flat = self.entries.as_mut_slice();
        gate.apply_unchecked(flat);
        gate.conjugated_shifted(self.n_qubits).apply_unchecked(flat);
    }

    /// `ρ ← UρU†` for the whole circuit.
    pub fn evolve(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits {
            return arg(format!(
                "circuit acts on {} qubits, density matrix has {}",
                circuit.n_qubits(),
                self.n_qubits
            ));
        }
        for g in circuit.gates() {
            self.apply_unchecked(g);
        }
        Ok(())
    }

    /// `Re Tr(ρO)`; errors if the imaginary part is not negligible.
    pub fn expectation(&self, observable: &PauliSum) -> Result<f64> {
        if observable.min_qubits() > self.n_qubits {
            return arg(format!(
                "observable touches qubit {} but density matrix has {} qubits",
                observable.min_qubits() - 1,
                self.n_qubits
            ));
        }
        let value = self.expectation_masked(&observable.masked());
        super::real_part_checked(value, observable)
    }

    /// `Tr(ρP) = Σ_y phase(y) ρ[y, y ⊕ flip]`.
    pub(crate) fn expectation_masked(&self, terms: &[MaskedTerm]) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for t in terms {
            for y in 0..self.dim() {
                let (amp, x) = t.apply(y);
                total += amp * self.entries[(y, x)];
            }
        }
        total
    }
}

/// Diagonal of the product state: `p_x = Πᵢ (sin²φᵢ if bitᵢ(x) = 0 else cos²φᵢ)`.
pub(crate) fn product_probabilities(phi: &[f64]) -> Vec<f64> {
    let mut probs = vec![1.0];
    for (q, &angle) in phi.iter().enumerate() {
        let s2 = angle.sin().powi(2);
        let c2 = angle.cos().powi(2);
        let mut next = vec![0.0; probs.len() * 2];
        let bit = 1usize << q;
        for (x, &p) in probs.iter().enumerate() {
            next[x] = p * s2;
            next[x | bit] = p * c2;
        }
        probs = next;
    }
    probs
}

fn check_size(n_qubits: usize) -> Result<()> {
    // the density matrix is a 2n-qubit vector internally
    if n_qubits == 0 || 2 * n_qubits > 2 * MAX_QUBITS {
        return Err(Error::Size(format!(
            "n_qubits must be in 1..={MAX_QUBITS}, got {n_qubits}"
        )));
    }
    Ok(())
}
