//! Reverse-mode derivatives of expectation values.
//!
//! For `ψ = G_m ⋯ G_1 |x⟩` with rotations `G_k = exp(−iθ_k P_k / 2)`,
//! `∂⟨ψ|O|ψ⟩/∂θ_k = Im ⟨λ_k| P_k |ψ_k⟩` where `ψ_k` is the state right after
//! `G_k` and `λ_k = G_{k+1}† ⋯ G_m† O ψ`. Both are obtained by undoing the
//! gates one at a time, so all derivatives cost a few circuit passes. The
//! result equals the parameter-shift difference up to rounding.

use num_complex::Complex64;

use crate::ansatz::Circuit;
use crate::pauli::{MaskedTerm, Pauli};

/// Generator of a parameterized gate: `G = exp(−iθ P_qubit / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Generator {
    pub parameter: usize,
    pub qubit: usize,
    pub pauli: Pauli,
}

/// Values and derivatives of several observables for one input basis state.
pub(crate) struct AdjointResult {
    /// `values[j] = ⟨ψ|O_j|ψ⟩`.
    pub values: Vec<f64>,
    /// `derivatives[k][j] = ∂⟨ψ|O_j|ψ⟩/∂θ_k`.
    pub derivatives: Vec<Vec<f64>>,
}

fn apply_terms(terms: &[MaskedTerm], psi: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
    for t in terms {
        for (y, &a) in psi.iter().enumerate() {
            let (amp, x) = t.apply(y);
            out[x] += amp * a;
        }
    }
    out
}

/// `⟨λ|P_q|ψ⟩` without materializing `P_q|ψ⟩`.
fn pauli_matrix_element(pauli: Pauli, qubit: usize, lambda: &[Complex64], psi: &[Complex64]) -> Complex64 {
    let bit = 1usize << qubit;
    let i = Complex64::new(0.0, 1.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for (y, l) in lambda.iter().enumerate() {
        let set = y & bit != 0;
        let v = match pauli {
            Pauli::X => psi[y ^ bit],
            // Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩
            Pauli::Y => {
                if set {
                    i * psi[y ^ bit]
                } else {
                    -i * psi[y ^ bit]
                }
            }
            Pauli::Z => {
                if set {
                    -psi[y]
                } else {
                    psi[y]
                }
            }
        };
        acc += l.conj() * v;
    }
    acc
}

/// Runs `circuit` on basis state `basis` and differentiates every observable.
///
/// `generators[g]` describes gate `g` of the circuit (`None` for fixed gates).
pub(crate) fn adjoint_derivatives(
    circuit: &Circuit,
    generators: &[Option<Generator>],
    n_parameters: usize,
    basis: usize,
    observables: &[Vec<MaskedTerm>],
) -> AdjointResult {
    let dim = 1usize << circuit.n_qubits();
    let mut psi = vec![Complex64::new(0.0, 0.0); dim];
    psi[basis] = Complex64::new(1.0, 0.0);
    for g in circuit.gates() {
        g.apply_unchecked(&mut psi);
    }
    let mut lambdas: Vec<Vec<Complex64>> = observables.iter().map(|o| apply_terms(o, &psi)).collect();
    let values = lambdas
        .iter()
        .map(|l| psi.iter().zip(l).map(|(a, b)| (a.conj() * b).re).sum())
        .collect();

    let mut derivatives = vec![vec![0.0; observables.len()]; n_parameters];
    for (gate, gen) in circuit.gates().iter().zip(generators).rev() {
        if let Some(gen) = gen {
            for (d, l) in derivatives[gen.parameter].iter_mut().zip(&lambdas) {
                *d += pauli_matrix_element(gen.pauli, gen.qubit, l, &psi).im;
            }
        }
        let inverse = gate.adjoint();
        inverse.apply_unchecked(&mut psi);
        for l in &mut lambdas {
            inverse.apply_unchecked(l);
        }
    }
    AdjointResult { values, derivatives }
}
