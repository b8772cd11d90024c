use num_complex::Complex64;

use crate::error::{arg, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tolerance on `U†U − 1` (max-abs entry) for a gate to count as unitary.
pub const UNITARY_TOL: f64 = 1e-10;

/// A one- or two-qubit unitary bound to target qubits.
///
/// Two-qubit matrices are indexed by `bit(first) + 2·bit(second)`, matching
/// the little-endian convention of the simulator.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    One {
        target: usize,
        matrix: [[Complex64; 2]; 2],
    },
    Two {
        targets: [usize; 2],
        matrix: [[Complex64; 4]; 4],
    },
    /// Permutation fast path; same action as the corresponding `Two` matrix.
    Cnot { control: usize, target: usize },
}

impl Gate {
    /// Checked constructor for an arbitrary single-qubit unitary.
    pub fn single(matrix: [[Complex64; 2]; 2], target: usize) -> Result<Self> {
        check_unitary(&matrix.map(|r| r.to_vec()))?;
        Ok(Gate::One { target, matrix })
    }

    /// Checked constructor for an arbitrary two-qubit unitary.
    pub fn two(matrix: [[Complex64; 4]; 4], first: usize, second: usize) -> Result<Self> {
        if first == second {
            return arg(format!("duplicate gate targets ({first}, {second})"));
        }
        check_unitary(&matrix.map(|r| r.to_vec()))?;
        Ok(Gate::Two {
            targets: [first, second],
            matrix,
        })
    }

    /// `exp(−iθY/2)`.
    pub fn ry(theta: f64, target: usize) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Gate::One {
            target,
            matrix: [
                [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
            ],
        }
    }

    /// `exp(−iθZ/2)`.
    pub fn rz(theta: f64, target: usize) -> Self {
        let half = theta / 2.0;
        Gate::One {
            target,
            matrix: [
                [Complex64::from_polar(1.0, -half), ZERO],
                [ZERO, Complex64::from_polar(1.0, half)],
            ],
        }
    }

    pub fn x(target: usize) -> Self {
        Gate::One {
            target,
            matrix: [[ZERO, ONE], [ONE, ZERO]],
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        assert_ne!(control, target, "CNOT control and target must differ");
        Gate::Cnot { control, target }
    }

    /// Dense form of a CNOT: local index `bit(control) + 2·bit(target)`, swapping 1 ↔ 3.
    pub fn cnot_matrix() -> [[Complex64; 4]; 4] {
        let mut matrix = [[ZERO; 4]; 4];
        matrix[0][0] = ONE;
        matrix[2][2] = ONE;
        matrix[1][3] = ONE;
        matrix[3][1] = ONE;
        matrix
    }

    pub fn targets(&self) -> Vec<usize> {
        match self {
            Gate::One { target, .. } => vec![*target],
            Gate::Two { targets, .. } => targets.to_vec(),
            Gate::Cnot { control, target } => vec![*control, *target],
        }
    }

    pub fn max_target(&self) -> usize {
        self.targets().into_iter().max().unwrap_or(0)
    }

    /// `G†`.
    pub fn adjoint(&self) -> Gate {
        match self {
            Gate::One { target, matrix } => Gate::One {
                target: *target,
                matrix: std::array::from_fn(|r| std::array::from_fn(|c| matrix[c][r].conj())),
            },
            Gate::Two { targets, matrix } => Gate::Two {
                targets: *targets,
                matrix: std::array::from_fn(|r| std::array::from_fn(|c| matrix[c][r].conj())),
            },
            Gate::Cnot { .. } => self.clone(),
        }
    }

    /// Same gate with every matrix entry conjugated and targets shifted by `offset`.
    pub(crate) fn conjugated_shifted(&self, offset: usize) -> Gate {
        match self {
            Gate::One { target, matrix } => Gate::One {
                target: target + offset,
                matrix: matrix.map(|r| r.map(|z| z.conj())),
            },
            Gate::Two { targets, matrix } => Gate::Two {
                targets: [targets[0] + offset, targets[1] + offset],
                matrix: matrix.map(|r| r.map(|z| z.conj())),
            },
            Gate::Cnot { control, target } => Gate::Cnot {
                control: control + offset,
                target: target + offset,
            },
        }
    }

    /// Apply to a little-endian amplitude vector of `n_qubits` qubits. No range checks.
    pub(crate) fn apply_unchecked(&self, amps: &mut [Complex64]) {
        match self {
            Gate::One { target, matrix } => {
                let bit = 1usize << target;
                let [[a, b], [c, d]] = *matrix;
                for i in 0..amps.len() {
                    if i & bit == 0 {
                        let j = i | bit;
                        let (u, v) = (amps[i], amps[j]);
                        amps[i] = a * u + b * v;
                        amps[j] = c * u + d * v;
                    }
                }
            }
            Gate::Two { targets, matrix } => {
                let b0 = 1usize << targets[0];
                let b1 = 1usize << targets[1];
                for i in 0..amps.len() {
                    if i & (b0 | b1) == 0 {
                        let idx = [i, i | b0, i | b1, i | b0 | b1];
                        let v = idx.map(|k| amps[k]);
                        for (r, &k) in idx.iter().enumerate() {
                            let row = &matrix[r];
                            amps[k] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
                        }
                    }
                }
            }
            Gate::Cnot { control, target } => {
                let c = 1usize << control;
                let t = 1usize << target;
                for i in 0..amps.len() {
                    if i & c != 0 && i & t == 0 {
                        amps.swap(i, i | t);
                    }
                }
            }
        }
    }

    pub(crate) fn check_range(&self, n_qubits: usize) -> Result<()> {
        match self.targets().into_iter().find(|&q| q >= n_qubits) {
            Some(q) => arg(format!("gate target {q} out of range for {n_qubits} qubits")),
            None => Ok(()),
        }
    }
}

fn check_unitary(m: &[Vec<Complex64>]) -> Result<()> {
    let n = m.len();
    for i in 0..n {
        for j in 0..n {
            let mut acc = ZERO;
            for row in m {
                acc += row[i].conj() * row[j];
            }
            let expected = if i == j { ONE } else { ZERO };
            if (acc - expected).norm() > UNITARY_TOL {
                return Err(Error::Validation(format!(
                    "gate is not unitary: (U†U)[{i}][{j}] = {acc}"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_unitary() {
        let m = [[ONE, ONE], [ZERO, ONE]];
        assert!(matches!(Gate::single(m, 0), Err(Error::Validation(_))));
    }

    #[test]
    fn rejects_duplicate_targets() {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = ONE;
        }
        assert!(matches!(Gate::two(m, 1, 1), Err(Error::Argument(_))));
        assert!(Gate::two(m, 0, 1).is_ok());
    }

    #[test]
    fn cnot_fast_path_matches_matrix() {
        let fast = Gate::cnot(2, 0);
        let dense = Gate::two(Gate::cnot_matrix(), 2, 0).unwrap();
        for x in 0..8 {
            let mut a = vec![ZERO; 8];
            a[x] = Complex64::new(0.3, 0.1 * x as f64);
            a[7 - x] += ONE;
            let mut b = a.clone();
            fast.apply_unchecked(&mut a);
            dense.apply_unchecked(&mut b);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn rotations_are_unitary() {
        for theta in [0.0, 0.3, -2.1, 7.0] {
            for g in [Gate::ry(theta, 0), Gate::rz(theta, 0)] {
                let Gate::One { matrix, .. } = g else { unreachable!() };
                assert!(Gate::single(matrix, 0).is_ok());
            }
        }
    }
}
