//! Symbolic Pauli strings with complex coefficients.
//!
//! A [`PauliTerm`] is a coefficient times a tensor product of single-qubit
//! Pauli operators; qubits that do not appear carry the identity. A
//! [`PauliSum`] is a linear combination of terms. Sums can be multiplied,
//! simplified and turned into dense matrices, which is enough to build
//! Jordan–Wigner Hamiltonians symbolically and verify commutation relations
//! without going through matrices.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Coefficients with modulus below this are dropped by [`PauliSum::simplify`].
pub const SIMPLIFY_EPS: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    /// Product of two single-qubit Paulis as `(phase, operator)`; `None` is the identity.
    pub fn mul(self, rhs: Pauli) -> (Complex64, Option<Pauli>) {
        use Pauli::*;
        match (self, rhs) {
            (X, X) | (Y, Y) | (Z, Z) => (ONE, None),
            (X, Y) => (I, Some(Z)),
            (Y, Z) => (I, Some(X)),
            (Z, X) => (I, Some(Y)),
            (Y, X) => (-I, Some(Z)),
            (Z, Y) => (-I, Some(X)),
            (X, Z) => (-I, Some(Y)),
        }
    }

    fn symbol(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// `coefficient · ⊗_q factors[q]`, identity on qubits not listed.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coefficient: Complex64,
    pub factors: BTreeMap<usize, Pauli>,
}

impl PauliTerm {
    pub fn new(coefficient: Complex64, factors: impl IntoIterator<Item = (usize, Pauli)>) -> Self {
        Self {
            coefficient,
            factors: factors.into_iter().collect(),
        }
    }

    pub fn identity(coefficient: Complex64) -> Self {
        Self::new(coefficient, [])
    }

    pub fn single(qubit: usize, pauli: Pauli) -> Self {
        Self::new(ONE, [(qubit, pauli)])
    }

    /// Z on every listed qubit.
    pub fn z_string(qubits: &[usize]) -> Self {
        Self::new(ONE, qubits.iter().map(|&q| (q, Pauli::Z)))
    }

    /// One past the largest qubit index touched (0 for the identity).
    pub fn min_qubits(&self) -> usize {
        self.factors.keys().next_back().map_or(0, |q| q + 1)
    }

    pub fn scaled(&self, by: Complex64) -> Self {
        Self {
            coefficient: self.coefficient * by,
            factors: self.factors.clone(),
        }
    }

    /// Operator product `self · rhs` including the Pauli phase.
    pub fn product(&self, rhs: &PauliTerm) -> PauliTerm {
        let mut coefficient = self.coefficient * rhs.coefficient;
        let mut factors = self.factors.clone();
        for (&q, &p) in &rhs.factors {
            match factors.get(&q) {
                None => {
                    factors.insert(q, p);
                }
                Some(&left) => {
                    let (phase, out) = left.mul(p);
                    coefficient *= phase;
                    match out {
                        Some(o) => {
                            factors.insert(q, o);
                        }
                        None => {
                            factors.remove(&q);
                        }
                    }
                }
            }
        }
        PauliTerm {
            coefficient,
            factors,
        }
    }

    /// Bit-mask form used by the simulators.
    pub fn masked(&self) -> MaskedTerm {
        let mut flip = 0usize;
        let mut sign = 0usize;
        let mut n_y = 0u32;
        for (&q, &p) in &self.factors {
            let bit = 1usize << q;
            match p {
                Pauli::X => flip |= bit,
                Pauli::Y => {
                    flip |= bit;
                    sign |= bit;
                    n_y += 1;
                }
                Pauli::Z => sign |= bit,
            }
        }
        let y_phase = match n_y % 4 {
            0 => ONE,
            1 => I,
            2 => -ONE,
            _ => -I,
        };
        MaskedTerm {
            coefficient: self.coefficient * y_phase,
            flip,
            sign,
        }
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:+}{:+}i)", self.coefficient.re, self.coefficient.im)?;
        if self.factors.is_empty() {
            return write!(f, " I");
        }
        for (q, p) in &self.factors {
            write!(f, " {}{}", p.symbol(), q)?;
        }
        Ok(())
    }
}

/// A Pauli string in bit-mask form: `P|y⟩ = coefficient · (−1)^{|y & sign|} |y ⊕ flip⟩`.
///
/// The `i^{#Y}` phase is folded into `coefficient`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskedTerm {
    pub coefficient: Complex64,
    pub flip: usize,
    pub sign: usize,
}

impl MaskedTerm {
    /// `(amplitude, target)` such that `P|basis⟩ = amplitude |target⟩`.
    #[inline]
    pub fn apply(&self, basis: usize) -> (Complex64, usize) {
        let amp = if (basis & self.sign).count_ones() % 2 == 0 {
            self.coefficient
        } else {
            -self.coefficient
        };
        (amp, basis ^ self.flip)
    }

    /// True when the term is diagonal in the computational basis.
    pub fn is_diagonal(&self) -> bool {
        self.flip == 0
    }
}

/// A linear combination of [`PauliTerm`]s.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PauliSum {
    pub terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = PauliTerm>) -> Self {
        Self {
            terms: terms.into_iter().collect(),
        }
    }

    pub fn identity() -> Self {
        Self::from_terms([PauliTerm::identity(ONE)])
    }

    pub fn single(qubit: usize, pauli: Pauli) -> Self {
        Self::from_terms([PauliTerm::single(qubit, pauli)])
    }

    /// `(X + iY)/2 = |0⟩⟨1|` on `qubit`.
    pub fn sigma_plus(qubit: usize) -> Self {
        Self::from_terms([
            PauliTerm::new(Complex64::new(0.5, 0.0), [(qubit, Pauli::X)]),
            PauliTerm::new(Complex64::new(0.0, 0.5), [(qubit, Pauli::Y)]),
        ])
    }

    /// `(X − iY)/2 = |1⟩⟨0|` on `qubit`.
    pub fn sigma_minus(qubit: usize) -> Self {
        Self::from_terms([
            PauliTerm::new(Complex64::new(0.5, 0.0), [(qubit, Pauli::X)]),
            PauliTerm::new(Complex64::new(0.0, -0.5), [(qubit, Pauli::Y)]),
        ])
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_qubits(&self) -> usize {
        self.terms.iter().map(PauliTerm::min_qubits).max().unwrap_or(0)
    }

    pub fn scaled(&self, by: Complex64) -> Self {
        Self::from_terms(self.terms.iter().map(|t| t.scaled(by)))
    }

    /// Hermitian conjugate. Pauli strings are Hermitian, so only coefficients conjugate.
    pub fn adjoint(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|t| PauliTerm {
            coefficient: t.coefficient.conj(),
            factors: t.factors.clone(),
        }))
    }

    /// Merge equal strings and drop negligible coefficients. Output is sorted by string.
    pub fn simplify(&self) -> Self {
        let mut merged: BTreeMap<Vec<(usize, Pauli)>, Complex64> = BTreeMap::new();
        for t in &self.terms {
            let key: Vec<_> = t.factors.iter().map(|(&q, &p)| (q, p)).collect();
            *merged.entry(key).or_insert(ZERO) += t.coefficient;
        }
        Self::from_terms(
            merged
                .into_iter()
                .filter(|(_, c)| c.norm() > SIMPLIFY_EPS)
                .map(|(k, c)| PauliTerm::new(c, k)),
        )
    }

    /// `[self, rhs]`, simplified.
    pub fn commutator(&self, rhs: &PauliSum) -> PauliSum {
        (self * rhs - rhs * self).simplify()
    }

    /// True when every coefficient of the simplified sum is real within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.simplify().terms.iter().all(|t| t.coefficient.im.abs() <= tol)
    }

    pub fn masked(&self) -> Vec<MaskedTerm> {
        self.terms.iter().map(PauliTerm::masked).collect()
    }

    /// Dense `2ⁿ × 2ⁿ` matrix with little-endian basis ordering.
    pub fn to_dense(&self, n_qubits: usize) -> DMatrix<Complex64> {
        let dim = 1usize << n_qubits;
        let mut m = DMatrix::from_element(dim, dim, ZERO);
        for term in self.masked() {
            for col in 0..dim {
                let (amp, row) = term.apply(col);
                m[(row, col)] += amp;
            }
        }
        m
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl From<PauliTerm> for PauliSum {
    fn from(t: PauliTerm) -> Self {
        Self::from_terms([t])
    }
}

impl Add for &PauliSum {
    type Output = PauliSum;
    fn add(self, rhs: &PauliSum) -> PauliSum {
        PauliSum::from_terms(self.terms.iter().chain(&rhs.terms).cloned())
    }
}

impl Add for PauliSum {
    type Output = PauliSum;
    fn add(mut self, rhs: PauliSum) -> PauliSum {
        self.terms.extend(rhs.terms);
        self
    }
}

impl Neg for PauliSum {
    type Output = PauliSum;
    fn neg(self) -> PauliSum {
        self.scaled(-ONE)
    }
}

impl Sub for PauliSum {
    type Output = PauliSum;
    fn sub(self, rhs: PauliSum) -> PauliSum {
        self + (-rhs)
    }
}

impl Mul for &PauliSum {
    type Output = PauliSum;
    fn mul(self, rhs: &PauliSum) -> PauliSum {
        let mut out = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for a in &self.terms {
            for b in &rhs.terms {
                out.push(a.product(b));
            }
        }
        PauliSum::from_terms(out).simplify()
    }
}

impl Mul for PauliSum {
    type Output = PauliSum;
    fn mul(self, rhs: PauliSum) -> PauliSum {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_qubit_algebra() {
        let x = PauliSum::single(0, Pauli::X);
        let y = PauliSum::single(0, Pauli::Y);
        let z = PauliSum::single(0, Pauli::Z);
        assert_eq!(&x * &y, z.scaled(I));
        assert_eq!(&y * &x, z.scaled(-I));
        assert_eq!((&x * &x).simplify(), PauliSum::identity());
        assert_eq!(x.commutator(&y), z.scaled(c(0.0, 2.0)));
    }

    #[test]
    fn ladder_operators_act_as_documented() {
        let plus = PauliSum::sigma_plus(0).to_dense(1);
        let minus = PauliSum::sigma_minus(0).to_dense(1);
        // |0⟩⟨1|
        assert!((plus[(0, 1)] - ONE).norm() < 1e-15);
        assert!(plus[(1, 0)].norm() < 1e-15);
        // |1⟩⟨0|
        assert!((minus[(1, 0)] - ONE).norm() < 1e-15);
        assert!(minus[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn dense_matrix_matches_kronecker_products() {
        let x = DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let y = DMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]);
        // little-endian: qubit 1 is the left Kronecker factor
        let term = PauliTerm::new(c(0.3, 0.0), [(0, Pauli::X), (1, Pauli::Y)]);
        let dense = PauliSum::from(term).to_dense(2);
        let expected = y.kronecker(&x) * c(0.3, 0.0);
        assert!((dense - expected).norm() < 1e-15);
    }

    #[test]
    fn simplify_cancels() {
        let a = PauliSum::single(1, Pauli::Z);
        let s = (a.clone() - a).simplify();
        assert!(s.is_empty());
    }

    #[test]
    fn masked_apply_matches_dense() {
        let term = PauliTerm::new(c(0.0, 1.0), [(0, Pauli::Y), (2, Pauli::Z), (3, Pauli::X)]);
        let dense = PauliSum::from(term.clone()).to_dense(4);
        let m = term.masked();
        for col in 0..16 {
            let (amp, row) = m.apply(col);
            assert!((dense[(row, col)] - amp).norm() < 1e-15);
        }
    }
}
