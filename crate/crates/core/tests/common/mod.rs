//! Helpers shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Second-quantized Hamiltonian built directly in the occupation basis.
///
/// Bit `2j` is the occupation of site `j`, bit `2j+1` the link to its right
/// (bit 0 means `σᶻ = +1`). Fermion signs come from counting occupied sites
/// with a smaller index; nothing here goes through Pauli strings.
pub struct FockModel {
    pub n_sites: usize,
    pub t: f64,
    pub h: f64,
    pub periodic: bool,
}

impl FockModel {
    pub fn dim(&self) -> usize {
        1 << (2 * self.n_sites)
    }

    fn occupied(&self, s: usize, site: usize) -> bool {
        s >> (2 * site) & 1 == 1
    }

    fn link_z(&self, s: usize, link: usize) -> f64 {
        if s >> (2 * link + 1) & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    fn parity_below(&self, s: usize, site: usize) -> f64 {
        let n = (0..site).filter(|&l| self.occupied(s, l)).count();
        if n % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// `c†_to X_link c_from |s⟩` as `(sign, s')`.
    fn hop(&self, s: usize, from: usize, to: usize, link: usize) -> Option<(f64, usize)> {
        if !self.occupied(s, from) || self.occupied(s, to) {
            return None;
        }
        let mut sign = self.parity_below(s, from);
        let removed = s & !(1 << (2 * from));
        sign *= self.parity_below(removed, to);
        let flipped = removed ^ (1 << (2 * link + 1));
        Some((sign, flipped | 1 << (2 * to)))
    }

    pub fn hamiltonian(&self) -> DMatrix<f64> {
        let n = self.n_sites;
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        let bonds = if self.periodic { n } else { n - 1 };
        for s in 0..self.dim() {
            m[(s, s)] = -self.h * (0..n).map(|l| self.link_z(s, l)).sum::<f64>();
            for j in 0..bonds {
                let k = (j + 1) % n;
                // c†_j X c_k and its conjugate c†_k X c_j
                for (from, to) in [(k, j), (j, k)] {
                    if let Some((sign, s2)) = self.hop(s, from, to, j) {
                        m[(s2, s)] += -self.t * sign;
                    }
                }
            }
        }
        m
    }

    /// Eigenvalue of `G_j` on basis state `s`.
    pub fn gauss(&self, s: usize, j: usize) -> f64 {
        let n_sign = if self.occupied(s, j) { -1.0 } else { 1.0 };
        let left = if j > 0 {
            self.link_z(s, j - 1)
        } else if self.periodic {
            self.link_z(s, self.n_sites - 1)
        } else {
            1.0
        };
        n_sign * left * self.link_z(s, j)
    }

    pub fn physical_states(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&s| (0..self.n_sites).all(|j| self.gauss(s, j) > 0.0))
            .collect()
    }

    pub fn physical_spectrum(&self) -> Vec<f64> {
        let states = self.physical_states();
        let full = self.hamiltonian();
        let d = states.len();
        let sub = DMatrix::from_fn(d, d, |a, b| full[(states[a], states[b])]);
        sorted_eigenvalues(sub)
    }

    pub fn full_spectrum(&self) -> Vec<f64> {
        sorted_eigenvalues(self.hamiltonian())
    }
}

pub fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// Central difference of `f` along every coordinate.
pub fn central_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], step: f64) -> Vec<f64> {
    (0..x.len())
        .map(|k| {
            let mut p = x.to_vec();
            let mut m = x.to_vec();
            p[k] += step;
            m[k] -= step;
            (f(&p) - f(&m)) / (2.0 * step)
        })
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
