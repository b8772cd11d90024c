//! Variational preparation of ground and thermal states of a one-dimensional
//! Z₂ lattice gauge theory with spinless fermions.
//!
//! The Gauss-law constraint is treated as a second objective next to the
//! energy (or free energy) and both are minimized together with the multiple
//! gradient descent algorithm (MGDA). Every variational result can be checked
//! against the exact-diagonalization oracle in [`model`], which works in the
//! gauge-invariant subspace only.
//!
//! Module map:
//!
//! * [`pauli`]: symbolic Pauli strings and sums.
//! * [`sim`]: dense state-vector and density-matrix simulation.
//! * [`ansatz`]: the layered hardware-efficient circuit template.
//! * [`model`]: Hamiltonian, Gauss operators, physical basis, exact oracles.
//! * [`objectives`]: cost functions and their exact gradients.
//! * [`moo`]: MGDA weights, Frank–Wolfe, KKT residual and descent steps.
//! * [`drivers`]: end-to-end VQE/VQT loops and sweeps.
//! * [`config`] and [`cli`]: the command-line front end.

pub mod ansatz;
pub mod cli;
pub mod config;
pub mod drivers;
mod error;
pub mod model;
pub mod moo;
pub mod objectives;
pub mod pauli;
pub mod sim;

pub use error::{Error, Result};
pub use num_complex::Complex64;
