//! Layered hardware-efficient ansatz.
//!
//! Each block is an `R_y` layer, an `R_z` layer and a CNOT entangling layer.
//! Parameters are laid out block-major; inside a block the `R_y` angles come
//! first in qubit order, then the `R_z` angles.

use crate::error::{arg, Result};
use crate::sim::Gate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entangler {
    /// CNOT(q, q+1) for every q, closed by CNOT(n−1, 0).
    Ring,
    /// CNOT(q, q+1) only.
    Chain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotKind {
    Ry,
    Rz,
    Entangle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateSlot {
    pub kind: SlotKind,
    /// Rotation target, or `[control, target]` for entanglers.
    pub qubits: [usize; 2],
    pub parameter: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnsatzTemplate {
    n_qubits: usize,
    n_blocks: usize,
    entangler: Entangler,
    slots: Vec<GateSlot>,
}

impl AnsatzTemplate {
    /// Ring-entangled template with `n_blocks` blocks.
    pub fn new(n_qubits: usize, n_blocks: usize) -> Result<Self> {
        Self::with_entangler(n_qubits, n_blocks, Entangler::Ring)
    }

    pub fn with_entangler(n_qubits: usize, n_blocks: usize, entangler: Entangler) -> Result<Self> {
        if n_qubits < 2 {
            return arg(format!("ansatz needs at least 2 qubits, got {n_qubits}"));
        }
        if n_blocks < 1 {
            return arg("ansatz needs at least one block");
        }
        let mut slots = Vec::new();
        let mut next = 0;
        for _ in 0..n_blocks {
            for kind in [SlotKind::Ry, SlotKind::Rz] {
                for q in 0..n_qubits {
                    slots.push(GateSlot {
                        kind,
                        qubits: [q, q],
                        parameter: Some(next),
                    });
                    next += 1;
                }
            }
            for q in 0..n_qubits - 1 {
                slots.push(entangle(q, q + 1));
            }
            if entangler == Entangler::Ring {
                slots.push(entangle(n_qubits - 1, 0));
            }
        }
        Ok(Self {
            n_qubits,
            n_blocks,
            entangler,
            slots,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_blocks(&self) -> usize {
        self.n_blocks
    }

    pub fn entangler(&self) -> Entangler {
        self.entangler
    }

    pub fn parameter_count(&self) -> usize {
        2 * self.n_qubits * self.n_blocks
    }

    pub fn slots(&self) -> &[GateSlot] {
        &self.slots
    }

    /// Concrete circuit for the angle vector `theta`.
    pub fn bind(&self, theta: &[f64]) -> Result<Circuit> {
        if theta.len() != self.parameter_count() {
            return arg(format!(
                "expected {} parameters, got {}",
                self.parameter_count(),
                theta.len()
            ));
        }
        let gates = self
            .slots
            .iter()
            .map(|s| match (s.kind, s.parameter) {
                (SlotKind::Ry, Some(k)) => Gate::ry(theta[k], s.qubits[0]),
                (SlotKind::Rz, Some(k)) => Gate::rz(theta[k], s.qubits[0]),
                _ => Gate::cnot(s.qubits[0], s.qubits[1]),
            })
            .collect();
        Ok(Circuit {
            n_qubits: self.n_qubits,
            gates,
        })
    }
}

fn entangle(control: usize, target: usize) -> GateSlot {
    GateSlot {
        kind: SlotKind::Entangle,
        qubits: [control, target],
        parameter: None,
    }
}

pub fn build_ansatz(n_qubits: usize, n_blocks: usize) -> Result<AnsatzTemplate> {
    AnsatzTemplate::new(n_qubits, n_blocks)
}

pub fn bind_parameters(template: &AnsatzTemplate, theta: &[f64]) -> Result<Circuit> {
    template.bind(theta)
}

/// An ordered list of gates on a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            g.check_range(n_qubits)?;
        }
        Ok(Self { n_qubits, gates })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }
}
