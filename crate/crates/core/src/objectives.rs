//! Cost functions and their exact gradients.
//!
//! Pure-state (VQE) objectives are functions of the circuit angles `θ`;
//! mixed-state (VQT) objectives also depend on the latent angles `φ` of the
//! product input state. Gradients are exact:
//!
//! * `θ` components are exact circuit derivatives. Every parameterized gate is
//!   `exp(−iθP/2)`, so `∂E/∂θ_k = [E(θ + π/2·e_k) − E(θ − π/2·e_k)] / 2`
//!   (parameter shift). [`GradientMethod::Adjoint`], the default, computes
//!   the same numbers in one reverse sweep per input state; the shifted
//!   evaluations remain available as [`GradientMethod::ParameterShift`].
//! * `φ` components differentiate the diagonal input distribution. Writing
//!   `Tr(UρU†O) = Σ_x p_x(φ) ⟨Ux|O|Ux⟩`, only `p_x` depends on `φ`.
//! * The Gauss term `Σ|⟨G_j⟩ − 1|` uses the subgradient `sign(⟨G_j⟩ − 1)`
//!   with `sign(0) = 0`.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzTemplate, SlotKind};
use crate::error::{arg, Result};
use crate::model::{build_hamiltonian, enforced_gauss_operators, ModelSpec};
use crate::pauli::{MaskedTerm, Pauli, PauliSum};
use crate::sim::adjoint::{adjoint_derivatives, Generator};
use crate::sim::{DensityMatrix, StateVector};

/// How `θ` derivatives are computed. Both are exact.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMethod {
    /// Reverse sweep through the circuit.
    #[default]
    Adjoint,
    /// Two shifted circuit evaluations per parameter.
    ParameterShift,
}

/// Circuit angles plus (for VQT) latent angles of the input state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaPhi {
    pub theta: Vec<f64>,
    #[serde(default)]
    pub phi: Vec<f64>,
}

impl ThetaPhi {
    pub fn pure(theta: Vec<f64>) -> Self {
        Self { theta, phi: Vec::new() }
    }

    pub fn mixed(theta: Vec<f64>, phi: Vec<f64>) -> Self {
        Self { theta, phi }
    }

    /// `θ` followed by `φ`.
    pub fn flatten(&self) -> Vec<f64> {
        self.theta.iter().chain(&self.phi).copied().collect()
    }

    /// Inverse of [`flatten`](Self::flatten) with the same `θ` length as `self`.
    pub fn with_flat(&self, flat: &[f64]) -> Self {
        let (t, p) = flat.split_at(self.theta.len());
        Self {
            theta: t.to_vec(),
            phi: p.to_vec(),
        }
    }
}

/// The objectives the drivers can minimize or differentiate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Objective {
    /// `⟨ψ_θ|H|ψ_θ⟩`.
    VqeEnergy,
    /// `Σ_j |⟨ψ_θ|G_j|ψ_θ⟩ − 1|`.
    GaussViolation,
    /// `VqeEnergy + μ · GaussViolation`.
    VqePenalty { mu: f64 },
    /// `S(φ)`.
    Entropy,
    /// `Tr(ρ(φ,θ)H) − T·S(φ)`.
    VqtFreeEnergy { temperature: f64 },
    /// `Σ_j |Tr(ρ(φ,θ)G_j) − 1|`.
    VqtGaussViolation,
    /// `VqtFreeEnergy + μ · VqtGaussViolation`.
    VqtPenalty { temperature: f64, mu: f64 },
}

impl Objective {
    pub fn is_mixed(&self) -> bool {
        matches!(
            self,
            Objective::Entropy
                | Objective::VqtFreeEnergy { .. }
                | Objective::VqtGaussViolation
                | Objective::VqtPenalty { .. }
        )
    }
}

/// Expectations of `H` and of every enforced `G_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observables {
    pub energy: f64,
    pub gauss: Vec<f64>,
}

impl Observables {
    pub fn violation(&self) -> f64 {
        self.gauss.iter().map(|g| (g - 1.0).abs()).sum()
    }
}

/// Values and gradients of the two MGDA objectives at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PairEvaluation {
    pub l1: f64,
    pub l2: f64,
    /// Gradient of `l1`, flattened `θ` then `φ`.
    pub grad_l1: Vec<f64>,
    pub grad_l2: Vec<f64>,
    pub observables: Observables,
}

/// Everything needed to evaluate objectives for one model and ansatz.
#[derive(Debug, Clone)]
pub struct Problem {
    spec: ModelSpec,
    template: AnsatzTemplate,
    hamiltonian: PauliSum,
    gauss: Vec<PauliSum>,
    h_terms: Vec<MaskedTerm>,
    g_terms: Vec<Vec<MaskedTerm>>,
    /// `H` followed by every `G_j`.
    all_terms: Vec<Vec<MaskedTerm>>,
    generators: Vec<Option<Generator>>,
    method: GradientMethod,
}

impl Problem {
    pub fn new(spec: ModelSpec, template: AnsatzTemplate) -> Result<Self> {
        spec.validate()?;
        if template.n_qubits() != spec.n_qubits() {
            return arg(format!(
                "ansatz has {} qubits, model needs {}",
                template.n_qubits(),
                spec.n_qubits()
            ));
        }
        let hamiltonian = build_hamiltonian(&spec)?;
        let gauss = enforced_gauss_operators(&spec)?;
        let h_terms = hamiltonian.masked();
        let g_terms: Vec<Vec<MaskedTerm>> = gauss.iter().map(PauliSum::masked).collect();
        let generators = template
            .slots()
            .iter()
            .map(|slot| {
                let pauli = match slot.kind {
                    SlotKind::Ry => Pauli::Y,
                    SlotKind::Rz => Pauli::Z,
                    SlotKind::Entangle => return None,
                };
                slot.parameter.map(|parameter| Generator {
                    parameter,
                    qubit: slot.qubits[0],
                    pauli,
                })
            })
            .collect();
        Ok(Self {
            all_terms: std::iter::once(h_terms.clone()).chain(g_terms.iter().cloned()).collect(),
            h_terms,
            g_terms,
            generators,
            method: GradientMethod::default(),
            spec,
            template,
            hamiltonian,
            gauss,
        })
    }

    /// Ring ansatz with `n_blocks` blocks on the model's register.
    pub fn with_blocks(spec: ModelSpec, n_blocks: usize) -> Result<Self> {
        let template = AnsatzTemplate::new(spec.n_qubits(), n_blocks)?;
        Self::new(spec, template)
    }

    pub fn with_gradient_method(mut self, method: GradientMethod) -> Self {
        self.method = method;
        self
    }

    pub fn gradient_method(&self) -> GradientMethod {
        self.method
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn template(&self) -> &AnsatzTemplate {
        &self.template
    }

    pub fn hamiltonian(&self) -> &PauliSum {
        &self.hamiltonian
    }

    pub fn gauss_operators(&self) -> &[PauliSum] {
        &self.gauss
    }

    pub fn n_qubits(&self) -> usize {
        self.spec.n_qubits()
    }

    pub fn n_theta(&self) -> usize {
        self.template.parameter_count()
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_theta() {
            return arg(format!(
                "expected {} circuit parameters, got {}",
                self.n_theta(),
                theta.len()
            ));
        }
        Ok(())
    }

    fn check_phi(&self, phi: &[f64]) -> Result<()> {
        if phi.len() != self.n_qubits() {
            return arg(format!(
                "expected {} latent angles, got {}",
                self.n_qubits(),
                phi.len()
            ));
        }
        Ok(())
    }

    /// `U(θ)|0…0⟩`.
    pub fn prepare_state(&self, theta: &[f64]) -> Result<StateVector> {
        let circuit = self.template.bind(theta)?;
        let mut s = StateVector::new(self.n_qubits())?;
        s.apply_circuit(&circuit)?;
        Ok(s)
    }

    /// `U(θ) ρ(φ) U(θ)†`.
    pub fn prepare_density(&self, theta: &[f64], phi: &[f64]) -> Result<DensityMatrix> {
        self.check_phi(phi)?;
        let circuit = self.template.bind(theta)?;
        let mut rho = DensityMatrix::from_angles(phi)?;
        rho.evolve(&circuit)?;
        Ok(rho)
    }

    fn observe_pure(&self, s: &StateVector) -> Observables {
        Observables {
            energy: s.expectation_masked(&self.h_terms).re,
            gauss: self.g_terms.iter().map(|g| s.expectation_masked(g).re).collect(),
        }
    }

    fn observe_mixed(&self, rho: &DensityMatrix) -> Observables {
        Observables {
            energy: rho.expectation_masked(&self.h_terms).re,
            gauss: self.g_terms.iter().map(|g| rho.expectation_masked(g).re).collect(),
        }
    }

    pub fn pure_observables(&self, theta: &[f64]) -> Result<Observables> {
        Ok(self.observe_pure(&self.prepare_state(theta)?))
    }

    pub fn mixed_observables(&self, theta: &[f64], phi: &[f64]) -> Result<Observables> {
        Ok(self.observe_mixed(&self.prepare_density(theta, phi)?))
    }

    /// `∂/∂θ_k` of `H` and every `G_j` by parameter shift; `[k]` holds `(dE, dG_j…)`.
    fn shift_derivatives<F>(&self, theta: &[f64], observe: F) -> Result<Vec<Observables>>
    where
        F: Fn(&[f64]) -> Result<Observables> + Sync,
    {
        (0..theta.len())
            .into_par_iter()
            .map(|k| {
                let mut plus = theta.to_vec();
                plus[k] += FRAC_PI_2;
                let mut minus = theta.to_vec();
                minus[k] -= FRAC_PI_2;
                let p = observe(&plus)?;
                let m = observe(&minus)?;
                Ok(Observables {
                    energy: 0.5 * (p.energy - m.energy),
                    gauss: p.gauss.iter().zip(&m.gauss).map(|(a, b)| 0.5 * (a - b)).collect(),
                })
            })
            .collect()
    }

    /// `⟨Ux|O|Ux⟩` for `H` and every `G_j`, for every basis state `x`.
    fn basis_observables(&self, theta: &[f64]) -> Result<Vec<Observables>> {
        let n = self.n_qubits();
        let circuit = self.template.bind(theta)?;
        (0..1usize << n)
            .into_par_iter()
            .map(|x| {
                let mut s = StateVector::basis(n, x)?;
                s.apply_circuit(&circuit)?;
                Ok(self.observe_pure(&s))
            })
            .collect()
    }

    /// Adjoint sweep from `|x⟩` for every `(x, weight)`; returns the per-state
    /// observables and the weighted sum of their `θ` derivatives.
    fn adjoint_ensemble(&self, theta: &[f64], weights: &[(usize, f64)]) -> Result<(Vec<Observables>, Vec<Observables>)> {
        let circuit = self.template.bind(theta)?;
        let n_obs = self.all_terms.len();
        let runs: Vec<_> = weights
            .par_iter()
            .map(|&(x, _)| adjoint_derivatives(&circuit, &self.generators, theta.len(), x, &self.all_terms))
            .collect();
        let mut total = vec![vec![0.0; n_obs]; theta.len()];
        for (run, &(_, w)) in runs.iter().zip(weights) {
            for (t, d) in total.iter_mut().zip(&run.derivatives) {
                for (a, b) in t.iter_mut().zip(d) {
                    *a += w * b;
                }
            }
        }
        let split = |v: &[f64]| Observables {
            energy: v[0],
            gauss: v[1..].to_vec(),
        };
        Ok((
            runs.iter().map(|r| split(&r.values)).collect(),
            total.iter().map(|v| split(v)).collect(),
        ))
    }

    /// `φ`-derivatives of `Tr(U ρ(φ) U† O)` for `H` and every `G_j`, given
    /// `⟨Ux|O|Ux⟩` for every basis state `x`.
    fn latent_derivatives(&self, phi: &[f64], per_basis: &[Observables]) -> Vec<Observables> {
        let n = self.n_qubits();
        let s2: Vec<f64> = phi.iter().map(|a| a.sin().powi(2)).collect();
        let c2: Vec<f64> = phi.iter().map(|a| a.cos().powi(2)).collect();
        let d: Vec<f64> = phi.iter().map(|a| (2.0 * a).sin()).collect();
        let n_g = self.g_terms.len();

        (0..n)
            .map(|i| {
                let mut out = Observables {
                    energy: 0.0,
                    gauss: vec![0.0; n_g],
                };
                for (x, obs) in per_basis.iter().enumerate() {
                    let mut w = if x >> i & 1 == 0 { d[i] } else { -d[i] };
                    for k in (0..n).filter(|&k| k != i) {
                        w *= if x >> k & 1 == 0 { s2[k] } else { c2[k] };
                    }
                    out.energy += w * obs.energy;
                    for (o, g) in out.gauss.iter_mut().zip(&obs.gauss) {
                        *o += w * g;
                    }
                }
                out
            })
            .collect()
    }

    /// `L₁ = ⟨H⟩`, `L₂ = Σ|⟨G_j⟩ − 1|` and their `θ` gradients.
    pub fn vqe_pair(&self, theta: &[f64]) -> Result<PairEvaluation> {
        self.check_theta(theta)?;
        let (obs, derivs) = match self.method {
            GradientMethod::Adjoint => {
                let (mut values, derivs) = self.adjoint_ensemble(theta, &[(0, 1.0)])?;
                (values.remove(0), derivs)
            }
            GradientMethod::ParameterShift => (
                self.pure_observables(theta)?,
                self.shift_derivatives(theta, |t| self.pure_observables(t))?,
            ),
        };
        Ok(assemble_pair(obs, &derivs, None))
    }

    /// `L₁ = Tr(ρH) − T·S(φ)`, `L₂ = Σ|Tr(ρG_j) − 1|` and gradients over `(θ, φ)`.
    pub fn vqt_pair(&self, theta: &[f64], phi: &[f64], temperature: f64) -> Result<PairEvaluation> {
        self.check_theta(theta)?;
        self.check_phi(phi)?;
        check_temperature(temperature)?;
        let (obs, mut derivs, per_basis) = match self.method {
            GradientMethod::Adjoint => {
                let p = crate::sim::product_probabilities(phi);
                let weights: Vec<(usize, f64)> = p.into_iter().enumerate().collect();
                let (per_basis, derivs) = self.adjoint_ensemble(theta, &weights)?;
                let mut obs = Observables {
                    energy: 0.0,
                    gauss: vec![0.0; self.g_terms.len()],
                };
                for (o, &(_, w)) in per_basis.iter().zip(&weights) {
                    obs.energy += w * o.energy;
                    for (a, b) in obs.gauss.iter_mut().zip(&o.gauss) {
                        *a += w * b;
                    }
                }
                (obs, derivs, per_basis)
            }
            GradientMethod::ParameterShift => (
                self.mixed_observables(theta, phi)?,
                self.shift_derivatives(theta, |t| self.mixed_observables(t, phi))?,
                self.basis_observables(theta)?,
            ),
        };
        derivs.extend(self.latent_derivatives(phi, &per_basis));
        let entropy_term = Some((temperature, entropy(phi), entropy_gradient(phi)));
        Ok(assemble_pair(obs, &derivs, entropy_term))
    }

    /// Value of `objective` at `params`.
    pub fn value(&self, objective: Objective, params: &ThetaPhi) -> Result<f64> {
        check_objective(objective)?;
        Ok(match objective {
            Objective::VqeEnergy => self.pure_checked(&params.theta)?.energy,
            Objective::GaussViolation => self.pure_checked(&params.theta)?.violation(),
            Objective::VqePenalty { mu } => {
                let o = self.pure_checked(&params.theta)?;
                o.energy + mu * o.violation()
            }
            Objective::Entropy => entropy(&params.phi),
            Objective::VqtFreeEnergy { temperature } => {
                let o = self.mixed_checked(params)?;
                o.energy - temperature * entropy(&params.phi)
            }
            Objective::VqtGaussViolation => self.mixed_checked(params)?.violation(),
            Objective::VqtPenalty { temperature, mu } => {
                let o = self.mixed_checked(params)?;
                o.energy - temperature * entropy(&params.phi) + mu * o.violation()
            }
        })
    }

    /// Gradient of `objective`, flattened `θ` then `φ`. Pure objectives return `θ` components only.
    pub fn gradient(&self, objective: Objective, params: &ThetaPhi) -> Result<Vec<f64>> {
        check_objective(objective)?;
        let weights = |pair: PairEvaluation, w1: f64, w2: f64| -> Vec<f64> {
            pair.grad_l1
                .iter()
                .zip(&pair.grad_l2)
                .map(|(a, b)| w1 * a + w2 * b)
                .collect()
        };
        Ok(match objective {
            Objective::VqeEnergy => self.vqe_pair(&params.theta)?.grad_l1,
            Objective::GaussViolation => self.vqe_pair(&params.theta)?.grad_l2,
            Objective::VqePenalty { mu } => weights(self.vqe_pair(&params.theta)?, 1.0, mu),
            Objective::Entropy => {
                let mut g = vec![0.0; params.theta.len()];
                g.extend(entropy_gradient(&params.phi));
                g
            }
            Objective::VqtFreeEnergy { temperature } => {
                self.vqt_pair(&params.theta, &params.phi, temperature)?.grad_l1
            }
            // the temperature only enters L₁
            Objective::VqtGaussViolation => self.vqt_pair(&params.theta, &params.phi, 1.0)?.grad_l2,
            Objective::VqtPenalty { temperature, mu } => {
                weights(self.vqt_pair(&params.theta, &params.phi, temperature)?, 1.0, mu)
            }
        })
    }

    fn pure_checked(&self, theta: &[f64]) -> Result<Observables> {
        self.check_theta(theta)?;
        self.pure_observables(theta)
    }

    fn mixed_checked(&self, params: &ThetaPhi) -> Result<Observables> {
        self.check_theta(&params.theta)?;
        self.mixed_observables(&params.theta, &params.phi)
    }
}

fn sign0(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn assemble_pair(
    obs: Observables,
    derivs: &[Observables],
    entropy_term: Option<(f64, f64, Vec<f64>)>,
) -> PairEvaluation {
    let signs: Vec<f64> = obs.gauss.iter().map(|g| sign0(g - 1.0)).collect();
    let mut grad_l1: Vec<f64> = derivs.iter().map(|d| d.energy).collect();
    let grad_l2 = derivs
        .iter()
        .map(|d| d.gauss.iter().zip(&signs).map(|(g, s)| s * g).sum())
        .collect();
    let mut l1 = obs.energy;
    if let Some((temperature, s, ds)) = entropy_term {
        l1 -= temperature * s;
        let offset = grad_l1.len() - ds.len();
        for (g, d) in grad_l1[offset..].iter_mut().zip(ds) {
            *g -= temperature * d;
        }
    }
    PairEvaluation {
        l1,
        l2: obs.violation(),
        grad_l1,
        grad_l2,
        observables: obs,
    }
}

fn check_temperature(temperature: f64) -> Result<()> {
    if !(temperature > 0.0) || !temperature.is_finite() {
        return arg(format!("temperature must be positive, got {temperature}"));
    }
    Ok(())
}

fn check_objective(objective: Objective) -> Result<()> {
    match objective {
        Objective::VqePenalty { mu } | Objective::VqtPenalty { mu, .. } if !(mu >= 0.0) => {
            arg(format!("penalty strength must be non-negative, got {mu}"))
        }
        Objective::VqtFreeEnergy { temperature } | Objective::VqtPenalty { temperature, .. } => {
            check_temperature(temperature)
        }
        _ => Ok(()),
    }
}

/// Populations below this count as exactly zero (covers `cos²(π/2)` in floating point).
const NEGLIGIBLE_POPULATION: f64 = f64::EPSILON * f64::EPSILON;

fn xlogx(p: f64) -> f64 {
    if p > NEGLIGIBLE_POPULATION {
        p * p.ln()
    } else {
        0.0
    }
}

/// `Σᵢ h(sin²φᵢ)` with `h` the binary entropy in nats.
pub fn entropy(phi: &[f64]) -> f64 {
    phi.iter()
        .map(|a| {
            let s2 = a.sin().powi(2);
            let c2 = a.cos().powi(2);
            -xlogx(s2) - xlogx(c2)
        })
        .sum()
}

/// `∂S/∂φᵢ = sin(2φᵢ)·log(cos²φᵢ / sin²φᵢ)`, taking the limit 0 where either square vanishes.
pub fn entropy_gradient(phi: &[f64]) -> Vec<f64> {
    phi.iter()
        .map(|a| {
            let s2 = a.sin().powi(2);
            let c2 = a.cos().powi(2);
            if s2 < NEGLIGIBLE_POPULATION || c2 < NEGLIGIBLE_POPULATION {
                0.0
            } else {
                (2.0 * a).sin() * (c2 / s2).ln()
            }
        })
        .collect()
}

pub fn vqe_energy(spec: &ModelSpec, template: &AnsatzTemplate, theta: &[f64]) -> Result<f64> {
    Problem::new(spec.clone(), template.clone())?.value(Objective::VqeEnergy, &ThetaPhi::pure(theta.to_vec()))
}

pub fn gauss_violation(spec: &ModelSpec, template: &AnsatzTemplate, theta: &[f64]) -> Result<f64> {
    Problem::new(spec.clone(), template.clone())?
        .value(Objective::GaussViolation, &ThetaPhi::pure(theta.to_vec()))
}

pub fn penalty_cost(spec: &ModelSpec, template: &AnsatzTemplate, theta: &[f64], mu: f64) -> Result<f64> {
    Problem::new(spec.clone(), template.clone())?
        .value(Objective::VqePenalty { mu }, &ThetaPhi::pure(theta.to_vec()))
}

pub fn vqt_free_energy(
    spec: &ModelSpec,
    template: &AnsatzTemplate,
    theta: &[f64],
    phi: &[f64],
    temperature: f64,
) -> Result<f64> {
    Problem::new(spec.clone(), template.clone())?.value(
        Objective::VqtFreeEnergy { temperature },
        &ThetaPhi::mixed(theta.to_vec(), phi.to_vec()),
    )
}

pub fn vqt_gauss_violation(
    spec: &ModelSpec,
    template: &AnsatzTemplate,
    theta: &[f64],
    phi: &[f64],
) -> Result<f64> {
    Problem::new(spec.clone(), template.clone())?
        .value(Objective::VqtGaussViolation, &ThetaPhi::mixed(theta.to_vec(), phi.to_vec()))
}

pub fn vqt_penalty_cost(
    spec: &ModelSpec,
    template: &AnsatzTemplate,
    theta: &[f64],
    phi: &[f64],
    temperature: f64,
    mu: f64,
) -> Result<f64> {
    Problem::new(spec.clone(), template.clone())?.value(
        Objective::VqtPenalty { temperature, mu },
        &ThetaPhi::mixed(theta.to_vec(), phi.to_vec()),
    )
}
