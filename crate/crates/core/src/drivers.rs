//! End-to-end experiment loops.
//!
//! [`run_vqe`] and [`run_vqt`] run two-objective MGDA from several seeded
//! starting points and keep the best run; the penalty drivers run plain
//! gradient descent on `L₁ + μL₂` for every `μ` of a grid. Every run records
//! one [`IterRecord`] per evaluated iterate and a [`RunSummary`] with the
//! exact oracle value for comparison.

use std::f64::consts::FRAC_PI_4;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzTemplate, Entangler};
use crate::error::{Error, Result};
use crate::model::{unrestricted_ground_energy, ModelSpec, PhysicalSpectrum};
use crate::moo::{descent_step, solve_alpha_two_task};
use crate::objectives::{GradientMethod, PairEvaluation, Problem, ThetaPhi};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    VqeMoo,
    VqePenalty,
    VqtMoo,
    VqtPenalty,
}

impl Mode {
    pub fn is_thermal(self) -> bool {
        matches!(self, Mode::VqtMoo | Mode::VqtPenalty)
    }

    pub fn is_penalty(self) -> bool {
        matches!(self, Mode::VqePenalty | Mode::VqtPenalty)
    }
}

/// Random initialization ranges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitRanges {
    /// `θ ~ U(−w, w)`.
    pub theta_half_width: f64,
    pub phi_center: f64,
    /// `φ ~ U(c − w, c + w)` around `phi_center`.
    pub phi_half_width: f64,
}

impl Default for InitRanges {
    fn default() -> Self {
        Self {
            theta_half_width: 0.1,
            phi_center: FRAC_PI_4,
            phi_half_width: 0.3,
        }
    }
}

pub const DEFAULT_MU_GRID: [f64; 13] = [
    0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0,
];

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub model: ModelSpec,
    pub n_blocks: usize,
    pub entangler: Entangler,
    pub gradient: GradientMethod,
    pub eta: f64,
    pub max_iters: usize,
    pub kkt_tol: f64,
    pub l2_tol: f64,
    pub seed: u64,
    pub restarts: usize,
    pub init: InitRanges,
    /// Single-run temperature for the thermal modes.
    pub temperature: Option<f64>,
    pub mu_grid: Vec<f64>,
    /// Temperature grid for sweeps.
    pub temperatures: Vec<f64>,
}

impl RunConfig {
    /// Defaults: `p = 3`, `η = 0.02`, 20000 iterations, tolerances `1e-4` / `1e-2`, 5 restarts.
    pub fn new(mode: Mode, model: ModelSpec) -> Self {
        Self {
            mode,
            model,
            n_blocks: 3,
            entangler: Entangler::Ring,
            gradient: GradientMethod::Adjoint,
            eta: 0.02,
            max_iters: 20_000,
            kkt_tol: 1e-4,
            l2_tol: 1e-2,
            seed: 0,
            restarts: 5,
            init: InitRanges::default(),
            temperature: None,
            mu_grid: DEFAULT_MU_GRID.to_vec(),
            temperatures: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        let bad = |key: &str, msg: String| Err(Error::Validation(format!("`{key}`: {msg}")));
        if !(self.eta > 0.0) || !self.eta.is_finite() {
            return bad("eta", format!("must be positive, got {}", self.eta));
        }
        if self.max_iters < 1 {
            return bad("max_iters", "must be at least 1".into());
        }
        if self.restarts < 1 {
            return bad("restarts", "must be at least 1".into());
        }
        if self.n_blocks < 1 {
            return bad("n_blocks", "must be at least 1".into());
        }
        if !(self.kkt_tol > 0.0) {
            return bad("kkt_tol", format!("must be positive, got {}", self.kkt_tol));
        }
        if !(self.l2_tol > 0.0) {
            return bad("l2_tol", format!("must be positive, got {}", self.l2_tol));
        }
        if let Some(t) = self.temperature {
            if !(t > 0.0) || !t.is_finite() {
                return bad("temperature", format!("must be positive, got {t}"));
            }
        }
        if let Some(t) = self.temperatures.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
            return bad("temperatures", format!("must all be positive, got {t}"));
        }
        if let Some(m) = self.mu_grid.iter().find(|m| !(**m >= 0.0) || !m.is_finite()) {
            return bad("mu", format!("must be non-negative, got {m}"));
        }
        Ok(())
    }

    pub fn problem(&self) -> Result<Problem> {
        let template =
            AnsatzTemplate::with_entangler(self.model.n_qubits(), self.n_blocks, self.entangler)?;
        Ok(Problem::new(self.model.clone(), template)?.with_gradient_method(self.gradient))
    }

    fn require_mode(&self, allowed: &[Mode]) -> Result<()> {
        if allowed.contains(&self.mode) {
            Ok(())
        } else {
            Err(Error::Validation(format!(
                "`mode`: {:?} cannot be used here (expected one of {allowed:?})",
                self.mode
            )))
        }
    }

    fn single_temperature(&self) -> Result<f64> {
        self.temperature
            .ok_or_else(|| Error::Validation("`temperature` is required for thermal runs".into()))
    }

    /// Starting points for every restart, drawn in order from one generator.
    pub fn initial_points(&self, n_theta: usize, thermal: bool) -> Vec<ThetaPhi> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let n_phi = self.model.n_qubits();
        (0..self.restarts)
            .map(|_| {
                let w = self.init.theta_half_width;
                let theta = (0..n_theta).map(|_| rng.random_range(-w..=w)).collect();
                let phi = if thermal {
                    let w = self.init.phi_half_width;
                    (0..n_phi)
                        .map(|_| self.init.phi_center + rng.random_range(-w..=w))
                        .collect()
                } else {
                    Vec::new()
                };
                ThetaPhi { theta, phi }
            })
            .collect()
    }
}

/// State of one iterate before its update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterRecord {
    pub iteration: usize,
    pub l1: f64,
    pub l2: f64,
    pub alpha: f64,
    pub kkt_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub mode: Mode,
    pub converged: bool,
    /// Number of evaluated iterates (records).
    pub iterations: usize,
    pub final_l1: f64,
    pub final_l2: f64,
    pub final_alpha: f64,
    pub final_kkt_residual: f64,
    /// Constrained ground energy (VQE) or exact free energy (VQT).
    pub oracle_value: f64,
    pub abs_error_l1: f64,
    pub temperature: Option<f64>,
    pub mu: Option<f64>,
    pub seed: u64,
    pub restart: usize,
    pub final_params: ThetaPhi,
    #[serde(skip)]
    pub wall_clock: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunTrace {
    pub records: Vec<IterRecord>,
    pub summary: RunSummary,
}

impl RunTrace {
    /// L₁ at the first iterate whose L₂ is below `threshold`.
    pub fn l1_when_l2_below(&self, threshold: f64) -> Option<f64> {
        self.records.iter().find(|r| r.l2 < threshold).map(|r| r.l1)
    }
}

/// How the two gradients are combined at each step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weighting {
    /// MGDA min-norm weights.
    Mgda,
    /// Gradient of `L₁ + μL₂`, reported as weight `α = 1/(1+μ)`.
    Penalty { mu: f64 },
}

struct DescentOutcome {
    records: Vec<IterRecord>,
    params: ThetaPhi,
    converged: bool,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Fixed-step descent from `start` until convergence or `max_iters` steps.
fn descend<F>(cfg: &RunConfig, start: ThetaPhi, weighting: Weighting, eval: F) -> Result<DescentOutcome>
where
    F: Fn(&ThetaPhi) -> Result<PairEvaluation>,
{
    let mut params = start;
    let mut records = Vec::new();
    let mut converged = false;
    for iteration in 0..=cfg.max_iters {
        let pair = eval(&params)?;
        let (alpha, scale) = match weighting {
            Weighting::Mgda => (solve_alpha_two_task(&pair.grad_l1, &pair.grad_l2)?, 1.0),
            Weighting::Penalty { mu } => (1.0 / (1.0 + mu), 1.0 + mu),
        };
        let combined: Vec<f64> = pair
            .grad_l1
            .iter()
            .zip(&pair.grad_l2)
            .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
            .collect();
        let kkt_residual = norm(&combined);
        records.push(IterRecord {
            iteration,
            l1: pair.l1,
            l2: pair.l2,
            alpha,
            kkt_residual,
        });
        converged = match weighting {
            Weighting::Mgda => kkt_residual < cfg.kkt_tol && pair.l2 < cfg.l2_tol,
            Weighting::Penalty { .. } => scale * kkt_residual < cfg.kkt_tol,
        };
        if converged || iteration == cfg.max_iters {
            break;
        }
        let step: Vec<f64> = combined.iter().map(|g| scale * g).collect();
        let flat = descent_step(&params.flatten(), &step, cfg.eta)?;
        params = params.with_flat(&flat);
    }
    Ok(DescentOutcome {
        records,
        params,
        converged,
    })
}

struct RunContext<'a> {
    cfg: &'a RunConfig,
    problem: &'a Problem,
    temperature: Option<f64>,
    weighting: Weighting,
    oracle_value: f64,
}

impl RunContext<'_> {
    fn evaluate(&self, p: &ThetaPhi) -> Result<PairEvaluation> {
        match self.temperature {
            Some(t) => self.problem.vqt_pair(&p.theta, &p.phi, t),
            None => self.problem.vqe_pair(&p.theta),
        }
    }

    fn run_one(&self, restart: usize, start: ThetaPhi) -> Result<RunTrace> {
        let clock = Instant::now();
        let out = descend(self.cfg, start, self.weighting, |p| self.evaluate(p))?;
        let last = *out.records.last().expect("descent records at least one iterate");
        Ok(RunTrace {
            summary: RunSummary {
                mode: self.cfg.mode,
                converged: out.converged,
                iterations: out.records.len(),
                final_l1: last.l1,
                final_l2: last.l2,
                final_alpha: last.alpha,
                final_kkt_residual: last.kkt_residual,
                oracle_value: self.oracle_value,
                abs_error_l1: (last.l1 - self.oracle_value).abs(),
                temperature: self.temperature,
                mu: match self.weighting {
                    Weighting::Penalty { mu } => Some(mu),
                    Weighting::Mgda => None,
                },
                seed: self.cfg.seed,
                restart,
                final_params: out.params,
                wall_clock: clock.elapsed(),
            },
            records: out.records,
        })
    }

    fn run_all(&self, starts: &[ThetaPhi]) -> Result<Vec<RunTrace>> {
        starts
            .par_iter()
            .enumerate()
            .map(|(k, s)| self.run_one(k, s.clone()))
            .collect()
    }
}

/// Index of the best run: physical runs (`L₂ < l2_tol`) by lowest objective,
/// otherwise lowest `L₂`.
pub fn select_best(traces: &[RunTrace], l2_tol: f64) -> usize {
    let key = |t: &RunTrace| {
        let s = &t.summary;
        let objective = match s.mu {
            Some(mu) => s.final_l1 + mu * s.final_l2,
            None => s.final_l1,
        };
        if s.final_l2 < l2_tol {
            (0u8, objective)
        } else {
            (1u8, s.final_l2)
        }
    };
    (0..traces.len())
        .min_by(|&a, &b| {
            let (ka, kb) = (key(&traces[a]), key(&traces[b]));
            ka.0.cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
        })
        .unwrap_or(0)
}

/// Every restart of a two-objective VQE run.
pub fn run_vqe_restarts(config: &RunConfig) -> Result<Vec<RunTrace>> {
    config.validate()?;
    config.require_mode(&[Mode::VqeMoo])?;
    let problem = config.problem()?;
    let starts = config.initial_points(problem.n_theta(), false);
    vqe_context(config, &problem, Weighting::Mgda)?.run_all(&starts)
}

fn vqe_context<'a>(cfg: &'a RunConfig, problem: &'a Problem, weighting: Weighting) -> Result<RunContext<'a>> {
    let oracle_value = PhysicalSpectrum::new(&cfg.model)?.energies()[0];
    Ok(RunContext {
        cfg,
        problem,
        temperature: None,
        weighting,
        oracle_value,
    })
}

fn vqt_context<'a>(
    cfg: &'a RunConfig,
    problem: &'a Problem,
    spectrum: &PhysicalSpectrum,
    temperature: f64,
    weighting: Weighting,
) -> Result<RunContext<'a>> {
    Ok(RunContext {
        cfg,
        problem,
        temperature: Some(temperature),
        weighting,
        oracle_value: spectrum.thermodynamics(temperature)?.free_energy,
    })
}

/// Two-objective VQE; best of `restarts`.
pub fn run_vqe(config: &RunConfig) -> Result<RunTrace> {
    let traces = run_vqe_restarts(config)?;
    let best = select_best(&traces, config.l2_tol);
    Ok(traces.into_iter().nth(best).expect("at least one restart"))
}

/// Two-objective VQE from a given starting point (no restarts).
pub fn run_vqe_from(config: &RunConfig, start: ThetaPhi) -> Result<RunTrace> {
    config.validate()?;
    config.require_mode(&[Mode::VqeMoo])?;
    let problem = config.problem()?;
    vqe_context(config, &problem, Weighting::Mgda)?.run_one(0, start)
}

/// Penalty descent for every `μ` in the grid, sharing the same starting points.
pub fn run_vqe_penalty(config: &RunConfig) -> Result<Vec<RunTrace>> {
    config.validate()?;
    config.require_mode(&[Mode::VqePenalty])?;
    let problem = config.problem()?;
    let starts = config.initial_points(problem.n_theta(), false);
    config
        .mu_grid
        .iter()
        .map(|&mu| {
            let traces = vqe_context(config, &problem, Weighting::Penalty { mu })?.run_all(&starts)?;
            let best = select_best(&traces, config.l2_tol);
            Ok(traces.into_iter().nth(best).expect("at least one restart"))
        })
        .collect()
}

/// Every restart of a two-objective VQT run at `config.temperature`.
pub fn run_vqt_restarts(config: &RunConfig) -> Result<Vec<RunTrace>> {
    config.validate()?;
    config.require_mode(&[Mode::VqtMoo])?;
    let temperature = config.single_temperature()?;
    let problem = config.problem()?;
    let spectrum = PhysicalSpectrum::new(&config.model)?;
    let starts = config.initial_points(problem.n_theta(), true);
    vqt_context(config, &problem, &spectrum, temperature, Weighting::Mgda)?.run_all(&starts)
}

/// Two-objective VQT; best of `restarts`.
pub fn run_vqt(config: &RunConfig) -> Result<RunTrace> {
    let traces = run_vqt_restarts(config)?;
    let best = select_best(&traces, config.l2_tol);
    Ok(traces.into_iter().nth(best).expect("at least one restart"))
}

/// Penalty VQT for every `μ` in the grid at `config.temperature`.
pub fn run_vqt_penalty(config: &RunConfig) -> Result<Vec<RunTrace>> {
    config.validate()?;
    config.require_mode(&[Mode::VqtPenalty])?;
    let temperature = config.single_temperature()?;
    let problem = config.problem()?;
    let spectrum = PhysicalSpectrum::new(&config.model)?;
    let starts = config.initial_points(problem.n_theta(), true);
    config
        .mu_grid
        .iter()
        .map(|&mu| {
            let ctx = vqt_context(config, &problem, &spectrum, temperature, Weighting::Penalty { mu })?;
            let traces = ctx.run_all(&starts)?;
            let best = select_best(&traces, config.l2_tol);
            Ok(traces.into_iter().nth(best).expect("at least one restart"))
        })
        .collect()
}

/// `run_vqt` at every temperature of `config.temperatures`, in grid order.
pub fn run_temperature_sweep(config: &RunConfig) -> Result<Vec<RunTrace>> {
    config.validate()?;
    config.require_mode(&[Mode::VqtMoo])?;
    if config.temperatures.is_empty() {
        return Err(Error::Validation("`temperatures` must not be empty for a sweep".into()));
    }
    config
        .temperatures
        .iter()
        .map(|&t| {
            let mut c = config.clone();
            c.temperature = Some(t);
            run_vqt(&c)
        })
        .collect()
}

/// Constrained and unconstrained ground energies used as sweep references.
pub fn ground_references(model: &ModelSpec) -> Result<(f64, f64)> {
    Ok((
        PhysicalSpectrum::new(model)?.energies()[0],
        unrestricted_ground_energy(model)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(mode: Mode) -> RunConfig {
        let mut c = RunConfig::new(mode, ModelSpec::periodic(2, 1.0, 0.5));
        c.max_iters = 20;
        c.restarts = 2;
        c
    }

    #[test]
    fn validation_names_keys() {
        let mut c = cfg(Mode::VqeMoo);
        c.eta = -1.0;
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("eta"), "{msg}");
        let mut c = cfg(Mode::VqeMoo);
        c.restarts = 0;
        assert!(c.validate().unwrap_err().to_string().contains("restarts"));
    }

    #[test]
    fn wrong_mode_is_rejected() {
        assert!(run_vqe(&cfg(Mode::VqtMoo)).is_err());
        assert!(run_vqt(&cfg(Mode::VqtMoo)).is_err(), "missing temperature");
    }

    #[test]
    fn records_are_consistent() {
        let trace = run_vqe(&cfg(Mode::VqeMoo)).unwrap();
        assert_eq!(trace.records.len(), trace.summary.iterations);
        for (k, r) in trace.records.iter().enumerate() {
            assert_eq!(r.iteration, k);
            assert!((0.0..=1.0).contains(&r.alpha));
            assert!(r.kkt_residual >= 0.0);
        }
    }

    #[test]
    fn initial_points_are_reproducible() {
        let c = cfg(Mode::VqtMoo);
        let a = c.initial_points(24, true);
        let b = c.initial_points(24, true);
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
        for p in &a {
            assert!(p.theta.iter().all(|t| t.abs() <= 0.1));
            assert!(p.phi.iter().all(|f| (f - FRAC_PI_4).abs() <= 0.3));
        }
    }

    #[test]
    fn vacuum_start_stays_physical() {
        let c = cfg(Mode::VqeMoo);
        let t = run_vqe_from(&c, ThetaPhi::pure(vec![0.0; 24])).unwrap();
        assert_eq!(t.records[0].l2, 0.0);
        for w in t.records.windows(2) {
            assert!(w[1].l1 <= w[0].l1 + 1e-12);
            assert!(w[1].l2 < 1e-12);
        }
    }
}
