//! TOML run configuration.
//!
//! A minimal file only needs `mode` and `n_sites`:
//!
//! ```toml
//! mode = "vqe_moo"
//! n_sites = 2
//! ```
//!
//! Everything else falls back to the defaults of [`RunConfig::new`]
//! (`t = 1`, `h = 0.5`, `p = 3`, `η = 0.02`, ...). Mode-specific values live in
//! sections:
//!
//! ```toml
//! mode = "vqt_moo"
//! n_sites = 2
//! t = 1.0
//! h = 0.5
//! seed = 7
//!
//! [vqt]
//! temperature = 1.0
//!
//! [penalty]
//! mu = [0.0, 1.0, 2.0]
//!
//! [sweep]
//! temperatures = [0.5, 1.0, 1.5, 2.0]
//!
//! [init]
//! theta_half_width = 0.1
//! ```
//!
//! Unknown keys are rejected.

use std::path::Path;

use serde::Deserialize;

use crate::ansatz::Entangler;
use crate::drivers::{InitRanges, Mode, RunConfig};
use crate::error::{Error, Result};
use crate::model::{Boundary, ConstraintSet, ModelSpec};
use crate::objectives::GradientMethod;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub mode: Mode,
    pub n_sites: usize,
    pub t: Option<f64>,
    pub h: Option<f64>,
    pub boundary: Option<Boundary>,
    /// Sites whose Gauss law is enforced; all sites when absent.
    pub constrained_sites: Option<Vec<usize>>,
    pub n_blocks: Option<usize>,
    pub entangler: Option<Entangler>,
    /// `"adjoint"` (default) or `"parameter_shift"`.
    pub gradient: Option<GradientMethod>,
    pub eta: Option<f64>,
    pub max_iters: Option<usize>,
    pub kkt_tol: Option<f64>,
    pub l2_tol: Option<f64>,
    pub seed: Option<u64>,
    pub restarts: Option<usize>,
    #[serde(default)]
    pub init: InitSection,
    #[serde(default)]
    pub vqt: VqtSection,
    #[serde(default)]
    pub penalty: PenaltySection,
    #[serde(default)]
    pub sweep: SweepSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitSection {
    pub theta_half_width: Option<f64>,
    pub phi_center: Option<f64>,
    pub phi_half_width: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VqtSection {
    pub temperature: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PenaltySection {
    pub mu: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub temperatures: Option<Vec<f64>>,
}

impl ConfigFile {
    /// Applies defaults and validates the result.
    pub fn resolve(self) -> Result<RunConfig> {
        let defaults = RunConfig::new(self.mode, ModelSpec::periodic(self.n_sites, 1.0, 0.5));
        let mut model = defaults.model.clone();
        model.hopping = self.t.unwrap_or(model.hopping);
        model.field = self.h.unwrap_or(model.field);
        model.boundary = self.boundary.unwrap_or(model.boundary);
        if let Some(sites) = self.constrained_sites {
            model.constraints = ConstraintSet::Sites(sites);
        }
        let init = defaults.init;
        let config = RunConfig {
            mode: self.mode,
            model,
            n_blocks: self.n_blocks.unwrap_or(defaults.n_blocks),
            entangler: self.entangler.unwrap_or(defaults.entangler),
            gradient: self.gradient.unwrap_or(defaults.gradient),
            eta: self.eta.unwrap_or(defaults.eta),
            max_iters: self.max_iters.unwrap_or(defaults.max_iters),
            kkt_tol: self.kkt_tol.unwrap_or(defaults.kkt_tol),
            l2_tol: self.l2_tol.unwrap_or(defaults.l2_tol),
            seed: self.seed.unwrap_or(defaults.seed),
            restarts: self.restarts.unwrap_or(defaults.restarts),
            init: InitRanges {
                theta_half_width: self.init.theta_half_width.unwrap_or(init.theta_half_width),
                phi_center: self.init.phi_center.unwrap_or(init.phi_center),
                phi_half_width: self.init.phi_half_width.unwrap_or(init.phi_half_width),
            },
            temperature: self.vqt.temperature,
            mu_grid: self.penalty.mu.unwrap_or(defaults.mu_grid),
            temperatures: self.sweep.temperatures.unwrap_or_default(),
        };
        validate_init(&config)?;
        config.validate()?;
        if config.mode.is_thermal() && config.temperature.is_none() && config.temperatures.is_empty() {
            return Err(Error::Validation(format!(
                "`vqt.temperature` (or `sweep.temperatures`) is required for mode {}",
                mode_name(config.mode)
            )));
        }
        if config.mode.is_penalty() && config.mu_grid.is_empty() {
            return Err(Error::Validation("`penalty.mu` must not be empty".into()));
        }
        Ok(config)
    }
}

fn validate_init(config: &RunConfig) -> Result<()> {
    let i = &config.init;
    for (key, v) in [
        ("init.theta_half_width", i.theta_half_width),
        ("init.phi_half_width", i.phi_half_width),
    ] {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::Validation(format!("`{key}` must be non-negative, got {v}")));
        }
    }
    if !i.phi_center.is_finite() {
        return Err(Error::Validation("`init.phi_center` must be finite".into()));
    }
    Ok(())
}

/// The snake-case name used in config files.
pub fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::VqeMoo => "vqe_moo",
        Mode::VqePenalty => "vqe_penalty",
        Mode::VqtMoo => "vqt_moo",
        Mode::VqtPenalty => "vqt_penalty",
    }
}

/// Parses and resolves a config from TOML text.
pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let file: ConfigFile =
        toml::from_str(text).map_err(|e| Error::Validation(format!("invalid config: {}", e.message())))?;
    file.resolve()
}

/// Reads, parses and resolves a config file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text)
}
