//! Command-line front end.
//!
//! ```text
//! gaugevqa {vqe|vqt|penalty-sweep|temp-sweep|ed} --config <path> --out <dir> [--seed <int>]
//! ```
//!
//! Every run writes `trace.jsonl` (one record per evaluated iterate),
//! `convergence.csv` with the same columns and `summary.json`, which echoes
//! the fully resolved configuration. Sweeps write one trace per grid point
//! (`trace_000.jsonl`, ...) plus a table (`penalty.csv` or `temperature.csv`).
//! `ed` prints the exact reference values and writes `ed.json`.
//!
//! Exit status is 0 when every run converged, 2 when at least one did not and
//! 1 on errors.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::{mode_name, parse_config};
use crate::drivers::{
    ground_references, run_temperature_sweep, run_vqe, run_vqe_penalty, run_vqt, run_vqt_penalty,
    IterRecord, Mode, RunConfig, RunSummary, RunTrace,
};
use crate::error::{Error, Result};
use crate::model::{unrestricted_ground_energy, PhysicalSpectrum, Thermodynamics};

#[derive(Debug, Parser)]
#[command(name = "gaugevqa", version, about = "Variational ground and thermal states of a 1D Z2 gauge theory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Two-objective ground-state search.
    Vqe(RunArgs),
    /// Two-objective thermal-state search at `vqt.temperature`.
    Vqt(RunArgs),
    /// Penalty descent for every `penalty.mu`.
    PenaltySweep(RunArgs),
    /// Two-objective thermal search at every `sweep.temperatures` entry.
    TempSweep(RunArgs),
    /// Exact reference values from the physical subspace.
    Ed(RunArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides `seed` from the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Command {
    fn args(&self) -> &RunArgs {
        match self {
            Command::Vqe(a)
            | Command::Vqt(a)
            | Command::PenaltySweep(a)
            | Command::TempSweep(a)
            | Command::Ed(a) => a,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Vqe(_) => "vqe",
            Command::Vqt(_) => "vqt",
            Command::PenaltySweep(_) => "penalty-sweep",
            Command::TempSweep(_) => "temp-sweep",
            Command::Ed(_) => "ed",
        }
    }

    fn allowed_modes(&self) -> &'static [Mode] {
        match self {
            Command::Vqe(_) => &[Mode::VqeMoo],
            Command::Vqt(_) | Command::TempSweep(_) => &[Mode::VqtMoo],
            Command::PenaltySweep(_) => &[Mode::VqePenalty, Mode::VqtPenalty],
            Command::Ed(_) => &[Mode::VqeMoo, Mode::VqePenalty, Mode::VqtMoo, Mode::VqtPenalty],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Converged,
    Unconverged,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Converged => 0,
            Outcome::Unconverged => 2,
        }
    }

    fn of(summaries: &[&RunSummary]) -> Self {
        if summaries.iter().all(|s| s.converged) {
            Outcome::Converged
        } else {
            Outcome::Unconverged
        }
    }
}

/// Parses `args` (including the program name), runs and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&cli.command) {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

pub fn run(command: &Command) -> Result<Outcome> {
    let args = command.args();
    let mut config = parse_config(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if !command.allowed_modes().contains(&config.mode) {
        return Err(Error::Validation(format!(
            "`{}` does not accept mode {}",
            command.name(),
            mode_name(config.mode)
        )));
    }
    fs::create_dir_all(&args.out).map_err(|source| Error::Io {
        path: args.out.clone(),
        source,
    })?;
    let out = args.out.as_path();
    let clock = Instant::now();
    let outcome = match command {
        Command::Vqe(_) => single_run(out, &config, command.name(), run_vqe(&config)?),
        Command::Vqt(_) => single_run(out, &config, command.name(), run_vqt(&config)?),
        Command::PenaltySweep(_) => penalty_sweep(out, &config),
        Command::TempSweep(_) => temperature_sweep(out, &config),
        Command::Ed(_) => ed(out, &config),
    }?;
    eprintln!("wall clock: {:.3} s", clock.elapsed().as_secs_f64());
    Ok(outcome)
}

/// Scientific notation with 15 significant digits; `null` for non-finite values.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.14e}")
    } else {
        "null".to_string()
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    f.write_all(contents.as_bytes()).map_err(io_err(path))
}

pub fn trace_jsonl(records: &[IterRecord]) -> String {
    let mut s = String::new();
    for r in records {
        let _ = writeln!(
            s,
            "{{\"iter\":{},\"L1\":{},\"L2\":{},\"alpha\":{},\"kkt_residual\":{}}}",
            r.iteration,
            num(r.l1),
            num(r.l2),
            num(r.alpha),
            num(r.kkt_residual)
        );
    }
    s
}

pub fn trace_csv(records: &[IterRecord]) -> String {
    let mut s = String::from("iteration,L1,L2,alpha,kkt_residual\n");
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.iteration,
            num(r.l1),
            num(r.l2),
            num(r.alpha),
            num(r.kkt_residual)
        );
    }
    s
}

#[derive(Serialize)]
struct SummaryFile<'a, R: Serialize> {
    command: &'a str,
    config: &'a RunConfig,
    references: R,
    runs: Vec<&'a RunSummary>,
}

fn write_summary<R: Serialize>(
    out: &Path,
    command: &str,
    config: &RunConfig,
    references: R,
    runs: Vec<&RunSummary>,
) -> Result<()> {
    let file = SummaryFile {
        command,
        config,
        references,
        runs,
    };
    let text = serde_json::to_string_pretty(&file)
        .map_err(|e| Error::Validation(format!("cannot serialize summary: {e}")))?;
    write_file(&out.join("summary.json"), &(text + "\n"))
}

#[derive(Serialize)]
struct GroundRefs {
    constrained_ground_energy: f64,
    unconstrained_ground_energy: f64,
}

fn single_run(out: &Path, config: &RunConfig, command: &str, trace: RunTrace) -> Result<Outcome> {
    write_file(&out.join("trace.jsonl"), &trace_jsonl(&trace.records))?;
    write_file(&out.join("convergence.csv"), &trace_csv(&trace.records))?;
    let (constrained, unconstrained) = ground_references(&config.model)?;
    write_summary(
        out,
        command,
        config,
        GroundRefs {
            constrained_ground_energy: constrained,
            unconstrained_ground_energy: unconstrained,
        },
        vec![&trace.summary],
    )?;
    let s = &trace.summary;
    println!(
        "converged={} iterations={} L1={} L2={} oracle={} |L1-oracle|={}",
        s.converged,
        s.iterations,
        num(s.final_l1),
        num(s.final_l2),
        num(s.oracle_value),
        num(s.abs_error_l1)
    );
    Ok(Outcome::of(&[s]))
}

fn write_grid_traces(out: &Path, traces: &[RunTrace]) -> Result<()> {
    for (k, t) in traces.iter().enumerate() {
        write_file(&out.join(format!("trace_{k:03}.jsonl")), &trace_jsonl(&t.records))?;
    }
    Ok(())
}

fn penalty_sweep(out: &Path, config: &RunConfig) -> Result<Outcome> {
    let traces = match config.mode {
        Mode::VqtPenalty => run_vqt_penalty(config)?,
        _ => run_vqe_penalty(config)?,
    };
    write_grid_traces(out, &traces)?;
    let (constrained, unconstrained) = ground_references(&config.model)?;
    let mut table = String::from("mu,L1,L2,converged,oracle,constrained_ground_energy,unconstrained_ground_energy\n");
    for t in &traces {
        let s = &t.summary;
        let _ = writeln!(
            table,
            "{},{},{},{},{},{},{}",
            num(s.mu.unwrap_or(f64::NAN)),
            num(s.final_l1),
            num(s.final_l2),
            s.converged,
            num(s.oracle_value),
            num(constrained),
            num(unconstrained)
        );
    }
    print!("{table}");
    write_file(&out.join("penalty.csv"), &table)?;
    let runs: Vec<&RunSummary> = traces.iter().map(|t| &t.summary).collect();
    write_summary(
        out,
        "penalty-sweep",
        config,
        GroundRefs {
            constrained_ground_energy: constrained,
            unconstrained_ground_energy: unconstrained,
        },
        runs.clone(),
    )?;
    Ok(Outcome::of(&runs))
}

fn temperature_sweep(out: &Path, config: &RunConfig) -> Result<Outcome> {
    let traces = run_temperature_sweep(config)?;
    write_grid_traces(out, &traces)?;
    let mut table = String::from("temperature,F_vqt,F_oracle,abs_error,L2_final,converged\n");
    for t in &traces {
        let s = &t.summary;
        let _ = writeln!(
            table,
            "{},{},{},{},{},{}",
            num(s.temperature.unwrap_or(f64::NAN)),
            num(s.final_l1),
            num(s.oracle_value),
            num(s.abs_error_l1),
            num(s.final_l2),
            s.converged
        );
    }
    print!("{table}");
    write_file(&out.join("temperature.csv"), &table)?;
    let runs: Vec<&RunSummary> = traces.iter().map(|t| &t.summary).collect();
    write_summary(out, "temp-sweep", config, (), runs.clone())?;
    Ok(Outcome::of(&runs))
}

/// Exact reference values reported by `ed`.
#[derive(Debug, Clone, Serialize)]
pub struct EdReport {
    pub n_sites: usize,
    pub n_qubits: usize,
    pub enforced_constraints: usize,
    pub independent_constraints: usize,
    pub physical_dimension: usize,
    /// `2^(N+1)`, the dimension one would get with only `N − 1` independent constraints.
    pub two_pow_n_plus_one: usize,
    pub constrained_ground_energy: f64,
    pub unconstrained_ground_energy: f64,
    pub thermal: Vec<Thermodynamics>,
}

pub fn ed_report(config: &RunConfig) -> Result<EdReport> {
    let spectrum = PhysicalSpectrum::new(&config.model)?;
    let basis = spectrum.basis();
    let mut temperatures: Vec<f64> = config.temperature.into_iter().collect();
    temperatures.extend(config.temperatures.iter().copied());
    let thermal = temperatures
        .iter()
        .map(|&t| spectrum.thermodynamics(t))
        .collect::<Result<Vec<_>>>()?;
    Ok(EdReport {
        n_sites: config.model.n_sites,
        n_qubits: config.model.n_qubits(),
        enforced_constraints: basis.n_constraints(),
        independent_constraints: basis.independent_constraints(),
        physical_dimension: basis.dim(),
        two_pow_n_plus_one: 1 << (config.model.n_sites + 1),
        constrained_ground_energy: spectrum.energies()[0],
        unconstrained_ground_energy: unrestricted_ground_energy(&config.model)?,
        thermal,
    })
}

impl EdReport {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "sites N = {}, qubits = {}", self.n_sites, self.n_qubits);
        let _ = writeln!(
            s,
            "Gauss constraints: {} enforced, {} independent",
            self.enforced_constraints, self.independent_constraints
        );
        let _ = writeln!(
            s,
            "physical dimension d = {} = 2^{} / 2^{}",
            self.physical_dimension,
            self.n_qubits,
            self.independent_constraints
        );
        let verdict = if self.physical_dimension == self.two_pow_n_plus_one {
            "matches"
        } else {
            "differs from"
        };
        let _ = writeln!(
            s,
            "d {verdict} 2^(N+1) = {} (that count needs exactly N-1 = {} independent constraints)",
            self.two_pow_n_plus_one,
            self.n_sites - 1
        );
        let _ = writeln!(s, "ground energy (physical subspace) = {}", num(self.constrained_ground_energy));
        let _ = writeln!(s, "ground energy (no Gauss law)      = {}", num(self.unconstrained_ground_energy));
        for t in &self.thermal {
            let _ = writeln!(
                s,
                "T = {}: F = {}, E = {}, S = {}",
                num(t.temperature),
                num(t.free_energy),
                num(t.energy),
                num(t.entropy)
            );
        }
        s
    }
}

fn ed(out: &Path, config: &RunConfig) -> Result<Outcome> {
    let report = ed_report(config)?;
    print!("{}", report.render());
    let text = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::Validation(format!("cannot serialize report: {e}")))?;
    write_file(&out.join("ed.json"), &(text + "\n"))?;
    Ok(Outcome::Converged)
}
