//! Run configuration, experiment drivers and the on-disk artifacts.
//!
//! Configuration is resolved as defaults (per experiment), then a flat
//! `key = value` file (or the `config` object of a previous `run.json`),
//! then command-line flags. Each run writes `<out>/run.csv` and
//! `<out>/run.json`; the JSON sidecar holds the fully resolved configuration
//! and can be fed back through `--config` to repeat the run.
//!
//! CSV schemas (header row always present, floats with 17 significant digits):
//!
//! | experiment  | columns |
//! |-------------|---------|
//! | decay       | `t,p_excited,p_res_one,norm_sq,n_total` |
//! | two-photon  | `t,p_excited,n_defect,p_res_one,p_res_two,norm_sq,n_total` |
//! | oracle      | `t,p_excited` |
//! | convergence | `<out>/run.csv` is the oracle curve, `<out>/n<N>/run.csv` the decay curve per `N`, and `<out>/summary.csv` has `n_modes,sup_deviation,t_revival` |

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dos::{self, discretize, DensityOfStates, DiscretizedReservoir, Scheme};
use crate::dynamics::{propagate, AmplitudeEquations, PropagationConfig, SystemParams, Trajectory, DEFAULT_DT};
use crate::error::{Error, Result};
use crate::observables::{ObservableRecord, Observables, SectorDefinition};
use crate::oracle::{refinement_error, solve_uniform, KernelSpec};
use crate::statespace::{build_basis, initial_state, InitialCondition};

/// Deviation from the oracle that marks the onset of a discretization revival.
pub const REVIVAL_THRESHOLD: f64 = 0.05;
pub const DEFAULT_MAX_STATES: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Decay,
    TwoPhoton,
    Convergence,
    Oracle,
}

/// Offset of the first mode above the band edge: a fixed value, or `auto`
/// for the cell-centred seed of [`dos::cell_centred_seed`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SeedOffset(pub Option<f64>);

impl SeedOffset {
    pub fn resolve(&self, dos: &DensityOfStates) -> f64 {
        self.0.unwrap_or_else(|| dos::cell_centred_seed(dos))
    }
}

impl std::str::FromStr for SeedOffset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "auto" | "cell-centred" => Ok(SeedOffset(None)),
            v => v
                .parse::<f64>()
                .map(|x| SeedOffset(Some(x)))
                .map_err(|_| Error::Config(format!("invalid delta-seed '{v}' (expected a number or auto)"))),
        }
    }
}

impl std::fmt::Display for SeedOffset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0 {
            Some(x) => write!(f, "{x}"),
            None => f.write_str("auto"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub kind: ExperimentKind,
    pub n_modes: usize,
    /// Mode counts swept by the convergence study.
    pub n_list: Vec<usize>,
    pub omega_u: f64,
    pub delta_seed: SeedOffset,
    pub scheme: Scheme,
    pub delta_o: f64,
    pub delta_d: f64,
    pub g_d: f64,
    /// Effective coupling `C`; every frequency is measured in `C^(2/3)`.
    pub coupling_c: f64,
    pub t_max: f64,
    pub dt: f64,
    pub sample_stride: usize,
    pub out: PathBuf,
    pub include_shift: bool,
    pub sectors: SectorDefinition,
    pub max_states: usize,
}

impl RunConfig {
    pub fn defaults(kind: ExperimentKind) -> Self {
        let mut cfg = Self {
            kind,
            n_modes: 150,
            n_list: vec![50, 150, 500],
            omega_u: dos::DEFAULT_BAND_WIDTH,
            delta_seed: SeedOffset::default(),
            scheme: Scheme::Midpoint,
            delta_o: 0.0,
            delta_d: 0.0,
            g_d: 0.0,
            coupling_c: 1.0,
            t_max: 10.0,
            dt: DEFAULT_DT,
            sample_stride: 10,
            out: PathBuf::from("out"),
            include_shift: true,
            sectors: SectorDefinition::Inclusive,
            max_states: DEFAULT_MAX_STATES,
        };
        if kind == ExperimentKind::TwoPhoton {
            cfg.delta_o = -0.1;
            cfg.delta_d = -0.1;
            cfg.g_d = 1.0;
            cfg.t_max = 20.0;
        }
        cfg
    }

    pub fn params(&self) -> SystemParams {
        SystemParams {
            delta_o: self.delta_o,
            delta_d: self.delta_d,
            g_d: self.g_d,
        }
    }

    pub fn propagation(&self) -> PropagationConfig {
        PropagationConfig {
            t_max: self.t_max,
            dt: self.dt,
            sample_stride: self.sample_stride,
            store_full_state: false,
        }
    }

    /// Checks that do not need any allocation proportional to the problem size.
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega-u", self.omega_u),
            ("delta0", self.delta_o),
            ("deltad", self.delta_d),
            ("gd", self.g_d),
            ("coupling", self.coupling_c),
            ("tmax", self.t_max),
            ("dt", self.dt),
        ];
        if let Some((name, v)) = finite.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Config(format!("{name} = {v} is not finite")));
        }
        if self.coupling_c < 0.0 {
            return Err(Error::Config("coupling must be non-negative".into()));
        }
        self.propagation().validate()?;
        if self.kind == ExperimentKind::Oracle {
            if self.g_d != 0.0 {
                return Err(Error::Config("the oracle covers g_d = 0 only".into()));
            }
            return Ok(());
        }
        if let Some(delta) = self.delta_seed.0 {
            if !(delta > 0.0) || !delta.is_finite() {
                return Err(Error::Config("delta-seed must be positive".into()));
            }
            if !(self.omega_u > delta) {
                return Err(Error::Config("omega-u must exceed delta-seed".into()));
            }
        } else if !(self.omega_u > 0.0) {
            return Err(Error::Config("omega-u must be positive".into()));
        }
        let modes: Vec<usize> = match self.kind {
            ExperimentKind::Convergence => {
                if self.n_list.is_empty() {
                    return Err(Error::Config("modes-list is empty".into()));
                }
                if self.g_d != 0.0 {
                    return Err(Error::Config("the convergence study compares against the g_d = 0 oracle".into()));
                }
                self.n_list.clone()
            }
            _ => vec![self.n_modes],
        };
        let min_modes = if self.scheme == Scheme::Midpoint { 2 } else { 1 };
        if let Some(n) = modes.iter().find(|&&n| n < min_modes) {
            return Err(Error::Config(format!("{n} modes is too few for the {} scheme", self.scheme)));
        }
        for &n in &modes {
            let size = self.state_size(n);
            if size > self.max_states {
                return Err(Error::MemoryCap {
                    size,
                    cap: self.max_states,
                });
            }
        }
        Ok(())
    }

    fn excitations(&self) -> usize {
        match self.kind {
            ExperimentKind::TwoPhoton => 2,
            _ => 1,
        }
    }

    fn has_defect(&self) -> bool {
        self.kind == ExperimentKind::TwoPhoton || self.g_d != 0.0
    }

    fn state_size(&self, n: usize) -> usize {
        let defect = usize::from(self.has_defect());
        match self.excitations() {
            1 => 1 + defect + n,
            _ => 2 * defect + (1 + defect) * n + n * (n + 1) / 2,
        }
    }
}

/// Optional values from one configuration source.
#[derive(Clone, Debug, Default, PartialEq, Args)]
pub struct ConfigOverrides {
    /// Flat `key = value` file, or a `run.json` sidecar from an earlier run.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Number of discrete reservoir modes N.
    #[arg(long)]
    pub modes: Option<usize>,
    /// Comma-separated mode counts for the convergence study.
    #[arg(long, value_delimiter = ',')]
    pub modes_list: Option<Vec<usize>>,
    /// Upper edge of the discretized band, w_u - w_e.
    #[arg(long)]
    pub omega_u: Option<f64>,
    /// Offset of the first mode above the band edge, or `auto` (cell-centred).
    #[arg(long)]
    pub delta_seed: Option<SeedOffset>,
    /// Frequency recursion: first-order or midpoint.
    #[arg(long)]
    pub scheme: Option<Scheme>,
    /// Atomic detuning from the band edge.
    #[arg(long = "delta0", allow_hyphen_values = true)]
    pub delta_o: Option<f64>,
    /// Defect-mode detuning from the band edge.
    #[arg(long = "deltad", allow_hyphen_values = true)]
    pub delta_d: Option<f64>,
    /// Atom-defect coupling.
    #[arg(long = "gd", allow_hyphen_values = true)]
    pub g_d: Option<f64>,
    /// Effective atom-reservoir coupling C.
    #[arg(long)]
    pub coupling: Option<f64>,
    /// End time, in units of C^(-2/3).
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Largest Runge-Kutta step.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Write every k-th step.
    #[arg(long)]
    pub stride: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Drop the vacuum shift from the eliminated part of the continuum.
    #[arg(long = "no-shift", action = clap::ArgAction::SetTrue)]
    pub no_shift: bool,
    #[arg(skip)]
    pub include_shift: Option<bool>,
    /// One-photon reservoir sector: inclusive or ground-only.
    #[arg(long)]
    pub sector: Option<SectorDefinition>,
    /// Refuse runs whose state vector has more amplitudes than this.
    #[arg(long)]
    pub max_states: Option<usize>,
}

impl ConfigOverrides {
    pub fn apply(&self, cfg: &mut RunConfig) {
        macro_rules! set {
            ($src:ident => $dst:ident) => {
                if let Some(v) = self.$src.clone() {
                    cfg.$dst = v;
                }
            };
        }
        set!(modes => n_modes);
        set!(modes_list => n_list);
        set!(omega_u => omega_u);
        set!(delta_seed => delta_seed);
        set!(scheme => scheme);
        set!(delta_o => delta_o);
        set!(delta_d => delta_d);
        set!(g_d => g_d);
        set!(coupling => coupling_c);
        set!(tmax => t_max);
        set!(dt => dt);
        set!(stride => sample_stride);
        set!(out => out);
        set!(include_shift => include_shift);
        set!(sector => sectors);
        set!(max_states => max_states);
        if self.no_shift {
            cfg.include_shift = false;
        }
    }

    /// Parses the flat key-value format: one `key = value` per line, `#`
    /// starts a comment, keys use the long flag names (`-` or `_`).
    pub fn from_key_values(text: &str) -> Result<Self> {
        let mut o = ConfigOverrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim().to_ascii_lowercase().replace('_', "-");
            let value = value.trim();
            let bad = |what: &str| Error::Config(format!("line {}: invalid {what} '{value}'", lineno + 1));
            let float = || value.parse::<f64>().map_err(|_| bad("number"));
            let count = || value.parse::<usize>().map_err(|_| bad("count"));
            let flag = || value.parse::<bool>().map_err(|_| bad("boolean"));
            match key.as_str() {
                "modes" | "n-modes" => o.modes = Some(count()?),
                "modes-list" | "n-list" => {
                    o.modes_list = Some(
                        value
                            .split(',')
                            .map(|s| s.trim().parse::<usize>().map_err(|_| bad("mode list")))
                            .collect::<Result<_>>()?,
                    )
                }
                "omega-u" => o.omega_u = Some(float()?),
                "delta-seed" => o.delta_seed = Some(value.parse()?),
                "scheme" => o.scheme = Some(value.parse()?),
                "delta0" | "delta-o" => o.delta_o = Some(float()?),
                "deltad" | "delta-d" => o.delta_d = Some(float()?),
                "gd" | "g-d" => o.g_d = Some(float()?),
                "coupling" | "coupling-c" => o.coupling = Some(float()?),
                "tmax" | "t-max" => o.tmax = Some(float()?),
                "dt" => o.dt = Some(float()?),
                "stride" | "sample-stride" => o.stride = Some(count()?),
                "out" => o.out = Some(PathBuf::from(value)),
                "shift" | "include-shift" => o.include_shift = Some(flag()?),
                "no-shift" => o.include_shift = Some(!flag()?),
                "sector" | "sectors" => o.sector = Some(value.parse()?),
                "max-states" => o.max_states = Some(count()?),
                other => return Err(Error::Config(format!("line {}: unknown key '{other}'", lineno + 1))),
            }
        }
        Ok(o)
    }

    fn from_run_config(cfg: &RunConfig) -> Self {
        Self {
            config: None,
            modes: Some(cfg.n_modes),
            modes_list: Some(cfg.n_list.clone()),
            omega_u: Some(cfg.omega_u),
            delta_seed: Some(cfg.delta_seed),
            scheme: Some(cfg.scheme),
            delta_o: Some(cfg.delta_o),
            delta_d: Some(cfg.delta_d),
            g_d: Some(cfg.g_d),
            coupling: Some(cfg.coupling_c),
            tmax: Some(cfg.t_max),
            dt: Some(cfg.dt),
            stride: Some(cfg.sample_stride),
            out: Some(cfg.out.clone()),
            no_shift: false,
            include_shift: Some(cfg.include_shift),
            sector: Some(cfg.sectors),
            max_states: Some(cfg.max_states),
        }
    }

    /// Reads either format; a JSON document is taken to be a run sidecar.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if text.trim_start().starts_with('{') {
            let sidecar: Sidecar =
                serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            return Ok(Self::from_run_config(&sidecar.config));
        }
        Self::from_key_values(&text)
    }
}

/// Defaults < file < command line.
pub fn resolve_config(kind: ExperimentKind, cli: &ConfigOverrides) -> Result<RunConfig> {
    let mut cfg = RunConfig::defaults(kind);
    if let Some(path) = &cli.config {
        ConfigOverrides::from_file(path)?.apply(&mut cfg);
    }
    cli.apply(&mut cfg);
    cfg.kind = kind;
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Parser)]
#[command(name = "pbgsim", version, about = "Two-level atom at a photonic band edge, with a defect mode")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spontaneous decay of the excited atom (one excitation).
    Decay(ConfigOverrides),
    /// Excited atom plus one defect photon (two excitations).
    TwoPhoton(ConfigOverrides),
    /// Decay curves for several mode counts against the oracle.
    Convergence(ConfigOverrides),
    /// Exact single-excitation decay from the memory-kernel equation.
    Oracle(ConfigOverrides),
}

impl Command {
    pub fn kind_and_overrides(&self) -> (ExperimentKind, &ConfigOverrides) {
        match self {
            Command::Decay(o) => (ExperimentKind::Decay, o),
            Command::TwoPhoton(o) => (ExperimentKind::TwoPhoton, o),
            Command::Convergence(o) => (ExperimentKind::Convergence, o),
            Command::Oracle(o) => (ExperimentKind::Oracle, o),
        }
    }
}

/// Quantities derived from the configuration, recorded next to every run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Derived {
    pub n_modes: usize,
    pub k_const: f64,
    pub coupling_g: f64,
    pub vacuum_shift: f64,
    pub omega_first: f64,
    pub omega_last: f64,
    pub basis_size: usize,
    pub n_steps: usize,
    pub step: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuntimeInfo {
    pub version: String,
    pub elapsed_seconds: f64,
    pub threads: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub config: RunConfig,
    #[serde(default)]
    pub derived: Vec<Derived>,
    #[serde(default)]
    pub oracle_refinement_error: Option<f64>,
    pub runtime: RuntimeInfo,
}

#[derive(Clone, Debug)]
pub struct Simulation {
    pub dos: DensityOfStates,
    pub reservoir: DiscretizedReservoir,
    pub derived: Derived,
    pub trajectory: Trajectory,
}

pub fn build_reservoir(cfg: &RunConfig, n_modes: usize) -> Result<(DensityOfStates, DiscretizedReservoir)> {
    let dos = DensityOfStates::for_band(n_modes, 0.0, cfg.omega_u, cfg.coupling_c)?;
    let res = discretize(&dos, n_modes, cfg.omega_u, cfg.delta_seed.resolve(&dos), cfg.scheme)?;
    let res = if cfg.include_shift { res } else { res.without_shift() };
    Ok((dos, res))
}

fn simulate(cfg: &RunConfig, n_modes: usize, p: usize, has_defect: bool, init: InitialCondition) -> Result<Simulation> {
    let (dos, reservoir) = build_reservoir(cfg, n_modes)?;
    let basis = build_basis(p, n_modes, has_defect)?;
    let eqs = AmplitudeEquations::new(&cfg.params(), &reservoir, &basis)?;
    let obs = Observables::with_sectors(&basis, cfg.sectors);
    let psi0 = initial_state(&basis, &init)?;
    let prop = cfg.propagation();
    let trajectory = propagate(&eqs, psi0, &prop, |psi| obs.record(psi))?;
    let (n_steps, step) = prop.steps();
    let derived = Derived {
        n_modes,
        k_const: dos.k_const,
        coupling_g: reservoir.coupling_g,
        vacuum_shift: reservoir.vacuum_shift,
        omega_first: reservoir.frequencies[0],
        omega_last: reservoir.frequencies[n_modes - 1],
        basis_size: basis.len(),
        n_steps,
        step,
    };
    Ok(Simulation {
        dos,
        reservoir,
        derived,
        trajectory,
    })
}

/// One-excitation decay of the initially excited atom. A nonzero `g_d`
/// brings the defect in as one more linearly coupled mode.
pub fn simulate_decay(cfg: &RunConfig) -> Result<Simulation> {
    simulate_decay_with_modes(cfg, cfg.n_modes)
}

pub fn simulate_decay_with_modes(cfg: &RunConfig, n_modes: usize) -> Result<Simulation> {
    simulate(cfg, n_modes, 1, cfg.g_d != 0.0, InitialCondition::AtomExcited)
}

/// Two excitations starting from `|e,1_d,0>`.
pub fn simulate_two_photon(cfg: &RunConfig) -> Result<Simulation> {
    simulate(cfg, cfg.n_modes, 2, true, InitialCondition::AtomExcitedDefectLoaded)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleRun {
    pub times: Vec<f64>,
    pub p_excited: Vec<f64>,
    pub refinement_error: Option<f64>,
}

pub fn kernel_spec(cfg: &RunConfig) -> KernelSpec {
    KernelSpec {
        coupling_c: cfg.coupling_c,
        delta_o: cfg.delta_o,
    }
}

/// Oracle population on the propagation grid of `cfg`, sampled with its stride.
pub fn simulate_oracle(cfg: &RunConfig, with_refinement: bool) -> Result<OracleRun> {
    let prop = cfg.propagation();
    prop.validate()?;
    let (n_steps, h) = prop.steps();
    let spec = kernel_spec(cfg);
    let a = solve_uniform(&spec, h, n_steps)?;
    let (times, p_excited) = a
        .iter()
        .enumerate()
        .filter(|(i, _)| i % cfg.sample_stride == 0 || *i == n_steps)
        .map(|(i, ai)| (i as f64 * h, ai.norm_sqr()))
        .unzip();
    let refinement_error = if with_refinement && n_steps > 0 {
        Some(refinement_error(&spec, cfg.t_max, h)?)
    } else {
        None
    };
    Ok(OracleRun {
        times,
        p_excited,
        refinement_error,
    })
}

#[derive(Clone, Debug)]
pub struct ConvergenceMember {
    pub n_modes: usize,
    pub simulation: Simulation,
    pub sup_deviation: f64,
    /// First sample where the excited population leaves the oracle by more
    /// than [`REVIVAL_THRESHOLD`]; `None` if it never does within `t_max`.
    pub t_revival: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub oracle: OracleRun,
    pub members: Vec<ConvergenceMember>,
}

/// Runs every mode count in `cfg.n_list` (concurrently) plus the oracle on the
/// same grid.
pub fn convergence_study(cfg: &RunConfig) -> Result<ConvergenceReport> {
    let (oracle, sims) = rayon::join(
        || simulate_oracle(cfg, false),
        || {
            cfg.n_list
                .par_iter()
                .map(|&n| simulate_decay_with_modes(cfg, n))
                .collect::<Result<Vec<_>>>()
        },
    );
    let oracle = oracle?;
    let members = sims?
        .into_iter()
        .map(|simulation| {
            let traj = &simulation.trajectory;
            debug_assert_eq!(traj.times.len(), oracle.times.len());
            let deviations: Vec<f64> = traj
                .observables
                .iter()
                .zip(&oracle.p_excited)
                .map(|(o, exact)| (o.p_excited - exact).abs())
                .collect();
            let sup_deviation = deviations.iter().copied().fold(0.0, f64::max);
            let t_revival = deviations
                .iter()
                .position(|&d| d > REVIVAL_THRESHOLD)
                .map(|i| traj.times[i]);
            ConvergenceMember {
                n_modes: simulation.derived.n_modes,
                simulation,
                sup_deviation,
                t_revival,
            }
        })
        .collect();
    Ok(ConvergenceReport { oracle, members })
}

fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_text(header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt_float).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

pub const DECAY_COLUMNS: [&str; 5] = ["t", "p_excited", "p_res_one", "norm_sq", "n_total"];
pub const TWO_PHOTON_COLUMNS: [&str; 7] = ["t", "p_excited", "n_defect", "p_res_one", "p_res_two", "norm_sq", "n_total"];
pub const ORACLE_COLUMNS: [&str; 2] = ["t", "p_excited"];
pub const SUMMARY_COLUMNS: [&str; 3] = ["n_modes", "sup_deviation", "t_revival"];

fn record_rows<'a>(
    traj: &'a Trajectory,
    pick: impl Fn(&ObservableRecord) -> Vec<f64> + 'a,
) -> impl Iterator<Item = Vec<f64>> + 'a {
    traj.times.iter().zip(&traj.observables).map(move |(t, o)| {
        let mut row = vec![*t];
        row.extend(pick(o));
        row
    })
}

pub fn decay_csv(traj: &Trajectory) -> String {
    csv_text(
        &DECAY_COLUMNS,
        record_rows(traj, |o| vec![o.p_excited, o.p_res_one, o.norm_sq, o.n_total]),
    )
}

pub fn two_photon_csv(traj: &Trajectory) -> String {
    csv_text(
        &TWO_PHOTON_COLUMNS,
        record_rows(traj, |o| {
            vec![o.p_excited, o.n_defect, o.p_res_one, o.p_res_two, o.norm_sq, o.n_total]
        }),
    )
}

pub fn oracle_csv(run: &OracleRun) -> String {
    csv_text(
        &ORACLE_COLUMNS,
        run.times.iter().zip(&run.p_excited).map(|(t, p)| vec![*t, *p]),
    )
}

pub fn summary_csv(report: &ConvergenceReport) -> String {
    let mut s = SUMMARY_COLUMNS.join(",");
    s.push('\n');
    for m in &report.members {
        let t_rev = m.t_revival.map(fmt_float).unwrap_or_default();
        let _ = writeln!(s, "{},{},{}", m.n_modes, fmt_float(m.sup_deviation), t_rev);
    }
    s
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

fn write_sidecar(dir: &Path, sidecar: &Sidecar) -> Result<()> {
    let json = serde_json::to_string_pretty(sidecar).map_err(|e| Error::Io(e.to_string()))?;
    write_file(&dir.join("run.json"), &json)
}

fn runtime(start: Instant) -> RuntimeInfo {
    RuntimeInfo {
        version: env!("CARGO_PKG_VERSION").to_string(),
        elapsed_seconds: start.elapsed().as_secs_f64(),
        threads: rayon::current_num_threads(),
    }
}

/// Paths written by one invocation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Artifacts {
    pub files: Vec<PathBuf>,
}

pub fn run_decay(cfg: &RunConfig) -> Result<Artifacts> {
    let start = Instant::now();
    let sim = simulate_decay(cfg)?;
    let csv = cfg.out.join("run.csv");
    write_file(&csv, &decay_csv(&sim.trajectory))?;
    write_sidecar(
        &cfg.out,
        &Sidecar {
            config: cfg.clone(),
            derived: vec![sim.derived],
            oracle_refinement_error: None,
            runtime: runtime(start),
        },
    )?;
    Ok(Artifacts {
        files: vec![csv, cfg.out.join("run.json")],
    })
}

pub fn run_two_photon(cfg: &RunConfig) -> Result<Artifacts> {
    let start = Instant::now();
    let sim = simulate_two_photon(cfg)?;
    let csv = cfg.out.join("run.csv");
    write_file(&csv, &two_photon_csv(&sim.trajectory))?;
    write_sidecar(
        &cfg.out,
        &Sidecar {
            config: cfg.clone(),
            derived: vec![sim.derived],
            oracle_refinement_error: None,
            runtime: runtime(start),
        },
    )?;
    Ok(Artifacts {
        files: vec![csv, cfg.out.join("run.json")],
    })
}

pub fn run_oracle(cfg: &RunConfig) -> Result<Artifacts> {
    let start = Instant::now();
    let run = simulate_oracle(cfg, true)?;
    let csv = cfg.out.join("run.csv");
    write_file(&csv, &oracle_csv(&run))?;
    write_sidecar(
        &cfg.out,
        &Sidecar {
            config: cfg.clone(),
            derived: Vec::new(),
            oracle_refinement_error: run.refinement_error,
            runtime: runtime(start),
        },
    )?;
    Ok(Artifacts {
        files: vec![csv, cfg.out.join("run.json")],
    })
}

pub fn run_convergence(cfg: &RunConfig) -> Result<(Artifacts, ConvergenceReport)> {
    let start = Instant::now();
    let report = convergence_study(cfg)?;
    let mut files = Vec::new();
    for m in &report.members {
        let dir = cfg.out.join(format!("n{}", m.n_modes));
        let csv = dir.join("run.csv");
        write_file(&csv, &decay_csv(&m.simulation.trajectory))?;
        let mut member_cfg = cfg.clone();
        member_cfg.kind = ExperimentKind::Decay;
        member_cfg.n_modes = m.n_modes;
        member_cfg.out = dir.clone();
        write_sidecar(
            &dir,
            &Sidecar {
                config: member_cfg,
                derived: vec![m.simulation.derived.clone()],
                oracle_refinement_error: None,
                runtime: runtime(start),
            },
        )?;
        files.push(csv);
        files.push(dir.join("run.json"));
    }
    let oracle = cfg.out.join("run.csv");
    write_file(&oracle, &oracle_csv(&report.oracle))?;
    let summary = cfg.out.join("summary.csv");
    write_file(&summary, &summary_csv(&report))?;
    write_sidecar(
        &cfg.out,
        &Sidecar {
            config: cfg.clone(),
            derived: report.members.iter().map(|m| m.simulation.derived.clone()).collect(),
            oracle_refinement_error: report.oracle.refinement_error,
            runtime: runtime(start),
        },
    )?;
    files.extend([oracle, summary, cfg.out.join("run.json")]);
    Ok((Artifacts { files }, report))
}

/// Resolves the configuration for `cmd` and runs it.
pub fn execute(cmd: &Command) -> Result<Artifacts> {
    let (kind, overrides) = cmd.kind_and_overrides();
    let mut cfg = resolve_config(kind, overrides)?;
    if overrides.out.is_none() && cfg.out == Path::new("out") {
        cfg.out = PathBuf::from("out").join(kind_dir(kind));
    }
    match kind {
        ExperimentKind::Decay => run_decay(&cfg),
        ExperimentKind::TwoPhoton => run_two_photon(&cfg),
        ExperimentKind::Oracle => run_oracle(&cfg),
        ExperimentKind::Convergence => run_convergence(&cfg).map(|(a, _)| a),
    }
}

fn kind_dir(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::Decay => "decay",
        ExperimentKind::TwoPhoton => "two-photon",
        ExperimentKind::Convergence => "convergence",
        ExperimentKind::Oracle => "oracle",
    }
}
