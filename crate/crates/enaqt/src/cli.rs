// Copyright 2026 ENAQT Contributors
// SPDX-License-Identifier: Apache-2.0

//! Command-line surface. Every subcommand resolves its configuration from
//! built-in defaults, then an optional `--config` TOML file, then flags.
//! Outputs are assembled in memory and written only after validation, next
//! to a `manifest.toml` describing the run.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use enaqt_core::dynamics::default_horizon;
use enaqt_core::fmo::{FmoOverrides, DEFAULT_RECOMB_RATE, DEFAULT_TRAP_RATE};
use enaqt_core::observables::evaluate;
use enaqt_core::search::{linear_grid, log_grid};
use enaqt_core::tree::{InitialKind, MAX_GENERATION};
use enaqt_core::{propagate, DephasingScan, InitialState, OhmicBath, PropagateOptions, TwoLevelParams, UnitConvention};
use serde::{Deserialize, Serialize};

use crate::ensemble::{disorder_ensemble, EnsembleConfig};
use crate::error::{Error, Result};
use crate::fmo_study::{dephasing_sweep, load_fmo_model, trap_dephasing_surface};
use crate::io::{self, Manifest, OutputSet, PropagateDocument, SweepRow};

#[derive(Debug, Parser)]
#[command(name = "enaqt", version, about = "Dephasing-assisted excitation transport studies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// η, τ and loss across dephasing rates for the FMO complex.
    FmoSweep(FmoSweepArgs),
    /// Disorder ensembles of binary trees with optimal dephasing.
    TreeEnsemble(TreeEnsembleArgs),
    /// Two-site oracle comparison and dephasing sweep.
    TwoLevel(TwoLevelArgs),
    /// Trajectory of an arbitrary system read from a TOML file.
    Propagate(PropagateArgs),
    /// Dephasing rate of the Ohmic bath at a temperature.
    TemperatureToRate(TemperatureArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output directory.
    #[arg(long, short, default_value = ".")]
    pub out: PathBuf,
    /// TOML file with configuration values; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub width: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FmoSweepConfig {
    /// Hamiltonian data file; the bundled one when absent.
    pub data: Option<PathBuf>,
    pub trap_rate: f64,
    pub recomb_rate: f64,
    pub initial_state: InitialState,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub gamma_points: usize,
    pub surface: bool,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub kappa_points: usize,
    pub annotate_temperature: Option<f64>,
    pub reorganization_energy: f64,
    pub cutoff: f64,
}

impl Default for FmoSweepConfig {
    fn default() -> Self {
        let bath = OhmicBath::default();
        Self {
            data: None,
            trap_rate: DEFAULT_TRAP_RATE,
            recomb_rate: DEFAULT_RECOMB_RATE,
            initial_state: InitialState::Mixture(vec![1, 6]),
            gamma_min: 1e-3,
            gamma_max: 1e5,
            gamma_points: 60,
            surface: false,
            kappa_min: 1e-2,
            kappa_max: 1e2,
            kappa_points: 41,
            annotate_temperature: Some(300.0),
            reorganization_energy: bath.reorganization_energy,
            cutoff: bath.cutoff,
        }
    }
}

#[derive(Debug, Args)]
pub struct FmoSweepArgs {
    #[command(flatten)]
    pub common: Common,
    /// Hamiltonian data file (a `.sha256` sidecar must sit next to it).
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Also compute the τ(γ_φ, κ₃) surface.
    #[arg(long)]
    pub surface: bool,
    /// Temperature (K) whose dephasing rate is recorded as a marker.
    #[arg(long)]
    pub annotate_temperature: Option<f64>,
    #[arg(long)]
    pub trap_rate: Option<f64>,
    #[arg(long)]
    pub recomb_rate: Option<f64>,
    #[arg(long)]
    pub gamma_points: Option<usize>,
    #[arg(long)]
    pub kappa_points: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum KindChoice {
    Coherent,
    Mixture,
    Both,
}

impl KindChoice {
    fn kinds(self) -> Vec<InitialKind> {
        match self {
            KindChoice::Coherent => vec![InitialKind::Coherent],
            KindChoice::Mixture => vec![InitialKind::Mixture],
            KindChoice::Both => vec![InitialKind::Coherent, InitialKind::Mixture],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TreeEnsembleConfig {
    pub generation: u32,
    pub coupling: f64,
    pub samples: usize,
    pub seed: u64,
    pub kind: KindChoice,
    /// δ/V values.
    pub delta_grid: Vec<f64>,
    pub search_points: usize,
    pub search_rel_tol: f64,
    pub allow_large: bool,
}

impl Default for TreeEnsembleConfig {
    fn default() -> Self {
        let e = EnsembleConfig::default();
        Self {
            generation: e.generation,
            coupling: e.coupling,
            samples: e.samples,
            seed: e.master_seed,
            kind: KindChoice::Both,
            delta_grid: e.delta_grid,
            search_points: e.search_points,
            search_rel_tol: e.search_rel_tol,
            allow_large: e.allow_large,
        }
    }
}

#[derive(Debug, Args)]
pub struct TreeEnsembleArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub generation: Option<u32>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub kind: Option<KindChoice>,
    /// δ/V values: `start:stop:count` or a comma-separated list.
    #[arg(long)]
    pub delta_grid: Option<String>,
    /// Accept generations above the size guard.
    #[arg(long)]
    pub allow_large: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TwoLevelConfig {
    /// ε, cm⁻¹.
    pub epsilon: f64,
    /// V, cm⁻¹.
    pub coupling: f64,
    /// κ on site 2 for the sweep, ps⁻¹.
    pub trap_rate: f64,
    pub recomb_rate: f64,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub gamma_points: usize,
    /// Samples of the oracle comparison over `[0, 10/Ω]`.
    pub samples: usize,
    pub tolerance: f64,
    /// Largest accepted oracle deviation.
    pub max_deviation: f64,
}

impl Default for TwoLevelConfig {
    fn default() -> Self {
        Self {
            epsilon: 100.0,
            coupling: 10.0,
            trap_rate: 1.0,
            recomb_rate: 0.0005,
            gamma_min: 1e-3,
            gamma_max: 1e5,
            gamma_points: 60,
            samples: 201,
            tolerance: 1e-12,
            max_deviation: 1e-8,
        }
    }
}

#[derive(Debug, Args)]
pub struct TwoLevelArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub coupling: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PropagateArgs {
    /// Output directory.
    #[arg(long, short, default_value = ".")]
    pub out: PathBuf,
    /// System, initial state and propagation settings (TOML).
    #[arg(long)]
    pub system: PathBuf,
    /// Horizon in ps; overrides the file.
    #[arg(long)]
    pub t_final: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TemperatureArgs {
    /// Kelvin.
    #[arg(long, default_value_t = 300.0)]
    pub temperature: f64,
    /// E_R, cm⁻¹.
    #[arg(long)]
    pub reorganization_energy: Option<f64>,
    /// ω_c, cm⁻¹.
    #[arg(long)]
    pub cutoff: Option<f64>,
}

fn load_config<T: Default + for<'de> Deserialize<'de>>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => io::parse_toml(p, &io::read_text(p)?),
    }
}

/// `start:stop:count` or `a,b,c`.
pub fn parse_delta_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("cannot read delta grid `{text}`"));
    let grid = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        linear_grid(lo, hi, n)
    } else {
        text.split(',').map(|s| s.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?
    };
    if grid.is_empty() || grid.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
        return Err(bad());
    }
    Ok(grid)
}

pub fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    match cli.command {
        Command::FmoSweep(a) => cmd_fmo_sweep(a),
        Command::TreeEnsemble(a) => cmd_tree_ensemble(a),
        Command::TwoLevel(a) => cmd_two_level(a),
        Command::Propagate(a) => cmd_propagate(a),
        Command::TemperatureToRate(a) => cmd_temperature_to_rate(a).map(|_| Vec::new()),
    }
}

pub fn cmd_fmo_sweep(a: FmoSweepArgs) -> Result<Vec<PathBuf>> {
    let start = Instant::now();
    let mut cfg: FmoSweepConfig = load_config(a.common.config.as_deref())?;
    if a.data.is_some() {
        cfg.data = a.data;
    }
    cfg.surface |= a.surface;
    if a.annotate_temperature.is_some() {
        cfg.annotate_temperature = a.annotate_temperature;
    }
    cfg.trap_rate = a.trap_rate.unwrap_or(cfg.trap_rate);
    cfg.recomb_rate = a.recomb_rate.unwrap_or(cfg.recomb_rate);
    cfg.gamma_points = a.gamma_points.unwrap_or(cfg.gamma_points);
    cfg.kappa_points = a.kappa_points.unwrap_or(cfg.kappa_points);

    let overrides = FmoOverrides {
        trap_rate: Some(cfg.trap_rate),
        recomb_rate: Some(cfg.recomb_rate),
        dephasing_rate: None,
        initial_state: Some(cfg.initial_state.clone()),
    };
    let loaded = load_fmo_model(cfg.data.as_deref(), &overrides)?;
    let width = a.common.width;
    let mut manifest = Manifest::new("fmo-sweep", &cfg)?;
    manifest.width = width;
    manifest.inputs.insert(loaded.source.clone(), loaded.sha256.clone());

    let marker = match cfg.annotate_temperature {
        Some(kelvin) => {
            let bath = OhmicBath::new(cfg.reorganization_energy, cfg.cutoff)?;
            let rate = bath.dephasing_rate(kelvin, &UnitConvention::default())?;
            manifest.annotations.insert(format!("gamma_phi_{kelvin}K_cm^-1"), rate.wavenumber);
            manifest.annotations.insert(format!("gamma_phi_{kelvin}K_ps^-1"), rate.angular);
            Some((kelvin, rate.angular))
        }
        None => None,
    };

    let gammas = log_grid(cfg.gamma_min, cfg.gamma_max, cfg.gamma_points);
    let rows = dephasing_sweep(&loaded.model, &gammas, width)?;
    for r in &rows {
        if !(r.result.efficiency + r.result.loss_probability - 1.0).abs().le(&1e-8) {
            return Err(Error::Validation(format!("η + loss ≠ 1 at γ_φ = {}", r.gamma)));
        }
    }
    let mut outputs = OutputSet::default();
    outputs.add("fmo_sweep.csv", io::sweep_csv(&rows, marker)?, &mut manifest);

    if cfg.surface {
        let kappas = log_grid(cfg.kappa_min, cfg.kappa_max, cfg.kappa_points);
        let positive: Vec<f64> = gammas.iter().copied().filter(|&g| g > 0.0).collect();
        let surface = trap_dephasing_surface(&loaded.model, &positive, &kappas, width)?;
        if let Some((i, j)) = surface.argmin() {
            manifest.annotations.insert("surface_min_kappa_3".into(), surface.kappas[i]);
            manifest.annotations.insert("surface_min_gamma_phi".into(), surface.gammas[j]);
            manifest.annotations.insert("surface_min_interior".into(), surface.has_interior_minimum() as u8 as f64);
        }
        outputs.add("fmo_surface.csv", io::surface_csv(&surface)?, &mut manifest);
    }
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    outputs.commit(&a.common.out, &manifest)
}

pub fn cmd_tree_ensemble(a: TreeEnsembleArgs) -> Result<Vec<PathBuf>> {
    let start = Instant::now();
    let mut cfg: TreeEnsembleConfig = load_config(a.common.config.as_deref())?;
    cfg.generation = a.generation.unwrap_or(cfg.generation);
    cfg.samples = a.samples.unwrap_or(cfg.samples);
    cfg.seed = a.seed.unwrap_or(cfg.seed);
    cfg.kind = a.kind.unwrap_or(cfg.kind);
    cfg.allow_large |= a.allow_large;
    if let Some(g) = &a.delta_grid {
        cfg.delta_grid = parse_delta_grid(g)?;
    }
    if cfg.generation > MAX_GENERATION && !cfg.allow_large {
        return Err(enaqt_core::Error::SizeGuard { generation: cfg.generation, max: MAX_GENERATION }.into());
    }

    let ens = EnsembleConfig {
        generation: cfg.generation,
        coupling: cfg.coupling,
        delta_grid: cfg.delta_grid.clone(),
        samples: cfg.samples,
        master_seed: cfg.seed,
        search_points: cfg.search_points,
        search_rel_tol: cfg.search_rel_tol,
        allow_large: cfg.allow_large,
    };
    let mut manifest = Manifest::new("tree-ensemble", &cfg)?;
    manifest.seed = Some(cfg.seed);
    manifest.width = a.common.width;
    let reports = disorder_ensemble(&ens, &cfg.kind.kinds(), a.common.width)?;
    let mut outputs = OutputSet::default();
    for r in &reports {
        let name = format!("tree_ensemble_{}.csv", r.kind.as_str());
        outputs.add(&name, io::report_csv(r)?, &mut manifest);
    }
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    outputs.commit(&a.common.out, &manifest)
}

pub fn cmd_two_level(a: TwoLevelArgs) -> Result<Vec<PathBuf>> {
    let start = Instant::now();
    let mut cfg: TwoLevelConfig = load_config(a.common.config.as_deref())?;
    cfg.epsilon = a.epsilon.unwrap_or(cfg.epsilon);
    cfg.coupling = a.coupling.unwrap_or(cfg.coupling);
    if cfg.coupling == 0.0 {
        return Err(Error::Config("coupling V = 0 leaves the sites uncoupled: there is no dynamics".into()));
    }
    let mut manifest = Manifest::new("two-level", &cfg)?;
    manifest.width = a.common.width;

    // Coherent motion without sinks against the Rabi formula.
    let p = TwoLevelParams::new(cfg.epsilon, cfg.coupling, 0.0)?;
    let sys = p.transport_system()?;
    let rho0 = InitialState::Site(1).density_matrix(2)?;
    let horizon = 10.0 / p.larmor_frequency();
    let opts = PropagateOptions { tolerance: cfg.tolerance, sample_count: cfg.samples, ..Default::default() };
    let traj = propagate(&sys, &rho0, horizon, &opts)?;
    let mut worst: f64 = 0.0;
    let mut rows = Vec::with_capacity(traj.times.len());
    for (t, rho) in traj.times.iter().zip(&traj.states) {
        let oracle = p.coherent_population_2(*t)?;
        let got = rho.as_matrix()[(1, 1)].re;
        worst = worst.max((got - oracle).abs());
        rows.push(vec![format!("{t:e}"), format!("{oracle:e}"), format!("{got:e}"), format!("{:e}", (got - oracle).abs())]);
    }
    manifest.annotations.insert("oracle_max_deviation".into(), worst);
    if !(worst <= cfg.max_deviation) {
        return Err(Error::Validation(format!(
            "propagated population deviates from the Rabi formula by {worst:e} (limit {:e})",
            cfg.max_deviation
        )));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t_ps", "p2_oracle", "p2_propagated", "abs_diff"])?;
    for r in &rows {
        w.write_record(r)?;
    }
    let oracle_csv = w.into_inner().map_err(|e| Error::Validation(format!("csv buffer: {e}")))?;

    // Dephasing sweep with a trap on site 2.
    let trapped = p.transport_system_with_sinks([0.0, cfg.trap_rate], cfg.recomb_rate)?;
    let scan = DephasingScan::new(&trapped, &rho0)?;
    let gammas = log_grid(cfg.gamma_min, cfg.gamma_max, cfg.gamma_points);
    let sweep = gammas
        .iter()
        .map(|&gamma| Ok(SweepRow { gamma, result: scan.evaluate(gamma)? }))
        .collect::<Result<Vec<_>>>()?;
    let (imax, _) = sweep
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |b, (i, r)| if r.result.efficiency > b.1 { (i, r.result.efficiency) } else { b });
    manifest.annotations.insert("sweep_argmax_gamma_phi".into(), sweep[imax].gamma);
    manifest
        .annotations
        .insert("sweep_interior_maximum".into(), (imax > 0 && imax + 1 < sweep.len()) as u8 as f64);

    let mut outputs = OutputSet::default();
    outputs.add("two_level_oracle.csv", oracle_csv, &mut manifest);
    outputs.add("two_level_sweep.csv", io::sweep_csv(&sweep, None)?, &mut manifest);
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    outputs.commit(&a.common.out, &manifest)
}

pub fn cmd_propagate(a: PropagateArgs) -> Result<Vec<PathBuf>> {
    let start = Instant::now();
    let text = io::read_text(&a.system)?;
    let doc: PropagateDocument = io::parse_toml(&a.system, &text)?;
    let sys = doc.system.to_system()?;
    let rho0 = doc.initial.density_matrix(sys.n_sites())?;
    let settings = &doc.propagation;
    let t_final = match a.t_final.or(settings.t_final) {
        Some(t) => t,
        None => default_horizon(&sys, settings.horizon_cap.unwrap_or(f64::INFINITY)).ok_or_else(|| {
            Error::Config("the system has no sink: give t_final or horizon_cap".into())
        })?,
    };
    let opts = PropagateOptions {
        tolerance: settings.tolerance.unwrap_or(1e-9),
        sample_count: a.samples.or(settings.samples).unwrap_or(201),
        ..Default::default()
    };
    let traj = propagate(&sys, &rho0, t_final, &opts)?;

    let mut manifest = Manifest::new("propagate", &doc)?;
    manifest.inputs.insert(a.system.display().to_string(), enaqt_core::fmo::sha256_hex(text.as_bytes()));
    manifest.annotations.insert("t_final_ps".into(), t_final);
    manifest.annotations.insert("error_bound".into(), traj.error_bound);
    manifest.annotations.insert("steps".into(), traj.steps as f64);
    let mut outputs = OutputSet::default();
    outputs.add("trajectory.csv", io::trajectory_csv(&traj)?, &mut manifest);
    if sys.has_sink() {
        let result = evaluate(&sys, &rho0)?;
        outputs.add("transport_result.csv", io::result_csv(&result)?, &mut manifest);
    }
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    outputs.commit(&a.out, &manifest)
}

pub fn cmd_temperature_to_rate(a: TemperatureArgs) -> Result<()> {
    let d = OhmicBath::default();
    let bath = OhmicBath::new(a.reorganization_energy.unwrap_or(d.reorganization_energy), a.cutoff.unwrap_or(d.cutoff))?;
    let rate = bath.dephasing_rate(a.temperature, &UnitConvention::default())?;
    println!("temperature_K = {}", a.temperature);
    println!("gamma_phi_cm^-1 = {}", rate.wavenumber);
    println!("gamma_phi_ps^-1 = {}", rate.angular);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_grid_forms() {
        assert_eq!(parse_delta_grid("0:4:5").unwrap(), vec![0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(parse_delta_grid("0, 0.5,2").unwrap(), vec![0.0, 0.5, 2.0]);
        assert!(parse_delta_grid("0:4").is_err());
        assert!(parse_delta_grid("-1,2").is_err());
        assert!(parse_delta_grid("a").is_err());
    }

    #[test]
    fn config_defaults_match_library() {
        let t = TreeEnsembleConfig::default();
        assert_eq!((t.generation, t.samples, t.delta_grid.len()), (4, 100, 20));
        let f = FmoSweepConfig::default();
        assert_eq!((f.trap_rate, f.recomb_rate, f.gamma_points), (1.0, 0.0005, 60));
        assert_eq!(f.initial_state, InitialState::Mixture(vec![1, 6]));
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let err = toml::from_str::<FmoSweepConfig>("trap_rate = 2.0\nbogus = 1\n").unwrap_err().to_string();
        assert!(err.contains("bogus") && err.contains("line 2"), "{err}");
        let ok: FmoSweepConfig = toml::from_str("trap_rate = 2.0\n").unwrap();
        assert_eq!(ok.trap_rate, 2.0);
    }
}
