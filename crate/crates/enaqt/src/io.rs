// Copyright 2026 ENAQT Contributors
// SPDX-License-Identifier: Apache-2.0

//! File formats: CSV tables, the transport-system document and the run
//! manifest.
//!
//! Numbers are written with `{:e}` (shortest round-trip mantissa), so equal
//! values always produce equal bytes. Undefined transfer times are left
//! empty.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use enaqt_core::fmo::{sha256_hex, TransferTimeSurface};
use enaqt_core::units::{UnitConvention, BOLTZMANN_CM_PER_K, SPEED_OF_LIGHT_CM_PER_PS};
use enaqt_core::{InitialState, Trajectory, TransportResult, TransportSystem};
use serde::{Deserialize, Serialize};

use crate::ensemble::DisorderEnsembleReport;
use crate::error::{Error, Result};

pub const ENERGY_UNIT: &str = "cm-1";
pub const RATE_UNIT: &str = "ps-1";

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn table(header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.into_inner().map_err(|e| Error::Validation(format!("csv buffer: {e}")))
}

fn names(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

/// One dephasing-sweep row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub gamma: f64,
    pub result: TransportResult,
}

/// `gamma_phi_ps^-1, eta, tau_ps, loss`, plus a constant marker column when
/// `marker = Some((kelvin, rate_ps))`.
pub fn sweep_csv(rows: &[SweepRow], marker: Option<(f64, f64)>) -> Result<Vec<u8>> {
    let mut header = names(&["gamma_phi_ps^-1", "eta", "tau_ps", "loss"]);
    if let Some((kelvin, _)) = marker {
        header.push(format!("gamma_phi_{kelvin}K_ps^-1"));
    }
    table(
        &header,
        rows.iter().map(|r| {
            let mut rec = vec![
                num(r.gamma),
                num(r.result.efficiency),
                opt(r.result.transfer_time),
                num(r.result.loss_probability),
            ];
            if let Some((_, rate)) = marker {
                rec.push(num(rate));
            }
            rec
        }),
    )
}

/// Long format `gamma_phi, kappa_3, tau_ps`, κ outer, γ inner.
pub fn surface_csv(s: &TransferTimeSurface) -> Result<Vec<u8>> {
    let rows = s.kappas.iter().zip(&s.tau).flat_map(|(k, row)| {
        s.gammas.iter().zip(row).map(move |(g, t)| vec![num(*g), num(*k), opt(*t)])
    });
    table(&names(&["gamma_phi", "kappa_3", "tau_ps"]), rows)
}

/// `t_ps, p_1, ..., p_N, trace, coherence_l1`.
pub fn trajectory_csv(traj: &Trajectory) -> Result<Vec<u8>> {
    let n = traj.states.first().map_or(0, |s| s.n_sites());
    let mut header = vec!["t_ps".to_string()];
    header.extend((1..=n).map(|m| format!("p_{m}")));
    header.extend(names(&["trace", "coherence_l1"]));
    table(
        &header,
        traj.times.iter().zip(&traj.states).map(|(t, rho)| {
            let mut rec = vec![num(*t)];
            rec.extend(rho.populations().into_iter().map(num));
            rec.push(num(rho.trace()));
            rec.push(num(rho.coherence_l1()));
            rec
        }),
    )
}

/// Flat record `eta, tau_ps, loss, s_1, ..., s_N` (site integrals in ps).
pub fn result_csv(r: &TransportResult) -> Result<Vec<u8>> {
    let mut header = names(&["eta", "tau_ps", "loss"]);
    header.extend((1..=r.site_integrals.len()).map(|m| format!("s_{m}")));
    let mut rec = vec![num(r.efficiency), opt(r.transfer_time), num(r.loss_probability)];
    rec.extend(r.site_integrals.iter().copied().map(num));
    table(&header, [rec])
}

pub fn report_csv(report: &DisorderEnsembleReport) -> Result<Vec<u8>> {
    let header = names(&[
        "delta_over_V",
        "kind",
        "n_ok",
        "eta_quantum_mean",
        "eta_quantum_std",
        "eta_opt_mean",
        "eta_opt_std",
        "gamma_opt_mean_ps",
        "gamma_opt_std_ps",
    ]);
    table(
        &header,
        report.records.iter().map(|r| {
            vec![
                num(r.delta_over_v),
                report.kind.as_str().to_string(),
                r.n_ok.to_string(),
                num(r.eta_quantum_mean),
                num(r.eta_quantum_std),
                num(r.eta_opt_mean),
                num(r.eta_opt_std),
                num(r.gamma_opt_mean),
                num(r.gamma_opt_std),
            ]
        }),
    )
}

/// Writes through a temporary sibling and renames, so a failed run never
/// leaves a truncated file behind.
pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Parses a TOML document, reporting the file and the line of any error.
pub fn parse_toml<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Parse { path: path.to_path_buf(), message: e.to_string() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaggedScalar {
    pub unit: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaggedList {
    pub unit: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaggedMatrix {
    pub unit: String,
    pub values: Vec<Vec<f64>>,
}

fn expect_unit(field: &str, found: &str, unit: &str) -> Result<()> {
    if found != unit {
        return Err(Error::Config(format!("{field}: unit must be \"{unit}\", found \"{found}\"")));
    }
    Ok(())
}

/// Text form of a [`TransportSystem`]:
///
/// ```toml
/// n_sites = 2
/// site_energies = { unit = "cm-1", values = [0.0, 100.0] }
/// couplings = { unit = "cm-1", values = [[0.0, 10.0], [10.0, 0.0]] }
/// trap_rates = { unit = "ps-1", values = [0.0, 1.0] }
/// recomb_rate = { unit = "ps-1", value = 0.0005 }
/// dephasing_rate = { unit = "ps-1", value = 0.0 }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    pub n_sites: usize,
    pub site_energies: TaggedList,
    pub couplings: TaggedMatrix,
    pub trap_rates: TaggedList,
    pub recomb_rate: TaggedScalar,
    pub dephasing_rate: TaggedScalar,
}

impl SystemDocument {
    pub fn from_system(sys: &TransportSystem) -> Self {
        let n = sys.n_sites();
        let v = sys.couplings();
        Self {
            n_sites: n,
            site_energies: TaggedList { unit: ENERGY_UNIT.into(), values: sys.site_energies().to_vec() },
            couplings: TaggedMatrix {
                unit: ENERGY_UNIT.into(),
                values: (0..n).map(|r| (0..n).map(|c| v[(r, c)]).collect()).collect(),
            },
            trap_rates: TaggedList { unit: RATE_UNIT.into(), values: sys.trap_rates().to_vec() },
            recomb_rate: TaggedScalar { unit: RATE_UNIT.into(), value: sys.recomb_rate() },
            dephasing_rate: TaggedScalar { unit: RATE_UNIT.into(), value: sys.dephasing_rate() },
        }
    }

    pub fn to_system(&self) -> Result<TransportSystem> {
        expect_unit("site_energies", &self.site_energies.unit, ENERGY_UNIT)?;
        expect_unit("couplings", &self.couplings.unit, ENERGY_UNIT)?;
        expect_unit("trap_rates", &self.trap_rates.unit, RATE_UNIT)?;
        expect_unit("recomb_rate", &self.recomb_rate.unit, RATE_UNIT)?;
        expect_unit("dephasing_rate", &self.dephasing_rate.unit, RATE_UNIT)?;
        if self.site_energies.values.len() != self.n_sites {
            return Err(Error::Config(format!(
                "n_sites = {} but {} site energies given",
                self.n_sites,
                self.site_energies.values.len()
            )));
        }
        Ok(TransportSystem::new(
            self.site_energies.values.clone(),
            self.couplings.values.clone(),
            self.trap_rates.values.clone(),
            self.recomb_rate.value,
            self.dephasing_rate.value,
        )?)
    }
}

/// Input of the `propagate` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagateDocument {
    pub system: SystemDocument,
    pub initial: InitialState,
    #[serde(default)]
    pub propagation: PropagationSettings,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PropagationSettings {
    /// Horizon in ps; defaults to ten decay times of the slowest sink.
    pub t_final: Option<f64>,
    /// Cap applied to the default horizon, ps.
    pub horizon_cap: Option<f64>,
    pub samples: Option<usize>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Constants {
    pub speed_of_light_cm_per_ps: f64,
    pub angular_per_wavenumber_ps_per_cm: f64,
    pub boltzmann_cm_per_k: f64,
}

impl Constants {
    pub fn current(units: &UnitConvention) -> Self {
        Self {
            speed_of_light_cm_per_ps: SPEED_OF_LIGHT_CM_PER_PS,
            angular_per_wavenumber_ps_per_cm: units.angular_per_wavenumber,
            boltzmann_cm_per_k: BOLTZMANN_CM_PER_K,
        }
    }
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub seed: Option<u64>,
    pub width: usize,
    pub wall_time_s: f64,
    pub config: toml::Value,
    pub constants: Constants,
    /// SHA-256 of input data files.
    pub inputs: BTreeMap<String, String>,
    /// SHA-256 of every file written by the run.
    pub outputs: BTreeMap<String, String>,
    pub annotations: BTreeMap<String, f64>,
}

impl Manifest {
    pub fn new(command: &str, config: &impl Serialize) -> Result<Self> {
        let config = toml::Value::try_from(config).map_err(|e| Error::Config(format!("config echo: {e}")))?;
        Ok(Self {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed: None,
            width: 0,
            wall_time_s: 0.0,
            config,
            constants: Constants::current(&UnitConvention::default()),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            annotations: BTreeMap::new(),
        })
    }

    pub fn record_output(&mut self, name: &str, bytes: &[u8]) {
        self.outputs.insert(name.into(), sha256_hex(bytes));
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(format!("manifest: {e}")))
    }
}

/// Collects output files in memory and writes them only once all are built.
#[derive(Debug, Default)]
pub struct OutputSet {
    files: Vec<(String, Vec<u8>)>,
}

impl OutputSet {
    pub fn add(&mut self, name: &str, bytes: Vec<u8>, manifest: &mut Manifest) {
        manifest.record_output(name, &bytes);
        self.files.push((name.into(), bytes));
    }

    /// Writes every file and then the manifest into `dir`.
    pub fn commit(self, dir: &Path, manifest: &Manifest) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let manifest_text = manifest.to_toml()?;
        let mut written = Vec::new();
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            write_file(&path, bytes)?;
            written.push(path);
        }
        let path = dir.join("manifest.toml");
        write_file(&path, manifest_text.as_bytes())?;
        written.push(path);
        Ok(written)
    }
}
