//! Sweeps over geometries, channels, rates and repetitions, and their CSV /
//! JSON outputs.
//!
//! `records.csv` has one row per (geometry, channel, rate, repetition) with
//! the columns of [`ExperimentRecord`] in declaration order. `summary.csv`
//! has one row per (geometry, channel, rate) with the columns of
//! [`SummaryRow`]; an undefined variance (a single repetition) is an empty
//! cell. `run-manifest.json` holds the resolved configuration and the crate
//! version.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{load_sweep, GeometryPoint};
use crate::measurement::{build_plan_with, measure_all, Grouping, ShotConfig};
use crate::noise::{apply_channel, ChannelKind, NoiseChannel};
use crate::projection::{
    all_projections, alternating_sequence, partial_projection_iterate, select_best, ProjectionConfig,
    ProjectionKind, ProjectionOutcome,
};
use crate::rdm::{assemble, energy, rdm_fidelity, RdmMeasurement, TwoRdm};
use crate::state::{fidelity, ground_state_in_sector, DensityMatrix};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjectionMode {
    D,
    Q,
    G,
    #[default]
    Best,
    Series,
    Partial,
}

impl ProjectionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ProjectionMode::D => "d",
            ProjectionMode::Q => "q",
            ProjectionMode::G => "g",
            ProjectionMode::Best => "best",
            ProjectionMode::Series => "series",
            ProjectionMode::Partial => "partial",
        }
    }
}

impl fmt::Display for ProjectionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProjectionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "d" => Ok(ProjectionMode::D),
            "q" => Ok(ProjectionMode::Q),
            "g" => Ok(ProjectionMode::G),
            "best" => Ok(ProjectionMode::Best),
            "series" => Ok(ProjectionMode::Series),
            "partial" => Ok(ProjectionMode::Partial),
            other => Err(Error::Config(format!("unknown projection mode {other:?}"))),
        }
    }
}

fn default_channels() -> Vec<ChannelKind> {
    vec![ChannelKind::Damping]
}
fn default_rates() -> Vec<f64> {
    vec![1e-2]
}
fn default_repetitions() -> u32 {
    1
}
fn default_time() -> f64 {
    1.0
}
fn default_series_order() -> Vec<ProjectionKind> {
    ProjectionKind::ALL.to_vec()
}
fn default_true() -> bool {
    true
}

fn default_output() -> PathBuf {
    PathBuf::from("nrep-out")
}

/// Experiment description, read from TOML. A relative `manifest` path is
/// resolved against the directory of the config file; `output` is taken
/// as given (relative to the working directory).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub manifest: PathBuf,
    #[serde(default = "default_channels")]
    pub channels: Vec<ChannelKind>,
    #[serde(default = "default_rates")]
    pub rates: Vec<f64>,
    #[serde(default = "default_time")]
    pub time: f64,
    #[serde(default)]
    pub shots: u32,
    #[serde(default = "default_repetitions")]
    pub repetitions: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub grouping: Grouping,
    #[serde(default)]
    pub projection: ProjectionMode,
    #[serde(default)]
    pub projection_config: ProjectionConfig,
    #[serde(default = "default_series_order")]
    pub series_order: Vec<ProjectionKind>,
    /// Discard the imaginary parts of measured RDM elements. Every supported
    /// Hamiltonian is real and every channel maps real states to real states,
    /// so those parts carry only shot noise.
    #[serde(default = "default_true")]
    pub real_rdms: bool,
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

impl ExperimentConfig {
    pub fn new(manifest: impl Into<PathBuf>) -> Self {
        Self {
            manifest: manifest.into(),
            channels: default_channels(),
            rates: default_rates(),
            time: default_time(),
            shots: 0,
            repetitions: default_repetitions(),
            seed: 0,
            grouping: Grouping::default(),
            projection: ProjectionMode::default(),
            projection_config: ProjectionConfig::default(),
            series_order: default_series_order(),
            real_rdms: true,
            output: default_output(),
        }
    }

    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.manifest = base_dir.join(&cfg.manifest);
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_toml_str(&text, base).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.channels.is_empty() {
            return Err(Error::Config("no channels given".into()));
        }
        if self.rates.is_empty() {
            return Err(Error::Config("no rates given".into()));
        }
        for &kind in &self.channels {
            for &rate in &self.rates {
                NoiseChannel::with_time(kind, rate, self.time)?;
            }
        }
        ShotConfig::new(self.shots, self.repetitions, self.seed)?;
        self.projection_config.validate()?;
        if self.series_order.is_empty() {
            return Err(Error::Config("series_order must not be empty".into()));
        }
        Ok(())
    }
}

/// One row of `records.csv`. Errors are `energy − fci_energy`; fidelities
/// are the state overlap `⟨ψ|ρ|ψ⟩` for the noisy state and the RDM-level
/// fidelity against the exact 2-RDM otherwise; distances are Frobenius
/// distances between 2-RDMs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub geometry: String,
    pub channel: ChannelKind,
    pub rate: f64,
    pub repetition: u32,
    pub fci_energy: f64,
    pub raw_energy: f64,
    pub raw_error: f64,
    pub d_energy: f64,
    pub d_error: f64,
    pub q_energy: f64,
    pub q_error: f64,
    pub g_energy: f64,
    pub g_error: f64,
    pub best_kind: ProjectionKind,
    pub best_energy: f64,
    pub best_error: f64,
    pub mode: ProjectionMode,
    pub mode_energy: f64,
    pub mode_error: f64,
    pub mode_iterations: usize,
    pub state_fidelity: f64,
    pub raw_rdm_fidelity: f64,
    pub d_rdm_fidelity: f64,
    pub q_rdm_fidelity: f64,
    pub g_rdm_fidelity: f64,
    pub mode_rdm_fidelity: f64,
    pub raw_rdm_distance: f64,
    pub d_rdm_distance: f64,
    pub q_rdm_distance: f64,
    pub g_rdm_distance: f64,
    pub mode_rdm_distance: f64,
    pub trace_1rdm: f64,
    pub trace_2rdm: f64,
}

pub const RECORD_COLUMNS: [&str; 33] = [
    "geometry",
    "channel",
    "rate",
    "repetition",
    "fci_energy",
    "raw_energy",
    "raw_error",
    "d_energy",
    "d_error",
    "q_energy",
    "q_error",
    "g_energy",
    "g_error",
    "best_kind",
    "best_energy",
    "best_error",
    "mode",
    "mode_energy",
    "mode_error",
    "mode_iterations",
    "state_fidelity",
    "raw_rdm_fidelity",
    "d_rdm_fidelity",
    "q_rdm_fidelity",
    "g_rdm_fidelity",
    "mode_rdm_fidelity",
    "raw_rdm_distance",
    "d_rdm_distance",
    "q_rdm_distance",
    "g_rdm_distance",
    "mode_rdm_distance",
    "trace_1rdm",
    "trace_2rdm",
];

impl ExperimentRecord {
    pub fn kind_energy(&self, kind: ProjectionKind) -> f64 {
        match kind {
            ProjectionKind::D => self.d_energy,
            ProjectionKind::Q => self.q_energy,
            ProjectionKind::G => self.g_energy,
        }
    }
}

/// A prepared geometry: Hamiltonian, exact ground state and its 2-RDM.
#[derive(Clone, Debug)]
pub struct Reference {
    pub point: GeometryPoint,
    pub fci_energy: f64,
    pub state: crate::state::StateVector,
    pub density: DensityMatrix,
    pub two_rdm: TwoRdm,
    pub measurement: RdmMeasurement,
}

impl Reference {
    pub fn new(point: GeometryPoint) -> Result<Self> {
        let h = &point.hamiltonian;
        let n = h.n_spin_orbitals();
        let op = h.to_qubit_operator();
        let (fci_energy, state) = ground_state_in_sector(&op, n, h.n_electrons())?;
        let density = DensityMatrix::from_pure(&state);
        let measurement = RdmMeasurement::new(n)?;
        let (_, two_rdm) = assemble(&measurement.exact(&density), n)?;
        Ok(Self {
            point,
            fci_energy,
            state,
            density,
            two_rdm,
            measurement,
        })
    }
}

/// Mixes a base seed with the task coordinates so every (geometry, channel,
/// rate) draws from its own streams.
fn task_seed(seed: u64, geometry: usize, channel: usize, rate: usize) -> u64 {
    let mut z = seed;
    for x in [geometry as u64, channel as u64, rate as u64] {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(x);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

struct Task<'a> {
    reference: &'a Reference,
    geometry: usize,
    channel: ChannelKind,
    channel_index: usize,
    rate: f64,
    rate_index: usize,
}

fn run_task(task: &Task<'_>, cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    let reference = task.reference;
    let h = &reference.point.hamiltonian;
    let n = h.n_spin_orbitals();
    let label = &reference.point.label;
    let context = |e: Error| match e {
        Error::Consistency(m) => Error::Consistency(format!("{label}: {m}")),
        Error::Domain(m) => Error::Domain(format!("{label}: {m}")),
        other => other,
    };

    let channel = NoiseChannel::with_time(task.channel, task.rate, cfg.time)?;
    let rho = apply_channel(&reference.density, &channel);
    let state_fidelity = fidelity(&rho, &reference.state)?;
    let plan = build_plan_with(&reference.measurement.words(), cfg.grouping);
    let shots = ShotConfig::new(
        cfg.shots,
        cfg.repetitions,
        task_seed(cfg.seed, task.geometry, task.channel_index, task.rate_index),
    )?;
    let expectations = measure_all(&rho, &plan, &shots).map_err(context)?;

    expectations
        .par_iter()
        .enumerate()
        .map(|(rep, exp)| -> Result<ExperimentRecord> {
            let values = reference.measurement.evaluate(exp)?;
            let (d1, d2) = assemble(&values, n)?;
            let (d1, d2) = if cfg.real_rdms { (d1.real_part(), d2.real_part()) } else { (d1, d2) };
            let raw_energy = energy(h, &d1, &d2)?;
            let [pd, pq, pg] = all_projections(&d2, &d1, h).map_err(context)?;
            let best = select_best([pd.clone(), pq.clone(), pg.clone()]);
            let mode_outcome: ProjectionOutcome = match cfg.projection {
                ProjectionMode::D => pd.clone(),
                ProjectionMode::Q => pq.clone(),
                ProjectionMode::G => pg.clone(),
                ProjectionMode::Best => best.clone(),
                ProjectionMode::Series => {
                    alternating_sequence(&d2, &d1, h, &cfg.series_order, &cfg.projection_config)
                        .map_err(context)?
                }
                ProjectionMode::Partial => {
                    partial_projection_iterate(&d2, &d1, h, &cfg.projection_config).map_err(context)?
                }
            };
            let fci = reference.fci_energy;
            let exact = &reference.two_rdm;
            Ok(ExperimentRecord {
                geometry: label.clone(),
                channel: task.channel,
                rate: task.rate,
                repetition: rep as u32,
                fci_energy: fci,
                raw_energy,
                raw_error: raw_energy - fci,
                d_energy: pd.energy,
                d_error: pd.energy - fci,
                q_energy: pq.energy,
                q_error: pq.energy - fci,
                g_energy: pg.energy,
                g_error: pg.energy - fci,
                best_kind: best.kind,
                best_energy: best.energy,
                best_error: best.energy - fci,
                mode: cfg.projection,
                mode_energy: mode_outcome.energy,
                mode_error: mode_outcome.energy - fci,
                mode_iterations: mode_outcome.iterations,
                state_fidelity,
                raw_rdm_fidelity: rdm_fidelity(&d2, exact),
                d_rdm_fidelity: rdm_fidelity(&pd.two_rdm, exact),
                q_rdm_fidelity: rdm_fidelity(&pq.two_rdm, exact),
                g_rdm_fidelity: rdm_fidelity(&pg.two_rdm, exact),
                mode_rdm_fidelity: rdm_fidelity(&mode_outcome.two_rdm, exact),
                raw_rdm_distance: d2.frobenius_distance(exact),
                d_rdm_distance: pd.two_rdm.frobenius_distance(exact),
                q_rdm_distance: pq.two_rdm.frobenius_distance(exact),
                g_rdm_distance: pg.two_rdm.frobenius_distance(exact),
                mode_rdm_distance: mode_outcome.two_rdm.frobenius_distance(exact),
                trace_1rdm: d1.trace(),
                trace_2rdm: d2.trace(),
            })
        })
        .collect()
}

/// Runs the sweep over already prepared references.
pub fn run_references(references: &[Reference], cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    cfg.validate()?;
    let mut tasks = Vec::new();
    for (gi, reference) in references.iter().enumerate() {
        for (ci, &channel) in cfg.channels.iter().enumerate() {
            for (ri, &rate) in cfg.rates.iter().enumerate() {
                tasks.push(Task {
                    reference,
                    geometry: gi,
                    channel,
                    channel_index: ci,
                    rate,
                    rate_index: ri,
                });
            }
        }
    }
    // Tasks are collected in sweep order, so the flattened output is already
    // canonical regardless of scheduling.
    let chunks: Vec<Vec<ExperimentRecord>> = tasks
        .par_iter()
        .map(|t| run_task(t, cfg))
        .collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

/// Loads the manifest, prepares every geometry and runs the sweep.
pub fn run(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    cfg.validate()?;
    let points = load_sweep(&cfg.manifest)?;
    let references: Vec<Reference> = points
        .into_par_iter()
        .map(Reference::new)
        .collect::<Result<_>>()?;
    run_references(&references, cfg)
}

/// Per (geometry, channel, rate) statistics over repetitions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub geometry: String,
    pub channel: ChannelKind,
    pub rate: f64,
    pub repetitions: usize,
    pub fci_energy: f64,
    pub raw_mean_error: f64,
    pub raw_variance: Option<f64>,
    pub d_mean_error: f64,
    pub d_variance: Option<f64>,
    pub q_mean_error: f64,
    pub q_variance: Option<f64>,
    pub g_mean_error: f64,
    pub g_variance: Option<f64>,
    pub best_mean_error: f64,
    pub best_variance: Option<f64>,
    pub mode_mean_error: f64,
    pub mode_variance: Option<f64>,
    pub mean_state_fidelity: f64,
    pub mean_mode_rdm_fidelity: f64,
    pub best_d: usize,
    pub best_q: usize,
    pub best_g: usize,
}

pub const SUMMARY_COLUMNS: [&str; 22] = [
    "geometry",
    "channel",
    "rate",
    "repetitions",
    "fci_energy",
    "raw_mean_error",
    "raw_variance",
    "d_mean_error",
    "d_variance",
    "q_mean_error",
    "q_variance",
    "g_mean_error",
    "g_variance",
    "best_mean_error",
    "best_variance",
    "mode_mean_error",
    "mode_variance",
    "mean_state_fidelity",
    "mean_mode_rdm_fidelity",
    "best_d",
    "best_q",
    "best_g",
];

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance; `None` for fewer than two samples.
pub fn sample_variance(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs);
    Some(xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64)
}

/// Groups records by (geometry, channel, rate) in order of first appearance.
pub fn summarize(records: &[ExperimentRecord]) -> Vec<SummaryRow> {
    let mut groups: Vec<Vec<&ExperimentRecord>> = Vec::new();
    for r in records {
        let found = groups.iter_mut().find(|g| {
            let f = g[0];
            f.geometry == r.geometry && f.channel == r.channel && f.rate.to_bits() == r.rate.to_bits()
        });
        match found {
            Some(g) => g.push(r),
            None => groups.push(vec![r]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let col = |f: fn(&ExperimentRecord) -> f64| -> Vec<f64> { g.iter().map(|r| f(r)).collect() };
            let raw = col(|r| r.raw_energy);
            let d = col(|r| r.d_energy);
            let q = col(|r| r.q_energy);
            let gg = col(|r| r.g_energy);
            let best = col(|r| r.best_energy);
            let mode = col(|r| r.mode_energy);
            let count = |k: ProjectionKind| g.iter().filter(|r| r.best_kind == k).count();
            SummaryRow {
                geometry: g[0].geometry.clone(),
                channel: g[0].channel,
                rate: g[0].rate,
                repetitions: g.len(),
                fci_energy: g[0].fci_energy,
                raw_mean_error: mean(&col(|r| r.raw_error)),
                raw_variance: sample_variance(&raw),
                d_mean_error: mean(&col(|r| r.d_error)),
                d_variance: sample_variance(&d),
                q_mean_error: mean(&col(|r| r.q_error)),
                q_variance: sample_variance(&q),
                g_mean_error: mean(&col(|r| r.g_error)),
                g_variance: sample_variance(&gg),
                best_mean_error: mean(&col(|r| r.best_error)),
                best_variance: sample_variance(&best),
                mode_mean_error: mean(&col(|r| r.mode_error)),
                mode_variance: sample_variance(&mode),
                mean_state_fidelity: mean(&col(|r| r.state_fidelity)),
                mean_mode_rdm_fidelity: mean(&col(|r| r.mode_rdm_fidelity)),
                best_d: count(ProjectionKind::D),
                best_q: count(ProjectionKind::Q),
                best_g: count(ProjectionKind::G),
            }
        })
        .collect()
}

fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

#[derive(Serialize)]
struct RunManifest<'a> {
    crate_name: &'static str,
    crate_version: &'static str,
    config: &'a ExperimentConfig,
    records: usize,
    record_columns: &'a [&'a str],
    summary_columns: &'a [&'a str],
}

pub const RECORDS_FILE: &str = "records.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const MANIFEST_FILE: &str = "run-manifest.json";

/// Writes `records.csv`, `summary.csv` and `run-manifest.json` into `dir`.
pub fn emit(records: &[ExperimentRecord], summary: &[SummaryRow], cfg: &ExperimentConfig, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_csv(&dir.join(RECORDS_FILE), &RECORD_COLUMNS, records)?;
    write_csv(&dir.join(SUMMARY_FILE), &SUMMARY_COLUMNS, summary)?;
    let manifest = RunManifest {
        crate_name: env!("CARGO_PKG_NAME"),
        crate_version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        records: records.len(),
        record_columns: &RECORD_COLUMNS,
        summary_columns: &SUMMARY_COLUMNS,
    };
    let path = dir.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<ExperimentRecord>> {
    read_csv(path)
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    read_csv(path)
}
