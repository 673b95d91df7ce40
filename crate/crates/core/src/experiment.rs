//! Seeded benchmark harness: repeated runs, relative-error summaries, CSV
//! and JSON output, and baseline comparisons.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{eval_count_audit, AnsatzSpec, EvalAudit};
use crate::cost::CostFunction;
use crate::error::{Error, Result};
use crate::models::{
    fermi_hubbard_hamiltonian, infidelity_observable, load_hamiltonian_file, load_meta,
    tfim_hamiltonian, FermiHubbardParams, TargetState, TfimParams,
};
use crate::optimizer::{optimize, RunSettings};
use crate::pauli::{ground_energy, Shots};
use crate::trace::{OptimizerKind, RunTrace};
use crate::two_gate::{MinimizerSettings, PairingStrategy};

/// Which cost to minimize.
///
/// Text form: `tfim:<n>[:<J>:<h>]`, `fh[:<t>:<U>]`, `file:<path>`,
/// `fidelity:<n>`.
#[derive(Debug, Clone, PartialEq)]
pub enum CostSpec {
    Tfim(TfimParams),
    FermiHubbard(FermiHubbardParams),
    File(PathBuf),
    /// Infidelity to a Haar-random target drawn per run.
    Fidelity { n: usize },
}

impl CostSpec {
    pub fn is_fidelity(&self) -> bool {
        matches!(self, CostSpec::Fidelity { .. })
    }
}

impl fmt::Display for CostSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostSpec::Tfim(p) => write!(f, "tfim:{}:{}:{}", p.n, p.j, p.h),
            CostSpec::FermiHubbard(p) => write!(f, "fh:{}:{}", p.t, p.u),
            CostSpec::File(p) => write!(f, "file:{}", p.display()),
            CostSpec::Fidelity { n } => write!(f, "fidelity:{n}"),
        }
    }
}

fn parse_num<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::config(format!("invalid {what} {s:?} in cost spec")))
}

fn parse_finite(s: &str, what: &str) -> Result<f64> {
    let v: f64 = parse_num(s, what)?;
    if !v.is_finite() {
        return Err(Error::config(format!("{what} must be finite")));
    }
    Ok(v)
}

impl FromStr for CostSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        match head.trim().to_ascii_lowercase().as_str() {
            "tfim" => {
                let parts: Vec<&str> = rest.map(|r| r.split(':').collect()).unwrap_or_default();
                let (n, j, h) = match parts.as_slice() {
                    [n] => (parse_num(n, "qubit count")?, 0.5, 0.5),
                    [n, j, h] => (
                        parse_num(n, "qubit count")?,
                        parse_finite(j, "coupling")?,
                        parse_finite(h, "field")?,
                    ),
                    _ => return Err(Error::config(format!("expected tfim:<n>[:<J>:<h>], got {s:?}"))),
                };
                Ok(CostSpec::Tfim(TfimParams { n, j, h }))
            }
            "fh" | "fermi_hubbard" => {
                let parts: Vec<&str> = rest.map(|r| r.split(':').collect()).unwrap_or_default();
                match parts.as_slice() {
                    [] => Ok(CostSpec::FermiHubbard(FermiHubbardParams::default())),
                    [t, u] => Ok(CostSpec::FermiHubbard(FermiHubbardParams {
                        t: parse_finite(t, "hopping")?,
                        u: parse_finite(u, "interaction")?,
                    })),
                    _ => Err(Error::config(format!("expected fh[:<t>:<U>], got {s:?}"))),
                }
            }
            "file" => match rest {
                Some(p) if !p.trim().is_empty() => Ok(CostSpec::File(PathBuf::from(p.trim()))),
                _ => Err(Error::config("expected file:<path>")),
            },
            "fidelity" => match rest {
                Some(n) => Ok(CostSpec::Fidelity { n: parse_num(n, "qubit count")? }),
                None => Err(Error::config("expected fidelity:<n>")),
            },
            other => Err(Error::config(format!("unknown cost {other:?}"))),
        }
    }
}

impl Serialize for CostSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CostSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One experiment: `runs` independent optimizations with seeds
/// `seed, seed + 1, ..`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub cost: CostSpec,
    pub layers: usize,
    pub optimizer: OptimizerKind,
    #[serde(default)]
    pub strategy: Option<PairingStrategy>,
    pub iterations: usize,
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    /// Shots per Pauli term; absent for exact expectation values.
    #[serde(default)]
    pub shots: Option<u64>,
    #[serde(default)]
    pub minimizer: MinimizerSettings,
}

impl ExperimentConfig {
    pub fn new(cost: CostSpec, layers: usize, optimizer: OptimizerKind) -> Self {
        Self {
            cost,
            layers,
            optimizer,
            strategy: optimizer.is_two_gate().then_some(PairingStrategy::Random),
            iterations: 1,
            runs: 1,
            seed: 0,
            shots: None,
            minimizer: MinimizerSettings::default(),
        }
    }

    /// File stem for outputs: optimizer, plus the strategy for two-gate runs.
    pub fn label(&self) -> String {
        match self.strategy {
            Some(s) => format!("{}-{}", self.optimizer, s),
            None => self.optimizer.to_string(),
        }
    }

    pub fn shots(&self) -> Result<Shots> {
        self.shots.map_or(Ok(Shots::Exact), Shots::per_term)
    }

    pub fn settings(&self) -> Result<RunSettings> {
        Ok(RunSettings {
            optimizer: self.optimizer,
            strategy: self.strategy,
            iterations: self.iterations,
            shots: self.shots()?,
            minimizer: self.minimizer,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::config("runs must be at least 1"));
        }
        if self.minimizer.starts == 0 {
            return Err(Error::config("the minimizer needs at least one start"));
        }
        if self.cost.is_fidelity() && self.shots.is_some() {
            return Err(Error::config("the fidelity cost is only available in exact mode"));
        }
        self.shots()?;
        Ok(())
    }
}

/// Mean and standard error of the mean (the reported 68% band).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub stderr: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let stderr = if values.len() > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        Self { mean, stderr }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexedStat {
    pub index: usize,
    pub mean: f64,
    pub stderr: f64,
}

/// Per-run headline numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub run_id: usize,
    pub seed: u64,
    pub initial_cost: f64,
    pub final_cost: f64,
    pub final_relative_error: f64,
    pub audit: EvalAudit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    /// `relative_error` (`|E - E_g| / |E_g|`) or `infidelity`.
    pub metric: String,
    pub interval: String,
    pub ground_energy: Option<f64>,
    pub mean_final_relative_error: f64,
    pub stderr_final_relative_error: f64,
    pub mean_final_cost: f64,
    /// Index 0 is the initial point, then one entry per update.
    pub per_update: Vec<IndexedStat>,
    /// Index 0 is the initial point, then one entry per iteration.
    pub per_iteration: Vec<IndexedStat>,
    pub runs: Vec<RunSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub num_qubits: usize,
    pub ground_energy: Option<f64>,
    pub traces: Vec<RunTrace>,
    pub summary: Summary,
}

impl ExperimentResult {
    pub fn relative_error(&self, cost: f64) -> f64 {
        relative_error(cost, self.ground_energy)
    }
}

/// `|E - E_g| / |E_g|`, or the cost itself when there is no reference
/// energy (infidelity), or `|E - E_g|` when the reference is zero.
pub fn relative_error(cost: f64, ground: Option<f64>) -> f64 {
    match ground {
        Some(e) if e.abs() > 1e-12 => (cost - e).abs() / e.abs(),
        Some(e) => (cost - e).abs(),
        None => cost,
    }
}

/// `(baseline - candidate) / baseline`, in percent.
pub fn relative_improvement(baseline: f64, candidate: f64) -> f64 {
    (baseline - candidate) / baseline * 100.0
}

enum Prepared {
    Shared(CostFunction),
    PerRunTarget(usize),
}

fn prepare(cfg: &ExperimentConfig) -> Result<(Prepared, Option<f64>)> {
    let with_ground = |obs: crate::pauli::PauliObservable| -> Result<(Prepared, Option<f64>)> {
        let e = ground_energy(&obs)?;
        Ok((Prepared::Shared(CostFunction::Observable(obs)), Some(e)))
    };
    match &cfg.cost {
        CostSpec::Tfim(p) => with_ground(tfim_hamiltonian(p)?),
        CostSpec::FermiHubbard(p) => with_ground(fermi_hubbard_hamiltonian(p)?),
        CostSpec::File(path) => {
            let obs = load_hamiltonian_file(path)?;
            match load_meta(path)? {
                Some(meta) => {
                    if meta.qubits != obs.num_qubits() {
                        return Err(Error::Format {
                            path: crate::models::meta_path(path),
                            message: format!(
                                "metadata declares {} qubits, Hamiltonian has {}",
                                meta.qubits,
                                obs.num_qubits()
                            ),
                        });
                    }
                    Ok((Prepared::Shared(CostFunction::Observable(obs)), Some(meta.ground_energy)))
                }
                None => with_ground(obs),
            }
        }
        CostSpec::Fidelity { n } => Ok((Prepared::PerRunTarget(*n), None)),
    }
}

fn run_one(
    prepared: &Prepared,
    spec: &AnsatzSpec,
    settings: &RunSettings,
    run_id: usize,
    seed: u64,
) -> Result<RunTrace> {
    match prepared {
        Prepared::Shared(cost) => optimize(spec, cost, settings, run_id, seed).map(|r| r.1),
        Prepared::PerRunTarget(n) => {
            let cost = infidelity_observable(TargetState::haar_random(*n, seed)?);
            optimize(spec, &cost, settings, run_id, seed).map(|r| r.1)
        }
    }
}

/// Runs every seed (in parallel) and summarizes. Results are independent of
/// thread scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let (prepared, ground) = prepare(cfg)?;
    let n = match &prepared {
        Prepared::Shared(c) => c.num_qubits(),
        Prepared::PerRunTarget(n) => *n,
    };
    let spec = AnsatzSpec::new(n, cfg.layers)?;
    let settings = cfg.settings()?;
    settings.validate(&spec)?;
    let traces = (0..cfg.runs)
        .into_par_iter()
        .map(|i| run_one(&prepared, &spec, &settings, i, cfg.seed.wrapping_add(i as u64)))
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(&traces, ground);
    Ok(ExperimentResult {
        config: cfg.clone(),
        num_qubits: n,
        ground_energy: ground,
        traces,
        summary,
    })
}

pub fn summarize(traces: &[RunTrace], ground: Option<f64>) -> Summary {
    let err = |c: f64| relative_error(c, ground);
    let series = |f: &dyn Fn(&RunTrace) -> Vec<f64>| -> Vec<IndexedStat> {
        let all: Vec<Vec<f64>> = traces.iter().map(f).collect();
        let len = all.iter().map(Vec::len).min().unwrap_or(0);
        (0..len)
            .map(|i| {
                let s = Stat::of(&all.iter().map(|v| v[i]).collect::<Vec<_>>());
                IndexedStat { index: i, mean: s.mean, stderr: s.stderr }
            })
            .collect()
    };
    let per_update = series(&|t| {
        std::iter::once(t.initial_cost)
            .chain(t.records.iter().map(|r| r.cost))
            .map(err)
            .collect()
    });
    let per_iteration = series(&|t| {
        std::iter::once(t.initial_cost)
            .chain(t.iteration_costs.iter().copied())
            .map(err)
            .collect()
    });
    let finals: Vec<f64> = traces.iter().map(|t| err(t.final_cost())).collect();
    let fs = Stat::of(&finals);
    let costs: Vec<f64> = traces.iter().map(|t| t.final_cost()).collect();
    Summary {
        metric: if ground.is_some() { "relative_error" } else { "infidelity" }.into(),
        interval: "mean ± standard error of the mean".into(),
        ground_energy: ground,
        mean_final_relative_error: fs.mean,
        stderr_final_relative_error: fs.stderr,
        mean_final_cost: Stat::of(&costs).mean,
        per_update,
        per_iteration,
        runs: traces
            .iter()
            .map(|t| RunSummary {
                run_id: t.run_id,
                seed: t.seed,
                initial_cost: t.initial_cost,
                final_cost: t.final_cost(),
                final_relative_error: err(t.final_cost()),
                audit: eval_count_audit(t),
            })
            .collect(),
    }
}

/// One CSV data row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub run_id: usize,
    pub update_index: usize,
    pub cumulative_evals: u64,
    pub cost: f64,
    pub relative_error: f64,
    pub accepted: bool,
}

pub fn trace_rows(result: &ExperimentResult) -> Vec<TraceRow> {
    result
        .traces
        .iter()
        .flat_map(|t| {
            t.records.iter().map(move |r| TraceRow {
                run_id: t.run_id,
                update_index: r.update_index,
                cumulative_evals: r.cumulative_evals,
                cost: r.cost,
                relative_error: relative_error(r.cost, result.ground_energy),
                accepted: r.accepted,
            })
        })
        .collect()
}

pub fn write_csv<W: std::io::Write>(rows: &[TraceRow], w: W) -> std::result::Result<(), csv::Error> {
    let mut wr = csv::Writer::from_writer(w);
    if rows.is_empty() {
        wr.write_record(["run_id", "update_index", "cumulative_evals", "cost", "relative_error", "accepted"])?;
    }
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

/// One row per update: `run_id, update_index, cumulative_evals, cost,
/// relative_error, accepted`.
pub fn emit_csv(result: &ExperimentResult, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(&trace_rows(result), std::io::BufWriter::new(file)).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Parses CSV text written by [`emit_csv`].
pub fn parse_csv(text: &str) -> std::result::Result<Vec<TraceRow>, csv::Error> {
    csv::Reader::from_reader(text.as_bytes()).deserialize().collect()
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<TraceRow>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// The JSON document: configuration plus summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub label: String,
    pub config: ExperimentConfig,
    pub num_qubits: usize,
    pub summary: Summary,
}

pub fn result_document(result: &ExperimentResult) -> ResultDocument {
    ResultDocument {
        label: result.config.label(),
        config: result.config.clone(),
        num_qubits: result.num_qubits,
        summary: result.summary.clone(),
    }
}

pub fn emit_json(result: &ExperimentResult, path: impl AsRef<Path>) -> Result<()> {
    write_json(&result_document(result), path)
}

fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(value).expect("serializable");
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub fn read_result(path: impl AsRef<Path>) -> Result<ResultDocument> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Writes `<label>.csv` and `<label>.json` into `dir`.
pub fn write_outputs(result: &ExperimentResult, dir: impl AsRef<Path>) -> Result<(PathBuf, PathBuf)> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let label = result.config.label();
    let csv = dir.join(format!("{label}.csv"));
    let json = dir.join(format!("{label}.json"));
    emit_csv(result, &csv)?;
    emit_json(result, &json)?;
    Ok((csv, json))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateResult {
    pub strategy: Option<PairingStrategy>,
    pub mean_final_relative_error: f64,
    pub improvement_percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub optimizer: OptimizerKind,
    pub baseline: OptimizerKind,
    pub baseline_value: f64,
    pub candidates: Vec<CandidateResult>,
    pub best_strategy: Option<PairingStrategy>,
    pub best_improvement_percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub cost: String,
    pub layers: usize,
    pub shots: Option<u64>,
    pub metric: String,
    pub rows: Vec<CompareRow>,
}

/// Relative improvement of every two-gate result over its single-gate
/// baseline. All documents must share cost, depth and shot setting.
pub fn compare_report(docs: &[ResultDocument]) -> Result<CompareReport> {
    let first = docs
        .first()
        .ok_or_else(|| Error::config("nothing to compare"))?;
    for d in docs {
        let (a, b) = (&first.config, &d.config);
        if a.cost != b.cost || a.layers != b.layers || a.shots != b.shots {
            return Err(Error::config(format!(
                "cannot compare {} ({}, L={}) with {} ({}, L={})",
                first.label, a.cost, a.layers, d.label, b.cost, b.layers
            )));
        }
    }
    let mut rows = Vec::new();
    for opt in [OptimizerKind::Tgf, OptimizerKind::Tgfqs] {
        let base = opt.baseline();
        let Some(b) = docs.iter().find(|d| d.config.optimizer == base) else {
            continue;
        };
        let baseline_value = b.summary.mean_final_relative_error;
        let candidates: Vec<CandidateResult> = docs
            .iter()
            .filter(|d| d.config.optimizer == opt)
            .map(|d| CandidateResult {
                strategy: d.config.strategy,
                mean_final_relative_error: d.summary.mean_final_relative_error,
                improvement_percent: relative_improvement(
                    baseline_value,
                    d.summary.mean_final_relative_error,
                ),
            })
            .collect();
        let Some(best) = candidates
            .iter()
            .max_by(|x, y| x.improvement_percent.total_cmp(&y.improvement_percent))
        else {
            continue;
        };
        rows.push(CompareRow {
            optimizer: opt,
            baseline: base,
            baseline_value,
            best_strategy: best.strategy,
            best_improvement_percent: best.improvement_percent,
            candidates,
        });
    }
    Ok(CompareReport {
        cost: first.config.cost.to_string(),
        layers: first.config.layers,
        shots: first.config.shots,
        metric: first.summary.metric.clone(),
        rows,
    })
}

/// Collects result documents from files and directories (every `*.json`
/// directly inside).
pub fn collect_documents(inputs: &[PathBuf]) -> Result<Vec<ResultDocument>> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| Error::io(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "json"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    files.iter().map(read_result).collect()
}

pub fn write_report(report: &CompareReport, path: impl AsRef<Path>) -> Result<()> {
    write_json(report, path)
}
