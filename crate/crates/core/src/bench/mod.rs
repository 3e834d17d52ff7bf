//! Benchmark scenarios, trial records and the comparison protocol.

pub mod metrics;

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::knowledge::{infer_from_scene, KnowledgeError};
use crate::planners::{plan, Mode, PlanError, PlannerConfig, PlannerKind};
use crate::world::scene::SceneError;
use crate::world::{parse_scene, Scene};

pub use metrics::{power, power_rotational, power_translational};

pub const SCENARIOS: [&str; 3] = ["holonomic", "car", "arm"];

const HOLONOMIC: &str = include_str!("../../scenes/holonomic.toml");
const CAR: &str = include_str!("../../scenes/car.toml");
const ARM: &str = include_str!("../../scenes/arm.toml");

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("unknown scenario '{0}' (expected holonomic, car or arm)")]
    UnknownScenario(String),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Knowledge(#[from] KnowledgeError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error("cannot write {path}: {reason}")]
    Output { path: String, reason: String },
}

/// Text of a shipped scenario scene.
pub fn scenario_source(name: &str) -> Result<&'static str, BenchError> {
    match name {
        "holonomic" => Ok(HOLONOMIC),
        "car" => Ok(CAR),
        "arm" => Ok(ARM),
        _ => Err(BenchError::UnknownScenario(name.to_string())),
    }
}

pub fn scenario_scene(name: &str) -> Result<Scene, BenchError> {
    Ok(parse_scene(scenario_source(name)?)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub scenario: String,
    pub planner: PlannerKind,
    pub mode: Mode,
    pub seed: u64,
    pub success: bool,
    pub planning_time_s: f64,
    pub power_w: Option<f64>,
    pub path_duration_s: Option<f64>,
    pub contacts: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub scenario: String,
    pub planner: PlannerKind,
    pub mode: Mode,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub power_mean: Option<f64>,
    pub power_std: Option<f64>,
    pub time_mean: Option<f64>,
    pub time_std: Option<f64>,
}

fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (Some(mean), Some(var.sqrt()))
}

/// Mean and population standard deviation of power (successful trials) and
/// planning time (all trials), plus the success fraction.
pub fn aggregate(scenario: &str, planner: PlannerKind, mode: Mode, records: &[TrialRecord]) -> Aggregate {
    let powers: Vec<f64> = records.iter().filter_map(|r| r.power_w).collect();
    let times: Vec<f64> = records.iter().map(|r| r.planning_time_s).collect();
    let successes = records.iter().filter(|r| r.success).count();
    let (power_mean, power_std) = mean_std(&powers);
    let (time_mean, time_std) = mean_std(&times);
    Aggregate {
        scenario: scenario.to_string(),
        planner,
        mode,
        trials: records.len(),
        successes,
        success_rate: if records.is_empty() {
            0.0
        } else {
            successes as f64 / records.len() as f64
        },
        power_mean,
        power_std,
        time_mean,
        time_std,
    }
}

/// Runs one planning query; timing covers the search only.
pub fn run_trial(scenario: &str, scene: &Scene, cfg: &PlannerConfig) -> Result<TrialRecord, BenchError> {
    let km = infer_from_scene(scene, cfg.sim.gravity)?;
    let outcome = plan(scene, &km, cfg)?;
    let path = outcome.path.as_ref();
    Ok(TrialRecord {
        scenario: scenario.to_string(),
        planner: cfg.kind,
        mode: cfg.mode,
        seed: cfg.seed,
        success: path.is_some(),
        planning_time_s: outcome.planning_time,
        power_w: path.map(|p| p.power),
        path_duration_s: path.map(|p| p.duration),
        contacts: path.map(|p| p.contacts),
    })
}

/// `trials` independent runs with seeds `base_seed..base_seed + trials`.
/// `template` supplies every other planner setting.
pub fn run_benchmark(
    scenario: &str,
    planner: PlannerKind,
    mode: Mode,
    trials: usize,
    t_max: f64,
    base_seed: u64,
    template: &PlannerConfig,
) -> Result<(Vec<TrialRecord>, Aggregate), BenchError> {
    let scene = scenario_scene(scenario)?;
    run_benchmark_on(scenario, &scene, planner, mode, trials, t_max, base_seed, template)
}

/// [`run_benchmark`] on an already loaded scene, recorded under `label`.
#[allow(clippy::too_many_arguments)]
pub fn run_benchmark_on(
    label: &str,
    scene: &Scene,
    planner: PlannerKind,
    mode: Mode,
    trials: usize,
    t_max: f64,
    base_seed: u64,
    template: &PlannerConfig,
) -> Result<(Vec<TrialRecord>, Aggregate), BenchError> {
    let mut records = Vec::with_capacity(trials);
    for k in 0..trials {
        let cfg = PlannerConfig {
            kind: planner,
            mode,
            t_max,
            seed: base_seed + k as u64,
            ..template.clone()
        };
        records.push(run_trial(label, scene, &cfg)?);
    }
    let agg = aggregate(label, planner, mode, &records);
    Ok((records, agg))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

pub const CSV_HEADER: [&str; 9] = [
    "scenario",
    "planner",
    "mode",
    "seed",
    "success",
    "planning_time_s",
    "power_w",
    "path_duration_s",
    "contacts",
];

/// Orders records by mode label, then seed (scenario and planner break the
/// remaining ties).
pub fn sort_records(records: &mut [TrialRecord]) {
    records.sort_by(|a, b| {
        (a.mode.label(), a.seed, &a.scenario, a.planner).cmp(&(b.mode.label(), b.seed, &b.scenario, b.planner))
    });
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn records_to_csv(records: &[TrialRecord]) -> String {
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in &sorted {
        w.write_record([
            r.scenario.clone(),
            r.planner.to_string(),
            r.mode.to_string(),
            r.seed.to_string(),
            r.success.to_string(),
            r.planning_time_s.to_string(),
            opt(r.power_w),
            opt(r.path_duration_s),
            opt(r.contacts),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

/// Parses a CSV produced by [`records_to_csv`].
pub fn records_from_csv(text: &str) -> Result<Vec<TrialRecord>, String> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rd.headers().map_err(|e| e.to_string())?.iter().map(String::from).collect();
    if header != CSV_HEADER {
        return Err(format!("unexpected header {header:?}"));
    }
    let parse_opt = |s: &str| -> Result<Option<f64>, String> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|e: std::num::ParseFloatError| e.to_string())
        }
    };
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row.map_err(|e| e.to_string())?;
        let f = |i: usize| row.get(i).unwrap_or("");
        out.push(TrialRecord {
            scenario: f(0).to_string(),
            planner: f(1).parse()?,
            mode: f(2).parse()?,
            seed: f(3).parse().map_err(|e: std::num::ParseIntError| e.to_string())?,
            success: f(4).parse().map_err(|e: std::str::ParseBoolError| e.to_string())?,
            planning_time_s: f(5).parse().map_err(|e: std::num::ParseFloatError| e.to_string())?,
            power_w: parse_opt(f(6))?,
            path_duration_s: parse_opt(f(7))?,
            contacts: if f(8).is_empty() {
                None
            } else {
                Some(f(8).parse().map_err(|e: std::num::ParseIntError| e.to_string())?)
            },
        });
    }
    Ok(out)
}

#[derive(Serialize)]
struct JsonReport<'a> {
    records: Vec<TrialRecord>,
    aggregates: &'a [Aggregate],
}

/// Writes records as CSV, or records plus aggregates as JSON.
pub fn emit_results(
    records: &[TrialRecord],
    aggregates: &[Aggregate],
    format: OutputFormat,
    path: impl AsRef<Path>,
) -> Result<(), BenchError> {
    let text = match format {
        OutputFormat::Csv => records_to_csv(records),
        OutputFormat::Json => {
            let mut sorted = records.to_vec();
            sort_records(&mut sorted);
            serde_json::to_string_pretty(&JsonReport {
                records: sorted,
                aggregates,
            })
            .expect("records serialise")
        }
    };
    let p = path.as_ref();
    fs::write(p, text).map_err(|e| BenchError::Output {
        path: p.display().to_string(),
        reason: e.to_string(),
    })
}
