use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use kpmp_core::bench::{self, emit_results, run_benchmark_on, OutputFormat, SCENARIOS};
use kpmp_core::knowledge::infer_from_scene;
use kpmp_core::physics::SimConfig;
use kpmp_core::planners::{audit_path, control_magnitudes, plan, replay, Mode, PathFile, PlannerConfig, PlannerKind};
use kpmp_core::world::{load_scene, Scene};

#[derive(Parser)]
#[command(name = "kpmp", version, about = "Knowledge-guided physics-based kinodynamic planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a single planning query.
    Plan(PlanArgs),
    /// Run the kappa-vs-plain comparison.
    Bench(BenchArgs),
    /// Re-simulate a saved path and report its metrics.
    Replay(ReplayArgs),
    /// Print the inferred manipulation knowledge as JSON.
    DumpKm(DumpArgs),
}

#[derive(Args, Clone)]
struct SimArgs {
    /// Substep length, s.
    #[arg(long)]
    dt: Option<f64>,
    /// Length of one control step, s.
    #[arg(long)]
    control_duration: Option<f64>,
    #[arg(long)]
    gravity: Option<f64>,
}

impl SimArgs {
    fn config(&self) -> SimConfig {
        let mut sim = SimConfig::default();
        if let Some(dt) = self.dt {
            sim.dt = dt;
        }
        if let Some(c) = self.control_duration {
            sim.control_duration = c;
        }
        if let Some(g) = self.gravity {
            sim.gravity = g;
        }
        sim
    }
}

#[derive(Args)]
struct PlanArgs {
    /// Scene file, or one of the built-in scenarios (holonomic, car, arm).
    #[arg(long)]
    scene: String,
    #[arg(long, default_value = "rrt")]
    planner: PlannerKind,
    #[arg(long, default_value = "kappa")]
    mode: Mode,
    /// Wall-clock budget, s.
    #[arg(long, default_value_t = 150.0)]
    tmax: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Where to write the solution path (JSON).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record the instantiated knowledge at every iteration.
    #[arg(long)]
    log_kappa: bool,
    /// Where the kappa log goes when --log-kappa is set.
    #[arg(long, default_value = "kappa_log.json")]
    kappa_out: PathBuf,
    /// Sample contact-phase forces uniformly instead of inside the push cone.
    #[arg(long)]
    no_push_bias: bool,
    /// Print one line per path segment.
    #[arg(long)]
    verbose: bool,
    #[command(flatten)]
    sim: SimArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct BenchArgs {
    /// Scenario names or scene files; all built-in scenarios when omitted.
    #[arg(long, num_args = 1..)]
    scene: Vec<String>,
    /// Planners to compare; both when omitted.
    #[arg(long, num_args = 1..)]
    planner: Vec<PlannerKind>,
    /// Modes to compare; all three when omitted.
    #[arg(long, num_args = 1..)]
    mode: Vec<Mode>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 150.0)]
    tmax: f64,
    /// First seed; trial k uses seed + k.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    no_push_bias: bool,
    #[command(flatten)]
    sim: SimArgs,
}

#[derive(Args)]
struct ReplayArgs {
    #[arg(long)]
    scene: String,
    /// Path file written by `plan --out`.
    #[arg(long)]
    path: PathBuf,
    /// Also check contact-phase forces and region-only contacts.
    #[arg(long)]
    audit: bool,
}

#[derive(Args)]
struct DumpArgs {
    #[arg(long)]
    scene: String,
    #[arg(long)]
    gravity: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn resolve_scene(arg: &str) -> Result<(String, Scene)> {
    if Path::new(arg).is_file() {
        let scene = load_scene(arg).with_context(|| format!("loading {arg}"))?;
        return Ok((scene.name.clone(), scene));
    }
    if SCENARIOS.contains(&arg) {
        return Ok((arg.to_string(), bench::scenario_scene(arg)?));
    }
    bail!("'{arg}' is neither a scene file nor a scenario (holonomic, car, arm)")
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

/// Returns whether a path was found.
fn run_plan(a: PlanArgs) -> Result<bool> {
    let (_, scene) = resolve_scene(&a.scene)?;
    let cfg = PlannerConfig {
        kind: a.planner,
        mode: a.mode,
        t_max: a.tmax,
        seed: a.seed,
        alpha: a.alpha,
        max_iterations: a.max_iterations,
        push_bias: !a.no_push_bias,
        log_kappa: a.log_kappa,
        sim: a.sim.config(),
        ..PlannerConfig::default()
    };
    cfg.validate()?;
    let km = infer_from_scene(&scene, cfg.sim.gravity)?;
    let outcome = plan(&scene, &km, &cfg)?;
    if a.log_kappa {
        let text = serde_json::to_string_pretty(&outcome.kappa_log)?;
        write_out(Some(&a.kappa_out), &text)?;
    }
    match &outcome.path {
        Some(path) => {
            println!(
                "solved in {:.3} s ({} iterations, {} nodes): {} segments, {:.3} s, power {:.4} W, {} contacts",
                outcome.planning_time,
                outcome.iterations,
                outcome.tree.len(),
                path.segments.len(),
                path.duration,
                path.power,
                path.contacts
            );
            if a.verbose {
                for (i, seg) in path.segments.iter().enumerate() {
                    let loc = seg.location.as_ref().map_or("-".to_string(), |l| format!("{l:?}"));
                    let mags: Vec<String> = control_magnitudes(&seg.control).iter().map(|m| format!("{m:.3}")).collect();
                    println!(
                        "{i:>4} steps {:>2} power {:>10.2} contacts {} |u| [{}] {loc}",
                        seg.steps,
                        seg.power_increment,
                        seg.contacts,
                        mags.join(", ")
                    );
                }
            }
            if let Some(out) = &a.out {
                PathFile::new(&scene, &cfg, path).write(out)?;
            }
            Ok(true)
        }
        None => {
            println!(
                "no path within {:.3} s ({} iterations, {} nodes)",
                outcome.planning_time,
                outcome.iterations,
                outcome.tree.len()
            );
            Ok(false)
        }
    }
}

fn run_bench(a: BenchArgs) -> Result<()> {
    let scenes = if a.scene.is_empty() {
        SCENARIOS.iter().map(|s| s.to_string()).collect()
    } else {
        a.scene.clone()
    };
    let planners = if a.planner.is_empty() {
        vec![PlannerKind::Rrt, PlannerKind::Kpiece]
    } else {
        a.planner.clone()
    };
    let modes = if a.mode.is_empty() { Mode::ALL.to_vec() } else { a.mode.clone() };
    let template = PlannerConfig {
        alpha: a.alpha,
        push_bias: !a.no_push_bias,
        sim: a.sim.config(),
        t_max: a.tmax,
        ..PlannerConfig::default()
    };
    template.validate()?;
    let scenes = scenes.iter().map(|s| resolve_scene(s)).collect::<Result<Vec<_>>>()?;
    let mut records = Vec::new();
    let mut aggregates = Vec::new();
    for (name, scene) in &scenes {
        for &planner in &planners {
            for &mode in &modes {
                let (rec, agg) = run_benchmark_on(name, scene, planner, mode, a.trials, a.tmax, a.seed, &template)?;
                let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4}"));
                println!(
                    "{name:<10} {planner:<7} {mode:<10} success {}/{}  power {} ± {}  time {} ± {}",
                    agg.successes,
                    agg.trials,
                    fmt(agg.power_mean),
                    fmt(agg.power_std),
                    fmt(agg.time_mean),
                    fmt(agg.time_std)
                );
                records.extend(rec);
                aggregates.push(agg);
            }
        }
    }
    let format = match a.format {
        Format::Csv => OutputFormat::Csv,
        Format::Json => OutputFormat::Json,
    };
    emit_results(&records, &aggregates, format, &a.out)?;
    Ok(())
}

fn run_replay(a: ReplayArgs) -> Result<()> {
    let (_, scene) = resolve_scene(&a.scene)?;
    let path = PathFile::read(&a.path)?;
    let result = replay(&scene, &path, &path.sim)?;
    println!(
        "replayed {} segments: power {:.4} W (recorded {:.4} W), {} contacts",
        path.segments.len(),
        result.power,
        path.power,
        result.contacts
    );
    if a.audit {
        let km = infer_from_scene(&scene, path.sim.gravity)?;
        let report = audit_path(&scene, &km, &path, &path.sim);
        println!(
            "audit: {} contact segments, {} contact events, {} violations",
            report.contact_segments,
            report.events_checked,
            report.violations.len()
        );
        for v in &report.violations {
            println!("  {v}");
        }
        if !report.passed() {
            bail!("audit failed");
        }
    }
    Ok(())
}

fn run_dump(a: DumpArgs) -> Result<()> {
    let (_, scene) = resolve_scene(&a.scene)?;
    let g = a.gravity.unwrap_or(SimConfig::default().gravity);
    let km = infer_from_scene(&scene, g)?;
    write_out(a.out.as_deref(), &serde_json::to_string_pretty(&km)?)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Plan(a) => run_plan(a).map(|solved| if solved { 0 } else { 2 }),
        Command::Bench(a) => run_bench(a).map(|_| 0),
        Command::Replay(a) => run_replay(a).map(|_| 0),
        Command::DumpKm(a) => run_dump(a).map(|_| 0),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
