use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sitmp::bench::{records_to_csv, run_batch_with, sample_query, BatchParams, BatchSummary};
use sitmp::environment::{generate_random_env, DensityClass, GeneratorParams, Scenario};
use sitmp::planner::{check_trajectory, plan, PlanLog, PlanRequest, PlanStatus, PlannerConfig, CHECK_DT};

#[derive(Parser)]
#[command(name = "sitmp", version, about = "Safe-interval trajectory planning among moving obstacles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan the query stored in a scenario file and write a log.
    Plan {
        scenario: PathBuf,
        /// Log destination; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the planner seed from the scenario.
        #[arg(long)]
        seed: Option<u64>,
        /// Record wall-clock stage timings (makes the log non-reproducible).
        #[arg(long)]
        timings: bool,
        /// Also write the roadmap as JSON.
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Run randomized trials and write records and a summary.
    Bench {
        /// sparse, moderate, dense or all.
        #[arg(long, default_value = "all")]
        class: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory for records.csv and summary.json.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        timings: bool,
    },
    /// Re-check the chosen trajectory of a log against its scenario.
    Verify {
        log: PathBuf,
        #[arg(long, default_value_t = CHECK_DT)]
        dt: f64,
    },
    /// Generate a random scenario with a sampled query.
    Gen {
        #[arg(long, default_value = "moderate")]
        class: DensityClass,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Plan { scenario, out, seed, timings, graph } => cmd_plan(&scenario, out.as_deref(), seed, timings, graph.as_deref()),
        Command::Bench { class, trials, seed, out, timings } => cmd_bench(&class, trials, seed, out.as_deref(), timings),
        Command::Verify { log, dt } => cmd_verify(&log, dt),
        Command::Gen { class, seed, out } => cmd_gen(class, seed, &out),
    }
}

fn cmd_plan(path: &Path, out: Option<&Path>, seed: Option<u64>, timings: bool, graph: Option<&Path>) -> Result<ExitCode> {
    let scenario = Scenario::load(path).with_context(|| format!("reading {}", path.display()))?;
    let env = scenario.to_env()?;
    let Some((start, goal)) = scenario.query() else {
        bail!("{} has no start and goal", path.display());
    };
    let mut config = scenario.config.clone().unwrap_or_default();
    if let Some(s) = seed {
        config.seed = s;
    }
    config.record_timings = timings;
    let req = PlanRequest::new(&env, start, goal).with_config(config);
    let result = plan(&req)?;
    if let (Some(p), Some(g)) = (graph, result.roadmap.as_ref()) {
        std::fs::write(p, g.to_json()?).with_context(|| format!("writing {}", p.display()))?;
    }
    let status = result.status;
    let text = PlanLog::new(&req, result).to_json()?;
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    eprintln!("status: {}", status_name(status));
    Ok(if status == PlanStatus::Success { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn status_name(s: PlanStatus) -> &'static str {
    match s {
        PlanStatus::Success => "success",
        PlanStatus::FrontEndFail => "front_end_fail",
        PlanStatus::BackEndFail => "back_end_fail",
    }
}

fn cmd_bench(class: &str, trials: usize, seed: u64, out: Option<&Path>, timings: bool) -> Result<ExitCode> {
    let classes: Vec<DensityClass> = if class == "all" { DensityClass::ALL.to_vec() } else { vec![class.parse()?] };
    let mut all_records = Vec::new();
    let mut summaries: Vec<BatchSummary> = Vec::new();
    for c in classes {
        let mut params = BatchParams::new(c, trials, seed);
        params.planner.record_timings = timings;
        let (records, summary) = run_batch_with(&params)?;
        eprintln!(
            "{c}: success {}/{} ({:.1}%), oracle failures {}, control cost ratio {:.3}",
            summary.successes,
            summary.trials,
            100.0 * summary.success_rate,
            summary.oracle_failures,
            summary.control_cost_ratio
        );
        all_records.extend(records);
        summaries.push(summary);
    }
    let csv = records_to_csv(&all_records);
    let summary_json = serde_json::to_string_pretty(&summaries)? + "\n";
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            std::fs::write(dir.join("records.csv"), csv)?;
            std::fs::write(dir.join("summary.json"), summary_json)?;
        }
        None => {
            print!("{csv}");
            print!("{summary_json}");
        }
    }
    let oracle_failures: usize = summaries.iter().map(|s| s.oracle_failures).sum();
    Ok(if oracle_failures == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_verify(path: &Path, dt: f64) -> Result<ExitCode> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let log = PlanLog::from_json(&text)?;
    let env = log.scenario.to_env()?;
    let bounds = log.scenario.config.clone().unwrap_or_default().bounds;
    let Some(traj) = log.result.best_trajectory() else {
        println!("no trajectory to verify (status {})", status_name(log.result.status));
        return Ok(ExitCode::SUCCESS);
    };
    match check_trajectory(traj, &env, &bounds, dt)? {
        None => {
            println!("clean");
            Ok(ExitCode::SUCCESS)
        }
        Some(v) => {
            println!("violation at t={:.3}: {:?}", v.time, v.kind);
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_gen(class: DensityClass, seed: u64, out: &Path) -> Result<ExitCode> {
    let env = generate_random_env(&GeneratorParams::new(class), seed)?;
    let config = PlannerConfig { seed, ..PlannerConfig::default() };
    let q = BatchParams::new(class, 1, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (start, goal) =
        sample_query(&env, config.clearance_margin, q.min_separation, q.start_clear_for, q.query_attempts, &mut rng)?;
    let mut scenario = Scenario::from_env(&env).with_query(start, goal);
    scenario.config = Some(config);
    scenario.save(out).with_context(|| format!("writing {}", out.display()))?;
    Ok(ExitCode::SUCCESS)
}
