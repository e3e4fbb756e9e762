//! Randomized trial batches and their summary statistics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bspline::{derivative_ctrl_points, UniformBSpline};
use crate::environment::{generate_random_env, DensityClass, Environment, GeneratorParams, TimeInterval};
use crate::intervals::region_free_during;
use crate::planner::{check_trajectory, plan, PlanRequest, PlanResult, PlanStatus, PlannerConfig};
use crate::{Error, Result, Vec3};

/// Trials sharing one generated world.
pub const TRIALS_PER_ENV: usize = 3;

/// Finer sweep used to re-check every reported success.
pub const ORACLE_DT: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    FrontEndFail,
    BackEndFail,
    /// The planner reported success but the independent re-check found a
    /// violation.
    OracleFail,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Success => "success",
            Outcome::FrontEndFail => "front_end_fail",
            Outcome::BackEndFail => "back_end_fail",
            Outcome::OracleFail => "oracle_fail",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    /// Seed of the generated world.
    pub env_seed: u64,
    /// Seed of the planner's sampler.
    pub plan_seed: u64,
    pub class: DensityClass,
    pub outcome: Outcome,
    pub front_end_ms: f64,
    pub total_ms: f64,
    /// Metrics of the chosen trajectory; NaN unless the trial succeeded.
    pub path_length: f64,
    pub flight_time: f64,
    pub control_cost: f64,
    pub initial_control_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchParams {
    pub class: DensityClass,
    pub n_trials: usize,
    pub base_seed: u64,
    pub min_separation: f64,
    /// Start must stay clear of moving obstacles this long.
    pub start_clear_for: f64,
    pub query_attempts: usize,
    pub generator: GeneratorParams,
    pub planner: PlannerConfig,
}

impl BatchParams {
    pub fn new(class: DensityClass, n_trials: usize, base_seed: u64) -> Self {
        Self {
            class,
            n_trials,
            base_seed,
            min_separation: 5.0,
            start_clear_for: 3.0,
            query_attempts: 10_000,
            generator: GeneratorParams::new(class),
            planner: PlannerConfig::default(),
        }
    }
}

/// Mean and median of one metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub median: f64,
}

impl Stat {
    /// NaN for an empty sample.
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self { mean: f64::NAN, median: f64::NAN };
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median = if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) };
        Self { mean: v.iter().sum::<f64>() / n as f64, median }
    }
}

/// Aggregates over a batch. Metric statistics cover successful trials only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub class: DensityClass,
    pub trials: usize,
    pub successes: usize,
    pub front_end_failures: usize,
    pub back_end_failures: usize,
    pub oracle_failures: usize,
    pub success_rate: f64,
    pub front_end_ms: Stat,
    pub total_ms: Stat,
    pub path_length: Stat,
    pub flight_time: Stat,
    pub control_cost: Stat,
    pub initial_control_cost: Stat,
    /// Mean optimized control cost over mean initial control cost.
    pub control_cost_ratio: f64,
}

impl BatchSummary {
    pub fn from_records(class: DensityClass, records: &[TrialRecord]) -> Self {
        let count = |o: Outcome| records.iter().filter(|r| r.outcome == o).count();
        let ok: Vec<&TrialRecord> = records.iter().filter(|r| r.outcome == Outcome::Success).collect();
        let stat = |f: fn(&TrialRecord) -> f64| Stat::of(&ok.iter().map(|r| f(r)).collect::<Vec<_>>());
        let control_cost = stat(|r| r.control_cost);
        let initial_control_cost = stat(|r| r.initial_control_cost);
        Self {
            class,
            trials: records.len(),
            successes: ok.len(),
            front_end_failures: count(Outcome::FrontEndFail),
            back_end_failures: count(Outcome::BackEndFail),
            oracle_failures: count(Outcome::OracleFail),
            success_rate: if records.is_empty() { f64::NAN } else { ok.len() as f64 / records.len() as f64 },
            front_end_ms: stat(|r| r.front_end_ms),
            total_ms: stat(|r| r.total_ms),
            path_length: stat(|r| r.path_length),
            flight_time: stat(|r| r.flight_time),
            control_cost,
            initial_control_cost,
            control_cost_ratio: control_cost.mean / initial_control_cost.mean,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Exact integral of squared jerk: jerk is constant on each knot span.
pub fn control_cost_integral(s: &UniformBSpline) -> f64 {
    let (_, _, j) = derivative_ctrl_points(s.ctrl_points(), s.t_s()).expect("splines have at least four control points");
    j.iter().map(|x| x.norm_squared()).sum::<f64>() * s.t_s()
}

/// SplitMix64 step, used to derive independent seeds from a base seed.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn derive_seed(base: u64, class: DensityClass, stream: u64, index: u64) -> u64 {
    let c = DensityClass::ALL.iter().position(|&k| k == class).unwrap_or(0) as u64;
    mix(mix(mix(base) ^ c) ^ stream) ^ mix(index)
}

/// Seed of the world used by `trial`.
pub fn env_seed(base: u64, class: DensityClass, trial: usize) -> u64 {
    derive_seed(base, class, 1, (trial / TRIALS_PER_ENV) as u64)
}

/// Draws a start and goal that are statically free for the robot grown by
/// `margin`, at least `min_separation` apart, with the start clear of moving
/// obstacles for `clear_for` seconds.
pub fn sample_query(
    env: &Environment,
    margin: f64,
    min_separation: f64,
    clear_for: f64,
    attempts: usize,
    rng: &mut impl Rng,
) -> Result<(Vec3, Vec3)> {
    let grown = env.with_robot_radius(env.robot_radius() + margin)?;
    let (lo, hi) = (env.grid().origin(), env.grid().upper());
    let r = grown.robot_radius();
    let draw = |rng: &mut dyn rand::RngCore| {
        Vec3::new(
            rng.gen_range(lo.x + r..hi.x - r),
            rng.gen_range(lo.y + r..hi.y - r),
            rng.gen_range(lo.z + r..hi.z - r),
        )
    };
    let h = env.horizon();
    let window = TimeInterval::new(h.lo, (h.lo + clear_for).min(h.hi))?;
    for _ in 0..attempts {
        let s = draw(rng);
        if !grown.is_statically_free(&s) || !region_free_during(&grown, &s, &s, &window)? {
            continue;
        }
        for _ in 0..attempts {
            let g = draw(rng);
            if (g - s).norm() >= min_separation && grown.is_statically_free(&g) {
                return Ok((s, g));
            }
        }
    }
    Err(Error::Input(format!("no valid start and goal found in {attempts} attempts")))
}

/// Runs one trial and re-checks a reported success at [`ORACLE_DT`].
pub fn run_trial(params: &BatchParams, env: &Environment, trial: usize) -> Result<(TrialRecord, PlanResult)> {
    let class = params.class;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(params.base_seed, class, 2, trial as u64));
    let (start, goal) = sample_query(
        env,
        params.planner.clearance_margin,
        params.min_separation,
        params.start_clear_for,
        params.query_attempts,
        &mut rng,
    )?;
    let plan_seed = derive_seed(params.base_seed, class, 3, trial as u64);
    let config = PlannerConfig { seed: plan_seed, ..params.planner.clone() };
    let result = plan(&PlanRequest::new(env, start, goal).with_config(config))?;
    let mut outcome = match result.status {
        PlanStatus::Success => Outcome::Success,
        PlanStatus::FrontEndFail => Outcome::FrontEndFail,
        PlanStatus::BackEndFail => Outcome::BackEndFail,
    };
    if let Some(s) = result.best_trajectory() {
        if check_trajectory(s, env, &params.planner.bounds, ORACLE_DT)?.is_some() {
            outcome = Outcome::OracleFail;
        }
    }
    let m = result.metrics;
    let pick = |f: fn(&crate::planner::PlanMetrics) -> f64| match (&m, outcome) {
        (Some(m), Outcome::Success) => f(m),
        _ => f64::NAN,
    };
    let record = TrialRecord {
        trial,
        env_seed: env_seed(params.base_seed, class, trial),
        plan_seed,
        class,
        outcome,
        front_end_ms: result.timings.front_end_ms,
        total_ms: result.timings.total_ms,
        path_length: pick(|m| m.path_length),
        flight_time: pick(|m| m.flight_time),
        control_cost: pick(|m| m.control_cost),
        initial_control_cost: pick(|m| m.initial_control_cost),
    };
    Ok((record, result))
}

/// Runs `params.n_trials` trials, regenerating the world every
/// [`TRIALS_PER_ENV`] trials, and keeps each trial's plan. Results come back
/// in trial order.
pub fn run_batch_results(params: &BatchParams) -> Result<Vec<(TrialRecord, PlanResult)>> {
    if params.n_trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    params.planner.validate()?;
    let groups = params.n_trials.div_ceil(TRIALS_PER_ENV);
    let per_group: Vec<Result<Vec<(TrialRecord, PlanResult)>>> = (0..groups)
        .into_par_iter()
        .map(|g| {
            let first = g * TRIALS_PER_ENV;
            let env = generate_random_env(&params.generator, env_seed(params.base_seed, params.class, first))?;
            (first..(first + TRIALS_PER_ENV).min(params.n_trials))
                .map(|trial| {
                    let (record, mut result) = run_trial(params, &env, trial)?;
                    result.roadmap = None;
                    Ok((record, result))
                })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(params.n_trials);
    for g in per_group {
        out.extend(g?);
    }
    out.sort_by_key(|(r, _)| r.trial);
    Ok(out)
}

/// Like [`run_batch_results`] but keeps only the records, plus their summary.
pub fn run_batch_with(params: &BatchParams) -> Result<(Vec<TrialRecord>, BatchSummary)> {
    let records: Vec<TrialRecord> = run_batch_results(params)?.into_iter().map(|(r, _)| r).collect();
    let summary = BatchSummary::from_records(params.class, &records);
    Ok((records, summary))
}

pub fn run_batch(class: DensityClass, n_trials: usize, base_seed: u64) -> Result<(Vec<TrialRecord>, BatchSummary)> {
    run_batch_with(&BatchParams::new(class, n_trials, base_seed))
}

pub const CSV_HEADER: &str =
    "trial,env_seed,plan_seed,class,outcome,front_end_ms,total_ms,path_length,flight_time,control_cost,initial_control_cost";

/// Records as comma-separated rows under [`CSV_HEADER`].
pub fn records_to_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.trial,
            r.env_seed,
            r.plan_seed,
            r.class,
            r.outcome.name(),
            r.front_end_ms,
            r.total_ms,
            r.path_length,
            r.flight_time,
            r.control_cost,
            r.initial_control_cost
        ));
    }
    out
}
