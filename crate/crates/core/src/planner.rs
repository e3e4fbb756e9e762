//! End-to-end planning: roadmap, distinct timed paths, corridors, optimized
//! splines and selection, plus the dense trajectory check used to accept a
//! result.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bench::control_cost_integral;
use crate::bspline::{fit_initial, UniformBSpline};
use crate::corridor::{inflate_corridor, CorridorParams, STCuboid};
use crate::environment::{Environment, Scenario};
use crate::kinematics::DynamicBounds;
use crate::optimizer::{optimize, select_best, CostWeights, OptimizedTrajectory, SolverParams};
use crate::roadmap::{extract_timed_paths, grow_graph, RoadmapGraph, RoadmapParams, VertexKind};
use crate::utvd::{check_equiv, TimedPath};
use crate::{Error, Result, Vec3};

pub const LOG_SCHEMA: &str = "sitmp-log/1";

/// Sweep step used to accept a trajectory.
pub const CHECK_DT: f64 = 0.01;

/// Slack on the per-axis velocity and acceleration bounds in
/// [`check_trajectory`].
pub const BOUND_SLACK: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    pub seed: u64,
    pub bounds: DynamicBounds,
    pub roadmap: RoadmapParams,
    /// Extra sampling rounds, each of `roadmap.max_samples`, tried when the
    /// graph yields no schedulable path.
    pub extra_graph_rounds: usize,
    /// Most distinct candidate paths optimized.
    pub k_max: usize,
    /// Raw paths drawn from the graph before removing equivalent ones.
    pub path_pool: usize,
    pub vertex_cap: usize,
    pub expansion_cap: usize,
    pub corridor: CorridorParams,
    pub weights: CostWeights,
    pub solver: SolverParams,
    /// Preferred knot span; shortened for brief paths.
    pub knot_span: f64,
    /// Added to the robot radius for everything but the final check.
    pub clearance_margin: f64,
    /// Record wall-clock stage timings. Off by default so that results and
    /// logs are reproducible byte for byte.
    #[serde(default)]
    pub record_timings: bool,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            bounds: DynamicBounds::default(),
            roadmap: RoadmapParams::default(),
            extra_graph_rounds: 5,
            k_max: 8,
            path_pool: 32,
            vertex_cap: 20,
            expansion_cap: 20_000,
            corridor: CorridorParams::default(),
            weights: CostWeights::default(),
            solver: SolverParams::default(),
            knot_span: 0.25,
            clearance_margin: 0.05,
            record_timings: false,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<()> {
        self.weights.validate()?;
        self.solver.validate()?;
        if self.k_max == 0 || self.path_pool < self.k_max || self.vertex_cap < 2 {
            return Err(Error::Config("need k_max >= 1, path_pool >= k_max and vertex_cap >= 2".into()));
        }
        if !(self.knot_span > 0.0) || !(self.clearance_margin >= 0.0) {
            return Err(Error::Config("knot span must be positive and clearance margin nonnegative".into()));
        }
        if !(self.roadmap.p_uniform >= 0.0 && self.roadmap.p_uniform <= 1.0) || self.roadmap.utvd_samples < 2 {
            return Err(Error::Config("p_uniform must lie in [0, 1] and utvd_samples be at least 2".into()));
        }
        Ok(())
    }
}

pub struct PlanRequest<'a> {
    pub env: &'a Environment,
    pub start: Vec3,
    pub goal: Vec3,
    pub config: PlannerConfig,
}

impl<'a> PlanRequest<'a> {
    pub fn new(env: &'a Environment, start: Vec3, goal: Vec3) -> Self {
        Self { env, start, goal, config: PlannerConfig::default() }
    }

    pub fn with_config(mut self, config: PlannerConfig) -> Self {
        self.config = config;
        self
    }

    /// The request as a self-contained scenario.
    pub fn to_scenario(&self) -> Scenario {
        let mut s = Scenario::from_env(self.env).with_query(self.start, self.goal);
        s.config = Some(self.config.clone());
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanStatus {
    Success,
    FrontEndFail,
    BackEndFail,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViolationKind {
    /// Robot sphere overlaps an occupied cell or leaves the grid.
    Static,
    Dynamic { obstacle: usize },
    Velocity { axis: usize },
    Acceleration { axis: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub time: f64,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GraphSummary {
    pub vertices: usize,
    pub guards: usize,
    pub connectors: usize,
    pub edges: usize,
    pub samples: usize,
}

impl GraphSummary {
    fn of(g: &RoadmapGraph) -> Self {
        Self {
            vertices: g.vertices().len(),
            guards: g.count(VertexKind::Guard),
            connectors: g.count(VertexKind::Connector),
            edges: g.edges().len(),
            samples: g.samples_drawn(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StageTimings {
    pub front_end_ms: f64,
    pub back_end_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    /// Roadmap vertex ids from start to goal.
    pub vertex_ids: Vec<usize>,
    pub timed_path: TimedPath,
    pub corridor: Vec<STCuboid>,
    pub initial: Option<UniformBSpline>,
    pub optimized: Option<OptimizedTrajectory>,
    /// First problem found by the dense check, if any.
    pub violation: Option<Violation>,
    pub verified: bool,
    /// Stage failure that stopped this candidate.
    pub error: Option<String>,
    pub back_end_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanMetrics {
    pub path_length: f64,
    pub flight_time: f64,
    /// Integral of squared jerk of the chosen trajectory.
    pub control_cost: f64,
    /// Same integral for the spline fitted to the chosen path before
    /// optimization.
    pub initial_control_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    pub status: PlanStatus,
    /// Index into `candidates`.
    pub best: Option<usize>,
    pub candidates: Vec<Candidate>,
    pub graph: GraphSummary,
    pub metrics: Option<PlanMetrics>,
    pub timings: StageTimings,
    pub message: Option<String>,
    #[serde(skip)]
    pub roadmap: Option<RoadmapGraph>,
}

impl PlanResult {
    fn failure(status: PlanStatus, message: String) -> Self {
        Self {
            status,
            best: None,
            candidates: Vec::new(),
            graph: GraphSummary::default(),
            metrics: None,
            timings: StageTimings::default(),
            message: Some(message),
            roadmap: None,
        }
    }

    pub fn best_trajectory(&self) -> Option<&UniformBSpline> {
        let c = &self.candidates[self.best?];
        c.optimized.as_ref().map(|o| &o.spline)
    }
}

/// Stored plan: the request it answers and the result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanLog {
    pub schema: String,
    pub scenario: Scenario,
    pub result: PlanResult,
}

impl PlanLog {
    pub fn new(req: &PlanRequest, result: PlanResult) -> Self {
        Self { schema: LOG_SCHEMA.into(), scenario: req.to_scenario(), result }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text)?;
        match v.get("schema").and_then(|s| s.as_str()) {
            Some(LOG_SCHEMA) => Ok(serde_json::from_value(v)?),
            other => Err(Error::Format(format!("expected schema {LOG_SCHEMA:?}, found {other:?}"))),
        }
    }
}

fn elapsed_ms(since: Instant, record: bool) -> f64 {
    if record {
        since.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    }
}

/// Plans from `req.start` to `req.goal`. Invalid configuration is an error;
/// every planning failure is reported through the status.
pub fn plan(req: &PlanRequest) -> Result<PlanResult> {
    let cfg = &req.config;
    cfg.validate()?;
    let began = Instant::now();
    let env = req.env;
    if (req.start - req.goal).norm() <= 1e-9 {
        return Ok(PlanResult::failure(PlanStatus::FrontEndFail, "start and goal coincide".into()));
    }
    for (name, p) in [("start", &req.start), ("goal", &req.goal)] {
        if !env.is_statically_free(p) {
            return Ok(PlanResult::failure(PlanStatus::FrontEndFail, format!("{name} {p:?} is not statically free")));
        }
    }
    // Plan with extra clearance when the query allows it.
    let inflated = env.with_robot_radius(env.robot_radius() + cfg.clearance_margin)?;
    let plan_env = if inflated.is_statically_free(&req.start) && inflated.is_statically_free(&req.goal) {
        &inflated
    } else {
        env
    };

    let mut graph = match RoadmapGraph::new(plan_env, req.start, req.goal, cfg.bounds, cfg.seed) {
        Ok(g) => g,
        Err(e) => return Ok(PlanResult::failure(PlanStatus::FrontEndFail, e.to_string())),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let t0 = env.horizon().lo;
    let mut paths = Vec::new();
    for _ in 0..=cfg.extra_graph_rounds {
        grow_graph(&mut graph, plan_env, &cfg.roadmap, &mut rng)?;
        paths = distinct_timed_paths(&graph, plan_env, cfg, t0)?;
        if !paths.is_empty() {
            break;
        }
    }
    let front_end_ms = elapsed_ms(began, cfg.record_timings);
    let summary = GraphSummary::of(&graph);
    if paths.is_empty() {
        let mut r = PlanResult::failure(PlanStatus::FrontEndFail, "no schedulable path in the roadmap".into());
        r.graph = summary;
        r.timings = StageTimings { front_end_ms, back_end_ms: 0.0, total_ms: elapsed_ms(began, cfg.record_timings) };
        r.roadmap = Some(graph);
        return Ok(r);
    }

    let back_began = Instant::now();
    let candidates: Vec<Candidate> = paths
        .into_par_iter()
        .map(|(ids, tp)| back_end(ids, tp, env, plan_env, cfg))
        .collect();
    let optimized: Vec<OptimizedTrajectory> = candidates
        .iter()
        .map(|c| c.optimized.clone().unwrap_or_else(|| placeholder(&c.timed_path)))
        .collect();
    let verified: Vec<bool> = candidates.iter().map(|c| c.verified && c.optimized.is_some()).collect();
    let best = select_best(&optimized, &verified);
    let back_end_ms = elapsed_ms(back_began, cfg.record_timings);

    let metrics = best.map(|i| {
        let c = &candidates[i];
        let s = &c.optimized.as_ref().expect("verified candidates are optimized").spline;
        PlanMetrics {
            path_length: arc_length(s),
            flight_time: s.duration(),
            control_cost: control_cost_integral(s),
            initial_control_cost: c.initial.as_ref().map(control_cost_integral).unwrap_or(f64::NAN),
        }
    });
    let status = if best.is_some() { PlanStatus::Success } else { PlanStatus::BackEndFail };
    Ok(PlanResult {
        status,
        best,
        candidates,
        graph: summary,
        metrics,
        timings: StageTimings { front_end_ms, back_end_ms, total_ms: elapsed_ms(began, cfg.record_timings) },
        message: None,
        roadmap: Some(graph),
    })
}

/// Stand-in for a candidate that never reached optimization; never
/// selected since it is not verified.
fn placeholder(tp: &TimedPath) -> OptimizedTrajectory {
    let spline = UniformBSpline::new(vec![tp.vertices[0]; 4], 1.0, tp.start_time()).expect("valid stand-in");
    OptimizedTrajectory {
        spline,
        costs: Default::default(),
        converged: false,
        iterations: 0,
        refinements: 0,
        bound_excess: 0.0,
    }
}

/// Schedulable start-goal paths, keeping only the first of each class.
fn distinct_timed_paths(
    graph: &RoadmapGraph,
    env: &Environment,
    cfg: &PlannerConfig,
    t0: f64,
) -> Result<Vec<(Vec<usize>, TimedPath)>> {
    let mut out: Vec<(Vec<usize>, TimedPath)> = Vec::new();
    for (ids, tp) in extract_timed_paths(graph, cfg.path_pool, cfg.vertex_cap, cfg.expansion_cap, t0) {
        if out.len() >= cfg.k_max {
            break;
        }
        let mut fresh = true;
        for (_, other) in &out {
            if check_equiv(&tp, other, env, cfg.roadmap.utvd_samples)? {
                fresh = false;
                break;
            }
        }
        if fresh {
            out.push((ids, tp));
        }
    }
    Ok(out)
}

fn back_end(ids: Vec<usize>, tp: TimedPath, env: &Environment, plan_env: &Environment, cfg: &PlannerConfig) -> Candidate {
    let began = Instant::now();
    let mut c = Candidate {
        vertex_ids: ids,
        timed_path: tp,
        corridor: Vec::new(),
        initial: None,
        optimized: None,
        violation: None,
        verified: false,
        error: None,
        back_end_ms: 0.0,
    };
    if let Err(e) = run_back_end(&mut c, env, plan_env, cfg) {
        c.error = Some(e.to_string());
    }
    c.back_end_ms = elapsed_ms(began, cfg.record_timings);
    c
}

fn run_back_end(c: &mut Candidate, env: &Environment, plan_env: &Environment, cfg: &PlannerConfig) -> Result<()> {
    c.corridor = inflate_corridor(&c.timed_path, plan_env, &cfg.corridor)?;
    let t_s = cfg.knot_span.min(c.timed_path.duration() / 4.0);
    let initial = fit_initial(&c.timed_path, t_s)?;
    c.initial = Some(initial.clone());
    let weights = CostWeights { bounds: cfg.bounds, ..cfg.weights.clone() };
    let opt = optimize(&initial, &c.corridor, plan_env, &weights, &cfg.solver)?;
    c.violation = check_trajectory(&opt.spline, env, &cfg.bounds, CHECK_DT)?;
    c.verified = c.violation.is_none() && opt.converged;
    c.optimized = Some(opt);
    Ok(())
}

/// Polyline length of the spline sampled at [`CHECK_DT`].
pub fn arc_length(s: &UniformBSpline) -> f64 {
    let steps = (s.duration() / CHECK_DT).ceil().max(1.0) as usize;
    let mut prev = s.evaluate(s.t0(), 0).expect("in range");
    let mut total = 0.0;
    for k in 1..=steps {
        let t = (s.t0() + k as f64 * CHECK_DT).min(s.end_time());
        let p = s.evaluate(t, 0).expect("in range");
        total += (p - prev).norm();
        prev = p;
    }
    total
}

/// Sweeps the trajectory every `dt` seconds, including its end, and returns
/// the earliest violation of static clearance, obstacle clearance or the
/// per-axis bounds (with [`BOUND_SLACK`]).
pub fn check_trajectory(s: &UniformBSpline, env: &Environment, bounds: &DynamicBounds, dt: f64) -> Result<Option<Violation>> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("time step {dt} must be positive")));
    }
    let steps = (s.duration() / dt).ceil() as usize;
    for k in 0..=steps {
        let t = (s.t0() + k as f64 * dt).min(s.end_time());
        if let Some(kind) = violation_at(s, env, bounds, t)? {
            return Ok(Some(Violation { time: t, kind }));
        }
    }
    Ok(None)
}

fn violation_at(s: &UniformBSpline, env: &Environment, bounds: &DynamicBounds, t: f64) -> Result<Option<ViolationKind>> {
    let p = s.evaluate(t, 0)?;
    if !env.grid().contains(&p) || !env.is_statically_free(&p) {
        return Ok(Some(ViolationKind::Static));
    }
    let r = env.robot_radius();
    if let Some(i) = env.obstacles().iter().position(|o| o.inflated_distance(&p, t, r) <= 1.0) {
        return Ok(Some(ViolationKind::Dynamic { obstacle: i }));
    }
    let v = s.evaluate(t, 1)?;
    if let Some(axis) = (0..3).find(|&a| v[a].abs() > bounds.v_max + BOUND_SLACK) {
        return Ok(Some(ViolationKind::Velocity { axis }));
    }
    let a = s.evaluate(t, 2)?;
    if let Some(axis) = (0..3).find(|&i| a[i].abs() > bounds.a_max + BOUND_SLACK) {
        return Ok(Some(ViolationKind::Acceleration { axis }));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{MovingObstacle, StaticGrid, TimeInterval};
    use crate::poly::Polynomial;

    fn open_world(obstacles: Vec<MovingObstacle>) -> Environment {
        let grid = StaticGrid::empty(Vec3::zeros(), 0.2, [50, 25, 15]).unwrap();
        Environment::new(grid, obstacles, TimeInterval::raw(0.0, 30.0), 0.2).unwrap()
    }

    fn hover(p: Vec3) -> UniformBSpline {
        UniformBSpline::new(vec![p; 8], 0.5, 0.0).unwrap()
    }

    #[test]
    fn hovering_in_free_space_is_clean() {
        let env = open_world(vec![]);
        let s = hover(Vec3::new(3.0, 2.0, 1.0));
        assert_eq!(check_trajectory(&s, &env, &DynamicBounds::default(), 0.01).unwrap(), None);
        assert!(check_trajectory(&s, &env, &DynamicBounds::default(), 0.0).is_err());
    }

    #[test]
    fn crossing_obstacle_is_reported_when_it_arrives() {
        // Mover along y through (3, 2, 1), reaching contact distance at
        // y = 2 - (0.3 + 0.2) = 1.5, i.e. t = 1.5 s.
        let o = MovingObstacle::new(
            Vec3::repeat(0.3),
            [Polynomial::constant(3.0), Polynomial::new(vec![0.0, 1.0]), Polynomial::constant(1.0)],
            TimeInterval::raw(0.0, 30.0),
        )
        .unwrap();
        let env = open_world(vec![o]);
        let v = check_trajectory(&hover(Vec3::new(3.0, 2.0, 1.0)), &env, &DynamicBounds::default(), 0.01)
            .unwrap()
            .unwrap();
        assert_eq!(v.kind, ViolationKind::Dynamic { obstacle: 0 });
        assert!((v.time - 1.5).abs() <= 0.01 + 1e-9, "{}", v.time);
    }

    #[test]
    fn overspeed_is_reported() {
        let env = open_world(vec![]);
        let ctrl: Vec<Vec3> = (0..8).map(|i| Vec3::new(1.0 + 1.5 * i as f64, 2.0, 1.0)).collect();
        let s = UniformBSpline::new(ctrl, 0.5, 0.0).unwrap();
        let v = check_trajectory(&s, &env, &DynamicBounds::default(), 0.01).unwrap().unwrap();
        assert_eq!(v.kind, ViolationKind::Velocity { axis: 0 });
        assert_eq!(v.time, 0.0);
    }

    #[test]
    fn empty_world_plan_is_nearly_straight() {
        let env = open_world(vec![]);
        let (a, b) = (Vec3::new(1.0, 2.5, 1.5), Vec3::new(8.0, 2.5, 1.5));
        let r = plan(&PlanRequest::new(&env, a, b)).unwrap();
        assert_eq!(r.status, PlanStatus::Success);
        let c = &r.candidates[r.best.unwrap()];
        let o = c.optimized.as_ref().unwrap();
        assert_eq!(o.costs.dynamic_obstacles, 0.0);
        assert_eq!(o.costs.corridor, 0.0);
        let m = r.metrics.unwrap();
        assert!(m.path_length < 1.02 * (b - a).norm(), "{}", m.path_length);
    }

    #[test]
    fn goal_in_a_wall_fails_in_front_end() {
        let mut occ = vec![false; 50 * 25 * 15];
        occ[40 + 50 * (12 + 25 * 7)] = true;
        let grid = StaticGrid::new(Vec3::zeros(), 0.2, [50, 25, 15], occ).unwrap();
        let env = Environment::new(grid, vec![], TimeInterval::raw(0.0, 30.0), 0.2).unwrap();
        let r = plan(&PlanRequest::new(&env, Vec3::new(1.0, 2.5, 1.5), Vec3::new(8.1, 2.5, 1.5))).unwrap();
        assert_eq!(r.status, PlanStatus::FrontEndFail);
    }

    #[test]
    fn log_round_trips() {
        let env = open_world(vec![]);
        let req = PlanRequest::new(&env, Vec3::new(1.0, 2.5, 1.5), Vec3::new(8.0, 2.5, 1.5));
        let log = PlanLog::new(&req, plan(&req).unwrap());
        let text = log.to_json().unwrap();
        let back = PlanLog::from_json(&text).unwrap();
        assert_eq!(back.to_json().unwrap(), text);
        assert!(matches!(PlanLog::from_json("{\"schema\":\"other\"}"), Err(Error::Format(_))));
    }
}
