//! Dynamic connected visibility roadmap: guards and connectors joined by
//! edges that carry safe intervals, plus path extraction and earliest-arrival
//! scheduling.

use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::environment::{Environment, TimeInterval};
use crate::intervals::{edge_safe_intervals, region_safe_intervals, IntervalSet};
use crate::kinematics::{min_travel_time, DynamicBounds};
use crate::utvd::{check_equiv, TimedPath};
use crate::{Error, Result, Vec3};

pub const GRAPH_SCHEMA: &str = "sitmp-graph/1";

/// Cells per axis of the sampling partition (two octree levels).
const PARTITION: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    Guard,
    Connector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadmapVertex {
    pub position: Vec3,
    pub kind: VertexKind,
    /// Times at which the robot may hover at this vertex.
    pub si: IntervalSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadmapEdge {
    pub endpoints: [usize; 2],
    pub length: f64,
    pub si: IntervalSet,
    pub t_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadmapParams {
    pub max_samples: usize,
    /// Optional wall-clock cap in milliseconds. Leaving it unset keeps
    /// construction reproducible.
    #[serde(default)]
    pub time_budget_ms: Option<f64>,
    pub p_uniform: f64,
    pub utvd_samples: usize,
    /// Rejection attempts per draw to find a statically free sample.
    pub sample_attempts: usize,
    /// Guards farther than this are never visible from a sample.
    #[serde(default)]
    pub visibility_range: Option<f64>,
}

impl Default for RoadmapParams {
    fn default() -> Self {
        Self {
            max_samples: 1200,
            time_budget_ms: None,
            p_uniform: 0.5,
            utvd_samples: 30,
            sample_attempts: 100,
            visibility_range: Some(6.0),
        }
    }
}

/// What happened to one sample offered to the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleOutcome {
    Guard(usize),
    Connector(usize),
    Replaced(usize),
    /// Seen by exactly one guard or by three or more.
    WrongGuardCount,
    NoOverlap,
    /// Equivalent to an existing connector that is no longer.
    NotShorter,
    Blocked,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadmapGraph {
    vertices: Vec<RoadmapVertex>,
    edges: Vec<RoadmapEdge>,
    /// Per vertex: `(neighbor, edge id)`.
    adjacency: Vec<Vec<(usize, usize)>>,
    start: usize,
    goal: usize,
    bounds: DynamicBounds,
    rng_seed: u64,
    samples_drawn: usize,
}

impl RoadmapGraph {
    /// Graph holding only the start and goal guards.
    pub fn new(env: &Environment, x_s: Vec3, x_g: Vec3, bounds: DynamicBounds, rng_seed: u64) -> Result<Self> {
        for (name, p) in [("start", &x_s), ("goal", &x_g)] {
            if !env.is_statically_free(p) {
                return Err(Error::Input(format!("{name} {p:?} is in static collision")));
            }
        }
        let t0 = env.horizon().lo;
        if !env.is_point_free(&x_s, t0) {
            return Err(Error::Input(format!("start {x_s:?} is occupied by a moving obstacle at t={t0}")));
        }
        let mut g = Self {
            vertices: Vec::new(),
            edges: Vec::new(),
            adjacency: Vec::new(),
            start: 0,
            goal: 1,
            bounds,
            rng_seed,
            samples_drawn: 0,
        };
        g.push_vertex(env, x_s, VertexKind::Guard)?;
        g.push_vertex(env, x_g, VertexKind::Guard)?;
        Ok(g)
    }

    pub fn vertices(&self) -> &[RoadmapVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[RoadmapEdge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn goal(&self) -> usize {
        self.goal
    }

    pub fn bounds(&self) -> DynamicBounds {
        self.bounds
    }

    pub fn rng_seed(&self) -> u64 {
        self.rng_seed
    }

    pub fn samples_drawn(&self) -> usize {
        self.samples_drawn
    }

    pub fn count(&self, kind: VertexKind) -> usize {
        self.vertices.iter().filter(|v| v.kind == kind).count()
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<&RoadmapEdge> {
        self.adjacency[a].iter().find(|(n, _)| *n == b).map(|&(_, e)| &self.edges[e])
    }

    fn push_vertex(&mut self, env: &Environment, position: Vec3, kind: VertexKind) -> Result<usize> {
        let si = region_safe_intervals(env, &position, &position)?;
        self.vertices.push(RoadmapVertex { position, kind, si });
        self.adjacency.push(Vec::new());
        Ok(self.vertices.len() - 1)
    }

    fn push_edge(&mut self, a: usize, b: usize, si: IntervalSet) -> Result<()> {
        let length = (self.vertices[a].position - self.vertices[b].position).norm();
        let t_min = min_travel_time(length, &self.bounds)?;
        let id = self.edges.len();
        self.edges.push(RoadmapEdge { endpoints: [a, b], length, si, t_min });
        self.adjacency[a].push((b, id));
        self.adjacency[b].push((a, id));
        Ok(())
    }

    fn edge_intervals(&self, env: &Environment, a: &Vec3, b: &Vec3) -> Result<IntervalSet> {
        let t_min = min_travel_time((a - b).norm(), &self.bounds)?;
        edge_safe_intervals(env, a, b, t_min)
    }

    /// Guards with a statically free, sometimes-safe edge to `v`, stopping
    /// after the third since only zero or two matter.
    fn visible_guards(&self, env: &Environment, v: &Vec3, range: Option<f64>) -> Result<Vec<(usize, IntervalSet)>> {
        let mut found = Vec::new();
        for (id, g) in self.vertices.iter().enumerate() {
            if g.kind != VertexKind::Guard || range.is_some_and(|r| (g.position - v).norm() > r) {
                continue;
            }
            let si = self.edge_intervals(env, &g.position, v)?;
            if !si.is_empty() {
                found.push((id, si));
                if found.len() == 3 {
                    break;
                }
            }
        }
        Ok(found)
    }

    /// Offers one sample to the graph.
    pub fn insert_sample(&mut self, env: &Environment, v: Vec3, params: &RoadmapParams) -> Result<SampleOutcome> {
        if !env.is_statically_free(&v) {
            return Ok(SampleOutcome::Blocked);
        }
        let guards = self.visible_guards(env, &v, params.visibility_range)?;
        match guards.len() {
            0 => Ok(SampleOutcome::Guard(self.push_vertex(env, v, VertexKind::Guard)?)),
            2 => self.try_connect(env, v, &guards[0], &guards[1], params.utvd_samples),
            _ => Ok(SampleOutcome::WrongGuardCount),
        }
    }

    fn try_connect(
        &mut self,
        env: &Environment,
        v: Vec3,
        (g1, si1): &(usize, IntervalSet),
        (g2, si2): &(usize, IntervalSet),
        utvd_samples: usize,
    ) -> Result<SampleOutcome> {
        let (g1, g2) = (*g1, *g2);
        if si1.intersection(si2).is_empty() {
            return Ok(SampleOutcome::NoOverlap);
        }
        let p1 = self.vertices[g1].position;
        let p2 = self.vertices[g2].position;
        let v_si = region_safe_intervals(env, &v, &v)?;
        let t0 = env.horizon().lo;
        let forward = schedule(&[p1, v, p2], &self.vertices[g1].si, &[si1, si2], &self.bounds, t0);
        let reverse = schedule(&[p2, v, p1], &self.vertices[g2].si, &[si2, si1], &self.bounds, t0);
        let sq_len = (v - p1).norm_squared() + (v - p2).norm_squared();

        let shared: Vec<usize> = self.adjacency[g1]
            .iter()
            .map(|&(n, _)| n)
            .filter(|&n| self.vertices[n].kind == VertexKind::Connector && self.adjacency[n].iter().any(|&(m, _)| m == g2))
            .collect();
        for n in shared {
            let pn = self.vertices[n].position;
            let e1 = &self.edge_between(g1, n).expect("shared neighbor").si;
            let e2 = &self.edge_between(n, g2).expect("shared neighbor").si;
            let n_forward = schedule(&[p1, pn, p2], &self.vertices[g1].si, &[e1, e2], &self.bounds, t0);
            let n_reverse = schedule(&[p2, pn, p1], &self.vertices[g2].si, &[e2, e1], &self.bounds, t0);
            let same = equivalent(forward.as_ref(), n_forward.as_ref(), env, utvd_samples)?
                && equivalent(reverse.as_ref(), n_reverse.as_ref(), env, utvd_samples)?;
            if !same {
                continue;
            }
            let n_sq_len = (pn - p1).norm_squared() + (pn - p2).norm_squared();
            if sq_len >= n_sq_len {
                return Ok(SampleOutcome::NotShorter);
            }
            self.vertices[n].position = v;
            self.vertices[n].si = v_si;
            for (g, si) in [(g1, si1), (g2, si2)] {
                let e = self.adjacency[n].iter().find(|&&(m, _)| m == g).expect("shared neighbor").1;
                let edge = &mut self.edges[e];
                edge.length = (v - self.vertices[g].position).norm();
                edge.t_min = min_travel_time(edge.length, &self.bounds)?;
                edge.si = si.clone();
            }
            return Ok(SampleOutcome::Replaced(n));
        }
        self.vertices.push(RoadmapVertex { position: v, kind: VertexKind::Connector, si: v_si });
        self.adjacency.push(Vec::new());
        let c = self.vertices.len() - 1;
        self.push_edge(g1, c, si1.clone())?;
        self.push_edge(c, g2, si2.clone())?;
        Ok(SampleOutcome::Connector(c))
    }

    /// JSON dump for debugging and visualization.
    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Dump<'a> {
            schema: &'a str,
            start: usize,
            goal: usize,
            rng_seed: u64,
            samples_drawn: usize,
            vertices: &'a [RoadmapVertex],
            edges: &'a [RoadmapEdge],
        }
        let dump = Dump {
            schema: GRAPH_SCHEMA,
            start: self.start,
            goal: self.goal,
            rng_seed: self.rng_seed,
            samples_drawn: self.samples_drawn,
            vertices: &self.vertices,
            edges: &self.edges,
        };
        Ok(serde_json::to_string(&dump)? + "\n")
    }
}

/// Paths that cannot both be scheduled are never considered equivalent.
fn equivalent(a: Option<&TimedPath>, b: Option<&TimedPath>, env: &Environment, samples: usize) -> Result<bool> {
    match (a, b) {
        (Some(a), Some(b)) => check_equiv(a, b, env, samples),
        _ => Ok(false),
    }
}

/// Runs the sampling loop until the sample or time budget is spent.
pub fn build_graph(env: &Environment, x_s: Vec3, x_g: Vec3, bounds: &DynamicBounds, params: &RoadmapParams, seed: u64) -> Result<RoadmapGraph> {
    let mut graph = RoadmapGraph::new(env, x_s, x_g, *bounds, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    grow_graph(&mut graph, env, params, &mut rng)?;
    Ok(graph)
}

/// Offers `params.max_samples` more samples to an existing graph.
pub fn grow_graph(graph: &mut RoadmapGraph, env: &Environment, params: &RoadmapParams, rng: &mut ChaCha8Rng) -> Result<()> {
    let began = Instant::now();
    let deadline = params.time_budget_ms.map(|ms| Duration::from_secs_f64(ms.max(0.0) / 1000.0));
    let (lo, hi) = (env.grid().origin(), env.grid().upper());
    for _ in 0..params.max_samples {
        if deadline.is_some_and(|d| began.elapsed() >= d) {
            break;
        }
        let mut v = get_sample(graph, &lo, &hi, params.p_uniform, rng);
        for _ in 1..params.sample_attempts {
            if env.is_comfortably_free(&v) {
                break;
            }
            v = get_sample(graph, &lo, &hi, params.p_uniform, rng);
        }
        graph.samples_drawn += 1;
        graph.insert_sample(env, v, params)?;
    }
    Ok(())
}

/// Index of the partition cell holding `p`.
fn partition_cell(p: &Vec3, lo: &Vec3, hi: &Vec3) -> usize {
    let mut idx = [0usize; 3];
    for a in 0..3 {
        let f = (p[a] - lo[a]) / (hi[a] - lo[a]);
        idx[a] = ((f * PARTITION as f64).floor().max(0.0) as usize).min(PARTITION - 1);
    }
    idx[0] + PARTITION * (idx[1] + PARTITION * idx[2])
}

/// Draws a sample: uniform over `[lo, hi]` with probability `p_uniform`,
/// otherwise uniform inside the partition cell with the lowest
/// connector-to-guard ratio among cells holding guards.
pub fn get_sample(graph: &RoadmapGraph, lo: &Vec3, hi: &Vec3, p_uniform: f64, rng: &mut impl Rng) -> Vec3 {
    let uniform = rng.gen::<f64>() < p_uniform;
    let cell = if uniform { None } else { sparsest_cell(graph, lo, hi) };
    let (clo, chi) = match cell {
        None => (*lo, *hi),
        Some(c) => {
            let idx = [c % PARTITION, (c / PARTITION) % PARTITION, c / (PARTITION * PARTITION)];
            let step = (hi - lo) / PARTITION as f64;
            let clo = lo + Vec3::new(idx[0] as f64 * step.x, idx[1] as f64 * step.y, idx[2] as f64 * step.z);
            (clo, clo + step)
        }
    };
    Vec3::new(
        rng.gen_range(clo.x..chi.x),
        rng.gen_range(clo.y..chi.y),
        rng.gen_range(clo.z..chi.z),
    )
}

fn sparsest_cell(graph: &RoadmapGraph, lo: &Vec3, hi: &Vec3) -> Option<usize> {
    let n = PARTITION * PARTITION * PARTITION;
    let mut guards = vec![0usize; n];
    let mut connectors = vec![0usize; n];
    for v in graph.vertices() {
        let c = partition_cell(&v.position, lo, hi);
        match v.kind {
            VertexKind::Guard => guards[c] += 1,
            VertexKind::Connector => connectors[c] += 1,
        }
    }
    let mut best: Option<(usize, f64)> = None;
    for c in 0..n {
        if guards[c] == 0 {
            continue;
        }
        let ratio = connectors[c] as f64 / guards[c] as f64;
        if best.is_none_or(|(_, r)| ratio < r) {
            best = Some((c, ratio));
        }
    }
    best.map(|(c, _)| c)
}

/// Simple start-to-goal paths in depth-first order, exploring neighbors
/// closest to the goal first. At most `k_max` paths with at most
/// `vertex_cap` vertices each; the search stops after `expansion_cap`
/// vertex expansions.
pub fn extract_paths(graph: &RoadmapGraph, k_max: usize, vertex_cap: usize, expansion_cap: usize) -> Vec<Vec<usize>> {
    let mut search = PathSearch::new(graph, k_max, vertex_cap, expansion_cap);
    search.run(&mut |_| true);
    search.out
}

/// Like [`extract_paths`], but a branch is abandoned as soon as its prefix
/// has no schedule from `t0`, so only schedulable paths are returned, in
/// the same order, each with its earliest-arrival schedule.
///
/// A prefix is also abandoned when an earlier prefix reached the same
/// vertex with no more vertices, no later arrivals and no earlier interval
/// ends, and found no path from there.
pub fn extract_timed_paths(
    graph: &RoadmapGraph,
    k_max: usize,
    vertex_cap: usize,
    expansion_cap: usize,
    t0: f64,
) -> Vec<(Vec<usize>, TimedPath)> {
    let mut search = TimedSearch {
        graph,
        order: neighbor_order(graph),
        k_max,
        vertex_cap,
        expansion_cap,
        expansions: 0,
        t0,
        on_path: vec![false; graph.vertices().len()],
        dead_ends: vec![Vec::new(); graph.vertices().len()],
        rows: Vec::new(),
        out: Vec::new(),
    };
    if k_max > 0 {
        let start = graph.start();
        search.on_path[start] = true;
        search.dfs(&mut vec![start]);
    }
    search.out
}

/// Arrival labels at a vertex: end of the interval used to arrive and the
/// earliest arrival through it.
type Labels = Vec<(f64, f64)>;

struct TimedSearch<'a> {
    graph: &'a RoadmapGraph,
    order: Vec<Vec<usize>>,
    k_max: usize,
    vertex_cap: usize,
    expansion_cap: usize,
    expansions: usize,
    t0: f64,
    on_path: Vec<bool>,
    /// Per vertex: prefix lengths and labels whose subtrees held no path.
    dead_ends: Vec<Vec<(usize, Labels)>>,
    rows: Vec<Row>,
    out: Vec<(Vec<usize>, TimedPath)>,
}

impl TimedSearch<'_> {
    fn edge_si(&self, a: usize, b: usize) -> &IntervalSet {
        &self.graph.edge_between(a, b).expect("search follows edges").si
    }

    fn dfs(&mut self, path: &mut Vec<usize>) {
        let v = *path.last().expect("path starts nonempty");
        let g = self.graph;
        if v == g.goal() {
            let points: Vec<Vec3> = path.iter().map(|&u| g.vertices()[u].position).collect();
            let sis: Vec<&IntervalSet> = path.windows(2).map(|w| self.edge_si(w[0], w[1])).collect();
            if let Some(tp) = reconstruct(&points, &self.rows, &sis, &g.bounds(), self.t0) {
                self.out.push((path.clone(), tp));
            }
            return;
        }
        if path.len() >= self.vertex_cap || self.expansions >= self.expansion_cap {
            return;
        }
        self.expansions += 1;
        for k in 0..self.order[v].len() {
            if self.out.len() >= self.k_max {
                return;
            }
            let n = self.order[v][k];
            if self.on_path[n] {
                continue;
            }
            let si = self.edge_si(v, n);
            let t_min = travel_time(&g.vertices()[v].position, &g.vertices()[n].position, &g.bounds());
            let row = match self.rows.last() {
                None => first_row(&g.vertices()[v].si, si, t_min, self.t0),
                Some(prev) => next_row(prev, self.edge_si(path[path.len() - 2], v), si, t_min),
            };
            let labels: Labels = si
                .intervals()
                .iter()
                .zip(&row)
                .filter_map(|(iv, r)| r.map(|(a, _)| (iv.hi, a)))
                .collect();
            if labels.is_empty() || self.dominated(n, path.len() + 1, &labels) {
                continue;
            }
            let found = self.out.len();
            let expansions = self.expansions;
            self.rows.push(row);
            path.push(n);
            self.on_path[n] = true;
            self.dfs(path);
            self.on_path[n] = false;
            path.pop();
            self.rows.pop();
            let exhausted = self.expansions >= self.expansion_cap && self.expansions > expansions;
            if self.out.len() == found && !exhausted {
                self.dead_ends[n].push((path.len() + 1, labels));
            }
        }
    }

    fn dominated(&self, v: usize, len: usize, labels: &Labels) -> bool {
        self.dead_ends[v].iter().any(|(l, seen)| {
            *l <= len && labels.iter().all(|&(hi, a)| seen.iter().any(|&(h, b)| h >= hi && b <= a))
        })
    }
}

/// Neighbors of every vertex, closest to the goal first, ties by id.
fn neighbor_order(graph: &RoadmapGraph) -> Vec<Vec<usize>> {
    let goal_pos = graph.vertices()[graph.goal()].position;
    (0..graph.vertices().len())
        .map(|v| {
            let mut ns: Vec<usize> = graph.neighbors(v).iter().map(|&(n, _)| n).collect();
            ns.sort_by(|&a, &b| {
                let da = (graph.vertices()[a].position - goal_pos).norm();
                let db = (graph.vertices()[b].position - goal_pos).norm();
                da.total_cmp(&db).then(a.cmp(&b))
            });
            ns.dedup();
            ns
        })
        .collect()
}

/// Depth-first enumeration of simple start-goal paths.
struct PathSearch {
    order: Vec<Vec<usize>>,
    goal: usize,
    start: usize,
    k_max: usize,
    vertex_cap: usize,
    expansion_cap: usize,
    expansions: usize,
    on_path: Vec<bool>,
    out: Vec<Vec<usize>>,
}

impl PathSearch {
    fn new(graph: &RoadmapGraph, k_max: usize, vertex_cap: usize, expansion_cap: usize) -> Self {
        Self {
            order: neighbor_order(graph),
            goal: graph.goal(),
            start: graph.start(),
            k_max,
            vertex_cap,
            expansion_cap,
            expansions: 0,
            on_path: vec![false; graph.vertices().len()],
            out: Vec::new(),
        }
    }

    /// `accept` sees every prefix when it is extended and prunes it by
    /// returning false.
    fn run(&mut self, accept: &mut dyn FnMut(&[usize]) -> bool) {
        if self.k_max == 0 {
            return;
        }
        let mut path = vec![self.start];
        self.on_path[self.start] = true;
        self.dfs(&mut path, accept);
    }

    fn dfs(&mut self, path: &mut Vec<usize>, accept: &mut dyn FnMut(&[usize]) -> bool) {
        let v = *path.last().expect("path starts nonempty");
        if v == self.goal {
            self.out.push(path.clone());
            return;
        }
        if path.len() >= self.vertex_cap || self.expansions >= self.expansion_cap {
            return;
        }
        self.expansions += 1;
        for k in 0..self.order[v].len() {
            if self.out.len() >= self.k_max {
                return;
            }
            let n = self.order[v][k];
            if self.on_path[n] {
                continue;
            }
            path.push(n);
            if accept(path) {
                self.on_path[n] = true;
                self.dfs(path, accept);
                self.on_path[n] = false;
            }
            path.pop();
        }
    }
}

/// Earliest-arrival schedule for a vertex path of `graph`, leaving the start
/// no earlier than `t0`.
pub fn time_parameterize(path: &[usize], graph: &RoadmapGraph, t0: f64) -> Result<Option<TimedPath>> {
    if path.len() < 2 {
        return Err(Error::InvalidArgument("path needs at least two vertices".into()));
    }
    let mut sis = Vec::with_capacity(path.len() - 1);
    for w in path.windows(2) {
        let e = graph
            .edge_between(w[0], w[1])
            .ok_or_else(|| Error::InvalidArgument(format!("no edge between {} and {}", w[0], w[1])))?;
        sis.push(&e.si);
    }
    let points: Vec<Vec3> = path.iter().map(|&v| graph.vertices()[v].position).collect();
    Ok(schedule(&points, &graph.vertices()[path[0]].si, &sis, &graph.bounds(), t0))
}

/// Exact earliest-arrival schedule over (edge, safe interval) states.
///
/// Edge `i` is traversed inside one of its safe intervals. Waiting at an
/// intermediate vertex is allowed only while covered by the interval used
/// to arrive or the one used to leave, so consecutive chosen intervals must
/// overlap. Waiting at the first vertex must lie inside one of
/// `start_si`'s intervals.
pub fn schedule(points: &[Vec3], start_si: &IntervalSet, edge_sis: &[&IntervalSet], bounds: &DynamicBounds, t0: f64) -> Option<TimedPath> {
    let n_edges = edge_sis.len();
    debug_assert_eq!(points.len(), n_edges + 1);
    let mut rows = Vec::with_capacity(n_edges);
    for i in 0..n_edges {
        let t_min = travel_time(&points[i], &points[i + 1], bounds);
        let row = match i {
            0 => first_row(start_si, edge_sis[0], t_min, t0),
            _ => next_row(&rows[i - 1], edge_sis[i - 1], edge_sis[i], t_min),
        };
        rows.push(row);
    }
    reconstruct(points, &rows, edge_sis, bounds, t0)
}

/// Per interval of an edge: earliest arrival at its far end when traversed
/// inside that interval, and the interval index used on the previous edge.
type Row = Vec<Option<(f64, usize)>>;

fn travel_time(a: &Vec3, b: &Vec3, bounds: &DynamicBounds) -> f64 {
    min_travel_time((b - a).norm(), bounds).unwrap_or(f64::INFINITY)
}

fn first_row(start_si: &IntervalSet, si: &IntervalSet, t_min: f64, t0: f64) -> Row {
    si.intervals()
        .iter()
        .map(|iv| {
            let depart = t0.max(iv.lo);
            let wait_ok = depart == t0 || start_si.containing(&TimeInterval::raw(t0, depart)).is_some();
            (wait_ok && depart + t_min <= iv.hi).then_some((depart + t_min, 0))
        })
        .collect()
}

fn next_row(prev_row: &Row, prev_si: &IntervalSet, si: &IntervalSet, t_min: f64) -> Row {
    let prev = prev_si.intervals();
    si.intervals()
        .iter()
        .map(|iv| {
            let mut choice: Option<(f64, usize)> = None;
            for (j, p) in prev.iter().enumerate() {
                let Some((arrive, _)) = prev_row[j] else { continue };
                if p.hi < iv.lo {
                    continue;
                }
                let reach = arrive.max(iv.lo) + t_min;
                if reach <= iv.hi && choice.is_none_or(|(c, _)| reach < c) {
                    choice = Some((reach, j));
                }
            }
            choice
        })
        .collect()
}

fn reconstruct(points: &[Vec3], rows: &[Row], edge_sis: &[&IntervalSet], bounds: &DynamicBounds, t0: f64) -> Option<TimedPath> {
    let n_edges = rows.len();
    let (mut k, _) = rows[n_edges - 1]
        .iter()
        .enumerate()
        .filter_map(|(k, b)| b.map(|(t, _)| (k, t)))
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    let mut chosen_idx = vec![0usize; n_edges];
    for i in (0..n_edges).rev() {
        chosen_idx[i] = k;
        k = rows[i][k].expect("reachable state").1;
    }
    let chosen: Vec<TimeInterval> = (0..n_edges).map(|i| edge_sis[i].intervals()[chosen_idx[i]]).collect();
    let mut arrive = vec![t0; n_edges + 1];
    let mut depart = vec![t0; n_edges + 1];
    for i in 0..n_edges {
        depart[i] = arrive[i].max(chosen[i].lo);
        arrive[i + 1] = depart[i] + travel_time(&points[i], &points[i + 1], bounds);
    }
    depart[n_edges] = arrive[n_edges];
    TimedPath::new(points.to_vec(), arrive, depart, chosen, *bounds).ok()
}

/// Chain of per-edge intervals along a timed path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalCorridor {
    pub intervals: Vec<TimeInterval>,
    pub forward: bool,
}

impl TemporalCorridor {
    pub fn reversed(&self) -> Self {
        Self { intervals: self.intervals.iter().rev().copied().collect(), forward: !self.forward }
    }

    /// Overlap of each consecutive pair.
    pub fn overlaps(&self) -> Vec<TimeInterval> {
        self.intervals
            .windows(2)
            .map(|w| w[0].intersect(&w[1]).expect("validated corridor"))
            .collect()
    }
}

pub fn temporal_corridor(tp: &TimedPath) -> Result<TemporalCorridor> {
    corridor_from_intervals(tp.chosen.clone())
}

pub fn corridor_from_intervals(intervals: Vec<TimeInterval>) -> Result<TemporalCorridor> {
    for (i, w) in intervals.windows(2).enumerate() {
        if !w[0].overlaps(&w[1]) {
            return Err(Error::Invariant(format!(
                "intervals {:?} and {:?} of edges {i} and {} do not overlap",
                w[0],
                w[1],
                i + 1
            )));
        }
    }
    Ok(TemporalCorridor { intervals, forward: true })
}
