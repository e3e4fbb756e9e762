//! Control-point optimization inside a spatial-temporal corridor.
//!
//! The objective is a weighted sum of squared jerk, velocity and
//! acceleration exceedance, proximity to moving obstacles and distance
//! outside the corridor. Knot times stay fixed while the control points are
//! optimized; if the result still exceeds the dynamic bounds the knot span is
//! stretched and the optimization repeated.

use serde::{Deserialize, Serialize};

use crate::bspline::{basis, UniformBSpline, DEGREE};
use crate::corridor::{active_cuboid, STCuboid};
use crate::environment::Environment;
use crate::kinematics::DynamicBounds;
use crate::{Error, Result, Vec3};

/// Control points held fixed at each end to keep the rest boundary states.
pub const FROZEN: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostWeights {
    pub control: f64,
    pub feasibility: f64,
    pub dynamic_obstacles: f64,
    pub corridor: f64,
    /// Normalized ellipsoid distance below which obstacles are penalized.
    pub distance_threshold: f64,
    pub bounds: DynamicBounds,
}

impl Default for CostWeights {
    fn default() -> Self {
        Self {
            control: 1.0,
            feasibility: 1e4,
            dynamic_obstacles: 1e4,
            corridor: 1e4,
            distance_threshold: 1.5,
            bounds: DynamicBounds::default(),
        }
    }
}

impl CostWeights {
    pub fn validate(&self) -> Result<()> {
        let w = [self.control, self.feasibility, self.dynamic_obstacles, self.corridor];
        if w.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::Config(format!("cost weights {w:?} must be finite and nonnegative")));
        }
        if !(self.distance_threshold > 0.0) {
            return Err(Error::Config(format!(
                "distance threshold {} must be positive",
                self.distance_threshold
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    /// Number of correction pairs kept by the quasi-Newton update.
    pub memory: usize,
    /// Factor applied to the knot span on each refinement round.
    pub time_scale: f64,
    pub max_refinements: usize,
    pub samples_per_span: usize,
    /// Largest per-axis velocity or acceleration excess, at the control
    /// points, accepted without refinement.
    pub feasibility_tolerance: f64,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            gradient_tolerance: 1e-6,
            memory: 8,
            time_scale: 1.1,
            max_refinements: 5,
            samples_per_span: 4,
            feasibility_tolerance: 1e-3,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 || self.memory == 0 || self.samples_per_span == 0 {
            return Err(Error::Config("iteration cap, memory and samples per span must be positive".into()));
        }
        if !(self.time_scale > 1.0) || !(self.gradient_tolerance > 0.0) || !(self.feasibility_tolerance >= 0.0) {
            return Err(Error::Config("time scale must exceed 1 and tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Unweighted cost terms and the weighted total.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CostTerms {
    pub control: f64,
    pub feasibility: f64,
    pub dynamic_obstacles: f64,
    pub corridor: f64,
    pub total: f64,
}

impl CostTerms {
    fn is_finite(&self) -> bool {
        [self.control, self.feasibility, self.dynamic_obstacles, self.corridor, self.total]
            .iter()
            .all(|x| x.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizedTrajectory {
    pub spline: UniformBSpline,
    pub costs: CostTerms,
    pub converged: bool,
    /// Quasi-Newton iterations summed over all rounds.
    pub iterations: usize,
    /// Number of times the knot span was stretched.
    pub refinements: usize,
    /// Largest remaining velocity or acceleration excess at the control points.
    pub bound_excess: f64,
}

/// Sum of squared jerk control points.
pub fn cost_control(s: &UniformBSpline) -> (f64, Vec<Vec3>) {
    let q = s.ctrl_points();
    let mut g = vec![Vec3::zeros(); q.len()];
    let c = control_term(q, s.t_s(), 1.0, &mut g);
    (c, g)
}

/// Squared per-axis excess of the velocity and acceleration control points
/// over the bounds.
pub fn cost_feasibility(s: &UniformBSpline, bounds: &DynamicBounds) -> (f64, Vec<Vec3>) {
    let q = s.ctrl_points();
    let mut g = vec![Vec3::zeros(); q.len()];
    let c = feasibility_term(q, s.t_s(), bounds, 1.0, &mut g);
    (c, g)
}

/// Squared shortfall of the robot-inflated ellipsoid distance below
/// `threshold`, summed over `samples_per_span` positions per knot span and
/// every obstacle.
pub fn cost_dynamic_obstacles(
    s: &UniformBSpline,
    env: &Environment,
    threshold: f64,
    samples_per_span: usize,
) -> Result<(f64, Vec<Vec3>)> {
    if samples_per_span == 0 {
        return Err(Error::InvalidArgument("need at least one sample per knot span".into()));
    }
    let samples = obstacle_samples(s, env, samples_per_span);
    let q = s.ctrl_points();
    let mut g = vec![Vec3::zeros(); q.len()];
    let c = obstacle_term(q, &samples, threshold, 1.0, &mut g);
    Ok((c, g))
}

/// Distance of each free control point outside the cuboid active at its knot
/// time, summed over axes.
pub fn cost_corridor(s: &UniformBSpline, corridor: &[STCuboid]) -> Result<(f64, Vec<Vec3>)> {
    let boxes = assign_boxes(s, corridor, s.t_s())?;
    let q = s.ctrl_points();
    let mut g = vec![Vec3::zeros(); q.len()];
    let c = corridor_term(q, &boxes, 1.0, &mut g);
    Ok((c, g))
}

/// Largest per-axis excess of velocity or acceleration control points over
/// the bounds; zero when feasible.
pub fn bound_excess(s: &UniformBSpline, bounds: &DynamicBounds) -> f64 {
    let Ok((v, a, _)) = s.derivative_ctrl_points() else {
        return 0.0;
    };
    let ev = v.iter().flat_map(|p| p.iter().map(|x| x.abs() - bounds.v_max)).fold(0.0, f64::max);
    let ea = a.iter().flat_map(|p| p.iter().map(|x| x.abs() - bounds.a_max)).fold(0.0, f64::max);
    ev.max(ea)
}

/// Optimizes the free control points of `initial`, stretching the knot span
/// while the result exceeds the dynamic bounds.
///
/// Control points keep the cuboid they were assigned under the initial knot
/// span, so stretching does not move them out of the corridor.
pub fn optimize(
    initial: &UniformBSpline,
    corridor: &[STCuboid],
    env: &Environment,
    weights: &CostWeights,
    params: &SolverParams,
) -> Result<OptimizedTrajectory> {
    weights.validate()?;
    params.validate()?;
    let boxes = assign_boxes(initial, corridor, initial.t_s())?;
    let mut s = initial.clone();
    let mut best: Option<OptimizedTrajectory> = None;
    let mut iterations = 0;
    for round in 0..=params.max_refinements {
        if round > 0 {
            s = s.with_t_s(s.t_s() * params.time_scale)?;
        }
        let problem = Problem::new(&s, env, &boxes, weights, params);
        let (ctrl, costs, report) = problem.solve(s.ctrl_points(), params);
        s.ctrl_points_mut().copy_from_slice(&ctrl);
        iterations += report.iterations;
        let excess = bound_excess(&s, &weights.bounds);
        let result = OptimizedTrajectory {
            spline: s.clone(),
            costs,
            converged: report.converged && costs.is_finite(),
            iterations,
            refinements: round,
            bound_excess: excess,
        };
        let feasible = excess <= params.feasibility_tolerance;
        let better = match &best {
            None => true,
            Some(b) => {
                let b_feasible = b.bound_excess <= params.feasibility_tolerance;
                (feasible && !b_feasible) || (feasible == b_feasible && excess < b.bound_excess)
            }
        };
        if better {
            best = Some(result);
        }
        if feasible {
            break;
        }
    }
    let mut best = best.expect("at least one round runs");
    best.iterations = iterations;
    Ok(best)
}

/// Index of the candidate with the smallest control cost among those that
/// converged and passed verification; ties go to the shorter flight.
pub fn select_best(results: &[OptimizedTrajectory], verified: &[bool]) -> Option<usize> {
    results
        .iter()
        .zip(verified)
        .enumerate()
        .filter(|(_, (r, &ok))| ok && r.converged)
        .min_by(|(_, (a, _)), (_, (b, _))| {
            a.costs
                .control
                .total_cmp(&b.costs.control)
                .then(a.spline.duration().total_cmp(&b.spline.duration()))
        })
        .map(|(i, _)| i)
}

fn free_range(n: usize) -> std::ops::Range<usize> {
    FROZEN..n.saturating_sub(FROZEN).max(FROZEN)
}

/// Cuboid bounds for each free control point, found from its knot time
/// under knot span `t_s`.
fn assign_boxes(s: &UniformBSpline, corridor: &[STCuboid], t_s: f64) -> Result<Vec<(Vec3, Vec3)>> {
    free_range(s.ctrl_points().len())
        .map(|i| {
            let t = s.t0() + (i as f64 - 1.0) * t_s;
            let c = &corridor[active_cuboid(corridor, t)?];
            Ok((c.lo, c.hi))
        })
        .collect()
}

fn control_term(q: &[Vec3], t_s: f64, w: f64, g: &mut [Vec3]) -> f64 {
    let k = 1.0 / (t_s * t_s * t_s);
    let mut cost = 0.0;
    for i in 0..q.len().saturating_sub(3) {
        let j = (q[i + 3] - 3.0 * q[i + 2] + 3.0 * q[i + 1] - q[i]) * k;
        cost += j.norm_squared();
        let d = 2.0 * w * k * j;
        g[i] -= d;
        g[i + 1] += 3.0 * d;
        g[i + 2] -= 3.0 * d;
        g[i + 3] += d;
    }
    cost
}

fn feasibility_term(q: &[Vec3], t_s: f64, bounds: &DynamicBounds, w: f64, g: &mut [Vec3]) -> f64 {
    let mut cost = 0.0;
    for i in 0..q.len().saturating_sub(1) {
        let v = (q[i + 1] - q[i]) / t_s;
        for a in 0..3 {
            let excess = v[a].abs() - bounds.v_max;
            if excess > 0.0 {
                cost += excess * excess;
                let d = w * 2.0 * excess * v[a].signum() / t_s;
                g[i + 1][a] += d;
                g[i][a] -= d;
            }
        }
    }
    let t2 = t_s * t_s;
    for i in 0..q.len().saturating_sub(2) {
        let acc = (q[i + 2] - 2.0 * q[i + 1] + q[i]) / t2;
        for a in 0..3 {
            let excess = acc[a].abs() - bounds.a_max;
            if excess > 0.0 {
                cost += excess * excess;
                let d = w * 2.0 * excess * acc[a].signum() / t2;
                g[i + 2][a] += d;
                g[i + 1][a] -= 2.0 * d;
                g[i][a] += d;
            }
        }
    }
    cost
}

/// A sample position on the spline with the obstacle centers at its time.
struct ObstacleSample {
    segment: usize,
    weights: [f64; DEGREE + 1],
    /// Obstacle center and squared inverse inflated semi-axes.
    obstacles: Vec<(Vec3, Vec3)>,
}

fn obstacle_samples(s: &UniformBSpline, env: &Environment, per_span: usize) -> Vec<ObstacleSample> {
    let r = env.robot_radius();
    let inv: Vec<Vec3> = env
        .obstacles()
        .iter()
        .map(|o| o.semi_axes().add_scalar(r).map(|x| 1.0 / (x * x)))
        .collect();
    let mut out = Vec::with_capacity(s.segments() * per_span);
    for k in 0..s.segments() {
        for j in 0..per_span {
            let u = j as f64 / per_span as f64;
            let t = s.t0() + (k as f64 + u) * s.t_s();
            let b = basis(DEGREE, u);
            let obstacles = env.obstacles().iter().zip(&inv).map(|(o, w)| (o.center(t), *w)).collect();
            out.push(ObstacleSample { segment: k, weights: [b[0], b[1], b[2], b[3]], obstacles });
        }
    }
    out
}

fn obstacle_term(q: &[Vec3], samples: &[ObstacleSample], threshold: f64, w: f64, g: &mut [Vec3]) -> f64 {
    let mut cost = 0.0;
    for sample in samples {
        let k = sample.segment;
        let p: Vec3 = (0..=DEGREE).map(|r| q[k + r] * sample.weights[r]).sum();
        let mut dp = Vec3::zeros();
        for (center, inv2) in &sample.obstacles {
            let e = p - center;
            let d = e.component_mul(&e).dot(inv2).sqrt();
            if d <= threshold {
                let gap = d - threshold;
                cost += gap * gap;
                if d > 0.0 {
                    dp += e.component_mul(inv2) * (2.0 * gap / d);
                }
            }
        }
        if dp != Vec3::zeros() {
            for r in 0..=DEGREE {
                g[k + r] += w * sample.weights[r] * dp;
            }
        }
    }
    cost
}

fn corridor_term(q: &[Vec3], boxes: &[(Vec3, Vec3)], w: f64, g: &mut [Vec3]) -> f64 {
    let mut cost = 0.0;
    for (i, (lo, hi)) in free_range(q.len()).zip(boxes) {
        for a in 0..3 {
            if q[i][a] < lo[a] {
                cost += lo[a] - q[i][a];
                g[i][a] -= w;
            } else if q[i][a] > hi[a] {
                cost += q[i][a] - hi[a];
                g[i][a] += w;
            }
        }
    }
    cost
}

/// Weighted objective over the free control points of one round.
struct Problem<'a> {
    t_s: f64,
    weights: &'a CostWeights,
    samples: Vec<ObstacleSample>,
    boxes: &'a [(Vec3, Vec3)],
}

struct SolveReport {
    iterations: usize,
    converged: bool,
    /// Objective at the start and after every accepted step.
    #[cfg_attr(not(test), allow(dead_code))]
    accepted: Vec<f64>,
}

impl<'a> Problem<'a> {
    fn new(
        s: &UniformBSpline,
        env: &Environment,
        boxes: &'a [(Vec3, Vec3)],
        weights: &'a CostWeights,
        params: &SolverParams,
    ) -> Self {
        let samples = if weights.dynamic_obstacles > 0.0 {
            obstacle_samples(s, env, params.samples_per_span)
        } else {
            Vec::new()
        };
        Self { t_s: s.t_s(), weights, samples, boxes }
    }

    fn evaluate(&self, q: &[Vec3], g: &mut [Vec3]) -> CostTerms {
        g.iter_mut().for_each(|x| *x = Vec3::zeros());
        let w = self.weights;
        let control = control_term(q, self.t_s, w.control, g);
        let feasibility = feasibility_term(q, self.t_s, &w.bounds, w.feasibility, g);
        let dynamic_obstacles = obstacle_term(q, &self.samples, w.distance_threshold, w.dynamic_obstacles, g);
        let corridor = corridor_term(q, self.boxes, w.corridor, g);
        let total = w.control * control
            + w.feasibility * feasibility
            + w.dynamic_obstacles * dynamic_obstacles
            + w.corridor * corridor;
        CostTerms { control, feasibility, dynamic_obstacles, corridor, total }
    }

    fn solve(&self, start: &[Vec3], params: &SolverParams) -> (Vec<Vec3>, CostTerms, SolveReport) {
        let n = start.len();
        let free = free_range(n);
        let mut q = start.to_vec();
        let mut g = vec![Vec3::zeros(); n];
        let mut objective = |x: &[f64], grad: &mut [f64]| {
            for (k, i) in free.clone().enumerate() {
                q[i] = Vec3::new(x[3 * k], x[3 * k + 1], x[3 * k + 2]);
            }
            let c = self.evaluate(&q, &mut g);
            for (k, i) in free.clone().enumerate() {
                grad[3 * k..3 * k + 3].copy_from_slice(g[i].as_slice());
            }
            c.total
        };
        let x0: Vec<f64> = start[free.clone()].iter().flat_map(|p| p.iter().copied()).collect();
        let (x, report) = minimize(x0, &mut objective, params);
        let mut out = start.to_vec();
        for (k, i) in free.enumerate() {
            out[i] = Vec3::new(x[3 * k], x[3 * k + 1], x[3 * k + 2]);
        }
        let costs = self.evaluate(&out, &mut vec![Vec3::zeros(); n]);
        (out, costs, report)
    }
}

const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 40;
const STALL_TOLERANCE: f64 = 1e-12;

/// Limited-memory BFGS with backtracking line search. Stops when the
/// gradient norm falls below tolerance, when no step decreases the
/// objective, or at the iteration cap; only a non-finite objective counts
/// as not converged.
fn minimize(mut x: Vec<f64>, f: &mut dyn FnMut(&[f64], &mut [f64]) -> f64, params: &SolverParams) -> (Vec<f64>, SolveReport) {
    let n = x.len();
    if n == 0 {
        return (x, SolveReport { iterations: 0, converged: true, accepted: Vec::new() });
    }
    let mut g = vec![0.0; n];
    let mut fx = f(&x, &mut g);
    let mut accepted_values = vec![fx];
    let mut history: std::collections::VecDeque<(Vec<f64>, Vec<f64>, f64)> = std::collections::VecDeque::new();
    let mut x_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];
    for iter in 0..params.max_iterations {
        if !fx.is_finite() {
            return (x, SolveReport { iterations: iter, converged: false, accepted: accepted_values });
        }
        if norm(&g) < params.gradient_tolerance {
            return (x, SolveReport { iterations: iter, converged: true, accepted: accepted_values });
        }
        let mut d = two_loop(&g, &history);
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            history.clear();
            d = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        let mut step = if history.is_empty() { 1.0 / norm(&g).max(1.0) } else { 1.0 };
        let mut accepted = false;
        let mut f_new = fx;
        for _ in 0..MAX_BACKTRACKS {
            for i in 0..n {
                x_new[i] = x[i] + step * d[i];
            }
            f_new = f(&x_new, &mut g_new);
            if f_new.is_finite() && f_new <= fx + ARMIJO * step * slope {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // Recompute the gradient at the current point, which `f` overwrote.
            f(&x, &mut g);
            return (x, SolveReport { iterations: iter, converged: true, accepted: accepted_values });
        }
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) {
            if history.len() == params.memory {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        let decrease = fx - f_new;
        std::mem::swap(&mut x, &mut x_new);
        std::mem::swap(&mut g, &mut g_new);
        fx = f_new;
        accepted_values.push(fx);
        if decrease <= STALL_TOLERANCE * fx.abs().max(1.0) {
            return (x, SolveReport { iterations: iter + 1, converged: true, accepted: accepted_values });
        }
    }
    (x, SolveReport { iterations: params.max_iterations, converged: true, accepted: accepted_values })
}

fn two_loop(g: &[f64], history: &std::collections::VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q: Vec<f64> = g.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{MovingObstacle, StaticGrid, TimeInterval};
    use rand::{Rng, SeedableRng};

    fn spline(ctrl: Vec<Vec3>, t_s: f64) -> UniformBSpline {
        UniformBSpline::new(ctrl, t_s, 0.0).unwrap()
    }

    fn line(n: usize, t_s: f64) -> UniformBSpline {
        spline((0..n).map(|i| Vec3::new(0.5 * i as f64, 1.0, 1.0)).collect(), t_s)
    }

    fn open_world(obstacles: Vec<MovingObstacle>) -> Environment {
        let grid = StaticGrid::empty(Vec3::zeros(), 0.25, [40, 20, 12]).unwrap();
        Environment::new(grid, obstacles, TimeInterval::raw(0.0, 20.0), 0.2).unwrap()
    }

    fn whole_box(t_hi: f64) -> Vec<STCuboid> {
        vec![STCuboid { lo: Vec3::zeros(), hi: Vec3::new(10.0, 5.0, 3.0), window: TimeInterval::raw(0.0, t_hi) }]
    }

    #[test]
    fn collinear_uniform_points_have_no_jerk() {
        assert_eq!(cost_control(&line(8, 0.4)).0, 0.0);
        let s = spline([0.0, 0.0, 1.0, 3.0].iter().map(|&x| Vec3::new(x, 0.0, 0.0)).collect(), 1.0);
        assert_eq!(cost_control(&s).0, 0.0);
    }

    #[test]
    fn single_velocity_excess_costs_its_square() {
        // V_0 = (2.5, 0, 0) against v_max = 2; accelerations stay within 2.
        let xs = [0.0, 2.5, 4.5, 6.5];
        let s = spline(xs.iter().map(|&x| Vec3::new(x, 0.0, 0.0)).collect(), 1.0);
        let (c, _) = cost_feasibility(&s, &DynamicBounds::new(2.0, 2.0).unwrap());
        assert!((c - 0.25).abs() < 1e-12);
        // Slow motion is not penalized.
        assert_eq!(cost_feasibility(&line(8, 1.0), &DynamicBounds::default()).0, 0.0);
    }

    #[test]
    fn obstacle_quadratic_branch() {
        // Hovering spline at the origin-side point; a stationary obstacle with
        // inflated semi-axes 1 placed so d = threshold - 0.5 = 1.0.
        let o = MovingObstacle::stationary(Vec3::repeat(0.8), Vec3::new(3.0, 1.0, 1.0), TimeInterval::raw(0.0, 20.0)).unwrap();
        let env = open_world(vec![o]);
        let s = spline(vec![Vec3::new(2.0, 1.0, 1.0); 4], 1.0);
        let (c, _) = cost_dynamic_obstacles(&s, &env, 1.5, 1).unwrap();
        assert!((c - 0.25).abs() < 1e-12, "{c}");
        let far = spline(vec![Vec3::new(8.0, 4.0, 1.0); 4], 1.0);
        assert_eq!(cost_dynamic_obstacles(&far, &env, 1.5, 4).unwrap().0, 0.0);
        assert!(cost_dynamic_obstacles(&s, &env, 1.5, 0).is_err());
    }

    #[test]
    fn corridor_hinge() {
        let mut q: Vec<Vec3> = (0..7).map(|i| Vec3::new(1.0 + 0.1 * i as f64, 1.0, 1.0)).collect();
        let s = spline(q.clone(), 0.5);
        assert_eq!(cost_corridor(&s, &whole_box(10.0)).unwrap().0, 0.0);
        q[3].z = 3.1;
        let (c, g) = cost_corridor(&spline(q, 0.5), &whole_box(10.0)).unwrap();
        assert!((c - 0.1).abs() < 1e-12);
        assert_eq!(g[3], Vec3::new(0.0, 0.0, 1.0));
        let short = whole_box(0.1);
        assert!(matches!(cost_corridor(&s, &short), Err(Error::Uncovered(_))));
    }

    #[test]
    fn select_best_filters_then_minimizes() {
        let mk = |c: f64| OptimizedTrajectory {
            spline: line(6, 0.5),
            costs: CostTerms { control: c, ..Default::default() },
            converged: true,
            iterations: 0,
            refinements: 0,
            bound_excess: 0.0,
        };
        let r = vec![mk(5.0), mk(3.0), mk(9.0)];
        assert_eq!(select_best(&r, &[true, true, true]), Some(1));
        assert_eq!(select_best(&r[..1], &[true]), Some(0));
        let r = vec![mk(1.0), mk(3.0)];
        assert_eq!(select_best(&r, &[false, true]), Some(1));
        assert_eq!(select_best(&r, &[false, false]), None);
        let scaled: Vec<_> = [5.0, 3.0, 9.0].iter().map(|&c| mk(7.0 * c)).collect();
        assert_eq!(select_best(&scaled, &[true, true, true]), Some(1));
    }

    #[test]
    fn optimal_initial_is_a_fixed_point() {
        let env = open_world(vec![]);
        let s = line(10, 0.5);
        let r = optimize(&s, &whole_box(10.0), &env, &CostWeights::default(), &SolverParams::default()).unwrap();
        assert!(r.converged);
        for (a, b) in r.spline.ctrl_points().iter().zip(s.ctrl_points()) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn overspeed_is_driven_below_bound() {
        let env = open_world(vec![]);
        // 8 m in ~2 s with rest at both ends: infeasible at a_max = 2.
        let n = 12;
        let ctrl: Vec<Vec3> = (0..n)
            .map(|i| {
                let x = 1.0 + 8.0 * ((i as f64 - 2.0) / (n as f64 - 5.0)).clamp(0.0, 1.0);
                Vec3::new(x, 2.0, 1.0)
            })
            .collect();
        let s = spline(ctrl, 0.25);
        let w = CostWeights { feasibility: 1e5, ..Default::default() };
        assert!(bound_excess(&s, &w.bounds) > 1.0);
        let r = optimize(&s, &whole_box(100.0), &env, &w, &SolverParams { max_refinements: 20, ..Default::default() }).unwrap();
        assert!(r.bound_excess <= 1e-2, "{}", r.bound_excess);
        let (v, a, _) = r.spline.derivative_ctrl_points().unwrap();
        assert!(v.iter().all(|p| p.amax() <= w.bounds.v_max + 1e-2));
        assert!(a.iter().all(|p| p.amax() <= w.bounds.a_max + 1e-2));
    }

    #[test]
    fn objective_never_increases() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let ctrl: Vec<Vec3> = (0..12)
            .map(|i| Vec3::new(0.5 * i as f64 + rng.gen_range(-0.3..0.3), 2.0 + rng.gen_range(-0.3..0.3), 1.0))
            .collect();
        let s = spline(ctrl, 0.5);
        let o = MovingObstacle::stationary(Vec3::repeat(0.3), Vec3::new(3.0, 2.2, 1.0), TimeInterval::raw(0.0, 20.0)).unwrap();
        let env = open_world(vec![o]);
        let corridor = vec![STCuboid { lo: Vec3::new(0.0, 1.0, 0.5), hi: Vec3::new(10.0, 2.1, 1.5), window: TimeInterval::raw(0.0, 10.0) }];
        let boxes = assign_boxes(&s, &corridor, 0.5).unwrap();
        let w = CostWeights::default();
        let p = Problem::new(&s, &env, &boxes, &w, &SolverParams::default());
        let (_, costs, report) = p.solve(s.ctrl_points(), &SolverParams::default());
        assert!(report.accepted.len() > 2);
        assert!(report.accepted.windows(2).all(|w| w[1] <= w[0]));
        assert!((costs.total - report.accepted.last().unwrap()).abs() <= 1e-9 * costs.total.max(1.0));
    }
}
