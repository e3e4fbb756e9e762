//! Independent oracles shared by the integration tests and the acceptance
//! runner. They rebuild each quantity by brute force (sampling, finite
//! differences, forward integration) instead of calling the analytic code.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sitmp::bspline::{basis, UniformBSpline};
use sitmp::corridor::STCuboid;
use sitmp::environment::{Environment, MovingObstacle, StaticGrid, TimeInterval};
use sitmp::intervals::{edge_safe_intervals, segment_free_during};
use sitmp::kinematics::{min_travel_time, DynamicBounds, TrapezoidalProfile};
use sitmp::optimizer::{cost_control, cost_corridor, cost_dynamic_obstacles, cost_feasibility};
use sitmp::poly::Polynomial;
use sitmp::utvd::{check_equiv, TimedPath};
use sitmp::Vec3;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform3(rng: &mut impl Rng, lo: f64, hi: f64) -> Vec3 {
    Vec3::new(rng.gen_range(lo..hi), rng.gen_range(lo..hi), rng.gen_range(lo..hi))
}

fn horner(coeffs: &[f64], s: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
}

/// Ascending coefficients in `s` of `sum_k d[k] (s - s0)^k / k!`.
fn taylor_coeffs(d: &[f64], s0: f64) -> Vec<f64> {
    let mut out = vec![0.0; d.len()];
    let mut fact = 1.0;
    for (k, dk) in d.iter().enumerate() {
        if k > 0 {
            fact *= k as f64;
        }
        let c = dk / fact;
        // (s - s0)^k = sum_j C(k, j) s^j (-s0)^(k - j)
        let mut binom = 1.0;
        for j in 0..=k {
            out[j] += c * binom * (-s0).powi((k - j) as i32);
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
    }
    out
}

/// Obstacle center recomputed from the raw coefficients.
fn center_by_hand(obs: &MovingObstacle, t: f64) -> Vec3 {
    let a = obs.active();
    let s = t.clamp(a.lo, a.hi) - a.lo;
    let tr = obs.trajectory();
    Vec3::new(horner(tr[0].coeffs(), s), horner(tr[1].coeffs(), s), horner(tr[2].coeffs(), s))
}

/// Obstacle passing near `near` around time `tc`, with a polynomial path of
/// the given degree.
fn random_obstacle(rng: &mut impl Rng, near: &Vec3, horizon: &TimeInterval, degree: usize) -> MovingObstacle {
    let span = horizon.length();
    let lo = if rng.gen_bool(0.3) { horizon.lo } else { rng.gen_range(horizon.lo..horizon.lo + 0.4 * span) };
    let hi = if rng.gen_bool(0.3) { horizon.hi } else { rng.gen_range(lo + 0.3 * span..horizon.hi) };
    let active = TimeInterval::new(lo, hi).unwrap();
    let tc = rng.gen_range(active.lo..active.hi);
    let c = near + uniform3(rng, -1.5, 1.5);
    let scales = [1.0, 2.0, 0.5, 0.1];
    let traj = [0, 1, 2].map(|axis| {
        let d: Vec<f64> = (0..=degree)
            .map(|k| if k == 0 { c[axis] } else { rng.gen_range(-scales[k]..scales[k]) })
            .collect();
        Polynomial::new(taylor_coeffs(&d, tc - active.lo))
    });
    MovingObstacle::new(uniform3(rng, 0.1, 0.6), traj, active).unwrap()
}

fn empty_grid() -> StaticGrid {
    StaticGrid::empty(Vec3::zeros(), 0.2, [100, 100, 25]).unwrap()
}

#[derive(Debug, Clone, Default)]
pub struct SafeIntervalReport {
    pub cases: usize,
    /// Largest distance between a sampled transition and its analytic
    /// boundary.
    pub max_boundary_error: f64,
    /// Samples away from every boundary where the two disagree.
    pub misclassified: usize,
    /// Boundaries with no sampled transition nearby.
    pub unmatched: usize,
    /// Boundaries of slivers too short for the sampling step, confirmed by
    /// probing the sliver's midpoint.
    pub below_resolution: usize,
    /// Sampled instants where the robot sphere on the edge overlaps the
    /// obstacle but the analytic result calls the edge safe.
    pub missed_contacts: usize,
}

/// Compares `edge_safe_intervals` against time sampling at `dt` on random
/// single-obstacle cases.
pub fn safe_interval_oracle(cases: usize, dt: f64, tolerance: f64, seed: u64) -> SafeIntervalReport {
    let mut rng = rng(seed);
    let horizon = TimeInterval::new(0.0, 20.0).unwrap();
    let mut rep = SafeIntervalReport { cases, ..Default::default() };
    for _ in 0..cases {
        let (p1, p2) = loop {
            let p1 = Vec3::new(rng.gen_range(1.0..19.0), rng.gen_range(1.0..19.0), rng.gen_range(0.6..4.4));
            let p2 = p1 + uniform3(&mut rng, -1.0, 1.0).normalize() * rng.gen_range(0.2..4.0);
            if p2.x > 0.6 && p2.x < 19.4 && p2.y > 0.6 && p2.y < 19.4 && p2.z > 0.6 && p2.z < 4.4 {
                break (p1, p2);
            }
        };
        let radius = rng.gen_range(0.1..0.3);
        let degree = rng.gen_range(0..=3);
        let obs = random_obstacle(&mut rng, &(0.5 * (p1 + p2)), &horizon, degree);
        let env = Environment::new(empty_grid(), vec![obs.clone()], horizon, radius).unwrap();
        let safe = edge_safe_intervals(&env, &p1, &p2, 0.0).unwrap();

        let margin = obs.semi_axes().add_scalar(radius);
        let (lo, hi) = (p1.inf(&p2) - margin, p1.sup(&p2) + margin);
        let hits = |t: f64| {
            let c = center_by_hand(&obs, t);
            (0..3).all(|a| c[a] > lo[a] && c[a] < hi[a])
        };
        let touches = |t: f64| {
            let c = center_by_hand(&obs, t);
            let axes = obs.semi_axes().add_scalar(radius);
            (0..=20).any(|k| {
                let p = p1 + (p2 - p1) * (k as f64 / 20.0);
                (p - c).component_div(&axes).norm() < 1.0
            })
        };
        let analytic_safe = |t: f64| safe.intervals().iter().any(|i| i.contains(t));
        let boundaries: Vec<f64> = safe
            .intervals()
            .iter()
            .flat_map(|i| [i.lo, i.hi])
            .filter(|&b| b > horizon.lo + 1e-9 && b < horizon.hi - 1e-9)
            .collect();
        let near_boundary = |t: f64| boundaries.iter().any(|b| (b - t).abs() <= tolerance);

        let n = (horizon.length() / dt).round() as usize;
        let times: Vec<f64> = (0..=n).map(|k| horizon.lo + k as f64 * dt).collect();
        let sampled: Vec<bool> = times.iter().map(|&t| !hits(t)).collect();
        for (&t, &s) in times.iter().zip(&sampled) {
            if !near_boundary(t) && s != analytic_safe(t) {
                rep.misclassified += 1;
            }
            if analytic_safe(t) && touches(t) {
                rep.missed_contacts += 1;
            }
        }
        let transitions: Vec<f64> = (0..n)
            .filter(|&k| sampled[k] != sampled[k + 1])
            .map(|k| 0.5 * (times[k] + times[k + 1]))
            .collect();
        for tr in &transitions {
            match boundaries.iter().map(|b| (b - tr).abs()).min_by(f64::total_cmp) {
                Some(e) if e <= tolerance => rep.max_boundary_error = rep.max_boundary_error.max(e),
                _ => rep.unmatched += 1,
            }
        }
        for (idx, b) in boundaries.iter().enumerate() {
            if transitions.iter().any(|tr| (tr - b).abs() <= tolerance) {
                continue;
            }
            // Sampling can step over a sliver entirely; probe its midpoint
            // directly instead.
            let nearest = boundaries
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != idx)
                .map(|(_, o)| *o)
                .min_by(|x, y| (x - b).abs().total_cmp(&(y - b).abs()));
            let confirmed = nearest.is_some_and(|o| {
                let mid = 0.5 * (o + b);
                (o - b).abs() < 2.0 * dt && !hits(mid) == analytic_safe(mid)
            });
            if confirmed {
                rep.below_resolution += 1;
            } else {
                rep.unmatched += 1;
            }
        }
    }
    rep
}

/// Time for a double integrator to travel `distance` from rest to rest
/// under a forward-integrated bang-bang policy: accelerate while stopping
/// in time stays possible, cruise at the speed limit, otherwise brake. Every
/// step applies an admissible control exactly, so the result is an
/// achievable time.
pub fn bang_bang_time(distance: f64, bounds: &DynamicBounds, dt: f64) -> f64 {
    let (vm, a) = (bounds.v_max, bounds.a_max);
    let (mut x, mut v, mut t) = (0.0_f64, 0.0_f64, 0.0_f64);
    let stop = |x: f64, v: f64| x + v * v / (2.0 * a);
    loop {
        let rem = distance - x;
        if v == 0.0 && rem <= 1e-12 {
            return t;
        }
        if v == 0.0 && rem < 2.0 * a * dt * dt {
            // Too short for a whole step: half up, half down.
            return t + 2.0 * (rem / a).sqrt();
        }
        // Accelerate, saturating at the speed limit within the step.
        let ramp = ((vm - v) / a).clamp(0.0, dt);
        let (xa, va) = (x + v * ramp + 0.5 * a * ramp * ramp + (v + a * ramp) * (dt - ramp), v + a * ramp);
        if stop(xa, va) <= distance {
            x = xa;
            v = va;
            t += dt;
            continue;
        }
        if v > a * dt && stop(x + v * dt, v) <= distance {
            x += v * dt;
            t += dt;
            continue;
        }
        if v <= a * dt {
            t += v / a;
            x = stop(x, v);
            v = 0.0;
        } else {
            x += v * dt - 0.5 * a * dt * dt;
            v -= a * dt;
            t += dt;
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct MinTimeReport {
    pub cases: usize,
    /// Largest amount by which the integrated policy was faster than the
    /// analytic minimum (positive means the analytic value is too large).
    pub max_beat: f64,
    /// Largest amount by which the integrated policy was slower.
    pub max_gap: f64,
    /// Cases where the analytic profile breaks a bound or misses the
    /// distance.
    pub infeasible_profiles: usize,
}

pub fn min_time_oracle(cases: usize, dt: f64, seed: u64) -> MinTimeReport {
    let mut rng = rng(seed);
    let mut rep = MinTimeReport { cases, ..Default::default() };
    for _ in 0..cases {
        let d = 10f64.powf(rng.gen_range(-2.0..1.5));
        let b = DynamicBounds::new(rng.gen_range(0.5..4.0), rng.gen_range(0.5..4.0)).unwrap();
        let analytic = min_travel_time(d, &b).unwrap();
        let oracle = bang_bang_time(d, &b, dt);
        rep.max_beat = rep.max_beat.max(analytic - oracle);
        rep.max_gap = rep.max_gap.max(oracle - analytic);

        let prof = TrapezoidalProfile::new(d, &b);
        let h = 1e-4;
        let mut ok = (prof.position(analytic) - d).abs() < 1e-9 && prof.position(0.0).abs() < 1e-12;
        let steps = 400;
        for k in 1..steps {
            let tau = analytic * k as f64 / steps as f64;
            let v = (prof.position(tau + h) - prof.position(tau - h)) / (2.0 * h);
            let acc = (prof.position(tau + h) - 2.0 * prof.position(tau) + prof.position(tau - h)) / (h * h);
            ok &= v <= b.v_max + 1e-6 && v >= -1e-6 && acc.abs() <= b.a_max + 1e-3;
        }
        if !ok {
            rep.infeasible_profiles += 1;
        }
    }
    rep
}

/// Random spline wandering from a random start.
pub fn random_spline(rng: &mut impl Rng, n_range: std::ops::RangeInclusive<usize>, t_s: f64) -> UniformBSpline {
    let n = rng.gen_range(n_range);
    let step = rng.gen_range(0.1..1.0);
    let mut p = Vec3::new(rng.gen_range(2.0..18.0), rng.gen_range(2.0..18.0), rng.gen_range(1.0..4.0));
    let ctrl = (0..n)
        .map(|_| {
            p += uniform3(rng, -1.0, 1.0) * step;
            p
        })
        .collect();
    UniformBSpline::new(ctrl, t_s, rng.gen_range(0.0..5.0)).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostTerm {
    Control,
    Feasibility,
    DynamicObstacles,
    Corridor,
}

impl CostTerm {
    pub const ALL: [CostTerm; 4] = [CostTerm::Control, CostTerm::Feasibility, CostTerm::DynamicObstacles, CostTerm::Corridor];

    pub fn name(self) -> &'static str {
        match self {
            CostTerm::Control => "control",
            CostTerm::Feasibility => "feasibility",
            CostTerm::DynamicObstacles => "dynamic obstacles",
            CostTerm::Corridor => "corridor",
        }
    }
}

type CostFn = Box<dyn Fn(&UniformBSpline) -> (f64, Vec<Vec3>)>;

/// A random configuration where the term is active and differentiable.
fn gradient_case(term: CostTerm, rng: &mut ChaCha8Rng) -> (UniformBSpline, CostFn) {
    loop {
        let t_s = rng.gen_range(0.15..0.5);
        let s = random_spline(rng, 8..=16, t_s);
        match term {
            CostTerm::Control => return (s, Box::new(cost_control)),
            CostTerm::Feasibility => {
                let (v, a, _) = s.derivative_ctrl_points().unwrap();
                let peak = |pts: &[Vec3]| pts.iter().map(|p| p.amax()).fold(0.0, f64::max);
                let b = DynamicBounds::new(rng.gen_range(0.3..0.9) * peak(&v), rng.gen_range(0.3..0.9) * peak(&a)).unwrap();
                let kink = v.iter().chain(&a).any(|p| p.iter().any(|x| (x.abs() - b.v_max).abs() < 1e-5 || (x.abs() - b.a_max).abs() < 1e-5));
                if !kink {
                    return (s, Box::new(move |s: &UniformBSpline| cost_feasibility(s, &b)));
                }
            }
            CostTerm::DynamicObstacles => {
                let horizon = TimeInterval::new(0.0, s.end_time() + 1.0).unwrap();
                let obstacles = (0..3)
                    .map(|_| {
                        let t = rng.gen_range(s.t0()..s.end_time());
                        let near = s.evaluate(t, 0).unwrap();
                        let degree = rng.gen_range(1..=2);
                        random_obstacle(rng, &near, &horizon, degree)
                    })
                    .collect();
                let env = Environment::new(empty_grid(), obstacles, horizon, 0.2).unwrap();
                let f = move |s: &UniformBSpline| cost_dynamic_obstacles(s, &env, 1.5, 4).unwrap();
                if f(&s).0 > 1e-6 {
                    return (s, Box::new(f));
                }
            }
            CostTerm::Corridor => {
                let q = s.ctrl_points();
                let n = q.len();
                let cut = s.t0() + rng.gen_range(0.3..0.7) * s.duration();
                let cuboid = |rng: &mut ChaCha8Rng, window: TimeInterval| {
                    let c = q[rng.gen_range(0..n)];
                    let half = uniform3(rng, 0.3, 2.0);
                    STCuboid { lo: c - half, hi: c + half, window }
                };
                let corridor = vec![
                    cuboid(rng, TimeInterval::new(s.t0() - 1.0, cut + 0.2).unwrap()),
                    cuboid(rng, TimeInterval::new(cut, s.end_time() + 1.0).unwrap()),
                ];
                let kink = q.iter().any(|p| corridor.iter().any(|c| (0..3).any(|a| (p[a] - c.lo[a]).abs() < 1e-5 || (p[a] - c.hi[a]).abs() < 1e-5)));
                let f = move |s: &UniformBSpline| cost_corridor(s, &corridor).unwrap();
                if !kink && f(&s).0 > 1e-6 {
                    return (s, Box::new(f));
                }
            }
        }
    }
}

/// Worst relative error, over `configs` random configurations, between the
/// analytic gradient and central finite differences with step `h`.
pub fn gradient_check(term: CostTerm, configs: usize, h: f64, seed: u64) -> f64 {
    let mut rng = rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..configs {
        let (s, f) = gradient_case(term, &mut rng);
        let (_, g) = f(&s);
        let mut diff = 0.0;
        let mut fd_norm = 0.0;
        for i in 0..s.ctrl_points().len() {
            for a in 0..3 {
                let mut plus = s.clone();
                plus.ctrl_points_mut()[i][a] += h;
                let mut minus = s.clone();
                minus.ctrl_points_mut()[i][a] -= h;
                let fd = (f(&plus).0 - f(&minus).0) / (2.0 * h);
                diff += (fd - g[i][a]).powi(2);
                fd_norm += fd * fd;
            }
        }
        let g_norm: f64 = g.iter().map(|x| x.norm_squared()).sum::<f64>().sqrt();
        let scale = g_norm.max(fd_norm.sqrt());
        assert!(scale > 0.0, "{} gradient vanished at an active configuration", term.name());
        worst = worst.max(diff.sqrt() / scale);
    }
    worst
}

/// Worst absolute mismatch, over `splines` random splines, between the
/// splines built on derivative control points and numeric differentiation
/// of position evaluation. Five-point stencils are exact on a cubic piece,
/// so only rounding remains.
pub fn derivative_identity(splines: usize, seed: u64) -> f64 {
    let mut rng = rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..splines {
        let t_s = rng.gen_range(0.2..0.5);
        let s = random_spline(&mut rng, 4..=14, t_s);
        let (v, a, j) = s.derivative_ctrl_points().unwrap();
        let pos = |t: f64| s.evaluate(t, 0).unwrap();
        for _ in 0..10 {
            let k = rng.gen_range(0..s.segments());
            let u = rng.gen_range(0.3..0.7);
            let t = s.t0() + (k as f64 + u) * t_s;
            let from = |pts: &[Vec3], degree: usize| -> Vec3 {
                basis(degree, u).iter().enumerate().map(|(r, w)| pts[k + r] * *w).sum()
            };
            let h1 = 1e-3;
            let d1 = (pos(t - 2.0 * h1) - 8.0 * pos(t - h1) + 8.0 * pos(t + h1) - pos(t + 2.0 * h1)) / (12.0 * h1);
            let h = 1e-2;
            let d2 = (-pos(t + 2.0 * h) + 16.0 * pos(t + h) - 30.0 * pos(t) + 16.0 * pos(t - h) - pos(t - 2.0 * h)) / (12.0 * h * h);
            let d3 = (pos(t + 2.0 * h) - 2.0 * pos(t + h) + 2.0 * pos(t - h) - pos(t - 2.0 * h)) / (2.0 * h * h * h);
            worst = worst
                .max((from(&v, 2) - d1).amax())
                .max((from(&a, 1) - d2).amax())
                .max((from(&j, 0) - d3).amax());
        }
    }
    worst
}

/// Random world of linearly moving obstacles over an empty grid.
pub fn utvd_world(rng: &mut impl Rng) -> Environment {
    let horizon = TimeInterval::new(0.0, 40.0).unwrap();
    let obstacles = (0..6)
        .map(|_| {
            let c = Vec3::new(rng.gen_range(2.0..18.0), rng.gen_range(2.0..18.0), rng.gen_range(1.0..4.0));
            let v = uniform3(rng, -0.8, 0.8);
            let traj = [0, 1, 2].map(|a| Polynomial::new(vec![c[a], v[a]]));
            MovingObstacle::new(uniform3(rng, 0.2, 0.5), traj, horizon).unwrap()
        })
        .collect();
    Environment::new(empty_grid(), obstacles, horizon, 0.2).unwrap()
}

/// Collision-free timed path from `s` to `g` through up to three random
/// vertices with random waits, or `None` if the draw collides.
pub fn random_timed_path(rng: &mut impl Rng, env: &Environment, s: Vec3, g: Vec3, via: Option<&[Vec3]>) -> Option<TimedPath> {
    let bounds = DynamicBounds::default();
    let mut vertices = vec![s];
    match via {
        Some(v) => vertices.extend_from_slice(v),
        None => {
            for _ in 0..rng.gen_range(0..=3) {
                vertices.push(Vec3::new(rng.gen_range(1.0..19.0), rng.gen_range(1.0..19.0), rng.gen_range(0.6..4.4)));
            }
        }
    }
    vertices.push(g);
    let n = vertices.len();
    let mut arrive = vec![rng.gen_range(0.0..2.0)];
    let mut depart = Vec::with_capacity(n);
    let mut chosen = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let wait = if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..3.0) };
        depart.push(arrive[i] + wait);
        let travel = min_travel_time((vertices[i + 1] - vertices[i]).norm(), &bounds).unwrap();
        arrive.push(depart[i] + travel);
        let window = TimeInterval::new(arrive[i], arrive[i + 1]).unwrap();
        if !segment_free_during(env, &vertices[i], &vertices[i + 1], &window).unwrap() {
            return None;
        }
        chosen.push(window);
    }
    depart.push(arrive[n - 1]);
    if arrive[n - 1] >= env.horizon().hi {
        return None;
    }
    Some(TimedPath::new(vertices, arrive, depart, chosen, bounds).unwrap())
}

#[derive(Debug, Clone, Default)]
pub struct UtvdReport {
    pub pairs: usize,
    pub reflexive_failures: usize,
    pub symmetry_failures: usize,
    pub equivalent: usize,
    pub distinct: usize,
}

/// Reflexivity and symmetry over random valid pairs. Half of the pairs
/// share a route and differ only in timing.
pub fn utvd_properties(pairs: usize, samples: usize, seed: u64) -> UtvdReport {
    let mut rng = rng(seed);
    let mut rep = UtvdReport { pairs, ..Default::default() };
    let mut env = utvd_world(&mut rng);
    let mut done = 0;
    while done < pairs {
        if done % 20 == 0 {
            env = utvd_world(&mut rng);
        }
        let s = Vec3::new(rng.gen_range(1.0..19.0), rng.gen_range(1.0..19.0), rng.gen_range(0.6..4.4));
        let g = Vec3::new(rng.gen_range(1.0..19.0), rng.gen_range(1.0..19.0), rng.gen_range(0.6..4.4));
        let Some(a) = random_timed_path(&mut rng, &env, s, g, None) else { continue };
        let via: Vec<Vec3> = a.vertices[1..a.vertices.len() - 1].to_vec();
        let same_route = rng.gen_bool(0.5);
        let Some(b) = random_timed_path(&mut rng, &env, s, g, same_route.then_some(&via[..])) else { continue };
        done += 1;
        if !check_equiv(&a, &a, &env, samples).unwrap() || !check_equiv(&b, &b, &env, samples).unwrap() {
            rep.reflexive_failures += 1;
        }
        let ab = check_equiv(&a, &b, &env, samples).unwrap();
        if ab != check_equiv(&b, &a, &env, samples).unwrap() {
            rep.symmetry_failures += 1;
        }
        if ab {
            rep.equivalent += 1;
        } else {
            rep.distinct += 1;
        }
    }
    rep
}

/// Three copies of one straight route, delayed by 0 s (red), 0.2 s (blue)
/// and 4 s (green). A 1 m/s mover crosses the route inside the column
/// x in [5, 6] during t in [2, 3], after red and blue have passed and
/// before green arrives. Two more movers sweep nearby cells.
pub fn route_timing_scene() -> (Environment, TimedPath, TimedPath, TimedPath) {
    let horizon = TimeInterval::new(0.0, 20.0).unwrap();
    let semi = Vec3::repeat(0.2);
    let crossing = |y0: f64, vy: f64, lo: f64, hi: f64| {
        let traj = [Polynomial::constant(5.5), Polynomial::new(vec![y0, vy]), Polynomial::constant(1.0)];
        MovingObstacle::new(semi, traj, TimeInterval::new(lo, hi).unwrap()).unwrap()
    };
    // b rises through y in [1, 2] and a falls through y in [3, 2] during
    // [2, 3]; both park off the route.
    let b = crossing(0.5, 1.0, 1.5, 3.5);
    let a = crossing(3.0, -1.0, 2.0, 3.0);
    let c = MovingObstacle::new(
        semi,
        [Polynomial::new(vec![2.0, 1.0]), Polynomial::constant(4.5), Polynomial::constant(1.0)],
        horizon,
    )
    .unwrap();
    let grid = StaticGrid::empty(Vec3::zeros(), 0.25, [48, 24, 8]).unwrap();
    let env = Environment::new(grid, vec![a, b, c], horizon, 0.1).unwrap();
    let bounds = DynamicBounds::default();
    let route = |delay: f64| {
        let v = vec![Vec3::new(3.0, 1.5, 1.0), Vec3::new(9.0, 1.5, 1.0)];
        let travel = min_travel_time(6.0, &bounds).unwrap();
        TimedPath::new(
            v,
            vec![0.0, delay + travel],
            vec![delay, delay + travel],
            vec![TimeInterval::new(0.0, delay + travel).unwrap()],
            bounds,
        )
        .unwrap()
    };
    (env, route(0.0), route(0.2), route(4.0))
}
