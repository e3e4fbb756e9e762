//! Randomized benchmark worlds at three clutter levels.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Environment, MovingObstacle, StaticGrid, TimeInterval};
use crate::poly::Polynomial;
use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityClass {
    Sparse,
    Moderate,
    Dense,
}

impl DensityClass {
    pub const ALL: [DensityClass; 3] = [DensityClass::Sparse, DensityClass::Moderate, DensityClass::Dense];

    /// Range of the occupied-cell ratio.
    pub fn density_range(self) -> (f64, f64) {
        match self {
            DensityClass::Sparse => (0.0, 0.01),
            DensityClass::Moderate => (0.05, 0.1),
            DensityClass::Dense => (0.15, 0.2),
        }
    }

    /// Inclusive range of the number of moving obstacles.
    pub fn obstacle_count_range(self) -> (usize, usize) {
        match self {
            DensityClass::Sparse => (0, 20),
            DensityClass::Moderate => (20, 40),
            DensityClass::Dense => (40, 60),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DensityClass::Sparse => "sparse",
            DensityClass::Moderate => "moderate",
            DensityClass::Dense => "dense",
        }
    }
}

impl std::fmt::Display for DensityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DensityClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sparse" => Ok(DensityClass::Sparse),
            "moderate" => Ok(DensityClass::Moderate),
            "dense" => Ok(DensityClass::Dense),
            other => Err(Error::Config(format!(
                "unknown density class {other:?}; expected sparse, moderate or dense"
            ))),
        }
    }
}

/// Knobs for [`generate_random_env`]. Sizes and speeds are our own
/// defaults; only the density and obstacle-count ranges are fixed per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub class: DensityClass,
    pub density_range: (f64, f64),
    pub obstacle_count: (usize, usize),
    /// Workspace extent in meters, anchored at the origin.
    pub size: Vec3,
    pub resolution: f64,
    pub horizon: f64,
    pub robot_radius: f64,
    /// Per-axis speed cap for moving obstacles.
    pub v_obs_max: f64,
    pub semi_axis_xy: (f64, f64),
    pub semi_axis_z: (f64, f64),
    /// Half-width (boxes) or radius (cylinders) of static obstacles.
    pub static_half_width: (f64, f64),
    pub static_height: (f64, f64),
}

impl GeneratorParams {
    pub fn new(class: DensityClass) -> Self {
        Self {
            class,
            density_range: class.density_range(),
            obstacle_count: class.obstacle_count_range(),
            size: Vec3::new(20.0, 20.0, 5.0),
            resolution: 0.2,
            horizon: 40.0,
            robot_radius: 0.2,
            v_obs_max: 2.0,
            semi_axis_xy: (0.15, 0.4),
            semi_axis_z: (0.3, 0.7),
            static_half_width: (0.25, 0.7),
            static_height: (1.0, 5.0),
        }
    }
}

/// Builds a deterministic random world for `seed`.
pub fn generate_random_env(params: &GeneratorParams, seed: u64) -> Result<Environment> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = [0, 1, 2].map(|a| (params.size[a] / params.resolution).round() as usize);
    let occupied = place_static(params, dims, &mut rng);
    let grid = StaticGrid::new(Vec3::zeros(), params.resolution, dims, occupied)?;

    let horizon = TimeInterval::new(0.0, params.horizon)?;
    let (nlo, nhi) = params.obstacle_count;
    let count = rng.gen_range(nlo..=nhi);
    let upper = grid.upper();
    let obstacles = (0..count)
        .map(|_| random_mover(params, &upper, horizon, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    Environment::new(grid, obstacles, horizon, params.robot_radius)
}

fn place_static(params: &GeneratorParams, dims: [usize; 3], rng: &mut ChaCha8Rng) -> Vec<bool> {
    let total = dims.iter().product::<usize>();
    let mut occ = vec![false; total];
    let (dlo, dhi) = params.density_range;
    let target = if dhi > dlo { rng.gen_range(dlo..dhi) } else { dlo };
    let mut filled = 0usize;
    let res = params.resolution;
    let mut attempts = 0;
    while (filled as f64) < target * total as f64 && attempts < 20_000 {
        attempts += 1;
        let hw = rng.gen_range(params.static_half_width.0..=params.static_half_width.1);
        let hy = rng.gen_range(params.static_half_width.0..=params.static_half_width.1);
        let height = rng.gen_range(params.static_height.0..=params.static_height.1).min(params.size.z);
        let cx = rng.gen_range(0.0..params.size.x);
        let cy = rng.gen_range(0.0..params.size.y);
        let cylinder = rng.gen_bool(0.6);
        let mut cells = Vec::new();
        let kmax = ((height / res).round() as usize).min(dims[2]);
        for j in 0..dims[1] {
            let y = (j as f64 + 0.5) * res;
            for i in 0..dims[0] {
                let x = (i as f64 + 0.5) * res;
                let inside = if cylinder {
                    (x - cx).hypot(y - cy) <= hw
                } else {
                    (x - cx).abs() <= hw && (y - cy).abs() <= hy
                };
                if inside {
                    cells.extend((0..kmax).map(|k| i + dims[0] * (j + dims[1] * k)));
                }
            }
        }
        let added = cells.iter().filter(|&&c| !occ[c]).count();
        if added == 0 || (filled + added) as f64 > dhi * total as f64 {
            continue;
        }
        for c in cells {
            occ[c] = true;
        }
        filled += added;
    }
    occ
}

fn random_mover(params: &GeneratorParams, upper: &Vec3, horizon: TimeInterval, rng: &mut ChaCha8Rng) -> Result<MovingObstacle> {
    let sxy = params.semi_axis_xy;
    let semi = Vec3::new(
        rng.gen_range(sxy.0..=sxy.1),
        rng.gen_range(sxy.0..=sxy.1),
        rng.gen_range(params.semi_axis_z.0..=params.semi_axis_z.1),
    );
    let degree = rng.gen_range(3..=5usize);
    let span = horizon.length();
    let traj = [0, 1, 2].map(|axis| {
        let lo = semi[axis];
        let hi = upper[axis] - semi[axis];
        let base = if hi > lo { rng.gen_range(lo..hi) } else { 0.5 * (lo + hi) };
        let room = (base - lo).min(hi - base).max(0.0);
        let amps: Vec<f64> = (1..=degree).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sum_abs: f64 = amps.iter().map(|a: &f64| a.abs()).sum();
        // Markov's inequality bounds |T_j'| by j^2 on [-1, 1].
        let sum_markov: f64 = amps.iter().enumerate().map(|(j, a)| a.abs() * ((j + 1) * (j + 1)) as f64).sum();
        let speed = rng.gen_range(0.3..=1.0) * params.v_obs_max;
        let scale = (room / sum_abs).min(speed * span / (2.0 * sum_markov));
        let mut cheb = vec![base];
        cheb.extend(amps.iter().map(|a| a * scale));
        Polynomial::new(chebyshev_to_local(&cheb, span))
    });
    MovingObstacle::new(semi, traj, horizon)
}

/// Converts `sum c_j T_j(tau)` with `tau = 2 s / span - 1` into monomial
/// coefficients in `s`, lowest degree first.
fn chebyshev_to_local(cheb: &[f64], span: f64) -> Vec<f64> {
    let n = cheb.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut t = vec![0.0; n];
        if j < 2 {
            t[j] = 1.0;
        } else {
            for k in 0..n - 1 {
                t[k + 1] += 2.0 * basis[j - 1][k];
            }
            for k in 0..n {
                t[k] -= basis[j - 2][k];
            }
        }
        basis.push(t);
    }
    let mut in_tau = vec![0.0; n];
    for (c, t) in cheb.iter().zip(&basis) {
        for k in 0..n {
            in_tau[k] += c * t[k];
        }
    }
    // Substitute tau = a s + b via Horner.
    let (a, b) = (2.0 / span, -1.0);
    let mut out = vec![0.0; n];
    for &c in in_tau.iter().rev() {
        let mut next = vec![0.0; n];
        for k in 0..n {
            next[k] += b * out[k];
            if k + 1 < n {
                next[k + 1] += a * out[k];
            }
        }
        next[0] += c;
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::scenario::Scenario;

    #[test]
    fn chebyshev_conversion_matches_recurrence() {
        let cheb = [0.5, -1.0, 0.25, 2.0, -0.75, 0.1];
        let span = 8.0;
        let local = Polynomial::new(chebyshev_to_local(&cheb, span));
        for k in 0..=16 {
            let s = span * k as f64 / 16.0;
            let tau = 2.0 * s / span - 1.0;
            let mut t = [1.0, tau, 0.0, 0.0, 0.0, 0.0];
            for j in 2..6 {
                t[j] = 2.0 * tau * t[j - 1] - t[j - 2];
            }
            let expect: f64 = cheb.iter().zip(t).map(|(c, tj)| c * tj).sum();
            assert!((local.eval(s) - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn unknown_class_is_a_config_error() {
        assert!(matches!("crowded".parse::<DensityClass>(), Err(Error::Config(_))));
        assert_eq!("dense".parse::<DensityClass>().unwrap(), DensityClass::Dense);
    }

    #[test]
    fn sparse_seed_one_respects_ranges() {
        let env = generate_random_env(&GeneratorParams::new(DensityClass::Sparse), 1).unwrap();
        let d = env.grid().density();
        assert!((0.0..=0.01).contains(&d), "density {d}");
        assert!(env.obstacles().len() <= 20);
    }

    #[test]
    fn dense_seed_seven_respects_ranges() {
        let env = generate_random_env(&GeneratorParams::new(DensityClass::Dense), 7).unwrap();
        let d = env.grid().density();
        assert!((0.15..=0.2).contains(&d), "density {d}");
        assert!((40..=60).contains(&env.obstacles().len()));
    }

    #[test]
    fn moderate_density_in_range_across_seeds() {
        for seed in 0..5 {
            let env = generate_random_env(&GeneratorParams::new(DensityClass::Moderate), seed).unwrap();
            let d = env.grid().density();
            assert!((0.05..=0.1).contains(&d), "seed {seed} density {d}");
            assert!((20..=40).contains(&env.obstacles().len()));
        }
    }

    #[test]
    fn movers_stay_inside_and_respect_speed_cap() {
        let params = GeneratorParams::new(DensityClass::Dense);
        let env = generate_random_env(&params, 3).unwrap();
        let upper = env.grid().upper();
        for o in env.obstacles() {
            assert!(o.max_axis_speed().unwrap() <= params.v_obs_max + 1e-9);
            let (lo, hi) = o.center_bounds(&env.horizon()).unwrap();
            for a in 0..3 {
                assert!(lo[a] >= -1e-9 && hi[a] <= upper[a] + 1e-9);
            }
        }
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let params = GeneratorParams::new(DensityClass::Moderate);
        let a = Scenario::from_env(&generate_random_env(&params, 42).unwrap()).to_json().unwrap();
        let b = Scenario::from_env(&generate_random_env(&params, 42).unwrap()).to_json().unwrap();
        assert_eq!(a, b);
        let c = Scenario::from_env(&generate_random_env(&params, 43).unwrap()).to_json().unwrap();
        assert_ne!(a, c);
    }
}
