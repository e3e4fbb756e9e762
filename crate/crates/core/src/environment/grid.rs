//! Static 3D occupancy grid with clearance queries.
//!
//! Space outside the grid bounds counts as occupied. Two derived tables are
//! built at construction: a summed-volume table for O(1) occupied-cell counts
//! over index boxes, and a capped Chebyshev (chessboard) distance field used
//! to accept most clearance queries without scanning neighbor cells.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec3};

/// Chessboard distances are computed up to this many cells.
const CLEARANCE_CAP: u8 = 8;

/// Axis-aligned block of cells, `lo` inclusive and `hi` exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellBox {
    pub lo: [usize; 3],
    pub hi: [usize; 3],
}

#[derive(Debug, Clone)]
pub struct StaticGrid {
    origin: Vec3,
    resolution: f64,
    dims: [usize; 3],
    occupied: Vec<bool>,
    prefix: Vec<u32>,
    clearance: Vec<u8>,
}

impl StaticGrid {
    pub fn new(origin: Vec3, resolution: f64, dims: [usize; 3], occupied: Vec<bool>) -> Result<Self> {
        if !(resolution > 0.0) || !resolution.is_finite() {
            return Err(Error::InvalidArgument(format!("grid resolution {resolution} must be positive")));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidArgument(format!("grid dims {dims:?} must be positive")));
        }
        let n = dims[0] * dims[1] * dims[2];
        if occupied.len() != n {
            return Err(Error::InvalidArgument(format!(
                "occupancy has {} cells, dims require {n}",
                occupied.len()
            )));
        }
        let mut grid = Self {
            origin,
            resolution,
            dims,
            occupied,
            prefix: Vec::new(),
            clearance: Vec::new(),
        };
        grid.prefix = grid.build_prefix();
        grid.clearance = grid.build_clearance();
        Ok(grid)
    }

    pub fn empty(origin: Vec3, resolution: f64, dims: [usize; 3]) -> Result<Self> {
        let n = dims.iter().product();
        Self::new(origin, resolution, dims, vec![false; n])
    }

    pub fn from_boxes(origin: Vec3, resolution: f64, dims: [usize; 3], boxes: &[CellBox]) -> Result<Self> {
        let mut occ = vec![false; dims.iter().product()];
        for b in boxes {
            if (0..3).any(|a| b.lo[a] >= b.hi[a] || b.hi[a] > dims[a]) {
                return Err(Error::InvalidArgument(format!("cell box {b:?} outside dims {dims:?}")));
            }
            for k in b.lo[2]..b.hi[2] {
                for j in b.lo[1]..b.hi[1] {
                    for i in b.lo[0]..b.hi[0] {
                        occ[i + dims[0] * (j + dims[1] * k)] = true;
                    }
                }
            }
        }
        Self::new(origin, resolution, dims, occ)
    }

    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn upper(&self) -> Vec3 {
        self.origin + Vec3::new(self.dims[0] as f64, self.dims[1] as f64, self.dims[2] as f64) * self.resolution
    }

    pub fn cell_count(&self) -> usize {
        self.occupied.len()
    }

    pub fn occupied_count(&self) -> usize {
        *self.prefix.last().unwrap_or(&0) as usize
    }

    /// Ratio of occupied cells to all cells.
    pub fn density(&self) -> f64 {
        self.occupied_count() as f64 / self.cell_count() as f64
    }

    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        let hi = self.upper();
        (0..3).all(|a| p[a] >= self.origin[a] && p[a] <= hi[a])
    }

    pub fn cell_of(&self, p: &Vec3) -> Option<[usize; 3]> {
        if !self.contains(p) {
            return None;
        }
        let mut c = [0usize; 3];
        for a in 0..3 {
            let f = ((p[a] - self.origin[a]) / self.resolution).floor() as isize;
            c[a] = f.clamp(0, self.dims[a] as isize - 1) as usize;
        }
        Some(c)
    }

    /// Occupancy by signed index; anything outside the grid is occupied.
    pub fn is_occupied(&self, i: isize, j: isize, k: isize) -> bool {
        if i < 0 || j < 0 || k < 0 {
            return true;
        }
        let (i, j, k) = (i as usize, j as usize, k as usize);
        if i >= self.dims[0] || j >= self.dims[1] || k >= self.dims[2] {
            return true;
        }
        self.occupied[self.index(i, j, k)]
    }

    pub fn cell_center(&self, c: [usize; 3]) -> Vec3 {
        self.origin + Vec3::new(c[0] as f64 + 0.5, c[1] as f64 + 0.5, c[2] as f64 + 0.5) * self.resolution
    }

    fn cell_bounds(&self, i: isize, j: isize, k: isize) -> (Vec3, Vec3) {
        let lo = self.origin + Vec3::new(i as f64, j as f64, k as f64) * self.resolution;
        (lo, lo + Vec3::repeat(self.resolution))
    }

    /// Occupied cells in the index box `lo..hi` (exclusive), all in range.
    fn count_occupied(&self, lo: [usize; 3], hi: [usize; 3]) -> u32 {
        let (nx, ny) = (self.dims[0] + 1, self.dims[1] + 1);
        let at = |i: usize, j: usize, k: usize| self.prefix[i + nx * (j + ny * k)] as i64;
        let s = at(hi[0], hi[1], hi[2]) - at(lo[0], hi[1], hi[2]) - at(hi[0], lo[1], hi[2]) - at(hi[0], hi[1], lo[2])
            + at(lo[0], lo[1], hi[2])
            + at(lo[0], hi[1], lo[2])
            + at(hi[0], lo[1], lo[2])
            - at(lo[0], lo[1], lo[2]);
        s as u32
    }

    fn build_prefix(&self) -> Vec<u32> {
        let [dx, dy, dz] = self.dims;
        let (nx, ny) = (dx + 1, dy + 1);
        let mut p = vec![0u32; nx * ny * (dz + 1)];
        for k in 1..=dz {
            for j in 1..=dy {
                for i in 1..=dx {
                    let v = self.occupied[self.index(i - 1, j - 1, k - 1)] as i64;
                    let at = |i: usize, j: usize, k: usize| p[i + nx * (j + ny * k)] as i64;
                    let s = v + at(i - 1, j, k) + at(i, j - 1, k) + at(i, j, k - 1)
                        - at(i - 1, j - 1, k)
                        - at(i - 1, j, k - 1)
                        - at(i, j - 1, k - 1)
                        + at(i - 1, j - 1, k - 1);
                    p[i + nx * (j + ny * k)] = s as u32;
                }
            }
        }
        p
    }

    /// Chessboard distance in cells to the nearest occupied in-grid cell,
    /// saturating at `CLEARANCE_CAP`.
    fn build_clearance(&self) -> Vec<u8> {
        let [dx, dy, dz] = self.dims;
        let cap = CLEARANCE_CAP as usize;
        let mut d: Vec<u8> = self.occupied.iter().map(|&o| if o { 0 } else { CLEARANCE_CAP }).collect();
        let strides = [1, dx, dx * dy];
        for axis in 0..3 {
            let len = self.dims[axis];
            let stride = strides[axis];
            let mut line = vec![0u8; len];
            let mut out = vec![0u8; len];
            for k in 0..dz {
                for j in 0..dy {
                    for i in 0..dx {
                        let c = [i, j, k];
                        if c[axis] != 0 {
                            continue;
                        }
                        let base = self.index(i, j, k);
                        for (t, v) in line.iter_mut().enumerate() {
                            *v = d[base + t * stride];
                        }
                        for t in 0..len {
                            let mut best = line[t];
                            let lo = t.saturating_sub(cap);
                            let hi = (t + cap).min(len - 1);
                            for (u, &lv) in line.iter().enumerate().take(hi + 1).skip(lo) {
                                let gap = t.abs_diff(u) as u8;
                                best = best.min(lv.max(gap));
                            }
                            out[t] = best;
                        }
                        for t in 0..len {
                            d[base + t * stride] = out[t];
                        }
                    }
                }
            }
        }
        d
    }

    /// Distance from `p` to the region outside the grid bounds.
    fn boundary_distance(&self, p: &Vec3) -> f64 {
        let hi = self.upper();
        (0..3)
            .map(|a| (p[a] - self.origin[a]).min(hi[a] - p[a]))
            .fold(f64::INFINITY, f64::min)
    }

    /// True when every point within `radius` of `p` is inside the grid and
    /// unoccupied, and the cell holding `p` is itself free.
    pub fn point_clear(&self, p: &Vec3, radius: f64) -> bool {
        let Some(c) = self.cell_of(p) else {
            return false;
        };
        if self.boundary_distance(p) < radius {
            return false;
        }
        let m = self.clearance[self.index(c[0], c[1], c[2])];
        if m == 0 {
            return false;
        }
        if (m as f64 - 1.0) * self.resolution >= radius {
            return true;
        }
        let reach = (radius / self.resolution).ceil() as isize;
        let ci = [c[0] as isize, c[1] as isize, c[2] as isize];
        for k in (ci[2] - reach).max(0)..=(ci[2] + reach).min(self.dims[2] as isize - 1) {
            for j in (ci[1] - reach).max(0)..=(ci[1] + reach).min(self.dims[1] as isize - 1) {
                for i in (ci[0] - reach).max(0)..=(ci[0] + reach).min(self.dims[0] as isize - 1) {
                    if !self.occupied[self.index(i as usize, j as usize, k as usize)] {
                        continue;
                    }
                    let (lo, hi) = self.cell_bounds(i, j, k);
                    if point_box_distance(p, &lo, &hi) < radius {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Conservative swept-sphere test. The endpoints are checked with
    /// `radius`; the segment is cut into pieces of at most an eighth of the
    /// resolution and each piece midpoint is checked with the radius grown
    /// by half the piece length, which covers every point in between.
    pub fn segment_clear(&self, p1: &Vec3, p2: &Vec3, radius: f64) -> bool {
        if !self.point_clear(p1, radius) || !self.point_clear(p2, radius) {
            return false;
        }
        let len = (p2 - p1).norm();
        if len == 0.0 {
            return true;
        }
        let n = ((len / self.segment_step()).ceil() as usize).max(1);
        let pad = 0.5 * len / n as f64;
        (0..n).all(|s| {
            let p = p1 + (p2 - p1) * ((s as f64 + 0.5) / n as f64);
            self.point_clear(&p, radius + pad)
        })
    }

    /// Longest piece length used by [`segment_clear`](Self::segment_clear).
    pub fn segment_step(&self) -> f64 {
        self.resolution / 8.0
    }

    /// True when the box `[lo, hi]` grown by `radius` (rounded corners)
    /// stays inside the grid and touches no occupied cell.
    pub fn box_clear(&self, lo: &Vec3, hi: &Vec3, radius: f64) -> bool {
        let g_lo = self.origin;
        let g_hi = self.upper();
        if (0..3).any(|a| lo[a] - radius < g_lo[a] || hi[a] + radius > g_hi[a]) {
            return false;
        }
        let mut ilo = [0usize; 3];
        let mut ihi = [0usize; 3];
        for a in 0..3 {
            let l = ((lo[a] - radius - g_lo[a]) / self.resolution).floor() as isize;
            let h = ((hi[a] + radius - g_lo[a]) / self.resolution).ceil() as isize;
            ilo[a] = l.clamp(0, self.dims[a] as isize) as usize;
            ihi[a] = h.clamp(0, self.dims[a] as isize) as usize;
            if ilo[a] >= ihi[a] {
                return true;
            }
        }
        if self.count_occupied(ilo, ihi) == 0 {
            return true;
        }
        for k in ilo[2]..ihi[2] {
            for j in ilo[1]..ihi[1] {
                for i in ilo[0]..ihi[0] {
                    if !self.occupied[self.index(i, j, k)] {
                        continue;
                    }
                    let (clo, chi) = self.cell_bounds(i as isize, j as isize, k as isize);
                    let interiors_overlap = (0..3).all(|a| clo[a] < hi[a] && chi[a] > lo[a]);
                    if interiors_overlap || box_box_distance(lo, hi, &clo, &chi) < radius {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Greedy decomposition of the occupied cells into disjoint blocks,
    /// scanning x fastest and growing each block along x, then y, then z.
    pub fn to_boxes(&self) -> Vec<CellBox> {
        let [dx, dy, dz] = self.dims;
        let mut claimed = vec![false; self.occupied.len()];
        let mut boxes = Vec::new();
        let free_at = |claimed: &Vec<bool>, i: usize, j: usize, k: usize| {
            let idx = i + dx * (j + dy * k);
            self.occupied[idx] && !claimed[idx]
        };
        for k in 0..dz {
            for j in 0..dy {
                for i in 0..dx {
                    if !free_at(&claimed, i, j, k) {
                        continue;
                    }
                    let mut i1 = i + 1;
                    while i1 < dx && free_at(&claimed, i1, j, k) {
                        i1 += 1;
                    }
                    let mut j1 = j + 1;
                    while j1 < dy && (i..i1).all(|x| free_at(&claimed, x, j1, k)) {
                        j1 += 1;
                    }
                    let mut k1 = k + 1;
                    while k1 < dz && (j..j1).all(|y| (i..i1).all(|x| free_at(&claimed, x, y, k1))) {
                        k1 += 1;
                    }
                    for z in k..k1 {
                        for y in j..j1 {
                            for x in i..i1 {
                                claimed[x + dx * (y + dy * z)] = true;
                            }
                        }
                    }
                    boxes.push(CellBox { lo: [i, j, k], hi: [i1, j1, k1] });
                }
            }
        }
        boxes
    }
}

pub(crate) fn point_box_distance(p: &Vec3, lo: &Vec3, hi: &Vec3) -> f64 {
    let mut s = 0.0;
    for a in 0..3 {
        let d = (lo[a] - p[a]).max(0.0).max(p[a] - hi[a]);
        s += d * d;
    }
    s.sqrt()
}

fn box_box_distance(alo: &Vec3, ahi: &Vec3, blo: &Vec3, bhi: &Vec3) -> f64 {
    let mut s = 0.0;
    for a in 0..3 {
        let d = (blo[a] - ahi[a]).max(0.0).max(alo[a] - bhi[a]);
        s += d * d;
    }
    s.sqrt()
}
