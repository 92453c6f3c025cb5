//! Whitney decomposition of the complement of a d-set inside a dyadic
//! bounding box, and the subordinate smooth partition of unity.
//!
//! Cubes live on the global dyadic grid: at level L the cube with integer
//! index vector k is `Π_d [k_d 2^(-L), (k_d+1) 2^(-L)]`. A cube is accepted
//! exactly when its certified distance to the set is at least its diameter
//! `l = √n · side`; descent from a subdivided parent then forces
//! `dist ≤ 4l`, so every accepted cube carries the two-sided Whitney bound.
//! Cells that would need subdividing below the resolution floor are counted
//! and reported, never silently kept.

use crate::geometry::DSet;
use crate::{Error, Result};
use std::collections::{BTreeMap, HashMap};

/// Hard cap on the number of cells examined during construction.
pub const CUBE_CAP: usize = 1_000_000;

/// One accepted dyadic cube with its certified distance to the set.
#[derive(Debug, Clone, PartialEq)]
pub struct WhitneyCube {
    /// Dyadic level: side = 2^(-level); negative levels are big cubes.
    pub level: i32,
    /// Integer grid index per axis.
    pub index: Vec<i64>,
    pub side: f64,
    /// Diameter `l = √n · side`, the quantity the Whitney bound compares to.
    pub diam: f64,
    /// Certified lower bound on dist(Q, D); acceptance used this.
    pub dist_lo: f64,
    /// Certified upper bound on dist(Q, D).
    pub dist_hi: f64,
}

impl WhitneyCube {
    pub fn corner_lo(&self) -> Vec<f64> {
        self.index.iter().map(|&k| k as f64 * self.side).collect()
    }

    pub fn corner_hi(&self) -> Vec<f64> {
        self.index.iter().map(|&k| (k + 1) as f64 * self.side).collect()
    }

    pub fn center(&self) -> Vec<f64> {
        self.index
            .iter()
            .map(|&k| (k as f64 + 0.5) * self.side)
            .collect()
    }
}

/// The decomposition: accepted cubes (sorted by level, then index), the
/// expansion factor for the partition supports, the sub-unit index set I,
/// and the book-keeping of floor-discarded cells near the set.
#[derive(Debug, Clone)]
pub struct WhitneyDecomposition {
    pub set: DSet,
    pub n: usize,
    pub epsilon: f64,
    pub s_min: f64,
    pub bbox_lo: Vec<f64>,
    pub bbox_hi: Vec<f64>,
    pub cubes: Vec<WhitneyCube>,
    /// Indices into `cubes` with side ≤ 1: the extension sums over these.
    pub index_set: Vec<usize>,
    /// Cells at the resolution floor that still touched the set; for a
    /// full-dimensional set this includes the cells inside it.
    pub uncovered_cells: usize,
    /// Their total volume (the un-decomposed collar around the set).
    pub uncovered_volume: f64,
    levels: BTreeMap<i32, HashMap<Vec<i64>, usize>>,
}

fn val2(c: i64) -> u32 {
    if c == 0 {
        60
    } else {
        c.unsigned_abs().trailing_zeros()
    }
}

/// Build the Whitney decomposition of `bbox ∖ D`.
///
/// The bounding box must have integer corners (so cubes align with the
/// global dyadic grid) and contain the set strictly in its interior;
/// `s_min` is the resolution floor (a power of two) below which cells
/// touching the set are discarded and reported; `epsilon ∈ (0, ¼)` fixes
/// the support expansion used by the partition of unity.
pub fn build_whitney(
    set: &DSet,
    bbox_lo: &[f64],
    bbox_hi: &[f64],
    s_min: f64,
    epsilon: f64,
) -> Result<WhitneyDecomposition> {
    set.validate()?;
    let n = set.ambient_dim();
    if bbox_lo.len() != n || bbox_hi.len() != n {
        return Err(Error::Parameter(format!(
            "bounding box must have {n} coordinates per corner"
        )));
    }
    if !(epsilon > 0.0 && epsilon < 0.25) {
        return Err(Error::Parameter(format!(
            "expansion factor must lie in (0, 1/4), got {epsilon}"
        )));
    }
    if !(s_min > 0.0 && s_min.log2().fract() == 0.0) {
        return Err(Error::Parameter(format!(
            "resolution floor must be a power of two, got {s_min}"
        )));
    }
    let mut corners_int = Vec::with_capacity(2 * n);
    for d in 0..n {
        for &c in [bbox_lo[d], bbox_hi[d]].iter() {
            if c.fract() != 0.0 || c.abs() > 2f64.powi(40) {
                return Err(Error::Parameter(format!(
                    "bounding box corners must be integers on the dyadic grid, got {c}"
                )));
            }
        }
        if bbox_lo[d] >= bbox_hi[d] {
            return Err(Error::Parameter("bounding box must have positive extent".into()));
        }
        corners_int.push(bbox_lo[d] as i64);
        corners_int.push(bbox_hi[d] as i64);
    }
    let (hull_lo, hull_hi) = set.hull_box();
    for d in 0..n {
        if !(bbox_lo[d] < hull_lo[d] && hull_hi[d] < bbox_hi[d]) {
            return Err(Error::Geometry(format!(
                "set must lie strictly inside the bounding box: axis {d} has set range \
                 [{}, {}] vs box [{}, {}]",
                hull_lo[d], hull_hi[d], bbox_lo[d], bbox_hi[d]
            )));
        }
    }

    // root cells: the coarsest dyadic scale aligned with every corner
    let root_pow = corners_int.iter().map(|&c| val2(c)).min().unwrap().min(10);
    let root_level = -(root_pow as i32);
    let root_side = 2f64.powi(root_pow as i32);

    let max_level = -(s_min.log2()) as i32;
    if max_level < root_level {
        return Err(Error::Parameter(format!(
            "resolution floor {s_min} is coarser than the root scale {root_side}"
        )));
    }

    let mut stack: Vec<(i32, Vec<i64>)> = Vec::new();
    {
        let mut idx = vec![0i64; n];
        let ranges: Vec<(i64, i64)> = (0..n)
            .map(|d| {
                let lo = (bbox_lo[d] / root_side).round() as i64;
                let hi = (bbox_hi[d] / root_side).round() as i64;
                (lo, hi)
            })
            .collect();
        for d in 0..n {
            idx[d] = ranges[d].0;
        }
        'outer: loop {
            stack.push((root_level, idx.clone()));
            let mut d = 0;
            loop {
                if d == n {
                    break 'outer;
                }
                idx[d] += 1;
                if idx[d] < ranges[d].1 {
                    break;
                }
                idx[d] = ranges[d].0;
                d += 1;
            }
        }
    }

    let sqrt_n = (n as f64).sqrt();
    let mut cubes: Vec<WhitneyCube> = Vec::new();
    let mut uncovered_cells = 0usize;
    let mut examined = 0usize;
    while let Some((level, index)) = stack.pop() {
        examined += 1;
        if examined > CUBE_CAP {
            return Err(Error::Resource(format!(
                "decomposition exceeded {CUBE_CAP} examined cells; raise s_min or shrink the box"
            )));
        }
        let side = 2f64.powi(-level);
        let lo: Vec<f64> = index.iter().map(|&k| k as f64 * side).collect();
        let hi: Vec<f64> = index.iter().map(|&k| (k + 1) as f64 * side).collect();
        let (dist_lo, dist_hi) = set.dist_box(&lo, &hi);
        let diam = sqrt_n * side;
        if dist_lo >= diam {
            if dist_hi > 4.0 * diam + 1e-9 {
                // only reachable for root cells: descent from a subdivided
                // parent keeps dist ≤ dist_parent + diam_parent < 4l
                return Err(Error::Geometry(format!(
                    "cell at level {level}, index {index:?} sits at distance {dist_hi:.3e} \
                     > 4 * diameter {diam:.3e}; choose box corners with more dyadic \
                     alignment (larger power-of-two divisors) so root cells start coarser"
                )));
            }
            cubes.push(WhitneyCube { level, index, side, diam, dist_lo, dist_hi });
        } else if level >= max_level {
            uncovered_cells += 1;
        } else {
            for bits in 0..(1usize << n) {
                let child: Vec<i64> = (0..n)
                    .map(|d| 2 * index[d] + ((bits >> d) & 1) as i64)
                    .collect();
                stack.push((level + 1, child));
            }
        }
    }

    if cubes.is_empty() {
        return Err(Error::Resolution(format!(
            "no cube certifiable: every cell down to s_min = {s_min} touches the set"
        )));
    }

    cubes.sort_by(|a, b| (a.level, &a.index).cmp(&(b.level, &b.index)));
    let mut levels: BTreeMap<i32, HashMap<Vec<i64>, usize>> = BTreeMap::new();
    for (i, c) in cubes.iter().enumerate() {
        levels.entry(c.level).or_default().insert(c.index.clone(), i);
    }
    let index_set = cubes
        .iter()
        .enumerate()
        .filter(|(_, c)| c.side <= 1.0)
        .map(|(i, _)| i)
        .collect();
    let uncovered_volume = uncovered_cells as f64 * s_min.powi(n as i32);

    Ok(WhitneyDecomposition {
        set: set.clone(),
        n,
        epsilon,
        s_min,
        bbox_lo: bbox_lo.to_vec(),
        bbox_hi: bbox_hi.to_vec(),
        cubes,
        index_set,
        uncovered_cells,
        uncovered_volume,
        levels,
    })
}

impl WhitneyDecomposition {
    /// Indices of cubes whose expanded cube `Q* = (1+ε)Q` contains `x`,
    /// in ascending cube order. The expansion is below half a side, so at
    /// each level only the 3ⁿ grid neighbours of `x`'s cell can qualify.
    pub fn covering_cubes(&self, x: &[f64]) -> Vec<usize> {
        debug_assert_eq!(x.len(), self.n);
        let mut found = Vec::new();
        for (&level, grid) in &self.levels {
            let side = 2f64.powi(-level);
            let half_star = 0.5 * (1.0 + self.epsilon) * side;
            let base: Vec<i64> = x.iter().map(|&c| (c / side).floor() as i64).collect();
            // odometer over {-1,0,1}^n
            let mut offs = vec![-1i64; self.n];
            let mut carry = false;
            while !carry {
                let idx: Vec<i64> = (0..self.n).map(|d| base[d] + offs[d]).collect();
                if let Some(&ci) = grid.get(&idx) {
                    let c = self.cubes[ci].center();
                    let inside = (0..self.n).all(|d| (x[d] - c[d]).abs() <= half_star);
                    if inside {
                        found.push(ci);
                    }
                }
                let mut d = 0;
                loop {
                    if d == self.n {
                        carry = true;
                        break;
                    }
                    offs[d] += 1;
                    if offs[d] <= 1 {
                        break;
                    }
                    offs[d] = -1;
                    d += 1;
                }
            }
        }
        found.sort_unstable();
        found
    }

    /// Largest number of expanded cubes covering any of the given points
    /// (flattened, n per row): the empirical overlap constant N₀.
    pub fn max_overlap(&self, points: &[f64]) -> usize {
        let mut worst = 0;
        for p in points.chunks_exact(self.n) {
            worst = worst.max(self.covering_cubes(p).len());
        }
        worst
    }

    /// Largest ratio of sides among pairs of cubes whose expanded supports
    /// share any of the given sample points; 1-sided (≥ 1).
    pub fn side_comparability(&self, points: &[f64]) -> f64 {
        let mut worst = 1.0f64;
        for p in points.chunks_exact(self.n) {
            let cover = self.covering_cubes(p);
            for (a, &i) in cover.iter().enumerate() {
                for &j in &cover[a + 1..] {
                    let r = self.cubes[i].side / self.cubes[j].side;
                    worst = worst.max(r).max(1.0 / r);
                }
            }
        }
        worst
    }
}

/// Evaluator for the smooth partition of unity subordinate to the expanded
/// Whitney cubes.
pub struct PartitionOfUnity<'a> {
    decomp: &'a WhitneyDecomposition,
}

/// Build the partition evaluator: `φ_i = ζ_i / Σ_k ζ_k` with ζ_i a
/// tensor-product `exp(-1/(1-t²))` bump scaled to the expanded cube.
pub fn partition_of_unity(decomp: &WhitneyDecomposition) -> PartitionOfUnity<'_> {
    PartitionOfUnity { decomp }
}

fn bump(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (-1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

impl<'a> PartitionOfUnity<'a> {
    pub fn decomposition(&self) -> &'a WhitneyDecomposition {
        self.decomp
    }

    fn zeta(&self, cube_idx: usize, x: &[f64]) -> f64 {
        let c = &self.decomp.cubes[cube_idx];
        let half_star = 0.5 * (1.0 + self.decomp.epsilon) * c.side;
        let center = c.center();
        let mut z = 1.0;
        for d in 0..self.decomp.n {
            z *= bump((x[d] - center[d]) / half_star);
            if z == 0.0 {
                return 0.0;
            }
        }
        z
    }

    /// All nonzero partition values at `x` as `(cube index, φ_i(x))`,
    /// sorted by cube index; the values sum to 1.
    ///
    /// A point where every ζ vanishes is not covered — it lies in the
    /// resolution collar around the set or outside the decomposed box.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<(usize, f64)>> {
        let cover = self.decomp.covering_cubes(x);
        let mut vals: Vec<(usize, f64)> = Vec::with_capacity(cover.len());
        let mut total = 0.0;
        for &ci in &cover {
            let z = self.zeta(ci, x);
            if z > 0.0 {
                vals.push((ci, z));
                total += z;
            }
        }
        if total <= 0.0 {
            return Err(Error::Coverage(format!(
                "point {x:?} is not covered by any expanded Whitney cube \
                 (resolution collar around the set, or outside the box)"
            )));
        }
        for v in &mut vals {
            v.1 /= total;
        }
        Ok(vals)
    }

    /// Empirical gradient constant: `max |∂φ_i(x)| · l_i` over the sample
    /// points and all active cubes, via central differences. The Whitney
    /// bound asserts this is O(1).
    pub fn gradient_constant(&self, points: &[f64]) -> Result<f64> {
        let n = self.decomp.n;
        let mut worst = 0.0f64;
        for p in points.chunks_exact(n) {
            let cover = self.decomp.covering_cubes(p);
            if cover.is_empty() {
                continue;
            }
            let min_side = cover
                .iter()
                .map(|&ci| self.decomp.cubes[ci].side)
                .fold(f64::INFINITY, f64::min);
            let h = 1e-6 * min_side;
            for d in 0..n {
                let mut xp = p.to_vec();
                let mut xm = p.to_vec();
                xp[d] += h;
                xm[d] -= h;
                let vp = self.eval(&xp);
                let vm = self.eval(&xm);
                let (vp, vm) = match (vp, vm) {
                    (Ok(a), Ok(b)) => (a, b),
                    // stepping into the collar: skip this sample direction
                    _ => continue,
                };
                let lookup = |vals: &[(usize, f64)], ci: usize| {
                    vals.iter()
                        .find(|(i, _)| *i == ci)
                        .map(|(_, v)| *v)
                        .unwrap_or(0.0)
                };
                for &ci in &cover {
                    let grad = (lookup(&vp, ci) - lookup(&vm, ci)) / (2.0 * h);
                    worst = worst.max(grad.abs() * self.decomp.cubes[ci].diam);
                }
            }
        }
        Ok(worst)
    }
}
