//! d-sets and their measures: axis cubes, segments, IFS Cantor sets and a
//! single point, each with an exact or certified distance oracle, a
//! deterministic measure quadrature, empirical verification of the two-sided
//! ball-mass property, and seeded sampling of points on the set.

use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Hard cap on quadrature nodes; all-pairs seminorms are O(M²).
pub const NODE_CAP: usize = 200_000;

/// A compact set in ℝⁿ carrying its natural d-measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "set", rename_all = "kebab-case")]
pub enum DSet {
    /// `[0,1]^n` with Lebesgue measure; d = n.
    Cube { n: usize },
    /// `[0,1] × {0}^(n-1)` with arc length; d = 1.
    Segment { n: usize },
    /// Attractor of the maps `f_i(x) = ρx + i(1−ρ)/(b−1)`, i = 0..b−1, on
    /// the first axis, carrying the balanced self-similar measure;
    /// d = ln b / ln(1/ρ).
    Cantor {
        rho: f64,
        b: usize,
        #[serde(default = "default_ambient")]
        ambient: usize,
    },
    /// The origin of ℝⁿ with a unit point mass; d = 0. Useful as the
    /// simplest Whitney target even though it is not a d-set with d > 0.
    Point { n: usize },
}

fn default_ambient() -> usize {
    1
}

impl DSet {
    pub fn validate(&self) -> Result<()> {
        match self {
            DSet::Cube { n } | DSet::Segment { n } | DSet::Point { n } => {
                if *n == 0 {
                    return Err(Error::Parameter("ambient dimension must be at least 1".into()));
                }
            }
            DSet::Cantor { rho, b, ambient } => {
                if *ambient == 0 {
                    return Err(Error::Parameter("ambient dimension must be at least 1".into()));
                }
                if *b < 2 {
                    return Err(Error::Parameter(format!(
                        "cantor branch count must be at least 2, got {b}"
                    )));
                }
                if !(*rho > 0.0 && *rho < 1.0) {
                    return Err(Error::Parameter(format!(
                        "cantor contraction must lie in (0, 1), got {rho}"
                    )));
                }
                if *rho * *b as f64 > 1.0 + 1e-12 {
                    return Err(Error::Parameter(format!(
                        "cantor cells overlap: need rho * b <= 1, got {rho} * {b}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            DSet::Cube { n } | DSet::Segment { n } | DSet::Point { n } => *n,
            DSet::Cantor { ambient, .. } => *ambient,
        }
    }

    pub fn hausdorff_dim(&self) -> f64 {
        match self {
            DSet::Cube { n } => *n as f64,
            DSet::Segment { .. } => 1.0,
            DSet::Cantor { rho, b, .. } => (*b as f64).ln() / (1.0 / rho).ln(),
            DSet::Point { .. } => 0.0,
        }
    }

    /// Tight axis-aligned bounding box (lo, hi) of the set.
    pub fn hull_box(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.ambient_dim();
        match self {
            DSet::Cube { .. } => (vec![0.0; n], vec![1.0; n]),
            DSet::Segment { .. } | DSet::Cantor { .. } => {
                let mut hi = vec![0.0; n];
                hi[0] = 1.0;
                (vec![0.0; n], hi)
            }
            DSet::Point { .. } => (vec![0.0; n], vec![0.0; n]),
        }
    }

    /// Euclidean distance from a point to the set: exact for cube, segment
    /// and point; certified to 1e-12 for Cantor sets.
    pub fn distance(&self, x: &[f64]) -> f64 {
        let (lo, hi) = self.dist_box(x, x);
        0.5 * (lo + hi)
    }

    /// Certified bounds `(lo, hi)` with `lo ≤ dist(box, D) ≤ hi` for an axis
    /// box `[blo, bhi]`. Exact (lo = hi) except for Cantor sets, where the
    /// branch-and-bound gap is at most ~1e-12.
    pub fn dist_box(&self, blo: &[f64], bhi: &[f64]) -> (f64, f64) {
        let n = self.ambient_dim();
        debug_assert_eq!(blo.len(), n);
        debug_assert_eq!(bhi.len(), n);
        // per-coordinate distance from [blo_i, bhi_i] to [slo_i, shi_i]
        let coord_gap = |bl: f64, bh: f64, sl: f64, sh: f64| -> f64 {
            if bh < sl {
                sl - bh
            } else if bl > sh {
                bl - sh
            } else {
                0.0
            }
        };
        match self {
            DSet::Cube { .. } => {
                let mut sq = 0.0;
                for i in 0..n {
                    let g = coord_gap(blo[i], bhi[i], 0.0, 1.0);
                    sq += g * g;
                }
                let d = sq.sqrt();
                (d, d)
            }
            DSet::Segment { .. } => {
                let mut sq = 0.0;
                for i in 0..n {
                    let (sl, sh) = if i == 0 { (0.0, 1.0) } else { (0.0, 0.0) };
                    let g = coord_gap(blo[i], bhi[i], sl, sh);
                    sq += g * g;
                }
                let d = sq.sqrt();
                (d, d)
            }
            DSet::Point { .. } => {
                let mut sq = 0.0;
                for i in 0..n {
                    let g = coord_gap(blo[i], bhi[i], 0.0, 0.0);
                    sq += g * g;
                }
                let d = sq.sqrt();
                (d, d)
            }
            DSet::Cantor { rho, b, .. } => {
                let mut off_sq = 0.0;
                for i in 1..n {
                    let g = coord_gap(blo[i], bhi[i], 0.0, 0.0);
                    off_sq += g * g;
                }
                let (xlo, xhi) = cantor_interval_distance(*rho, *b, blo[0], bhi[0], 5e-13);
                (
                    (xlo * xlo + off_sq).sqrt(),
                    (xhi * xhi + off_sq).sqrt(),
                )
            }
        }
    }

    /// `count` points of the set, deterministically from `seed`, flattened
    /// row-major (`count * ambient_dim` values). Cantor points are left
    /// endpoints of deep cells, hence lie on the set exactly.
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<f64> {
        let n = self.ambient_dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count * n);
        match self {
            DSet::Cube { .. } => {
                for _ in 0..count {
                    for _ in 0..n {
                        out.push(rng.gen::<f64>());
                    }
                }
            }
            DSet::Segment { .. } => {
                for _ in 0..count {
                    out.push(rng.gen::<f64>());
                    out.extend(std::iter::repeat(0.0).take(n - 1));
                }
            }
            DSet::Point { .. } => {
                out.extend(std::iter::repeat(0.0).take(count * n));
            }
            DSet::Cantor { rho, b, .. } => {
                // enough digits that the cell is far below one ulp
                let depth = (52.0 * std::f64::consts::LN_2 / (1.0 / rho).ln()).ceil() as usize + 1;
                let step = (1.0 - rho) / (*b as f64 - 1.0);
                for _ in 0..count {
                    let mut x = 0.0f64;
                    for _ in 0..depth {
                        let digit = rng.gen_range(0..*b) as f64;
                        x = rho * x + digit * step;
                    }
                    out.push(x);
                    out.extend(std::iter::repeat(0.0).take(n - 1));
                }
            }
        }
        out
    }
}

/// Certified distance from the interval `[lo, hi]` to the Cantor attractor
/// in `[0, 1]`: branch-and-bound over IFS cells, lower bounds from interval
/// gaps, upper bounds from cell endpoints (which lie on the set).
fn cantor_interval_distance(rho: f64, b: usize, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let point_dist = |p: f64| {
        if p < lo {
            lo - p
        } else if p > hi {
            p - hi
        } else {
            0.0
        }
    };
    let cell_gap = |a: f64, len: f64| {
        if hi < a {
            a - hi
        } else if lo > a + len {
            lo - (a + len)
        } else {
            0.0
        }
    };
    let step = (1.0 - rho) / (b as f64 - 1.0);
    let mut best_hi = point_dist(0.0).min(point_dist(1.0));
    let mut floor_lo = f64::INFINITY;
    let mut stack = vec![(0.0f64, 1.0f64)];
    while let Some((a, len)) = stack.pop() {
        let lb = cell_gap(a, len);
        if lb >= best_hi {
            continue;
        }
        if best_hi - lb <= tol || len <= tol {
            floor_lo = floor_lo.min(lb);
            continue;
        }
        for i in 0..b {
            let ca = a + i as f64 * step * len;
            let cl = rho * len;
            best_hi = best_hi.min(point_dist(ca)).min(point_dist(ca + cl));
            stack.push((ca, cl));
        }
    }
    (best_hi.min(floor_lo).max(0.0), best_hi)
}

/// Nodes and weights realizing the set's d-measure at a given depth.
#[derive(Debug, Clone)]
pub struct Quadrature {
    pub dim: usize,
    /// Flattened nodes, `len() * dim` values.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Node resolution: lattice step for cube/segment, cell length for IFS,
    /// zero for a point.
    pub spacing: f64,
}

impl Quadrature {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn total_mass(&self) -> f64 {
        crate::sum::pairwise_sum(self.weights.len(), &|i| self.weights[i])
    }
}

/// Build the measure quadrature at `depth`: product trapezoid lattices with
/// step 2^(-depth) for cube and segment, the bᵐ depth-m cell representatives
/// (left endpoints, weight b^(-m)) for IFS sets, a unit mass for the point.
pub fn measure_quadrature(set: &DSet, depth: usize) -> Result<Quadrature> {
    set.validate()?;
    if depth == 0 {
        return Err(Error::Parameter("quadrature depth must be at least 1".into()));
    }
    let n = set.ambient_dim();
    match set {
        DSet::Cube { .. } => {
            let per_axis = (1usize << depth) + 1;
            let count = per_axis.checked_pow(n as u32).filter(|&c| c <= NODE_CAP).ok_or(
                Error::Resource(format!(
                    "cube quadrature at depth {depth} needs {per_axis}^{n} nodes (cap {NODE_CAP})"
                )),
            )?;
            let h = 2f64.powi(-(depth as i32));
            let mut nodes = Vec::with_capacity(count * n);
            let mut weights = Vec::with_capacity(count);
            let mut idx = vec![0usize; n];
            loop {
                let mut w = 1.0;
                for i in 0..n {
                    nodes.push(idx[i] as f64 * h);
                    let edge = idx[i] == 0 || idx[i] + 1 == per_axis;
                    w *= if edge { 0.5 * h } else { h };
                }
                weights.push(w);
                // odometer increment
                let mut axis = 0;
                loop {
                    if axis == n {
                        return Ok(Quadrature { dim: n, nodes, weights, spacing: h });
                    }
                    idx[axis] += 1;
                    if idx[axis] < per_axis {
                        break;
                    }
                    idx[axis] = 0;
                    axis += 1;
                }
            }
        }
        DSet::Segment { .. } => {
            let per_axis = (1usize << depth) + 1;
            if per_axis > NODE_CAP {
                return Err(Error::Resource(format!(
                    "segment quadrature at depth {depth} needs {per_axis} nodes (cap {NODE_CAP})"
                )));
            }
            let h = 2f64.powi(-(depth as i32));
            let mut nodes = Vec::with_capacity(per_axis * n);
            let mut weights = Vec::with_capacity(per_axis);
            for i in 0..per_axis {
                nodes.push(i as f64 * h);
                nodes.extend(std::iter::repeat(0.0).take(n - 1));
                let edge = i == 0 || i + 1 == per_axis;
                weights.push(if edge { 0.5 * h } else { h });
            }
            Ok(Quadrature { dim: n, nodes, weights, spacing: h })
        }
        DSet::Point { .. } => Ok(Quadrature {
            dim: n,
            nodes: vec![0.0; n],
            weights: vec![1.0],
            spacing: 0.0,
        }),
        DSet::Cantor { rho, b, .. } => {
            let count = b.checked_pow(depth as u32).filter(|&c| c <= NODE_CAP).ok_or(
                Error::Resource(format!(
                    "cantor quadrature at depth {depth} needs {b}^{depth} nodes (cap {NODE_CAP})"
                )),
            )?;
            let step = (1.0 - rho) / (*b as f64 - 1.0);
            let w = (*b as f64).powi(-(depth as i32));
            let mut nodes = Vec::with_capacity(count * n);
            let mut weights = Vec::with_capacity(count);
            // digits odometer, most significant digit first so nodes come out sorted
            let mut digits = vec![0usize; depth];
            loop {
                // fold from the deepest digit outward: f_{d0} ∘ … ∘ f_{dk}(0)
                let mut x = 0.0f64;
                for &d in digits.iter().rev() {
                    x = rho * x + d as f64 * step;
                }
                nodes.push(x);
                nodes.extend(std::iter::repeat(0.0).take(n - 1));
                weights.push(w);
                let mut pos = depth;
                loop {
                    if pos == 0 {
                        return Ok(Quadrature {
                            dim: n,
                            nodes,
                            weights,
                            spacing: rho.powi(depth as i32),
                        });
                    }
                    pos -= 1;
                    digits[pos] += 1;
                    if digits[pos] < *b {
                        break;
                    }
                    digits[pos] = 0;
                }
            }
        }
    }
}

/// Empirical d-measure constants: extremes of `μ̂(B(x, r)) / r^d` over all
/// centers and radii, with `μ̂` the closed-ball quadrature mass.
///
/// Radii must satisfy `r ≥ 16 · spacing` so each ball is resolved; centers
/// must lie on the set (within twice the node spacing).
pub fn verify_d_measure(
    set: &DSet,
    quad: &Quadrature,
    centers: &[f64],
    radii: &[f64],
) -> Result<(f64, f64)> {
    set.validate()?;
    let n = set.ambient_dim();
    if quad.dim != n {
        return Err(Error::Parameter("quadrature dimension mismatch".into()));
    }
    if centers.is_empty() || centers.len() % n != 0 || radii.is_empty() {
        return Err(Error::Parameter(
            "need at least one center (flattened n per row) and one radius".into(),
        ));
    }
    let d = set.hausdorff_dim();
    for &r in radii {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::Parameter(format!("radii must lie in (0, 1], got {r}")));
        }
        if r < 16.0 * quad.spacing {
            return Err(Error::Resolution(format!(
                "radius {r:.3e} under-resolved: need r >= 16 * node spacing ({:.3e})",
                quad.spacing
            )));
        }
    }
    let mut c1 = f64::INFINITY;
    let mut c2 = 0.0f64;
    for ci in 0..centers.len() / n {
        let center = &centers[ci * n..(ci + 1) * n];
        let on_set = set.distance(center);
        if on_set > (2.0 * quad.spacing).max(1e-9) {
            return Err(Error::Parameter(format!(
                "center #{ci} is off the set by {on_set:.3e}"
            )));
        }
        for &r in radii {
            let r2 = r * r;
            let mass = crate::sum::pairwise_sum(quad.len(), &|m| {
                let node = quad.node(m);
                let mut sq = 0.0;
                for i in 0..n {
                    let dx = node[i] - center[i];
                    sq += dx * dx;
                }
                if sq <= r2 {
                    quad.weights[m]
                } else {
                    0.0
                }
            });
            let ratio = mass / r.powf(d);
            c1 = c1.min(ratio);
            c2 = c2.max(ratio);
        }
    }
    Ok((c1, c2))
}
