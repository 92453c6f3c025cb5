//! Restriction and extension between whole-space functions and functions on
//! a d-set.
//!
//! * [`restrict`] realizes the ball-average restriction: at each node of a
//!   d-measure quadrature the function is averaged over shrinking balls and
//!   the last average is taken, with a per-node record of how well the
//!   schedule settled (the pointwise limit is reported as Cauchy-ness over
//!   the radius schedule, never asserted).
//! * [`extend`] realizes the Whitney extension: on each sub-unit cube the
//!   trace is replaced by its measure average over the ball `B(x_i, 6l_i)`
//!   and the averages are blended by the partition of unity. Ball masses are
//!   taken from the quadrature itself, so constants extend exactly.
//! * [`extend_codim`] composes the two through one added dimension for
//!   full-dimensional sets, where the direct Whitney construction does not
//!   apply: lift to the segment embedding, extend in the plane, average back
//!   down to the line.
//! * [`measure_extension`] / [`measure_restriction`] wrap the operators with
//!   input/output norms into continuity reports.
//! * [`restriction_lemma_check`] evaluates both sides of the pair-sum bound
//!   `∬_{|x−y|<r} (K∗f(x) − K∗f(y))² μ(dx)μ(dy) ≤ c·r^{2d−n}·φ^{−α}(r^{−2})·‖f‖²`
//!   that underlies the continuity of the restriction.

use crate::geometry::{measure_quadrature, DSet, Quadrature};
use crate::lattice::{GaussianMix, Lattice, LatticeFunction};
use crate::levy::bessel_kernel_with_tol;
use crate::norms::{
    difference_norm_alpha_k, fourier_norm, trace_norm, TraceFunction, TraceVariant,
};
use crate::quad::gk15;
use crate::sum::pairwise_sum;
use crate::symbols::{check_trace_exponents, lift_symbol, BernsteinSymbol};
use crate::whitney::{partition_of_unity, WhitneyDecomposition};
use crate::{logspace, Error, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `0..n`, in parallel when the `parallel` feature is enabled.
/// Each index is independent and results are collected in index order, so
/// output is identical either way.
fn try_map_indexed<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

fn fmt_point(x: &[f64]) -> String {
    x.iter().map(|c| format!("{c:.6}")).collect::<Vec<_>>().join(", ")
}

/// Mean of `u` over the lattice nodes in the closed ball `B(center, r)`,
/// or `None` when the ball contains no node. Accumulation runs in fixed
/// odometer order, so the value does not depend on thread count.
fn lattice_ball_mean(u: &LatticeFunction, center: &[f64], r: f64) -> Option<f64> {
    let lat = &u.lattice;
    let n = lat.n;
    let mut lo_idx = vec![0i64; n];
    let mut hi_idx = vec![0i64; n];
    for d in 0..n {
        let lo = ((center[d] - r - lat.lo[d]) / lat.h).ceil() as i64;
        let hi = ((center[d] + r - lat.lo[d]) / lat.h).floor() as i64;
        lo_idx[d] = lo.max(0);
        hi_idx[d] = hi.min(lat.shape[d] as i64 - 1);
        if lo_idx[d] > hi_idx[d] {
            return None;
        }
    }
    let r2 = r * r * (1.0 + 1e-12);
    let mut sum = 0.0f64;
    let mut count = 0usize;
    let mut idx = lo_idx.clone();
    loop {
        let mut d2 = 0.0;
        for d in 0..n {
            let x = lat.lo[d] + idx[d] as f64 * lat.h;
            d2 += (x - center[d]) * (x - center[d]);
        }
        if d2 <= r2 {
            let flat = lat.flat(&idx).expect("window indices lie on the lattice");
            sum += u.values[flat];
            count += 1;
        }
        let mut d = n;
        loop {
            if d == 0 {
                return if count == 0 { None } else { Some(sum / count as f64) };
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] <= hi_idx[d] {
                break;
            }
            idx[d] = lo_idx[d];
        }
    }
}

/// Averages of `u` over `B(center, r)` for each radius in the schedule;
/// returns the last average, whether the last two agreed within `atol`,
/// and the size of the last gap (0 when the schedule has a single radius,
/// in which case convergence cannot be certified and the flag is false).
fn ball_average_schedule(
    u: &LatticeFunction,
    center: &[f64],
    radii: &[f64],
    atol: f64,
) -> Result<(f64, bool, f64)> {
    let mut prev: Option<f64> = None;
    let mut last = 0.0;
    let mut gap = 0.0f64;
    for &r in radii {
        let mean = lattice_ball_mean(u, center, r).ok_or_else(|| {
            Error::Resolution(format!(
                "ball of radius {r:.6e} around ({}) contains no lattice node \
                 (spacing {:.6e}); enlarge the radius or the lattice",
                fmt_point(center),
                u.lattice.h,
            ))
        })?;
        if let Some(p) = prev {
            gap = (mean - p).abs();
        }
        prev = Some(mean);
        last = mean;
    }
    let converged = radii.len() >= 2 && gap < atol;
    Ok((last, converged, gap))
}

fn check_radius_schedule(radii: &[f64], h: f64) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::Parameter("radius schedule must be nonempty".into()));
    }
    for w in radii.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::Parameter(format!(
                "radius schedule must be strictly decreasing, got {:.6e} then {:.6e}",
                w[0], w[1]
            )));
        }
    }
    let smallest = *radii.last().expect("nonempty");
    if !(smallest.is_finite() && smallest > 0.0) {
        return Err(Error::Parameter(format!("radii must be positive, got {smallest:.6e}")));
    }
    if smallest < 2.0 * h - 1e-12 {
        return Err(Error::Resolution(format!(
            "smallest radius {smallest:.6e} is below twice the lattice spacing \
             ({:.6e}); ball averages would be dominated by grid noise",
            2.0 * h
        )));
    }
    Ok(())
}

/// The ball-average restriction of a lattice function to the nodes of a
/// d-measure quadrature, with the per-node convergence record.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub trace: TraceFunction,
    /// Per node: did the averages at the last two radii agree within `atol`?
    pub converged: Vec<bool>,
    /// Largest last-step gap `|A_{r_last} − A_{r_prev}|` over all nodes.
    pub max_gap: f64,
}

/// Restrict `u` to the quadrature nodes on `set` by averaging over the balls
/// of the (strictly decreasing) radius schedule; the value at each node is
/// the average at the smallest radius.
///
/// The smallest radius must be at least twice the lattice spacing; a ball
/// that captures no lattice node is a resolution error.
pub fn restrict(
    u: &LatticeFunction,
    set: &DSet,
    quad: &Quadrature,
    radii: &[f64],
    atol: f64,
) -> Result<Restriction> {
    set.validate()?;
    if set.ambient_dim() != u.lattice.n {
        return Err(Error::Parameter(format!(
            "set lives in dimension {} but the lattice has dimension {}",
            set.ambient_dim(),
            u.lattice.n
        )));
    }
    if quad.dim != u.lattice.n {
        return Err(Error::Parameter("quadrature dimension must match the lattice".into()));
    }
    if !(atol > 0.0 && atol.is_finite()) {
        return Err(Error::Parameter(format!("atol must be positive, got {atol}")));
    }
    check_radius_schedule(radii, u.lattice.h)?;

    let rows = try_map_indexed(quad.len(), |m| {
        ball_average_schedule(u, quad.node(m), radii, atol)
    })?;
    let values: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let converged: Vec<bool> = rows.iter().map(|r| r.1).collect();
    let max_gap = rows.iter().map(|r| r.2).fold(0.0f64, f64::max);
    Ok(Restriction {
        trace: TraceFunction::new(set.clone(), quad.clone(), values)?,
        converged,
        max_gap,
    })
}

/// The Whitney extension of a trace function to a lattice.
///
/// Per sub-unit cube `Q_i` (side ≤ 1) the trace is averaged against the
/// measure over `B(x_i, 6l_i)` with `x_i` the center and `l_i` the diameter;
/// the normalizing weight is the empirical ball mass
/// `ω_i = (Σ_{|x_m−x_i|<6l_i} w_m)^{−1}`, so constants are preserved
/// exactly. At a lattice node the covering cubes' bump values are
/// normalized and the sum `Σ_{i∈I} φ_i(x)·(average)_i` is taken; nodes not
/// covered by any cube take the nearest trace value when they sit within
/// the resolution collar of the set (width `2√n·s_min`) and zero otherwise
/// (outside all expanded sub-unit cubes the extension vanishes).
pub fn extend(
    tu: &TraceFunction,
    w: &WhitneyDecomposition,
    target: &Lattice,
) -> Result<LatticeFunction> {
    if w.set != tu.set {
        return Err(Error::Parameter(
            "the decomposition was built for a different set than the trace".into(),
        ));
    }
    let n = w.n;
    let d = w.set.hausdorff_dim();
    if d >= n as f64 {
        return Err(Error::Parameter(format!(
            "extension needs d < n, got d = {d} in dimension {n}; for a \
             full-dimensional set use the codimension lift (extend_codim)"
        )));
    }
    if target.n != n {
        return Err(Error::Parameter(format!(
            "target lattice dimension {} does not match the ambient dimension {n}",
            target.n
        )));
    }

    // Measure averages over B(x_i, 6 l_i) for every sub-unit cube, with the
    // empirical ball mass as the normalizer. The inner loop runs in fixed
    // node order.
    let quad = &tu.quad;
    let mut avg = vec![0.0f64; w.cubes.len()];
    for &i in &w.index_set {
        let cube = &w.cubes[i];
        let center = cube.center();
        let rad = 6.0 * cube.diam;
        let rad2 = rad * rad;
        let mut mass = 0.0f64;
        let mut acc = 0.0f64;
        for m in 0..quad.len() {
            let mut d2 = 0.0;
            for (a, b) in quad.node(m).iter().zip(&center) {
                d2 += (a - b) * (a - b);
            }
            if d2 < rad2 {
                mass += quad.weights[m];
                acc += quad.weights[m] * tu.values[m];
            }
        }
        if !(mass > 0.0) {
            return Err(Error::Resolution(format!(
                "measure ball of radius {rad:.6e} around the Whitney cube at \
                 level {} index {:?} captured no quadrature mass; increase \
                 the quadrature depth",
                cube.level, cube.index
            )));
        }
        avg[i] = acc / mass;
    }

    let mut in_index_set = vec![false; w.cubes.len()];
    for &i in &w.index_set {
        in_index_set[i] = true;
    }
    let pou = partition_of_unity(w);
    let collar = 2.0 * (n as f64).sqrt() * w.s_min + 1e-12;

    let nearest_value = |x: &[f64]| -> f64 {
        let mut best = f64::INFINITY;
        let mut val = 0.0;
        for m in 0..quad.len() {
            let mut d2 = 0.0;
            for (a, b) in quad.node(m).iter().zip(x) {
                d2 += (a - b) * (a - b);
            }
            if d2 < best {
                best = d2;
                val = tu.values[m];
            }
        }
        val
    };

    let values = try_map_indexed(target.len(), |p| -> Result<f64> {
        let x = target.node(p);
        match pou.eval(&x) {
            Ok(parts) => Ok(parts
                .iter()
                .filter(|(i, _)| in_index_set[*i])
                .map(|(i, phi)| phi * avg[*i])
                .sum()),
            Err(_) => {
                // Not covered by any expanded cube: either inside the
                // resolution collar around the set (keep the trace) or in
                // the truly uncovered outside (the extension vanishes).
                if w.set.distance(&x) <= collar {
                    Ok(nearest_value(&x))
                } else {
                    Ok(0.0)
                }
            }
        }
    })?;

    Ok(LatticeFunction { lattice: target.clone(), values, profile: None })
}

/// Extension followed by restriction back onto the same quadrature nodes.
#[derive(Debug, Clone)]
pub struct Roundtrip {
    pub extended: LatticeFunction,
    pub restriction: Restriction,
    /// `sup_m |R(E tu)(x_m) − tu(x_m)|` over the quadrature nodes.
    pub sup_error: f64,
}

pub fn roundtrip(
    tu: &TraceFunction,
    w: &WhitneyDecomposition,
    target: &Lattice,
    radii: &[f64],
    atol: f64,
) -> Result<Roundtrip> {
    let extended = extend(tu, w, target)?;
    let restriction = restrict(&extended, &tu.set, &tu.quad, radii, atol)?;
    let sup_error = tu
        .values
        .iter()
        .zip(&restriction.trace.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    Ok(Roundtrip { extended, restriction, sup_error })
}

/// The composed extension for a full-dimensional set: lift, extend in one
/// more dimension, average back down.
#[derive(Debug, Clone)]
pub struct CodimExtension {
    /// The Whitney extension in the plane, around the embedded segment.
    pub plane: LatticeFunction,
    /// Ball averages of `plane` at `(x, 0)` on the line lattice.
    pub line: LatticeFunction,
    /// Per line node: did the plane averages settle within `atol`?
    pub converged: Vec<bool>,
    /// The symbol the lifted smoothness is measured against.
    pub lifted_symbol: BernsteinSymbol,
    /// The smoothness order in the lifted space (twice the original).
    pub lifted_alpha: f64,
}

/// Extend a trace on the unit interval (a 1-set in ℝ¹, where the direct
/// Whitney construction is unavailable) by embedding it as the segment
/// `[0,1]×{0}` ⊂ ℝ², extending with the segment's Whitney decomposition on
/// the plane lattice, and averaging over plane balls centered at `(x, 0)`
/// to land on the line lattice. The smoothness bookkeeping moves to the
/// lifted symbol with order `2α`; the lift requires `α > ½`.
pub fn extend_codim(
    tu: &TraceFunction,
    symbol: &BernsteinSymbol,
    alpha: f64,
    w: &WhitneyDecomposition,
    plane: &Lattice,
    line: &Lattice,
    radii: &[f64],
    atol: f64,
) -> Result<CodimExtension> {
    let (lifted_symbol, lifted_alpha) = lift_symbol(symbol, alpha)?;
    if tu.set != (DSet::Cube { n: 1 }) {
        return Err(Error::Parameter(
            "the codimension lift is implemented for the unit interval in ℝ¹".into(),
        ));
    }
    if w.set != (DSet::Segment { n: 2 }) {
        return Err(Error::Parameter(
            "the lift embeds the interval as the segment [0,1]×{0}; build \
             the Whitney decomposition for that segment"
                .into(),
        ));
    }
    if plane.n != 2 || line.n != 1 {
        return Err(Error::Parameter(
            "the lift needs a two-dimensional plane lattice and a \
             one-dimensional line lattice"
                .into(),
        ));
    }

    // Recover the dyadic depth of the interval quadrature so the segment
    // quadrature has the same nodes (both enumerate i·2^{−m} ascending).
    let spacing = tu.quad.spacing;
    if !(spacing > 0.0) {
        return Err(Error::Parameter("interval trace must have positive node spacing".into()));
    }
    let m = (-spacing.log2()).round();
    let count = tu.quad.len();
    if m < 1.0
        || (spacing * (2f64).powf(m) - 1.0).abs() > 1e-9
        || count != (1usize << m as u32) + 1
    {
        return Err(Error::Parameter(
            "interval trace must come from a dyadic quadrature (spacing 2^-m, \
             2^m + 1 nodes)"
                .into(),
        ));
    }
    let seg = DSet::Segment { n: 2 };
    let seg_quad = measure_quadrature(&seg, m as usize)?;
    debug_assert_eq!(seg_quad.len(), count);
    let lifted_tu = TraceFunction::new(seg, seg_quad, tu.values.clone())?;

    let plane_fn = extend(&lifted_tu, w, plane)?;

    let rows = try_map_indexed(line.len(), |i| {
        let x = line.node(i)[0];
        ball_average_schedule(&plane_fn, &[x, 0.0], radii, atol)
    })?;
    let values: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let converged: Vec<bool> = rows.iter().map(|r| r.1).collect();
    let line_fn = LatticeFunction { lattice: line.clone(), values, profile: None };

    Ok(CodimExtension {
        plane: plane_fn,
        line: line_fn,
        converged,
        lifted_symbol,
        lifted_alpha,
    })
}

/// Measured continuity of one operator run: norms on both sides, their
/// ratio, and the roundtrip error where a roundtrip exists.
///
/// All fields are finite and nonnegative except `ratio`, which is the
/// literal quotient `output_norm / input_norm` and is NaN exactly in the
/// degenerate 0/0 case (e.g. extending the zero function); callers exclude
/// the sentinel from maxima.
#[derive(Debug, Clone)]
pub struct OperatorReport {
    pub id: String,
    pub depth: usize,
    pub input_norm: f64,
    pub output_norm: f64,
    pub ratio: f64,
    pub roundtrip_sup: f64,
}

/// Extend `tu` and report `‖E tu‖ / ‖tu‖`: the input in the dyadic-sum
/// trace norm, the output in the k-th-difference norm with dyadic shell
/// weights, plus the sup-node roundtrip error of restricting back.
#[allow(clippy::too_many_arguments)]
pub fn measure_extension(
    tu: &TraceFunction,
    symbol: &BernsteinSymbol,
    alpha: f64,
    k: usize,
    w: &WhitneyDecomposition,
    target: &Lattice,
    radii: &[f64],
    atol: f64,
    id: &str,
    depth: usize,
) -> Result<OperatorReport> {
    let input = trace_norm(tu, symbol, alpha, &TraceVariant::Dyadic { c: 1.0, n_start: 0 })?;
    let rt = roundtrip(tu, w, target, radii, atol)?;
    let output = difference_norm_alpha_k(&rt.extended, symbol, alpha, k, 1.0)?;
    Ok(OperatorReport {
        id: id.to_string(),
        depth,
        input_norm: input.total,
        output_norm: output.total,
        ratio: output.total / input.total,
        roundtrip_sup: rt.sup_error,
    })
}

/// Restrict `u` to `set` at the given quadrature depth and report
/// `‖R u‖ / ‖u‖`: the input in the Fourier-side norm (so `u` must carry its
/// closed-form profile), the output in the dyadic-sum trace norm, plus the
/// sup-node gap between the ball averages and the profile evaluated at the
/// nodes.
#[allow(clippy::too_many_arguments)]
pub fn measure_restriction(
    u: &LatticeFunction,
    set: &DSet,
    depth: usize,
    symbol: &BernsteinSymbol,
    alpha: f64,
    radii: &[f64],
    atol: f64,
    id: &str,
) -> Result<OperatorReport> {
    let input = fourier_norm(u, symbol, alpha)?;
    let quad = measure_quadrature(set, depth)?;
    let restriction = restrict(u, set, &quad, radii, atol)?;
    let output = trace_norm(
        &restriction.trace,
        symbol,
        alpha,
        &TraceVariant::Dyadic { c: 1.0, n_start: 0 },
    )?;
    let profile = u
        .profile
        .as_ref()
        .expect("fourier_norm established the profile");
    let sup = (0..quad.len())
        .map(|m| (restriction.trace.values[m] - profile.eval(quad.node(m))).abs())
        .fold(0.0f64, f64::max);
    Ok(OperatorReport {
        id: id.to_string(),
        depth,
        input_norm: input.total,
        output_norm: output.total,
        ratio: output.total / input.total,
        roundtrip_sup: sup,
    })
}

/// One evaluation of the pair-sum bound at radius `r`.
#[derive(Debug, Clone)]
pub struct LemmaRatio {
    pub r: f64,
    /// `2 Σ_{i<j, |x_i−x_j|<r} w_i w_j (K∗f(x_i) − K∗f(x_j))²`.
    pub lhs: f64,
    /// `r^{2d−n} · φ^{−α}(r^{−2}) · ‖f‖²_{L²}`.
    pub rhs: f64,
    pub ratio: f64,
}

const KERNEL_TABLE: usize = 1024;
const KERNEL_T_MIN: f64 = 1e-4;
const KERNEL_T_MAX: f64 = 32.0;

/// Evaluate both sides of the restriction bound on a one-dimensional d-set
/// for each radius in `r_list`, using the convolution kernel of the symbol.
///
/// The kernel is tabulated on a 1024-point log grid over
/// `[10⁻⁴, 32]` and interpolated log-log linearly; the head `∫₀^{t₀}` is
/// integrated by a power fit through the first two table points (the fitted
/// blow-up exponent must be < 1). The trace exponent window is checked
/// first and its violation is a gate failure; kernel existence is checked
/// by the kernel quadrature itself.
pub fn restriction_lemma_check(
    symbol: &BernsteinSymbol,
    alpha: f64,
    set: &DSet,
    f: &GaussianMix,
    depth: usize,
    r_list: &[f64],
) -> Result<Vec<LemmaRatio>> {
    set.validate()?;
    f.validate()?;
    let n = set.ambient_dim();
    if n != 1 {
        return Err(Error::Unsupported(
            "the convolution kernel is tabulated in one dimension only".into(),
        ));
    }
    if f.dim() != 1 {
        return Err(Error::Parameter("the test function must be one-dimensional".into()));
    }
    if r_list.is_empty() || r_list.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::Parameter("radius list must be nonempty and positive".into()));
    }
    let d = set.hausdorff_dim();
    check_trace_exponents(symbol, alpha, n, d)?;

    // Kernel table on a log grid; values are independent, so the table can
    // be filled in parallel without affecting the result.
    let t_grid = logspace(KERNEL_T_MIN.log10(), KERNEL_T_MAX.log10(), KERNEL_TABLE);
    let kvals = try_map_indexed(KERNEL_TABLE, |i| {
        bessel_kernel_with_tol(symbol, alpha, t_grid[i], 1e-7)
    })?;
    if !(kvals[0] > 0.0 && kvals[1] > 0.0) {
        return Err(Error::Numeric(
            "kernel is not positive near zero; the tabulation cannot be \
             extended below the grid"
                .into(),
        ));
    }
    // K(t) ≈ A·t^{−p} near zero; ∫₀^{t₀} A t^{−p} dt = K(t₀)·t₀/(1−p).
    let p = (kvals[0].ln() - kvals[1].ln()) / (t_grid[1].ln() - t_grid[0].ln());
    if !(p < 1.0) {
        return Err(Error::Numeric(format!(
            "kernel blows up like t^-{p:.3} at zero and cannot be integrated \
             against the table"
        )));
    }
    let head_coeff = kvals[0] * t_grid[0] / (1.0 - p);

    let ln_t: Vec<f64> = t_grid.iter().map(|t| t.ln()).collect();
    let interp = |t: f64| -> f64 {
        let j = t_grid.partition_point(|&a| a < t).clamp(1, KERNEL_TABLE - 1);
        let (j0, j1) = (j - 1, j);
        if kvals[j0] > 0.0 && kvals[j1] > 0.0 {
            let w = (t.ln() - ln_t[j0]) / (ln_t[j1] - ln_t[j0]);
            (kvals[j0].ln() + w * (kvals[j1].ln() - kvals[j0].ln())).exp()
        } else {
            let w = (t - t_grid[j0]) / (t_grid[j1] - t_grid[j0]);
            kvals[j0] + w * (kvals[j1] - kvals[j0])
        }
    };

    let quad = measure_quadrature(set, depth)?;
    let m = quad.len();
    if m < 2 {
        return Err(Error::Parameter("need at least two quadrature nodes".into()));
    }

    // K∗f at each node: the head correction 2f(x)·∫₀^{t₀}K plus one
    // fixed 15-point panel per table interval of K(t)(f(x−t)+f(x+t)).
    // Everything here is linear in f, so doubling f doubles K∗f exactly.
    let kf = try_map_indexed(m, |i| -> Result<f64> {
        let x = quad.node(i)[0];
        let g = |t: f64| interp(t) * (f.eval(&[x - t]) + f.eval(&[x + t]));
        let mut total = 2.0 * f.eval(&[x]) * head_coeff;
        for w in t_grid.windows(2) {
            total += gk15(&g, w[0], w[1]).0;
        }
        Ok(total)
    })?;

    let norm_f2 = f.l2_squared();
    let mut out = Vec::with_capacity(r_list.len());
    for &r in r_list {
        let lhs = 2.0
            * pairwise_sum(m, &|i| {
                let xi = quad.node(i)[0];
                let wi = quad.weights[i];
                let mut acc = 0.0;
                for j in (i + 1)..m {
                    if (quad.node(j)[0] - xi).abs() < r {
                        let dk = kf[i] - kf[j];
                        acc += wi * quad.weights[j] * dk * dk;
                    }
                }
                acc
            });
        let rhs = r.powf(2.0 * d - n as f64) / symbol.psi_radial(1.0 / r).powf(alpha) * norm_f2;
        out.push(LemmaRatio { r, lhs, rhs, ratio: lhs / rhs });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::whitney::build_whitney;

    fn cantor() -> DSet {
        DSet::Cantor { rho: 1.0 / 3.0, b: 2, ambient: 1 }
    }

    fn cantor_whitney(s_min: f64) -> WhitneyDecomposition {
        build_whitney(&cantor(), &[-1.0], &[2.0], s_min, 0.125).expect("decomposition")
    }

    #[test]
    fn restrict_preserves_constants_exactly() {
        let lat = Lattice::new(&[-1.0], &[2.0], 1.0 / 16.0).unwrap();
        let u = LatticeFunction::sample(lat, |_| 1.0).unwrap();
        let quad = measure_quadrature(&cantor(), 4).unwrap();
        let r = restrict(&u, &cantor(), &quad, &[0.5, 0.25, 0.125], 1e-9).unwrap();
        assert!(r.trace.values.iter().all(|&v| v == 1.0));
        assert!(r.converged.iter().all(|&c| c));
        assert_eq!(r.max_gap, 0.0);
    }

    #[test]
    fn restrict_recovers_continuous_functions() {
        let lat = Lattice::new(&[-4.0], &[4.0], 1.0 / 64.0).unwrap();
        let u = LatticeFunction::from_mix(lat, GaussianMix::single(1.0, 1)).unwrap();
        let quad = measure_quadrature(&DSet::Cube { n: 1 }, 5).unwrap();
        let radii = [0.25, 0.125, 1.0 / 16.0, 1.0 / 32.0];
        let r = restrict(&u, &DSet::Cube { n: 1 }, &quad, &radii, 5e-3).unwrap();
        assert!(r.converged.iter().all(|&c| c), "max gap {}", r.max_gap);
        let mix = GaussianMix::single(1.0, 1);
        let sup = (0..quad.len())
            .map(|m| (r.trace.values[m] - mix.eval(quad.node(m))).abs())
            .fold(0.0f64, f64::max);
        assert!(sup < 0.01, "sup deviation {sup}");
    }

    #[test]
    fn restrict_averages_jump_to_zero_by_symmetry() {
        let lat = Lattice::new(&[-2.0], &[2.0], 1.0 / 32.0).unwrap();
        let u = LatticeFunction::sample(lat, |x| {
            if x[0] > 0.0 {
                1.0
            } else if x[0] < 0.0 {
                -1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let point = DSet::Point { n: 1 };
        let quad = measure_quadrature(&point, 1).unwrap();
        let r = restrict(&u, &point, &quad, &[0.5, 0.25, 0.125], 1e-12).unwrap();
        assert_eq!(r.trace.values[0], 0.0);
        assert!(r.converged[0]);
    }

    #[test]
    fn restrict_rejects_unresolvable_schedules() {
        let lat = Lattice::new(&[-1.0], &[1.0], 1.0 / 8.0).unwrap();
        let u = LatticeFunction::sample(lat, |_| 1.0).unwrap();
        let point = DSet::Point { n: 1 };
        let quad = measure_quadrature(&point, 1).unwrap();
        // Smallest radius below 2h.
        let err = restrict(&u, &point, &quad, &[0.5, 0.1], 1e-9).unwrap_err();
        assert!(matches!(err, Error::Resolution(_)), "got {err}");
        // Not strictly decreasing.
        let err = restrict(&u, &point, &quad, &[0.25, 0.25], 1e-9).unwrap_err();
        assert!(matches!(err, Error::Parameter(_)), "got {err}");
        // Ball entirely off the lattice.
        let far = Lattice::new(&[4.0], &[6.0], 1.0 / 8.0).unwrap();
        let v = LatticeFunction::sample(far, |_| 1.0).unwrap();
        let err = restrict(&v, &point, &quad, &[0.5, 0.25], 1e-9).unwrap_err();
        assert!(matches!(err, Error::Resolution(_)), "got {err}");
    }

    #[test]
    fn extend_preserves_constants_near_the_set() {
        let w = cantor_whitney(2f64.powi(-8));
        let tu = TraceFunction::sample(&cantor(), 8, |_| 1.0).unwrap();
        let target = Lattice::new(&[-1.0], &[2.0], 1.0 / 16.0).unwrap();
        let eu = extend(&tu, &w, &target).unwrap();
        let mut checked = 0;
        for p in 0..target.len() {
            let x = target.node(p);
            let v = eu.values[p];
            assert!(
                (-1e-12..=1.0 + 1e-12).contains(&v),
                "value {v} at {:?} outside the convex range",
                x
            );
            if cantor().distance(&x) <= 0.4 {
                assert!((v - 1.0).abs() < 1e-9, "Eu({:?}) = {v}", x);
                checked += 1;
            }
        }
        assert!(checked > 10, "test should cover nodes near the set, saw {checked}");
    }

    #[test]
    fn extend_is_linear() {
        let w = cantor_whitney(2f64.powi(-6));
        let tu = TraceFunction::sample(&cantor(), 6, |x| x[0]).unwrap();
        let tv = TraceFunction::sample(&cantor(), 6, |x| (3.0 * x[0]).cos()).unwrap();
        let combo = TraceFunction::sample(&cantor(), 6, |x| {
            2.5 * x[0] - 0.75 * (3.0 * x[0]).cos()
        })
        .unwrap();
        let target = Lattice::new(&[-1.0], &[2.0], 1.0 / 8.0).unwrap();
        let eu = extend(&tu, &w, &target).unwrap();
        let ev = extend(&tv, &w, &target).unwrap();
        let ec = extend(&combo, &w, &target).unwrap();
        for p in 0..target.len() {
            let lin = 2.5 * eu.values[p] - 0.75 * ev.values[p];
            assert!((ec.values[p] - lin).abs() < 1e-12, "node {p}");
        }
    }

    #[test]
    fn extend_stays_in_the_trace_range() {
        let w = cantor_whitney(2f64.powi(-6));
        let tu = TraceFunction::sample(&cantor(), 6, |x| x[0]).unwrap();
        let target = Lattice::new(&[-1.0], &[2.0], 1.0 / 8.0).unwrap();
        let eu = extend(&tu, &w, &target).unwrap();
        for &v in &eu.values {
            assert!((-1e-12..=1.0 + 1e-12).contains(&v), "value {v}");
        }
    }

    #[test]
    fn extend_rejects_full_dimensional_sets() {
        let interval = DSet::Cube { n: 1 };
        let w = build_whitney(&interval, &[-1.0], &[2.0], 2f64.powi(-6), 0.125).unwrap();
        let tu = TraceFunction::sample(&interval, 3, |x| x[0]).unwrap();
        let target = Lattice::new(&[-1.0], &[2.0], 1.0 / 8.0).unwrap();
        let err = extend(&tu, &w, &target).unwrap_err();
        match err {
            Error::Parameter(msg) => {
                assert!(msg.contains("extend_codim"), "message should redirect: {msg}")
            }
            other => panic!("expected a parameter error, got {other}"),
        }
    }

    #[test]
    fn roundtrip_is_exact_for_constants() {
        let w = cantor_whitney(2f64.powi(-8));
        let tu = TraceFunction::sample(&cantor(), 8, |_| 1.0).unwrap();
        let target = Lattice::new(&[-1.0], &[2.0], 1.0 / 32.0).unwrap();
        let rt = roundtrip(&tu, &w, &target, &[0.125, 1.0 / 16.0], 1e-9).unwrap();
        assert!(rt.sup_error < 1e-9, "sup error {}", rt.sup_error);
    }

    #[test]
    fn codim_lift_preserves_constants() {
        let interval = DSet::Cube { n: 1 };
        let tu = TraceFunction::sample(&interval, 5, |_| 1.0).unwrap();
        let seg = DSet::Segment { n: 2 };
        let w = build_whitney(&seg, &[-1.0, -1.0], &[2.0, 1.0], 2f64.powi(-5), 0.125).unwrap();
        let plane = Lattice::new(&[-1.0, -1.0], &[2.0, 1.0], 1.0 / 32.0).unwrap();
        let line = Lattice::new(&[-0.5], &[1.5], 1.0 / 32.0).unwrap();
        let symbol = BernsteinSymbol::Power { s: 0.5 };
        let ext =
            extend_codim(&tu, &symbol, 1.0, &w, &plane, &line, &[0.125, 1.0 / 16.0], 1e-9)
                .unwrap();
        assert!((ext.lifted_alpha - 2.0).abs() < 1e-15);
        for i in 0..line.len() {
            let x = line.node(i)[0];
            if (0.0..=1.0).contains(&x) {
                assert!(
                    (ext.line.values[i] - 1.0).abs() < 1e-6,
                    "line value {} at x = {x}",
                    ext.line.values[i]
                );
                assert!(ext.converged[i], "node at x = {x} should converge");
            }
        }
    }

    #[test]
    fn codim_lift_gates_on_alpha() {
        let interval = DSet::Cube { n: 1 };
        let tu = TraceFunction::sample(&interval, 5, |_| 1.0).unwrap();
        let seg = DSet::Segment { n: 2 };
        let w = build_whitney(&seg, &[-1.0, -1.0], &[2.0, 1.0], 2f64.powi(-4), 0.125).unwrap();
        let plane = Lattice::new(&[-1.0, -1.0], &[2.0, 1.0], 1.0 / 16.0).unwrap();
        let line = Lattice::new(&[-0.5], &[1.5], 1.0 / 16.0).unwrap();
        let symbol = BernsteinSymbol::Power { s: 0.5 };
        let err = extend_codim(&tu, &symbol, 0.4, &w, &plane, &line, &[0.25, 0.125], 1e-9)
            .unwrap_err();
        assert!(matches!(err, Error::Parameter(_)), "got {err}");
    }

    #[test]
    fn extension_report_has_finite_ratio() {
        let w = cantor_whitney(2f64.powi(-6));
        let tu = TraceFunction::sample(&cantor(), 6, |x| x[0]).unwrap();
        let target = Lattice::new(&[-1.0], &[2.0], 1.0 / 32.0).unwrap();
        let symbol = BernsteinSymbol::Power { s: 0.5 };
        let report = measure_extension(
            &tu,
            &symbol,
            1.5,
            1,
            &w,
            &target,
            &[0.125, 1.0 / 16.0],
            1e-3,
            "coordinate",
            6,
        )
        .unwrap();
        assert!(report.input_norm > 0.0);
        assert!(report.output_norm > 0.0);
        assert!(report.ratio.is_finite() && report.ratio > 0.0);
        assert!(report.roundtrip_sup.is_finite());
    }

    #[test]
    fn extension_report_flags_degenerate_input() {
        let w = cantor_whitney(2f64.powi(-6));
        let tu = TraceFunction::sample(&cantor(), 6, |_| 0.0).unwrap();
        let target = Lattice::new(&[-1.0], &[2.0], 1.0 / 32.0).unwrap();
        let symbol = BernsteinSymbol::Power { s: 0.5 };
        let report = measure_extension(
            &tu,
            &symbol,
            1.5,
            1,
            &w,
            &target,
            &[0.125, 1.0 / 16.0],
            1e-3,
            "zero",
            6,
        )
        .unwrap();
        assert_eq!(report.input_norm, 0.0);
        assert_eq!(report.output_norm, 0.0);
        assert!(report.ratio.is_nan(), "0/0 must surface as the NaN sentinel");
        assert_eq!(report.roundtrip_sup, 0.0);
    }

    #[test]
    fn restriction_report_has_finite_ratio() {
        let lat = Lattice::new(&[-4.0], &[5.0], 1.0 / 32.0).unwrap();
        let u = LatticeFunction::from_mix(lat, GaussianMix::single(1.0, 1)).unwrap();
        let symbol = BernsteinSymbol::Power { s: 0.5 };
        let report = measure_restriction(
            &u,
            &cantor(),
            5,
            &symbol,
            1.5,
            &[0.25, 0.125, 1.0 / 16.0],
            5e-3,
            "gauss",
        )
        .unwrap();
        assert!(report.input_norm > 0.0);
        assert!(report.ratio.is_finite() && report.ratio > 0.0);
        assert!(report.roundtrip_sup < 0.01, "sup {}", report.roundtrip_sup);
    }

    #[test]
    fn lemma_check_is_bilinear_and_vanishes_at_zero() {
        let symbol = BernsteinSymbol::Power { s: 0.5 };
        let f = GaussianMix::single(0.7, 1);
        let rs = [1.0 / 3.0, 1.0 / 6.0];
        let base = restriction_lemma_check(&symbol, 1.5, &cantor(), &f, 5, &rs).unwrap();
        let doubled =
            restriction_lemma_check(&symbol, 1.5, &cantor(), &f.scaled(2.0), 5, &rs).unwrap();
        for (a, b) in base.iter().zip(&doubled) {
            assert!(a.lhs > 0.0 && a.rhs > 0.0 && a.ratio.is_finite());
            assert!(
                (b.lhs - 4.0 * a.lhs).abs() <= 1e-12 * b.lhs,
                "doubling f must quadruple the pair sum: {} vs {}",
                b.lhs,
                4.0 * a.lhs
            );
        }
        let zero =
            restriction_lemma_check(&symbol, 1.5, &cantor(), &f.scaled(0.0), 5, &rs).unwrap();
        for row in zero {
            assert_eq!(row.lhs, 0.0);
        }
    }

    #[test]
    fn lemma_check_enforces_the_gates() {
        let symbol = BernsteinSymbol::Power { s: 0.5 };
        let f = GaussianMix::single(0.7, 1);
        // Below the trace window: αδ₁ = 0.15 < (n−d)/2 ≈ 0.1845.
        let err = restriction_lemma_check(&symbol, 0.3, &cantor(), &f, 4, &[0.25]).unwrap_err();
        assert!(matches!(err, Error::Gate(_)), "got {err}");
        // Window passes but the kernel does not exist: 2αδ₁ = 0.8 ≤ 1.
        let err = restriction_lemma_check(&symbol, 0.8, &cantor(), &f, 4, &[0.25]).unwrap_err();
        assert!(matches!(err, Error::Parameter(_)), "got {err}");
        // Two ambient dimensions are out of scope.
        let err = restriction_lemma_check(
            &symbol,
            1.5,
            &DSet::Segment { n: 2 },
            &GaussianMix::single(0.7, 2),
            4,
            &[0.25],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)), "got {err}");
    }
}
