//! Norm functionals: the Fourier-side norm for the closed-form test family,
//! difference norms with continuous and dyadic shell discretizations, the
//! modulus-of-continuity norm, and the two trace norms on a d-measure.
//!
//! Every report satisfies `total = l2_part + seminorm_part` with both parts
//! nonnegative, and every functional is absolutely homogeneous.

use crate::geometry::{DSet, Quadrature};
use crate::lattice::LatticeFunction;
use crate::quad::adaptive;
use crate::sequences::min_difference_order_for_symbol;
use crate::sum::pairwise_sum;
use crate::symbols::{invert_radial, BernsteinSymbol};
use crate::{Error, Result};

/// Ordered-pair budget for lattice difference norms.
pub const LATTICE_PAIR_CAP: usize = 200_000_000;
/// Unordered-pair budget for trace double sums before subsampling is needed.
pub const TRACE_PAIR_CAP: usize = 50_000_000;

/// Outcome of one norm evaluation.
#[derive(Debug, Clone)]
pub struct NormReport {
    pub variant: &'static str,
    pub alpha: f64,
    pub k: usize,
    /// Variant-specific parameters rendered as `key=value` pairs.
    pub params: String,
    pub l2_part: f64,
    pub seminorm_part: f64,
    /// `l2_part + seminorm_part`.
    pub total: f64,
    /// Finest length scale the evaluation resolved (lattice spacing or
    /// quadrature node separation).
    pub resolution: f64,
    /// Human-readable account of what was truncated or dropped.
    pub truncation: String,
}

impl NormReport {
    fn new(
        variant: &'static str,
        alpha: f64,
        k: usize,
        params: String,
        l2_part: f64,
        seminorm_part: f64,
        resolution: f64,
        truncation: String,
    ) -> Result<NormReport> {
        if !(l2_part.is_finite() && seminorm_part.is_finite())
            || l2_part < 0.0
            || seminorm_part < 0.0
        {
            return Err(Error::Numeric(format!(
                "{variant} norm produced l2={l2_part}, seminorm={seminorm_part}"
            )));
        }
        Ok(NormReport {
            variant,
            alpha,
            k,
            params,
            l2_part,
            seminorm_part,
            total: l2_part + seminorm_part,
            resolution,
            truncation,
        })
    }
}

/// Values on the nodes of a d-measure quadrature: a function on (D, μ).
#[derive(Debug, Clone)]
pub struct TraceFunction {
    pub set: DSet,
    pub quad: Quadrature,
    pub values: Vec<f64>,
}

impl TraceFunction {
    pub fn new(set: DSet, quad: Quadrature, values: Vec<f64>) -> Result<TraceFunction> {
        set.validate()?;
        if values.len() != quad.len() {
            return Err(Error::Parameter(format!(
                "trace values ({}) must match quadrature nodes ({})",
                values.len(),
                quad.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("trace values must be finite".into()));
        }
        Ok(TraceFunction { set, quad, values })
    }

    pub fn sample<F: Fn(&[f64]) -> f64>(
        set: &DSet,
        depth: usize,
        f: F,
    ) -> Result<TraceFunction> {
        let quad = crate::geometry::measure_quadrature(set, depth)?;
        let values = (0..quad.len()).map(|i| f(quad.node(i))).collect();
        TraceFunction::new(set.clone(), quad, values)
    }

    /// `√(Σ w_m u_m²)` — the L²(D, μ) norm at quadrature resolution.
    pub fn l2(&self) -> f64 {
        let (w, u) = (&self.quad.weights, &self.values);
        pairwise_sum(u.len(), &|i| w[i] * u[i] * u[i]).sqrt()
    }

    pub fn scaled(&self, c: f64) -> TraceFunction {
        TraceFunction {
            set: self.set.clone(),
            quad: self.quad.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }
}

fn binomial_row(k: usize) -> Vec<f64> {
    let mut row = vec![1.0f64];
    for j in 0..k {
        row.push(row[j] * (k - j) as f64 / (j + 1) as f64);
    }
    row
}

/// `Δ_h^k u(x) = Σ_{j=0}^k (−1)^{k−j} C(k,j) u(x + jh)` on the same lattice;
/// entries whose stencil leaves the grid are set to zero (the difference's
/// support shrinks by k·h per axis in the shift direction).
pub fn kth_difference(u: &LatticeFunction, shift: &[f64], k: usize) -> Result<LatticeFunction> {
    let steps = u.lattice.steps(shift)?;
    if k == 0 || k > 32 {
        return Err(Error::Parameter(format!("difference order must be in 1..=32, got {k}")));
    }
    let binom = binomial_row(k);
    let lat = &u.lattice;
    let n = lat.n;
    let mut strides = vec![1i64; n];
    for d in (0..n.saturating_sub(1)).rev() {
        strides[d] = strides[d + 1] * lat.shape[d + 1] as i64;
    }
    let jump: i64 = (0..n).map(|d| steps[d] * strides[d]).sum();
    let shape = lat.shape.clone();
    let values: Vec<f64> = (0..u.values.len())
        .map(|flat| {
            let multi = lat.multi(flat);
            for d in 0..n {
                let end = multi[d] as i64 + k as i64 * steps[d];
                if end < 0 || end >= shape[d] as i64 {
                    return 0.0;
                }
            }
            let mut acc = 0.0;
            let mut sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            for (j, &b) in binom.iter().enumerate() {
                let idx = flat as i64 + j as i64 * jump;
                acc += sign * b * u.values[idx as usize];
                sign = -sign;
            }
            acc
        })
        .collect();
    Ok(LatticeFunction { lattice: u.lattice.clone(), values, profile: None })
}

/// `hⁿ Σ_x Δ_{mh}^k u(x)²` without materializing the difference.
fn diff_sq_l2(u: &LatticeFunction, steps: &[i64], k: usize, binom: &[f64]) -> f64 {
    let lat = &u.lattice;
    let n = lat.n;
    let mut strides = vec![1i64; n];
    for d in (0..n.saturating_sub(1)).rev() {
        strides[d] = strides[d + 1] * lat.shape[d + 1] as i64;
    }
    let jump: i64 = (0..n).map(|d| steps[d] * strides[d]).sum();
    let vals = &u.values;
    let shape = &lat.shape;
    let sum = pairwise_sum(vals.len(), &|flat| {
        let multi = lat.multi(flat);
        for d in 0..n {
            let end = multi[d] as i64 + k as i64 * steps[d];
            if end < 0 || end >= shape[d] as i64 {
                return 0.0;
            }
        }
        let mut acc = 0.0;
        let mut sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        for (j, &b) in binom.iter().enumerate() {
            acc += sign * b * vals[(flat as i64 + j as i64 * jump) as usize];
            sign = -sign;
        }
        acc * acc
    });
    sum * lat.h.powi(n as i32)
}

/// All lattice shift vectors in the open half-space (first nonzero step
/// positive) with `0 < |m·h| < cutoff`, sorted by (radius, steps).
fn half_space_offsets(lat: &crate::lattice::Lattice, cutoff: f64) -> Vec<(Vec<i64>, f64)> {
    let reach = (cutoff / lat.h).ceil() as i64;
    let n = lat.n;
    let mut out = Vec::new();
    let mut m = vec![-reach; n];
    m[0] = 0; // lexicographic positivity: m[0] ≥ 0
    'outer: loop {
        let lex_positive = m.iter().copied().find(|&v| v != 0).map_or(false, |v| v > 0);
        if lex_positive {
            let r = lat.h * (m.iter().map(|&v| (v * v) as f64).sum::<f64>()).sqrt();
            if r < cutoff {
                out.push((m.clone(), r));
            }
        }
        let mut d = n;
        loop {
            if d == 0 {
                break 'outer;
            }
            d -= 1;
            m[d] += 1;
            if m[d] <= reach {
                break;
            }
            m[d] = if d == 0 { 0 } else { -reach };
        }
    }
    out.sort_by(|a, b| (a.1, &a.0).partial_cmp(&(b.1, &b.0)).unwrap());
    out
}

/// `(1+x)^α − 1` without cancellation for small x.
fn pow1p_minus_1(x: f64, alpha: f64) -> f64 {
    (alpha * x.ln_1p()).exp_m1()
}

/// Fourier-side norm `(2π)^{−n} ∫ (1+ψ(|ξ|))^α |û(ξ)|² dξ`, split so that
/// `l2_part² + seminorm_part²` equals the quadratic form (the seminorm
/// weight is `(1+ψ)^α − 1`). Needs the closed-form profile.
pub fn fourier_norm(
    u: &LatticeFunction,
    symbol: &BernsteinSymbol,
    alpha: f64,
) -> Result<NormReport> {
    symbol.validate()?;
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::Parameter(format!("alpha must be nonnegative, got {alpha}")));
    }
    let mix = u.profile.as_ref().ok_or_else(|| {
        Error::Unsupported(
            "Fourier-side norm needs a closed-form profile; sample the function from a \
             Gaussian mixture"
                .into(),
        )
    })?;
    mix.validate()?;
    let n = u.lattice.n;
    if mix.dim() != n {
        return Err(Error::Parameter("profile dimension must match the lattice".into()));
    }
    let cutoff = 9.0 / mix.min_width();
    let two_pi = 2.0 * std::f64::consts::PI;
    let surface = match n {
        1 => 2.0,
        2 => two_pi,
        3 => 2.0 * two_pi,
        _ => return Err(Error::Unsupported(format!("ambient dimension {n} not supported"))),
    };
    let abs2: Box<dyn Fn(f64) -> f64> = if n == 1 {
        Box::new(move |r: f64| mix.fourier_abs2_1d(r).unwrap())
    } else {
        // validated up front so the closure cannot fail mid-quadrature
        mix.fourier_abs_radial(1.0)?;
        Box::new(move |r: f64| {
            let a = mix.fourier_abs_radial(r).unwrap();
            a * a
        })
    };
    let norm_factor = surface / two_pi.powi(n as i32);
    let l2_sq = norm_factor
        * adaptive(
            &|r: f64| r.powi(n as i32 - 1) * abs2(r),
            0.0,
            cutoff,
            1e-7,
            0.0,
        )?;
    let semi_sq = if alpha == 0.0 {
        0.0
    } else {
        norm_factor
            * adaptive(
                &|r: f64| {
                    r.powi(n as i32 - 1) * pow1p_minus_1(symbol.psi_radial(r), alpha) * abs2(r)
                },
                0.0,
                cutoff,
                1e-7,
                0.0,
            )?
    };
    NormReport::new(
        "fourier",
        alpha,
        0,
        String::new(),
        l2_sq.max(0.0).sqrt(),
        semi_sq.max(0.0).sqrt(),
        u.lattice.h,
        format!("frequency cutoff {cutoff:.3e}"),
    )
}

fn support_note(u: &LatticeFunction, guideline: f64) -> String {
    format!(
        "support margin {:.3e} (guideline {:.3e})",
        u.support_margin(1e-12),
        guideline
    )
}

/// The base difference norm: `||u||_{L²} + (∬_{|x−y|<1} |u(x)−u(y)|²
/// φ(|x−y|⁻²)/|x−y|ⁿ dx dy)^{1/2}` by a lattice double sum over pairs
/// within unit distance (α = 1, first differences).
pub fn difference_norm_1(u: &LatticeFunction, symbol: &BernsteinSymbol) -> Result<NormReport> {
    symbol.validate()?;
    let offsets = half_space_offsets(&u.lattice, 1.0);
    let pair_count = offsets.len().saturating_mul(u.values.len()).saturating_mul(2);
    if pair_count > LATTICE_PAIR_CAP {
        return Err(Error::Resource(format!(
            "difference norm needs {pair_count} lattice pairs (cap {LATTICE_PAIR_CAP}); \
             coarsen the lattice or shrink the box"
        )));
    }
    let n = u.lattice.n as i32;
    let binom = binomial_row(1);
    let mut semi_sq = 0.0;
    for (steps, r) in &offsets {
        let weight = symbol.phi(r.powi(-2)) / r.powi(n);
        semi_sq += weight * diff_sq_l2(u, steps, 1, &binom);
    }
    semi_sq *= 2.0 * u.lattice.h.powi(n);
    NormReport::new(
        "diff-1",
        1.0,
        1,
        String::new(),
        u.l2(),
        semi_sq.max(0.0).sqrt(),
        u.lattice.h,
        format!(
            "pairs closer than the lattice spacing dropped; {}",
            support_note(u, 1.0)
        ),
    )
}

/// Difference norm with explicit smoothness: `||u||_{L²} +
/// (∫_{|h|<h₀} ψ^α(|h|⁻¹)/|h|ⁿ ||Δ_h^k u||² dh)^{1/2}`, the h-integral
/// discretized by dyadic shells `[h₀2^{−j−1}, h₀2^{−j})` with the ψ-weight
/// frozen at each shell's midpoint radius `0.75·h₀·2^{−j}`.
pub fn difference_norm_alpha_k(
    u: &LatticeFunction,
    symbol: &BernsteinSymbol,
    alpha: f64,
    k: usize,
    h0: f64,
) -> Result<NormReport> {
    symbol.validate()?;
    if !(alpha > 0.0 && h0 > 0.0) {
        return Err(Error::Parameter(format!(
            "need alpha > 0 and h0 > 0, got alpha={alpha}, h0={h0}"
        )));
    }
    let k_min = min_difference_order_for_symbol(symbol, alpha)?;
    if k < k_min {
        return Err(Error::Parameter(format!(
            "difference order k={k} is below the minimal admissible order {k_min} for this \
             symbol and alpha"
        )));
    }
    let offsets = half_space_offsets(&u.lattice, h0);
    let pair_count = offsets.len().saturating_mul(u.values.len()).saturating_mul(2);
    if pair_count > LATTICE_PAIR_CAP {
        return Err(Error::Resource(format!(
            "difference norm needs {pair_count} lattice pairs (cap {LATTICE_PAIR_CAP})"
        )));
    }
    let n = u.lattice.n as i32;
    let binom = binomial_row(k);
    // shell index j for radius r: largest j with r < h₀·2^{−j} … i.e. the
    // shell [h₀2^{−j−1}, h₀2^{−j}) containing r
    let mut shell_mass: Vec<f64> = Vec::new();
    for (steps, r) in &offsets {
        let j = ((h0 / r).log2() - 1e-12).ceil() as usize - 1;
        if shell_mass.len() <= j {
            shell_mass.resize(j + 1, 0.0);
        }
        // both signs of the half-space offset
        shell_mass[j] += 2.0 * u.lattice.h.powi(n) * diff_sq_l2(u, steps, k, &binom);
    }
    let mut semi_sq = 0.0;
    for (j, &mass) in shell_mass.iter().enumerate() {
        let r_mid = 0.75 * h0 * 2f64.powi(-(j as i32));
        semi_sq += symbol.psi_radial(1.0 / r_mid).powf(alpha) / r_mid.powi(n) * mass;
    }
    let j_last = shell_mass.len().saturating_sub(1);
    NormReport::new(
        "diff-alpha-k",
        alpha,
        k,
        format!("h0={h0}"),
        u.l2(),
        semi_sq.max(0.0).sqrt(),
        u.lattice.h,
        format!(
            "dyadic shells kept through j={j_last} (below lattice spacing dropped); {}",
            support_note(u, k as f64 * h0)
        ),
    )
}

/// Dyadic difference norm: `||u||_{L²} + (Σ_{j≥N} ψ^α(2^j)·2^{nj}·
/// ∫_{|h|<c2^{−j}} ||Δ_h^k u||² dh)^{1/2}`, truncated where the shell
/// radius falls below the lattice spacing.
pub fn dyadic_norm_2(
    u: &LatticeFunction,
    symbol: &BernsteinSymbol,
    alpha: f64,
    k: usize,
    c: f64,
    n_start: i32,
) -> Result<NormReport> {
    symbol.validate()?;
    if !(alpha > 0.0 && c > 0.0) {
        return Err(Error::Parameter(format!(
            "need alpha > 0 and c > 0, got alpha={alpha}, c={c}"
        )));
    }
    let k_min = min_difference_order_for_symbol(symbol, alpha)?;
    if k < k_min {
        return Err(Error::Parameter(format!(
            "difference order k={k} is below the minimal admissible order {k_min} for this \
             symbol and alpha"
        )));
    }
    let extent = (0..u.lattice.n)
        .map(|d| (u.lattice.shape[d] - 1) as f64 * u.lattice.h)
        .fold(f64::INFINITY, f64::min);
    let r0 = c * 2f64.powi(-n_start);
    if r0 > extent {
        return Err(Error::Parameter(format!(
            "first dyadic radius c·2^(−N) = {r0:.3e} exceeds the box extent {extent:.3e}"
        )));
    }
    let offsets = half_space_offsets(&u.lattice, r0);
    let pair_count = offsets.len().saturating_mul(u.values.len()).saturating_mul(2);
    if pair_count > LATTICE_PAIR_CAP {
        return Err(Error::Resource(format!(
            "dyadic norm needs {pair_count} lattice pairs (cap {LATTICE_PAIR_CAP})"
        )));
    }
    let n = u.lattice.n as i32;
    let binom = binomial_row(k);
    // prefix sums of ∫||Δ||² over offsets sorted by radius
    let masses: Vec<f64> = offsets
        .iter()
        .map(|(steps, _)| 2.0 * u.lattice.h.powi(n) * diff_sq_l2(u, steps, k, &binom))
        .collect();
    let mut prefix = Vec::with_capacity(masses.len() + 1);
    prefix.push(0.0);
    for m in &masses {
        prefix.push(prefix.last().unwrap() + m);
    }
    let radii: Vec<f64> = offsets.iter().map(|(_, r)| *r).collect();
    let mut semi_sq = 0.0;
    let mut j = n_start;
    let j_stop;
    loop {
        let rj = c * 2f64.powi(-j);
        // number of offsets with radius < rj
        let cnt = radii.partition_point(|&r| r < rj);
        if cnt == 0 {
            j_stop = j;
            break;
        }
        semi_sq += symbol.psi_radial(2f64.powi(j)).powf(alpha)
            * 2f64.powi(n * j)
            * prefix[cnt];
        j += 1;
        if j - n_start > 128 {
            j_stop = j;
            break;
        }
    }
    NormReport::new(
        "dyadic-2",
        alpha,
        k,
        format!("c={c},N={n_start}"),
        u.l2(),
        semi_sq.max(0.0).sqrt(),
        u.lattice.h,
        format!(
            "dyadic sum truncated at j={j_stop} (shell radius below lattice spacing); {}",
            support_note(u, c * 2f64.powi(-n_start))
        ),
    )
}

/// k-th modulus of continuity `ω_k(u, t) = max_{0<|h|<t} ||Δ_h^k u||_{L²}`
/// over lattice-commensurate shifts; cumulative over the ascending `ts`
/// grid, hence monotone nondecreasing by construction. Entries of `ts`
/// below the lattice spacing yield 0.
pub fn modulus_profile(u: &LatticeFunction, k: usize, ts: &[f64]) -> Result<Vec<f64>> {
    if k == 0 || k > 32 {
        return Err(Error::Parameter(format!("difference order must be in 1..=32, got {k}")));
    }
    if ts.windows(2).any(|w| w[0] > w[1]) || ts.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::Parameter("thresholds must be positive and ascending".into()));
    }
    let max_t = *ts.last().unwrap();
    let offsets = half_space_offsets(&u.lattice, max_t);
    let binom = binomial_row(k);
    let mut out = Vec::with_capacity(ts.len());
    let mut running = 0.0f64;
    let mut next = 0usize;
    for &t in ts {
        while next < offsets.len() && offsets[next].1 < t {
            running = running.max(diff_sq_l2(u, &offsets[next].0, k, &binom));
            next += 1;
        }
        out.push(running.sqrt());
    }
    Ok(out)
}

pub fn modulus_of_continuity(u: &LatticeFunction, k: usize, t: f64) -> Result<f64> {
    Ok(modulus_profile(u, k, &[t])?[0])
}

/// Modulus norm `||u||_{L²} + (Σ_{j=0}^J σ_j² ω_k(u, N_j^{−1})²)^{1/2}`
/// for explicit weight/scale sequences; J is capped by the lattice
/// resolution (N_J^{−1} ≥ 2h) and fewer than three usable scales is an
/// error. The difference-order hypothesis `k > s̄(σ)/s̲(N)` is the caller's
/// obligation here; the symbol-driven wrapper checks it.
pub fn moura_norm(
    u: &LatticeFunction,
    sigma: &[f64],
    n_seq: &[f64],
    k: usize,
) -> Result<NormReport> {
    if sigma.len() != n_seq.len() || sigma.is_empty() {
        return Err(Error::Parameter("weight and scale sequences must match".into()));
    }
    if n_seq.windows(2).any(|w| w[0] >= w[1]) || n_seq[0] <= 0.0 {
        return Err(Error::Parameter("scale sequence must be positive and increasing".into()));
    }
    let h = u.lattice.h;
    let j_max = n_seq
        .iter()
        .take_while(|&&nj| 1.0 / nj >= 2.0 * h)
        .count();
    if j_max < 3 {
        return Err(Error::Parameter(format!(
            "resolution-starved modulus window: only {j_max} scales satisfy N_j^(-1) >= 2h \
             (need at least 3); refine the lattice"
        )));
    }
    let j_top = j_max - 1;
    // moduli at t_j = 1/N_j, evaluated through one ascending profile pass
    let mut ts: Vec<f64> = n_seq[..j_max].iter().map(|&nj| 1.0 / nj).collect();
    ts.reverse();
    let mut omegas = modulus_profile(u, k, &ts)?;
    omegas.reverse();
    let semi_sq: f64 = (0..j_max)
        .map(|j| sigma[j] * sigma[j] * omegas[j] * omegas[j])
        .sum();
    NormReport::new(
        "moura",
        f64::NAN,
        k,
        format!("J={j_top}"),
        u.l2(),
        semi_sq.max(0.0).sqrt(),
        h,
        format!("moduli window truncated at J={j_top} (N_J^(-1) >= 2h)"),
    )
}

/// Modulus norm driven by a symbol: σ_j = 2^{jα}, N_j = ψ⁻¹(2^{2j}), with
/// the minimal-difference-order hypothesis checked.
pub fn moura_norm_for_symbol(
    u: &LatticeFunction,
    symbol: &BernsteinSymbol,
    alpha: f64,
    k: usize,
) -> Result<NormReport> {
    symbol.validate()?;
    if !(alpha > 0.0) {
        return Err(Error::Parameter(format!("alpha must be positive, got {alpha}")));
    }
    let k_min = min_difference_order_for_symbol(symbol, alpha)?;
    if k < k_min {
        return Err(Error::Parameter(format!(
            "difference order k={k} is below the minimal admissible order {k_min} for this \
             symbol and alpha"
        )));
    }
    let h = u.lattice.h;
    let mut sigma = Vec::new();
    let mut n_seq = Vec::new();
    for j in 0..64 {
        let nj = invert_radial(symbol, 2f64.powi(2 * j))?;
        sigma.push(2f64.powf(alpha * j as f64));
        n_seq.push(nj);
        if 1.0 / nj < 2.0 * h {
            break;
        }
    }
    let mut report = moura_norm(u, &sigma, &n_seq, k)?;
    report.alpha = alpha;
    Ok(report)
}

/// Which trace seminorm to evaluate.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceVariant {
    /// `∬_{|x−y|<1} |u(x)−u(y)|² ψ^α(|x−y|⁻¹)/|x−y|^{2d−n} μ(dx)μ(dy)`.
    Direct,
    /// Dyadic analogue: `Σ_{j≥N} ψ^α(2^j)·2^{(2d−n)j}·∬_{|x−y|<c2^{−j}}
    /// |u(x)−u(y)|² μ(dx)μ(dy)`.
    Dyadic { c: f64, n_start: i32 },
}

fn node_dist(quad: &Quadrature, i: usize, j: usize) -> f64 {
    let (a, b) = (quad.node(i), quad.node(j));
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Trace norm on (D, μ). The full double sum runs when the unordered pair
/// count fits the cap; otherwise this errors and
/// [`trace_norm_subsampled`] must be used.
pub fn trace_norm(
    tu: &TraceFunction,
    symbol: &BernsteinSymbol,
    alpha: f64,
    variant: &TraceVariant,
) -> Result<NormReport> {
    trace_norm_impl(tu, symbol, alpha, variant, None)
}

/// Trace norm with seeded uniform pair subsampling (with replacement):
/// the seminorm double sum is estimated from `sample_pairs` random node
/// pairs, scaled by the total pair count.
pub fn trace_norm_subsampled(
    tu: &TraceFunction,
    symbol: &BernsteinSymbol,
    alpha: f64,
    variant: &TraceVariant,
    sample_pairs: usize,
    seed: u64,
) -> Result<NormReport> {
    if sample_pairs == 0 {
        return Err(Error::Parameter("need at least one sampled pair".into()));
    }
    trace_norm_impl(tu, symbol, alpha, variant, Some((sample_pairs, seed)))
}

fn trace_norm_impl(
    tu: &TraceFunction,
    symbol: &BernsteinSymbol,
    alpha: f64,
    variant: &TraceVariant,
    subsample: Option<(usize, u64)>,
) -> Result<NormReport> {
    symbol.validate()?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Parameter(format!("alpha must be positive, got {alpha}")));
    }
    let m = tu.quad.len();
    if m < 2 {
        return Err(Error::Parameter("trace norm needs at least two nodes".into()));
    }
    let d = tu.set.hausdorff_dim();
    let n = tu.set.ambient_dim() as f64;
    let total_pairs = m * (m - 1) / 2;
    if subsample.is_none() && total_pairs > TRACE_PAIR_CAP {
        return Err(Error::Resource(format!(
            "trace norm needs {total_pairs} node pairs (cap {TRACE_PAIR_CAP}); use seeded \
             pair subsampling"
        )));
    }

    let weights = &tu.quad.weights;
    let vals = &tu.values;
    let pair_term_direct = |i: usize, j: usize| -> f64 {
        let r = node_dist(&tu.quad, i, j);
        if r <= 0.0 || r >= 1.0 {
            return 0.0;
        }
        let du = vals[i] - vals[j];
        weights[i] * weights[j] * du * du * symbol.psi_radial(1.0 / r).powf(alpha)
            / r.powf(2.0 * d - n)
    };

    let (semi_sq, truncation) = match variant {
        TraceVariant::Direct => {
            let sum = match subsample {
                None => pairwise_sum(m, &|i| {
                    let mut acc = 0.0;
                    for j in (i + 1)..m {
                        acc += pair_term_direct(i, j);
                    }
                    acc
                }),
                Some((count, seed)) => {
                    sampled_pair_sum(m, count, seed, &pair_term_direct)
                        * (total_pairs as f64 / count as f64)
                }
            };
            (
                2.0 * sum,
                format!(
                    "pairs at distance >= 1 excluded; node resolution {:.3e}{}",
                    tu.quad.spacing,
                    subsample_note(subsample, total_pairs)
                ),
            )
        }
        TraceVariant::Dyadic { c, n_start } => {
            if !(*c > 0.0) {
                return Err(Error::Parameter(format!("dyadic scale c must be positive, got {c}")));
            }
            const J_CAP: usize = 128;
            // bucket pairs by the deepest shell containing them, then
            // suffix-sum so each shell j sees all pairs with r < c·2^{−j}
            let mut buckets = vec![0.0f64; J_CAP + 1];
            let mut fill = |i: usize, j: usize, scale: f64| {
                let r = node_dist(&tu.quad, i, j);
                if r <= 0.0 {
                    return;
                }
                let jm = ((c / r).log2() - 1e-12).ceil() as i64 - 1;
                if jm < *n_start as i64 {
                    return;
                }
                let slot = ((jm - *n_start as i64) as usize).min(J_CAP);
                let du = vals[i] - vals[j];
                buckets[slot] += scale * weights[i] * weights[j] * du * du;
            };
            match subsample {
                None => {
                    for i in 0..m {
                        for j in (i + 1)..m {
                            fill(i, j, 1.0);
                        }
                    }
                }
                Some((count, seed)) => {
                    let factor = total_pairs as f64 / count as f64;
                    for (i, j) in sampled_pairs(m, count, seed) {
                        fill(i, j, factor);
                    }
                }
            }
            let mut acc = 0.0;
            let mut sum = 0.0;
            let mut j_stop = *n_start;
            for slot in (0..buckets.len()).rev() {
                acc += buckets[slot];
                if acc > 0.0 {
                    let j = n_start + slot as i32;
                    sum += symbol.psi_radial(2f64.powi(j)).powf(alpha)
                        * 2f64.powf((2.0 * d - n) * j as f64)
                        * acc;
                    j_stop = j_stop.max(j);
                }
            }
            (
                2.0 * sum,
                format!(
                    "dyadic shells kept through j={j_stop} (smallest node separation \
                     bounds the sum){}",
                    subsample_note(subsample, total_pairs)
                ),
            )
        }
    };

    let (variant_name, params) = match variant {
        TraceVariant::Direct => ("trace-1", String::new()),
        TraceVariant::Dyadic { c, n_start } => ("trace-2", format!("c={c},N={n_start}")),
    };
    NormReport::new(
        variant_name,
        alpha,
        1,
        params,
        tu.l2(),
        semi_sq.max(0.0).sqrt(),
        tu.quad.spacing,
        truncation,
    )
}

fn subsample_note(subsample: Option<(usize, u64)>, total_pairs: usize) -> String {
    match subsample {
        None => String::new(),
        Some((count, seed)) => {
            format!("; subsampled {count} of {total_pairs} pairs (seed {seed})")
        }
    }
}

fn sampled_pairs(m: usize, count: usize, seed: u64) -> Vec<(usize, usize)> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let i = rng.gen_range(0..m);
        let j = rng.gen_range(0..m);
        if i != j {
            out.push((i.min(j), i.max(j)));
        }
    }
    out
}

fn sampled_pair_sum<F: Fn(usize, usize) -> f64 + Sync>(
    m: usize,
    count: usize,
    seed: u64,
    term: &F,
) -> f64 {
    let pairs = sampled_pairs(m, count, seed);
    pairwise_sum(pairs.len(), &|p| term(pairs[p].0, pairs[p].1))
}
