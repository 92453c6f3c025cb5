//! Radial Fourier symbols ψ(ξ) = φ(|ξ|²) built from complete Bernstein
//! functions φ, together with their scaling indices: the four exponents
//! (δ₁, δ₂) for the large-argument regime and (δ₃, δ₄) for the small-argument
//! regime that control every embedding and trace statement downstream.

use crate::{logspace, Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;
use std::fmt;

/// A complete Bernstein function from one of the shipped families.
///
/// Every variant satisfies the two-sided bound
/// `min(1, λ) ≤ φ(λx)/φ(x) ≤ max(1, λ)` exactly, and declares closed-form
/// scaling indices that [`estimate_scaling_indices`] can confirm empirically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum BernsteinSymbol {
    /// `φ(x) = x^s`, the fractional Laplacian symbol; `0 < s ≤ 1`.
    Power { s: f64 },
    /// `φ(x) = x^s1 + x^s2`, a sum of stable symbols; both exponents in `(0, 1]`.
    PowerSum { s1: f64, s2: f64 },
    /// `φ(x) = x^s · ln(1+x)^β` with `s, β > 0` and `s + β < 1`; the regimes
    /// genuinely differ: the large-argument upper index is `s + β/(2 ln 2)`
    /// while the small-argument one is `s + β`.
    LogPerturbed { s: f64, beta: f64 },
    /// `φ̃(x) = φ(x)^(1/2) · x^(1/(4α))`, the lift that trades one ambient
    /// codimension for a stronger symbol; built by [`lift_symbol`].
    Lifted { base: Box<BernsteinSymbol>, alpha: f64 },
}

impl BernsteinSymbol {
    /// Check the family's parameter constraints.
    pub fn validate(&self) -> Result<()> {
        match self {
            BernsteinSymbol::Power { s } => {
                if !(*s > 0.0 && *s <= 1.0) {
                    return Err(Error::Parameter(format!(
                        "power symbol needs 0 < s <= 1, got s = {s}"
                    )));
                }
            }
            BernsteinSymbol::PowerSum { s1, s2 } => {
                for (name, s) in [("s1", *s1), ("s2", *s2)] {
                    if !(s > 0.0 && s <= 1.0) {
                        return Err(Error::Parameter(format!(
                            "power-sum symbol needs 0 < {name} <= 1, got {name} = {s}"
                        )));
                    }
                }
            }
            BernsteinSymbol::LogPerturbed { s, beta } => {
                if !(*s > 0.0 && *beta > 0.0 && s + beta < 1.0) {
                    return Err(Error::Parameter(format!(
                        "log-perturbed symbol needs s > 0, beta > 0, s + beta < 1, \
                         got s = {s}, beta = {beta}"
                    )));
                }
            }
            BernsteinSymbol::Lifted { base, alpha } => {
                if !(*alpha > 0.5) {
                    return Err(Error::Parameter(format!(
                        "lifted symbol needs alpha > 1/2, got alpha = {alpha}"
                    )));
                }
                base.validate()?;
            }
        }
        Ok(())
    }

    /// Evaluate `φ(x)` for `x ≥ 0`.
    pub fn phi(&self, x: f64) -> f64 {
        debug_assert!(x >= 0.0, "phi takes nonnegative arguments");
        match self {
            BernsteinSymbol::Power { s } => x.powf(*s),
            BernsteinSymbol::PowerSum { s1, s2 } => x.powf(*s1) + x.powf(*s2),
            BernsteinSymbol::LogPerturbed { s, beta } => x.powf(*s) * x.ln_1p().powf(*beta),
            BernsteinSymbol::Lifted { base, alpha } => {
                base.phi(x).sqrt() * x.powf(1.0 / (4.0 * alpha))
            }
        }
    }

    /// The radial symbol `r ↦ φ(r²)`.
    pub fn psi_radial(&self, r: f64) -> f64 {
        self.phi(r * r)
    }

    /// The symbol at a frequency vector, `ψ(ξ) = φ(|ξ|²)`.
    pub fn psi(&self, xi: &[f64]) -> f64 {
        self.phi(xi.iter().map(|c| c * c).sum())
    }

    /// Declared scaling indices `[δ₁, δ₂, δ₃, δ₄]`: lower/upper exponents of
    /// `φ(λx)/φ(x)` for `x ≥ 1` (first pair) and `0 < x ≤ 1` (second pair),
    /// with λ ≥ 1 throughout.
    pub fn indices(&self) -> [f64; 4] {
        match self {
            BernsteinSymbol::Power { s } => [*s; 4],
            BernsteinSymbol::PowerSum { s1, s2 } => {
                let lo = s1.min(*s2);
                let hi = s1.max(*s2);
                [lo, hi, lo, hi]
            }
            BernsteinSymbol::LogPerturbed { s, beta } => {
                // the local exponent s + β·x/((1+x) ln(1+x)) is maximized at
                // x = 1 on the large-argument side and tends to s + β at 0
                [*s, s + beta / (2.0 * LN_2), *s, s + beta]
            }
            BernsteinSymbol::Lifted { base, alpha } => {
                let d = base.indices();
                let shift = 1.0 / (4.0 * alpha);
                [
                    d[0] / 2.0 + shift,
                    d[1] / 2.0 + shift,
                    d[2] / 2.0 + shift,
                    d[3] / 2.0 + shift,
                ]
            }
        }
    }
}

impl fmt::Display for BernsteinSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BernsteinSymbol::Power { s } => write!(f, "power(s={s})"),
            BernsteinSymbol::PowerSum { s1, s2 } => write!(f, "power-sum(s1={s1},s2={s2})"),
            BernsteinSymbol::LogPerturbed { s, beta } => {
                write!(f, "log-perturbed(s={s},beta={beta})")
            }
            BernsteinSymbol::Lifted { base, alpha } => write!(f, "lifted({base},alpha={alpha})"),
        }
    }
}

/// Result of sweeping the two-sided Bernstein bound over a grid.
#[derive(Debug, Clone, Copy)]
pub struct BernsteinCheck {
    /// Worst relative excursion outside `[min(1,λ), max(1,λ)]`; 0 when the
    /// bound holds everywhere on the grid.
    pub max_rel_violation: f64,
    pub pairs_checked: usize,
}

/// Verify `min(1, λ) ≤ φ(λr)/φ(r) ≤ max(1, λ)` over the grid product.
pub fn check_bernstein_bounds(
    symbol: &BernsteinSymbol,
    lambdas: &[f64],
    rs: &[f64],
) -> Result<BernsteinCheck> {
    symbol.validate()?;
    if lambdas.iter().chain(rs).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::Parameter(
            "bernstein grid values must be positive and finite".into(),
        ));
    }
    let mut worst = 0.0f64;
    let mut pairs = 0usize;
    for &lam in lambdas {
        for &r in rs {
            let ratio = symbol.phi(lam * r) / symbol.phi(r);
            if !ratio.is_finite() {
                return Err(Error::Numeric(format!(
                    "bernstein ratio overflowed at lambda = {lam:.3e}, r = {r:.3e}"
                )));
            }
            let lo = lam.min(1.0);
            let hi = lam.max(1.0);
            worst = worst.max((lo - ratio) / lo).max((ratio - hi) / hi);
            pairs += 1;
        }
    }
    Ok(BernsteinCheck { max_rel_violation: worst.max(0.0), pairs_checked: pairs })
}

/// Empirical bracket for the scaling exponents of a radial symbol.
#[derive(Debug, Clone, Copy)]
pub struct ScalingEstimate {
    pub delta_lo: f64,
    pub delta_hi: f64,
}

/// Estimate scaling indices of a radial symbol `ψ` from grid ratios.
///
/// For every λ > 1 in `lambda_grid` and every radius t in `t_grid` the local
/// exponent `ln(ψ(λt)/ψ(t)) / (2 ln λ)` is accumulated; the factor 2 converts
/// from the radial scale to the `φ`-argument scale, so the returned bracket is
/// directly comparable with [`BernsteinSymbol::indices`]. Restrict `t_grid` to
/// radii ≥ 1 or ≤ 1 to probe one regime alone; the defaults span both.
pub fn estimate_scaling_indices<F: Fn(f64) -> f64>(
    psi_radial: &F,
    lambda_grid: &[f64],
    t_grid: &[f64],
) -> Result<ScalingEstimate> {
    let lambdas: Vec<f64> = lambda_grid.iter().copied().filter(|&l| l > 1.0).collect();
    if lambdas.is_empty() || t_grid.is_empty() {
        return Err(Error::Parameter(
            "scaling-index estimation needs at least one lambda > 1 and a nonempty radius grid"
                .into(),
        ));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &lam in &lambdas {
        for &t in t_grid {
            let num = psi_radial(lam * t);
            let den = psi_radial(t);
            if !(num > 0.0 && den > 0.0 && num.is_finite() && den.is_finite()) {
                return Err(Error::Numeric(format!(
                    "radial symbol not positive-finite near t = {t:.3e} (lambda = {lam:.3e})"
                )));
            }
            let d = (num / den).ln() / (2.0 * lam.ln());
            lo = lo.min(d);
            hi = hi.max(d);
        }
    }
    Ok(ScalingEstimate { delta_lo: lo, delta_hi: hi })
}

/// Default dilation grid `[1, 10³]`, 64 points log-uniform (the λ = 1
/// endpoint is filtered out by the estimator).
pub fn default_lambda_grid() -> Vec<f64> {
    logspace(0.0, 3.0, 64)
}

/// Default radius grid `[10⁻⁴, 10⁴]`, 96 points log-uniform, spanning both
/// scaling regimes.
pub fn default_t_grid() -> Vec<f64> {
    logspace(-4.0, 4.0, 96)
}

/// Radius grid for the large-argument regime only: `[1, 10⁴]`, 48 points.
pub fn h1_t_grid() -> Vec<f64> {
    logspace(0.0, 4.0, 48)
}

/// Radius grid for the small-argument regime only: 48 points of
/// `[10⁻⁴, 1]` with the right endpoint removed.
pub fn h2_t_grid() -> Vec<f64> {
    let mut v = logspace(-4.0, 0.0, 49);
    v.pop();
    v
}

/// The exponent window that admits a trace on a d-set, already multiplied
/// through by the smoothness order α.
#[derive(Debug, Clone, Copy)]
pub struct ExponentGate {
    /// `α δ₁`, which must exceed `lower`.
    pub alpha_delta_lo: f64,
    /// `α max(δ₂, δ₄)`, which must stay below `upper`.
    pub alpha_delta_hi: f64,
    /// `(n − d)/2`.
    pub lower: f64,
    /// `(n − d)/2 + 1`.
    pub upper: f64,
}

impl fmt::Display for ExponentGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(n-d)/2 = {:.6} < alpha*delta_lo = {:.6} <= alpha*delta_hi = {:.6} < (n-d)/2 + 1 = {:.6}",
            self.lower, self.alpha_delta_lo, self.alpha_delta_hi, self.upper
        )
    }
}

/// Check the admissibility window `(n−d)/2 < αδ₁ ≤ α·max(δ₂,δ₄) < (n−d)/2 + 1`
/// for tracing α-smooth functions in ℝⁿ onto a d-set.
///
/// Returns the evaluated gate on success and a gate error (exit-worthy, not a
/// bug) when the window is violated.
pub fn check_trace_exponents(
    symbol: &BernsteinSymbol,
    alpha: f64,
    n: usize,
    d: f64,
) -> Result<ExponentGate> {
    symbol.validate()?;
    if !(alpha > 0.0) {
        return Err(Error::Parameter(format!("alpha must be positive, got {alpha}")));
    }
    if !(d >= 0.0 && d <= n as f64) {
        return Err(Error::Parameter(format!(
            "dimension d must lie in [0, {n}], got {d}"
        )));
    }
    let idx = symbol.indices();
    let gate = ExponentGate {
        alpha_delta_lo: alpha * idx[0],
        alpha_delta_hi: alpha * idx[1].max(idx[3]),
        lower: (n as f64 - d) / 2.0,
        upper: (n as f64 - d) / 2.0 + 1.0,
    };
    if gate.lower < gate.alpha_delta_lo
        && gate.alpha_delta_lo <= gate.alpha_delta_hi
        && gate.alpha_delta_hi < gate.upper
    {
        Ok(gate)
    } else {
        Err(Error::Gate(format!("trace exponent window violated: need {gate}")))
    }
}

/// Build the lifted symbol `φ̃(x) = φ(x)^(1/2) x^(1/(4α))` and the smoothness
/// order `α̃ = 2α` it is used with, so that one ambient codimension step
/// preserves the trace space.
pub fn lift_symbol(base: &BernsteinSymbol, alpha: f64) -> Result<(BernsteinSymbol, f64)> {
    base.validate()?;
    if !(alpha > 0.5) {
        return Err(Error::Parameter(format!(
            "codimension lift needs alpha > 1/2, got alpha = {alpha}"
        )));
    }
    Ok((
        BernsteinSymbol::Lifted { base: Box::new(base.clone()), alpha },
        2.0 * alpha,
    ))
}

/// Solve `φ(r²) = y` for `r` in the default bracket `[10⁻¹², 10¹²]`.
pub fn invert_radial(symbol: &BernsteinSymbol, y: f64) -> Result<f64> {
    invert_radial_in(symbol, y, 1e-12, 1e12)
}

/// Solve `φ(r²) = y` for `r` within `[lo, hi]` by log-space bisection.
///
/// The radial symbol is strictly increasing, so the root is unique; a range
/// error means `y` falls outside `[ψ(lo), ψ(hi)]`.
pub fn invert_radial_in(symbol: &BernsteinSymbol, y: f64, lo: f64, hi: f64) -> Result<f64> {
    const RTOL: f64 = 1e-10;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Parameter(format!(
            "invert_radial bracket must satisfy 0 < lo < hi, got [{lo:.3e}, {hi:.3e}]"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let fa = symbol.psi_radial(a);
    let fb = symbol.psi_radial(b);
    if !(fa <= y && y <= fb) {
        return Err(Error::Range(format!(
            "no radius in [{a:.3e}, {b:.3e}] with symbol value {y:.6e} \
             (bracket spans [{fa:.6e}, {fb:.6e}])"
        )));
    }
    for _ in 0..200 {
        let mid = (a.ln() + b.ln()).mul_add(0.5, 0.0).exp();
        if symbol.psi_radial(mid) < y {
            a = mid;
        } else {
            b = mid;
        }
        if b - a <= RTOL * a {
            break;
        }
    }
    Ok(0.5 * (a + b))
}
