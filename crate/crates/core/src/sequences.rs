//! Admissible sequences and their growth exponents: bounded-growth constants,
//! the strong-increase lag κ₀, the resolution sequence N^{a,r} obtained by
//! inverting a radial symbol at dyadic targets, Boyd indices on finite
//! windows, and the minimal difference order k they dictate for modulus-based
//! norms.

use crate::{Error, Result};

/// A positive sequence with verified two-sided growth constants
/// `d₀ γ_j ≤ γ_{j+1} ≤ d₁ γ_j`.
#[derive(Debug, Clone)]
pub struct AdmissibleSequence {
    pub values: Vec<f64>,
    pub d0: f64,
    pub d1: f64,
}

impl AdmissibleSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let (d0, d1) = check_admissible(&values)?;
        Ok(AdmissibleSequence { values, d0, d1 })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Tightest bounded-growth constants: `(min γ_{j+1}/γ_j, max γ_{j+1}/γ_j)`.
pub fn check_admissible(gamma: &[f64]) -> Result<(f64, f64)> {
    if gamma.len() < 2 {
        return Err(Error::Parameter(
            "admissibility needs at least two sequence entries".into(),
        ));
    }
    if let Some(bad) = gamma.iter().find(|&&g| !(g > 0.0 && g.is_finite())) {
        return Err(Error::Domain(format!(
            "admissible sequences must be positive and finite, found {bad}"
        )));
    }
    let mut d0 = f64::INFINITY;
    let mut d1 = 0.0f64;
    for w in gamma.windows(2) {
        let ratio = w[1] / w[0];
        d0 = d0.min(ratio);
        d1 = d1.max(ratio);
    }
    Ok((d0, d1))
}

/// Smallest lag κ₀ with `2 γ_j ≤ γ_k` whenever `k − j ≥ κ₀`, searched up to
/// half the window length (a lag of half the data carries no information).
pub fn check_strongly_increasing(gamma: &[f64]) -> Result<usize> {
    check_admissible(gamma)?;
    let len = gamma.len();
    let max_lag = len / 2;
    'lag: for kappa in 1..=max_lag {
        for j in 0..len {
            for k in (j + kappa)..len {
                if 2.0 * gamma[j] > gamma[k] {
                    continue 'lag;
                }
            }
        }
        return Ok(kappa);
    }
    Err(Error::Domain(format!(
        "sequence is not strongly increasing: no doubling lag up to {max_lag} \
         on a window of {len} entries"
    )))
}

/// The resolution sequence `N_j = a⁻¹(2^{jr})` for a strictly increasing
/// radial function `a`, solved by log-space bisection with an expanding
/// bracket; `count` entries starting at j = 0.
pub fn make_n_sequence<F: Fn(f64) -> f64>(a: &F, r: f64, count: usize) -> Result<Vec<f64>> {
    if !(r > 0.0) {
        return Err(Error::Parameter(format!("rate must be positive, got r = {r}")));
    }
    if count == 0 {
        return Err(Error::Parameter("sequence length must be positive".into()));
    }
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        let target = 2f64.powf(j as f64 * r);
        out.push(invert_increasing(a, target)?);
    }
    Ok(out)
}

/// Solve `a(x) = y` for strictly increasing `a`, expanding the default
/// bracket `[1e-12, 1e12]` as far as `[1e-300, 1e300]` before giving up.
fn invert_increasing<F: Fn(f64) -> f64>(a: &F, y: f64) -> Result<f64> {
    const RTOL: f64 = 1e-12;
    let mut lo = 1e-12f64;
    let mut hi = 1e12f64;
    while a(hi) < y {
        hi *= 16.0;
        if hi > 1e300 {
            return Err(Error::Range(format!(
                "no radius up to 1e300 reaches symbol value {y:.6e}"
            )));
        }
    }
    while a(lo) > y {
        lo /= 16.0;
        if lo < 1e-300 {
            return Err(Error::Range(format!(
                "symbol value {y:.6e} undercut even at radius 1e-300"
            )));
        }
    }
    for _ in 0..220 {
        let mid = (0.5 * (lo.ln() + hi.ln())).exp();
        if a(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= RTOL * lo {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Boyd indices `(s̲, s̄)` of an admissible sequence on a finite window.
///
/// With `γ̄_j = max_k γ_{j+k}/γ_k` over the window, the upper index is the
/// Fekete infimum surrogate `min_{J/2 ≤ j ≤ J} ln(γ̄_j)/j`; the lower index
/// is minus the upper index of the reciprocal sequence. Needs `2J + 1`
/// entries and `J ≥ 8`.
pub fn boyd_indices(gamma: &[f64], j_window: usize) -> Result<(f64, f64)> {
    if j_window < 8 {
        return Err(Error::Parameter(format!(
            "Boyd window too short: need J >= 8, got {j_window}"
        )));
    }
    if gamma.len() < 2 * j_window + 1 {
        return Err(Error::Parameter(format!(
            "Boyd window J = {j_window} needs {} entries, got {}",
            2 * j_window + 1,
            gamma.len()
        )));
    }
    check_admissible(gamma)?;
    let upper = fekete_upper(gamma, j_window);
    let inv: Vec<f64> = gamma.iter().map(|g| 1.0 / g).collect();
    let lower = -fekete_upper(&inv, j_window);
    Ok((lower, upper))
}

fn fekete_upper(gamma: &[f64], j_window: usize) -> f64 {
    let mut best = f64::INFINITY;
    for j in (j_window / 2)..=j_window {
        let mut sup = 0.0f64;
        for k in 0..=j_window {
            sup = sup.max(gamma[j + k] / gamma[k]);
        }
        best = best.min(sup.ln() / j as f64);
    }
    best
}

/// Smallest integer strictly exceeding `s̄(σ)/s̲(N)`: the minimal difference
/// order for modulus-of-continuity norms built on (σ, N). Both sequences
/// must carry `2J + 1` entries for the given window.
pub fn min_difference_order(sigma: &[f64], n_seq: &[f64], j_window: usize) -> Result<usize> {
    let (_, sigma_upper) = boyd_indices(sigma, j_window)?;
    let (n_lower, _) = boyd_indices(n_seq, j_window)?;
    if !(n_lower > 0.0) {
        return Err(Error::Parameter(format!(
            "resolution sequence must have positive lower Boyd index, got {n_lower:.6e}"
        )));
    }
    let ratio = sigma_upper / n_lower;
    // nudge guards against a ratio that rounds down from an exact integer;
    // the order must strictly exceed the ratio
    Ok((ratio + 1e-9).floor() as usize + 1)
}

/// Difference order for the α-smooth space over a Bernstein symbol:
/// σ_j = 2^{jα} paired with N_j = ψ⁻¹(2^{2j}), window J = 48.
pub fn min_difference_order_for_symbol(
    symbol: &crate::symbols::BernsteinSymbol,
    alpha: f64,
) -> Result<usize> {
    symbol.validate()?;
    if !(alpha > 0.0) {
        return Err(Error::Parameter(format!("alpha must be positive, got {alpha}")));
    }
    const J: usize = 48;
    let count = 2 * J + 1;
    let sigma: Vec<f64> = (0..count).map(|j| 2f64.powf(alpha * j as f64)).collect();
    let n_seq = make_n_sequence(&|t| symbol.psi_radial(t), 2.0, count)?;
    min_difference_order(&sigma, &n_seq, J)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::BernsteinSymbol;
    use std::f64::consts::LN_2;

    #[test]
    fn admissibility_constants_are_tight() {
        let pow2: Vec<f64> = (0..20).map(|j| 2f64.powi(j)).collect();
        let (d0, d1) = check_admissible(&pow2).unwrap();
        assert_eq!((d0, d1), (2.0, 2.0));

        let ones = vec![1.0; 10];
        assert_eq!(check_admissible(&ones).unwrap(), (1.0, 1.0));

        // ratio 2(j+1)(j+3)/(j+2)^2 stays strictly below 2 and climbs toward it
        let mixed: Vec<f64> = (0..20)
            .map(|j| 2f64.powi(j) * (1.0 + 1.0 / (j as f64 + 1.0)))
            .collect();
        let (d0, d1) = check_admissible(&mixed).unwrap();
        assert!(d0 < d1 && d1 < 2.0 && d1 > 1.99 && d0 >= 1.5);

        assert!(matches!(
            check_admissible(&[1.0, 0.0, 2.0]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn strong_increase_lag_is_smallest() {
        let pow2: Vec<f64> = (0..32).map(|j| 2f64.powi(j)).collect();
        assert_eq!(check_strongly_increasing(&pow2).unwrap(), 1);

        let half: Vec<f64> = (0..32).map(|j| 2f64.powf(j as f64 / 2.0)).collect();
        assert_eq!(check_strongly_increasing(&half).unwrap(), 2);

        let linear: Vec<f64> = (0..65).map(|j| j as f64 + 1.0).collect();
        assert!(matches!(
            check_strongly_increasing(&linear),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn resolution_sequence_matches_closed_form_inversions() {
        let n = make_n_sequence(&|x: f64| x * x, 2.0, 12).unwrap();
        for (j, v) in n.iter().enumerate() {
            assert!((v - 2f64.powi(j as i32)).abs() <= 1e-9 * v, "j={j}: {v}");
        }

        let n = make_n_sequence(&|x: f64| x, 2.0, 10).unwrap();
        for (j, v) in n.iter().enumerate() {
            assert!((v - 4f64.powi(j as i32)).abs() <= 1e-9 * v, "j={j}: {v}");
        }

        let n = make_n_sequence(&|x: f64| x.powf(1.2), 2.0, 10).unwrap();
        for (j, v) in n.iter().enumerate() {
            let want = 2f64.powf(2.0 * j as f64 / 1.2);
            assert!((v - want).abs() <= 1e-9 * want, "j={j}: {v} vs {want}");
        }
    }

    #[test]
    fn resolution_sequence_is_admissible_and_strongly_increasing() {
        for symbol in [
            BernsteinSymbol::Power { s: 0.4 },
            BernsteinSymbol::PowerSum { s1: 0.3, s2: 0.7 },
            BernsteinSymbol::LogPerturbed { s: 0.5, beta: 0.3 },
        ] {
            let n = make_n_sequence(&|t| symbol.psi_radial(t), 2.0, 40).unwrap();
            check_admissible(&n).unwrap();
            check_strongly_increasing(&n).unwrap();
        }
    }

    #[test]
    fn boyd_indices_of_pure_powers_are_exact() {
        for alpha in [0.3, 0.7, 1.0, 2.2, 3.0] {
            let gamma: Vec<f64> = (0..97).map(|j| 2f64.powf(alpha * j as f64)).collect();
            let (lo, hi) = boyd_indices(&gamma, 48).unwrap();
            assert!((lo - alpha * LN_2).abs() < 1e-12, "alpha={alpha}: lo={lo}");
            assert!((hi - alpha * LN_2).abs() < 1e-12, "alpha={alpha}: hi={hi}");
        }
        let ones = vec![1.0; 97];
        assert_eq!(boyd_indices(&ones, 48).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn boyd_upper_index_converges_from_above_for_perturbed_powers() {
        let gamma: Vec<f64> = (0..129)
            .map(|j| 2f64.powi(j) * (j as f64 + 1.0))
            .collect();
        let (_, hi_small) = boyd_indices(&gamma[..33], 16).unwrap();
        let (lo, hi_large) = boyd_indices(&gamma, 64).unwrap();
        assert!(hi_small > hi_large, "{hi_small} vs {hi_large}");
        assert!(hi_large > LN_2);
        assert!(lo <= hi_large);
    }

    #[test]
    fn short_windows_are_rejected() {
        let gamma: Vec<f64> = (0..97).map(|j| 2f64.powi(j)).collect();
        assert!(matches!(
            boyd_indices(&gamma, 7),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            boyd_indices(&gamma[..20], 48),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn difference_order_covers_the_boundary_cases() {
        let cases = [
            (BernsteinSymbol::Power { s: 0.5 }, 1.0, 1usize),
            (BernsteinSymbol::Power { s: 0.9 }, 3.0, 3),
            (BernsteinSymbol::Power { s: 0.5 }, 2.0, 2),
            (BernsteinSymbol::Power { s: 0.4 }, 1.0, 1),
        ];
        for (symbol, alpha, want) in cases {
            let k = min_difference_order_for_symbol(&symbol, alpha).unwrap();
            assert_eq!(k, want, "{symbol}, alpha={alpha}");
        }
    }
}
