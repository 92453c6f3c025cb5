//! Randomized structural properties: exact inequalities, exact annihilation,
//! homogeneity and triangle bounds, inversion identities, and sequence
//! admissibility, each over a sampled parameter space.

use besov_trace::lattice::{GaussianMix, GaussianTerm, Lattice, LatticeFunction};
use besov_trace::norms::{difference_norm_alpha_k, kth_difference, modulus_profile};
use besov_trace::sequences::{check_admissible, check_strongly_increasing, make_n_sequence};
use besov_trace::symbols::{
    check_bernstein_bounds, estimate_scaling_indices, invert_radial, BernsteinSymbol,
};
use besov_trace::logspace;
use proptest::prelude::*;

fn arb_symbol() -> impl Strategy<Value = BernsteinSymbol> {
    prop_oneof![
        (0.05f64..=1.0).prop_map(|s| BernsteinSymbol::Power { s }),
        ((0.05f64..=1.0), (0.05f64..=1.0))
            .prop_map(|(s1, s2)| BernsteinSymbol::PowerSum { s1, s2 }),
        ((0.05f64..0.9), (0.05f64..0.9)).prop_map(|(s, frac)| {
            // beta stays below 1 - s so the family constraint holds.
            BernsteinSymbol::LogPerturbed { s, beta: frac * (1.0 - s) }
        }),
        ((0.05f64..=1.0), (0.55f64..3.0)).prop_map(|(s, alpha)| BernsteinSymbol::Lifted {
            base: Box::new(BernsteinSymbol::Power { s }),
            alpha,
        }),
    ]
}

fn gaussian(width: f64, center: f64, h: f64) -> LatticeFunction {
    let lat = Lattice::new(&[-4.0], &[4.0], h).unwrap();
    let mix = GaussianMix {
        terms: vec![GaussianTerm { coef: 1.0, center: vec![center], width }],
    };
    LatticeFunction::from_mix(lat, mix).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The two-sided dilation bound holds with zero tolerance for every
    /// sampled member of every shipped family.
    #[test]
    fn bernstein_bound_never_violated(symbol in arb_symbol()) {
        let lambdas = logspace(-2.0, 2.0, 16);
        let rs = logspace(-3.0, 3.0, 16);
        let check = check_bernstein_bounds(&symbol, &lambdas, &rs).unwrap();
        prop_assert!(
            check.max_rel_violation <= 1e-12,
            "violation {} for {symbol}",
            check.max_rel_violation
        );
    }

    /// For a pure power the empirical scaling bracket collapses to the
    /// exponent itself.
    #[test]
    fn scaling_bracket_is_exact_for_powers(s in 0.05f64..=1.0) {
        let est = estimate_scaling_indices(
            &|t: f64| t.powf(2.0 * s),
            &logspace(0.1, 2.0, 12),
            &logspace(-2.0, 2.0, 12),
        )
        .unwrap();
        prop_assert!((est.delta_lo - s).abs() <= 1e-10);
        prop_assert!((est.delta_hi - s).abs() <= 1e-10);
    }

    /// Inverting the radial symbol is a right inverse of evaluating it.
    #[test]
    fn radial_inversion_identity(symbol in arb_symbol(), log_r in -2.0f64..2.0) {
        let r = 10f64.powf(log_r);
        let y = symbol.psi_radial(r);
        let back = invert_radial(&symbol, y).unwrap();
        prop_assert!(
            (back - r).abs() <= 1e-8 * r,
            "psi^-1(psi({r})) = {back} for {symbol}"
        );
    }

    /// The k-th difference annihilates every polynomial of degree < k.
    #[test]
    fn kth_difference_annihilates_low_degree(
        k in 1usize..=3,
        coeffs in prop::array::uniform3(-2.0f64..2.0),
        steps in 1i64..=3,
    ) {
        let lat = Lattice::new(&[-1.0], &[1.0], 0.125).unwrap();
        let u = LatticeFunction::sample(lat, |x| {
            // degree k-1 polynomial: higher coefficients are dropped
            (0..k).map(|i| coeffs[i] * x[0].powi(i as i32)).sum()
        })
        .unwrap();
        let shift = [steps as f64 * 0.125];
        let diff = kth_difference(&u, &shift, k).unwrap();
        let worst = diff.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!(worst <= 1e-10, "k = {k}: residual {worst}");
    }

    /// Norms are absolutely homogeneous: every part scales by |c|.
    #[test]
    fn difference_norm_is_homogeneous(
        width in 0.3f64..1.5,
        c in 0.1f64..8.0,
    ) {
        let symbol = BernsteinSymbol::Power { s: 0.4 };
        let u = gaussian(width, 0.0, 1.0 / 32.0);
        let base = difference_norm_alpha_k(&u, &symbol, 1.0, 1, 1.0).unwrap();
        let scaled = difference_norm_alpha_k(&u.scaled(c), &symbol, 1.0, 1, 1.0).unwrap();
        prop_assert!((scaled.total - c * base.total).abs() <= 1e-9 * c * base.total);
        prop_assert!((scaled.l2_part - c * base.l2_part).abs() <= 1e-9 * c * base.l2_part);
    }

    /// Norms satisfy the triangle inequality on the sampled family.
    #[test]
    fn difference_norm_triangle_inequality(
        w1 in 0.3f64..1.5,
        w2 in 0.3f64..1.5,
        c1 in -1.0f64..1.0,
        c2 in -1.0f64..1.0,
    ) {
        let symbol = BernsteinSymbol::Power { s: 0.4 };
        let u = gaussian(w1, c1, 1.0 / 32.0);
        let v = gaussian(w2, c2, 1.0 / 32.0);
        let sum = u.plus(&v).unwrap();
        let nu = difference_norm_alpha_k(&u, &symbol, 1.0, 1, 1.0).unwrap().total;
        let nv = difference_norm_alpha_k(&v, &symbol, 1.0, 1, 1.0).unwrap().total;
        let ns = difference_norm_alpha_k(&sum, &symbol, 1.0, 1, 1.0).unwrap().total;
        prop_assert!(ns <= nu + nv + 1e-9 * (nu + nv), "{ns} > {nu} + {nv}");
    }

    /// The modulus of continuity is non-decreasing in the shift bound.
    #[test]
    fn modulus_profile_is_monotone(width in 0.3f64..1.5, k in 1usize..=2) {
        let u = gaussian(width, 0.0, 1.0 / 32.0);
        let ts: Vec<f64> = (1..=10).map(|i| 0.08 * i as f64).collect();
        let omega = modulus_profile(&u, k, &ts).unwrap();
        for w in omega.windows(2) {
            prop_assert!(w[1] >= w[0], "profile decreased: {:?}", omega);
        }
    }

    /// Resolution sequences built by inverting a power symbol are admissible
    /// and strongly increasing, with the exact growth ratio 2^{r/(2s)}.
    #[test]
    fn resolution_sequences_are_admissible(s in 0.1f64..=1.0, r in 0.5f64..3.0) {
        let seq = make_n_sequence(&|t: f64| t.powf(2.0 * s), r, 12).unwrap();
        let (d0, d1) = check_admissible(&seq).unwrap();
        let want = 2f64.powf(r / (2.0 * s));
        prop_assert!((d0 - want).abs() <= 1e-6 * want, "d0 = {d0} vs {want}");
        prop_assert!((d1 - want).abs() <= 1e-6 * want, "d1 = {d1} vs {want}");
        let kappa = check_strongly_increasing(&seq).unwrap();
        prop_assert!(kappa <= 6, "doubling lag {kappa}");
    }
}
