//! Acceptance gate: ten end-to-end checks covering the symbol inequalities,
//! the d-measure geometry, the Whitney machinery, the norm family, and the
//! restriction/extension operators. Each test prints one
//! `[criterion NN] PASS: ...` line and enforces its own runtime budget.

use besov_trace::geometry::{measure_quadrature, verify_d_measure, DSet};
use besov_trace::lattice::{GaussianMix, GaussianTerm, Lattice, LatticeFunction};
use besov_trace::levy::{bessel_kernel, check_kernel_decay, psi_from_density, LevyDensity};
use besov_trace::norms::{
    difference_norm_alpha_k, dyadic_norm_2, fourier_norm, moura_norm_for_symbol, trace_norm,
    TraceFunction, TraceVariant,
};
use besov_trace::operators::{
    extend, extend_codim, measure_extension, restriction_lemma_check, roundtrip,
};
use besov_trace::symbols::{
    check_bernstein_bounds, default_lambda_grid, estimate_scaling_indices, BernsteinSymbol,
};
use besov_trace::whitney::{build_whitney, partition_of_unity, WhitneyDecomposition};
use besov_trace::{linspace, logspace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

fn finish(start: Instant, budget_secs: u64, number: u32, detail: &str) {
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(budget_secs);
    assert!(
        elapsed < budget,
        "criterion {number} exceeded its {budget_secs} s budget: {elapsed:.2?}"
    );
    println!("[criterion {number:02}] PASS: {detail} ({elapsed:.2?})");
}

fn cantor() -> DSet {
    DSet::Cantor { rho: 1.0 / 3.0, b: 2, ambient: 1 }
}

fn shipped_symbols() -> Vec<BernsteinSymbol> {
    vec![
        BernsteinSymbol::Power { s: 0.25 },
        BernsteinSymbol::Power { s: 0.5 },
        BernsteinSymbol::Power { s: 0.9 },
        BernsteinSymbol::PowerSum { s1: 0.3, s2: 0.8 },
        BernsteinSymbol::LogPerturbed { s: 0.4, beta: 0.3 },
        BernsteinSymbol::Lifted {
            base: Box::new(BernsteinSymbol::Power { s: 0.5 }),
            alpha: 1.5,
        },
    ]
}

#[test]
fn criterion_01_two_sided_bound_holds_for_every_shipped_symbol() {
    let start = Instant::now();
    let lambdas = logspace(-3.0, 3.0, 64);
    let rs = logspace(-4.0, 4.0, 64);
    let mut worst = 0.0f64;
    for symbol in shipped_symbols() {
        let check = check_bernstein_bounds(&symbol, &lambdas, &rs).unwrap();
        assert_eq!(check.pairs_checked, 64 * 64);
        assert!(
            check.max_rel_violation <= 1e-12,
            "{symbol}: violation {}",
            check.max_rel_violation
        );
        worst = worst.max(check.max_rel_violation);
    }
    finish(
        start,
        1,
        1,
        &format!("6 symbol families, 64x64 grid, worst violation {worst:.3e} <= 1e-12"),
    );
}

#[test]
fn criterion_02_stable_symbol_identities() {
    let start = Instant::now();
    // Pure powers: the empirical scaling bracket collapses to (s, s).
    let lambdas = default_lambda_grid();
    let ts = logspace(-4.0, 4.0, 96);
    for s in [0.25, 0.5, 0.9] {
        let est = estimate_scaling_indices(&|t: f64| t.powf(2.0 * s), &lambdas, &ts).unwrap();
        assert!(
            (est.delta_lo - s).abs() <= 1e-12 && (est.delta_hi - s).abs() <= 1e-12,
            "s = {s}: bracket [{}, {}]",
            est.delta_lo,
            est.delta_hi
        );
    }
    // The density x^-2 in one dimension induces the symbol pi*|xi|.
    let j = LevyDensity::Stable { s: 0.5, n: 1 };
    let mut worst = 0.0f64;
    for &xi in &logspace(-1.0, 2.0, 16) {
        let v = psi_from_density(&j, xi).unwrap();
        let want = PI * xi;
        let rel = (v - want).abs() / want;
        assert!(rel <= 1e-5, "xi = {xi}: {v} vs {want} (rel {rel:.2e})");
        worst = worst.max(rel);
    }
    finish(
        start,
        10,
        2,
        &format!(
            "power scaling brackets exact to 1e-12; density-induced symbol matches \
             pi*|xi| within {worst:.2e} rel on [0.1, 100]"
        ),
    );
}

#[test]
fn criterion_03_kernel_oracle_and_decay_constants() {
    let start = Instant::now();
    // phi(x) = x gives psi(xi) = xi^2 and, at alpha = 2, the kernel e^-x / 2.
    let quadratic = BernsteinSymbol::Power { s: 1.0 };
    let mut worst = 0.0f64;
    for &x in &linspace(0.1, 5.0, 64) {
        let k = bessel_kernel(&quadratic, 2.0, x).unwrap();
        let want = 0.5 * (-x).exp();
        let rel = (k - want).abs() / want;
        assert!(rel <= 1e-6, "x = {x}: {k} vs {want} (rel {rel:.2e})");
        worst = worst.max(rel);
    }
    // Decay constants for phi(x) = sqrt(x) (psi = |xi|) at alpha = 3/2 are
    // stable when the probe grid is doubled.
    let root = BernsteinSymbol::Power { s: 0.5 };
    let coarse = check_kernel_decay(&root, 1.5, &logspace(-2.0, 0.0, 12)).unwrap();
    let fine = check_kernel_decay(&root, 1.5, &logspace(-2.0, 0.0, 24)).unwrap();
    let drift0 = (fine.c0 - coarse.c0).abs() / coarse.c0;
    let drift1 = (fine.c1 - coarse.c1).abs() / coarse.c1;
    assert!(drift0 < 0.05, "c0 drift {drift0:.3}");
    assert!(drift1 < 0.05, "c1 drift {drift1:.3}");
    finish(
        start,
        60,
        3,
        &format!(
            "kernel matches e^-x/2 within {worst:.2e} rel on [0.1, 5]; decay constants \
             drift ({drift0:.2e}, {drift1:.2e}) < 5% under grid doubling"
        ),
    );
}

/// Sample `count` points of the bounding box at distance > `collar` from the
/// set (the region the partition of unity covers).
fn covered_points(
    w: &WhitneyDecomposition,
    collar: f64,
    count: usize,
    seed: u64,
) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count * w.n);
    while out.len() < count * w.n {
        let x: Vec<f64> = (0..w.n)
            .map(|d| rng.gen_range(w.bbox_lo[d]..w.bbox_hi[d]))
            .collect();
        if w.set.distance(&x) > collar {
            out.extend_from_slice(&x);
        }
    }
    out
}

#[test]
fn criterion_04_whitney_certificates_partition_and_overlap() {
    let start = Instant::now();
    let cases: Vec<(DSet, Vec<f64>, Vec<f64>, i32)> = vec![
        (DSet::Point { n: 1 }, vec![-2.0], vec![2.0], 6),
        (DSet::Segment { n: 2 }, vec![-1.0, -1.0], vec![2.0, 1.0], 4),
        (cantor(), vec![-1.0], vec![2.0], 7),
    ];
    let mut details = Vec::new();
    for (set, lo, hi, base_level) in cases {
        let coarse = build_whitney(&set, &lo, &hi, 2f64.powi(-base_level), 0.125).unwrap();
        let refined = build_whitney(&set, &lo, &hi, 2f64.powi(-base_level - 1), 0.125).unwrap();
        for w in [&coarse, &refined] {
            for cube in &w.cubes {
                assert!(
                    cube.dist_lo >= cube.diam,
                    "{set:?}: cube at level {} under-separated",
                    cube.level
                );
                assert!(
                    cube.dist_hi <= 4.0 * cube.diam + 1e-9,
                    "{set:?}: cube at level {} over-separated",
                    cube.level
                );
            }
        }
        // Partition of unity sums to 1 at 10^3 seeded covered points.
        let collar = 2.0 * (coarse.n as f64).sqrt() * coarse.s_min;
        let points = covered_points(&coarse, collar, 1000, 0x5eed_0004);
        let pou = partition_of_unity(&coarse);
        for chunk in points.chunks(coarse.n) {
            let parts = pou.eval(chunk).unwrap();
            let total: f64 = parts.iter().map(|(_, p)| p).sum();
            assert!(
                (total - 1.0).abs() <= 1e-12,
                "{set:?}: partition sums to {total} at {chunk:?}"
            );
        }
        // The bounded-overlap constant is stable across refinement.
        let n_coarse = coarse.max_overlap(&points);
        let n_fine = refined.max_overlap(&points);
        assert_eq!(
            n_coarse, n_fine,
            "{set:?}: overlap constant changed under refinement"
        );
        details.push(format!("{:?} N0={n_coarse}", set));
    }
    finish(
        start,
        60,
        4,
        &format!(
            "certificates l <= dist <= 4l exact, partition sums 1 +/- 1e-12 at 1000 \
             seeded points, overlap constants stable [{}]",
            details.join(", ")
        ),
    );
}

#[test]
fn criterion_05_d_measure_constants_on_the_cantor_set() {
    let start = Instant::now();
    let set = cantor();
    let quad = measure_quadrature(&set, 9).unwrap();
    let centers = set.sample_points(20, 0x5eed_0005);
    let radii: Vec<f64> = (2..=6).map(|k| 3f64.powi(-k)).collect();
    let (c1, c2) = verify_d_measure(&set, &quad, &centers, &radii).unwrap();
    assert!(c1 > 0.0 && c2.is_finite() && c1 <= c2);
    assert!(c2 / c1 <= 4.0, "constant spread {}", c2 / c1);
    // At the left endpoint the ball mass is exactly r^d for r = 3^-k.
    let (e1, e2) = verify_d_measure(&set, &quad, &[0.0], &radii).unwrap();
    assert!((e1 - 1.0).abs() <= 1e-12, "left endpoint lower ratio {e1}");
    assert!((e2 - 1.0).abs() <= 1e-12, "left endpoint upper ratio {e2}");
    finish(
        start,
        30,
        5,
        &format!(
            "20 seeded centers, radii 3^-2..3^-6: c2/c1 = {:.3} <= 4; left-endpoint \
             ratio within {:.1e} of 1",
            c2 / c1,
            (e1 - 1.0).abs().max((e2 - 1.0).abs())
        ),
    );
}

#[test]
fn criterion_06_norm_family_equivalence_surrogates() {
    let start = Instant::now();
    let symbol = BernsteinSymbol::Power { s: 0.4 };
    let (alpha, k) = (1.0, 1);
    let widths = [0.5, 0.7, 1.0, 1.4, 2.0];
    // rows[g][m] = (fourier/diff, diff/dyadic, moura/fourier) for grid g.
    let mut rows = [Vec::new(), Vec::new()];
    for (g, h) in [(0usize, 1.0 / 64.0), (1usize, 1.0 / 128.0)] {
        for &wd in &widths {
            let lat = Lattice::new(&[-8.0], &[8.0], h).unwrap();
            let u = LatticeFunction::from_mix(lat, GaussianMix::single(wd, 1)).unwrap();
            let f = fourier_norm(&u, &symbol, alpha).unwrap().total;
            let d1 = difference_norm_alpha_k(&u, &symbol, alpha, k, 1.0).unwrap().total;
            let d2 = dyadic_norm_2(&u, &symbol, alpha, k, 1.0, 0).unwrap().total;
            let mo = moura_norm_for_symbol(&u, &symbol, alpha, k).unwrap().total;
            rows[g].push((f / d1, d1 / d2, mo / f));
        }
    }
    let spread = |vals: &[f64]| -> f64 {
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(0.0f64, f64::max);
        hi / lo
    };
    let mut max_spread = 0.0f64;
    let mut max_drift = 0.0f64;
    for pick in [0usize, 1, 2] {
        let get = |g: usize| -> Vec<f64> {
            rows[g]
                .iter()
                .map(|t| match pick {
                    0 => t.0,
                    1 => t.1,
                    _ => t.2,
                })
                .collect()
        };
        for g in [0, 1] {
            let s = spread(&get(g));
            assert!(s < 3.0, "ratio family {pick} varies by {s:.2} on grid {g}");
            max_spread = max_spread.max(s);
        }
        for (a, b) in get(0).iter().zip(get(1)) {
            let drift = (b / a - 1.0).abs();
            assert!(drift < 0.15, "ratio family {pick} drifts by {drift:.3}");
            max_drift = max_drift.max(drift);
        }
    }
    finish(
        start,
        300,
        6,
        &format!(
            "5 Gaussian dilates: cross-family spread <= {max_spread:.2} (< 3), refinement \
             drift <= {:.1}% (< 15%)",
            100.0 * max_drift
        ),
    );
}

#[test]
fn criterion_07_trace_seminorm_oracle_on_the_interval() {
    let start = Instant::now();
    let symbol = BernsteinSymbol::Power { s: 0.25 };
    let interval = DSet::Cube { n: 1 };
    let tu = TraceFunction::sample(&interval, 9, |x| x[0]).unwrap();
    let report = trace_norm(&tu, &symbol, 1.0, &TraceVariant::Direct).unwrap();
    let got = report.seminorm_part * report.seminorm_part;
    let want = 8.0 / 15.0;
    let rel = (got - want).abs() / want;
    assert!(rel <= 0.02, "seminorm^2 {got} vs {want} (rel {rel:.4})");
    finish(
        start,
        60,
        7,
        &format!("u(x)=x on [0,1]: seminorm^2 = {got:.6} vs 8/15 (rel {rel:.2e} <= 2%)"),
    );
}

fn cantor_roundtrip_sup(m: i32) -> f64 {
    let set = cantor();
    let w = build_whitney(&set, &[-1.0], &[2.0], 2f64.powi(-m), 0.125).unwrap();
    let tu = TraceFunction::sample(&set, m as usize, |x| x[0]).unwrap();
    let lat = Lattice::new(&[-1.0], &[2.0], 2f64.powi(-(m - 1))).unwrap();
    let radii = [2f64.powi(-(m - 4)), 2f64.powi(-(m - 3))];
    roundtrip(&tu, &w, &lat, &radii, 1e-3).unwrap().sup_error
}

fn cantor_continuity_ratio(m: i32, f: &dyn Fn(&[f64]) -> f64, id: &str) -> f64 {
    let set = cantor();
    let symbol = BernsteinSymbol::Power { s: 0.5 };
    let w = build_whitney(&set, &[-1.0], &[2.0], 2f64.powi(-m), 0.125).unwrap();
    let tu = TraceFunction::sample(&set, m as usize, f).unwrap();
    let lat = Lattice::new(&[-1.0], &[2.0], 2f64.powi(-(m - 1))).unwrap();
    let radii = [2f64.powi(-(m - 4)), 2f64.powi(-(m - 3))];
    measure_extension(&tu, &symbol, 1.0, 1, &w, &lat, &radii, 1e-3, id, m as usize)
        .unwrap()
        .ratio
}

#[test]
fn criterion_08_extension_constants_roundtrip_and_continuity() {
    let start = Instant::now();
    // Constants near the Cantor set in R^1.
    let set = cantor();
    let w = build_whitney(&set, &[-1.0], &[2.0], 2f64.powi(-8), 0.125).unwrap();
    let one = TraceFunction::sample(&set, 8, |_| 1.0).unwrap();
    let lat = Lattice::new(&[-1.0], &[2.0], 2f64.powi(-7)).unwrap();
    let e1 = extend(&one, &w, &lat).unwrap();
    let mut near = 0usize;
    let mut worst_const = 0.0f64;
    for p in 0..lat.len() {
        let x = lat.node(p);
        if set.distance(&x) <= 0.25 {
            worst_const = worst_const.max((e1.values[p] - 1.0).abs());
            near += 1;
        }
    }
    assert!(near > 50, "too few probe nodes near the set: {near}");
    assert!(worst_const < 1e-9, "|E1 - 1| = {worst_const:.2e} near the Cantor set");
    // Constants near the segment in R^2 (the d < n case in two dimensions).
    let seg = DSet::Segment { n: 2 };
    let ws = build_whitney(&seg, &[-1.0, -1.0], &[2.0, 1.0], 2f64.powi(-5), 0.125).unwrap();
    let one2 = TraceFunction::sample(&seg, 6, |_| 1.0).unwrap();
    let lat2 = Lattice::new(&[-1.0, -1.0], &[2.0, 1.0], 1.0 / 32.0).unwrap();
    let e2 = extend(&one2, &ws, &lat2).unwrap();
    let mut worst_seg = 0.0f64;
    let mut near2 = 0usize;
    for p in 0..lat2.len() {
        let x = lat2.node(p);
        if seg.distance(&x) <= 0.25 {
            worst_seg = worst_seg.max((e2.values[p] - 1.0).abs());
            near2 += 1;
        }
    }
    assert!(near2 > 50);
    assert!(worst_seg < 1e-9, "|E1 - 1| = {worst_seg:.2e} near the segment");
    // Roundtrip sup-error decreases under joint refinement m = 8 -> 10.
    let sup8 = cantor_roundtrip_sup(8);
    let sup10 = cantor_roundtrip_sup(10);
    assert!(
        sup10 < sup8,
        "roundtrip error must decrease: {sup8:.3e} (m=8) vs {sup10:.3e} (m=10)"
    );
    // Continuity ratios of a 4-member family drift < x2 across one level.
    let family: Vec<(&str, Box<dyn Fn(&[f64]) -> f64>)> = vec![
        ("coordinate", Box::new(|x: &[f64]| x[0])),
        ("square", Box::new(|x: &[f64]| x[0] * x[0])),
        ("cosine", Box::new(|x: &[f64]| (3.0 * x[0]).cos())),
        ("bump", Box::new(|x: &[f64]| (-(x[0] - 0.3) * (x[0] - 0.3) / 0.08).exp())),
    ];
    let mut worst_drift = 0.0f64;
    for (id, f) in &family {
        let r7 = cantor_continuity_ratio(7, f, id);
        let r8 = cantor_continuity_ratio(8, f, id);
        assert!(r7.is_finite() && r7 > 0.0 && r8.is_finite() && r8 > 0.0);
        let drift = (r8 / r7).max(r7 / r8);
        assert!(drift < 2.0, "{id}: continuity ratio drifted x{drift:.2}");
        worst_drift = worst_drift.max(drift);
    }
    finish(
        start,
        600,
        8,
        &format!(
            "|E1-1| <= {:.1e} near Cantor, {:.1e} near segment; roundtrip sup \
             {sup8:.2e} -> {sup10:.2e} (m=8 -> 10); family continuity drift <= x{worst_drift:.2}",
            worst_const, worst_seg
        ),
    );
}

fn codim_roundtrip_sup(m: i32) -> f64 {
    let interval = DSet::Cube { n: 1 };
    let symbol = BernsteinSymbol::Power { s: 0.5 };
    let tu = TraceFunction::sample(&interval, m as usize, |x| x[0]).unwrap();
    let seg = DSet::Segment { n: 2 };
    let w = build_whitney(&seg, &[-1.0, -1.0], &[2.0, 1.0], 2f64.powi(-m), 0.125).unwrap();
    let plane = Lattice::new(&[-1.0, -1.0], &[2.0, 1.0], 2f64.powi(-m)).unwrap();
    let line = Lattice::new(&[0.0], &[1.0], 2f64.powi(-m)).unwrap();
    let radii = [2f64.powi(-(m - 2)), 2f64.powi(-(m - 1))];
    let ext = extend_codim(&tu, &symbol, 1.0, &w, &plane, &line, &radii, 1e-3).unwrap();
    // The line lattice nodes coincide with the interval quadrature nodes.
    tu.values
        .iter()
        .zip(&ext.line.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max)
}

#[test]
fn criterion_09_codimension_lift_for_the_full_dimensional_interval() {
    let start = Instant::now();
    let interval = DSet::Cube { n: 1 };
    let symbol = BernsteinSymbol::Power { s: 0.5 };
    // Constants survive the composed lift-extend-restrict pipeline.
    let one = TraceFunction::sample(&interval, 5, |_| 1.0).unwrap();
    let seg = DSet::Segment { n: 2 };
    let w = build_whitney(&seg, &[-1.0, -1.0], &[2.0, 1.0], 2f64.powi(-5), 0.125).unwrap();
    let plane = Lattice::new(&[-1.0, -1.0], &[2.0, 1.0], 2f64.powi(-5)).unwrap();
    let line = Lattice::new(&[0.0], &[1.0], 2f64.powi(-5)).unwrap();
    let ext =
        extend_codim(&one, &symbol, 1.0, &w, &plane, &line, &[0.125, 1.0 / 16.0], 1e-3).unwrap();
    assert!((ext.lifted_alpha - 2.0).abs() < 1e-15);
    let worst = ext
        .line
        .values
        .iter()
        .map(|v| (v - 1.0).abs())
        .fold(0.0f64, f64::max);
    assert!(worst < 1e-6, "|lifted E1 - 1| = {worst:.2e} on [0,1]");
    // The coordinate roundtrip converges across two depths.
    let sup4 = codim_roundtrip_sup(4);
    let sup5 = codim_roundtrip_sup(5);
    assert!(
        sup5 < sup4,
        "lifted roundtrip error must decrease: {sup4:.3e} (m=4) vs {sup5:.3e} (m=5)"
    );
    finish(
        start,
        600,
        9,
        &format!(
            "lifted extension of 1 is 1 within {worst:.1e} on [0,1]; coordinate \
             roundtrip sup {sup4:.2e} -> {sup5:.2e} (m=4 -> 5)"
        ),
    );
}

#[test]
fn criterion_10_pair_sum_bound_ratios_stay_within_x20() {
    let start = Instant::now();
    let symbol = BernsteinSymbol::Power { s: 0.5 };
    let f = GaussianMix {
        terms: vec![GaussianTerm { coef: 1.0, center: vec![0.5], width: 0.7 }],
    };
    let r_list: Vec<f64> = (0..5).map(|i| 1.0 / (3.0 * 2f64.powi(i))).collect();
    let rows = restriction_lemma_check(&symbol, 1.5, &cantor(), &f, 6, &r_list).unwrap();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for row in &rows {
        assert!(row.lhs > 0.0 && row.rhs > 0.0 && row.ratio.is_finite());
        lo = lo.min(row.ratio);
        hi = hi.max(row.ratio);
    }
    assert!(
        hi / lo < 20.0,
        "ratio spread {:.2} over radii {:?}",
        hi / lo,
        r_list
    );
    finish(
        start,
        600,
        10,
        &format!(
            "ratios in [{lo:.3e}, {hi:.3e}] as r halves 1/3 -> 1/48: spread {:.2} < 20",
            hi / lo
        ),
    );
}
