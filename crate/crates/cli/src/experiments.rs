//! Experiment runners. Each builds its objects from a config, writes one CSV
//! artifact into the output directory, and prints a short summary. Floating
//! point values are serialized with `{:.16e}` (17 significant digits) so runs
//! are reproducible byte for byte; integer columns are written exactly.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use besov_trace::geometry::measure_quadrature;
use besov_trace::lattice::{GaussianMix, Lattice, LatticeFunction};
use besov_trace::levy::{bessel_kernel, check_kernel_decay};
use besov_trace::norms::{
    difference_norm_1, difference_norm_alpha_k, dyadic_norm_2, fourier_norm,
    moura_norm_for_symbol, NormReport, TraceFunction,
};
use besov_trace::operators::{measure_extension, measure_restriction, restriction_lemma_check};
use besov_trace::symbols::{
    check_bernstein_bounds, check_trace_exponents, default_lambda_grid, default_t_grid,
    estimate_scaling_indices,
};
use besov_trace::whitney::build_whitney;

use crate::config::*;
use crate::CliError;

/// Quote a string field for CSV (always quoted; embedded quotes doubled).
fn q(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

/// 17-significant-digit decimal form; round-trips every finite f64.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn open_csv(out_dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<fs::File>), CliError> {
    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", out_dir.display())))?;
    let path = out_dir.join(name);
    let file = fs::File::create(&path)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
    Ok((path, BufWriter::new(file)))
}

fn finish_csv(path: &Path, mut w: BufWriter<fs::File>, rows: usize) -> Result<(), CliError> {
    w.flush()
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {} ({rows} rows)", path.display());
    Ok(())
}

fn write_line(path: &Path, w: &mut BufWriter<fs::File>, line: &str) -> Result<(), CliError> {
    writeln!(w, "{line}").map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn build_mix(spec: &FunctionSpec) -> Result<GaussianMix, CliError> {
    let mix = GaussianMix {
        terms: spec.terms.clone(),
    };
    mix.validate()
        .map_err(|e| CliError::Config(format!("function '{}': {e}", spec.id)))?;
    Ok(mix)
}

fn build_lattice(spec: &LatticeSpec) -> Result<Lattice, CliError> {
    Lattice::new(&spec.lo, &spec.hi, spec.h).map_err(CliError::Core)
}

// ---------------------------------------------------------------------------
// symbols-check
// ---------------------------------------------------------------------------

/// CSV: symbol,delta_1,delta_2,delta_3,delta_4,estimated_lo,estimated_hi,
///      bernstein_violation,pairs_checked
pub fn run_symbols_check(cfg: &SymbolsCheckConfig, out_dir: &Path) -> Result<(), CliError> {
    if cfg.symbols.is_empty() {
        return Err(CliError::Config("symbols list must be nonempty".into()));
    }
    let lambdas = default_lambda_grid();
    let rs = default_t_grid();
    let (path, mut w) = open_csv(out_dir, "symbols_check.csv")?;
    write_line(
        &path,
        &mut w,
        "symbol,delta_1,delta_2,delta_3,delta_4,estimated_lo,estimated_hi,bernstein_violation,pairs_checked",
    )?;
    for symbol in &cfg.symbols {
        symbol.validate().map_err(CliError::Core)?;
        let check = check_bernstein_bounds(symbol, &lambdas, &rs).map_err(CliError::Core)?;
        let psi = |t: f64| symbol.psi_radial(t);
        let est = estimate_scaling_indices(&psi, &lambdas, &rs).map_err(CliError::Core)?;
        let idx = symbol.indices();
        write_line(
            &path,
            &mut w,
            &format!(
                "{},{},{},{},{},{},{},{},{}",
                q(&symbol.to_string()),
                num(idx[0]),
                num(idx[1]),
                num(idx[2]),
                num(idx[3]),
                num(est.delta_lo),
                num(est.delta_hi),
                num(check.max_rel_violation),
                check.pairs_checked
            ),
        )?;
        if let Some(gate) = &cfg.gate {
            let window = check_trace_exponents(symbol, gate.alpha, gate.n, gate.d)
                .map_err(CliError::Core)?;
            println!("gate ok for {symbol}: {window}");
        }
    }
    finish_csv(&path, w, cfg.symbols.len())
}

// ---------------------------------------------------------------------------
// norms
// ---------------------------------------------------------------------------

/// CSV: id,variant,alpha,k,params,l2_part,seminorm_part,total,resolution,truncation
pub fn run_norms(cfg: &NormsConfig, out_dir: &Path) -> Result<(), CliError> {
    if cfg.functions.is_empty() {
        return Err(CliError::Config("functions list must be nonempty".into()));
    }
    if cfg.variants.is_empty() {
        return Err(CliError::Config("variants list must be nonempty".into()));
    }
    cfg.symbol.validate().map_err(CliError::Core)?;
    let lattice = build_lattice(&cfg.lattice)?;
    let (path, mut w) = open_csv(out_dir, "norms.csv")?;
    write_line(
        &path,
        &mut w,
        "id,variant,alpha,k,params,l2_part,seminorm_part,total,resolution,truncation",
    )?;
    let mut rows = 0usize;
    for spec in &cfg.functions {
        let mix = build_mix(spec)?;
        let u = LatticeFunction::from_mix(lattice.clone(), mix).map_err(CliError::Core)?;
        for variant in &cfg.variants {
            let report: NormReport = match variant {
                NormVariant::Fourier => fourier_norm(&u, &cfg.symbol, cfg.alpha),
                NormVariant::Diff1 => difference_norm_1(&u, &cfg.symbol),
                NormVariant::DiffShell => {
                    difference_norm_alpha_k(&u, &cfg.symbol, cfg.alpha, cfg.k, cfg.h0)
                }
                NormVariant::Dyadic => dyadic_norm_2(
                    &u,
                    &cfg.symbol,
                    cfg.alpha,
                    cfg.k,
                    cfg.dyadic_c,
                    cfg.dyadic_n_start,
                ),
                NormVariant::Moura => moura_norm_for_symbol(&u, &cfg.symbol, cfg.alpha, cfg.k),
            }
            .map_err(CliError::Core)?;
            write_line(
                &path,
                &mut w,
                &format!(
                    "{},{},{},{},{},{},{},{},{},{}",
                    q(&spec.id),
                    q(variant.name()),
                    num(report.alpha),
                    report.k,
                    q(&report.params),
                    num(report.l2_part),
                    num(report.seminorm_part),
                    num(report.total),
                    num(report.resolution),
                    q(&report.truncation),
                ),
            )?;
            rows += 1;
        }
    }
    finish_csv(&path, w, rows)
}

// ---------------------------------------------------------------------------
// whitney
// ---------------------------------------------------------------------------

/// CSV: level,center_0..center_{n-1},side,dist,dist_over_l
pub fn run_whitney(cfg: &WhitneyConfig, out_dir: &Path) -> Result<(), CliError> {
    let decomp = build_whitney(&cfg.set, &cfg.bbox_lo, &cfg.bbox_hi, cfg.s_min, cfg.epsilon)
        .map_err(CliError::Core)?;
    let (path, mut w) = open_csv(out_dir, "whitney.csv")?;
    let mut header = String::from("level");
    for axis in 0..decomp.n {
        header.push_str(&format!(",center_{axis}"));
    }
    header.push_str(",side,dist,dist_over_l");
    write_line(&path, &mut w, &header)?;
    for cube in &decomp.cubes {
        let mut line = format!("{}", cube.level);
        for c in cube.center() {
            line.push_str(&format!(",{}", num(c)));
        }
        line.push_str(&format!(
            ",{},{},{}",
            num(cube.side),
            num(cube.dist_lo),
            num(cube.dist_lo / cube.diam)
        ));
        write_line(&path, &mut w, &line)?;
    }
    println!(
        "{} cubes ({} with side <= 1), uncovered cells: {} (volume {:.6e})",
        decomp.cubes.len(),
        decomp.index_set.len(),
        decomp.uncovered_cells,
        decomp.uncovered_volume
    );
    // Probe at face midpoints, where the expanded supports of neighboring
    // cubes meet; centers alone never see an overlap.
    let mut probes: Vec<f64> = Vec::new();
    for &i in &decomp.index_set {
        let cube = &decomp.cubes[i];
        let center = cube.center();
        probes.extend_from_slice(&center);
        for axis in 0..decomp.n {
            for sign in [-1.0, 1.0] {
                let mut p = center.clone();
                p[axis] += sign * cube.side / 2.0;
                probes.extend_from_slice(&p);
            }
        }
    }
    println!(
        "at cube centers and faces: max overlap {}, neighbor side ratio <= {:.4}",
        decomp.max_overlap(&probes),
        decomp.side_comparability(&probes)
    );
    finish_csv(&path, w, decomp.cubes.len())
}

// ---------------------------------------------------------------------------
// kernel
// ---------------------------------------------------------------------------

/// CSV: x,kernel,weighted  (weighted = kernel(x) * x * phi(1/x^2)^(alpha/2))
pub fn run_kernel(cfg: &KernelConfig, out_dir: &Path) -> Result<(), CliError> {
    cfg.symbol.validate().map_err(CliError::Core)?;
    let grid = cfg.grid.build().map_err(CliError::Config)?;
    let (path, mut w) = open_csv(out_dir, "kernel.csv")?;
    write_line(&path, &mut w, "x,kernel,weighted")?;
    for &x in &grid {
        let k = bessel_kernel(&cfg.symbol, cfg.alpha, x).map_err(CliError::Core)?;
        let phi = cfg.symbol.phi(x.powi(-2));
        let weighted = k * x * phi.powf(cfg.alpha / 2.0);
        write_line(&path, &mut w, &format!("{},{},{}", num(x), num(k), num(weighted)))?;
    }
    if cfg.decay {
        let decay = check_kernel_decay(&cfg.symbol, cfg.alpha, &grid).map_err(CliError::Core)?;
        println!(
            "decay envelope constants: c0 = {:.6e}, c1 = {:.6e} (ratio {:.4})",
            decay.c0,
            decay.c1,
            decay.c1 / decay.c0
        );
    }
    finish_csv(&path, w, grid.len())
}

// ---------------------------------------------------------------------------
// trace-roundtrip
// ---------------------------------------------------------------------------

/// CSV: id,depth,input_norm,output_norm,ratio,roundtrip_sup
pub fn run_trace_roundtrip(
    cfg: &RoundtripConfig,
    out_dir: &Path,
    depth_override: Option<usize>,
) -> Result<(), CliError> {
    if cfg.functions.is_empty() {
        return Err(CliError::Config("functions list must be nonempty".into()));
    }
    cfg.symbol.validate().map_err(CliError::Core)?;
    let n = cfg.set.ambient_dim();
    let d = cfg.set.hausdorff_dim();
    let gate = check_trace_exponents(&cfg.symbol, cfg.alpha, n, d).map_err(CliError::Core)?;
    println!("trace exponent window ok: {gate}");
    let depths: Vec<usize> = match depth_override {
        Some(m) => vec![m],
        None => cfg.depths.clone(),
    };
    if depths.is_empty() {
        return Err(CliError::Config("depths list must be nonempty".into()));
    }
    for &m in &depths {
        if !(5..=12).contains(&m) {
            return Err(CliError::Config(format!(
                "depth {m} outside the supported range 5..=12"
            )));
        }
    }
    if cfg.bbox_lo.len() != n || cfg.bbox_hi.len() != n {
        return Err(CliError::Config(format!(
            "bbox must have {n} coordinates to match the set"
        )));
    }
    let (path, mut w) = open_csv(out_dir, "trace_roundtrip.csv")?;
    write_line(&path, &mut w, "id,depth,input_norm,output_norm,ratio,roundtrip_sup")?;
    let mut rows = 0usize;
    for &m in &depths {
        let s_min = (2.0f64).powi(-(m as i32));
        let h = (2.0f64).powi(-(m as i32 - 1));
        let radii = [
            (2.0f64).powi(-(m as i32 - 4)),
            (2.0f64).powi(-(m as i32 - 3)),
        ];
        let lattice =
            Lattice::new(&cfg.bbox_lo, &cfg.bbox_hi, h).map_err(CliError::Core)?;
        let decomp = build_whitney(&cfg.set, &cfg.bbox_lo, &cfg.bbox_hi, s_min, cfg.epsilon)
            .map_err(CliError::Core)?;
        for spec in &cfg.functions {
            let mix = build_mix(spec)?;
            let report = match cfg.pipeline {
                Pipeline::Extension => {
                    if mix.dim() != n {
                        return Err(CliError::Config(format!(
                            "function '{}' has dimension {}, set is in dimension {n}",
                            spec.id,
                            mix.dim()
                        )));
                    }
                    let quad = measure_quadrature(&cfg.set, m).map_err(CliError::Core)?;
                    let values: Vec<f64> = (0..quad.len()).map(|i| mix.eval(quad.node(i))).collect();
                    let tu = TraceFunction::new(cfg.set.clone(), quad, values)
                        .map_err(CliError::Core)?;
                    measure_extension(
                        &tu,
                        &cfg.symbol,
                        cfg.alpha,
                        cfg.k,
                        &decomp,
                        &lattice,
                        &radii,
                        cfg.atol,
                        &spec.id,
                        m,
                    )
                    .map_err(CliError::Core)?
                }
                Pipeline::Restriction => {
                    let u =
                        LatticeFunction::from_mix(lattice.clone(), mix).map_err(CliError::Core)?;
                    measure_restriction(
                        &u,
                        &cfg.set,
                        m,
                        &cfg.symbol,
                        cfg.alpha,
                        &radii,
                        cfg.atol,
                        &spec.id,
                    )
                    .map_err(CliError::Core)?
                }
            };
            write_line(
                &path,
                &mut w,
                &format!(
                    "{},{},{},{},{},{}",
                    q(&report.id),
                    report.depth,
                    num(report.input_norm),
                    num(report.output_norm),
                    num(report.ratio),
                    num(report.roundtrip_sup),
                ),
            )?;
            rows += 1;
        }
    }
    finish_csv(&path, w, rows)
}

// ---------------------------------------------------------------------------
// lemma31
// ---------------------------------------------------------------------------

/// CSV: r,lhs,rhs,ratio
pub fn run_lemma31(
    cfg: &LemmaConfig,
    out_dir: &Path,
    depth_override: Option<usize>,
) -> Result<(), CliError> {
    cfg.symbol.validate().map_err(CliError::Core)?;
    let mix = build_mix(&cfg.function)?;
    let depth = depth_override.unwrap_or(cfg.depth);
    let ratios = restriction_lemma_check(&cfg.symbol, cfg.alpha, &cfg.set, &mix, depth, &cfg.radii)
        .map_err(CliError::Core)?;
    let (path, mut w) = open_csv(out_dir, "lemma31.csv")?;
    write_line(&path, &mut w, "r,lhs,rhs,ratio")?;
    for row in &ratios {
        write_line(
            &path,
            &mut w,
            &format!("{},{},{},{}", num(row.r), num(row.lhs), num(row.rhs), num(row.ratio)),
        )?;
    }
    let lo = ratios.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    println!(
        "ratio lhs/rhs in [{lo:.6e}, {hi:.6e}] over {} radii (spread {:.4})",
        ratios.len(),
        hi / lo
    );
    finish_csv(&path, w, ratios.len())
}
