//! JSON experiment configs. Symbol, set, and Gaussian-term specs reuse the
//! library's own serde representations (tagged by `family` / `set`), so a
//! config names exactly the objects the library constructs.

use besov_trace::geometry::DSet;
use besov_trace::lattice::GaussianTerm;
use besov_trace::symbols::BernsteinSymbol;
use serde::Deserialize;

fn one() -> f64 {
    1.0
}

fn default_epsilon() -> f64 {
    0.125
}

fn default_atol() -> f64 {
    1e-3
}

/// Trace exponent window to evaluate alongside a symbol check.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSpec {
    pub alpha: f64,
    pub n: usize,
    pub d: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolsCheckConfig {
    pub symbols: Vec<BernsteinSymbol>,
    /// When present, every symbol is also checked against this trace window;
    /// a violation is a gate failure (exit code 2).
    #[serde(default)]
    pub gate: Option<GateSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub h: f64,
}

/// A named Gaussian mixture; the `terms` follow the library schema
/// (`coef`, `center`, `width`).
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub id: String,
    pub terms: Vec<GaussianTerm>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormVariant {
    /// Fourier-side quadratic form from the closed-form transform.
    Fourier,
    /// First-difference double integral with weight `φ(r⁻²)/rⁿ`.
    #[serde(rename = "diff-1")]
    Diff1,
    /// k-th difference with dyadic shell weights at base scale `h0`.
    DiffShell,
    /// Dyadic sum over shifted shells `c·2⁻ʲ`, starting at `n_start`.
    Dyadic,
    /// Modulus-based norm at symbol-derived scales.
    Moura,
}

impl NormVariant {
    pub fn name(self) -> &'static str {
        match self {
            NormVariant::Fourier => "fourier",
            NormVariant::Diff1 => "diff-1",
            NormVariant::DiffShell => "diff-shell",
            NormVariant::Dyadic => "dyadic",
            NormVariant::Moura => "moura",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormsConfig {
    pub symbol: BernsteinSymbol,
    pub alpha: f64,
    pub k: usize,
    pub lattice: LatticeSpec,
    pub functions: Vec<FunctionSpec>,
    pub variants: Vec<NormVariant>,
    /// Base shell scale for the diff-shell variant.
    #[serde(default = "one")]
    pub h0: f64,
    /// Shell constant for the dyadic variant.
    #[serde(default = "one")]
    pub dyadic_c: f64,
    /// First dyadic level for the dyadic variant.
    #[serde(default)]
    pub dyadic_n_start: i32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WhitneyConfig {
    pub set: DSet,
    pub bbox_lo: Vec<f64>,
    pub bbox_hi: Vec<f64>,
    /// Resolution floor (a power of two).
    pub s_min: f64,
    /// Support expansion for the partition of unity, in (0, 1/4).
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridScale {
    Log,
    Linear,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub scale: GridScale,
}

impl GridSpec {
    pub fn build(&self) -> Result<Vec<f64>, String> {
        if self.points < 2 {
            return Err("grid needs at least two points".into());
        }
        if !(self.lo < self.hi) {
            return Err(format!("grid needs lo < hi, got [{}, {}]", self.lo, self.hi));
        }
        match self.scale {
            GridScale::Linear => Ok(besov_trace::linspace(self.lo, self.hi, self.points)),
            GridScale::Log => {
                if !(self.lo > 0.0) {
                    return Err("log grids need lo > 0".into());
                }
                Ok(besov_trace::logspace(
                    self.lo.log10(),
                    self.hi.log10(),
                    self.points,
                ))
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub symbol: BernsteinSymbol,
    pub alpha: f64,
    pub grid: GridSpec,
    /// Also evaluate the decay constants over the grid (requires the grid to
    /// lie in (0, 1]).
    #[serde(default)]
    pub decay: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    /// Whitney extension of trace samples, measured against the dyadic trace
    /// norm on the input side and the shell-difference norm on the output.
    Extension,
    /// Ball-average restriction of lattice mixtures, measured against the
    /// Fourier norm on the input side and the dyadic trace norm on the output.
    Restriction,
}

impl Default for Pipeline {
    fn default() -> Self {
        Pipeline::Extension
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundtripConfig {
    pub set: DSet,
    pub symbol: BernsteinSymbol,
    pub alpha: f64,
    pub k: usize,
    /// Joint refinement depths m: quadrature depth m, Whitney floor 2⁻ᵐ,
    /// lattice spacing 2^{-(m-1)}, ball radii [2^{-(m-4)}, 2^{-(m-3)}].
    pub depths: Vec<usize>,
    pub bbox_lo: Vec<f64>,
    pub bbox_hi: Vec<f64>,
    pub functions: Vec<FunctionSpec>,
    #[serde(default)]
    pub pipeline: Pipeline,
    #[serde(default = "default_atol")]
    pub atol: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaConfig {
    pub symbol: BernsteinSymbol,
    pub alpha: f64,
    pub set: DSet,
    pub function: FunctionSpec,
    pub depth: usize,
    pub radii: Vec<f64>,
}
