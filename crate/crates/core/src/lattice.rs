//! Regular lattices in ℝⁿ and functions sampled on them, together with the
//! Gaussian-mixture profiles whose Fourier transforms are known in closed
//! form (the carrier family for Fourier-side norms).

use crate::sum::pairwise_sum;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// A regular grid: nodes `lo + i·h` per axis, `shape[d]` nodes along axis d,
/// stored in row-major order with the last axis fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub n: usize,
    pub h: f64,
    pub lo: Vec<f64>,
    pub shape: Vec<usize>,
}

impl Lattice {
    /// Grid over `[lo, hi]` with spacing `h`; every extent must be an
    /// integer multiple of `h` (relative slack 1e-9).
    pub fn new(lo: &[f64], hi: &[f64], h: f64) -> Result<Lattice> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::Parameter("lattice corners must match and be nonempty".into()));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Parameter(format!("lattice spacing must be positive, got {h}")));
        }
        let n = lo.len();
        let mut shape = Vec::with_capacity(n);
        for d in 0..n {
            let span = hi[d] - lo[d];
            if span <= 0.0 {
                return Err(Error::Parameter("lattice box must have positive extent".into()));
            }
            let steps = span / h;
            if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
                return Err(Error::Parameter(format!(
                    "extent {span} on axis {d} is not a multiple of spacing {h}"
                )));
            }
            shape.push(steps.round() as usize + 1);
        }
        Ok(Lattice { n, h, lo: lo.to_vec(), shape })
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn hi(&self) -> Vec<f64> {
        (0..self.n)
            .map(|d| self.lo[d] + (self.shape[d] - 1) as f64 * self.h)
            .collect()
    }

    pub fn multi(&self, flat: usize) -> Vec<usize> {
        let mut rem = flat;
        let mut out = vec![0usize; self.n];
        for d in (0..self.n).rev() {
            out[d] = rem % self.shape[d];
            rem /= self.shape[d];
        }
        out
    }

    pub fn flat(&self, multi: &[i64]) -> Option<usize> {
        let mut acc = 0usize;
        for d in 0..self.n {
            if multi[d] < 0 || multi[d] >= self.shape[d] as i64 {
                return None;
            }
            acc = acc * self.shape[d] + multi[d] as usize;
        }
        Some(acc)
    }

    pub fn node(&self, flat: usize) -> Vec<f64> {
        self.multi(flat)
            .iter()
            .enumerate()
            .map(|(d, &i)| self.lo[d] + i as f64 * self.h)
            .collect()
    }

    /// Number of commensurate steps represented by `shift`, or an error if
    /// any component is not an integer multiple of the spacing.
    pub fn steps(&self, shift: &[f64]) -> Result<Vec<i64>> {
        if shift.len() != self.n {
            return Err(Error::Parameter("shift dimension mismatch".into()));
        }
        shift
            .iter()
            .map(|&s| {
                let m = s / self.h;
                if (m - m.round()).abs() > 1e-9 * m.abs().max(1.0) {
                    Err(Error::Parameter(format!(
                        "shift component {s} is not a multiple of lattice spacing {}",
                        self.h
                    )))
                } else {
                    Ok(m.round() as i64)
                }
            })
            .collect()
    }
}

/// One Gaussian bump `coef · exp(−|x−center|²/(2·width²))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianTerm {
    pub coef: f64,
    pub center: Vec<f64>,
    pub width: f64,
}

/// Finite linear combination of Gaussian bumps; closed under dilation and
/// translation, with a closed-form Fourier transform — the test family for
/// norm-equivalence experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianMix {
    pub terms: Vec<GaussianTerm>,
}

impl GaussianMix {
    /// Single centered bump of the given width in ℝⁿ.
    pub fn single(width: f64, n: usize) -> GaussianMix {
        GaussianMix {
            terms: vec![GaussianTerm { coef: 1.0, center: vec![0.0; n], width }],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::Parameter("Gaussian mixture needs at least one term".into()));
        }
        let n = self.terms[0].center.len();
        for t in &self.terms {
            if t.center.len() != n || !(t.width > 0.0 && t.width.is_finite()) || !t.coef.is_finite()
            {
                return Err(Error::Parameter(
                    "Gaussian terms need matching dimensions, positive widths, finite \
                     coefficients"
                        .into(),
                ));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.terms[0].center.len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let q: f64 = x
                    .iter()
                    .zip(&t.center)
                    .map(|(&xi, &ci)| (xi - ci) * (xi - ci))
                    .sum();
                t.coef * (-q / (2.0 * t.width * t.width)).exp()
            })
            .sum()
    }

    pub fn min_width(&self) -> f64 {
        self.terms.iter().map(|t| t.width).fold(f64::INFINITY, f64::min)
    }

    pub fn scaled(&self, c: f64) -> GaussianMix {
        GaussianMix {
            terms: self
                .terms
                .iter()
                .map(|t| GaussianTerm { coef: c * t.coef, ..t.clone() })
                .collect(),
        }
    }

    pub fn plus(&self, other: &GaussianMix) -> GaussianMix {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        GaussianMix { terms }
    }

    /// `|û(ξ)|²` in one dimension with the convention
    /// `û(ξ) = ∫ u(x) e^{−ixξ} dx`, so each term transforms to
    /// `coef · width · √(2π) · e^{−width²ξ²/2} · e^{−i·center·ξ}`.
    pub fn fourier_abs2_1d(&self, xi: f64) -> Result<f64> {
        if self.dim() != 1 {
            return Err(Error::Unsupported(
                "component-wise transform is implemented in one dimension".into(),
            ));
        }
        let mut re = 0.0;
        let mut im = 0.0;
        for t in &self.terms {
            let a = t.coef * t.width * (2.0 * std::f64::consts::PI).sqrt()
                * (-0.5 * t.width * t.width * xi * xi).exp();
            re += a * (t.center[0] * xi).cos();
            im -= a * (t.center[0] * xi).sin();
        }
        Ok(re * re + im * im)
    }

    /// `|û|` at radial frequency r for a mixture whose terms share one
    /// center (then û is radial up to a unimodular factor); any dimension.
    pub fn fourier_abs_radial(&self, r: f64) -> Result<f64> {
        let n = self.dim();
        let c0 = &self.terms[0].center;
        for t in &self.terms[1..] {
            if t.center.iter().zip(c0).any(|(&a, &b)| (a - b).abs() > 1e-12) {
                return Err(Error::Unsupported(
                    "radial transform needs a common center across terms".into(),
                ));
            }
        }
        let two_pi = 2.0 * std::f64::consts::PI;
        let s: f64 = self
            .terms
            .iter()
            .map(|t| {
                t.coef * t.width.powi(n as i32) * two_pi.powf(n as f64 / 2.0)
                    * (-0.5 * t.width * t.width * r * r).exp()
            })
            .sum();
        Ok(s.abs())
    }

    /// `∫ u² dx` in closed form (Gaussian product formula), any dimension.
    pub fn l2_squared(&self) -> f64 {
        let n = self.dim() as f64;
        let mut acc = 0.0;
        for a in &self.terms {
            for b in &self.terms {
                let wa2 = a.width * a.width;
                let wb2 = b.width * b.width;
                let q: f64 = a
                    .center
                    .iter()
                    .zip(&b.center)
                    .map(|(&x, &y)| (x - y) * (x - y))
                    .sum();
                let sigma2 = wa2 + wb2;
                acc += a.coef
                    * b.coef
                    * (2.0 * std::f64::consts::PI * wa2 * wb2 / sigma2).powf(n / 2.0)
                    * (-q / (2.0 * sigma2)).exp();
            }
        }
        acc
    }
}

/// A function sampled on a lattice, optionally carrying the closed-form
/// profile it was sampled from.
#[derive(Debug, Clone)]
pub struct LatticeFunction {
    pub lattice: Lattice,
    pub values: Vec<f64>,
    pub profile: Option<GaussianMix>,
}

impl LatticeFunction {
    pub fn sample<F: Fn(&[f64]) -> f64>(lattice: Lattice, f: F) -> Result<LatticeFunction> {
        let values: Vec<f64> = (0..lattice.len()).map(|i| f(&lattice.node(i))).collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("sampled values must be finite".into()));
        }
        Ok(LatticeFunction { lattice, values, profile: None })
    }

    pub fn from_mix(lattice: Lattice, mix: GaussianMix) -> Result<LatticeFunction> {
        mix.validate()?;
        if mix.dim() != lattice.n {
            return Err(Error::Parameter("profile dimension must match the lattice".into()));
        }
        let mut f = LatticeFunction::sample(lattice, |x| mix.eval(x))?;
        f.profile = Some(mix);
        Ok(f)
    }

    /// Grid L² norm `√(hⁿ Σ u²)` with deterministic pairwise reduction.
    pub fn l2(&self) -> f64 {
        let vals = &self.values;
        let s = pairwise_sum(vals.len(), &|i| vals[i] * vals[i]);
        (s * self.lattice.h.powi(self.lattice.n as i32)).sqrt()
    }

    pub fn scaled(&self, c: f64) -> LatticeFunction {
        LatticeFunction {
            lattice: self.lattice.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
            profile: self.profile.as_ref().map(|p| p.scaled(c)),
        }
    }

    pub fn plus(&self, other: &LatticeFunction) -> Result<LatticeFunction> {
        if self.lattice != other.lattice {
            return Err(Error::Parameter("lattices must match for pointwise addition".into()));
        }
        Ok(LatticeFunction {
            lattice: self.lattice.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
            profile: match (&self.profile, &other.profile) {
                (Some(a), Some(b)) => Some(a.plus(b)),
                _ => None,
            },
        })
    }

    /// Smallest distance, over all axes, from the effective support
    /// (values above `rel_threshold · max|u|`) to the bounding box faces.
    /// Returns the full half-extent if the function is identically zero.
    pub fn support_margin(&self, rel_threshold: f64) -> f64 {
        let peak = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if peak == 0.0 {
            return (0..self.lattice.n)
                .map(|d| 0.5 * (self.lattice.shape[d] - 1) as f64 * self.lattice.h)
                .fold(f64::INFINITY, f64::min);
        }
        let cut = rel_threshold * peak;
        let mut margin = f64::INFINITY;
        for (i, v) in self.values.iter().enumerate() {
            if v.abs() > cut {
                let multi = self.lattice.multi(i);
                for d in 0..self.lattice.n {
                    let steps_lo = multi[d] as f64;
                    let steps_hi = (self.lattice.shape[d] - 1 - multi[d]) as f64;
                    margin = margin.min(steps_lo.min(steps_hi) * self.lattice.h);
                }
            }
        }
        margin
    }
}
