//! Counting experiments: ordered families of regions, signed discrepancy
//! tables, fitted error exponents, dyadic decompositions, patch statistics and
//! box-counting dimension of window boundaries.

mod boxdim;
mod boxset;
mod patches;

pub use boxdim::{box_dimension, koch_curve, Boundary, DimensionFit};
pub use boxset::BoxSet;
pub use patches::{
    extract_patch, key_hash, Patch, PatchAtlas, PatchClass, PatchExtractor, PatchStats, PatchWindow, WindowVolume,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cutproject::{CutProject, Window};
use crate::lattice::{unit_ball_volume, Domain, EnumerationOptions, Region};
use crate::{Error, Result};

/// A nested family `T ↦ Ω_T` with volumes tending to infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrderedFamily {
    /// Closed balls `B(0, T)` in ℝᵈ.
    Balls { d: usize },
    /// Half-open cubes `[0, T)ᵈ`.
    Boxes { d: usize },
    /// `[0, T)ᵈ × W` in ℝⁿ: the grid points counted are the lifts of `Λ ∩ [0, T)ᵈ`.
    Slices { d: usize, window: Window },
}

impl OrderedFamily {
    pub fn d(&self) -> usize {
        match self {
            OrderedFamily::Balls { d } | OrderedFamily::Boxes { d } | OrderedFamily::Slices { d, .. } => *d,
        }
    }

    /// The physical region whose model-set points are counted.
    pub fn region(&self, t: f64) -> Region {
        match self {
            OrderedFamily::Balls { d } => Region::ball(*d, t),
            OrderedFamily::Boxes { d } | OrderedFamily::Slices { d, .. } => Region::cube(0.0, t, *d),
        }
    }

    pub fn volume(&self, t: f64) -> f64 {
        let d = self.d() as i32;
        match self {
            OrderedFamily::Balls { d } => unit_ball_volume(*d) * t.powi(*d as i32),
            OrderedFamily::Boxes { .. } => t.powi(d),
            OrderedFamily::Slices { window, .. } => t.powi(d) * window.volume(),
        }
    }

    /// The parameter `T` with `vol(Ω_T) = v`.
    pub fn parameter_for_volume(&self, v: f64) -> Result<f64> {
        let unit = self.volume(1.0);
        if !(v >= 0.0) || !(unit > 0.0) {
            return Err(Error::OutOfRange(format!("no member of the family has volume {v}")));
        }
        Ok((v / unit).powf(1.0 / self.d() as f64))
    }

    /// The density against which counts are compared: `D(Λ)` for physical
    /// families, `1/covol(ℒ)` for slices in ℝⁿ.
    fn reference_density(&self, cp: &CutProject) -> Result<f64> {
        match self {
            OrderedFamily::Slices { window, .. } => {
                if window != cp.window() {
                    return Err(Error::InvalidArgument("slice window differs from the scheme window".into()));
                }
                Ok(1.0 / cp.grid().covolume())
            }
            _ => cp.density(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub t: f64,
    pub vol: f64,
    pub count: u64,
    /// `count − D·vol`.
    pub error: f64,
}

impl CountRow {
    pub fn log_vol(&self) -> f64 {
        self.vol.ln()
    }

    pub fn log_abs_error(&self) -> f64 {
        self.error.abs().ln()
    }
}

/// Exact counts `#(Λ ∩ Ω_T)` with signed errors against `D·vol(Ω_T)`.
pub fn count_in_family(
    cp: &CutProject,
    family: &OrderedFamily,
    t_list: &[f64],
    opts: &EnumerationOptions,
) -> Result<Vec<CountRow>> {
    if family.d() != cp.d() {
        return Err(Error::DimensionMismatch { expected: cp.d(), got: family.d() });
    }
    if t_list.is_empty() || t_list.windows(2).any(|w| !(w[0] < w[1])) || !(t_list[0] > 0.0) {
        return Err(Error::InvalidArgument("family parameters must be positive and strictly increasing".into()));
    }
    let density = family.reference_density(cp)?;
    let largest = family.region(*t_list.last().expect("nonempty"));
    let points = cp.generate_with(&largest, opts)?.points;
    Ok(t_list
        .par_iter()
        .map(|&t| {
            let region = family.region(t);
            let count = points.iter().filter(|p| region.contains(&p.phys)).count() as u64;
            let vol = family.volume(t);
            CountRow { t, vol, count, error: count as f64 - density * vol }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Ordinary least squares `y ≈ a + b x`, returning `(b, a, stderr of b)`.
pub(crate) fn least_squares(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len();
    if n < 2 {
        return Err(Error::DegenerateFit(format!("{n} points")));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if !(sxx > 0.0) {
        return Err(Error::DegenerateFit("all abscissae coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if n > 2 {
        let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
        (rss / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok((slope, intercept, stderr))
}

/// Slope of `log|error|` against `log vol`, rows with zero error dropped.
pub fn fit_error_exponent(rows: &[CountRow]) -> Result<ExponentFit> {
    let kept: Vec<&CountRow> = rows.iter().filter(|r| r.error != 0.0).collect();
    if kept.len() < 3 {
        return Err(Error::DegenerateFit(format!("{} nonzero errors, need at least 3", kept.len())));
    }
    let xs: Vec<f64> = kept.iter().map(|r| r.log_vol()).collect();
    let ys: Vec<f64> = kept.iter().map(|r| r.log_abs_error()).collect();
    let (slope, intercept, stderr) = least_squares(&xs, &ys)?;
    Ok(ExponentFit { slope, stderr, intercept, points: kept.len() })
}

/// `[0, N)` as a disjoint union of dyadic intervals `[u·2ᵗ, (u+1)·2ᵗ)`, one per
/// set bit of `N`, largest first.
pub fn dyadic_decomposition(n: u64, t: u32) -> Result<Vec<(u64, u64)>> {
    if n == 0 || t >= 64 || n > 1u64 << t {
        return Err(Error::OutOfRange(format!("need 0 < N ≤ 2^T, got N = {n}, T = {t}")));
    }
    let mut out = Vec::new();
    let mut start = 0;
    for bit in (0..=t).rev() {
        let len = 1u64 << bit;
        if n & len != 0 {
            out.push((start, start + len));
            start += len;
        }
    }
    Ok(out)
}

/// `(λ₀, θ₀) = (m/(m+2δ), δ/(m+2δ))` for a window in ℝᵐ whose boundary has
/// upper box dimension at most `m − δ`.
pub fn patch_exponents(m: usize, delta: f64) -> Result<(f64, f64)> {
    let mf = m as f64;
    if m == 0 || !(delta > 0.0 && delta <= mf) {
        return Err(Error::OutOfRange(format!("need m ≥ 1 and 0 < δ ≤ m, got m = {m}, δ = {delta}")));
    }
    let denom = mf + 2.0 * delta;
    Ok((mf / denom, delta / denom))
}
