//! Siegel–Veech transforms `f̂(Λ) = Σ_{v∈Λ} f(v)` of compactly supported test
//! functions, over finite point lists, model sets and grids.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cutproject::{CutProject, Scheme, Window};
use crate::lattice::{
    enumerate_points_with, unit_ball_volume, Domain, EnumerationOptions, Grid, ProductDomain, Region,
};
use crate::{Error, Result};

/// Points closer than this to the origin count as the origin in linear mode.
pub const ZERO_TOL: f64 = 1e-12;

const CHUNK: usize = 1024;

/// Sum over `Λ ∖ {0}` or over all of `Λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Linear,
    Affine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// Indicator of the closed ball.
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    /// Indicator of `[lo, hi)`.
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    /// `height · max(0, 1 − |x − center| / radius)`.
    Tent {
        center: Vec<f64>,
        radius: f64,
        #[serde(default = "one")]
        height: f64,
    },
    Zero {
        dim: usize,
    },
}

fn one() -> f64 {
    1.0
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl TestFunction {
    pub fn ball(d: usize, radius: f64) -> Self {
        TestFunction::Ball { center: vec![0.0; d], radius }
    }

    pub fn tent(d: usize, radius: f64) -> Self {
        TestFunction::Tent { center: vec![0.0; d], radius, height: 1.0 }
    }

    pub fn dim(&self) -> usize {
        match self {
            TestFunction::Ball { center, .. } | TestFunction::Tent { center, .. } => center.len(),
            TestFunction::Box { lo, .. } => lo.len(),
            TestFunction::Zero { dim } => *dim,
        }
    }

    /// Rejects parameters that leave the function unbounded in support or outside `[0, 1]`.
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            TestFunction::Ball { radius, .. } => radius.is_finite() && *radius >= 0.0,
            TestFunction::Box { lo, hi } => {
                lo.len() == hi.len() && lo.iter().zip(hi).all(|(a, b)| a.is_finite() && b.is_finite())
            }
            TestFunction::Tent { radius, height, .. } => {
                radius.is_finite() && *radius > 0.0 && (0.0..=1.0).contains(height)
            }
            TestFunction::Zero { dim } => *dim > 0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid test function {self:?}")))
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            TestFunction::Ball { center, radius } => (dist(x, center) <= *radius) as u8 as f64,
            TestFunction::Box { lo, hi } => {
                x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| a <= v && v < b) as u8 as f64
            }
            TestFunction::Tent { center, radius, height } => height * (1.0 - dist(x, center) / radius).max(0.0),
            TestFunction::Zero { .. } => 0.0,
        }
    }

    /// `∫ f dvol`, in closed form.
    pub fn integral(&self) -> f64 {
        let d = self.dim();
        match self {
            TestFunction::Ball { radius, .. } => unit_ball_volume(d) * radius.powi(d as i32),
            TestFunction::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| (b - a).max(0.0)).product(),
            TestFunction::Tent { radius, height, .. } => {
                height * unit_ball_volume(d) * radius.powi(d as i32) / (d as f64 + 1.0)
            }
            TestFunction::Zero { .. } => 0.0,
        }
    }

    /// A region containing the support, or `None` for the zero function.
    pub fn support(&self) -> Option<Region> {
        match self {
            TestFunction::Ball { center, radius } | TestFunction::Tent { center, radius, .. } => {
                Some(Region::Ball { center: center.clone(), radius: *radius })
            }
            TestFunction::Box { lo, hi } => {
                (lo.iter().zip(hi).all(|(a, b)| a < b)).then(|| Region::Box { lo: lo.clone(), hi: hi.clone() })
            }
            TestFunction::Zero { .. } => None,
        }
    }

    /// Largest distance from the origin to the support.
    pub fn support_radius(&self) -> f64 {
        self.support().map_or(0.0, |r| r.max_norm())
    }
}

/// Sum with a reduction order fixed by the input length alone.
pub fn stable_sum(values: &[f64]) -> f64 {
    let partial: Vec<f64> = values.par_chunks(CHUNK).map(|c| c.iter().sum::<f64>()).collect();
    partial.iter().sum()
}

fn is_origin(x: &[f64]) -> bool {
    x.iter().map(|v| v * v).sum::<f64>().sqrt() < ZERO_TOL
}

/// `f̂` over a point list complete inside `B(0, valid_radius)`.
pub fn sv_transform(f: &TestFunction, points: &[Vec<f64>], valid_radius: f64, mode: Mode) -> Result<f64> {
    let needed = f.support_radius();
    if needed > valid_radius {
        return Err(Error::IncompleteSupport { needed, valid: valid_radius });
    }
    let values: Vec<f64> =
        points.par_iter().map(|p| if mode == Mode::Linear && is_origin(p) { 0.0 } else { f.eval(p) }).collect();
    Ok(stable_sum(&values))
}

/// Transform of the product function `(v₁,…,v_p) ↦ Π fᵢ(vᵢ)` over `Λᵖ`.
pub fn sv_transform_p(fs: &[TestFunction], points: &[Vec<f64>], valid_radius: f64, mode: Mode) -> Result<f64> {
    fs.iter().try_fold(1.0, |acc, f| Ok(acc * sv_transform(f, points, valid_radius, mode)?))
}

/// `f̂(Λ(ℒ, W))`, generating exactly the points on the support of `f`.
pub fn model_set_transform(f: &TestFunction, cp: &CutProject, mode: Mode, opts: &EnumerationOptions) -> Result<f64> {
    let Some(region) = f.support() else { return Ok(0.0) };
    let ms = cp.generate_with(&region, opts)?;
    let values: Vec<f64> = ms
        .points
        .par_iter()
        .map(|p| if mode == Mode::Linear && is_origin(&p.phys) { 0.0 } else { f.eval(&p.phys) })
        .collect();
    Ok(stable_sum(&values))
}

/// `F(x) = 1_W(π_int x) · f(π_phys x)` on ℝⁿ.
#[derive(Debug, Clone)]
pub struct LiftedFunction {
    f: TestFunction,
    window: Window,
    scheme: Scheme,
}

pub fn lift(f: &TestFunction, window: &Window, scheme: &Scheme) -> Result<LiftedFunction> {
    if f.dim() != scheme.d() {
        return Err(Error::DimensionMismatch { expected: scheme.d(), got: f.dim() });
    }
    if window.dim() != scheme.m() {
        return Err(Error::DimensionMismatch { expected: scheme.m(), got: window.dim() });
    }
    Ok(LiftedFunction { f: f.clone(), window: window.clone(), scheme: scheme.clone() })
}

impl LiftedFunction {
    pub fn eval(&self, x: &[f64]) -> f64 {
        if self.window.contains(&self.scheme.project_int(x)) {
            self.f.eval(&self.scheme.project_phys(x))
        } else {
            0.0
        }
    }

    /// `vol(W) · ∫ f`.
    pub fn integral(&self) -> f64 {
        self.window.volume() * self.f.integral()
    }

    pub fn base(&self) -> &TestFunction {
        &self.f
    }
}

/// `F̂(ℒ)`: sum of `F` over the grid, skipping the origin in linear mode.
pub fn grid_transform(big_f: &LiftedFunction, grid: &Grid, mode: Mode) -> Result<f64> {
    grid_transform_with(big_f, grid, mode, &EnumerationOptions::default())
}

pub fn grid_transform_with(big_f: &LiftedFunction, grid: &Grid, mode: Mode, opts: &EnumerationOptions) -> Result<f64> {
    let scheme = &big_f.scheme;
    if grid.dim() != scheme.n() {
        return Err(Error::DimensionMismatch { expected: scheme.n(), got: grid.dim() });
    }
    let Some(region) = big_f.f.support() else { return Ok(0.0) };
    if big_f.window.is_empty() {
        return Ok(0.0);
    }
    let domain = ProductDomain::new(
        scheme.n(),
        vec![(scheme.phys_coords().to_vec(), &region as &dyn Domain), (scheme.int_coords().to_vec(), &big_f.window)],
    );
    let pts = enumerate_points_with(grid, &domain, opts)?;
    let values: Vec<f64> = pts
        .par_iter()
        .map(|p| if mode == Mode::Linear && is_origin(&p.point) { 0.0 } else { big_f.eval(&p.point) })
        .collect();
    Ok(stable_sum(&values))
}
