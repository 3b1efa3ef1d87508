//! Complete enumeration of grid points inside a bounded domain.
//!
//! The domain's bounding ellipsoid is mapped to the unit ball, the scaled basis
//! is LLL-reduced, and Fincke–Pohst enumeration around the scaled center lists
//! every integer vector landing in the ball. Candidates are then filtered by the
//! domain's exact membership test in original coordinates.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::lll::{gram_schmidt, lll_reduce};
use super::region::{unit_ball_volume, Domain};
use super::Grid;
use crate::{Error, Result};

/// Default cap on the predicted number of candidates.
pub const DEFAULT_CAP: u64 = 100_000_000;

const LLL_DELTA: f64 = 0.99;
// Relative slack on the unit ball so that points on the domain boundary are
// never lost to rounding; the exact filter removes the excess.
const BALL_SLACK: f64 = 1e-7;

#[derive(Debug, Clone, Copy)]
pub struct EnumerationOptions {
    pub cap: u64,
    pub parallel: bool,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self { cap: DEFAULT_CAP, parallel: true }
    }
}

/// A grid point together with its integer coordinates in the grid basis.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub coords: Vec<i64>,
    pub point: Vec<f64>,
}

/// All points of `grid` in `domain`, each once, sorted lexicographically.
pub fn enumerate_points(grid: &Grid, domain: &dyn Domain) -> Result<Vec<GridPoint>> {
    enumerate_points_with(grid, domain, &EnumerationOptions::default())
}

struct Search<'a> {
    grid: &'a Grid,
    domain: &'a dyn Domain,
    transform: DMatrix<i64>,
    norms: Vec<f64>,
    mu: Vec<Vec<f64>>,
    target: Vec<f64>,
    radius2: f64,
}

impl Search<'_> {
    fn center(&self, level: usize, x: &[i64]) -> f64 {
        let mut c = self.target[level];
        for j in level + 1..x.len() {
            c -= self.mu[j][level] * (x[j] as f64 - self.target[j]);
        }
        c
    }

    fn range(&self, level: usize, x: &[i64], used: f64) -> Option<(i64, i64, f64)> {
        let rem = self.radius2 - used;
        if rem < 0.0 {
            return None;
        }
        let c = self.center(level, x);
        let w = (rem / self.norms[level]).sqrt();
        let lo = (c - w).ceil() as i64;
        let hi = (c + w).floor() as i64;
        (lo <= hi).then_some((lo, hi, c))
    }

    fn descend(&self, level: usize, x: &mut Vec<i64>, used: f64, out: &mut Vec<GridPoint>) {
        let Some((lo, hi, c)) = self.range(level, x, used) else { return };
        for v in lo..=hi {
            x[level] = v;
            let d = v as f64 - c;
            let next = used + self.norms[level] * d * d;
            if next > self.radius2 {
                continue;
            }
            if level == 0 {
                self.emit(x, out);
            } else {
                self.descend(level - 1, x, next, out);
            }
        }
        x[level] = 0;
    }

    fn emit(&self, x: &[i64], out: &mut Vec<GridPoint>) {
        let n = x.len();
        let coords: Vec<i64> = (0..n).map(|i| (0..n).map(|j| self.transform[(i, j)] * x[j]).sum()).collect();
        let point = self.grid.point(&coords);
        if self.domain.contains(&point) {
            out.push(GridPoint { coords, point });
        }
    }
}

pub fn enumerate_points_with(grid: &Grid, domain: &dyn Domain, opts: &EnumerationOptions) -> Result<Vec<GridPoint>> {
    let n = grid.dim();
    if domain.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: domain.dim() });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let ell = domain.bounding_ellipsoid();
    if ell.semi_axes.iter().chain(&ell.center).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("domain is unbounded".into()));
    }
    let axes: Vec<f64> = ell.semi_axes.iter().map(|&a| a.max(1e-12)).collect();

    let basis = grid.basis();
    let scaled = DMatrix::from_fn(n, n, |i, j| basis[(i, j)] / axes[i]);
    let target = DVector::from_fn(n, |i, _| (ell.center[i] - grid.translation()[i]) / axes[i]);

    let scaled_det = scaled.determinant().abs();
    let radius2 = (1.0 + BALL_SLACK).powi(2);
    let predicted = unit_ball_volume(n) * radius2.powf(n as f64 / 2.0) / scaled_det;
    if !predicted.is_finite() || predicted > opts.cap as f64 {
        return Err(Error::RegionTooLarge { predicted, cap: opts.cap });
    }

    let lll = lll_reduce(&scaled, LLL_DELTA);
    let cols: Vec<Vec<f64>> = lll.reduced.column_iter().map(|c| c.iter().copied().collect()).collect();
    let (_, norms, mu) = gram_schmidt(&cols);
    let y = lll.reduced.clone().lu().solve(&target).ok_or(Error::SingularBasis { det: 0.0, threshold: 0.0 })?;

    let search =
        Search { grid, domain, transform: lll.transform, norms, mu, target: y.iter().copied().collect(), radius2 };

    let top = n - 1;
    let mut out = match search.range(top, &vec![0; n], 0.0) {
        None => Vec::new(),
        Some((lo, hi, c)) => {
            let run = |v: i64| {
                let mut x = vec![0i64; n];
                x[top] = v;
                let d = v as f64 - c;
                let used = search.norms[top] * d * d;
                let mut local = Vec::new();
                if used <= search.radius2 {
                    if top == 0 {
                        search.emit(&x, &mut local);
                    } else {
                        search.descend(top - 1, &mut x, used, &mut local);
                    }
                }
                local
            };
            if opts.parallel && hi - lo >= 8 {
                (lo..=hi).into_par_iter().flat_map_iter(run).collect()
            } else {
                (lo..=hi).flat_map(run).collect()
            }
        }
    };
    out.sort_by(|a, b| lex_cmp(&a.point, &b.point).then_with(|| a.coords.cmp(&b.coords)));
    Ok(out)
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}
