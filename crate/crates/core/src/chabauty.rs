//! Chabauty–Fell distance between closed discrete sets, evaluated on finite
//! truncations.
//!
//! `d(Y₀, Y₁)` is the infimum of `ε ∈ (0, 1)` such that for `i = 0, 1` every
//! point of `Yᵢ ∩ B(0, 1/ε)` lies within `ε` of `Y₁₋ᵢ`, and 1 if there is none.
//! The condition is monotone in `ε`, so bisection finds the infimum.

use nalgebra::DMatrix;

use crate::cutproject::CutProject;
use crate::lattice::{AffineMap, Region};
use crate::spatial::CellIndex;
use crate::{Error, Result};

/// Default bisection resolution.
pub const DEFAULT_EPS_FLOOR: f64 = 1e-4;
/// Default distance from `∂W` under which a lift is considered on the boundary.
pub const BOUNDARY_TOL: f64 = 1e-6;

/// A finite list of points complete for its underlying set inside `B(0, valid_radius)`.
#[derive(Debug, Clone)]
pub struct Truncation {
    index: CellIndex,
    norms: Vec<f64>,
    valid_radius: f64,
}

impl Truncation {
    /// Points outside the valid ball are dropped and duplicates removed.
    pub fn new(mut points: Vec<Vec<f64>>, valid_radius: f64) -> Self {
        points.retain(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt() <= valid_radius);
        points.sort_by(|a, b| {
            a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
        });
        points.dedup();
        let norms = points.iter().map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
        let index = CellIndex::with_radius_hint(points, valid_radius);
        Self { index, norms, valid_radius }
    }

    /// Points of `cp` in `B(0, radius)`.
    pub fn from_cut_project(cp: &CutProject, radius: f64) -> Result<Self> {
        let ms = cp.generate(&Region::ball(cp.d(), radius))?;
        Ok(Self::new(ms.phys_points(), radius))
    }

    pub fn points(&self) -> &[Vec<f64>] {
        self.index.points()
    }

    pub fn valid_radius(&self) -> f64 {
        self.valid_radius
    }

    pub fn len(&self) -> usize {
        self.norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms.is_empty()
    }

    /// Every point of `self` within `1/eps` of the origin has a partner of
    /// `other` at distance at most `eps`.
    fn covered_by(&self, other: &Truncation, eps: f64) -> bool {
        let clip = 1.0 / eps;
        self.points().iter().zip(&self.norms).filter(|(_, &n)| n <= clip).all(|(p, _)| other.index.any_within(p, eps))
    }
}

fn close_at(y0: &Truncation, y1: &Truncation, eps: f64) -> bool {
    y0.covered_by(y1, eps) && y1.covered_by(y0, eps)
}

/// Smallest `ε` whose test is decidable from truncations complete out to
/// `valid`: points up to `1/ε` and their partners up to `1/ε + ε` must be present.
fn certifiable_eps(valid: f64) -> Option<f64> {
    (valid >= 2.0).then(|| 2.0 / (valid + (valid * valid - 4.0).sqrt()))
}

/// Chabauty–Fell distance to resolution `eps_floor`, in `[eps_floor, 1]`.
///
/// Bisection only probes `ε` the truncations can decide. If the distance lies
/// below that bound and the bound exceeds `eps_floor`, the call fails with
/// [`Error::InsufficientTruncation`]; truncations complete to `1/eps_floor + 1`
/// never fail.
pub fn cf_distance(y0: &Truncation, y1: &Truncation, eps_floor: f64) -> Result<f64> {
    if !(eps_floor > 0.0 && eps_floor < 1.0) {
        return Err(Error::InvalidArgument(format!("eps_floor must lie in (0, 1), got {eps_floor}")));
    }
    let valid = y0.valid_radius.min(y1.valid_radius);
    let insufficient = Error::InsufficientTruncation { valid_radius: valid, floor: eps_floor };
    let Some(certifiable) = certifiable_eps(valid) else { return Err(insufficient) };
    if !close_at(y0, y1, 1.0) {
        return Ok(1.0);
    }
    let lo = certifiable.max(eps_floor);
    if close_at(y0, y1, lo) {
        return if lo > eps_floor { Err(insufficient) } else { Ok(eps_floor) };
    }
    let (mut lo, mut hi) = (lo, 1.0);
    while hi - lo > eps_floor {
        let mid = 0.5 * (lo + hi);
        if close_at(y0, y1, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Fails with [`Error::BoundaryHit`] if some lift of a point in `B(0, radius)`
/// has internal coordinates within `tol` of `∂W`.
pub fn check_boundary_clearance(cp: &CutProject, radius: f64, tol: f64) -> Result<()> {
    let Some((lo, hi)) = cp.window().bounding_box() else { return Ok(()) };
    let inflated = crate::cutproject::Window::boxed(
        lo.iter().map(|x| x - 2.0 * tol).collect(),
        hi.iter().map(|x| x + 2.0 * tol).collect(),
    );
    let probe = cp.with_window(inflated)?;
    for p in probe.generate(&Region::ball(cp.d(), radius))?.points {
        let x = cp.int_of(&p.lift);
        if cp.window().boundary_distance(&x) < tol {
            return Err(Error::BoundaryHit { point: x, tolerance: tol });
        }
    }
    Ok(())
}

/// A physical perturbation `x ↦ A x + v` of ℝᵈ.
#[derive(Debug, Clone)]
pub struct PhysicalMap {
    pub matrix: DMatrix<f64>,
    pub shift: Vec<f64>,
}

impl PhysicalMap {
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { matrix: DMatrix::from_row_slice(2, 2, &[c, -s, s, c]), shift: vec![0.0; 2] }
    }

    pub fn translation(shift: Vec<f64>) -> Self {
        Self { matrix: DMatrix::identity(shift.len(), shift.len()), shift }
    }

    pub fn embed(&self, cp: &CutProject) -> Result<AffineMap> {
        AffineMap::embedded(&self.matrix, &self.shift, cp.scheme().phys_coords(), cp.scheme().n())
    }
}

/// Distances `d(Ψ(g_k·ℒ), Ψ(ℒ))` along a sequence of perturbations.
pub fn continuity_probe(
    cp: &CutProject,
    perturbations: &[PhysicalMap],
    radius: f64,
    eps_floor: f64,
) -> Result<Vec<f64>> {
    check_boundary_clearance(cp, radius, BOUNDARY_TOL)?;
    let base = Truncation::from_cut_project(cp, radius)?;
    perturbations
        .iter()
        .map(|g| {
            let moved = cp.apply(&g.embed(cp)?)?;
            check_boundary_clearance(&moved, radius, BOUNDARY_TOL)?;
            let t = Truncation::from_cut_project(&moved, radius)?;
            cf_distance(&t, &base, eps_floor)
        })
        .collect()
}
