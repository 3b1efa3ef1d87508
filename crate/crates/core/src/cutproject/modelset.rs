use crate::lattice::{
    enumerate_points_with, unit_ball_volume, AffineMap, Domain, EnumerationOptions, Grid, ProductDomain, Region,
};
use crate::{Error, Result};

use super::{Scheme, Window};

/// A point of a model set together with the integer coordinates of its lift.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelPoint {
    pub phys: Vec<f64>,
    pub lift: Vec<i64>,
}

/// The data `(scheme, grid, window)` defining `Λ(ℒ, W)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CutProject {
    scheme: Scheme,
    grid: Grid,
    window: Window,
}

/// A finite piece of a model set: every point of `Λ` inside `region`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSet {
    pub points: Vec<ModelPoint>,
    region: Region,
}

impl CutProject {
    pub fn new(scheme: Scheme, grid: Grid, window: Window) -> Result<Self> {
        if grid.dim() != scheme.n() {
            return Err(Error::DimensionMismatch { expected: scheme.n(), got: grid.dim() });
        }
        if window.dim() != scheme.m() {
            return Err(Error::DimensionMismatch { expected: scheme.m(), got: window.dim() });
        }
        Ok(Self { scheme, grid, window })
    }

    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn d(&self) -> usize {
        self.scheme.d()
    }

    pub fn with_grid(&self, grid: Grid) -> Result<Self> {
        Self::new(self.scheme.clone(), grid, self.window.clone())
    }

    pub fn with_window(&self, window: Window) -> Result<Self> {
        Self::new(self.scheme.clone(), self.grid.clone(), window)
    }

    /// Acts on the grid: `Λ(g·ℒ, W)`.
    pub fn apply(&self, g: &AffineMap) -> Result<Self> {
        self.with_grid(self.grid.apply(g)?)
    }

    /// Moves an interior point `x₀` of the window to the origin, translating the
    /// grid by `-x₀` in internal space; the model set is unchanged.
    pub fn centered(&self) -> Result<Self> {
        let Some(x0) = self.window.interior_point() else {
            return Ok(self.clone());
        };
        let mut shift = nalgebra::DVector::zeros(self.scheme.n());
        for (a, &i) in self.scheme.int_coords().iter().enumerate() {
            shift[i] = -x0[a];
        }
        let neg: Vec<f64> = x0.iter().map(|v| -v).collect();
        Self::new(self.scheme.clone(), self.grid.translated(&shift), self.window.translated(&neg))
    }

    /// Translates only the window so that an interior point of it sits at the
    /// origin. The grid is untouched, so the origin lift lands inside `W`.
    pub fn with_centered_window(&self) -> Result<Self> {
        let Some(x0) = self.window.interior_point() else {
            return Ok(self.clone());
        };
        let neg: Vec<f64> = x0.iter().map(|v| -v).collect();
        self.with_window(self.window.translated(&neg))
    }

    /// `vol(W) / covol(ℒ)`.
    pub fn density(&self) -> Result<f64> {
        density(&self.scheme, &self.grid, &self.window)
    }

    /// Points of `Λ` in `region`: grid points in `region × W`, projected.
    pub fn generate(&self, region: &Region) -> Result<ModelSet> {
        self.generate_with(region, &EnumerationOptions::default())
    }

    pub fn generate_with(&self, region: &Region, opts: &EnumerationOptions) -> Result<ModelSet> {
        if region.dim() != self.d() {
            return Err(Error::DimensionMismatch { expected: self.d(), got: region.dim() });
        }
        let mut points = Vec::new();
        if self.window.bounding_box().is_some() {
            let domain = ProductDomain::new(
                self.scheme.n(),
                vec![
                    (self.scheme.phys_coords().to_vec(), region as &dyn Domain),
                    (self.scheme.int_coords().to_vec(), &self.window),
                ],
            );
            points = enumerate_points_with(&self.grid, &domain, opts)?
                .into_iter()
                .map(|p| ModelPoint { phys: self.scheme.project_phys(&p.point), lift: p.coords })
                .collect();
            points.sort_by(|a, b| {
                a.phys
                    .iter()
                    .zip(&b.phys)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then_with(|| a.lift.cmp(&b.lift))
            });
        }
        Ok(ModelSet { points, region: region.clone() })
    }

    /// `#(Λ ∩ B(0,T)) / vol(B(0,T))`.
    pub fn empirical_density(&self, t: f64) -> Result<f64> {
        let ms = self.generate(&Region::ball(self.d(), t))?;
        Ok(ms.points.len() as f64 / (unit_ball_volume(self.d()) * t.powi(self.d() as i32)))
    }

    /// Physical point of the lift with integer coordinates `lift`.
    pub fn phys_of(&self, lift: &[i64]) -> Vec<f64> {
        self.scheme.project_phys(&self.grid.point(lift))
    }

    pub fn int_of(&self, lift: &[i64]) -> Vec<f64> {
        self.scheme.project_int(&self.grid.point(lift))
    }
}

/// `vol(W) / covol(ℒ)`, the density of an irreducible model set.
pub fn density(scheme: &Scheme, grid: &Grid, window: &Window) -> Result<f64> {
    if grid.dim() != scheme.n() {
        return Err(Error::DimensionMismatch { expected: scheme.n(), got: grid.dim() });
    }
    let vol = window.volume();
    if !(vol > 0.0) {
        return Err(Error::ZeroVolumeWindow);
    }
    Ok(vol / crate::lattice::covolume(grid)?)
}

impl ModelSet {
    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn phys_points(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| p.phys.clone()).collect()
    }

    /// Radius of the largest origin-centered ball inside the generation region.
    pub fn valid_radius(&self) -> f64 {
        match &self.region {
            Region::Ball { center, radius } => radius - center.iter().map(|c| c * c).sum::<f64>().sqrt(),
            Region::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| (-a).min(*b)).fold(f64::INFINITY, f64::min),
        }
    }

    /// Empirical density in `B(0,T)`; the generation region must cover the ball.
    pub fn empirical_density(&self, t: f64) -> Result<f64> {
        if t > self.valid_radius() {
            return Err(Error::IncompleteSupport { needed: t, valid: self.valid_radius() });
        }
        let d = self.region.dim();
        let count = self.points.iter().filter(|p| p.phys.iter().map(|x| x * x).sum::<f64>() <= t * t).count();
        Ok(count as f64 / (unit_ball_volume(d) * t.powi(d as i32)))
    }
}

#[cfg(test)]
mod tests {
    use super::super::presets;
    use super::*;

    #[test]
    fn empty_window_gives_empty_set() {
        let cp = presets::fibonacci().with_window(Window::empty(1)).unwrap();
        assert!(cp.generate(&Region::cube(0.0, 100.0, 1)).unwrap().is_empty());
        assert!(matches!(cp.density(), Err(Error::ZeroVolumeWindow)));
    }

    #[test]
    fn fibonacci_density_value() {
        let d = presets::fibonacci().density().unwrap();
        assert!((d - 1.0 / 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn ammann_beenker_density_value() {
        assert!((presets::ammann_beenker().density().unwrap() - 0.125).abs() < 1e-12);
    }

    #[test]
    fn doubling_box_quadruples_density() {
        let cp = presets::ammann_beenker();
        let big = cp.with_window(Window::cube(0.0, 2.0, 2)).unwrap();
        assert!((big.density().unwrap() / cp.density().unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn control_lattice_density() {
        let cp = presets::integer_control(2);
        let r = 10.0;
        let ms = cp.generate(&Region::ball(2, r)).unwrap();
        let brute = (-10i64..=10)
            .flat_map(|a| (-10i64..=10).map(move |b| (a, b)))
            .filter(|(a, b)| a * a + b * b <= 100)
            .count();
        assert_eq!(ms.len(), brute);
        assert!((ms.empirical_density(r).unwrap() - brute as f64 / (std::f64::consts::PI * r * r)).abs() < 1e-15);
    }

    #[test]
    fn lifts_reproduce_points() {
        let cp = presets::ammann_beenker();
        for p in cp.generate(&Region::ball(2, 10.0)).unwrap().points {
            let q = cp.phys_of(&p.lift);
            assert!((q[0] - p.phys[0]).abs() < 1e-12 && (q[1] - p.phys[1]).abs() < 1e-12);
            assert!(cp.window().contains(&cp.int_of(&p.lift)));
        }
    }

    #[test]
    fn centering_keeps_the_point_set() {
        let cp = presets::ammann_beenker();
        let c = cp.centered().unwrap();
        assert!(c.window().contains(&[0.0, 0.0]));
        let a = cp.generate(&Region::ball(2, 15.0)).unwrap();
        let b = c.generate(&Region::ball(2, 15.0)).unwrap();
        assert_eq!(a.len(), b.len());
        for (p, q) in a.points.iter().zip(&b.points) {
            assert!((p.phys[0] - q.phys[0]).abs() < 1e-12 && (p.phys[1] - q.phys[1]).abs() < 1e-12);
        }
    }
}
