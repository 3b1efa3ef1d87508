//! Seeded sampling of grids along expanding horospheres, optionally with a
//! uniform translation on the torus fiber, and Monte-Carlo estimators of the
//! first two moments of Siegel–Veech transforms.
//!
//! Sample `i` draws from a ChaCha8 stream selected by `(seed, i)`, so sample
//! lists and estimates do not depend on the number of worker threads.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cutproject::{CutProject, Scheme};
use crate::lattice::{AffineMap, EnumerationOptions, Grid};
use crate::transforms::{model_set_transform, stable_sum, Mode, TestFunction};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerSpec {
    /// Physical dimension.
    pub d: usize,
    /// Flow time of `g_t`.
    pub t: f64,
    /// Ranges of the `d(d−1)/2` upper-triangular horospherical parameters, row-major.
    pub omega: Vec<(f64, f64)>,
    pub sample_count: usize,
    pub seed: u64,
    pub torus_randomize: bool,
}

impl SamplerSpec {
    /// Unit-cube `omega`, no torus randomization.
    pub fn new(d: usize, t: f64, sample_count: usize, seed: u64) -> Self {
        Self { d, t, omega: vec![(0.0, 1.0); d * d.saturating_sub(1) / 2], sample_count, seed, torus_randomize: false }
    }

    pub fn with_torus(mut self, on: bool) -> Self {
        self.torus_randomize = on;
        self
    }

    pub fn with_omega(mut self, omega: Vec<(f64, f64)>) -> Self {
        self.omega = omega;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_count == 0 {
            return Err(Error::InvalidArgument("sample_count must be at least 1".into()));
        }
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return Err(Error::InvalidArgument(format!("flow time must be finite and nonnegative, got {}", self.t)));
        }
        let params = self.d * self.d.saturating_sub(1) / 2;
        if self.omega.len() != params {
            return Err(Error::DimensionMismatch { expected: params, got: self.omega.len() });
        }
        if self.omega.iter().any(|(a, b)| !(a <= b)) {
            return Err(Error::InvalidArgument("omega must be a nonempty box".into()));
        }
        Ok(())
    }
}

/// Exponents `aᵢ` of the balanced diagonal flow `diag(e^{t aᵢ})`: decreasing, summing to zero.
pub fn flow_exponents(d: usize) -> Vec<f64> {
    (0..d).map(|i| (d as f64 - 1.0 - 2.0 * i as f64) / 2.0).collect()
}

/// `g_t` on ℝᵈ.
pub fn diagonal_flow(d: usize, t: f64) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_iterator(d, flow_exponents(d).into_iter().map(|a| (a * t).exp())))
}

/// Upper unipotent matrix with the given above-diagonal entries, row-major.
pub fn unipotent(d: usize, params: &[f64]) -> DMatrix<f64> {
    let mut u = DMatrix::identity(d, d);
    let mut k = 0;
    for i in 0..d {
        for j in i + 1..d {
            u[(i, j)] = params[k];
            k += 1;
        }
    }
    u
}

/// One draw: `g_t u` on the physical space and, if requested, the fiber
/// coordinates `ξ ∈ [0,1)ⁿ` of the translation.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleDraw {
    pub element: DMatrix<f64>,
    pub fiber: Option<Vec<f64>>,
}

pub fn draw(spec: &SamplerSpec, n: usize, index: u64) -> SampleDraw {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index);
    let params: Vec<f64> = spec.omega.iter().map(|&(a, b)| a + (b - a) * rng.random::<f64>()).collect();
    let element = diagonal_flow(spec.d, spec.t) * unipotent(spec.d, &params);
    let fiber = spec.torus_randomize.then(|| (0..n).map(|_| rng.random::<f64>()).collect());
    SampleDraw { element, fiber }
}

fn sampled_grid(base: &Grid, scheme: &Scheme, spec: &SamplerSpec, index: u64) -> Result<Grid> {
    let s = draw(spec, base.dim(), index);
    let g = AffineMap::embedded(&s.element, &vec![0.0; spec.d], scheme.phys_coords(), scheme.n())?;
    let moved = base.apply(&g)?;
    Ok(match s.fiber {
        Some(xi) => {
            let shift = moved.basis() * DVector::from_vec(xi);
            moved.translated(&shift)
        }
        None => moved,
    })
}

/// `g_t u_s · base` for each sample `s`, translated by a uniform point of the
/// fundamental parallelepiped when `torus_randomize` is set.
pub fn horosphere_sample(base: &Grid, scheme: &Scheme, spec: &SamplerSpec) -> Result<Vec<Grid>> {
    spec.validate()?;
    check_dims(base, scheme, spec)?;
    (0..spec.sample_count as u64).into_par_iter().map(|i| sampled_grid(base, scheme, spec, i)).collect()
}

fn check_dims(base: &Grid, scheme: &Scheme, spec: &SamplerSpec) -> Result<()> {
    if base.dim() != scheme.n() {
        return Err(Error::DimensionMismatch { expected: scheme.n(), got: base.dim() });
    }
    if spec.d != scheme.d() {
        return Err(Error::DimensionMismatch { expected: scheme.d(), got: spec.d });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorResult {
    pub mean: f64,
    /// Sample standard deviation over `√count`.
    pub stderr: f64,
    pub count: usize,
    pub values: Vec<f64>,
}

impl EstimatorResult {
    pub fn from_values(values: Vec<f64>) -> Self {
        let count = values.len();
        let mean = stable_sum(&values) / count as f64;
        let stderr = if count > 1 {
            let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
            (stable_sum(&dev) / (count - 1) as f64 / count as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, stderr, count, values }
    }

    /// Sample variance with the `count − 1` denominator.
    pub fn variance(&self) -> f64 {
        self.stderr * self.stderr * self.count as f64
    }

    /// `(mean − reference) / stderr`; zero when both the error and `stderr` vanish.
    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = self.mean - reference;
        if diff == 0.0 {
            0.0
        } else {
            diff / self.stderr
        }
    }
}

/// Per-sample transforms of `f` over `Λ(g_t u_s ℒ, W)`.
pub fn sample_transforms(
    f: &TestFunction,
    cp: &CutProject,
    spec: &SamplerSpec,
    mode: Mode,
    opts: &EnumerationOptions,
) -> Result<Vec<f64>> {
    spec.validate()?;
    check_dims(cp.grid(), cp.scheme(), spec)?;
    if f.dim() != cp.d() {
        return Err(Error::DimensionMismatch { expected: cp.d(), got: f.dim() });
    }
    let inner = EnumerationOptions { parallel: false, ..*opts };
    (0..spec.sample_count as u64)
        .into_par_iter()
        .map(|i| {
            let grid = sampled_grid(cp.grid(), cp.scheme(), spec, i)?;
            model_set_transform(f, &cp.with_grid(grid)?, mode, &inner)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanEstimate {
    pub estimate: EstimatorResult,
    /// `vol(W)/covol · ∫f`.
    pub reference: f64,
}

impl MeanEstimate {
    pub fn z_score(&self) -> f64 {
        self.estimate.z_score(self.reference)
    }
}

pub fn estimate_mean_sv(
    f: &TestFunction,
    cp: &CutProject,
    spec: &SamplerSpec,
    mode: Mode,
    opts: &EnumerationOptions,
) -> Result<MeanEstimate> {
    let values = sample_transforms(f, cp, spec, mode, opts)?;
    let reference = cp.density()? * f.integral();
    Ok(MeanEstimate { estimate: EstimatorResult::from_values(values), reference })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecondMoment {
    pub mean: f64,
    /// Sample mean of `f̂²`.
    pub second_moment: f64,
    pub variance: f64,
    /// `variance / ∫f`; zero when `∫f = 0`.
    pub rogers_ratio: f64,
    /// `(vol(W)/covol · ∫f)²`.
    pub reference_square: f64,
    pub count: usize,
}

impl SecondMoment {
    /// `(E[f̂²] − reference²) / reference²`.
    pub fn relative_excess(&self) -> f64 {
        (self.second_moment - self.reference_square) / self.reference_square
    }
}

pub fn estimate_second_moment(
    f: &TestFunction,
    cp: &CutProject,
    spec: &SamplerSpec,
    mode: Mode,
    opts: &EnumerationOptions,
) -> Result<SecondMoment> {
    let values = sample_transforms(f, cp, spec, mode, opts)?;
    let squares: Vec<f64> = values.iter().map(|v| v * v).collect();
    let count = values.len();
    let second_moment = stable_sum(&squares) / count as f64;
    let est = EstimatorResult::from_values(values);
    let variance = est.variance();
    let integral = f.integral();
    let reference = cp.density()? * integral;
    Ok(SecondMoment {
        mean: est.mean,
        second_moment,
        variance,
        rogers_ratio: if integral > 0.0 { variance / integral } else { 0.0 },
        reference_square: reference * reference,
        count,
    })
}

/// Running averages `(1/k) Σ_{j ≤ k} f̂(Λ(g_{t_j} ℒ, W))` along the diagonal orbit.
pub fn birkhoff_average(
    f: &TestFunction,
    cp: &CutProject,
    t_grid: &[f64],
    mode: Mode,
    opts: &EnumerationOptions,
) -> Result<Vec<f64>> {
    if t_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("flow times must be strictly increasing".into()));
    }
    let d = cp.d();
    let values: Vec<f64> = t_grid
        .par_iter()
        .map(|&t| {
            let g =
                AffineMap::embedded(&diagonal_flow(d, t), &vec![0.0; d], cp.scheme().phys_coords(), cp.scheme().n())?;
            model_set_transform(f, &cp.apply(&g)?, mode, opts)
        })
        .collect::<Result<_>>()?;
    let mut running = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    for (k, v) in values.iter().enumerate() {
        acc += v;
        running.push(acc / (k + 1) as f64);
    }
    Ok(running)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutproject::presets;

    #[test]
    fn trivial_flow_reproduces_base() {
        let cp = presets::ammann_beenker();
        let spec = SamplerSpec::new(2, 0.0, 5, 1).with_omega(vec![(0.0, 0.0)]);
        for g in horosphere_sample(cp.grid(), cp.scheme(), &spec).unwrap() {
            assert_eq!(&g, cp.grid());
        }
    }

    #[test]
    fn sampling_is_reproducible_and_unimodular() {
        let cp = presets::ammann_beenker();
        let spec = SamplerSpec::new(2, 3.0, 10, 42).with_torus(true);
        let a = horosphere_sample(cp.grid(), cp.scheme(), &spec).unwrap();
        let b = horosphere_sample(cp.grid(), cp.scheme(), &spec).unwrap();
        assert_eq!(a, b);
        for g in &a {
            assert!((g.covolume() / cp.grid().covolume() - 1.0).abs() < 1e-9);
        }
        let s = draw(&spec, 4, 3);
        assert!((s.element.determinant() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn flow_is_balanced() {
        assert_eq!(flow_exponents(2), vec![0.5, -0.5]);
        for d in 1..6 {
            assert!(flow_exponents(d).iter().sum::<f64>().abs() < 1e-12);
        }
    }

    #[test]
    fn zero_function_estimates() {
        let cp = presets::fibonacci();
        let spec = SamplerSpec::new(1, 0.0, 20, 7).with_torus(true);
        let f = TestFunction::Zero { dim: 1 };
        let opts = EnumerationOptions::default();
        let m = estimate_mean_sv(&f, &cp, &spec, Mode::Affine, &opts).unwrap();
        assert_eq!((m.estimate.mean, m.estimate.stderr), (0.0, 0.0));
        let s = estimate_second_moment(&f, &cp, &spec, Mode::Affine, &opts).unwrap();
        assert_eq!((s.variance, s.rogers_ratio), (0.0, 0.0));
        assert_eq!(birkhoff_average(&f, &cp, &[0.0, 1.0], Mode::Affine, &opts).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn reference_values() {
        let opts = EnumerationOptions::default();
        let spec = SamplerSpec::new(2, 0.0, 1, 0);
        let ab = presets::ammann_beenker();
        let m = estimate_mean_sv(&TestFunction::ball(2, 10.0), &ab, &spec, Mode::Affine, &opts).unwrap();
        assert!((m.reference - 0.125 * std::f64::consts::PI * 100.0).abs() < 1e-9);
        let spec = SamplerSpec::new(1, 0.0, 1, 0);
        let m =
            estimate_mean_sv(&TestFunction::ball(1, 20.0), &presets::fibonacci(), &spec, Mode::Affine, &opts).unwrap();
        assert!((m.reference - 40.0 / 5f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn torus_mean_on_integer_grid() {
        // ℤ² with a box window: the fiber average of the affine count is exact
        let cp = presets::integer_control(1);
        let f = TestFunction::ball(1, 3.5);
        let spec = SamplerSpec::new(1, 0.0, 400, 9).with_torus(true);
        let m = estimate_mean_sv(&f, &cp, &spec, Mode::Affine, &EnumerationOptions::default()).unwrap();
        assert!(m.z_score().abs() <= 3.0, "{m:?}");
    }

    #[test]
    fn single_time_birkhoff_is_the_transform() {
        let cp = presets::fibonacci();
        let f = TestFunction::ball(1, 20.0);
        let opts = EnumerationOptions::default();
        let avg = birkhoff_average(&f, &cp, &[0.0], Mode::Affine, &opts).unwrap();
        assert_eq!(avg, vec![model_set_transform(&f, &cp, Mode::Affine, &opts).unwrap()]);
    }
}
