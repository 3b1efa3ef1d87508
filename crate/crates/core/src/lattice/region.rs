use std::f64::consts::PI;

/// An axis-aligned ellipsoid `Σ ((x_i - c_i) / a_i)² ≤ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    pub center: Vec<f64>,
    pub semi_axes: Vec<f64>,
}

impl Ellipsoid {
    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.center.len()) * self.semi_axes.iter().product::<f64>()
    }
}

/// Volume of the Euclidean unit ball in ℝⁿ.
pub fn unit_ball_volume(n: usize) -> f64 {
    // V_n = V_{n-2} · 2π / n
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * PI / n as f64,
    }
}

/// A bounded subset of ℝⁿ the enumerator can search.
///
/// `bounding_ellipsoid` must contain the set; `contains` is the exact
/// membership test applied to every candidate.
pub trait Domain: Sync {
    fn dim(&self) -> usize;
    fn contains(&self, x: &[f64]) -> bool;
    fn bounding_ellipsoid(&self) -> Ellipsoid;
    /// Lebesgue measure, when known in closed form.
    fn volume(&self) -> Option<f64> {
        None
    }
}

/// Boxes are half-open `[lo, hi)`, balls are closed.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl Region {
    pub fn cube(lo: f64, hi: f64, n: usize) -> Self {
        Region::Box { lo: vec![lo; n], hi: vec![hi; n] }
    }

    pub fn ball(n: usize, radius: f64) -> Self {
        Region::Ball { center: vec![0.0; n], radius }
    }

    /// Whether the closed ball `B(x, r)` lies inside the region (up to the
    /// open faces of a box).
    pub fn covers_ball(&self, x: &[f64], r: f64) -> bool {
        match self {
            Region::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| *a <= v - r && v + r < *b),
            Region::Ball { center, radius } => {
                let d: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                d + r <= *radius
            }
        }
    }

    /// Largest distance from the origin to a point of the region.
    pub fn max_norm(&self) -> f64 {
        match self {
            Region::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| a.abs().max(b.abs()).powi(2)).sum::<f64>().sqrt(),
            Region::Ball { center, radius } => center.iter().map(|c| c * c).sum::<f64>().sqrt() + radius,
        }
    }
}

impl Domain for Region {
    fn dim(&self) -> usize {
        match self {
            Region::Box { lo, .. } => lo.len(),
            Region::Ball { center, .. } => center.len(),
        }
    }

    fn contains(&self, x: &[f64]) -> bool {
        match self {
            Region::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| *a <= *v && *v < *b),
            Region::Ball { center, radius } => {
                let d2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                d2 <= radius * radius
            }
        }
    }

    fn bounding_ellipsoid(&self) -> Ellipsoid {
        match self {
            Region::Box { lo, hi } => {
                let root_n = (lo.len() as f64).sqrt();
                Ellipsoid {
                    center: lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect(),
                    semi_axes: lo.iter().zip(hi).map(|(a, b)| 0.5 * (b - a) * root_n).collect(),
                }
            }
            Region::Ball { center, radius } => {
                Ellipsoid { center: center.clone(), semi_axes: vec![*radius; center.len()] }
            }
        }
    }

    fn volume(&self) -> Option<f64> {
        Some(match self {
            Region::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| (b - a).max(0.0)).product(),
            Region::Ball { center, radius } => unit_ball_volume(center.len()) * radius.powi(center.len() as i32),
        })
    }
}

/// Cartesian product of domains, each acting on its own coordinate subset of ℝⁿ.
pub struct ProductDomain<'a> {
    n: usize,
    factors: Vec<(Vec<usize>, &'a dyn Domain)>,
}

impl<'a> ProductDomain<'a> {
    /// `factors` must partition `0..n` by their index sets.
    pub fn new(n: usize, factors: Vec<(Vec<usize>, &'a dyn Domain)>) -> Self {
        debug_assert_eq!(factors.iter().map(|(ix, _)| ix.len()).sum::<usize>(), n);
        Self { n, factors }
    }
}

impl Domain for ProductDomain<'_> {
    fn dim(&self) -> usize {
        self.n
    }

    fn contains(&self, x: &[f64]) -> bool {
        let mut buf = Vec::new();
        self.factors.iter().all(|(ix, d)| {
            buf.clear();
            buf.extend(ix.iter().map(|&i| x[i]));
            d.contains(&buf)
        })
    }

    fn bounding_ellipsoid(&self) -> Ellipsoid {
        // Each factor lies in its own ellipsoid; the product of k unit balls
        // lies in the ball of radius √k.
        let k = (self.factors.len() as f64).sqrt();
        let mut center = vec![0.0; self.n];
        let mut semi_axes = vec![0.0; self.n];
        for (ix, d) in &self.factors {
            let e = d.bounding_ellipsoid();
            for (a, &i) in ix.iter().enumerate() {
                center[i] = e.center[a];
                semi_axes[i] = e.semi_axes[a] * k;
            }
        }
        Ellipsoid { center, semi_axes }
    }

    fn volume(&self) -> Option<f64> {
        self.factors.iter().map(|(_, d)| d.volume()).product()
    }
}
