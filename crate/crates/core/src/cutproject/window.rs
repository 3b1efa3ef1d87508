//! Windows: finite disjoint unions of half-open boxes, closed balls and convex
//! polygons in the internal space.

use serde::{Deserialize, Serialize};

use crate::lattice::{unit_ball_volume, Domain, Ellipsoid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WindowPiece {
    /// `[lo, hi)`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Closed ball.
    Ball { center: Vec<f64>, radius: f64 },
    /// Convex polygon in the plane. Edges whose outward normal points left
    /// (or straight down) belong to the polygon, the others do not, mirroring
    /// the half-open box convention.
    Polygon { vertices: Vec<[f64; 2]> },
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 { ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let q = [a[0] + t * ab[0] - p[0], a[1] + t * ab[1] - p[1]];
    (q[0] * q[0] + q[1] * q[1]).sqrt()
}

impl WindowPiece {
    pub fn dim(&self) -> usize {
        match self {
            WindowPiece::Box { lo, .. } => lo.len(),
            WindowPiece::Ball { center, .. } => center.len(),
            WindowPiece::Polygon { .. } => 2,
        }
    }

    /// Vertices in counter-clockwise order.
    fn ccw(vertices: &[[f64; 2]]) -> Vec<[f64; 2]> {
        let mut v = vertices.to_vec();
        let area2: f64 = (0..v.len())
            .map(|i| {
                let (a, b) = (v[i], v[(i + 1) % v.len()]);
                a[0] * b[1] - a[1] * b[0]
            })
            .sum();
        if area2 < 0.0 {
            v.reverse();
        }
        v
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            WindowPiece::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| *a <= *v && *v < *b),
            WindowPiece::Ball { center, radius } => {
                x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() <= radius * radius
            }
            WindowPiece::Polygon { vertices } => {
                if vertices.len() < 3 {
                    return false;
                }
                let v = Self::ccw(vertices);
                let p = [x[0], x[1]];
                (0..v.len()).all(|i| {
                    let (a, b) = (v[i], v[(i + 1) % v.len()]);
                    let c = cross(a, b, p);
                    if c != 0.0 {
                        return c > 0.0;
                    }
                    // on the supporting line: outward normal of a ccw edge is (dy, -dx)
                    let nx = b[1] - a[1];
                    let ny = a[0] - b[0];
                    nx < 0.0 || (nx == 0.0 && ny < 0.0)
                })
            }
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            WindowPiece::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| (b - a).max(0.0)).product(),
            WindowPiece::Ball { center, radius } => {
                unit_ball_volume(center.len()) * radius.max(0.0).powi(center.len() as i32)
            }
            WindowPiece::Polygon { vertices } => {
                let n = vertices.len();
                if n < 3 {
                    return 0.0;
                }
                0.5 * (0..n)
                    .map(|i| {
                        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                        a[0] * b[1] - a[1] * b[0]
                    })
                    .sum::<f64>()
                    .abs()
            }
        }
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            WindowPiece::Box { lo, hi } => (lo.clone(), hi.clone()),
            WindowPiece::Ball { center, radius } => {
                (center.iter().map(|c| c - radius).collect(), center.iter().map(|c| c + radius).collect())
            }
            WindowPiece::Polygon { vertices } => {
                let mut lo = vec![f64::INFINITY; 2];
                let mut hi = vec![f64::NEG_INFINITY; 2];
                for v in vertices {
                    for k in 0..2 {
                        lo[k] = lo[k].min(v[k]);
                        hi[k] = hi[k].max(v[k]);
                    }
                }
                (lo, hi)
            }
        }
    }

    /// Euclidean distance from `x` to the boundary of the piece.
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        match self {
            WindowPiece::Box { lo, hi } => {
                let inside = x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| *a <= *v && *v <= *b);
                if inside {
                    x.iter().zip(lo.iter().zip(hi)).map(|(v, (a, b))| (v - a).min(b - v)).fold(f64::INFINITY, f64::min)
                } else {
                    x.iter()
                        .zip(lo.iter().zip(hi))
                        .map(|(v, (a, b))| (a - v).max(v - b).max(0.0).powi(2))
                        .sum::<f64>()
                        .sqrt()
                }
            }
            WindowPiece::Ball { center, radius } => {
                let r = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                (r - radius).abs()
            }
            WindowPiece::Polygon { vertices } => {
                let p = [x[0], x[1]];
                (0..vertices.len())
                    .map(|i| segment_distance(p, vertices[i], vertices[(i + 1) % vertices.len()]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// A point of the interior (center of box or ball, vertex centroid of a polygon).
    pub fn interior_point(&self) -> Vec<f64> {
        match self {
            WindowPiece::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect(),
            WindowPiece::Ball { center, .. } => center.clone(),
            WindowPiece::Polygon { vertices } => {
                let k = vertices.len() as f64;
                vec![vertices.iter().map(|v| v[0]).sum::<f64>() / k, vertices.iter().map(|v| v[1]).sum::<f64>() / k]
            }
        }
    }

    pub fn translated(&self, v: &[f64]) -> WindowPiece {
        match self {
            WindowPiece::Box { lo, hi } => WindowPiece::Box {
                lo: lo.iter().zip(v).map(|(a, b)| a + b).collect(),
                hi: hi.iter().zip(v).map(|(a, b)| a + b).collect(),
            },
            WindowPiece::Ball { center, radius } => {
                WindowPiece::Ball { center: center.iter().zip(v).map(|(a, b)| a + b).collect(), radius: *radius }
            }
            WindowPiece::Polygon { vertices } => {
                WindowPiece::Polygon { vertices: vertices.iter().map(|p| [p[0] + v[0], p[1] + v[1]]).collect() }
            }
        }
    }

    fn is_well_formed(&self) -> bool {
        match self {
            WindowPiece::Box { lo, hi } => lo.len() == hi.len() && lo.iter().chain(hi).all(|x| x.is_finite()),
            WindowPiece::Ball { center, radius } => radius.is_finite() && center.iter().all(|x| x.is_finite()),
            WindowPiece::Polygon { vertices } => {
                if vertices.len() < 3 || vertices.iter().flatten().any(|x| !x.is_finite()) {
                    return false;
                }
                let v = Self::ccw(vertices);
                (0..v.len()).all(|i| cross(v[i], v[(i + 1) % v.len()], v[(i + 2) % v.len()]) >= 0.0)
            }
        }
    }
}

/// A window in ℝᵐ: a finite union of pieces assumed pairwise disjoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    m: usize,
    pieces: Vec<WindowPiece>,
}

impl Window {
    pub fn new(m: usize, pieces: Vec<WindowPiece>) -> crate::Result<Self> {
        if let Some(p) = pieces.iter().find(|p| p.dim() != m) {
            return Err(crate::Error::DimensionMismatch { expected: m, got: p.dim() });
        }
        if pieces.iter().any(|p| !p.is_well_formed()) {
            return Err(crate::Error::InvalidArgument(
                "malformed window piece (non-finite, or non-convex polygon)".into(),
            ));
        }
        Ok(Self { m, pieces })
    }

    pub fn empty(m: usize) -> Self {
        Self { m, pieces: Vec::new() }
    }

    pub fn cube(lo: f64, hi: f64, m: usize) -> Self {
        Self { m, pieces: vec![WindowPiece::Box { lo: vec![lo; m], hi: vec![hi; m] }] }
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        Self { m: lo.len(), pieces: vec![WindowPiece::Box { lo, hi }] }
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Self {
        Self { m: center.len(), pieces: vec![WindowPiece::Ball { center, radius }] }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn pieces(&self) -> &[WindowPiece] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
            || self.volume() == 0.0 && self.pieces.iter().all(|p| matches!(p, WindowPiece::Box { .. }))
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.pieces.iter().any(|p| p.contains(x))
    }

    pub fn volume(&self) -> f64 {
        self.pieces.iter().map(WindowPiece::volume).sum()
    }

    /// Bounding box of the union, `None` for the empty window.
    pub fn bounding_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let mut it = self.pieces.iter().map(WindowPiece::bounding_box);
        let (mut lo, mut hi) = it.next()?;
        for (l, h) in it {
            for k in 0..self.m {
                lo[k] = lo[k].min(l[k]);
                hi[k] = hi[k].max(h[k]);
            }
        }
        Some((lo, hi))
    }

    /// Distance to the union of the piece boundaries, which contains `∂W`.
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        self.pieces.iter().map(|p| p.boundary_distance(x)).fold(f64::INFINITY, f64::min)
    }

    /// Structural check of regularity: bounded, nonempty, every piece with
    /// positive volume (convex pieces have null boundary).
    pub fn is_regular(&self) -> bool {
        !self.pieces.is_empty() && self.pieces.iter().all(|p| p.is_well_formed() && p.volume() > 0.0)
    }

    pub fn translated(&self, v: &[f64]) -> Window {
        Window { m: self.m, pieces: self.pieces.iter().map(|p| p.translated(v)).collect() }
    }

    /// An interior point of the first piece of positive volume.
    pub fn interior_point(&self) -> Option<Vec<f64>> {
        self.pieces.iter().find(|p| p.volume() > 0.0).map(WindowPiece::interior_point)
    }

    /// Scales about the origin.
    pub fn scaled(&self, c: f64) -> Window {
        let pieces = self
            .pieces
            .iter()
            .map(|p| match p {
                WindowPiece::Box { lo, hi } => {
                    WindowPiece::Box { lo: lo.iter().map(|x| x * c).collect(), hi: hi.iter().map(|x| x * c).collect() }
                }
                WindowPiece::Ball { center, radius } => {
                    WindowPiece::Ball { center: center.iter().map(|x| x * c).collect(), radius: radius * c }
                }
                WindowPiece::Polygon { vertices } => {
                    WindowPiece::Polygon { vertices: vertices.iter().map(|v| [v[0] * c, v[1] * c]).collect() }
                }
            })
            .collect();
        Window { m: self.m, pieces }
    }

    /// True when every piece is a box (patch windows are then exact).
    pub fn is_box_union(&self) -> bool {
        self.pieces.iter().all(|p| matches!(p, WindowPiece::Box { .. }))
    }
}

impl Domain for Window {
    fn dim(&self) -> usize {
        self.m
    }

    fn contains(&self, x: &[f64]) -> bool {
        Window::contains(self, x)
    }

    fn bounding_ellipsoid(&self) -> Ellipsoid {
        let (lo, hi) = self.bounding_box().unwrap_or((vec![0.0; self.m], vec![0.0; self.m]));
        let root_m = (self.m as f64).sqrt();
        Ellipsoid {
            center: lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect(),
            semi_axes: lo.iter().zip(&hi).map(|(a, b)| 0.5 * (b - a) * root_m).collect(),
        }
    }

    fn volume(&self) -> Option<f64> {
        Some(Window::volume(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_polygon() -> WindowPiece {
        WindowPiece::Polygon { vertices: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]] }
    }

    #[test]
    fn polygon_matches_half_open_square() {
        let poly = square_polygon();
        let bx = WindowPiece::Box { lo: vec![0.0, 0.0], hi: vec![1.0, 1.0] };
        for &p in &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.5, 0.0], [0.0, 0.5], [1.0, 0.5], [0.5, 1.0], [0.5, 0.5]] {
            assert_eq!(poly.contains(&p), bx.contains(&p), "{p:?}");
        }
        assert!((poly.volume() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn clockwise_polygon_is_accepted() {
        let w =
            Window::new(2, vec![WindowPiece::Polygon { vertices: vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]] }]).unwrap();
        assert!(w.contains(&[0.2, 0.2]));
        assert!((w.volume() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn non_convex_polygon_rejected() {
        let v = vec![[0.0, 0.0], [2.0, 0.0], [1.0, 0.5], [2.0, 2.0], [0.0, 2.0]];
        assert!(Window::new(2, vec![WindowPiece::Polygon { vertices: v }]).is_err());
    }

    #[test]
    fn union_volume_and_bbox() {
        let w = Window::new(
            1,
            vec![WindowPiece::Box { lo: vec![0.0], hi: vec![1.0] }, WindowPiece::Box { lo: vec![2.0], hi: vec![2.5] }],
        )
        .unwrap();
        assert_eq!(w.volume(), 1.5);
        assert_eq!(w.bounding_box(), Some((vec![0.0], vec![2.5])));
        assert!(w.contains(&[2.2]) && !w.contains(&[1.5]));
    }

    #[test]
    fn boundary_distances() {
        let w = Window::cube(0.0, 1.0, 2);
        assert!((w.boundary_distance(&[0.5, 0.4]) - 0.4).abs() < 1e-15);
        assert!((w.boundary_distance(&[2.0, 2.0]) - 2f64.sqrt()).abs() < 1e-15);
        let b = Window::ball(vec![0.0, 0.0], 1.0);
        assert!((b.boundary_distance(&[0.0, 0.25]) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn regularity() {
        assert!(Window::cube(0.0, 1.0, 2).is_regular());
        assert!(!Window::empty(2).is_regular());
        assert!(!Window::cube(0.5, 0.5, 2).is_regular());
    }
}
