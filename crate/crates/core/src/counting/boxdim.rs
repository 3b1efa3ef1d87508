//! Box-counting dimension of window boundaries from the number of cubes of the
//! grid `(1/K)ℤᵐ` that meet the boundary, `K = ⌊1/r⌋`.

use std::collections::HashSet;

use crate::cutproject::{Window, WindowPiece};
use crate::{Error, Result};

use super::least_squares;

const CIRCLE_VERTICES: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub enum Boundary {
    Points(Vec<Vec<f64>>),
    Polyline {
        vertices: Vec<Vec<f64>>,
        closed: bool,
    },
    /// The surface of the box `[lo, hi]`.
    BoxSurface {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    Union(Vec<Boundary>),
}

type Cell = Vec<i64>;

fn cell_of(x: &[f64], k: f64) -> Cell {
    x.iter().map(|v| (v * k).floor() as i64).collect()
}

/// Cells crossed by the segment `a → b` (grid walk in scaled coordinates).
fn walk_segment(a: &[f64], b: &[f64], k: f64, cells: &mut HashSet<Cell>) {
    let m = a.len();
    let pa: Vec<f64> = a.iter().map(|v| v * k).collect();
    let pb: Vec<f64> = b.iter().map(|v| v * k).collect();
    let mut cell: Vec<i64> = pa.iter().map(|v| v.floor() as i64).collect();
    let last: Vec<i64> = pb.iter().map(|v| v.floor() as i64).collect();
    let mut step = vec![0i64; m];
    let mut t_max = vec![f64::INFINITY; m];
    let mut t_delta = vec![f64::INFINITY; m];
    for i in 0..m {
        let d = pb[i] - pa[i];
        if d > 0.0 {
            step[i] = 1;
            t_max[i] = ((cell[i] + 1) as f64 - pa[i]) / d;
            t_delta[i] = 1.0 / d;
        } else if d < 0.0 {
            step[i] = -1;
            t_max[i] = (pa[i] - cell[i] as f64) / -d;
            t_delta[i] = -1.0 / d;
        }
    }
    cells.insert(cell.clone());
    let budget: i64 = cell.iter().zip(&last).map(|(c, l)| (c - l).abs()).sum::<i64>() + 1;
    for _ in 0..budget {
        if cell == last {
            break;
        }
        let (axis, &t) = t_max.iter().enumerate().min_by(|x, y| x.1.total_cmp(y.1)).expect("m ≥ 1");
        if t > 1.0 {
            break;
        }
        cell[axis] += step[axis];
        t_max[axis] += t_delta[axis];
        cells.insert(cell.clone());
    }
    cells.insert(last);
}

fn box_surface(lo: &[f64], hi: &[f64], k: f64, cells: &mut HashSet<Cell>) {
    let m = lo.len();
    let clo = cell_of(lo, k);
    let chi = cell_of(hi, k);
    for axis in 0..m {
        for face in [clo[axis], chi[axis]] {
            let mut c = clo.clone();
            c[axis] = face;
            loop {
                cells.insert(c.clone());
                let mut j = 0;
                loop {
                    if j == m {
                        break;
                    }
                    if j == axis {
                        j += 1;
                        continue;
                    }
                    c[j] += 1;
                    if c[j] <= chi[j] {
                        break;
                    }
                    c[j] = clo[j];
                    j += 1;
                }
                if j == m {
                    break;
                }
            }
        }
    }
}

impl Boundary {
    /// `∂W` for windows in dimension 1 (endpoints), boxes in any dimension and
    /// convex polygons or discs in the plane.
    pub fn of_window(window: &Window) -> Result<Boundary> {
        let parts = window
            .pieces()
            .iter()
            .map(|p| match p {
                WindowPiece::Box { lo, hi } if lo.len() == 1 => Ok(Boundary::Points(vec![lo.clone(), hi.clone()])),
                WindowPiece::Box { lo, hi } => Ok(Boundary::BoxSurface { lo: lo.clone(), hi: hi.clone() }),
                WindowPiece::Polygon { vertices } => {
                    Ok(Boundary::Polyline { vertices: vertices.iter().map(|v| v.to_vec()).collect(), closed: true })
                }
                WindowPiece::Ball { center, radius } if center.len() == 1 => {
                    Ok(Boundary::Points(vec![vec![center[0] - radius], vec![center[0] + radius]]))
                }
                WindowPiece::Ball { center, radius } if center.len() == 2 => Ok(Boundary::Polyline {
                    vertices: (0..CIRCLE_VERTICES)
                        .map(|i| {
                            let a = std::f64::consts::TAU * i as f64 / CIRCLE_VERTICES as f64;
                            vec![center[0] + radius * a.cos(), center[1] + radius * a.sin()]
                        })
                        .collect(),
                    closed: true,
                }),
                WindowPiece::Ball { .. } => {
                    Err(Error::InvalidArgument("ball boundaries are supported in dimensions 1 and 2 only".into()))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Boundary::Union(parts))
    }

    fn collect(&self, k: f64, cells: &mut HashSet<Cell>) {
        match self {
            Boundary::Points(ps) => cells.extend(ps.iter().map(|p| cell_of(p, k))),
            Boundary::Polyline { vertices, closed } => {
                for w in vertices.windows(2) {
                    walk_segment(&w[0], &w[1], k, cells);
                }
                if *closed && vertices.len() > 2 {
                    walk_segment(&vertices[vertices.len() - 1], &vertices[0], k, cells);
                }
                if vertices.len() == 1 {
                    cells.insert(cell_of(&vertices[0], k));
                }
            }
            Boundary::BoxSurface { lo, hi } => box_surface(lo, hi, k, cells),
            Boundary::Union(parts) => parts.iter().for_each(|p| p.collect(k, cells)),
        }
    }

    /// Number of cubes of side `1/K` meeting the boundary.
    pub fn cube_count(&self, k: u64) -> usize {
        let mut cells = HashSet::new();
        self.collect(k as f64, &mut cells);
        cells.len()
    }
}

/// The Koch curve from `(0,0)` to `(1,0)` after `iterations` subdivisions;
/// `4^iterations` segments of length `3^−iterations`.
pub fn koch_curve(iterations: u32) -> Vec<Vec<f64>> {
    let mut pts: Vec<[f64; 2]> = vec![[0.0, 0.0], [1.0, 0.0]];
    let (s, c) = (std::f64::consts::PI / 3.0).sin_cos();
    for _ in 0..iterations {
        let mut next = Vec::with_capacity(pts.len() * 4);
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let d = [(b[0] - a[0]) / 3.0, (b[1] - a[1]) / 3.0];
            let p1 = [a[0] + d[0], a[1] + d[1]];
            let p3 = [a[0] + 2.0 * d[0], a[1] + 2.0 * d[1]];
            let p2 = [p1[0] + c * d[0] - s * d[1], p1[1] + s * d[0] + c * d[1]];
            next.extend([a, p1, p2, p3]);
        }
        next.push(*pts.last().expect("nonempty"));
        pts = next;
    }
    pts.into_iter().map(|p| p.to_vec()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionFit {
    pub slope: f64,
    pub stderr: f64,
    /// `(r, K, N)` per scale.
    pub counts: Vec<(f64, u64, usize)>,
}

/// Least-squares slope of `log N` against `−log r` over strictly decreasing scales.
pub fn box_dimension(boundary: &Boundary, r_list: &[f64]) -> Result<DimensionFit> {
    if r_list.len() < 4 {
        return Err(Error::DegenerateFit(format!("{} scales, need at least 4", r_list.len())));
    }
    if r_list.windows(2).any(|w| !(w[0] > w[1])) || !(r_list[r_list.len() - 1] > 0.0) || r_list[0] > 1.0 {
        return Err(Error::DegenerateFit("scales must be strictly decreasing within (0, 1]".into()));
    }
    let counts: Vec<(f64, u64, usize)> = r_list
        .iter()
        .map(|&r| {
            let k = (1.0 / r).floor() as u64;
            (r, k, boundary.cube_count(k))
        })
        .collect();
    let xs: Vec<f64> = counts.iter().map(|c| -c.0.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|c| (c.2 as f64).ln()).collect();
    let (slope, _, stderr) = least_squares(&xs, &ys)?;
    Ok(DimensionFit { slope, stderr, counts })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dyadic(from: i32, to: i32) -> Vec<f64> {
        (from..=to).map(|j| 0.5f64.powi(j)).collect()
    }

    #[test]
    fn segment_walk_matches_sampling() {
        let a = [0.13, 0.71];
        let b = [0.92, 0.05];
        let k = 37.0;
        let mut walked = HashSet::new();
        walk_segment(&a, &b, k, &mut walked);
        let mut sampled = HashSet::new();
        for i in 0..=200_000 {
            let t = i as f64 / 200_000.0;
            sampled.insert(cell_of(&[a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])], k));
        }
        assert!(sampled.is_subset(&walked));
        assert!(walked.len() <= sampled.len() + 2);
    }

    #[test]
    fn square_and_interval() {
        let sq = Boundary::of_window(&Window::cube(0.0, 1.0, 2)).unwrap();
        assert_eq!(sq.cube_count(8), 4 * 9 - 4);
        let fit = box_dimension(&sq, &dyadic(3, 7)).unwrap();
        assert!((fit.slope - 1.0).abs() < 0.1, "{fit:?}");
        let iv = Boundary::of_window(&Window::cube(0.0, 1.0, 1)).unwrap();
        assert!(box_dimension(&iv, &dyadic(3, 7)).unwrap().slope.abs() < 0.1);
        let cube = Boundary::of_window(&Window::cube(0.0, 1.0, 3)).unwrap();
        assert!((box_dimension(&cube, &dyadic(2, 5)).unwrap().slope - 2.0).abs() < 0.15);
    }

    #[test]
    fn polygon_boundary() {
        let w =
            Window::new(2, vec![WindowPiece::Polygon { vertices: vec![[0.0, 0.0], [1.0, 0.2], [0.3, 0.9]] }]).unwrap();
        let fit = box_dimension(&Boundary::of_window(&w).unwrap(), &dyadic(3, 7)).unwrap();
        assert!((fit.slope - 1.0).abs() < 0.1, "{fit:?}");
    }

    #[test]
    fn koch_curve_shape() {
        let k = koch_curve(4);
        assert_eq!(k.len(), 4usize.pow(4) + 1);
        let seg = ((k[1][0] - k[0][0]).powi(2) + (k[1][1] - k[0][1]).powi(2)).sqrt();
        assert!((seg - 1.0 / 81.0).abs() < 1e-12);
        let fit = box_dimension(
            &Boundary::Polyline { vertices: k, closed: false },
            &[1.0 / 3.0, 1.0 / 9.0, 1.0 / 27.0, 1.0 / 81.0],
        )
        .unwrap();
        assert!((fit.slope - 4f64.ln() / 3f64.ln()).abs() < 0.1, "{fit:?}");
    }

    #[test]
    fn too_few_scales() {
        let sq = Boundary::of_window(&Window::cube(0.0, 1.0, 2)).unwrap();
        assert!(matches!(box_dimension(&sq, &dyadic(3, 5)), Err(Error::DegenerateFit(_))));
    }
}
