//! Uniform cell grid over points in ℝᵈ for fixed-radius neighbour queries.

use std::collections::HashMap;

#[derive(Debug, Clone)]
pub struct CellIndex {
    cell: f64,
    dim: usize,
    points: Vec<Vec<f64>>,
    cells: HashMap<Vec<i64>, Vec<usize>>,
}

impl CellIndex {
    /// `cell` is the side of the grid cells; queries with radius much larger
    /// than `cell` scan proportionally more cells.
    pub fn new(points: Vec<Vec<f64>>, cell: f64) -> Self {
        let dim = points.first().map_or(0, Vec::len);
        let cell = if cell.is_finite() && cell > 0.0 { cell } else { 1.0 };
        let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            cells.entry(Self::key_for(p, cell)).or_default().push(i);
        }
        Self { cell, dim, points, cells }
    }

    /// Chooses the cell side from the mean spacing of the points inside `radius`.
    pub fn with_radius_hint(points: Vec<Vec<f64>>, radius: f64) -> Self {
        let d = points.first().map_or(1, Vec::len).max(1);
        let n = points.len().max(1) as f64;
        let spacing = (2.0 * radius).max(1e-12) / n.powf(1.0 / d as f64);
        Self::new(points, spacing)
    }

    fn key_for(p: &[f64], cell: f64) -> Vec<i64> {
        p.iter().map(|x| (x / cell).floor() as i64).collect()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn visit(&self, x: &[f64], r: f64, mut f: impl FnMut(usize, f64) -> bool) {
        if self.points.is_empty() {
            return;
        }
        let lo: Vec<i64> = x.iter().map(|v| ((v - r) / self.cell).floor() as i64).collect();
        let hi: Vec<i64> = x.iter().map(|v| ((v + r) / self.cell).floor() as i64).collect();
        let span: u128 = lo.iter().zip(&hi).map(|(a, b)| (b - a + 1) as u128).product();
        let r2 = r * r;
        let mut check = |i: usize| {
            let d2: f64 = self.points[i].iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            if d2 <= r2 {
                f(i, d2)
            } else {
                true
            }
        };
        if span > self.cells.len() as u128 {
            for bucket in self.cells.values() {
                for &i in bucket {
                    if !check(i) {
                        return;
                    }
                }
            }
            return;
        }
        let mut key = lo.clone();
        loop {
            if let Some(bucket) = self.cells.get(&key) {
                for &i in bucket {
                    if !check(i) {
                        return;
                    }
                }
            }
            let mut a = 0;
            loop {
                if a == self.dim {
                    return;
                }
                key[a] += 1;
                if key[a] <= hi[a] {
                    break;
                }
                key[a] = lo[a];
                a += 1;
            }
        }
    }

    /// Is some indexed point within closed distance `r` of `x`?
    pub fn any_within(&self, x: &[f64], r: f64) -> bool {
        let mut found = false;
        self.visit(x, r, |_, _| {
            found = true;
            false
        });
        found
    }

    /// Indices of all points within closed distance `r` of `x`, sorted.
    pub fn within(&self, x: &[f64], r: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.visit(x, r, |i, _| {
            out.push(i);
            true
        });
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_brute_force() {
        let pts: Vec<Vec<f64>> = (0..200)
            .map(|i| {
                let t = i as f64;
                vec![(t * 0.618_033_988).fract() * 10.0, (t * 0.414_213_562).fract() * 10.0]
            })
            .collect();
        let idx = CellIndex::new(pts.clone(), 0.7);
        for q in [[5.0, 5.0], [0.1, 9.9], [12.0, -1.0]] {
            for r in [0.05, 0.5, 2.0, 30.0] {
                let brute: Vec<usize> = (0..pts.len())
                    .filter(|&i| (pts[i][0] - q[0]).powi(2) + (pts[i][1] - q[1]).powi(2) <= r * r)
                    .collect();
                assert_eq!(idx.within(&q, r), brute);
                assert_eq!(idx.any_within(&q, r), !brute.is_empty());
            }
        }
    }

    #[test]
    fn empty_index() {
        let idx = CellIndex::new(Vec::new(), 1.0);
        assert!(!idx.any_within(&[0.0], 10.0));
    }
}
