use nalgebra::DMatrix;

use crate::lattice::Grid;
use crate::{Error, Result};

/// A coordinate-aligned splitting `ℝⁿ = V_phys ⊕ V_int`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scheme {
    phys: Vec<usize>,
    int: Vec<usize>,
}

impl Scheme {
    /// `phys` and `int` must be disjoint with union `0..n`.
    pub fn new(phys: Vec<usize>, int: Vec<usize>) -> Result<Self> {
        let n = phys.len() + int.len();
        let mut seen = vec![false; n];
        for &i in phys.iter().chain(&int) {
            if i >= n || seen[i] {
                return Err(Error::InvalidArgument(format!("coordinate index sets must partition 0..{n}")));
            }
            seen[i] = true;
        }
        if phys.is_empty() {
            return Err(Error::InvalidArgument("physical space must be nonzero".into()));
        }
        Ok(Self { phys, int })
    }

    /// The first `d` coordinates are physical, the remaining `m` internal.
    pub fn split(d: usize, m: usize) -> Self {
        Self { phys: (0..d).collect(), int: (d..d + m).collect() }
    }

    pub fn d(&self) -> usize {
        self.phys.len()
    }

    pub fn m(&self) -> usize {
        self.int.len()
    }

    pub fn n(&self) -> usize {
        self.phys.len() + self.int.len()
    }

    pub fn phys_coords(&self) -> &[usize] {
        &self.phys
    }

    pub fn int_coords(&self) -> &[usize] {
        &self.int
    }

    pub fn project_phys(&self, x: &[f64]) -> Vec<f64> {
        self.phys.iter().map(|&i| x[i]).collect()
    }

    pub fn project_int(&self, x: &[f64]) -> Vec<f64> {
        self.int.iter().map(|&i| x[i]).collect()
    }

    /// Rewrites `grid` for a splitting given by arbitrary complementary
    /// subspaces (columns of `phys_basis`, `int_basis`) into coordinates where
    /// this scheme's splitting is the coordinate one: the point `Σ aᵢpᵢ + Σ bⱼqⱼ`
    /// is sent to the vector with `a` in the physical and `b` in the internal slots.
    pub fn align_grid(&self, grid: &Grid, phys_basis: &DMatrix<f64>, int_basis: &DMatrix<f64>) -> Result<Grid> {
        let n = self.n();
        if grid.dim() != n || phys_basis.ncols() != self.d() || int_basis.ncols() != self.m() {
            return Err(Error::DimensionMismatch { expected: n, got: grid.dim() });
        }
        let mut frame = DMatrix::zeros(n, n);
        for (a, &i) in self.phys.iter().enumerate() {
            frame.set_column(i, &phys_basis.column(a));
        }
        for (b, &j) in self.int.iter().enumerate() {
            frame.set_column(j, &int_basis.column(b));
        }
        let inv =
            frame.try_inverse().ok_or_else(|| Error::InvalidArgument("subspaces are not complementary".into()))?;
        Grid::new(&inv * grid.basis(), &inv * grid.translation())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_overlapping_indices() {
        assert!(Scheme::new(vec![0, 1], vec![1, 2]).is_err());
        assert!(Scheme::new(vec![0], vec![2]).is_err());
        assert!(Scheme::new(vec![2, 0], vec![1]).is_ok());
    }

    #[test]
    fn projections() {
        let s = Scheme::new(vec![2], vec![0, 1]).unwrap();
        assert_eq!(s.project_phys(&[1.0, 2.0, 3.0]), vec![3.0]);
        assert_eq!(s.project_int(&[1.0, 2.0, 3.0]), vec![1.0, 2.0]);
    }

    #[test]
    fn align_grid_maps_subspaces_to_coordinates() {
        // phys spanned by (1, 1), internal by (1, -1)
        let s = Scheme::split(1, 1);
        let p = DMatrix::from_column_slice(2, 1, &[1.0, 1.0]);
        let q = DMatrix::from_column_slice(2, 1, &[1.0, -1.0]);
        let g = s.align_grid(&Grid::integer(2), &p, &q).unwrap();
        // e1 = ½(1,1) + ½(1,-1)
        let v = g.point(&[1, 0]);
        assert!((v[0] - 0.5).abs() < 1e-15 && (v[1] - 0.5).abs() < 1e-15);
    }
}
