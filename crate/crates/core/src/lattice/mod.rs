//! Grids in ℝⁿ (translated lattices), affine group actions and lattice-point
//! enumeration.

mod enumerate;
mod lll;
mod minima;
mod region;

pub use enumerate::{enumerate_points, enumerate_points_with, EnumerationOptions, GridPoint, DEFAULT_CAP};
pub use lll::{lll_reduce, LllOutput};
pub use minima::{alpha, successive_minima, Alpha, AlphaMethod, SuccessiveMinima};
pub use region::{unit_ball_volume, Domain, Ellipsoid, ProductDomain, Region};

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Absolute tolerance on the rounded residual when deciding whether a real
/// vector has integral coordinates in a basis.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Tolerance on `|det A - 1|` for affine maps acting on grids.
pub const UNIMODULAR_TOL: f64 = 1e-9;

/// A translate `basis · ℤⁿ + translation` of a full-rank lattice in ℝⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    basis: DMatrix<f64>,
    translation: DVector<f64>,
}

impl Grid {
    /// Builds a grid from basis columns and a translation vector.
    pub fn new(basis: DMatrix<f64>, translation: DVector<f64>) -> Result<Self> {
        if !basis.is_square() {
            return Err(Error::InvalidArgument(format!(
                "basis must be square, got {}x{}",
                basis.nrows(),
                basis.ncols()
            )));
        }
        if translation.len() != basis.nrows() {
            return Err(Error::DimensionMismatch { expected: basis.nrows(), got: translation.len() });
        }
        let grid = Self { basis, translation };
        covolume(&grid)?;
        Ok(grid)
    }

    /// A lattice (zero translation) with the given basis columns.
    pub fn lattice(basis: DMatrix<f64>) -> Result<Self> {
        let n = basis.nrows();
        Self::new(basis, DVector::zeros(n))
    }

    /// Builds a lattice from basis columns given as row-major nested vectors
    /// where each inner vector is one basis column.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let n = columns.len();
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidArgument("basis columns must all have length n".into()));
        }
        Self::lattice(DMatrix::from_fn(n, n, |i, j| columns[j][i]))
    }

    /// The standard lattice ℤⁿ.
    pub fn integer(n: usize) -> Self {
        Self { basis: DMatrix::identity(n, n), translation: DVector::zeros(n) }
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn translation(&self) -> &DVector<f64> {
        &self.translation
    }

    pub fn is_lattice(&self) -> bool {
        self.translation.iter().all(|&t| t == 0.0)
    }

    /// The underlying lattice `basis · ℤⁿ`.
    pub fn linear_part(&self) -> Grid {
        Grid { basis: self.basis.clone(), translation: DVector::zeros(self.dim()) }
    }

    /// Same lattice, translation replaced.
    pub fn with_translation(&self, translation: DVector<f64>) -> Result<Grid> {
        Grid::new(self.basis.clone(), translation)
    }

    /// Translates the grid by `v`.
    pub fn translated(&self, v: &DVector<f64>) -> Grid {
        Grid { basis: self.basis.clone(), translation: &self.translation + v }
    }

    /// Uniformly rescales the grid about the origin.
    pub fn scaled(&self, c: f64) -> Grid {
        Grid { basis: &self.basis * c, translation: &self.translation * c }
    }

    pub fn covolume(&self) -> f64 {
        self.basis.determinant().abs()
    }

    /// The grid point with integer coordinates `coords`.
    pub fn point(&self, coords: &[i64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.translation[i];
                for (j, &c) in coords.iter().enumerate() {
                    s += self.basis[(i, j)] * c as f64;
                }
                s
            })
            .collect()
    }

    /// The lattice vector `basis · coords` (no translation).
    pub fn lattice_vector(&self, coords: &[i64]) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|i| coords.iter().enumerate().map(|(j, &c)| self.basis[(i, j)] * c as f64).sum()).collect()
    }

    /// Integer coordinates of `p` if it is a grid point.
    pub fn coordinates(&self, p: &[f64]) -> Option<Vec<i64>> {
        if p.len() != self.dim() {
            return None;
        }
        let rhs = DVector::from_iterator(p.len(), p.iter().zip(self.translation.iter()).map(|(a, t)| a - t));
        let x = self.basis.clone().lu().solve(&rhs)?;
        let mut out = Vec::with_capacity(x.len());
        for v in x.iter() {
            let r = v.round();
            if (v - r).abs() > MEMBERSHIP_TOL {
                return None;
            }
            out.push(r as i64);
        }
        Some(out)
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.coordinates(p).is_some()
    }

    /// Applies `x ↦ A x + v`: the basis becomes `A·basis`, the translation
    /// `A·translation + v`.
    pub fn apply(&self, g: &AffineMap) -> Result<Grid> {
        apply_element(self, g)
    }
}

/// |det(basis)|, failing on numerically singular bases.
pub fn covolume(grid: &Grid) -> Result<f64> {
    let n = grid.dim();
    let det = grid.basis.determinant().abs();
    let scale = grid.basis.column_iter().map(|c| c.norm()).fold(0.0_f64, f64::max);
    let threshold = 1e-12 * scale.powi(n as i32);
    if !(det > threshold) || !det.is_finite() {
        return Err(Error::SingularBasis { det, threshold });
    }
    Ok(det)
}

/// An element `(A, v)` of ASLₙ(ℝ) acting by `x ↦ A x + v`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    linear: DMatrix<f64>,
    shift: DVector<f64>,
}

impl AffineMap {
    pub fn new(linear: DMatrix<f64>, shift: DVector<f64>) -> Result<Self> {
        if !linear.is_square() || linear.nrows() != shift.len() {
            return Err(Error::DimensionMismatch { expected: linear.nrows(), got: shift.len() });
        }
        let det = linear.determinant();
        if (det - 1.0).abs() >= UNIMODULAR_TOL {
            return Err(Error::NotUnimodular(det));
        }
        Ok(Self { linear, shift })
    }

    pub fn linear(linear: DMatrix<f64>) -> Result<Self> {
        let n = linear.nrows();
        Self::new(linear, DVector::zeros(n))
    }

    pub fn identity(n: usize) -> Self {
        Self { linear: DMatrix::identity(n, n), shift: DVector::zeros(n) }
    }

    pub fn translation(shift: DVector<f64>) -> Self {
        let n = shift.len();
        Self { linear: DMatrix::identity(n, n), shift }
    }

    /// Embeds `g ∈ SL_k` acting on the coordinates `indices` of ℝⁿ, identity elsewhere.
    pub fn embedded(g: &DMatrix<f64>, shift: &[f64], indices: &[usize], n: usize) -> Result<Self> {
        if g.nrows() != indices.len() || g.ncols() != indices.len() || shift.len() != indices.len() {
            return Err(Error::DimensionMismatch { expected: indices.len(), got: g.nrows() });
        }
        let mut linear = DMatrix::identity(n, n);
        let mut full_shift = DVector::zeros(n);
        for (a, &i) in indices.iter().enumerate() {
            full_shift[i] = shift[a];
            for (b, &j) in indices.iter().enumerate() {
                linear[(i, j)] = g[(a, b)];
            }
        }
        Self::new(linear, full_shift)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.linear
    }

    pub fn shift(&self) -> &DVector<f64> {
        &self.shift
    }

    pub fn dim(&self) -> usize {
        self.linear.nrows()
    }

    /// `self ∘ other`, i.e. first `other`, then `self`.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        AffineMap { linear: &self.linear * &other.linear, shift: &self.linear * &other.shift + &self.shift }
    }

    pub fn apply_point(&self, x: &[f64]) -> Vec<f64> {
        let v = &self.linear * DVector::from_column_slice(x) + &self.shift;
        v.iter().copied().collect()
    }
}

/// The affine action of ASLₙ(ℝ) on grids.
pub fn apply_element(grid: &Grid, g: &AffineMap) -> Result<Grid> {
    if g.dim() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), got: g.dim() });
    }
    let det = g.linear.determinant();
    if (det - 1.0).abs() >= UNIMODULAR_TOL {
        return Err(Error::NotUnimodular(det));
    }
    Ok(Grid { basis: &g.linear * &grid.basis, translation: &g.linear * &grid.translation + &g.shift })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2_minkowski() -> Grid {
        let s = 2f64.sqrt();
        Grid::from_columns(&[vec![1.0, 1.0], vec![s, -s]]).unwrap()
    }

    #[test]
    fn covolume_examples() {
        assert_eq!(covolume(&Grid::integer(4)).unwrap(), 1.0);
        let g = Grid::lattice(DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.5]))).unwrap();
        assert!((covolume(&g).unwrap() - 1.0).abs() < 1e-15);
        assert!((covolume(&sqrt2_minkowski()).unwrap() - 2.0 * 2f64.sqrt() * 1.0).abs() < 1e-12);
    }

    #[test]
    fn singular_basis_rejected() {
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(Grid::lattice(b), Err(Error::SingularBasis { .. })));
    }

    #[test]
    fn covolume_is_translation_invariant() {
        let g = sqrt2_minkowski();
        let t = g.translated(&DVector::from_vec(vec![0.3, -7.1]));
        assert_eq!(covolume(&g).unwrap(), covolume(&t).unwrap());
    }

    #[test]
    fn membership_uses_integer_coordinates() {
        let g = Grid::integer(2).translated(&DVector::from_vec(vec![0.5, 0.5]));
        assert_eq!(g.coordinates(&[1.5, -0.5]), Some(vec![1, -1]));
        assert!(!g.contains(&[1.0, 0.5]));
    }

    #[test]
    fn identity_action_is_trivial() {
        let g = sqrt2_minkowski();
        assert_eq!(apply_element(&g, &AffineMap::identity(2)).unwrap(), g);
    }

    #[test]
    fn diagonal_action() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.5]));
        let g = apply_element(&Grid::integer(2), &AffineMap::linear(a.clone()).unwrap()).unwrap();
        assert_eq!(g.basis(), &a);
        assert!((g.covolume() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_unimodular_rejected() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0]));
        assert!(matches!(AffineMap::linear(a), Err(Error::NotUnimodular(_))));
    }

    #[test]
    fn composition_matches_sequential_application() {
        let g1 =
            AffineMap::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.7, 0.0, 1.0]), DVector::from_vec(vec![0.1, 0.2]))
                .unwrap();
        let c = 0.3f64.cos();
        let s = 0.3f64.sin();
        let g2 =
            AffineMap::new(DMatrix::from_row_slice(2, 2, &[c, -s, s, c]), DVector::from_vec(vec![-1.0, 0.5])).unwrap();
        let base = sqrt2_minkowski();
        let seq = base.apply(&g1).unwrap().apply(&g2).unwrap();
        let once = base.apply(&g2.compose(&g1)).unwrap();
        for coords in [[0, 0], [1, 0], [3, -2], [-5, 4]] {
            let a = seq.point(&coords);
            let b = once.point(&coords);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
