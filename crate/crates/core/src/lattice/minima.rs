//! Successive minima and the α-function `max covol(L')⁻¹` over nonzero
//! subgroups `L' ⊂ L`.

use super::enumerate::{enumerate_points_with, EnumerationOptions};
use super::lll::lll_reduce;
use super::region::Region;
use super::Grid;
use crate::{Error, Result};

/// Largest dimension for which successive minima are computed exactly.
pub const MINIMA_MAX_DIM: usize = 8;
/// Largest dimension for which α is maximised over sublattices directly.
pub const ALPHA_EXACT_MAX_DIM: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct SuccessiveMinima {
    /// λ₁ ≤ … ≤ λₙ.
    pub values: Vec<f64>,
    /// Integer coordinates of linearly independent vectors realising them.
    pub vectors: Vec<Vec<i64>>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Short nonzero lattice vectors of norm at most `radius`, ordered by norm;
/// only one of each `±v` pair is kept.
/// Norm, integer coordinates and the vector itself.
type ShortVector = (f64, Vec<i64>, Vec<f64>);

fn short_vectors(lattice: &Grid, radius: f64) -> Result<Vec<ShortVector>> {
    let pts = enumerate_points_with(
        lattice,
        &Region::ball(lattice.dim(), radius),
        &EnumerationOptions { cap: 50_000_000, parallel: true },
    )?;
    let mut out: Vec<_> = pts
        .into_iter()
        .filter(|p| {
            // keep v if its first nonzero coordinate is positive
            matches!(p.coords.iter().find(|&&c| c != 0), Some(&c) if c > 0)
        })
        .map(|p| (norm(&p.point), p.coords, p.point))
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    Ok(out)
}

/// Exact Minkowski successive minima for the Euclidean norm.
///
/// All vectors no longer than the longest LLL-reduced basis vector are listed;
/// scanning them by increasing norm and keeping each one that is independent of
/// those already kept yields the minima.
pub fn successive_minima(grid: &Grid) -> Result<SuccessiveMinima> {
    let n = grid.dim();
    if n > MINIMA_MAX_DIM {
        return Err(Error::DimensionTooLarge { n, limit: MINIMA_MAX_DIM });
    }
    let lattice = grid.linear_part();
    let reduced = lll_reduce(lattice.basis(), 0.99).reduced;
    let bound = reduced.column_iter().map(|c| c.norm()).fold(0.0_f64, f64::max);
    let candidates = short_vectors(&lattice, bound * (1.0 + 1e-9))?;

    let mut kept: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut out = SuccessiveMinima { values: Vec::with_capacity(n), vectors: Vec::with_capacity(n) };
    for (len, coords, v) in candidates {
        let mut r = v.clone();
        for q in &kept {
            let c: f64 = r.iter().zip(q).map(|(a, b)| a * b).sum();
            for (a, b) in r.iter_mut().zip(q) {
                *a -= c * b;
            }
        }
        let rn = norm(&r);
        if rn > 1e-9 * len.max(1.0) {
            kept.push(r.iter().map(|x| x / rn).collect());
            out.values.push(len);
            out.vectors.push(coords);
            if kept.len() == n {
                break;
            }
        }
    }
    if out.values.len() != n {
        return Err(Error::SingularBasis { det: 0.0, threshold: 0.0 });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaMethod {
    /// Maximum of `covol(L')⁻¹` over sublattices found by enumeration.
    Exact,
    /// `(λ₁ ⋯ λ_{i₀})⁻¹` with `i₀` the last index where `λ_{i₀} ≤ 1`.
    Approx,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alpha {
    pub value: f64,
    pub method: AlphaMethod,
}

/// The α-function of a lattice.
pub fn alpha(grid: &Grid, method: AlphaMethod) -> Result<Alpha> {
    let n = grid.dim();
    match method {
        AlphaMethod::Approx => {
            let m = successive_minima(grid)?;
            let mut value = 1.0;
            let mut prod = 1.0;
            for &l in &m.values {
                prod *= l;
                if l <= 1.0 {
                    value = 1.0 / prod;
                }
            }
            Ok(Alpha { value, method })
        }
        AlphaMethod::Exact => {
            if n > ALPHA_EXACT_MAX_DIM {
                return Err(Error::DimensionTooLarge { n, limit: ALPHA_EXACT_MAX_DIM });
            }
            let lattice = grid.linear_part();
            let m = successive_minima(&lattice)?;
            // rank 1: the shortest vector; rank n: the lattice itself
            let mut best_covol = m.values[0].min(lattice.covolume());
            if n == 3 {
                best_covol = best_covol.min(min_rank_two_covolume(&lattice, &m.values)?);
            }
            Ok(Alpha { value: 1.0 / best_covol, method })
        }
    }
}

fn cross<T>(a: &[T], b: &[T]) -> [T; 3]
where
    T: Copy + std::ops::Mul<Output = T> + std::ops::Sub<Output = T>,
{
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Smallest covolume of a rank-2 sublattice of a rank-3 lattice.
///
/// The optimum has a Gauss-reduced basis `(a, b)` with `|a| ≥ λ₁` and
/// `covol ≥ (√3/2)|a||b|`; since the span of the first two minima gives
/// `covol ≤ λ₁λ₂`, it suffices to search `|b| ≤ (2/√3)·λ₂`.
fn min_rank_two_covolume(lattice: &Grid, minima: &[f64]) -> Result<f64> {
    let radius = 2.0 / 3f64.sqrt() * minima[1] * (1.0 + 1e-9);
    let vs = short_vectors(lattice, radius)?;
    let mut best = f64::INFINITY;
    for (i, (_, ca, a)) in vs.iter().enumerate() {
        for (_, cb, b) in &vs[i + 1..] {
            // dependence is decided on integer coordinates, the area by |a × b|
            if cross(ca, cb).iter().all(|&c| c == 0) {
                continue;
            }
            let c = cross(a, b).iter().map(|v| v * v).sum::<f64>().sqrt();
            best = best.min(c);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn diag(v: &[f64]) -> Grid {
        Grid::lattice(DMatrix::from_diagonal(&DVector::from_column_slice(v))).unwrap()
    }

    #[test]
    fn integer_lattice_minima() {
        for n in 1..=5 {
            let m = successive_minima(&Grid::integer(n)).unwrap();
            assert!(m.values.iter().all(|&l| (l - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn diagonal_minima() {
        let m = successive_minima(&diag(&[0.5, 2.0])).unwrap();
        assert!((m.values[0] - 0.5).abs() < 1e-12);
        assert!((m.values[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn too_many_dimensions() {
        assert!(matches!(successive_minima(&Grid::integer(9)), Err(Error::DimensionTooLarge { n: 9, .. })));
        assert!(matches!(alpha(&Grid::integer(4), AlphaMethod::Exact), Err(Error::DimensionTooLarge { n: 4, .. })));
    }

    #[test]
    fn alpha_examples() {
        for n in 1..=3 {
            assert!((alpha(&Grid::integer(n), AlphaMethod::Exact).unwrap().value - 1.0).abs() < 1e-12);
            assert!((alpha(&Grid::integer(n), AlphaMethod::Approx).unwrap().value - 1.0).abs() < 1e-12);
        }
        let a = alpha(&diag(&[0.1, 10.0]), AlphaMethod::Exact).unwrap();
        assert!((a.value - 10.0).abs() < 1e-9);
        let a = alpha(&diag(&[2.0, 0.5]), AlphaMethod::Exact).unwrap();
        assert!((a.value - 2.0).abs() < 1e-12);
        let a = alpha(&diag(&[2.0, 0.5]), AlphaMethod::Approx).unwrap();
        assert_eq!(a.method, AlphaMethod::Approx);
        assert!((a.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn alpha_sees_short_planes() {
        // the plane spanned by the two short axes has covolume 0.25
        let a = alpha(&diag(&[0.5, 0.5, 4.0]), AlphaMethod::Exact).unwrap();
        assert!((a.value - 4.0).abs() < 1e-9);
    }

    #[test]
    fn rank_two_covolume_ignores_parallel_pairs() {
        // a rotated orthogonal lattice: multiples of short vectors must not
        // register as tiny rank-2 sublattices through rounding
        let (s, c) = 0.7f64.sin_cos();
        let rot = DMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s * 0.6, c * 0.6, -0.8, s * 0.8, c * 0.8, 0.6]);
        let grid =
            Grid::lattice(rot * DMatrix::from_diagonal(&DVector::from_column_slice(&[0.3, 1.8, 1.0 / 0.54]))).unwrap();
        let m = successive_minima(&grid).unwrap();
        let covol = min_rank_two_covolume(&grid, &m.values).unwrap();
        assert!((covol - 0.54).abs() < 1e-9, "{covol}");
        assert!((alpha(&grid, AlphaMethod::Exact).unwrap().value - 1.0 / 0.3).abs() < 1e-9);
    }
}
