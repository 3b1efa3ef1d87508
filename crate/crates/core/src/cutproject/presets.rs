//! The shipped example schemes.

use crate::lattice::Grid;
use crate::numfield::{minkowski_lattice, NumberField, OrderBasis};

use super::{CutProject, Scheme, Window};

/// ℤ[φ] embedded in ℝ² (physical: `a + bφ`, internal: `a + bφ'`), window `[0, 1)`.
/// Density `1/√5`.
pub fn fibonacci() -> CutProject {
    let order = OrderBasis::power_basis(NumberField::golden());
    let grid = minkowski_lattice(&order, 1, false).expect("golden Minkowski lattice");
    CutProject::new(Scheme::split(1, 1), grid, Window::cube(0.0, 1.0, 1)).expect("consistent dimensions")
}

/// Two copies of ℤ[√2] embedded in ℝ⁴ (physical: the identity embedding,
/// internal: the conjugate), window `[0, 1)²`. Density `1/8`.
pub fn ammann_beenker() -> CutProject {
    let order = OrderBasis::power_basis(NumberField::real_quadratic(2).expect("x^2 - 2"));
    let grid = minkowski_lattice(&order, 2, false).expect("sqrt2 Minkowski lattice");
    CutProject::new(Scheme::split(2, 2), grid, Window::cube(0.0, 1.0, 2)).expect("consistent dimensions")
}

/// The degenerate control `Λ = ℤᵈ`: grid ℤ^{d+1}, one internal coordinate,
/// window `[0, 1)`. Reducible by construction.
pub fn integer_control(d: usize) -> CutProject {
    CutProject::new(Scheme::split(d, 1), Grid::integer(d + 1), Window::cube(0.0, 1.0, 1))
        .expect("consistent dimensions")
}
