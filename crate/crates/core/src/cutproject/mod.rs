//! The cut-and-project construction `Λ(ℒ, W) = π_phys(ℒ ∩ π_int⁻¹(W))`.

mod irreducible;
mod modelset;
pub mod presets;
mod scheme;
mod window;

pub use irreducible::{check_irreducibility, DensityWitness, IrreducibilityOptions, IrreducibilityReport, Verdict};
pub use modelset::{density, CutProject, ModelPoint, ModelSet};
pub use scheme::Scheme;
pub use window::{Window, WindowPiece};
