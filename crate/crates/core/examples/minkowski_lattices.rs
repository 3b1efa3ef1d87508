//! Minkowski embeddings of orders in number fields, their covolumes,
//! successive minima and the α-function.
//!
//! Run with `cargo run --release --example minkowski_lattices`.

use modelsets::lattice::{alpha, covolume, successive_minima, AlphaMethod};
use modelsets::numfield::{minkowski_lattice, NumberField, OrderBasis};

fn main() -> modelsets::Result<()> {
    for (label, poly, copies) in [
        ("Z[phi]", vec![-1, -1, 1], 1),
        ("Z[sqrt 2] twice", vec![-2, 0, 1], 2),
        ("Z[i]", vec![1, 0, 1], 1),
        ("x^3 - x - 1", vec![-1, -1, 0, 1], 1),
    ] {
        let field = NumberField::new(poly)?;
        let grid = minkowski_lattice(&OrderBasis::power_basis(field.clone()), copies, false)?;
        let minima = successive_minima(&grid)?;
        let unit = minkowski_lattice(&OrderBasis::power_basis(field), copies, true)?;
        println!("{label}: dimension {}, covolume {:.6}", grid.dim(), covolume(&grid)?);
        println!("  successive minima {:.6?}", minima.values);
        if unit.dim() <= 3 {
            let exact = alpha(&unit, AlphaMethod::Exact)?.value;
            let approx = alpha(&unit, AlphaMethod::Approx)?.value;
            println!("  normalized to covolume 1: alpha {exact:.6}, from minima {approx:.6}");
        }
    }
    Ok(())
}
