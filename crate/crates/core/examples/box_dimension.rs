//! Box-counting dimension of window boundaries and of the Koch curve, with the
//! patch-counting exponents implied by each.
//!
//! Run with `cargo run --release --example box_dimension`.

use modelsets::counting::{box_dimension, koch_curve, patch_exponents, Boundary};
use modelsets::cutproject::Window;

fn main() -> modelsets::Result<()> {
    let dyadic: Vec<f64> = (3..=8).map(|j| 0.5f64.powi(j)).collect();
    let triadic = [1.0 / 3.0, 1.0 / 9.0, 1.0 / 27.0, 1.0 / 81.0, 1.0 / 243.0];
    let cases = [
        ("unit square", Boundary::of_window(&Window::cube(0.0, 1.0, 2))?, &dyadic[..]),
        ("disc", Boundary::of_window(&Window::ball(vec![0.5, 0.5], 0.4))?, &dyadic[..]),
        ("Koch curve", Boundary::Polyline { vertices: koch_curve(7), closed: false }, &triadic[..]),
    ];
    for (name, boundary, scales) in cases {
        let fit = box_dimension(&boundary, scales)?;
        let counts: Vec<usize> = fit.counts.iter().map(|c| c.2).collect();
        let (lambda, theta) = patch_exponents(2, 2.0 - fit.slope)?;
        println!("{name}: dimension {:.4} ± {:.4}, counts {counts:?}", fit.slope, fit.stderr);
        println!("  exponents for a planar window with this boundary: ({lambda:.4}, {theta:.4})");
    }
    Ok(())
}
