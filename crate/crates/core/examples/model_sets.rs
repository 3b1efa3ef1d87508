//! Generates the Fibonacci, Ammann–Beenker and ℤ² control sets, compares the
//! observed density with `vol(W)/covol` and prints the irreducibility report.
//!
//! Run with `cargo run --release --example model_sets`.

use modelsets::cutproject::{check_irreducibility, presets, IrreducibilityOptions};
use modelsets::lattice::Region;

fn main() -> modelsets::Result<()> {
    for (name, cp, t) in [
        ("Fibonacci", presets::fibonacci(), 400.0),
        ("Ammann-Beenker", presets::ammann_beenker(), 100.0),
        ("Z^2 control", presets::integer_control(2), 100.0),
    ] {
        let d = cp.d();
        let first = cp.generate(&Region::ball(d, 2.5))?;
        let pts = first.phys_points();
        println!("{name}: {} points in B(0, 2.5), first {:?}", pts.len(), &pts[..pts.len().min(4)]);
        println!("  density {:.6}, observed in B(0,{t}) {:.6}", cp.density()?, cp.empirical_density(t)?);
        let report =
            check_irreducibility(cp.scheme(), cp.grid(), cp.window(), 30.0, &IrreducibilityOptions::default())?;
        for line in report.summary().lines() {
            println!("  {line}");
        }
    }
    Ok(())
}
