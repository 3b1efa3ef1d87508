//! Chabauty–Fell distances from a model set to its images under rotations and
//! translations that shrink to the identity.
//!
//! Run with `cargo run --release --example chabauty_continuity`.

use modelsets::chabauty::{continuity_probe, PhysicalMap};
use modelsets::cutproject::presets;

fn main() -> modelsets::Result<()> {
    let fib = presets::fibonacci().with_centered_window()?;
    let shifts: Vec<PhysicalMap> = (4..9).map(|k| PhysicalMap::translation(vec![0.5f64.powi(k)])).collect();
    let ds = continuity_probe(&fib, &shifts, 2000.0, 1e-4)?;
    println!("Fibonacci, translation by 2^-k:");
    for (k, d) in (4..9).zip(ds) {
        println!("  k={k}  d={d:.6}  2^-k={:.6}", 0.5f64.powi(k));
    }

    let ab = presets::ammann_beenker().with_centered_window()?;
    let rotations: Vec<PhysicalMap> = (2..9).map(|k| PhysicalMap::rotation(0.5f64.powi(k))).collect();
    let ds = continuity_probe(&ab, &rotations, 101.0, 0.01)?;
    println!("Ammann-Beenker, rotation by 2^-k rad:");
    for (k, d) in (2..9).zip(ds) {
        println!("  k={k}  d={d:.4}");
    }
    Ok(())
}
