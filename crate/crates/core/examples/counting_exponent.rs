//! Discrepancy of Ammann–Beenker point counts in growing balls and the fitted
//! error exponent.
//!
//! Run with `cargo run --release --example counting_exponent`.

use modelsets::counting::{count_in_family, fit_error_exponent, OrderedFamily};
use modelsets::cutproject::presets;
use modelsets::lattice::EnumerationOptions;

fn main() -> modelsets::Result<()> {
    let cp = presets::ammann_beenker();
    let rows = count_in_family(
        &cp,
        &OrderedFamily::Balls { d: 2 },
        &[25.0, 50.0, 100.0, 200.0],
        &EnumerationOptions::default(),
    )?;
    println!("{:>6} {:>12} {:>8} {:>10}", "T", "vol", "count", "error");
    for r in &rows {
        println!("{:>6} {:>12.2} {:>8} {:>10.3}", r.t, r.vol, r.count, r.error);
    }
    let fit = fit_error_exponent(&rows)?;
    println!("exponent {:.3} ± {:.3} over {} points", fit.slope, fit.stderr, fit.points);
    Ok(())
}
