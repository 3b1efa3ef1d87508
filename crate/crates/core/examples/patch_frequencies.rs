//! Patch classes of the Fibonacci model set: observed frequencies in a large
//! ball against `vol(W_Δ)/covol`.
//!
//! Run with `cargo run --release --example patch_frequencies`.

use modelsets::counting::PatchAtlas;
use modelsets::cutproject::presets;
use modelsets::lattice::EnumerationOptions;

fn main() -> modelsets::Result<()> {
    let cp = presets::fibonacci();
    let opts = EnumerationOptions::default();
    for radius in [1.2, 3.0, 6.0] {
        let atlas = PatchAtlas::new(&cp, radius, &opts)?;
        let stats = atlas.tabulate(2000.0, &opts)?;
        println!("R = {radius}: {} classes, {} candidates", stats.classes.len(), atlas.candidates());
        for c in &stats.classes {
            println!(
                "  {:016x}  n={:<5} predicted {:.6}  empirical {:.6}  rel {:.2e}  size {}",
                c.key_hash(),
                c.multiplicity,
                c.predicted,
                c.empirical,
                c.rel_error(),
                c.key.len()
            );
        }
        println!("  sum of predicted {:.9} vs density {:.9}", stats.predicted_sum(), stats.density);
    }
    Ok(())
}
