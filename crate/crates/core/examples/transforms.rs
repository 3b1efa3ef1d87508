//! The Siegel–Veech transform of a test function on a model set agrees with
//! the transform of its lift on the grid, and its running horospherical
//! average approaches the Siegel mean.
//!
//! Run with `cargo run --release --example transforms`.

use modelsets::chabauty::PhysicalMap;
use modelsets::cutproject::presets;
use modelsets::lattice::EnumerationOptions;
use modelsets::montecarlo::birkhoff_average;
use modelsets::transforms::{grid_transform, lift, model_set_transform, Mode, TestFunction};

fn main() -> modelsets::Result<()> {
    let cp = presets::ammann_beenker();
    let opts = EnumerationOptions::default();
    for f in [TestFunction::ball(2, 10.0), TestFunction::tent(2, 10.0)] {
        for mode in [Mode::Affine, Mode::Linear] {
            let on_set = model_set_transform(&f, &cp, mode, &opts)?;
            let on_grid = grid_transform(&lift(&f, cp.window(), cp.scheme())?, cp.grid(), mode)?;
            println!("{f:?} {mode:?}: model set {on_set:.6}, grid {on_grid:.6}");
        }
    }

    // the axes of the unrotated set carry one-dimensional model sets, which
    // the diagonal flow compresses; a rotated copy avoids that cusp excursion
    let rotated = cp.apply(&PhysicalMap::rotation(0.3).embed(&cp)?)?;
    let f = TestFunction::ball(2, 10.0);
    let t_grid: Vec<f64> = (1..=400).map(|i| i as f64 * 0.05).collect();
    let running = birkhoff_average(&f, &rotated, &t_grid, Mode::Linear, &opts)?;
    println!("running averages of the linear transform along the diagonal flow:");
    for (t, a) in t_grid.iter().zip(&running).step_by(50) {
        println!("  t={t:>6.2}  {a:.3}");
    }
    println!("density × ∫f = {:.3}", cp.density()? * f.integral());
    Ok(())
}
