//! Monte-Carlo check of the Siegel summation formula on the affine
//! Ammann–Beenker measure, followed by the second-moment table.
//!
//! Run with `cargo run --release --example siegel_mean`.

use std::time::Instant;

use modelsets::cutproject::presets;
use modelsets::lattice::EnumerationOptions;
use modelsets::montecarlo::{estimate_mean_sv, estimate_second_moment, SamplerSpec};
use modelsets::transforms::{Mode, TestFunction};

fn main() -> modelsets::Result<()> {
    let cp = presets::ammann_beenker();
    let opts = EnumerationOptions::default();
    let spec = SamplerSpec::new(2, 8.0, 400, 42).with_torus(true);

    let start = Instant::now();
    let f = TestFunction::ball(2, 10.0);
    let m = estimate_mean_sv(&f, &cp, &spec, Mode::Affine, &opts)?;
    println!(
        "mean {:.4} ± {:.4}  reference {:.4}  z {:+.3}  ({:.1?})",
        m.estimate.mean,
        m.estimate.stderr,
        m.reference,
        m.z_score(),
        start.elapsed()
    );

    println!("{:>4} {:>10} {:>10} {:>10} {:>10}", "r", "mean", "variance", "ratio", "excess");
    for r in [5.0, 10.0, 20.0] {
        let s = estimate_second_moment(&TestFunction::ball(2, r), &cp, &spec, Mode::Affine, &opts)?;
        println!("{r:>4} {:>10.4} {:>10.4} {:>10.4} {:>10.5}", s.mean, s.variance, s.rogers_ratio, s.relative_excess());
    }
    Ok(())
}
