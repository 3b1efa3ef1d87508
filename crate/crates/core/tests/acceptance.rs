//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use modelsets::chabauty::{cf_distance, continuity_probe, PhysicalMap, Truncation};
use modelsets::counting::{box_dimension, count_in_family, dyadic_decomposition, fit_error_exponent, koch_curve};
use modelsets::counting::{Boundary, OrderedFamily, PatchAtlas};
use modelsets::cutproject::{presets, Window};
use modelsets::lattice::{alpha, AffineMap, AlphaMethod, EnumerationOptions, Grid, Region};
use modelsets::montecarlo::{estimate_mean_sv, estimate_second_moment, SamplerSpec};
use modelsets::transforms::{grid_transform, lift, sv_transform, Mode, TestFunction};

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn lib<T>(r: modelsets::Result<T>) -> Result<T, String> {
    r.map_err(|e| format!("error: {e}"))
}

fn timed(limit: Duration, f: impl FnOnce() -> Check) -> Check {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let note = |s: String| format!("{s} ({elapsed:.2?}, limit {limit:?})");
    match out {
        Ok(s) if elapsed <= limit => Ok(note(s)),
        Ok(s) | Err(s) => Err(note(s)),
    }
}

fn ab_spec() -> SamplerSpec {
    SamplerSpec::new(2, 8.0, 400, 42).with_torus(true)
}

fn density_formula() -> Check {
    let mut details = Vec::new();
    let mut ok = true;
    for (name, cp, t, expected) in [
        ("Fibonacci", presets::fibonacci(), 200.0, 1.0 / 5f64.sqrt()),
        ("Ammann-Beenker", presets::ammann_beenker(), 100.0, 0.125),
    ] {
        let r = timed(Duration::from_secs(30), || {
            let emp = lib(cp.empirical_density(t))?;
            let rel = (emp - expected).abs() / expected;
            ensure(rel <= 0.02, format!("{name} {emp:.6} vs {expected:.6}, rel {rel:.2e}"))
        });
        ok &= r.is_ok();
        details.push(r.unwrap_or_else(|e| e));
    }
    ensure(ok, details.join("; "))
}

fn siegel_summation() -> Check {
    timed(Duration::from_secs(300), || {
        let cp = presets::ammann_beenker();
        let f = TestFunction::ball(2, 10.0);
        let m = lib(estimate_mean_sv(&f, &cp, &ab_spec(), Mode::Affine, &EnumerationOptions::default()))?;
        let reference = 100.0 * PI / 8.0;
        let z = (m.estimate.mean - reference) / m.estimate.stderr;
        ensure(
            (m.reference - reference).abs() < 1e-9 && z.abs() <= 3.0,
            format!("mean {:.4} ± {:.4}, reference {:.4}, z {z:+.3}", m.estimate.mean, m.estimate.stderr, m.reference),
        )
    })
}

fn random_unimodular(rng: &mut ChaCha8Rng, n: usize, spread: f64) -> DMatrix<f64> {
    loop {
        let g = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } + spread * rng.random_range(-1.0..1.0));
        let det: f64 = g.determinant();
        if det.abs() > 0.1 {
            let mut g = g / det.abs().powf(1.0 / n as f64);
            if det < 0.0 {
                g.row_mut(0).neg_mut();
            }
            return g;
        }
    }
}

fn transform_identity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let base = presets::ammann_beenker();
    let f = TestFunction::ball(2, 6.0);
    let opts = EnumerationOptions::default();
    let mut mismatches = Vec::new();
    let mut total = 0.0;
    for trial in 0..50 {
        let g = random_unimodular(&mut rng, 4, 0.05);
        let shift = DVector::from_fn(4, |_, _| rng.random_range(-1.0..1.0));
        let grid = lib(Grid::new(&g * base.grid().basis(), shift))?;
        let cp = lib(base.with_grid(grid.clone()))?;
        let ms = lib(cp.generate_with(&Region::ball(2, 8.0), &opts))?;
        let big_f = lib(lift(&f, cp.window(), cp.scheme()))?;
        for mode in [Mode::Affine, Mode::Linear] {
            let a = lib(sv_transform(&f, &ms.phys_points(), ms.valid_radius(), mode))?;
            let b = lib(grid_transform(&big_f, &grid, mode))?;
            if a != b || a.fract() != 0.0 {
                mismatches.push(format!("trial {trial} {mode:?}: {a} vs {b}"));
            }
            total += a;
        }
    }
    ensure(mismatches.is_empty(), format!("50 grids, {total} points counted, mismatches {mismatches:?}"))
}

fn equivariance() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let radius = 20.0;
    let mut worst = 0.0f64;
    let mut compared = 0usize;
    for (name, cp) in [("Fibonacci", presets::fibonacci()), ("Ammann-Beenker", presets::ammann_beenker())] {
        let d = cp.d();
        let n = cp.scheme().n();
        for _ in 0..20 {
            let g = random_unimodular(&mut rng, d, 0.6);
            let s: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
            let map = lib(AffineMap::embedded(&g, &s, cp.scheme().phys_coords(), n))?;
            let moved = lib(lib(cp.apply(&map))?.generate(&Region::ball(d, radius)))?;
            let g_inv = g.clone().try_inverse().ok_or("singular g")?;
            let s_norm = s.iter().map(|v| v * v).sum::<f64>().sqrt();
            let pre_radius = g_inv.norm() * (radius + s_norm) + 1.0;
            let base = lib(cp.generate(&Region::ball(d, pre_radius)))?;
            let image: HashMap<&[i64], Vec<f64>> = base
                .points
                .iter()
                .map(|p| {
                    let y = &g * DVector::from_column_slice(&p.phys);
                    (p.lift.as_slice(), y.iter().zip(&s).map(|(a, b)| a + b).collect())
                })
                .collect();
            let inner = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt() <= radius - 1e-6;
            for p in moved.points.iter().filter(|p| inner(&p.phys)) {
                let Some(y) = image.get(p.lift.as_slice()) else {
                    return Err(format!("{name}: lift {:?} missing from g·Λ", p.lift));
                };
                worst = worst.max(y.iter().zip(&p.phys).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
                compared += 1;
            }
            let expected = image.values().filter(|y| inner(y)).count();
            let got = moved.points.iter().filter(|p| inner(&p.phys)).count();
            if expected != got {
                return Err(format!("{name}: {got} points in Λ(gℒ) vs {expected} in g·Λ(ℒ)"));
            }
        }
    }
    ensure(worst <= 1e-9, format!("{compared} points compared, max deviation {worst:.2e}"))
}

fn rogers_and_second_moment() -> (Check, Check) {
    let cp = presets::ammann_beenker();
    let opts = EnumerationOptions::default();
    let mut ratios = Vec::new();
    let mut excess_10 = None;
    for r in [5.0, 10.0, 20.0] {
        match estimate_second_moment(&TestFunction::ball(2, r), &cp, &ab_spec(), Mode::Affine, &opts) {
            Ok(s) => {
                ratios.push(s.rogers_ratio);
                if r == 10.0 {
                    excess_10 = Some(s.relative_excess());
                }
            }
            Err(e) => return (Err(format!("error: {e}")), Err(format!("error: {e}"))),
        }
    }
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    let rogers = ensure(lo > 0.0 && hi <= 4.0 * lo, format!("ratios {ratios:.4?}, spread {:.3}", hi / lo));
    let excess = excess_10.expect("r = 10 evaluated");
    (rogers, ensure(excess.abs() < 0.1, format!("relative excess {excess:.4} at r = 10")))
}

fn schmidt_counting() -> Check {
    timed(Duration::from_secs(120), || {
        let cp = presets::ammann_beenker();
        let rows = lib(count_in_family(
            &cp,
            &OrderedFamily::Balls { d: 2 },
            &[25.0, 50.0, 100.0, 200.0],
            &EnumerationOptions::default(),
        ))?;
        let fit = lib(fit_error_exponent(&rows))?;
        let errors: Vec<f64> = rows.iter().map(|r| r.error).collect();
        ensure(fit.slope <= 0.75, format!("exponent {:.3} ± {:.3}, errors {errors:.2?}", fit.slope, fit.stderr))
    })
}

fn patch_frequencies() -> Check {
    let cp = presets::fibonacci();
    let opts = EnumerationOptions::default();
    let mut details = Vec::new();
    let mut ok = true;
    // the required radius, plus a larger one where several classes appear
    for radius in [1.2, 3.0] {
        let atlas = lib(PatchAtlas::new(&cp, radius, &opts))?;
        let stats = lib(atlas.tabulate(2000.0, &opts))?;
        let worst = stats.classes.iter().map(|c| c.rel_error()).fold(0.0, f64::max);
        let sum_err = (stats.predicted_sum() - 1.0 / 5f64.sqrt()).abs();
        ok &= worst <= 0.03 && sum_err <= 1e-6;
        details
            .push(format!("R={radius}: {} classes, worst rel {worst:.2e}, |Σ − D| {sum_err:.1e}", stats.classes.len()));
    }
    ensure(ok, details.join("; "))
}

fn dyadic() -> Check {
    timed(Duration::from_secs(1), || {
        let t = 12;
        for n in 1..=(1u64 << t) {
            let parts = lib(dyadic_decomposition(n, t))?;
            if parts.len() > t as usize {
                return Err(format!("N={n}: {} intervals", parts.len()));
            }
            let mut next = 0;
            for &(a, b) in &parts {
                let len = b - a;
                if a != next || !len.is_power_of_two() || a % len != 0 {
                    return Err(format!("N={n}: bad interval [{a}, {b})"));
                }
                next = b;
            }
            if next != n {
                return Err(format!("N={n}: cover ends at {next}"));
            }
        }
        Ok(format!("all N ≤ 2^{t}"))
    })
}

/// `min_{i ≤ n} vol(Bⁱ)/2ⁱ`, the lower bound on `covol(L′)/(λ₁⋯λᵢ)` for
/// rank-`i` sublattices.
fn minkowski_constant(n: usize) -> f64 {
    let vols = [2.0, PI, 4.0 * PI / 3.0];
    (1..=n).map(|i| vols[i - 1] / 2f64.powi(i as i32)).fold(1.0, f64::min)
}

fn alpha_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = [1.0f64; 2];
    for trial in 0..200 {
        let n = 2 + trial % 2;
        let shape = random_unimodular(&mut rng, n, 1.0);
        let squash = DMatrix::from_diagonal(&DVector::from_fn(n, |_, _| rng.random_range(-1.5f64..1.5).exp()));
        let mut basis = squash * shape;
        let det: f64 = basis.determinant();
        basis /= det.abs().powf(1.0 / n as f64);
        let grid = lib(Grid::lattice(basis))?;
        let exact = lib(alpha(&grid, AlphaMethod::Exact))?.value;
        let approx = lib(alpha(&grid, AlphaMethod::Approx))?.value;
        let ratio = exact / approx;
        let bound = 1.0 / minkowski_constant(n);
        if !(ratio >= 1.0 - 1e-9 && ratio <= bound * (1.0 + 1e-9)) {
            return Err(format!("trial {trial} (n={n}): exact {exact}, approx {approx}, bound {bound:.4}"));
        }
        worst[n - 2] = worst[n - 2].max(ratio);
    }
    Ok(format!(
        "200 lattices, max exact/approx {:.4} (n=2, bound {:.4}), {:.4} (n=3, bound {:.4})",
        worst[0],
        1.0 / minkowski_constant(2),
        worst[1],
        1.0 / minkowski_constant(3)
    ))
}

fn shifted_z2(radius: f64, shift: [f64; 2]) -> Truncation {
    let k = radius.ceil() as i64 + 1;
    let pts = (-k..=k).flat_map(|i| (-k..=k).map(move |j| vec![i as f64 + shift[0], j as f64 + shift[1]])).collect();
    Truncation::new(pts, radius)
}

fn chabauty_fell() -> Check {
    let z = shifted_z2(101.0, [0.0, 0.0]);
    let identity = lib(cf_distance(&z, &z, 0.01))?;
    let a = shifted_z2(40.0, [0.0, 0.0]);
    let b = shifted_z2(40.0, [0.1, 0.0]);
    let ab = lib(cf_distance(&a, &b, 1e-4))?;
    let ba = lib(cf_distance(&b, &a, 1e-4))?;
    let cp = lib(presets::ammann_beenker().with_centered_window())?;
    let maps: Vec<PhysicalMap> = (4..9).map(|k| PhysicalMap::rotation(0.5f64.powi(k))).collect();
    let probe = lib(continuity_probe(&cp, &maps, 101.0, 0.01))?;
    let far = lib(Truncation::from_cut_project(&lib(cp.apply(&lib(maps[0].embed(&cp))?))?, 101.0))?;
    let near = lib(Truncation::from_cut_project(&cp, 101.0))?;
    let sym = lib(cf_distance(&far, &near, 0.01))? == lib(cf_distance(&near, &far, 0.01))? && ab == ba;
    let monotone = probe.windows(2).all(|w| w[1] <= w[0]);
    ensure(
        sym && identity == 0.01 && (ab - 0.1).abs() <= 1e-4 && monotone,
        format!("symmetric {sym}, d(ℤ²,ℤ²) {identity}, translation {ab:.6}, rotation probe {probe:.4?}"),
    )
}

fn box_dim() -> Check {
    let square = lib(Boundary::of_window(&Window::cube(0.0, 1.0, 2)))?;
    let dyadic: Vec<f64> = (3..=7).map(|j| 0.5f64.powi(j)).collect();
    let sq = lib(box_dimension(&square, &dyadic))?.slope;
    let koch = Boundary::Polyline { vertices: koch_curve(6), closed: false };
    let kd = lib(box_dimension(&koch, &[1.0 / 3.0, 1.0 / 9.0, 1.0 / 27.0, 1.0 / 81.0]))?.slope;
    let target = 4f64.ln() / 3f64.ln();
    ensure(
        (sq - 1.0).abs() <= 0.1 && (kd - target).abs() <= 0.1,
        format!("square {sq:.4}, Koch {kd:.4} (log 4 / log 3 = {target:.4})"),
    )
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = modelsets::cli::run_with_output(args.iter().copied(), &mut out, &mut err);
    (code, out)
}

fn read_dir_sorted(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files: Vec<_> =
        std::fs::read_dir(dir).map(|rd| rd.filter_map(|e| e.ok()).map(|e| e.path()).collect()).unwrap_or_default();
    files.sort();
    files
        .into_iter()
        .map(|p| (p.file_name().map(PathBuf::from).unwrap_or_default(), std::fs::read(&p).unwrap_or_default()))
        .collect()
}

fn determinism() -> Check {
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/ammann-beenker.json");
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut compared = 0;
    for cmd in ["verify-siegel", "verify-rogers", "count", "patches"] {
        let mut runs = Vec::new();
        for threads in ["1", "4", "4"] {
            let dir = tmp.path().join(format!("{cmd}-{threads}-{}", runs.len()));
            let dir_s = dir.to_string_lossy().into_owned();
            let (code, stdout) =
                run_cli(&["modelsets", cmd, "--config", config, "--threads", threads, "--out", &dir_s]);
            if code != 0 {
                return Err(format!("{cmd} with {threads} threads exited {code}"));
            }
            runs.push((stdout, read_dir_sorted(&dir)));
        }
        if runs[0].1.is_empty() {
            return Err(format!("{cmd} wrote no files"));
        }
        if runs.windows(2).any(|w| w[0] != w[1]) {
            return Err(format!("{cmd}: outputs differ between runs"));
        }
        compared += runs[0].1.len();
    }
    let spec = ab_spec();
    let cp = presets::ammann_beenker();
    let f = TestFunction::ball(2, 10.0);
    let values = |threads: usize| -> Result<Vec<u64>, String> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| e.to_string())?;
        let m = pool.install(|| estimate_mean_sv(&f, &cp, &spec, Mode::Affine, &EnumerationOptions::default()));
        let m = lib(m)?;
        Ok(m.estimate.values.iter().chain([&m.estimate.mean, &m.estimate.stderr]).map(|v| v.to_bits()).collect())
    };
    ensure(values(1)? == values(4)?, format!("{compared} output files identical across 1 and 4 threads"))
}

fn main() {
    let (rogers, second) = rogers_and_second_moment();
    let results: Vec<(&str, Check)> = vec![
        ("density formula", density_formula()),
        ("Siegel summation", siegel_summation()),
        ("transform identity", transform_identity()),
        ("equivariance", equivariance()),
        ("Rogers boundedness", rogers),
        ("second-moment consistency", second),
        ("counting error exponent", schmidt_counting()),
        ("patch frequencies", patch_frequencies()),
        ("dyadic decomposition", dyadic()),
        ("alpha oracle", alpha_oracle()),
        ("Chabauty-Fell metric", chabauty_fell()),
        ("box dimension", box_dim()),
        ("determinism", determinism()),
    ];
    let mut failed = 0;
    for (i, (name, r)) in results.iter().enumerate() {
        match r {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
