//! Command-line front end: reads a JSON experiment config, runs one
//! experiment and writes dumps or CSV tables.
//!
//! Exit codes: 0 on success, 1 on a runtime failure, 2 on invalid input,
//! 3 when a `verify-*` command misses its acceptance threshold.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::chabauty::continuity_probe;
use crate::config::{omega_or_default, ExperimentConfig};
use crate::counting::{box_dimension, count_in_family, fit_error_exponent, koch_curve, Boundary, PatchAtlas};
use crate::cutproject::{check_irreducibility, CutProject, IrreducibilityOptions};
use crate::io::{
    format_sig12, write_counting_csv, write_estimator_csv, write_model_set_dump, write_patch_csv, write_rows,
    EstimatorRow,
};
use crate::lattice::{EnumerationOptions, DEFAULT_CAP};
use crate::montecarlo::{estimate_mean_sv, estimate_second_moment, SamplerSpec};
use crate::transforms::{grid_transform_with, lift, model_set_transform};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_THRESHOLD: i32 = 3;

const DEFAULT_PROBE_RADIUS: f64 = 50.0;

#[derive(Debug, Parser)]
#[command(name = "modelsets", version, about = "Cut-and-project set experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the seed in the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory for dumps and tables.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Enumeration cap on the predicted number of candidate points.
    #[arg(long, global = true)]
    pub cap: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Dump the model set inside the configured region.
    Generate,
    /// Print vol(W)/covol.
    Density,
    /// Report the (D), (I) and (Reg) diagnostics.
    Irreducible,
    /// Chabauty–Fell distances along a perturbation sequence.
    CfDist,
    /// Siegel–Veech transform over the model set and over the grid.
    Transform,
    /// Monte-Carlo mean against the Siegel reference value.
    VerifySiegel,
    /// Variance table and Rogers ratios over growing balls.
    VerifyRogers,
    /// Counts in an ordered family and the fitted error exponent.
    Count,
    /// Patch classes with predicted and observed frequencies.
    Patches,
    /// Box-counting dimension of the window boundary.
    Boxdim,
}

enum Outcome {
    Done,
    BelowThreshold(String),
}

struct Ctx {
    cfg: ExperimentConfig,
    seed: Option<u64>,
    out_dir: Option<PathBuf>,
    opts: EnumerationOptions,
    stdout: Vec<u8>,
}

impl Ctx {
    fn cut_project(&self) -> Result<CutProject> {
        self.cfg.cut_project()
    }

    fn missing(&self, section: &str) -> Error {
        Error::Config { pointer: format!("/{section}"), message: "missing section required by this command".into() }
    }

    /// A writer on `<out>/<name>`, or `None` without an output directory.
    fn output(&self, name: &str) -> Result<Option<BufWriter<File>>> {
        let Some(dir) = &self.out_dir else { return Ok(None) };
        std::fs::create_dir_all(dir)?;
        Ok(Some(BufWriter::new(File::create(dir.join(name))?)))
    }

    fn sampler(&self) -> Result<SamplerSpec> {
        let s = self.cfg.sampler.as_ref().ok_or_else(|| self.missing("sampler"))?;
        let d = self.cfg.scheme.d;
        let spec = SamplerSpec::new(d, s.t, s.sample_count, self.cfg.seed(self.seed)?)
            .with_omega(omega_or_default(&s.omega, d))
            .with_torus(s.torus_randomize);
        spec.validate().map_err(|e| Error::Config { pointer: "/sampler".into(), message: e.to_string() })?;
        Ok(spec)
    }
}

fn is_validation(e: &Error) -> bool {
    matches!(
        e,
        Error::Config { .. }
            | Error::InvalidArgument(_)
            | Error::DimensionMismatch { .. }
            | Error::InvalidPolynomial(_)
            | Error::InvalidOrder(_)
            | Error::NonSquareFree(_)
            | Error::Parse { .. }
    )
}

/// Parses `args` (program name first) and runs the command, writing results
/// to `stdout` and diagnostics to `stderr`. Returns the exit code.
pub fn run_with_output<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    match run(cli, stdout) {
        Ok(Outcome::Done) => EXIT_OK,
        Ok(Outcome::BelowThreshold(msg)) => {
            let _ = writeln!(stderr, "threshold not met: {msg}");
            EXIT_THRESHOLD
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if is_validation(&e) {
                EXIT_INVALID
            } else {
                EXIT_FAILURE
            }
        }
    }
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = run_with_output(args, &mut stdout.lock(), &mut stderr.lock());
    let _ = std::io::stdout().flush();
    code
}

fn run(cli: Cli, stdout: &mut dyn Write) -> Result<Outcome> {
    let path = cli
        .common
        .config
        .as_deref()
        .ok_or_else(|| Error::Config { pointer: "/".into(), message: "--config is required".into() })?;
    let cfg = ExperimentConfig::from_path(path)?;
    let cap = cli.common.cap.or(cfg.cap).unwrap_or(DEFAULT_CAP);
    let out_dir = cli.common.out.clone().or_else(|| cfg.out_dir.as_ref().map(|d| resolve(path, d)));
    let mut ctx = Ctx {
        cfg,
        seed: cli.common.seed,
        out_dir,
        opts: EnumerationOptions { cap, ..Default::default() },
        stdout: Vec::new(),
    };
    let command = cli.command;
    let outcome = match cli.common.threads {
        Some(0) => Err(Error::InvalidArgument("--threads must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            pool.install(|| dispatch(command, &mut ctx))
        }
        None => dispatch(command, &mut ctx),
    };
    stdout.write_all(&ctx.stdout)?;
    outcome
}

/// Relative `out_dir` entries are taken relative to the config file.
fn resolve(config: &Path, dir: &str) -> PathBuf {
    let p = Path::new(dir);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        config.parent().unwrap_or(Path::new(".")).join(p)
    }
}

fn dispatch(command: Command, ctx: &mut Ctx) -> Result<Outcome> {
    match command {
        Command::Generate => generate(ctx),
        Command::Density => density(ctx),
        Command::Irreducible => irreducible(ctx),
        Command::CfDist => cf_dist(ctx),
        Command::Transform => transform(ctx),
        Command::VerifySiegel => verify_siegel(ctx),
        Command::VerifyRogers => verify_rogers(ctx),
        Command::Count => count(ctx),
        Command::Patches => patches(ctx),
        Command::Boxdim => boxdim(ctx),
    }
}

fn generate(ctx: &mut Ctx) -> Result<Outcome> {
    let cp = ctx.cut_project()?;
    let region = ctx.cfg.region.as_ref().ok_or_else(|| ctx.missing("region"))?.to_region(cp.d());
    let ms = cp.generate_with(&region, &ctx.opts)?;
    let (d, m) = (cp.scheme().d(), cp.scheme().m());
    match ctx.output("model_set.txt")? {
        Some(mut w) => {
            write_model_set_dump(&mut w, d, m, &ms)?;
            w.flush()?;
            writeln!(ctx.stdout, "{} points", ms.len())?;
        }
        None => write_model_set_dump(&mut ctx.stdout, d, m, &ms)?,
    }
    Ok(Outcome::Done)
}

fn density(ctx: &mut Ctx) -> Result<Outcome> {
    writeln!(ctx.stdout, "{}", format_short(ctx.cut_project()?.density()?))?;
    Ok(Outcome::Done)
}

/// Twelve significant digits without trailing zeros.
fn format_short(x: f64) -> String {
    let s = format_sig12(x);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn irreducible(ctx: &mut Ctx) -> Result<Outcome> {
    let cp = ctx.cut_project()?;
    let radius = ctx.cfg.probe_radius.unwrap_or(DEFAULT_PROBE_RADIUS);
    let report = check_irreducibility(cp.scheme(), cp.grid(), cp.window(), radius, &IrreducibilityOptions::default())?;
    write!(ctx.stdout, "{}", report.summary())?;
    Ok(Outcome::Done)
}

#[derive(Serialize)]
struct DistanceRow {
    step: usize,
    distance: f64,
}

fn cf_dist(ctx: &mut Ctx) -> Result<Outcome> {
    let c = ctx.cfg.chabauty.clone().ok_or_else(|| ctx.missing("chabauty"))?;
    let mut cp = ctx.cut_project()?;
    if c.center_window {
        cp = cp.with_centered_window()?;
    }
    let maps = c.perturbations.maps(cp.d())?;
    let ds = continuity_probe(&cp, &maps, c.radius, c.eps_floor)?;
    let rows: Vec<DistanceRow> =
        ds.iter().enumerate().map(|(step, &distance)| DistanceRow { step, distance }).collect();
    if let Some(mut w) = ctx.output("cf_dist.csv")? {
        write_rows(&mut w, &rows)?;
    }
    for r in &rows {
        writeln!(ctx.stdout, "{} {}", r.step, r.distance)?;
    }
    Ok(Outcome::Done)
}

fn transform(ctx: &mut Ctx) -> Result<Outcome> {
    let cp = ctx.cut_project()?;
    let f = ctx.cfg.test_function.clone().ok_or_else(|| ctx.missing("test_function"))?;
    let mode = ctx.cfg.mode;
    let on_points = model_set_transform(&f, &cp, mode, &ctx.opts)?;
    let on_grid = grid_transform_with(&lift(&f, cp.window(), cp.scheme())?, cp.grid(), mode, &ctx.opts)?;
    writeln!(ctx.stdout, "model_set {on_points}\ngrid {on_grid}")?;
    Ok(Outcome::Done)
}

fn verify_siegel(ctx: &mut Ctx) -> Result<Outcome> {
    let cp = ctx.cut_project()?;
    let f = ctx.cfg.test_function.clone().ok_or_else(|| ctx.missing("test_function"))?;
    let spec = ctx.sampler()?;
    let m = estimate_mean_sv(&f, &cp, &spec, ctx.cfg.mode, &ctx.opts)?;
    let row = EstimatorRow {
        run_id: format!("siegel-seed{}", spec.seed),
        t: spec.t,
        count: m.estimate.count,
        mean: m.estimate.mean,
        stderr: m.estimate.stderr,
        reference: m.reference,
        z_score: m.z_score(),
    };
    if let Some(mut w) = ctx.output("siegel.csv")? {
        write_estimator_csv(&mut w, std::slice::from_ref(&row))?;
    }
    writeln!(ctx.stdout, "mean {} stderr {} reference {} z {}", row.mean, row.stderr, row.reference, row.z_score)?;
    let z_max = ctx.cfg.thresholds.z_max;
    Ok(if row.z_score.abs() <= z_max {
        Outcome::Done
    } else {
        Outcome::BelowThreshold(format!("|z| = {} exceeds {z_max}", row.z_score.abs()))
    })
}

#[derive(Serialize)]
struct RogersRow {
    r: f64,
    mean: f64,
    second_moment: f64,
    variance: f64,
    rogers_ratio: f64,
    relative_excess: f64,
}

fn verify_rogers(ctx: &mut Ctx) -> Result<Outcome> {
    let cp = ctx.cut_project()?;
    let radii = ctx.cfg.rogers_radii.clone().ok_or_else(|| ctx.missing("rogers_radii"))?;
    let spec = ctx.sampler()?;
    let mut rows = Vec::new();
    for &r in &radii {
        let f = crate::transforms::TestFunction::ball(cp.d(), r);
        let s = estimate_second_moment(&f, &cp, &spec, ctx.cfg.mode, &ctx.opts)?;
        rows.push(RogersRow {
            r,
            mean: s.mean,
            second_moment: s.second_moment,
            variance: s.variance,
            rogers_ratio: s.rogers_ratio,
            relative_excess: s.relative_excess(),
        });
    }
    if let Some(mut w) = ctx.output("rogers.csv")? {
        write_rows(&mut w, &rows)?;
    }
    for r in &rows {
        writeln!(ctx.stdout, "r {} ratio {} excess {}", r.r, r.rogers_ratio, r.relative_excess)?;
    }
    let th = &ctx.cfg.thresholds;
    let lo = rows.iter().map(|r| r.rogers_ratio).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|r| r.rogers_ratio).fold(0.0, f64::max);
    let worst_excess = rows.iter().map(|r| r.relative_excess.abs()).fold(0.0, f64::max);
    Ok(if !(hi <= th.rogers_band * lo) {
        Outcome::BelowThreshold(format!("Rogers ratios span [{lo}, {hi}], wider than a factor {}", th.rogers_band))
    } else if !(worst_excess < th.excess_max) {
        Outcome::BelowThreshold(format!("relative excess {worst_excess} not below {}", th.excess_max))
    } else {
        Outcome::Done
    })
}

fn count(ctx: &mut Ctx) -> Result<Outcome> {
    let cp = ctx.cut_project()?;
    let (family, t_list) = ctx.cfg.ordered_family(cp.d())?;
    let rows = count_in_family(&cp, &family, &t_list, &ctx.opts)?;
    if let Some(mut w) = ctx.output("counting.csv")? {
        write_counting_csv(&mut w, &rows)?;
    }
    for r in &rows {
        writeln!(ctx.stdout, "T {} count {} error {}", r.t, r.count, r.error)?;
    }
    match fit_error_exponent(&rows) {
        Ok(fit) => writeln!(ctx.stdout, "exponent {} stderr {}", fit.slope, fit.stderr)?,
        Err(e) => writeln!(ctx.stdout, "exponent unavailable: {e}")?,
    }
    Ok(Outcome::Done)
}

fn patches(ctx: &mut Ctx) -> Result<Outcome> {
    let cp = ctx.cut_project()?;
    let pc = ctx.cfg.patches.clone().ok_or_else(|| ctx.missing("patches"))?;
    let atlas = PatchAtlas::new(&cp, pc.radius, &ctx.opts)?;
    let stats = atlas.tabulate(pc.t, &ctx.opts)?;
    if let Some(mut w) = ctx.output("patches.csv")? {
        write_patch_csv(&mut w, &stats)?;
    }
    writeln!(
        ctx.stdout,
        "{} classes, predicted sum {} density {}",
        stats.classes.len(),
        stats.predicted_sum(),
        stats.density
    )?;
    for c in &stats.classes {
        writeln!(
            ctx.stdout,
            "{:016x} {} {} {} {}",
            c.key_hash(),
            c.multiplicity,
            c.predicted,
            c.empirical,
            c.rel_error()
        )?;
    }
    Ok(Outcome::Done)
}

fn boxdim(ctx: &mut Ctx) -> Result<Outcome> {
    let b = ctx.cfg.boxdim.clone().ok_or_else(|| ctx.missing("boxdim"))?;
    let boundary = match b.koch_iterations {
        Some(k) => Boundary::Polyline { vertices: koch_curve(k), closed: false },
        None => Boundary::of_window(&ctx.cfg.window)?,
    };
    let fit = box_dimension(&boundary, &b.scales)?;
    writeln!(ctx.stdout, "dimension {} stderr {}", fit.slope, fit.stderr)?;
    Ok(Outcome::Done)
}
