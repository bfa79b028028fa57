//! `funkradon` — synthesize curve-integral data, reconstruct, and check the
//! pieces the inversion relies on.
//!
//! Exit codes: 0 success, 1 a check failed, 2 bad usage or input, 3 a
//! numerical failure (coverage, tracing, domain).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use funkradon::inversion::{self, Grid, InvertOptions};
use funkradon::transform::{self, DataKind, SinogramSpec};
use funkradon::trigpoly::{nucleus_check, parabola_literal_nucleus, NucleusMethod, PvOptions};
use funkradon::{acceptance, io, Error, Family, Geometry, Phantom, Point};

#[derive(Parser)]
#[command(name = "funkradon", version, about = "Generalized Funk-Radon transforms: forward model and exact inversion")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "FUNKRADON_WORKERS")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the transform of a phantom and write an FKR1 sinogram.
    Forward(ForwardArgs),
    /// Reconstruct from an FKR1 sinogram; writes F64GRID and a PGM preview.
    Invert(InvertArgs),
    /// Check that the nucleus N(x, y) vanishes at random point pairs.
    KernelCheck(KernelArgs),
    /// Compare the closed-form normalizer D(x) with its quadrature.
    Dcoef(DcoefArgs),
    /// Run the acceptance suite.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct ForwardArgs {
    /// Geometry descriptor, e.g. `ellipse:e1=1.2,e2=0.8,support=0.7`.
    #[arg(long)]
    geometry: String,
    /// Phantom descriptor, e.g. `gauss:0,0,0.2,1;disc:0.3,0,0.2,0.5,0.02`.
    #[arg(long)]
    phantom: String,
    #[arg(long, default_value_t = 513, value_parser = clap::value_parser!(u64).range(8..))]
    nlambda: u64,
    #[arg(long, default_value_t = 360, value_parser = clap::value_parser!(u64).range(8..))]
    nphi: u64,
    /// Sample φ over [0, π) only (families with antipodal symmetry).
    #[arg(long)]
    half: bool,
    /// Write arc-length data instead of M-data.
    #[arg(long)]
    riemann: bool,
    /// Explicit λ range (both bounds required).
    #[arg(long, requires = "lambda_max", allow_hyphen_values = true)]
    lambda_min: Option<f64>,
    #[arg(long, requires = "lambda_min", allow_hyphen_values = true)]
    lambda_max: Option<f64>,
    /// Longest tracing chord.
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InvertArgs {
    /// FKR1 sinogram.
    #[arg(long)]
    input: PathBuf,
    /// F64GRID output.
    #[arg(long)]
    out: PathBuf,
    /// PGM preview (default: OUT with extension .pgm).
    #[arg(long)]
    pgm: Option<PathBuf>,
    /// Grid nodes per side.
    #[arg(long, default_value_t = 129, value_parser = clap::value_parser!(u64).range(8..))]
    grid: u64,
    /// Half-width of the square grid (default: the support radius).
    #[arg(long)]
    extent: Option<f64>,
    /// The input holds arc-length data.
    #[arg(long)]
    riemann: bool,
    /// Compare with this phantom and print the error.
    #[arg(long)]
    phantom: Option<String>,
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long)]
    geometry: String,
    #[arg(long, default_value_t = 100)]
    pairs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct DcoefArgs {
    #[arg(long)]
    geometry: String,
    /// Sample point `x,y`; repeatable (default: three points in the support).
    #[arg(long = "point", allow_hyphen_values = true)]
    points: Vec<String>,
    /// Angles in the quadrature.
    #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u64).range(8..))]
    nphi: u64,
}

#[derive(Args)]
struct SelftestArgs {
    /// Quick subset.
    #[arg(long)]
    fast: bool,
    /// Flip the sign of every backprojection (the suite must then fail).
    #[arg(long, hide = true)]
    inject_sign_flip: bool,
}

/// Why a command did not succeed.
enum Failure {
    /// A check ran and failed.
    Check,
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = cli.workers;
    let r = match cli.command {
        Command::Forward(a) => forward(a, workers),
        Command::Invert(a) => invert(a, workers),
        Command::KernelCheck(a) => kernel_check(a),
        Command::Dcoef(a) => dcoef(a),
        Command::Selftest(a) => selftest(a, workers),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}

fn forward(a: ForwardArgs, workers: Option<usize>) -> Outcome {
    let geo = Geometry::parse(&a.geometry)?;
    let phantom = Phantom::parse(&a.phantom)?;
    let mut spec = SinogramSpec::new(a.nlambda as usize, a.nphi as usize);
    if a.half {
        spec = spec.half_range();
    }
    if a.riemann {
        spec = spec.kind(DataKind::Riemann);
    }
    if let (Some(lo), Some(hi)) = (a.lambda_min, a.lambda_max) {
        spec.lambda_bounds = Some((lo, hi));
    }
    spec.step = a.step;
    spec.workers = workers;
    let sino = transform::forward(&geo, &phantom, &spec)?;
    io::save_sinogram(&a.out, &sino)?;
    println!("geometry {geo}");
    println!(
        "lambda range [{}, {}], {} x {} samples ({} data)",
        sino.lambda.min, sino.lambda.max, sino.lambda.n, sino.n_phi, sino.kind
    );
    println!("max |entry| = {}", sino.max_abs());
    println!("wrote {}", a.out.display());
    Ok(())
}

fn invert(a: InvertArgs, workers: Option<usize>) -> Outcome {
    let sino = io::load_sinogram(&a.input)?;
    if a.riemann != (sino.kind == DataKind::Riemann) {
        return Err(Error::Precondition(format!(
            "{} holds {} data; pass --riemann exactly when the data are arc-length integrals",
            a.input.display(),
            sino.kind
        ))
        .into());
    }
    let phantom = a.phantom.as_deref().map(Phantom::parse).transpose()?;
    let geo = sino.geometry;
    let half = a.extent.unwrap_or(geo.support_radius());
    if !(half > 0.0 && half.is_finite()) {
        return Err(Error::InvalidParameter(format!("extent must be positive, got {half}")).into());
    }
    let grid = Grid::square(a.grid as usize, half);
    let opts = InvertOptions { workers };
    let rec = if a.riemann {
        inversion::reconstruct_riemann_with(&sino, &grid, &opts)?
    } else {
        inversion::reconstruct_with(&sino, &grid, &opts)?
    };
    io::save_field(&a.out, &rec)?;
    let pgm = a.pgm.unwrap_or_else(|| a.out.with_extension("pgm"));
    io::save_pgm(&pgm, &rec)?;
    println!("geometry {geo}");
    println!("grid {n} x {n} on [-{half}, {half}]^2", n = grid.nx);
    println!("wrote {} and {}", a.out.display(), pgm.display());
    if let Some(ph) = phantom {
        let truth = ph.sample(&grid);
        println!("rel_l2 = {:e}", inversion::rel_l2(&rec, &truth));
        println!("linf = {:e}", inversion::linf(&rec, &truth));
    }
    Ok(())
}

fn random_point(rng: &mut ChaCha8Rng, geo: &Geometry) -> Point {
    let r = geo.support_radius();
    loop {
        let p = Point::new(rng.gen_range(-r..r), rng.gen_range(-r..r));
        if p.norm() < r && geo.contains(p) {
            return p;
        }
    }
}

fn kernel_check(a: KernelArgs) -> Outcome {
    let geo = Geometry::parse(&a.geometry)?;
    let opts = PvOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    println!("geometry {geo}, {} pairs", a.pairs);
    if let Family::Ellipse { e1, e2 } = geo.family() {
        if !geo.support_condition_holds() {
            println!(
                "warning: support condition ‖y+x‖*ₑ<2 violated: support radius {} is not below min(e1, e2) = {}; the nucleus need not vanish",
                geo.support_radius(),
                e1.min(e2)
            );
        }
    }
    let (mut max_n, mut max_ratio, mut failed) = (0.0_f64, 0.0_f64, 0);
    let mut k = 0;
    while k < a.pairs {
        let x = random_point(&mut rng, &geo);
        let y = random_point(&mut rng, &geo);
        if (x - y).norm() < 1e-3 * geo.support_radius() {
            continue;
        }
        k += 1;
        let r = nucleus_check(&geo, x, y, &opts)?;
        let reg: Vec<String> = r.regularized.iter().map(|(_, v)| format!("{v:.6e}")).collect();
        let mut line = format!(
            "pair {k:>4}  x=({:+.5}, {:+.5})  y=({:+.5}, {:+.5})  N_eps=[{}]  N={:+.3e} ±{:.1e}  tol={:.1e}  {}",
            x.x,
            x.y,
            y.x,
            y.y,
            reg.join(", "),
            r.value,
            r.error,
            r.tolerance,
            if r.passed { "ok" } else { "FAIL" }
        );
        if r.method == NucleusMethod::HalfAngle {
            let lit = parabola_literal_nucleus(x, y, &opts)?;
            line.push_str(&format!("  (non-negative root alone: {lit:+.3e})"));
        }
        println!("{line}");
        max_n = max_n.max(r.value.abs());
        max_ratio = max_ratio.max(r.value.abs() / r.tolerance);
        failed += usize::from(!r.passed);
    }
    let pass = failed == 0;
    println!("max |N| = {max_n:.3e}, max |N|/tol = {max_ratio:.3e}, {failed} of {} pairs failed", a.pairs);
    println!("{}", if pass { "PASS" } else { "FAIL" });
    if !pass && !geo.support_condition_holds() {
        println!("the support condition ‖y+x‖*ₑ<2 was violated by the requested support");
    }
    if pass {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn parse_point(s: &str) -> Result<Point, Error> {
    let bad = || Error::Parse {
        pos: 0,
        msg: format!("expected a point 'x,y', got '{s}'"),
    };
    let (x, y) = s.split_once(',').ok_or_else(bad)?;
    let x: f64 = x.trim().parse().map_err(|_| bad())?;
    let y: f64 = y.trim().parse().map_err(|_| bad())?;
    Ok(Point::new(x, y))
}

const DCOEF_TOLERANCE: f64 = 1e-8;

fn dcoef(a: DcoefArgs) -> Outcome {
    let geo = Geometry::parse(&a.geometry)?;
    let points: Vec<Point> = if a.points.is_empty() {
        let r = geo.support_radius();
        vec![Point::new(0.5 * r, 0.0), Point::new(-0.3 * r, 0.4 * r), Point::new(0.1 * r, -0.6 * r)]
    } else {
        a.points.iter().map(|s| parse_point(s)).collect::<Result<_, _>>()?
    };
    println!("geometry {geo}, quadrature with {} angles", a.nphi);
    println!("{:>12} {:>12} {:>24} {:>24} {:>10}", "x", "y", "closed form", "quadrature", "rel diff");
    let mut worst = 0.0_f64;
    for x in points {
        let closed = geo.dcoef(x)?;
        let quad = geo.dcoef_quadrature(x, a.nphi as usize)?;
        let rel = (closed - quad).abs() / quad.abs();
        worst = worst.max(rel);
        println!("{:>12} {:>12} {:>24} {:>24} {:>10.2e}", x.x, x.y, closed, quad, rel);
    }
    if worst <= DCOEF_TOLERANCE {
        println!("PASS (max rel diff {worst:.2e} <= {DCOEF_TOLERANCE:e})");
        Ok(())
    } else {
        println!("FAIL (max rel diff {worst:.2e} > {DCOEF_TOLERANCE:e})");
        Err(Failure::Check)
    }
}

fn selftest(a: SelftestArgs, workers: Option<usize>) -> Outcome {
    if a.inject_sign_flip {
        inversion::inject_sign_flip(true);
    }
    let results = transform::with_workers(workers, || acceptance::run_with(a.fast, |r| println!("{r}")))?;
    let failed = results.iter().filter(|r| !r.passed).count();
    println!(
        "{} of {} criteria passed{}",
        results.len() - failed,
        results.len(),
        if a.fast { " (fast subset)" } else { "" }
    );
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}
