use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use graphlift::graph::DEFAULT_LAMBDA;
use graphlift::lifting::{decompose_volume_timed, load_side_info, save_side_info};
use graphlift::phantom::{self, PhantomKind, PhantomSpec};
use graphlift::report::write_csv;
use graphlift::volume::{load_volume, save_volume, write_atomic, HeaderSource, DEFAULT_BIT_DEPTH};
use graphlift::{analyze_decomposition, reconstruct_volume, Axis, DecomposedVolume, Dims, Error, Method, Volume};

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "graphlift", version, about = "Graph-compensated Haar lifting for 3-D+t volumes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic GLV1 volume.
    Phantom(PhantomArgs),
    /// One lifting step along an axis; writes LP/HP bands and side information.
    Decompose(DecomposeArgs),
    /// Invert a decomposition.
    Reconstruct(ReconstructArgs),
    /// PSNR / highpass-energy report as CSV.
    Analyze(AnalyzeArgs),
    /// Exit 0 iff two GLV1 files hold identical samples.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Constant,
    Gradient,
    DeformingDisk,
    Noise,
}

#[derive(clap::Args)]
struct PhantomArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// NXxNYxNZxNT
    #[arg(long, value_parser = parse_dims)]
    dims: Dims,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Amplitude of the seeded noise texture (0 disables it).
    #[arg(long, default_value_t = 0)]
    noise: u32,
    /// Level of the constant phantom.
    #[arg(long, default_value_t = 1000)]
    value: i32,
    /// Gradient motion in px/frame.
    #[arg(long, default_value_t = 1.0)]
    velocity: f64,
    /// Gradient slope in codes/px.
    #[arg(long, default_value_t = 16.0)]
    slope: f64,
    /// Disk base radius in px (default: a quarter of the frame width).
    #[arg(long)]
    radius: Option<f64>,
    /// Disk radius oscillation amplitude in px.
    #[arg(long, default_value_t = 4.0)]
    amplitude: f64,
    /// Disk oscillation period in frames (default: nt).
    #[arg(long)]
    period: Option<usize>,
    #[arg(long, default_value_t = 2600)]
    inside: i32,
    #[arg(long, default_value_t = 900)]
    outside: i32,
    /// 1-px linear edge ramp instead of a hard disk edge.
    #[arg(long)]
    antialias: bool,
    #[arg(long, default_value_t = DEFAULT_BIT_DEPTH)]
    bit_depth: u32,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(clap::Args)]
struct DecomposeArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, value_parser = parse_axis, default_value = "t")]
    axis: Axis,
    /// none | center | 4grid | 8grid | radius:R
    #[arg(long, value_parser = parse_method, default_value = "radius:2")]
    method: Method,
    #[arg(long, value_parser = parse_lambda, default_value_t = DEFAULT_LAMBDA)]
    lambda: f64,
    #[arg(long)]
    lp: PathBuf,
    #[arg(long)]
    hp: PathBuf,
    /// GLS1 output; required for compensated methods, ignored for `none`.
    #[arg(long)]
    side: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ReconstructArgs {
    #[arg(long)]
    lp: PathBuf,
    #[arg(long)]
    hp: PathBuf,
    /// GLS1 side information; omit for uncompensated bands.
    #[arg(long)]
    side: Option<PathBuf>,
    #[arg(long, value_parser = parse_axis, default_value = "t")]
    axis: Axis,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(clap::Args)]
struct AnalyzeArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, value_parser = parse_axis, default_value = "t")]
    axis: Axis,
    /// Comma-separated methods decomposed in-process.
    #[arg(long, value_delimiter = ',', value_parser = parse_method, default_value = "none,4grid,8grid,radius:2")]
    methods: Vec<Method>,
    #[arg(long, value_parser = parse_lambda, default_value_t = DEFAULT_LAMBDA)]
    lambda: f64,
    /// Analyse existing band files instead of decomposing.
    #[arg(long, requires = "hp")]
    lp: Option<PathBuf>,
    #[arg(long, requires = "lp")]
    hp: Option<PathBuf>,
    #[arg(long, requires = "lp")]
    side: Option<PathBuf>,
    /// Method label for `--lp/--hp` mode.
    #[arg(long, default_value = "loaded")]
    label: String,
    /// CSV destination (stdout when omitted).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(clap::Args)]
struct VerifyArgs {
    original: PathBuf,
    reconstructed: PathBuf,
}

fn parse_dims(s: &str) -> Result<Dims, String> {
    let parts: Vec<usize> = s
        .split('x')
        .map(|p| p.parse::<usize>().map_err(|_| format!("bad extent {p:?} in {s:?}")))
        .collect::<Result<_, _>>()?;
    let [nx, ny, nz, nt] = parts[..] else {
        return Err(format!("expected NXxNYxNZxNT, got {s:?}"));
    };
    if parts.contains(&0) {
        return Err(format!("{s} has a zero extent"));
    }
    Ok(Dims::new(nx, ny, nz, nt))
}

fn parse_axis(s: &str) -> Result<Axis, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_lambda(s: &str) -> Result<f64, String> {
    let l: f64 = s.parse().map_err(|_| format!("bad lambda {s:?}"))?;
    if !(l.is_finite() && l > 0.0) {
        return Err(format!("lambda must be positive, got {s}"));
    }
    Ok(l)
}

fn sha256_hex(path: &Path) -> Result<String, Error> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

fn cmd_phantom(a: PhantomArgs) -> Result<u8, Error> {
    let kind = match a.kind {
        Kind::Constant => PhantomKind::Constant { value: a.value },
        Kind::Gradient => PhantomKind::TranslatingGradient {
            velocity: a.velocity,
            slope: a.slope,
        },
        Kind::DeformingDisk => PhantomKind::DeformingDisk {
            center: ((a.dims.nx as f64 - 1.0) / 2.0, (a.dims.ny as f64 - 1.0) / 2.0),
            base_radius: a.radius.unwrap_or(a.dims.nx as f64 / 4.0),
            radius_amplitude: a.amplitude,
            period: a.period.unwrap_or(a.dims.nt),
            inside: a.inside,
            outside: a.outside,
            antialias: a.antialias,
        },
        Kind::Noise => PhantomKind::NoiseField {
            seed: a.seed,
            amplitude: a.noise,
        },
    };
    let mut spec = PhantomSpec::new(kind, a.dims);
    spec.bit_depth = a.bit_depth;
    if a.noise > 0 && !matches!(a.kind, Kind::Noise) {
        spec = spec.with_noise(a.seed, a.noise);
    }
    let v = phantom::generate(&spec)?;
    save_volume(&v, &a.output)?;
    println!("dims {} bit_depth {} sha256 {}", v.dims(), v.bit_depth(), sha256_hex(&a.output)?);
    Ok(0)
}

fn cmd_decompose(a: DecomposeArgs) -> Result<u8, Error> {
    let v = load_volume(&a.input, HeaderSource::Embedded)?;
    if a.method.is_compensated() && a.side.is_none() {
        return Err(Error::InvalidParameter(format!("--side is required for method {}", a.method)));
    }
    let start = Instant::now();
    let (d, timings) = decompose_volume_timed(&v, a.axis, a.method, a.lambda)?;
    for t in &timings {
        println!(
            "pair {} at {} {}: {:.3} ms",
            t.pair_index,
            if a.axis == Axis::Temporal { "z" } else { "t" },
            t.fixed,
            t.elapsed.as_secs_f64() * 1e3
        );
    }
    save_volume(&d.lp_band, &a.lp)?;
    save_volume(&d.hp_band, &a.hp)?;
    if let (Some(side), Some(path)) = (&d.side_info, &a.side) {
        save_side_info(side, path)?;
    }
    println!(
        "{} pairs, method {}, axis {}, {:.3} s total",
        timings.len(),
        a.method,
        a.axis,
        start.elapsed().as_secs_f64()
    );
    Ok(0)
}

fn load_decomposition(
    lp: &Path,
    hp: &Path,
    side: Option<&Path>,
    axis: Axis,
    label: String,
) -> Result<DecomposedVolume, Error> {
    let lp_band = load_volume(lp, HeaderSource::Embedded)?;
    let hp_band = load_volume(hp, HeaderSource::Embedded)?;
    let side_info = side.map(load_side_info).transpose()?;
    Ok(DecomposedVolume {
        axis,
        label,
        lp_band,
        hp_band,
        side_info,
    })
}

fn cmd_reconstruct(a: ReconstructArgs) -> Result<u8, Error> {
    let d = load_decomposition(&a.lp, &a.hp, a.side.as_deref(), a.axis, String::new())?;
    let v = reconstruct_volume(&d)?;
    save_volume(&v, &a.output)?;
    println!("reconstructed {} volume", v.dims());
    Ok(0)
}

fn cmd_analyze(a: AnalyzeArgs) -> Result<u8, Error> {
    let v = load_volume(&a.input, HeaderSource::Embedded)?;
    let reports = match (&a.lp, &a.hp) {
        (Some(lp), Some(hp)) => {
            let d = load_decomposition(lp, hp, a.side.as_deref(), a.axis, a.label.clone())?;
            vec![analyze_decomposition(&v, &d)?]
        }
        _ => a
            .methods
            .iter()
            .map(|&m| {
                let (d, _) = decompose_volume_timed(&v, a.axis, m, a.lambda)?;
                analyze_decomposition(&v, &d)
            })
            .collect::<Result<Vec<_>, _>>()?,
    };
    match &a.report {
        Some(path) => {
            write_atomic(path, |w| write_csv(&reports, w))?;
            for r in &reports {
                println!(
                    "{:>12}  PSNR(ref,LP) {:8.3} dB  PSNR(cur,LP) {:8.3} dB  HP energy {:12.3}",
                    r.method, r.mean.psnr_ref_lp, r.mean.psnr_cur_lp, r.mean.hp_mean_energy
                );
            }
        }
        None => write_csv(&reports, BufWriter::new(io::stdout().lock()))?,
    }
    Ok(0)
}

fn first_mismatch(a: &Volume, b: &Volume) -> Option<String> {
    if a.header() != b.header() {
        return Some(format!(
            "headers differ: {} {}-bit{} vs {} {}-bit{}",
            a.dims(),
            a.bit_depth(),
            if a.is_signed() { " signed" } else { "" },
            b.dims(),
            b.bit_depth(),
            if b.is_signed() { " signed" } else { "" },
        ));
    }
    let d = a.dims();
    let i = a.samples().iter().zip(b.samples()).position(|(x, y)| x != y)?;
    let (x, rest) = (i % d.nx, i / d.nx);
    let (y, rest) = (rest % d.ny, rest / d.ny);
    let (z, t) = (rest % d.nz, rest / d.nz);
    Some(format!(
        "first mismatch at x={} y={} z={} t={}: {} vs {}",
        x + 1,
        y + 1,
        z + 1,
        t + 1,
        a.samples()[i],
        b.samples()[i]
    ))
}

fn cmd_verify(a: VerifyArgs) -> Result<u8, Error> {
    let orig = load_volume(&a.original, HeaderSource::Embedded)?;
    let recon = load_volume(&a.reconstructed, HeaderSource::Embedded)?;
    match first_mismatch(&orig, &recon) {
        None => {
            println!("bit-exact: {} samples match", orig.samples().len());
            Ok(0)
        }
        Some(msg) => {
            println!("{msg}");
            Ok(EXIT_MISMATCH)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Phantom(a) => cmd_phantom(a),
        Command::Decompose(a) => cmd_decompose(a),
        Command::Reconstruct(a) => cmd_reconstruct(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let _ = writeln!(io::stderr(), "error: {e}");
            ExitCode::from(if e.is_io_or_format() { EXIT_IO } else { EXIT_USAGE })
        }
    }
}
