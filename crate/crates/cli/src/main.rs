//! Batch command-line interface: field generation, helical decomposition,
//! wavelet transforms, basis synthesis, coherence diagnostics and self-checks.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use helical_mra::coherence::{coherence_spectrum, ray_profile, tail_fit, DEFAULT_WINDOW};
use helical_mra::fourier::{fft_vector, ifft_vector, GridVectorField};
use helical_mra::generate::{generate, low_pass, FieldKind};
use helical_mra::helical::Polarity;
use helical_mra::helical_wavelet::{forward, inverse, synth_basis_function};
use helical_mra::hodge::{decompose, project};
use helical_mra::io::{
    read_coeffs, read_field, write_atomic, write_coeffs, write_field, FieldData,
};
use helical_mra::meyer::WaveletIndex;
use helical_mra::verify::{all_passed, invariant_suite};

/// Default tolerance for round-trip and energy verifications.
const VERIFY_TOL: f64 = 1e-10;

#[derive(Parser)]
#[command(
    name = "helical-mra",
    version,
    about = "Helical wavelet analysis of periodic vector fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a test field and write it as a field file.
    Gen {
        /// constant(cx,cy,cz) | gradient | beltrami-minus | abc(A,B,C) | random-solenoidal(seed) | random(seed)
        #[arg(long)]
        kind: FieldKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
        /// Keep only modes with every |k_i| <= BAND.
        #[arg(long)]
        band: Option<i64>,
    },
    /// Split a field into its Sigma+, Sigma-, D and harmonic parts.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        /// Writes PREFIX.{plus,minus,d,harmonic}.vf3t and PREFIX.energy.json.
        #[arg(long)]
        out_prefix: String,
    },
    /// Forward helical wavelet transform.
    Transform {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        jmax: u32,
        #[arg(long)]
        out: PathBuf,
        /// Exit 1 if the transform is lossy or the round trip exceeds the tolerance.
        #[arg(long)]
        strict: bool,
    },
    /// Inverse helical wavelet transform.
    Itransform {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Reference field; exit 1 if the reconstruction differs by more than --tol.
        #[arg(long)]
        compare: Option<PathBuf>,
        #[arg(long, default_value_t = VERIFY_TOL)]
        tol: f64,
    },
    /// Synthesize one helical basis function on a grid.
    Basis {
        #[arg(long)]
        j: u32,
        /// Species 1..=7 (bits x, y, z select the wavelet factor per axis).
        #[arg(long)]
        eps: u8,
        #[arg(long, value_parser = parse_loc)]
        loc: [u32; 3],
        /// plus | minus | d
        #[arg(long)]
        pol: Polarity,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Shell-averaged coherence spectrum around a centre, written as CSV.
    Coherence {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_parser = parse_point)]
        center: [f64; 3],
        /// Omit for the total; `all` writes r,vx,vy,vz.
        #[arg(long)]
        component: Option<ComponentArg>,
        #[arg(long)]
        csv: PathBuf,
    },
    /// Magnitude of one component along a ray from a centre, written as CSV.
    Ray {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_parser = parse_point)]
        center: [f64; 3],
        #[arg(long, value_parser = parse_point)]
        dir: [f64; 3],
        #[arg(long)]
        component: Axis,
        #[arg(long)]
        csv: PathBuf,
    },
    /// Log-log least-squares tail fit of a CSV profile.
    Tailfit {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value_t = DEFAULT_WINDOW.0)]
        rmin: f64,
        #[arg(long, default_value_t = DEFAULT_WINDOW.1)]
        rmax: f64,
        /// Value column (1 = first column after r).
        #[arg(long, default_value_t = 1)]
        column: usize,
    },
    /// Run a verification suite.
    Check {
        #[arg(long, default_value = "invariants")]
        suite: Suite,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ComponentArg {
    X,
    Y,
    Z,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Invariants,
}

fn parse_triple<T: std::str::FromStr>(s: &str) -> Result<[T; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b, c] = parts.as_slice() else {
        return Err(format!("expected three comma-separated values, got '{s}'"));
    };
    let parse = |p: &str| p.parse::<T>().map_err(|_| format!("invalid number '{p}'"));
    Ok([parse(a)?, parse(b)?, parse(c)?])
}

fn parse_point(s: &str) -> Result<[f64; 3], String> {
    parse_triple(s)
}

fn parse_loc(s: &str) -> Result<[u32; 3], String> {
    parse_triple(s)
}

/// Failure modes mapped onto the exit codes.
enum Failure {
    /// A verification did not hold (exit 1).
    Verification(String),
    /// Bad arguments, unreadable or malformed files (exit 2).
    Usage(String),
}

impl From<helical_mra::Error> for Failure {
    fn from(e: helical_mra::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Usage(format!("csv: {e}"))
    }
}

type CmdResult = Result<(), Failure>;

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("reports serialize")
    );
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CmdResult {
    let mut bytes = serde_json::to_vec_pretty(value).expect("reports serialize");
    bytes.push(b'\n');
    Ok(write_atomic(path, &bytes)?)
}

fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> CmdResult {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| format!("{v:e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Failure::Usage(format!("csv: {e}")))?;
    Ok(write_atomic(path, &bytes)?)
}

fn read_csv_profile(path: &Path, column: usize) -> Result<Vec<(f64, f64)>, Failure> {
    if column == 0 {
        return Err(Failure::Usage("--column must be at least 1".into()));
    }
    let mut reader = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let field = |i: usize| -> Result<f64, Failure> {
            let raw = record
                .get(i)
                .ok_or_else(|| Failure::Usage(format!("row {}: missing column {i}", line + 2)))?;
            raw.trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("row {}: invalid number '{raw}'", line + 2)))
        };
        out.push((field(0)?, field(column)?));
    }
    Ok(out)
}

fn read_vector(path: &Path) -> Result<GridVectorField, Failure> {
    Ok(read_field(path)?.into_vector())
}

#[derive(Serialize)]
struct GenReport {
    kind: String,
    n: usize,
    band: Option<i64>,
    mean_square: f64,
}

fn cmd_gen(kind: FieldKind, n: usize, out: &Path, band: Option<i64>) -> CmdResult {
    let mut u = generate(kind, n)?;
    if let Some(k) = band {
        if k < 0 {
            return Err(Failure::Usage(format!(
                "--band must be nonnegative, got {k}"
            )));
        }
        u = low_pass(&u, k);
    }
    write_field(out, &FieldData::Vector(u.clone()))?;
    print_json(&GenReport {
        kind: kind.to_string(),
        n,
        band,
        mean_square: u.mean_square(),
    });
    Ok(())
}

#[derive(Serialize)]
struct EnergyReport {
    n: usize,
    total: f64,
    plus: f64,
    minus: f64,
    d: f64,
    harmonic: f64,
    /// |sum of parts - total| / total.
    parseval_error: f64,
}

fn cmd_decompose(input: &Path, prefix: &str) -> CmdResult {
    let u = read_vector(input)?;
    let n = u.n();
    let spec = fft_vector(&u);
    let h = decompose(&spec);
    for s in Polarity::ALL {
        let part = ifft_vector(&project(&spec, s));
        write_field(
            Path::new(&format!("{prefix}.{s}.vf3t")),
            &FieldData::Vector(part),
        )?;
    }
    let mean = h.harmonic.map(|c| c.re);
    let harmonic = GridVectorField::from_fn(n, |_, _, _| mean)?;
    write_field(
        Path::new(&format!("{prefix}.harmonic.vf3t")),
        &FieldData::Vector(harmonic),
    )?;
    let [plus, minus, d, harmonic] = h.energies();
    let total = u.mean_square();
    let parts = plus + minus + d + harmonic;
    let report = EnergyReport {
        n,
        total,
        plus,
        minus,
        d,
        harmonic,
        parseval_error: if total > 0.0 {
            (parts - total).abs() / total
        } else {
            parts
        },
    };
    write_json(Path::new(&format!("{prefix}.energy.json")), &report)?;
    print_json(&report);
    if report.parseval_error > VERIFY_TOL {
        return Err(Failure::Verification(format!(
            "energy split off by {:e}",
            report.parseval_error
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct TransformReport {
    n: usize,
    jmax: u32,
    coefficients: usize,
    field_energy: f64,
    coefficient_energy: f64,
    residual_energy: f64,
    lossy: bool,
    /// Max pointwise deviation of inverse(forward(u)) from u.
    round_trip_error: f64,
}

fn cmd_transform(input: &Path, jmax: u32, out: &Path, strict: bool) -> CmdResult {
    let u = read_vector(input)?;
    let c = forward(&u, jmax)?;
    write_coeffs(out, &c)?;
    let report = TransformReport {
        n: u.n(),
        jmax,
        coefficients: c.len(),
        field_energy: u.mean_square(),
        coefficient_energy: c.energy(),
        residual_energy: c.residual_energy(),
        lossy: c.is_lossy(),
        round_trip_error: inverse(&c).max_abs_diff(&u),
    };
    print_json(&report);
    if strict && (report.lossy || report.round_trip_error > VERIFY_TOL) {
        return Err(Failure::Verification(format!(
            "transform is lossy (residual energy {:e}, round trip {:e})",
            report.residual_energy, report.round_trip_error
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct InverseReport {
    n: usize,
    jmax: u32,
    mean_square: f64,
    max_abs_diff: Option<f64>,
}

fn cmd_itransform(input: &Path, out: &Path, compare: Option<&Path>, tol: f64) -> CmdResult {
    let c = read_coeffs(input)?;
    let u = inverse(&c);
    write_field(out, &FieldData::Vector(u.clone()))?;
    let diff = match compare {
        Some(path) => {
            let reference = read_vector(path)?;
            if reference.n() != u.n() {
                return Err(Failure::Usage(format!(
                    "reference grid {} does not match coefficient grid {}",
                    reference.n(),
                    u.n()
                )));
            }
            Some(u.max_abs_diff(&reference))
        }
        None => None,
    };
    print_json(&InverseReport {
        n: c.n(),
        jmax: c.j_max(),
        mean_square: u.mean_square(),
        max_abs_diff: diff,
    });
    match diff {
        Some(d) if d.is_nan() || d > tol => Err(Failure::Verification(format!(
            "reconstruction differs by {d:e} > {tol:e}"
        ))),
        _ => Ok(()),
    }
}

#[derive(Serialize)]
struct BasisReport {
    j: u32,
    eps: u8,
    loc: [u32; 3],
    polarity: String,
    n: usize,
    /// Mean square of the samples; 1 for a unit-norm basis function.
    norm_squared: f64,
}

fn cmd_basis(j: u32, eps: u8, loc: [u32; 3], pol: Polarity, n: usize, out: &Path) -> CmdResult {
    let idx = WaveletIndex::new(j, eps, loc)?;
    let u = synth_basis_function(&idx, pol, n)?;
    write_field(out, &FieldData::Vector(u.clone()))?;
    print_json(&BasisReport {
        j,
        eps,
        loc,
        polarity: pol.to_string(),
        n,
        norm_squared: u.mean_square(),
    });
    Ok(())
}

#[derive(Serialize)]
struct CoherenceReport {
    n: usize,
    center: [f64; 3],
    shells: usize,
    shell_width: f64,
    total: f64,
}

fn cmd_coherence(
    input: &Path,
    center: [f64; 3],
    component: Option<ComponentArg>,
    csv_out: &Path,
) -> CmdResult {
    let u = read_vector(input)?;
    let spec = coherence_spectrum(&u, center);
    let shells = 0..spec.radii.len();
    match component {
        None => write_csv(
            csv_out,
            &["r", "value"],
            shells.map(|i| vec![spec.radii[i], spec.values[i]]),
        )?,
        Some(ComponentArg::All) => write_csv(
            csv_out,
            &["r", "vx", "vy", "vz"],
            shells.map(|i| {
                vec![
                    spec.radii[i],
                    spec.components[0][i],
                    spec.components[1][i],
                    spec.components[2][i],
                ]
            }),
        )?,
        Some(axis) => {
            let a = axis as usize;
            write_csv(
                csv_out,
                &["r", "value"],
                shells.map(|i| vec![spec.radii[i], spec.components[a][i]]),
            )?
        }
    }
    print_json(&CoherenceReport {
        n: spec.n,
        center,
        shells: spec.radii.len(),
        shell_width: spec.shell_width,
        total: spec.total(),
    });
    Ok(())
}

fn cmd_ray(input: &Path, center: [f64; 3], dir: [f64; 3], axis: Axis, csv_out: &Path) -> CmdResult {
    let u = read_vector(input)?;
    let profile = ray_profile(&u, axis.index(), center, dir)?;
    write_csv(
        csv_out,
        &["r", "value"],
        profile.samples.iter().map(|&(r, v)| vec![r, v]),
    )
}

#[derive(Serialize)]
struct FitReport {
    r_min: f64,
    r_max: f64,
    exponent: f64,
    intercept: f64,
    residual: f64,
    samples: usize,
    non_algebraic: bool,
}

fn cmd_tailfit(path: &Path, rmin: f64, rmax: f64, column: usize) -> CmdResult {
    let profile = read_csv_profile(path, column)?;
    let fit = tail_fit(&profile, rmin, rmax)?;
    print_json(&FitReport {
        r_min: fit.r_min,
        r_max: fit.r_max,
        exponent: fit.exponent,
        intercept: fit.intercept,
        residual: fit.residual,
        samples: fit.samples,
        non_algebraic: fit.is_non_algebraic(),
    });
    Ok(())
}

#[derive(Serialize)]
struct CheckLine {
    name: &'static str,
    value: f64,
    tolerance: f64,
    passed: bool,
}

#[derive(Serialize)]
struct CheckReport {
    suite: &'static str,
    n: usize,
    seed: u64,
    passed: bool,
    checks: Vec<CheckLine>,
}

fn cmd_check(suite: Suite, n: usize, seed: u64) -> CmdResult {
    let Suite::Invariants = suite;
    let results = invariant_suite(n, seed)?;
    let passed = all_passed(&results);
    print_json(&CheckReport {
        suite: "invariants",
        n,
        seed,
        passed,
        checks: results
            .iter()
            .map(|r| CheckLine {
                name: r.name,
                value: r.value,
                tolerance: r.tolerance,
                passed: r.passed(),
            })
            .collect(),
    });
    if passed {
        Ok(())
    } else {
        let failed: Vec<&str> = results
            .iter()
            .filter(|r| !r.passed())
            .map(|r| r.name)
            .collect();
        Err(Failure::Verification(format!(
            "failed checks: {}",
            failed.join(", ")
        )))
    }
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Gen { kind, n, out, band } => cmd_gen(kind, n, &out, band),
        Command::Decompose { input, out_prefix } => cmd_decompose(&input, &out_prefix),
        Command::Transform {
            input,
            jmax,
            out,
            strict,
        } => cmd_transform(&input, jmax, &out, strict),
        Command::Itransform {
            input,
            out,
            compare,
            tol,
        } => cmd_itransform(&input, &out, compare.as_deref(), tol),
        Command::Basis {
            j,
            eps,
            loc,
            pol,
            n,
            out,
        } => cmd_basis(j, eps, loc, pol, n, &out),
        Command::Coherence {
            input,
            center,
            component,
            csv,
        } => cmd_coherence(&input, center, component, &csv),
        Command::Ray {
            input,
            center,
            dir,
            component,
            csv,
        } => cmd_ray(&input, center, dir, component, &csv),
        Command::Tailfit {
            csv,
            rmin,
            rmax,
            column,
        } => cmd_tailfit(&csv, rmin, rmax, column),
        Command::Check { suite, n, seed } => cmd_check(suite, n, seed),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors by itself
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
