//! Command-line front end: `measures`, `sweep`, `verify`, `wavefunction`.
//!
//! Every command is a deterministic batch program: identical flags produce
//! byte-identical primary output (fixed JSON key order, 17-significant-digit
//! floats, parallel work buffered and emitted in input order). Exit codes:
//! `0` success, `1` verification-check failure, `2` invalid arguments or a
//! resource cap.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::entanglement::measure_report;
use crate::jsonfmt::{fmt_array, fmt_complex, fmt_f64, JsonObject};
use crate::oracle::{verify_report_with_cap, DEFAULT_DIM_CAP};
use crate::states::{build_pcs, truncation_for_tolerance, PairCoherentParams};
use crate::wavefunction::{
    gaussian_fit_residual, grid_eval, quadrature_norm, write_grid_csv, BOUNDARY_WARN_THRESHOLD,
};
use crate::Result;

/// Environment variable overriding the dense-oracle dimension cap.
pub const ORACLE_CAP_ENV: &str = "PAIRCOH_ORACLE_CAP";

const SWEEP_CSV_HEADER: &str =
    "zeta_abs,q,N,negativity_paper,negativity_spectral,entropy_bits,d_lower,d_upper,tail";

#[derive(Debug, Parser)]
#[command(
    name = "paircoh",
    version,
    about = "Entanglement measures of pair coherent states, cross-checked by a dense oracle"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute every entanglement measure for one state (JSON).
    Measures(MeasuresArgs),
    /// Sweep |zeta| over a range and emit one CSV row per value.
    Sweep(SweepArgs),
    /// Run the dense-oracle verification suite (JSON; exit 1 on failure).
    Verify(VerifyArgs),
    /// Export a wavefunction grid (CSV file plus JSON sidecar).
    Wavefunction(WavefunctionArgs),
}

/// Exactly one of `--n` / `--eps` picks the truncation.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Truncation {
    /// Explicit truncation length N (coefficients c_0..c_{N-1}).
    #[arg(long)]
    n: Option<usize>,
    /// Tail tolerance: choose the smallest N with truncation tail < EPS.
    #[arg(long)]
    eps: Option<f64>,
}

impl Truncation {
    fn resolve(&self, params: &PairCoherentParams) -> Result<usize> {
        match (self.n, self.eps) {
            (Some(n), None) => Ok(n),
            (None, Some(eps)) => truncation_for_tolerance(params, eps),
            // The arg group guarantees exactly one is present.
            _ => unreachable!("clap enforces exactly one of --n/--eps"),
        }
    }
}

#[derive(Debug, Args)]
struct MeasuresArgs {
    /// State parameter zeta: `a`, `a+bi`, or `bi`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    zeta: Complex64,
    /// Degeneracy parameter q (photon-number difference).
    #[arg(long, default_value_t = 0)]
    q: u32,
    #[command(flatten)]
    truncation: Truncation,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// First |zeta| of the sweep (inclusive).
    #[arg(long, default_value_t = 0.0)]
    start: f64,
    /// Last |zeta| of the sweep (inclusive).
    #[arg(long)]
    stop: f64,
    /// Number of sweep points.
    #[arg(long)]
    steps: usize,
    /// Degeneracy parameter q.
    #[arg(long, default_value_t = 0)]
    q: u32,
    /// Tail tolerance used to pick N at each sweep point.
    #[arg(long, default_value_t = 1e-9)]
    eps: f64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Comma-separated zeta values to verify.
    #[arg(
        long = "zeta-list",
        value_delimiter = ',',
        value_parser = parse_complex,
        allow_hyphen_values = true,
        default_value = "0.3,1.0,2.5"
    )]
    zeta_list: Vec<Complex64>,
    /// Comma-separated q values to verify.
    #[arg(long = "q-list", value_delimiter = ',', default_value = "0,1,2")]
    q_list: Vec<u32>,
    /// Truncation length for every verified state.
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// Tolerance applied to every closed-form-vs-oracle deviation.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct WavefunctionArgs {
    /// State parameter zeta: `a`, `a+bi`, or `bi`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    zeta: Complex64,
    /// Degeneracy parameter q.
    #[arg(long, default_value_t = 0)]
    q: u32,
    #[command(flatten)]
    truncation: Truncation,
    /// Lower edge of the square grid window.
    #[arg(long = "x-min", default_value_t = -8.0, allow_negative_numbers = true)]
    x_min: f64,
    /// Upper edge of the square grid window.
    #[arg(long = "x-max", default_value_t = 8.0, allow_negative_numbers = true)]
    x_max: f64,
    /// Grid points per axis.
    #[arg(long, default_value_t = 401)]
    points: usize,
    /// Grid CSV path; the JSON sidecar lands next to it as `<out>.json`.
    #[arg(long)]
    out: PathBuf,
}

/// Parses `a`, `a+bi`, `a-bi`, `bi`, or `i` (with optional exponents) into a
/// complex number.
pub fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let fail = || format!("'{s}' is not a complex number (expected forms: a, a+bi, bi)");
    let s = s.trim();
    if s.is_empty() {
        return Err(fail());
    }
    if !s.ends_with('i') {
        return s.parse::<f64>().map(Complex64::from).map_err(|_| fail());
    }
    let body = &s[..s.len() - 1];
    // Split at the last sign that is not an exponent sign; start at 1 so a
    // leading sign stays attached to the real (or lone imaginary) part.
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&i| {
        (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'e' && bytes[i - 1] != b'E'
    });
    let (re_part, im_part) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("", body),
    };
    let re = if re_part.is_empty() {
        0.0
    } else {
        re_part.parse::<f64>().map_err(|_| fail())?
    };
    let im = match im_part {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().map_err(|_| fail())?,
    };
    Ok(Complex64::new(re, im))
}

/// Reads the oracle dimension cap, honoring [`ORACLE_CAP_ENV`].
fn oracle_cap() -> std::result::Result<usize, String> {
    match std::env::var(ORACLE_CAP_ENV) {
        Err(_) => Ok(DEFAULT_DIM_CAP),
        Ok(raw) => raw
            .parse()
            .map_err(|_| format!("{ORACLE_CAP_ENV} must be a nonnegative integer, got '{raw}'")),
    }
}

/// Writes `content` to `--out` when given, otherwise to stdout.
fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => std::io::stdout().write_all(content.as_bytes())?,
    }
    Ok(())
}

fn cmd_measures(args: &MeasuresArgs) -> Result<i32> {
    let params = PairCoherentParams::new(args.zeta, args.q)?;
    let n = args.truncation.resolve(&params)?;
    let state = build_pcs(&params, n)?;
    let mut json = measure_report(&state).to_json();
    json.push('\n');
    emit(&args.out, &json)?;
    Ok(0)
}

fn cmd_sweep(args: &SweepArgs) -> Result<i32> {
    if !(args.start.is_finite() && args.start >= 0.0) {
        return Err(crate::Error::InvalidArgument(format!(
            "--start must be a finite value >= 0, got {}",
            args.start
        )));
    }
    if !(args.stop.is_finite() && args.stop > args.start) {
        return Err(crate::Error::InvalidArgument(format!(
            "--stop must be finite and greater than --start, got {}",
            args.stop
        )));
    }
    if args.steps < 2 {
        return Err(crate::Error::InvalidArgument(format!(
            "--steps must be at least 2, got {}",
            args.steps
        )));
    }
    let (start, stop, steps, q, eps) = (args.start, args.stop, args.steps, args.q, args.eps);
    // Rows are computed in parallel but collected in index order, so the
    // output bytes do not depend on scheduling.
    let rows: Result<Vec<String>> = (0..steps)
        .into_par_iter()
        .map(|k| -> Result<String> {
            let zeta_abs = start + (stop - start) * k as f64 / (steps - 1) as f64;
            let params = PairCoherentParams::new(Complex64::new(zeta_abs, 0.0), q)?;
            let n = truncation_for_tolerance(&params, eps)?;
            let report = measure_report(&build_pcs(&params, n)?);
            Ok(format!(
                "{},{},{},{},{},{},{},{},{}",
                fmt_f64(zeta_abs),
                q,
                n,
                fmt_f64(report.negativity_paper),
                fmt_f64(report.negativity_spectral),
                fmt_f64(report.entropy_bits),
                fmt_f64(report.d_lower),
                fmt_f64(report.d_upper),
                fmt_f64(report.tail),
            ))
        })
        .collect();
    let mut csv = String::from(SWEEP_CSV_HEADER);
    for row in rows? {
        csv.push('\n');
        csv.push_str(&row);
    }
    csv.push('\n');
    emit(&args.out, &csv)?;
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let cap = oracle_cap().map_err(crate::Error::InvalidArgument)?;
    let mut entries = Vec::new();
    let mut all_pass = true;
    for &zeta in &args.zeta_list {
        for &q in &args.q_list {
            let params = PairCoherentParams::new(zeta, q)?;
            let state = build_pcs(&params, args.n)?;
            let report = verify_report_with_cap(&state, args.tol, cap)?;
            all_pass &= report.all_pass();
            entries.push(
                JsonObject::new()
                    .raw("zeta", &fmt_complex(zeta.re, zeta.im))
                    .usize("q", q as usize)
                    .usize("n", args.n)
                    .bool("pass", report.all_pass())
                    .raw("checks", &report.to_json())
                    .finish(),
            );
        }
    }
    let mut json = fmt_array(entries);
    json.push('\n');
    emit(&args.out, &json)?;
    Ok(if all_pass { 0 } else { 1 })
}

fn cmd_wavefunction(args: &WavefunctionArgs) -> Result<i32> {
    let params = PairCoherentParams::new(args.zeta, args.q)?;
    let n = args.truncation.resolve(&params)?;
    let state = build_pcs(&params, n)?;
    let grid = grid_eval(&state, args.x_min, args.x_max, args.points)?;
    let norm = quadrature_norm(&grid);
    if norm.boundary_warning {
        eprintln!(
            "warning: |psi| exceeds {BOUNDARY_WARN_THRESHOLD:e} on the grid boundary; \
             the window [{}, {}] is clipping the state (widen --x-min/--x-max)",
            args.x_min, args.x_max
        );
    }
    let fit = gaussian_fit_residual(&grid);
    let mut csv = BufWriter::new(File::create(&args.out)?);
    write_grid_csv(&grid, &mut csv)?;
    csv.flush()?;
    let sidecar = JsonObject::new()
        .f64("quadrature_norm", norm.value)
        .f64("gaussian_fit_residual", fit.residual)
        .finish();
    std::fs::write(args.out.with_extension("json"), sidecar + "\n")?;
    Ok(0)
}

fn execute(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Measures(args) => cmd_measures(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Wavefunction(args) => cmd_wavefunction(args),
    }
}

/// Parses the process arguments, runs the selected command, and returns the
/// process exit code. Argument-syntax errors exit with code 2 via clap.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            2
        }
    }
}
