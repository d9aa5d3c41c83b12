//! Batch driver around `sgl-core`: translation tables, forward and inverse
//! transforms, the oracle suites, and pose-grid matching. Given the same
//! inputs and flags, every command writes byte-identical output.
//!
//! Exit codes: 0 success, 1 file I/O, 2 usage or validation, 3 one or more
//! verification cases failed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use sgl_core::matching::{grid_search, results_to_json, PoseGrid};
use sgl_core::oracle::{default_suite_names, run_suite, OracleReport};
use sgl_core::sgl::{
    eval_basis, forward_transform_samples, sample_grid, synthesize, SglIndex, SglSpectrum,
};
use sgl_core::translate::build_table;

#[derive(Parser)]
#[command(
    name = "sgl",
    version,
    about = "Spherical Gauss-Laguerre expansions, translation tables, and pose matching"
)]
struct Cli {
    /// Worker threads for parallel sections. Falls back to SGL_NUM_THREADS,
    /// then to one thread per core.
    #[arg(long, global = true)]
    parallelism: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the axial translation coupling table as CSV.
    Table {
        /// Largest radial order included in the table.
        #[arg(long)]
        bandwidth: u32,
        /// Shift length along +z; must be positive.
        #[arg(long)]
        nu: f64,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Project grid samples, or a single basis function, onto the basis.
    Transform {
        /// Bandwidth of the output spectrum and of the sample grid.
        #[arg(long)]
        bandwidth: u32,
        /// JSON file of [re, im] pairs laid out on the transform grid
        /// (see `sample_grid` ordering: radial-major, then colatitude,
        /// then azimuth).
        #[arg(long)]
        samples: Option<PathBuf>,
        /// Basis index "n,l,m": synthesize that function on the grid and
        /// project it, recovering a unit spectrum.
        #[arg(long)]
        basis: Option<String>,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a spectrum at listed spherical points.
    Synth {
        /// Spectrum JSON file.
        #[arg(long)]
        spectrum: PathBuf,
        /// JSON file of [r, theta, phi] triples.
        #[arg(long)]
        points: PathBuf,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the oracle suites and emit one JSON line per case.
    Verify {
        /// Run a single named suite instead of the default set.
        #[arg(long)]
        suite: Option<String>,
        /// Order cap forwarded to the suites that take one.
        #[arg(long, default_value_t = 4)]
        max_n: u32,
        /// Also run the exact rational-arithmetic suite.
        #[arg(long)]
        rational: bool,
        /// Flip one sign inside the translation suite to prove the harness
        /// catches a planted bug.
        #[arg(long)]
        canary: bool,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a pose grid between two spectra and rank the results.
    Match {
        /// Spectrum JSON for the moved side of the overlap.
        #[arg(long)]
        f: PathBuf,
        /// Spectrum JSON for the fixed side.
        #[arg(long)]
        g: PathBuf,
        /// Pose grid JSON: rotation Euler triples and translation vectors.
        #[arg(long)]
        grid: PathBuf,
        /// Number of ranked results to keep.
        #[arg(long, default_value_t = 10)]
        top_k: usize,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failures that end the process, separated by exit code.
enum Failure {
    /// Exit 1: the filesystem said no.
    Io(String),
    /// Exit 2: arguments or file contents are invalid.
    Usage(String),
}

impl From<sgl_core::Error> for Failure {
    fn from(e: sgl_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = configure_threads(cli.parallelism).and_then(|()| run(cli.command));
    match outcome {
        Ok(code) => code,
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads(parallelism: Option<usize>) -> Result<(), Failure> {
    let requested = match parallelism {
        Some(n) => Some(n),
        None => match std::env::var("SGL_NUM_THREADS") {
            Ok(raw) => Some(raw.trim().parse::<usize>().map_err(|_| {
                Failure::Usage(format!("SGL_NUM_THREADS must be a positive integer, got '{raw}'"))
            })?),
            Err(_) => None,
        },
    };
    if let Some(workers) = requested {
        if workers == 0 {
            return Err(Failure::Usage("worker count must be at least 1".to_string()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::Table { bandwidth, nu, out } => {
            let table = build_table(bandwidth, nu)?;
            let mut buf = Vec::new();
            table.write_csv(&mut buf).expect("in-memory write cannot fail");
            emit(out.as_deref(), &buf)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Transform { bandwidth, samples, basis, out } => {
            let spectrum = match (samples, basis) {
                (Some(path), None) => transform_samples(bandwidth, &path)?,
                (None, Some(spec)) => transform_basis(bandwidth, &spec)?,
                _ => {
                    return Err(Failure::Usage(
                        "transform: provide exactly one of --samples or --basis".to_string(),
                    ))
                }
            };
            emit(out.as_deref(), (spectrum.to_json_string() + "\n").as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Synth { spectrum, points, out } => {
            let spectrum = SglSpectrum::from_json_str(&read_file(&spectrum)?)?;
            let points = parse_points(&read_file(&points)?)?;
            let values = synthesize(&spectrum, &points);
            let rows: Vec<serde_json::Value> =
                values.iter().map(|v| serde_json::json!([v.re, v.im])).collect();
            let text = serde_json::to_string_pretty(&rows).expect("serialization cannot fail");
            emit(out.as_deref(), (text + "\n").as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, max_n, rational, canary, out } => {
            let mut names: Vec<&str> = match &suite {
                Some(name) => vec![name.as_str()],
                None => default_suite_names().to_vec(),
            };
            if rational && !names.contains(&"rational") {
                names.push("rational");
            }
            let mut reports: Vec<OracleReport> = Vec::new();
            for name in names {
                reports.extend(run_suite(name, max_n, canary)?);
            }
            let mut buf = Vec::new();
            for r in &reports {
                writeln!(buf, "{}", r.to_json_line()).expect("in-memory write cannot fail");
            }
            emit(out.as_deref(), &buf)?;
            let failures = reports.iter().filter(|r| !r.passed).count();
            eprintln!("verify: {}/{} cases passed", reports.len() - failures, reports.len());
            Ok(if failures == 0 { ExitCode::SUCCESS } else { ExitCode::from(3) })
        }
        Command::Match { f, g, grid, top_k, out } => {
            let f = SglSpectrum::from_json_str(&read_file(&f)?)?;
            let g = SglSpectrum::from_json_str(&read_file(&g)?)?;
            let grid = PoseGrid::from_json_str(&read_file(&grid)?)?;
            let results = grid_search(&f, &g, &grid, top_k)?;
            emit(out.as_deref(), (results_to_json(&results) + "\n").as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, bytes).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
        }
        None => {
            std::io::stdout()
                .write_all(bytes)
                .map_err(|e| Failure::Io(format!("stdout: {e}")))
        }
    }
}

fn transform_samples(bandwidth: u32, path: &Path) -> Result<SglSpectrum, Failure> {
    let text = read_file(path)?;
    let pairs: Vec<[f64; 2]> = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("samples file: {e}")))?;
    if pairs.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Failure::Usage("samples file: values must be finite".to_string()));
    }
    let samples: Vec<Complex64> = pairs.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
    Ok(forward_transform_samples(&samples, bandwidth)?)
}

fn transform_basis(bandwidth: u32, spec: &str) -> Result<SglSpectrum, Failure> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    let parse = |i: usize| -> Result<i64, Failure> {
        parts
            .get(i)
            .and_then(|s| s.parse::<i64>().ok())
            .ok_or_else(|| Failure::Usage(format!("--basis expects \"n,l,m\", got '{spec}'")))
    };
    if parts.len() != 3 {
        return Err(Failure::Usage(format!("--basis expects \"n,l,m\", got '{spec}'")));
    }
    let (n, l, m) = (parse(0)?, parse(1)?, parse(2)?);
    if n < 0 || l < 0 {
        return Err(Failure::Usage(format!("--basis orders must be nonnegative, got '{spec}'")));
    }
    let idx = SglIndex::new(n as u32, l as u32, m as i32)?;
    if idx.n > bandwidth {
        return Err(Failure::Usage(format!(
            "--basis order n = {} exceeds the bandwidth {bandwidth}",
            idx.n
        )));
    }
    let samples: Vec<Complex64> = sample_grid(bandwidth)
        .iter()
        .map(|p| eval_basis(idx, p[0], p[1], p[2]))
        .collect();
    Ok(forward_transform_samples(&samples, bandwidth)?)
}

fn parse_points(text: &str) -> Result<Vec<[f64; 3]>, Failure> {
    let points: Vec<[f64; 3]> =
        serde_json::from_str(text).map_err(|e| Failure::Usage(format!("points file: {e}")))?;
    for p in &points {
        if p.iter().any(|v| !v.is_finite()) || p[0] < 0.0 {
            return Err(Failure::Usage(format!(
                "points file: each entry needs finite [r, theta, phi] with r >= 0, got {p:?}"
            )));
        }
    }
    Ok(points)
}
