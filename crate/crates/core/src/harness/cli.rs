use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use super::{run_manifest, HarnessError, Manifest, RunOptions, RunReport, Sampling};
use crate::catalog::{catalog_entries, find_entry};
use crate::geometry::{Chart, LocalGeometry};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "harmonic-geom",
    version,
    about = "Pointwise verification of Riemannian identities on coordinate charts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the checks of a manifest file.
    Check {
        manifest: PathBuf,
        /// Tolerance applied to every check.
        #[arg(long = "tol")]
        tol: Option<f64>,
        /// Use N quasi-random sample points per check.
        #[arg(long)]
        samples: Option<usize>,
        /// Seed for quasi-random sampling.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Include wall-clock times in the report.
        #[arg(long)]
        timings: bool,
    },
    /// Inspect or export the built-in catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Print Christoffel symbols, Ricci tensor and scalar curvature at a point.
    Curvature {
        /// Catalog entry name or manifest path.
        source: String,
        /// Comma-separated coordinates, e.g. 0.1,0.2
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        at: Vec<f64>,
        /// Chart name within the entry or manifest (default: the first chart).
        #[arg(long)]
        chart: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run every catalog entry and check all expectations.
    Selftest {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Debug, Subcommand)]
enum CatalogAction {
    /// List entry names.
    List,
    /// Write an entry as a manifest file.
    Export { entry: String, path: PathBuf },
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, HarnessError> {
    match command {
        Command::Check {
            manifest,
            tol,
            samples,
            seed,
            format,
            timings,
        } => {
            let m = Manifest::load(&manifest)?;
            let opts = RunOptions {
                tolerance: tol,
                sampling: samples.map(|count| Sampling::Halton {
                    count,
                    seed: seed.unwrap_or(0),
                }),
                seed,
                timings,
            };
            let report = run_manifest(&m, &opts)?;
            emit(&report, format, out);
            report_errors(&report, err);
            Ok(report.exit_code())
        }
        Command::Catalog { action } => match action {
            CatalogAction::List => {
                for e in catalog_entries() {
                    let _ = writeln!(out, "{:<24} {}", e.name, e.summary);
                }
                Ok(EXIT_OK)
            }
            CatalogAction::Export { entry, path } => {
                let e = find_entry(&entry).ok_or_else(|| HarnessError::UnknownEntry(entry.clone()))?;
                std::fs::write(&path, e.manifest.to_json()).map_err(|source| HarnessError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                Ok(EXIT_OK)
            }
        },
        Command::Curvature {
            source,
            at,
            chart,
            format,
        } => curvature(&source, &at, chart.as_deref(), format, out, err),
        Command::Selftest { format } => {
            let mut code = EXIT_OK;
            let mut all = Vec::new();
            for e in catalog_entries() {
                let report = run_manifest(&e.manifest, &RunOptions::default())?;
                code = code.max(report.exit_code());
                if format == Format::Text {
                    let s = &report.summary;
                    let status = if report.all_met() { "ok" } else { "FAILED" };
                    let _ = writeln!(
                        out,
                        "{status:<6} {:<24} {} checks, {} expectation(s) missed",
                        e.name, s.checks, s.expectations_missed
                    );
                    for c in report.checks.iter().filter(|c| !c.expectation_met) {
                        let _ = writeln!(
                            out,
                            "       {} [{}] verdict={:?} max={:?}",
                            c.id, c.kind, c.verdict, c.max_residual
                        );
                    }
                }
                all.push(serde_json::json!({ "entry": e.name, "report": report }));
            }
            if format == Format::Json {
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&all).expect("json"));
            }
            Ok(code)
        }
    }
}

fn emit(report: &RunReport, format: Format, out: &mut dyn Write) {
    let _ = match format {
        Format::Json => write!(out, "{}", report.to_json()),
        Format::Text => write!(out, "{}", report.to_text()),
    };
}

fn report_errors(report: &RunReport, err: &mut dyn Write) {
    for c in &report.checks {
        if let Some(e) = &c.error {
            let _ = writeln!(err, "check '{}': {}", c.id, e.message);
        }
    }
}

fn load_chart(source: &str, chart: Option<&str>) -> Result<Chart, HarnessError> {
    let manifest = match find_entry(source) {
        Some(e) => e.manifest,
        None => Manifest::load(std::path::Path::new(source))?,
    };
    let resolved = manifest.resolve()?;
    let name = match chart {
        Some(c) => c.to_string(),
        None => manifest.charts[0].name.clone(),
    };
    resolved
        .charts
        .get(&name)
        .cloned()
        .ok_or_else(|| HarnessError::InvalidManifest(format!("no chart named '{name}'")))
}

fn curvature(
    source: &str,
    at: &[f64],
    chart: Option<&str>,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, HarnessError> {
    let chart = load_chart(source, chart)?;
    let geo = match LocalGeometry::at(&chart, at) {
        Ok(g) => g,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return Ok(EXIT_NUMERIC);
        }
    };
    let n = geo.dim();
    match format {
        Format::Json => {
            let gamma: Vec<Vec<Vec<f64>>> = (0..n)
                .map(|k| (0..n).map(|i| (0..n).map(|j| geo.gamma[[k, i, j]]).collect()).collect())
                .collect();
            let ricci: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| geo.ricci[[i, j]]).collect()).collect();
            let doc = serde_json::json!({
                "chart": chart.name(),
                "point": at,
                "christoffel": gamma,
                "ricci": ricci,
                "scalar_curvature": geo.scalar,
            });
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"));
        }
        Format::Text => {
            let c = chart.coords();
            let _ = writeln!(out, "chart {} at ({})", chart.name(), join(at));
            let _ = writeln!(out, "Christoffel symbols Γ^k_ij:");
            for k in 0..n {
                for i in 0..n {
                    for j in i..n {
                        let _ = writeln!(out, "  Γ^{}_{}{} = {}", c[k], c[i], c[j], geo.gamma[[k, i, j]]);
                    }
                }
            }
            let _ = writeln!(out, "Ricci tensor:");
            for i in 0..n {
                let row: Vec<f64> = (0..n).map(|j| geo.ricci[[i, j]]).collect();
                let _ = writeln!(out, "  [{}]", join(&row));
            }
            let _ = writeln!(out, "scalar curvature: {}", geo.scalar);
        }
    }
    Ok(EXIT_OK)
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}
