//! Artifact writing and the error report printed on failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use collective_emission::config::{OutputFormat, SimulationConfig};
use collective_emission::export::{write_artifact, write_json, CsvTable};
use serde::Serialize;
use serde_json::{json, Value};

/// One computed table, ready to be written under `<out>/<job>/<name>`.
#[derive(Debug)]
pub struct Artifact {
    pub job: &'static str,
    pub name: String,
    pub table: CsvTable,
    /// Point parameters (temperature, method, ...).
    pub parameters: Value,
    /// Scalar results derived from the table.
    pub results: Value,
    /// Printed to stdout once the artifact is on disk.
    pub summary: String,
}

#[derive(Serialize)]
struct Meta<'a> {
    program: &'static str,
    version: &'static str,
    job: &'a str,
    name: &'a str,
    parameters: &'a Value,
    results: &'a Value,
    config: &'a SimulationConfig,
}

pub fn csv_path(cfg: &SimulationConfig, job: &str, name: &str) -> PathBuf {
    Path::new(&cfg.output.dir).join(job).join(format!("{name}.csv"))
}

/// Table as `{"columns": [...], "rows": [[...]]}`, numbers kept numeric.
fn table_json(table: &CsvTable) -> Value {
    let text = table.render();
    let mut lines = text.lines();
    let columns: Vec<&str> = lines.next().map(|h| h.split(',').collect()).unwrap_or_default();
    let rows: Vec<Vec<Value>> = lines
        .map(|l| {
            l.split(',')
                .map(|cell| match cell.parse::<f64>() {
                    Ok(x) if x.is_finite() => json!(x),
                    _ => json!(cell),
                })
                .collect()
        })
        .collect();
    json!({ "columns": columns, "rows": rows })
}

pub fn write(cfg: &SimulationConfig, a: &Artifact) -> Result<(), CliError> {
    let path = csv_path(cfg, a.job, &a.name);
    let meta = Meta {
        program: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        job: a.job,
        name: &a.name,
        parameters: &a.parameters,
        results: &a.results,
        config: cfg,
    };
    write_artifact(&path, &a.table, &meta)?;
    if cfg.output.formats.contains(&OutputFormat::Json) {
        write_json(&path.with_extension("json"), &table_json(&a.table))?;
    }
    log::debug!("wrote {}", path.display());
    println!("{}", a.summary);
    Ok(())
}

/// Write every artifact in order; the first computation error aborts.
pub fn write_all(cfg: &SimulationConfig, results: Vec<collective_emission::Result<Artifact>>) -> Result<(), CliError> {
    let artifacts: Vec<Artifact> = results.into_iter().collect::<Result<_, _>>()?;
    artifacts.iter().try_for_each(|a| write(cfg, a))
}

#[derive(Debug, Clone, Serialize)]
pub struct FailedPoint {
    pub index: usize,
    pub point: String,
    pub kind: String,
    pub message: String,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(collective_emission::Error),
    Partial { total: usize, failed: Vec<FailedPoint> },
}

impl From<collective_emission::Error> for CliError {
    fn from(e: collective_emission::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn kind(&self) -> &str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Core(e) => e.kind(),
            CliError::Partial { .. } => "partial_failure",
        }
    }

    pub fn to_json(&self) -> Value {
        let body = match self {
            CliError::Usage(m) => json!({ "kind": self.kind(), "message": m }),
            CliError::Core(e) => json!({ "kind": self.kind(), "message": e.to_string() }),
            CliError::Partial { total, failed } => json!({
                "kind": self.kind(),
                "message": format!("{} of {} grid points failed", failed.len(), total),
                "failed": failed,
            }),
        };
        json!({ "error": body })
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(_) => 1,
            CliError::Partial { .. } => 3,
        }
    }

    /// Print the error JSON on stderr and return the exit code.
    pub fn report(&self) -> ExitCode {
        eprintln!("{}", self.to_json());
        ExitCode::from(self.exit_code())
    }
}
