//! Manifest-driven verification runs: sampling, per-check residual
//! aggregation, reports and the command-line interface.

pub mod cli;
mod manifest;
mod report;
mod run;
mod sampling;

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::operators::OperatorError;

pub use manifest::{
    ChartSpec, CheckKind, CheckSpec, DomainSpec, Expectation, FieldSpec, Manifest, Resolved, RicciSign,
    MANIFEST_VERSION,
};
pub use report::{CheckError, CheckReport, ErrorKind, RouteStats, RunReport, Summary, Verdict, REPORT_VERSION};
pub use run::{run_check, run_manifest, RunOptions};
pub use sampling::{sample_domain, Sampling};

/// Problems that reject a whole manifest or command.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed manifest: {0}")]
    Json(#[source] serde_json::Error),
    #[error("unsupported manifest version {0}")]
    UnsupportedVersion(u32),
    #[error("invalid manifest: {0}")]
    InvalidManifest(String),
    #[error("chart '{name}': {source}")]
    Chart {
        name: String,
        #[source]
        source: GeometryError,
    },
    #[error("field '{name}': {source}")]
    Field {
        name: String,
        #[source]
        source: OperatorError,
    },
    #[error("sampling: {0}")]
    Sampling(String),
    #[error("no catalog entry named '{0}'")]
    UnknownEntry(String),
}
