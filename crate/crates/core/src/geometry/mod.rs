//! Riemannian geometry of a single chart: metric jets, curvature, and
//! covariant derivatives of field jets.

mod chart;
mod covariant;
mod curvature;
mod jet;
mod jets;
mod tensor;

use thiserror::Error;

use crate::symexpr::{EvalError, ParseError};

pub use chart::{Chart, Domain, METRIC_JET_ORDER};
pub use covariant::{
    covariant_derivative, d_nabla_covector, hessian, metric_compatibility, nabla_covector, nabla_sym2, nabla_vector,
    second_nabla_covector, second_nabla_vector, CovariantInput,
};
pub use curvature::{
    bianchi_residual, christoffel, christoffel_partials, ricci, riemann, scalar_curvature, LocalGeometry,
};
pub use jet::{metric_jet, MetricJet};
pub use jets::{CovectorJet, ScalarJet, Sym2Jet, VectorJet};
pub use tensor::{Slot, TensorValue};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("cannot parse {context}: {source}")]
    Parse {
        context: String,
        #[source]
        source: ParseError,
    },
    #[error("metric is not positive definite at {point:?}: leading minor {minor} is {value:e}")]
    NotPositiveDefinite { point: Vec<f64>, minor: usize, value: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid complex structure: {0}")]
    ComplexStructure(String),
    #[error("chart has no complex structure")]
    MissingComplexStructure,
    #[error("point {point:?} lies outside the chart domain")]
    OutsideDomain { point: Vec<f64> },
}
