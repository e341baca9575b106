//! Differential operators on fields: musical isomorphisms, codifferential,
//! Hodge and Bochner Laplacians, Ric*, δ*, δ, the Yano operator, Lie
//! derivatives of the metric and connection, and the tension field.

mod field;
mod forms;
mod lie;
mod tension;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, TensorValue};
use crate::symexpr::{EvalError, ParseError};

pub use field::{FieldDef, FieldKind, MapJet};
pub use forms::{
    bochner_laplacian, codifferential, d_codifferential, d_laplacian, delta_star, delta_star_jet, delta_sym, flat,
    hodge_laplacian, laplacian, ricci_star, ricci_star_vector, sharp, yano_box,
};
pub use lie::{lie_connection, lie_connection_trace, lie_metric, lie_metric_jet};
pub use tension::{tension_at, tension_field, tension_identity};

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("cannot parse {context}: {source}")]
    Parse {
        context: String,
        #[source]
        source: ParseError,
    },
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("field '{field}' is a {got} field, expected {expected}")]
    KindMismatch {
        field: String,
        expected: &'static str,
        got: FieldKind,
    },
    #[error("field '{field}' is not defined on chart '{chart}'")]
    ChartMismatch { field: String, chart: String },
    #[error("image point {point:?} lies outside the target chart domain")]
    OutsideTarget { point: Vec<f64> },
    #[error("unknown route '{0}'")]
    UnknownRoute(String),
}

impl From<EvalError> for OperatorError {
    fn from(e: EvalError) -> Self {
        OperatorError::Geometry(e.into())
    }
}

/// A tensor together with the assembly that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorResult<R> {
    pub value: TensorValue,
    pub route: R,
}

macro_rules! routes {
    ($name:ident { $($variant:ident => $tag:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
        #[serde(rename_all = "snake_case")]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $tag),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = OperatorError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($tag => Ok($name::$variant),)+
                    other => Err(OperatorError::UnknownRoute(other.to_string())),
                }
            }
        }
    };
}

routes!(YanoRoute {
    Direct => "direct",
    Hodge => "hodge",
    Bochner => "bochner",
});

routes!(LieRoute {
    Direct => "direct",
    ViaMetric => "via_metric",
});
