use std::fmt;

use ndarray::{Array1, Array2, Array3};
use serde::{Deserialize, Serialize};

use super::OperatorError;
use crate::geometry::{Chart, CovectorJet, LocalGeometry, ScalarJet, VectorJet};
use crate::symexpr::{parse_expr, DerivativeTable, Expr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Scalar,
    Vector,
    #[serde(rename = "oneform")]
    OneForm,
    Map,
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FieldKind::Scalar => "scalar",
            FieldKind::Vector => "vector",
            FieldKind::OneForm => "oneform",
            FieldKind::Map => "map",
        })
    }
}

/// Value and first two partials of a map `f: source -> target`;
/// `d1[[a,β]] = ∂_a f^β`, `d2[[a,b,β]] = ∂_a∂_b f^β`.
#[derive(Debug, Clone, PartialEq)]
pub struct MapJet {
    pub value: Array1<f64>,
    pub d1: Array2<f64>,
    pub d2: Array3<f64>,
}

/// A named field on a chart, given componentwise by expressions in the
/// chart's coordinates.
#[derive(Debug, Clone)]
pub struct FieldDef {
    name: String,
    chart: String,
    dim: usize,
    kind: FieldKind,
    components: Vec<Expr>,
    tables: Vec<DerivativeTable>,
    target: Option<(String, usize)>,
}

impl FieldDef {
    /// `target` is required for (and only for) maps.
    pub fn new(
        name: impl Into<String>,
        chart: &Chart,
        kind: FieldKind,
        components: Vec<Expr>,
        target: Option<&Chart>,
    ) -> Result<Self, OperatorError> {
        let name = name.into();
        let n = chart.dim();
        let expected = match (kind, target) {
            (FieldKind::Scalar, None) => 1,
            (FieldKind::Vector | FieldKind::OneForm, None) => n,
            (FieldKind::Map, Some(t)) => t.dim(),
            (FieldKind::Map, None) => {
                return Err(OperatorError::InvalidField(format!(
                    "map '{name}' needs a target chart"
                )));
            }
            (_, Some(_)) => {
                return Err(OperatorError::InvalidField(format!(
                    "{kind} field '{name}' cannot have a target chart"
                )));
            }
        };
        if components.len() != expected {
            return Err(OperatorError::InvalidField(format!(
                "{kind} field '{name}' has {} components, expected {expected}",
                components.len()
            )));
        }
        if let Some(i) = components.iter().filter_map(Expr::max_coord).max() {
            if i >= n {
                return Err(OperatorError::InvalidField(format!(
                    "field '{name}' references coordinate {i} on a {n}-dimensional chart"
                )));
            }
        }
        // scalars feed Hessians of their differentials, everything else
        // needs two derivatives
        let order = if kind == FieldKind::Scalar { 3 } else { 2 };
        let tables = components.iter().map(|e| DerivativeTable::new(e, n, order)).collect();
        Ok(FieldDef {
            name,
            chart: chart.name().to_string(),
            dim: n,
            kind,
            components,
            tables,
            target: target.map(|t| (t.name().to_string(), t.dim())),
        })
    }

    pub fn parse(
        name: &str,
        chart: &Chart,
        kind: FieldKind,
        sources: &[&str],
        target: Option<&Chart>,
    ) -> Result<Self, OperatorError> {
        let components = sources
            .iter()
            .enumerate()
            .map(|(i, src)| {
                parse_expr(src, chart.coords()).map_err(|source| OperatorError::Parse {
                    context: format!("component {i} of field '{name}'"),
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        FieldDef::new(name, chart, kind, components, target)
    }

    pub fn vector(name: &str, chart: &Chart, sources: &[&str]) -> Result<Self, OperatorError> {
        Self::parse(name, chart, FieldKind::Vector, sources, None)
    }

    pub fn oneform(name: &str, chart: &Chart, sources: &[&str]) -> Result<Self, OperatorError> {
        Self::parse(name, chart, FieldKind::OneForm, sources, None)
    }

    pub fn scalar(name: &str, chart: &Chart, source: &str) -> Result<Self, OperatorError> {
        Self::parse(name, chart, FieldKind::Scalar, &[source], None)
    }

    pub fn map(name: &str, chart: &Chart, target: &Chart, sources: &[&str]) -> Result<Self, OperatorError> {
        Self::parse(name, chart, FieldKind::Map, sources, Some(target))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn chart(&self) -> &str {
        &self.chart
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn target(&self) -> Option<&str> {
        self.target.as_ref().map(|(name, _)| name.as_str())
    }

    fn expect_kind(&self, allowed: &[FieldKind], wanted: &'static str) -> Result<(), OperatorError> {
        if allowed.contains(&self.kind) {
            Ok(())
        } else {
            Err(OperatorError::KindMismatch {
                field: self.name.clone(),
                expected: wanted,
                got: self.kind,
            })
        }
    }

    fn check_point(&self, geo: &LocalGeometry) -> Result<(), OperatorError> {
        if geo.jet.chart != self.chart || geo.dim() != self.dim {
            return Err(OperatorError::ChartMismatch {
                field: self.name.clone(),
                chart: geo.jet.chart.clone(),
            });
        }
        Ok(())
    }

    pub fn scalar_jet(&self, geo: &LocalGeometry) -> Result<ScalarJet, OperatorError> {
        self.expect_kind(&[FieldKind::Scalar], "scalar")?;
        self.check_point(geo)?;
        Ok(ScalarJet::from_table(&self.tables[0], geo.point())?)
    }

    /// The field as a 1-form: lowered for vectors, `dF` for scalars.
    pub fn covector_jet(&self, geo: &LocalGeometry) -> Result<CovectorJet, OperatorError> {
        self.check_point(geo)?;
        match self.kind {
            FieldKind::OneForm => Ok(CovectorJet::from_tables(&self.tables, geo.point())?),
            FieldKind::Vector => Ok(VectorJet::from_tables(&self.tables, geo.point())?.lower(&geo.jet)),
            FieldKind::Scalar => Ok(self.scalar_jet(geo)?.differential()),
            FieldKind::Map => Err(OperatorError::KindMismatch {
                field: self.name.clone(),
                expected: "vector, oneform or scalar",
                got: self.kind,
            }),
        }
    }

    /// The field as a vector: raised for 1-forms, `grad F` for scalars.
    pub fn vector_jet(&self, geo: &LocalGeometry) -> Result<VectorJet, OperatorError> {
        self.check_point(geo)?;
        match self.kind {
            FieldKind::Vector => Ok(VectorJet::from_tables(&self.tables, geo.point())?),
            FieldKind::OneForm => Ok(CovectorJet::from_tables(&self.tables, geo.point())?.raise(&geo.jet)),
            FieldKind::Scalar => Ok(self.scalar_jet(geo)?.gradient(&geo.jet)),
            FieldKind::Map => Err(OperatorError::KindMismatch {
                field: self.name.clone(),
                expected: "vector, oneform or scalar",
                got: self.kind,
            }),
        }
    }

    pub fn map_jet(&self, p: &[f64]) -> Result<MapJet, OperatorError> {
        self.expect_kind(&[FieldKind::Map], "map")?;
        let n = p.len();
        let m = self.components.len();
        let mut value = Array1::zeros(m);
        let mut d1 = Array2::zeros((n, m));
        let mut d2 = Array3::zeros((n, n, m));
        for (beta, table) in self.tables.iter().enumerate() {
            let vals = table.eval(p)?;
            value[beta] = vals.value();
            for a in 0..n {
                d1[[a, beta]] = vals.d1(a);
                for b in 0..n {
                    d2[[a, b, beta]] = vals.d2(a, b);
                }
            }
        }
        Ok(MapJet { value, d1, d2 })
    }
}
