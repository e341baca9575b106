use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{HarnessError, Sampling};
use crate::geometry::{Chart, Domain};
use crate::operators::{FieldDef, FieldKind};
use crate::soliton::SolitonClass;

pub const MANIFEST_VERSION: u32 = 1;

/// A verification run: charts, fields on them, and checks over fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub charts: Vec<ChartSpec>,
    #[serde(default)]
    pub fields: Vec<FieldSpec>,
    pub checks: Vec<CheckSpec>,
    #[serde(default)]
    pub sampling: Sampling,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub name: String,
    pub coords: Vec<String>,
    /// Full n×n matrix of expressions; must be symmetric.
    pub metric: Vec<Vec<String>>,
    /// `complex_structure[i][j] = J^i_j`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex_structure: Option<Vec<Vec<String>>>,
    pub domain: DomainSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<Sampling>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    #[serde(default)]
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub name: String,
    pub chart: String,
    pub kind: FieldKind,
    pub components: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Killing,
    Conformal,
    Holomorphic,
    Iht,
    Soliton,
    GradientSoliton,
    TraceIdentity,
    HamiltonIdentity,
    Bianchi,
    YanoRoutes,
    LieRoutes,
    Tension,
    LieTrace,
    ScalarCurvature,
    Einstein,
    RicciSign,
    FlatConnection,
}

impl CheckKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckKind::Killing => "killing",
            CheckKind::Conformal => "conformal",
            CheckKind::Holomorphic => "holomorphic",
            CheckKind::Iht => "iht",
            CheckKind::Soliton => "soliton",
            CheckKind::GradientSoliton => "gradient_soliton",
            CheckKind::TraceIdentity => "trace_identity",
            CheckKind::HamiltonIdentity => "hamilton_identity",
            CheckKind::Bianchi => "bianchi",
            CheckKind::YanoRoutes => "yano_routes",
            CheckKind::LieRoutes => "lie_routes",
            CheckKind::Tension => "tension",
            CheckKind::LieTrace => "lie_trace",
            CheckKind::ScalarCurvature => "scalar_curvature",
            CheckKind::Einstein => "einstein",
            CheckKind::RicciSign => "ricci_sign",
            CheckKind::FlatConnection => "flat_connection",
        }
    }

    /// Checks that consume third derivatives of the metric get a looser
    /// default.
    pub fn default_tolerance(self) -> f64 {
        match self {
            CheckKind::Bianchi | CheckKind::HamiltonIdentity => 1e-6,
            _ => 1e-8,
        }
    }

    pub fn needs_lambda(self) -> bool {
        matches!(
            self,
            CheckKind::Soliton | CheckKind::GradientSoliton | CheckKind::TraceIdentity
        )
    }

    /// Checks that take a chart rather than a field.
    pub fn is_chart_check(self) -> bool {
        matches!(
            self,
            CheckKind::Bianchi | CheckKind::ScalarCurvature | CheckKind::Einstein | CheckKind::FlatConnection
        )
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    #[default]
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RicciSign {
    Negative,
    Positive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub id: String,
    pub kind: CheckKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Target value for `scalar_curvature`, Einstein constant for `einstein`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<RicciSign>,
    #[serde(default, skip_serializing_if = "is_pass")]
    pub expect: Expectation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_class: Option<SolitonClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<Sampling>,
}

fn is_pass(e: &Expectation) -> bool {
    *e == Expectation::Pass
}

impl CheckSpec {
    pub fn new(id: impl Into<String>, kind: CheckKind) -> Self {
        CheckSpec {
            id: id.into(),
            kind,
            field: None,
            chart: None,
            lambda: None,
            tolerance: None,
            expected: None,
            sign: None,
            expect: Expectation::Pass,
            expect_class: None,
            sampling: None,
        }
    }

    pub fn on_field(id: impl Into<String>, kind: CheckKind, field: &str) -> Self {
        CheckSpec {
            field: Some(field.to_string()),
            ..CheckSpec::new(id, kind)
        }
    }

    pub fn on_chart(id: impl Into<String>, kind: CheckKind, chart: &str) -> Self {
        CheckSpec {
            chart: Some(chart.to_string()),
            ..CheckSpec::new(id, kind)
        }
    }

    pub fn lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }

    pub fn expected(mut self, value: f64) -> Self {
        self.expected = Some(value);
        self
    }

    pub fn expect_fail(mut self) -> Self {
        self.expect = Expectation::Fail;
        self
    }

    pub fn class(mut self, class: SolitonClass) -> Self {
        self.expect_class = Some(class);
        self
    }

    pub fn sign(mut self, sign: RicciSign) -> Self {
        self.sign = Some(sign);
        self
    }

    pub fn sampling(mut self, sampling: Sampling) -> Self {
        self.sampling = Some(sampling);
        self
    }

    pub fn effective_tolerance(&self) -> f64 {
        self.tolerance.unwrap_or_else(|| self.kind.default_tolerance())
    }
}

/// Charts and fields built from a manifest's expression strings.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub charts: BTreeMap<String, Chart>,
    pub chart_sampling: BTreeMap<String, Sampling>,
    pub fields: BTreeMap<String, FieldDef>,
}

impl Manifest {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let m: Manifest = serde_json::from_str(text).map_err(HarnessError::Json)?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serialises");
        s.push('\n');
        s
    }

    /// Structural checks that do not need expression parsing. Dangling
    /// references in checks are left to the run, which reports them per
    /// check.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.version != MANIFEST_VERSION {
            return Err(HarnessError::UnsupportedVersion(self.version));
        }
        let invalid = |msg: String| Err(HarnessError::InvalidManifest(msg));
        if self.charts.is_empty() {
            return invalid("manifest defines no charts".into());
        }
        let mut seen = BTreeMap::new();
        for c in &self.charts {
            if seen.insert(c.name.as_str(), ()).is_some() {
                return invalid(format!("duplicate chart '{}'", c.name));
            }
        }
        let mut seen = BTreeMap::new();
        for f in &self.fields {
            if seen.insert(f.name.as_str(), ()).is_some() {
                return invalid(format!("duplicate field '{}'", f.name));
            }
        }
        let mut seen = BTreeMap::new();
        for check in &self.checks {
            if seen.insert(check.id.as_str(), ()).is_some() {
                return invalid(format!("duplicate check id '{}'", check.id));
            }
            if let Some(t) = check.tolerance {
                if !(t.is_finite() && t > 0.0) {
                    return invalid(format!("check '{}' has non-positive tolerance {t}", check.id));
                }
            }
            if let Some(s) = &check.sampling {
                s.validate()?;
            }
        }
        self.sampling.validate()?;
        for c in &self.charts {
            if let Some(s) = &c.sampling {
                s.validate()?;
            }
        }
        Ok(())
    }

    /// Parses every chart and field. Any failure rejects the manifest.
    pub fn resolve(&self) -> Result<Resolved, HarnessError> {
        self.validate()?;
        let mut charts = BTreeMap::new();
        let mut chart_sampling = BTreeMap::new();
        for spec in &self.charts {
            let chart = build_chart(spec).map_err(|source| HarnessError::Chart {
                name: spec.name.clone(),
                source,
            })?;
            if let Some(s) = &spec.sampling {
                chart_sampling.insert(spec.name.clone(), s.clone());
            }
            charts.insert(spec.name.clone(), chart);
        }
        let mut fields = BTreeMap::new();
        for spec in &self.fields {
            let chart = charts.get(&spec.chart).ok_or_else(|| {
                HarnessError::InvalidManifest(format!(
                    "field '{}' refers to unknown chart '{}'",
                    spec.name, spec.chart
                ))
            })?;
            let target = match &spec.target {
                Some(t) => Some(charts.get(t).ok_or_else(|| {
                    HarnessError::InvalidManifest(format!("field '{}' refers to unknown target chart '{t}'", spec.name))
                })?),
                None => None,
            };
            let sources: Vec<&str> = spec.components.iter().map(String::as_str).collect();
            let field = FieldDef::parse(&spec.name, chart, spec.kind, &sources, target).map_err(|source| {
                HarnessError::Field {
                    name: spec.name.clone(),
                    source,
                }
            })?;
            fields.insert(spec.name.clone(), field);
        }
        Ok(Resolved {
            charts,
            chart_sampling,
            fields,
        })
    }
}

fn rows(m: &[Vec<String>]) -> Vec<Vec<&str>> {
    m.iter().map(|r| r.iter().map(String::as_str).collect()).collect()
}

fn build_chart(spec: &ChartSpec) -> Result<Chart, crate::geometry::GeometryError> {
    let coords: Vec<&str> = spec.coords.iter().map(String::as_str).collect();
    let metric = rows(&spec.metric);
    let metric: Vec<&[&str]> = metric.iter().map(Vec::as_slice).collect();
    let complex = spec.complex_structure.as_deref().map(rows);
    let complex: Option<Vec<&[&str]>> = complex.as_ref().map(|m| m.iter().map(Vec::as_slice).collect());
    let domain = Domain::new(spec.domain.lower.clone(), spec.domain.upper.clone(), spec.domain.margin);
    Chart::parse(&spec.name, &coords, &metric, complex.as_deref(), domain)
}

impl ChartSpec {
    /// A chart whose metric is `factor·δ_ij` on a cube.
    pub fn conformal(name: &str, coords: &[&str], factor: &str, lower: &[f64], upper: &[f64], margin: f64) -> Self {
        let n = coords.len();
        let metric = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { factor.to_string() } else { "0".to_string() })
                    .collect()
            })
            .collect();
        ChartSpec {
            name: name.to_string(),
            coords: coords.iter().map(|c| c.to_string()).collect(),
            metric,
            complex_structure: None,
            domain: DomainSpec {
                lower: lower.to_vec(),
                upper: upper.to_vec(),
                margin,
            },
            sampling: None,
        }
    }

    /// Adds the standard complex structure `J∂_x = ∂_y` in 2D.
    pub fn with_standard_j(mut self) -> Self {
        self.complex_structure = Some(vec![
            vec!["0".to_string(), "-1".to_string()],
            vec!["1".to_string(), "0".to_string()],
        ]);
        self
    }

    pub fn with_sampling(mut self, sampling: Sampling) -> Self {
        self.sampling = Some(sampling);
        self
    }
}

impl FieldSpec {
    pub fn new(name: &str, chart: &str, kind: FieldKind, components: &[&str]) -> Self {
        FieldSpec {
            name: name.to_string(),
            chart: chart.to_string(),
            kind,
            components: components.iter().map(|c| c.to_string()).collect(),
            target: None,
        }
    }

    pub fn map(name: &str, chart: &str, target: &str, components: &[&str]) -> Self {
        FieldSpec {
            target: Some(target.to_string()),
            ..FieldSpec::new(name, chart, FieldKind::Map, components)
        }
    }
}
