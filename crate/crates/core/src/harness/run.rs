use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;

use super::manifest::{CheckKind, CheckSpec, Expectation, Manifest, Resolved, RicciSign};
use super::report::{CheckError, CheckReport, ErrorKind, RouteStats, RunReport, Verdict};
use super::sampling::{sample_domain, Sampling};
use super::HarnessError;
use crate::fields::{conformal_residual, holomorphic_residual, iht_residual, killing_residual};
use crate::geometry::{christoffel, riemann, Chart, LocalGeometry, Slot, TensorValue};
use crate::operators::{
    lie_connection, tension_at, tension_identity, yano_box, FieldDef, FieldKind, LieRoute, YanoRoute,
};
use crate::soliton::{
    hamilton_identity_residual, iht_of_soliton_residual, laplacian_gradient_diagnostic, lie_trace_residual,
    ricci_quadratic_form, soliton_residual, trace_identity_residual, SolitonClass, SolitonSpec,
};
use crate::symexpr::Expr;

/// Command-line style overrides applied on top of a manifest.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub tolerance: Option<f64>,
    pub sampling: Option<Sampling>,
    pub seed: Option<u64>,
    /// Record wall-clock times. Reports are then no longer byte-stable.
    pub timings: bool,
}

#[derive(Clone, Copy)]
enum Agg {
    Max,
    Min,
    Mean,
}

#[derive(Default)]
struct PointOutcome {
    residual: f64,
    discrepancy: Option<f64>,
    diagnostics: Vec<(&'static str, f64, Agg)>,
}

impl PointOutcome {
    fn new(residual: f64) -> Self {
        PointOutcome {
            residual,
            ..Default::default()
        }
    }

    fn diag(mut self, name: &'static str, value: f64, agg: Agg) -> Self {
        self.diagnostics.push((name, value, agg));
        self
    }
}

enum Task<'a> {
    Killing(&'a FieldDef),
    Conformal(&'a FieldDef),
    Holomorphic(&'a FieldDef),
    Iht(&'a FieldDef),
    Soliton(SolitonSpec),
    TraceIdentity(SolitonSpec),
    HamiltonIdentity(SolitonSpec),
    LieTrace(SolitonSpec),
    Bianchi,
    YanoRoutes(&'a FieldDef),
    LieRoutes(&'a FieldDef),
    Tension {
        target: &'a Chart,
        field: &'a FieldDef,
        identity: bool,
    },
    ScalarCurvature(f64),
    Einstein(f64),
    RicciSign(&'a FieldDef, RicciSign),
    FlatConnection,
}

struct Prepared<'a> {
    chart: &'a Chart,
    subject: String,
    task: Task<'a>,
    classification: Option<SolitonClass>,
}

fn lookup_field<'a>(check: &CheckSpec, resolved: &'a Resolved) -> Result<&'a FieldDef, String> {
    let name = check
        .field
        .as_deref()
        .ok_or_else(|| format!("{} check needs a field", check.kind))?;
    resolved
        .fields
        .get(name)
        .ok_or_else(|| format!("undefined field '{name}'"))
}

fn require_kind(field: &FieldDef, allowed: &[FieldKind], check: CheckKind) -> Result<(), String> {
    if allowed.contains(&field.kind()) {
        Ok(())
    } else {
        let names: Vec<String> = allowed.iter().map(|k| k.to_string()).collect();
        Err(format!(
            "{check} check needs a {} field, '{}' is a {}",
            names.join(" or "),
            field.name(),
            field.kind()
        ))
    }
}

fn chart_of<'a>(field: &FieldDef, resolved: &'a Resolved) -> &'a Chart {
    &resolved.charts[field.chart()]
}

fn lambda_of(check: &CheckSpec) -> Result<f64, String> {
    check.lambda.ok_or_else(|| format!("{} check needs lambda", check.kind))
}

fn is_identity_map(field: &FieldDef, source: &Chart, target: &Chart) -> bool {
    source.dim() == target.dim() && field.components().iter().enumerate().all(|(i, e)| *e == Expr::coord(i))
}

fn prepare<'a>(check: &CheckSpec, resolved: &'a Resolved) -> Result<Prepared<'a>, String> {
    use CheckKind as K;
    const FIELDLIKE: &[FieldKind] = &[FieldKind::Vector, FieldKind::OneForm, FieldKind::Scalar];

    if check.kind.is_chart_check() {
        let chart = match (&check.chart, &check.field) {
            (Some(name), _) => resolved
                .charts
                .get(name)
                .ok_or_else(|| format!("undefined chart '{name}'"))?,
            (None, Some(_)) => chart_of(lookup_field(check, resolved)?, resolved),
            (None, None) => return Err(format!("{} check needs a chart", check.kind)),
        };
        let expected = || {
            check
                .expected
                .ok_or_else(|| format!("{} check needs an expected value", check.kind))
        };
        let task = match check.kind {
            K::Bianchi => Task::Bianchi,
            K::ScalarCurvature => Task::ScalarCurvature(expected()?),
            K::Einstein => Task::Einstein(expected()?),
            K::FlatConnection => Task::FlatConnection,
            _ => unreachable!("not a chart check"),
        };
        return Ok(Prepared {
            chart,
            subject: chart.name().to_string(),
            task,
            classification: None,
        });
    }

    let field = lookup_field(check, resolved)?;
    let chart = chart_of(field, resolved);
    let mut classification = None;
    let soliton = |f: &FieldDef, lambda: f64| {
        let spec = if f.kind() == FieldKind::Scalar {
            SolitonSpec::gradient(f.clone(), lambda)
        } else {
            SolitonSpec::generic(f.clone(), lambda)
        };
        spec.map_err(|e| e.to_string())
    };
    let task = match check.kind {
        K::Killing | K::Conformal | K::Iht | K::YanoRoutes | K::LieRoutes => {
            require_kind(field, FIELDLIKE, check.kind)?;
            match check.kind {
                K::Killing => Task::Killing(field),
                K::Conformal => Task::Conformal(field),
                K::Iht => Task::Iht(field),
                K::YanoRoutes => Task::YanoRoutes(field),
                _ => Task::LieRoutes(field),
            }
        }
        K::Holomorphic => {
            require_kind(field, FIELDLIKE, check.kind)?;
            if !chart.has_complex_structure() {
                return Err(format!("chart '{}' has no complex structure", chart.name()));
            }
            Task::Holomorphic(field)
        }
        K::Soliton => {
            require_kind(field, &[FieldKind::Vector], check.kind)?;
            let lambda = lambda_of(check)?;
            classification = Some(SolitonClass::from_lambda(lambda));
            Task::Soliton(soliton(field, lambda)?)
        }
        K::GradientSoliton | K::TraceIdentity | K::HamiltonIdentity => {
            require_kind(field, &[FieldKind::Scalar], check.kind)?;
            let lambda = match check.kind {
                K::HamiltonIdentity => check.lambda.unwrap_or(0.0),
                _ => lambda_of(check)?,
            };
            if check.lambda.is_some() {
                classification = Some(SolitonClass::from_lambda(lambda));
            }
            let spec = soliton(field, lambda)?;
            match check.kind {
                K::GradientSoliton => Task::Soliton(spec),
                K::TraceIdentity => Task::TraceIdentity(spec),
                _ => Task::HamiltonIdentity(spec),
            }
        }
        K::LieTrace => {
            require_kind(field, &[FieldKind::Vector, FieldKind::Scalar], check.kind)?;
            Task::LieTrace(soliton(field, check.lambda.unwrap_or(0.0))?)
        }
        K::RicciSign => {
            require_kind(field, FIELDLIKE, check.kind)?;
            let sign = check.sign.ok_or("ricci_sign check needs a sign")?;
            Task::RicciSign(field, sign)
        }
        K::Tension => {
            require_kind(field, &[FieldKind::Map], check.kind)?;
            let target = &resolved.charts[field.target().expect("maps have targets")];
            Task::Tension {
                target,
                field,
                identity: is_identity_map(field, chart, target),
            }
        }
        K::Bianchi | K::ScalarCurvature | K::Einstein | K::FlatConnection => unreachable!("chart checks handled above"),
    };
    Ok(Prepared {
        chart,
        subject: field.name().to_string(),
        task,
        classification,
    })
}

fn tensor_norm(geo: &LocalGeometry, slots: &[Slot], data: ndarray::ArrayD<f64>) -> f64 {
    geo.norm(&TensorValue::new(slots.to_vec(), data, geo.point()))
}

fn evaluate(chart: &Chart, task: &Task<'_>, p: &[f64]) -> Result<PointOutcome, String> {
    let err = |e: &dyn std::fmt::Display| e.to_string();
    if let Task::Tension {
        target,
        field,
        identity,
    } = task
    {
        let (tau, norm) = tension_at(chart, target, field, p).map_err(|e| err(&e))?;
        let mut out = PointOutcome::new(norm);
        if *identity {
            let src = LocalGeometry::at(chart, p).map_err(|e| err(&e))?;
            let tgt = LocalGeometry::at(target, p).map_err(|e| err(&e))?;
            let other = TensorValue::from_array(&[Slot::Upper], tension_identity(&src, &tgt), p);
            out.discrepancy = Some(tgt.norm(&tau.sub(&other)));
        }
        return Ok(out);
    }

    let geo = LocalGeometry::at(chart, p).map_err(|e| err(&e))?;
    let out = match task {
        Task::Killing(f) => PointOutcome::new(killing_residual(&geo, f).map_err(|e| err(&e))?.norm),
        Task::Conformal(f) => PointOutcome::new(conformal_residual(&geo, f).map_err(|e| err(&e))?.norm),
        Task::Holomorphic(f) => PointOutcome::new(holomorphic_residual(chart, &geo, f).map_err(|e| err(&e))?.norm),
        Task::Iht(f) => {
            let s = iht_residual(&geo, f).map_err(|e| err(&e))?;
            PointOutcome {
                residual: s.norm,
                discrepancy: s.route_discrepancy,
                diagnostics: Vec::new(),
            }
        }
        Task::Soliton(spec) => {
            let mut out = PointOutcome::new(soliton_residual(&geo, spec).map_err(|e| err(&e))?.norm);
            if spec.is_gradient() {
                let iht = iht_of_soliton_residual(&geo, spec).map_err(|e| err(&e))?;
                out = out.diag("iht_residual_max", iht.norm, Agg::Max);
            }
            out
        }
        Task::TraceIdentity(spec) => PointOutcome::new(trace_identity_residual(&geo, spec).map_err(|e| err(&e))?),
        Task::HamiltonIdentity(spec) => {
            let r = hamilton_identity_residual(&geo, spec).map_err(|e| err(&e))?;
            let d = laplacian_gradient_diagnostic(&geo, spec).map_err(|e| err(&e))?;
            PointOutcome::new(r.norm).diag("laplacian_gradient_max", d.norm, Agg::Max)
        }
        Task::LieTrace(spec) => PointOutcome::new(lie_trace_residual(&geo, spec).map_err(|e| err(&e))?.norm),
        Task::Bianchi => PointOutcome::new(tensor_norm(&geo, &[Slot::Lower], geo.bianchi_form().into_dyn())),
        Task::YanoRoutes(f) => {
            let theta = f.covector_jet(&geo).map_err(|e| err(&e))?;
            let values: Vec<TensorValue> = YanoRoute::ALL
                .iter()
                .map(|&r| yano_box(&geo, &theta, r).value)
                .collect();
            let mut worst: f64 = 0.0;
            for a in 0..values.len() {
                for b in a + 1..values.len() {
                    worst = worst.max(geo.norm(&values[a].sub(&values[b])));
                }
            }
            PointOutcome {
                residual: worst,
                discrepancy: Some(worst),
                diagnostics: vec![("box_norm_max", geo.norm(&values[0]), Agg::Max)],
            }
        }
        Task::LieRoutes(f) => {
            let xi = f.vector_jet(&geo).map_err(|e| err(&e))?;
            let direct = lie_connection(&geo, &xi, LieRoute::Direct).value;
            let via = lie_connection(&geo, &xi, LieRoute::ViaMetric).value;
            let d = geo.norm(&direct.sub(&via));
            PointOutcome {
                residual: d,
                discrepancy: Some(d),
                diagnostics: vec![("lie_connection_norm_max", geo.norm(&direct), Agg::Max)],
            }
        }
        Task::ScalarCurvature(expected) => PointOutcome::new((geo.scalar - expected).abs())
            .diag("scalar_curvature_min", geo.scalar, Agg::Min)
            .diag("scalar_curvature_max", geo.scalar, Agg::Max),
        Task::Einstein(c) => {
            let r = &geo.ricci - &(geo.g() * *c);
            PointOutcome::new(tensor_norm(&geo, &[Slot::Lower, Slot::Lower], r.into_dyn()))
        }
        Task::RicciSign(f, sign) => {
            let xi = f.vector_jet(&geo).map_err(|e| err(&e))?.v;
            let len2 = xi.dot(&geo.g().dot(&xi));
            let q = if len2 > 0.0 {
                ricci_quadratic_form(&geo, &xi) / len2
            } else {
                0.0
            };
            let residual = match sign {
                RicciSign::Negative => q.max(0.0),
                RicciSign::Positive => (-q).max(0.0),
            };
            PointOutcome::new(residual)
                .diag("negative_fraction", if q < 0.0 { 1.0 } else { 0.0 }, Agg::Mean)
                .diag("normalised_ricci_min", q, Agg::Min)
                .diag("normalised_ricci_max", q, Agg::Max)
        }
        Task::FlatConnection => {
            let gamma = christoffel(&geo.jet);
            let riem = riemann(&geo.jet);
            PointOutcome::new(geo.norm(&gamma)).diag("riemann_norm_max", geo.norm(&riem), Agg::Max)
        }
        Task::Tension { .. } => unreachable!("handled above"),
    };
    Ok(out)
}

fn error_report(
    check: &CheckSpec,
    tolerance: f64,
    subject: Option<String>,
    kind: ErrorKind,
    message: String,
) -> CheckReport {
    CheckReport {
        id: check.id.clone(),
        kind: check.kind,
        subject,
        sampling: None,
        points_evaluated: 0,
        max_residual: None,
        rms_residual: None,
        worst_point: None,
        tolerance,
        verdict: Verdict::Error,
        expect: check.expect,
        expectation_met: false,
        classification: None,
        route_discrepancy: None,
        diagnostics: BTreeMap::new(),
        error: Some(CheckError { kind, message }),
        wall_ms: None,
    }
}

/// Runs one check. Never fails: problems become an error verdict.
pub fn run_check(manifest: &Manifest, resolved: &Resolved, check: &CheckSpec, opts: &RunOptions) -> CheckReport {
    let start = Instant::now();
    let tolerance = opts.tolerance.unwrap_or_else(|| check.effective_tolerance());
    let prepared = match prepare(check, resolved) {
        Ok(p) => p,
        Err(msg) => {
            return error_report(
                check,
                tolerance,
                check.field.clone().or(check.chart.clone()),
                ErrorKind::Resolution,
                msg,
            )
        }
    };
    let subject = Some(prepared.subject.clone());

    let mut sampling = opts
        .sampling
        .clone()
        .or_else(|| check.sampling.clone())
        .or_else(|| resolved.chart_sampling.get(prepared.chart.name()).cloned())
        .unwrap_or_else(|| manifest.sampling.clone());
    if let Some(seed) = opts.seed {
        sampling = sampling.with_seed(seed);
    }
    let points = match sample_domain(prepared.chart.domain(), &sampling) {
        Ok(p) => p,
        Err(e) => return error_report(check, tolerance, subject, ErrorKind::Resolution, e.to_string()),
    };

    let outcomes: Vec<Result<PointOutcome, String>> = points
        .par_iter()
        .map(|p| evaluate(prepared.chart, &prepared.task, p))
        .collect();

    let mut max = f64::NEG_INFINITY;
    let mut worst = 0;
    let mut sum_sq = 0.0;
    let mut disc_max: f64 = 0.0;
    let mut disc_sq = 0.0;
    let mut has_disc = false;
    let mut diags: BTreeMap<String, (f64, Agg)> = BTreeMap::new();
    for (i, outcome) in outcomes.iter().enumerate() {
        let o = match outcome {
            Ok(o) => o,
            Err(msg) => {
                let mut r = error_report(
                    check,
                    tolerance,
                    subject,
                    ErrorKind::Numeric,
                    format!("at point {:?}: {msg}", points[i]),
                );
                r.sampling = Some(sampling);
                return r;
            }
        };
        // NaN residuals must not pass
        let value = if o.residual.is_nan() { f64::INFINITY } else { o.residual };
        if value > max {
            max = value;
            worst = i;
        }
        sum_sq += value * value;
        if let Some(d) = o.discrepancy {
            has_disc = true;
            disc_max = disc_max.max(d);
            disc_sq += d * d;
        }
        for &(name, v, agg) in &o.diagnostics {
            let entry = diags.entry(name.to_string()).or_insert((
                match agg {
                    Agg::Max => f64::NEG_INFINITY,
                    Agg::Min => f64::INFINITY,
                    Agg::Mean => 0.0,
                },
                agg,
            ));
            entry.0 = match agg {
                Agg::Max => entry.0.max(v),
                Agg::Min => entry.0.min(v),
                Agg::Mean => entry.0 + v,
            };
        }
    }
    let count = points.len();
    let diagnostics = diags
        .into_iter()
        .map(|(k, (v, agg))| match agg {
            Agg::Mean => (k, v / count as f64),
            _ => (k, v),
        })
        .collect();

    let verdict = if max <= tolerance { Verdict::Pass } else { Verdict::Fail };
    let class_ok = match (check.expect_class, prepared.classification) {
        (Some(want), Some(got)) => want == got,
        (Some(_), None) => false,
        (None, _) => true,
    };
    let expectation_met = class_ok
        && match check.expect {
            Expectation::Pass => verdict == Verdict::Pass,
            Expectation::Fail => verdict == Verdict::Fail,
        };

    CheckReport {
        id: check.id.clone(),
        kind: check.kind,
        subject,
        sampling: Some(sampling),
        points_evaluated: count,
        max_residual: Some(max),
        rms_residual: Some((sum_sq / count as f64).sqrt()),
        worst_point: Some(points[worst].clone()),
        tolerance,
        verdict,
        expect: check.expect,
        expectation_met,
        classification: prepared.classification,
        route_discrepancy: has_disc.then(|| RouteStats {
            max: disc_max,
            rms: (disc_sq / count as f64).sqrt(),
        }),
        diagnostics,
        error: None,
        wall_ms: opts.timings.then(|| start.elapsed().as_secs_f64() * 1e3),
    }
}

/// Runs every check of a manifest. Errors only when the manifest itself is
/// malformed; per-check problems are reported in the check's entry.
pub fn run_manifest(manifest: &Manifest, opts: &RunOptions) -> Result<RunReport, HarnessError> {
    if let Some(t) = opts.tolerance {
        if !(t.is_finite() && t > 0.0) {
            return Err(HarnessError::InvalidManifest(format!(
                "tolerance override {t} must be positive"
            )));
        }
    }
    if let Some(s) = &opts.sampling {
        s.validate()?;
    }
    let start = Instant::now();
    let resolved = manifest.resolve()?;
    let checks = manifest
        .checks
        .iter()
        .map(|c| run_check(manifest, &resolved, c, opts))
        .collect();
    let mut report = RunReport::new(checks);
    if opts.timings {
        report.wall_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{ChartSpec, FieldSpec, MANIFEST_VERSION};

    fn plane(checks: Vec<CheckSpec>) -> Manifest {
        Manifest {
            version: MANIFEST_VERSION,
            description: None,
            charts: vec![ChartSpec::conformal(
                "plane",
                &["x", "y"],
                "1",
                &[-1.0, -1.0],
                &[1.0, 1.0],
                0.0,
            )],
            fields: vec![
                FieldSpec::new("dil", "plane", FieldKind::Vector, &["x", "y"]),
                FieldSpec::new("sq", "plane", FieldKind::Scalar, &["x^2"]),
            ],
            checks,
            sampling: Sampling::Grid { counts: vec![4] },
        }
    }

    #[test]
    fn dilation_is_not_killing() {
        let m = plane(vec![CheckSpec::on_field("k", CheckKind::Killing, "dil")]);
        let report = run_manifest(&m, &RunOptions::default()).unwrap();
        let c = &report.checks[0];
        assert_eq!(c.verdict, Verdict::Fail);
        assert!((c.max_residual.unwrap() - 8f64.sqrt()).abs() < 1e-12);
        assert_eq!(c.points_evaluated, 16);
        assert_eq!(report.exit_code(), 1);
    }

    #[test]
    fn dangling_reference_is_a_check_error() {
        let m = plane(vec![
            CheckSpec::on_field("missing", CheckKind::Killing, "nope"),
            CheckSpec::on_field("wrong-kind", CheckKind::Holomorphic, "sq"),
            CheckSpec::on_field("conf", CheckKind::Conformal, "dil"),
        ]);
        let report = run_manifest(&m, &RunOptions::default()).unwrap();
        let kinds: Vec<_> = report.checks.iter().map(|c| c.error.as_ref().map(|e| e.kind)).collect();
        assert_eq!(
            kinds,
            vec![Some(ErrorKind::Resolution), Some(ErrorKind::Resolution), None]
        );
        assert_eq!(report.checks[2].verdict, Verdict::Pass);
        assert_eq!(report.exit_code(), 1);
    }

    #[test]
    fn evaluation_outside_metric_domain_is_numeric() {
        let mut m = plane(vec![
            CheckSpec::on_chart("s", CheckKind::ScalarCurvature, "bad").expected(0.0)
        ]);
        m.charts.push(ChartSpec::conformal(
            "bad",
            &["x", "y"],
            "log(x)",
            &[-1.0, 0.5],
            &[1.0, 1.0],
            0.0,
        ));
        let report = run_manifest(&m, &RunOptions::default()).unwrap();
        assert_eq!(report.checks[0].verdict, Verdict::Error);
        assert_eq!(report.exit_code(), 3);
    }

    #[test]
    fn expected_failure_counts_as_met() {
        let m = plane(vec![CheckSpec::on_field("k", CheckKind::Killing, "dil").expect_fail()]);
        let report = run_manifest(&m, &RunOptions::default()).unwrap();
        assert!(report.checks[0].expectation_met);
        assert_eq!(report.exit_code(), 0);
    }

    #[test]
    fn overrides_take_precedence() {
        let m = plane(vec![
            CheckSpec::on_field("k", CheckKind::Killing, "dil").sampling(Sampling::Grid { counts: vec![2] })
        ]);
        let opts = RunOptions {
            tolerance: Some(10.0),
            sampling: Some(Sampling::Halton { count: 7, seed: 0 }),
            seed: Some(5),
            timings: false,
        };
        let report = run_manifest(&m, &opts).unwrap();
        let c = &report.checks[0];
        assert_eq!(c.points_evaluated, 7);
        assert_eq!(c.sampling, Some(Sampling::Halton { count: 7, seed: 5 }));
        assert_eq!(c.verdict, Verdict::Pass);
        assert!(c.wall_ms.is_none());
    }

    #[test]
    fn reports_are_deterministic() {
        let m = plane(vec![CheckSpec::on_field("k", CheckKind::Killing, "dil")]);
        let opts = RunOptions {
            sampling: Some(Sampling::Halton { count: 64, seed: 9 }),
            ..RunOptions::default()
        };
        let a = run_manifest(&m, &opts).unwrap().to_json();
        assert_eq!(a, run_manifest(&m, &opts).unwrap().to_json());
    }
}
