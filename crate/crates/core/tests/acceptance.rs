//! Acceptance criteria 1-10. Prints one line per criterion and exits
//! non-zero if any of them fails.

use std::time::{Duration, Instant};

use harmonic_geom::catalog::{catalog_entries, find_entry, CatalogEntry};
use harmonic_geom::geometry::METRIC_JET_ORDER;
use harmonic_geom::harness::cli::run_cli;
use harmonic_geom::harness::{
    run_manifest, sample_domain, ChartSpec, CheckKind, CheckReport, CheckSpec, FieldSpec, Manifest, RunOptions,
    RunReport, Sampling, Verdict,
};
use harmonic_geom::soliton::SolitonClass;
use harmonic_geom::symexpr::{fd_check_mixed, fd_tolerance_for_order};

type Outcome = Result<String, String>;

fn entry(name: &str) -> CatalogEntry {
    find_entry(name).unwrap_or_else(|| panic!("catalog entry {name}"))
}

fn run(m: &Manifest) -> RunReport {
    run_manifest(m, &RunOptions::default()).expect("manifest runs")
}

fn check<'a>(report: &'a RunReport, id: &str) -> &'a CheckReport {
    report
        .checks
        .iter()
        .find(|c| c.id == id)
        .unwrap_or_else(|| panic!("check {id}"))
}

fn max(c: &CheckReport) -> f64 {
    c.max_residual.unwrap_or(f64::INFINITY)
}

/// Fails unless `c` ran on at least `points` samples and stayed below `bound`.
fn below(c: &CheckReport, bound: f64, points: usize) -> Outcome {
    let m = max(c);
    if c.error.is_some() || c.points_evaluated < points || !(m < bound) {
        return Err(format!(
            "{}: max {m:.3e} on {} points (need < {bound:e} on >= {points})",
            c.id, c.points_evaluated
        ));
    }
    Ok(format!("{} {m:.1e}", c.id))
}

fn all(parts: Vec<Outcome>) -> Outcome {
    let mut ok = Vec::new();
    for p in parts {
        ok.push(p?);
    }
    Ok(ok.join(", "))
}

fn only(m: &Manifest, keep: impl Fn(&CheckSpec) -> bool) -> Manifest {
    let mut m = m.clone();
    m.checks.retain(keep);
    m
}

fn yano_agreement() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    for name in ["round-sphere-S2", "cigar"] {
        let m = only(&entry(name).manifest, |c| c.kind == CheckKind::YanoRoutes);
        let report = run(&m);
        if report.checks.len() != 3 {
            return Err(format!("{name}: {} yano checks", report.checks.len()));
        }
        let worst = report.checks.iter().map(max).fold(0.0, f64::max);
        for c in &report.checks {
            below(c, 1e-8, 200)?;
        }
        parts.push(format!("{name} max {worst:.1e}"));
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(10) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{} in {:.2}s", parts.join(", "), elapsed.as_secs_f64()))
}

fn lie_agreement() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut charts = 0;
    for e in catalog_entries() {
        let m = only(&e.manifest, |c| c.kind == CheckKind::LieRoutes);
        let report = run(&m);
        if report.checks.len() < 3 {
            return Err(format!("{}: {} lie checks", e.name, report.checks.len()));
        }
        for c in &report.checks {
            below(c, 1e-8, 100).map_err(|msg| format!("{}: {msg}", e.name))?;
            worst = worst.max(max(c));
        }
        charts += 1;
    }
    Ok(format!("{charts} charts x 3 fields, max {worst:.1e}"))
}

fn curvature_ground_truth() -> Outcome {
    let mut parts = Vec::new();
    for (name, s) in [
        ("round-sphere-S2", 2.0),
        ("sphere-S3", 6.0),
        ("hyperbolic-half-plane", -2.0),
    ] {
        let e = entry(name);
        let spec = e
            .manifest
            .checks
            .iter()
            .find(|c| c.kind == CheckKind::ScalarCurvature)
            .expect("scalar curvature check");
        if spec.expected != Some(s) {
            return Err(format!("{name}: expected value {:?}", spec.expected));
        }
        let m = only(&e.manifest, |c| c.id == spec.id);
        parts.push(below(&run(&m).checks[0], 1e-8, 100).map(|d| format!("{name} {d}"))?);
    }
    // Every symbolic metric derivative against central differences.
    let mut compared = 0;
    for name in ["round-sphere-S2", "sphere-S3", "hyperbolic-half-plane"] {
        let resolved = entry(name).manifest.resolve().map_err(|e| e.to_string())?;
        for chart in resolved.charts.values() {
            let n = chart.dim();
            let points =
                sample_domain(chart.domain(), &Sampling::Halton { count: 50, seed: 11 }).map_err(|e| e.to_string())?;
            for p in &points {
                for i in 0..n {
                    for j in i..n {
                        let table = chart.metric_table(i, j);
                        let vals = table.eval(p).map_err(|e| e.to_string())?;
                        for idx in multi_indices(n, METRIC_JET_ORDER) {
                            let sym = vals.at(&idx);
                            let err = fd_check_mixed(sym, table.expr(), &idx, p).map_err(|e| e.to_string())?;
                            if err / sym.abs().max(1.0) > fd_tolerance_for_order(idx.len()) {
                                return Err(format!("{name} g_{i}{j} ∂{idx:?} at {p:?}: fd error {err:e}"));
                            }
                            compared += 1;
                        }
                    }
                }
            }
        }
    }
    parts.push(format!("{compared} derivatives fd-checked"));
    Ok(parts.join(", "))
}

/// Sorted multi-indices of orders 1..=max_order.
fn multi_indices(dim: usize, max_order: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut layer = vec![vec![]];
    for _ in 0..max_order {
        layer = layer
            .into_iter()
            .flat_map(|idx: Vec<usize>| {
                let start = idx.last().copied().unwrap_or(0);
                (start..dim).map(move |i| {
                    let mut next = idx.clone();
                    next.push(i);
                    next
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn schur() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut charts = 0;
    for e in catalog_entries() {
        let mut m = e.manifest.clone();
        m.checks = m
            .charts
            .iter()
            .map(|c| CheckSpec::on_chart(format!("bianchi-{}", c.name), CheckKind::Bianchi, &c.name))
            .collect();
        for c in &run(&m).checks {
            below(c, 1e-6, 1).map_err(|msg| format!("{}: {msg}", e.name))?;
            worst = worst.max(max(c));
            charts += 1;
        }
    }
    Ok(format!("{charts} charts, max {worst:.1e}"))
}

fn sphere_examples() -> Outcome {
    let report = run(&entry("round-sphere-S2").manifest);
    all(["rot-killing", "rot-iht", "grad-F1-conformal", "grad-F1-iht"]
        .iter()
        .map(|id| below(check(&report, id), 1e-8, 100))
        .collect())
}

fn class_is(c: &CheckReport, want: SolitonClass) -> Outcome {
    match c.classification {
        Some(got) if got == want => Ok(format!("{} {got}", c.id)),
        got => Err(format!("{}: classified {got:?}, want {want}", c.id)),
    }
}

fn soliton_examples() -> Outcome {
    let gauss = run(&entry("gaussian-shrinker").manifest);
    let cigar = run(&entry("cigar").manifest);
    all(vec![
        below(check(&gauss, "soliton"), 1e-12, 1),
        below(check(&gauss, "gradient-soliton"), 1e-12, 1),
        class_is(check(&gauss, "soliton"), SolitonClass::Shrinking),
        below(check(&gauss, "grad-F-iht"), 1e-8, 1),
        below(check(&gauss, "xi-iht"), 1e-8, 1),
        below(check(&gauss, "xi-lie-trace"), 1e-8, 1),
        below(check(&cigar, "gradient-soliton"), 1e-8, 1),
        class_is(check(&cigar, "gradient-soliton"), SolitonClass::Steady),
        below(check(&cigar, "grad-F-iht"), 1e-8, 1),
        below(check(&cigar, "grad-F-lie-trace"), 1e-8, 1),
    ])
}

fn gradient_identities() -> Outcome {
    let mut parts = Vec::new();
    let cases = [
        ("gaussian-shrinker", "trace-identity", "hamilton-identity"),
        ("cigar", "trace-identity", "hamilton-identity"),
        ("round-sphere-S2", "trivial-trace", "trivial-hamilton"),
        ("hyperbolic-half-plane", "trivial-trace", "trivial-hamilton"),
        ("sphere-S3", "trivial-trace", "trivial-hamilton"),
    ];
    for (name, trace, hamilton) in cases {
        let report = run(&entry(name).manifest);
        below(check(&report, trace), 1e-8, 1).map_err(|m| format!("{name}: {m}"))?;
        below(check(&report, hamilton), 1e-6, 1).map_err(|m| format!("{name}: {m}"))?;
        parts.push(name);
    }
    Ok(format!("trace < 1e-8 and Hamilton < 1e-6 on {}", parts.join(", ")))
}

fn kahler_equivalence() -> Outcome {
    let report = run(&entry("flat-kahler-plane").manifest);
    let mut parts = vec![
        below(check(&report, "z2-holomorphic"), 1e-10, 1)?,
        below(check(&report, "z2-iht"), 1e-10, 1)?,
    ];
    for id in ["zbar-not-holomorphic", "zbar-not-iht"] {
        let c = check(&report, id);
        if c.error.is_some() || !(max(c) > 1e-2) {
            return Err(format!("{id}: max {:.3e} not above 1e-2", max(c)));
        }
        parts.push(format!("{id} {:.2}", max(c)));
    }
    Ok(parts.join(", "))
}

fn tension() -> Outcome {
    // Identity between equal metrics.
    let mut m = entry("round-sphere-S2").manifest;
    m.fields = vec![FieldSpec::map("id", "sphere", "sphere", &["x", "y"])];
    m.checks = vec![CheckSpec::on_field("same", CheckKind::Tension, "id")];
    let same = &run(&m).checks[0];
    if same.error.is_some() || max(same) != 0.0 {
        return Err(format!("identity sphere -> sphere: max {:e}", max(same)));
    }

    let s2 = entry("round-sphere-S2").manifest;
    let mut m = only(&s2, |c| c.kind == CheckKind::Tension);
    m.checks[0] = m.checks[0].clone().sampling(Sampling::Halton { count: 50, seed: 2 });
    let flat_sphere = &run(&m).checks[0];
    let d = flat_sphere.route_discrepancy.map(|r| r.max).unwrap_or(f64::INFINITY);
    if flat_sphere.points_evaluated < 50 || !(d < 1e-10) {
        return Err(format!("flat -> sphere route discrepancy {d:e}"));
    }

    // A non-conformal target, where both routes are non-trivial: τ = (-x, 0).
    let mut m = s2;
    m.charts.push(ChartSpec {
        metric: vec![vec!["1".into(), "0".into()], vec!["0".into(), "1 + x^2".into()]],
        ..ChartSpec::conformal("warped", &["x", "y"], "1", &[-0.9, -0.9], &[0.9, 0.9], 0.05)
    });
    m.fields = vec![FieldSpec::map("id", "plane", "warped", &["x", "y"])];
    m.checks =
        vec![CheckSpec::on_field("warped", CheckKind::Tension, "id").sampling(Sampling::Halton { count: 50, seed: 2 })];
    let warped = &run(&m).checks[0];
    let dw = warped.route_discrepancy.map(|r| r.max).unwrap_or(f64::INFINITY);
    let x = warped.worst_point.as_ref().map(|p| p[0].abs()).unwrap_or(f64::NAN);
    if !(dw < 1e-10) || !((max(warped) - x).abs() < 1e-12) || max(warped) < 0.5 {
        return Err(format!("warped target: |τ| {:e}, discrepancy {dw:e}", max(warped)));
    }
    Ok(format!(
        "equal metrics exactly 0; flat -> S2 discrepancy {d:.1e} (50 pts); flat -> warped |τ| up to {:.2}, discrepancy {dw:.1e}",
        max(warped)
    ))
}

fn cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_cli(
        std::iter::once("harmonic-geom").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (code, String::from_utf8(out).expect("utf-8 output"))
}

fn harness_contract() -> Outcome {
    let start = Instant::now();
    let (code, _) = cli(&["selftest"]);
    let elapsed = start.elapsed();
    if code != 0 || elapsed > Duration::from_secs(60) {
        return Err(format!("selftest exit {code} in {elapsed:?}"));
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cigar = dir.path().join("cigar.json");
    let cigar = cigar.to_str().expect("utf-8 path");
    cli(&["catalog", "export", "cigar", cigar]);
    let args = ["check", cigar, "--samples", "40", "--seed", "17", "--format", "json"];
    let (c1, a) = cli(&args);
    let (c2, b) = cli(&args);
    if c1 != 0 || c2 != 0 || a != b || a.is_empty() {
        return Err(format!("seeded reports differ or fail (exit {c1}/{c2})"));
    }

    let mut m = entry("flat-plane").manifest;
    m.checks = vec![CheckSpec::on_field("dil-killing", CheckKind::Killing, "dil")];
    let failing = dir.path().join("failing.json");
    std::fs::write(&failing, m.to_json()).map_err(|e| e.to_string())?;
    let (code, json) = cli(&["check", failing.to_str().expect("utf-8 path"), "--format", "json"]);
    let report: RunReport = serde_json::from_str(&json).map_err(|e| e.to_string())?;
    let r = max(&report.checks[0]);
    if code != 1 || report.checks[0].verdict != Verdict::Fail || (r - 8f64.sqrt()).abs() > 1e-12 {
        return Err(format!("failing manifest: exit {code}, residual {r}"));
    }
    Ok(format!(
        "selftest exit 0 in {:.2}s, seeded JSON byte-identical, dilation Killing exit 1 with residual {r} (√8 = {})",
        elapsed.as_secs_f64(),
        8f64.sqrt()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("three-route Yano agreement", yano_agreement),
        ("Lie-route agreement", lie_agreement),
        ("curvature ground truth", curvature_ground_truth),
        ("contracted Bianchi", schur),
        ("sphere Killing/conformal instances", sphere_examples),
        ("soliton instances", soliton_examples),
        ("gradient-soliton identities", gradient_identities),
        ("holomorphic/IHT equivalence", kahler_equivalence),
        ("tension field", tension),
        ("harness determinism and contract", harness_contract),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
