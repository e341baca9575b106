use harmonic_geom::geometry::{Chart, Domain, LocalGeometry};
use harmonic_geom::harness::{sample_domain, Sampling};
use harmonic_geom::operators::{lie_connection, yano_box, FieldDef, LieRoute, YanoRoute};
use harmonic_geom::symexpr::parse_expr;
use proptest::prelude::*;

fn xy() -> Vec<String> {
    vec!["x".into(), "y".into()]
}

/// Expression sources over x, y that stay finite on the unit box.
fn expr_source() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("x".to_string()),
        Just("y".to_string()),
        (1u32..9).prop_map(|c| format!("{}", c as f64 / 4.0)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} * {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) / (2 + ({b})^2)")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("exp(({a})/4)")),
            inner.clone().prop_map(|a| format!("sqrt(1 + ({a})^2)")),
            inner.prop_map(|a| format!("({a})^3")),
        ]
    })
}

fn point() -> impl Strategy<Value = [f64; 2]> {
    [-0.8..0.8f64, -0.8..0.8f64]
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn display_parses_back_to_the_same_function(src in expr_source(), p in point()) {
        let e = parse_expr(&src, &xy()).unwrap();
        let shown = e.display(&xy()).to_string();
        let back = parse_expr(&shown, &xy()).unwrap();
        prop_assert_eq!(back.eval(&p).unwrap().to_bits(), e.eval(&p).unwrap().to_bits());
    }

    #[test]
    fn mixed_partials_commute(src in expr_source(), p in point()) {
        let e = parse_expr(&src, &xy()).unwrap();
        let xy_ = e.diff(0).diff(1).eval(&p).unwrap();
        let yx = e.diff(1).diff(0).eval(&p).unwrap();
        prop_assert!(close(xy_, yx, 1e-9), "{} vs {}", xy_, yx);
    }

    #[test]
    fn surface_curvature_is_isotropic(a in -1.0..1.0f64, b in -1.0..1.0f64, c in 0.5..2.0f64, p in point()) {
        // Any 2D metric has Ric = (s/2) g and satisfies 2 div Ric = ds.
        let g11 = format!("{c} + {a}*x^2");
        let g12 = format!("{b}*x*y/4");
        let g22 = format!("exp({a}*y/2) + y^2");
        let metric: [&[&str]; 2] = [&[&g11, &g12], &[&g12, &g22]];
        let chart = Chart::parse("m", &["x", "y"], &metric, None, Domain::new(vec![-1.0; 2], vec![1.0; 2], 0.0)).unwrap();
        let geo = match LocalGeometry::at(&chart, &p) {
            Ok(g) => g,
            Err(_) => return Err(TestCaseError::reject("metric not positive definite here")),
        };
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!(close(geo.ricci[[i, j]], geo.scalar / 2.0 * geo.g()[[i, j]], 1e-9));
                for k in 0..2 {
                    prop_assert_eq!(geo.gamma[[k, i, j]], geo.gamma[[k, j, i]]);
                }
            }
        }
        prop_assert!(geo.bianchi_form().iter().all(|v| v.abs() < 1e-8 * geo.scalar.abs().max(1.0)));
    }

    #[test]
    fn yano_and_lie_routes_agree_for_random_fields(u in expr_source(), v in expr_source(), p in point()) {
        let domain = Domain::new(vec![-1.0; 2], vec![1.0; 2], 0.0);
        let metric: [&[&str]; 2] = [&["4/(1+x^2+y^2)^2", "0"], &["0", "4/(1+x^2+y^2)^2"]];
        let chart = Chart::parse("sphere", &["x", "y"], &metric, None, domain).unwrap();
        let geo = LocalGeometry::at(&chart, &p).unwrap();

        let theta = FieldDef::oneform("theta", &chart, &[u.as_str(), v.as_str()]).unwrap();
        let theta = theta.covector_jet(&geo).unwrap();
        let direct = yano_box(&geo, &theta, YanoRoute::Direct).value;
        let scale = geo.norm(&direct).max(1.0);
        for &route in &YanoRoute::ALL[1..] {
            let other = yano_box(&geo, &theta, route).value;
            prop_assert!(geo.norm(&direct.sub(&other)) < 1e-9 * scale, "{}", route);
        }

        let xi = FieldDef::vector("xi", &chart, &[u.as_str(), v.as_str()]).unwrap();
        let xi = xi.vector_jet(&geo).unwrap();
        let a = lie_connection(&geo, &xi, LieRoute::Direct).value;
        let b = lie_connection(&geo, &xi, LieRoute::ViaMetric).value;
        prop_assert!(geo.norm(&a.sub(&b)) < 1e-9 * geo.norm(&a).max(1.0));
    }

    #[test]
    fn samples_stay_in_the_box(count in 1usize..300, seed in any::<u64>(), lo in -3.0..0.0f64, width in 0.1..4.0f64) {
        let domain = Domain::new(vec![lo, lo], vec![lo + width, lo + 2.0 * width], 0.0);
        let pts = sample_domain(&domain, &Sampling::Halton { count, seed }).unwrap();
        prop_assert_eq!(pts.len(), count);
        prop_assert!(pts.iter().all(|p| domain.contains(p)));
    }
}
