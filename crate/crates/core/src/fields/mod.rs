//! Pointwise residuals for Killing, conformal Killing, holomorphic and
//! infinitesimal harmonic vector fields. Every classifier returns a norm;
//! thresholds are the caller's business.

use ndarray::{Array2, Array3};

use crate::geometry::{Chart, LocalGeometry, Slot, TensorValue, VectorJet};
use crate::operators::{
    codifferential, hodge_laplacian, lie_metric, ricci_star, yano_box, FieldDef, OperatorError, YanoRoute,
};

/// A residual tensor at one point with its g-norm. Multi-route residuals
/// also carry the g-norm of the difference between routes.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualSample {
    pub point: Vec<f64>,
    pub residual: TensorValue,
    pub norm: f64,
    pub route_discrepancy: Option<f64>,
}

impl ResidualSample {
    pub fn new(geo: &LocalGeometry, residual: TensorValue) -> Self {
        let norm = geo.norm(&residual);
        ResidualSample {
            point: geo.point().to_vec(),
            residual,
            norm,
            route_discrepancy: None,
        }
    }
}

/// `L_ξg`.
pub fn killing_residual(geo: &LocalGeometry, xi: &FieldDef) -> Result<ResidualSample, OperatorError> {
    let jet = xi.vector_jet(geo)?;
    let h = lie_metric(geo, &jet);
    Ok(ResidualSample::new(
        geo,
        TensorValue::from_array(&[Slot::Lower, Slot::Lower], h, geo.point()),
    ))
}

/// Trace-free part of `L_ξg`: `L_ξg + (2/n)(d*θ)g`.
pub fn conformal_residual(geo: &LocalGeometry, xi: &FieldDef) -> Result<ResidualSample, OperatorError> {
    let jet = xi.vector_jet(geo)?;
    let theta = jet.lower(&geo.jet);
    let n = geo.dim() as f64;
    let h = lie_metric(geo, &jet) + geo.g() * (2.0 / n * codifferential(geo, &theta));
    Ok(ResidualSample::new(
        geo,
        TensorValue::from_array(&[Slot::Lower, Slot::Lower], h, geo.point()),
    ))
}

/// `(L_ξJ)^i_j = ξ^k∂_kJ^i_j - J^k_j∂_kξ^i + J^i_k∂_jξ^k`.
pub fn lie_complex_structure(j: &Array2<f64>, dj: &Array3<f64>, xi: &VectorJet) -> Array2<f64> {
    let n = j.nrows();
    Array2::from_shape_fn((n, n), |(a, b)| {
        (0..n)
            .map(|k| xi.v[k] * dj[[k, a, b]] - j[[k, b]] * xi.d1[[k, a]] + j[[a, k]] * xi.d1[[b, k]])
            .sum()
    })
}

/// `L_ξJ`; the chart must carry a complex structure.
pub fn holomorphic_residual(
    chart: &Chart,
    geo: &LocalGeometry,
    xi: &FieldDef,
) -> Result<ResidualSample, OperatorError> {
    let (j, dj) = chart.complex_structure_jet(geo.point())?;
    let jet = xi.vector_jet(geo)?;
    let r = lie_complex_structure(&j, &dj, &jet);
    Ok(ResidualSample::new(
        geo,
        TensorValue::from_array(&[Slot::Upper, Slot::Lower], r, geo.point()),
    ))
}

/// `Δθ - 2Ric*θ` with `θ = ξ♭`; the discrepancy is against `□θ` assembled
/// as `δδ*θ - δ*δθ`.
pub fn iht_residual(geo: &LocalGeometry, xi: &FieldDef) -> Result<ResidualSample, OperatorError> {
    let theta = xi.covector_jet(geo)?;
    let hodge = hodge_laplacian(geo, &theta) - 2.0 * ricci_star(geo, &theta.w);
    let residual = TensorValue::from_array(&[Slot::Lower], hodge, geo.point());
    let direct = yano_box(geo, &theta, YanoRoute::Direct);
    let mut sample = ResidualSample::new(geo, residual);
    sample.route_discrepancy = Some(geo.norm(&sample.residual.sub(&direct.value)));
    Ok(sample)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Domain;
    use crate::operators::{d_laplacian, ricci_star};

    fn conformal(name: &str, f: &str, half: f64, j: bool) -> Chart {
        let js: &[&[&str]] = &[&["0", "-1"], &["1", "0"]];
        Chart::parse(
            name,
            &["x", "y"],
            &[&[f, "0"], &["0", f]],
            j.then_some(js),
            Domain::new(vec![-half, -half], vec![half, half], 0.05),
        )
        .unwrap()
    }

    fn grid(half: f64) -> Vec<[f64; 2]> {
        let mut pts = Vec::new();
        for i in 0..7 {
            for k in 0..7 {
                pts.push([-half + half * i as f64 / 3.0, -half + half * k as f64 / 3.0]);
            }
        }
        pts
    }

    #[test]
    fn flat_plane_classifications() {
        let plane = conformal("plane", "1", 1.0, true);
        let rot = FieldDef::vector("rot", &plane, &["-y", "x"]).unwrap();
        let dil = FieldDef::vector("dil", &plane, &["x", "y"]).unwrap();
        let z2 = FieldDef::vector("z2", &plane, &["x^2-y^2", "2*x*y"]).unwrap();
        let bar = FieldDef::vector("bar", &plane, &["x", "0"]).unwrap();
        let c = FieldDef::vector("c", &plane, &["2", "-3"]).unwrap();
        for p in grid(1.0) {
            let geo = LocalGeometry::at(&plane, &p).unwrap();
            assert_eq!(killing_residual(&geo, &rot).unwrap().norm, 0.0);
            assert_eq!(conformal_residual(&geo, &rot).unwrap().norm, 0.0);
            assert_eq!(killing_residual(&geo, &dil).unwrap().norm, 8.0_f64.sqrt());
            assert_eq!(conformal_residual(&geo, &dil).unwrap().norm, 0.0);
            assert_eq!(holomorphic_residual(&plane, &geo, &z2).unwrap().norm, 0.0);
            assert_eq!(holomorphic_residual(&plane, &geo, &c).unwrap().norm, 0.0);
            // ∂ξ = diag(1,0) is not complex-linear: |[J, ∂ξ]| = √2
            assert!((holomorphic_residual(&plane, &geo, &bar).unwrap().norm - 2.0_f64.sqrt()).abs() < 1e-15);
            assert_eq!(iht_residual(&geo, &z2).unwrap().norm, 0.0);
        }
    }

    #[test]
    fn missing_complex_structure() {
        let plane = conformal("plane", "1", 1.0, false);
        let c = FieldDef::vector("c", &plane, &["1", "0"]).unwrap();
        let geo = LocalGeometry::at(&plane, &[0.0, 0.0]).unwrap();
        assert!(holomorphic_residual(&plane, &geo, &c).is_err());
    }

    #[test]
    fn sphere_rotation_and_first_harmonic() {
        let sphere = conformal("sphere", "4/(1+x^2+y^2)^2", 0.9, false);
        let rot = FieldDef::vector("rot", &sphere, &["-y", "x"]).unwrap();
        let f1 = FieldDef::scalar("F1", &sphere, "(x^2+y^2-1)/(x^2+y^2+1)").unwrap();
        for p in grid(0.9) {
            let geo = LocalGeometry::at(&sphere, &p).unwrap();
            assert!(killing_residual(&geo, &rot).unwrap().norm < 1e-10);
            let iht = iht_residual(&geo, &rot).unwrap();
            assert!(iht.norm < 1e-8 && iht.route_discrepancy.unwrap() < 1e-8);
            assert!(conformal_residual(&geo, &f1).unwrap().norm < 1e-8);
            assert!(killing_residual(&geo, &f1).unwrap().norm > 1e-3 || p == [0.0, 0.0]);
            assert!(iht_residual(&geo, &f1).unwrap().norm < 1e-8);
        }
    }

    #[test]
    fn gradient_fields_on_flat_charts() {
        // for θ = dF and Ric = 0, Δθ - 2Ric*θ = d(ΔF)
        let plane = conformal("plane", "1", 1.0, false);
        let f = FieldDef::scalar("F", &plane, "x^3*y - exp(y)*x^2").unwrap();
        for p in grid(1.0) {
            let geo = LocalGeometry::at(&plane, &p).unwrap();
            let jet = f.scalar_jet(&geo).unwrap();
            let expected = d_laplacian(&geo, &jet) - 2.0 * ricci_star(&geo, &jet.d1);
            let got = iht_residual(&geo, &f).unwrap();
            for (a, b) in got.residual.data.iter().zip(expected.iter()) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }
}
