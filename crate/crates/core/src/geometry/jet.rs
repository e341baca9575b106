use nalgebra::DMatrix;
use ndarray::{Array2, Array3, Array4, Array5};

use super::{Chart, GeometryError};

/// Metric values and partial derivatives up to third order at one point,
/// together with the inverse metric and its first two partials.
///
/// Layout: `dg[[k,i,j]] = ∂_k g_ij`, `ddg[[k,l,i,j]] = ∂_k∂_l g_ij`,
/// `dddg[[k,l,m,i,j]] = ∂_k∂_l∂_m g_ij`, and likewise for `g_inv`.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub chart: String,
    pub point: Vec<f64>,
    pub g: Array2<f64>,
    pub dg: Array3<f64>,
    pub ddg: Array4<f64>,
    pub dddg: Array5<f64>,
    pub g_inv: Array2<f64>,
    pub dg_inv: Array3<f64>,
    pub ddg_inv: Array4<f64>,
}

impl MetricJet {
    pub fn dim(&self) -> usize {
        self.point.len()
    }
}

/// Evaluates the metric jet of `chart` at `p`.
///
/// Positive definiteness is checked through the leading principal minors;
/// the inverse comes from a Cholesky factorisation.
pub fn metric_jet(chart: &Chart, p: &[f64]) -> Result<MetricJet, GeometryError> {
    chart.check_point(p)?;
    let n = chart.dim();
    let mut g = Array2::zeros((n, n));
    let mut dg = Array3::zeros((n, n, n));
    let mut ddg = Array4::zeros((n, n, n, n));
    let mut dddg = Array5::zeros((n, n, n, n, n));
    for i in 0..n {
        for j in i..n {
            let vals = chart.metric_table(i, j).eval(p)?;
            for (a, b) in [(i, j), (j, i)] {
                g[[a, b]] = vals.value();
                for k in 0..n {
                    dg[[k, a, b]] = vals.d1(k);
                    for l in 0..n {
                        ddg[[k, l, a, b]] = vals.d2(k, l);
                        for m in 0..n {
                            dddg[[k, l, m, a, b]] = vals.d3(k, l, m);
                        }
                    }
                }
            }
        }
    }

    let gm = DMatrix::from_fn(n, n, |a, b| g[[a, b]]);
    for k in 1..=n {
        let minor = gm.view((0, 0), (k, k)).determinant();
        if !(minor > 0.0) {
            return Err(GeometryError::NotPositiveDefinite {
                point: p.to_vec(),
                minor: k,
                value: minor,
            });
        }
    }
    let chol = gm
        .clone()
        .cholesky()
        .ok_or_else(|| GeometryError::NotPositiveDefinite {
            point: p.to_vec(),
            minor: n,
            value: gm.determinant(),
        })?;
    let inv = chol.inverse();
    let g_inv = Array2::from_shape_fn((n, n), |(a, b)| 0.5 * (inv[(a, b)] + inv[(b, a)]));

    // ∂_k G = -G (∂_k g) G
    let mut dg_inv = Array3::zeros((n, n, n));
    for k in 0..n {
        let dgk = dg.index_axis(ndarray::Axis(0), k);
        let prod = -g_inv.dot(&dgk).dot(&g_inv);
        dg_inv.index_axis_mut(ndarray::Axis(0), k).assign(&prod);
    }
    // ∂_k∂_l G = -(∂_k G)(∂_l g) G - G(∂_k∂_l g)G - G(∂_l g)(∂_k G)
    let mut ddg_inv = Array4::zeros((n, n, n, n));
    for k in 0..n {
        let dgi_k = dg_inv.index_axis(ndarray::Axis(0), k);
        for l in 0..n {
            let dg_l = dg.index_axis(ndarray::Axis(0), l);
            let ddg_kl = ddg.index_axis(ndarray::Axis(0), k);
            let ddg_kl = ddg_kl.index_axis(ndarray::Axis(0), l);
            let term = -dgi_k.dot(&dg_l).dot(&g_inv) - g_inv.dot(&ddg_kl).dot(&g_inv) - g_inv.dot(&dg_l).dot(&dgi_k);
            for a in 0..n {
                for b in 0..n {
                    ddg_inv[[k, l, a, b]] = term[[a, b]];
                }
            }
        }
    }

    Ok(MetricJet {
        chart: chart.name().to_string(),
        point: p.to_vec(),
        g,
        dg,
        ddg,
        dddg,
        g_inv,
        dg_inv,
        ddg_inv,
    })
}
