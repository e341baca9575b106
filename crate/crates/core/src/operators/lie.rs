use ndarray::{Array1, Array2, Array3};

use super::{LieRoute, OperatorResult};
use crate::geometry::{nabla_sym2, second_nabla_vector, LocalGeometry, Slot, Sym2Jet, TensorValue, VectorJet};

/// `(L_ξg)_ij = ξ^m∂_m g_ij + g_mj∂_iξ^m + g_im∂_jξ^m`, in coordinates and
/// without the connection.
pub fn lie_metric(geo: &LocalGeometry, xi: &VectorJet) -> Array2<f64> {
    lie_metric_jet(geo, xi).h
}

/// `L_ξg` with its first partials.
pub fn lie_metric_jet(geo: &LocalGeometry, xi: &VectorJet) -> Sym2Jet {
    let n = geo.dim();
    let jet = &geo.jet;
    let h = Array2::from_shape_fn((n, n), |(i, j)| {
        (0..n)
            .map(|m| xi.v[m] * jet.dg[[m, i, j]] + jet.g[[m, j]] * xi.d1[[i, m]] + jet.g[[i, m]] * xi.d1[[j, m]])
            .sum()
    });
    let d1 = Array3::from_shape_fn((n, n, n), |(a, i, j)| {
        (0..n)
            .map(|m| {
                xi.d1[[a, m]] * jet.dg[[m, i, j]]
                    + xi.v[m] * jet.ddg[[a, m, i, j]]
                    + jet.dg[[a, m, j]] * xi.d1[[i, m]]
                    + jet.g[[m, j]] * xi.d2[[a, i, m]]
                    + jet.dg[[a, i, m]] * xi.d1[[j, m]]
                    + jet.g[[i, m]] * xi.d2[[a, j, m]]
            })
            .sum()
    });
    Sym2Jet { h, d1 }
}

/// `L_ξΓ^k_ij` as `[k,i,j]`.
///
/// `Direct` is `∇_i∇_jξ^k + R^k_{jmi}ξ^m`, i.e. `∇∇ξ + R(ξ,∂_i)∂_j`;
/// `ViaMetric` is `½g^{kl}(∇_i h_jl + ∇_j h_il - ∇_l h_ij)` with `h = L_ξg`.
pub fn lie_connection(geo: &LocalGeometry, xi: &VectorJet, route: LieRoute) -> OperatorResult<LieRoute> {
    let n = geo.dim();
    let value = match route {
        LieRoute::Direct => {
            let second = second_nabla_vector(geo, xi);
            Array3::from_shape_fn((n, n, n), |(k, i, j)| {
                second[[i, j, k]] + (0..n).map(|m| geo.riemann[[k, j, m, i]] * xi.v[m]).sum::<f64>()
            })
        }
        LieRoute::ViaMetric => {
            let nabla_h = nabla_sym2(geo, &lie_metric_jet(geo, xi));
            let g_inv = geo.g_inv();
            Array3::from_shape_fn((n, n, n), |(k, i, j)| {
                0.5 * (0..n)
                    .map(|l| g_inv[[k, l]] * (nabla_h[[i, j, l]] + nabla_h[[j, i, l]] - nabla_h[[l, i, j]]))
                    .sum::<f64>()
            })
        }
    };
    OperatorResult {
        value: TensorValue::from_array(&[Slot::Upper, Slot::Lower, Slot::Lower], value, geo.point()),
        route,
    }
}

/// `g^{ij} L_ξΓ^k_ij`.
pub fn lie_connection_trace(geo: &LocalGeometry, lie_gamma: &TensorValue) -> Array1<f64> {
    let n = geo.dim();
    let g_inv = geo.g_inv();
    Array1::from_shape_fn(n, |k| {
        let mut v = 0.0;
        for i in 0..n {
            for j in 0..n {
                v += g_inv[[i, j]] * lie_gamma.data[[k, i, j]];
            }
        }
        v
    })
}
