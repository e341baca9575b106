//! Operators on 1-forms and symmetric 2-tensors.
//!
//! Sign conventions: `d*θ = -g^{ij}∇_iθ_j`, `ΔF = -g^{ij}∇_i∇_jF`,
//! `(δ*θ)_ij = ∇_iθ_j + ∇_jθ_i` and `(δh)_j = -g^{ik}∇_i h_kj`.

use ndarray::{Array1, Array2, Array3};

use super::{OperatorResult, YanoRoute};
use crate::geometry::{
    d_nabla_covector, hessian, nabla_covector, nabla_sym2, second_nabla_covector, CovectorJet, LocalGeometry,
    MetricJet, ScalarJet, Slot, Sym2Jet, TensorValue,
};

/// `θ_i = g_ij ξ^j`.
pub fn flat(jet: &MetricJet, xi: &Array1<f64>) -> Array1<f64> {
    jet.g.dot(xi)
}

/// `ξ^i = g^ij θ_j`.
pub fn sharp(jet: &MetricJet, theta: &Array1<f64>) -> Array1<f64> {
    jet.g_inv.dot(theta)
}

fn trace(g_inv: &Array2<f64>, t: &Array2<f64>) -> f64 {
    (g_inv * t).sum()
}

/// `d*θ = -g^{ij}∇_iθ_j`.
pub fn codifferential(geo: &LocalGeometry, theta: &CovectorJet) -> f64 {
    -trace(geo.g_inv(), &nabla_covector(geo, theta))
}

/// `d(d*θ)`, from the product rule on `-g^{ij}∇_iθ_j`.
pub fn d_codifferential(geo: &LocalGeometry, theta: &CovectorJet) -> Array1<f64> {
    let n = geo.dim();
    let nabla = nabla_covector(geo, theta);
    let d_nabla = d_nabla_covector(geo, theta);
    Array1::from_shape_fn(n, |a| {
        let mut v = 0.0;
        for i in 0..n {
            for j in 0..n {
                v -= geo.jet.dg_inv[[a, i, j]] * nabla[[i, j]] + geo.g_inv()[[i, j]] * d_nabla[[a, i, j]];
            }
        }
        v
    })
}

/// `ΔF = -trace_g ∇∇F`.
pub fn laplacian(geo: &LocalGeometry, f: &ScalarJet) -> f64 {
    -trace(geo.g_inv(), &hessian(geo, f))
}

/// `d(ΔF)`, which consumes third partials of `F`.
pub fn d_laplacian(geo: &LocalGeometry, f: &ScalarJet) -> Array1<f64> {
    d_codifferential(geo, &f.differential())
}

/// Hodge Laplacian `dd*θ + d*dθ`. The `d*d` part is built from the
/// exterior derivative `ω_ij = ∂_iθ_j - ∂_jθ_i` and its partials, not
/// from `∇θ`.
pub fn hodge_laplacian(geo: &LocalGeometry, theta: &CovectorJet) -> Array1<f64> {
    let n = geo.dim();
    let omega = Array2::from_shape_fn((n, n), |(i, j)| theta.d1[[i, j]] - theta.d1[[j, i]]);
    let d_omega = Array3::from_shape_fn((n, n, n), |(a, i, j)| theta.d2[[a, i, j]] - theta.d2[[a, j, i]]);
    let g_inv = geo.g_inv();
    let dd_star = d_codifferential(geo, theta);
    Array1::from_shape_fn(n, |j| {
        let mut div = 0.0;
        for a in 0..n {
            for b in 0..n {
                let mut nab = d_omega[[a, b, j]];
                for m in 0..n {
                    nab -= geo.gamma[[m, a, b]] * omega[[m, j]] + geo.gamma[[m, a, j]] * omega[[b, m]];
                }
                div += g_inv[[a, b]] * nab;
            }
        }
        dd_star[j] - div
    })
}

/// Rough Laplacian `∇*∇θ = -g^{ab}∇_a∇_bθ`.
pub fn bochner_laplacian(geo: &LocalGeometry, theta: &CovectorJet) -> Array1<f64> {
    let n = geo.dim();
    let second = second_nabla_covector(geo, theta);
    let g_inv = geo.g_inv();
    Array1::from_shape_fn(n, |c| {
        let mut v = 0.0;
        for a in 0..n {
            for b in 0..n {
                v -= g_inv[[a, b]] * second[[a, b, c]];
            }
        }
        v
    })
}

/// `(Ric*θ)_i = Ric_ik g^kj θ_j`.
pub fn ricci_star(geo: &LocalGeometry, theta: &Array1<f64>) -> Array1<f64> {
    geo.ricci.dot(&geo.g_inv().dot(theta))
}

/// `(Ric*ξ)^i = g^ij Ric_jk ξ^k`.
pub fn ricci_star_vector(geo: &LocalGeometry, xi: &Array1<f64>) -> Array1<f64> {
    geo.ricci_endomorphism().dot(xi)
}

/// `(δ*θ)_ij = ∇_iθ_j + ∇_jθ_i`.
pub fn delta_star(geo: &LocalGeometry, theta: &CovectorJet) -> Array2<f64> {
    let nabla = nabla_covector(geo, theta);
    &nabla + &nabla.t()
}

/// `δ*θ` with its first partials.
pub fn delta_star_jet(geo: &LocalGeometry, theta: &CovectorJet) -> Sym2Jet {
    let n = geo.dim();
    let d_nabla = d_nabla_covector(geo, theta);
    Sym2Jet {
        h: delta_star(geo, theta),
        d1: Array3::from_shape_fn((n, n, n), |(a, i, j)| d_nabla[[a, i, j]] + d_nabla[[a, j, i]]),
    }
}

/// `(δh)_j = -g^{ik}∇_i h_kj`.
pub fn delta_sym(geo: &LocalGeometry, h: &Sym2Jet) -> Array1<f64> {
    let n = geo.dim();
    let nabla = nabla_sym2(geo, h);
    let g_inv = geo.g_inv();
    Array1::from_shape_fn(n, |j| {
        let mut v = 0.0;
        for i in 0..n {
            for k in 0..n {
                v -= g_inv[[i, k]] * nabla[[i, k, j]];
            }
        }
        v
    })
}

/// The Yano operator `□θ = δδ*θ - δ*δθ` by one of three assemblies.
pub fn yano_box(geo: &LocalGeometry, theta: &CovectorJet, route: YanoRoute) -> OperatorResult<YanoRoute> {
    let value = match route {
        // on functions δ* is d and δ on 1-forms is d*
        YanoRoute::Direct => delta_sym(geo, &delta_star_jet(geo, theta)) - d_codifferential(geo, theta),
        YanoRoute::Hodge => hodge_laplacian(geo, theta) - 2.0 * ricci_star(geo, &theta.w),
        YanoRoute::Bochner => bochner_laplacian(geo, theta) - ricci_star(geo, &theta.w),
    };
    OperatorResult {
        value: TensorValue::from_array(&[Slot::Lower], value, geo.point()),
        route,
    }
}
