use ndarray::{Array2, Array3};

use super::{CovectorJet, LocalGeometry, ScalarJet, Slot, Sym2Jet, TensorValue, VectorJet};

/// Input to [`covariant_derivative`].
#[derive(Debug, Clone, Copy)]
pub enum CovariantInput<'a> {
    Scalar(&'a ScalarJet),
    OneForm(&'a CovectorJet),
    Vector(&'a VectorJet),
    Sym2(&'a Sym2Jet),
}

/// Levi-Civita covariant derivative; the derivative slot comes first.
pub fn covariant_derivative(geo: &LocalGeometry, input: CovariantInput<'_>) -> TensorValue {
    let p = geo.point();
    match input {
        CovariantInput::Scalar(f) => TensorValue::from_array(&[Slot::Lower], f.d1.clone(), p),
        CovariantInput::OneForm(w) => TensorValue::from_array(&[Slot::Lower, Slot::Lower], nabla_covector(geo, w), p),
        CovariantInput::Vector(v) => TensorValue::from_array(&[Slot::Lower, Slot::Upper], nabla_vector(geo, v), p),
        CovariantInput::Sym2(h) => {
            TensorValue::from_array(&[Slot::Lower, Slot::Lower, Slot::Lower], nabla_sym2(geo, h), p)
        }
    }
}

/// `∇∇F = ∂∂F - Γ ∂F`.
pub fn hessian(geo: &LocalGeometry, f: &ScalarJet) -> Array2<f64> {
    let n = geo.dim();
    Array2::from_shape_fn((n, n), |(i, j)| {
        f.d2[[i, j]] - (0..n).map(|k| geo.gamma[[k, i, j]] * f.d1[k]).sum::<f64>()
    })
}

/// `[i,j] = ∇_i θ_j`.
pub fn nabla_covector(geo: &LocalGeometry, w: &CovectorJet) -> Array2<f64> {
    let n = geo.dim();
    Array2::from_shape_fn((n, n), |(i, j)| {
        w.d1[[i, j]] - (0..n).map(|k| geo.gamma[[k, i, j]] * w.w[k]).sum::<f64>()
    })
}

/// `[a,i,j] = ∂_a(∇_i θ_j)`.
pub fn d_nabla_covector(geo: &LocalGeometry, w: &CovectorJet) -> Array3<f64> {
    let n = geo.dim();
    Array3::from_shape_fn((n, n, n), |(a, i, j)| {
        let mut v = w.d2[[a, i, j]];
        for k in 0..n {
            v -= geo.dgamma[[a, k, i, j]] * w.w[k] + geo.gamma[[k, i, j]] * w.d1[[a, k]];
        }
        v
    })
}

/// `[a,b,c] = ∇_a∇_b θ_c`, the second covariant derivative.
pub fn second_nabla_covector(geo: &LocalGeometry, w: &CovectorJet) -> Array3<f64> {
    let n = geo.dim();
    let nabla = nabla_covector(geo, w);
    let d_nabla = d_nabla_covector(geo, w);
    Array3::from_shape_fn((n, n, n), |(a, b, c)| {
        let mut v = d_nabla[[a, b, c]];
        for m in 0..n {
            v -= geo.gamma[[m, a, b]] * nabla[[m, c]] + geo.gamma[[m, a, c]] * nabla[[b, m]];
        }
        v
    })
}

/// `[i,k] = ∇_i ξ^k`.
pub fn nabla_vector(geo: &LocalGeometry, xi: &VectorJet) -> Array2<f64> {
    let n = geo.dim();
    Array2::from_shape_fn((n, n), |(i, k)| {
        xi.d1[[i, k]] + (0..n).map(|m| geo.gamma[[k, i, m]] * xi.v[m]).sum::<f64>()
    })
}

/// `[i,j,k] = ∇_i∇_j ξ^k`.
pub fn second_nabla_vector(geo: &LocalGeometry, xi: &VectorJet) -> Array3<f64> {
    let n = geo.dim();
    let nabla = nabla_vector(geo, xi);
    // ∂_i(∇_j ξ^k)
    let d_nabla = Array3::from_shape_fn((n, n, n), |(i, j, k)| {
        let mut v = xi.d2[[i, j, k]];
        for m in 0..n {
            v += geo.dgamma[[i, k, j, m]] * xi.v[m] + geo.gamma[[k, j, m]] * xi.d1[[i, m]];
        }
        v
    });
    Array3::from_shape_fn((n, n, n), |(i, j, k)| {
        let mut v = d_nabla[[i, j, k]];
        for m in 0..n {
            v += geo.gamma[[k, i, m]] * nabla[[j, m]] - geo.gamma[[m, i, j]] * nabla[[m, k]];
        }
        v
    })
}

/// `[a,i,j] = ∇_a h_ij`.
pub fn nabla_sym2(geo: &LocalGeometry, h: &Sym2Jet) -> Array3<f64> {
    let n = geo.dim();
    Array3::from_shape_fn((n, n, n), |(a, i, j)| {
        let mut v = h.d1[[a, i, j]];
        for m in 0..n {
            v -= geo.gamma[[m, a, i]] * h.h[[m, j]] + geo.gamma[[m, a, j]] * h.h[[i, m]];
        }
        v
    })
}

/// `∇g`, which must vanish for the Levi-Civita connection.
pub fn metric_compatibility(geo: &LocalGeometry) -> Array3<f64> {
    nabla_sym2(geo, &Sym2Jet::metric(&geo.jet))
}
