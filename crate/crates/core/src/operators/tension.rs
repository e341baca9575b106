use ndarray::Array1;

use super::{FieldDef, MapJet, OperatorError};
use crate::geometry::{Chart, GeometryError, LocalGeometry, Slot, TensorValue};

/// Tension `τ^β = g^{ij}(∂_i∂_j f^β - Γ^k_ij ∂_k f^β + Γ'^β_{αγ}(f) ∂_i f^α ∂_j f^γ)`,
/// with `target` evaluated at `f(p)`.
pub fn tension_field(source: &LocalGeometry, target: &LocalGeometry, f: &MapJet) -> Array1<f64> {
    let n = source.dim();
    let m = target.dim();
    let g_inv = source.g_inv();
    Array1::from_shape_fn(m, |beta| {
        let mut tau = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut v = f.d2[[i, j, beta]];
                for k in 0..n {
                    v -= source.gamma[[k, i, j]] * f.d1[[k, beta]];
                }
                for a in 0..m {
                    for c in 0..m {
                        v += target.gamma[[beta, a, c]] * f.d1[[i, a]] * f.d1[[j, c]];
                    }
                }
                tau += g_inv[[i, j]] * v;
            }
        }
        tau
    })
}

/// Tension of the identity map between two metrics on the same
/// coordinates: `g^{ij}(Γ'^k_ij - Γ^k_ij)`, both at the same point.
pub fn tension_identity(source: &LocalGeometry, target: &LocalGeometry) -> Array1<f64> {
    let n = source.dim();
    let g_inv = source.g_inv();
    Array1::from_shape_fn(n, |k| {
        let mut tau = 0.0;
        for i in 0..n {
            for j in 0..n {
                tau += g_inv[[i, j]] * (target.gamma[[k, i, j]] - source.gamma[[k, i, j]]);
            }
        }
        tau
    })
}

/// Tension of the map `f` at `p` together with its norm in the target
/// metric.
pub fn tension_at(
    source: &Chart,
    target: &Chart,
    f: &FieldDef,
    p: &[f64],
) -> Result<(TensorValue, f64), OperatorError> {
    if f.target() != Some(target.name()) || f.chart() != source.name() {
        return Err(OperatorError::ChartMismatch {
            field: f.name().to_string(),
            chart: format!("{} -> {}", source.name(), target.name()),
        });
    }
    let src = LocalGeometry::at(source, p)?;
    let jet = f.map_jet(p)?;
    let image = jet.value.to_vec();
    let tgt = LocalGeometry::at(target, &image).map_err(|e| match e {
        GeometryError::OutsideDomain { point } => OperatorError::OutsideTarget { point },
        other => other.into(),
    })?;
    let tau = TensorValue::from_array(&[Slot::Upper], tension_field(&src, &tgt, &jet), &image);
    let norm = tgt.norm(&tau);
    Ok((tau, norm))
}
