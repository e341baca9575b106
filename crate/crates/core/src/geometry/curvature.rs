//! Levi-Civita connection and curvature assembled from a [`MetricJet`].
//!
//! Conventions (see `docs/conventions.md`):
//!
//! * `gamma[[k,i,j]] = Γ^k_ij`, `dgamma[[m,k,i,j]] = ∂_m Γ^k_ij`,
//!   `ddgamma[[p,m,k,i,j]] = ∂_p∂_m Γ^k_ij`.
//! * `riemann[[k,l,i,j]] = R^k_{lij}` with
//!   `R(∂_i,∂_j)∂_l = R^k_{lij} ∂_k = (∂_iΓ^k_{jl} - ∂_jΓ^k_{il} + Γ^k_{im}Γ^m_{jl} - Γ^k_{jm}Γ^m_{il}) ∂_k`.
//! * `Ric_{jl} = R^i_{jil}`, so the unit round sphere has `Ric = g`.

use ndarray::{Array1, Array2, Array3, Array4, Array5};

use super::{metric_jet, Chart, GeometryError, MetricJet, Slot, TensorValue};

/// Everything curvature-related at one point of a chart.
#[derive(Debug, Clone)]
pub struct LocalGeometry {
    pub jet: MetricJet,
    pub gamma: Array3<f64>,
    pub dgamma: Array4<f64>,
    pub ddgamma: Array5<f64>,
    pub riemann: Array4<f64>,
    pub ricci: Array2<f64>,
    pub scalar: f64,
    /// `dricci[[p,j,l]] = ∂_p Ric_jl`
    pub dricci: Array3<f64>,
    pub dscalar: Array1<f64>,
}

impl LocalGeometry {
    pub fn at(chart: &Chart, p: &[f64]) -> Result<Self, GeometryError> {
        Ok(Self::from_jet(metric_jet(chart, p)?))
    }

    pub fn from_jet(jet: MetricJet) -> Self {
        let n = jet.dim();
        let (gamma, dgamma, ddgamma) = connection(&jet);

        let mut riemann = Array4::zeros((n, n, n, n));
        let mut driemann = Array5::zeros((n, n, n, n, n));
        for k in 0..n {
            for l in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut r = dgamma[[i, k, j, l]] - dgamma[[j, k, i, l]];
                        for m in 0..n {
                            r += gamma[[k, i, m]] * gamma[[m, j, l]] - gamma[[k, j, m]] * gamma[[m, i, l]];
                        }
                        riemann[[k, l, i, j]] = r;
                        for p in 0..n {
                            let mut dr = ddgamma[[p, i, k, j, l]] - ddgamma[[p, j, k, i, l]];
                            for m in 0..n {
                                dr += dgamma[[p, k, i, m]] * gamma[[m, j, l]] + gamma[[k, i, m]] * dgamma[[p, m, j, l]]
                                    - dgamma[[p, k, j, m]] * gamma[[m, i, l]]
                                    - gamma[[k, j, m]] * dgamma[[p, m, i, l]];
                            }
                            driemann[[p, k, l, i, j]] = dr;
                        }
                    }
                }
            }
        }

        let mut ricci = Array2::zeros((n, n));
        let mut dricci = Array3::zeros((n, n, n));
        for j in 0..n {
            for l in 0..n {
                ricci[[j, l]] = (0..n).map(|i| riemann[[i, j, i, l]]).sum();
                for p in 0..n {
                    dricci[[p, j, l]] = (0..n).map(|i| driemann[[p, i, j, i, l]]).sum();
                }
            }
        }
        let scalar = (&jet.g_inv * &ricci).sum();
        let dscalar = Array1::from_shape_fn(n, |p| {
            let mut s = 0.0;
            for j in 0..n {
                for l in 0..n {
                    s += jet.dg_inv[[p, j, l]] * ricci[[j, l]] + jet.g_inv[[j, l]] * dricci[[p, j, l]];
                }
            }
            s
        });

        LocalGeometry {
            jet,
            gamma,
            dgamma,
            ddgamma,
            riemann,
            ricci,
            scalar,
            dricci,
            dscalar,
        }
    }

    pub fn dim(&self) -> usize {
        self.jet.dim()
    }

    pub fn point(&self) -> &[f64] {
        &self.jet.point
    }

    pub fn g(&self) -> &Array2<f64> {
        &self.jet.g
    }

    pub fn g_inv(&self) -> &Array2<f64> {
        &self.jet.g_inv
    }

    /// Pointwise g-norm of a tensor at this point.
    pub fn norm(&self, t: &TensorValue) -> f64 {
        t.g_norm(&self.jet.g, &self.jet.g_inv)
    }

    /// Ric with one index raised: `(Ric*)^i_j = g^{ik} Ric_kj`.
    pub fn ricci_endomorphism(&self) -> Array2<f64> {
        self.jet.g_inv.dot(&self.ricci)
    }

    /// `∇_p Ric_jl`.
    pub fn nabla_ricci(&self) -> Array3<f64> {
        let n = self.dim();
        Array3::from_shape_fn((n, n, n), |(p, j, l)| {
            let mut v = self.dricci[[p, j, l]];
            for m in 0..n {
                v -= self.gamma[[m, p, j]] * self.ricci[[m, l]] + self.gamma[[m, p, l]] * self.ricci[[j, m]];
            }
            v
        })
    }

    /// The 1-form `2 g^{pj} ∇_p Ric_jl - ∂_l s`, which vanishes by the
    /// contracted second Bianchi identity.
    pub fn bianchi_form(&self) -> Array1<f64> {
        let n = self.dim();
        let nabla = self.nabla_ricci();
        Array1::from_shape_fn(n, |l| {
            let mut div = 0.0;
            for p in 0..n {
                for j in 0..n {
                    div += self.jet.g_inv[[p, j]] * nabla[[p, j, l]];
                }
            }
            2.0 * div - self.dscalar[l]
        })
    }

    /// Sectional curvature of the coordinate plane `(a, b)`:
    /// `g(R(∂_a,∂_b)∂_b, ∂_a) / (g_aa g_bb - g_ab²)`.
    pub fn sectional_curvature(&self, a: usize, b: usize) -> f64 {
        let n = self.dim();
        let g = &self.jet.g;
        let num: f64 = (0..n).map(|k| g[[a, k]] * self.riemann[[k, b, a, b]]).sum();
        num / (g[[a, a]] * g[[b, b]] - g[[a, b]] * g[[a, b]])
    }
}

/// Γ, ∂Γ and ∂∂Γ by the product rule on `Γ^k_ij = g^kl Γ_lij`.
fn connection(jet: &MetricJet) -> (Array3<f64>, Array4<f64>, Array5<f64>) {
    let n = jet.dim();
    // first kind: c1[[l,i,j]] = ½(∂_i g_jl + ∂_j g_il - ∂_l g_ij)
    let c1 = Array3::from_shape_fn((n, n, n), |(l, i, j)| {
        0.5 * (jet.dg[[i, j, l]] + jet.dg[[j, i, l]] - jet.dg[[l, i, j]])
    });
    let dc1 = Array4::from_shape_fn((n, n, n, n), |(m, l, i, j)| {
        0.5 * (jet.ddg[[m, i, j, l]] + jet.ddg[[m, j, i, l]] - jet.ddg[[m, l, i, j]])
    });
    let ddc1 = Array5::from_shape_fn((n, n, n, n, n), |(p, m, l, i, j)| {
        0.5 * (jet.dddg[[p, m, i, j, l]] + jet.dddg[[p, m, j, i, l]] - jet.dddg[[p, m, l, i, j]])
    });

    let gamma = Array3::from_shape_fn((n, n, n), |(k, i, j)| {
        (0..n).map(|l| jet.g_inv[[k, l]] * c1[[l, i, j]]).sum()
    });
    let dgamma = Array4::from_shape_fn((n, n, n, n), |(m, k, i, j)| {
        (0..n)
            .map(|l| jet.dg_inv[[m, k, l]] * c1[[l, i, j]] + jet.g_inv[[k, l]] * dc1[[m, l, i, j]])
            .sum()
    });
    let ddgamma = Array5::from_shape_fn((n, n, n, n, n), |(p, m, k, i, j)| {
        (0..n)
            .map(|l| {
                jet.ddg_inv[[p, m, k, l]] * c1[[l, i, j]]
                    + jet.dg_inv[[m, k, l]] * dc1[[p, l, i, j]]
                    + jet.dg_inv[[p, k, l]] * dc1[[m, l, i, j]]
                    + jet.g_inv[[k, l]] * ddc1[[p, m, l, i, j]]
            })
            .sum()
    });
    (gamma, dgamma, ddgamma)
}

/// `Γ^k_ij` as a `[Upper, Lower, Lower]` tensor value.
pub fn christoffel(jet: &MetricJet) -> TensorValue {
    let (gamma, _, _) = connection(jet);
    TensorValue::from_array(&[Slot::Upper, Slot::Lower, Slot::Lower], gamma, &jet.point)
}

/// `∂_m Γ^k_ij`, layout `[m,k,i,j]`.
pub fn christoffel_partials(jet: &MetricJet) -> TensorValue {
    let (_, dgamma, _) = connection(jet);
    TensorValue::from_array(
        &[Slot::Lower, Slot::Upper, Slot::Lower, Slot::Lower],
        dgamma,
        &jet.point,
    )
}

/// `R^k_{lij}`, layout `[k,l,i,j]`.
pub fn riemann(jet: &MetricJet) -> TensorValue {
    let geo = LocalGeometry::from_jet(jet.clone());
    TensorValue::from_array(
        &[Slot::Upper, Slot::Lower, Slot::Lower, Slot::Lower],
        geo.riemann,
        &jet.point,
    )
}

pub fn ricci(jet: &MetricJet) -> TensorValue {
    let geo = LocalGeometry::from_jet(jet.clone());
    TensorValue::from_array(&[Slot::Lower, Slot::Lower], geo.ricci, &jet.point)
}

pub fn scalar_curvature(jet: &MetricJet) -> f64 {
    LocalGeometry::from_jet(jet.clone()).scalar
}

/// g-norm of `2 div Ric - ds`.
pub fn bianchi_residual(geo: &LocalGeometry) -> f64 {
    let form = TensorValue::from_array(&[Slot::Lower], geo.bianchi_form(), geo.point());
    geo.norm(&form)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Domain;

    fn flat() -> Chart {
        Chart::parse(
            "flat",
            &["x", "y"],
            &[&["1", "0"], &["0", "1"]],
            None,
            Domain::new(vec![-1.0, -1.0], vec![1.0, 1.0], 0.0),
        )
        .unwrap()
    }

    fn sphere() -> Chart {
        let f = "4/(1+x^2+y^2)^2";
        Chart::parse(
            "sphere",
            &["x", "y"],
            &[&[f, "0"], &["0", f]],
            None,
            Domain::new(vec![-0.9, -0.9], vec![0.9, 0.9], 0.1),
        )
        .unwrap()
    }

    fn half_plane() -> Chart {
        Chart::parse(
            "hyp",
            &["x", "y"],
            &[&["1/y^2", "0"], &["0", "1/y^2"]],
            None,
            Domain::new(vec![-1.0, 1.0], vec![1.0, 3.0], 0.5),
        )
        .unwrap()
    }

    #[test]
    fn flat_plane_is_flat() {
        let geo = LocalGeometry::at(&flat(), &[0.2, -0.4]).unwrap();
        assert!(geo.gamma.iter().all(|v| *v == 0.0));
        assert!(geo.riemann.iter().all(|v| *v == 0.0));
        assert_eq!(geo.scalar, 0.0);
        assert_eq!(bianchi_residual(&geo), 0.0);
    }

    #[test]
    fn sphere_origin_has_zero_christoffels_but_curvature() {
        let jet = metric_jet(&sphere(), &[0.0, 0.0]).unwrap();
        assert!(christoffel(&jet).max_abs() == 0.0);
        assert!(christoffel_partials(&jet).max_abs() > 0.1);
        assert!((scalar_curvature(&jet) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn constant_curvature_values() {
        for p in [[0.0, 0.0], [0.5, -0.3], [-0.9, 0.9]] {
            let geo = LocalGeometry::at(&sphere(), &p).unwrap();
            assert!((geo.sectional_curvature(0, 1) - 1.0).abs() < 1e-10);
            assert!((geo.scalar - 2.0).abs() < 1e-10);
        }
        for p in [[0.0, 1.0], [0.5, 2.2], [-1.0, 3.0]] {
            let geo = LocalGeometry::at(&half_plane(), &p).unwrap();
            assert!((geo.sectional_curvature(0, 1) + 1.0).abs() < 1e-10);
            assert!((geo.scalar + 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn half_plane_christoffels_match_fd_of_defining_formula() {
        // Γ^k_ij from central differences of the metric entries
        let chart = half_plane();
        let p = [0.0, 1.0];
        let h = 1e-5;
        let jet = metric_jet(&chart, &p).unwrap();
        let gamma = christoffel(&jet);
        let g_at = |q: &[f64]| chart.metric_at(q).unwrap();
        let mut dg = [[[0.0; 2]; 2]; 2];
        for (k, slab) in dg.iter_mut().enumerate() {
            let mut pp = p;
            let mut pm = p;
            pp[k] += h;
            pm[k] -= h;
            let (gp, gm) = (g_at(&pp), g_at(&pm));
            for i in 0..2 {
                for j in 0..2 {
                    slab[i][j] = (gp[(i, j)] - gm[(i, j)]) / (2.0 * h);
                }
            }
        }
        let ginv = g_at(&p).try_inverse().unwrap();
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let fd: f64 = (0..2)
                        .map(|l| 0.5 * ginv[(k, l)] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]))
                        .sum();
                    assert!((fd - gamma.data[[k, i, j]]).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn riemann_antisymmetry_and_first_bianchi() {
        let geo = LocalGeometry::at(&sphere(), &[0.3, 0.6]).unwrap();
        let r = &geo.riemann;
        for k in 0..2 {
            for l in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        assert_eq!(r[[k, l, i, j]], -r[[k, l, j, i]]);
                        let cyclic = r[[k, l, i, j]] + r[[k, i, j, l]] + r[[k, j, l, i]];
                        assert!(cyclic.abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn christoffel_partials_match_fd_of_christoffels() {
        let chart = sphere();
        let p = [0.25, -0.45];
        let h = 1e-4;
        let geo = LocalGeometry::at(&chart, &p).unwrap();
        for m in 0..2 {
            let mut pp = p;
            let mut pm = p;
            pp[m] += h;
            pm[m] -= h;
            let gp = LocalGeometry::at(&chart, &pp).unwrap();
            let gm = LocalGeometry::at(&chart, &pm).unwrap();
            for k in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        let fd = (gp.gamma[[k, i, j]] - gm.gamma[[k, i, j]]) / (2.0 * h);
                        assert!((fd - geo.dgamma[[m, k, i, j]]).abs() < 1e-5);
                        for q in 0..2 {
                            let fd2 = (gp.dgamma[[q, k, i, j]] - gm.dgamma[[q, k, i, j]]) / (2.0 * h);
                            assert!((fd2 - geo.ddgamma[[m, q, k, i, j]]).abs() < 1e-4);
                        }
                    }
                }
                for j in 0..2 {
                    let fd = (gp.ricci[[k, j]] - gm.ricci[[k, j]]) / (2.0 * h);
                    assert!((fd - geo.dricci[[m, k, j]]).abs() < 1e-5);
                }
            }
        }
    }

    #[test]
    fn bianchi_holds_on_cigar() {
        let f = "1/(1+x^2+y^2)";
        let cigar = Chart::parse(
            "cigar",
            &["x", "y"],
            &[&[f, "0"], &["0", f]],
            None,
            Domain::new(vec![-2.0, -2.0], vec![2.0, 2.0], 0.5),
        )
        .unwrap();
        for p in [[0.1, 0.2], [1.5, -1.9], [-0.7, 0.0]] {
            let geo = LocalGeometry::at(&cigar, &p).unwrap();
            assert!(bianchi_residual(&geo) < 1e-10);
            // cigar curvature K = 2/(1+r^2)
            let r2 = p[0] * p[0] + p[1] * p[1];
            assert!((geo.sectional_curvature(0, 1) - 2.0 / (1.0 + r2)).abs() < 1e-10);
        }
    }
}
