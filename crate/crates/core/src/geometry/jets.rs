//! Numeric jets of fields at a point: values plus coordinate partials.
//!
//! Layouts put derivative indices first: for a covector,
//! `d1[[a,i]] = ∂_a θ_i` and `d2[[a,b,i]] = ∂_a∂_b θ_i`.

use ndarray::{Array1, Array2, Array3};

use super::MetricJet;
use crate::symexpr::{DerivativeTable, EvalError};

/// Scalar function with partials up to third order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarJet {
    pub value: f64,
    pub d1: Array1<f64>,
    pub d2: Array2<f64>,
    pub d3: Array3<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovectorJet {
    pub w: Array1<f64>,
    pub d1: Array2<f64>,
    pub d2: Array3<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorJet {
    pub v: Array1<f64>,
    pub d1: Array2<f64>,
    pub d2: Array3<f64>,
}

/// Symmetric 2-tensor with first partials, `d1[[a,i,j]] = ∂_a h_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sym2Jet {
    pub h: Array2<f64>,
    pub d1: Array3<f64>,
}

impl ScalarJet {
    /// Requires a table of order at least 3.
    pub fn from_table(table: &DerivativeTable, p: &[f64]) -> Result<Self, EvalError> {
        let n = table.dim();
        let vals = table.eval(p)?;
        Ok(ScalarJet {
            value: vals.value(),
            d1: Array1::from_shape_fn(n, |i| vals.d1(i)),
            d2: Array2::from_shape_fn((n, n), |(i, j)| vals.d2(i, j)),
            d3: Array3::from_shape_fn((n, n, n), |(i, j, k)| vals.d3(i, j, k)),
        })
    }

    pub fn constant(value: f64, n: usize) -> Self {
        ScalarJet {
            value,
            d1: Array1::zeros(n),
            d2: Array2::zeros((n, n)),
            d3: Array3::zeros((n, n, n)),
        }
    }

    /// `dF` as a covector jet (one derivative order is consumed).
    pub fn differential(&self) -> CovectorJet {
        let n = self.d1.len();
        CovectorJet {
            w: self.d1.clone(),
            d1: Array2::from_shape_fn((n, n), |(a, i)| self.d2[[a, i]]),
            d2: Array3::from_shape_fn((n, n, n), |(a, b, i)| self.d3[[a, b, i]]),
        }
    }

    /// `grad F = (dF)^♯`.
    pub fn gradient(&self, jet: &MetricJet) -> VectorJet {
        self.differential().raise(jet)
    }
}

/// Reads `n` component tables (order ≥ 2) into `(values, d1, d2)`.
fn component_jet(tables: &[DerivativeTable], p: &[f64]) -> Result<(Array1<f64>, Array2<f64>, Array3<f64>), EvalError> {
    let n = p.len();
    let mut v = Array1::zeros(tables.len());
    let mut d1 = Array2::zeros((n, tables.len()));
    let mut d2 = Array3::zeros((n, n, tables.len()));
    for (c, table) in tables.iter().enumerate() {
        let vals = table.eval(p)?;
        v[c] = vals.value();
        for a in 0..n {
            d1[[a, c]] = vals.d1(a);
            for b in 0..n {
                d2[[a, b, c]] = vals.d2(a, b);
            }
        }
    }
    Ok((v, d1, d2))
}

/// Transforms a component jet by a point-dependent matrix `M` (with jets
/// `dm`, `ddm`): `u_i = M_ij v^j` and its first two partials.
fn contract_jet(
    m: &Array2<f64>,
    dm: &Array3<f64>,
    ddm: &ndarray::Array4<f64>,
    v: &Array1<f64>,
    dv: &Array2<f64>,
    ddv: &Array3<f64>,
) -> (Array1<f64>, Array2<f64>, Array3<f64>) {
    let n = v.len();
    let u = m.dot(v);
    let du = Array2::from_shape_fn((n, n), |(a, i)| {
        (0..n).map(|j| dm[[a, i, j]] * v[j] + m[[i, j]] * dv[[a, j]]).sum()
    });
    let ddu = Array3::from_shape_fn((n, n, n), |(a, b, i)| {
        (0..n)
            .map(|j| {
                ddm[[a, b, i, j]] * v[j]
                    + dm[[a, i, j]] * dv[[b, j]]
                    + dm[[b, i, j]] * dv[[a, j]]
                    + m[[i, j]] * ddv[[a, b, j]]
            })
            .sum()
    });
    (u, du, ddu)
}

impl CovectorJet {
    pub fn from_tables(tables: &[DerivativeTable], p: &[f64]) -> Result<Self, EvalError> {
        let (w, d1, d2) = component_jet(tables, p)?;
        Ok(CovectorJet { w, d1, d2 })
    }

    pub fn zero(n: usize) -> Self {
        CovectorJet {
            w: Array1::zeros(n),
            d1: Array2::zeros((n, n)),
            d2: Array3::zeros((n, n, n)),
        }
    }

    /// `θ^♯`, `ξ^k = g^{kl} θ_l`.
    pub fn raise(&self, jet: &MetricJet) -> VectorJet {
        let (v, d1, d2) = contract_jet(&jet.g_inv, &jet.dg_inv, &jet.ddg_inv, &self.w, &self.d1, &self.d2);
        VectorJet { v, d1, d2 }
    }

    pub fn scale(&self, c: f64) -> Self {
        CovectorJet {
            w: &self.w * c,
            d1: &self.d1 * c,
            d2: &self.d2 * c,
        }
    }
}

impl VectorJet {
    pub fn from_tables(tables: &[DerivativeTable], p: &[f64]) -> Result<Self, EvalError> {
        let (v, d1, d2) = component_jet(tables, p)?;
        Ok(VectorJet { v, d1, d2 })
    }

    pub fn zero(n: usize) -> Self {
        VectorJet {
            v: Array1::zeros(n),
            d1: Array2::zeros((n, n)),
            d2: Array3::zeros((n, n, n)),
        }
    }

    /// `ξ^♭`, `θ_i = g_ij ξ^j`.
    pub fn lower(&self, jet: &MetricJet) -> CovectorJet {
        let (w, d1, d2) = contract_jet(&jet.g, &jet.dg, &jet.ddg, &self.v, &self.d1, &self.d2);
        CovectorJet { w, d1, d2 }
    }
}

impl Sym2Jet {
    pub fn from_tables(tables: &[Vec<DerivativeTable>], p: &[f64]) -> Result<Self, EvalError> {
        let n = p.len();
        let mut h = Array2::zeros((n, n));
        let mut d1 = Array3::zeros((n, n, n));
        for i in 0..n {
            for j in 0..n {
                let vals = tables[i][j].eval(p)?;
                h[[i, j]] = vals.value();
                for a in 0..n {
                    d1[[a, i, j]] = vals.d1(a);
                }
            }
        }
        Ok(Sym2Jet { h, d1 })
    }

    /// The metric itself as a symmetric 2-tensor jet.
    pub fn metric(jet: &MetricJet) -> Self {
        Sym2Jet {
            h: jet.g.clone(),
            d1: jet.dg.clone(),
        }
    }
}
