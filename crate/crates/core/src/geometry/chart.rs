use nalgebra::DMatrix;

use super::GeometryError;
use crate::symexpr::{parse_expr, DerivativeTable, Expr};

/// Metric derivatives are tabulated to third order; ∇Ric needs ∂³g.
pub const METRIC_JET_ORDER: usize = 3;

/// Axis-aligned sample box. `margin` is the distance the box keeps from the
/// nearest singularity of the chart's expressions; points up to `margin`
/// outside the box are still accepted for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub margin: f64,
}

impl Domain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, margin: f64) -> Self {
        Domain { lower, upper, margin }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if self.lower.len() != self.upper.len() {
            return Err(GeometryError::InvalidChart(format!(
                "domain bounds have lengths {} and {}",
                self.lower.len(),
                self.upper.len()
            )));
        }
        for (axis, (lo, hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(GeometryError::InvalidChart(format!(
                    "degenerate domain on axis {axis}: [{lo}, {hi}]"
                )));
            }
        }
        if !(self.margin.is_finite() && self.margin >= 0.0) {
            return Err(GeometryError::InvalidChart(format!(
                "invalid domain margin {}",
                self.margin
            )));
        }
        Ok(())
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (lo, hi))| *x >= lo - self.margin && *x <= hi + self.margin)
    }
}

/// A single coordinate patch carrying a metric (and optionally a complex
/// structure) as symbolic expressions.
#[derive(Debug, Clone)]
pub struct Chart {
    name: String,
    coords: Vec<String>,
    metric: Vec<Vec<Expr>>,
    complex_structure: Option<Vec<Vec<Expr>>>,
    domain: Domain,
    // upper triangle, row-major: (0,0), (0,1), .., (1,1), ..
    metric_tables: Vec<DerivativeTable>,
    j_tables: Option<Vec<DerivativeTable>>,
}

fn sym_index(n: usize, i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    a * n - a * (a + 1) / 2 + b
}

impl Chart {
    /// Builds a chart from expression matrices. The metric must be
    /// structurally symmetric; `J^i_j` is stored as `complex[i][j]`.
    pub fn new(
        name: impl Into<String>,
        coords: Vec<String>,
        metric: Vec<Vec<Expr>>,
        complex_structure: Option<Vec<Vec<Expr>>>,
        domain: Domain,
    ) -> Result<Self, GeometryError> {
        let name = name.into();
        let n = coords.len();
        if n < 2 {
            return Err(GeometryError::InvalidChart(format!(
                "chart '{name}' has dimension {n}, need at least 2"
            )));
        }
        for (i, c) in coords.iter().enumerate() {
            if coords[..i].contains(c) {
                return Err(GeometryError::InvalidChart(format!("duplicate coordinate '{c}'")));
            }
        }
        check_square(&metric, n, "metric")?;
        for i in 0..n {
            for j in 0..i {
                if metric[i][j] != metric[j][i] {
                    return Err(GeometryError::InvalidChart(format!(
                        "metric entries ({i},{j}) and ({j},{i}) differ"
                    )));
                }
            }
        }
        if let Some(js) = &complex_structure {
            if !n.is_multiple_of(2) {
                return Err(GeometryError::ComplexStructure(format!("odd dimension {n}")));
            }
            check_square(js, n, "complex structure")?;
        }
        domain.validate()?;
        if domain.dim() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                got: domain.dim(),
            });
        }
        let mut metric_tables = Vec::with_capacity(n * (n + 1) / 2);
        for (i, row) in metric.iter().enumerate() {
            for e in &row[i..] {
                metric_tables.push(DerivativeTable::new(e, n, METRIC_JET_ORDER));
            }
        }
        let j_tables = complex_structure
            .as_ref()
            .map(|js| js.iter().flatten().map(|e| DerivativeTable::new(e, n, 1)).collect());
        Ok(Chart {
            name,
            coords,
            metric,
            complex_structure,
            domain,
            metric_tables,
            j_tables,
        })
    }

    /// Convenience constructor from expression strings.
    pub fn parse(
        name: &str,
        coords: &[&str],
        metric: &[&[&str]],
        complex_structure: Option<&[&[&str]]>,
        domain: Domain,
    ) -> Result<Self, GeometryError> {
        let coords: Vec<String> = coords.iter().map(|s| s.to_string()).collect();
        let parse_matrix = |rows: &[&[&str]], what: &str| -> Result<Vec<Vec<Expr>>, GeometryError> {
            rows.iter()
                .enumerate()
                .map(|(i, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(j, src)| {
                            parse_expr(src, &coords).map_err(|source| GeometryError::Parse {
                                context: format!("{what}[{i}][{j}] of chart '{name}'"),
                                source,
                            })
                        })
                        .collect()
                })
                .collect()
        };
        let metric = parse_matrix(metric, "metric")?;
        let complex = complex_structure
            .map(|m| parse_matrix(m, "complex_structure"))
            .transpose()?;
        Chart::new(name, coords, metric, complex, domain)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn metric_expr(&self, i: usize, j: usize) -> &Expr {
        &self.metric[i][j]
    }

    pub fn metric_table(&self, i: usize, j: usize) -> &DerivativeTable {
        &self.metric_tables[sym_index(self.dim(), i, j)]
    }

    pub fn complex_structure(&self) -> Option<&Vec<Vec<Expr>>> {
        self.complex_structure.as_ref()
    }

    pub fn has_complex_structure(&self) -> bool {
        self.complex_structure.is_some()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn check_point(&self, p: &[f64]) -> Result<(), GeometryError> {
        if p.len() != self.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim(),
                got: p.len(),
            });
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::OutsideDomain { point: p.to_vec() });
        }
        if !self.domain.contains(p) {
            return Err(GeometryError::OutsideDomain { point: p.to_vec() });
        }
        Ok(())
    }

    /// Metric matrix at `p` without derivatives.
    pub fn metric_at(&self, p: &[f64]) -> Result<DMatrix<f64>, GeometryError> {
        let n = self.dim();
        let mut g = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.metric[i][j].eval(p)?;
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        Ok(g)
    }

    /// `J^i_j` and `∂_k J^i_j` at `p`, as `(J[i][j], dJ[k][i][j])`.
    pub fn complex_structure_jet(
        &self,
        p: &[f64],
    ) -> Result<(ndarray::Array2<f64>, ndarray::Array3<f64>), GeometryError> {
        let tables = self.j_tables.as_ref().ok_or(GeometryError::MissingComplexStructure)?;
        let n = self.dim();
        let mut j = ndarray::Array2::zeros((n, n));
        let mut dj = ndarray::Array3::zeros((n, n, n));
        for a in 0..n {
            for b in 0..n {
                let vals = tables[a * n + b].eval(p)?;
                j[[a, b]] = vals.value();
                for k in 0..n {
                    dj[[k, a, b]] = vals.d1(k);
                }
            }
        }
        Ok((j, dj))
    }

    /// Checks `J² = -id` and `g(J·, J·) = g` at `p` to `tol`.
    pub fn validate_complex_structure(&self, p: &[f64], tol: f64) -> Result<(), GeometryError> {
        let (j, _) = self.complex_structure_jet(p)?;
        let n = self.dim();
        let jm = DMatrix::from_fn(n, n, |a, b| j[[a, b]]);
        let square = &jm * &jm + DMatrix::identity(n, n);
        if square.amax() > tol {
            return Err(GeometryError::ComplexStructure(format!(
                "J^2 + id has entry {:.3e} at {p:?}",
                square.amax()
            )));
        }
        let g = self.metric_at(p)?;
        let defect = jm.transpose() * &g * &jm - &g;
        if defect.amax() > tol {
            return Err(GeometryError::ComplexStructure(format!(
                "g(J.,J.) - g has entry {:.3e} at {p:?}",
                defect.amax()
            )));
        }
        Ok(())
    }
}

fn check_square(m: &[Vec<Expr>], n: usize, what: &str) -> Result<(), GeometryError> {
    if m.len() != n || m.iter().any(|row| row.len() != n) {
        return Err(GeometryError::InvalidChart(format!("{what} must be a {n}x{n} matrix")));
    }
    for row in m {
        for e in row {
            if let Some(i) = e.max_coord() {
                if i >= n {
                    return Err(GeometryError::InvalidChart(format!(
                        "{what} references coordinate {i} >= {n}"
                    )));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box() -> Domain {
        Domain::new(vec![-1.0, -1.0], vec![1.0, 1.0], 0.1)
    }

    #[test]
    fn rejects_asymmetric_metric() {
        let err = Chart::parse("bad", &["x", "y"], &[&["1", "x"], &["y", "1"]], None, unit_box()).unwrap_err();
        assert!(matches!(err, GeometryError::InvalidChart(_)));
    }

    #[test]
    fn rejects_odd_dimensional_complex_structure() {
        let d = Domain::new(vec![-1.0; 3], vec![1.0; 3], 0.0);
        let id: &[&[&str]] = &[&["1", "0", "0"], &["0", "1", "0"], &["0", "0", "1"]];
        let err = Chart::parse("odd", &["x", "y", "z"], id, Some(id), d).unwrap_err();
        assert!(matches!(err, GeometryError::ComplexStructure(_)));
    }

    #[test]
    fn degenerate_domain_is_invalid() {
        let d = Domain::new(vec![0.0, 1.0], vec![1.0, 1.0], 0.0);
        assert!(d.validate().is_err());
    }

    #[test]
    fn standard_complex_structure_is_valid() {
        let chart = Chart::parse(
            "kahler",
            &["x", "y"],
            &[&["1", "0"], &["0", "1"]],
            Some(&[&["0", "-1"], &["1", "0"]]),
            unit_box(),
        )
        .unwrap();
        chart.validate_complex_structure(&[0.3, -0.2], 1e-10).unwrap();
        let skewed = Chart::parse(
            "skewed",
            &["x", "y"],
            &[&["1", "0"], &["0", "4"]],
            Some(&[&["0", "-1"], &["1", "0"]]),
            unit_box(),
        )
        .unwrap();
        assert!(skewed.validate_complex_structure(&[0.0, 0.0], 1e-10).is_err());
    }

    #[test]
    fn symmetric_index_layout() {
        assert_eq!(sym_index(3, 0, 0), 0);
        assert_eq!(sym_index(3, 0, 2), 2);
        assert_eq!(sym_index(3, 1, 1), 3);
        assert_eq!(sym_index(3, 2, 1), 4);
        assert_eq!(sym_index(3, 2, 2), 5);
    }
}
