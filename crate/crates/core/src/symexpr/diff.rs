use std::sync::Arc;

use super::{BinaryOp, EvalError, Expr, Node, UnaryOp};

impl Expr {
    /// Symbolic partial derivative with respect to coordinate `coord`.
    pub fn diff(&self, coord: usize) -> Expr {
        match self.node() {
            Node::Const(_) => Expr::zero(),
            Node::Coord(i) => {
                if *i == coord {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Unary(op, u) => {
                let du = u.diff(coord);
                if du.is_zero() {
                    return Expr::zero();
                }
                match op {
                    UnaryOp::Neg => du.neg(),
                    UnaryOp::Sin => Expr::unary(UnaryOp::Cos, u.clone()).mul(&du),
                    UnaryOp::Cos => Expr::unary(UnaryOp::Sin, u.clone()).mul(&du).neg(),
                    UnaryOp::Exp => self.mul(&du),
                    UnaryOp::Log => du.div(u),
                    UnaryOp::Sqrt => du.div(&Expr::constant(2.0).mul(self)),
                }
            }
            Node::Binary(op, a, b) => {
                let da = a.diff(coord);
                let db = b.diff(coord);
                match op {
                    BinaryOp::Add => da.add(&db),
                    BinaryOp::Sub => da.sub(&db),
                    BinaryOp::Mul => da.mul(b).add(&a.mul(&db)),
                    BinaryOp::Div => {
                        if db.is_zero() {
                            da.div(b)
                        } else {
                            // (a'b - ab') / b^2
                            da.mul(b).sub(&a.mul(&db)).div(&b.pow(2.0))
                        }
                    }
                }
            }
            Node::Pow(u, p) => {
                let du = u.diff(coord);
                if du.is_zero() {
                    return Expr::zero();
                }
                Expr::constant(*p).mul(&u.pow(p - 1.0)).mul(&du)
            }
        }
    }

    /// Repeated differentiation along a multi-index.
    pub fn diff_multi(&self, index: &[usize]) -> Expr {
        index.iter().fold(self.clone(), |e, &i| e.diff(i))
    }
}

/// Lookup from flat multi-index position (row-major over `n^k`) to the id of
/// the unique sorted multi-index, per derivative order.
#[derive(Debug)]
struct IndexLayout {
    dim: usize,
    max_order: usize,
    /// flat[k][row-major index] = unique id
    flat: Vec<Vec<usize>>,
}

impl IndexLayout {
    fn new(dim: usize, max_order: usize) -> (Self, Vec<Vec<usize>>) {
        let mut unique: Vec<Vec<usize>> = vec![Vec::new()];
        let mut flat = vec![vec![0]];
        let mut previous: Vec<Vec<usize>> = vec![Vec::new()];
        for order in 1..=max_order {
            let mut current = Vec::new();
            for prefix in &previous {
                let start = prefix.last().copied().unwrap_or(0);
                for i in start..dim {
                    let mut idx = prefix.clone();
                    idx.push(i);
                    current.push(idx);
                }
            }
            let mut table = vec![0; dim.pow(order as u32)];
            for (pos, slot) in table.iter_mut().enumerate() {
                let mut idx = unflatten(pos, dim, order);
                idx.sort_unstable();
                let local = current.iter().position(|c| *c == idx).expect("sorted index enumerated");
                *slot = unique.len() + local;
            }
            unique.extend(current.iter().cloned());
            flat.push(table);
            previous = current;
        }
        (IndexLayout { dim, max_order, flat }, unique)
    }

    fn id(&self, index: &[usize]) -> usize {
        let order = index.len();
        assert!(
            order <= self.max_order,
            "derivative order {order} exceeds table order {}",
            self.max_order
        );
        let mut pos = 0;
        for &i in index {
            debug_assert!(i < self.dim);
            pos = pos * self.dim + i;
        }
        self.flat[order][pos]
    }
}

fn unflatten(mut pos: usize, dim: usize, order: usize) -> Vec<usize> {
    let mut idx = vec![0; order];
    for slot in idx.iter_mut().rev() {
        *slot = pos % dim;
        pos /= dim;
    }
    idx
}

/// All partial derivatives of one expression up to a fixed order, one tree
/// per sorted multi-index. Mixed partials share a single tree, so
/// `∂_x∂_y e` and `∂_y∂_x e` are identical by construction.
#[derive(Debug, Clone)]
pub struct DerivativeTable {
    layout: Arc<IndexLayout>,
    trees: Vec<Expr>,
}

impl DerivativeTable {
    pub fn new(e: &Expr, dim: usize, max_order: usize) -> Self {
        let (layout, unique) = IndexLayout::new(dim, max_order);
        let mut trees: Vec<Expr> = Vec::with_capacity(unique.len());
        trees.push(e.clone());
        for idx in unique.iter().skip(1) {
            let (last, prefix) = idx.split_last().expect("non-empty multi-index");
            let parent = trees[layout.id(prefix)].clone();
            trees.push(parent.diff(*last));
        }
        DerivativeTable {
            layout: Arc::new(layout),
            trees,
        }
    }

    pub fn dim(&self) -> usize {
        self.layout.dim
    }

    pub fn max_order(&self) -> usize {
        self.layout.max_order
    }

    pub fn expr(&self) -> &Expr {
        &self.trees[0]
    }

    /// The derivative tree for a multi-index (any order of indices).
    pub fn get(&self, index: &[usize]) -> &Expr {
        &self.trees[self.layout.id(index)]
    }

    /// Number of distinct derivative trees held.
    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn eval(&self, p: &[f64]) -> Result<DerivativeValues, EvalError> {
        let values = self.trees.iter().map(|t| t.eval(p)).collect::<Result<Vec<_>, _>>()?;
        Ok(DerivativeValues {
            layout: Arc::clone(&self.layout),
            values,
        })
    }
}

/// Numeric values of a [`DerivativeTable`] at one point.
#[derive(Debug, Clone)]
pub struct DerivativeValues {
    layout: Arc<IndexLayout>,
    values: Vec<f64>,
}

impl DerivativeValues {
    pub fn value(&self) -> f64 {
        self.values[0]
    }

    pub fn at(&self, index: &[usize]) -> f64 {
        self.values[self.layout.id(index)]
    }

    pub fn d1(&self, i: usize) -> f64 {
        self.at(&[i])
    }

    pub fn d2(&self, i: usize, j: usize) -> f64 {
        self.at(&[i, j])
    }

    pub fn d3(&self, i: usize, j: usize, k: usize) -> f64 {
        self.at(&[i, j, k])
    }
}
