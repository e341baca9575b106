//! Symbolic scalar expressions over chart coordinates.
//!
//! Expressions are parsed from infix strings, differentiated symbolically to
//! any order and evaluated in `f64`. Trees are immutable and reference
//! counted, so derivative tables can share subtrees freely and be evaluated
//! from many threads at once.
//!
//! Simplification is limited to constant folding and the `0`/`1` identities
//! applied by the smart constructors below.

mod diff;
mod eval;
mod fd;
mod parse;

use std::fmt;
use std::sync::Arc;

pub use diff::{DerivativeTable, DerivativeValues};
pub use eval::{DomainKind, EvalError};
pub use fd::{
    central_difference, fd_check, fd_check_mixed, fd_mixed, fd_step_for_order, fd_tolerance_for_order,
    FD_STEP_LOW_ORDER, FD_STEP_THIRD_ORDER,
};
pub use parse::{parse_expr, ParseError, ParseErrorKind};

/// Unary operators, including the elementary functions of the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl UnaryOp {
    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
            UnaryOp::Sqrt => "sqrt",
        }
    }

    pub(crate) fn from_function_name(name: &str) -> Option<Self> {
        match name {
            "sin" => Some(UnaryOp::Sin),
            "cos" => Some(UnaryOp::Cos),
            "exp" => Some(UnaryOp::Exp),
            "log" => Some(UnaryOp::Log),
            "sqrt" => Some(UnaryOp::Sqrt),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinaryOp {
    fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
        }
    }
}

/// A node of the expression tree. `Coord(i)` refers to the i-th coordinate of
/// the owning chart.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Coord(usize),
    Unary(UnaryOp, Expr),
    Binary(BinaryOp, Expr, Expr),
    /// Power with a constant exponent.
    Pow(Expr, f64),
}

/// Immutable, cheaply clonable expression tree.
#[derive(Clone, PartialEq)]
pub struct Expr(Arc<Node>);

impl Expr {
    fn from_node(node: Node) -> Self {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(value: f64) -> Self {
        Self::from_node(Node::Const(value))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn coord(index: usize) -> Self {
        Self::from_node(Node::Coord(index))
    }

    pub fn as_const(&self) -> Option<f64> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(1.0)
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_coord(&self) -> Option<usize> {
        match self.node() {
            Node::Const(_) => None,
            Node::Coord(i) => Some(*i),
            Node::Unary(_, a) | Node::Pow(a, _) => a.max_coord(),
            Node::Binary(_, a, b) => match (a.max_coord(), b.max_coord()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
        }
    }

    /// Number of nodes, counting shared subtrees once per reference.
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Const(_) | Node::Coord(_) => 1,
            Node::Unary(_, a) | Node::Pow(a, _) => 1 + a.size(),
            Node::Binary(_, a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn neg(&self) -> Expr {
        match self.node() {
            Node::Const(c) => Expr::constant(-c),
            Node::Unary(UnaryOp::Neg, inner) => inner.clone(),
            _ => Self::from_node(Node::Unary(UnaryOp::Neg, self.clone())),
        }
    }

    /// Applies a unary operator, folding constants when the result is finite.
    pub fn unary(op: UnaryOp, arg: Expr) -> Expr {
        if op == UnaryOp::Neg {
            return arg.neg();
        }
        if let Some(c) = arg.as_const() {
            let v = eval::apply_unary(op, c);
            if let Ok(v) = v {
                return Expr::constant(v);
            }
        }
        Self::from_node(Node::Unary(op, arg))
    }

    pub fn add(&self, other: &Expr) -> Expr {
        match (self.as_const(), other.as_const()) {
            (Some(a), Some(b)) => Expr::constant(a + b),
            (Some(0.0), _) => other.clone(),
            (_, Some(0.0)) => self.clone(),
            _ => Self::from_node(Node::Binary(BinaryOp::Add, self.clone(), other.clone())),
        }
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        match (self.as_const(), other.as_const()) {
            (Some(a), Some(b)) => Expr::constant(a - b),
            (Some(0.0), _) => other.neg(),
            (_, Some(0.0)) => self.clone(),
            _ => Self::from_node(Node::Binary(BinaryOp::Sub, self.clone(), other.clone())),
        }
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        match (self.as_const(), other.as_const()) {
            (Some(a), Some(b)) => Expr::constant(a * b),
            (Some(0.0), _) => Expr::zero(),
            (_, Some(0.0)) => Expr::zero(),
            (Some(1.0), _) => other.clone(),
            (_, Some(1.0)) => self.clone(),
            _ => Self::from_node(Node::Binary(BinaryOp::Mul, self.clone(), other.clone())),
        }
    }

    pub fn div(&self, other: &Expr) -> Expr {
        match (self.as_const(), other.as_const()) {
            (Some(a), Some(b)) if b != 0.0 && (a / b).is_finite() => Expr::constant(a / b),
            (Some(0.0), _) => Expr::zero(),
            (_, Some(1.0)) => self.clone(),
            _ => Self::from_node(Node::Binary(BinaryOp::Div, self.clone(), other.clone())),
        }
    }

    pub fn pow(&self, exponent: f64) -> Expr {
        if exponent == 0.0 {
            return Expr::one();
        }
        if exponent == 1.0 {
            return self.clone();
        }
        if let Some(c) = self.as_const() {
            let v = eval::apply_pow(c, exponent);
            if let Ok(v) = v {
                return Expr::constant(v);
            }
        }
        Self::from_node(Node::Pow(self.clone(), exponent))
    }

    /// Renders the expression with the given coordinate names. The output is
    /// fully parenthesised and parses back to an equivalent tree.
    pub fn display<'a>(&'a self, coords: &'a [String]) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, coords }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self, &|f, i| write!(f, "x{i}"))
    }
}

pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    coords: &'a [String],
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self.expr, &|f, i| match self.coords.get(i) {
            Some(name) => f.write_str(name),
            None => write!(f, "x{i}"),
        })
    }
}

fn write_const(f: &mut fmt::Formatter<'_>, c: f64) -> fmt::Result {
    // `{:?}` is the shortest representation that round-trips.
    if c < 0.0 || (c == 0.0 && c.is_sign_negative()) {
        write!(f, "(-{:?})", -c)
    } else {
        write!(f, "{c:?}")
    }
}

fn write_expr(
    f: &mut fmt::Formatter<'_>,
    e: &Expr,
    coord: &dyn Fn(&mut fmt::Formatter<'_>, usize) -> fmt::Result,
) -> fmt::Result {
    match e.node() {
        Node::Const(c) => write_const(f, *c),
        Node::Coord(i) => coord(f, *i),
        Node::Unary(UnaryOp::Neg, a) => {
            f.write_str("(-")?;
            write_expr(f, a, coord)?;
            f.write_str(")")
        }
        Node::Unary(op, a) => {
            write!(f, "{}(", op.name())?;
            write_expr(f, a, coord)?;
            f.write_str(")")
        }
        Node::Binary(op, a, b) => {
            f.write_str("(")?;
            write_expr(f, a, coord)?;
            write!(f, " {} ", op.symbol())?;
            write_expr(f, b, coord)?;
            f.write_str(")")
        }
        Node::Pow(a, p) => {
            f.write_str("(")?;
            write_expr(f, a, coord)?;
            f.write_str(")^")?;
            write_const(f, *p)
        }
    }
}

/// Differentiates `e` with respect to the named coordinate.
pub fn diff_expr(e: &Expr, coord: &str, coords: &[String]) -> Result<Expr, ParseError> {
    let index = coords.iter().position(|c| c == coord).ok_or_else(|| ParseError {
        position: 0,
        kind: ParseErrorKind::UnknownIdentifier(coord.to_string()),
    })?;
    Ok(e.diff(index))
}

/// Evaluates `e` at `p`; non-finite results are reported as domain errors.
pub fn eval_expr(e: &Expr, p: &[f64]) -> Result<f64, EvalError> {
    e.eval(p)
}
