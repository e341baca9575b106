use std::fmt;

use thiserror::Error;

use super::{BinaryOp, Expr, Node, UnaryOp};

/// What went wrong while evaluating an expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    DivisionByZero,
    LogOfNonPositive,
    SqrtOfNegative,
    InvalidPower,
    NonFinite,
    CoordinateOutOfRange,
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DomainKind::DivisionByZero => "division by zero",
            DomainKind::LogOfNonPositive => "log of non-positive value",
            DomainKind::SqrtOfNegative => "sqrt of negative value",
            DomainKind::InvalidPower => "power undefined for base/exponent",
            DomainKind::NonFinite => "non-finite result",
            DomainKind::CoordinateOutOfRange => "coordinate index exceeds point dimension",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("domain error ({kind}) at point {point:?}")]
pub struct EvalError {
    pub kind: DomainKind,
    pub point: Vec<f64>,
}

pub(crate) fn apply_unary(op: UnaryOp, x: f64) -> Result<f64, DomainKind> {
    let v = match op {
        UnaryOp::Neg => -x,
        UnaryOp::Sin => x.sin(),
        UnaryOp::Cos => x.cos(),
        UnaryOp::Exp => x.exp(),
        UnaryOp::Log => {
            if x <= 0.0 {
                return Err(DomainKind::LogOfNonPositive);
            }
            x.ln()
        }
        UnaryOp::Sqrt => {
            if x < 0.0 {
                return Err(DomainKind::SqrtOfNegative);
            }
            x.sqrt()
        }
    };
    finite(v)
}

pub(crate) fn apply_pow(base: f64, exponent: f64) -> Result<f64, DomainKind> {
    let v = if exponent.fract() == 0.0 && exponent.abs() < i32::MAX as f64 {
        if base == 0.0 && exponent < 0.0 {
            return Err(DomainKind::DivisionByZero);
        }
        base.powi(exponent as i32)
    } else {
        if base < 0.0 || (base == 0.0 && exponent < 0.0) {
            return Err(DomainKind::InvalidPower);
        }
        base.powf(exponent)
    };
    finite(v)
}

fn apply_binary(op: BinaryOp, a: f64, b: f64) -> Result<f64, DomainKind> {
    let v = match op {
        BinaryOp::Add => a + b,
        BinaryOp::Sub => a - b,
        BinaryOp::Mul => a * b,
        BinaryOp::Div => {
            if b == 0.0 {
                return Err(DomainKind::DivisionByZero);
            }
            a / b
        }
    };
    finite(v)
}

fn finite(v: f64) -> Result<f64, DomainKind> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(DomainKind::NonFinite)
    }
}

fn eval_node(e: &Expr, p: &[f64]) -> Result<f64, DomainKind> {
    match e.node() {
        Node::Const(c) => finite(*c),
        Node::Coord(i) => p.get(*i).copied().ok_or(DomainKind::CoordinateOutOfRange),
        Node::Unary(op, a) => apply_unary(*op, eval_node(a, p)?),
        Node::Binary(op, a, b) => apply_binary(*op, eval_node(a, p)?, eval_node(b, p)?),
        Node::Pow(a, q) => apply_pow(eval_node(a, p)?, *q),
    }
}

impl Expr {
    pub fn eval(&self, p: &[f64]) -> Result<f64, EvalError> {
        eval_node(self, p).map_err(|kind| EvalError {
            kind,
            point: p.to_vec(),
        })
    }
}
