//! Central finite differences: the independent oracle for every symbolic
//! derivative. Only [`Expr::eval`] is used here, never [`Expr::diff`].

use super::{EvalError, Expr};

/// Step for first and second derivatives.
pub const FD_STEP_LOW_ORDER: f64 = 1e-3;
/// Step for third derivatives.
pub const FD_STEP_THIRD_ORDER: f64 = 1e-2;

pub fn fd_step_for_order(order: usize) -> f64 {
    if order >= 3 {
        FD_STEP_THIRD_ORDER
    } else {
        FD_STEP_LOW_ORDER
    }
}

/// Acceptance bound for `|symbolic - fd|`, relative to `max(1, |symbolic|)`.
///
/// The stencils are O(h⁴); over the catalog sample boxes the measured
/// worst cases are about 2e-11, 2e-9 and 8e-6 for orders 1, 2 and 3.
pub fn fd_tolerance_for_order(order: usize) -> f64 {
    match order {
        0 | 1 => 1e-8,
        2 => 1e-6,
        _ => 1e-4,
    }
}

fn shifted(p: &[f64], coord: usize, delta: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    q[coord] += delta;
    q
}

/// Fourth-order-accurate central stencils of order 1, 2 or 3 along one
/// coordinate.
pub fn central_difference(e: &Expr, coord: usize, p: &[f64], order: usize, h: f64) -> Result<f64, EvalError> {
    let f = |k: f64| e.eval(&shifted(p, coord, k * h));
    match order {
        0 => e.eval(p),
        1 => Ok((-f(2.0)? + 8.0 * f(1.0)? - 8.0 * f(-1.0)? + f(-2.0)?) / (12.0 * h)),
        2 => Ok((-f(2.0)? + 16.0 * f(1.0)? - 30.0 * e.eval(p)? + 16.0 * f(-1.0)? - f(-2.0)?) / (12.0 * h * h)),
        3 => Ok(
            (-f(3.0)? + 8.0 * f(2.0)? - 13.0 * f(1.0)? + 13.0 * f(-1.0)? - 8.0 * f(-2.0)? + f(-3.0)?)
                / (8.0 * h * h * h),
        ),
        _ => panic!("finite differences implemented for orders 0..=3, got {order}"),
    }
}

/// Nested first-order central differences (fourth-order accurate) along an
/// arbitrary multi-index.
pub fn fd_mixed(e: &Expr, index: &[usize], p: &[f64], h: f64) -> Result<f64, EvalError> {
    match index.split_first() {
        None => e.eval(p),
        Some((&i, rest)) => {
            let at = |k: f64| fd_mixed(e, rest, &shifted(p, i, k * h), h);
            Ok((-at(2.0)? + 8.0 * at(1.0)? - 8.0 * at(-1.0)? + at(-2.0)?) / (12.0 * h))
        }
    }
}

/// `|symbolic - central difference|` for the `order`-th derivative along one
/// coordinate, with step 1e-3 (orders 1-2) or 1e-2 (order 3).
pub fn fd_check(e: &Expr, coord: usize, p: &[f64], order: usize) -> Result<f64, EvalError> {
    assert!((1..=3).contains(&order), "fd_check order must be 1..=3");
    let symbolic = e.diff_multi(&vec![coord; order]).eval(p)?;
    let numeric = central_difference(e, coord, p, order, fd_step_for_order(order))?;
    Ok((symbolic - numeric).abs())
}

/// Like [`fd_check`] for a general (possibly mixed) multi-index. Pure
/// multi-indices use the standard stencils, mixed ones nested differences.
pub fn fd_check_mixed(symbolic: f64, e: &Expr, index: &[usize], p: &[f64]) -> Result<f64, EvalError> {
    let h = fd_step_for_order(index.len());
    let pure = index.windows(2).all(|w| w[0] == w[1]);
    let numeric = if pure && !index.is_empty() {
        central_difference(e, index[0], p, index.len(), h)?
    } else {
        fd_mixed(e, index, p, h)?
    };
    Ok((symbolic - numeric).abs())
}
