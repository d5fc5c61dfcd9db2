//! Point evaluation, plain and with Taylor jets.

use super::ast::{Expr, Func, Node};
use super::jet::{JetSpace, Taylor};

/// Highest jet order reachable through nested derivative markers.
pub const MAX_INTERNAL_ORDER: usize = 10;

/// Evaluation failure at a subexpression.
#[derive(Debug, Clone)]
pub(crate) struct Fail {
    pub at: Expr,
    pub reason: String,
}

fn fail(at: &Expr, reason: impl Into<String>) -> Fail {
    Fail { at: at.clone(), reason: reason.into() }
}

fn check(at: &Expr, v: f64) -> Result<f64, Fail> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(fail(at, "non-finite value"))
    }
}

pub(crate) fn eval_f64(e: &Expr, pt: &[f64]) -> Result<f64, Fail> {
    let v = match e.node() {
        Node::Num(v) => *v,
        Node::Const(c) => c.value(),
        Node::Var(i) => pt[*i],
        Node::Neg(a) => -eval_f64(a, pt)?,
        Node::Add(a, b) => eval_f64(a, pt)? + eval_f64(b, pt)?,
        Node::Sub(a, b) => eval_f64(a, pt)? - eval_f64(b, pt)?,
        Node::Mul(a, b) => eval_f64(a, pt)? * eval_f64(b, pt)?,
        Node::Div(a, b) => {
            let x = eval_f64(a, pt)?;
            let y = eval_f64(b, pt)?;
            if y == 0.0 {
                return Err(fail(e, "division by zero"));
            }
            x / y
        }
        Node::Pow(a, n) => {
            let x = eval_f64(a, pt)?;
            if x == 0.0 && *n < 0 {
                return Err(fail(e, "division by zero"));
            }
            x.powi(*n)
        }
        Node::Call(f, a) => {
            let x = eval_f64(a, pt)?;
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Exp => x.exp(),
                Func::Log => {
                    if x <= 0.0 {
                        return Err(fail(e, "log of a non-positive value"));
                    }
                    x.ln()
                }
                Func::Sqrt => {
                    if x < 0.0 {
                        return Err(fail(e, "sqrt of a negative value"));
                    }
                    x.sqrt()
                }
                Func::Abs => x.abs(),
            }
        }
        Node::Diff(..) => eval_taylor(e, pt, 0)?.value(),
    };
    check(e, v)
}

pub(crate) fn eval_taylor(e: &Expr, pt: &[f64], order: usize) -> Result<Taylor, Fail> {
    if order > MAX_INTERNAL_ORDER {
        return Err(fail(e, format!("derivative order {order} exceeds {MAX_INTERNAL_ORDER}")));
    }
    let space = JetSpace::get(pt.len(), order);
    let t = match e.node() {
        Node::Num(v) => Taylor::constant(&space, *v),
        Node::Const(c) => Taylor::constant(&space, c.value()),
        Node::Var(i) => Taylor::variable(&space, *i, pt[*i]),
        Node::Neg(a) => eval_taylor(a, pt, order)?.neg(),
        Node::Add(a, b) => eval_taylor(a, pt, order)?.add(&eval_taylor(b, pt, order)?),
        Node::Sub(a, b) => eval_taylor(a, pt, order)?.sub(&eval_taylor(b, pt, order)?),
        Node::Mul(a, b) => {
            // Constant factors skip the full series product.
            let x = eval_taylor(a, pt, order)?;
            let y = eval_taylor(b, pt, order)?;
            if a.vars() == 0 {
                y.scale(x.value())
            } else if b.vars() == 0 {
                x.scale(y.value())
            } else {
                x.mul(&y)
            }
        }
        Node::Div(a, b) => {
            let x = eval_taylor(a, pt, order)?;
            let y = eval_taylor(b, pt, order)?;
            x.div(&y).ok_or_else(|| fail(e, "division by zero"))?
        }
        Node::Pow(a, n) => eval_taylor(a, pt, order)?
            .powi(*n)
            .ok_or_else(|| fail(e, "division by zero"))?,
        Node::Call(f, a) => {
            let x = eval_taylor(a, pt, order)?;
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Exp => x.exp(),
                Func::Log => x.ln().ok_or_else(|| fail(e, "log of a non-positive value"))?,
                Func::Sqrt => x.sqrt().ok_or_else(|| {
                    if x.value() < 0.0 {
                        fail(e, "sqrt of a negative value")
                    } else {
                        fail(e, "sqrt is not differentiable at 0")
                    }
                })?,
                Func::Abs => x.abs().ok_or_else(|| fail(e, "abs is not differentiable at 0"))?,
            }
        }
        Node::Diff(vs, a) => {
            let mut t = eval_taylor(a, pt, order + vs.len())?;
            for &v in vs {
                t = t.derivative(v);
            }
            t
        }
    };
    if !t.is_finite() {
        return Err(fail(e, "non-finite value"));
    }
    Ok(t)
}
