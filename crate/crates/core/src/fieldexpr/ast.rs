//! Expression trees for scalar fields.
//!
//! Nodes are shared through `Arc`, so cloning a field is cheap and
//! subtrees built by the exterior engine are reused rather than copied.
//! The `Expr::add`/`mul`/... constructors fold literals and units; the
//! parser builds nodes verbatim.

use std::fmt::{self, Write};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constant {
    Pi,
    E,
}

impl Constant {
    pub fn value(self) -> f64 {
        match self {
            Constant::Pi => std::f64::consts::PI,
            Constant::E => std::f64::consts::E,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    Const(Constant),
    Var(usize),
    Neg(Expr),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Pow(Expr, i32),
    Call(Func, Expr),
    /// Partial derivative marker; variable indices kept sorted.
    Diff(Vec<usize>, Expr),
}

#[derive(Debug)]
struct Inner {
    node: Node,
    vars: u64,
}

/// Shared handle to an expression node.
#[derive(Clone)]
pub struct Expr(Arc<Inner>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.vars == other.0.vars && self.0.node == other.0.node)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.node.fmt(f)
    }
}

fn mask(v: usize) -> u64 {
    1u64 << v
}

impl Expr {
    /// Wrap a node without any folding.
    pub fn raw(node: Node) -> Expr {
        let vars = match &node {
            Node::Num(_) | Node::Const(_) => 0,
            Node::Var(i) => mask(*i),
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) | Node::Diff(_, a) => a.vars(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.vars() | b.vars()
            }
        };
        Expr(Arc::new(Inner { node, vars }))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    /// Bit mask of the coordinates this expression depends on.
    pub fn vars(&self) -> u64 {
        self.0.vars
    }

    pub fn num(v: f64) -> Expr {
        Expr::raw(Node::Num(v))
    }

    pub fn var(i: usize) -> Expr {
        Expr::raw(Node::Var(i))
    }

    pub fn as_num(&self) -> Option<f64> {
        match self.node() {
            Node::Num(v) => Some(*v),
            Node::Neg(a) => a.as_num().map(|v| -v),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_num() == Some(0.0)
    }

    fn is_one(&self) -> bool {
        self.as_num() == Some(1.0)
    }

    pub fn neg(a: &Expr) -> Expr {
        match a.node() {
            Node::Num(v) => Expr::num(-v),
            Node::Neg(x) => x.clone(),
            Node::Sub(x, y) => Expr::raw(Node::Sub(y.clone(), x.clone())),
            _ => Expr::raw(Node::Neg(a.clone())),
        }
    }

    pub fn add(a: &Expr, b: &Expr) -> Expr {
        if a.is_zero() {
            return b.clone();
        }
        if b.is_zero() {
            return a.clone();
        }
        if let (Some(x), Some(y)) = (a.as_num(), b.as_num()) {
            return Expr::num(x + y);
        }
        match b.node() {
            Node::Neg(y) => return Expr::sub(a, y),
            Node::Num(y) if *y < 0.0 => return Expr::raw(Node::Sub(a.clone(), Expr::num(-y))),
            _ => {}
        }
        if let Node::Neg(x) = a.node() {
            return Expr::sub(b, x);
        }
        Expr::raw(Node::Add(a.clone(), b.clone()))
    }

    pub fn sub(a: &Expr, b: &Expr) -> Expr {
        if b.is_zero() {
            return a.clone();
        }
        if a.is_zero() {
            return Expr::neg(b);
        }
        if a == b {
            return Expr::num(0.0);
        }
        if let (Some(x), Some(y)) = (a.as_num(), b.as_num()) {
            return Expr::num(x - y);
        }
        match b.node() {
            Node::Neg(y) => return Expr::add(a, y),
            Node::Num(y) if *y < 0.0 => return Expr::raw(Node::Add(a.clone(), Expr::num(-y))),
            _ => {}
        }
        Expr::raw(Node::Sub(a.clone(), b.clone()))
    }

    pub fn mul(a: &Expr, b: &Expr) -> Expr {
        if a.is_zero() || b.is_zero() {
            return Expr::num(0.0);
        }
        if a.is_one() {
            return b.clone();
        }
        if b.is_one() {
            return a.clone();
        }
        if let (Some(x), Some(y)) = (a.as_num(), b.as_num()) {
            let p = x * y;
            if p.is_finite() {
                return Expr::num(p);
            }
        }
        if a.as_num() == Some(-1.0) {
            return Expr::neg(b);
        }
        if b.as_num() == Some(-1.0) {
            return Expr::neg(a);
        }
        match (a.node(), b.node()) {
            (Node::Neg(x), Node::Neg(y)) => return Expr::mul(x, y),
            (Node::Neg(x), _) => return Expr::neg(&Expr::mul(x, b)),
            (_, Node::Neg(y)) => return Expr::neg(&Expr::mul(a, y)),
            _ => {}
        }
        // Keep numeric factors in front: c*x reads better than x*c.
        if b.as_num().is_some() && a.as_num().is_none() {
            return Expr::raw(Node::Mul(b.clone(), a.clone()));
        }
        if let (Some(x), Node::Mul(p, q)) = (a.as_num(), b.node()) {
            if let Some(y) = p.as_num() {
                let c = x * y;
                if c.is_finite() {
                    return Expr::mul(&Expr::num(c), q);
                }
            }
        }
        Expr::raw(Node::Mul(a.clone(), b.clone()))
    }

    pub fn div(a: &Expr, b: &Expr) -> Expr {
        if b.is_one() {
            return a.clone();
        }
        if b.as_num() == Some(-1.0) {
            return Expr::neg(a);
        }
        if a.is_zero() && !b.is_zero() {
            return Expr::num(0.0);
        }
        if let (Some(x), Some(y)) = (a.as_num(), b.as_num()) {
            let q = x / y;
            if q.is_finite() && y != 0.0 {
                return Expr::num(q);
            }
        }
        match (a.node(), b.node()) {
            (Node::Neg(x), _) => return Expr::neg(&Expr::div(x, b)),
            (_, Node::Neg(y)) => return Expr::neg(&Expr::div(a, y)),
            _ => {}
        }
        Expr::raw(Node::Div(a.clone(), b.clone()))
    }

    pub fn powi(a: &Expr, n: i32) -> Expr {
        if n == 0 {
            return Expr::num(1.0);
        }
        if n == 1 {
            return a.clone();
        }
        if let Some(x) = a.as_num() {
            let p = x.powi(n);
            if p.is_finite() && !(x == 0.0 && n < 0) {
                return Expr::num(p);
            }
        }
        if let Node::Pow(x, m) = a.node() {
            if let Some(k) = m.checked_mul(n) {
                return Expr::powi(x, k);
            }
        }
        Expr::raw(Node::Pow(a.clone(), n))
    }

    pub fn call(f: Func, a: &Expr) -> Expr {
        if let Some(x) = a.as_num() {
            let v = match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Exp => x.exp(),
                Func::Log if x > 0.0 => x.ln(),
                Func::Sqrt if x >= 0.0 => x.sqrt(),
                Func::Abs => x.abs(),
                _ => f64::NAN,
            };
            if v.is_finite() {
                return Expr::num(v);
            }
        }
        Expr::raw(Node::Call(f, a.clone()))
    }

    /// Derivative marker, pushed through linear structure.
    pub fn diff(a: &Expr, vs: &[usize]) -> Expr {
        if vs.is_empty() {
            return a.clone();
        }
        if vs.iter().any(|&v| a.vars() & mask(v) == 0) {
            return Expr::num(0.0);
        }
        match a.node() {
            Node::Var(_) => {
                // only reachable with vs == [i]
                if vs.len() == 1 {
                    Expr::num(1.0)
                } else {
                    Expr::num(0.0)
                }
            }
            Node::Neg(x) => Expr::neg(&Expr::diff(x, vs)),
            Node::Add(x, y) => Expr::add(&Expr::diff(x, vs), &Expr::diff(y, vs)),
            Node::Sub(x, y) => Expr::sub(&Expr::diff(x, vs), &Expr::diff(y, vs)),
            Node::Mul(x, y) if x.vars() == 0 => Expr::mul(x, &Expr::diff(y, vs)),
            Node::Mul(x, y) if y.vars() == 0 => Expr::mul(&Expr::diff(x, vs), y),
            Node::Div(x, y) if y.vars() == 0 => Expr::div(&Expr::diff(x, vs), y),
            Node::Diff(ws, x) => {
                let mut all = ws.clone();
                all.extend_from_slice(vs);
                all.sort_unstable();
                Expr::raw(Node::Diff(all, x.clone()))
            }
            _ => {
                let mut s = vs.to_vec();
                s.sort_unstable();
                Expr::raw(Node::Diff(s, a.clone()))
            }
        }
    }

    /// Render with the given coordinate names, minimal parentheses.
    pub fn render(&self, names: &[String]) -> String {
        let mut s = String::new();
        write_expr(&mut s, self, names, 0);
        s
    }
}

// Binding strength of the outermost operator, used by the printer.
fn prec(e: &Expr) -> u8 {
    match e.node() {
        Node::Add(..) | Node::Sub(..) => 1,
        Node::Mul(..) | Node::Div(..) => 2,
        Node::Neg(_) => 3,
        Node::Num(v) if v.is_sign_negative() => 3,
        Node::Pow(..) => 4,
        _ => 5,
    }
}

fn write_num(out: &mut String, v: f64) {
    let _ = write!(out, "{}", v.abs());
}

fn write_expr(out: &mut String, e: &Expr, names: &[String], min: u8) {
    let paren = prec(e) < min;
    if paren {
        out.push('(');
    }
    match e.node() {
        Node::Num(v) => {
            if v.is_sign_negative() {
                out.push('-');
            }
            write_num(out, *v);
        }
        Node::Const(Constant::Pi) => out.push_str("pi"),
        Node::Const(Constant::E) => out.push('e'),
        Node::Var(i) => out.push_str(&names[*i]),
        Node::Neg(a) => {
            out.push('-');
            write_expr(out, a, names, 3);
        }
        Node::Add(a, b) | Node::Sub(a, b) => {
            write_expr(out, a, names, 1);
            out.push_str(if matches!(e.node(), Node::Add(..)) { " + " } else { " - " });
            write_expr(out, b, names, 2);
        }
        Node::Mul(a, b) | Node::Div(a, b) => {
            write_expr(out, a, names, 2);
            out.push(if matches!(e.node(), Node::Mul(..)) { '*' } else { '/' });
            write_expr(out, b, names, 3);
        }
        Node::Pow(a, n) => {
            write_expr(out, a, names, 5);
            if *n < 0 {
                let _ = write!(out, "^({n})");
            } else {
                let _ = write!(out, "^{n}");
            }
        }
        Node::Call(f, a) => {
            out.push_str(f.name());
            out.push('(');
            write_expr(out, a, names, 0);
            out.push(')');
        }
        Node::Diff(vs, a) => {
            out.push_str("diff(");
            write_expr(out, a, names, 0);
            for v in vs {
                out.push_str(", ");
                out.push_str(&names[*v]);
            }
            out.push(')');
        }
    }
    if paren {
        out.push(')');
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    #[test]
    fn folding_basics() {
        let x = Expr::var(0);
        let zero = Expr::num(0.0);
        assert_eq!(Expr::mul(&zero, &x), zero);
        assert_eq!(Expr::add(&x, &zero), x);
        assert_eq!(Expr::sub(&x, &x), zero);
        assert_eq!(Expr::neg(&Expr::neg(&x)), x);
        assert_eq!(Expr::mul(&Expr::num(2.0), &Expr::num(3.0)).as_num(), Some(6.0));
    }

    #[test]
    fn diff_marker_pushes_through_sums() {
        let x = Expr::var(0);
        let y = Expr::var(1);
        let e = Expr::add(&Expr::mul(&x, &y), &Expr::mul(&Expr::num(3.0), &y));
        let d = Expr::diff(&e, &[1]);
        assert_eq!(d.render(&names()), "diff(x*y, y) + 3");
        assert!(Expr::diff(&y, &[0]).is_zero());
    }

    #[test]
    fn printer_parenthesizes_minimally() {
        let x = Expr::var(0);
        let y = Expr::var(1);
        let s = Expr::raw(Node::Sub(x.clone(), Expr::raw(Node::Sub(y.clone(), x.clone()))));
        assert_eq!(s.render(&names()), "x - (y - x)");
        let p = Expr::raw(Node::Pow(Expr::raw(Node::Neg(x.clone())), -2));
        assert_eq!(p.render(&names()), "(-x)^(-2)");
        let m = Expr::raw(Node::Neg(Expr::raw(Node::Mul(x, y))));
        assert_eq!(m.render(&names()), "-(x*y)");
    }
}
