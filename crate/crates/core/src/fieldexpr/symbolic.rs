//! Exact rewriting used by substitution: derivative expansion and
//! coordinate substitution. Evaluation never goes through here.

use super::ast::{Expr, Func, Node};

/// `∂e/∂x_v` as a marker-free tree (markers inside `e` are expanded first).
pub(crate) fn differentiate(e: &Expr, v: usize) -> Expr {
    if e.vars() & (1u64 << v) == 0 {
        return Expr::num(0.0);
    }
    match e.node() {
        Node::Num(_) | Node::Const(_) => Expr::num(0.0),
        Node::Var(i) => Expr::num(if *i == v { 1.0 } else { 0.0 }),
        Node::Neg(a) => Expr::neg(&differentiate(a, v)),
        Node::Add(a, b) => Expr::add(&differentiate(a, v), &differentiate(b, v)),
        Node::Sub(a, b) => Expr::sub(&differentiate(a, v), &differentiate(b, v)),
        Node::Mul(a, b) => Expr::add(
            &Expr::mul(&differentiate(a, v), b),
            &Expr::mul(a, &differentiate(b, v)),
        ),
        Node::Div(a, b) => {
            let da = differentiate(a, v);
            let db = differentiate(b, v);
            Expr::sub(
                &Expr::div(&da, b),
                &Expr::div(&Expr::mul(a, &db), &Expr::powi(b, 2)),
            )
        }
        Node::Pow(a, n) => Expr::mul(
            &Expr::mul(&Expr::num(*n as f64), &Expr::powi(a, n - 1)),
            &differentiate(a, v),
        ),
        Node::Call(f, a) => {
            let da = differentiate(a, v);
            let outer = match f {
                Func::Sin => Expr::call(Func::Cos, a),
                Func::Cos => Expr::neg(&Expr::call(Func::Sin, a)),
                Func::Exp => Expr::call(Func::Exp, a),
                Func::Log => Expr::div(&Expr::num(1.0), a),
                Func::Sqrt => Expr::div(&Expr::num(0.5), &Expr::call(Func::Sqrt, a)),
                // sign(a) = abs(a)/a; undefined at 0, as in evaluation
                Func::Abs => Expr::div(&Expr::call(Func::Abs, a), a),
            };
            Expr::mul(&outer, &da)
        }
        Node::Diff(..) => differentiate(&expand(e), v),
    }
}

/// Replace every derivative marker by its explicit derivative.
pub(crate) fn expand(e: &Expr) -> Expr {
    match e.node() {
        Node::Num(_) | Node::Const(_) | Node::Var(_) => e.clone(),
        Node::Neg(a) => Expr::neg(&expand(a)),
        Node::Add(a, b) => Expr::add(&expand(a), &expand(b)),
        Node::Sub(a, b) => Expr::sub(&expand(a), &expand(b)),
        Node::Mul(a, b) => Expr::mul(&expand(a), &expand(b)),
        Node::Div(a, b) => Expr::div(&expand(a), &expand(b)),
        Node::Pow(a, n) => Expr::powi(&expand(a), *n),
        Node::Call(f, a) => Expr::call(*f, &expand(a)),
        Node::Diff(vs, a) => vs.iter().fold(expand(a), |acc, &v| differentiate(&acc, v)),
    }
}

/// Substitute `map[i]` for coordinate `i`.
///
/// A derivative marker survives when the map renames the marked
/// subtree's coordinates injectively; otherwise it is expanded first.
pub(crate) fn substitute(e: &Expr, map: &[Expr]) -> Expr {
    if e.vars() == 0 {
        return e.clone();
    }
    match e.node() {
        Node::Num(_) | Node::Const(_) => e.clone(),
        Node::Var(i) => map[*i].clone(),
        Node::Neg(a) => Expr::neg(&substitute(a, map)),
        Node::Add(a, b) => Expr::add(&substitute(a, map), &substitute(b, map)),
        Node::Sub(a, b) => Expr::sub(&substitute(a, map), &substitute(b, map)),
        Node::Mul(a, b) => Expr::mul(&substitute(a, map), &substitute(b, map)),
        Node::Div(a, b) => Expr::div(&substitute(a, map), &substitute(b, map)),
        Node::Pow(a, n) => Expr::powi(&substitute(a, map), *n),
        Node::Call(f, a) => Expr::call(*f, &substitute(a, map)),
        Node::Diff(vs, a) => match renaming(a.vars(), map) {
            Some(rename) => {
                let mut ws = Vec::with_capacity(vs.len());
                for v in vs {
                    match rename.iter().find(|(from, _)| from == v) {
                        Some((_, to)) => ws.push(*to),
                        None => return Expr::num(0.0),
                    }
                }
                Expr::diff(&substitute(a, map), &ws)
            }
            None => substitute(&expand(e), map),
        },
    }
}

fn renaming(vars: u64, map: &[Expr]) -> Option<Vec<(usize, usize)>> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for (i, m) in map.iter().enumerate() {
        if vars & (1u64 << i) == 0 {
            continue;
        }
        match m.node() {
            Node::Var(j) if out.iter().all(|(_, t)| t != j) => out.push((i, *j)),
            _ => return None,
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::super::eval::eval_f64;
    use super::*;

    #[test]
    fn quotient_rule_matches_marker() {
        // e = sin(x0)/x1
        let e = Expr::div(&Expr::call(Func::Sin, &Expr::var(0)), &Expr::var(1));
        let d = differentiate(&e, 1);
        let m = Expr::diff(&e, &[1]);
        let pt = [0.4, 1.7];
        let a = eval_f64(&d, &pt).unwrap();
        let b = eval_f64(&m, &pt).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn substitution_renames_markers() {
        // diff(x0*x0*x1, x0) with x0 -> y1, x1 -> y0
        let e = Expr::diff(&Expr::mul(&Expr::powi(&Expr::var(0), 2), &Expr::var(1)), &[0]);
        let s = substitute(&e, &[Expr::var(1), Expr::var(0)]);
        assert!(matches!(s.node(), Node::Diff(vs, _) if vs == &[1]));
        // non-injective map forces expansion: x0 -> y0 + y1
        let s = substitute(&e, &[Expr::add(&Expr::var(0), &Expr::var(1)), Expr::var(0)]);
        let v = eval_f64(&s, &[2.0, 3.0]).unwrap();
        // 2*x0*x1 at x0 = 5, x1 = 2
        assert_eq!(v, 20.0);
    }
}
