//! Scalar fields over named coordinates, with exact derivatives.
//!
//! ```
//! use mas_core::fieldexpr::{Chart, ScalarField};
//!
//! let chart = Chart::new(&["x1", "x2"]).unwrap();
//! let f = ScalarField::parse("x1*x2", &chart).unwrap();
//! let j = f.eval_jet(&[3.0, 5.0], 2).unwrap();
//! assert_eq!(j.value(), 15.0);
//! assert_eq!(j.partial(&[0, 1]), 1.0);
//! ```

pub mod ast;
mod chart;
mod eval;
pub mod jet;
mod parser;
mod symbolic;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

pub use ast::{Expr, Func, Node};
pub use chart::{same_chart, Chart};
pub use eval::MAX_INTERNAL_ORDER;
pub use jet::{JetSpace, Taylor};

use crate::error::{Error, Result};

/// Highest total derivative order exposed by [`ScalarField::eval_jet`].
pub const MAX_JET_ORDER: usize = 4;

/// A closed-form expression over the coordinates of a chart.
#[derive(Clone)]
pub struct ScalarField {
    chart: Arc<Chart>,
    expr: Expr,
}

impl PartialEq for ScalarField {
    fn eq(&self, other: &Self) -> bool {
        same_chart(&self.chart, &other.chart) && self.expr == other.expr
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarField({})", self)
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.expr.render(self.chart.names()))
    }
}

impl ScalarField {
    pub fn parse(src: &str, chart: &Arc<Chart>) -> Result<ScalarField> {
        let expr = parser::parse(src, chart)?;
        Ok(ScalarField { chart: chart.clone(), expr })
    }

    pub fn from_expr(chart: &Arc<Chart>, expr: Expr) -> ScalarField {
        debug_assert!(expr.vars() >> chart.dim() == 0);
        ScalarField { chart: chart.clone(), expr }
    }

    pub fn constant(chart: &Arc<Chart>, v: f64) -> ScalarField {
        ScalarField { chart: chart.clone(), expr: Expr::num(v) }
    }

    /// The `i`-th coordinate function.
    pub fn coord(chart: &Arc<Chart>, i: usize) -> ScalarField {
        assert!(i < chart.dim(), "coordinate index {i} out of range");
        ScalarField { chart: chart.clone(), expr: Expr::var(i) }
    }

    pub fn coordinate(chart: &Arc<Chart>, name: &str) -> Result<ScalarField> {
        let i = chart
            .index_of(name)
            .ok_or_else(|| Error::UnknownIdentifier { name: name.into(), offset: 0 })?;
        Ok(ScalarField::coord(chart, i))
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    /// Literal value when the field is a plain number.
    pub fn as_constant(&self) -> Option<f64> {
        self.expr.as_num()
    }

    pub fn is_zero(&self) -> bool {
        self.expr.is_zero()
    }

    /// True when the field provably does not depend on coordinate `i`.
    pub fn independent_of(&self, i: usize) -> bool {
        self.expr.vars() & (1u64 << i) == 0
    }

    fn point_ok(&self, pt: &[f64]) -> Result<()> {
        if pt.len() != self.chart.dim() {
            return Err(Error::Dimension { expected: self.chart.dim(), got: pt.len() });
        }
        Ok(())
    }

    fn domain(&self, f: eval::Fail) -> Error {
        Error::Domain { expr: f.at.render(self.chart.names()), reason: f.reason }
    }

    pub fn eval(&self, pt: &[f64]) -> Result<f64> {
        self.point_ok(pt)?;
        eval::eval_f64(&self.expr, pt).map_err(|f| self.domain(f))
    }

    /// Value and all partials of total order `≤ order` (at most 4).
    pub fn eval_jet(&self, pt: &[f64], order: usize) -> Result<Jet> {
        if order > MAX_JET_ORDER {
            return Err(Error::Invalid(format!("jet order {order} exceeds {MAX_JET_ORDER}")));
        }
        Ok(Jet { taylor: self.eval_taylor(pt, order)? })
    }

    /// Raw Taylor expansion; orders above 4 are allowed for internal use.
    pub fn eval_taylor(&self, pt: &[f64], order: usize) -> Result<Taylor> {
        self.point_ok(pt)?;
        eval::eval_taylor(&self.expr, pt, order).map_err(|f| self.domain(f))
    }

    /// `∂/∂x_i`, as a derivative marker.
    pub fn diff(&self, i: usize) -> ScalarField {
        assert!(i < self.chart.dim(), "coordinate index {i} out of range");
        self.with(Expr::diff(&self.expr, &[i]))
    }

    pub fn diff_many(&self, vs: &[usize]) -> ScalarField {
        self.with(Expr::diff(&self.expr, vs))
    }

    pub fn diff_by(&self, name: &str) -> Result<ScalarField> {
        let i = self
            .chart
            .index_of(name)
            .ok_or_else(|| Error::UnknownIdentifier { name: name.into(), offset: 0 })?;
        Ok(self.diff(i))
    }

    /// Same expression on a larger chart, matching coordinates by name.
    pub fn lift(&self, target: &Arc<Chart>) -> Result<ScalarField> {
        if same_chart(&self.chart, target) {
            return Ok(ScalarField { chart: target.clone(), expr: self.expr.clone() });
        }
        let mut map = Vec::with_capacity(self.chart.dim());
        for n in self.chart.names() {
            let j = target.index_of(n).ok_or_else(|| {
                Error::ChartMismatch(format!("coordinate `{n}` is missing from {target}"))
            })?;
            map.push(ScalarField::coord(target, j));
        }
        self.compose(target, &map)
    }

    /// Substitute `components[i]` (fields on `target`) for coordinate `i`.
    pub fn compose(&self, target: &Arc<Chart>, components: &[ScalarField]) -> Result<ScalarField> {
        if components.len() != self.chart.dim() {
            return Err(Error::Dimension { expected: self.chart.dim(), got: components.len() });
        }
        for c in components {
            if !same_chart(&c.chart, target) {
                return Err(Error::ChartMismatch(format!("component on {} instead of {target}", c.chart)));
            }
        }
        let map: Vec<Expr> = components.iter().map(|c| c.expr.clone()).collect();
        Ok(ScalarField { chart: target.clone(), expr: symbolic::substitute(&self.expr, &map) })
    }

    fn with(&self, expr: Expr) -> ScalarField {
        ScalarField { chart: self.chart.clone(), expr }
    }

    fn zip(&self, o: &ScalarField, f: impl Fn(&Expr, &Expr) -> Expr) -> ScalarField {
        assert!(
            same_chart(&self.chart, &o.chart),
            "arithmetic between fields on {} and {}",
            self.chart,
            o.chart
        );
        self.with(f(&self.expr, &o.expr))
    }

    pub fn powi(&self, n: i32) -> ScalarField {
        self.with(Expr::powi(&self.expr, n))
    }

    pub fn apply(&self, f: Func) -> ScalarField {
        self.with(Expr::call(f, &self.expr))
    }

    pub fn sqrt(&self) -> ScalarField {
        self.apply(Func::Sqrt)
    }

    pub fn abs(&self) -> ScalarField {
        self.apply(Func::Abs)
    }

    pub fn scale(&self, s: f64) -> ScalarField {
        self.with(Expr::mul(&Expr::num(s), &self.expr))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $ctor:path) => {
        impl $tr<&ScalarField> for &ScalarField {
            type Output = ScalarField;
            fn $m(self, o: &ScalarField) -> ScalarField {
                self.zip(o, $ctor)
            }
        }
        impl $tr<ScalarField> for ScalarField {
            type Output = ScalarField;
            fn $m(self, o: ScalarField) -> ScalarField {
                self.zip(&o, $ctor)
            }
        }
        impl $tr<&ScalarField> for ScalarField {
            type Output = ScalarField;
            fn $m(self, o: &ScalarField) -> ScalarField {
                self.zip(o, $ctor)
            }
        }
        impl $tr<f64> for &ScalarField {
            type Output = ScalarField;
            fn $m(self, o: f64) -> ScalarField {
                self.with($ctor(&self.expr, &Expr::num(o)))
            }
        }
        impl $tr<f64> for ScalarField {
            type Output = ScalarField;
            fn $m(self, o: f64) -> ScalarField {
                self.with($ctor(&self.expr, &Expr::num(o)))
            }
        }
    };
}

binop!(Add, add, Expr::add);
binop!(Sub, sub, Expr::sub);
binop!(Mul, mul, Expr::mul);
binop!(Div, div, Expr::div);

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.with(Expr::neg(&self.expr))
    }
}

impl Neg for ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        -&self
    }
}

/// Value and partial derivatives of a field at a point.
#[derive(Debug, Clone)]
pub struct Jet {
    taylor: Taylor,
}

impl Jet {
    pub fn value(&self) -> f64 {
        self.taylor.value()
    }

    pub fn order(&self) -> usize {
        self.taylor.order()
    }

    pub fn taylor(&self) -> &Taylor {
        &self.taylor
    }

    /// `∂^k f / ∂x_{i1} ... ∂x_{ik}`; indices may repeat and come in any order.
    ///
    /// Panics if `idx.len()` exceeds the jet order.
    pub fn partial(&self, idx: &[usize]) -> f64 {
        assert!(idx.len() <= self.order(), "partial of order {} from a jet of order {}", idx.len(), self.order());
        let dim = self.taylor.space().dim();
        let mut alpha = vec![0u8; dim];
        for &i in idx {
            alpha[i] += 1;
        }
        let fact: f64 = alpha.iter().map(|&a| (1..=a as u32).product::<u32>() as f64).product();
        self.taylor.coeff(&alpha) * fact
    }

    /// All partials as (sorted multi-index, value), lowest order first.
    pub fn partials(&self) -> Vec<(Vec<usize>, f64)> {
        let space = self.taylor.space();
        (0..space.len())
            .map(|k| {
                let alpha = space.monomial(k);
                let idx: Vec<usize> =
                    alpha.iter().enumerate().flat_map(|(i, &a)| std::iter::repeat_n(i, a as usize)).collect();
                let v = self.partial(&idx);
                (idx, v)
            })
            .collect()
    }

    pub fn gradient(&self) -> Vec<f64> {
        let dim = self.taylor.space().dim();
        (0..dim).map(|i| self.partial(&[i])).collect()
    }

    pub fn hessian(&self) -> Vec<Vec<f64>> {
        let dim = self.taylor.space().dim();
        (0..dim).map(|i| (0..dim).map(|j| self.partial(&[i, j])).collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2() -> Arc<Chart> {
        Chart::new(&["x1", "x2"]).unwrap()
    }

    #[test]
    fn bilinear_jet() {
        let f = ScalarField::parse("x1*x2", &c2()).unwrap();
        let j = f.eval_jet(&[3.0, 5.0], 2).unwrap();
        assert_eq!(j.value(), 15.0);
        assert_eq!(j.partial(&[0]), 5.0);
        assert_eq!(j.partial(&[1]), 3.0);
        assert_eq!(j.partial(&[0, 1]), 1.0);
        assert_eq!(j.partial(&[1, 0]), 1.0);
        assert_eq!(j.partial(&[0, 0]), 0.0);
    }

    #[test]
    fn sine_derivatives_at_zero() {
        let c = Chart::new(&["x1"]).unwrap();
        let f = ScalarField::parse("sin(x1)", &c).unwrap();
        let j = f.eval_jet(&[0.0], 3).unwrap();
        let got: Vec<f64> = (0..=3).map(|k| j.partial(&vec![0; k])).collect();
        assert_eq!(got, vec![0.0, 1.0, 0.0, -1.0]);
        let g = ScalarField::parse("sin(x1)^2", &c).unwrap();
        assert_eq!(g.eval(&[std::f64::consts::FRAC_PI_2]).unwrap(), 1.0);
    }

    #[test]
    fn domain_errors_name_the_subexpression() {
        let f = ScalarField::parse("x1 + log(x2 - 1)", &c2()).unwrap();
        match f.eval(&[0.0, 0.5]) {
            Err(Error::Domain { expr, .. }) => assert_eq!(expr, "log(x2 - 1)"),
            other => panic!("unexpected {other:?}"),
        }
        let g = ScalarField::parse("1/(x1 - x2)", &c2()).unwrap();
        assert!(g.eval(&[1.0, 1.0]).is_err());
        let h = ScalarField::parse("sqrt(x1)", &c2()).unwrap();
        assert!(h.eval(&[0.0, 0.0]).is_ok());
        assert!(h.eval_jet(&[0.0, 0.0], 1).is_err());
        assert!(f.eval_jet(&[2.0, 3.0], 5).is_err());
    }

    #[test]
    fn lift_and_compose() {
        let c4 = Chart::new(&["x1", "x2", "u1", "u2"]).unwrap();
        let a = ScalarField::parse("x1^2 + x2", &c2()).unwrap();
        let lifted = a.lift(&c4).unwrap();
        assert_eq!(lifted.eval(&[2.0, 1.0, 9.0, 9.0]).unwrap(), 5.0);
        let psi = ScalarField::parse("x1*x2^2", &c2()).unwrap();
        // diff(psi, x2) rewritten through x1 -> x2, x2 -> x1
        let swapped = psi
            .diff(1)
            .compose(&c2(), &[ScalarField::coord(&c2(), 1), ScalarField::coord(&c2(), 0)])
            .unwrap();
        assert_eq!(swapped.eval(&[3.0, 2.0]).unwrap(), 12.0);
    }

    #[test]
    fn render_round_trip() {
        let c = c2();
        for s in ["x1 - (x2 - x1)", "-x1^2*x2", "2^(-1)*x1", "diff(x1*x2, x1)/(1 + x2)", "sin(x1)^2 + -3"] {
            let f = ScalarField::parse(s, &c).unwrap();
            let g = ScalarField::parse(&f.to_string(), &c).unwrap();
            assert_eq!(f, g, "{s} -> {f}");
        }
    }
}
