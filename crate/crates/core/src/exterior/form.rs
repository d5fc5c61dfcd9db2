use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fieldexpr::{same_chart, Chart, ScalarField, Taylor};

/// Coefficient ring of a form: symbolic fields, numbers, or jets.
pub trait Coeff: Clone + fmt::Debug {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, s: f64) -> Self;
    fn is_zero(&self) -> bool;
}

impl Coeff for f64 {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, s: f64) -> Self {
        self * s
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Coeff for ScalarField {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, s: f64) -> Self {
        ScalarField::scale(self, s)
    }
    fn is_zero(&self) -> bool {
        ScalarField::is_zero(self)
    }
}

impl Coeff for Taylor {
    fn add(&self, o: &Self) -> Self {
        Taylor::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Taylor::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Taylor::mul(self, o)
    }
    fn neg(&self) -> Self {
        Taylor::neg(self)
    }
    fn scale(&self, s: f64) -> Self {
        Taylor::scale(self, s)
    }
    fn is_zero(&self) -> bool {
        self.coeffs().iter().all(|&c| c == 0.0)
    }
}

/// Sort an index tuple; returns the permutation sign, or `None` on a repeat.
pub fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut v = idx.to_vec();
    let mut sign = 1.0;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && v[j - 1] == v[j] {
            return None;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// A differential form on a chart; multi-indices are strictly increasing.
#[derive(Clone)]
pub struct Form<C = ScalarField> {
    chart: Arc<Chart>,
    degree: usize,
    terms: BTreeMap<Vec<usize>, C>,
}

pub type DifferentialForm = Form<ScalarField>;

impl<C: Coeff> Form<C> {
    pub fn zero(chart: &Arc<Chart>, degree: usize) -> Form<C> {
        Form { chart: chart.clone(), degree, terms: BTreeMap::new() }
    }

    /// Build from arbitrary index tuples; reorders with sign and merges.
    pub fn from_terms<I>(chart: &Arc<Chart>, degree: usize, terms: I) -> Result<Form<C>>
    where
        I: IntoIterator<Item = (Vec<usize>, C)>,
    {
        if degree > chart.dim() {
            return Err(Error::Degree(format!("degree {degree} on a {}-dimensional chart", chart.dim())));
        }
        let mut f = Form::zero(chart, degree);
        for (idx, c) in terms {
            if idx.len() != degree {
                return Err(Error::Degree(format!("index {idx:?} in a {degree}-form")));
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= chart.dim()) {
                return Err(Error::Degree(format!("index {bad} outside the chart {chart}")));
            }
            if let Some((sorted, sign)) = sort_with_sign(&idx) {
                let c = if sign < 0.0 { c.neg() } else { c };
                f.accumulate(sorted, c);
            }
        }
        Ok(f)
    }

    fn accumulate(&mut self, idx: Vec<usize>, c: C) {
        match self.terms.get_mut(&idx) {
            Some(old) => {
                let s = old.add(&c);
                if s.is_zero() {
                    self.terms.remove(&idx);
                } else {
                    *old = s;
                }
            }
            None => {
                if !c.is_zero() {
                    self.terms.insert(idx, c);
                }
            }
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], &C)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of an increasing multi-index.
    pub fn get(&self, idx: &[usize]) -> Option<&C> {
        self.terms.get(idx)
    }

    /// Coefficient of `dx_1∧...∧dx_n` for a top-degree form.
    pub fn top(&self) -> Option<&C> {
        if self.degree != self.dim() {
            return None;
        }
        let all: Vec<usize> = (0..self.dim()).collect();
        self.terms.get(&all)
    }

    fn same_shape(&self, o: &Form<C>, what: &str) -> Result<()> {
        if !same_chart(&self.chart, &o.chart) {
            return Err(Error::ChartMismatch(format!("{what}: {} vs {}", self.chart, o.chart)));
        }
        Ok(())
    }

    pub fn add(&self, o: &Form<C>) -> Result<Form<C>> {
        self.same_shape(o, "sum")?;
        if self.degree != o.degree {
            return Err(Error::Degree(format!("sum of a {}-form and a {}-form", self.degree, o.degree)));
        }
        let mut r = self.clone();
        for (k, c) in &o.terms {
            r.accumulate(k.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn sub(&self, o: &Form<C>) -> Result<Form<C>> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Form<C> {
        self.map(|c| c.neg())
    }

    pub fn scale(&self, s: f64) -> Form<C> {
        self.map(|c| c.scale(s))
    }

    /// Multiply every coefficient by a function.
    pub fn mul_coeff(&self, f: &C) -> Form<C> {
        self.map(|c| f.mul(c))
    }

    fn map(&self, f: impl Fn(&C) -> C) -> Form<C> {
        let mut r = Form::zero(&self.chart, self.degree);
        for (k, c) in &self.terms {
            let v = f(c);
            if !v.is_zero() {
                r.terms.insert(k.clone(), v);
            }
        }
        r
    }

    /// Change of coefficient ring, same indices.
    pub fn try_map<D: Coeff, E>(&self, f: impl Fn(&C) -> std::result::Result<D, E>) -> std::result::Result<Form<D>, E> {
        let mut r = Form::zero(&self.chart, self.degree);
        for (k, c) in &self.terms {
            let v = f(c)?;
            if !v.is_zero() {
                r.terms.insert(k.clone(), v);
            }
        }
        Ok(r)
    }

    pub fn wedge(&self, o: &Form<C>) -> Result<Form<C>> {
        self.same_shape(o, "wedge")?;
        let deg = self.degree + o.degree;
        if deg > self.dim() {
            return Err(Error::Degree(format!(
                "wedge of degrees {} and {} exceeds dimension {}",
                self.degree,
                o.degree,
                self.dim()
            )));
        }
        let mut r = Form::zero(&self.chart, deg);
        let mut idx = Vec::with_capacity(deg);
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                if a.iter().any(|i| b.contains(i)) {
                    continue;
                }
                idx.clear();
                idx.extend_from_slice(a);
                idx.extend_from_slice(b);
                let (sorted, sign) = sort_with_sign(&idx).expect("disjoint indices");
                let p = ca.mul(cb);
                r.accumulate(sorted, if sign < 0.0 { p.neg() } else { p });
            }
        }
        Ok(r)
    }

    /// Contraction with a vector in the first slot.
    pub fn interior(&self, x: &[C]) -> Result<Form<C>> {
        if x.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: x.len() });
        }
        if self.degree == 0 {
            return Err(Error::Degree("interior product of a 0-form".into()));
        }
        let mut r = Form::zero(&self.chart, self.degree - 1);
        for (k, c) in &self.terms {
            for (p, &i) in k.iter().enumerate() {
                if x[i].is_zero() {
                    continue;
                }
                let mut rest = k.clone();
                rest.remove(p);
                let v = x[i].mul(c);
                r.accumulate(rest, if p % 2 == 1 { v.neg() } else { v });
            }
        }
        Ok(r)
    }

    /// Contraction with the coordinate vector `∂_i`.
    pub fn interior_basis(&self, i: usize) -> Result<Form<C>> {
        if self.degree == 0 {
            return Err(Error::Degree("interior product of a 0-form".into()));
        }
        let mut r = Form::zero(&self.chart, self.degree - 1);
        for (k, c) in &self.terms {
            if let Some(p) = k.iter().position(|&j| j == i) {
                let mut rest = k.clone();
                rest.remove(p);
                r.accumulate(rest, if p % 2 == 1 { c.neg() } else { c.clone() });
            }
        }
        Ok(r)
    }

    /// Antisymmetric coefficient matrix `M[i][j] = ω(∂_i, ∂_j)` of a 2-form.
    pub fn matrix(&self) -> Result<Vec<Vec<Option<C>>>> {
        if self.degree != 2 {
            return Err(Error::Degree(format!("matrix of a {}-form", self.degree)));
        }
        let n = self.dim();
        let mut m = vec![vec![None; n]; n];
        for (k, c) in &self.terms {
            m[k[0]][k[1]] = Some(c.clone());
            m[k[1]][k[0]] = Some(c.neg());
        }
        Ok(m)
    }
}

impl Form<f64> {
    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Coefficient with zeros for absent indices.
    pub fn coeff(&self, idx: &[usize]) -> f64 {
        self.terms.get(idx).copied().unwrap_or(0.0)
    }

    /// Dense antisymmetric matrix of a 2-form.
    pub fn dense_matrix(&self) -> Result<nalgebra::DMatrix<f64>> {
        let m = self.matrix()?;
        let n = self.dim();
        Ok(nalgebra::DMatrix::from_fn(n, n, |i, j| m[i][j].unwrap_or(0.0)))
    }

    /// 2-form with `ω(∂_i, ∂_j) = m[(i, j)]`, read from the upper triangle.
    pub fn from_matrix(chart: &Arc<Chart>, m: &nalgebra::DMatrix<f64>) -> Form<f64> {
        let n = chart.dim();
        let mut f = Form::zero(chart, 2);
        for i in 0..n {
            for j in i + 1..n {
                f.accumulate(vec![i, j], m[(i, j)]);
            }
        }
        f
    }

    /// Evaluate on `k` vectors.
    pub fn apply(&self, vs: &[&[f64]]) -> Result<f64> {
        if vs.len() != self.degree {
            return Err(Error::Degree(format!("{}-form applied to {} vectors", self.degree, vs.len())));
        }
        let mut f = self.clone();
        for v in vs {
            f = f.interior(v)?;
        }
        Ok(f.coeff(&[]))
    }
}

impl Form<Taylor> {
    /// Exterior derivative on jets; the result is one order lower.
    pub fn d(&self) -> Result<Form<Taylor>> {
        if self.degree >= self.dim() {
            return Ok(Form::zero(&self.chart, self.degree + 1));
        }
        let mut r = Form::zero(&self.chart, self.degree + 1);
        for (k, c) in &self.terms {
            for j in 0..self.dim() {
                if k.contains(&j) {
                    continue;
                }
                let dc = c.derivative(j);
                let mut idx = vec![j];
                idx.extend_from_slice(k);
                let (sorted, sign) = sort_with_sign(&idx).expect("fresh index");
                r.accumulate(sorted, if sign < 0.0 { dc.neg() } else { dc });
            }
        }
        Ok(r)
    }

    pub fn values(&self) -> Form<f64> {
        let mut r = Form::zero(&self.chart, self.degree);
        for (k, c) in &self.terms {
            r.accumulate(k.clone(), c.value());
        }
        r
    }
}

impl DifferentialForm {
    /// `coeff · dx_{i1}∧...∧dx_{ik}` for any index order.
    pub fn monomial(chart: &Arc<Chart>, idx: &[usize], coeff: ScalarField) -> Result<DifferentialForm> {
        Form::from_terms(chart, idx.len(), [(idx.to_vec(), coeff)])
    }

    /// `dx_{i1}∧...∧dx_{ik}` with unit coefficient.
    pub fn basis(chart: &Arc<Chart>, idx: &[usize]) -> Result<DifferentialForm> {
        Self::monomial(chart, idx, ScalarField::constant(chart, 1.0))
    }

    /// Terms given as (coefficient expression, coordinate names).
    pub fn parse_terms(chart: &Arc<Chart>, degree: usize, terms: &[(&str, &[&str])]) -> Result<DifferentialForm> {
        let mut out = Vec::with_capacity(terms.len());
        for (src, names) in terms {
            let c = ScalarField::parse(src, chart)?;
            let idx = names
                .iter()
                .map(|n| {
                    chart.index_of(n).ok_or_else(|| Error::UnknownIdentifier { name: (*n).into(), offset: 0 })
                })
                .collect::<Result<Vec<_>>>()?;
            out.push((idx, c));
        }
        Form::from_terms(chart, degree, out)
    }

    /// A 0-form.
    pub fn function(f: ScalarField) -> DifferentialForm {
        let chart = f.chart().clone();
        Form::from_terms(&chart, 0, [(vec![], f)]).expect("0-form")
    }

    /// Volume form `dx_1∧...∧dx_n`.
    pub fn coordinate_volume(chart: &Arc<Chart>) -> DifferentialForm {
        let all: Vec<usize> = (0..chart.dim()).collect();
        Self::basis(chart, &all).expect("top degree")
    }

    pub fn eval(&self, pt: &[f64]) -> Result<Form<f64>> {
        self.try_map(|c| c.eval(pt))
    }

    pub fn taylor(&self, pt: &[f64], order: usize) -> Result<Form<Taylor>> {
        self.try_map(|c| c.eval_taylor(pt, order))
    }

    /// Exterior derivative; coefficients become derivative markers.
    pub fn d(&self) -> DifferentialForm {
        let mut r = Form::zero(&self.chart, self.degree + 1);
        if self.degree >= self.dim() {
            return r;
        }
        for (k, c) in &self.terms {
            for j in 0..self.dim() {
                if k.contains(&j) || c.independent_of(j) {
                    continue;
                }
                let mut idx = vec![j];
                idx.extend_from_slice(k);
                let (sorted, sign) = sort_with_sign(&idx).expect("fresh index");
                let dc = c.diff(j);
                r.accumulate(sorted, if sign < 0.0 { -dc } else { dc });
            }
        }
        r
    }

    /// `dα` evaluated at a point from first-order jets.
    pub fn d_at(&self, pt: &[f64]) -> Result<Form<f64>> {
        Ok(self.taylor(pt, 1)?.d()?.values())
    }

    /// Cartan: `L_X α = ι_X dα + d ι_X α`.
    pub fn lie_derivative(&self, x: &super::VectorField) -> Result<DifferentialForm> {
        if !same_chart(&self.chart, x.chart()) {
            return Err(Error::ChartMismatch(format!("Lie derivative: {} vs {}", self.chart, x.chart())));
        }
        let first = if self.degree < self.dim() {
            self.d().interior(x.components())?
        } else {
            Form::zero(&self.chart, self.degree)
        };
        if self.degree == 0 {
            return Ok(first);
        }
        first.add(&self.interior(x.components())?.d())
    }

    /// Exact coordinate substitution of all coefficients onto another chart.
    pub fn lift(&self, target: &Arc<Chart>) -> Result<DifferentialForm> {
        let mut map = Vec::with_capacity(self.dim());
        for n in self.chart.names() {
            map.push(
                target
                    .index_of(n)
                    .ok_or_else(|| Error::ChartMismatch(format!("`{n}` is missing from {target}")))?,
            );
        }
        let mut r = Form::zero(target, self.degree);
        for (k, c) in &self.terms {
            let idx: Vec<usize> = k.iter().map(|&i| map[i]).collect();
            let (sorted, sign) = sort_with_sign(&idx).expect("injective");
            let c = c.lift(target)?;
            r.accumulate(sorted, if sign < 0.0 { -c } else { c });
        }
        Ok(r)
    }

    pub fn to_json(&self) -> FormJson {
        FormJson {
            degree: self.degree,
            chart: self.chart.names().to_vec(),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| TermJson { index: k.clone(), coeff: c.to_string() })
                .collect(),
        }
    }

    pub fn from_json(j: &FormJson) -> Result<DifferentialForm> {
        let chart = Chart::new(&j.chart)?;
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in &j.terms {
            terms.push((t.index.clone(), ScalarField::parse(&t.coeff, &chart)?));
        }
        Form::from_terms(&chart, j.degree, terms)
    }

    /// Largest coefficient magnitude over a point set.
    pub fn max_abs_over(&self, points: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
        let mut best = (0.0, points.first().cloned().unwrap_or_default());
        for p in points {
            let m = self.eval(p)?.max_abs();
            if m > best.0 {
                best = (m, p.clone());
            }
        }
        Ok(best)
    }
}

/// JSON description of a form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormJson {
    pub degree: usize,
    pub chart: Vec<String>,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub index: Vec<usize>,
    pub coeff: String,
}

fn write_basis(f: &mut fmt::Formatter<'_>, chart: &Chart, k: &[usize]) -> fmt::Result {
    for (n, i) in k.iter().enumerate() {
        if n > 0 {
            f.write_str("∧")?;
        }
        write!(f, "d{}", chart.name(*i))?;
    }
    Ok(())
}

impl fmt::Display for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (k, c)) in self.terms.iter().enumerate() {
            let (neg, body) = match c.as_constant() {
                Some(v) if v < 0.0 => (true, format!("{}", -v)),
                Some(v) => (false, format!("{v}")),
                None => (false, format!("({c})")),
            };
            match (n, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if self.degree == 0 {
                f.write_str(&body)?;
                continue;
            }
            if body != "1" {
                write!(f, "{body} ")?;
            }
            write_basis(f, &self.chart, k)?;
        }
        Ok(())
    }
}

impl fmt::Debug for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form[{}]({})", self.degree, self)
    }
}

impl fmt::Display for Form<f64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (k, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(if *c < 0.0 { " - " } else { " + " })?;
            } else if *c < 0.0 {
                f.write_str("-")?;
            }
            write!(f, "{} ", c.abs())?;
            write_basis(f, &self.chart, k)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Form<f64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form[{}]({})", self.degree, self)
    }
}

impl fmt::Debug for Form<Taylor> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form[{}]({:?})", self.degree, self.values())
    }
}
