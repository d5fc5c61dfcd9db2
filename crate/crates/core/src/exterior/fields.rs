use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fieldexpr::{same_chart, Chart, ScalarField};

use super::form::{DifferentialForm, Form};

fn check_chart(chart: &Arc<Chart>, f: &ScalarField) -> Result<()> {
    if !same_chart(chart, f.chart()) {
        return Err(Error::ChartMismatch(format!("field on {} used on {}", f.chart(), chart)));
    }
    Ok(())
}

fn eval_matrix(rows: &[Vec<ScalarField>], pt: &[f64]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = rows[i][j].eval(pt)?;
        }
    }
    Ok(m)
}

#[derive(Clone, Debug)]
pub struct VectorField {
    chart: Arc<Chart>,
    comps: Vec<ScalarField>,
}

impl VectorField {
    pub fn new(chart: &Arc<Chart>, comps: Vec<ScalarField>) -> Result<VectorField> {
        if comps.len() != chart.dim() {
            return Err(Error::Dimension { expected: chart.dim(), got: comps.len() });
        }
        for c in &comps {
            check_chart(chart, c)?;
        }
        Ok(VectorField { chart: chart.clone(), comps })
    }

    pub fn constant(chart: &Arc<Chart>, v: &[f64]) -> Result<VectorField> {
        let comps = v.iter().map(|&x| ScalarField::constant(chart, x)).collect();
        VectorField::new(chart, comps)
    }

    /// Coordinate vector `∂_i`.
    pub fn basis(chart: &Arc<Chart>, i: usize) -> VectorField {
        let mut v = vec![0.0; chart.dim()];
        v[i] = 1.0;
        VectorField::constant(chart, &v).expect("right length")
    }

    pub fn parse(chart: &Arc<Chart>, srcs: &[&str]) -> Result<VectorField> {
        let comps = srcs.iter().map(|s| ScalarField::parse(s, chart)).collect::<Result<Vec<_>>>()?;
        VectorField::new(chart, comps)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.comps
    }

    /// Constant components, if every one is a literal.
    pub fn as_constant(&self) -> Option<Vec<f64>> {
        self.comps.iter().map(|c| c.as_constant()).collect()
    }

    pub fn eval(&self, pt: &[f64]) -> Result<Vec<f64>> {
        self.comps.iter().map(|c| c.eval(pt)).collect()
    }
}

/// Matrix of fields acting on vectors: `(A X)^i = A[i][j] X^j`.
#[derive(Clone, Debug)]
pub struct OperatorField {
    chart: Arc<Chart>,
    rows: Vec<Vec<ScalarField>>,
}

impl OperatorField {
    pub fn new(chart: &Arc<Chart>, rows: Vec<Vec<ScalarField>>) -> Result<OperatorField> {
        let n = chart.dim();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension { expected: n, got: rows.len() });
        }
        for c in rows.iter().flatten() {
            check_chart(chart, c)?;
        }
        Ok(OperatorField { chart: chart.clone(), rows })
    }

    pub fn from_constant(chart: &Arc<Chart>, m: &DMatrix<f64>) -> OperatorField {
        let n = chart.dim();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| ScalarField::constant(chart, m[(i, j)])).collect())
            .collect();
        OperatorField { chart: chart.clone(), rows }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn entry(&self, i: usize, j: usize) -> &ScalarField {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<ScalarField>] {
        &self.rows
    }

    pub fn eval(&self, pt: &[f64]) -> Result<DMatrix<f64>> {
        eval_matrix(&self.rows, pt)
    }

    pub fn mul(&self, o: &OperatorField) -> OperatorField {
        let n = self.rows.len();
        let zero = ScalarField::constant(&self.chart, 0.0);
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).fold(zero.clone(), |acc, k| acc + &self.rows[i][k] * &o.rows[k][j]))
                    .collect()
            })
            .collect();
        OperatorField { chart: self.chart.clone(), rows }
    }

    pub fn scale_by(&self, f: &ScalarField) -> OperatorField {
        let rows = self.rows.iter().map(|r| r.iter().map(|c| f * c).collect()).collect();
        OperatorField { chart: self.chart.clone(), rows }
    }

    pub fn apply(&self, x: &VectorField) -> VectorField {
        let n = self.rows.len();
        let zero = ScalarField::constant(&self.chart, 0.0);
        let comps = (0..n)
            .map(|i| (0..n).fold(zero.clone(), |acc, j| acc + &self.rows[i][j] * &x.components()[j]))
            .collect();
        VectorField { chart: self.chart.clone(), comps }
    }

    pub fn trace(&self) -> ScalarField {
        let zero = ScalarField::constant(&self.chart, 0.0);
        (0..self.rows.len()).fold(zero, |acc, i| acc + &self.rows[i][i])
    }
}

/// Symmetric 2-tensor `g(X, Y) = Xᵀ G Y`.
#[derive(Clone, Debug)]
pub struct SymmetricTensorField {
    chart: Arc<Chart>,
    rows: Vec<Vec<ScalarField>>,
}

impl SymmetricTensorField {
    /// Built from the upper triangle (including the diagonal).
    pub fn from_upper(chart: &Arc<Chart>, entry: impl Fn(usize, usize) -> ScalarField) -> SymmetricTensorField {
        let n = chart.dim();
        let mut rows = vec![vec![ScalarField::constant(chart, 0.0); n]; n];
        for i in 0..n {
            for j in i..n {
                let v = entry(i, j);
                rows[i][j] = v.clone();
                rows[j][i] = v;
            }
        }
        SymmetricTensorField { chart: chart.clone(), rows }
    }

    pub fn from_constant(chart: &Arc<Chart>, m: &DMatrix<f64>) -> Result<SymmetricTensorField> {
        if (m - m.transpose()).amax() != 0.0 {
            return Err(Error::Invalid("matrix is not symmetric".into()));
        }
        Ok(Self::from_upper(chart, |i, j| ScalarField::constant(chart, m[(i, j)])))
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn entry(&self, i: usize, j: usize) -> &ScalarField {
        &self.rows[i][j]
    }

    pub fn eval(&self, pt: &[f64]) -> Result<DMatrix<f64>> {
        eval_matrix(&self.rows, pt)
    }

    /// Determinant and trace as fields (dimension 2 only).
    pub fn det_trace_2d(&self) -> Option<(ScalarField, ScalarField)> {
        if self.rows.len() != 2 {
            return None;
        }
        let r = &self.rows;
        Some((&r[0][0] * &r[1][1] - &r[0][1] * &r[1][0], &r[0][0] + &r[1][1]))
    }
}

/// Smooth map from a source chart into a target chart, `y_i = F_i(x)`.
#[derive(Clone, Debug)]
pub struct GraphMap {
    source: Arc<Chart>,
    target: Arc<Chart>,
    comps: Vec<ScalarField>,
}

impl GraphMap {
    pub fn new(source: &Arc<Chart>, target: &Arc<Chart>, comps: Vec<ScalarField>) -> Result<GraphMap> {
        if comps.len() != target.dim() {
            return Err(Error::Dimension { expected: target.dim(), got: comps.len() });
        }
        if source.dim() > target.dim() {
            return Err(Error::Invalid(format!("map from {source} into the smaller chart {target}")));
        }
        for c in &comps {
            check_chart(source, c)?;
        }
        Ok(GraphMap { source: source.clone(), target: target.clone(), comps })
    }

    pub fn parse(source: &Arc<Chart>, target: &Arc<Chart>, srcs: &[&str]) -> Result<GraphMap> {
        let comps = srcs.iter().map(|s| ScalarField::parse(s, source)).collect::<Result<Vec<_>>>()?;
        GraphMap::new(source, target, comps)
    }

    /// The identity of a chart.
    pub fn identity(chart: &Arc<Chart>) -> GraphMap {
        let comps = (0..chart.dim()).map(|i| ScalarField::coord(chart, i)).collect();
        GraphMap { source: chart.clone(), target: chart.clone(), comps }
    }

    pub fn source(&self) -> &Arc<Chart> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Chart> {
        &self.target
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.comps
    }

    pub fn apply(&self, pt: &[f64]) -> Result<Vec<f64>> {
        self.comps.iter().map(|c| c.eval(pt)).collect()
    }

    /// `J[i][a] = ∂F_i/∂x_a`.
    pub fn jacobian(&self) -> Vec<Vec<ScalarField>> {
        self.comps.iter().map(|c| (0..self.source.dim()).map(|a| c.diff(a)).collect()).collect()
    }

    fn check_target(&self, chart: &Arc<Chart>) -> Result<()> {
        if !same_chart(&self.target, chart) {
            return Err(Error::ChartMismatch(format!("map lands in {}, object lives on {}", self.target, chart)));
        }
        Ok(())
    }

    /// Pull a scalar field back: `f ∘ F`.
    pub fn pull_scalar(&self, f: &ScalarField) -> Result<ScalarField> {
        self.check_target(f.chart())?;
        f.compose(&self.source, &self.comps)
    }

    /// `F*α`, via the differentials `dF_i`.
    pub fn pullback(&self, alpha: &DifferentialForm) -> Result<DifferentialForm> {
        self.check_target(alpha.chart())?;
        let k = alpha.degree();
        if k > self.source.dim() {
            return Ok(Form::zero(&self.source, k));
        }
        let jac = self.jacobian();
        let dfs: Vec<DifferentialForm> = jac
            .iter()
            .map(|row| {
                Form::from_terms(&self.source, 1, row.iter().enumerate().map(|(a, c)| (vec![a], c.clone())))
            })
            .collect::<Result<_>>()?;
        let mut out: DifferentialForm = Form::zero(&self.source, k);
        for (idx, c) in alpha.terms() {
            let mut piece = DifferentialForm::function(self.pull_scalar(c)?);
            for &i in idx {
                piece = piece.wedge(&dfs[i])?;
            }
            out = out.add(&piece)?;
        }
        Ok(out)
    }

    /// `Jᵀ (g ∘ F) J`.
    pub fn pullback_symmetric(&self, g: &SymmetricTensorField) -> Result<SymmetricTensorField> {
        self.check_target(g.chart())?;
        let jac = self.jacobian();
        let n = self.target.dim();
        let pulled: Vec<Vec<ScalarField>> = (0..n)
            .map(|i| (0..n).map(|j| self.pull_scalar(g.entry(i, j))).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let zero = ScalarField::constant(&self.source, 0.0);
        Ok(SymmetricTensorField::from_upper(&self.source, |a, b| {
            let mut acc = zero.clone();
            for i in 0..n {
                if jac[i][a].is_zero() {
                    continue;
                }
                for j in 0..n {
                    acc = acc + &(&jac[i][a] * &pulled[i][j]) * &jac[j][b];
                }
            }
            acc
        }))
    }
}

/// Symmetric tensor `Σ c (dx_i ⊙ dx_j)` with `a⊙b = a⊗b + b⊗a` for `i ≠ j`.
pub fn symmetric_from_products(chart: &Arc<Chart>, terms: &[(ScalarField, usize, usize)]) -> SymmetricTensorField {
    let n = chart.dim();
    let mut m = vec![vec![ScalarField::constant(chart, 0.0); n]; n];
    for (c, i, j) in terms {
        let (i, j) = if i <= j { (*i, *j) } else { (*j, *i) };
        m[i][j] = &m[i][j] + c;
    }
    SymmetricTensorField::from_upper(chart, |i, j| m[i][j].clone())
}

impl fmt::Display for OperatorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|c| c.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}
