//! Incompressible flows: velocity gradients, the pressure Poisson source,
//! stream functions, the Burgers family and gridded diagnostics.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::VectorField;
use crate::fieldexpr::{Chart, ScalarField};
use crate::ma4::{classify_value, plane_chart, Classification};
use crate::ma6::{self, EulerPair6};
use crate::report::Report;

/// `M[i][j] = ∂u_i/∂x_j`, from exact first-order jets.
pub fn velocity_gradient(u: &VectorField, pt: &[f64]) -> Result<DMatrix<f64>> {
    let n = u.chart().dim();
    if u.components().len() != n || !(2..=3).contains(&n) {
        return Err(Error::Dimension { expected: 3, got: n });
    }
    let mut m = DMatrix::zeros(n, n);
    for (i, c) in u.components().iter().enumerate() {
        if c.as_constant().is_some() {
            continue;
        }
        let jet = c.eval_jet(pt, 1)?;
        for j in 0..n {
            m[(i, j)] = jet.partial(&[j]);
        }
    }
    Ok(m)
}

/// `−u_ij u_ji = −tr(M²)`.
pub fn rhs_from_gradient(m: &DMatrix<f64>) -> f64 {
    -(m * m).trace()
}

/// The pressure Laplacian implied by the Euler equations, `Δp = −u_ij u_ji`.
pub fn pressure_rhs(u: &VectorField, pt: &[f64]) -> Result<f64> {
    Ok(rhs_from_gradient(&velocity_gradient(u, pt)?))
}

/// Vorticity and strain decomposition of the velocity gradient.
#[derive(Debug, Clone, Serialize)]
pub struct WeissSplit {
    /// One entry in 2D, three in 3D.
    pub vorticity: Vec<f64>,
    pub tr_s2: f64,
    /// `ζ²/2 − tr S²`, reported in 2D only.
    pub rhs: Option<f64>,
    pub pressure_rhs: f64,
}

pub fn weiss_from_gradient(m: &DMatrix<f64>) -> WeissSplit {
    let s = (m + m.transpose()) * 0.5;
    let tr_s2 = (&s * &s).trace();
    let vorticity = if m.nrows() == 2 {
        vec![m[(1, 0)] - m[(0, 1)]]
    } else {
        vec![m[(2, 1)] - m[(1, 2)], m[(0, 2)] - m[(2, 0)], m[(1, 0)] - m[(0, 1)]]
    };
    let rhs = (m.nrows() == 2).then(|| vorticity[0] * vorticity[0] / 2.0 - tr_s2);
    WeissSplit { vorticity, tr_s2, rhs, pressure_rhs: rhs_from_gradient(m) }
}

pub fn weiss_split(u: &VectorField, pt: &[f64]) -> Result<WeissSplit> {
    Ok(weiss_from_gradient(&velocity_gradient(u, pt)?))
}

/// A planar flow given by its stream function.
#[derive(Debug, Clone)]
pub struct Flow2D {
    pub psi: ScalarField,
}

impl Flow2D {
    pub fn new(psi: ScalarField) -> Result<Flow2D> {
        if psi.chart().dim() != 2 {
            return Err(Error::Dimension { expected: 2, got: psi.chart().dim() });
        }
        Ok(Flow2D { psi })
    }

    /// `(−ψ_x2, ψ_x1)`.
    pub fn velocity(&self) -> VectorField {
        VectorField::new(self.psi.chart(), vec![-self.psi.diff(1), self.psi.diff(0)]).expect("2 components")
    }
}

fn hessian_det(psi: &ScalarField, pt: &[f64]) -> Result<f64> {
    let h = psi.eval_jet(pt, 2)?.hessian();
    Ok(h[0][0] * h[1][1] - h[0][1] * h[0][1])
}

/// `ψ_11 ψ_22 − ψ_12² − a`.
pub fn ma_residual_2d(psi: &ScalarField, a: &ScalarField, pt: &[f64]) -> Result<f64> {
    Ok(hessian_det(psi, &pt[..2])? - a.eval(&pt[..2])?)
}

pub fn space_chart() -> Arc<Chart> {
    ma6::space_chart()
}

/// `Ψ = ψ − (3/8) γ² x3²` over `(x1, x2, x3)`.
pub fn extended_stream(psi: &ScalarField, gamma: f64) -> Result<ScalarField> {
    let c = space_chart();
    let x3 = ScalarField::coord(&c, 2);
    Ok(psi.lift(&c)? - (&x3 * &x3).scale(3.0 / 8.0 * gamma * gamma))
}

/// `Ψ_11 Ψ_22 − Ψ_12² + Ψ_33 − a`.
pub fn extended_residual(big_psi: &ScalarField, a: &ScalarField, pt: &[f64]) -> Result<f64> {
    let h = big_psi.eval_jet(pt, 2)?.hessian();
    Ok(h[0][0] * h[1][1] - h[0][1] * h[0][1] + h[2][2] - a.eval(&pt[..2])?)
}

/// `u = (−γx1/2 − ψ_x2, −γx2/2 + ψ_x1, γx3 − c)`.
#[derive(Debug, Clone)]
pub struct BurgersFlow {
    pub gamma: f64,
    pub c: f64,
    pub psi: ScalarField,
    pub u: VectorField,
}

pub fn burgers_build(gamma: f64, psi: &ScalarField, c: f64) -> Result<BurgersFlow> {
    if psi.chart().dim() != 2 {
        return Err(Error::Dimension { expected: 2, got: psi.chart().dim() });
    }
    let sc = space_chart();
    let x = |i| ScalarField::coord(&sc, i);
    let p1 = psi.diff(0).lift(&sc)?;
    let p2 = psi.diff(1).lift(&sc)?;
    let u = VectorField::new(
        &sc,
        vec![x(0).scale(-gamma / 2.0) - p2, x(1).scale(-gamma / 2.0) + p1, x(2).scale(gamma) - c],
    )?;
    Ok(BurgersFlow { gamma, c, psi: psi.clone(), u })
}

/// Stages of [`prop5_verify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    StreamFunction,
    PressurePoisson,
    Bilagrangian,
}

impl Stage {
    pub fn label(self) -> &'static str {
        match self {
            Stage::StreamFunction => "stream_function",
            Stage::PressurePoisson => "pressure_poisson",
            Stage::Bilagrangian => "bilagrangian",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Prop5Report {
    #[serde(flatten)]
    pub report: Report,
    pub failed_stage: Option<Stage>,
}

/// Checks the Burgers-type construction on 3D sample points.
///
/// Stage one is the planar equation `det Hess ψ = a + 3γ²/4`, stage two is
/// `−u_ij u_ji = 2a` for the built velocity, stage three the bilagrangian
/// condition for the (ω, θ) pair. All stages are evaluated.
pub fn prop5_verify(gamma: f64, psi: &ScalarField, c: f64, a: &ScalarField, pts: &[Vec<f64>]) -> Result<Prop5Report> {
    let flow = burgers_build(gamma, psi, c)?;
    let shifted = a + 0.75 * gamma * gamma;
    let mut r1 = Vec::new();
    let mut r2 = Vec::new();
    for p in pts {
        if p.len() != 3 {
            return Err(Error::Dimension { expected: 3, got: p.len() });
        }
        r1.push((ma_residual_2d(psi, &shifted, p)?.abs(), p.clone()));
        r2.push(((pressure_rhs(&flow.u, p)? - 2.0 * a.eval(&p[..2])?).abs(), p.clone()));
    }
    let mut report = Report::new();
    let ok1 = report.check_max(format!("{}: det Hess ψ = a + 3γ²/4", Stage::StreamFunction.label()), 1e-10, r1);
    let ok2 = report.check_max(format!("{}: −u_ij u_ji = 2a", Stage::PressurePoisson.label()), 1e-10, r2);
    let pair = EulerPair6::new(a)?;
    let bl = ma6::verify_bilagrangian(&pair, &flow.u, pts)?;
    let ok3 = bl.passed();
    report.absorb(&format!("{}: ", Stage::Bilagrangian.label()), bl);
    let failed_stage = [(ok1, Stage::StreamFunction), (ok2, Stage::PressurePoisson), (ok3, Stage::Bilagrangian)]
        .into_iter()
        .find(|(ok, _)| !ok)
        .map(|(_, s)| s);
    Ok(Prop5Report { report, failed_stage })
}

/// Velocity (and optionally pressure) samples on a uniform lattice.
#[derive(Debug, Clone)]
pub struct GridField {
    pub dim: usize,
    pub shape: Vec<usize>,
    pub spacing: Vec<f64>,
    pub origin: Vec<f64>,
    /// `u[i]` holds component `i` in row-major lattice order.
    pub u: Vec<Vec<f64>>,
    pub p: Option<Vec<f64>>,
}

fn expected_header(dim: usize, with_p: bool) -> Vec<String> {
    let mut h: Vec<String> = (1..=dim).map(|i| format!("x{i}")).chain((1..=dim).map(|i| format!("u{i}"))).collect();
    if with_p {
        h.push("p".into());
    }
    h
}

impl GridField {
    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.shape).fold(0, |acc, (&i, &n)| acc * n + i)
    }

    fn unflat(&self, mut k: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim];
        for a in (0..self.dim).rev() {
            idx[a] = k % self.shape[a];
            k /= self.shape[a];
        }
        idx
    }

    pub fn coords(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().enumerate().map(|(a, &i)| self.origin[a] + i as f64 * self.spacing[a]).collect()
    }

    /// Samples an analytic velocity (and pressure) on a lattice.
    pub fn sample(
        u: &VectorField,
        p: Option<&ScalarField>,
        origin: &[f64],
        spacing: &[f64],
        shape: &[usize],
    ) -> Result<GridField> {
        let dim = u.chart().dim();
        if origin.len() != dim || spacing.len() != dim || shape.len() != dim {
            return Err(Error::Grid("origin, spacing and shape must match the velocity dimension".into()));
        }
        let mut g = GridField {
            dim,
            shape: shape.to_vec(),
            spacing: spacing.to_vec(),
            origin: origin.to_vec(),
            u: vec![Vec::new(); dim],
            p: p.map(|_| Vec::new()),
        };
        g.validate()?;
        for k in 0..g.len() {
            let x = g.coords(&g.unflat(k));
            for (comp, f) in g.u.iter_mut().zip(u.components()) {
                comp.push(f.eval(&x)?);
            }
            if let (Some(ps), Some(pf)) = (g.p.as_mut(), p) {
                ps.push(pf.eval(&x)?);
            }
        }
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.dim) {
            return Err(Error::Grid(format!("dimension {} (expected 2 or 3)", self.dim)));
        }
        if self.shape.iter().any(|&n| n < 4) {
            return Err(Error::Grid(format!("shape {:?}: every axis needs at least 4 nodes", self.shape)));
        }
        if self.spacing.iter().any(|&h| !(h > 0.0) || !h.is_finite()) {
            return Err(Error::Grid(format!("spacing {:?} must be positive", self.spacing)));
        }
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(expected_header(self.dim, self.p.is_some())).map_err(|e| Error::Grid(e.to_string()))?;
        for k in 0..self.len() {
            let mut row: Vec<String> = self.coords(&self.unflat(k)).iter().map(|v| format!("{v:e}")).collect();
            row.extend(self.u.iter().map(|c| format!("{:e}", c[k])));
            if let Some(p) = &self.p {
                row.push(format!("{:e}", p[k]));
            }
            w.write_record(&row).map_err(|e| Error::Grid(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Grid(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Grid(e.to_string()))
    }

    pub fn from_reader<R: Read>(r: R) -> Result<GridField> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let header: Vec<String> =
            rdr.headers().map_err(|e| Error::Grid(e.to_string()))?.iter().map(str::to_string).collect();
        let (dim, with_p) = [(2, false), (2, true), (3, false), (3, true)]
            .into_iter()
            .find(|&(d, p)| header == expected_header(d, p))
            .ok_or_else(|| Error::Grid(format!("unexpected header {header:?}")))?;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Grid(e.to_string()))?;
            let vals = rec
                .iter()
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|e| Error::Grid(format!("row {}: {e}", line + 2)))?;
            if vals.len() != header.len() {
                return Err(Error::Grid(format!("row {}: {} fields, expected {}", line + 2, vals.len(), header.len())));
            }
            rows.push(vals);
        }
        if rows.is_empty() {
            return Err(Error::Grid("no data rows".into()));
        }
        // distinct coordinate values per axis give the shape
        let mut shape = Vec::with_capacity(dim);
        let mut origin = Vec::with_capacity(dim);
        let mut spacing = Vec::with_capacity(dim);
        for a in 0..dim {
            let mut v: Vec<f64> = rows.iter().map(|r| r[a]).collect();
            v.sort_by(f64::total_cmp);
            v.dedup_by(|x, y| (*x - *y).abs() <= 1e-9 * y.abs().max(1.0));
            if v.len() < 2 {
                return Err(Error::Grid(format!("axis x{} has a single coordinate value", a + 1)));
            }
            shape.push(v.len());
            origin.push(v[0]);
            spacing.push((v[v.len() - 1] - v[0]) / (v.len() - 1) as f64);
        }
        let mut g = GridField { dim, shape, spacing, origin, u: vec![Vec::new(); dim], p: with_p.then(Vec::new) };
        g.validate()?;
        if rows.len() != g.len() {
            return Err(Error::Grid(format!("{} rows for a lattice of shape {:?}", rows.len(), g.shape)));
        }
        for (k, r) in rows.iter().enumerate() {
            let want = g.coords(&g.unflat(k));
            for a in 0..dim {
                if (r[a] - want[a]).abs() > 1e-9 * want[a].abs().max(1.0) {
                    return Err(Error::Grid(format!(
                        "row {}: x{} = {} but the uniform lattice expects {} (nonuniform spacing or unordered rows)",
                        k + 2,
                        a + 1,
                        r[a],
                        want[a]
                    )));
                }
            }
            for i in 0..dim {
                g.u[i].push(r[dim + i]);
            }
            if let Some(p) = g.p.as_mut() {
                p.push(r[2 * dim]);
            }
        }
        Ok(g)
    }
}

pub fn grid_load(path: &Path) -> Result<GridField> {
    let f = std::fs::File::open(path).map_err(|e| Error::Grid(format!("{}: {e}", path.display())))?;
    GridField::from_reader(std::io::BufReader::new(f))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Stats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Counts {
    pub elliptic: usize,
    pub hyperbolic: usize,
    pub degenerate: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct NodeRecord {
    pub index: Vec<usize>,
    pub x: Vec<f64>,
    pub fields: BTreeMap<&'static str, f64>,
    pub class: Classification,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridReport {
    pub dim: usize,
    pub shape: Vec<usize>,
    pub interior_nodes: usize,
    /// Nodes within two cells of the boundary carry no stencil values.
    pub boundary_missing: usize,
    pub summary: BTreeMap<&'static str, Stats>,
    pub counts: Counts,
    pub classification_tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<NodeRecord>>,
}

impl GridReport {
    pub fn field(&self, name: &str) -> Option<&Stats> {
        self.summary.get(name)
    }
}

/// Fourth-order centered first derivative along `axis`.
fn d1(g: &GridField, f: &[f64], idx: &[usize], axis: usize) -> f64 {
    let at = |o: isize| {
        let mut j = idx.to_vec();
        j[axis] = (idx[axis] as isize + o) as usize;
        f[g.flat(&j)]
    };
    (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * g.spacing[axis])
}

/// Fourth-order centered second derivative along `axis`.
fn d2(g: &GridField, f: &[f64], idx: &[usize], axis: usize) -> f64 {
    let at = |o: isize| {
        let mut j = idx.to_vec();
        j[axis] = (idx[axis] as isize + o) as usize;
        f[g.flat(&j)]
    };
    let h = g.spacing[axis];
    (-at(-2) + 16.0 * at(-1) - 30.0 * at(0) + 16.0 * at(1) - at(2)) / (12.0 * h * h)
}

/// Stencil diagnostics on interior nodes.
///
/// Fields: `div`, `tr_s2`, `neg_trace_m2`, plus `zeta` and `rhs` in 2D
/// and `zeta_norm` in 3D; with pressure samples also `lap_p` and
/// `poisson_residual = lap_p − neg_trace_m2`. Nodes are classified by the sign
/// of the Poisson source with tolerance `1e-8 · max(1, max |source|)`.
pub fn grid_analyze(g: &GridField, full: bool) -> Result<GridReport> {
    g.validate()?;
    let interior: Vec<usize> = (0..g.len())
        .filter(|&k| g.unflat(k).iter().zip(&g.shape).all(|(&i, &n)| i >= 2 && i + 2 < n))
        .collect();
    let mut records = Vec::with_capacity(interior.len());
    for &k in &interior {
        let idx = g.unflat(k);
        let m = DMatrix::from_fn(g.dim, g.dim, |i, j| d1(g, &g.u[i], &idx, j));
        let w = weiss_from_gradient(&m);
        let mut fields = BTreeMap::new();
        fields.insert("div", m.trace());
        fields.insert("tr_s2", w.tr_s2);
        fields.insert("neg_trace_m2", w.pressure_rhs);
        if let Some(rhs) = w.rhs {
            fields.insert("zeta", w.vorticity[0]);
            fields.insert("rhs", rhs);
        } else {
            fields.insert("zeta_norm", w.vorticity.iter().map(|v| v * v).sum::<f64>().sqrt());
        }
        if let Some(p) = &g.p {
            let lap: f64 = (0..g.dim).map(|a| d2(g, p, &idx, a)).sum();
            fields.insert("lap_p", lap);
            fields.insert("poisson_residual", lap - w.pressure_rhs);
        }
        let x = g.coords(&idx);
        records.push(NodeRecord { index: idx, x, fields, class: Classification::Degenerate });
    }
    let source = if g.dim == 2 { "rhs" } else { "neg_trace_m2" };
    let smax = records.iter().map(|r| r.fields[source].abs()).fold(0.0, f64::max);
    let tol = 1e-8 * smax.max(1.0);
    let mut counts = Counts::default();
    for r in &mut records {
        r.class = classify_value(r.fields[source], tol);
        match r.class {
            Classification::Elliptic => counts.elliptic += 1,
            Classification::Hyperbolic => counts.hyperbolic += 1,
            Classification::Degenerate => counts.degenerate += 1,
        }
    }
    let mut summary = BTreeMap::new();
    if let Some(first) = records.first() {
        for &name in first.fields.keys() {
            let vals = records.iter().map(|r| r.fields[name]);
            let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
            for v in vals {
                lo = lo.min(v);
                hi = hi.max(v);
                sum += v;
            }
            summary.insert(name, Stats { min: lo, max: hi, mean: sum / records.len() as f64 });
        }
    }
    Ok(GridReport {
        dim: g.dim,
        shape: g.shape.clone(),
        interior_nodes: records.len(),
        boundary_missing: g.len() - records.len(),
        summary,
        counts,
        classification_tol: tol,
        nodes: full.then_some(records),
    })
}

/// `(−ψ_x2, ψ_x1)` for the Taylor-Green cell `ψ = sin x1 sin x2`, with its exact source.
pub fn taylor_green() -> (VectorField, ScalarField) {
    let c = plane_chart();
    let psi = ScalarField::parse("sin(x1)*sin(x2)", &c).expect("static expression");
    let flow = Flow2D::new(psi.clone()).expect("planar");
    let h = |i: usize, j: usize| psi.diff_many(&[i, j]);
    let exact = (h(0, 0) * h(1, 1) - h(0, 1) * h(0, 1)).scale(2.0);
    (flow.velocity(), exact)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(s: &str) -> ScalarField {
        ScalarField::parse(s, &plane_chart()).unwrap()
    }

    fn v2(a: &str, b: &str) -> VectorField {
        VectorField::parse(&plane_chart(), &[a, b]).unwrap()
    }

    #[test]
    fn pressure_sources() {
        assert_eq!(pressure_rhs(&v2("-x2", "x1"), &[0.3, 0.4]).unwrap(), 2.0);
        assert_eq!(pressure_rhs(&v2("x1", "-x2"), &[0.3, 0.4]).unwrap(), -2.0);
        let u = VectorField::parse(&space_chart(), &["-x1 - 2*x2", "-x2 + 2*x1", "2*x3"]).unwrap();
        assert_eq!(pressure_rhs(&u, &[0.1, 0.2, 0.3]).unwrap(), 2.0);
    }

    #[test]
    fn weiss() {
        let w = weiss_split(&v2("-x2", "x1"), &[0.0, 0.0]).unwrap();
        assert_eq!((w.vorticity[0], w.tr_s2, w.rhs), (2.0, 0.0, Some(2.0)));
        let w = weiss_split(&v2("x1", "-x2"), &[0.0, 0.0]).unwrap();
        assert_eq!((w.vorticity[0], w.tr_s2, w.rhs), (0.0, 2.0, Some(-2.0)));
        let f = Flow2D::new(plane("sin(x1)*x2^2 + x1^3")).unwrap();
        let w = weiss_split(&f.velocity(), &[0.4, -0.9]).unwrap();
        assert!((w.rhs.unwrap() - w.pressure_rhs).abs() < 1e-12);
    }

    #[test]
    fn planar_ma() {
        let pt = [0.2, 0.7];
        assert_eq!(ma_residual_2d(&plane("(x1^2 + x2^2)/2"), &plane("1"), &pt).unwrap(), 0.0);
        assert_eq!(ma_residual_2d(&plane("x1*x2"), &plane("-1"), &pt).unwrap(), 0.0);
        assert_eq!(ma_residual_2d(&plane("x1*x2"), &plane("0"), &pt).unwrap(), -1.0);
    }

    #[test]
    fn extended_stream_function() {
        let big = extended_stream(&plane("0"), 2.0).unwrap();
        assert_eq!(big.eval_jet(&[0.0, 0.0, 0.5], 2).unwrap().partial(&[2, 2]), -3.0);
        let big = extended_stream(&plane("x1^2 + x2^2"), 2.0).unwrap();
        assert_eq!(extended_residual(&big, &plane("1"), &[0.1, 0.2, 0.3]).unwrap(), 0.0);
    }

    #[test]
    fn burgers_velocities() {
        let f = burgers_build(2.0, &plane("x1^2 + x2^2"), 0.0).unwrap();
        let want = VectorField::parse(&space_chart(), &["-x1 - 2*x2", "-x2 + 2*x1", "2*x3"]).unwrap();
        for p in crate::sample::unit_box(1, 10, 3) {
            assert_eq!(f.u.eval(&p).unwrap(), want.eval(&p).unwrap());
            assert_eq!(velocity_gradient(&f.u, &p).unwrap().trace(), 0.0);
        }
        let f = burgers_build(2.0, &plane("0"), 1.0).unwrap();
        assert_eq!(f.u.eval(&[1.0, 2.0, 3.0]).unwrap(), vec![-1.0, -2.0, 5.0]);
    }

    #[test]
    fn construction_stages() {
        let pts = crate::sample::unit_box(2, 20, 3);
        let r = prop5_verify(2.0, &plane("x1^2 + x2^2"), 0.0, &plane("1"), &pts).unwrap();
        assert!(r.report.passed(), "{:?}", r.report);
        let r = prop5_verify(0.0, &plane("(x1^2 + x2^2)/2"), 0.0, &plane("1"), &pts).unwrap();
        assert!(r.report.passed());
        let r = prop5_verify(2.0, &plane("x1^2 + x2^2"), 0.0, &plane("0"), &pts).unwrap();
        assert_eq!(r.failed_stage, Some(Stage::StreamFunction));
        // det Hess ψ = 4 against 0 + 3γ²/4 = 3
        assert_eq!(r.report.per_check[0].residual, 1.0);
    }

    #[test]
    fn grid_rotation_is_exact() {
        let h = 2.0 / 31.0;
        let g = GridField::sample(&v2("-x2", "x1"), None, &[-1.0, -1.0], &[h, h], &[32, 32]).unwrap();
        let rep = grid_analyze(&g, false).unwrap();
        let rhs = rep.field("rhs").unwrap();
        assert!((rhs.min - 2.0).abs() < 1e-10 && (rhs.max - 2.0).abs() < 1e-10);
        let div = rep.field("div").unwrap();
        assert!(div.min.abs().max(div.max.abs()) < 1e-10);
        assert_eq!(rep.counts.elliptic, 28 * 28);
        assert_eq!(rep.boundary_missing, 32 * 32 - 28 * 28);
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let h = 0.25;
        let g = GridField::sample(&v2("x1", "-x2"), Some(&plane("x1^2")), &[0.0, 0.0], &[h, h], &[5, 6]).unwrap();
        let text = g.to_csv().unwrap();
        let back = GridField::from_reader(text.as_bytes()).unwrap();
        assert_eq!(back.shape, vec![5, 6]);
        assert_eq!(back.u, g.u);
        let mut lines: Vec<&str> = text.lines().collect();
        lines.pop();
        assert!(matches!(GridField::from_reader(lines.join("\n").as_bytes()), Err(Error::Grid(_))));
        let bad = text.replacen("x1,x2", "x1,y2", 1);
        assert!(GridField::from_reader(bad.as_bytes()).is_err());
    }
}
