//! Monge-Ampère structures on 6-dimensional phase space.
//!
//! Charts are `(x1,x2,x3,xi1,xi2,xi3)` or `(x1,x2,x3,u1,u2,u3)`, with
//! `Ω = Σ dx_i∧dy_i` and the Liouville volume `vol = Ω³/3!`.
//! The Hitchin tensor is `⟨α, K X⟩ = ι_Xω∧ω∧α / vol`.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::curvature::{self, Flatness, MetricField};
use crate::error::{Error, Result};
use crate::exterior::{signature, DifferentialForm, Form, GraphMap, OperatorField, SymmetricTensorField, VectorField};
use crate::fieldexpr::{Chart, ScalarField};
use crate::report::{worst, Report};
use crate::sample;

/// Below this `|λ|` a form counts as degenerate.
pub const LAMBDA_TOL: f64 = 1e-10;

pub fn chart_xi() -> Arc<Chart> {
    Chart::new(&["x1", "x2", "x3", "xi1", "xi2", "xi3"]).expect("static chart")
}

pub fn chart_u() -> Arc<Chart> {
    Chart::new(&["x1", "x2", "x3", "u1", "u2", "u3"]).expect("static chart")
}

pub fn space_chart() -> Arc<Chart> {
    Chart::new(&["x1", "x2", "x3"]).expect("static chart")
}

/// `Ω = dx1∧dy1 + dx2∧dy2 + dx3∧dy3`.
pub fn canonical_symplectic(chart: &Arc<Chart>) -> DifferentialForm {
    let one = ScalarField::constant(chart, 1.0);
    Form::from_terms(chart, 2, (0..3).map(|i| (vec![i, i + 3], one.clone()))).expect("static form")
}

/// `Ω³/3!`, which is `−dx1∧dx2∧dx3∧dy1∧dy2∧dy3`.
pub fn liouville_volume(big: &DifferentialForm) -> Result<DifferentialForm> {
    Ok(big.wedge(big)?.wedge(big)?.scale(1.0 / 6.0))
}

fn top_const(vol: &DifferentialForm) -> Result<f64> {
    vol.top()
        .and_then(|c| c.as_constant())
        .filter(|v| *v != 0.0)
        .ok_or_else(|| Error::Invalid("volume form must be a nonzero constant top form".into()))
}

/// A 3-form ω, effective with respect to Ω.
#[derive(Debug, Clone)]
pub struct MaStructure6 {
    pub big: DifferentialForm,
    pub omega: DifferentialForm,
    pub vol: DifferentialForm,
}

impl MaStructure6 {
    pub fn new(big: DifferentialForm, omega: DifferentialForm) -> Result<MaStructure6> {
        if big.dim() != 6 || big.degree() != 2 || omega.degree() != 3 {
            return Err(Error::Degree("a 6D structure needs a 2-form and a 3-form on a 6-dimensional chart".into()));
        }
        let vol = liouville_volume(&big)?;
        top_const(&vol)?;
        let eff = omega.wedge(&big)?;
        for p in sample::unit_box(sample::DEFAULT_SEED, sample::DEFAULT_SAMPLES, 6) {
            let r = eff.eval(&p)?.max_abs();
            if r >= 1e-12 * omega.eval(&p)?.max_abs().max(1.0) {
                return Err(Error::NotEffective { residual: r, point: p });
            }
        }
        Ok(MaStructure6 { big, omega, vol })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.big.chart()
    }
}

fn forms(chart: &Arc<Chart>, terms: &[(&str, &[&str])]) -> DifferentialForm {
    DifferentialForm::parse_terms(chart, 3, terms).expect("static form")
}

/// `hess(φ) = 1`: `dξ1∧dξ2∧dξ3 − dx1∧dx2∧dx3`.
pub fn hess1() -> MaStructure6 {
    let c = chart_xi();
    let w = forms(&c, &[("1", &["xi1", "xi2", "xi3"]), ("-1", &["x1", "x2", "x3"])]);
    MaStructure6::new(canonical_symplectic(&c), w).expect("catalog structure")
}

/// Special Lagrangian equation, the imaginary part of `Π(dx_k + i dξ_k)`.
pub fn special_lagrangian() -> MaStructure6 {
    let c = chart_xi();
    let w = forms(
        &c,
        &[
            ("1", &["xi1", "x2", "x3"]),
            ("1", &["x1", "xi2", "x3"]),
            ("1", &["x1", "x2", "xi3"]),
            ("-1", &["xi1", "xi2", "xi3"]),
        ],
    );
    MaStructure6::new(canonical_symplectic(&c), w).expect("catalog structure")
}

/// `ϖ = dξ1∧dξ2∧dx3 − a dx1∧dx2∧dx3 + dx1∧dx2∧dξ3`.
pub fn burgers_form(chart: &Arc<Chart>, a: &ScalarField) -> Result<DifferentialForm> {
    let a = a.lift(chart)?;
    let one = ScalarField::constant(chart, 1.0);
    Form::from_terms(chart, 3, [(vec![3, 4, 2], one.clone()), (vec![0, 1, 2], -a), (vec![0, 1, 5], one)])
}

pub fn burgers_cy(a: &ScalarField) -> Result<MaStructure6> {
    let c = chart_xi();
    MaStructure6::new(canonical_symplectic(&c), burgers_form(&c, a)?)
}

/// The pair (ω, θ) describing 3D incompressible flow with `Δp = 2a`.
#[derive(Debug, Clone)]
pub struct EulerPair6 {
    pub big: DifferentialForm,
    pub omega: DifferentialForm,
    pub theta: DifferentialForm,
    pub vol: DifferentialForm,
    pub a: ScalarField,
}

impl EulerPair6 {
    /// `a` may be given over `(x1,x2)`, `(x1,x2,x3)` or the full chart.
    pub fn new(a: &ScalarField) -> Result<EulerPair6> {
        let c = chart_u();
        let a = a.lift(&c)?;
        let one = ScalarField::constant(&c, 1.0);
        let omega = Form::from_terms(
            &c,
            3,
            [
                (vec![0, 1, 2], a.clone()),
                (vec![3, 4, 2], -&one),
                (vec![3, 1, 5], -&one),
                (vec![0, 4, 5], -&one),
            ],
        )?;
        let theta = Form::from_terms(
            &c,
            3,
            [(vec![3, 1, 2], one.clone()), (vec![0, 4, 2], one.clone()), (vec![0, 1, 5], one)],
        )?;
        let big = canonical_symplectic(&c);
        let vol = liouville_volume(&big)?;
        Ok(EulerPair6 { big, omega, theta, vol, a })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.big.chart()
    }
}

fn covector<C: crate::exterior::Coeff>(chart: &Arc<Chart>, j: usize, one: C) -> Form<C> {
    Form::from_terms(chart, 1, [(vec![j], one)]).expect("basis covector")
}

/// `K[j][i] = ι_iω∧ω∧dx_j / vol`.
pub fn hitchin_tensor(omega: &DifferentialForm, vol: &DifferentialForm) -> Result<OperatorField> {
    let chart = omega.chart().clone();
    if chart.dim() != 6 || omega.degree() != 3 {
        return Err(Error::Dimension { expected: 6, got: chart.dim() });
    }
    let v = top_const(vol)?;
    let one = ScalarField::constant(&chart, 1.0);
    let zero = ScalarField::constant(&chart, 0.0);
    let mut rows = vec![vec![zero.clone(); 6]; 6];
    for i in 0..6 {
        let t = omega.interior_basis(i)?.wedge(omega)?;
        for (j, row) in rows.iter_mut().enumerate() {
            let top = t.wedge(&covector(&chart, j, one.clone()))?;
            row[i] = top.top().map(|c| c.scale(1.0 / v)).unwrap_or_else(|| zero.clone());
        }
    }
    OperatorField::new(&chart, rows)
}

/// Numeric Hitchin tensor at a point.
pub fn hitchin_tensor_at(omega: &Form<f64>, vol_top: f64) -> Result<DMatrix<f64>> {
    let chart = omega.chart().clone();
    let mut k = DMatrix::zeros(6, 6);
    for i in 0..6 {
        let t = omega.interior_basis(i)?.wedge(omega)?;
        for j in 0..6 {
            k[(j, i)] = t.wedge(&covector(&chart, j, 1.0))?.coeff(&[0, 1, 2, 3, 4, 5]) / vol_top;
        }
    }
    Ok(k)
}

/// `λ = tr(K²)/6` as a field. Errors if `K² ≠ λ Id` at a default sample point.
pub fn hitchin_pfaffian(omega: &DifferentialForm, vol: &DifferentialForm) -> Result<ScalarField> {
    let k = hitchin_tensor(omega, vol)?;
    for p in sample::unit_box(sample::DEFAULT_SEED, 10, 6) {
        hitchin_at(omega, vol, &p)?;
    }
    Ok(k.mul(&k).trace().scale(1.0 / 6.0))
}

/// Pointwise Hitchin data.
#[derive(Debug, Clone)]
pub struct HitchinPoint {
    pub k: DMatrix<f64>,
    pub lambda: f64,
    /// `|λ| < LAMBDA_TOL`.
    pub degenerate: bool,
}

pub fn hitchin_at(omega: &DifferentialForm, vol: &DifferentialForm, pt: &[f64]) -> Result<HitchinPoint> {
    let k = hitchin_tensor_at(&omega.eval(pt)?, top_const(vol)?)?;
    let k2 = &k * &k;
    let lambda = k2.trace() / 6.0;
    let res = (&k2 - DMatrix::identity(6, 6) * lambda).amax();
    if res > 1e-10 * k2.amax().max(1.0) {
        return Err(Error::NondegeneracyViolation(format!("K² − λ Id = {res:e} at {pt:?}")));
    }
    Ok(HitchinPoint { k, lambda, degenerate: lambda.abs() < LAMBDA_TOL })
}

/// `g(X,Y) = ι_Xω∧ι_Yω∧Ω / vol`, divided by `√|λ|` when normalized.
pub fn lr_metric6(
    omega: &DifferentialForm,
    big: &DifferentialForm,
    vol: &DifferentialForm,
    normalized: bool,
) -> Result<SymmetricTensorField> {
    let chart = omega.chart().clone();
    let v = top_const(vol)?;
    let iw: Vec<DifferentialForm> = (0..6).map(|i| omega.interior_basis(i)).collect::<Result<_>>()?;
    let zero = ScalarField::constant(&chart, 0.0);
    let mut e = vec![vec![zero.clone(); 6]; 6];
    for i in 0..6 {
        for j in i..6 {
            let t = iw[i].wedge(&iw[j])?.wedge(big)?;
            e[i][j] = t.top().map(|c| c.scale(1.0 / v)).unwrap_or_else(|| zero.clone());
        }
    }
    let norm = if normalized {
        let lambda = hitchin_pfaffian(omega, vol)?;
        Some(ScalarField::constant(&chart, 1.0) / lambda.abs().sqrt())
    } else {
        None
    };
    Ok(SymmetricTensorField::from_upper(&chart, |i, j| match &norm {
        Some(n) => n * &e[i][j],
        None => e[i][j].clone(),
    }))
}

/// `c · ĝ(K̂X, Y) = Ω(X, Y)` with `ĝ = g/√|λ|`, `K̂ = K/√|λ|` and `c = −sign λ`.
///
/// The raw tensors satisfy `g(KX, Y) = −λ Ω(X, Y)`, so a single constant cannot
/// serve both signs of λ. Residuals are matrix entries, which bound the
/// residual on any pair of unit vectors.
pub fn lr_compatibility(s: &MaStructure6, pts: &[Vec<f64>]) -> Result<Report> {
    let g = lr_metric6(&s.omega, &s.big, &s.vol, false)?;
    let mut rows = Vec::new();
    let mut degenerate = Vec::new();
    for p in pts {
        let h = hitchin_at(&s.omega, &s.vol, p)?;
        if h.degenerate {
            degenerate.push(p.clone());
            continue;
        }
        let om = s.big.eval(p)?.dense_matrix()?;
        let c = -h.lambda.signum();
        let lhs = h.k.transpose() * g.eval(p)? * (c / h.lambda.abs());
        rows.push(((lhs - om).amax(), p.clone()));
    }
    let mut rep = Report::new();
    rep.check_max("c·ĝ(K̂·,·) = Ω, c = −sign λ", 1e-12, rows);
    if !degenerate.is_empty() {
        rep.check("λ ≠ 0", 0.0, 0.0, degenerate.first().cloned());
        rep.note(format!("{} degenerate sample point(s)", degenerate.len()));
    }
    Ok(rep)
}

/// `ω̂(X,Y,Z) = ω(KX, Y, Z)/√|λ|`. Applying it twice returns `−ω`.
pub fn hitchin_dual(omega: &DifferentialForm, vol: &DifferentialForm) -> Result<DifferentialForm> {
    let chart = omega.chart().clone();
    let k = hitchin_tensor(omega, vol)?;
    let lambda = hitchin_pfaffian(omega, vol)?;
    if let Some(l) = lambda.as_constant() {
        if l.abs() < LAMBDA_TOL {
            return Err(Error::Degenerate { what: "Hitchin pfaffian".into(), point: vec![] });
        }
    }
    let norm = ScalarField::constant(&chart, 1.0) / lambda.abs().sqrt();
    let mut out = Form::zero(&chart, 3);
    for i in 0..6 {
        let col: Vec<ScalarField> = (0..6).map(|m| k.entry(m, i).clone()).collect();
        let ik = omega.interior(&col)?;
        // coefficient on dx_i∧dx_j∧dx_l for i < j < l
        let mut terms = Vec::new();
        for (idx, c) in ik.terms() {
            if idx[0] > i {
                terms.push((vec![i, idx[0], idx[1]], c.clone()));
            }
        }
        out = out.add(&Form::from_terms(&chart, 3, terms)?)?;
    }
    Ok(out.mul_coeff(&norm))
}

/// The operator and metric identities of the (ω, θ) pair.
pub fn euler_pair_relations(p: &EulerPair6, pts: &[Vec<f64>]) -> Result<Report> {
    let v = top_const(&p.vol)?;
    let gw = lr_metric6(&p.omega, &p.big, &p.vol, false)?;
    let gt = lr_metric6(&p.theta, &p.big, &p.vol, false)?;
    let id = DMatrix::<f64>::identity(6, 6);
    let mut flip = DMatrix::<f64>::identity(6, 6);
    for i in 0..3 {
        flip[(i, i)] = -1.0;
    }
    let mut gt_want = DMatrix::<f64>::zeros(6, 6);
    for i in 0..3 {
        gt_want[(i, i)] = 2.0;
    }
    let names = ["K_ω² = −4a", "K_θ² = 0", "K_ωK_θ + K_θK_ω = −4", "[K_ω, K_θ] = 4 diag(−1, 1)", "g_ω = diag(2a, 2)", "g_θ = diag(2, 0)", "ω∧θ = 3 vol"];
    let mut rows: Vec<Vec<(f64, Vec<f64>)>> = vec![Vec::new(); names.len()];
    let mut cross = Vec::new();
    for pt in pts {
        let a = p.a.eval(pt)?;
        let w = p.omega.eval(pt)?;
        let t = p.theta.eval(pt)?;
        let kw = hitchin_tensor_at(&w, v)?;
        let kt = hitchin_tensor_at(&t, v)?;
        let mut gw_want = DMatrix::<f64>::identity(6, 6) * 2.0;
        for i in 0..3 {
            gw_want[(i, i)] = 2.0 * a;
        }
        let gwm = gw.eval(pt)?;
        let wt = w.wedge(&t)?.coeff(&[0, 1, 2, 3, 4, 5]) - 3.0 * v;
        let res = [
            (&kw * &kw + &id * (4.0 * a)).amax(),
            (&kt * &kt).amax(),
            (&kw * &kt + &kt * &kw + &id * 4.0).amax(),
            (&kw * &kt - &kt * &kw - &flip * 4.0).amax(),
            (&gwm - &gw_want).amax(),
            (gt.eval(pt)? - &gt_want).amax(),
            wt.abs(),
        ];
        for (r, x) in rows.iter_mut().zip(res) {
            r.push((x, pt.clone()));
        }
        // the metric read as Ω(X, K Y)
        let om = p.big.eval(pt)?.dense_matrix()?;
        cross.push(((om * &kw - gwm).amax(), pt.clone()));
    }
    let mut rep = Report::new();
    for (n, r) in names.iter().zip(rows) {
        rep.check_max(*n, 1e-12, r);
    }
    let (m, at) = worst(cross);
    rep.inform("g_ω = Ω(·, K_ω·)", m, 1e-12, at);
    Ok(rep)
}

/// Graph of `u` over space, `x ↦ (x, u(x))`.
pub fn velocity_graph(u: &VectorField, target: &Arc<Chart>) -> Result<GraphMap> {
    let src = u.chart().clone();
    if src.dim() != 3 {
        return Err(Error::Dimension { expected: 3, got: src.dim() });
    }
    let mut comps: Vec<ScalarField> = (0..3).map(|i| ScalarField::coord(&src, i)).collect();
    comps.extend(u.components().iter().cloned());
    GraphMap::new(&src, target, comps)
}

/// `ω|L_u = 0` and `θ|L_u = 0`, cross-checked against `div u = 0`, `−Δp = u_ij u_ji`.
pub fn verify_bilagrangian(p: &EulerPair6, u: &VectorField, pts: &[Vec<f64>]) -> Result<Report> {
    let f = velocity_graph(u, p.chart())?;
    let wl = f.pullback(&p.omega)?;
    let tl = f.pullback(&p.theta)?;
    let a_l = f.pull_scalar(&p.a)?;
    let mut rep = Report::new();
    let (mut rw, mut rt, mut fl) = (Vec::new(), Vec::new(), Vec::new());
    for pt in pts {
        rw.push((wl.eval(pt)?.max_abs(), pt.clone()));
        rt.push((tl.eval(pt)?.max_abs(), pt.clone()));
        let m = crate::fluids::velocity_gradient(u, pt)?;
        let div = m.trace().abs();
        let poisson = (crate::fluids::rhs_from_gradient(&m) - 2.0 * a_l.eval(pt)?).abs();
        fl.push((div.max(poisson), pt.clone()));
    }
    let ok_w = rep.check_max("ω|L_u = 0", 1e-10, rw);
    let ok_t = rep.check_max("θ|L_u = 0", 1e-10, rt);
    let (m, at) = worst(fl);
    rep.inform("div u = 0 and −Δp = u_ij u_ji", m, 1e-10, at.clone());
    let agree = (ok_w && ok_t) == (m < 1e-10);
    rep.check("bilagrangian ⇔ Euler equations", if agree { 0.0 } else { 1.0 }, 0.5, at);
    Ok(rep)
}

/// Closedness of the normalized form and its dual, plus sampled flatness of `ĝ`.
pub fn integrability6(s: &MaStructure6, pts: &[Vec<f64>]) -> Result<(Report, curvature::CurvatureReport)> {
    let lambda = hitchin_pfaffian(&s.omega, &s.vol)?;
    for p in pts {
        let l = lambda.eval(p)?;
        if l.abs() < LAMBDA_TOL {
            return Err(Error::Degenerate { what: "Hitchin pfaffian".into(), point: p.clone() });
        }
    }
    let quarter = ScalarField::constant(s.chart(), 1.0) / lambda.abs().sqrt().sqrt();
    let normalized = s.omega.mul_coeff(&quarter);
    let dual = hitchin_dual(&s.omega, &s.vol)?.mul_coeff(&quarter);
    let (mut rw, mut rd) = (Vec::new(), Vec::new());
    for p in pts {
        rw.push((normalized.d_at(p)?.max_abs(), p.clone()));
        rd.push((dual.d_at(p)?.max_abs(), p.clone()));
    }
    let metric = MetricField::new(lr_metric6(&s.omega, &s.big, &s.vol, true)?);
    let curv = curvature::analyze(&metric, pts)?;
    let mut rep = Report::new();
    rep.check_max("d(ω/|λ|^¼) = 0", 1e-9, rw);
    rep.check_max("d(ω̂/|λ|^¼) = 0", 1e-9, rd);
    let (res, at) = match &curv.flatness {
        Flatness::Flat { riemann_max } => (*riemann_max, None),
        Flatness::NonFlat { witness, riemann_max } => (*riemann_max, Some(witness.clone())),
    };
    rep.check("ĝ flat (sampled)", res, curv.tol, at);
    if !curv.skipped.is_empty() {
        rep.check("metric invertible on the sample", curv.skipped.len() as f64, 0.5, curv.skipped.first().cloned());
    }
    Ok((rep, curv))
}

/// Signature of the normalized metric at a point.
pub fn metric_signature(s: &MaStructure6, pt: &[f64]) -> Result<(usize, usize)> {
    Ok(signature(&lr_metric6(&s.omega, &s.big, &s.vol, false)?.eval(pt)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blocks(tl: f64, tr: f64, bl: f64, br: f64) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(6, 6);
        for i in 0..3 {
            m[(i, i)] = tl;
            m[(i, i + 3)] = tr;
            m[(i + 3, i)] = bl;
            m[(i + 3, i + 3)] = br;
        }
        m
    }

    fn plane(src: &str) -> ScalarField {
        ScalarField::parse(src, &crate::ma4::plane_chart()).unwrap()
    }

    const P: [f64; 6] = [0.3, -0.7, 0.2, 0.5, 0.1, -0.4];

    #[test]
    fn volume_is_liouville() {
        let c = chart_xi();
        let v = liouville_volume(&canonical_symplectic(&c)).unwrap();
        assert_eq!(top_const(&v).unwrap(), -1.0);
    }

    #[test]
    fn catalog_tensors_and_pfaffians() {
        let h = hess1();
        let hp = hitchin_at(&h.omega, &h.vol, &P).unwrap();
        assert_eq!(hp.k, blocks(-1.0, 0.0, 0.0, 1.0));
        assert_eq!(hp.lambda, 1.0);
        let g = lr_metric6(&h.omega, &h.big, &h.vol, false).unwrap().eval(&P).unwrap();
        assert_eq!(g, blocks(0.0, 1.0, 1.0, 0.0));

        let s = special_lagrangian();
        let sp = hitchin_at(&s.omega, &s.vol, &P).unwrap();
        assert_eq!(sp.lambda, -4.0);
        let g = lr_metric6(&s.omega, &s.big, &s.vol, true).unwrap().eval(&P).unwrap();
        assert!((g - DMatrix::identity(6, 6)).amax() < 1e-15);

        let b = burgers_cy(&plane("x1^2 + x2")).unwrap();
        let bp = hitchin_at(&b.omega, &b.vol, &P).unwrap();
        assert_eq!(bp.lambda, 1.0);
        assert!((&bp.k * &bp.k - DMatrix::identity(6, 6)).amax() < 1e-14);
        let lam = hitchin_pfaffian(&b.omega, &b.vol).unwrap();
        assert!((lam.eval(&P).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn burgers_metric_has_split_signature() {
        let b = burgers_cy(&plane("1 + x1^2")).unwrap();
        let g = lr_metric6(&b.omega, &b.big, &b.vol, false).unwrap().eval(&P).unwrap();
        let a = 1.0 + P[0] * P[0];
        let mut want = DMatrix::zeros(6, 6);
        want[(2, 2)] = 2.0 * a;
        for (i, s) in [(0, 1.0), (1, 1.0), (2, -1.0)] {
            want[(i, i + 3)] = s;
            want[(i + 3, i)] = s;
        }
        assert!((g.clone() - want).amax() < 1e-14);
        assert_eq!(signature(&g), (3, 3));
        assert_eq!(metric_signature(&hess1(), &P).unwrap(), (3, 3));
        let sl = metric_signature(&special_lagrangian(), &P).unwrap();
        assert!(sl == (6, 0) || sl == (4, 2) || sl == (0, 6) || sl == (2, 4));
    }

    #[test]
    fn compatibility_on_catalog() {
        let pts = sample::unit_box(1, 10, 6);
        for s in [hess1(), special_lagrangian(), burgers_cy(&plane("1")).unwrap()] {
            let r = lr_compatibility(&s, &pts).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn burgers_dual_and_double_dual() {
        let a = plane("2*x1 - x2 + 3");
        let b = burgers_cy(&a).unwrap();
        let dual = hitchin_dual(&b.omega, &b.vol).unwrap();
        let c = chart_xi();
        let want = DifferentialForm::parse_terms(
            &c,
            3,
            &[("1", &["xi1", "xi2", "x3"]), ("2*x1 - x2 + 3", &["x1", "x2", "x3"]), ("-1", &["x1", "x2", "xi3"])],
        )
        .unwrap();
        for p in sample::unit_box(2, 10, 6) {
            assert!(dual.sub(&want).unwrap().eval(&p).unwrap().max_abs() < 1e-13);
            assert!(dual.d_at(&p).unwrap().max_abs() < 1e-13);
        }
        let twice = hitchin_dual(&dual, &b.vol).unwrap();
        assert!(twice.add(&b.omega).unwrap().eval(&P).unwrap().max_abs() < 1e-13);
        let h = hess1();
        let hd = hitchin_dual(&h.omega, &h.vol).unwrap();
        let want = DifferentialForm::parse_terms(&c, 3, &[("1", &["xi1", "xi2", "xi3"]), ("1", &["x1", "x2", "x3"])]).unwrap();
        assert!(hd.sub(&want).unwrap().eval(&P).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn theta_is_degenerate() {
        let p = EulerPair6::new(&plane("1")).unwrap();
        let h = hitchin_at(&p.theta, &p.vol, &P).unwrap();
        assert!(h.degenerate);
        assert_eq!(h.k, blocks(0.0, 0.0, 2.0, 0.0));
        let k = hitchin_at(&p.omega, &p.vol, &P).unwrap().k;
        assert_eq!(k, blocks(0.0, -2.0, 2.0, 0.0));
    }

    #[test]
    fn euler_pair_identities() {
        let pts = sample::unit_box(4, 20, 6);
        let r = euler_pair_relations(&EulerPair6::new(&plane("1")).unwrap(), &pts).unwrap();
        assert!(r.passed(), "{r:?}");
        let p = EulerPair6::new(&plane("x1^2")).unwrap();
        let r = euler_pair_relations(&p, &pts).unwrap();
        assert!(r.passed(), "{r:?}");
        let k = hitchin_at(&p.omega, &p.vol, &[2.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap().k;
        assert_eq!(&k * &k, DMatrix::identity(6, 6) * -16.0);
    }

    #[test]
    fn bilagrangian_graphs() {
        let sc = space_chart();
        let pts = sample::unit_box(6, 20, 3);
        let p = EulerPair6::new(&plane("1")).unwrap();
        let u = VectorField::parse(&sc, &["-x1 - 2*x2", "-x2 + 2*x1", "2*x3"]).unwrap();
        assert!(verify_bilagrangian(&p, &u, &pts).unwrap().passed());
        let u = VectorField::parse(&sc, &["x1", "x2", "x3"]).unwrap();
        let r = verify_bilagrangian(&p, &u, &pts).unwrap();
        assert!(!r.get("θ|L_u = 0").unwrap().pass);
        assert!(r.get("bilagrangian ⇔ Euler equations").unwrap().pass);
        let p0 = EulerPair6::new(&plane("0")).unwrap();
        let u = VectorField::parse(&sc, &["0", "0", "0"]).unwrap();
        assert!(verify_bilagrangian(&p0, &u, &pts).unwrap().passed());
    }

    #[test]
    fn integrability_of_catalog() {
        let pts = sample::unit_box(8, 10, 6);
        assert!(integrability6(&hess1(), &pts).unwrap().0.passed());
        let (r, _) = integrability6(&burgers_cy(&plane("2*x1 + 3*x2 + 1")).unwrap(), &pts).unwrap();
        assert!(r.passed(), "{r:?}");
        let (r, curv) = integrability6(&burgers_cy(&plane("x1^2")).unwrap(), &pts).unwrap();
        assert!(!r.passed());
        assert!(matches!(curv.flatness, Flatness::NonFlat { .. }));
        assert!(curv.ricci_flat);
    }
}
