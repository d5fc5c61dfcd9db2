//! Monge-Ampère structures on 4-dimensional phase space.
//!
//! The Euler structure lives on the chart `(x1, x2, u1, u2)` with
//! `Ω = dx1∧du2 + du1∧dx2` and `ω = du1∧du2 − a dx1∧dx2`, `a = Δp/2`.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{
    operator_from_pair, signature, DifferentialForm, Form, GraphMap, OperatorField, SymmetricTensorField,
};
use crate::fieldexpr::{Chart, ScalarField};
use crate::report::Report;
use crate::sample;

pub fn euler_chart() -> Arc<Chart> {
    Chart::new(&["x1", "x2", "u1", "u2"]).expect("static chart")
}

pub fn plane_chart() -> Arc<Chart> {
    Chart::new(&["x1", "x2"]).expect("static chart")
}

/// `Ω = dx1∧du2 + du1∧dx2` on the Euler chart.
pub fn euler_symplectic(chart: &Arc<Chart>) -> DifferentialForm {
    DifferentialForm::parse_terms(chart, 2, &[("1", &["x1", "u2"]), ("1", &["u1", "x2"])]).expect("static form")
}

/// `ω = du1∧du2 − a dx1∧dx2`.
pub fn euler_form(chart: &Arc<Chart>, a: &ScalarField) -> Result<DifferentialForm> {
    let a = a.lift(chart)?;
    let one = ScalarField::constant(chart, 1.0);
    Form::from_terms(chart, 2, [(vec![2, 3], one), (vec![0, 1], -a)])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    Elliptic,
    Hyperbolic,
    Degenerate,
}

/// A pair (Ω, ω) with Ω constant symplectic and ω effective.
#[derive(Debug, Clone)]
pub struct MaStructure4 {
    big: DifferentialForm,
    omega: DifferentialForm,
}

fn top_of(f: &DifferentialForm) -> ScalarField {
    f.top().cloned().unwrap_or_else(|| ScalarField::constant(f.chart(), 0.0))
}

impl MaStructure4 {
    /// Checks closedness and nondegeneracy of Ω and effectiveness of ω on the default sample.
    pub fn new(big: DifferentialForm, omega: DifferentialForm) -> Result<MaStructure4> {
        let pts = sample::unit_box(sample::DEFAULT_SEED, sample::DEFAULT_SAMPLES, 4);
        Self::with_sample(big, omega, &pts)
    }

    pub fn with_sample(big: DifferentialForm, omega: DifferentialForm, pts: &[Vec<f64>]) -> Result<MaStructure4> {
        if big.dim() != 4 || big.degree() != 2 || omega.degree() != 2 {
            return Err(Error::Degree("a 4D structure needs two 2-forms on a 4-dimensional chart".into()));
        }
        if !crate::fieldexpr::same_chart(big.chart(), omega.chart()) {
            return Err(Error::ChartMismatch(format!("{} vs {}", big.chart(), omega.chart())));
        }
        if big.terms().any(|(_, c)| c.as_constant().is_none()) {
            return Err(Error::Invalid("Ω must have constant coefficients".into()));
        }
        let oo = top_of(&big.wedge(&big)?).as_constant().unwrap_or(0.0);
        if oo == 0.0 {
            return Err(Error::Degenerate { what: "Ω∧Ω".into(), point: vec![] });
        }
        for p in pts {
            let dbig = big.d_at(p)?.max_abs();
            if dbig != 0.0 {
                return Err(Error::Invalid(format!("dΩ = {dbig:e} at {p:?}")));
            }
            let eff = omega.wedge(&big)?.eval(p)?.max_abs();
            let scale = omega.eval(p)?.max_abs().max(1.0);
            if eff >= 1e-12 * scale {
                return Err(Error::NotEffective { residual: eff, point: p.clone() });
            }
        }
        Ok(MaStructure4 { big, omega })
    }

    /// Euler structure for a given `a = Δp/2` (on the plane or on the 4D chart).
    pub fn euler(a: &ScalarField) -> Result<MaStructure4> {
        let c = euler_chart();
        MaStructure4::new(euler_symplectic(&c), euler_form(&c, a)?)
    }

    pub fn euler_str(a: &str) -> Result<MaStructure4> {
        let a = ScalarField::parse(a, &plane_chart())?;
        MaStructure4::euler(&a)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.big.chart()
    }

    pub fn symplectic(&self) -> &DifferentialForm {
        &self.big
    }

    pub fn omega(&self) -> &DifferentialForm {
        &self.omega
    }
}

/// `pf` with `form∧form = pf · Ω∧Ω`.
pub fn pfaffian_of(big: &DifferentialForm, form: &DifferentialForm) -> Result<ScalarField> {
    let oo = top_of(&big.wedge(big)?);
    let ww = top_of(&form.wedge(form)?);
    Ok(ww / oo)
}

pub fn pfaffian(s: &MaStructure4) -> Result<ScalarField> {
    pfaffian_of(&s.big, &s.omega)
}

/// Sign of the pfaffian with tolerance `1e-10 · max(1, coefficient scale)`.
pub fn classify(s: &MaStructure4, pt: &[f64]) -> Result<Classification> {
    let pf = pfaffian(s)?.eval(pt)?;
    let scale = s.omega.eval(pt)?.max_abs().max(1.0);
    Ok(classify_value(pf, 1e-10 * scale))
}

pub fn classify_value(pf: f64, tol: f64) -> Classification {
    if pf > tol {
        Classification::Elliptic
    } else if pf < -tol {
        Classification::Hyperbolic
    } else {
        Classification::Degenerate
    }
}

/// `A_ω` with `ω = Ω(A·,·)`, or `I_ω = A_ω/√|pf|` when normalized.
pub fn structure_tensor(s: &MaStructure4, normalized: bool) -> Result<OperatorField> {
    let a = operator_from_pair(&s.big, &s.omega)?;
    if !normalized {
        return Ok(a);
    }
    let pf = pfaffian(s)?;
    Ok(a.scale_by(&(ScalarField::constant(s.chart(), 1.0) / pf.abs().sqrt())))
}

/// Pointwise structure tensor; errors where a normalized tensor is undefined.
pub fn structure_tensor_at(s: &MaStructure4, pt: &[f64], normalized: bool) -> Result<DMatrix<f64>> {
    let a = operator_from_pair(&s.big, &s.omega)?.eval(pt)?;
    if !normalized {
        return Ok(a);
    }
    let pf = pfaffian(s)?.eval(pt)?;
    if pf == 0.0 {
        return Err(Error::Degenerate { what: "pfaffian".into(), point: pt.to_vec() });
    }
    Ok(a / pf.abs().sqrt())
}

/// `g(X,Y) = 2(ι_Xω∧ι_YΩ + ι_Yω∧ι_XΩ)∧dx1∧dx2 / (Ω∧Ω)`.
pub fn lr_metric(s: &MaStructure4) -> Result<SymmetricTensorField> {
    let chart = s.chart().clone();
    let hor = DifferentialForm::basis(&chart, &[0, 1])?;
    let oo = top_of(&s.big.wedge(&s.big)?);
    let iw: Vec<DifferentialForm> = (0..4).map(|i| s.omega.interior_basis(i)).collect::<Result<_>>()?;
    let ib: Vec<DifferentialForm> = (0..4).map(|i| s.big.interior_basis(i)).collect::<Result<_>>()?;
    let mut entries = vec![vec![ScalarField::constant(&chart, 0.0); 4]; 4];
    for i in 0..4 {
        for j in i..4 {
            let t = iw[i].wedge(&ib[j])?.add(&iw[j].wedge(&ib[i])?)?.wedge(&hor)?;
            entries[i][j] = top_of(&t).scale(2.0) / &oo;
        }
    }
    Ok(SymmetricTensorField::from_upper(&chart, |i, j| entries[i][j].clone()))
}

/// Dual form `ω̂(X, Y) = g_ω(X, A_ω Y)`, matrix `g A`.
pub fn dual_form(s: &MaStructure4) -> Result<DifferentialForm> {
    let g = lr_metric(s)?;
    let a = operator_from_pair(&s.big, &s.omega)?;
    let chart = s.chart().clone();
    let mut terms = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            let mut acc = ScalarField::constant(&chart, 0.0);
            for k in 0..4 {
                acc = acc + g.entry(i, k) * a.entry(k, j);
            }
            terms.push((vec![i, j], acc));
        }
    }
    Form::from_terms(&chart, 2, terms)
}

/// `(Ω̃, ω, ω̂)` with `Ω̃ = √|a| Ω` and the operators S, I, T.
#[derive(Debug, Clone)]
pub struct HypersymplecticTriple {
    pub big: DifferentialForm,
    pub big_tilde: DifferentialForm,
    pub omega: DifferentialForm,
    pub omega_hat: DifferentialForm,
    /// The pfaffian `a`; ε is its sign at each point.
    pub a: ScalarField,
    pub s: OperatorField,
    pub i: OperatorField,
    pub t: OperatorField,
}

/// Builds the triple; `a` must be nonzero at every sample point.
pub fn build_triple(st: &MaStructure4, pts: &[Vec<f64>]) -> Result<HypersymplecticTriple> {
    let a = pfaffian(st)?;
    for p in pts {
        if a.eval(p)? == 0.0 {
            return Err(Error::Degenerate { what: "Δp = 0".into(), point: p.clone() });
        }
    }
    let chart = st.chart().clone();
    let omega_hat = dual_form(st)?;
    let root = a.abs().sqrt();
    let inv_root = ScalarField::constant(&chart, 1.0) / &root;
    let am = operator_from_pair(&st.big, &st.omega)?;
    let ahat = operator_from_pair(&st.big, &omega_hat)?;
    // ω̂ = ω(S·,·) means A S = Â; with A² = −a this is S = −A Â / a.
    let s = am.mul(&ahat).scale_by(&(ScalarField::constant(&chart, -1.0) / &a));
    Ok(HypersymplecticTriple {
        big: st.big.clone(),
        big_tilde: st.big.mul_coeff(&root),
        omega: st.omega.clone(),
        omega_hat,
        a,
        s,
        i: am.scale_by(&inv_root),
        t: ahat.scale_by(&inv_root),
    })
}

fn top4(f: &Form<f64>) -> f64 {
    f.coeff(&[0, 1, 2, 3])
}

impl HypersymplecticTriple {
    /// All form and operator relations, pointwise.
    ///
    /// The composite relations are the literal ones (`TI = −IT = S`, ...);
    /// the ε-weighted `TI = −IT = εS` is reported alongside, without
    /// influence on the verdict.
    pub fn verify(&self, pts: &[Vec<f64>], tol: f64) -> Result<Report> {
        type Rows = Vec<(f64, Vec<f64>)>;
        let names = [
            "ω² = −ω̂²",
            "ω² = εΩ̃²",
            "ω̂² = −εΩ̃²",
            "ω∧ω̂ = 0",
            "ω∧Ω̃ = 0",
            "ω̂∧Ω̃ = 0",
            "ω = Ω̃(I·,·)",
            "ω̂ = Ω̃(T·,·)",
            "ω̂ = ω(S·,·)",
            "S² = 1",
            "I² = −ε",
            "T² = ε",
            "TI = S",
            "IT = −S",
            "TS = I",
            "ST = −I",
            "IS = T",
            "SI = −T",
        ];
        let mut rows: Vec<Rows> = vec![Vec::new(); names.len()];
        let mut eps_rows: Vec<Rows> = vec![Vec::new(); 2];
        for p in pts {
            let a = self.a.eval(p)?;
            if a == 0.0 {
                return Err(Error::Degenerate { what: "Δp = 0".into(), point: p.clone() });
            }
            let eps = a.signum();
            let w = self.omega.eval(p)?;
            let wh = self.omega_hat.eval(p)?;
            let bt = self.big_tilde.eval(p)?;
            let ww = top4(&w.wedge(&w)?);
            let hh = top4(&wh.wedge(&wh)?);
            let bb = top4(&bt.wedge(&bt)?);
            let form_res = [
                (ww + hh).abs(),
                (ww - eps * bb).abs(),
                (hh + eps * bb).abs(),
                w.wedge(&wh)?.max_abs(),
                w.wedge(&bt)?.max_abs(),
                wh.wedge(&bt)?.max_abs(),
            ];
            let (s, i, t) = (self.s.eval(p)?, self.i.eval(p)?, self.t.eval(p)?);
            let id = DMatrix::<f64>::identity(4, 4);
            let (wm, whm, btm) = (w.dense_matrix()?, wh.dense_matrix()?, bt.dense_matrix()?);
            let op_res = [
                (i.transpose() * &btm - &wm).amax(),
                (t.transpose() * &btm - &whm).amax(),
                (s.transpose() * &wm - &whm).amax(),
                (&s * &s - &id).amax(),
                (&i * &i + &id * eps).amax(),
                (&t * &t - &id * eps).amax(),
                (&t * &i - &s).amax(),
                (&i * &t + &s).amax(),
                (&t * &s - &i).amax(),
                (&s * &t + &i).amax(),
                (&i * &s - &t).amax(),
                (&s * &i + &t).amax(),
            ];
            for (k, r) in form_res.iter().chain(op_res.iter()).enumerate() {
                rows[k].push((*r, p.clone()));
            }
            eps_rows[0].push(((&t * &i - &s * eps).amax(), p.clone()));
            eps_rows[1].push(((&i * &t + &s * eps).amax(), p.clone()));
        }
        let mut rep = Report::new();
        for (name, r) in names.iter().zip(rows) {
            rep.check_max(*name, tol, r);
        }
        for (name, r) in ["TI = εS", "IT = −εS"].iter().zip(eps_rows) {
            let (m, at) = crate::report::worst(r);
            rep.inform(*name, m, tol, at);
        }
        Ok(rep)
    }
}

/// Closedness of `ω/√|pf|` on a sample; `da` is reported alongside.
pub fn integrability(s: &MaStructure4, pts: &[Vec<f64>]) -> Result<Report> {
    let pf = pfaffian(s)?;
    for p in pts {
        if pf.eval(p)? == 0.0 {
            return Err(Error::Degenerate { what: "pfaffian".into(), point: p.clone() });
        }
    }
    let normalized = s.omega.mul_coeff(&(ScalarField::constant(s.chart(), 1.0) / pf.abs().sqrt()));
    let dpf = DifferentialForm::function(pf.clone());
    let mut rep = Report::new();
    let mut rows = Vec::new();
    let mut da = Vec::new();
    for p in pts {
        rows.push((normalized.d_at(p)?.max_abs(), p.clone()));
        da.push((dpf.d_at(p)?.max_abs(), p.clone()));
    }
    rep.check_max("d(ω/√|pf|) = 0", 1e-9, rows);
    let (m, at) = crate::report::worst(da);
    rep.inform("d(pf) = 0", m, 1e-9, at);
    rep.note("the product structure S is always integrable");
    Ok(rep)
}

/// How a function on the plane is turned into a Lagrangian graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GraphKind {
    /// `(x, −ψ_x2, ψ_x1)`, for `Ω = dx1∧du2 + du1∧dx2`.
    StreamFunction,
    /// `(x, ψ_x1, ψ_x2)`, for `Ω = dx1∧dξ1 + dx2∧dξ2`.
    Gradient,
}

pub fn solution_graph(chart: &Arc<Chart>, psi: &ScalarField, kind: GraphKind) -> Result<GraphMap> {
    let plane = psi.chart().clone();
    let x1 = ScalarField::coord(&plane, 0);
    let x2 = ScalarField::coord(&plane, 1);
    let comps = match kind {
        GraphKind::StreamFunction => vec![x1, x2, -psi.diff(1), psi.diff(0)],
        GraphKind::Gradient => vec![x1, x2, psi.diff(0), psi.diff(1)],
    };
    GraphMap::new(&plane, chart, comps)
}

/// Outcome of [`verify_generalized_solution`].
#[derive(Debug, Clone)]
pub struct GeneralizedSolution {
    pub report: Report,
    pub kind: GraphKind,
    /// Induced metric on the graph.
    pub h: SymmetricTensorField,
    pub det_h: ScalarField,
    pub trace_h: ScalarField,
    /// Signature of `h` at each sample point.
    pub signatures: Vec<(usize, usize)>,
}

/// Bilagrangian test for the graph of `ψ`, plus the induced metric invariants.
pub fn verify_generalized_solution(s: &MaStructure4, psi: &ScalarField, pts: &[Vec<f64>]) -> Result<GeneralizedSolution> {
    if psi.chart().dim() != 2 {
        return Err(Error::Dimension { expected: 2, got: psi.chart().dim() });
    }
    let probe = pts.first().cloned().unwrap_or_else(|| vec![0.3, -0.2]);
    let mut chosen = None;
    for kind in [GraphKind::StreamFunction, GraphKind::Gradient] {
        let f = solution_graph(s.chart(), psi, kind)?;
        let pulled = f.pullback(&s.big)?;
        if pulled.eval(&probe)?.max_abs() < 1e-12 {
            chosen = Some((kind, f));
            break;
        }
    }
    let (kind, f) = chosen.ok_or_else(|| Error::Invalid("no graph convention makes Ω vanish".into()))?;
    let big_l = f.pullback(&s.big)?;
    let omega_l = f.pullback(&s.omega)?;
    let h = f.pullback_symmetric(&lr_metric(s)?)?;
    let (det_h, trace_h) = h.det_trace_2d().expect("2D graph");
    let pf_l = f.pull_scalar(&pfaffian(s)?)?;
    let lap_psi = psi.diff_many(&[0, 0]) + psi.diff_many(&[1, 1]);
    let mut rep = Report::new();
    let mut rows: [Vec<(f64, Vec<f64>)>; 5] = Default::default();
    let mut signatures = Vec::with_capacity(pts.len());
    for p in pts {
        rows[0].push((big_l.eval(p)?.max_abs(), p.clone()));
        rows[1].push((omega_l.eval(p)?.max_abs(), p.clone()));
        // Δp = 2a
        let dp = 2.0 * pf_l.eval(p)?;
        rows[2].push(((det_h.eval(p)? - 2.0 * dp).abs(), p.clone()));
        rows[3].push(((trace_h.eval(p)? - 2.0 * lap_psi.eval(p)?).abs(), p.clone()));
        let sig = signature(&h.eval(p)?);
        let expected_ok = if dp > 0.0 {
            sig == (2, 0) || sig == (0, 2)
        } else if dp < 0.0 {
            sig == (1, 1)
        } else {
            true
        };
        rows[4].push((if expected_ok { 0.0 } else { 1.0 }, p.clone()));
        signatures.push(sig);
    }
    let [r0, r1, r2, r3, r4] = rows;
    rep.check_max("Ω|L = 0", 1e-10, r0);
    rep.check_max("ω|L = 0", 1e-10, r1);
    let solved = rep.passed();
    if solved {
        rep.check_max("det h = 2Δp", 1e-10, r2);
        rep.check_max("tr h = 2Δψ", 1e-10, r3);
        rep.check_max("signature of h matches the sign of Δp", 0.5, r4);
    } else {
        let (m, at) = crate::report::worst(r2);
        rep.inform("det h = 2Δp", m, 1e-10, at);
        let (m, at) = crate::report::worst(r3);
        rep.inform("tr h = 2Δψ", m, 1e-10, at);
    }
    Ok(GeneralizedSolution { report: rep, kind, h, det_h, trace_h, signatures })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts() -> Vec<Vec<f64>> {
        sample::unit_box(3, 20, 4)
    }

    #[test]
    fn pfaffian_of_euler_and_dual() {
        let s = MaStructure4::euler_str("x1^2 - 3*x2 + 1").unwrap();
        let pf = pfaffian(&s).unwrap();
        let hat = dual_form(&s).unwrap();
        let pfh = pfaffian_of(s.symplectic(), &hat).unwrap();
        for p in pts() {
            let a = 1.0 + p[0] * p[0] - 3.0 * p[1];
            assert!((pf.eval(&p).unwrap() - a).abs() < 1e-12);
            assert!((pfh.eval(&p).unwrap() + a).abs() < 1e-12);
        }
    }

    #[test]
    fn dual_form_matches_display() {
        let s = MaStructure4::euler_str("x1*x2 + 2").unwrap();
        let hat = dual_form(&s).unwrap();
        let c = s.chart().clone();
        let want = DifferentialForm::parse_terms(&c, 2, &[("-1", &["u1", "u2"]), ("-(x1*x2 + 2)", &["x1", "x2"])]).unwrap();
        for p in pts() {
            assert!(hat.sub(&want).unwrap().eval(&p).unwrap().max_abs() < 1e-14);
        }
    }

    #[test]
    fn lr_metric_display_and_signature() {
        let s = MaStructure4::euler_str("5").unwrap();
        let g = lr_metric(&s).unwrap().eval(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        let want = DMatrix::from_row_slice(
            4,
            4,
            &[0., 0., 0., 1., 0., 0., -1., 0., 0., -1., 0., 0., 1., 0., 0., 0.],
        );
        assert_eq!(g, want);
        assert_eq!(signature(&g), (2, 2));
    }

    #[test]
    fn structure_tensor_squares() {
        let s = MaStructure4::euler_str("4").unwrap();
        let a = structure_tensor_at(&s, &[0.0; 4], false).unwrap();
        assert_eq!(&a * &a, DMatrix::identity(4, 4) * -4.0);
        let s = MaStructure4::euler_str("-1").unwrap();
        let i = structure_tensor_at(&s, &[0.0; 4], true).unwrap();
        assert_eq!(&i * &i, DMatrix::identity(4, 4));
    }

    #[test]
    fn omega_equal_to_symplectic_is_rejected() {
        let c = euler_chart();
        let big = euler_symplectic(&c);
        let err = MaStructure4::new(big.clone(), big).unwrap_err();
        assert!(matches!(err, Error::NotEffective { .. }));
    }

    #[test]
    fn classification_and_scaling() {
        let s = MaStructure4::euler_str("x1^2 + 1").unwrap();
        assert_eq!(classify(&s, &[0.5, 0.0, 0.0, 0.0]).unwrap(), Classification::Elliptic);
        let s = MaStructure4::euler_str("-2").unwrap();
        assert_eq!(classify(&s, &[0.5, 0.0, 0.0, 0.0]).unwrap(), Classification::Hyperbolic);
        let s = MaStructure4::euler_str("0").unwrap();
        assert_eq!(classify(&s, &[0.5, 0.0, 0.0, 0.0]).unwrap(), Classification::Degenerate);
        let c = euler_chart();
        let a = ScalarField::parse("x1^2 + 1", &plane_chart()).unwrap();
        let scaled = MaStructure4::new(euler_symplectic(&c), euler_form(&c, &a).unwrap().scale(3.0)).unwrap();
        assert_eq!(classify(&scaled, &[0.5, 0.0, 0.0, 0.0]).unwrap(), Classification::Elliptic);
    }

    #[test]
    fn triple_for_positive_a() {
        let s = MaStructure4::euler_str("1").unwrap();
        let t = build_triple(&s, &pts()).unwrap();
        let r = t.verify(&pts(), 1e-10).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(build_triple(&MaStructure4::euler_str("0").unwrap(), &pts()).is_err());
    }

    #[test]
    fn triple_for_negative_a_obeys_the_epsilon_relation() {
        let s = MaStructure4::euler_str("-2").unwrap();
        let pts = vec![vec![0.0, 0.0, 1.0, 1.0]];
        let t = build_triple(&s, &pts).unwrap();
        let i = t.i.eval(&pts[0]).unwrap();
        assert!((&i * &i - DMatrix::identity(4, 4)).amax() < 1e-12);
        let r = t.verify(&pts, 1e-10).unwrap();
        assert!(r.get("TI = εS").unwrap().pass);
        assert!(r.get("TS = I").unwrap().pass);
        // TI = ISI = -I²S = εS, so the literal TI = S cannot hold for ε = -1.
        assert!((r.get("TI = S").unwrap().residual - 2.0).abs() < 1e-12);
    }

    #[test]
    fn integrability_depends_on_constant_pressure_laplacian() {
        let pts = pts();
        assert!(integrability(&MaStructure4::euler_str("3").unwrap(), &pts).unwrap().passed());
        assert!(integrability(&MaStructure4::euler_str("-5").unwrap(), &pts).unwrap().passed());
        let s = MaStructure4::euler_str("x1^2 + 1").unwrap();
        let r = integrability(&s, &[vec![1.0, 0.0, 0.0, 0.0]]).unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn generalized_solutions() {
        let plane = plane_chart();
        let pts2 = sample::unit_box(5, 20, 2);
        let psi = ScalarField::parse("(x1^2 + x2^2)/2", &plane).unwrap();
        let sol = verify_generalized_solution(&MaStructure4::euler_str("1").unwrap(), &psi, &pts2).unwrap();
        assert!(sol.report.passed(), "{:?}", sol.report);
        assert_eq!(sol.det_h.eval(&[0.2, 0.1]).unwrap(), 4.0);
        let psi = ScalarField::parse("x1*x2", &plane).unwrap();
        let sol = verify_generalized_solution(&MaStructure4::euler_str("-1").unwrap(), &psi, &pts2).unwrap();
        assert!(sol.report.passed());
        assert!(sol.signatures.iter().all(|&s| s == (1, 1)));
        let psi = ScalarField::parse("(x1^2 + x2^2)/2", &plane).unwrap();
        let sol = verify_generalized_solution(&MaStructure4::euler_str("5").unwrap(), &psi, &pts2).unwrap();
        assert!(!sol.report.passed());
        assert!((sol.report.get("ω|L = 0").unwrap().residual - 4.0).abs() < 1e-12);
    }
}
