//! Reduction of 6D structures along translation actions.
//!
//! For a constant generator `X` with moment map `ι_XΩ = −dμ`, an invariant
//! form `α` descends to `α_c` on the level set `μ = c` with `π*α_c = ι_Xα`.
//! Here the level set is parametrized by an explicit slice at `x3 = 0`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exterior::{DifferentialForm, Form, GraphMap, VectorField};
use crate::fieldexpr::{Chart, ScalarField};
use crate::ma4::{self, MaStructure4};
use crate::ma6::{self, chart_u, chart_xi, EulerPair6};
use crate::report::{worst, Report};

/// Translation by a constant vector field together with a slice of one level set.
#[derive(Debug, Clone)]
pub struct TranslationAction {
    pub generator: VectorField,
    pub level: f64,
    pub mu: ScalarField,
    pub slice: GraphMap,
}

/// `μ` with `ι_XΩ = −dμ` and `μ(0) = 0`, for constant `X` and Ω.
pub fn moment_map(big: &DifferentialForm, x: &VectorField) -> Result<ScalarField> {
    let xs = x.as_constant().ok_or_else(|| Error::Invalid("generator must have constant components".into()))?;
    if xs.iter().all(|&v| v == 0.0) {
        return Err(Error::Invalid("generator must be nonzero".into()));
    }
    let chart = big.chart();
    let coeffs: Vec<f64> = xs.to_vec();
    let one: Vec<ScalarField> = coeffs.iter().map(|&v| ScalarField::constant(chart, v)).collect();
    let ix = big.interior(&one)?;
    let mut mu = ScalarField::constant(chart, 0.0);
    for (idx, c) in ix.terms() {
        let v = c
            .as_constant()
            .ok_or_else(|| Error::Invalid(format!("ι_XΩ has a non-constant coefficient on d{}", chart.name(idx[0]))))?;
        mu = mu - ScalarField::coord(chart, idx[0]).scale(v);
    }
    Ok(mu)
}

impl TranslationAction {
    pub fn new(big: &DifferentialForm, generator: VectorField, level: f64, slice: GraphMap) -> Result<TranslationAction> {
        let mu = moment_map(big, &generator)?;
        let on_slice = slice.pull_scalar(&mu)?;
        for p in crate::sample::unit_box(crate::sample::DEFAULT_SEED, 20, slice.source().dim()) {
            let r = (on_slice.eval(&p)? - level).abs();
            if r > 1e-12 {
                return Err(Error::Invalid(format!("slice leaves the level set μ = {level}: residual {r:e} at {p:?}")));
            }
        }
        Ok(TranslationAction { generator, level, mu, slice })
    }

    /// `X = ∂x3` on `(x, ξ)`, slice `(x1,x2,ξ1,ξ2) ↦ (x1,x2,0,ξ1,ξ2,−c)`.
    pub fn laplace3d(level: f64) -> Result<TranslationAction> {
        let c = chart_xi();
        let reduced = Chart::new(&["x1", "x2", "xi1", "xi2"])?;
        let x = VectorField::basis(&c, 2);
        let slice = slice_at(&reduced, &c, level)?;
        TranslationAction::new(&ma6::canonical_symplectic(&c), x, level, slice)
    }

    /// `X = ∂x3 + γ∂u3` on `(x, u)`, slice `(x1,x2,u1,u2) ↦ (x1,x2,0,u1,u2,−c)`.
    pub fn stretching(gamma: f64, level: f64) -> Result<TranslationAction> {
        let c = chart_u();
        let reduced = Chart::new(&["x1", "x2", "u1", "u2"])?;
        let x = VectorField::constant(&c, &[0.0, 0.0, 1.0, 0.0, 0.0, gamma])?;
        let slice = slice_at(&reduced, &c, level)?;
        TranslationAction::new(&ma6::canonical_symplectic(&c), x, level, slice)
    }

    pub fn reduced_chart(&self) -> &Arc<Chart> {
        self.slice.source()
    }
}

fn slice_at(reduced: &Arc<Chart>, full: &Arc<Chart>, level: f64) -> Result<GraphMap> {
    let y = |i| ScalarField::coord(reduced, i);
    GraphMap::new(
        reduced,
        full,
        vec![y(0), y(1), ScalarField::constant(reduced, 0.0), y(2), y(3), ScalarField::constant(reduced, -level)],
    )
}

/// `L_X α` over a sample.
pub fn check_invariance(form: &DifferentialForm, x: &VectorField, pts: &[Vec<f64>]) -> Result<Report> {
    let lie = form.lie_derivative(x)?;
    let mut rows = Vec::with_capacity(pts.len());
    for p in pts {
        rows.push((lie.eval(p)?.max_abs(), p.clone()));
    }
    let mut rep = Report::new();
    rep.check_max("L_X α = 0", 1e-10, rows);
    Ok(rep)
}

/// The reduced form: slice pullback of `ι_X α`. Errors if `α` is not invariant.
pub fn reduce(form: &DifferentialForm, action: &TranslationAction, pts: &[Vec<f64>]) -> Result<DifferentialForm> {
    let inv = check_invariance(form, &action.generator, pts)?;
    if !inv.passed() {
        return Err(Error::NotInvariant {
            residual: inv.residuals.max,
            point: inv.residuals.argmax_point.clone(),
        });
    }
    let ix = form.interior(action.generator.components())?;
    action.slice.pullback(&ix)
}

/// `dξ1∧dx2∧dx3 + dx1∧dξ2∧dx3 + dx1∧dx2∧dξ3`, the 3D Laplace equation.
pub fn laplace3d_form() -> DifferentialForm {
    let c = chart_xi();
    DifferentialForm::parse_terms(
        &c,
        3,
        &[("1", &["xi1", "x2", "x3"]), ("1", &["x1", "xi2", "x3"]), ("1", &["x1", "x2", "xi3"])],
    )
    .expect("static form")
}

/// Outcome of [`change_variables_64`].
#[derive(Debug, Clone)]
pub struct ShearChange {
    /// Chart `(X1, X2, U1, U2)`.
    pub chart: Arc<Chart>,
    pub theta_c: DifferentialForm,
    pub omega0: DifferentialForm,
    pub report: Report,
}

/// Pulls `(ω_c, θ_c)` back along `(X1,X2,U1,U2) ↦ (X1, X2, −U2 − γX1/2, U1 − γX2/2)`,
/// the inverse of `U1 = γx2/2 + u2`, `U2 = −γx1/2 − u1`.
///
/// Then `θ_c` is canonical and `ω_c = ω₀ − (γ/2)θ_c` with
/// `ω₀ = (a + 3γ²/4) dX1∧dX2 − dU1∧dU2`; both are checked on the sample.
pub fn change_variables_64(
    omega_c: &DifferentialForm,
    theta_c: &DifferentialForm,
    gamma: f64,
    a: &ScalarField,
    pts: &[Vec<f64>],
) -> Result<ShearChange> {
    let new = Chart::new(&["X1", "X2", "U1", "U2"])?;
    let v = |i| ScalarField::coord(&new, i);
    let map = GraphMap::new(
        &new,
        omega_c.chart(),
        vec![v(0), v(1), -v(3) - v(0).scale(gamma / 2.0), v(2) - v(1).scale(gamma / 2.0)],
    )?;
    let w = map.pullback(omega_c)?;
    let t = map.pullback(theta_c)?;
    let omega0 = w.add(&t.scale(gamma / 2.0))?;
    let a_new = a.compose(&new, &[v(0), v(1)])?;
    let one = ScalarField::constant(&new, 1.0);
    let canonical = Form::from_terms(&new, 2, [(vec![0, 2], one.clone()), (vec![1, 3], one.clone())])?;
    let display = Form::from_terms(&new, 2, [(vec![0, 1], a_new + 0.75 * gamma * gamma), (vec![2, 3], -one)])?;
    let shear = display.sub(&canonical.scale(gamma / 2.0))?;
    let (mut r_tc, mut r_o0, mut r_oc) = (Vec::new(), Vec::new(), Vec::new());
    for p in pts {
        r_tc.push((t.sub(&canonical)?.eval(p)?.max_abs(), p.clone()));
        r_o0.push((omega0.sub(&display)?.eval(p)?.max_abs(), p.clone()));
        r_oc.push((w.sub(&shear)?.eval(p)?.max_abs(), p.clone()));
    }
    let mut report = Report::new();
    report.check_max("θ_c = dX1∧dU1 + dX2∧dU2", 1e-12, r_tc);
    report.check_max("ω₀ = (a + 3γ²/4) dX1∧dX2 − dU1∧dU2", 1e-12, r_o0);
    report.check_max("ω_c = ω₀ − (γ/2) θ_c", 1e-12, r_oc);
    Ok(ShearChange { chart: new, theta_c: t, omega0, report })
}

/// The full shear reduction of the (ω, θ) pair with `Δp = 2a`.
#[derive(Debug, Clone)]
pub struct StretchingReduction {
    pub omega_c: DifferentialForm,
    pub theta_c: DifferentialForm,
    pub change: ShearChange,
    pub report: Report,
}

pub fn reduce_euler_pair(a: &ScalarField, gamma: f64, level: f64, pts6: &[Vec<f64>]) -> Result<StretchingReduction> {
    let pair = EulerPair6::new(a)?;
    let action = TranslationAction::stretching(gamma, level)?;
    let omega_c = reduce(&pair.omega, &action, pts6)?;
    let theta_c = reduce(&pair.theta, &action, pts6)?;
    let rc = action.reduced_chart().clone();
    let a_c = a.lift(&rc)?;
    let g = ScalarField::constant(&rc, gamma);
    let one = ScalarField::constant(&rc, 1.0);
    let w_want =
        Form::from_terms(&rc, 2, [(vec![0, 1], a_c), (vec![2, 3], -&one), (vec![2, 1], -&g), (vec![0, 3], -&g)])?;
    let t_want = Form::from_terms(&rc, 2, [(vec![2, 1], one.clone()), (vec![0, 3], one), (vec![0, 1], g)])?;
    let pts4: Vec<Vec<f64>> = pts6.iter().map(|p| vec![p[0], p[1], p[3], p[4]]).collect();
    let mut report = Report::new();
    let (mut rw, mut rt) = (Vec::new(), Vec::new());
    for p in &pts4 {
        rw.push((omega_c.sub(&w_want)?.eval(p)?.max_abs(), p.clone()));
        rt.push((theta_c.sub(&t_want)?.eval(p)?.max_abs(), p.clone()));
    }
    report.check_max("ω_c = a dx1∧dx2 − du1∧du2 − γ du1∧dx2 − γ dx1∧du2", 1e-12, rw);
    report.check_max("θ_c = du1∧dx2 + dx1∧du2 + γ dx1∧dx2", 1e-12, rt);
    let mu = action.mu.clone();
    report.note(format!("moment map μ = {mu}, level {level}"));
    let change = change_variables_64(&omega_c, &theta_c, gamma, a, &pts4)?;
    report.absorb("change of variables: ", change.report.clone());
    Ok(StretchingReduction { omega_c, theta_c, change, report })
}

/// The splitting of the Burgers structure along `X = ∂x3`, `Y = K_ϖ X`.
///
/// The literal decompositions are verdict checks; the corrected ones (sign of the
/// `ι_XΩ∧ι_YΩ` term, order of `ϖ₁`, `ϖ₂`) are reported alongside. The pair
/// `(−2aϖ₁, −2aϖ₂)` is then rebuilt as a 4D structure on `(x1,x2,ξ1,ξ2)` with
/// `Ω_c` and compared with its dual form and triple algebra.
pub fn burgers_decomposition(a: &ScalarField, pts: &[Vec<f64>]) -> Result<Report> {
    let s = ma6::burgers_cy(a)?;
    let c = s.chart().clone();
    let a6 = a.lift(&c)?;
    for p in pts {
        if a6.eval(p)? == 0.0 {
            return Err(Error::Degenerate { what: "a = 0".into(), point: p.clone() });
        }
    }
    let k = ma6::hitchin_tensor(&s.omega, &s.vol)?;
    let x = VectorField::basis(&c, 2);
    let y = k.apply(&x);
    let y_want = VectorField::new(
        &c,
        (0..6)
            .map(|i| match i {
                2 => ScalarField::constant(&c, 1.0),
                5 => a6.scale(2.0),
                _ => ScalarField::constant(&c, 0.0),
            })
            .collect(),
    )?;
    let ix = s.big.interior(x.components())?;
    let iy = s.big.interior(y.components())?;
    let two_a = a6.scale(2.0);
    let inv_2a = ScalarField::constant(&c, 1.0) / &two_a;
    let omega_c = DifferentialForm::parse_terms(&c, 2, &[("1", &["x1", "xi1"]), ("1", &["x2", "xi2"])])?;
    let p_form = DifferentialForm::basis(&c, &[3, 4])?;
    let q_form = DifferentialForm::basis(&c, &[0, 1])?;
    let w1 = p_form.sub(&q_form.mul_coeff(&a6))?.mul_coeff(&-&inv_2a);
    let w2 = p_form.add(&q_form.mul_coeff(&a6))?.mul_coeff(&inv_2a);
    let xy = ix.wedge(&iy)?.mul_coeff(&inv_2a);
    let big_literal = omega_c.sub(&xy)?;
    let big_fixed = omega_c.add(&xy)?;
    let w_literal = w1.wedge(&ix)?.add(&w2.wedge(&iy)?)?;
    let w_fixed = w2.wedge(&ix)?.add(&w1.wedge(&iy)?)?;

    type Rows = Vec<(f64, Vec<f64>)>;
    let mut rows: [Rows; 6] = Default::default();
    for p in pts {
        let yv = y.eval(p)?;
        let yw = y_want.eval(p)?;
        let ry = yv.iter().zip(&yw).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        let bxy = s.big.eval(p)?.apply(&[&x.eval(p)?, &yv])?;
        rows[0].push((ry, p.clone()));
        rows[1].push(((bxy - two_a.eval(p)?).abs(), p.clone()));
        rows[2].push((s.big.sub(&big_literal)?.eval(p)?.max_abs(), p.clone()));
        rows[3].push((s.omega.sub(&w_literal)?.eval(p)?.max_abs(), p.clone()));
        rows[4].push((s.big.sub(&big_fixed)?.eval(p)?.max_abs(), p.clone()));
        rows[5].push((s.omega.sub(&w_fixed)?.eval(p)?.max_abs(), p.clone()));
    }
    let [r0, r1, r2, r3, r4, r5] = rows;
    let mut rep = Report::new();
    rep.check_max("K_ϖ ∂x3 = ∂x3 + 2a ∂ξ3", 1e-12, r0);
    rep.check_max("Ω(X, Y) = 2a", 1e-12, r1);
    rep.check_max("Ω = Ω_c − (1/2a) ι_XΩ∧ι_YΩ", 1e-12, r2);
    rep.check_max("ϖ = ϖ₁∧ι_XΩ + ϖ₂∧ι_YΩ", 1e-12, r3);
    let (m, at) = worst(r4);
    rep.inform("Ω = Ω_c + (1/2a) ι_XΩ∧ι_YΩ", m, 1e-12, at);
    let (m, at) = worst(r5);
    rep.inform("ϖ = ϖ₂∧ι_XΩ + ϖ₁∧ι_YΩ", m, 1e-12, at);

    // renormalized pair on the quotient chart
    let q = Chart::new(&["x1", "x2", "xi1", "xi2"])?;
    let a4 = a.lift(&q)?;
    let big4 = DifferentialForm::parse_terms(&q, 2, &[("1", &["x1", "xi1"]), ("1", &["x2", "xi2"])])?;
    let p4 = DifferentialForm::basis(&q, &[2, 3])?;
    let q4 = DifferentialForm::basis(&q, &[0, 1])?;
    let omega4 = p4.sub(&q4.mul_coeff(&a4))?;
    let hat_want = p4.add(&q4.mul_coeff(&a4))?.neg();
    let pts4: Vec<Vec<f64>> = pts.iter().map(|p| vec![p[0], p[1], p[3], p[4]]).collect();
    let st = MaStructure4::new(big4, omega4)?;
    let hat = ma4::dual_form(&st)?;
    let mut rh = Vec::new();
    for p in &pts4 {
        rh.push((hat.sub(&hat_want)?.eval(p)?.max_abs(), p.clone()));
    }
    rep.check_max("dual of −2aϖ₁ is −2aϖ₂ (with Ω_c)", 1e-12, rh);
    let triple = ma4::build_triple(&st, &pts4)?;
    rep.absorb("renormalized triple: ", triple.verify(&pts4, 1e-10)?);
    rep.note("renormalization: ϖ₁, ϖ₂ multiplied by −2a and read as (ω, ω̂) on (x1,x2,ξ1,ξ2)");
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;

    fn plane(s: &str) -> ScalarField {
        ScalarField::parse(s, &ma4::plane_chart()).unwrap()
    }

    #[test]
    fn moment_maps() {
        let c = chart_xi();
        let big = ma6::canonical_symplectic(&c);
        let mu = moment_map(&big, &VectorField::basis(&c, 2)).unwrap();
        assert_eq!(mu.to_string(), "-xi3");
        let cu = chart_u();
        let x = VectorField::constant(&cu, &[0.0, 0.0, 1.0, 0.0, 0.0, 2.0]).unwrap();
        let mu = moment_map(&ma6::canonical_symplectic(&cu), &x).unwrap();
        assert_eq!(mu.eval(&[0.0, 0.0, 1.5, 0.0, 0.0, 0.25]).unwrap(), 2.0 * 1.5 - 0.25);
        let zero = VectorField::constant(&c, &[0.0; 6]).unwrap();
        assert!(moment_map(&big, &zero).is_err());
    }

    #[test]
    fn laplace_reduces_to_planar_laplace() {
        let act = TranslationAction::laplace3d(0.5).unwrap();
        let pts = sample::unit_box(1, 20, 6);
        let wc = reduce(&laplace3d_form(), &act, &pts).unwrap();
        assert_eq!(wc.to_string(), "dx1∧dxi2 - dx2∧dxi1");
        let q = act.reduced_chart();
        let want = DifferentialForm::parse_terms(q, 2, &[("1", &["xi1", "x2"]), ("1", &["x1", "xi2"])]).unwrap();
        assert!(wc.sub(&want).unwrap().is_zero());
        assert!(wc.d().is_zero());
    }

    #[test]
    fn invariance() {
        let pts = sample::unit_box(2, 20, 6);
        let cu = chart_u();
        let x = VectorField::constant(&cu, &[0.0, 0.0, 1.0, 0.0, 0.0, 3.0]).unwrap();
        let pair = EulerPair6::new(&plane("1")).unwrap();
        assert!(check_invariance(&pair.theta, &x, &pts).unwrap().passed());
        let pair = EulerPair6::new(&plane("x1^2")).unwrap();
        let r = check_invariance(&pair.omega, &VectorField::basis(&cu, 0), &pts).unwrap();
        assert!(!r.passed());
        let act = TranslationAction::stretching(1.0, 0.0).unwrap();
        let moved = TranslationAction { generator: VectorField::basis(&cu, 0), ..act };
        assert!(matches!(reduce(&pair.omega, &moved, &pts), Err(Error::NotInvariant { .. })));
    }

    #[test]
    fn stretching_reduction_and_shear() {
        let pts = sample::unit_box(3, 30, 6);
        for gamma in [0.0, 1.0, 2.0] {
            let r = reduce_euler_pair(&plane("sin(x1)*cos(x2)"), gamma, 0.3, &pts).unwrap();
            assert!(r.report.passed(), "{:?}", r.report);
        }
        let r = reduce_euler_pair(&plane("1"), 2.0, 0.0, &pts).unwrap();
        let w0 = r.change.omega0.eval(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!((w0.coeff(&[0, 1]), w0.coeff(&[2, 3])), (4.0, -1.0));
    }

    #[test]
    fn burgers_splitting() {
        let pts = sample::unit_box(4, 30, 6);
        for a in ["1", "1 + x1^2"] {
            let r = burgers_decomposition(&plane(a), &pts).unwrap();
            assert!(r.get("Ω(X, Y) = 2a").unwrap().pass);
            assert!(r.get("Ω = Ω_c + (1/2a) ι_XΩ∧ι_YΩ").unwrap().pass);
            assert!(r.get("ϖ = ϖ₂∧ι_XΩ + ϖ₁∧ι_YΩ").unwrap().pass);
            assert!(r.get("dual of −2aϖ₁ is −2aϖ₂ (with Ω_c)").unwrap().pass);
            assert!(r.get("renormalized triple: S² = 1").unwrap().pass);
            // the displayed forms carry a sign and a label slip
            assert!((r.get("Ω = Ω_c − (1/2a) ι_XΩ∧ι_YΩ").unwrap().residual - 2.0).abs() < 1e-12);
            assert!((r.get("ϖ = ϖ₁∧ι_XΩ + ϖ₂∧ι_YΩ").unwrap().residual - 2.0).abs() < 1e-12);
        }
        let r = burgers_decomposition(&plane("1"), &[vec![0.0; 6]]).unwrap();
        assert_eq!(r.get("Ω(X, Y) = 2a").unwrap().residual, 0.0);
    }
}
