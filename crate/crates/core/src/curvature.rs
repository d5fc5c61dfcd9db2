//! Levi-Civita curvature of coordinate metrics.
//!
//! Derivatives of the metric come from second-order jets, so every entry is
//! exact up to rounding; there is no finite differencing.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::SymmetricTensorField;

/// A pseudo-Riemannian metric in coordinates.
#[derive(Debug, Clone)]
pub struct MetricField {
    g: SymmetricTensorField,
}

/// `Γ[k][i][j] = Γ^k_{ij}`.
pub type Christoffel = Vec<Vec<Vec<f64>>>;
/// `R[l][i][j][k] = R^l_{ijk}`.
pub type Riemann = Vec<Vec<Vec<Vec<f64>>>>;

/// Metric data at one point: value, first and second partials, inverse.
struct Local {
    n: usize,
    inv: DMatrix<f64>,
    // dg[m][(i, j)] = ∂_m g_ij
    dg: Vec<DMatrix<f64>>,
    // ddg[m][p][(i, j)] = ∂_m ∂_p g_ij
    ddg: Vec<Vec<DMatrix<f64>>>,
}

impl MetricField {
    pub fn new(g: SymmetricTensorField) -> MetricField {
        MetricField { g }
    }

    pub fn tensor(&self) -> &SymmetricTensorField {
        &self.g
    }

    pub fn dim(&self) -> usize {
        self.g.chart().dim()
    }

    /// Errors unless `|det g| > 1e-12 · scale^dim` at the point.
    pub fn check_invertible(&self, pt: &[f64]) -> Result<DMatrix<f64>> {
        let m = self.g.eval(pt)?;
        let scale = m.amax();
        if scale == 0.0 || m.determinant().abs() <= 1e-12 * scale.powi(self.dim() as i32) {
            return Err(Error::Degenerate { what: "metric".into(), point: pt.to_vec() });
        }
        Ok(m)
    }

    fn local(&self, pt: &[f64]) -> Result<Local> {
        let g0 = self.check_invertible(pt)?;
        let n = self.dim();
        let inv = g0.try_inverse().ok_or_else(|| Error::Degenerate { what: "metric".into(), point: pt.to_vec() })?;
        let mut dg = vec![DMatrix::zeros(n, n); n];
        let mut ddg = vec![vec![DMatrix::zeros(n, n); n]; n];
        for i in 0..n {
            for j in i..n {
                let e = self.g.entry(i, j);
                if e.as_constant().is_some() {
                    continue;
                }
                let jet = e.eval_jet(pt, 2)?;
                for m in 0..n {
                    let v = jet.partial(&[m]);
                    dg[m][(i, j)] = v;
                    dg[m][(j, i)] = v;
                    for p in 0..n {
                        let v = jet.partial(&[m, p]);
                        ddg[m][p][(i, j)] = v;
                        ddg[m][p][(j, i)] = v;
                    }
                }
            }
        }
        Ok(Local { n, inv, dg, ddg })
    }

    /// `Γ^k_{ij} = ½ g^{kl}(∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij})`.
    pub fn christoffel(&self, pt: &[f64]) -> Result<Christoffel> {
        let loc = self.local(pt)?;
        Ok(christoffel_of(&loc, &loc.inv, |m, i, j| loc.dg[m][(i, j)]))
    }

    pub fn riemann(&self, pt: &[f64]) -> Result<Riemann> {
        let loc = self.local(pt)?;
        let n = loc.n;
        let gamma = christoffel_of(&loc, &loc.inv, |m, i, j| loc.dg[m][(i, j)]);
        // ∂_m Γ^k_{ij}: product rule with ∂_m g⁻¹ = −g⁻¹ (∂_m g) g⁻¹.
        let dgamma: Vec<Christoffel> = (0..n)
            .map(|m| {
                let dinv = -(&loc.inv * &loc.dg[m] * &loc.inv);
                let a = christoffel_of(&loc, &dinv, |p, i, j| loc.dg[p][(i, j)]);
                let b = christoffel_of(&loc, &loc.inv, |p, i, j| loc.ddg[m][p][(i, j)]);
                (0..n)
                    .map(|k| (0..n).map(|i| (0..n).map(|j| a[k][i][j] + b[k][i][j]).collect()).collect())
                    .collect()
            })
            .collect();
        let mut r = vec![vec![vec![vec![0.0; n]; n]; n]; n];
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let mut v = dgamma[i][l][j][k] - dgamma[j][l][i][k];
                        for m in 0..n {
                            v += gamma[l][i][m] * gamma[m][j][k] - gamma[l][j][m] * gamma[m][i][k];
                        }
                        r[l][i][j][k] = v;
                    }
                }
            }
        }
        Ok(r)
    }

    /// `Ric_{jk} = R^i_{ijk}`.
    pub fn ricci(&self, pt: &[f64]) -> Result<DMatrix<f64>> {
        Ok(ricci_of(&self.riemann(pt)?))
    }
}

fn christoffel_of(loc: &Local, inv: &DMatrix<f64>, dg: impl Fn(usize, usize, usize) -> f64) -> Christoffel {
    let n = loc.n;
    let mut out = vec![vec![vec![0.0; n]; n]; n];
    for i in 0..n {
        for j in i..n {
            let c: Vec<f64> = (0..n).map(|l| dg(i, j, l) + dg(j, i, l) - dg(l, i, j)).collect();
            for k in 0..n {
                let v = 0.5 * (0..n).map(|l| inv[(k, l)] * c[l]).sum::<f64>();
                out[k][i][j] = v;
                out[k][j][i] = v;
            }
        }
    }
    out
}

pub fn ricci_of(r: &Riemann) -> DMatrix<f64> {
    let n = r.len();
    DMatrix::from_fn(n, n, |j, k| (0..n).map(|i| r[i][i][j][k]).sum())
}

pub fn riemann_max(r: &Riemann) -> f64 {
    r.iter().flatten().flatten().flatten().fold(0.0, |m, v| m.max(v.abs()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Flatness {
    Flat { riemann_max: f64 },
    NonFlat { witness: Vec<f64>, riemann_max: f64 },
}

/// Sampled curvature summary.
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureReport {
    pub ricci_max: f64,
    pub ricci_witness: Option<Vec<f64>>,
    pub riemann_max: f64,
    pub flatness: Flatness,
    pub ricci_flat: bool,
    pub tol: f64,
    /// Points where the metric was singular; they are left out of the maxima.
    pub skipped: Vec<Vec<f64>>,
    pub note: &'static str,
}

/// Riemann and Ricci maxima over a sample, tolerance `1e-9 · max(1, max |g|)`.
pub fn analyze(g: &MetricField, pts: &[Vec<f64>]) -> Result<CurvatureReport> {
    let mut scale: f64 = 1.0;
    let mut skipped = Vec::new();
    let mut riem = (0.0, None);
    let mut ric = (0.0, None);
    for p in pts {
        let m = match g.check_invertible(p) {
            Ok(m) => m,
            Err(Error::Degenerate { .. }) => {
                skipped.push(p.clone());
                continue;
            }
            Err(e) => return Err(e),
        };
        scale = scale.max(m.amax());
        let r = g.riemann(p)?;
        let rm = riemann_max(&r);
        let cm = ricci_of(&r).amax();
        if riem.1.is_none() || rm > riem.0 || rm.is_nan() {
            riem = (rm, Some(p.clone()));
        }
        if ric.1.is_none() || cm > ric.0 || cm.is_nan() {
            ric = (cm, Some(p.clone()));
        }
    }
    let tol = 1e-9 * scale;
    let flatness = match riem {
        (m, Some(w)) if !(m < tol) => Flatness::NonFlat { witness: w, riemann_max: m },
        (m, _) => Flatness::Flat { riemann_max: m },
    };
    Ok(CurvatureReport {
        ricci_max: ric.0,
        ricci_witness: ric.1,
        riemann_max: riem.0,
        ricci_flat: ric.0 < tol,
        flatness,
        tol,
        skipped,
        note: "sampled flatness",
    })
}

pub fn flatness_verdict(g: &MetricField, pts: &[Vec<f64>]) -> Result<Flatness> {
    Ok(analyze(g, pts)?.flatness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldexpr::{Chart, ScalarField};

    fn diag(chart: &std::sync::Arc<Chart>, entries: &[&str]) -> MetricField {
        let f: Vec<ScalarField> = entries.iter().map(|s| ScalarField::parse(s, chart).unwrap()).collect();
        MetricField::new(SymmetricTensorField::from_upper(chart, |i, j| {
            if i == j {
                f[i].clone()
            } else {
                ScalarField::constant(chart, 0.0)
            }
        }))
    }

    #[test]
    fn constant_metric_is_flat() {
        let c = Chart::new(&["x", "y", "z"]).unwrap();
        let g = diag(&c, &["1", "-1", "2"]);
        let gamma = g.christoffel(&[0.3, 0.1, 0.2]).unwrap();
        assert!(gamma.iter().flatten().flatten().all(|&v| v == 0.0));
        assert!(matches!(flatness_verdict(&g, &[vec![0.0; 3]]).unwrap(), Flatness::Flat { .. }));
    }

    #[test]
    fn exponential_diagonal_christoffel() {
        let c = Chart::new(&["x1", "x2"]).unwrap();
        let g = diag(&c, &["exp(2*x1)", "1"]);
        let gamma = g.christoffel(&[0.7, -0.4]).unwrap();
        assert!((gamma[0][0][0] - 1.0).abs() < 1e-14);
        // a 2D metric of this form is still flat (x1 ↦ e^{x1} is a reparametrization)
        let r = g.riemann(&[0.7, -0.4]).unwrap();
        assert!(riemann_max(&r) < 1e-12);
    }

    #[test]
    fn round_sphere_has_constant_curvature() {
        let c = Chart::new(&["t", "p"]).unwrap();
        let g = diag(&c, &["1", "sin(t)^2"]);
        let pt = [1.1, 0.3];
        let r = g.riemann(&pt).unwrap();
        // R(∂t, ∂p)∂p = sin²t ∂t on the unit sphere
        assert!((r[0][0][1][1] - 1.1f64.sin().powi(2)).abs() < 1e-12);
        let ric = ricci_of(&r);
        assert!((ric[(0, 0)] - 1.0).abs() < 1e-12);
        assert!(analyze(&g, &[pt.to_vec()]).unwrap().riemann_max > 0.5);
    }

    #[test]
    fn singular_points_are_skipped() {
        let c = Chart::new(&["x1", "x2"]).unwrap();
        let g = diag(&c, &["x1", "1"]);
        let rep = analyze(&g, &[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(rep.skipped, vec![vec![0.0, 0.0]]);
        assert!(g.christoffel(&[0.0, 0.0]).is_err());
    }
}
