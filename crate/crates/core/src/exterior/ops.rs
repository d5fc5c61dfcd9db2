use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fieldexpr::ScalarField;

use super::fields::OperatorField;
use super::form::{DifferentialForm, Form};

/// `|det| > 1e-12 · scale^n` with `scale` the largest entry.
pub fn is_nondegenerate(m: &DMatrix<f64>) -> bool {
    let scale = m.amax();
    if scale == 0.0 {
        return false;
    }
    m.determinant().abs() > 1e-12 * scale.powi(m.nrows() as i32)
}

/// Positive and negative eigenvalue counts of a symmetric matrix.
pub fn signature(m: &DMatrix<f64>) -> (usize, usize) {
    let tol = 1e-10 * m.amax().max(1.0);
    let eig = nalgebra::SymmetricEigen::new(m.clone()).eigenvalues;
    let pos = eig.iter().filter(|&&l| l > tol).count();
    let neg = eig.iter().filter(|&&l| l < -tol).count();
    (pos, neg)
}

fn constant_matrix(f: &DifferentialForm) -> Result<DMatrix<f64>> {
    let m = f.matrix()?;
    let n = f.dim();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if let Some(c) = &m[i][j] {
                out[(i, j)] = c
                    .as_constant()
                    .ok_or_else(|| Error::Invalid(format!("symplectic form has a non-constant coefficient `{c}`")))?;
            }
        }
    }
    Ok(out)
}

/// The operator `A` with `ω(X, Y) = Ω(A X, Y)`; Ω must have constant coefficients.
///
/// With `B(X,Y) = Xᵀ B Y` this is `A = Ω⁻¹ ω` in matrix form.
pub fn operator_from_pair(big: &DifferentialForm, omega: &DifferentialForm) -> Result<OperatorField> {
    if omega.degree() != 2 {
        return Err(Error::Degree(format!("operator from a {}-form", omega.degree())));
    }
    let om = constant_matrix(big)?;
    if !is_nondegenerate(&om) {
        return Err(Error::Degenerate { what: "symplectic form".into(), point: vec![] });
    }
    let inv = om.try_inverse().ok_or_else(|| Error::Degenerate { what: "symplectic form".into(), point: vec![] })?;
    let chart = omega.chart();
    let n = chart.dim();
    let w = omega.matrix()?;
    let zero = ScalarField::constant(chart, 0.0);
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n).fold(zero.clone(), |acc, k| match &w[k][j] {
                        Some(c) if inv[(i, k)] != 0.0 => acc + c.scale(inv[(i, k)]),
                        _ => acc,
                    })
                })
                .collect()
        })
        .collect();
    OperatorField::new(chart, rows)
}

/// Pointwise `A = Ω⁻¹ ω`, checking nondegeneracy of Ω at the point.
pub fn operator_at(big: &Form<f64>, omega: &Form<f64>) -> Result<DMatrix<f64>> {
    let om = big.dense_matrix()?;
    if !is_nondegenerate(&om) {
        return Err(Error::Degenerate { what: "2-form".into(), point: vec![] });
    }
    let w = omega.dense_matrix()?;
    om.lu().solve(&w).ok_or_else(|| Error::Degenerate { what: "2-form".into(), point: vec![] })
}

/// The 2-form `Ω(A·, ·)`, matrix `Aᵀ Ω`.
pub fn form_from_operator(big: &DifferentialForm, a: &OperatorField) -> Result<DifferentialForm> {
    let om = constant_matrix(big)?;
    let chart = big.chart();
    let n = chart.dim();
    let mut terms = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut acc = ScalarField::constant(chart, 0.0);
            for k in 0..n {
                if om[(k, j)] != 0.0 {
                    acc = acc + a.entry(k, i).scale(om[(k, j)]);
                }
            }
            terms.push((vec![i, j], acc));
        }
    }
    Form::from_terms(chart, 2, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldexpr::Chart;

    #[test]
    fn identity_operator_for_equal_forms() {
        let c = Chart::new(&["x1", "x2", "u1", "u2"]).unwrap();
        let big = DifferentialForm::parse_terms(&c, 2, &[("1", &["x1", "u1"]), ("1", &["x2", "u2"])]).unwrap();
        let a = operator_from_pair(&big, &big).unwrap();
        let m = a.eval(&[0.0; 4]).unwrap();
        assert_eq!(m, DMatrix::identity(4, 4));
        let back = form_from_operator(&big, &a).unwrap();
        assert!(back.sub(&big).unwrap().eval(&[0.0; 4]).unwrap().max_abs() == 0.0);
    }

    #[test]
    fn signature_counts() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(signature(&m), (1, 1));
        assert!(is_nondegenerate(&m));
        assert!(!is_nondegenerate(&DMatrix::zeros(2, 2)));
    }
}
