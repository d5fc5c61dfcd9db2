//! Seeded random generators for expressions, forms, fields and maps.
#![allow(dead_code)]

use std::sync::Arc;

use mas_core::exterior::{DifferentialForm, GraphMap, VectorField};
use mas_core::fieldexpr::{Chart, ScalarField};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn chart(dim: usize) -> Arc<Chart> {
    named_chart("y", dim)
}

pub fn named_chart(prefix: &str, dim: usize) -> Arc<Chart> {
    let names: Vec<String> = (1..=dim).map(|i| format!("{prefix}{i}")).collect();
    Chart::new(&names).unwrap()
}

fn coef(rng: &mut ChaCha8Rng) -> String {
    let v: f64 = rng.gen_range(-2.0..2.0);
    format!("({v:.3})")
}

/// Random smooth expression over the chart; finite on `[-1, 1]^dim`.
pub fn expr(rng: &mut ChaCha8Rng, c: &Chart, depth: u32) -> String {
    let leaf = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.7) {
            c.name(rng.gen_range(0..c.dim())).to_string()
        } else {
            coef(rng)
        }
    };
    if depth == 0 {
        return leaf(rng);
    }
    let a = expr(rng, c, depth - 1);
    match rng.gen_range(0..9) {
        0 => leaf(rng),
        1 => format!("({a} + {})", expr(rng, c, depth - 1)),
        2 => format!("({a} - {})", expr(rng, c, depth - 1)),
        3 | 4 => format!("({a} * {})", expr(rng, c, depth - 1)),
        5 => format!("sin({a})"),
        6 => format!("cos({a})"),
        7 => format!("exp(0.3*{a})"),
        _ => format!("sqrt(1 + {a}^2)"),
    }
}

pub fn scalar(rng: &mut ChaCha8Rng, c: &Arc<Chart>, depth: u32) -> ScalarField {
    ScalarField::parse(&expr(rng, c, depth), c).unwrap()
}

/// Random `k`-subsets of `0..n`, in increasing order.
fn subset(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.gen_range(i..n);
        all.swap(i, j);
    }
    let mut s = all[..k].to_vec();
    s.sort_unstable();
    s
}

/// Random `k`-form with a few terms and expression coefficients.
pub fn form(rng: &mut ChaCha8Rng, c: &Arc<Chart>, k: usize, depth: u32) -> DifferentialForm {
    let n = c.dim();
    let mut f = DifferentialForm::zero(c, k);
    for _ in 0..rng.gen_range(1..=3) {
        let idx = subset(rng, n, k);
        let t = DifferentialForm::monomial(c, &idx, scalar(rng, c, depth)).unwrap();
        f = f.add(&t).unwrap();
    }
    f
}

pub fn vector_field(rng: &mut ChaCha8Rng, c: &Arc<Chart>, depth: u32) -> VectorField {
    VectorField::new(c, (0..c.dim()).map(|_| scalar(rng, c, depth)).collect()).unwrap()
}

/// Random polynomial map between charts (degree ≤ 2, small coefficients).
pub fn poly_map(rng: &mut ChaCha8Rng, src: &Arc<Chart>, dst: &Arc<Chart>) -> GraphMap {
    let n = src.dim();
    let comps = (0..dst.dim())
        .map(|_| {
            let mut s = coef(rng);
            for i in 0..n {
                s += &format!(" + {}*{}", coef(rng), src.name(i));
            }
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            s += &format!(" + 0.5*{}*{}*{}", coef(rng), src.name(i), src.name(j));
            ScalarField::parse(&s, src).unwrap()
        })
        .collect();
    GraphMap::new(src, dst, comps).unwrap()
}

pub fn point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Quadratic stream function with random coefficients, as source text.
pub fn quadratic(rng: &mut ChaCha8Rng) -> (String, [f64; 3]) {
    let h: [f64; 3] = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
    let (l1, l2): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let s = format!("0.5*({})*x1^2 + ({})*x1*x2 + 0.5*({})*x2^2 + ({l1})*x1 + ({l2})*x2", h[0], h[1], h[2]);
    (s, h)
}

/// Determinant of a small dense matrix by cofactor expansion.
pub fn det(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        0 => 1.0,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<f64>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &v)| v).collect()).collect();
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                s * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

/// Brute-force evaluation: `Σ_I a_I det(v_j[i])_{i ∈ I}`.
pub fn brute_apply(f: &mas_core::exterior::Form<f64>, vs: &[Vec<f64>]) -> f64 {
    f.terms()
        .map(|(idx, &c)| {
            let m: Vec<Vec<f64>> = idx.iter().map(|&i| vs.iter().map(|v| v[i]).collect()).collect();
            c * det(&m)
        })
        .sum()
}

/// All permutations of `0..n` with signs.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    if n == 0 {
        return vec![(vec![], 1.0)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            // inserting the largest element at `pos` adds `len - pos` inversions
            let sign = if (p.len() - pos) % 2 == 0 { s } else { -s };
            out.push((q, sign));
        }
    }
    out
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}
