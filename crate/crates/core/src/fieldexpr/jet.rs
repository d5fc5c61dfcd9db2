//! Truncated multivariate Taylor arithmetic.
//!
//! A `Taylor` over `n` variables at order `N` stores the coefficients
//! `∂^α f / α!` for every multi-index `|α| ≤ N`, in graded order so that
//! the order-`k` coefficients of a space are a prefix of any higher-order
//! space over the same variables.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Monomial layout and product table for one `(dim, order)` pair.
#[derive(Debug)]
pub struct JetSpace {
    dim: usize,
    order: usize,
    monos: Vec<Vec<u8>>,
    /// For each target monomial, the index pairs whose product lands there.
    prod: Vec<Vec<(u32, u32)>>,
    /// `shift[v][k]` = index of `monos[k] + e_v` (for `k` below the top degree).
    shift: Vec<Vec<u32>>,
    /// Number of monomials of total degree `≤ k`.
    counts: Vec<usize>,
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

impl JetSpace {
    fn build(dim: usize, order: usize) -> JetSpace {
        let mut monos: Vec<Vec<u8>> = Vec::new();
        let mut counts = Vec::with_capacity(order + 1);
        for deg in 0..=order {
            let mut cur = vec![0u8; dim];
            push_degree(&mut monos, &mut cur, 0, deg);
            counts.push(monos.len());
        }
        let index: HashMap<&[u8], usize> =
            monos.iter().enumerate().map(|(i, m)| (m.as_slice(), i)).collect();
        let mut prod = vec![Vec::new(); monos.len()];
        let mut sum = vec![0u8; dim];
        for (i, a) in monos.iter().enumerate() {
            let da: usize = a.iter().map(|&x| x as usize).sum();
            for (j, b) in monos.iter().enumerate().take(counts[order - da]) {
                for t in 0..dim {
                    sum[t] = a[t] + b[t];
                }
                let k = index[sum.as_slice()];
                prod[k].push((i as u32, j as u32));
            }
        }
        let below = if order == 0 { 0 } else { counts[order - 1] };
        let mut shift = vec![Vec::with_capacity(below); dim];
        for (v, sh) in shift.iter_mut().enumerate() {
            for m in monos.iter().take(below) {
                let mut up = m.clone();
                up[v] += 1;
                sh.push(index[up.as_slice()] as u32);
            }
        }
        JetSpace { dim, order, monos, prod, shift, counts }
    }

    /// Shared space for `(dim, order)`; built once per process.
    pub fn get(dim: usize, order: usize) -> Arc<JetSpace> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<JetSpace>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
        map.entry((dim, order)).or_insert_with(|| Arc::new(JetSpace::build(dim, order))).clone()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn monomial(&self, k: usize) -> &[u8] {
        &self.monos[k]
    }

    pub fn index_of(&self, alpha: &[u8]) -> Option<usize> {
        let deg: usize = alpha.iter().map(|&x| x as usize).sum();
        if alpha.len() != self.dim || deg > self.order {
            return None;
        }
        let lo = if deg == 0 { 0 } else { self.counts[deg - 1] };
        (lo..self.counts[deg]).find(|&k| self.monos[k] == alpha)
    }

    /// Number of monomials of a space of order `k` over the same variables.
    pub fn count_upto(&self, k: usize) -> usize {
        if k <= self.order {
            self.counts[k]
        } else {
            binomial(self.dim + k, k)
        }
    }
}

fn push_degree(out: &mut Vec<Vec<u8>>, cur: &mut Vec<u8>, pos: usize, left: usize) {
    if pos + 1 == cur.len() {
        cur[pos] = left as u8;
        out.push(cur.clone());
        cur[pos] = 0;
        return;
    }
    for k in (0..=left).rev() {
        cur[pos] = k as u8;
        push_degree(out, cur, pos + 1, left - k);
    }
    cur[pos] = 0;
}

/// Truncated Taylor expansion around a point.
#[derive(Debug, Clone)]
pub struct Taylor {
    space: Arc<JetSpace>,
    c: Vec<f64>,
}

impl Taylor {
    pub fn constant(space: &Arc<JetSpace>, v: f64) -> Taylor {
        let mut c = vec![0.0; space.len()];
        c[0] = v;
        Taylor { space: space.clone(), c }
    }

    /// The coordinate `x_v` expanded around `x_v = at`.
    pub fn variable(space: &Arc<JetSpace>, v: usize, at: f64) -> Taylor {
        let mut t = Taylor::constant(space, at);
        if space.order > 0 {
            let mut e = vec![0u8; space.dim];
            e[v] = 1;
            let k = space.index_of(&e).expect("first-order monomial");
            t.c[k] = 1.0;
        }
        t
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn order(&self) -> usize {
        self.space.order
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|x| x.is_finite())
    }

    /// Stored Taylor coefficient `∂^α f / α!`.
    pub fn coeff(&self, alpha: &[u8]) -> f64 {
        self.space.index_of(alpha).map_or(0.0, |k| self.c[k])
    }

    pub fn add(&self, o: &Taylor) -> Taylor {
        let c = self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect();
        Taylor { space: self.space.clone(), c }
    }

    pub fn sub(&self, o: &Taylor) -> Taylor {
        let c = self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect();
        Taylor { space: self.space.clone(), c }
    }

    pub fn neg(&self) -> Taylor {
        Taylor { space: self.space.clone(), c: self.c.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, s: f64) -> Taylor {
        Taylor { space: self.space.clone(), c: self.c.iter().map(|a| a * s).collect() }
    }

    pub fn add_scalar(&self, s: f64) -> Taylor {
        let mut t = self.clone();
        t.c[0] += s;
        t
    }

    pub fn mul(&self, o: &Taylor) -> Taylor {
        let mut c = vec![0.0; self.c.len()];
        for (k, pairs) in self.space.prod.iter().enumerate() {
            // Seed with the first product so that c[0] is exactly a0*b0,
            // signed zeros included.
            let mut it = pairs.iter();
            let &(i, j) = it.next().expect("every monomial has a factorization");
            let mut s = self.c[i as usize] * o.c[j as usize];
            for &(i, j) in it {
                s += self.c[i as usize] * o.c[j as usize];
            }
            c[k] = s;
        }
        Taylor { space: self.space.clone(), c }
    }

    /// Series quotient; `None` when the denominator vanishes at the point.
    pub fn div(&self, o: &Taylor) -> Option<Taylor> {
        let b0 = o.c[0];
        if b0 == 0.0 {
            return None;
        }
        let mut q = vec![0.0; self.c.len()];
        q[0] = self.c[0] / b0;
        for k in 1..q.len() {
            let mut s = self.c[k];
            for &(i, j) in &self.space.prod[k] {
                if j != 0 {
                    s -= q[i as usize] * o.c[j as usize];
                }
            }
            q[k] = s / b0;
        }
        Some(Taylor { space: self.space.clone(), c: q })
    }

    /// `f(self)` from the scaled derivatives `d[k] = f^(k)(u0)/k!`, `k = 0..=order`.
    pub fn compose(&self, d: &[f64]) -> Taylor {
        let n = self.space.order;
        debug_assert_eq!(d.len(), n + 1);
        let mut h = self.clone();
        h.c[0] = 0.0;
        let mut r = Taylor::constant(&self.space, d[n]);
        for k in (0..n).rev() {
            r = r.mul(&h);
            r.c[0] = d[k];
        }
        r
    }

    pub fn powi(&self, n: i32) -> Option<Taylor> {
        let u0 = self.c[0];
        if u0 == 0.0 && n < 0 {
            return None;
        }
        let order = self.space.order;
        let mut d = Vec::with_capacity(order + 1);
        d.push(u0.powi(n));
        let mut binom = 1.0;
        for k in 1..=order {
            binom *= (n as f64 - (k as f64 - 1.0)) / k as f64;
            let e = n - k as i32;
            d.push(if binom == 0.0 { 0.0 } else { binom * u0.powi(e) });
        }
        Some(self.compose(&d))
    }

    pub fn exp(&self) -> Taylor {
        let e = self.c[0].exp();
        let mut d = vec![e];
        let mut f = 1.0;
        for k in 1..=self.space.order {
            f *= k as f64;
            d.push(e / f);
        }
        self.compose(&d)
    }

    pub fn sin(&self) -> Taylor {
        self.trig(false)
    }

    pub fn cos(&self) -> Taylor {
        self.trig(true)
    }

    fn trig(&self, cosine: bool) -> Taylor {
        let (s, c) = self.c[0].sin_cos();
        let cycle = if cosine { [c, -s, -c, s] } else { [s, c, -s, -c] };
        let mut d = Vec::with_capacity(self.space.order + 1);
        let mut f = 1.0;
        for k in 0..=self.space.order {
            if k > 0 {
                f *= k as f64;
            }
            d.push(cycle[k % 4] / f);
        }
        self.compose(&d)
    }

    /// `None` outside the domain `u0 > 0`.
    pub fn ln(&self) -> Option<Taylor> {
        let u0 = self.c[0];
        if u0 <= 0.0 {
            return None;
        }
        let mut d = vec![u0.ln()];
        for k in 1..=self.space.order {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            d.push(sign / (k as f64 * u0.powi(k as i32)));
        }
        Some(self.compose(&d))
    }

    /// `None` for negative arguments, or zero when derivatives are requested.
    pub fn sqrt(&self) -> Option<Taylor> {
        let u0 = self.c[0];
        if u0 < 0.0 || (u0 == 0.0 && self.space.order > 0) {
            return None;
        }
        let r = u0.sqrt();
        let mut d = vec![r];
        let mut binom = 1.0;
        for k in 1..=self.space.order {
            binom *= (0.5 - (k as f64 - 1.0)) / k as f64;
            d.push(binom * r / u0.powi(k as i32));
        }
        Some(self.compose(&d))
    }

    /// `None` at zero when derivatives are requested.
    pub fn abs(&self) -> Option<Taylor> {
        let u0 = self.c[0];
        if self.space.order == 0 {
            return Some(Taylor::constant(&self.space, u0.abs()));
        }
        if u0 == 0.0 {
            return None;
        }
        let mut t = if u0 > 0.0 { self.clone() } else { self.neg() };
        t.c[0] = u0.abs();
        Some(t)
    }

    /// `∂/∂x_v`, one order lower.
    pub fn derivative(&self, v: usize) -> Taylor {
        assert!(self.space.order > 0, "cannot differentiate an order-0 jet");
        let lower = JetSpace::get(self.space.dim, self.space.order - 1);
        let c = self.space.shift[v]
            .iter()
            .enumerate()
            .map(|(k, &src)| (self.space.monos[k][v] as f64 + 1.0) * self.c[src as usize])
            .collect();
        Taylor { space: lower, c }
    }

    /// Drop all terms above `order`.
    pub fn truncate(&self, order: usize) -> Taylor {
        if order >= self.space.order {
            return self.clone();
        }
        let space = JetSpace::get(self.space.dim, order);
        Taylor { c: self.c[..space.len()].to_vec(), space }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_prefix_layout() {
        let s2 = JetSpace::get(3, 2);
        let s4 = JetSpace::get(3, 4);
        for k in 0..s2.len() {
            assert_eq!(s2.monomial(k), s4.monomial(k));
        }
        assert_eq!(s4.len(), binomial(7, 4));
        assert_eq!(s4.count_upto(2), s2.len());
    }

    #[test]
    fn product_and_quotient_invert() {
        let s = JetSpace::get(2, 4);
        let x = Taylor::variable(&s, 0, 0.3);
        let y = Taylor::variable(&s, 1, -1.2);
        let p = x.mul(&y).add(&x.powi(3).unwrap());
        let q = p.div(&y).unwrap().mul(&y);
        for (a, b) in p.coeffs().iter().zip(q.coeffs()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn sine_series_at_zero() {
        let s = JetSpace::get(1, 5);
        let x = Taylor::variable(&s, 0, 0.0);
        let c = x.sin();
        let want = [0.0, 1.0, 0.0, -1.0 / 6.0, 0.0, 1.0 / 120.0];
        for (a, b) in c.coeffs().iter().zip(want) {
            assert!((a - b).abs() < 1e-16);
        }
    }

    #[test]
    fn log_of_exp_is_identity() {
        let s = JetSpace::get(2, 4);
        let x = Taylor::variable(&s, 0, 0.7).add(&Taylor::variable(&s, 1, 0.2).scale(3.0));
        let back = x.exp().ln().unwrap();
        for (a, b) in back.coeffs().iter().zip(x.coeffs()) {
            assert!((a - b).abs() < 1e-13);
        }
        let r = x.sqrt().unwrap();
        let sq = r.mul(&r);
        for (a, b) in sq.coeffs().iter().zip(x.coeffs()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn derivative_lowers_order() {
        let s = JetSpace::get(2, 3);
        let x = Taylor::variable(&s, 0, 2.0);
        let y = Taylor::variable(&s, 1, 5.0);
        // f = x^2 y, ∂x f = 2xy
        let f = x.powi(2).unwrap().mul(&y);
        let fx = f.derivative(0);
        assert_eq!(fx.order(), 2);
        assert_eq!(fx.value(), 20.0);
        assert_eq!(fx.coeff(&[0, 1]), 4.0);
    }
}
