//! Gauss–Legendre rules and node-doubling integration.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::xprec::XReal;

/// Nodes and weights of the n-point rule on [-1, 1].
#[derive(Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<XReal>,
    pub weights: Vec<XReal>,
}

/// Upper bound on the node count of any single rule.
pub const MAX_NODES: usize = 1 << 16;

fn legendre_pair(n: usize, x: &XReal) -> (XReal, XReal) {
    // (P_n(x), P_{n-1}(x)) by the three-term recurrence
    let p = x.prec();
    let mut p0 = XReal::one(p);
    let mut p1 = x.clone();
    for k in 1..n {
        let kk = XReal::from_i64(k as i64, p);
        let p2 = (XReal::from_i64(2 * k as i64 + 1, p) * x * &p1 - &kk * &p0) / XReal::from_i64(k as i64 + 1, p);
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

fn legendre_pair_f64(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 1..n {
        let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

fn compute_rule(n: usize, p: usize) -> GaussLegendre {
    let wp = p + 16;
    let one = XReal::one(wp);
    let nn = XReal::from_i64(n as i64, wp);
    let half = n / 2;
    let mut nodes = vec![XReal::zero(p); n];
    let mut weights = vec![XReal::zero(p); n];
    for i in 0..n.div_ceil(2) {
        let mut g = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (pn, pm) = legendre_pair_f64(n, g);
            let d = n as f64 * (g * pn - pm) / (g * g - 1.0);
            let step = pn / d;
            g -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let mut x = XReal::from_f64(g, wp);
        let mut dp = XReal::zero(wp);
        // quadratic convergence from 50 bits
        let iters = ((wp as f64 / 48.0).log2().ceil() as usize) + 2;
        for _ in 0..iters {
            let (pn, pm) = legendre_pair(n, &x);
            dp = &nn * (&x * &pn - pm) / (&x * &x - &one);
            x = &x - &pn / &dp;
        }
        let w = XReal::from_i64(2, wp) / ((&one - &x * &x) * &dp * &dp);
        if 2 * i + 1 == n {
            nodes[half] = XReal::zero(p);
            weights[half] = w.with_prec(p);
        } else {
            nodes[i] = x.with_prec(p);
            nodes[n - 1 - i] = (-&x).with_prec(p);
            weights[i] = w.with_prec(p);
            weights[n - 1 - i] = w.with_prec(p);
        }
    }
    GaussLegendre { nodes, weights }
}

/// The n-point rule at precision p, memoized (pure function of (n, p)).
pub fn gauss_legendre(n: usize, p: usize) -> Arc<GaussLegendre> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<GaussLegendre>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().expect("GL cache").get(&(n, p)) {
        return r.clone();
    }
    let r = Arc::new(compute_rule(n, p));
    cache.lock().expect("GL cache").insert((n, p), r.clone());
    r
}

/// Apply the n-point rule on [a, b] to a vector-valued integrand.
pub fn gl_apply<F: Fn(&XReal) -> Vec<XReal>>(f: &F, a: &XReal, b: &XReal, n: usize, width: usize) -> Vec<XReal> {
    let p = a.prec();
    let rule = gauss_legendre(n, p);
    let half = (b - a).ldexp(-1);
    let mid = (b + a).ldexp(-1);
    let mut acc = vec![XReal::zero(p); width];
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let t = &mid + &half * x;
        let v = f(&t);
        for (s, vi) in acc.iter_mut().zip(v) {
            *s = &*s + w * &vi;
        }
    }
    acc.into_iter().map(|s| s * &half).collect()
}

/// Integrate with doubling node counts until two successive rules agree
/// to `tol` relative to `scale` (componentwise, absolute floor `scale`).
pub fn gl_adaptive<F: Fn(&XReal) -> Vec<XReal>>(
    f: &F,
    a: &XReal,
    b: &XReal,
    n0: usize,
    width: usize,
    tol: &XReal,
    scale: &XReal,
) -> Result<Vec<XReal>> {
    let mut n = n0.max(4);
    let mut prev = gl_apply(f, a, b, n, width);
    while n < MAX_NODES {
        n *= 2;
        let cur = gl_apply(f, a, b, n, width);
        let ok = prev
            .iter()
            .zip(&cur)
            .all(|(x, y)| (x - y).abs() <= tol * &y.abs().max(scale));
        if ok {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature(format!("no convergence with {MAX_NODES} nodes")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exactness() {
        let p = 192;
        let rule = gauss_legendre(7, p);
        // ∫ x^12 = 2/13 exactly for n = 7 (degree <= 13)
        let s = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .fold(XReal::zero(p), |acc, (x, w)| acc + w * &x.powi(12));
        let e = XReal::from_i64(2, p) / XReal::from_i64(13, p);
        assert!((s - e).abs() < XReal::one(p).ldexp(-185));
    }

    #[test]
    fn adaptive_exp() {
        let p = 256;
        let f = |x: &XReal| vec![x.exp()];
        let one = XReal::one(p);
        let v = gl_adaptive(&f, &XReal::zero(p), &one, 8, 1, &one.ldexp(-240), &one).unwrap();
        let e = one.exp() - &one;
        assert!((&v[0] - e).abs() < one.ldexp(-238));
    }
}
