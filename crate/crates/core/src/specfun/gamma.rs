//! Gamma, log-Gamma, digamma and the reciprocal Gamma function.
//!
//! Stirling's series is applied after shifting the argument to
//! `Re(w) >= W(p)`, where `W` grows linearly with the precision so the
//! asymptotic tail is far below `2^-p` well before the series starts to
//! diverge. `gamma_fn` uses the reflection formula for `Re(w) < 1/2`;
//! `rgamma` is computed from the entire product form
//! `1/Γ(w) = (w)_m / Γ(w+m)` so its zeros are exact.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::xprec::{rational_to_xreal, Analytic, Dual, Field, XComplex, XReal};

fn bernoulli_table() -> &'static Mutex<Vec<BigRational>> {
    static T: OnceLock<Mutex<Vec<BigRational>>> = OnceLock::new();
    T.get_or_init(|| Mutex::new(vec![BigRational::one()]))
}

/// Bernoulli numbers B_0..B_n (B_1 = -1/2), exact.
pub fn bernoulli(n: usize) -> Vec<BigRational> {
    let mut t = bernoulli_table().lock().expect("bernoulli table");
    while t.len() <= n {
        let m = t.len();
        // Σ_{j<=m} C(m+1, j) B_j = 0
        let mut s = BigRational::zero();
        let mut binom = BigInt::one();
        for (j, b) in t.iter().enumerate() {
            s += BigRational::from_integer(binom.clone()) * b;
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        t.push(-s / BigRational::from_integer(BigInt::from(m + 1)));
    }
    t[..=n].to_vec()
}

/// Shift threshold for the asymptotic series at precision `p`.
fn stirling_threshold(p: usize) -> i64 {
    (0.23 * p as f64).ceil() as i64 + 4
}

struct StirlingCoeffs {
    /// B_{2k} / (2k (2k-1)), k = 1..
    lgamma: Vec<XReal>,
    /// B_{2k} / (2k), k = 1..
    digamma: Vec<XReal>,
}

fn stirling(p: usize) -> std::sync::Arc<StirlingCoeffs> {
    static CACHE: OnceLock<Mutex<HashMap<usize, std::sync::Arc<StirlingCoeffs>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().expect("stirling cache").get(&p) {
        return c.clone();
    }
    // Enough terms for |w| >= W: term_k ~ (2k)!/(2πW)^{2k}; stop once below 2^-(p+16).
    let w = stirling_threshold(p) as f64;
    let mut kmax = 1usize;
    let mut lt = 0.0f64;
    loop {
        let k2 = 2.0 * kmax as f64;
        lt += (k2 - 1.0).ln() + k2.ln() - 2.0 * (2.0 * std::f64::consts::PI * w).ln();
        if lt < -((p + 16) as f64) * std::f64::consts::LN_2 || kmax > 4 * p {
            break;
        }
        kmax += 1;
    }
    let b = bernoulli(2 * kmax + 2);
    let mut lg = Vec::with_capacity(kmax + 1);
    let mut dg = Vec::with_capacity(kmax + 1);
    for k in 1..=kmax + 1 {
        let b2k = &b[2 * k];
        let n = b2k.numer().clone();
        let d = b2k.denom().clone();
        let two_k = BigInt::from(2 * k);
        lg.push(rational_to_xreal(&n, &(d.clone() * &two_k * BigInt::from(2 * k - 1)), p));
        dg.push(rational_to_xreal(&n, &(d * &two_k), p));
    }
    let c = std::sync::Arc::new(StirlingCoeffs { lgamma: lg, digamma: dg });
    cache.lock().expect("stirling cache").insert(p, c.clone());
    c
}

fn pole_check(w: &XComplex) -> Result<()> {
    if w.is_nonpos_int() {
        return Err(Error::Pole(format!("{w:?}")));
    }
    Ok(())
}

fn shift_count(w: &XComplex) -> i64 {
    let need = stirling_threshold(w.prec()) as f64 - w.re.to_f64();
    if need > 0.0 {
        need.ceil() as i64
    } else {
        0
    }
}

/// ln Γ(w) by Stirling for large Re(w) (no shifting).
fn lgamma_asym(w: &XComplex) -> XComplex {
    let p = w.prec();
    let c = stirling(p);
    let half = XReal::from_f64(0.5, p);
    let ln_w = w.ln();
    let ln_2pi = (XReal::pi(p) * XReal::from_i64(2, p)).ln();
    let mut s = (w - &XComplex::real(half.clone())) * &ln_w - w + XComplex::real(&ln_2pi * &half);
    let inv = w.recip();
    let inv2 = &inv * &inv;
    let mut pw = inv;
    let tiny = XReal::one(p).ldexp(-(p as i64) - 8);
    for ck in &c.lgamma {
        let t = pw.scale(ck);
        let small = t.abs() < &tiny * &s.abs();
        s = s + t;
        if small {
            break;
        }
        pw = pw * &inv2;
    }
    s
}

fn digamma_asym(w: &XComplex) -> XComplex {
    let p = w.prec();
    let c = stirling(p);
    let inv = w.recip();
    let mut s = w.ln() - inv.scale(&XReal::from_f64(0.5, p));
    let inv2 = &inv * &inv;
    let mut pw = inv2.clone();
    let tiny = XReal::one(p).ldexp(-(p as i64) - 8);
    for ck in &c.digamma {
        let t = pw.scale(ck);
        let small = t.abs() < &tiny * &s.abs().max(&XReal::one(p));
        s = s - t;
        if small {
            break;
        }
        pw = pw * &inv2;
    }
    s
}

fn rising(w: &XComplex, m: i64) -> XComplex {
    let p = w.prec();
    let mut acc = XComplex::one(p);
    for j in 0..m {
        acc = acc * (w + &XComplex::real(XReal::from_i64(j, p)));
    }
    acc
}

/// Γ(w). Reflection formula for Re(w) < 1/2.
pub fn gamma_fn(w: &XComplex) -> Result<XComplex> {
    pole_check(w)?;
    let p = w.prec();
    if w.re < XReal::from_f64(0.5, p) {
        let one = XComplex::one(p);
        let pi = XReal::pi(p);
        let s = (w.scale(&pi)).sin();
        let g = gamma_fn(&(&one - w))?;
        return Ok(XComplex::real(pi) / (s * g));
    }
    let m = shift_count(w);
    let ws = w + &XComplex::real(XReal::from_i64(m, p));
    Ok(lgamma_asym(&ws).exp() / rising(w, m))
}

/// ln Γ(w), continued from the positive axis through Σ ln(w+j)
/// (principal branches), i.e. the standard log-Gamma branch.
pub fn log_gamma(w: &XComplex) -> Result<XComplex> {
    pole_check(w)?;
    let p = w.prec();
    let m = shift_count(w);
    let mut s = lgamma_asym(&(w + &XComplex::real(XReal::from_i64(m, p))));
    for j in 0..m {
        s = s - (w + &XComplex::real(XReal::from_i64(j, p))).ln();
    }
    Ok(s)
}

/// ψ(w) = Γ'(w)/Γ(w): upward recurrence, then the asymptotic series.
pub fn digamma(w: &XComplex) -> Result<XComplex> {
    pole_check(w)?;
    let p = w.prec();
    let m = shift_count(w).max(20 - w.re.to_f64().floor() as i64).max(0);
    let mut s = digamma_asym(&(w + &XComplex::real(XReal::from_i64(m, p))));
    for j in 0..m {
        s = s - (w + &XComplex::real(XReal::from_i64(j, p))).recip();
    }
    Ok(s)
}

/// 1/Γ(w) for Re(w) >= 1 (never a pole).
fn rgamma_right(w: &XComplex) -> XComplex {
    let p = w.prec();
    let m = shift_count(w);
    let ws = w + &XComplex::real(XReal::from_i64(m, p));
    rising(w, m) * (-lgamma_asym(&ws)).exp()
}

/// Reciprocal Gamma, entire: exactly zero at 0, -1, -2, ...
pub fn rgamma(w: &XComplex) -> XComplex {
    let p = w.prec();
    let one = XReal::one(p);
    if w.re >= one {
        return rgamma_right(w);
    }
    let m = (1.0 - w.re.to_f64()).ceil().max(1.0) as i64;
    rising(w, m) * rgamma_right(&(w + &XComplex::real(XReal::from_i64(m, p))))
}

/// Functions of the Gamma family lifted to every scalar type we compute with.
pub trait Special: Analytic {
    fn rgamma(&self) -> Self;
    fn gamma(&self) -> Result<Self>;
}

impl Special for XComplex {
    fn rgamma(&self) -> Self {
        rgamma(self)
    }
    fn gamma(&self) -> Result<Self> {
        gamma_fn(self)
    }
}

impl Special for XReal {
    fn rgamma(&self) -> Self {
        rgamma(&XComplex::real(self.clone())).re
    }
    fn gamma(&self) -> Result<Self> {
        Ok(gamma_fn(&XComplex::real(self.clone()))?.re)
    }
}

impl<T: Special + Field> Special for Dual<T> {
    fn rgamma(&self) -> Self {
        // Downward from Re >= 1, where d(1/Γ) = -ψ/Γ; the product then
        // carries exact derivatives through the zeros.
        let p = self.prec();
        let re = self.v.value().re.to_f64();
        let m = if re >= 1.0 { 0 } else { (1.0 - re).ceil() as i64 };
        let shifted = self.v.clone() + &T::int_p(m, p);
        let r = shifted.rgamma();
        let psi = digamma(&shifted.value()).expect("Re >= 1 is never a pole");
        let base = Dual::new(r.clone(), -(T::from_cplx(&psi) * &r) * &self.d);
        let mut acc = base;
        for j in 0..m {
            acc = acc * &(self.clone() + &Dual::constant(T::int_p(j, p)));
        }
        acc
    }
    fn gamma(&self) -> Result<Self> {
        let g = self.v.gamma()?;
        let psi = digamma(&self.v.value())?;
        let d = g.clone() * &T::from_cplx(&psi);
        Ok(self.chain(g, d))
    }
}

/// Rising factorial (a)_n by direct product.
pub fn pochhammer<T: Field>(a: &T, n: usize) -> T {
    let p = a.prec();
    let mut acc = T::one_p(p);
    for j in 0..n {
        acc = acc * &(a.clone() + &T::int_p(j as i64, p));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: usize = 256;

    fn c(re: f64, im: f64) -> XComplex {
        XComplex::new(XReal::from_f64_dec(re, P), XReal::from_f64_dec(im, P))
    }

    fn close(a: &XComplex, b: &XComplex, bits: i64) -> bool {
        (a - b).abs() <= XReal::one(P).ldexp(-bits) * a.abs().max(&XReal::one(P))
    }

    #[test]
    fn bernoulli_small() {
        let b = bernoulli(12);
        assert_eq!(b[1], BigRational::new((-1).into(), 2.into()));
        assert_eq!(b[2], BigRational::new(1.into(), 6.into()));
        assert_eq!(b[12], BigRational::new((-691).into(), 2730.into()));
        assert!(b[11].is_zero());
    }

    #[test]
    fn gamma_integers_and_half() {
        assert!(close(&gamma_fn(&c(1.0, 0.0)).unwrap(), &c(1.0, 0.0), 240));
        assert!(close(&gamma_fn(&c(6.0, 0.0)).unwrap(), &c(120.0, 0.0), 240));
        let g = gamma_fn(&c(0.5, 0.0)).unwrap();
        let pi = XComplex::real(XReal::pi(P));
        assert!(close(&(&g * &g), &pi, 238));
    }

    #[test]
    fn poles_are_errors() {
        assert!(matches!(gamma_fn(&c(-3.0, 0.0)), Err(Error::Pole(_))));
        assert!(matches!(digamma(&c(0.0, 0.0)), Err(Error::Pole(_))));
        assert!(rgamma(&c(-3.0, 0.0)).is_zero());
    }

    #[test]
    fn rgamma_dual_at_pole() {
        // d/dw 1/Γ(w) at w = -p equals (-1)^p p!
        for (pp, expect) in [(0i64, 1.0), (1, -1.0), (2, 2.0), (3, -6.0)] {
            let w = Dual::variable(XComplex::real(XReal::from_i64(-pp, P)));
            let r = w.rgamma();
            assert!(r.v.is_zero());
            assert!(close(&r.d, &c(expect, 0.0), 236), "p={pp}: {:?}", r.d);
        }
    }

    #[test]
    fn reflection_consistency() {
        let w = c(-2.3, 0.7);
        let lhs = gamma_fn(&w).unwrap() * gamma_fn(&(c(1.0, 0.0) - &w)).unwrap();
        let pi = XComplex::real(XReal::pi(P));
        let rhs = &pi / &(w.scale(&XReal::pi(P))).sin();
        assert!(close(&lhs, &rhs, 236));
        let r = rgamma(&w) * gamma_fn(&w).unwrap();
        assert!(close(&r, &c(1.0, 0.0), 236));
    }

    #[test]
    fn digamma_one_is_minus_euler() {
        // γ to 60 digits
        let gamma_e = XReal::parse(
            "0.577215664901532860606512090082402431042159335939923598805767234884867726777664670936947063",
            P,
        )
        .unwrap();
        let d = digamma(&c(1.0, 0.0)).unwrap();
        assert!((d.re + gamma_e).abs() < XReal::one(P).ldexp(-240));
    }

    #[test]
    fn log_gamma_matches_gamma() {
        let w = c(3.7, -2.2);
        let a = log_gamma(&w).unwrap().exp();
        let b = gamma_fn(&w).unwrap();
        assert!(close(&a, &b, 236));
    }
}
