//! Real-order Bessel functions J_x(2√α) and their order derivatives
//! L_x(2√α) = ∂J_x/∂x, from the contour pair
//!
//! J_x(2√α) = (1/2π) ∫_{-π}^{π} e^{√α(e^{-iθ}/r - r e^{iθ})} (r e^{iθ})^x dθ
//!          - (sin πx/π) ∫_0^r e^{√α(s - 1/s)} s^{x-1} ds.
//!
//! With s = e^{-t} the second integral runs over t ∈ [-ln r, ∞) and its
//! integrand decays like e^{-√α e^t}. The θ-integrand is periodic only for
//! integer x; there the trapezoid rule is used, Gauss–Legendre otherwise.
//!
//! L_x is the x-derivative of the same pair; the last term is
//! -cos(πx) ∫_0^r e^{√α(s-1/s)} s^{x-1} ds (the derivative of sin(πx)/π).

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::specfun::gamma::Special;
use crate::specfun::quad::{gl_adaptive, MAX_NODES};
use crate::xprec::{Dual, PrecisionContext, XComplex, XReal};

#[derive(Clone, Debug)]
pub struct BesselParams {
    pub alpha: XReal,
    pub r: XReal,
}

impl BesselParams {
    pub fn new(alpha: XReal, r: XReal) -> Result<Self> {
        if !alpha.is_positive() || !r.is_positive() {
            return Err(Error::InvalidParameter(format!(
                "need alpha > 0 and r > 0, got alpha = {}, r = {}",
                alpha.to_f64(),
                r.to_f64()
            )));
        }
        Ok(Self { alpha, r })
    }

    /// The contour r = 1.
    pub fn unit(alpha: XReal) -> Result<Self> {
        let p = alpha.prec();
        Self::new(alpha, XReal::one(p))
    }
}

/// sin(πx), exactly zero at integers.
fn sin_pi(x: &XReal) -> XReal {
    if x.is_integer() {
        return XReal::zero(x.prec());
    }
    (x * &XReal::pi(x.prec())).sin()
}

fn cos_pi(x: &XReal) -> XReal {
    let p = x.prec();
    if x.is_integer() {
        let n = x.round_i64().unwrap_or(0);
        return XReal::from_i64(if n % 2 == 0 { 1 } else { -1 }, p);
    }
    (x * &XReal::pi(p)).cos()
}

/// Trapezoid node table for integer orders: q_j and ω_j = e^{iθ_j}.
struct TrapTable {
    q: Vec<XComplex>,
    w: Vec<XComplex>,
}

/// Evaluator for one (α, r) pair, caching J and L by exact order.
pub struct BesselEvaluator {
    bp: BesselParams,
    ctx: PrecisionContext,
    sqa: XReal,
    traps: Mutex<HashMap<usize, Arc<TrapTable>>>,
    j_cache: Mutex<HashMap<String, XReal>>,
    l_cache: Mutex<HashMap<String, XReal>>,
}

fn key(x: &XReal) -> String {
    x.to_sci(x.prec() / 3 + 8)
}

impl BesselEvaluator {
    pub fn new(bp: BesselParams, ctx: &PrecisionContext) -> Self {
        let p = ctx.bits();
        let bp = BesselParams {
            alpha: bp.alpha.with_prec(p),
            r: bp.r.with_prec(p),
        };
        let sqa = bp.alpha.sqrt();
        Self {
            bp,
            ctx: ctx.clone(),
            sqa,
            traps: Mutex::new(HashMap::new()),
            j_cache: Mutex::new(HashMap::new()),
            l_cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn params(&self) -> &BesselParams {
        &self.bp
    }

    fn p(&self) -> usize {
        self.ctx.bits()
    }

    fn trap_table(&self, m: usize) -> Arc<TrapTable> {
        if let Some(t) = self.traps.lock().expect("trap cache").get(&m) {
            return t.clone();
        }
        let p = self.p();
        let r = &self.bp.r;
        let ir = r.recip();
        let a_re = &self.sqa * &(&ir - r);
        let a_im = &self.sqa * &(&ir + r);
        let two_pi = XReal::pi(p).ldexp(1);
        let mut q = Vec::with_capacity(m);
        let mut w = Vec::with_capacity(m);
        for j in 0..m {
            let th = &two_pi * XReal::from_i64(j as i64, p) / XReal::from_i64(m as i64, p);
            let (s, c) = (th.sin(), th.cos());
            q.push(XComplex::new(&a_re * &c, -(&a_im * &s)).exp());
            w.push(XComplex::new(c, s));
        }
        let t = Arc::new(TrapTable { q, w });
        self.traps.lock().expect("trap cache").insert(m, t.clone());
        t
    }

    fn trap_sum(&self, n: i64, m: usize) -> XReal {
        let t = self.trap_table(m);
        let p = self.p();
        let mut acc = XReal::zero(p);
        for (q, w) in t.q.iter().zip(&t.w) {
            acc = acc + (q * &w.powi(n)).re;
        }
        acc / XReal::from_i64(m as i64, p) * self.bp.r.powi(n)
    }

    /// J_n for integer n by the trapezoid rule with node doubling.
    fn j_integer(&self, n: i64) -> Result<XReal> {
        let p = self.p();
        let tol = self.ctx.tol_rel();
        let one = XReal::one(p);
        // the rule is exact for trigonometric degree < m, so start above |n|
        let mut m = self.ctx.quad_nodes.max(2 * n.unsigned_abs() as usize + 8).next_power_of_two();
        let mut prev = self.trap_sum(n, m);
        while m < MAX_NODES {
            m *= 2;
            let cur = self.trap_sum(n, m);
            if (&cur - &prev).abs() <= &tol * &cur.abs().max(&one) {
                return Ok(cur);
            }
            prev = cur;
        }
        Err(Error::Quadrature(format!("trapezoid J_{n} did not converge")))
    }

    /// Exponent h(t) = √α(e^{-t} - e^t) - x t and the truncation point T.
    fn s_range(&self, x: &XReal) -> (XReal, XReal, XReal) {
        let p = self.p();
        let sa = self.sqa.to_f64();
        let xf = x.to_f64();
        let t0 = -self.bp.r.to_f64().ln();
        let h = |t: f64| sa * ((-t).exp() - t.exp()) - xf * t;
        // h is concave; its maximum on [t0, ∞) bounds the integrand
        let mut hmax = h(t0);
        let mut t = t0;
        while t < t0 + 200.0 {
            t += 0.01;
            let v = h(t);
            if v > hmax {
                hmax = v;
            } else if v < hmax - ((p + 40) as f64) * std::f64::consts::LN_2 - 5.0 {
                break;
            }
        }
        let scale = XReal::from_f64(hmax.max(-1e6), p).exp();
        (-self.bp.r.ln(), XReal::from_f64(t, p), scale)
    }

    /// ∫ e^{h(t)} dt and ∫ t e^{h(t)} dt over [-ln r, T].
    fn s_integrals(&self, x: &XReal) -> Result<(XReal, XReal)> {
        let (t0, t1, scale) = self.s_range(x);
        let sqa = self.sqa.clone();
        let f = |t: &XReal| {
            let e = t.exp();
            let v = (&sqa * &(e.recip() - &e) - x * t).exp();
            vec![v.clone(), v * t]
        };
        let v = gl_adaptive(&f, &t0, &t1, self.ctx.quad_nodes, 2, &self.ctx.tol_rel(), &scale)?;
        Ok((v[0].clone(), v[1].clone()))
    }

    /// (1/π)∫_0^π e^{A} cos B and (1/π)∫_0^π e^{A}(ln r cos B - θ sin B).
    fn theta_integrals(&self, x: &XReal, want_l: bool) -> Result<(XReal, XReal)> {
        let p = self.p();
        let r = &self.bp.r;
        let ir = r.recip();
        let a_re = &self.sqa * &(&ir - r);
        let a_im = &self.sqa * &(&ir + r);
        let lnr = r.ln();
        let xlnr = x * &lnr;
        let f = |th: &XReal| {
            let a = (&a_re * &th.cos() + &xlnr).exp();
            let b = x * th - &a_im * &th.sin();
            let (sb, cb) = (b.sin(), b.cos());
            let j = &a * &cb;
            if want_l {
                let l = a * (&lnr * &cb - th * &sb);
                vec![j, l]
            } else {
                vec![j]
            }
        };
        let pi = XReal::pi(p);
        let scale = (a_re.abs() + &xlnr).exp();
        let width = if want_l { 2 } else { 1 };
        let v = gl_adaptive(&f, &XReal::zero(p), &pi, self.ctx.quad_nodes, width, &self.ctx.tol_rel(), &scale)?;
        let j = &v[0] / &pi;
        let l = if want_l { &v[1] / &pi } else { XReal::zero(p) };
        Ok((j, l))
    }

    fn compute_j(&self, x: &XReal) -> Result<XReal> {
        if x.is_integer() {
            return self.j_integer(x.round_i64().expect("integer order fits i64"));
        }
        let (th, _) = self.theta_integrals(x, false)?;
        let (s0, _) = self.s_integrals(x)?;
        let pi = XReal::pi(self.p());
        Ok(th - sin_pi(x) / &pi * s0)
    }

    fn compute_l(&self, x: &XReal) -> Result<XReal> {
        let (_, th) = self.theta_integrals(x, true)?;
        let (s0, s1) = self.s_integrals(x)?;
        let pi = XReal::pi(self.p());
        Ok(th + sin_pi(x) / &pi * s1 - cos_pi(x) * s0)
    }

    pub fn j(&self, x: &XReal) -> Result<XReal> {
        let x = x.with_prec(self.p());
        let k = key(&x);
        if let Some(v) = self.j_cache.lock().expect("J cache").get(&k) {
            return Ok(v.clone());
        }
        let v = self.compute_j(&x)?;
        self.j_cache.lock().expect("J cache").insert(k, v.clone());
        Ok(v)
    }

    pub fn l(&self, x: &XReal) -> Result<XReal> {
        let x = x.with_prec(self.p());
        let k = key(&x);
        if let Some(v) = self.l_cache.lock().expect("L cache").get(&k) {
            return Ok(v.clone());
        }
        let v = self.compute_l(&x)?;
        self.l_cache.lock().expect("L cache").insert(k, v.clone());
        Ok(v)
    }

    pub fn j_int(&self, n: i64) -> Result<XReal> {
        self.j(&XReal::from_i64(n, self.p()))
    }

    pub fn l_int(&self, n: i64) -> Result<XReal> {
        self.l(&XReal::from_i64(n, self.p()))
    }
}

/// J_x(2√α) from the contour integrals.
pub fn bessel_j(x: &XReal, bp: &BesselParams, ctx: &PrecisionContext) -> Result<XReal> {
    BesselEvaluator::new(bp.clone(), ctx).j(x)
}

/// L_x(2√α) = ∂J_x(2√α)/∂x from the contour integrals.
pub fn bessel_l(x: &XReal, bp: &BesselParams, ctx: &PrecisionContext) -> Result<XReal> {
    BesselEvaluator::new(bp.clone(), ctx).l(x)
}

/// Ascending series Σ (-1)^m α^{m+x/2} / (m! Γ(m+x+1)), generic so a dual
/// order yields L.
fn ascending<T: Special>(x: &T, alpha: &XReal) -> T {
    let p = x.prec();
    let one = T::one_p(p);
    let lna = T::from_real(&alpha.ln());
    let half = T::from_real(&XReal::one(p).ldexp(-1));
    let mut pw = (x.clone() * &half * &lna).exp();
    let neg_a = T::from_real(&-alpha);
    let eps = XReal::one(p).ldexp(-(p as i64) - 8);
    let mut sum = T::zero_p(p);
    let mut quiet = 0;
    let mut rg: Option<T> = None;
    let mut m = 0i64;
    loop {
        let arg = x.clone() + &T::int_p(m + 1, p);
        let r = match &rg {
            Some(prev) if arg.value().re.to_f64() > 1.5 => prev.clone() / &(arg.clone() - &one),
            _ => arg.rgamma(),
        };
        let t = pw.clone() * &r;
        sum = sum + &t;
        rg = Some(r);
        m += 1;
        pw = pw * &neg_a / &T::int_p(m, p);
        if m > 4 && (t.modulus() <= &eps * &sum.modulus() || t.is_zero_value() && sum.is_zero_value()) {
            quiet += 1;
            if quiet >= 3 {
                return sum;
            }
        } else {
            quiet = 0;
        }
    }
}

/// Oracle: J_x(2√α) by its ascending series (extra guard bits).
pub fn bessel_j_series(x: &XReal, alpha: &XReal) -> XReal {
    let p = x.prec();
    let g = p + 32 + (4.0 * alpha.to_f64().sqrt() / std::f64::consts::LN_2) as usize;
    ascending(&x.with_prec(g), &alpha.with_prec(g)).with_prec(p)
}

/// Oracle: L_x(2√α), the order derivative of the ascending series.
pub fn bessel_l_series(x: &XReal, alpha: &XReal) -> XReal {
    let p = x.prec();
    let g = p + 32 + (4.0 * alpha.to_f64().sqrt() / std::f64::consts::LN_2) as usize;
    ascending(&Dual::variable(x.with_prec(g)), &alpha.with_prec(g)).d.with_prec(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(256).unwrap()
    }

    #[test]
    fn j0_series_and_quadrature() {
        let c = ctx();
        let a = c.real(1.0);
        let bp = BesselParams::unit(a.clone()).unwrap();
        let q = bessel_j(&c.real(0.0), &bp, &c).unwrap();
        let s = bessel_j_series(&c.real(0.0), &a);
        assert!((q - s).abs() < c.real(1e-70));
    }

    #[test]
    fn non_integer_order_matches_series() {
        let c = ctx();
        for (x, al) in [(0.3, 1.0), (-2.7, 0.5), (2.5, 4.0)] {
            let a = c.real(al);
            let bp = BesselParams::unit(a.clone()).unwrap();
            let ev = BesselEvaluator::new(bp, &c);
            let xx = c.real(x);
            let dj = (ev.j(&xx).unwrap() - bessel_j_series(&xx, &a)).abs();
            let dl = (ev.l(&xx).unwrap() - bessel_l_series(&xx, &a)).abs();
            assert!(dj < c.real(1e-60), "J x={x}: {}", dj.to_f64());
            assert!(dl < c.real(1e-60), "L x={x}: {}", dl.to_f64());
        }
    }

    #[test]
    fn integer_l_matches_series() {
        let c = ctx();
        let a = c.real(1.0);
        let ev = BesselEvaluator::new(BesselParams::unit(a.clone()).unwrap(), &c);
        for n in [-3i64, 0, 2] {
            let x = c.int(n);
            let d = (ev.l(&x).unwrap() - bessel_l_series(&x, &a)).abs();
            assert!(d < c.real(1e-60), "n={n}: {}", d.to_f64());
        }
    }

    #[test]
    fn other_radius_agrees() {
        let c = ctx();
        let a = c.real(0.5);
        let x = c.real(1.7);
        let j1 = bessel_j(&x, &BesselParams::unit(a.clone()).unwrap(), &c).unwrap();
        let j2 = bessel_j(&x, &BesselParams::new(a.clone(), c.real(1.5)).unwrap(), &c).unwrap();
        assert!((&j1 - &j2).abs() < c.real(1e-60), "{}", (&j1 - &j2).to_f64());
    }

    #[test]
    fn rejects_bad_params() {
        let c = ctx();
        assert!(BesselParams::new(c.real(-1.0), c.real(1.0)).is_err());
        assert!(BesselParams::new(c.real(1.0), c.real(0.0)).is_err());
    }
}
