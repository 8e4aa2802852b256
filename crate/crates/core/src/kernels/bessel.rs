//! Discrete Bessel kernel and its Wronskian deformation.
//!
//! With J_x = J_x(2√α) and L_x = ∂J_x/∂x, A_{k,p}(x) is the (2k+1)-square
//! determinant with rows J_{ũ_i+p-j}, L_{ũ_i+p-j} (i = 1..k) and the last
//! row J_{x+p-j}, j = 0..2k; C_k is the 2k-square block J_{ũ_i-j}, L_{ũ_i-j}.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::handle::{Carrier, Kernel, KernelHandle, Provenance};
use crate::linalg::det;
use crate::specfun::{BesselEvaluator, BesselParams};
use crate::xprec::{Dual, PrecisionContext, XReal};

const NEAR_DIAGONAL: f64 = 1e-8;

struct BesselKernel {
    ev: BesselEvaluator,
    ut: Vec<XReal>,
    /// α^{(2k+1)/2} / C_k²
    pref: XReal,
    prov: Provenance,
}

impl BesselKernel {
    fn p(&self) -> usize {
        self.ev.params().alpha.prec()
    }

    fn entry(&self, x: &XReal) -> Result<Dual<XReal>> {
        Ok(Dual::new(self.ev.j(x)?, self.ev.l(x)?))
    }

    /// A_{k,p}(x) with its x-derivative.
    fn a(&self, shift: i64, x: &XReal) -> Result<Dual<XReal>> {
        let p = self.p();
        let w = 2 * self.ut.len() + 1;
        let mut rows: Vec<Vec<Dual<XReal>>> = Vec::with_capacity(w);
        for u in &self.ut {
            let mut jr = Vec::with_capacity(w);
            let mut lr = Vec::with_capacity(w);
            for j in 0..w as i64 {
                let t = u + &XReal::from_i64(shift - j, p);
                jr.push(Dual::constant(self.ev.j(&t)?));
                lr.push(Dual::constant(self.ev.l(&t)?));
            }
            rows.push(jr);
            rows.push(lr);
        }
        let last = (0..w as i64)
            .map(|j| self.entry(&(x + &XReal::from_i64(shift - j, p))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(last);
        Ok(det(&rows))
    }

    fn outer(&self, x: &XReal, y: &XReal) -> XReal {
        let mut o = self.pref.clone();
        for u in &self.ut {
            o = o / ((x - u) * (y - u)).abs();
        }
        o
    }
}

impl Kernel for BesselKernel {
    fn eval(&self, x: &XReal, y: &XReal) -> Result<XReal> {
        let p = self.p();
        let (x, y) = (x.with_prec(p), y.with_prec(p));
        let o = self.outer(&x, &y);
        if (&x - &y).abs().to_f64() < NEAR_DIAGONAL {
            let (a0, a1) = (self.a(0, &x)?, self.a(1, &x)?);
            return Ok(o * (a0.d * &a1.v - a0.v * &a1.d));
        }
        let (a0x, a1x) = (self.a(0, &x)?.v, self.a(1, &x)?.v);
        let (a0y, a1y) = (self.a(0, &y)?.v, self.a(1, &y)?.v);
        Ok(o * (a0x * &a1y - a0y * &a1x) / (&x - &y))
    }
    fn carrier(&self) -> Carrier {
        Carrier::Integers
    }
    fn provenance(&self) -> &Provenance {
        &self.prov
    }
}

/// K_α(x,y) = √α (J_x J_{y+1} - J_y J_{x+1})/(x - y), diagonal
/// √α (L_x J_{x+1} - J_x L_{x+1}).
pub fn discrete_bessel_kernel(alpha: &XReal, ctx: &PrecisionContext) -> Result<KernelHandle> {
    deformed_bessel_kernel(alpha, &[], ctx)
}

/// Deformed discrete Bessel kernel for deformation points ũ (non-integer, distinct).
pub fn deformed_bessel_kernel(alpha: &XReal, utilde: &[XReal], ctx: &PrecisionContext) -> Result<KernelHandle> {
    let p = ctx.bits();
    let bp = BesselParams::unit(alpha.with_prec(p))?;
    let ut: Vec<XReal> = utilde.iter().map(|u| u.with_prec(p)).collect();
    for (i, u) in ut.iter().enumerate() {
        if u.is_integer() {
            return Err(Error::InvalidParameter(format!("deformation point {} is an integer", u.to_f64())));
        }
        if ut[..i].contains(u) {
            return Err(Error::InvalidParameter(format!("repeated deformation point {}", u.to_f64())));
        }
    }
    let ev = BesselEvaluator::new(bp, ctx);
    let k = ut.len();
    let ck = if k == 0 {
        XReal::one(p)
    } else {
        let mut rows = Vec::with_capacity(2 * k);
        for u in &ut {
            let pts: Vec<XReal> = (0..2 * k as i64).map(|j| u - &XReal::from_i64(j, p)).collect();
            rows.push(pts.iter().map(|t| ev.j(t)).collect::<Result<Vec<_>>>()?);
            rows.push(pts.iter().map(|t| ev.l(t)).collect::<Result<Vec<_>>>()?);
        }
        det(&rows)
    };
    if ck.is_zero() || ck.exponent().map_or(true, |e| e < -(p as i64) / 2) {
        return Err(Error::DegenerateDeformation(format!("C_{k} = {} vanishes", ck.to_sci(6))));
    }
    let alpha = &ev.params().alpha;
    let pref = alpha.sqrt().powi(2 * k as i64 + 1) / (&ck * &ck);
    let mut prov = BTreeMap::new();
    prov.insert("kernel".into(), if k == 0 { "discrete-bessel" } else { "deformed-bessel" }.into());
    prov.insert("alpha".into(), alpha.to_sci(20));
    prov.insert("k".into(), k.to_string());
    prov.insert("utilde".into(), ut.iter().map(|u| u.to_sci(20)).collect::<Vec<_>>().join(";"));
    prov.insert("bits".into(), p.to_string());
    Ok(KernelHandle::new(BesselKernel { ev, ut, pref, prov }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{bessel_j_series, bessel_l_series};

    #[test]
    fn k0_matches_series_formula() {
        let ctx = PrecisionContext::new(192).unwrap();
        let p = ctx.bits();
        let alpha = XReal::from_f64(1.0, p);
        let k = discrete_bessel_kernel(&alpha, &ctx).unwrap();
        let j = |n: i64| bessel_j_series(&XReal::from_i64(n, p), &alpha);
        let l = |n: i64| bessel_l_series(&XReal::from_i64(n, p), &alpha);
        let off = k.eval_f64(2.0, -1.0, p).unwrap();
        let want = (j(2) * j(0) - j(-1) * j(3)) / XReal::from_i64(3, p);
        assert!((off - want).abs().to_f64() < 1e-45);
        let diag = k.eval_f64(1.0, 1.0, p).unwrap();
        let want = l(1) * j(2) - j(1) * l(2);
        assert!((diag - want).abs().to_f64() < 1e-45);
    }

    #[test]
    fn deformed_is_symmetric_with_diagonal_in_unit_interval() {
        let ctx = PrecisionContext::new(128).unwrap();
        let p = ctx.bits();
        let k = deformed_bessel_kernel(&XReal::from_f64(1.0, p), &[XReal::from_f64_dec(0.3, p)], &ctx).unwrap();
        let a = k.eval_f64(1.0, -2.0, p).unwrap();
        let b = k.eval_f64(-2.0, 1.0, p).unwrap();
        assert!((&a - &b).abs().to_f64() < 1e-30);
        for x in -3..4 {
            let d = k.eval_f64(x as f64, x as f64, p).unwrap().to_f64();
            assert!((-1e-20..=1.0 + 1e-20).contains(&d), "K({x},{x}) = {d}");
        }
    }

    #[test]
    fn integer_deformation_point_rejected() {
        let ctx = PrecisionContext::new(96).unwrap();
        let p = ctx.bits();
        assert!(deformed_bessel_kernel(&XReal::one(p), &[XReal::from_i64(2, p)], &ctx).is_err());
    }
}
