//! ψ_a functions and the Christoffel-deformed z-measure kernel.
//!
//! ψ_a(x) = √(Γ(x+z+½)Γ(x+z'+½) / (Γ(z-a+½)Γ(z'-a+½))) ξ^{(x+a)/2}
//!          (1-ξ)^{(z+z')/2-a} F̃(-z+a+½, -z'+a+½; x+a+1; ξ/(ξ-1)),
//! F̃ = ₂F₁/Γ(c) (entire in c).

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use super::{key, positive_sqrt, real_part, HalfInt, ZParams};
use crate::error::{Error, Result};
use crate::handle::{Carrier, Kernel, KernelHandle, Provenance};
use crate::linalg::det;
use crate::specfun::{hyp2f1_reg_neg, pochhammer, Special};
use crate::xprec::{Dual, PrecisionContext, XComplex, XReal};

const NEAR_DIAGONAL: f64 = 1e-8;
const MAX_CONTOUR_NODES: usize = 1 << 16;

pub(crate) fn psi_t<T: Special>(a: &XReal, x: &T, zp: &ZParams) -> Result<T> {
    let p = x.prec();
    let zp = zp.with_prec(p);
    let half = T::from_real(&XReal::one(p).ldexp(-1));
    let z = T::from_cplx(zp.z());
    let w = T::from_cplx(zp.zp());
    let at = T::from_real(&a.with_prec(p));
    let g = (x.clone() + &z + &half).gamma()?
        * &(x.clone() + &w + &half).gamma()?
        * &(z.clone() - &at + &half).rgamma()
        * &(w.clone() - &at + &half).rgamma();
    let pre = positive_sqrt(&g, "Γ(x+z+½)Γ(x+z'+½)/(Γ(z-a+½)Γ(z'-a+½))")?;
    if pre.is_zero_value() {
        return Ok(pre);
    }
    let xi = zp.xi();
    let one = XReal::one(p);
    let lxi = T::from_real(&xi.ln());
    let l1m = T::from_real(&(&one - xi).ln());
    let xa = x.clone() + &at;
    let pw = (xa.clone() * &half * &lxi).exp() * &(((z.clone() + &w) * &half - &at) * &l1m).exp();
    let wv = xi / &(xi - &one);
    let f = hyp2f1_reg_neg(
        &(at.clone() - &z + &half),
        &(at.clone() - &w + &half),
        &(xa + &T::one_p(p)),
        &wv,
    )?;
    Ok(pre * &pw * &f)
}

/// ψ_a(x; z, z', ξ) at the precision of `x`.
pub fn psi(a: HalfInt, x: &XReal, zp: &ZParams) -> Result<XComplex> {
    let p = x.prec();
    psi_t(&a.value(p), &XComplex::real(x.clone()), zp)
}

/// ∂ψ_a/∂x, exact via dual numbers (digamma terms and the c-derivative of
/// the regularized series are carried term by term).
pub fn psi_dx(a: HalfInt, x: &XReal, zp: &ZParams) -> Result<XComplex> {
    let p = x.prec();
    Ok(psi_t(&a.value(p), &Dual::variable(XComplex::real(x.clone())), zp)?.d)
}

/// φ_a(u) = ψ'_a(u) - (log ξ / 2) ψ_a(u).
pub fn phi(a: HalfInt, u: &XReal, zp: &ZParams) -> Result<XComplex> {
    let p = u.prec();
    let d = psi_t(&a.value(p), &Dual::variable(XComplex::real(u.clone())), zp)?;
    let l = zp.xi().with_prec(p).ln().ldexp(-1);
    Ok(d.d - d.v.scale(&l))
}

/// ψ_a(x) from the circular contour integral (trapezoid rule on |ω| = r,
/// node count doubled until two passes agree to tol_rel). Needs x + a ∈ ℤ.
pub fn psi_integral(
    a: HalfInt,
    x: &XReal,
    zp: &ZParams,
    radius: Option<&XReal>,
    ctx: &PrecisionContext,
) -> Result<XComplex> {
    let p = ctx.bits();
    let zp = zp.with_prec(p);
    let x = x.with_prec(p);
    let av = a.value(p);
    let n = (&x + &av)
        .round_i64()
        .filter(|_| (&x + &av).is_integer())
        .ok_or_else(|| Error::InvalidParameter("contour route needs x + a integer".into()))?;
    let one = XReal::one(p);
    let r = radius.map_or_else(|| one.clone(), |r| r.with_prec(p));
    let sx = zp.xi().sqrt();
    if r <= sx || &r * &sx >= one {
        return Err(Error::InvalidParameter(format!(
            "radius {} outside (√ξ, 1/√ξ)",
            r.to_f64()
        )));
    }
    let half = one.ldexp(-1);
    let (z, w) = (zp.z(), zp.zp());
    let ah = XComplex::real(&av - &half);
    let e1 = ah.clone() - w; // -z' + a - 1/2
    let e2 = z.clone() - &ah - &XComplex::one(p); // z - a - 1/2
    let onec = XComplex::one(p);
    let f = |theta: &XReal| -> XComplex {
        let om = XComplex::new(&r * &theta.cos(), &r * &theta.sin());
        let t1 = (onec.clone() - &om.scale(&sx)).ln();
        let t2 = (onec.clone() - &om.recip().scale(&sx)).ln();
        (e1.clone() * &t1 + &(e2.clone() * &t2)).exp() * &om.powi(-n)
    };
    let two_pi = XReal::pi(p).ldexp(1);
    let mut m = ctx.quad_nodes.max(16).next_power_of_two();
    let mut sum = XComplex::zero(p);
    for j in 0..m {
        sum = sum + &f(&(&two_pi * &XReal::from_i64(j as i64, p) / &XReal::from_i64(m as i64, p)));
    }
    let mut prev = sum.scale(&XReal::from_i64(m as i64, p).recip());
    let tol = ctx.tol_rel();
    loop {
        if 2 * m > MAX_CONTOUR_NODES {
            return Err(Error::Quadrature(format!("contour integral unconverged at {m} nodes")));
        }
        let m2 = 2 * m;
        for j in (1..m2).step_by(2) {
            sum = sum + &f(&(&two_pi * &XReal::from_i64(j as i64, p) / &XReal::from_i64(m2 as i64, p)));
        }
        m = m2;
        let cur = sum.scale(&XReal::from_i64(m as i64, p).recip());
        let diff = (cur.clone() - &prev).abs();
        prev = cur;
        if diff <= &tol * &prev.abs() {
            break;
        }
    }
    let g = |c: XComplex| c.gamma();
    let gx = g(XComplex::real(&x + &half) + z)? * &g(XComplex::real(&x + &half) + w)?;
    let ga = g(z.clone() - &ah)? * &g(w.clone() - &ah)?;
    let root = positive_sqrt(&(gx / &ga), "contour prefactor")?;
    let pre = root * &g(w.clone() - &ah)? / &g(XComplex::real(&x + &half) + w)?;
    let ex = (w.clone() - z + &onec).scale(&half);
    let decay = (ex * &XComplex::real((&one - zp.xi()).ln())).exp();
    Ok(pre * &decay * &prev)
}

struct ZMeasKernel {
    zp: ZParams,
    us: Vec<XReal>,
    /// ψ_a(u_i), ψ'_a(u_i) for a = 1/2 - m, m = 0..=2k+1
    urows: Vec<Vec<Dual<XComplex>>>,
    /// C_{z,z',k} / D_k²
    pref: XComplex,
    out_bits: usize,
    cache: Mutex<HashMap<String, Arc<[Dual<XComplex>; 2]>>>,
    prov: Provenance,
}

impl ZMeasKernel {
    fn p(&self) -> usize {
        self.zp.xi().prec()
    }

    fn w(&self) -> usize {
        2 * self.us.len() + 1
    }

    /// Column index of a = -1/2 + shift - j in `urows`.
    fn col(shift: usize, j: usize) -> usize {
        1 - shift + j
    }

    /// (B_{k,0}(t), B_{k,1}(t)) with t-derivatives.
    fn bdets(&self, t: &XReal) -> Result<Arc<[Dual<XComplex>; 2]>> {
        let kx = key(t);
        if let Some(v) = self.cache.lock().expect("kernel cache").get(&kx) {
            return Ok(v.clone());
        }
        let p = self.p();
        let w = self.w();
        let tv = Dual::variable(XComplex::real(t.clone()));
        let last: Vec<Dual<XComplex>> = (0..=w)
            .map(|m| {
                let a = HalfInt::from_floor(-(m as i64)).value(p);
                let d = psi_t(&a, &tv, &self.zp)?;
                Ok(d)
            })
            .collect::<Result<_>>()?;
        let b = |shift: usize| -> Dual<XComplex> {
            let mut rows: Vec<Vec<Dual<XComplex>>> = self
                .urows
                .iter()
                .map(|r| (0..w).map(|j| r[Self::col(shift, j)].clone()).collect())
                .collect();
            rows.push((0..w).map(|j| last[Self::col(shift, j)].clone()).collect());
            det(&rows)
        };
        let v = Arc::new([b(0), b(1)]);
        self.cache.lock().expect("kernel cache").insert(kx, v.clone());
        Ok(v)
    }

    fn outer(&self, x: &XReal, y: &XReal) -> XReal {
        let mut o = XReal::one(self.p());
        for u in &self.us {
            o = o / ((x - u) * (y - u)).abs();
        }
        o
    }
}

impl Kernel for ZMeasKernel {
    fn eval(&self, x: &XReal, y: &XReal) -> Result<XReal> {
        let p = self.p();
        let (x, y) = (x.with_prec(p), y.with_prec(p));
        let o = self.outer(&x, &y);
        let (val, scale) = if (&x - &y).abs().to_f64() < NEAR_DIAGONAL {
            let b = self.bdets(&x)?;
            let (t1, t2) = (b[0].d.clone() * &b[1].v, b[0].v.clone() * &b[1].d);
            let s = t1.abs() + t2.abs();
            (t1 - t2, s)
        } else {
            let (bx, by) = (self.bdets(&x)?, self.bdets(&y)?);
            let dxy = XComplex::real(&x - &y);
            let (t1, t2) = (bx[0].v.clone() * &by[1].v, by[0].v.clone() * &bx[1].v);
            let s = (t1.abs() + t2.abs()) / (&x - &y).abs();
            ((t1 - t2) / &dxy, s)
        };
        let k = (val * &self.pref).scale(&o);
        let scale = scale * self.pref.abs() * &o;
        Ok(real_part(&k, &scale, "z-measure kernel")?.with_prec(self.out_bits))
    }
    fn carrier(&self) -> Carrier {
        Carrier::HalfIntegers
    }
    fn provenance(&self) -> &Provenance {
        &self.prov
    }
}

/// Extra working bits for the ψ determinants.
const GUARD_BITS: usize = 64;

/// K^k_{z,z',ξ} on ℤ' for deformation points u_i ∉ ℤ'.
///
/// K = C/∏|(x-u_i)(y-u_i)| · (B_{k,0}(x)B_{k,1}(y) - B_{k,0}(y)B_{k,1}(x)) / (D_k²(x-y)),
/// C = (√ξ/(1-ξ))^{2k+1} √((z)_{2k+1}(z')_{2k+1}).
pub fn zmeas_deformed_kernel(zp: &ZParams, u: &[XReal], ctx: &PrecisionContext) -> Result<KernelHandle> {
    let p = ctx.bits() + GUARD_BITS;
    let zp = zp.with_prec(p);
    let us: Vec<XReal> = u.iter().map(|v| v.with_prec(p)).collect();
    let half = XReal::one(p).ldexp(-1);
    for (i, v) in us.iter().enumerate() {
        if (v - &half).is_integer() {
            return Err(Error::InvalidParameter(format!("deformation point {} lies on Z'", v.to_f64())));
        }
        if us[..i].contains(v) {
            return Err(Error::InvalidParameter(format!("repeated deformation point {}", v.to_f64())));
        }
    }
    let k = us.len();
    let w = 2 * k + 1;
    let mut urows: Vec<Vec<Dual<XComplex>>> = Vec::with_capacity(2 * k);
    for v in &us {
        let tv = Dual::variable(XComplex::real(v.clone()));
        let vals = (0..=w)
            .map(|m| psi_t(&HalfInt::from_floor(-(m as i64)).value(p), &tv, &zp))
            .collect::<Result<Vec<_>>>()?;
        urows.push(vals.iter().map(|d| Dual::constant(d.v.clone())).collect());
        urows.push(vals.iter().map(|d| Dual::constant(d.d.clone())).collect());
    }
    // D_k: columns a = -1/2 - j, j < 2k
    let dk = if k == 0 {
        XComplex::one(p)
    } else {
        let rows: Vec<Vec<XComplex>> = urows
            .iter()
            .map(|r| (0..2 * k).map(|j| r[ZMeasKernel::col(0, j)].v.clone()).collect())
            .collect();
        det(&rows)
    };
    let scale = urows
        .iter()
        .flat_map(|r| r.iter().map(|e| e.v.abs()))
        .fold(XReal::one(p), |m, a| m.max(&a));
    if dk.is_zero() || dk.abs() < scale.powi(2 * k as i64).ldexp(-(ctx.bits() as i64) / 2) {
        return Err(Error::DegenerateDeformation(format!("D_{k} = {dk} vanishes")));
    }
    let one = XReal::one(p);
    let xi = zp.xi().clone();
    let zz = pochhammer(zp.z(), w) * &pochhammer(zp.zp(), w);
    let root = positive_sqrt(&zz, "(z)_{2k+1}(z')_{2k+1}")?;
    let c = root.scale(&(xi.sqrt() / (&one - &xi)).powi(w as i64));
    let pref = c / &(dk.clone() * &dk);
    let mut prov = BTreeMap::new();
    prov.insert("kernel".into(), "deformed-zmeasure".into());
    prov.insert("params".into(), zp.describe());
    prov.insert("k".into(), k.to_string());
    prov.insert("u".into(), us.iter().map(|v| v.to_sci(20)).collect::<Vec<_>>().join(";"));
    prov.insert("bits".into(), ctx.bits().to_string());
    Ok(KernelHandle::new(ZMeasKernel {
        zp,
        us,
        urows,
        pref,
        out_bits: ctx.bits(),
        cache: Mutex::new(HashMap::new()),
        prov,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xprec::rel_diff;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(192).unwrap()
    }

    #[test]
    fn symmetric_in_z_zprime() {
        let p = 192;
        let zp = ZParams::principal(0.3, 0.4, 0.5, p).unwrap();
        let x = XReal::from_f64(1.5, p);
        let a = HalfInt::from_f64(-0.5).unwrap();
        let v = psi(a, &x, &zp).unwrap();
        let s = psi(a, &x, &zp.swapped()).unwrap();
        assert!((v.clone() - &s).abs().to_f64() < 1e-50);
        assert!(v.im.abs().to_f64() < 1e-50);
    }

    #[test]
    fn contour_route_agrees() {
        let c = ctx();
        let p = c.bits();
        let zp = ZParams::real(0.2, 0.6, 0.4, p).unwrap();
        let a = HalfInt::from_f64(-0.5).unwrap();
        let x = XReal::from_f64(0.5, p);
        let s = psi(a, &x, &zp).unwrap();
        let i = psi_integral(a, &x, &zp, None, &c).unwrap();
        assert!(rel_diff(&s, &i, &XReal::one(p)).to_f64() < 1e-40, "{s} vs {i}");
        let want = XReal::parse("0.58322713960741711975667122243308238214608323476449841902611748530826581193", p).unwrap();
        assert!((s.re - want).abs().to_f64() < 1e-50);
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let p = 192;
        let zp = ZParams::real(0.2, 0.6, 0.4, p).unwrap();
        let a = HalfInt::from_f64(-0.5).unwrap();
        let x = XReal::from_f64(0.7, p);
        let h = XReal::one(p).ldexp(-40);
        let d = psi_dx(a, &x, &zp).unwrap();
        let fd = (psi(a, &(&x + &h), &zp).unwrap() - &psi(a, &(&x - &h), &zp).unwrap()).scale(&h.ldexp(1).recip());
        assert!((d - &fd).abs().to_f64() < 1e-20);
    }

    #[test]
    fn k0_kernel_is_symmetric() {
        let c = ctx();
        let zp = ZParams::principal(0.3, 0.4, 0.5, c.bits()).unwrap();
        let k = zmeas_deformed_kernel(&zp, &[], &c).unwrap();
        let a = k.eval_f64(0.5, -1.5, c.bits()).unwrap();
        let b = k.eval_f64(-1.5, 0.5, c.bits()).unwrap();
        assert!((a - b).abs().to_f64() < 1e-40);
        let d = k.eval_f64(0.5, 0.5, c.bits()).unwrap().to_f64();
        assert!(d > 0.0 && d < 1.0);
    }
}
