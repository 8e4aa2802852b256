//! The ξ → 1 side: f, g, h, the asymptotic checks of ψ and φ, and the
//! (deformed) Gamma kernel.
//!
//! Writing ε = 1-ξ and E = ε^{(z'-z)/2}, the connection formula gives the
//! exact split
//!
//!   ψ_a(t) = ε^{1/2} [E P_{z,z'}(t,a;ε) + E^{-1} P_{z',z}(t,a;ε)],
//!   P_{z,z'}(t,a;ε) = h_{z',z}(t,a) ξ^{(t-a-1)/2+z} F(a-z+½, -t-z+½; 1+z'-z; -ε/ξ),
//!
//! so every B- and D-determinant of the deformed z-measure kernel is a
//! finite Laurent polynomial in E with power series coefficients in ε. For
//! order k the kernel equals √((z)_{2k+1}(z')_{2k+1}) N/(ε^{2k} D²) up to
//! the outer factor, and the limit keeps [E⁰ε^{2k}]N / ([E⁰ε⁰]D)².

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use super::series::{edet, tmul, ESeries};
use super::zmeasure::psi;
use super::{key, positive_sqrt, real_part, HalfInt, Series, ZParams};
use crate::error::{Error, Result};
use crate::handle::{Carrier, Kernel, KernelHandle, Provenance};
use crate::specfun::{pochhammer, Special};
use crate::xprec::{Dual, Field, PrecisionContext, XComplex, XReal};

const NEAR_DIAGONAL: f64 = 1e-8;
const GUARD_BITS: usize = 32;

fn half(p: usize) -> XReal {
    XReal::one(p).ldexp(-1)
}

/// h_{z,z'}(u,a) = Γ(z'-z)/(f_{z,z'}(u) g_{z,z'}(a)).
fn h_t<T: Special>(u: &T, a: &XReal, z: &XComplex, zp: &XComplex) -> Result<T> {
    let p = u.prec();
    let hf = T::from_real(&half(p));
    let (zt, zpt) = (T::from_cplx(z), T::from_cplx(zp));
    let at = T::from_real(a);
    let gz = (u.clone() + &zt + &hf).gamma()?;
    let gzp = (u.clone() + &zpt + &hf).gamma()?;
    let inv_f = positive_sqrt(&(gz * &gzp), "Γ(u+z+½)Γ(u+z'+½)")? * &(u.clone() + &zpt + &hf).rgamma();
    let ra = (zt.clone() - &at + &hf).rgamma() * &(zpt.clone() - &at + &hf).rgamma();
    let inv_g = positive_sqrt(&ra, "1/(Γ(z-a+½)Γ(z'-a+½))")? * &(at - &zt + &hf).rgamma();
    Ok((zpt - &zt).gamma()? * &inv_f * &inv_g)
}

fn non_degenerate(zp: &ZParams) -> Result<()> {
    if zp.series() == Series::Degenerate {
        return Err(Error::InvalidParameter("h, f, g need principal or complementary parameters".into()));
    }
    Ok(())
}

/// f_{z,z'}(x) = Γ(x+z'+½)/√(Γ(x+z+½)Γ(x+z'+½)).
pub fn f_fn(x: &XReal, zp: &ZParams) -> Result<XComplex> {
    let p = x.prec();
    let zp = zp.with_prec(p);
    let xc = XComplex::real(x + &half(p));
    let gz = (xc.clone() + zp.z()).gamma()?;
    let gzp = (xc.clone() + zp.zp()).gamma()?;
    Ok(positive_sqrt(&(gz * &gzp), "Γ(x+z+½)Γ(x+z'+½)")? * &(xc + zp.z()).rgamma())
}

/// g_{z,z'}(a) = √(Γ(z-a+½)Γ(z'-a+½)) Γ(-z+a+½).
pub fn g_fn(a: HalfInt, zp: &ZParams, p: usize) -> Result<XComplex> {
    let zp = zp.with_prec(p);
    let ah = XComplex::real(a.value(p) - half(p));
    let g = (zp.z().clone() - &ah).gamma()? * &(zp.zp().clone() - &ah).gamma()?;
    Ok(positive_sqrt(&g, "Γ(z-a+½)Γ(z'-a+½)")? * &(ah - zp.z()).gamma()?)
}

/// h_{z,z'}(u,a); pass `zp.swapped()` for h_{z',z}.
pub fn h_fn(u: &XReal, a: HalfInt, zp: &ZParams) -> Result<XComplex> {
    non_degenerate(zp)?;
    let p = u.prec();
    let zp = zp.with_prec(p);
    h_t(&XComplex::real(u.clone()), &a.value(p), zp.z(), zp.zp())
}

/// ∂h_{z,z'}(u,a)/∂u.
pub fn h_dx(u: &XReal, a: HalfInt, zp: &ZParams) -> Result<XComplex> {
    non_degenerate(zp)?;
    let p = u.prec();
    let zp = zp.with_prec(p);
    Ok(h_t(&Dual::variable(XComplex::real(u.clone())), &a.value(p), zp.z(), zp.zp())?.d)
}

fn four_h_raw(x: &XReal, y: &XReal, a: &XReal, b: &XReal, z: &XComplex, zp: &XComplex) -> Result<XComplex> {
    let (xc, yc) = (XComplex::real(x.clone()), XComplex::real(y.clone()));
    let h = |t: &XComplex, c: &XReal, s: bool| if s { h_t(t, c, zp, z) } else { h_t(t, c, z, zp) };
    Ok(h(&xc, a, false)? * &h(&yc, b, true)? + &(h(&xc, a, true)? * &h(&yc, b, false)?)
        - &(h(&xc, b, false)? * &h(&yc, a, true)?)
        - &(h(&xc, b, true)? * &h(&yc, a, false)?))
}

/// Ψ(x,y;a,b) = h_{z,z'}(x,a)h_{z',z}(y,b) + h_{z',z}(x,a)h_{z,z'}(y,b) - (a ↔ b).
pub fn four_h(x: &XReal, y: &XReal, a: HalfInt, b: HalfInt, zp: &ZParams) -> Result<XComplex> {
    non_degenerate(zp)?;
    let p = x.prec();
    let zp = zp.with_prec(p);
    four_h_raw(x, &y.with_prec(p), &a.value(p), &b.value(p), zp.z(), zp.zp())
}

/// The same combination written with Gamma functions only.
pub fn four_h_gamma_only(x: &XReal, y: &XReal, a: HalfInt, b: HalfInt, zp: &ZParams) -> Result<XComplex> {
    non_degenerate(zp)?;
    let p = x.prec();
    let zp = zp.with_prec(p);
    let (z, w) = (zp.z().clone(), zp.zp().clone());
    let hf = XComplex::real(half(p));
    let g = |c: XComplex| c.gamma();
    let (xh, yh) = (XComplex::real(x + &half(p)), XComplex::real(y.with_prec(p) + half(p)));
    let (ah, bh) = (XComplex::real(a.value(p)), XComplex::real(b.value(p)));
    let gxz = g(xh.clone() + &z)?;
    let gxw = g(xh + &w)?;
    let gyz = g(yh.clone() + &z)?;
    let gyw = g(yh + &w)?;
    let num = gxz.clone() * &gxw * &gyz * &gyw;
    let den = g(z.clone() - &ah + &hf)? * &g(w.clone() - &ah + &hf)? * &g(z.clone() - &bh + &hf)? * &g(w.clone() - &bh + &hf)?;
    let root = positive_sqrt(&(num / &den), "Gamma-only prefactor")?;
    let r = |c: XComplex| c.rgamma();
    let (raz, raw) = (r(ah.clone() - &z + &hf), r(ah - &w + &hf));
    let (rbz, rbw) = (r(bh.clone() - &z + &hf), r(bh - &w + &hf));
    let (rxz, rxw, ryz, ryw) = (gxz.recip(), gxw.recip(), gyz.recip(), gyw.recip());
    let brace = raz.clone() * &rbw * &rxw * &ryz + &(raw.clone() * &rbz * &rxz * &ryw)
        - &(raw * &rbz * &rxw * &ryz)
        - &(raz * &rbw * &rxz * &ryw);
    Ok(g(z.clone() - &w)? * &g(w - &z)? * &root * &brace)
}

/// Residuals of the ξ → 1 asymptotics of ψ_a(u) and φ_a(u).
#[derive(Clone, Debug)]
pub struct AsymptoticRow {
    pub xi: XReal,
    /// |(1-ξ)^{-1/2} ψ_a(u) - h_{z',z}(u,a) E - h_{z,z'}(u,a) E^{-1}|
    pub resid_psi: XReal,
    /// the same for φ_a with h' in place of h
    pub resid_phi: XReal,
}

/// ε^{(z'-z)/2}
fn e_power(eps: &XReal, zp: &ZParams) -> XComplex {
    let d = (zp.zp().clone() - zp.z()).scale(&half(eps.prec()));
    (d * &XComplex::real(eps.ln())).exp()
}

pub fn psi_asymptotic_check(a: HalfInt, u: &XReal, zp: &ZParams, xis: &[XReal]) -> Result<Vec<AsymptoticRow>> {
    non_degenerate(zp)?;
    let p = u.prec();
    let sw = zp.swapped();
    let (h1, h2) = (h_fn(u, a, &sw)?, h_fn(u, a, zp)?);
    let (d1, d2) = (h_dx(u, a, &sw)?, h_dx(u, a, zp)?);
    xis.iter()
        .map(|xi| {
            let xi = xi.with_prec(p);
            let zx = zp.with_xi(xi.clone())?.with_prec(p);
            let eps = XReal::one(p) - &xi;
            let e = e_power(&eps, &zx);
            let ie = e.recip();
            let s = eps.sqrt().recip();
            let ps = psi(a, u, &zx)?.scale(&s);
            let ph = super::zmeasure::phi(a, u, &zx)?.scale(&s);
            Ok(AsymptoticRow {
                resid_psi: (ps - &(h1.clone() * &e) - &(h2.clone() * &ie)).abs(),
                resid_phi: (ph - &(d1.clone() * &e) - &(d2.clone() * &ie)).abs(),
                xi,
            })
        })
        .collect()
}

/// (1-ξ)^{-1}(ψ_a(x)ψ_b(y) - ψ_a(y)ψ_b(x)) against Ψ(x,y;a,b).
#[derive(Clone, Debug)]
pub struct PsiPairRow {
    pub xi: XReal,
    pub value: XComplex,
    pub limit: XComplex,
    pub resid: XReal,
}

pub fn psi_pair_check(
    a: HalfInt,
    b: HalfInt,
    x: &XReal,
    y: &XReal,
    zp: &ZParams,
    xis: &[XReal],
) -> Result<Vec<PsiPairRow>> {
    let p = x.prec();
    let limit = four_h(x, y, a, b, zp)?;
    xis.iter()
        .map(|xi| {
            let xi = xi.with_prec(p);
            let zx = zp.with_xi(xi.clone())?.with_prec(p);
            let eps = XReal::one(p) - &xi;
            let v = (psi(a, x, &zx)? * &psi(b, y, &zx)? - &(psi(a, y, &zx)? * &psi(b, x, &zx)?)).scale(&eps.recip());
            let resid = (v.clone() - &limit).abs();
            Ok(PsiPairRow { xi, value: v, limit: limit.clone(), resid })
        })
        .collect()
}

/// Parameters of the deformed Gamma kernel (order one).
#[derive(Clone, Debug)]
pub struct GammaDeformParams {
    zparams: ZParams,
    u: XReal,
}

impl GammaDeformParams {
    pub fn new(zparams: ZParams, u: XReal) -> Result<Self> {
        non_degenerate(&zparams)?;
        if (&u - &half(u.prec())).is_integer() {
            return Err(Error::InvalidParameter(format!("u = {} lies on Z'", u.to_f64())));
        }
        Ok(Self { zparams, u })
    }
    pub fn zparams(&self) -> &ZParams {
        &self.zparams
    }
    pub fn u(&self) -> &XReal {
        &self.u
    }
    pub fn swapped(&self) -> Self {
        Self {
            zparams: self.zparams.swapped(),
            u: self.u.clone(),
        }
    }
}

type DC = Dual<XComplex>;

/// ε-Taylor coefficients (length m) of P_{z,zp}(t,a;ε).
fn p_series(t: &DC, a: &XReal, z: &XComplex, zp: &XComplex, m: usize) -> Result<Vec<DC>> {
    let p = t.prec();
    let c = |w: &XComplex| DC::from_cplx(w);
    let r = |x: &XReal| DC::from_real(x);
    let hf = r(&half(p));
    let one = DC::one_p(p);
    let hh = h_t(t, a, zp, z)?;
    let s = (t.clone() - &r(a) - &one) * &hf + &c(z);
    let mut pw = vec![one.clone()];
    for n in 1..m {
        let nn = DC::int_p(n as i64, p);
        let prev = pw[n - 1].clone();
        pw.push(prev * &(nn.clone() - &one - &s) / &nn);
    }
    // w = -ε/(1-ε)
    let mut wser = vec![DC::zero_p(p)];
    wser.extend((1..m).map(|_| -one.clone()));
    let big_a = r(a) - &c(z) + &hf;
    let big_b = -t.clone() - &c(z) + &hf;
    let big_c = one.clone() + &c(zp) - &c(z);
    let mut f: Vec<DC> = (0..m).map(|_| DC::zero_p(p)).collect();
    let mut wp: Vec<DC> = (0..m).map(|i| if i == 0 { one.clone() } else { DC::zero_p(p) }).collect();
    let mut coef = one.clone();
    for j in 0..m {
        if j > 0 {
            let jj = DC::int_p(j as i64, p);
            let j1 = DC::int_p(j as i64 - 1, p);
            coef = coef * &(big_a.clone() + &j1) * &(big_b.clone() + &j1) / &((big_c.clone() + &j1) * &jj);
            wp = tmul(&wp, &wser, m);
        }
        for (fi, wi) in f.iter_mut().zip(&wp) {
            *fi = fi.clone() + &(coef.clone() * wi);
        }
    }
    Ok(tmul(&pw, &f, m).into_iter().map(|v| v * &hh).collect())
}

fn entry(t: &DC, a: &XReal, z: &XComplex, zp: &XComplex, m: usize) -> Result<ESeries<DC>> {
    let p = t.prec();
    Ok(ESeries::from_terms(
        m,
        p,
        [(1, p_series(t, a, z, zp, m)?), (-1, p_series(t, a, zp, z, m)?)],
    ))
}

struct GammaKernel {
    z: XComplex,
    zp: XComplex,
    us: Vec<XReal>,
    m: usize,
    /// per deformation point: value and derivative rows over a = 1/2 - j, j = 0..=2k+1
    urows: Vec<Vec<ESeries<DC>>>,
    /// √((z)_{2k+1}(z')_{2k+1}) / ([E⁰ε⁰]D)²
    pref: XComplex,
    out_bits: usize,
    cache: Mutex<HashMap<String, Arc<[ESeries<DC>; 2]>>>,
    prov: Provenance,
}

fn col(shift: usize, j: usize) -> usize {
    1 - shift + j
}

impl GammaKernel {
    fn p(&self) -> usize {
        self.pref.prec()
    }

    fn w(&self) -> usize {
        2 * self.us.len() + 1
    }

    fn bdets(&self, t: &XReal) -> Result<Arc<[ESeries<DC>; 2]>> {
        let kx = key(t);
        if let Some(v) = self.cache.lock().expect("kernel cache").get(&kx) {
            return Ok(v.clone());
        }
        let p = self.p();
        let w = self.w();
        let tv = Dual::variable(XComplex::real(t.clone()));
        let last = (0..=w)
            .map(|j| entry(&tv, &HalfInt::from_floor(-(j as i64)).value(p), &self.z, &self.zp, self.m))
            .collect::<Result<Vec<_>>>()?;
        let b = |shift: usize| {
            let mut rows: Vec<Vec<ESeries<DC>>> = self
                .urows
                .iter()
                .map(|r| (0..w).map(|j| r[col(shift, j)].clone()).collect())
                .collect();
            rows.push((0..w).map(|j| last[col(shift, j)].clone()).collect());
            edet(&rows, self.m, p)
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

    /// Numerator expansion N (or its diagonal Wronskian form).
    fn numerator(&self, x: &XReal, y: &XReal) -> Result<ESeries<XComplex>> {
        let v = |s: &ESeries<DC>| s.map(|d| d.v.clone());
        let d = |s: &ESeries<DC>| s.map(|d| d.d.clone());
        if (x - y).abs().to_f64() < NEAR_DIAGONAL {
            let b = self.bdets(x)?;
            return Ok(d(&b[0]).mul(&v(&b[1])).sub(&v(&b[0]).mul(&d(&b[1]))));
        }
        let (bx, by) = (self.bdets(x)?, self.bdets(y)?);
        let n = v(&bx[0]).mul(&v(&by[1])).sub(&v(&by[0]).mul(&v(&bx[1])));
        let dxy = XComplex::real(x - y).recip();
        Ok(n.map(|c| c.clone() * &dxy))
    }
}

impl Kernel for GammaKernel {
    fn eval(&self, x: &XReal, y: &XReal) -> Result<XReal> {
        let p = self.p();
        let (x, y) = (x.with_prec(p), y.with_prec(p));
        let n = self.numerator(&x, &y)?;
        let order = 2 * self.us.len();
        let val = n.coeff(0, order) * &self.pref;
        let o = self.outer(&x, &y);
        let scale = val.abs().max(&XReal::one(p).ldexp(-(p as i64) / 4)) * &o;
        let k = val.scale(&o);
        Ok(real_part(&k, &scale, "Gamma kernel")?.with_prec(self.out_bits))
    }
    fn carrier(&self) -> Carrier {
        Carrier::HalfIntegers
    }
    fn provenance(&self) -> &Provenance {
        &self.prov
    }
}

fn build(zp: &ZParams, us: &[XReal], ctx: &PrecisionContext) -> Result<GammaKernel> {
    non_degenerate(zp)?;
    let p = ctx.bits() + GUARD_BITS;
    let zp = zp.with_prec(p);
    let us: Vec<XReal> = us.iter().map(|u| u.with_prec(p)).collect();
    let (z, w) = (zp.z().clone(), zp.zp().clone());
    let k = us.len();
    let m = 2 * k + 2;
    let mut urows = Vec::with_capacity(2 * k);
    for u in &us {
        let tv = Dual::variable(XComplex::real(u.clone()));
        let ents = (0..=2 * k + 1)
            .map(|j| entry(&tv, &HalfInt::from_floor(-(j as i64)).value(p), &z, &w, m))
            .collect::<Result<Vec<_>>>()?;
        urows.push(ents.iter().map(|e| e.map(|d| Dual::constant(d.v.clone()))).collect());
        urows.push(ents.iter().map(|e| e.map(|d| Dual::constant(d.d.clone()))).collect());
    }
    let drows: Vec<Vec<ESeries<XComplex>>> = urows
        .iter()
        .map(|r: &Vec<ESeries<DC>>| (0..2 * k).map(|j| r[col(0, j)].map(|d| d.v.clone())).collect())
        .collect();
    let dlead = edet(&drows, m, p).coeff(0, 0);
    if dlead.abs().exponent().map_or(true, |e| e < -(ctx.bits() as i64) / 2) {
        return Err(Error::DegenerateDeformation(format!("leading D coefficient {dlead} vanishes")));
    }
    let zz = pochhammer(&z, 2 * k + 1) * &pochhammer(&w, 2 * k + 1);
    let pref = positive_sqrt(&zz, "(z)_{2k+1}(z')_{2k+1}")? / &(dlead.clone() * &dlead);
    let mut prov = BTreeMap::new();
    prov.insert("kernel".into(), if k == 0 { "gamma" } else { "deformed-gamma" }.into());
    prov.insert("z".into(), z.to_string());
    prov.insert("zp".into(), w.to_string());
    prov.insert("series".into(), zp.series().name().into());
    prov.insert("u".into(), us.iter().map(|u| u.to_sci(20)).collect::<Vec<_>>().join(";"));
    prov.insert("route".into(), "limit-of-cofactors".into());
    prov.insert("bits".into(), ctx.bits().to_string());
    Ok(GammaKernel {
        z,
        zp: w,
        us,
        m,
        urows,
        pref,
        out_bits: ctx.bits(),
        cache: Mutex::new(HashMap::new()),
        prov,
    })
}

/// The undeformed Gamma kernel: ξ → 1 limit of the z-measure kernel.
pub fn gamma_kernel(zp: &ZParams, ctx: &PrecisionContext) -> Result<KernelHandle> {
    Ok(KernelHandle::new(build(zp, &[], ctx)?))
}

/// Limit of K¹_{z,z',ξ} as ξ → 1, from the expansion of the B and D
/// cofactors.
pub fn gamma_deformed_kernel(gp: &GammaDeformParams, ctx: &PrecisionContext) -> Result<KernelHandle> {
    Ok(KernelHandle::new(build(&gp.zparams, std::slice::from_ref(&gp.u), ctx)?))
}

/// h and h' at u for both orderings: (h_{z,z'}, h'_{z,z'}, h_{z',z}, h'_{z',z}).
fn h_both(u: &XReal, a: &XReal, z: &XComplex, w: &XComplex) -> Result<[XComplex; 4]> {
    let uv = Dual::variable(XComplex::real(u.clone()));
    let h1 = h_t(&uv, a, z, w)?;
    let h2 = h_t(&uv, a, w, z)?;
    Ok([h1.v, h1.d, h2.v, h2.d])
}

/// Cofactor pair h_{z,z'}(u,α)h'_{z',z}(u,β) + h_{z',z}(u,α)h'_{z,z'}(u,β) - (α ↔ β).
fn fpair(u: &XReal, al: &XReal, be: &XReal, z: &XComplex, w: &XComplex) -> Result<XComplex> {
    let [ha, da, hsa, dsa] = h_both(u, al, z, w)?;
    let [hb, db, hsb, dsb] = h_both(u, be, z, w)?;
    Ok(ha * &dsb + &(hsa * &db) - &(hb * &dsa) - &(hsb * &da))
}

fn distinct(x: &XReal, y: &XReal) -> Result<()> {
    if x == y {
        return Err(Error::InvalidParameter("comparison formulas are stated for x ≠ y".into()));
    }
    Ok(())
}

/// Deformed Gamma kernel with 𝒜 assembled from the leading four-h terms:
/// 𝒜 = Σ cof0_i cof1_j Ψ(x,y;c0_i,c1_j), D = Φ(u;-½,-3/2),
/// value √((z)_3(z')_3)/|(x-u)(y-u)| · 𝒜/(D²(x-y)). Compared with
/// (1-ξ)² K¹.
pub fn gamma_kernel_four_h(gp: &GammaDeformParams, x: &XReal, y: &XReal) -> Result<XComplex> {
    distinct(x, y)?;
    let p = x.prec();
    let zp = gp.zparams.with_prec(p);
    let (z, w) = (zp.z(), zp.zp());
    let u = gp.u.with_prec(p);
    let y = y.with_prec(p);
    let hv = |c: i64| XReal::from_i64(c, p).ldexp(-1);
    let c0 = [hv(-1), hv(-3), hv(-5)];
    let c1 = [hv(1), hv(-1), hv(-3)];
    let cof = |cols: &[XReal; 3], i: usize| -> Result<XComplex> {
        let rem: Vec<&XReal> = cols.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, c)| c).collect();
        let f = fpair(&u, rem[0], rem[1], z, w)?;
        Ok(if i % 2 == 1 { -f } else { f })
    };
    let mut acc = XComplex::zero(p);
    for i in 0..3 {
        for j in 0..3 {
            let t = cof(&c0, i)? * &cof(&c1, j)? * &four_h_raw(x, &y, &c0[i], &c1[j], z, w)?;
            acc = acc + &t;
        }
    }
    let d = fpair(&u, &c0[0], &c0[1], z, w)?;
    let c = positive_sqrt(&(pochhammer(z, 3) * &pochhammer(w, 3)), "(z)_3(z')_3")?;
    let o = ((x - &u) * (&y - &u)).abs();
    Ok(c * &acc / &(d.clone() * &d * &XComplex::real((x - &y) * o)))
}

/// The closed form taken literally (index maps a, b, the
/// mixed ∓½ shifts in Φ and 𝒞 = (z+3)(z+2)(z+1)(z'+2)(z'+1)z').
pub fn gamma_kernel_literal(gp: &GammaDeformParams, x: &XReal, y: &XReal) -> Result<XComplex> {
    distinct(x, y)?;
    let p = x.prec();
    let zp = gp.zparams.with_prec(p);
    let (z, w) = (zp.z(), zp.zp());
    let u = gp.u.with_prec(p);
    let y = y.with_prec(p);
    let hh = XReal::one(p).ldexp(-1);
    let sh = |s: i64, plus: bool| if plus { &hh + &XReal::from_i64(s, p) } else { XReal::from_i64(s, p) - &hh };
    let phi = |al: i64, be: i64| -> Result<XComplex> {
        let [h_a, d_a, hs_a, ds_a] = h_both(&u, &sh(al, false), z, w)?;
        let [_, _, _, ds_bm] = h_both(&u, &sh(be, false), z, w)?;
        let [h_bm, _, _, _] = h_both(&u, &sh(be, false), z, w)?;
        let [_, d_bp, hs_bp, _] = h_both(&u, &sh(be, true), z, w)?;
        // h_{z,z'}(u,-½+α)h'_{z',z}(u,-½+β) + h_{z',z}(u,-½+α)h'_{z,z'}(u,½+β)
        // - h_{z,z'}(u,-½+β)h'_{z',z}(u,-½+α) - h_{z',z}(u,½+β)h'_{z,z'}(u,-½+α)
        Ok(h_a * &ds_bm + &(hs_a * &d_bp) - &(h_bm * &ds_a) - &(hs_bp * &d_a))
    };
    let ia = [-1i64, 0, 0];
    let ib = [-2i64, -2, -1];
    let mut acc = XComplex::zero(p);
    for i in 0..3 {
        for j in 0..3 {
            let psi_ij = four_h_raw(x, &y, &sh(i as i64, false), &sh(j as i64, true), z, w)?;
            acc = acc + &(phi(ia[i], ib[i])? * &phi(ia[j] + 1, ib[j] + 1)? * &psi_ij);
        }
    }
    let one = XComplex::one(p);
    let int = |n: i64| XComplex::real(XReal::from_i64(n, p));
    let c = (z.clone() + &int(3)) * &(z.clone() + &int(2)) * &(z.clone() + &one) * &(w.clone() + &int(2)) * &(w.clone() + &one) * w;
    let d = phi(0, -1)?;
    let o = ((x - &u) * (&y - &u)).abs();
    Ok(c * &acc / &(d.clone() * &d * &XComplex::real((x - &y) * o)))
}

/// Side-by-side values of the three Gamma-kernel constructions at (x,y),
/// with the largest coefficient of N that has to vanish for the limit to
/// exist (E^{±2} terms and E⁰ terms below order ε²).
#[derive(Clone, Debug)]
pub struct GammaLimitReport {
    pub limit: XReal,
    pub four_h_route: XComplex,
    pub literal: XComplex,
    pub max_divergent_coeff: XReal,
}

pub fn gamma_limit_report(gp: &GammaDeformParams, x: &XReal, y: &XReal, ctx: &PrecisionContext) -> Result<GammaLimitReport> {
    let gk = build(&gp.zparams, std::slice::from_ref(&gp.u), ctx)?;
    let p = gk.p();
    let (xp, yp) = (x.with_prec(p), y.with_prec(p));
    let n = gk.numerator(&xp, &yp)?;
    let mut worst = XReal::zero(p);
    for e in n.exponents().copied().collect::<Vec<_>>() {
        for order in 0..2 {
            if e != 0 || order < 2 {
                worst = worst.max(&n.coeff(e, order).abs());
            }
        }
        if e != 0 {
            worst = worst.max(&n.coeff(e, 2).abs());
        }
    }
    let q = ctx.bits();
    Ok(GammaLimitReport {
        limit: gk.eval(&xp, &yp)?,
        four_h_route: gamma_kernel_four_h(gp, &x.with_prec(q), &y.with_prec(q))?,
        literal: gamma_kernel_literal(gp, &x.with_prec(q), &y.with_prec(q))?,
        max_divergent_coeff: (worst * gk.pref.abs()).with_prec(q),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(192).unwrap()
    }

    fn hi(v: f64) -> HalfInt {
        HalfInt::from_f64(v).unwrap()
    }

    #[test]
    fn f_turns_into_reciprocal_under_swap() {
        let p = 192;
        let zp = ZParams::principal(0.3, 0.4, 0.5, p).unwrap();
        let x = XReal::from_f64(1.5, p);
        let prod = f_fn(&x, &zp).unwrap() * &f_fn(&x, &zp.swapped()).unwrap();
        assert!((prod - &XComplex::one(p)).abs().to_f64() < 1e-50);
    }

    #[test]
    fn h_factorizes() {
        let p = 192;
        let zp = ZParams::real(0.2, 0.6, 0.5, p).unwrap();
        let (x, y) = (XReal::from_f64(0.5, p), XReal::from_f64(-2.5, p));
        let (a, b) = (hi(-0.5), hi(1.5));
        let l = h_fn(&x, a, &zp).unwrap() * &h_fn(&y, b, &zp).unwrap();
        let r = h_fn(&x, b, &zp).unwrap() * &h_fn(&y, a, &zp).unwrap();
        assert!((l.clone() - &r).abs() <= l.abs().ldexp(-150));
    }

    #[test]
    fn remark_matches_h_products() {
        let p = 192;
        for zp in [ZParams::principal(0.3, 0.4, 0.5, p).unwrap(), ZParams::real(0.2, 0.6, 0.5, p).unwrap()] {
            let (x, y) = (XReal::from_f64(0.5, p), XReal::from_f64(-1.5, p));
            let a = four_h(&x, &y, hi(-0.5), hi(0.5), &zp).unwrap();
            let b = four_h_gamma_only(&x, &y, hi(-0.5), hi(0.5), &zp).unwrap();
            assert!((a.clone() - &b).abs() <= a.abs().ldexp(-150), "{a} vs {b}");
        }
    }

    #[test]
    fn deformed_gamma_reference_value() {
        let c = ctx();
        let p = c.bits();
        let gp = GammaDeformParams::new(ZParams::principal(0.3, 0.4, 0.5, p).unwrap(), XReal::from_f64_dec(0.3, p)).unwrap();
        let k = gamma_deformed_kernel(&gp, &c).unwrap();
        let v = k.eval_f64(0.5, -0.5, p).unwrap().to_f64();
        assert!((v - 0.0101066).abs() < 1e-6, "{v}");
        let s = gamma_deformed_kernel(&gp.swapped(), &c).unwrap().eval_f64(0.5, -0.5, p).unwrap().to_f64();
        assert!((v - s).abs() < 1e-30);
    }

    #[test]
    fn four_h_route_vanishes() {
        let p = 192;
        let gp = GammaDeformParams::new(ZParams::real(0.2, 0.6, 0.5, p).unwrap(), XReal::from_f64_dec(0.3, p)).unwrap();
        let v = gamma_kernel_four_h(&gp, &XReal::from_f64(0.5, p), &XReal::from_f64(-0.5, p)).unwrap();
        assert!(v.abs().to_f64() < 1e-40, "{v}");
    }
}
