//! Christoffel deformations ω^k(x) = Π_i (x - u_i)² ω(x) of a discrete
//! weight and the kernels of the corresponding orthogonal polynomial
//! ensembles.
//!
//! With P_m the (non-monic) family of `orthopoly`, δ_n^k is the 2k×2k
//! determinant with rows P_m(u_i), P'_m(u_i), m = n..n+2k-1, and D_n^k(x)
//! borders it with the column m = n+2k and the last row P_m(x). Then
//!
//! p_n^k(x) = D_n^k(x) / (Π(x-u_i)² δ_n^k c_{n+2k}),
//! h_n^k   = h_n δ_{n+1}^k / (δ_n^k c_{n+2k} c_n).

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::handle::{Carrier, Kernel, KernelHandle, Provenance};
use crate::linalg::{det, solve};
use crate::orthopoly::{PolyFamilyMeta, WeightFamily};
use crate::xprec::{PrecisionContext, XReal};

/// Order-k deformation points u_1..u_k.
#[derive(Clone, Debug)]
pub struct DeformationSpec {
    points: Vec<XReal>,
}

impl DeformationSpec {
    /// Points must be pairwise distinct and off the support ℕ.
    pub fn new(points: Vec<XReal>) -> Result<Self> {
        for (i, u) in points.iter().enumerate() {
            if u.is_integer() && !u.is_negative() {
                return Err(Error::InvalidParameter(format!(
                    "deformation point {} lies on the support",
                    u.to_f64()
                )));
            }
            if points[..i].iter().any(|v| v == u) {
                return Err(Error::InvalidParameter(format!("repeated deformation point {}", u.to_f64())));
            }
        }
        Ok(Self { points })
    }

    pub fn none() -> Self {
        Self { points: Vec::new() }
    }

    pub fn k(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[XReal] {
        &self.points
    }

    fn with_prec(&self, p: usize) -> Self {
        Self {
            points: self.points.iter().map(|u| u.with_prec(p)).collect(),
        }
    }

    /// Π_i (x - u_i)².
    pub fn factor(&self, x: &XReal) -> XReal {
        self.points
            .iter()
            .fold(XReal::one(x.prec()), |acc, u| {
                let d = x - u;
                acc * &d * &d
            })
    }

    /// Π_i |x - u_i|.
    pub fn abs_factor(&self, x: &XReal) -> XReal {
        self.points
            .iter()
            .fold(XReal::one(x.prec()), |acc, u| acc * (x - u).abs())
    }
}

/// ω^k(x) = Π(x - u_i)² ω(x).
pub fn deformed_weight(fam: &WeightFamily, d: &DeformationSpec, x: u64) -> XReal {
    let p = fam.prec();
    d.factor(&XReal::from_i64(x as i64, p)) * fam.weight_at(x)
}

/// Rows P_m(u_i) (first k) and P'_m(u_i) (next k), m = lo..hi.
fn u_rows(fam: &WeightFamily, d: &DeformationSpec, lo: usize, hi: usize) -> Vec<Vec<XReal>> {
    let evals: Vec<Vec<(XReal, XReal)>> = d.points.iter().map(|u| fam.joint_eval(lo..hi, u)).collect();
    let mut rows: Vec<Vec<XReal>> = evals.iter().map(|e| e.iter().map(|(v, _)| v.clone()).collect()).collect();
    rows.extend(evals.iter().map(|e| e.iter().map(|(_, dv)| dv.clone()).collect::<Vec<_>>()));
    rows
}

fn sub_cols(rows: &[Vec<XReal>], from: usize, len: usize) -> Vec<Vec<XReal>> {
    rows.iter().map(|r| r[from..from + len].to_vec()).collect()
}

fn guard_det(m: &[Vec<XReal>], what: &str) -> Result<XReal> {
    let p = m.first().map(|r| r[0].prec()).unwrap_or(64);
    let v = det(m);
    let scale = m.iter().fold(XReal::one(p), |acc, r| {
        acc * r.iter().fold(XReal::zero(p), |mx, e| mx.max(&e.abs()))
    });
    if v.abs() <= scale * XReal::one(p).ldexp(16 - p as i64) {
        return Err(Error::DegenerateDeformation(format!("{what} vanishes to working precision")));
    }
    Ok(v)
}

/// δ_n^k.
pub fn delta_det(fam: &WeightFamily, d: &DeformationSpec, n: usize) -> Result<XReal> {
    let k = d.k();
    if k == 0 {
        return Ok(XReal::one(fam.prec()));
    }
    let rows = u_rows(fam, d, n, n + 2 * k);
    guard_det(&rows, &format!("delta_{n}^{k}"))
}

fn bordered(rows: &[Vec<XReal>], last: Vec<XReal>) -> Vec<Vec<XReal>> {
    let mut m = rows.to_vec();
    m.push(last);
    m
}

/// D_n^k(x).
pub fn big_d_det(fam: &WeightFamily, d: &DeformationSpec, n: usize, x: &XReal) -> Result<XReal> {
    let k = d.k();
    let rows = u_rows(fam, d, n, n + 2 * k + 1);
    let last = fam.joint_eval(n..n + 2 * k + 1, x).into_iter().map(|(v, _)| v).collect();
    Ok(det(&bordered(&rows, last)))
}

/// d/dx D_n^k(x): the last row replaced by derivatives.
pub fn big_d_det_dx(fam: &WeightFamily, d: &DeformationSpec, n: usize, x: &XReal) -> Result<XReal> {
    let k = d.k();
    let rows = u_rows(fam, d, n, n + 2 * k + 1);
    let last = fam.joint_eval(n..n + 2 * k + 1, x).into_iter().map(|(_, dv)| dv).collect();
    Ok(det(&bordered(&rows, last)))
}

/// Monomial coefficients (ascending) of the degree-(len-1) interpolant.
fn interpolate(xs: &[XReal], ys: &[XReal]) -> Vec<XReal> {
    let n = xs.len();
    let p = xs[0].prec();
    // Newton divided differences, then expand.
    let mut dd = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut coef = vec![XReal::zero(p); n];
    for i in (0..n).rev() {
        // coef = coef * (x - xs[i]) + dd[i]
        let mut next = vec![XReal::zero(p); n];
        for j in 0..n {
            if j + 1 < n {
                next[j + 1] = &next[j + 1] + &coef[j];
            }
            next[j] = &next[j] - &(&coef[j] * &xs[i]);
        }
        next[0] = &next[0] + &dd[i];
        coef = next;
    }
    coef
}

/// Divide an ascending-coefficient polynomial by (x - u); returns the
/// quotient and the remainder.
fn divide_linear(c: &[XReal], u: &XReal) -> (Vec<XReal>, XReal) {
    let n = c.len();
    let mut q = vec![XReal::zero(u.prec()); n - 1];
    let mut acc = c[n - 1].clone();
    for i in (0..n - 1).rev() {
        q[i] = acc.clone();
        acc = &c[i] + &(&acc * u);
    }
    (q, acc)
}

fn horner(c: &[XReal], x: &XReal) -> XReal {
    c.iter().rev().fold(XReal::zero(x.prec()), |acc, ci| acc * x + ci)
}

/// Coefficients (ascending) of the monic p_n^k, by interpolating D_n^k at
/// n+2k+1 integer nodes and dividing out Π(x - u_i)² exactly.
pub fn deformed_monic_coeffs(fam: &WeightFamily, d: &DeformationSpec, n: usize) -> Result<Vec<XReal>> {
    let p = fam.prec();
    let k = d.k();
    let deg = n + 2 * k;
    let wp = p + 64 + 4 * deg;
    let famw = fam.with_prec(wp);
    let dw = d.with_prec(wp);
    let delta = delta_det(&famw, &dw, n)?;
    let xs: Vec<XReal> = (0..=deg).map(|i| XReal::from_i64(i as i64, wp)).collect();
    let ys: Vec<XReal> = xs
        .iter()
        .map(|x| big_d_det(&famw, &dw, n, x))
        .collect::<Result<_>>()?;
    let mut c = interpolate(&xs, &ys);
    let scale = c.iter().fold(XReal::zero(wp), |m, v| m.max(&v.abs()));
    for u in dw.points() {
        for _ in 0..2 {
            let (q, r) = divide_linear(&c, u);
            if r.abs() > &scale * &XReal::one(wp).ldexp(-(p as i64) / 2) {
                return Err(Error::DegenerateDeformation(format!(
                    "D_{n}^{k} not divisible by (x - {})^2",
                    u.to_f64()
                )));
            }
            c = q;
        }
    }
    let norm = delta * famw.leading_coeff(deg);
    Ok(c.into_iter().map(|v| (v / &norm).with_prec(p)).collect())
}

/// p_n^k(x); the removable singularities at u_i go through the
/// interpolation route.
pub fn deformed_monic(fam: &WeightFamily, d: &DeformationSpec, n: usize, x: &XReal) -> Result<XReal> {
    let k = d.k();
    let f = d.factor(x);
    if f.is_zero() {
        let c = deformed_monic_coeffs(fam, d, n)?;
        return Ok(horner(&c, x));
    }
    let delta = delta_det(fam, d, n)?;
    let dd = big_d_det(fam, d, n, x)?;
    Ok(dd / (f * delta * fam.leading_coeff(n + 2 * k)))
}

/// h_n^k = h_n δ_{n+1} / (δ_n c_{n+2k} c_n).
pub fn deformed_norm(fam: &WeightFamily, d: &DeformationSpec, n: usize, meta: &PolyFamilyMeta) -> Result<XReal> {
    let k = d.k();
    if meta.h.len() <= n || meta.c.len() <= n + 2 * k {
        return Err(Error::InvalidParameter(format!("family metadata too short for n = {n}, k = {k}")));
    }
    let d0 = delta_det(fam, d, n)?;
    let d1 = delta_det(fam, d, n + 1)?;
    Ok(&meta.h[n] * &d1 / (d0 * &meta.c[n + 2 * k] * &meta.c[n]))
}

/// Family, number of points and deformation.
#[derive(Clone, Debug)]
pub struct EnsembleSpec {
    pub family: WeightFamily,
    pub n: usize,
    pub deform: DeformationSpec,
}

impl EnsembleSpec {
    pub fn new(family: WeightFamily, n: usize, deform: DeformationSpec) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("ensemble needs N >= 1".into()));
        }
        Ok(Self { family, n, deform })
    }

    /// Truncation point X of the support for sums of kernel entries.
    pub fn support_cutoff(&self, bits: usize) -> u64 {
        self.family.support_cutoff(self.n + 2 * self.deform.k(), bits)
    }

    fn provenance(&self, kind: &str) -> Provenance {
        let mut m = BTreeMap::new();
        m.insert("kernel".into(), kind.into());
        m.insert("family".into(), self.family.name().into());
        match &self.family {
            WeightFamily::Charlier { a } => {
                m.insert("a".into(), a.to_sci(20));
            }
            WeightFamily::Meixner { beta, xi } => {
                m.insert("beta".into(), beta.to_sci(20));
                m.insert("xi".into(), xi.to_sci(20));
            }
        }
        m.insert("N".into(), self.n.to_string());
        m.insert("k".into(), self.deform.k().to_string());
        let us: Vec<String> = self.deform.points().iter().map(|u| u.to_sci(20)).collect();
        m.insert("u".into(), us.join(";"));
        m
    }
}

/// Below this |x - y| a real-argument probe uses the diagonal formula.
const NEAR_DIAGONAL: f64 = 1e-8;

struct ChristoffelKernel {
    fam: WeightFamily,
    d: DeformationSpec,
    n: usize,
    /// u-rows over columns N-1 ..= N+2k
    rows: Vec<Vec<XReal>>,
    /// c_{N-1} / (δ_N² c_{N+2k} h_{N-1})
    pref: XReal,
    cache: Mutex<HashMap<String, Arc<Vec<(XReal, XReal)>>>>,
    prov: Provenance,
}

impl ChristoffelKernel {
    fn build(spec: &EnsembleSpec, ctx: &PrecisionContext, kind: &str) -> Result<Self> {
        let p = ctx.bits();
        let fam = spec.family.with_prec(p);
        let d = spec.deform.with_prec(p);
        let (n, k) = (spec.n, d.k());
        let meta = fam.meta(n, ctx);
        let rows = u_rows(&fam, &d, n - 1, n + 2 * k + 1);
        let delta_n = if k == 0 {
            XReal::one(p)
        } else {
            guard_det(&sub_cols(&rows, 1, 2 * k), &format!("delta_{n}^{k}"))?
        };
        if k > 0 {
            guard_det(&sub_cols(&rows, 0, 2 * k), &format!("delta_{}^{k}", n - 1))?;
        }
        let pref = &meta.c[n - 1] / (&delta_n * &delta_n * fam.leading_coeff(n + 2 * k) * &meta.h[n - 1]);
        Ok(Self {
            prov: spec.provenance(kind),
            fam,
            d,
            n,
            rows,
            pref,
            cache: Mutex::new(HashMap::new()),
        })
    }

    fn values(&self, x: &XReal) -> Arc<Vec<(XReal, XReal)>> {
        let key = x.to_sci(x.prec() / 3 + 8);
        if let Some(v) = self.cache.lock().expect("kernel cache").get(&key) {
            return v.clone();
        }
        let k = self.d.k();
        let v = Arc::new(self.fam.joint_eval(self.n - 1..self.n + 2 * k + 1, x));
        self.cache.lock().expect("kernel cache").insert(key, v.clone());
        v
    }

    /// (D_{N-1}(x), D_N(x), D'_{N-1}(x), D'_N(x)).
    fn dets(&self, x: &XReal, deriv: bool) -> [XReal; 4] {
        let k = self.d.k();
        let v = self.values(x);
        let w = 2 * k + 1;
        let d = |from: usize, pick: fn(&(XReal, XReal)) -> XReal| {
            let last = v[from..from + w].iter().map(pick).collect();
            det(&bordered(&sub_cols(&self.rows, from, w), last))
        };
        let val = |e: &(XReal, XReal)| e.0.clone();
        let der = |e: &(XReal, XReal)| e.1.clone();
        let p = x.prec();
        let (a, b) = (d(0, val), d(1, val));
        let (c, e) = if deriv { (d(0, der), d(1, der)) } else { (XReal::zero(p), XReal::zero(p)) };
        [a, b, c, e]
    }
}

impl Kernel for ChristoffelKernel {
    fn eval(&self, x: &XReal, y: &XReal) -> Result<XReal> {
        let p = self.pref.prec();
        let (x, y) = (x.with_prec(p), y.with_prec(p));
        let wx = self.fam.weight_real(&x)?;
        let wy = self.fam.weight_real(&y)?;
        let outer = (wx * wy).sqrt() / (self.d.abs_factor(&x) * self.d.abs_factor(&y)) * &self.pref;
        if (&x - &y).abs().to_f64() < NEAR_DIAGONAL {
            let [dm, dn, dm1, dn1] = self.dets(&x, true);
            return Ok(outer * (dn1 * dm - dn * dm1));
        }
        let [xm, xn, _, _] = self.dets(&x, false);
        let [ym, yn, _, _] = self.dets(&y, false);
        Ok(outer * (xn * ym - yn * xm) / (&x - &y))
    }
    fn carrier(&self) -> Carrier {
        Carrier::Naturals
    }
    fn provenance(&self) -> &Provenance {
        &self.prov
    }
}

/// Undeformed OPE kernel, Christoffel–Darboux form.
pub fn ope_kernel(spec: &EnsembleSpec, ctx: &PrecisionContext) -> Result<KernelHandle> {
    if spec.deform.k() != 0 {
        return Err(Error::InvalidParameter("ope_kernel takes an undeformed spec".into()));
    }
    Ok(KernelHandle::new(ChristoffelKernel::build(spec, ctx, "ope")?))
}

/// Christoffel-deformed kernel K_N^k from the bordered determinants.
pub fn deformed_kernel(spec: &EnsembleSpec, ctx: &PrecisionContext) -> Result<KernelHandle> {
    Ok(KernelHandle::new(ChristoffelKernel::build(spec, ctx, "christoffel")?))
}

struct SumKernel {
    fam: WeightFamily,
    d: DeformationSpec,
    norms: Vec<XReal>,
    prov: Provenance,
}

impl Kernel for SumKernel {
    fn eval(&self, x: &XReal, y: &XReal) -> Result<XReal> {
        let p = self.fam.prec();
        let (x, y) = (x.with_prec(p), y.with_prec(p));
        let wx = self.fam.weight_real(&x)? * self.d.factor(&x);
        let wy = self.fam.weight_real(&y)? * self.d.factor(&y);
        let mut s = XReal::zero(p);
        for (n, h) in self.norms.iter().enumerate() {
            s = s + deformed_monic(&self.fam, &self.d, n, &x)? * deformed_monic(&self.fam, &self.d, n, &y)? / h;
        }
        Ok((wx * wy).sqrt() * s)
    }
    fn carrier(&self) -> Carrier {
        Carrier::Naturals
    }
    fn provenance(&self) -> &Provenance {
        &self.prov
    }
}

/// √(ω^k(x)ω^k(y)) Σ_{n<N} p_n^k(x) p_n^k(y) / h_n^k, term by term.
pub fn sum_form_kernel(spec: &EnsembleSpec, ctx: &PrecisionContext) -> Result<KernelHandle> {
    let p = ctx.bits();
    let fam = spec.family.with_prec(p);
    let d = spec.deform.with_prec(p);
    let meta = fam.meta(spec.n + 2 * d.k() + 1, ctx);
    let norms = (0..spec.n)
        .map(|n| deformed_norm(&fam, &d, n, &meta))
        .collect::<Result<Vec<_>>>()?;
    Ok(KernelHandle::new(SumKernel {
        prov: spec.provenance("sum-form"),
        fam,
        d,
        norms,
    }))
}

/// Gram matrix of the monic deformed family by direct summation (oracle
/// support for tests): G_{nm} = Σ_{x<=X} ω^k(x) p_n^k(x) p_m^k(x).
pub fn deformed_gram(fam: &WeightFamily, d: &DeformationSpec, nmax: usize, bits: usize) -> Result<Vec<Vec<XReal>>> {
    let p = fam.prec();
    let coeffs: Vec<Vec<XReal>> = (0..=nmax).map(|n| deformed_monic_coeffs(fam, d, n)).collect::<Result<_>>()?;
    let xmax = fam.support_cutoff(nmax + 2 * d.k(), bits);
    let mut g = vec![vec![XReal::zero(p); nmax + 1]; nmax + 1];
    for x in 0..=xmax {
        let xr = XReal::from_i64(x as i64, p);
        let w = deformed_weight(fam, d, x);
        let v: Vec<XReal> = coeffs.iter().map(|c| horner(c, &xr)).collect();
        for i in 0..=nmax {
            for j in 0..=nmax {
                g[i][j] = &g[i][j] + &(&w * &v[i] * &v[j]);
            }
        }
    }
    Ok(g)
}

/// Monic orthogonal polynomials of ω^k from its moments (Hankel solve at
/// raised precision): the Gram–Schmidt oracle. Ascending coefficients.
pub fn moment_monic_oracle(fam: &WeightFamily, d: &DeformationSpec, nmax: usize, bits: usize) -> Result<Vec<Vec<XReal>>> {
    let p = fam.prec();
    let wp = p + 64 + 24 * nmax;
    let famw = fam.with_prec(wp);
    let dw = d.with_prec(wp);
    let xmax = famw.support_cutoff(2 * nmax + 2 * d.k(), wp.max(bits));
    let mut mom = vec![XReal::zero(wp); 2 * nmax + 1];
    for x in 0..=xmax {
        let w = deformed_weight(&famw, &dw, x);
        let xr = XReal::from_i64(x as i64, wp);
        let mut pw = w;
        for m in mom.iter_mut() {
            *m = &*m + &pw;
            pw = pw * &xr;
        }
    }
    let mut out = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        if n == 0 {
            out.push(vec![XReal::one(p)]);
            continue;
        }
        // Σ_{j<n} c_j m_{i+j} = -m_{i+n}, i < n
        let a: Vec<Vec<XReal>> = (0..n).map(|i| (0..n).map(|j| mom[i + j].clone()).collect()).collect();
        let b: Vec<XReal> = (0..n).map(|i| -mom[i + n].clone()).collect();
        let c = solve(&a, &b).ok_or_else(|| Error::DegenerateDeformation("singular Hankel matrix".into()))?;
        let mut v: Vec<XReal> = c.into_iter().map(|x| x.with_prec(p)).collect();
        v.push(XReal::one(p));
        out.push(v);
    }
    Ok(out)
}

/// Evaluate ascending coefficients.
pub fn eval_coeffs(c: &[XReal], x: &XReal) -> XReal {
    horner(c, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::laplace;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(256).unwrap()
    }

    #[test]
    fn spec_validation() {
        let c = ctx();
        assert!(DeformationSpec::new(vec![c.real(2.0)]).is_err());
        assert!(DeformationSpec::new(vec![c.real(0.5), c.real(0.5)]).is_err());
        assert!(DeformationSpec::new(vec![c.real(-1.0), c.real(0.5)]).is_ok());
    }

    #[test]
    fn deformed_weight_examples() {
        let c = ctx();
        let fam = WeightFamily::charlier(c.real(1.0)).unwrap();
        assert_eq!(deformed_weight(&fam, &DeformationSpec::none(), 3).to_f64(), fam.weight_at(3).to_f64());
        let d = DeformationSpec::new(vec![c.real(0.5)]).unwrap();
        let e = c.real(1.5) * c.real(1.5) * c.real(-1.0).exp() / c.real(2.0);
        assert!((deformed_weight(&fam, &d, 2) - e).abs() < c.real(1e-70));
    }

    #[test]
    fn determinant_routes_agree() {
        let c = ctx();
        let fam = WeightFamily::meixner(c.real(1.5), c.real(0.3)).unwrap();
        let d = DeformationSpec::new(vec![c.real(0.5), c.real(3.7)]).unwrap();
        for n in 0..=3 {
            let rows = u_rows(&fam, &d, n, n + 4);
            let a = det(&rows);
            let b = laplace(&rows);
            assert!((&a - &b).abs() <= a.abs() * c.real(1e-60));
        }
    }

    #[test]
    fn big_d_double_zero() {
        let c = ctx();
        let fam = WeightFamily::charlier(c.real(1.0)).unwrap();
        let d = DeformationSpec::new(vec![c.real(0.5)]).unwrap();
        let u = c.real(0.5);
        let v = big_d_det(&fam, &d, 2, &u).unwrap();
        let dv = big_d_det_dx(&fam, &d, 2, &u).unwrap();
        assert!(v.abs() < c.real(1e-60));
        assert!(dv.abs() < c.real(1e-60));
        let k0 = big_d_det(&fam, &DeformationSpec::none(), 3, &c.real(1.7)).unwrap();
        assert!((k0 - fam.eval(3, &c.real(1.7))).abs() < c.real(1e-70));
    }

    #[test]
    fn monic_and_singularity() {
        let c = ctx();
        let fam = WeightFamily::charlier(c.real(1.0)).unwrap();
        let d = DeformationSpec::new(vec![c.real(0.5)]).unwrap();
        let coef = deformed_monic_coeffs(&fam, &d, 3).unwrap();
        assert!((&coef[3] - c.real(1.0)).abs() < c.real(1e-60));
        for x in [0.5, 2.25] {
            let xr = c.real(x);
            let a = deformed_monic(&fam, &d, 3, &xr).unwrap();
            let b = eval_coeffs(&coef, &xr);
            assert!((a - b).abs() < c.real(1e-55));
        }
    }

    #[test]
    fn k0_collapse() {
        let c = ctx();
        let fam = WeightFamily::meixner(c.real(1.5), c.real(0.3)).unwrap();
        let none = DeformationSpec::none();
        let x = c.real(2.0);
        let pm = deformed_monic(&fam, &none, 4, &x).unwrap();
        assert!((pm - fam.eval(4, &x) / fam.leading_coeff(4)).abs() < c.real(1e-60));
        let meta = fam.meta(6, &c);
        let h = deformed_norm(&fam, &none, 4, &meta).unwrap();
        let e = &meta.h[4] / (&meta.c[4] * &meta.c[4]);
        assert!((&h - &e).abs() < e.abs() * c.real(1e-60));
    }

    #[test]
    fn kernel_forms_agree() {
        let c = ctx();
        let fam = WeightFamily::charlier(c.real(1.0)).unwrap();
        let d = DeformationSpec::new(vec![c.real(0.3)]).unwrap();
        let spec = EnsembleSpec::new(fam, 3, d).unwrap();
        let kc = deformed_kernel(&spec, &c).unwrap();
        let ks = sum_form_kernel(&spec, &c).unwrap();
        for (x, y) in [(0.0, 0.0), (1.0, 4.0), (5.0, 2.0), (3.0, 3.0)] {
            let a = kc.eval_f64(x, y, 256).unwrap();
            let b = ks.eval_f64(x, y, 256).unwrap();
            assert!((&a - &b).abs() < c.real(1e-50), "({x},{y}): {} vs {}", a.to_f64(), b.to_f64());
            let s = kc.eval_f64(y, x, 256).unwrap();
            assert!((&a - &s).abs() < c.real(1e-60));
        }
    }
}
