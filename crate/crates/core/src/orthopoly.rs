//! Charlier and Meixner polynomials.
//!
//! Charlier: C_n(x; a) = a^{n/2}/√n! ₂F₀(-n, -x; ; -1/a), weight
//! e^{-a} a^x / x!. Meixner: M_n(x; β, ξ) = ₂F₁(-n, -x; β; 1 - 1/ξ), weight
//! (β)_x ξ^x / x!. Values for n <= 30 come from the terminating sums; higher
//! degrees use the three-term recurrence in n. x-derivatives are exact:
//! both routes run over dual numbers, which differentiates the linear
//! factors of (-x)_j (or the affine recurrence coefficients) by the product
//! rule.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::specfun::{gamma_fn, log_gamma};
use crate::xprec::{Dual, Field, PrecisionContext, XComplex, XReal};

/// Degrees above this are evaluated by recurrence.
pub const SUM_MAX_DEGREE: usize = 30;

#[derive(Clone, Debug)]
pub enum WeightFamily {
    Charlier { a: XReal },
    Meixner { beta: XReal, xi: XReal },
}

/// Leading coefficients and squared norms, indices 0..len.
#[derive(Clone, Debug)]
pub struct PolyFamilyMeta {
    pub c: Vec<XReal>,
    pub h: Vec<XReal>,
}

impl WeightFamily {
    pub fn charlier(a: XReal) -> Result<Self> {
        if !a.is_positive() {
            return Err(Error::InvalidParameter(format!("Charlier needs a > 0, got {}", a.to_f64())));
        }
        Ok(Self::Charlier { a })
    }

    pub fn meixner(beta: XReal, xi: XReal) -> Result<Self> {
        let p = xi.prec();
        if !beta.is_positive() || !xi.is_positive() || xi >= XReal::one(p) {
            return Err(Error::InvalidParameter(format!(
                "Meixner needs beta > 0 and 0 < xi < 1, got beta = {}, xi = {}",
                beta.to_f64(),
                xi.to_f64()
            )));
        }
        Ok(Self::Meixner { beta, xi })
    }

    pub fn prec(&self) -> usize {
        match self {
            Self::Charlier { a } => a.prec(),
            Self::Meixner { xi, .. } => xi.prec(),
        }
    }

    /// Same family with parameters re-rounded to `p` bits.
    pub fn with_prec(&self, p: usize) -> Self {
        match self {
            Self::Charlier { a } => Self::Charlier { a: a.with_prec(p) },
            Self::Meixner { beta, xi } => Self::Meixner {
                beta: beta.with_prec(p),
                xi: xi.with_prec(p),
            },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Charlier { .. } => "charlier",
            Self::Meixner { .. } => "meixner",
        }
    }

    /// ω(x) for x ∈ ℕ, by exact products (log-Gamma route past x = 2000).
    pub fn weight_at(&self, x: u64) -> XReal {
        let p = self.prec();
        if x > 2000 {
            return self.ln_weight_at(x).exp();
        }
        match self {
            Self::Charlier { a } => {
                let mut w = (-a).exp();
                for k in 1..=x {
                    w = w * a / XReal::from_i64(k as i64, p);
                }
                w
            }
            Self::Meixner { beta, xi } => {
                let mut w = XReal::one(p);
                for k in 0..x {
                    w = w * (beta + &XReal::from_i64(k as i64, p)) * xi / XReal::from_i64(k as i64 + 1, p);
                }
                w
            }
        }
    }

    /// ω at a real point through Gamma functions (for off-lattice probes).
    pub fn weight_real(&self, x: &XReal) -> Result<XReal> {
        if x.is_integer() && !x.is_negative() {
            return Ok(self.weight_at(x.round_i64().expect("small integer") as u64));
        }
        let p = self.prec();
        let g = |w: &XReal| -> Result<XReal> { Ok(gamma_fn(&XComplex::real(w.clone()))?.re) };
        let one = XReal::one(p);
        match self {
            Self::Charlier { a } => Ok((-a.clone() + x * &a.ln()).exp() / g(&(x + &one))?),
            Self::Meixner { beta, xi } => {
                Ok(g(&(beta + x))? / g(beta)? * (x * &xi.ln()).exp() / g(&(x + &one))?)
            }
        }
    }

    /// ln ω(x).
    pub fn ln_weight_at(&self, x: u64) -> XReal {
        let p = self.prec();
        let xr = XReal::from_i64(x as i64, p);
        let lg = |w: &XReal| log_gamma(&XComplex::real(w.clone())).expect("positive argument").re;
        let lfact = lg(&(&xr + &XReal::one(p)));
        match self {
            Self::Charlier { a } => -a.clone() + &xr * &a.ln() - lfact,
            Self::Meixner { beta, xi } => lg(&(beta + &xr)) - lg(beta) + &xr * &xi.ln() - lfact,
        }
    }

    /// Leading coefficient c_n of P_n.
    pub fn leading_coeff(&self, n: usize) -> XReal {
        let p = self.prec();
        match self {
            Self::Charlier { a } => {
                let mut c = XReal::one(p);
                for k in 1..=n {
                    c = c / (a * &XReal::from_i64(k as i64, p)).sqrt();
                }
                if n % 2 == 1 {
                    -c
                } else {
                    c
                }
            }
            Self::Meixner { beta, xi } => {
                let q = XReal::one(p) - xi.recip();
                let mut c = XReal::one(p);
                for k in 0..n {
                    c = c * &q / (beta + &XReal::from_i64(k as i64, p));
                }
                c
            }
        }
    }

    /// Closed-form h_n where one is known (Meixner).
    pub fn norm_sq_formula(&self, n: usize) -> Option<XReal> {
        let p = self.prec();
        match self {
            Self::Charlier { .. } => None,
            Self::Meixner { beta, xi } => {
                let one = XReal::one(p);
                let mut h = (-(beta * &(&one - xi).ln())).exp();
                for k in 0..n {
                    let kk = XReal::from_i64(k as i64, p);
                    h = h * (&kk + &one) / (xi * &(beta + &kk));
                }
                Some(h)
            }
        }
    }

    fn sum_form<T: Field>(&self, n: usize, x: &T) -> T {
        let p = self.prec();
        let (coef, lower, pre): (T, Option<T>, T) = match self {
            Self::Charlier { a } => {
                let mut pre = XReal::one(p);
                for k in 1..=n {
                    pre = pre * (a / &XReal::from_i64(k as i64, p)).sqrt();
                }
                (T::from_real(&-a.recip()), None, T::from_real(&pre))
            }
            Self::Meixner { beta, xi } => (
                T::from_real(&(XReal::one(p) - xi.recip())),
                Some(T::from_real(beta)),
                T::one_p(p),
            ),
        };
        // Σ_j (-n)_j (-x)_j / (β)_j · w^j / j!
        let mut term = T::one_p(p);
        let mut sum = T::one_p(p);
        for j in 0..n {
            let jj = T::int_p(j as i64, p);
            term = term * &T::int_p(j as i64 - n as i64, p) * &(jj.clone() - x) * &coef / &T::int_p(j as i64 + 1, p);
            if let Some(b) = &lower {
                term = term / &(b.clone() + &jj);
            }
            sum = sum + &term;
        }
        sum * &pre
    }

    /// Bits lost by forward recurrence where P_n is the minimal solution
    /// (e.g. Charlier at x = 0 decays like a^{n/2}/√n! while the dominant
    /// solution grows like its reciprocal).
    fn recurrence_guard(&self, nmax: usize) -> usize {
        let n = nmax as f64;
        let bits = match self {
            Self::Charlier { a } => {
                let lf: f64 = (1..=nmax).map(|k| (k as f64).ln()).sum();
                (lf - n * a.to_f64().ln()).max(0.0) / std::f64::consts::LN_2
            }
            Self::Meixner { xi, .. } => n * (1.0 - xi.to_f64().log2()),
        };
        32 + bits.min(8192.0).ceil() as usize
    }

    fn recurrence<T: Field>(&self, nmax: usize, x: &T) -> Vec<T> {
        let p0 = self.prec();
        let p = p0 + self.recurrence_guard(nmax);
        let fam = self.with_prec(p);
        let xw = x.rounded(p);
        fam.recurrence_at(nmax, &xw).into_iter().map(|v| v.rounded(p0)).collect()
    }

    fn recurrence_at<T: Field>(&self, nmax: usize, x: &T) -> Vec<T> {
        let p = self.prec();
        let mut out = Vec::with_capacity(nmax + 1);
        out.push(T::one_p(p));
        if nmax == 0 {
            return out;
        }
        match self {
            Self::Charlier { a } => {
                // √(a(n+1)) C_{n+1} = (n + a - x) C_n - √(a n) C_{n-1}
                let at = T::from_real(a);
                for n in 0..nmax {
                    let nn = XReal::from_i64(n as i64, p);
                    let mut v = (T::from_real(&nn) + &at - x) * &out[n];
                    if n > 0 {
                        v = v - out[n - 1].clone() * &T::from_real(&(a * &nn).sqrt());
                    }
                    let d = (a * &XReal::from_i64(n as i64 + 1, p)).sqrt();
                    out.push(v / &T::from_real(&d));
                }
            }
            Self::Meixner { beta, xi } => {
                // ξ(n+β) M_{n+1} = [(ξ-1)x + n + (n+β)ξ] M_n - n M_{n-1}
                let one = XReal::one(p);
                let xm1 = T::from_real(&(xi - &one));
                for n in 0..nmax {
                    let nn = XReal::from_i64(n as i64, p);
                    let nb = &nn + beta;
                    let mut v = (xm1.clone() * x + &T::from_real(&(&nn + &(&nb * xi)))) * &out[n];
                    if n > 0 {
                        v = v - out[n - 1].clone() * &T::from_real(&nn);
                    }
                    out.push(v / &T::from_real(&(xi * &nb)));
                }
            }
        }
        out
    }

    /// P_n(x) over any scalar type.
    pub fn eval_t<T: Field>(&self, n: usize, x: &T) -> T {
        if n <= SUM_MAX_DEGREE {
            self.sum_form(n, x)
        } else {
            self.recurrence(n, x).pop().expect("non-empty")
        }
    }

    pub fn eval(&self, n: usize, x: &XReal) -> XReal {
        self.eval_t(n, x)
    }

    pub fn eval_dx(&self, n: usize, x: &XReal) -> XReal {
        self.eval_t(n, &Dual::variable(x.clone())).d
    }

    /// Terminating-sum route regardless of degree (for cross-checks).
    pub fn eval_sum(&self, n: usize, x: &XReal) -> XReal {
        self.sum_form(n, x)
    }

    /// Recurrence route regardless of degree (for cross-checks).
    pub fn eval_recurrence(&self, n: usize, x: &XReal) -> XReal {
        self.recurrence(n, x).pop().expect("non-empty")
    }

    /// (P_m(x), P_m'(x)) for m in `range`.
    pub fn joint_eval(&self, range: Range<usize>, x: &XReal) -> Vec<(XReal, XReal)> {
        let xd = Dual::variable(x.clone());
        if range.end == 0 {
            return Vec::new();
        }
        if range.end - 1 <= SUM_MAX_DEGREE {
            return range
                .map(|m| {
                    let d = self.sum_form(m, &xd);
                    (d.v, d.d)
                })
                .collect();
        }
        let all = self.recurrence(range.end - 1, &xd);
        all[range].iter().map(|d| (d.v.clone(), d.d.clone())).collect()
    }

    /// Values only, degrees in `range`, generic scalar.
    pub fn joint_values<T: Field>(&self, range: Range<usize>, x: &T) -> Vec<T> {
        if range.end == 0 {
            return Vec::new();
        }
        if range.end - 1 <= SUM_MAX_DEGREE {
            return range.map(|m| self.sum_form(m, x)).collect();
        }
        let all = self.recurrence(range.end - 1, x);
        all[range].to_vec()
    }

    /// Smallest X such that Σ_{x>X} ω(x)(1+x)^{2 deg} < 2^{-bits} relative
    /// to the largest term at x ≥ deg, certified by a ratio-1/2 geometric
    /// bound. Below deg the proxy overstates P_n² badly (zeros), and at
    /// x ~ deg by up to e^{2 deg}, hence the extra 3·deg bits.
    pub fn support_cutoff(&self, deg: usize, bits: usize) -> u64 {
        let ratio = |x: f64| -> f64 {
            let w = match self {
                Self::Charlier { a } => a.to_f64() / (x + 1.0),
                Self::Meixner { beta, xi } => xi.to_f64() * (beta.to_f64() + x) / (x + 1.0),
            };
            w * ((x + 2.0) / (x + 1.0)).powi(2 * deg as i32)
        };
        let target = -((bits + 8 + 3 * deg) as f64) * std::f64::consts::LN_2;
        let (mut lt, mut lmax) = (0.0f64, f64::NEG_INFINITY);
        let mut x = 0u64;
        loop {
            let r = ratio(x as f64);
            lt += r.ln();
            x += 1;
            if x >= deg as u64 {
                lmax = lmax.max(lt);
            }
            if r < 0.5 && lt - lmax < target {
                return x;
            }
            if x > 10_000_000 {
                return x;
            }
        }
    }

    /// c_n and h_n for n < len. Meixner norms from the closed form;
    /// Charlier norms measured by truncated summation at extra precision.
    pub fn meta(&self, len: usize, ctx: &PrecisionContext) -> PolyFamilyMeta {
        let c = (0..len).map(|n| self.leading_coeff(n)).collect();
        let h = match self {
            Self::Meixner { .. } => (0..len).map(|n| self.norm_sq_formula(n).expect("Meixner")).collect(),
            Self::Charlier { .. } => self.measured_norms(len, ctx),
        };
        PolyFamilyMeta { c, h }
    }

    /// Σ_x ω(x) P_n(x)² over the certified support, n < len.
    pub fn measured_norms(&self, len: usize, ctx: &PrecisionContext) -> Vec<XReal> {
        let p = self.prec();
        if len == 0 {
            return Vec::new();
        }
        let xmax = self.support_cutoff(len, ctx.bits());
        let mut h = vec![XReal::zero(p); len];
        for x in 0..=xmax {
            let w = self.weight_at(x);
            let vals = self.joint_values(0..len, &XReal::from_i64(x as i64, p));
            for (hn, v) in h.iter_mut().zip(vals) {
                *hn = &*hn + &(&w * &(&v * &v));
            }
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(256).unwrap()
    }

    #[test]
    fn weights() {
        let c = ctx();
        let ch = WeightFamily::charlier(c.real(1.0)).unwrap();
        assert!((ch.weight_at(0) - c.real(-1.0).exp()).abs() < c.real(1e-75));
        let mx = WeightFamily::meixner(c.real(1.5), c.real(0.3)).unwrap();
        assert_eq!(mx.weight_at(0).to_f64(), 1.0);
        let s = (0..=200).fold(XReal::zero(256), |acc, x| acc + mx.weight_at(x));
        let e = (c.real(1.0) - c.real(0.3)).powr(&c.real(-1.5));
        assert!((s - e).abs() < c.real(1e-25));
        let d = (mx.weight_at(37).ln() - mx.ln_weight_at(37)).abs();
        assert!(d < c.real(1e-70));
    }

    #[test]
    fn low_degree_forms() {
        let c = ctx();
        let a = c.real(2.0);
        let ch = WeightFamily::charlier(a.clone()).unwrap();
        assert_eq!(ch.eval(0, &c.real(0.7)).to_f64(), 1.0);
        assert!(ch.eval(1, &a).abs() < c.real(1e-75));
        let d = ch.eval_dx(1, &c.real(0.7)) + a.sqrt().recip();
        assert!(d.abs() < c.real(1e-75));
        assert_eq!(ch.eval_dx(0, &c.real(0.7)).to_f64(), 0.0);
        let mx = WeightFamily::meixner(c.real(1.5), c.real(0.3)).unwrap();
        for n in 0..6 {
            assert!((mx.eval(n, &c.real(0.0)) - c.real(1.0)).abs() < c.real(1e-70));
        }
    }

    #[test]
    fn routes_agree() {
        let c = ctx();
        for fam in [
            WeightFamily::charlier(c.real(0.7)).unwrap(),
            WeightFamily::meixner(c.real(1.5), c.real(0.3)).unwrap(),
        ] {
            for n in [5usize, 17, 30] {
                for x in [0.0, 3.3, 12.0, -1.7] {
                    let xx = c.real(x);
                    let s = fam.eval_sum(n, &xx);
                    let r = fam.eval_recurrence(n, &xx);
                    let scale = s.abs().max(&c.real(1.0));
                    assert!((&s - &r).abs() < &scale * &c.real(1e-60), "{} n={n} x={x}", fam.name());
                }
            }
        }
    }

    #[test]
    fn leading_coefficient_by_differences() {
        // n-th forward difference of P_n equals n! c_n
        let c = ctx();
        for fam in [
            WeightFamily::charlier(c.real(2.0)).unwrap(),
            WeightFamily::meixner(c.real(1.5), c.real(0.3)).unwrap(),
        ] {
            let n = 6;
            let vals: Vec<XReal> = (0..=n).map(|x| fam.eval(n, &c.int(x as i64))).collect();
            let mut diff = vals;
            for _ in 0..n {
                diff = diff.windows(2).map(|w| &w[1] - &w[0]).collect();
            }
            let fact = (1..=n as i64).fold(c.real(1.0), |acc, k| acc * c.int(k));
            let lc = fam.leading_coeff(n) * fact;
            assert!((&diff[0] - &lc).abs() < lc.abs() * c.real(1e-60), "{}", fam.name());
        }
    }

    #[test]
    fn charlier_is_orthonormal() {
        let c = ctx();
        let ch = WeightFamily::charlier(c.real(2.0)).unwrap();
        for h in ch.measured_norms(9, &c) {
            assert!((h - c.real(1.0)).abs() < c.real(1e-60));
        }
    }

    #[test]
    fn joint_eval_consistent() {
        let c = ctx();
        let ch = WeightFamily::charlier(c.real(0.5)).unwrap();
        let x = c.real(3.3);
        let big = ch.joint_eval(28..40, &x);
        for (i, (v, d)) in big.iter().enumerate() {
            let m = 28 + i;
            let v2 = ch.eval_sum(m, &x);
            let d2 = ch.eval_t(m.min(30), &Dual::variable(x.clone()));
            assert!((v - &v2).abs() < v2.abs().max(&c.real(1.0)) * c.real(1e-55));
            if m <= 30 {
                assert!((d - &d2.d).abs() < d2.d.abs().max(&c.real(1.0)) * c.real(1e-55));
            }
        }
    }
}
