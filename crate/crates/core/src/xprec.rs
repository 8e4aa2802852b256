//! Extended-precision scalars.
//!
//! `XReal` wraps an `astro_float::BigFloat` together with the precision it
//! was created at; binary operations round to the larger of the two operand
//! precisions. `XComplex` is a pair of `XReal`. Both implement [`Field`] and
//! [`Analytic`], which lets the hypergeometric and determinant code run
//! unchanged over real, complex and dual numbers.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign, Word};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const RM: RoundingMode = RoundingMode::ToEven;
const WORD_BITS: usize = std::mem::size_of::<Word>() * 8;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

fn with_cc<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Working precision and the tolerances derived from it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecisionContext {
    pub mantissa_bits: usize,
    /// Starting node count for adaptive quadrature (doubled until converged).
    pub quad_nodes: usize,
    /// `tol_rel = 2^-tol_bits`.
    pub tol_bits: usize,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self::new(256).expect("default precision is valid")
    }
}

impl PrecisionContext {
    pub fn new(mantissa_bits: usize) -> Result<Self> {
        if mantissa_bits < 64 {
            return Err(Error::InvalidParameter(format!(
                "mantissa_bits must be >= 64, got {mantissa_bits}"
            )));
        }
        Ok(Self {
            mantissa_bits,
            quad_nodes: 32,
            tol_bits: mantissa_bits - 12,
        })
    }

    pub fn with_quad_nodes(mut self, n: usize) -> Self {
        self.quad_nodes = n.max(4);
        self
    }

    /// Tighten or loosen the comparison tolerance; clamped so that
    /// `tol_rel >= 2^(1-bits)`.
    pub fn with_tol_bits(mut self, t: usize) -> Self {
        self.tol_bits = t.clamp(1, self.mantissa_bits - 1);
        self
    }

    pub fn bits(&self) -> usize {
        self.mantissa_bits
    }

    pub fn tol_rel(&self) -> XReal {
        XReal::one(self.mantissa_bits).ldexp(-(self.tol_bits as i64))
    }

    /// Number of significant decimal digits carried by the mantissa.
    pub fn decimal_digits(&self) -> usize {
        ((self.mantissa_bits as f64) * std::f64::consts::LOG10_2).floor() as usize
    }

    pub fn real(&self, x: f64) -> XReal {
        XReal::from_f64_dec(x, self.mantissa_bits)
    }

    pub fn int(&self, n: i64) -> XReal {
        XReal::from_i64(n, self.mantissa_bits)
    }

    pub fn cplx(&self, re: f64, im: f64) -> XComplex {
        XComplex::new(self.real(re), self.real(im))
    }
}

/// Extended-precision real number.
#[derive(Clone)]
pub struct XReal {
    v: BigFloat,
    p: usize,
}

impl XReal {
    fn wrap(v: BigFloat, p: usize) -> Self {
        XReal { v, p }
    }

    pub fn zero(p: usize) -> Self {
        Self::wrap(BigFloat::from_word(0, p), p)
    }

    pub fn one(p: usize) -> Self {
        Self::wrap(BigFloat::from_word(1, p), p)
    }

    pub fn from_i64(n: i64, p: usize) -> Self {
        Self::wrap(BigFloat::from_i64(n, p), p)
    }

    /// Exact binary value of `x`.
    pub fn from_f64(x: f64, p: usize) -> Self {
        Self::wrap(BigFloat::from_f64(x, p), p)
    }

    /// The decimal number that prints as `x` (shortest round-trip form),
    /// so `0.3` means three tenths rather than the nearest double.
    pub fn from_f64_dec(x: f64, p: usize) -> Self {
        if x == x.trunc() && x.abs() < 9.0e15 {
            return Self::from_i64(x as i64, p);
        }
        Self::parse(&format!("{x:e}"), p).expect("formatted f64 parses")
    }

    pub fn parse(s: &str, p: usize) -> Result<Self> {
        let v = with_cc(|cc| BigFloat::parse(s.trim(), Radix::Dec, p, RM, cc));
        if v.is_nan() || v.is_inf() {
            return Err(Error::InvalidParameter(format!("not a finite decimal: {s:?}")));
        }
        Ok(Self::wrap(v, p))
    }

    pub fn from_bigint(n: &BigInt, p: usize) -> Self {
        if let Some(i) = n.to_i64() {
            return Self::from_i64(i, p);
        }
        let (sign, digits) = n.to_u64_digits();
        let base = XReal::one(p).ldexp(64);
        let mut acc = XReal::zero(p);
        for d in digits.iter().rev() {
            acc = acc * &base + XReal::wrap(BigFloat::from_u64(*d, p), p);
        }
        if sign == num_bigint::Sign::Minus {
            -acc
        } else {
            acc
        }
    }

    pub fn pi(p: usize) -> Self {
        Self::wrap(with_cc(|cc| cc.pi(p, RM)), p)
    }

    pub fn prec(&self) -> usize {
        self.p
    }

    /// Same value, rounded to precision `p`.
    pub fn with_prec(&self, p: usize) -> Self {
        let mut v = self.v.clone();
        if p < self.p {
            let _ = v.set_precision(p, RM);
        }
        Self::wrap(v, p)
    }

    pub fn raw(&self) -> &BigFloat {
        &self.v
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !(self.v.is_nan() || self.v.is_inf())
    }

    pub fn is_negative(&self) -> bool {
        !self.v.is_zero() && self.v.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        !self.v.is_zero() && self.v.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.v.is_zero() || self.v.is_int()
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.v.abs(), self.p)
    }

    pub fn floor(&self) -> Self {
        Self::wrap(self.v.floor(), self.p)
    }

    pub fn ceil(&self) -> Self {
        Self::wrap(self.v.ceil(), self.p)
    }

    pub fn frac(&self) -> Self {
        self - &self.floor()
    }

    /// Nearest integer, if it fits an `i64`.
    pub fn round_i64(&self) -> Option<i64> {
        let r = (self + &XReal::from_f64(0.5, self.p)).floor();
        let f = r.to_f64();
        if f.abs() < 9.0e18 {
            Some(f as i64)
        } else {
            None
        }
    }

    pub fn ldexp(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = self.v.clone();
        let e = v.exponent().unwrap_or(0) as i64 + k;
        v.set_exponent(e as i32);
        Self::wrap(v, self.p)
    }

    /// Binary exponent `e` with `|x| = m 2^e`, `m ∈ [1/2, 1)`; `None` for zero.
    pub fn exponent(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            self.v.exponent().map(|e| e as i64)
        }
    }

    pub fn sqrt(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Self::wrap(self.v.sqrt(self.p, RM), self.p)
    }

    pub fn exp(&self) -> Self {
        Self::wrap(with_cc(|cc| self.v.exp(self.p, RM, cc)), self.p)
    }

    pub fn ln(&self) -> Self {
        Self::wrap(with_cc(|cc| self.v.ln(self.p, RM, cc)), self.p)
    }

    pub fn sin(&self) -> Self {
        Self::wrap(with_cc(|cc| self.v.sin(self.p, RM, cc)), self.p)
    }

    pub fn cos(&self) -> Self {
        Self::wrap(with_cc(|cc| self.v.cos(self.p, RM, cc)), self.p)
    }

    pub fn sinh(&self) -> Self {
        Self::wrap(with_cc(|cc| self.v.sinh(self.p, RM, cc)), self.p)
    }

    pub fn atan(&self) -> Self {
        Self::wrap(with_cc(|cc| self.v.atan(self.p, RM, cc)), self.p)
    }

    /// Four-quadrant arctangent of `self / x` (self is the ordinate).
    pub fn atan2(&self, x: &XReal) -> Self {
        let p = self.p.max(x.p);
        if x.is_zero() {
            let half_pi = XReal::pi(p).ldexp(-1);
            return if self.is_negative() {
                -half_pi
            } else if self.is_zero() {
                XReal::zero(p)
            } else {
                half_pi
            };
        }
        let t = (self / x).atan();
        if x.is_positive() {
            t
        } else if self.is_negative() {
            t - XReal::pi(p)
        } else {
            t + XReal::pi(p)
        }
    }

    pub fn powi(&self, n: i64) -> Self {
        if n == 0 {
            return XReal::one(self.p);
        }
        let r = Self::wrap(self.v.powi(n.unsigned_abs() as usize, self.p, RM), self.p);
        if n < 0 {
            r.recip()
        } else {
            r
        }
    }

    /// `self^e` for positive `self`.
    pub fn powr(&self, e: &XReal) -> Self {
        if e.is_zero() {
            return XReal::one(self.p);
        }
        (e * &self.ln()).exp()
    }

    pub fn recip(&self) -> Self {
        XReal::one(self.p) / self
    }

    pub fn max(&self, o: &XReal) -> Self {
        if self >= o {
            self.clone()
        } else {
            o.clone()
        }
    }

    pub fn min(&self, o: &XReal) -> Self {
        if self <= o {
            self.clone()
        } else {
            o.clone()
        }
    }

    /// Nearest `f64` (round toward zero in the last bit; saturates to ±inf/0).
    pub fn to_f64(&self) -> f64 {
        let Some((m, _n, s, e, _)) = self.v.as_raw_parts() else {
            return f64::NAN;
        };
        if self.v.is_zero() || m.is_empty() {
            return 0.0;
        }
        let mut frac = 0.0f64;
        let mut scale = 1.0f64;
        for w in m.iter().rev().take(128 / WORD_BITS + 1) {
            scale /= 2f64.powi(WORD_BITS as i32);
            frac += (*w as f64) * scale;
        }
        let v = ldexp_f64(frac, e as i64);
        if s == Sign::Neg {
            -v
        } else {
            v
        }
    }

    /// Exact value as a rational `num / 2^shift` split into sign, integer
    /// mantissa and binary exponent.
    fn to_parts(&self) -> Option<(bool, BigUint, i64)> {
        let (m, _n, s, e, _) = self.v.as_raw_parts()?;
        if self.v.is_zero() {
            return None;
        }
        let mut digits: Vec<u32> = Vec::with_capacity(m.len() * WORD_BITS / 32);
        for w in m {
            let w = *w as u64;
            digits.push(w as u32);
            if WORD_BITS == 64 {
                digits.push((w >> 32) as u32);
            }
        }
        let mant = BigUint::new(digits);
        let shift = e as i64 - (m.len() * WORD_BITS) as i64;
        Some((s == Sign::Neg, mant, shift))
    }

    /// Scientific notation with `digits` significant decimal digits,
    /// correctly rounded from the exact binary value.
    pub fn to_sci(&self, digits: usize) -> String {
        let digits = digits.max(1);
        let Some((neg, mant, shift)) = self.to_parts() else {
            return if self.v.is_nan() {
                "NaN".to_string()
            } else {
                "0e0".to_string()
            };
        };
        let bitlen = mant.bits() as i64 + shift;
        let mut k = ((bitlen - 1) as f64 * std::f64::consts::LOG10_2).floor() as i64;
        loop {
            let scaled = scaled_round(&mant, shift, digits as i64 - 1 - k);
            let s = scaled.to_string();
            if s.len() > digits {
                k += 1;
                continue;
            }
            if s.len() < digits {
                k -= 1;
                continue;
            }
            let (head, tail) = s.split_at(1);
            let sign = if neg { "-" } else { "" };
            return if tail.is_empty() {
                format!("{sign}{head}e{k}")
            } else {
                format!("{sign}{head}.{tail}e{k}")
            };
        }
    }
}

/// round(mant · 2^shift · 10^pow10) as an integer.
fn scaled_round(mant: &BigUint, shift: i64, pow10: i64) -> BigUint {
    let ten = BigUint::from(10u32);
    let mut num = mant.clone();
    let mut den = BigUint::one();
    if pow10 >= 0 {
        num *= ten.pow(pow10 as u32);
    } else {
        den *= ten.pow((-pow10) as u32);
    }
    if shift >= 0 {
        num <<= shift as usize;
    } else {
        den <<= (-shift) as usize;
    }
    let q = &num / &den;
    let r = &num - &q * &den;
    if (r << 1usize) >= den {
        q + 1u32
    } else {
        q
    }
}

fn ldexp_f64(mut x: f64, mut e: i64) -> f64 {
    while e > 500 {
        x *= 2f64.powi(500);
        e -= 500;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -500 {
        x *= 2f64.powi(-500);
        e += 500;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

impl fmt::Debug for XReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci(24))
    }
}

impl fmt::Display for XReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = f
            .precision()
            .unwrap_or(((self.p as f64) * std::f64::consts::LOG10_2) as usize);
        write!(f, "{}", self.to_sci(d))
    }
}

impl PartialEq for XReal {
    fn eq(&self, o: &Self) -> bool {
        self.partial_cmp(o) == Some(Ordering::Equal)
    }
}

impl PartialOrd for XReal {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        self.v.cmp(&o.v).map(|c| c.cmp(&0))
    }
}

macro_rules! real_binop {
    ($tr:ident, $m:ident, $op:ident) => {
        impl $tr<&XReal> for &XReal {
            type Output = XReal;
            fn $m(self, o: &XReal) -> XReal {
                let p = self.p.max(o.p);
                XReal::wrap(self.v.$op(&o.v, p, RM), p)
            }
        }
        impl $tr<XReal> for XReal {
            type Output = XReal;
            fn $m(self, o: XReal) -> XReal {
                (&self).$m(&o)
            }
        }
        impl $tr<&XReal> for XReal {
            type Output = XReal;
            fn $m(self, o: &XReal) -> XReal {
                (&self).$m(o)
            }
        }
        impl $tr<XReal> for &XReal {
            type Output = XReal;
            fn $m(self, o: XReal) -> XReal {
                self.$m(&o)
            }
        }
    };
}

real_binop!(Add, add, add);
real_binop!(Sub, sub, sub);
real_binop!(Mul, mul, mul);
real_binop!(Div, div, div);

impl Neg for XReal {
    type Output = XReal;
    fn neg(self) -> XReal {
        XReal::wrap(self.v.neg(), self.p)
    }
}

impl Neg for &XReal {
    type Output = XReal;
    fn neg(self) -> XReal {
        XReal::wrap(self.v.clone().neg(), self.p)
    }
}

/// Extended-precision complex number.
#[derive(Clone, PartialEq)]
pub struct XComplex {
    pub re: XReal,
    pub im: XReal,
}

impl XComplex {
    pub fn new(re: XReal, im: XReal) -> Self {
        XComplex { re, im }
    }

    pub fn real(re: XReal) -> Self {
        let p = re.p;
        XComplex { re, im: XReal::zero(p) }
    }

    pub fn zero(p: usize) -> Self {
        Self::real(XReal::zero(p))
    }

    pub fn one(p: usize) -> Self {
        Self::real(XReal::one(p))
    }

    pub fn i(p: usize) -> Self {
        XComplex::new(XReal::zero(p), XReal::one(p))
    }

    pub fn prec(&self) -> usize {
        self.re.p.max(self.im.p)
    }

    pub fn conj(&self) -> Self {
        XComplex::new(self.re.clone(), -&self.im)
    }

    pub fn norm_sqr(&self) -> XReal {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn abs(&self) -> XReal {
        if self.im.is_zero() {
            return self.re.abs();
        }
        if self.re.is_zero() {
            return self.im.abs();
        }
        self.norm_sqr().sqrt()
    }

    pub fn arg(&self) -> XReal {
        self.im.atan2(&self.re)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn scale(&self, s: &XReal) -> Self {
        XComplex::new(&self.re * s, &self.im * s)
    }

    pub fn mul_i(&self) -> Self {
        XComplex::new(-&self.im, self.re.clone())
    }

    pub fn recip(&self) -> Self {
        if self.im.is_zero() {
            return XComplex::real(self.re.recip());
        }
        let d = self.norm_sqr();
        XComplex::new(&self.re / &d, -(&self.im / &d))
    }

    pub fn exp(&self) -> Self {
        let m = self.re.exp();
        if self.im.is_zero() {
            return XComplex::real(m);
        }
        XComplex::new(&m * &self.im.cos(), &m * &self.im.sin())
    }

    /// Principal branch logarithm.
    pub fn ln(&self) -> Self {
        if self.im.is_zero() && self.re.is_positive() {
            return XComplex::real(self.re.ln());
        }
        XComplex::new(self.abs().ln(), self.arg())
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        if self.is_zero() {
            return self.clone();
        }
        if self.im.is_zero() {
            return if self.re.is_negative() {
                XComplex::new(XReal::zero(p), (-&self.re).sqrt())
            } else {
                XComplex::real(self.re.sqrt())
            };
        }
        let r = self.abs();
        let half = XReal::from_f64(0.5, p);
        let a = ((&r + &self.re) * &half).sqrt();
        let b = ((&r - &self.re) * &half).sqrt();
        if self.im.is_negative() {
            XComplex::new(a, -b)
        } else {
            XComplex::new(a, b)
        }
    }

    pub fn sin(&self) -> Self {
        if self.im.is_zero() {
            return XComplex::real(self.re.sin());
        }
        let e = self.im.exp();
        let ei = e.recip();
        let half = XReal::from_f64(0.5, self.prec());
        let ch = (&e + &ei) * &half;
        let sh = (&e - &ei) * &half;
        XComplex::new(&self.re.sin() * &ch, &self.re.cos() * &sh)
    }

    pub fn cos(&self) -> Self {
        if self.im.is_zero() {
            return XComplex::real(self.re.cos());
        }
        let e = self.im.exp();
        let ei = e.recip();
        let half = XReal::from_f64(0.5, self.prec());
        let ch = (&e + &ei) * &half;
        let sh = (&e - &ei) * &half;
        XComplex::new(&self.re.cos() * &ch, -(&self.re.sin() * &sh))
    }

    /// `self^e` on the principal branch.
    pub fn pow(&self, e: &XComplex) -> Self {
        if e.is_zero() {
            return XComplex::one(self.prec());
        }
        (e.clone() * self.ln()).exp()
    }

    pub fn powi(&self, n: i64) -> Self {
        let mut base = if n < 0 { self.recip() } else { self.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = XComplex::one(self.prec());
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = base.clone() * &base;
            }
        }
        acc
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Debug for XComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} + {:?}i)", self.re, self.im)
    }
}

impl fmt::Display for XComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re, self.im)
    }
}

macro_rules! cplx_ref_ops {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&XComplex> for &XComplex {
            type Output = XComplex;
            fn $m(self, o: &XComplex) -> XComplex {
                let f: fn(&XComplex, &XComplex) -> XComplex = $body;
                f(self, o)
            }
        }
        impl $tr<XComplex> for XComplex {
            type Output = XComplex;
            fn $m(self, o: XComplex) -> XComplex {
                (&self).$m(&o)
            }
        }
        impl $tr<&XComplex> for XComplex {
            type Output = XComplex;
            fn $m(self, o: &XComplex) -> XComplex {
                (&self).$m(o)
            }
        }
        impl $tr<XComplex> for &XComplex {
            type Output = XComplex;
            fn $m(self, o: XComplex) -> XComplex {
                self.$m(&o)
            }
        }
    };
}

cplx_ref_ops!(Add, add, |a, b| XComplex::new(&a.re + &b.re, &a.im + &b.im));
cplx_ref_ops!(Sub, sub, |a, b| XComplex::new(&a.re - &b.re, &a.im - &b.im));
cplx_ref_ops!(Mul, mul, |a, b| {
    if a.im.is_zero() {
        return XComplex::new(&a.re * &b.re, &a.re * &b.im);
    }
    if b.im.is_zero() {
        return XComplex::new(&a.re * &b.re, &a.im * &b.re);
    }
    XComplex::new(
        &a.re * &b.re - &a.im * &b.im,
        &a.re * &b.im + &a.im * &b.re,
    )
});
cplx_ref_ops!(Div, div, |a, b| {
    if b.im.is_zero() {
        return XComplex::new(&a.re / &b.re, &a.im / &b.re);
    }
    a * &b.recip()
});

impl Neg for XComplex {
    type Output = XComplex;
    fn neg(self) -> XComplex {
        XComplex::new(-self.re, -self.im)
    }
}

impl Neg for &XComplex {
    type Output = XComplex;
    fn neg(self) -> XComplex {
        XComplex::new(-&self.re, -&self.im)
    }
}

/// Arithmetic shared by real, complex and dual scalars.
pub trait Field:
    Sized
    + Clone
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
{
    fn from_real(x: &XReal) -> Self;
    fn from_cplx(z: &XComplex) -> Self;
    /// Magnitude of the (primal) value, used for pivoting and stopping rules.
    fn modulus(&self) -> XReal;
    fn prec(&self) -> usize;
    /// The primal value as a complex number.
    fn value(&self) -> XComplex;
    /// Same value carried at precision `p`.
    fn rounded(&self, p: usize) -> Self;

    fn zero_p(p: usize) -> Self {
        Self::from_real(&XReal::zero(p))
    }
    fn one_p(p: usize) -> Self {
        Self::from_real(&XReal::one(p))
    }
    fn int_p(n: i64, p: usize) -> Self {
        Self::from_real(&XReal::from_i64(n, p))
    }
    fn zero_like(&self) -> Self {
        Self::zero_p(self.prec())
    }
    fn one_like(&self) -> Self {
        Self::one_p(self.prec())
    }
    fn is_zero_value(&self) -> bool {
        self.value().is_zero()
    }
    fn scale_real(&self, s: &XReal) -> Self {
        self.clone() * &Self::from_real(s)
    }
    /// Value is exactly a non-positive integer (a pole of Γ).
    fn is_nonpos_int(&self) -> bool {
        let v = self.value();
        v.im.is_zero() && v.re.is_integer() && !v.re.is_positive()
    }
    /// Non-positive integer with vanishing derivative part, i.e. a
    /// parameter that makes a hypergeometric series terminate.
    fn is_exact_nonpos_int(&self) -> bool {
        self.is_nonpos_int()
    }
}

/// Elementary functions needed by the hypergeometric and Gamma code.
pub trait Analytic: Field {
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
}

impl Field for XReal {
    fn from_real(x: &XReal) -> Self {
        x.clone()
    }
    fn from_cplx(z: &XComplex) -> Self {
        z.re.clone()
    }
    fn modulus(&self) -> XReal {
        self.abs()
    }
    fn prec(&self) -> usize {
        self.p
    }
    fn value(&self) -> XComplex {
        XComplex::real(self.clone())
    }
    fn rounded(&self, p: usize) -> Self {
        self.with_prec(p)
    }
}

impl Analytic for XReal {
    fn exp(&self) -> Self {
        XReal::exp(self)
    }
    fn ln(&self) -> Self {
        XReal::ln(self)
    }
    fn sqrt(&self) -> Self {
        XReal::sqrt(self)
    }
    fn sin(&self) -> Self {
        XReal::sin(self)
    }
    fn cos(&self) -> Self {
        XReal::cos(self)
    }
}

impl Field for XComplex {
    fn from_real(x: &XReal) -> Self {
        XComplex::real(x.clone())
    }
    fn from_cplx(z: &XComplex) -> Self {
        z.clone()
    }
    fn modulus(&self) -> XReal {
        self.abs()
    }
    fn prec(&self) -> usize {
        XComplex::prec(self)
    }
    fn value(&self) -> XComplex {
        self.clone()
    }
    fn rounded(&self, p: usize) -> Self {
        XComplex::new(self.re.with_prec(p), self.im.with_prec(p))
    }
}

impl Analytic for XComplex {
    fn exp(&self) -> Self {
        XComplex::exp(self)
    }
    fn ln(&self) -> Self {
        XComplex::ln(self)
    }
    fn sqrt(&self) -> Self {
        XComplex::sqrt(self)
    }
    fn sin(&self) -> Self {
        XComplex::sin(self)
    }
    fn cos(&self) -> Self {
        XComplex::cos(self)
    }
}

/// First-order dual number `v + d·η`, η² = 0; carries an exact derivative.
#[derive(Clone, Debug)]
pub struct Dual<T> {
    pub v: T,
    pub d: T,
}

impl<T: Field> Dual<T> {
    pub fn new(v: T, d: T) -> Self {
        Dual { v, d }
    }

    pub fn constant(v: T) -> Self {
        let d = v.zero_like();
        Dual { v, d }
    }

    /// The independent variable at `v`.
    pub fn variable(v: T) -> Self {
        let d = v.one_like();
        Dual { v, d }
    }

    /// Apply a scalar function with known value and derivative at `self.v`.
    pub fn chain(&self, fv: T, dfv: T) -> Self {
        Dual { v: fv, d: dfv * &self.d }
    }
}

impl<T: Field> Add for Dual<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Dual { v: self.v + o.v, d: self.d + o.d }
    }
}
impl<'a, T: Field> Add<&'a Dual<T>> for Dual<T> {
    type Output = Self;
    fn add(self, o: &'a Self) -> Self {
        Dual { v: self.v + &o.v, d: self.d + &o.d }
    }
}
impl<T: Field> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Dual { v: self.v - o.v, d: self.d - o.d }
    }
}
impl<'a, T: Field> Sub<&'a Dual<T>> for Dual<T> {
    type Output = Self;
    fn sub(self, o: &'a Self) -> Self {
        Dual { v: self.v - &o.v, d: self.d - &o.d }
    }
}
impl<T: Field> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self * &o
    }
}
impl<'a, T: Field> Mul<&'a Dual<T>> for Dual<T> {
    type Output = Self;
    fn mul(self, o: &'a Self) -> Self {
        let d = self.d * &o.v + self.v.clone() * &o.d;
        Dual { v: self.v * &o.v, d }
    }
}
impl<T: Field> Div for Dual<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        self / &o
    }
}
impl<'a, T: Field> Div<&'a Dual<T>> for Dual<T> {
    type Output = Self;
    fn div(self, o: &'a Self) -> Self {
        let v = self.v / &o.v;
        let d = (self.d - v.clone() * &o.d) / &o.v;
        Dual { v, d }
    }
}
impl<T: Field> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual { v: -self.v, d: -self.d }
    }
}

impl<T: Field> Field for Dual<T> {
    fn from_real(x: &XReal) -> Self {
        Dual::constant(T::from_real(x))
    }
    fn from_cplx(z: &XComplex) -> Self {
        Dual::constant(T::from_cplx(z))
    }
    fn modulus(&self) -> XReal {
        self.v.modulus()
    }
    fn prec(&self) -> usize {
        self.v.prec()
    }
    fn value(&self) -> XComplex {
        self.v.value()
    }
    fn rounded(&self, p: usize) -> Self {
        Dual::new(self.v.rounded(p), self.d.rounded(p))
    }
    fn is_exact_nonpos_int(&self) -> bool {
        self.v.is_exact_nonpos_int() && self.d.is_zero_value()
    }
}

impl<T: Analytic> Analytic for Dual<T> {
    fn exp(&self) -> Self {
        let e = self.v.exp();
        self.chain(e.clone(), e)
    }
    fn ln(&self) -> Self {
        let l = self.v.ln();
        let r = self.v.one_like() / &self.v;
        self.chain(l, r)
    }
    fn sqrt(&self) -> Self {
        let s = self.v.sqrt();
        let two = T::int_p(2, self.prec());
        let r = self.v.one_like() / &(s.clone() * &two);
        self.chain(s, r)
    }
    fn sin(&self) -> Self {
        self.chain(self.v.sin(), self.v.cos())
    }
    fn cos(&self) -> Self {
        self.chain(self.v.cos(), -self.v.sin())
    }
}

/// Relative distance |a−b| / max(|a|,|b|), or the absolute distance when
/// both are below `floor`.
pub fn rel_diff(a: &XComplex, b: &XComplex, floor: &XReal) -> XReal {
    let d = (a - b).abs();
    let s = a.abs().max(&b.abs()).max(floor);
    if s.is_zero() {
        d
    } else {
        d / s
    }
}

/// Exact rational → extended precision.
pub fn rational_to_xreal(num: &BigInt, den: &BigInt, p: usize) -> XReal {
    if den.is_one() {
        return XReal::from_bigint(num, p);
    }
    let sign = num.is_negative() != den.is_negative();
    let q = XReal::from_bigint(&num.abs(), p + 64) / XReal::from_bigint(&den.abs(), p + 64);
    let q = q.with_prec(p);
    if sign && !num.is_zero() {
        -q
    } else {
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_roundtrip() {
        for x in [1.0, -2.5, 0.1, 1e-300, 6.02e23, -7.25e-5] {
            assert_eq!(XReal::from_f64(x, 256).to_f64(), x);
        }
    }

    #[test]
    fn decimal_input_is_exact_decimal() {
        let a = XReal::from_f64_dec(0.3, 256);
        let ten = XReal::from_i64(10, 256);
        let three = XReal::from_i64(3, 256);
        assert!((a * ten - three).abs() < XReal::one(256).ldexp(-250));
    }

    #[test]
    fn sci_formatting() {
        let p = 256;
        assert_eq!(XReal::from_i64(1, p).to_sci(5), "1.0000e0");
        assert_eq!(XReal::from_f64(-0.125, p).to_sci(3), "-1.25e-1");
        assert_eq!(XReal::from_i64(999999, p).to_sci(3), "1.00e6");
        let third = XReal::one(p) / XReal::from_i64(3, p);
        assert_eq!(third.to_sci(30), format!("3.{}e-1", "3".repeat(29)));
        assert_eq!(XReal::zero(p).to_sci(4), "0e0");
    }

    #[test]
    fn complex_elementary() {
        let p = 256;
        let z = XComplex::new(XReal::from_f64(0.3, p), XReal::from_f64(-1.7, p));
        let back = z.ln().exp();
        assert!((back - &z).abs() < XReal::one(p).ldexp(-240));
        let s = z.sqrt();
        assert!((s.clone() * &s - &z).abs() < XReal::one(p).ldexp(-240));
        let sc = z.sin() * z.sin() + z.cos() * z.cos();
        assert!((sc - XComplex::one(p)).abs() < XReal::one(p).ldexp(-235));
    }

    #[test]
    fn dual_derivative_of_quotient() {
        let p = 128;
        let x = Dual::variable(XReal::from_f64(2.0, p));
        let one = Dual::constant(XReal::one(p));
        let f = one / &(x.clone() * &x); // 1/x², f' = -2/x³ = -0.25
        assert_eq!(f.d.to_f64(), -0.25);
        let g = Analytic::exp(&x);
        assert!((g.d - g.v).abs() < XReal::one(p).ldexp(-120));
    }
}
