//! Limit kernels: the (deformed) discrete Bessel kernel on ℤ, the deformed
//! z-measure kernel on ℤ' = ℤ + 1/2 and the deformed Gamma kernel.

mod bessel;
mod gamma;
mod series;
mod zmeasure;

pub use bessel::{deformed_bessel_kernel, discrete_bessel_kernel};
pub use gamma::{
    f_fn, four_h, four_h_gamma_only, g_fn, gamma_deformed_kernel, gamma_kernel, gamma_kernel_four_h,
    gamma_kernel_literal, gamma_limit_report, h_dx, h_fn, psi_pair_check, psi_asymptotic_check, AsymptoticRow,
    GammaDeformParams, GammaLimitReport, PsiPairRow,
};
pub use zmeasure::{phi, psi, psi_dx, psi_integral, zmeas_deformed_kernel};

use crate::error::{Error, Result};
use crate::xprec::{XComplex, XReal};

/// Admissible series of (z, z').
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Series {
    Principal,
    Complementary,
    Degenerate,
}

impl Series {
    pub fn name(&self) -> &'static str {
        match self {
            Series::Principal => "principal",
            Series::Complementary => "complementary",
            Series::Degenerate => "degenerate",
        }
    }
}

/// z-measure parameters (z, z', ξ), classified at construction.
#[derive(Clone, Debug)]
pub struct ZParams {
    z: XComplex,
    zp: XComplex,
    xi: XReal,
    series: Series,
}

fn classify(z: &XComplex, zp: &XComplex) -> Option<Series> {
    if !z.im.is_zero() {
        return (zp.re == z.re && zp.im == -&z.im).then_some(Series::Principal);
    }
    if !zp.im.is_zero() {
        return None;
    }
    let (a, b) = (&z.re, &zp.re);
    if a.is_integer() {
        let ok = !a.is_zero() && a.is_negative() == b.is_negative() && !b.is_zero() && {
            let one = XReal::one(a.prec());
            b.abs() > &a.abs() - &one
        };
        return ok.then_some(Series::Degenerate);
    }
    (!b.is_integer() && a.floor() == b.floor()).then_some(Series::Complementary)
}

impl ZParams {
    pub fn new(z: XComplex, zp: XComplex, xi: XReal) -> Result<Self> {
        let one = XReal::one(xi.prec());
        if !xi.is_positive() || xi >= one {
            return Err(Error::InvalidParameter(format!("xi = {} outside (0,1)", xi.to_f64())));
        }
        let series = classify(&z, &zp).ok_or_else(|| {
            Error::InvalidParameter(format!("(z, z') = ({z}, {zp}) is not admissible"))
        })?;
        Ok(Self { z, zp, xi, series })
    }

    /// Principal series z' = z̄ from f64 parts (decimal inputs).
    pub fn principal(re: f64, im: f64, xi: f64, p: usize) -> Result<Self> {
        let z = XComplex::new(XReal::from_f64_dec(re, p), XReal::from_f64_dec(im, p));
        Self::new(z.clone(), z.conj(), XReal::from_f64_dec(xi, p))
    }

    /// Real pair (complementary or degenerate) from f64 (decimal inputs).
    pub fn real(z: f64, zp: f64, xi: f64, p: usize) -> Result<Self> {
        Self::new(
            XComplex::real(XReal::from_f64_dec(z, p)),
            XComplex::real(XReal::from_f64_dec(zp, p)),
            XReal::from_f64_dec(xi, p),
        )
    }

    pub fn z(&self) -> &XComplex {
        &self.z
    }
    pub fn zp(&self) -> &XComplex {
        &self.zp
    }
    pub fn xi(&self) -> &XReal {
        &self.xi
    }
    pub fn series(&self) -> Series {
        self.series
    }

    /// Same (z, z'), another ξ.
    pub fn with_xi(&self, xi: XReal) -> Result<Self> {
        Self::new(self.z.clone(), self.zp.clone(), xi)
    }

    /// (z', z, ξ).
    pub fn swapped(&self) -> Self {
        Self {
            z: self.zp.clone(),
            zp: self.z.clone(),
            xi: self.xi.clone(),
            series: self.series,
        }
    }

    pub fn with_prec(&self, p: usize) -> Self {
        let c = |w: &XComplex| XComplex::new(w.re.with_prec(p), w.im.with_prec(p));
        Self {
            z: c(&self.z),
            zp: c(&self.zp),
            xi: self.xi.with_prec(p),
            series: self.series,
        }
    }

    pub(crate) fn describe(&self) -> String {
        format!("z={} z'={} xi={} ({})", self.z, self.zp, self.xi.to_sci(20), self.series.name())
    }
}

/// A point of ℤ' = ℤ + 1/2, stored as its integer part n (value n + 1/2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i64);

impl HalfInt {
    pub fn from_floor(n: i64) -> Self {
        HalfInt(n)
    }

    pub fn new(v: &XReal) -> Result<Self> {
        let half = XReal::one(v.prec()).ldexp(-1);
        let n = v - &half;
        match n.round_i64() {
            Some(k) if n.is_integer() => Ok(HalfInt(k)),
            _ => Err(Error::InvalidParameter(format!("{} is not in Z+1/2", v.to_f64()))),
        }
    }

    pub fn from_f64(v: f64) -> Result<Self> {
        Self::new(&XReal::from_f64(v, 64))
    }

    pub fn floor(&self) -> i64 {
        self.0
    }

    pub fn value(&self, p: usize) -> XReal {
        XReal::from_i64(2 * self.0 + 1, p).ldexp(-1)
    }

    pub fn to_f64(&self) -> f64 {
        self.0 as f64 + 0.5
    }

    /// self + m
    pub fn shift(&self, m: i64) -> Self {
        HalfInt(self.0 + m)
    }
}

/// Principal square root of a product expected to be positive real.
pub(crate) fn positive_sqrt<T: crate::xprec::Analytic>(g: &T, what: &str) -> Result<T> {
    let v = g.value();
    if v.is_zero() {
        return Ok(g.zero_like());
    }
    let p = g.prec();
    let tol = v.abs().ldexp(-(p as i64) / 2);
    if v.re.is_negative() || v.im.abs() > tol {
        return Err(Error::Branch(format!("{what} = {v} is not positive real")));
    }
    Ok(g.sqrt())
}

/// Real part of a value that should be real; the imaginary residue is
/// compared with `scale`, the magnitude of the terms it came from.
pub(crate) fn real_part(v: &XComplex, scale: &XReal, what: &str) -> Result<XReal> {
    let p = v.prec();
    let tol = scale.ldexp(-(p as i64) / 2) + v.re.abs().ldexp(-(p as i64) / 2);
    if v.im.abs() > tol {
        return Err(Error::Branch(format!(
            "{what}: imaginary residue {} vs scale {}",
            v.im.to_sci(6),
            scale.to_sci(6)
        )));
    }
    Ok(v.re.clone())
}

pub(crate) fn key(x: &XReal) -> String {
    x.to_sci(x.prec() / 3 + 8)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        let p = 128;
        assert_eq!(ZParams::principal(0.3, 0.4, 0.5, p).unwrap().series(), Series::Principal);
        assert_eq!(ZParams::real(0.2, 0.6, 0.5, p).unwrap().series(), Series::Complementary);
        assert_eq!(ZParams::real(-1.8, -1.2, 0.5, p).unwrap().series(), Series::Complementary);
        assert_eq!(ZParams::real(4.0, 4.5, 0.3, p).unwrap().series(), Series::Degenerate);
        assert_eq!(ZParams::real(-3.0, -2.5, 0.3, p).unwrap().series(), Series::Degenerate);
        assert!(ZParams::real(0.2, 1.6, 0.5, p).is_err());
        assert!(ZParams::real(4.0, 2.5, 0.3, p).is_err());
        assert!(ZParams::real(0.0, 0.5, 0.3, p).is_err());
        assert!(ZParams::real(0.2, 0.6, 1.0, p).is_err());
        let z = XComplex::new(XReal::from_f64(0.3, p), XReal::from_f64(0.4, p));
        assert!(ZParams::new(z.clone(), z, XReal::from_f64(0.5, p)).is_err());
    }

    #[test]
    fn half_integers() {
        let h = HalfInt::from_f64(-2.5).unwrap();
        assert_eq!(h.floor(), -3);
        assert_eq!(h.to_f64(), -2.5);
        assert!(HalfInt::from_f64(1.0).is_err());
        assert_eq!(HalfInt::new(&h.value(128)).unwrap(), h);
    }
}
