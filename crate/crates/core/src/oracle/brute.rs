//! Correlation functions by summing over partitions.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::partition::{enumerate_partitions, partition_dim, Partition, MAX_PARTITION_SIZE};
use crate::error::{Error, Result};
use crate::kernels::{HalfInt, ZParams};
use crate::specfun::gen_pochhammer;
use crate::xprec::{rational_to_xreal, XComplex, XReal};

/// Truncated correlation value with the neglected mass.
#[derive(Clone, Debug)]
pub struct CorrEstimate {
    pub value: XReal,
    /// Total (unnormalized) mass of the truncated sum.
    pub mass: XReal,
    /// Bound on (or estimate of) the mass beyond the cutoff.
    pub tail: XReal,
}

fn guard(cutoff: usize) -> Result<()> {
    if cutoff > MAX_PARTITION_SIZE {
        return Err(Error::Guard(format!("cutoff {cutoff} > {MAX_PARTITION_SIZE}")));
    }
    Ok(())
}

/// Is integer point x in {λ_i - i : i ≥ 1}?
fn in_config(lam: &Partition, x: i64) -> bool {
    let l = lam.len() as i64;
    x < -l || (1..=l).any(|i| lam.part(i as usize) as i64 - i == x)
}

fn factorial(n: usize) -> BigUint {
    (2..=n).fold(BigUint::one(), |a, k| a * k)
}

/// Σ_{|λ| ≤ cutoff} e^{-α} α^{|λ|} (dim λ/|λ|!)² 1{points ⊂ {λ_i - i}}.
/// The Plancherel weights are summed exactly per size; `tail` is the
/// Poisson mass e^{-α} Σ_{n > cutoff} α^n/n!.
pub fn brute_plancherel_corr(alpha: &XReal, points: &[i64], cutoff: usize) -> Result<CorrEstimate> {
    guard(cutoff)?;
    if alpha.is_negative() {
        return Err(Error::InvalidParameter("alpha must be >= 0".into()));
    }
    let p = alpha.prec();
    let parts = enumerate_partitions(cutoff)?;
    let mut hit = vec![BigRational::zero(); cutoff + 1];
    let mut all = vec![BigRational::zero(); cutoff + 1];
    for lam in &parts {
        let n = lam.size();
        let d = BigInt::from(partition_dim(lam));
        let f = BigInt::from(factorial(n));
        let w = BigRational::new(&d * &d, &f * &f);
        if points.iter().all(|&x| in_config(lam, x)) {
            hit[n] += &w;
        }
        all[n] += w;
    }
    let e = (-alpha).exp();
    let mut value = XReal::zero(p);
    let mut mass = XReal::zero(p);
    let mut an = XReal::one(p);
    for n in 0..=cutoff {
        let q = |r: &BigRational| rational_to_xreal(r.numer(), r.denom(), p);
        value = value + &an * &q(&hit[n]);
        mass = mass + &an * &q(&all[n]);
        an = an * alpha;
    }
    // Poisson tail, summed until negligible
    let mut term = e.clone();
    for k in 1..=cutoff {
        term = term * alpha / XReal::from_i64(k as i64, p);
    }
    let mut tail = XReal::zero(p);
    let eps = XReal::one(p).ldexp(-(p as i64));
    let mut k = cutoff + 1;
    loop {
        term = term * alpha / XReal::from_i64(k as i64, p);
        tail = tail + &term;
        if term <= &eps * &tail || term.is_zero() {
            break;
        }
        k += 1;
    }
    Ok(CorrEstimate {
        value: value * &e,
        mass: mass * &e,
        tail,
    })
}

/// Deformation of a z-measure for the brute-force oracle.
#[derive(Clone, Copy, Debug)]
pub enum ZDeform<'a> {
    /// Kernel-coordinate points u_i ∉ ℤ'; row factor ∏_j ((x_j-u)/(½-j-u))²,
    /// x_j = λ_j - j + ½ (equal to 1 past the length).
    Regularized(&'a [XReal]),
    /// Pairs (u_i, v_i); factor ∏_{j ≤ l(λ)} (λ_j-j-u_i+z)(λ_j-j-v_i+z')
    /// transcribed literally, complex in general.
    Literal(&'a [(XComplex, XComplex)]),
}

/// Is the half-integer x in {λ_i - i + ½}?
fn in_half_config(lam: &Partition, x: HalfInt) -> bool {
    // λ_i - i + ½ = x  ⇔  λ_i - i = floor(x)
    in_config(lam, x.floor())
}

fn deform_factor(lam: &Partition, d: &ZDeform<'_>, zp: &ZParams, p: usize) -> Result<XComplex> {
    let mut f = XComplex::one(p);
    let half = XReal::one(p).ldexp(-1);
    match d {
        ZDeform::Regularized(us) => {
            for u in us.iter() {
                for j in 1..=lam.len() {
                    let x = XReal::from_i64(lam.part(j) as i64 - j as i64, p) + &half - u;
                    let x0 = &half - &XReal::from_i64(j as i64, p) - u;
                    let r = x / x0;
                    f = f.scale(&(&r * &r));
                }
            }
        }
        ZDeform::Literal(pairs) => {
            for (u, v) in pairs.iter() {
                for j in 1..=lam.len() {
                    let b = XComplex::real(XReal::from_i64(lam.part(j) as i64 - j as i64, p));
                    f = f * &((b.clone() - u + zp.z()) * &(b - v + zp.zp()));
                }
            }
        }
    }
    Ok(f)
}

/// Truncated, normalized z-measure correlation of half-integer points:
/// Σ_{|λ| ≤ cutoff, points ⊂ 𝔖(λ)} M(λ) / Σ_{|λ| ≤ cutoff} M(λ), with
/// M(λ) = (1-ξ)^{zz'} ξ^{|λ|} (z)_λ (z')_λ (dim λ/|λ|!)² times the
/// deformation factor. Weights must be real and nonnegative.
pub fn brute_zmeasure_corr(
    zp: &ZParams,
    points: &[HalfInt],
    cutoff: usize,
    deform: Option<ZDeform<'_>>,
) -> Result<CorrEstimate> {
    guard(cutoff)?;
    let p = zp.xi().prec();
    let xi = zp.xi();
    let one = XReal::one(p);
    let zz = zp.z().clone() * zp.zp();
    let norm = (zz.clone() * &XComplex::real((&one - xi).ln())).exp();
    let parts = enumerate_partitions(cutoff)?;
    let tol = one.ldexp(-(p as i64) / 2);
    let mut hit = XReal::zero(p);
    let mut mass = XReal::zero(p);
    let mut last_block = XReal::zero(p);
    let mut xin = vec![one.clone()];
    for _ in 0..cutoff {
        let next = xin.last().expect("nonempty") * xi;
        xin.push(next);
    }
    for lam in &parts {
        let n = lam.size();
        let d = BigInt::from(partition_dim(lam));
        let f = BigInt::from(factorial(n));
        let pl = rational_to_xreal(&(&d * &d), &(&f * &f), p);
        let mut w = gen_pochhammer(zp.z(), lam) * &gen_pochhammer(zp.zp(), lam) * &norm;
        if let Some(df) = &deform {
            w = w * &deform_factor(lam, df, zp, p)?;
        }
        let w = w.scale(&(pl * &xin[n]));
        let scale = w.abs();
        if w.im.abs() > &tol * &scale.max(&tol) || w.re.is_negative() && w.re.abs() > &tol * &scale {
            return Err(Error::NonPositiveWeight(format!("weight of {:?} is {w}", lam.parts())));
        }
        let wr = w.re;
        if points.iter().all(|&x| in_half_config(lam, x)) {
            hit = hit + &wr;
        }
        if n == cutoff {
            last_block = last_block + &wr;
        }
        mass = mass + &wr;
    }
    let tail = if deform.is_none() {
        (&one - &mass).abs()
    } else {
        &last_block * xi / (&one - xi) / &mass
    };
    Ok(CorrEstimate {
        value: hit / &mass,
        mass,
        tail,
    })
}

/// Positivity of the literal deformation product ∏(x-u_i+z)(x-v_i+z') on
/// the integer window [lo, hi]; returns the offending x values.
pub fn literal_positivity_violations(zp: &ZParams, pairs: &[(XComplex, XComplex)], lo: i64, hi: i64) -> Vec<i64> {
    let p = zp.xi().prec();
    (lo..=hi)
        .filter(|&x| {
            let xc = XComplex::real(XReal::from_i64(x, p));
            let mut f = XComplex::one(p);
            for (u, v) in pairs {
                f = f * &((xc.clone() - u + zp.z()) * &(xc.clone() - v + zp.zp()));
            }
            let tol = f.abs().ldexp(-(p as i64) / 2);
            !f.re.is_positive() || f.im.abs() > tol
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plancherel_mass_and_alpha_zero() {
        let p = 128;
        let e = brute_plancherel_corr(&XReal::from_f64(0.5, p), &[], 14).unwrap();
        assert!((e.mass.to_f64() + e.tail.to_f64() - 1.0).abs() < 1e-30);
        let z = brute_plancherel_corr(&XReal::zero(p), &[-1, -3], 5).unwrap();
        assert_eq!(z.value.to_f64(), 1.0);
        let z = brute_plancherel_corr(&XReal::zero(p), &[0], 5).unwrap();
        assert_eq!(z.value.to_f64(), 0.0);
    }

    #[test]
    fn zmeasure_mass() {
        let p = 128;
        let zp = ZParams::real(0.2, 0.6, 0.2, p).unwrap();
        let e = brute_zmeasure_corr(&zp, &[], 20, None).unwrap();
        assert!((e.mass.to_f64() - 1.0).abs() < 1e-10, "{}", e.mass.to_f64());
    }

    #[test]
    fn literal_product_can_be_negative() {
        let p = 128;
        let zp = ZParams::real(0.2, 0.6, 0.2, p).unwrap();
        // v = u + z' - z - 1/2
        let u = XComplex::real(XReal::from_f64_dec(0.3, p));
        let v = u.clone() + zp.zp() - zp.z() - &XComplex::real(XReal::from_f64(0.5, p));
        let bad = literal_positivity_violations(&zp, &[(u, v)], -50, 50);
        assert!(!bad.is_empty());
    }
}
