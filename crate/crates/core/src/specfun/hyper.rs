//! Generalized hypergeometric series and the Gauss function on (-∞, 0).

use crate::error::{Error, Result};
use crate::specfun::gamma::Special;
use crate::xprec::{Field, XComplex, XReal};

const MAX_TERMS: usize = 200_000;

/// Index at which a series with these upper parameters terminates.
fn terminating_index<T: Field>(a: &[T]) -> Option<usize> {
    a.iter()
        .filter(|x| x.is_exact_nonpos_int())
        .filter_map(|x| x.value().re.round_i64())
        .map(|m| (-m) as usize)
        .min()
}

fn small(p: usize) -> XReal {
    XReal::one(p).ldexp(-(p as i64) - 8)
}

/// Σ_n Π(a_i)_n / Π(b_j)_n · w^n/n!.
///
/// Terminating series are summed up to the terminating index; otherwise
/// summation stops once three consecutive terms are negligible.
pub fn hyp_pfq<T: Field>(a: &[T], b: &[T], w: &T) -> Result<T> {
    let p = w.prec();
    if let Some(bad) = b.iter().find(|x| x.is_nonpos_int()) {
        return Err(Error::Pole(format!("lower parameter {:?}", bad.value())));
    }
    let term_n = terminating_index(a);
    if term_n.is_none() {
        let conv = a.len() <= b.len() || (a.len() == b.len() + 1 && w.modulus() < XReal::one(p));
        if !conv {
            return Err(Error::Divergence(format!(
                "{}F{} at |w| = {}",
                a.len(),
                b.len(),
                w.modulus().to_f64()
            )));
        }
    }
    let mut sum = T::one_p(p);
    let mut term = T::one_p(p);
    let eps = small(p);
    let mut quiet = 0;
    let mut n = 0usize;
    loop {
        if let Some(m) = term_n {
            if n >= m {
                return Ok(sum);
            }
        }
        let nn = T::int_p(n as i64, p);
        for ai in a {
            term = term * &(ai.clone() + &nn);
        }
        for bj in b {
            term = term / &(bj.clone() + &nn);
        }
        term = term * w / &T::int_p(n as i64 + 1, p);
        sum = sum + &term;
        n += 1;
        if term_n.is_none() {
            if term.modulus() <= &eps * &sum.modulus() || term.is_zero_value() {
                quiet += 1;
                if quiet >= 3 {
                    return Ok(sum);
                }
            } else {
                quiet = 0;
            }
        }
        if n > MAX_TERMS {
            return Err(Error::Divergence(format!("no convergence after {MAX_TERMS} terms")));
        }
    }
}

/// Regularized Gauss function F(A,B;C;w)/Γ(C), entire in C.
/// Direct series, |w| < 1 unless terminating.
pub fn hyp2f1_reg<T: Special>(a: &T, b: &T, c: &T, w: &T) -> Result<T> {
    let p = w.prec();
    let term_n = terminating_index(&[a.clone(), b.clone()]);
    if term_n.is_none() && w.modulus() >= XReal::one(p) {
        return Err(Error::Divergence(format!("2F1 at |w| = {}", w.modulus().to_f64())));
    }
    // 1/Γ(C+n) is computed where Re(C+n) >= 1 and carried down/up from there.
    let re_c = c.value().re.to_f64();
    let n0 = if re_c >= 1.0 { 0 } else { (1.0 - re_c).ceil() as usize };
    let mut rg_down = Vec::with_capacity(n0 + 1);
    let mut r = (c.clone() + &T::int_p(n0 as i64, p)).rgamma();
    rg_down.push(r.clone());
    for n in (0..n0).rev() {
        r = r * &(c.clone() + &T::int_p(n as i64, p));
        rg_down.push(r.clone());
    }
    rg_down.reverse();
    let mut rg_up = rg_down[n0].clone();
    let rg = |n: usize, up: &mut T| -> T {
        if n <= n0 {
            rg_down[n].clone()
        } else {
            *up = up.clone() / &(c.clone() + &T::int_p(n as i64 - 1, p));
            up.clone()
        }
    };
    let eps = small(p);
    let mut coef = T::one_p(p); // (A)_n (B)_n w^n / n!
    let mut sum = coef.clone() * &rg(0, &mut rg_up);
    let mut quiet = 0;
    let mut n = 0usize;
    loop {
        if let Some(m) = term_n {
            if n >= m {
                return Ok(sum);
            }
        }
        let nn = T::int_p(n as i64, p);
        coef = coef * &(a.clone() + &nn) * &(b.clone() + &nn) * w / &T::int_p(n as i64 + 1, p);
        n += 1;
        let t = coef.clone() * &rg(n, &mut rg_up);
        sum = sum + &t;
        // below n0 the terms can vanish identically (C a nonpositive
        // integer), so convergence is only judged past it
        if term_n.is_none() && n > n0 {
            if t.modulus() <= &eps * &sum.modulus() || t.is_zero_value() {
                quiet += 1;
                if quiet >= 3 {
                    return Ok(sum);
                }
            } else {
                quiet = 0;
            }
        }
        if n > MAX_TERMS {
            return Err(Error::Divergence(format!("no convergence after {MAX_TERMS} terms")));
        }
    }
}

/// Mapped arguments beyond this use the 1/w connection formula.
const PFAFF_LIMIT: f64 = 0.75;

/// Regularized F(A,B;C;w)/Γ(C) for real w <= 0.
///
/// Pfaff's transformation maps w to w/(w-1) ∈ [0,1); when that is close
/// to 1 the expansion at infinity is used instead (needs B-A ∉ ℤ).
pub fn hyp2f1_reg_neg<T: Special>(a: &T, b: &T, c: &T, w: &XReal) -> Result<T> {
    let p = w.prec();
    if w.is_positive() {
        return Err(Error::InvalidParameter(format!("hyp2f1_neg needs w <= 0, got {}", w.to_f64())));
    }
    let wt = T::from_real(w);
    if terminating_index(&[a.clone(), b.clone()]).is_some() || w.is_zero() {
        return hyp2f1_reg(a, b, c, &wt);
    }
    let one = XReal::one(p);
    let t = w / &(w - &one);
    let ba = (b.clone() - a).value();
    let ba_int = ba.im.is_zero() && ba.re.is_integer();
    if t.to_f64() <= PFAFF_LIMIT || ba_int {
        // (1-w)^{-A} F̃(A, C-B; C; t)
        let pre = (-(a.clone() * &T::from_real(&(&one - w).ln()))).exp();
        let f = hyp2f1_reg(a, &(c.clone() - b), c, &T::from_real(&t))?;
        return Ok(pre * &f);
    }
    let iw = T::from_real(&w.recip());
    let lnmw = T::from_real(&(-w).ln());
    let one_t = T::one_p(p);
    let half = |aa: &T, bb: &T| -> Result<T> {
        let g = (bb.clone() - aa).gamma()?;
        let pw = (-(aa.clone() * &lnmw)).exp();
        let f = hyp_pfq(
            &[aa.clone(), aa.clone() - c + &one_t],
            &[aa.clone() - bb + &one_t],
            &iw,
        )?;
        Ok(g * &pw * &bb.rgamma() * &(c.clone() - aa).rgamma() * &f)
    };
    Ok(half(a, b)? + &half(b, a)?)
}

/// F(a,b;c;w) for real w <= 0, c ∉ -ℕ.
pub fn hyp2f1_neg(a: &XComplex, b: &XComplex, c: &XComplex, w: &XReal) -> Result<XComplex> {
    if c.is_nonpos_int() {
        return Err(Error::Pole(format!("c = {c:?}")));
    }
    Ok(hyp2f1_reg_neg(a, b, c, w)? * c.gamma()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xprec::Dual;

    const P: usize = 256;

    fn c(re: f64, im: f64) -> XComplex {
        XComplex::new(XReal::from_f64_dec(re, P), XReal::from_f64_dec(im, P))
    }
    fn r(x: f64) -> XReal {
        XReal::from_f64_dec(x, P)
    }

    #[test]
    fn zero_upper_parameter_gives_one() {
        let v = hyp_pfq(&[c(0.0, 0.0), c(2.5, 1.0)], &[c(0.7, 0.0)], &c(0.9, 0.0)).unwrap();
        assert!((v - c(1.0, 0.0)).abs().is_zero());
    }

    #[test]
    fn two_f_zero_degree_one() {
        let (x, a) = (r(1.3), r(0.7));
        let v = hyp_pfq(&[r(-1.0), -x.clone()], &[], &(-a.recip())).unwrap();
        let expect = r(1.0) - &x / &a;
        assert!((v - expect).abs() < r(1.0).ldexp(-250));
    }

    #[test]
    fn log_identity() {
        let v = hyp_pfq(&[r(1.0), r(1.0)], &[r(2.0)], &r(0.5)).unwrap();
        let expect = -r(0.5).ln() / r(0.5);
        assert!((v - expect).abs() < r(1.0).ldexp(-245));
    }

    #[test]
    fn divergence_reported() {
        let e = hyp_pfq(&[r(0.5), r(0.5)], &[r(1.5)], &r(1.0));
        assert!(matches!(e, Err(Error::Divergence(_))));
        let e = hyp_pfq(&[r(0.5), r(0.5), r(1.0)], &[r(1.5)], &r(0.1));
        assert!(matches!(e, Err(Error::Divergence(_))));
    }

    #[test]
    fn neg_matches_direct_series() {
        let (a, b, cc) = (c(0.3, 0.0), c(0.7, 0.0), c(1.1, 0.0));
        for w in [-0.1, -0.5, -0.89] {
            let d = hyp_pfq(&[a.clone(), b.clone()], &[cc.clone()], &c(w, 0.0)).unwrap();
            let n = hyp2f1_neg(&a, &b, &cc, &r(w)).unwrap();
            assert!((d - n).abs() < r(1.0).ldexp(-240), "w={w}");
        }
    }

    #[test]
    fn connection_matches_pfaff() {
        // w = -5 maps to 5/6 > 3/4, so the connection branch runs; compare
        // against the Pfaff series evaluated directly.
        let (a, b, cc) = (c(0.3, 0.2), c(0.7, -0.1), c(1.1, 0.0));
        let w = r(-5.0);
        let conn = hyp2f1_reg_neg(&a, &b, &cc, &w).unwrap();
        let t = &w / &(&w - r(1.0));
        let pf = (&r(1.0) - &w).ln();
        let pre = (-(a.scale(&pf))).exp();
        let direct = pre * hyp2f1_reg(&a, &(&cc - &b), &cc, &XComplex::real(t)).unwrap();
        assert!((conn - direct).abs() < r(1.0).ldexp(-236));
    }

    #[test]
    fn terminating_neg() {
        // F(-2, b; c; w) = 1 + 2bw/c·(-1) ... exact quadratic
        let (b, cc, w) = (r(0.7), r(1.1), r(-3.0));
        let v = hyp2f1_neg(&c(-2.0, 0.0), &XComplex::real(b.clone()), &XComplex::real(cc.clone()), &w).unwrap();
        let t1 = r(-2.0) * &b * &w / &cc;
        let t2 = r(-2.0) * r(-1.0) * &b * (&b + r(1.0)) * &w * &w / (&cc * (&cc + r(1.0)) * r(2.0));
        let e = r(1.0) + t1 + t2;
        assert!((v.re - e).abs() < r(1.0).ldexp(-245));
    }

    #[test]
    fn regularized_at_pole_of_c() {
        // F̃(a,b;-1;w) = (a)_2(b)_2 w^2/2 · F(a+2,b+2;3;w)
        let (a, b, w) = (r(0.4), r(1.3), r(0.3));
        let lhs = hyp2f1_reg(&a, &b, &r(-1.0), &w).unwrap();
        let f = hyp_pfq(&[&a + r(2.0), &b + r(2.0)], &[r(3.0)], &w).unwrap();
        let rhs = &a * (&a + r(1.0)) * &b * (&b + r(1.0)) * &w * &w / r(2.0) * f;
        assert!((lhs - rhs).abs() < r(1.0).ldexp(-240));
    }

    #[test]
    fn dual_in_c_matches_finite_difference() {
        let (a, b, w) = (r(0.4), r(1.3), r(-0.6));
        let c0 = r(0.8);
        let d = hyp2f1_reg_neg(
            &Dual::constant(a.clone()),
            &Dual::constant(b.clone()),
            &Dual::variable(c0.clone()),
            &w,
        )
        .unwrap();
        let h = r(1.0).ldexp(-40);
        let fp = hyp2f1_reg_neg(&a, &b, &(&c0 + &h), &w).unwrap();
        let fm = hyp2f1_reg_neg(&a, &b, &(&c0 - &h), &w).unwrap();
        let fd = (fp - fm) / (h * r(2.0));
        assert!((d.d - fd).abs() < r(1.0).ldexp(-70));
    }
}
