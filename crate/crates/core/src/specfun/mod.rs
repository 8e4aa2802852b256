//! Special functions in extended precision.

pub mod bessel;
pub mod gamma;
pub mod hyper;
pub mod quad;

pub use bessel::{bessel_j, bessel_j_series, bessel_l, bessel_l_series, BesselEvaluator, BesselParams};
pub use gamma::{digamma, gamma_fn, log_gamma, pochhammer, rgamma, Special};
pub use hyper::{hyp2f1_neg, hyp2f1_reg, hyp2f1_reg_neg, hyp_pfq};

use crate::oracle::Partition;
use crate::xprec::Field;

/// (a)_λ = Π_{(i,j)∈λ} (a - i + j), box by box.
pub fn gen_pochhammer<T: Field>(a: &T, lam: &Partition) -> T {
    let p = a.prec();
    let mut acc = T::one_p(p);
    for (i, &row) in lam.parts().iter().enumerate() {
        for j in 1..=row {
            acc = acc * &(a.clone() + &T::int_p(j as i64 - i as i64 - 1, p));
        }
    }
    acc
}

/// (a)_λ = Π_i (a - i + 1)_{λ_i}, row by row.
pub fn gen_pochhammer_rows<T: Field>(a: &T, lam: &Partition) -> T {
    let p = a.prec();
    lam.parts().iter().enumerate().fold(T::one_p(p), |acc, (i, &row)| {
        acc * &pochhammer(&(a.clone() - &T::int_p(i as i64, p)), row)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xprec::{XComplex, XReal};

    #[test]
    fn pochhammer_examples() {
        let p = 128;
        assert_eq!(pochhammer(&XReal::from_f64(5.2, p), 0).to_f64(), 1.0);
        assert_eq!(pochhammer(&XReal::from_i64(2, p), 3).to_f64(), 24.0);
        assert_eq!(pochhammer(&XReal::from_f64(-1.5, p), 2).to_f64(), 0.75);
    }

    #[test]
    fn gen_pochhammer_examples() {
        let p = 128;
        let a = XReal::from_i64(3, p);
        assert_eq!(gen_pochhammer(&a, &Partition::new(vec![]).unwrap()).to_f64(), 1.0);
        let x = XComplex::new(XReal::from_f64(0.3, p), XReal::from_f64(-1.0, p));
        let one = Partition::new(vec![1]).unwrap();
        assert!((gen_pochhammer(&x, &one) - x.clone()).abs().is_zero());
        let l21 = Partition::new(vec![2, 1]).unwrap();
        assert_eq!(gen_pochhammer(&a, &l21).to_f64(), 24.0);
        assert_eq!(gen_pochhammer_rows(&a, &l21).to_f64(), 24.0);
    }
}
