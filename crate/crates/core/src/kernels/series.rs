//! Truncated expansions Σ_{e,n} c_{e,n} E^e ε^n, with E a formal symbol
//! (E = ε^{(z'-z)/2} in use) and n < m.

use std::collections::BTreeMap;

use crate::xprec::Field;

/// Product of two ε-series truncated at length m.
pub(crate) fn tmul<T: Field>(a: &[T], b: &[T], m: usize) -> Vec<T> {
    let mut r: Vec<T> = (0..m).map(|_| a[0].zero_like()).collect();
    for (i, x) in a.iter().enumerate().take(m) {
        for (j, y) in b.iter().enumerate().take(m - i) {
            r[i + j] = r[i + j].clone() + &(x.clone() * y);
        }
    }
    r
}

#[derive(Clone, Debug)]
pub(crate) struct ESeries<T> {
    m: usize,
    p: usize,
    terms: BTreeMap<i32, Vec<T>>,
}

impl<T: Field> ESeries<T> {
    pub fn zero(m: usize, p: usize) -> Self {
        Self { m, p, terms: BTreeMap::new() }
    }

    pub fn one(m: usize, p: usize) -> Self {
        let mut c: Vec<T> = (0..m).map(|_| T::zero_p(p)).collect();
        c[0] = T::one_p(p);
        Self::from_terms(m, p, [(0, c)])
    }

    pub fn from_terms(m: usize, p: usize, t: impl IntoIterator<Item = (i32, Vec<T>)>) -> Self {
        Self { m, p, terms: t.into_iter().collect() }
    }

    pub fn coeff(&self, e: i32, n: usize) -> T {
        self.terms.get(&e).map_or_else(|| T::zero_p(self.p), |c| c[n].clone())
    }

    pub fn exponents(&self) -> impl Iterator<Item = &i32> {
        self.terms.keys()
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> ESeries<U> {
        ESeries {
            m: self.m,
            p: self.p,
            terms: self.terms.iter().map(|(e, c)| (*e, c.iter().map(&f).collect())).collect(),
        }
    }

    fn axpy(&self, o: &Self, sign: bool) -> Self {
        let mut terms = self.terms.clone();
        for (e, c) in &o.terms {
            let slot = terms.entry(*e).or_insert_with(|| (0..self.m).map(|_| T::zero_p(self.p)).collect());
            for (s, x) in slot.iter_mut().zip(c) {
                *s = if sign { s.clone() + x } else { s.clone() - x };
            }
        }
        Self { m: self.m, p: self.p, terms }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.axpy(o, true)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.axpy(o, false)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero(self.m, self.p);
        for (ea, a) in &self.terms {
            for (eb, b) in &o.terms {
                let t = Self::from_terms(self.m, self.p, [(ea + eb, tmul(a, b, self.m))]);
                r = r.add(&t);
            }
        }
        r
    }
}

/// Determinant by cofactor expansion along the first row.
pub(crate) fn edet<T: Field>(rows: &[Vec<ESeries<T>>], m: usize, p: usize) -> ESeries<T> {
    let n = rows.len();
    if n == 0 {
        return ESeries::one(m, p);
    }
    let mut acc = ESeries::zero(m, p);
    for j in 0..n {
        let minor: Vec<Vec<ESeries<T>>> = rows[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| v.clone()).collect())
            .collect();
        let t = rows[0][j].mul(&edet(&minor, m, p));
        acc = if j % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xprec::XReal;

    #[test]
    fn products_and_determinant() {
        let p = 64;
        let r = |x: i64| XReal::from_i64(x, p);
        // (E + 2ε)(E^{-1} - ε) = 1 - Eε + 2E^{-1}ε - 2ε²
        let a = ESeries::from_terms(3, p, [(1, vec![r(1), r(0), r(0)]), (0, vec![r(0), r(2), r(0)])]);
        let b = ESeries::from_terms(3, p, [(-1, vec![r(1), r(0), r(0)]), (0, vec![r(0), r(-1), r(0)])]);
        let c = a.mul(&b);
        assert_eq!(c.coeff(0, 0).to_f64(), 1.0);
        assert_eq!(c.coeff(0, 2).to_f64(), -2.0);
        assert_eq!(c.coeff(1, 1).to_f64(), -1.0);
        assert_eq!(c.coeff(-1, 1).to_f64(), 2.0);
        let d = edet(&[vec![a.clone(), b.clone()], vec![b.clone(), a.clone()]], 3, p);
        let want = a.mul(&a).sub(&b.mul(&b));
        for e in -2..=2 {
            for n in 0..3 {
                assert_eq!(d.coeff(e, n).to_f64(), want.coeff(e, n).to_f64());
            }
        }
    }
}
