//! Small dense determinants over any [`Field`].

use crate::xprec::{Field, XReal};

/// Determinant by Gaussian elimination with partial pivoting on the
/// modulus of the primal value. Works for dual numbers too: the derivative
/// part is carried through the same row operations.
pub fn det<T: Field>(m: &[Vec<T>]) -> T {
    let n = m.len();
    if n == 0 {
        return T::one_p(64);
    }
    let p = m[0][0].prec();
    let mut a: Vec<Vec<T>> = m.to_vec();
    let mut acc = T::one_p(p);
    for col in 0..n {
        let mut best = col;
        let mut best_mod = a[col][col].modulus();
        for (r, row) in a.iter().enumerate().skip(col + 1) {
            let md = row[col].modulus();
            if md > best_mod {
                best = r;
                best_mod = md;
            }
        }
        if best_mod.is_zero() {
            return laplace(&a[col..].iter().map(|r| r[col..].to_vec()).collect::<Vec<_>>()) * &acc;
        }
        if best != col {
            a.swap(best, col);
            acc = -acc;
        }
        let piv = a[col][col].clone();
        acc = acc * &piv;
        for r in col + 1..n {
            let f = a[r][col].clone() / &piv;
            for c in col + 1..n {
                let t = f.clone() * &a[col][c];
                a[r][c] = a[r][c].clone() - &t;
            }
        }
    }
    acc
}

/// Cofactor expansion along the first row. Exponential cost; used as an
/// oracle for small matrices and as a fallback when every pivot candidate
/// has zero primal value (dual determinants can still have a derivative).
pub fn laplace<T: Field>(m: &[Vec<T>]) -> T {
    let n = m.len();
    if n == 0 {
        return T::one_p(64);
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = m[0][0].zero_like();
    for j in 0..n {
        let minor: Vec<Vec<T>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let term = m[0][j].clone() * &laplace(&minor);
        acc = if j % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

/// Solve `A x = b` by partial-pivot elimination. `None` if singular.
pub fn solve<T: Field>(a: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let n = a.len();
    let mut m: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for col in 0..n {
        let best = (col..n).max_by(|&i, &j| {
            m[i][col]
                .modulus()
                .partial_cmp(&m[j][col].modulus())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if m[best][col].modulus().is_zero() {
            return None;
        }
        m.swap(best, col);
        let piv = m[col][col].clone();
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[r][col].clone() / &piv;
            for c in col..=n {
                let t = f.clone() * &m[col][c];
                m[r][c] = m[r][c].clone() - &t;
            }
        }
    }
    Some((0..n).map(|i| m[i][n].clone() / &m[i][i]).collect())
}

/// Max-modulus of a matrix, for scale-aware comparisons.
pub fn max_modulus<T: Field>(m: &[Vec<T>]) -> XReal {
    let p = m.first().and_then(|r| r.first()).map(|x| x.prec()).unwrap_or(64);
    m.iter()
        .flat_map(|r| r.iter())
        .fold(XReal::zero(p), |acc, x| acc.max(&x.modulus()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xprec::{Dual, XComplex};

    fn r(x: f64) -> XReal {
        XReal::from_f64(x, 128)
    }

    #[test]
    fn two_by_two() {
        let m = vec![vec![r(1.5), r(2.0)], vec![r(-3.0), r(0.25)]];
        assert_eq!(det(&m).to_f64(), 1.5 * 0.25 + 6.0);
        assert_eq!(laplace(&m).to_f64(), 1.5 * 0.25 + 6.0);
    }

    #[test]
    fn pivoting_matches_laplace_complex() {
        let p = 128;
        let c = |a: f64, b: f64| XComplex::new(XReal::from_f64(a, p), XReal::from_f64(b, p));
        let m = vec![
            vec![c(0.0, 0.0), c(1.0, 2.0), c(3.0, -1.0)],
            vec![c(2.0, 0.5), c(-1.0, 0.0), c(0.5, 0.5)],
            vec![c(1.0, 1.0), c(0.0, -2.0), c(4.0, 0.0)],
        ];
        let d1 = det(&m);
        let d2 = laplace(&m);
        assert!((d1 - d2).abs() < XReal::one(p).ldexp(-120));
    }

    #[test]
    fn dual_with_zero_value_column() {
        // det [[x, 1], [x, 2]] = x; at x = 0 the value is 0 and the derivative 1.
        let x = Dual::variable(r(0.0));
        let one = Dual::constant(r(1.0));
        let two = Dual::constant(r(2.0));
        let m = vec![vec![x.clone(), one], vec![x, two]];
        let d = det(&m);
        assert_eq!(d.v.to_f64(), 0.0);
        assert_eq!(d.d.to_f64(), 1.0);
    }

    #[test]
    fn solve_small() {
        let a = vec![vec![r(2.0), r(1.0)], vec![r(1.0), r(3.0)]];
        let b = vec![r(3.0), r(5.0)];
        let x = solve(&a, &b).unwrap();
        assert!((x[0].to_f64() - 0.8).abs() < 1e-15);
        assert!((x[1].to_f64() - 1.4).abs() < 1e-15);
    }
}
