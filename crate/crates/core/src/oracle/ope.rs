//! Finite orthogonal polynomial ensembles: correlations by direct
//! summation of the squared Vandermonde, and exact sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::christoffel::{deformed_kernel, deformed_weight, EnsembleSpec};
use crate::error::{Error, Result};
use crate::xprec::{PrecisionContext, XReal};

/// Largest N for the subset enumeration.
pub const MAX_BRUTE_N: usize = 3;

fn subsets(n: usize, m: usize, start: usize, cur: &mut Vec<usize>, out: &mut dyn FnMut(&[usize])) {
    if cur.len() == n {
        out(cur);
        return;
    }
    for i in start..m {
        cur.push(i);
        subsets(n, m, i + 1, cur, out);
        cur.pop();
    }
}

/// ρ(points) for the N-point ensemble ∝ Δ(x)² ∏ ω^k(x_i), by summing the
/// joint law over all N-subsets of {0..cutoff}.
pub fn ope_correlation_brute(spec: &EnsembleSpec, points: &[u64], cutoff: u64, bits: usize) -> Result<XReal> {
    let n = spec.n;
    if n > MAX_BRUTE_N {
        return Err(Error::Guard(format!("N = {n} > {MAX_BRUTE_N} for subset enumeration")));
    }
    let fam = spec.family.with_prec(bits);
    let m = cutoff as usize + 1;
    let w: Vec<XReal> = (0..m as u64).map(|x| deformed_weight(&fam, &spec.deform, x)).collect();
    let mut total = XReal::zero(bits);
    let mut hit = XReal::zero(bits);
    subsets(n, m, 0, &mut Vec::new(), &mut |s: &[usize]| {
        let mut v = XReal::one(bits);
        for (i, &a) in s.iter().enumerate() {
            v = v * &w[a];
            for &b in &s[..i] {
                let d = XReal::from_i64(a as i64 - b as i64, bits);
                v = v * &d * &d;
            }
        }
        if points.iter().all(|q| s.contains(&(*q as usize))) {
            hit = &hit + &v;
        }
        total = &total + &v;
    });
    Ok(hit / total)
}

/// Sequential sampler for the rank-N projection kernel of an ensemble,
/// restricted to {0..T}.
#[derive(Clone, Debug)]
pub struct OpeSampler {
    n: usize,
    /// K(x,y) on the window, row-major.
    k: Vec<f64>,
    t: usize,
}

/// Allowed trace deficit of the truncated kernel.
const TRACE_TOL: f64 = 1e-6;
/// Allowed drift of the renormalized conditional mass per step.
const DRIFT_TOL: f64 = 1e-9;

impl OpeSampler {
    pub fn new(spec: &EnsembleSpec, truncation: u64, ctx: &PrecisionContext) -> Result<Self> {
        let kh = deformed_kernel(spec, ctx)?;
        let t = truncation as usize + 1;
        let p = ctx.bits();
        let pts: Vec<XReal> = (0..t as i64).map(|x| XReal::from_i64(x, p)).collect();
        let mut k = vec![0.0; t * t];
        for i in 0..t {
            for j in i..t {
                let v = kh.eval(&pts[i], &pts[j])?.to_f64();
                k[i * t + j] = v;
                k[j * t + i] = v;
            }
        }
        let trace: f64 = (0..t).map(|i| k[i * t + i]).sum();
        if (trace - spec.n as f64).abs() > TRACE_TOL {
            return Err(Error::Truncation(format!(
                "kernel trace on [0,{truncation}] is {trace}, expected {}",
                spec.n
            )));
        }
        Ok(Self { n: spec.n, k, t })
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.t).map(|i| self.k[i * self.t + i]).collect()
    }

    /// One configuration (sorted), drawn by the chain rule with Schur
    /// complement updates.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Result<Vec<u64>> {
        let t = self.t;
        let mut k = self.k.clone();
        let mut out = Vec::with_capacity(self.n);
        for step in 0..self.n {
            let diag: Vec<f64> = (0..t).map(|i| k[i * t + i].max(0.0)).collect();
            let mass: f64 = diag.iter().sum();
            let expect = (self.n - step) as f64;
            if (mass - expect).abs() > expect * TRACE_TOL + DRIFT_TOL {
                return Err(Error::Truncation(format!("conditional mass {mass} at step {step}, expected {expect}")));
            }
            let mut r = rng.gen::<f64>() * mass;
            let mut s = t - 1;
            for (i, d) in diag.iter().enumerate() {
                if r < *d {
                    s = i;
                    break;
                }
                r -= d;
            }
            out.push(s as u64);
            let pivot = k[s * t + s];
            if pivot <= 0.0 {
                return Err(Error::Truncation(format!("nonpositive pivot at {s}")));
            }
            let col: Vec<f64> = (0..t).map(|i| k[i * t + s]).collect();
            for i in 0..t {
                for j in 0..t {
                    k[i * t + j] -= col[i] * col[j] / pivot;
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }
}

/// Draws one configuration of N points; deterministic in `seed`.
pub fn sample_ope(spec: &EnsembleSpec, seed: u64, truncation: u64, ctx: &PrecisionContext) -> Result<Vec<u64>> {
    let s = OpeSampler::new(spec, truncation, ctx)?;
    s.sample(&mut ChaCha8Rng::seed_from_u64(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::christoffel::DeformationSpec;
    use crate::orthopoly::WeightFamily;

    #[test]
    fn single_point_law_is_the_weight() {
        let ctx = PrecisionContext::new(128).unwrap();
        let p = ctx.bits();
        let spec = EnsembleSpec::new(WeightFamily::charlier(XReal::one(p)).unwrap(), 1, DeformationSpec::none()).unwrap();
        let r = ope_correlation_brute(&spec, &[2], 40, p).unwrap();
        // e^{-1}/2
        assert!((r.to_f64() - (-1.0f64).exp() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn seeded_samples_repeat() {
        let ctx = PrecisionContext::new(96).unwrap();
        let p = ctx.bits();
        let spec = EnsembleSpec::new(WeightFamily::charlier(XReal::from_i64(2, p)).unwrap(), 3, DeformationSpec::none()).unwrap();
        let a = sample_ope(&spec, 7, 30, &ctx).unwrap();
        let b = sample_ope(&spec, 7, 30, &ctx).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 3);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
    }
}
