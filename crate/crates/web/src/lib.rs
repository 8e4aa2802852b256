//! wasm-bindgen surface for the browser demo in `www/`.
//!
//! Every export has a plain Rust twin returning `Result<_, String>` so the
//! same code is testable natively.

use cdpp::christoffel::{DeformationSpec, EnsembleSpec};
use cdpp::kernels::{deformed_bessel_kernel, gamma_deformed_kernel, gamma_kernel, GammaDeformParams, ZParams};
use cdpp::oracle::OpeSampler;
use cdpp::orthopoly::WeightFamily;
use cdpp::{KernelHandle, PrecisionContext, XReal};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wasm_bindgen::prelude::*;

/// Working precision of the demo.
pub const BITS: usize = 128;
/// Largest window the page may request.
pub const MAX_POINTS: usize = 81;

fn ctx() -> PrecisionContext {
    PrecisionContext::new(BITS).expect("fixed precision is valid")
}

fn reals(v: &[f64]) -> Vec<XReal> {
    v.iter().map(|&x| XReal::from_f64(x, BITS)).collect()
}

fn window(lo: f64, hi: f64) -> Result<Vec<f64>, String> {
    if !(lo <= hi) || (hi - lo) as usize + 1 > MAX_POINTS {
        return Err(format!("window [{lo}, {hi}] is empty or wider than {MAX_POINTS} points"));
    }
    Ok((0..=(hi - lo) as usize).map(|i| lo + i as f64).collect())
}

fn diagonal(k: &KernelHandle, xs: &[f64]) -> Result<Vec<f64>, String> {
    xs.iter()
        .map(|&x| k.eval_f64(x, x, BITS).map(|v| v.to_f64()).map_err(|e| e.to_string()))
        .collect()
}

/// One-point density of the deformed discrete Bessel kernel on lo..=hi.
pub fn bessel_density_rs(alpha: f64, utilde: &[f64], lo: i32, hi: i32) -> Result<Vec<f64>, String> {
    let c = ctx();
    let k = deformed_bessel_kernel(&c.real(alpha), &reals(utilde), &c).map_err(|e| e.to_string())?;
    diagonal(&k, &window(lo as f64, hi as f64)?)
}

/// K(x,y) of the deformed discrete Bessel kernel on (lo..=hi)², row-major.
pub fn bessel_matrix_rs(alpha: f64, utilde: &[f64], lo: i32, hi: i32) -> Result<Vec<f64>, String> {
    let c = ctx();
    let k = deformed_bessel_kernel(&c.real(alpha), &reals(utilde), &c).map_err(|e| e.to_string())?;
    let xs = window(lo as f64, hi as f64)?;
    let n = xs.len();
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = k.eval_f64(xs[i], xs[j], BITS).map_err(|e| e.to_string())?.to_f64();
            m[i * n + j] = v;
            m[j * n + i] = v;
        }
    }
    Ok(m)
}

/// One-point density of the Gamma kernel with z = re + i·im, z' = z̄ on the
/// half-integers lo+1/2 ..= hi+1/2; deformed at u unless u is None.
pub fn gamma_density_rs(re: f64, im: f64, u: Option<f64>, lo: i32, hi: i32) -> Result<Vec<f64>, String> {
    let c = ctx();
    // ξ is not used by the limit kernels
    let zp = ZParams::principal(re, im, 0.5, BITS).map_err(|e| e.to_string())?;
    let k = match u {
        None => gamma_kernel(&zp, &c),
        Some(u) => GammaDeformParams::new(zp, c.real(u)).and_then(|gp| gamma_deformed_kernel(&gp, &c)),
    }
    .map_err(|e| e.to_string())?;
    let xs: Vec<f64> = window(lo as f64, hi as f64)?.iter().map(|x| x + 0.5).collect();
    diagonal(&k, &xs)
}

/// `count` samples of the deformed Charlier ensemble, flattened (n points
/// per sample, each sorted).
pub fn sample_charlier_rs(a: f64, n: usize, u: &[f64], truncation: u32, seed: u64, count: usize) -> Result<Vec<u32>, String> {
    let c = ctx();
    let fam = WeightFamily::charlier(c.real(a)).map_err(|e| e.to_string())?;
    let d = DeformationSpec::new(reals(u)).map_err(|e| e.to_string())?;
    let spec = EnsembleSpec::new(fam, n, d).map_err(|e| e.to_string())?;
    let s = OpeSampler::new(&spec, truncation as u64, &c).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n * count);
    for _ in 0..count {
        out.extend(s.sample(&mut rng).map_err(|e| e.to_string())?.into_iter().map(|x| x as u32));
    }
    Ok(out)
}

fn js<T>(r: Result<T, String>) -> Result<T, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn bessel_density(alpha: f64, utilde: &[f64], lo: i32, hi: i32) -> Result<Vec<f64>, JsError> {
    js(bessel_density_rs(alpha, utilde, lo, hi))
}

#[wasm_bindgen]
pub fn bessel_matrix(alpha: f64, utilde: &[f64], lo: i32, hi: i32) -> Result<Vec<f64>, JsError> {
    js(bessel_matrix_rs(alpha, utilde, lo, hi))
}

#[wasm_bindgen]
pub fn gamma_density(re: f64, im: f64, u: Option<f64>, lo: i32, hi: i32) -> Result<Vec<f64>, JsError> {
    js(gamma_density_rs(re, im, u, lo, hi))
}

#[wasm_bindgen]
pub fn sample_charlier(a: f64, n: usize, u: &[f64], truncation: u32, seed: u64, count: usize) -> Result<Vec<u32>, JsError> {
    js(sample_charlier_rs(a, n, u, truncation, seed, count))
}

#[wasm_bindgen]
pub fn precision_bits() -> usize {
    BITS
}

