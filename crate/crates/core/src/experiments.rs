//! The two convergence experiments: Charlier ensembles to the deformed
//! discrete Bessel kernel (N → ∞), and z-measures to the deformed Gamma
//! kernel (ξ → 1).

use serde::Serialize;

use crate::christoffel::{deformed_kernel, DeformationSpec, EnsembleSpec};
use crate::error::{Error, Result};
use crate::kernels::{
    deformed_bessel_kernel, gamma_deformed_kernel, gamma_kernel, gamma_kernel_four_h, zmeas_deformed_kernel,
    GammaDeformParams, ZParams,
};
use crate::orthopoly::WeightFamily;
use crate::xprec::{PrecisionContext, XReal};

#[derive(Clone, Debug, Serialize)]
pub struct ConvergeRow {
    /// N or ξ.
    pub param: f64,
    pub x: f64,
    pub y: f64,
    pub finite: f64,
    pub limit: f64,
    pub error: f64,
    /// error(previous param) / error(this param); absent on the first row.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairSummary {
    pub x: f64,
    pub y: f64,
    pub monotone: bool,
    pub ratios: Vec<f64>,
    /// Least-squares slope of ln(error) against ln(scale).
    pub slope: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergeReport {
    pub rows: Vec<ConvergeRow>,
    pub pairs: Vec<PairSummary>,
}

impl ConvergeReport {
    fn build(rows: Vec<ConvergeRow>, grid: &[(f64, f64)], scale: impl Fn(f64) -> f64) -> Self {
        let mut rows = rows;
        let mut pairs = Vec::new();
        for &(x, y) in grid {
            let idx: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].x == x && rows[i].y == y).collect();
            let errs: Vec<f64> = idx.iter().map(|&i| rows[i].error).collect();
            let mut ratios = Vec::new();
            for w in 1..idx.len() {
                let r = errs[w - 1] / errs[w];
                rows[idx[w]].ratio = Some(r);
                ratios.push(r);
            }
            let pts: Vec<(f64, f64)> = idx.iter().map(|&i| (scale(rows[i].param).ln(), rows[i].error.ln())).collect();
            pairs.push(PairSummary {
                x,
                y,
                monotone: errs.windows(2).all(|w| w[1] < w[0]),
                ratios,
                slope: ls_slope(&pts),
            });
        }
        Self { rows, pairs }
    }
}

fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn check_increasing(v: &[f64], what: &str) -> Result<()> {
    if v.is_empty() || v.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(format!("{what} must be nonempty and strictly increasing")));
    }
    Ok(())
}

/// Charlier ensemble with a = α/N and u_i = ũ_i + N, evaluated at
/// (x+N, y+N), against the deformed discrete Bessel kernel at (x, y).
pub fn converge_thm1(
    alpha: &XReal,
    utilde: &[XReal],
    ns: &[usize],
    grid: &[(i64, i64)],
    ctx: &PrecisionContext,
) -> Result<ConvergeReport> {
    check_increasing(&ns.iter().map(|&n| n as f64).collect::<Vec<_>>(), "N-list")?;
    let p = ctx.bits();
    let lim = deformed_bessel_kernel(alpha, utilde, ctx)?;
    let limits: Vec<XReal> = grid
        .iter()
        .map(|&(x, y)| lim.eval(&XReal::from_i64(x, p), &XReal::from_i64(y, p)))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for &n in ns {
        let nn = XReal::from_i64(n as i64, p);
        let fam = WeightFamily::charlier(alpha / &nn)?;
        let d = DeformationSpec::new(utilde.iter().map(|u| u + &nn).collect())?;
        let k = deformed_kernel(&EnsembleSpec::new(fam, n, d)?, ctx)?;
        for (&(x, y), l) in grid.iter().zip(&limits) {
            if x + (n as i64) < 0 || y + (n as i64) < 0 {
                return Err(Error::InvalidParameter(format!("grid point ({x},{y}) leaves the support at N={n}")));
            }
            let f = k.eval(&XReal::from_i64(x + n as i64, p), &XReal::from_i64(y + n as i64, p))?;
            rows.push(ConvergeRow {
                param: n as f64,
                x: x as f64,
                y: y as f64,
                finite: f.to_f64(),
                limit: l.to_f64(),
                error: (&f - l).abs().to_f64(),
                ratio: None,
            });
        }
    }
    let g: Vec<(f64, f64)> = grid.iter().map(|&(x, y)| (x as f64, y as f64)).collect();
    Ok(ConvergeReport::build(rows, &g, |n| 1.0 / n))
}

/// What the ξ → 1 sweep is compared against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GammaTarget {
    /// Unscaled K^k_ξ against the limit of the B/D cofactors.
    Limit,
    /// (1−ξ)^{2k} K^k_ξ against the kernel assembled from the
    /// four-h combinations (k = 1 only).
    ScaledFourH,
}

/// z-measure kernels at each ξ (points in ℤ', u = [] or [u]) against the
/// Gamma-kernel target.
pub fn converge_gamma(
    zp: &ZParams,
    u: Option<&XReal>,
    xis: &[XReal],
    grid: &[(f64, f64)],
    target: GammaTarget,
    ctx: &PrecisionContext,
) -> Result<ConvergeReport> {
    check_increasing(&xis.iter().map(XReal::to_f64).collect::<Vec<_>>(), "xi-list")?;
    if xis.last().is_some_and(|x| x.to_f64() >= 1.0) {
        return Err(Error::InvalidParameter("xi must stay below 1".into()));
    }
    let p = ctx.bits();
    let pts: Vec<(XReal, XReal)> = grid
        .iter()
        .map(|&(x, y)| (XReal::from_f64(x, p), XReal::from_f64(y, p)))
        .collect();
    let limits: Vec<XReal> = match (target, u) {
        (GammaTarget::Limit, None) => {
            let k = gamma_kernel(zp, ctx)?;
            pts.iter().map(|(x, y)| k.eval(x, y)).collect::<Result<_>>()?
        }
        (GammaTarget::Limit, Some(u)) => {
            let k = gamma_deformed_kernel(&GammaDeformParams::new(zp.clone(), u.clone())?, ctx)?;
            pts.iter().map(|(x, y)| k.eval(x, y)).collect::<Result<_>>()?
        }
        (GammaTarget::ScaledFourH, Some(u)) => {
            let gp = GammaDeformParams::new(zp.clone(), u.clone())?;
            pts.iter()
                .map(|(x, y)| {
                    if x == y {
                        return Err(Error::InvalidParameter("the four-h route needs x ≠ y".into()));
                    }
                    Ok(gamma_kernel_four_h(&gp, x, y)?.re)
                })
                .collect::<Result<_>>()?
        }
        (GammaTarget::ScaledFourH, None) => {
            return Err(Error::InvalidParameter("the scaled comparison needs one deformation point".into()))
        }
    };
    let us: Vec<XReal> = u.into_iter().cloned().collect();
    let mut rows = Vec::new();
    for xi in xis {
        let zx = zp.with_xi(xi.clone())?;
        let k = zmeas_deformed_kernel(&zx, &us, ctx)?;
        let scale = if target == GammaTarget::ScaledFourH {
            (XReal::one(p) - xi).powi(2 * us.len() as i64)
        } else {
            XReal::one(p)
        };
        for ((x, y), l) in pts.iter().zip(&limits) {
            let f = k.eval(x, y)? * &scale;
            rows.push(ConvergeRow {
                param: xi.to_f64(),
                x: x.to_f64(),
                y: y.to_f64(),
                finite: f.to_f64(),
                limit: l.to_f64(),
                error: (&f - l).abs().to_f64(),
                ratio: None,
            });
        }
    }
    Ok(ConvergeReport::build(rows, grid, |xi| 1.0 - xi))
}
