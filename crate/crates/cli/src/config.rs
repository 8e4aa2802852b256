use std::path::Path;

use cdpp::christoffel::{DeformationSpec, EnsembleSpec};
use cdpp::kernels::ZParams;
use cdpp::orthopoly::WeightFamily;
use cdpp::{XComplex, XReal};
use serde::Deserialize;

use crate::Failure;

/// A complex parameter, written as a number or as [re, im].
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
pub enum Cplx {
    Real(f64),
    Pair([f64; 2]),
}

impl Cplx {
    fn parts(self) -> (f64, f64) {
        match self {
            Cplx::Real(r) => (r, 0.0),
            Cplx::Pair([r, i]) => (r, i),
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum KernelKind {
    Bessel,
    Charlier,
    Meixner,
    Zmeasure,
    Gamma,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "kebab-case")]
pub enum GammaTargetCfg {
    #[default]
    Limit,
    Scaled,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub kernel: Option<KernelKind>,
    pub alpha: Option<f64>,
    pub a: Option<f64>,
    pub beta: Option<f64>,
    pub xi: Option<f64>,
    pub z: Option<Cplx>,
    pub zp: Option<Cplx>,
    pub n: Option<usize>,
    pub n_list: Option<Vec<usize>>,
    /// Decimal strings, so that 0.9999 is exact.
    pub xi_list: Option<Vec<String>>,
    #[serde(default)]
    pub u: Vec<f64>,
    /// Explicit (x, y) pairs.
    pub pairs: Option<Vec<[f64; 2]>>,
    /// Points; the grid is their Cartesian square.
    pub points: Option<Vec<f64>>,
    /// Point sets for oracle-compare.
    pub sets: Option<Vec<Vec<f64>>>,
    pub cutoff: Option<usize>,
    pub target: Option<GammaTargetCfg>,
    pub samples: Option<usize>,
    pub truncation: Option<u64>,
    pub suite: Option<String>,
    pub bits: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<String>,
    pub hist: Option<String>,
}

pub fn cfg_err(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| cfg_err(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| cfg_err(format!("{}: {e}", path.display())))
    }

    pub fn need<T: Copy>(v: Option<T>, name: &str) -> Result<T, Failure> {
        v.ok_or_else(|| cfg_err(format!("missing field `{name}`")))
    }

    pub fn real(&self, v: f64, p: usize) -> XReal {
        XReal::from_f64_dec(v, p)
    }

    pub fn u_points(&self, p: usize) -> Vec<XReal> {
        self.u.iter().map(|&u| self.real(u, p)).collect()
    }

    /// (x, y) pairs from `pairs` or the square of `points`.
    pub fn grid(&self) -> Result<Vec<(f64, f64)>, Failure> {
        if let Some(ps) = &self.pairs {
            return Ok(ps.iter().map(|p| (p[0], p[1])).collect());
        }
        if let Some(pts) = &self.points {
            return Ok(pts.iter().flat_map(|&x| pts.iter().map(move |&y| (x, y))).collect());
        }
        Err(cfg_err("missing `pairs` or `points`"))
    }

    pub fn zparams(&self, p: usize) -> Result<ZParams, Failure> {
        let (zr, zi) = Self::need(self.z, "z")?.parts();
        let (wr, wi) = Self::need(self.zp, "zp")?.parts();
        let xi = Self::need(self.xi, "xi")?;
        let c = |r, i| XComplex::new(XReal::from_f64_dec(r, p), XReal::from_f64_dec(i, p));
        Ok(ZParams::new(c(zr, zi), c(wr, wi), self.real(xi, p))?)
    }

    pub fn family(&self, p: usize) -> Result<WeightFamily, Failure> {
        match self.kernel {
            Some(KernelKind::Charlier) => Ok(WeightFamily::charlier(self.real(Self::need(self.a, "a")?, p))?),
            Some(KernelKind::Meixner) => Ok(WeightFamily::meixner(
                self.real(Self::need(self.beta, "beta")?, p),
                self.real(Self::need(self.xi, "xi")?, p),
            )?),
            _ => Err(cfg_err("`kernel` must be \"charlier\" or \"meixner\" here")),
        }
    }

    pub fn ensemble(&self, p: usize) -> Result<EnsembleSpec, Failure> {
        let fam = self.family(p)?;
        let d = DeformationSpec::new(self.u_points(p))?;
        Ok(EnsembleSpec::new(fam, Self::need(self.n, "n")?, d)?)
    }
}
