//! Evaluable correlation kernels.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::linalg::det;
use crate::xprec::XReal;

/// Point set a kernel lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Carrier {
    /// {0, 1, 2, ...}
    Naturals,
    /// ℤ
    Integers,
    /// ℤ + 1/2
    HalfIntegers,
}

impl Carrier {
    pub fn contains(&self, x: &XReal) -> bool {
        match self {
            Carrier::Naturals => x.is_integer() && !x.is_negative(),
            Carrier::Integers => x.is_integer(),
            Carrier::HalfIntegers => (x - &XReal::one(x.prec()).ldexp(-1)).is_integer(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Carrier::Naturals => "N",
            Carrier::Integers => "Z",
            Carrier::HalfIntegers => "Z+1/2",
        }
    }
}

/// Parameters a kernel was built from, as printable strings.
pub type Provenance = BTreeMap<String, String>;

pub trait Kernel: Send + Sync {
    fn eval(&self, x: &XReal, y: &XReal) -> Result<XReal>;
    fn carrier(&self) -> Carrier;
    fn provenance(&self) -> &Provenance;
}

/// Shared handle to an immutable kernel.
#[derive(Clone)]
pub struct KernelHandle(Arc<dyn Kernel>);

impl fmt::Debug for KernelHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelHandle")
            .field("carrier", &self.carrier())
            .field("provenance", self.provenance())
            .finish()
    }
}

impl KernelHandle {
    pub fn new<K: Kernel + 'static>(k: K) -> Self {
        Self(Arc::new(k))
    }

    pub fn eval(&self, x: &XReal, y: &XReal) -> Result<XReal> {
        self.0.eval(x, y)
    }

    /// Convenience for f64 points (integers and half-integers are exact).
    pub fn eval_f64(&self, x: f64, y: f64, p: usize) -> Result<XReal> {
        self.eval(&XReal::from_f64(x, p), &XReal::from_f64(y, p))
    }

    pub fn carrier(&self) -> Carrier {
        self.0.carrier()
    }

    pub fn provenance(&self) -> &Provenance {
        self.0.provenance()
    }

    /// The matrix [K(x_i, x_j)].
    pub fn matrix(&self, pts: &[XReal]) -> Result<Vec<Vec<XReal>>> {
        pts.iter()
            .map(|x| pts.iter().map(|y| self.eval(x, y)).collect())
            .collect()
    }

    /// Correlation function ρ(x_1..x_n) = det[K(x_i, x_j)].
    pub fn correlation(&self, pts: &[XReal]) -> Result<XReal> {
        let m = self.matrix(pts)?;
        if m.is_empty() {
            let p = 64;
            return Ok(XReal::one(p));
        }
        Ok(det(&m))
    }
}
