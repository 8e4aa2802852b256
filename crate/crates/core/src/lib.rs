//! Christoffel deformations of discrete orthogonal polynomial ensembles.
//!
//! The crate evaluates the finite-N deformed kernels of the Charlier and
//! Meixner ensembles and the three limiting kernels built from them: the
//! deformed discrete Bessel kernel, the deformed z-measure kernel on the
//! half-integer lattice and the deformed Gamma kernel. Everything runs in
//! extended precision (`xprec`), and the `oracle` module provides the
//! independent brute-force references used by the tests.

pub mod christoffel;
pub mod error;
pub mod experiments;
pub mod handle;
pub mod kernels;
pub mod linalg;
pub mod oracle;
pub mod orthopoly;
pub mod specfun;
pub mod verify;
pub mod xprec;

pub use error::{Error, Result};
pub use handle::{Carrier, Kernel, KernelHandle, Provenance};
pub use xprec::{Analytic, Dual, Field, PrecisionContext, XComplex, XReal};
