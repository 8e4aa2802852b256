//! Brute-force references: partitions, partition-sum correlation
//! functions and finite-ensemble sums and samples.

mod brute;
mod ope;
pub mod partition;

pub use brute::{brute_plancherel_corr, brute_zmeasure_corr, literal_positivity_violations, CorrEstimate, ZDeform};
pub use ope::{ope_correlation_brute, sample_ope, OpeSampler, MAX_BRUTE_N};
pub use partition::Partition;
