//! Locality-sensitive hashing on the Hamming cube from error-correcting codes.

pub mod analysis;
pub mod codes;
pub mod distdist;
pub mod error;
pub mod harness;
pub mod optsets;
pub mod poly;
pub mod tables;
pub mod word;

pub use codes::{BlockCode, CodeSpec};
pub use distdist::{DistDist, PointSet};
pub use error::{Error, Result};
pub use word::Word;
pub use harness::{estimate_rho, run_experiment, ExperimentConfig, ExperimentReport, TrialRow};
pub use optsets::GeneratorSet;
