//! α-Lüroth numeration: partitions with power-law tails, the digit codec,
//! cylinder geometry, digit-constrained fractal models and numerical
//! Hausdorff-dimension tooling (cover sums, Moran roots, mass distributions).

pub mod cli;
pub mod codec;
pub mod constraint;
pub mod cylinder;
pub mod dimension;
pub mod error;
pub mod partition;

pub use codec::{decode, encode, DigitSequence, Encoding};
pub use constraint::{ConstraintModel, DigitRange, ModelSpec, SequenceSpec};
pub use cylinder::{cylinder_interval, cylinder_measure, Cylinder};
pub use dimension::{
    cover_sum, empirical_holder, moran_root, sigma_from_sequence, DimensionEstimate, SigmaReport,
};
pub use error::{Error, Result};
pub use partition::{AsymptoticReport, Partition, PartitionKind, PartitionSpec, Psi};
