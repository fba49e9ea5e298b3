//! Exact and numeric computations for random partitions: Schur measures and
//! their determinantal kernels, Toda tau functions, and the uniform measure
//! `q^{|λ|}` with its theta-function n-point formulas.

pub mod cli;
pub mod error;
pub mod partitions;
pub mod schur_measure;
pub mod series;
pub mod symfunc;
pub mod toda;
pub mod uniform;

pub use error::{Error, Result};
pub use partitions::{enumerate_partitions, FrobeniusCoords, HalfInt, Partition, PartitionIter};
pub use schur_measure::{
    correlation, correlation_oracle, j_coeffs, kernel_entry, plancherel_params, weight,
    z_measure_params, JCoeffs, Kernel, SchurParams,
};
pub use series::{Monomial, TruncSeries, Var};
pub use symfunc::{character, h_coeffs, miwa_from_alphabet, schur, skew_schur, MiwaParams, Times};
