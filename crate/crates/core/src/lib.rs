//! Exact Wick-algebra engine for Berezin-Toeplitz quantization at a point.
//!
//! Layers, bottom up:
//! - [`scalar`], [`index`], [`series`]: exact coefficients and truncated graded series.
//! - [`wick`]: the Wick star product, Bargmann-Fock actions, exponential calculus.
//! - [`integral`]: formal Gaussian integrals, inner products, Toeplitz symbols.
//! - [`jets`]: Kähler potential jets, K-normalization, weight series.
//! - [`bt`]: Berezin-Toeplitz values, the representation, vacuum reduction.
//! - [`cp1`]: closed-form oracle on the projective line.
//! - [`verify`]: comparison routines shared by the CLI and the test suites.
//! - [`suite`]: seed-driven property checks.

pub mod bt;
pub mod cp1;
pub mod error;
pub mod index;
pub mod integral;
pub mod jets;
pub mod random;
pub mod scalar;
pub mod series;
pub mod suite;
pub mod verify;
pub mod wick;

pub use bt::{BTContext, VacuumReduction};
pub use cp1::{FactorialRational, FactorialSum, RationalSymbol, ToeplitzMatrix};
pub use error::{Error, Result};
pub use index::{MultiIndex, TermKey};
pub use integral::WeightSeries;
pub use jets::{CurvatureTensor, FunctionJets, Normalization, PotentialJets};
pub use scalar::Coefficient;
pub use series::{FockSeries, HbarSeries, TermRecord, WickSeries};
