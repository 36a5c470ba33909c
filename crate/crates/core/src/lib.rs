//! q-graded deformed algebras of truncated formal series over
//! noncommutative coefficient algebras, and formal integration of Lax
//! equations through time scaling.
//!
//! The layers build on each other:
//!
//! - [`algebra`]: coefficient algebras (dense matrices, differential
//!   operators on the circle).
//! - [`series`]: truncated series `Σ q^n a_n` with exp, log and inverses.
//! - [`monoid`]: partial graded index monoids (`ℕ`, 1-dimensional
//!   cobordisms) and series indexed by them.
//! - [`dyson`]: time-ordered exponentials of scaled operator paths.
//! - [`lax`]: the scaled Lax flow, its residuals, conserved traces and a
//!   dense numeric oracle.
//! - [`symmetry`]: symmetry flows driven by inner derivations.
//! - [`appendix`]: the non-regular diffeomorphism path on `]0;1[`.

pub mod algebra;
pub mod appendix;
pub mod dyson;
pub mod error;
pub mod lax;
pub mod monoid;
pub mod par;
pub mod sample;
pub mod series;
pub mod symmetry;

pub use algebra::{AlgebraDescriptor, AlgebraElement, CircleDiffOp, Matrix, ScalarField};
pub use dyson::{GradeProfile, GroupSeriesPath, OperatorPath, TimeGrid};
pub use error::{Error, Result};
pub use lax::{LaxFlowResult, LaxProblem, Preset};
pub use series::{GradedSeries, Valuation};
