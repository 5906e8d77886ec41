//! Effect-size filter feature selection for two-class tabular data.
//!
//! Scores every feature by standardized mean difference (Cohen's d and its
//! unequal-variance variant D) and the derived non-overlap measures U1, U2,
//! U3; attaches noncentral-t and bootstrap-t confidence intervals; selects
//! features by decision rule; and evaluates the selected subsets with a
//! linear SVM under repeated stratified cross-validation. A Relief filter is
//! included as a baseline.

pub mod bench;
pub mod ci;
pub mod data;
pub mod effect;
pub mod error;
pub mod learn;
pub mod numstats;
pub mod rng;
pub mod select;

pub use data::{Dataset, GroupedFeature, Label};
pub use error::{Error, Result};
