use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("feature index {index} out of range (dataset has {count} features)")]
    FeatureIndex { index: usize, count: usize },

    #[error("need at least {needed} finite samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("non-finite value in input")]
    NonFinite,

    #[error("feature `{feature}` is degenerate: {reason}")]
    Degenerate { feature: String, reason: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no sign change in bracket [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("noncentral t series did not converge after {terms} terms (t = {t}, nu = {nu}, ncp = {ncp})")]
    SeriesNotConverged { t: f64, nu: f64, ncp: f64, terms: usize },

    #[error("confidence bound search failed for t = {t_obs}, nu = {nu}: {reason}")]
    IntervalSearch { t_obs: f64, nu: f64, reason: String },

    #[error("bootstrap aborted after {redraws} degenerate redraws (limit {limit})")]
    BootstrapDegenerate { redraws: usize, limit: usize },

    #[error("SVM solver did not converge within {iterations} iterations")]
    SolverNotConverged { iterations: usize },

    #[error("cross-validation: {0}")]
    CrossValidation(String),
}

impl Error {
    /// Attach a feature name to errors raised while scoring a single feature.
    pub(crate) fn for_feature(self, name: &str) -> Self {
        match self {
            Error::Degenerate { reason, .. } => Error::Degenerate {
                feature: name.to_string(),
                reason,
            },
            other => other,
        }
    }
}
