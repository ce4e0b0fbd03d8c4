//! Econometrics: least squares, the Dickey-Fuller unit-root test, lag-order
//! selection by AIC and pairwise Granger-causality testing.

mod adf;
pub mod dist;
mod granger;
mod ols;

#[cfg(test)]
#[path = "../../tests/common/oracle.rs"]
mod oracle;

pub use adf::{
    adf_statistic, adf_test, classify_tau, AdfResult, AdfSignificance, AdfStatistic, LagRule,
    Stage, ADF_CRITICAL_1, ADF_CRITICAL_5, CLASSIFIABLE_LEN,
};
pub use granger::{
    granger_f, granger_pairwise, granger_test, lag_aic_profile, select_lag_aic, GrangerResult,
    GrangerSignificance, GrangerStat, LagSelection, PairwiseOptions, PairwiseRecord,
};
pub use ols::{aic, ols, OlsFit};

use thiserror::Error;

use crate::series::SeriesError;

#[derive(Debug, Error)]
pub enum EconError {
    #[error("{n} observations cannot identify {k} coefficients")]
    Underdetermined { n: usize, k: usize },
    #[error("design matrix is rank deficient at column {column}")]
    SingularDesign { column: usize },
    #[error("regressor has {found} rows, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite value in regression input")]
    NonFinite,
    #[error("series is constant")]
    ConstantSeries,
    #[error("regressor series is constant")]
    ConstantRegressor,
    #[error("regression fits exactly; test statistic undefined")]
    PerfectFit,
    #[error("series too short: need {needed} observations, have {len}")]
    TooShort { needed: usize, len: usize },
    #[error("lag order must be at least {0}")]
    InvalidLag(usize),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

pub(crate) fn is_constant(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[0] == w[1])
}
