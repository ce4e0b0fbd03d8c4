//! Augmented Dickey-Fuller test without constant or trend:
//!
//! ```text
//! dY_t = tau * Y_{t-1} + sum_{i=1..m} a_i * dY_{t-i} + u_t
//! ```
//!
//! The statistic is tau-hat over its standard error, compared against the
//! no-constant Dickey-Fuller critical values -1.951 (5%) and -2.623 (1%).

use std::fmt;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::{is_constant, ols, EconError};
use crate::series::{difference, EmotionSeries};

pub const ADF_CRITICAL_5: f64 = -1.951;
pub const ADF_CRITICAL_1: f64 = -2.623;

/// Series lengths for which the fixed critical values are applied.
pub const CLASSIFIABLE_LEN: RangeInclusive<usize> = 25..=100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    AtLevels,
    FirstDifferenced,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::AtLevels => "at levels",
            Stage::FirstDifferenced => "first differenced",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LagRule {
    Fixed(usize),
    /// Smallest AIC over m = 0..=max_lag, fitted on a common sample.
    MinAic {
        max_lag: usize,
    },
}

impl LagRule {
    fn max_lag(self) -> usize {
        match self {
            LagRule::Fixed(m) => m,
            LagRule::MinAic { max_lag } => max_lag,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdfSignificance {
    NotSignificant,
    Sig5,
    Sig1,
    /// Sample size outside [`CLASSIFIABLE_LEN`].
    Unclassified,
}

impl AdfSignificance {
    /// Table marker: `**` at 1%, `*` at 5%.
    pub fn marker(self) -> &'static str {
        match self {
            AdfSignificance::NotSignificant => "NS",
            AdfSignificance::Sig5 => "*",
            AdfSignificance::Sig1 => "**",
            AdfSignificance::Unclassified => "UC",
        }
    }
}

pub fn classify_tau(tau: f64) -> AdfSignificance {
    if tau < ADF_CRITICAL_1 {
        AdfSignificance::Sig1
    } else if tau < ADF_CRITICAL_5 {
        AdfSignificance::Sig5
    } else {
        AdfSignificance::NotSignificant
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdfStatistic {
    pub tau: f64,
    pub lag_m: usize,
    /// Rows in the final regression.
    pub n_obs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdfResult {
    pub tau: f64,
    pub lag_m: usize,
    pub stage: Stage,
    pub significance: AdfSignificance,
    /// Unit root rejected at 5% or better.
    pub stationary: bool,
    /// Length of the tested series.
    pub series_len: usize,
}

/// Rows `i in first..dy.len()` of the regression of dy[i] on y[i] and the
/// `m` previous differences.
fn adf_design(y: &[f64], dy: &[f64], m: usize, first: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let target = dy[first..].to_vec();
    let mut cols = Vec::with_capacity(m + 1);
    cols.push(y[first..dy.len()].to_vec());
    for lag in 1..=m {
        cols.push(dy[first - lag..dy.len() - lag].to_vec());
    }
    (target, cols)
}

/// Computes tau for a raw series. With [`LagRule::MinAic`] every candidate is
/// fitted on the rows usable by the largest lag; the winner is then refitted
/// on all rows available to it.
pub fn adf_statistic(y: &[f64], rule: LagRule) -> Result<AdfStatistic, EconError> {
    let max_lag = rule.max_lag();
    let needed = max_lag + 6;
    if y.len() < needed {
        return Err(EconError::TooShort {
            needed,
            len: y.len(),
        });
    }
    if is_constant(y) {
        return Err(EconError::ConstantSeries);
    }
    let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();

    let lag_m = match rule {
        LagRule::Fixed(m) => m,
        LagRule::MinAic { max_lag } => {
            let mut best: Option<(f64, usize)> = None;
            let mut first_err = None;
            for m in 0..=max_lag {
                let (target, cols) = adf_design(y, &dy, m, max_lag);
                match ols(&target, &cols) {
                    Ok(fit) if best.is_none_or(|(a, _)| fit.aic < a) => best = Some((fit.aic, m)),
                    Ok(_) => {}
                    Err(e) => {
                        first_err.get_or_insert(e);
                    }
                }
            }
            match (best, first_err) {
                (Some((_, m)), _) => m,
                (None, Some(e)) => return Err(e),
                (None, None) => unreachable!("at least one candidate lag"),
            }
        }
    };

    let (target, cols) = adf_design(y, &dy, lag_m, lag_m);
    let fit = ols(&target, &cols)?;
    let tau = fit.t_stat(0);
    if !tau.is_finite() {
        return Err(EconError::PerfectFit);
    }
    Ok(AdfStatistic {
        tau,
        lag_m,
        n_obs: target.len(),
    })
}

/// Runs the test on `series` at levels, or on its first difference.
pub fn adf_test(
    series: &EmotionSeries,
    stage: Stage,
    rule: LagRule,
) -> Result<AdfResult, EconError> {
    let tested = match stage {
        Stage::AtLevels => series.values.clone(),
        Stage::FirstDifferenced => difference(series)?.values,
    };
    let stat = adf_statistic(&tested, rule)?;
    let significance = if CLASSIFIABLE_LEN.contains(&tested.len()) {
        classify_tau(stat.tau)
    } else {
        AdfSignificance::Unclassified
    };
    Ok(AdfResult {
        tau: stat.tau,
        lag_m: stat.lag_m,
        stage,
        significance,
        stationary: matches!(significance, AdfSignificance::Sig5 | AdfSignificance::Sig1),
        series_len: tested.len(),
    })
}
