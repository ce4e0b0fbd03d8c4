//! Bivariate Granger causality with a Wald F-test of the restriction that all
//! lagged-X coefficients are zero.
//!
//! Unrestricted: `Y_t = a0 + sum a_i Y_{t-i} + sum b_i X_{t-i} + u_t`
//! Restricted:   `Y_t = a0 + sum a_i Y_{t-i} + u_t`

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::dist::f_sf;
use super::{is_constant, ols, EconError};
use crate::corpus::Source;
use crate::series::{align, difference, EmotionSeries, PairedSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GrangerSignificance {
    NotSignificant,
    Sig5,
    Sig1,
    Sig01,
}

impl GrangerSignificance {
    pub fn from_p_value(p: f64) -> Self {
        if p < 0.001 {
            Self::Sig01
        } else if p < 0.01 {
            Self::Sig1
        } else if p < 0.05 {
            Self::Sig5
        } else {
            Self::NotSignificant
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrangerStat {
    pub f_value: f64,
    pub df_num: usize,
    pub df_den: usize,
    pub p_value: f64,
    pub rss_restricted: f64,
    pub rss_unrestricted: f64,
}

/// One direction of the test: does `causal` help predict `caused`?
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrangerResult {
    pub variable: String,
    pub caused: String,
    pub causal: String,
    pub lag_p: usize,
    pub f_value: f64,
    pub df_num: usize,
    pub df_den: usize,
    pub p_value: f64,
    pub significance: GrangerSignificance,
}

fn lag_columns(v: &[f64], p: usize, first: usize) -> impl Iterator<Item = Vec<f64>> + '_ {
    (1..=p).map(move |lag| v[first - lag..v.len() - lag].to_vec())
}

fn own_lag_design(
    y: &[f64],
    x: Option<&[f64]>,
    p: usize,
    first: usize,
) -> (Vec<f64>, Vec<Vec<f64>>) {
    let target = y[first..].to_vec();
    let mut cols = vec![vec![1.0; target.len()]];
    cols.extend(lag_columns(y, p, first));
    if let Some(x) = x {
        cols.extend(lag_columns(x, p, first));
    }
    (target, cols)
}

/// F statistic of the restricted vs unrestricted fit on rows t = p..n.
pub fn granger_f(y: &[f64], x: &[f64], p: usize) -> Result<GrangerStat, EconError> {
    if p == 0 {
        return Err(EconError::InvalidLag(1));
    }
    if y.len() != x.len() {
        return Err(EconError::DimensionMismatch {
            expected: y.len(),
            found: x.len(),
        });
    }
    let k = 2 * p + 1;
    let needed = p + k + 1;
    if y.len() < needed {
        return Err(EconError::TooShort {
            needed,
            len: y.len(),
        });
    }
    if is_constant(y) || is_constant(x) {
        return Err(EconError::ConstantRegressor);
    }
    let (target, unrestricted) = own_lag_design(y, Some(x), p, p);
    let restricted = &unrestricted[..p + 1];
    let fit_u = ols(&target, &unrestricted)?;
    let fit_r = ols(&target, restricted)?;

    let df_den = target.len() - k;
    let gain = (fit_r.rss - fit_u.rss).max(0.0);
    let f_value = if fit_u.rss > 0.0 {
        (gain / p as f64) / (fit_u.rss / df_den as f64)
    } else if gain > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    Ok(GrangerStat {
        f_value,
        df_num: p,
        df_den,
        p_value: f_sf(f_value, p as f64, df_den as f64),
        rss_restricted: fit_r.rss,
        rss_unrestricted: fit_u.rss,
    })
}

/// Tests whether `pair.x` Granger-causes `pair.y`.
pub fn granger_test(pair: &PairedSeries, lag_p: usize) -> Result<GrangerResult, EconError> {
    let stat = granger_f(&pair.y.values, &pair.x.values, lag_p)?;
    Ok(GrangerResult {
        variable: pair.y.category.clone(),
        caused: pair.y.source.label().to_string(),
        causal: pair.x.source.label().to_string(),
        lag_p,
        f_value: stat.f_value,
        df_num: stat.df_num,
        df_den: stat.df_den,
        p_value: stat.p_value,
        significance: GrangerSignificance::from_p_value(stat.p_value),
    })
}

/// AIC of the lag-p model for p = 1..=max_p, all fitted on rows t >= max_p.
pub fn lag_aic_profile(y: &[f64], x: Option<&[f64]>, max_p: usize) -> Result<Vec<f64>, EconError> {
    if max_p == 0 {
        return Err(EconError::InvalidLag(1));
    }
    if let Some(x) = x {
        if x.len() != y.len() {
            return Err(EconError::DimensionMismatch {
                expected: y.len(),
                found: x.len(),
            });
        }
    }
    let k = 1 + max_p * if x.is_some() { 2 } else { 1 };
    let needed = max_p + k + 3;
    if y.len() < needed {
        return Err(EconError::TooShort {
            needed,
            len: y.len(),
        });
    }
    if is_constant(y) || x.is_some_and(is_constant) {
        return Err(EconError::ConstantRegressor);
    }
    (1..=max_p)
        .map(|p| {
            let (target, cols) = own_lag_design(y, x, p, max_p);
            ols(&target, &cols).map(|fit| fit.aic)
        })
        .collect()
}

/// Lag order in 1..=max_p with the smallest AIC; ties go to the smaller lag.
pub fn select_lag_aic(y: &[f64], x: Option<&[f64]>, max_p: usize) -> Result<usize, EconError> {
    if max_p == 1 {
        return Ok(1);
    }
    let aics = lag_aic_profile(y, x, max_p)?;
    let best = (0..aics.len()).fold(0, |b, i| if aics[i] < aics[b] { i } else { b });
    Ok(best + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LagSelection {
    /// AIC of the caused series' own autoregression.
    OwnLags,
    /// AIC of the full model including the causal series' lags.
    Joint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairwiseOptions {
    pub max_p: usize,
    pub lag_selection: LagSelection,
}

impl Default for PairwiseOptions {
    fn default() -> Self {
        Self {
            max_p: 4,
            lag_selection: LagSelection::OwnLags,
        }
    }
}

/// One direction for one variable: either a test result or why it was skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseRecord {
    pub variable: String,
    pub caused: Source,
    pub causal: Source,
    pub outcome: Result<GrangerResult, String>,
}

impl PairwiseRecord {
    pub fn result(&self) -> Option<&GrangerResult> {
        self.outcome.as_ref().ok()
    }
}

fn one_direction(
    caused: &EmotionSeries,
    causal: &EmotionSeries,
    opts: &PairwiseOptions,
) -> Result<GrangerResult, EconError> {
    let pair = align(caused, causal, false)?;
    let x = match opts.lag_selection {
        LagSelection::OwnLags => None,
        LagSelection::Joint => Some(pair.x.values.as_slice()),
    };
    let p = select_lag_aic(&pair.y.values, x, opts.max_p)?;
    granger_test(&pair, p)
}

/// Tests every category present in both maps, in both directions, on
/// first-differenced series. Bulletin-caused comes first for each variable.
pub fn granger_pairwise(
    bulletin: &BTreeMap<String, EmotionSeries>,
    tweets: &BTreeMap<String, EmotionSeries>,
    opts: &PairwiseOptions,
) -> Vec<PairwiseRecord> {
    let mut out = Vec::new();
    for (category, b) in bulletin {
        let Some(t) = tweets.get(category) else {
            continue;
        };
        let diffs = difference(b).and_then(|db| Ok((db, difference(t)?)));
        let directions = [
            (Source::Bulletin, Source::Tweet),
            (Source::Tweet, Source::Bulletin),
        ];
        for (caused, causal) in directions {
            let outcome = match &diffs {
                Ok((db, dt)) => {
                    let (y, x) = if caused == Source::Bulletin {
                        (db, dt)
                    } else {
                        (dt, db)
                    };
                    one_direction(y, x, opts).map_err(|e| e.to_string())
                }
                Err(e) => Err(e.to_string()),
            };
            out.push(PairwiseRecord {
                variable: category.clone(),
                caused,
                causal,
                outcome,
            });
        }
    }
    out
}
