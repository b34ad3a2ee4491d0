//! Two-sample and normality tests used to analyse AU14 and questionnaire data.

mod effect;
mod mann_whitney;
mod normality;

pub use effect::hedges_g;
pub use mann_whitney::{exact_u_distribution, mann_whitney_u, mann_whitney_u_with, u_statistic, MwMethod};
pub use normality::{ks_normality, ks_normality_with, ks_statistic, KS_REPLICATES, KS_SEED};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    NormalApprox,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    TwoSided,
    /// `a` tends to be smaller than `b`.
    ALess,
    /// `a` tends to be larger than `b`.
    AGreater,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatResult {
    pub statistic: f64,
    pub p_value: f64,
    pub method: Method,
    pub n1: usize,
    /// Zero for one-sample tests.
    pub n2: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("sample {0} is empty")]
    EmptySample(&'static str),
    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("pooled SD is zero while the means differ")]
    DegenerateEffect,
    #[error("sample has zero variance")]
    ZeroVariance,
    #[error("exact test requested but the samples contain ties")]
    ExactWithTies,
    #[error("exact test requested for combined size {0}, limit is {limit}", limit = mann_whitney::EXACT_MAX_N)]
    ExactTooLarge(usize),
    #[error("non-finite observation")]
    NonFinite,
}

/// Standard normal CDF.
pub(crate) fn norm_cdf(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
}

pub(crate) fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample variance (n - 1 denominator).
pub(crate) fn sample_var(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64
}

fn check_finite(x: &[f64]) -> Result<(), StatsError> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(StatsError::NonFinite)
    }
}
