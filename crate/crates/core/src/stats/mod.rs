//! Regression and interval estimation.

mod bootstrap;
mod design;
mod inference;
pub mod linalg;
mod logit;
mod ols;

pub use bootstrap::{bootstrap_difference, bootstrap_mean_ci, percentile, BootstrapDifference, MIN_REPLICATES};
pub use design::{encode_fixed_effects, DesignMatrix, INTERCEPT};
pub use inference::{
    binomial_ci, likelihood_ratio_test, mean, odds_ratio, sample_sd, standardized_coefficients, vif,
    IntervalEstimate, LrTest, Vif, Z_95,
};
pub use logit::{fit_logistic, MAX_IRLS_ITERATIONS, IRLS_TOLERANCE, SEPARATION_THRESHOLD};
pub use ols::fit_ols;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("design is rank deficient at column {column:?}")]
    Rank { column: String },
    #[error("quasi-separation: coefficient {column:?} reached {estimate:.2}")]
    Separation { column: String, estimate: f64 },
    #[error("IRLS did not converge in {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("column {column:?} has zero variance")]
    ZeroVariance { column: String },
    #[error("models are not nested: full log-likelihood {full} below null {null}")]
    Nesting { full: f64, null: f64 },
    #[error("empty input")]
    EmptyList,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Logit,
    Ols,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    /// z for logit, t for OLS.
    pub statistic: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub kind: ModelKind,
    pub coefficients: Vec<Coefficient>,
    pub log_likelihood: f64,
    pub r_squared: Option<f64>,
    pub n_obs: usize,
    pub converged: bool,
    pub iterations: usize,
}

impl FitResult {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    pub fn estimate(&self, name: &str) -> Option<f64> {
        self.coefficient(name).map(|c| c.estimate)
    }

    pub fn n_params(&self) -> usize {
        self.coefficients.len()
    }

    pub fn estimates(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.estimate).collect()
    }
}

/// Shared checks before a fit: rows exceed columns and the design has full
/// column rank.
fn check_design(x: &DesignMatrix, y: &[f64]) -> Result<linalg::Qr, StatsError> {
    if y.len() != x.n_rows() {
        return Err(StatsError::InvalidInput(format!(
            "{} outcomes for {} design rows",
            y.len(),
            x.n_rows()
        )));
    }
    if x.ncols() == 0 {
        return Err(StatsError::InvalidInput("design has no columns".into()));
    }
    if x.n_rows() <= x.ncols() {
        return Err(StatsError::Degenerate(format!(
            "{} observations for {} parameters",
            x.n_rows(),
            x.ncols()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::InvalidInput("non-finite outcome".into()));
    }
    let qr = linalg::Qr::new(x.columns());
    if let Some(k) = qr.first_dependent_column() {
        return Err(StatsError::Rank {
            column: x.names()[k].clone(),
        });
    }
    Ok(qr)
}

fn normal_two_sided_p(z: f64) -> f64 {
    statrs::function::erf::erfc(z.abs() / std::f64::consts::SQRT_2)
}
