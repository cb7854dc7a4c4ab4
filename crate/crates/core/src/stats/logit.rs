//! Logistic regression by iteratively reweighted least squares.

use super::linalg::{mat_vec, Qr};
use super::{check_design, normal_two_sided_p, Coefficient, DesignMatrix, FitResult, ModelKind, StatsError};

pub const MAX_IRLS_ITERATIONS: usize = 50;
/// Convergence when no coefficient moves by this much in one iteration.
pub const IRLS_TOLERANCE: f64 = 1e-10;
/// A coefficient this large signals (quasi-)separation.
pub const SEPARATION_THRESHOLD: f64 = 30.0;
const MAX_STEP_HALVINGS: usize = 30;

fn sigmoid(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

fn softplus(eta: f64) -> f64 {
    eta.max(0.0) + (-eta.abs()).exp().ln_1p()
}

fn log_likelihood(y: &[f64], eta: &[f64]) -> f64 {
    y.iter().zip(eta).map(|(&yi, &e)| yi * e - softplus(e)).sum()
}

/// Weighted design `sqrt(w) X` and working response `(y - mu) / sqrt(w)`.
fn weighted_system(x: &DesignMatrix, y: &[f64], eta: &[f64]) -> Option<(Vec<Vec<f64>>, Vec<f64>)> {
    let mut sw = Vec::with_capacity(eta.len());
    let mut rhs = Vec::with_capacity(eta.len());
    for (&e, &yi) in eta.iter().zip(y) {
        let mu = sigmoid(e);
        let w = mu * (1.0 - mu);
        if w <= 0.0 {
            return None;
        }
        let s = w.sqrt();
        sw.push(s);
        rhs.push((yi - mu) / s);
    }
    let cols = x
        .columns()
        .iter()
        .map(|c| c.iter().zip(&sw).map(|(a, s)| a * s).collect())
        .collect();
    Some((cols, rhs))
}

fn separation(x: &DesignMatrix, beta: &[f64]) -> StatsError {
    let (k, b) = beta
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .expect("at least one coefficient");
    StatsError::Separation {
        column: x.names()[k].clone(),
        estimate: *b,
    }
}

/// Maximum-likelihood logit fit. Newton steps are halved while they lower the
/// likelihood; standard errors come from the inverse information matrix at
/// the optimum.
pub fn fit_logistic(x: &DesignMatrix, y: &[f64]) -> Result<FitResult, StatsError> {
    check_design(x, y)?;
    if y.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(StatsError::InvalidInput("logit outcome must be 0 or 1".into()));
    }
    let p = x.ncols();
    let mut beta = vec![0.0; p];
    let mut eta = vec![0.0; y.len()];
    let mut llf = log_likelihood(y, &eta);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < MAX_IRLS_ITERATIONS {
        iterations += 1;
        let (cols, rhs) = weighted_system(x, y, &eta).ok_or_else(|| separation(x, &beta))?;
        let qr = Qr::new(&cols);
        if qr.first_dependent_column().is_some() {
            return Err(separation(x, &beta));
        }
        let delta = qr.solve(&rhs);

        let mut step = 1.0;
        let (mut cand, mut cand_eta, mut cand_llf);
        let mut halvings = 0;
        loop {
            cand = beta.iter().zip(&delta).map(|(b, d)| b + step * d).collect::<Vec<_>>();
            cand_eta = mat_vec(x.columns(), &cand);
            cand_llf = log_likelihood(y, &cand_eta);
            if cand_llf >= llf - 1e-12 * llf.abs() || halvings == MAX_STEP_HALVINGS {
                break;
            }
            step *= 0.5;
            halvings += 1;
        }
        let change = delta.iter().map(|d| (step * d).abs()).fold(0.0, f64::max);
        beta = cand;
        eta = cand_eta;
        llf = cand_llf;

        if beta.iter().any(|b| b.abs() > SEPARATION_THRESHOLD || !b.is_finite()) {
            return Err(separation(x, &beta));
        }
        if change < IRLS_TOLERANCE {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(StatsError::NonConvergence { iterations });
    }

    let (cols, _) = weighted_system(x, y, &eta).ok_or_else(|| separation(x, &beta))?;
    let cov = Qr::new(&cols).xtx_inverse();
    let coefficients = x
        .names()
        .iter()
        .zip(&beta)
        .enumerate()
        .map(|(j, (name, &estimate))| {
            let std_error = cov[j][j].sqrt();
            let statistic = estimate / std_error;
            Coefficient {
                name: name.clone(),
                estimate,
                std_error,
                statistic,
                p_value: normal_two_sided_p(statistic),
            }
        })
        .collect();
    Ok(FitResult {
        kind: ModelKind::Logit,
        coefficients,
        log_likelihood: llf,
        r_squared: None,
        n_obs: y.len(),
        converged,
        iterations,
    })
}
