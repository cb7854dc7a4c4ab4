//! Ordinary least squares via Householder QR.

use statrs::distribution::{ContinuousCDF, StudentsT};

use super::linalg::{mat_vec, Qr};
use super::{check_design, Coefficient, DesignMatrix, FitResult, ModelKind, StatsError};

pub fn fit_ols(x: &DesignMatrix, y: &[f64]) -> Result<FitResult, StatsError> {
    let qr: Qr = check_design(x, y)?;
    let n = y.len();
    let p = x.ncols();
    let beta = qr.solve(y);
    let fitted = mat_vec(x.columns(), &beta);
    let rss: f64 = y.iter().zip(&fitted).map(|(a, f)| (a - f).powi(2)).sum();
    let tss: f64 = if x.has_intercept() {
        let m = y.iter().sum::<f64>() / n as f64;
        y.iter().map(|v| (v - m).powi(2)).sum()
    } else {
        y.iter().map(|v| v * v).sum()
    };
    if tss == 0.0 {
        return Err(StatsError::Degenerate("outcome has zero variation".into()));
    }
    let df = (n - p) as f64;
    let sigma2 = rss / df;
    let cov = qr.xtx_inverse();
    let t_dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
    let coefficients = x
        .names()
        .iter()
        .zip(&beta)
        .enumerate()
        .map(|(j, (name, &estimate))| {
            let std_error = (sigma2 * cov[j][j]).sqrt();
            let (statistic, p_value) = if std_error > 0.0 {
                let t = estimate / std_error;
                (t, 2.0 * t_dist.cdf(-t.abs()))
            } else if estimate == 0.0 {
                (0.0, 1.0)
            } else {
                (f64::INFINITY.copysign(estimate), 0.0)
            };
            Coefficient {
                name: name.clone(),
                estimate,
                std_error,
                statistic,
                p_value,
            }
        })
        .collect();
    let log_likelihood = -0.5 * n as f64 * ((std::f64::consts::TAU * rss / n as f64).ln() + 1.0);
    Ok(FitResult {
        kind: ModelKind::Ols,
        coefficients,
        log_likelihood,
        r_squared: Some(1.0 - rss / tss),
        n_obs: n,
        converged: true,
        iterations: 1,
    })
}
