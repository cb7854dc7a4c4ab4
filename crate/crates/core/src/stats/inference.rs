use std::collections::BTreeMap;

use serde::{Serialize, Serializer};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::linalg::{independent_columns, Qr};
use super::{DesignMatrix, FitResult, StatsError, INTERCEPT};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalEstimate {
    pub lower: f64,
    pub point: f64,
    pub upper: f64,
}

pub fn mean(values: &[f64]) -> Result<f64, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptyList);
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Standard deviation with the `n - 1` denominator.
pub fn sample_sd(values: &[f64]) -> Result<f64, StatsError> {
    if values.len() < 2 {
        return Err(StatsError::InvalidInput("sample sd needs at least two values".into()));
    }
    let m = mean(values)?;
    let ss: f64 = values.iter().map(|v| (v - m).powi(2)).sum();
    Ok((ss / (values.len() - 1) as f64).sqrt())
}

/// Normal-approximation interval `p +/- 1.96 sqrt(p (1 - p) / M)`, clamped to `[0, 1]`.
pub fn binomial_ci(successes: u64, trials: u64) -> Result<IntervalEstimate, StatsError> {
    if trials == 0 || successes > trials {
        return Err(StatsError::InvalidInput(format!(
            "need 0 <= m <= M and M >= 1, got m={successes}, M={trials}"
        )));
    }
    let m = trials as f64;
    let p = successes as f64 / m;
    let half = Z_95 * (p * (1.0 - p) / m).sqrt();
    Ok(IntervalEstimate {
        lower: (p - half).clamp(0.0, 1.0),
        point: p,
        upper: (p + half).clamp(0.0, 1.0),
    })
}

pub fn odds_ratio(beta: f64) -> f64 {
    beta.exp()
}

/// `beta_j * sd(x_j) / sd(y)` for every non-intercept coefficient of `fit`.
pub fn standardized_coefficients(
    fit: &FitResult,
    x: &DesignMatrix,
    y: &[f64],
) -> BTreeMap<String, Result<f64, StatsError>> {
    let sd_y = sample_sd(y);
    fit.coefficients
        .iter()
        .filter(|c| c.name != INTERCEPT)
        .map(|c| {
            let value = (|| {
                let sd_y = sd_y.clone()?;
                if sd_y == 0.0 {
                    return Err(StatsError::ZeroVariance { column: "outcome".into() });
                }
                let col = x
                    .column(&c.name)
                    .ok_or_else(|| StatsError::InvalidInput(format!("no design column {}", c.name)))?;
                let sd_x = sample_sd(col)?;
                if sd_x == 0.0 {
                    return Err(StatsError::ZeroVariance { column: c.name.clone() });
                }
                Ok(c.estimate * sd_x / sd_y)
            })();
            (c.name.clone(), value)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Vif {
    Finite(f64),
    PerfectCollinearity,
}

impl Vif {
    pub fn value(self) -> f64 {
        match self {
            Vif::Finite(v) => v,
            Vif::PerfectCollinearity => f64::INFINITY,
        }
    }
}

impl Serialize for Vif {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Vif::Finite(v) => serializer.serialize_f64(*v),
            Vif::PerfectCollinearity => serializer.serialize_str("PerfectCollinearity"),
        }
    }
}

/// Variance inflation `1 / (1 - R_j^2)` of each non-intercept column, where
/// `R_j^2` comes from regressing column `j` on an intercept and every other
/// column.
pub fn vif(x: &DesignMatrix) -> Result<Vec<(String, Vif)>, StatsError> {
    let regressors: Vec<usize> = (0..x.ncols()).filter(|&j| x.names()[j] != INTERCEPT).collect();
    if regressors.len() < 2 {
        return Err(StatsError::InvalidInput("VIF needs at least two non-intercept columns".into()));
    }
    let n = x.n_rows();
    let cols = x.columns();
    regressors
        .iter()
        .map(|&j| {
            let target = &cols[j];
            let m = target.iter().sum::<f64>() / n as f64;
            let tss: f64 = target.iter().map(|v| (v - m).powi(2)).sum();
            if tss == 0.0 {
                return Ok((x.names()[j].clone(), Vif::PerfectCollinearity));
            }
            let mut others: Vec<Vec<f64>> = vec![vec![1.0; n]];
            others.extend(regressors.iter().filter(|&&k| k != j).map(|&k| cols[k].clone()));
            let keep = independent_columns(&others);
            let others: Vec<Vec<f64>> = others.into_iter().zip(keep).filter(|(_, k)| *k).map(|(c, _)| c).collect();
            if n <= others.len() {
                return Err(StatsError::Degenerate("too few rows for VIF".into()));
            }
            let qr = Qr::new(&others);
            let coef = qr.solve(target);
            let fitted = super::linalg::mat_vec(&others, &coef);
            let rss: f64 = target.iter().zip(&fitted).map(|(a, f)| (a - f).powi(2)).sum();
            let unexplained = rss / tss;
            let value = if unexplained <= 1e-10 {
                Vif::PerfectCollinearity
            } else {
                Vif::Finite(1.0 / unexplained)
            };
            Ok((x.names()[j].clone(), value))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LrTest {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Upper chi-square tail of `2 (llf_full - llf_null)` with `df` degrees of freedom.
pub fn likelihood_ratio_test(full: &FitResult, null: &FitResult, df: usize) -> Result<LrTest, StatsError> {
    if df == 0 {
        return Err(StatsError::InvalidInput("likelihood-ratio test needs df >= 1".into()));
    }
    let gain = full.log_likelihood - null.log_likelihood;
    if gain < -1e-8 {
        return Err(StatsError::Nesting {
            full: full.log_likelihood,
            null: null.log_likelihood,
        });
    }
    let statistic = 2.0 * gain.max(0.0);
    let chi2 = ChiSquared::new(df as f64).expect("df >= 1");
    Ok(LrTest {
        statistic,
        df,
        p_value: chi2.sf(statistic),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{fit_logistic, fit_ols, ModelKind};

    fn fit_with_llf(llf: f64) -> FitResult {
        FitResult {
            kind: ModelKind::Logit,
            coefficients: vec![],
            log_likelihood: llf,
            r_squared: None,
            n_obs: 10,
            converged: true,
            iterations: 1,
        }
    }

    #[test]
    fn binomial_interval_matches_reported_values() {
        let a = binomial_ci(459, 891).unwrap();
        assert!((a.lower - 0.482).abs() < 1e-3 && (a.upper - 0.548).abs() < 1e-3);
        let b = binomial_ci(2293, 5067).unwrap();
        assert!((b.lower - 0.438).abs() < 1e-3 && (b.upper - 0.466).abs() < 1e-3);
    }

    #[test]
    fn binomial_degenerate_and_invalid() {
        let z = binomial_ci(0, 10).unwrap();
        assert_eq!((z.lower, z.point, z.upper), (0.0, 0.0, 0.0));
        let one = binomial_ci(10, 10).unwrap();
        assert_eq!((one.lower, one.upper), (1.0, 1.0));
        assert!(binomial_ci(3, 0).is_err());
        assert!(binomial_ci(4, 3).is_err());
    }

    #[test]
    fn binomial_width_scales_with_root_m() {
        for p in [0.1, 0.3, 0.5, 0.8] {
            for m in [100u64, 400, 1600, 6400] {
                let w1 = binomial_ci((p * m as f64).round() as u64, m).unwrap();
                let w4 = binomial_ci((p * 4.0 * m as f64).round() as u64, 4 * m).unwrap();
                let ratio = (w1.upper - w1.lower) / (w4.upper - w4.lower);
                assert!((ratio - 2.0).abs() < 1e-9, "p={p} m={m} ratio={ratio}");
            }
        }
    }

    #[test]
    fn odds_ratio_values() {
        assert!((odds_ratio(0.262) - 1.2996).abs() < 5e-4);
        assert_eq!(odds_ratio(0.0), 1.0);
        assert!((odds_ratio(-0.262) - 1.0 / odds_ratio(0.262)).abs() < 1e-9);
    }

    #[test]
    fn lr_test_cases() {
        let same = likelihood_ratio_test(&fit_with_llf(-10.0), &fit_with_llf(-10.0), 1).unwrap();
        assert_eq!((same.statistic, same.p_value), (0.0, 1.0));
        let five = likelihood_ratio_test(&fit_with_llf(-10.0), &fit_with_llf(-10.0 - 3.841 / 2.0), 1).unwrap();
        assert!((five.p_value - 0.05).abs() < 1e-3);
        assert!(matches!(
            likelihood_ratio_test(&fit_with_llf(-11.0), &fit_with_llf(-10.0), 1),
            Err(StatsError::Nesting { .. })
        ));
    }

    #[test]
    fn strong_effect_is_significant() {
        let c: Vec<f64> = (0..400).map(|i| (i % 2) as f64).collect();
        // Win rate 80% with C=1, 30% with C=0.
        let y: Vec<f64> = (0..400)
            .map(|i| {
                let k = i / 2 % 10;
                if i % 2 == 1 { (k < 8) as u8 as f64 } else { (k < 3) as u8 as f64 }
            })
            .collect();
        let full = fit_logistic(&DesignMatrix::with_intercept(vec![("C".into(), c)]).unwrap(), &y).unwrap();
        let null = fit_logistic(&DesignMatrix::intercept_only(400), &y).unwrap();
        let lr = likelihood_ratio_test(&full, &null, 1).unwrap();
        assert!(lr.p_value < 1e-6, "{lr:?}");
    }

    #[test]
    fn vif_orthogonal_and_duplicated() {
        let a = vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0];
        let b = vec![1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0];
        let d = DesignMatrix::with_intercept(vec![("a".into(), a.clone()), ("b".into(), b.clone())]).unwrap();
        for (_, v) in vif(&d).unwrap() {
            assert!((v.value() - 1.0).abs() < 1e-12);
        }
        let dup = DesignMatrix::with_intercept(vec![("a".into(), a.clone()), ("a2".into(), a), ("b".into(), b)]).unwrap();
        let v = vif(&dup).unwrap();
        assert_eq!(v[0].1, Vif::PerfectCollinearity);
        assert_eq!(v[1].1, Vif::PerfectCollinearity);
        assert!((v[2].1.value() - 1.0).abs() < 1e-12);
        let one = DesignMatrix::with_intercept(vec![("a".into(), vec![1.0, 2.0, 3.0])]).unwrap();
        assert!(vif(&one).is_err());
    }

    #[test]
    fn standardized_coefficient_scale_equivariance() {
        let x: Vec<f64> = (0..30).map(|i| ((i * 7) % 11) as f64).collect();
        let y: Vec<f64> = x.iter().enumerate().map(|(i, v)| 0.5 * v + ((i * 5) % 3) as f64).collect();
        let d1 = DesignMatrix::with_intercept(vec![("x".into(), x.clone())]).unwrap();
        let d2 = DesignMatrix::with_intercept(vec![("x".into(), x.iter().map(|v| 2.0 * v).collect())]).unwrap();
        let f1 = fit_ols(&d1, &y).unwrap();
        let f2 = fit_ols(&d2, &y).unwrap();
        assert!((f2.estimate("x").unwrap() - f1.estimate("x").unwrap() / 2.0).abs() < 1e-12);
        let s1 = standardized_coefficients(&f1, &d1, &y)["x"].clone().unwrap();
        let s2 = standardized_coefficients(&f2, &d2, &y)["x"].clone().unwrap();
        assert!((s1 - s2).abs() < 1e-10);
    }

    #[test]
    fn standardized_equals_raw_when_scales_match() {
        let x: Vec<f64> = (0..25).map(|i| ((i * 3) % 7) as f64 - 3.0).collect();
        let y: Vec<f64> = x.iter().rev().copied().collect();
        assert!((sample_sd(&x).unwrap() - sample_sd(&y).unwrap()).abs() < 1e-12);
        let d = DesignMatrix::with_intercept(vec![("x".into(), x)]).unwrap();
        let f = fit_ols(&d, &y).unwrap();
        let s = standardized_coefficients(&f, &d, &y)["x"].clone().unwrap();
        assert!((s - f.estimate("x").unwrap()).abs() < 1e-12);
    }
}
