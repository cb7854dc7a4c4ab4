//! Percentile bootstrap over case resamples.
//!
//! Replicate `r` draws its indices from `SplitMix64::substream(seed, r)`, so
//! replicates can run in any order (or in parallel) with identical results.

use rayon::prelude::*;
use serde::Serialize;

use super::{mean, IntervalEstimate, StatsError};
use crate::rng::SplitMix64;

pub const MIN_REPLICATES: usize = 1000;

/// Linear interpolation between order statistics (`h = (n - 1) q`).
pub fn percentile(sorted: &[f64], q: f64) -> Result<f64, StatsError> {
    if sorted.is_empty() {
        return Err(StatsError::EmptyList);
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(StatsError::InvalidInput(format!("quantile {q} outside [0, 1]")));
    }
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    Ok(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

fn resampled_mean(values: &[f64], rng: &mut SplitMix64) -> f64 {
    let n = values.len();
    (0..n).map(|_| values[rng.below(n)]).sum::<f64>() / n as f64
}

fn check_replicates(replicates: usize) -> Result<(), StatsError> {
    if replicates < MIN_REPLICATES {
        return Err(StatsError::InvalidInput(format!(
            "{replicates} bootstrap replicates, need at least {MIN_REPLICATES}"
        )));
    }
    Ok(())
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// 2.5/97.5 percentile interval of `replicates` resampled means; the point is
/// the sample mean.
pub fn bootstrap_mean_ci(values: &[f64], replicates: usize, seed: u64) -> Result<IntervalEstimate, StatsError> {
    let point = mean(values)?;
    check_replicates(replicates)?;
    let means = sorted(
        (0..replicates)
            .into_par_iter()
            .map(|r| resampled_mean(values, &mut SplitMix64::substream(seed, r as u64)))
            .collect(),
    );
    Ok(IntervalEstimate {
        lower: percentile(&means, 0.025)?,
        point,
        upper: percentile(&means, 0.975)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapDifference {
    /// `mean(a) - mean(b)`.
    pub difference: f64,
    pub lower: f64,
    pub upper: f64,
    /// Two-sided: `min(1, 2 (min(#d <= 0, #d >= 0) + 1) / (B + 1))`.
    pub p_value: f64,
}

/// Bootstrap of `mean(a) - mean(b)` with the groups resampled independently
/// (`a` first, then `b`, from the same replicate stream).
pub fn bootstrap_difference(a: &[f64], b: &[f64], replicates: usize, seed: u64) -> Result<BootstrapDifference, StatsError> {
    let difference = mean(a)? - mean(b)?;
    check_replicates(replicates)?;
    let diffs = sorted(
        (0..replicates)
            .into_par_iter()
            .map(|r| {
                let mut rng = SplitMix64::substream(seed, r as u64);
                let ma = resampled_mean(a, &mut rng);
                ma - resampled_mean(b, &mut rng)
            })
            .collect(),
    );
    let below = diffs.iter().filter(|&&d| d <= 0.0).count();
    let above = diffs.iter().filter(|&&d| d >= 0.0).count();
    let p_value = (2.0 * (below.min(above) + 1) as f64 / (replicates + 1) as f64).min(1.0);
    Ok(BootstrapDifference {
        difference,
        lower: percentile(&diffs, 0.025)?,
        upper: percentile(&diffs, 0.975)?,
        p_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::binomial_ci;

    #[test]
    fn percentile_interpolates() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile(&v, 0.0).unwrap(), 1.0);
        assert_eq!(percentile(&v, 1.0).unwrap(), 4.0);
        assert!((percentile(&v, 0.5).unwrap() - 2.5).abs() < 1e-15);
        assert!((percentile(&v, 0.25).unwrap() - 1.75).abs() < 1e-15);
        assert_eq!(percentile(&[], 0.5), Err(StatsError::EmptyList));
    }

    #[test]
    fn constant_values_give_zero_width() {
        let ci = bootstrap_mean_ci(&[1.0; 40], 1000, 3).unwrap();
        assert_eq!((ci.lower, ci.point, ci.upper), (1.0, 1.0, 1.0));
    }

    #[test]
    fn balanced_scores_bracket_one() {
        let v: Vec<f64> = (0..400).map(|i| if i % 2 == 0 { 0.0 } else { 2.0 }).collect();
        let ci = bootstrap_mean_ci(&v, 2000, 11).unwrap();
        assert!(ci.lower < 1.0 && 1.0 < ci.upper, "{ci:?}");
    }

    #[test]
    fn close_to_normal_interval_for_bernoulli_scores() {
        // 500 draws with 210 successes, scored 0/2: the interval on the mean
        // score is twice the binomial interval on the proportion.
        let v: Vec<f64> = (0..500).map(|i| if i < 210 { 2.0 } else { 0.0 }).collect();
        let boot = bootstrap_mean_ci(&v, 4000, 5).unwrap();
        let normal = binomial_ci(210, 500).unwrap();
        let wb = boot.upper - boot.lower;
        let wn = 2.0 * (normal.upper - normal.lower);
        assert!((wb / wn - 1.0).abs() < 0.15, "bootstrap {wb} vs normal {wn}");
    }

    #[test]
    fn deterministic_per_seed() {
        let v: Vec<f64> = (0..50).map(|i| (i * 7 % 3) as f64).collect();
        assert_eq!(bootstrap_mean_ci(&v, 1000, 9), bootstrap_mean_ci(&v, 1000, 9));
        assert_ne!(bootstrap_mean_ci(&v, 1000, 9), bootstrap_mean_ci(&v, 1000, 10));
    }

    #[test]
    fn too_few_replicates() {
        assert!(matches!(bootstrap_mean_ci(&[1.0, 2.0], 999, 0), Err(StatsError::InvalidInput(_))));
        assert_eq!(bootstrap_mean_ci(&[], 1000, 0), Err(StatsError::EmptyList));
    }

    #[test]
    fn extreme_groups_are_separated() {
        let d = bootstrap_difference(&[2.0; 30], &[0.0; 30], 1000, 1).unwrap();
        assert_eq!(d.difference, 2.0);
        assert_eq!((d.lower, d.upper), (2.0, 2.0));
        assert!((d.p_value - 2.0 / 1001.0).abs() < 1e-15);
    }

    #[test]
    fn identical_groups_cover_zero() {
        let v: Vec<f64> = (0..200).map(|i| (i % 3) as f64).collect();
        let d = bootstrap_difference(&v, &v, 2000, 4).unwrap();
        assert!(d.lower < 0.0 && 0.0 < d.upper);
        assert!(d.p_value > 0.5);
    }
}
