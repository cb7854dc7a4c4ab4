use std::collections::BTreeMap;

use serde::Serialize;

use super::{section_seed, StudyError};
use crate::ingest::{MatchFormat, MatchRecord, StatsIndex};
use crate::leadership::{
    build_differentials, build_observations, build_team_features, DifferentialRow, DropLedger, FeatureOptions,
    ObservationRow, TeamFeatures,
};
use crate::stats::{
    binomial_ci, bootstrap_difference, bootstrap_mean_ci, encode_fixed_effects, fit_logistic, fit_ols,
    likelihood_ratio_test, odds_ratio, sample_sd, standardized_coefficients, vif, BootstrapDifference, DesignMatrix,
    FitResult, IntervalEstimate, LrTest, StatsError, Vif, Z_95,
};

/// One fitted model, or the reason it could not be fitted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelReport {
    pub model: String,
    pub n_obs: usize,
    pub fit: Option<FitResult>,
    /// Against the intercept-only model on the same rows (logit only).
    pub lr_test: Option<LrTest>,
    pub reference_levels: BTreeMap<String, String>,
    pub pruned: Vec<String>,
    pub error: Option<String>,
}

impl ModelReport {
    fn failed(model: &str, n_obs: usize, e: impl std::fmt::Display) -> Self {
        Self {
            model: model.into(),
            n_obs,
            fit: None,
            lr_test: None,
            reference_levels: BTreeMap::new(),
            pruned: Vec::new(),
            error: Some(e.to_string()),
        }
    }

    fn fitted(model: &str, x: &DesignMatrix, fit: FitResult, lr_test: Option<LrTest>) -> Self {
        Self {
            model: model.into(),
            n_obs: fit.n_obs,
            fit: Some(fit),
            lr_test,
            reference_levels: x.reference_levels().clone(),
            pruned: x.pruned().to_vec(),
            error: None,
        }
    }

    pub fn estimate(&self, name: &str) -> Option<f64> {
        self.fit.as_ref().and_then(|f| f.estimate(name))
    }
}

fn require_column(x: DesignMatrix, name: &str) -> Result<DesignMatrix, StatsError> {
    if x.column(name).is_none() {
        return Err(StatsError::Rank { column: name.into() });
    }
    Ok(x)
}

fn logit_model(model: &str, design: Result<DesignMatrix, StatsError>, y: &[f64]) -> (ModelReport, Option<DesignMatrix>) {
    let run = || -> Result<(DesignMatrix, FitResult, LrTest), StatsError> {
        if y.is_empty() {
            return Err(StatsError::EmptyList);
        }
        if y.iter().all(|&v| v == y[0]) {
            return Err(StatsError::Degenerate(format!("every outcome equals {}", y[0])));
        }
        let x = design?;
        let fit = fit_logistic(&x, y)?;
        let null = fit_logistic(&DesignMatrix::intercept_only(y.len()), y)?;
        let lr = likelihood_ratio_test(&fit, &null, fit.n_params() - 1)?;
        Ok((x, fit, lr))
    };
    match run() {
        Ok((x, fit, lr)) => (ModelReport::fitted(model, &x, fit, Some(lr)), Some(x)),
        Err(e) => (ModelReport::failed(model, y.len(), e), None),
    }
}

fn ols_model(model: &str, design: Result<DesignMatrix, StatsError>, y: &[f64]) -> (ModelReport, Option<DesignMatrix>) {
    let run = || -> Result<(DesignMatrix, FitResult), StatsError> {
        if y.is_empty() {
            return Err(StatsError::EmptyList);
        }
        let x = design?;
        let fit = fit_ols(&x, y)?;
        Ok((x, fit))
    };
    match run() {
        Ok((x, fit)) => (ModelReport::fitted(model, &x, fit, None), Some(x)),
        Err(e) => (ModelReport::failed(model, y.len(), e), None),
    }
}

/// Counts of (C, W) in the logit sample.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CrossTab {
    pub c1_w1: u64,
    pub c1_w0: u64,
    pub c0_w1: u64,
    pub c0_w0: u64,
}

impl CrossTab {
    fn from_rows(rows: &[ObservationRow]) -> Self {
        let mut t = Self::default();
        for r in rows {
            match (r.c, r.w) {
                (1, 1) => t.c1_w1 += 1,
                (1, _) => t.c1_w0 += 1,
                (_, 1) => t.c0_w1 += 1,
                _ => t.c0_w0 += 1,
            }
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralizedSection {
    pub format: MatchFormat,
    pub config_hash: String,
    pub ledger: DropLedger,
    pub crosstab: CrossTab,
    /// Intercept and C.
    pub model1: ModelReport,
    /// C, S_b, S_p with team, year and batting-position fixed effects.
    pub model2: ModelReport,
    pub odds_ratio_c: Option<f64>,
}

pub(super) fn centralized_from_rows(
    format: MatchFormat,
    hash: &str,
    rows: &[ObservationRow],
    ledger: DropLedger,
) -> CentralizedSection {
    let y: Vec<f64> = rows.iter().map(|r| f64::from(r.w)).collect();
    let col = |f: fn(&ObservationRow) -> u8| rows.iter().map(|r| f64::from(f(r))).collect::<Vec<f64>>();
    let c = col(|r| r.c);
    let m1 = DesignMatrix::with_intercept(vec![("C".into(), c.clone())]);
    let (model1, _) = logit_model("model1", m1, &y);
    let m2 = encode_fixed_effects(
        &y,
        vec![("C".into(), c), ("S_b".into(), col(|r| r.s_b)), ("S_p".into(), col(|r| r.s_p))],
        vec![
            ("team".into(), rows.iter().map(|r| r.team.clone()).collect()),
            ("year".into(), rows.iter().map(|r| r.year.to_string()).collect()),
            (
                "batting_position".into(),
                rows.iter().map(|r| r.batting_position.to_string()).collect(),
            ),
        ],
    )
    .and_then(|x| require_column(x, "C"));
    let (model2, _) = logit_model("model2", m2, &y);
    CentralizedSection {
        format,
        config_hash: hash.into(),
        ledger,
        crosstab: CrossTab::from_rows(rows),
        odds_ratio_c: model1.estimate("C").map(odds_ratio),
        model1,
        model2,
    }
}

/// Captain-centrality logits for the matches of one format.
pub fn run_centralized_study(
    matches: &[&MatchRecord],
    stats: &StatsIndex,
    format: MatchFormat,
    options: FeatureOptions,
) -> Result<CentralizedSection, StudyError> {
    let matches = of_format(matches, format)?;
    let (rows, ledger) = build_observations(&matches, stats, options);
    Ok(centralized_from_rows(format, "", &rows, ledger))
}

fn of_format<'a>(matches: &[&'a MatchRecord], format: MatchFormat) -> Result<Vec<&'a MatchRecord>, StudyError> {
    if matches.is_empty() {
        return Err(StudyError::EmptyCorpus);
    }
    let out: Vec<_> = matches.iter().copied().filter(|m| m.format == format).collect();
    if out.is_empty() {
        return Err(StudyError::NoMatches(format));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VifEntry {
    pub column: String,
    pub vif: Vif,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StdCoefEntry {
    pub model: String,
    pub column: String,
    pub std_beta: Option<f64>,
    /// `(beta -/+ 1.96 SE) sd(x) / sd(y)`.
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributedSection {
    pub format: MatchFormat,
    pub config_hash: String,
    pub ledger: DropLedger,
    /// Intercept and domega.
    pub model1: ModelReport,
    /// domega, dcv, dbavg with ground and year fixed effects.
    pub model2: ModelReport,
    pub vif: Vec<VifEntry>,
    pub vif_error: Option<String>,
    pub std_coef: Vec<StdCoefEntry>,
}

const DIFF_COVARIATES: [&str; 3] = ["domega", "dcv", "dbavg"];

fn diff_column(rows: &[DifferentialRow], name: &str) -> Vec<f64> {
    rows.iter()
        .map(|r| match name {
            "domega" => r.domega,
            "dcv" => r.dcv,
            "dbavg" => r.dbavg,
            _ => unreachable!("unknown covariate {name}"),
        })
        .collect()
}

fn std_coef_entries(
    model: &ModelReport,
    x: Option<&DesignMatrix>,
    names: &[&str],
    rows: &[DifferentialRow],
    y: &[f64],
) -> Vec<StdCoefEntry> {
    let computed = match (&model.fit, x) {
        (Some(fit), Some(x)) => standardized_coefficients(fit, x, y),
        _ => BTreeMap::new(),
    };
    let sd_y = sample_sd(y).ok();
    names
        .iter()
        .map(|&name| {
            let result = computed.get(name).cloned().unwrap_or_else(|| {
                // Not in the fit: pruned or the fit failed. Constant columns
                // are reported as such.
                let raw = diff_column(rows, name);
                match sample_sd(&raw) {
                    Ok(0.0) => Err(StatsError::ZeroVariance { column: name.into() }),
                    Err(e) => Err(e),
                    Ok(_) => Err(model
                        .error
                        .as_ref()
                        .map(|e| StatsError::InvalidInput(format!("fit failed: {e}")))
                        .unwrap_or(StatsError::Rank { column: name.into() })),
                }
            });
            match result {
                Ok(std_beta) => {
                    let c = model.fit.as_ref().and_then(|f| f.coefficient(name)).expect("fitted column");
                    let scale = sample_sd(&diff_column(rows, name)).unwrap_or(f64::NAN) / sd_y.unwrap_or(f64::NAN);
                    let (a, b) = ((c.estimate - Z_95 * c.std_error) * scale, (c.estimate + Z_95 * c.std_error) * scale);
                    StdCoefEntry {
                        model: model.model.clone(),
                        column: name.into(),
                        std_beta: Some(std_beta),
                        lower: Some(a.min(b)),
                        upper: Some(a.max(b)),
                        error: None,
                    }
                }
                Err(e) => StdCoefEntry {
                    model: model.model.clone(),
                    column: name.into(),
                    std_beta: None,
                    lower: None,
                    upper: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

pub(super) fn distributed_from_rows(
    format: MatchFormat,
    hash: &str,
    rows: &[DifferentialRow],
    ledger: DropLedger,
) -> DistributedSection {
    let y: Vec<f64> = rows.iter().map(|r| r.dr).collect();
    let m1 = DesignMatrix::with_intercept(vec![("domega".into(), diff_column(rows, "domega"))]);
    let (model1, x1) = ols_model("model1", m1, &y);
    let m2 = encode_fixed_effects(
        &y,
        DIFF_COVARIATES.iter().map(|&n| (n.to_string(), diff_column(rows, n))).collect(),
        vec![
            ("ground".into(), rows.iter().map(|r| r.ground.clone()).collect()),
            ("year".into(), rows.iter().map(|r| r.year.to_string()).collect()),
        ],
    );
    let (model2, x2) = ols_model("model2", m2, &y);
    let (vif_table, vif_error) = match x2.as_ref().map(vif) {
        Some(Ok(v)) => (v.into_iter().map(|(column, vif)| VifEntry { column, vif }).collect(), None),
        Some(Err(e)) => (Vec::new(), Some(e.to_string())),
        None => (Vec::new(), model2.error.clone()),
    };
    let mut std_coef = std_coef_entries(&model1, x1.as_ref(), &["domega"], rows, &y);
    std_coef.extend(std_coef_entries(&model2, x2.as_ref(), &DIFF_COVARIATES, rows, &y));
    DistributedSection {
        format,
        config_hash: hash.into(),
        ledger,
        model1,
        model2,
        vif: vif_table,
        vif_error,
        std_coef,
    }
}

/// Run-rate differential regressions for the matches of one format.
pub fn run_distributed_study(
    matches: &[&MatchRecord],
    stats: &StatsIndex,
    format: MatchFormat,
    options: FeatureOptions,
) -> Result<DistributedSection, StudyError> {
    let matches = of_format(matches, format)?;
    let (rows, ledger) = build_differentials(&matches, stats, options);
    Ok(distributed_from_rows(format, "", &rows, ledger))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BciStratum {
    pub centralized: u8,
    pub successes: u64,
    pub trials: u64,
    pub interval: IntervalEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BciSection {
    pub format: MatchFormat,
    pub config_hash: String,
    /// `win` for ODIs (the logit sample), `win_or_draw` for Tests (every
    /// team unit, draws included).
    pub criterion: String,
    pub strata: Vec<BciStratum>,
    pub notes: Vec<String>,
    pub ledger: DropLedger,
}

pub(super) fn bci_from_rows(
    format: MatchFormat,
    hash: &str,
    observations: &[ObservationRow],
    features: &[TeamFeatures],
    ledger: DropLedger,
) -> BciSection {
    let (criterion, counts): (&str, Vec<(u8, bool)>) = match format {
        MatchFormat::Odi => ("win", observations.iter().map(|r| (r.c, r.w == 1)).collect()),
        MatchFormat::Test => (
            "win_or_draw",
            features.iter().map(|f| (f.centralized, f.score.value() >= 1)).collect(),
        ),
    };
    let mut strata = Vec::new();
    let mut notes = Vec::new();
    for c in [1u8, 0] {
        let trials = counts.iter().filter(|(k, _)| *k == c).count() as u64;
        let successes = counts.iter().filter(|(k, s)| *k == c && *s).count() as u64;
        match binomial_ci(successes, trials) {
            Ok(interval) => strata.push(BciStratum {
                centralized: c,
                successes,
                trials,
                interval,
            }),
            Err(_) => notes.push(format!("stratum C={c} has no observations; omitted")),
        }
    }
    BciSection {
        format,
        config_hash: hash.into(),
        criterion: criterion.into(),
        strata,
        notes,
        ledger,
    }
}

/// Normal-approximation intervals for the C=1 and C=0 strata of one format.
pub fn run_bci_study(
    matches: &[&MatchRecord],
    stats: &StatsIndex,
    format: MatchFormat,
    options: FeatureOptions,
) -> Result<BciSection, StudyError> {
    let matches = of_format(matches, format)?;
    let (obs, _) = build_observations(&matches, stats, options);
    let (features, ledger) = build_team_features(&matches, stats, options);
    Ok(bci_from_rows(format, "", &obs, &features, ledger))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreStratum {
    pub centralized: u8,
    pub n: usize,
    /// Mean 0/1/2 score with its bootstrap percentile interval.
    pub interval: IntervalEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreSection {
    pub format: MatchFormat,
    pub config_hash: String,
    pub replicates: usize,
    pub strata: Vec<ScoreStratum>,
    /// Centralized minus de-centralized mean score.
    pub difference: Option<BootstrapDifference>,
    pub notes: Vec<String>,
    pub ledger: DropLedger,
}

pub(super) fn scores_from_rows(
    format: MatchFormat,
    hash: &str,
    features: &[TeamFeatures],
    ledger: DropLedger,
    replicates: usize,
    seed: u64,
) -> ScoreSection {
    let scores = |c: u8| -> Vec<f64> {
        features
            .iter()
            .filter(|f| f.centralized == c)
            .map(|f| f64::from(f.score.value()))
            .collect()
    };
    let (central, other) = (scores(1), scores(0));
    let mut strata = Vec::new();
    let mut notes = Vec::new();
    for (slot, c, values) in [(0, 1u8, &central), (1, 0, &other)] {
        match bootstrap_mean_ci(values, replicates, section_seed(seed, format, slot)) {
            Ok(interval) => strata.push(ScoreStratum {
                centralized: c,
                n: values.len(),
                interval,
            }),
            Err(e) => notes.push(format!("stratum C={c} omitted: {e}")),
        }
    }
    let difference = bootstrap_difference(&central, &other, replicates, section_seed(seed, format, 2)).ok();
    ScoreSection {
        format,
        config_hash: hash.into(),
        replicates,
        strata,
        difference,
        notes,
        ledger,
    }
}

/// Bootstrapped mean scores per leadership stratum for one format.
pub fn run_score_averages(
    matches: &[&MatchRecord],
    stats: &StatsIndex,
    format: MatchFormat,
    options: FeatureOptions,
    replicates: usize,
    seed: u64,
) -> Result<ScoreSection, StudyError> {
    let matches = of_format(matches, format)?;
    let (features, ledger) = build_team_features(&matches, stats, options);
    Ok(scores_from_rows(format, "", &features, ledger, replicates, seed))
}
