//! The full study over one corpus: captain-centrality logits, run-rate
//! differential regressions, binomial intervals and bootstrapped score
//! averages, plus a single-match summary.

mod report;
mod sections;
pub mod simulate;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::centrality::CentralityReport;
use crate::graph::{build_network, PartnershipNetwork};
use crate::ingest::{Corpus, MatchFormat, MatchRecord, Side, StatsIndex};
use crate::leadership::{
    build_differentials, build_observations, build_team_features, centralized_indicator, team_outcome_score,
    DifferentialRow, FeatureOptions, ObservationRow,
};
use crate::rng::SplitMix64;
use crate::stats::MIN_REPLICATES;

pub use report::{write_report_dir, REPORT_FILES};
pub use sections::{
    run_bci_study, run_centralized_study, run_distributed_study, run_score_averages, BciSection, BciStratum,
    CentralizedSection, CrossTab, DistributedSection, ModelReport, ScoreSection, ScoreStratum, StdCoefEntry,
    VifEntry,
};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatFilter {
    Test,
    Odi,
    #[default]
    Both,
}

impl FormatFilter {
    /// Formats studied, ODI first.
    pub fn formats(self) -> Vec<MatchFormat> {
        match self {
            FormatFilter::Test => vec![MatchFormat::Test],
            FormatFilter::Odi => vec![MatchFormat::Odi],
            FormatFilter::Both => vec![MatchFormat::Odi, MatchFormat::Test],
        }
    }
}

impl FromStr for FormatFilter {
    type Err = StudyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "test" => Ok(FormatFilter::Test),
            "odi" => Ok(FormatFilter::Odi),
            "both" => Ok(FormatFilter::Both),
            other => Err(StudyError::Config(format!("unknown format filter {other:?}"))),
        }
    }
}

impl fmt::Display for FormatFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FormatFilter::Test => "test",
            FormatFilter::Odi => "odi",
            FormatFilter::Both => "both",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub format: FormatFilter,
    pub seed: u64,
    pub bootstrap: usize,
    pub features: FeatureOptions,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            format: FormatFilter::Both,
            seed: 0,
            bootstrap: MIN_REPLICATES,
            features: FeatureOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StudyError {
    #[error("corpus contains no matches")]
    EmptyCorpus,
    #[error("corpus contains no {0} matches")]
    NoMatches(MatchFormat),
    #[error("invalid configuration: {0}")]
    Config(String),
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn corpus_digest(corpus: &Corpus) -> String {
    sha256_hex(corpus.to_jsonl().as_bytes())
}

pub fn stats_digest(stats: &StatsIndex) -> String {
    sha256_hex(stats.to_csv_string().as_bytes())
}

/// SHA-256 over the configuration and the canonical forms of both inputs.
pub fn config_hash(config: &StudyConfig, corpus_sha256: &str, stats_sha256: &str) -> String {
    #[derive(Serialize)]
    struct Key<'a> {
        config: &'a StudyConfig,
        corpus_sha256: &'a str,
        stats_sha256: &'a str,
    }
    let key = Key {
        config,
        corpus_sha256,
        stats_sha256,
    };
    sha256_hex(serde_json::to_string(&key).expect("config serializes").as_bytes())
}

/// Seed of bootstrap stream `slot` for a format: the first draw of
/// substream `3 * format_index + slot`, with ODI = 0 and TEST = 1.
pub fn section_seed(seed: u64, format: MatchFormat, slot: u64) -> u64 {
    let f = match format {
        MatchFormat::Odi => 0,
        MatchFormat::Test => 1,
    };
    SplitMix64::substream(seed, 3 * f + slot).next_u64()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyReport {
    pub config_hash: String,
    pub config: StudyConfig,
    pub seed: u64,
    pub corpus_sha256: String,
    pub stats_sha256: String,
    pub matches_by_format: BTreeMap<MatchFormat, usize>,
    pub centralized: Vec<CentralizedSection>,
    pub distributed: Vec<DistributedSection>,
    pub bci: Vec<BciSection>,
    pub score_averages: Vec<ScoreSection>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub observations: Vec<ObservationRow>,
    #[serde(skip)]
    pub differentials: Vec<DifferentialRow>,
}

impl StudyReport {
    /// Headline fits that failed, as `(section, format, message)`.
    pub fn model1_failures(&self) -> Vec<(&'static str, MatchFormat, String)> {
        let mut out = Vec::new();
        for s in &self.centralized {
            if let Some(e) = &s.model1.error {
                out.push(("centralized", s.format, e.clone()));
            }
        }
        for s in &self.distributed {
            if let Some(e) = &s.model1.error {
                out.push(("distributed", s.format, e.clone()));
            }
        }
        out
    }

    pub fn centralized_for(&self, format: MatchFormat) -> Option<&CentralizedSection> {
        self.centralized.iter().find(|s| s.format == format)
    }

    pub fn distributed_for(&self, format: MatchFormat) -> Option<&DistributedSection> {
        self.distributed.iter().find(|s| s.format == format)
    }
}

pub fn validate_config(config: &StudyConfig) -> Result<(), StudyError> {
    if config.bootstrap < MIN_REPLICATES {
        return Err(StudyError::Config(format!(
            "bootstrap replicates must be at least {MIN_REPLICATES}, got {}",
            config.bootstrap
        )));
    }
    Ok(())
}

/// Runs every section for each selected format. With the `both` filter a
/// format without matches is skipped with a note; an explicitly requested
/// format without matches is an error.
pub fn replicate(corpus: &Corpus, stats: &StatsIndex, config: &StudyConfig) -> Result<StudyReport, StudyError> {
    validate_config(config)?;
    if corpus.is_empty() {
        return Err(StudyError::EmptyCorpus);
    }
    let corpus_sha256 = corpus_digest(corpus);
    let stats_sha256 = stats_digest(stats);
    let hash = config_hash(config, &corpus_sha256, &stats_sha256);
    let mut report = StudyReport {
        config_hash: hash.clone(),
        config: *config,
        seed: config.seed,
        corpus_sha256,
        stats_sha256,
        matches_by_format: BTreeMap::new(),
        centralized: Vec::new(),
        distributed: Vec::new(),
        bci: Vec::new(),
        score_averages: Vec::new(),
        notes: Vec::new(),
        observations: Vec::new(),
        differentials: Vec::new(),
    };
    let opts = config.features;
    for format in config.format.formats() {
        let matches: Vec<&MatchRecord> = corpus.iter().filter(|m| m.format == format).collect();
        report.matches_by_format.insert(format, matches.len());
        if matches.is_empty() {
            if config.format == FormatFilter::Both {
                report.notes.push(format!("no {format} matches; {format} sections omitted"));
                continue;
            }
            return Err(StudyError::NoMatches(format));
        }
        let (obs, obs_ledger) = build_observations(&matches, stats, opts);
        let (features, feat_ledger) = build_team_features(&matches, stats, opts);
        let (diffs, diff_ledger) = build_differentials(&matches, stats, opts);

        report
            .centralized
            .push(sections::centralized_from_rows(format, &hash, &obs, obs_ledger));
        report
            .distributed
            .push(sections::distributed_from_rows(format, &hash, &diffs, diff_ledger));
        report
            .bci
            .push(sections::bci_from_rows(format, &hash, &obs, &features, feat_ledger.clone()));
        report.score_averages.push(sections::scores_from_rows(
            format,
            &hash,
            &features,
            feat_ledger,
            config.bootstrap,
            config.seed,
        ));
        report.observations.extend(obs);
        report.differentials.extend(diffs);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TeamAnalysis {
    pub side: Side,
    pub team: String,
    pub captain: String,
    pub score: u8,
    pub run_rate: Option<f64>,
    pub n_players: usize,
    pub betweenness: BTreeMap<String, f64>,
    pub omega: Option<f64>,
    /// Absent when the captain is not in the network.
    pub centralized: Option<u8>,
    pub captain_batting_position: Option<u8>,
    #[serde(skip)]
    pub network: Option<PartnershipNetwork>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchAnalysis {
    pub match_id: String,
    pub format: MatchFormat,
    pub year: i32,
    pub ground: String,
    pub teams: Vec<TeamAnalysis>,
}

/// Networks, centrality and leadership indicators for both teams of a match
/// (innings aggregated).
pub fn analyze_match(record: &MatchRecord) -> MatchAnalysis {
    let teams = Side::BOTH
        .iter()
        .map(|&side| {
            let set = record.team(side);
            let network = build_network(&record.match_id, set).ok();
            let report = network.as_ref().map(CentralityReport::compute);
            TeamAnalysis {
                side,
                team: set.team.clone(),
                captain: set.captain.clone(),
                score: team_outcome_score(record.outcome, side).value(),
                run_rate: set.run_rate(),
                n_players: network.as_ref().map_or(0, PartnershipNetwork::node_count),
                betweenness: report.as_ref().map(|r| r.betweenness.clone()).unwrap_or_default(),
                omega: report.as_ref().and_then(|r| r.omega),
                centralized: report.as_ref().and_then(|r| centralized_indicator(r, &set.captain).ok()),
                captain_batting_position: set.captain_batting_position(),
                network,
            }
        })
        .collect();
    MatchAnalysis {
        match_id: record.match_id.clone(),
        format: record.format,
        year: record.year,
        ground: record.ground.clone(),
        teams,
    }
}
