//! Per-match leadership features: captain centrality, team score, talent
//! covariates and the between-team differentials.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::centrality::{degree_centralization, CentralityReport};
use crate::graph::{build_innings_network, build_network, PartnershipNetwork};
use crate::ingest::{MatchFormat, MatchRecord, Outcome, Side, StatsIndex, TeamInningsSet};

/// Margin by which the captain's betweenness must beat every teammate's.
pub const TOP_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LeadershipError {
    #[error("captain {0:?} is not in the partnership network")]
    CaptainAbsent(String),
    #[error("empty list")]
    EmptyList,
    #[error("mean is zero")]
    ZeroMean,
    #[error("need at least two values")]
    TooFewValues,
}

/// 0 loss, 1 draw or tie, 2 win.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TeamScore(u8);

impl TeamScore {
    pub const LOSS: TeamScore = TeamScore(0);
    pub const DRAW: TeamScore = TeamScore(1);
    pub const WIN: TeamScore = TeamScore(2);

    pub fn value(self) -> u8 {
        self.0
    }
}

pub fn team_outcome_score(outcome: Outcome, side: Side) -> TeamScore {
    match outcome.winner() {
        Some(w) if w == side => TeamScore::WIN,
        Some(_) => TeamScore::LOSS,
        None => TeamScore::DRAW,
    }
}

/// 1 iff the captain's betweenness exceeds every other player's by more than
/// [`TOP_MARGIN`]. A shared maximum gives 0.
pub fn centralized_indicator(report: &CentralityReport, captain: &str) -> Result<u8, LeadershipError> {
    let own = *report
        .betweenness
        .get(captain)
        .ok_or_else(|| LeadershipError::CaptainAbsent(captain.to_string()))?;
    let unique_top = report
        .betweenness
        .iter()
        .filter(|(p, _)| p.as_str() != captain)
        .all(|(_, &b)| own - b > TOP_MARGIN);
    Ok(u8::from(unique_top))
}

/// Midpoint of the two central order statistics for even lengths.
pub fn median(values: &[f64]) -> Result<f64, LeadershipError> {
    if values.is_empty() {
        return Err(LeadershipError::EmptyList);
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Ok(if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 })
}

/// 1 iff `pivot` is strictly above the median of `values`.
pub fn median_split(values: &[f64], pivot: f64) -> Result<u8, LeadershipError> {
    Ok(u8::from(pivot > median(values)?))
}

/// Sample standard deviation (n - 1) over the mean.
pub fn coefficient_of_variation(points: &[f64]) -> Result<f64, LeadershipError> {
    match points.len() {
        0 => return Err(LeadershipError::EmptyList),
        1 => return Err(LeadershipError::TooFewValues),
        _ => {}
    }
    let n = points.len() as f64;
    let m = points.iter().sum::<f64>() / n;
    if m == 0.0 {
        return Err(LeadershipError::ZeroMean);
    }
    let ss: f64 = points.iter().map(|p| (p - m).powi(2)).sum();
    Ok((ss / (n - 1.0)).sqrt() / m)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureOptions {
    /// Keep drawn and tied team observations in the logit sample with W = 0.
    pub include_draws_as_loss: bool,
    /// Treat each team innings as its own network instead of summing a
    /// Test team's two innings.
    pub per_innings_networks: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    NonDecisive,
    CaptainDidNotBat,
    CaptainAbsent,
    EmptyNetwork,
    MissingCaptainStats,
    TooFewPlayers,
    ZeroOvers,
    TalentUnavailable,
    ZeroMeanTalent,
}

impl DropReason {
    pub fn as_str(self) -> &'static str {
        match self {
            DropReason::NonDecisive => "non_decisive",
            DropReason::CaptainDidNotBat => "captain_did_not_bat",
            DropReason::CaptainAbsent => "captain_absent",
            DropReason::EmptyNetwork => "empty_network",
            DropReason::MissingCaptainStats => "missing_captain_stats",
            DropReason::TooFewPlayers => "too_few_players",
            DropReason::ZeroOvers => "zero_overs",
            DropReason::TalentUnavailable => "talent_unavailable",
            DropReason::ZeroMeanTalent => "zero_mean_talent",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DropEvent {
    pub match_id: String,
    /// Absent for match-level units.
    pub team: Option<String>,
    pub innings: Option<usize>,
    pub reason: DropReason,
}

/// Bookkeeping of why units left a sample. `units_in == units_used + sum(drops)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DropLedger {
    pub units_in: usize,
    pub units_used: usize,
    pub drops: BTreeMap<DropReason, usize>,
    #[serde(skip)]
    pub events: Vec<DropEvent>,
}

impl DropLedger {
    fn record(&mut self, event: DropEvent) {
        *self.drops.entry(event.reason).or_default() += 1;
        self.events.push(event);
    }

    pub fn total_dropped(&self) -> usize {
        self.drops.values().sum()
    }

    pub fn is_complete(&self) -> bool {
        self.units_in == self.units_used + self.total_dropped()
    }
}

/// Everything derived for one team unit (a team in a match, or one of its
/// innings in per-innings mode).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TeamFeatures {
    pub match_id: String,
    pub format: MatchFormat,
    pub year: i32,
    pub ground: String,
    pub side: Side,
    pub innings: Option<usize>,
    pub team: String,
    pub captain: String,
    pub outcome: Outcome,
    pub score: TeamScore,
    pub centralized: u8,
    pub batting_position: u8,
    pub s_b: u8,
    pub s_p: u8,
}

impl TeamFeatures {
    pub fn win(&self) -> u8 {
        u8::from(self.score == TeamScore::WIN)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationRow {
    pub match_id: String,
    #[serde(rename = "W")]
    pub w: u8,
    #[serde(rename = "C")]
    pub c: u8,
    #[serde(rename = "S_b")]
    pub s_b: u8,
    #[serde(rename = "S_p")]
    pub s_p: u8,
    pub team: String,
    pub year: i32,
    pub batting_position: u8,
    pub format: MatchFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferentialRow {
    pub match_id: String,
    pub format: MatchFormat,
    pub dr: f64,
    pub domega: f64,
    pub dcv: f64,
    pub dbavg: f64,
    pub ground: String,
    pub year: i32,
}

type UnitResult<T> = Result<T, (DropReason, Option<usize>)>;

/// The team networks studied for one side: the aggregate, or one per innings.
fn unit_networks(
    record: &MatchRecord,
    set: &TeamInningsSet,
    options: FeatureOptions,
) -> Vec<(Option<usize>, Option<PartnershipNetwork>)> {
    if options.per_innings_networks {
        set.innings
            .iter()
            .enumerate()
            .map(|(i, inn)| (Some(i), build_innings_network(&record.match_id, &set.team, inn).ok()))
            .collect()
    } else {
        vec![(None, build_network(&record.match_id, set).ok())]
    }
}

fn talent_split(net: &PartnershipNetwork, captain: &str, year: i32, stats: &StatsIndex) -> UnitResult<(u8, u8)> {
    let own = stats
        .lookup(captain, year)
        .map_err(|_| (DropReason::MissingCaptainStats, None))?;
    let (mut avgs, mut pts) = (Vec::new(), Vec::new());
    for p in net.nodes() {
        if let Ok(s) = stats.lookup(p, year) {
            avgs.push(s.batting_average);
            pts.push(f64::from(s.icc_points));
        }
    }
    let s_b = median_split(&avgs, own.batting_average).map_err(|_| (DropReason::TalentUnavailable, None))?;
    let s_p = median_split(&pts, f64::from(own.icc_points)).map_err(|_| (DropReason::TalentUnavailable, None))?;
    Ok((s_b, s_p))
}

fn unit_features(
    record: &MatchRecord,
    side: Side,
    innings: Option<usize>,
    net: Option<&PartnershipNetwork>,
    stats: &StatsIndex,
) -> UnitResult<TeamFeatures> {
    let set = record.team(side);
    if set.did_not_bat {
        return Err((DropReason::CaptainDidNotBat, innings));
    }
    let net = net.ok_or((DropReason::EmptyNetwork, innings))?;
    if !net.contains(&set.captain) {
        // In per-innings mode the captain may bat in only one of the innings.
        return Err((DropReason::CaptainAbsent, innings));
    }
    let report = CentralityReport::compute(net);
    let centralized = centralized_indicator(&report, &set.captain).map_err(|_| (DropReason::CaptainAbsent, innings))?;
    let batting_position = match innings {
        Some(i) => set.innings[i]
            .batting_order()
            .iter()
            .position(|p| *p == set.captain)
            .map(|k| (k + 1) as u8),
        None => set.captain_batting_position(),
    }
    .ok_or((DropReason::CaptainAbsent, innings))?;
    let (s_b, s_p) = talent_split(net, &set.captain, record.year, stats).map_err(|(r, _)| (r, innings))?;
    Ok(TeamFeatures {
        match_id: record.match_id.clone(),
        format: record.format,
        year: record.year,
        ground: record.ground.clone(),
        side,
        innings,
        team: set.team.clone(),
        captain: set.captain.clone(),
        outcome: record.outcome,
        score: team_outcome_score(record.outcome, side),
        centralized,
        batting_position,
        s_b,
        s_p,
    })
}

fn match_units(record: &MatchRecord, stats: &StatsIndex, options: FeatureOptions) -> Vec<(Side, UnitResult<TeamFeatures>)> {
    let mut out = Vec::new();
    for side in Side::BOTH {
        for (innings, net) in unit_networks(record, record.team(side), options) {
            out.push((side, unit_features(record, side, innings, net.as_ref(), stats)));
        }
    }
    out
}

fn collect_units<T>(
    matches: &[&MatchRecord],
    per_match: impl Fn(&MatchRecord) -> Vec<(Option<String>, UnitResult<T>)> + Sync,
) -> (Vec<T>, DropLedger)
where
    T: Send,
{
    let results: Vec<_> = matches.par_iter().map(|m| (m.match_id.clone(), per_match(m))).collect();
    let mut ledger = DropLedger::default();
    let mut rows = Vec::new();
    for (match_id, units) in results {
        for (team, r) in units {
            ledger.units_in += 1;
            match r {
                Ok(row) => {
                    ledger.units_used += 1;
                    rows.push(row);
                }
                Err((reason, innings)) => ledger.record(DropEvent {
                    match_id: match_id.clone(),
                    team,
                    innings,
                    reason,
                }),
            }
        }
    }
    (rows, ledger)
}

/// Features for every team unit, draws included. Matches are processed in the
/// order given.
pub fn build_team_features(
    matches: &[&MatchRecord],
    stats: &StatsIndex,
    options: FeatureOptions,
) -> (Vec<TeamFeatures>, DropLedger) {
    collect_units(matches, |m| {
        match_units(m, stats, options)
            .into_iter()
            .map(|(side, r)| (Some(m.team(side).team.clone()), r))
            .collect()
    })
}

/// Logit sample: one row per decisive team unit. Drawn and tied units are
/// dropped as `non_decisive` unless `include_draws_as_loss` is set.
pub fn build_observations(
    matches: &[&MatchRecord],
    stats: &StatsIndex,
    options: FeatureOptions,
) -> (Vec<ObservationRow>, DropLedger) {
    collect_units(matches, |m| {
        match_units(m, stats, options)
            .into_iter()
            .map(|(side, r)| {
                let team = Some(m.team(side).team.clone());
                if !m.outcome.is_decisive() && !options.include_draws_as_loss {
                    let innings = r.as_ref().map_or_else(|e| e.1, |f| f.innings);
                    return (team, Err((DropReason::NonDecisive, innings)));
                }
                (team, r.map(|f| observation(&f)))
            })
            .collect()
    })
}

pub fn observation(f: &TeamFeatures) -> ObservationRow {
    ObservationRow {
        match_id: f.match_id.clone(),
        w: f.win(),
        c: f.centralized,
        s_b: f.s_b,
        s_p: f.s_p,
        team: f.team.clone(),
        year: f.year,
        batting_position: f.batting_position,
        format: f.format,
    }
}

struct SideSummary {
    run_rate: f64,
    omega: f64,
    cv: f64,
    captain_average: f64,
}

fn side_summary(record: &MatchRecord, side: Side, stats: &StatsIndex, options: FeatureOptions) -> UnitResult<SideSummary> {
    let set = record.team(side);
    let run_rate = set.run_rate().ok_or((DropReason::ZeroOvers, None))?;
    let net = if options.per_innings_networks {
        set.innings
            .first()
            .and_then(|inn| build_innings_network(&record.match_id, &set.team, inn).ok())
    } else {
        build_network(&record.match_id, set).ok()
    }
    .ok_or((DropReason::EmptyNetwork, None))?;
    let omega = degree_centralization(&net).map_err(|_| (DropReason::TooFewPlayers, None))?;
    let captain_average = stats
        .lookup(&set.captain, record.year)
        .map_err(|_| (DropReason::MissingCaptainStats, None))?
        .batting_average;
    let points: Vec<f64> = net
        .nodes()
        .iter()
        .filter_map(|p| stats.lookup(p, record.year).ok())
        .map(|s| f64::from(s.icc_points))
        .collect();
    let cv = coefficient_of_variation(&points).map_err(|e| match e {
        LeadershipError::ZeroMean => (DropReason::ZeroMeanTalent, None),
        _ => (DropReason::TalentUnavailable, None),
    })?;
    Ok(SideSummary {
        run_rate,
        omega,
        cv,
        captain_average,
    })
}

/// One row per match: side one minus side two, where side one is the team
/// that batted first (listed first in the record). Draws are included.
pub fn differential(record: &MatchRecord, stats: &StatsIndex, options: FeatureOptions) -> UnitResult<DifferentialRow> {
    let a = side_summary(record, Side::One, stats, options)?;
    let b = side_summary(record, Side::Two, stats, options)?;
    Ok(DifferentialRow {
        match_id: record.match_id.clone(),
        format: record.format,
        dr: a.run_rate - b.run_rate,
        domega: a.omega - b.omega,
        dcv: a.cv - b.cv,
        dbavg: a.captain_average - b.captain_average,
        ground: record.ground.clone(),
        year: record.year,
    })
}

pub fn build_differentials(
    matches: &[&MatchRecord],
    stats: &StatsIndex,
    options: FeatureOptions,
) -> (Vec<DifferentialRow>, DropLedger) {
    collect_units(matches, |m| vec![(None, differential(m, stats, options))])
}

/// CSV with the struct's field order as header.
pub fn write_rows_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
