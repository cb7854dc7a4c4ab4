//! Scorecard ingestion: the line-delimited JSON match corpus and the
//! per-season player statistics table.
//!
//! A corpus file holds one match per line:
//!
//! ```text
//! {"v":1,"match_id":"odi-0001","format":"ODI","year":2005,"ground":"Lord's",
//!  "outcome":"TEAM1_WIN","teams":[{"team":"England","captain":"e01",
//!  "innings":[{"partnerships":[{"batsman_a":"e01","batsman_b":"e02","runs":30}]}],
//!  "runs_total":30,"overs":"5.2"}, ...]}
//! ```
//!
//! `teams[0]` is the side that batted first. Parsing rejects unknown keys and
//! any record that breaks a model invariant.

mod model;
mod overs;
mod stats_table;

pub use model::{
    Innings, MatchFormat, MatchRecord, Outcome, Partnership, PlayerId, Side, TeamInningsSet,
};
pub use overs::{parse_overs, Overs, BALLS_PER_OVER};
pub use stats_table::{load_player_stats, MissingStats, PlayerSeasonStats, StatsIndex};

use std::collections::BTreeMap;
use std::io::Write;

use chrono::Datelike;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: schema error: {message}")]
    Schema { line: usize, message: String },
    #[error("match {match_id}: {message}")]
    Invariant { match_id: String, message: String },
    #[error("duplicate match_id {0:?}")]
    DuplicateId(String),
    #[error("invalid overs notation {text:?}: {reason}")]
    Format { text: String, reason: String },
    #[error("duplicate stats row for player {player:?} in {year}")]
    DuplicateKey { player: String, year: i32 },
    #[error("stats row for player {player:?} in {year}: {message}")]
    Range {
        player: String,
        year: i32,
        message: String,
    },
    #[error("stats table: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// On-disk shape of one corpus line.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatchDoc {
    v: u32,
    match_id: String,
    format: MatchFormat,
    year: i32,
    ground: String,
    outcome: Outcome,
    teams: [TeamInningsSet; 2],
}

#[derive(Serialize)]
struct MatchDocRef<'a> {
    v: u32,
    match_id: &'a str,
    format: MatchFormat,
    year: i32,
    ground: &'a str,
    outcome: Outcome,
    teams: &'a [TeamInningsSet; 2],
}

/// Latest year a match may carry.
pub fn current_year() -> i32 {
    chrono::Utc::now().year()
}

fn parse_line(text: &str, line: usize, latest_year: i32) -> Result<MatchRecord, IngestError> {
    let doc: MatchDoc = serde_json::from_str(text).map_err(|e| IngestError::Schema {
        line,
        message: e.to_string(),
    })?;
    if doc.v != SCHEMA_VERSION {
        return Err(IngestError::Schema {
            line,
            message: format!("unsupported schema version {} (expected {SCHEMA_VERSION})", doc.v),
        });
    }
    let record = MatchRecord {
        match_id: doc.match_id,
        format: doc.format,
        year: doc.year,
        ground: doc.ground,
        outcome: doc.outcome,
        teams: doc.teams,
    };
    record
        .validate(latest_year)
        .map_err(|message| IngestError::Invariant {
            match_id: record.match_id.clone(),
            message,
        })?;
    Ok(record)
}

/// Parses and validates a single scorecard document.
pub fn parse_match_record(text: &str) -> Result<MatchRecord, IngestError> {
    parse_line(text, 1, current_year())
}

/// Canonical single-line JSON for a record (fixed key order, canonical overs,
/// `did_not_bat` only when set).
pub fn serialize_match_record(record: &MatchRecord) -> String {
    let doc = MatchDocRef {
        v: SCHEMA_VERSION,
        match_id: &record.match_id,
        format: record.format,
        year: record.year,
        ground: &record.ground,
        outcome: record.outcome,
        teams: &record.teams,
    };
    serde_json::to_string(&doc).expect("match records always serialize")
}

/// A validated set of matches with unique ids, iterated in `match_id` order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    matches: BTreeMap<String, MatchRecord>,
}

impl Corpus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_records(records: impl IntoIterator<Item = MatchRecord>) -> Result<Self, IngestError> {
        let mut corpus = Self::new();
        for r in records {
            corpus.insert(r)?;
        }
        Ok(corpus)
    }

    pub fn insert(&mut self, record: MatchRecord) -> Result<(), IngestError> {
        if self.matches.contains_key(&record.match_id) {
            return Err(IngestError::DuplicateId(record.match_id));
        }
        self.matches.insert(record.match_id.clone(), record);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.matches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matches.is_empty()
    }

    pub fn get(&self, match_id: &str) -> Option<&MatchRecord> {
        self.matches.get(match_id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &MatchRecord> {
        self.matches.values()
    }

    pub fn count_format(&self, format: MatchFormat) -> usize {
        self.iter().filter(|m| m.format == format).count()
    }

    /// One canonical line per match, newline-terminated.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for m in self.iter() {
            out.push_str(&serialize_match_record(m));
            out.push('\n');
        }
        out
    }

    pub fn write_jsonl<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        writer.write_all(self.to_jsonl().as_bytes())
    }
}

/// Parses a whole corpus file. Blank lines are ignored; documents are parsed
/// in parallel and the index is assembled in line order.
pub fn parse_corpus(text: &str) -> Result<Corpus, IngestError> {
    let latest = current_year();
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l))
        .collect();
    let parsed: Vec<Result<MatchRecord, IngestError>> = lines
        .par_iter()
        .map(|(line, l)| parse_line(l, *line, latest))
        .collect();
    let mut corpus = Corpus::new();
    for r in parsed {
        corpus.insert(r?)?;
    }
    Ok(corpus)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL_ODI: &str = r#"{"v":1,"match_id":"m1","format":"ODI","year":2005,"ground":"Eden Gardens","outcome":"TEAM1_WIN","teams":[{"team":"India","captain":"i1","innings":[{"partnerships":[{"batsman_a":"i1","batsman_b":"i2","runs":40}]}],"runs_total":40,"overs":"6.3"},{"team":"Pakistan","captain":"p1","innings":[{"partnerships":[{"batsman_a":"p1","batsman_b":"p2","runs":12}]}],"runs_total":12,"overs":"4.0"}]}"#;

    fn doc_with(f: impl FnOnce(&mut serde_json::Value)) -> String {
        let mut v: serde_json::Value = serde_json::from_str(MINIMAL_ODI).unwrap();
        f(&mut v);
        v.to_string()
    }

    #[test]
    fn minimal_odi_parses() {
        let m = parse_match_record(MINIMAL_ODI).unwrap();
        assert_eq!(m.format, MatchFormat::Odi);
        assert_eq!(m.teams[0].innings[0].partnerships.len(), 1);
        assert_eq!(m.teams[1].overs_faced.as_decimal(), 4.0);
        assert_eq!(m.teams[0].run_rate().unwrap(), 40.0 / 6.5);
    }

    #[test]
    fn canonical_serialization_round_trips() {
        let m = parse_match_record(MINIMAL_ODI).unwrap();
        let s = serialize_match_record(&m);
        assert_eq!(s, MINIMAL_ODI);
        assert_eq!(parse_match_record(&s).unwrap(), m);
    }

    #[test]
    fn odi_draw_is_rejected() {
        let doc = doc_with(|v| v["outcome"] = "DRAW".into());
        assert!(matches!(parse_match_record(&doc), Err(IngestError::Invariant { .. })));
    }

    #[test]
    fn test_draw_is_accepted() {
        let doc = doc_with(|v| {
            v["outcome"] = "DRAW".into();
            v["format"] = "TEST".into();
        });
        assert_eq!(parse_match_record(&doc).unwrap().outcome, Outcome::Draw);
    }

    #[test]
    fn odi_with_two_innings_is_rejected() {
        let doc = doc_with(|v| {
            let inn = v["teams"][0]["innings"][0].clone();
            v["teams"][0]["innings"].as_array_mut().unwrap().push(inn);
        });
        assert!(matches!(parse_match_record(&doc), Err(IngestError::Invariant { .. })));
    }

    #[test]
    fn test_with_three_innings_is_rejected() {
        let doc = doc_with(|v| {
            v["format"] = "TEST".into();
            let inn = v["teams"][0]["innings"][0].clone();
            let arr = v["teams"][0]["innings"].as_array_mut().unwrap();
            arr.push(inn.clone());
            arr.push(inn);
        });
        assert!(matches!(parse_match_record(&doc), Err(IngestError::Invariant { .. })));
    }

    #[test]
    fn unknown_and_missing_keys_are_schema_errors() {
        let extra = doc_with(|v| v["umpire"] = "x".into());
        assert!(matches!(parse_match_record(&extra), Err(IngestError::Schema { .. })));
        let missing = doc_with(|v| {
            v.as_object_mut().unwrap().remove("ground");
        });
        assert!(matches!(parse_match_record(&missing), Err(IngestError::Schema { .. })));
        let nested = doc_with(|v| v["teams"][1]["innings"][0]["partnerships"][0]["balls"] = 3.into());
        assert!(matches!(parse_match_record(&nested), Err(IngestError::Schema { .. })));
        let version = doc_with(|v| v["v"] = 2.into());
        assert!(matches!(parse_match_record(&version), Err(IngestError::Schema { .. })));
    }

    #[test]
    fn three_teams_is_a_schema_error() {
        let doc = doc_with(|v| {
            let t = v["teams"][1].clone();
            v["teams"].as_array_mut().unwrap().push(t);
        });
        assert!(parse_match_record(&doc).is_err());
    }

    #[test]
    fn bad_overs_is_rejected() {
        let doc = doc_with(|v| v["teams"][0]["overs"] = "6.7".into());
        assert!(parse_match_record(&doc).is_err());
    }

    #[test]
    fn team_invariants() {
        let same = doc_with(|v| v["teams"][1]["team"] = "India".into());
        assert!(matches!(parse_match_record(&same), Err(IngestError::Invariant { .. })));
        let early = doc_with(|v| v["year"] = 1970.into());
        assert!(matches!(parse_match_record(&early), Err(IngestError::Invariant { .. })));
        let zero_overs = doc_with(|v| v["teams"][0]["overs"] = "0.0".into());
        assert!(matches!(parse_match_record(&zero_overs), Err(IngestError::Invariant { .. })));
        let self_pair = doc_with(|v| v["teams"][0]["innings"][0]["partnerships"][0]["batsman_b"] = "i1".into());
        assert!(matches!(parse_match_record(&self_pair), Err(IngestError::Invariant { .. })));
    }

    #[test]
    fn captain_must_bat_or_be_flagged() {
        let absent = doc_with(|v| v["teams"][0]["captain"] = "i9".into());
        assert!(matches!(parse_match_record(&absent), Err(IngestError::Invariant { .. })));
        let flagged = doc_with(|v| {
            v["teams"][0]["captain"] = "i9".into();
            v["teams"][0]["did_not_bat"] = true.into();
        });
        let m = parse_match_record(&flagged).unwrap();
        assert!(m.teams[0].did_not_bat);
        assert!(serialize_match_record(&m).contains("\"did_not_bat\":true"));
        let contradictory = doc_with(|v| v["teams"][0]["did_not_bat"] = true.into());
        assert!(matches!(parse_match_record(&contradictory), Err(IngestError::Invariant { .. })));
    }

    #[test]
    fn chain_property_is_enforced() {
        let chain = |pairs: &[(&str, &str)]| {
            Innings::new(pairs.iter().map(|(a, b)| Partnership::new(*a, *b, 1)).collect()).check_chain()
        };
        assert!(chain(&[("a", "b"), ("b", "c"), ("b", "d"), ("d", "e")]).is_ok());
        // no shared batsman
        assert!(chain(&[("a", "b"), ("c", "d")]).is_err());
        // same pair again
        assert!(chain(&[("a", "b"), ("b", "a")]).is_err());
        // dismissed batsman returns
        assert!(chain(&[("a", "b"), ("b", "c"), ("c", "a")]).is_err());
        let eleven: Vec<String> = (0..12).map(|i| format!("p{i}")).collect();
        let pairs: Vec<(&str, &str)> = (1..12).map(|i| ("p0", eleven[i].as_str())).collect();
        assert!(chain(&pairs).is_err(), "11 partnerships imply 11 dismissals");
        assert!(chain(&pairs[..10]).is_ok());
    }

    #[test]
    fn duplicate_match_id_in_corpus() {
        let text = format!("{MINIMAL_ODI}\n\n{MINIMAL_ODI}\n");
        assert!(matches!(parse_corpus(&text), Err(IngestError::DuplicateId(id)) if id == "m1"));
    }

    #[test]
    fn corpus_reports_line_numbers() {
        let text = format!("{MINIMAL_ODI}\n{{\"v\":1}}\n");
        match parse_corpus(&text) {
            Err(IngestError::Schema { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn captain_batting_position_uses_first_appearance() {
        let team = TeamInningsSet {
            team: "T".into(),
            captain: "c".into(),
            did_not_bat: false,
            innings: vec![
                Innings::new(vec![Partnership::new("a", "b", 1), Partnership::new("b", "x", 1)]),
                Innings::new(vec![Partnership::new("b", "c", 1)]),
            ],
            runs_total: 3,
            overs_faced: Overs::from_balls(12),
        };
        assert_eq!(team.captain_batting_position(), Some(2));
        let opener = TeamInningsSet { captain: "b".into(), ..team.clone() };
        assert_eq!(opener.captain_batting_position(), Some(2));
        let first = TeamInningsSet { captain: "a".into(), ..team };
        assert_eq!(first.captain_batting_position(), Some(1));
    }
}
