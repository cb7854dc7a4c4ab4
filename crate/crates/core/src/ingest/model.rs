//! Canonical match data model.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::overs::Overs;

/// Player identifier as it appears on the scorecard.
pub type PlayerId = String;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MatchFormat {
    #[serde(rename = "TEST")]
    Test,
    #[serde(rename = "ODI")]
    Odi,
}

impl MatchFormat {
    /// Earliest year a match of this format can have been played.
    pub fn first_year(self) -> i32 {
        match self {
            MatchFormat::Test => 1877,
            MatchFormat::Odi => 1971,
        }
    }

    pub fn max_innings(self) -> usize {
        match self {
            MatchFormat::Test => 2,
            MatchFormat::Odi => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MatchFormat::Test => "TEST",
            MatchFormat::Odi => "ODI",
        }
    }
}

impl fmt::Display for MatchFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    Team1Win,
    Team2Win,
    Draw,
    Tie,
}

impl Outcome {
    pub fn is_decisive(self) -> bool {
        matches!(self, Outcome::Team1Win | Outcome::Team2Win)
    }

    pub fn winner(self) -> Option<Side> {
        match self {
            Outcome::Team1Win => Some(Side::One),
            Outcome::Team2Win => Some(Side::Two),
            Outcome::Draw | Outcome::Tie => None,
        }
    }
}

/// Which entry of [`MatchRecord::teams`] a value refers to. Side one is the
/// team that batted first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::One, Side::Two];

    pub fn index(self) -> usize {
        match self {
            Side::One => 0,
            Side::Two => 1,
        }
    }

    pub fn opponent(self) -> Side {
        match self {
            Side::One => Side::Two,
            Side::Two => Side::One,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Partnership {
    pub batsman_a: PlayerId,
    pub batsman_b: PlayerId,
    pub runs: u32,
}

impl Partnership {
    pub fn new(a: impl Into<PlayerId>, b: impl Into<PlayerId>, runs: u32) -> Self {
        Self {
            batsman_a: a.into(),
            batsman_b: b.into(),
            runs,
        }
    }

    pub fn involves(&self, player: &str) -> bool {
        self.batsman_a == player || self.batsman_b == player
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Innings {
    pub partnerships: Vec<Partnership>,
}

impl Innings {
    pub fn new(partnerships: Vec<Partnership>) -> Self {
        Self { partnerships }
    }

    pub fn players(&self) -> BTreeSet<&str> {
        self.partnerships
            .iter()
            .flat_map(|p| [p.batsman_a.as_str(), p.batsman_b.as_str()])
            .collect()
    }

    /// Batting positions in order of first appearance: the opening pair is
    /// `batsman_a` = 1 and `batsman_b` = 2, each new batsman takes the next slot.
    pub fn batting_order(&self) -> Vec<&str> {
        let mut order: Vec<&str> = Vec::new();
        for p in &self.partnerships {
            for name in [p.batsman_a.as_str(), p.batsman_b.as_str()] {
                if !order.contains(&name) {
                    order.push(name);
                }
            }
        }
        order
    }

    pub fn runs(&self) -> u64 {
        self.partnerships.iter().map(|p| u64::from(p.runs)).sum()
    }

    /// Checks that each partnership after the first keeps exactly one batsman
    /// from the previous one and brings in a batsman not seen before.
    pub fn check_chain(&self) -> Result<(), String> {
        const MAX_PARTNERSHIPS: usize = 10;
        if self.partnerships.len() > MAX_PARTNERSHIPS {
            return Err(format!(
                "{} partnerships imply more than 10 dismissals",
                self.partnerships.len()
            ));
        }
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut prev: Option<&Partnership> = None;
        for (k, p) in self.partnerships.iter().enumerate() {
            if p.batsman_a.is_empty() || p.batsman_b.is_empty() {
                return Err(format!("partnership {k} has an empty player id"));
            }
            if p.batsman_a == p.batsman_b {
                return Err(format!("partnership {k} pairs {} with themself", p.batsman_a));
            }
            if let Some(prev) = prev {
                let a_kept = prev.involves(&p.batsman_a);
                let b_kept = prev.involves(&p.batsman_b);
                let newcomer = match (a_kept, b_kept) {
                    (true, false) => &p.batsman_b,
                    (false, true) => &p.batsman_a,
                    _ => {
                        return Err(format!(
                            "partnership {k} must share exactly one batsman with partnership {}",
                            k - 1
                        ))
                    }
                };
                if seen.contains(newcomer.as_str()) {
                    return Err(format!("partnership {k} brings back {newcomer}, who was already dismissed"));
                }
            }
            seen.insert(&p.batsman_a);
            seen.insert(&p.batsman_b);
            prev = Some(p);
        }
        Ok(())
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TeamInningsSet {
    pub team: String,
    pub captain: PlayerId,
    /// Set when the captain took no part in any partnership.
    #[serde(default, skip_serializing_if = "is_false")]
    pub did_not_bat: bool,
    pub innings: Vec<Innings>,
    pub runs_total: u32,
    #[serde(rename = "overs")]
    pub overs_faced: Overs,
}

impl TeamInningsSet {
    pub fn captain_batted(&self) -> bool {
        self.innings
            .iter()
            .flat_map(|i| &i.partnerships)
            .any(|p| p.involves(&self.captain))
    }

    /// Runs per (true) over; `None` when no balls were faced.
    pub fn run_rate(&self) -> Option<f64> {
        if self.overs_faced.is_zero() {
            None
        } else {
            Some(f64::from(self.runs_total) / self.overs_faced.as_decimal())
        }
    }

    /// The captain's batting position at first appearance across the innings,
    /// in innings order.
    pub fn captain_batting_position(&self) -> Option<u8> {
        self.innings.iter().find_map(|inn| {
            inn.batting_order()
                .iter()
                .position(|p| *p == self.captain)
                .map(|i| (i + 1) as u8)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub match_id: String,
    pub format: MatchFormat,
    pub year: i32,
    pub ground: String,
    pub outcome: Outcome,
    pub teams: [TeamInningsSet; 2],
}

impl MatchRecord {
    pub fn team(&self, side: Side) -> &TeamInningsSet {
        &self.teams[side.index()]
    }

    /// Checks every type invariant of the record, returning the first violation.
    pub fn validate(&self, latest_year: i32) -> Result<(), String> {
        if self.match_id.trim().is_empty() {
            return Err("match_id is empty".into());
        }
        if self.ground.trim().is_empty() {
            return Err("ground is empty".into());
        }
        let [t1, t2] = &self.teams;
        if t1.team.trim().is_empty() || t2.team.trim().is_empty() {
            return Err("team names must be non-empty".into());
        }
        if t1.team == t2.team {
            return Err(format!("both sides are {}", t1.team));
        }
        if self.format == MatchFormat::Odi && self.outcome == Outcome::Draw {
            return Err("an ODI cannot be drawn".into());
        }
        let first = self.format.first_year();
        if self.year < first || self.year > latest_year {
            return Err(format!(
                "year {} outside [{first}, {latest_year}] for {}",
                self.year, self.format
            ));
        }
        for t in &self.teams {
            self.validate_team(t)?;
        }
        Ok(())
    }

    fn validate_team(&self, t: &TeamInningsSet) -> Result<(), String> {
        let max = self.format.max_innings();
        let n = t.innings.len();
        let ok = match self.format {
            MatchFormat::Odi => n == 1,
            MatchFormat::Test => (1..=max).contains(&n),
        };
        if !ok {
            return Err(format!("{}: {n} innings not allowed in a {} match", t.team, self.format));
        }
        if t.captain.is_empty() {
            return Err(format!("{}: captain id is empty", t.team));
        }
        for (k, inn) in t.innings.iter().enumerate() {
            inn.check_chain()
                .map_err(|e| format!("{} innings {}: {e}", t.team, k + 1))?;
        }
        match (t.captain_batted(), t.did_not_bat) {
            (false, false) => {
                return Err(format!(
                    "{}: captain {} is in no partnership and is not flagged did_not_bat",
                    t.team, t.captain
                ))
            }
            (true, true) => {
                return Err(format!(
                    "{}: captain {} is flagged did_not_bat but appears in a partnership",
                    t.team, t.captain
                ))
            }
            _ => {}
        }
        if t.runs_total > 0 && t.overs_faced.is_zero() {
            return Err(format!("{}: {} runs scored in zero overs", t.team, t.runs_total));
        }
        Ok(())
    }
}
