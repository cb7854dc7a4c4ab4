//! Synthetic corpora with planted effects.
//!
//! Each team's captain-centrality indicator is fixed up front (Bernoulli with
//! `central_captain_rate`) and its innings are redrawn until the realized
//! network agrees. A decisive result then goes to side one with probability
//! `sigmoid(g (C1 - C2))`, where `g` is chosen so that the population log odds
//! ratio of winning for C = 1 against C = 0 team observations equals `beta_c`.
//! Run rates are `base + a1 * omega + noise`, so the run-rate differential has
//! slope `a1` on the centralization differential.
//!
//! Every draw comes from one `SplitMix64` stream seeded with `seed`: first the
//! stats table (team, player, year order), then the matches in id order.

use serde::{Deserialize, Serialize};

use super::StudyError;
use crate::centrality::CentralityReport;
use crate::graph::build_network;
use crate::ingest::{
    current_year, Corpus, Innings, MatchFormat, MatchRecord, Outcome, Overs, Partnership, PlayerSeasonStats,
    StatsIndex, TeamInningsSet,
};
use crate::leadership::centralized_indicator;
use crate::rng::SplitMix64;

const ROSTER: usize = 11;
const MAX_ATTEMPTS: usize = 100_000;
const ODI_BASE_RATE: f64 = 5.0;
const TEST_BASE_RATE: f64 = 3.0;
const TEST_SECOND_INNINGS_RATE: f64 = 0.85;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_matches: usize,
    /// Share of ODIs; the rest are Tests.
    pub odi_fraction: f64,
    /// Planted log odds ratio of winning for a central captain.
    pub beta_c: f64,
    /// Planted run-rate slope on the centralization index.
    pub a1: f64,
    pub teams: Vec<String>,
    pub grounds: Vec<String>,
    pub first_year: i32,
    pub last_year: i32,
    /// Standard deviation of each team's run-rate noise.
    pub rr_noise_sd: f64,
    pub central_captain_rate: f64,
    /// Share of Tests drawn.
    pub draw_rate: f64,
    /// Share of ODIs tied.
    pub tie_rate: f64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect();
        Self {
            n_matches: 200,
            odi_fraction: 0.6,
            beta_c: 0.262,
            a1: 1.0,
            teams: s(&[
                "Australia",
                "Bangladesh",
                "England",
                "India",
                "New Zealand",
                "Pakistan",
                "South Africa",
                "Sri Lanka",
                "West Indies",
                "Zimbabwe",
            ]),
            grounds: s(&[
                "Adelaide",
                "Auckland",
                "Cape Town",
                "Chittagong",
                "Colombo",
                "Harare",
                "Karachi",
                "Kingston",
                "Lord's",
                "Melbourne",
                "Mumbai",
                "The Oval",
            ]),
            first_year: 2000,
            last_year: 2013,
            rr_noise_sd: 0.25,
            central_captain_rate: 0.5,
            draw_rate: 0.3,
            tie_rate: 0.0,
            seed: 0,
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Log odds ratio of winning, C = 1 against C = 0, when captains are central
/// independently with probability `q` and a C = 1 side beats a C = 0 side
/// with probability `a`.
fn marginal_log_odds_ratio(a: f64, q: f64) -> f64 {
    let p1 = q * 0.5 + (1.0 - q) * a;
    let p0 = q * (1.0 - a) + (1.0 - q) * 0.5;
    logit(p1) - logit(p0)
}

/// Slope `g` on `C1 - C2` that yields the target marginal log odds ratio.
pub fn outcome_slope(beta_c: f64, q: f64) -> Result<f64, StudyError> {
    if beta_c == 0.0 {
        return Ok(0.0);
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(StudyError::Config("a non-zero beta_c needs 0 < central_captain_rate < 1".into()));
    }
    let (lo_lim, hi_lim) = (marginal_log_odds_ratio(1e-12, q), marginal_log_odds_ratio(1.0 - 1e-12, q));
    if beta_c <= lo_lim || beta_c >= hi_lim {
        return Err(StudyError::Config(format!(
            "beta_c {beta_c} is unreachable; must lie in ({lo_lim:.3}, {hi_lim:.3})"
        )));
    }
    let (mut lo, mut hi) = (1e-12, 1.0 - 1e-12);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if marginal_log_odds_ratio(mid, q) < beta_c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(logit(0.5 * (lo + hi)))
}

fn check_rate(name: &str, v: f64) -> Result<(), StudyError> {
    if !(0.0..=1.0).contains(&v) {
        return Err(StudyError::Config(format!("{name} must lie in [0, 1], got {v}")));
    }
    Ok(())
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), StudyError> {
        let err = |m: String| Err(StudyError::Config(m));
        if self.n_matches == 0 {
            return err("n_matches must be at least 1".into());
        }
        check_rate("odi_fraction", self.odi_fraction)?;
        check_rate("central_captain_rate", self.central_captain_rate)?;
        check_rate("draw_rate", self.draw_rate)?;
        check_rate("tie_rate", self.tie_rate)?;
        if !(self.rr_noise_sd >= 0.0 && self.rr_noise_sd.is_finite()) {
            return err(format!("rr_noise_sd must be finite and >= 0, got {}", self.rr_noise_sd));
        }
        if !self.a1.is_finite() || !self.beta_c.is_finite() {
            return err("planted effects must be finite".into());
        }
        let mut teams = self.teams.clone();
        teams.sort();
        teams.dedup();
        if teams.len() < 2 || teams.len() != self.teams.len() || teams.iter().any(|t| t.trim().is_empty()) {
            return err("need at least two distinct, non-empty team names".into());
        }
        if self.grounds.is_empty() || self.grounds.iter().any(|g| g.trim().is_empty()) {
            return err("need at least one non-empty ground".into());
        }
        let earliest = if self.odi_fraction > 0.0 {
            MatchFormat::Odi.first_year()
        } else {
            MatchFormat::Test.first_year()
        };
        if self.first_year > self.last_year || self.first_year < earliest || self.last_year > current_year() {
            return err(format!(
                "year range {}..={} must lie within {earliest}..={}",
                self.first_year,
                self.last_year,
                current_year()
            ));
        }
        outcome_slope(self.beta_c, self.central_captain_rate)?;
        Ok(())
    }
}

pub fn player_id(team: &str, slot: usize) -> String {
    format!("{}_{:02}", team.replace(' ', "_"), slot + 1)
}

fn uniform_int(rng: &mut SplitMix64, lo: u32, hi: u32) -> u32 {
    lo + rng.below((hi - lo + 1) as usize) as u32
}

/// Partnerships of one innings for the given batting order, with runs split
/// later. Returns the pairs in batting sequence.
fn innings_pairs(rng: &mut SplitMix64, order: &[String]) -> Vec<(String, String)> {
    let wickets = uniform_int(rng, 2, 10) as usize;
    let count = (wickets + 1).min(ROSTER - 1);
    let mut pair = (order[0].clone(), order[1].clone());
    let mut next = 2;
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        out.push(pair.clone());
        if j + 1 < count {
            let newcomer = order[next].clone();
            next += 1;
            if rng.bernoulli(0.5) {
                pair.0 = newcomer;
            } else {
                pair.1 = newcomer;
            }
        }
    }
    out
}

/// Splits `total` over `n` parts with exponential weights; parts sum to `total`.
fn split_runs(rng: &mut SplitMix64, total: u32, n: usize) -> Vec<u32> {
    let w: Vec<f64> = (0..n).map(|_| rng.exponential()).collect();
    let sum: f64 = w.iter().sum();
    let mut parts: Vec<u32> = w.iter().map(|x| (f64::from(total) * x / sum).floor() as u32).collect();
    let mut rest = total - parts.iter().sum::<u32>();
    let mut k = 0;
    while rest > 0 {
        parts[k % n] += 1;
        rest -= 1;
        k += 1;
    }
    parts
}

struct TeamDraw<'a> {
    team: &'a str,
    format: MatchFormat,
    target_central: bool,
    noise: f64,
}

fn draw_team(rng: &mut SplitMix64, cfg: &SimConfig, match_id: &str, d: TeamDraw) -> Result<TeamInningsSet, StudyError> {
    let roster: Vec<String> = (0..ROSTER).map(|k| player_id(d.team, k)).collect();
    let base = match d.format {
        MatchFormat::Odi => ODI_BASE_RATE,
        MatchFormat::Test => TEST_BASE_RATE,
    };
    for _ in 0..MAX_ATTEMPTS {
        let mut order = roster.clone();
        rng.shuffle(&mut order);
        let n_innings = match d.format {
            MatchFormat::Odi => 1,
            MatchFormat::Test if rng.bernoulli(TEST_SECOND_INNINGS_RATE) => 2,
            MatchFormat::Test => 1,
        };
        let innings_pairs: Vec<Vec<(String, String)>> = (0..n_innings).map(|_| innings_pairs(rng, &order)).collect();
        let first_batters = innings_pairs[0].len() + 1;
        let captain = order[rng.below(first_batters.min(7))].clone();
        let balls: u32 = (0..n_innings)
            .map(|_| match d.format {
                MatchFormat::Odi => uniform_int(rng, 240, 300),
                MatchFormat::Test => uniform_int(rng, 300, 800),
            })
            .sum();
        // Centralization depends on the pairing structure only.
        let structure = TeamInningsSet {
            team: d.team.to_string(),
            captain: captain.clone(),
            did_not_bat: false,
            innings: innings_pairs
                .iter()
                .map(|ps| Innings::new(ps.iter().map(|(a, b)| Partnership::new(a.clone(), b.clone(), 1)).collect()))
                .collect(),
            runs_total: 0,
            overs_faced: Overs::from_balls(balls),
        };
        let net = build_network(match_id, &structure).expect("innings are non-empty");
        let omega = crate::centrality::degree_centralization(&net).expect("at least four batters");
        let rate = (base + cfg.a1 * omega + d.noise).max(0.1);
        let runs_total = (rate * f64::from(balls) / 6.0).round() as u32;
        let n_parts: usize = innings_pairs.iter().map(Vec::len).sum();
        let mut runs = split_runs(rng, runs_total, n_parts).into_iter();
        let set = TeamInningsSet {
            runs_total,
            innings: innings_pairs
                .iter()
                .map(|ps| {
                    Innings::new(
                        ps.iter()
                            .map(|(a, b)| Partnership::new(a.clone(), b.clone(), runs.next().expect("one share per pair")))
                            .collect(),
                    )
                })
                .collect(),
            ..structure
        };
        let net = build_network(match_id, &set).expect("innings are non-empty");
        let central = centralized_indicator(&CentralityReport::compute(&net), &captain).expect("captain batted") == 1;
        if central == d.target_central {
            return Ok(set);
        }
    }
    Err(StudyError::Config(format!(
        "could not realize the requested captain centrality for {} in {match_id}",
        d.team
    )))
}

fn draw_stats(rng: &mut SplitMix64, cfg: &SimConfig) -> StatsIndex {
    let mut rows = Vec::new();
    for team in &cfg.teams {
        for k in 0..ROSTER {
            for year in cfg.first_year..=cfg.last_year {
                rows.push(PlayerSeasonStats {
                    player: player_id(team, k),
                    year,
                    icc_points: uniform_int(rng, 100, 900) as u16,
                    batting_average: (1000.0 + rng.uniform() * 4000.0).round() / 100.0,
                });
            }
        }
    }
    StatsIndex::from_rows(rows).expect("generated ids are unique")
}

/// A schema-valid corpus and the matching stats table. A pure function of
/// the configuration.
pub fn simulate_corpus(cfg: &SimConfig) -> Result<(Corpus, StatsIndex), StudyError> {
    cfg.validate()?;
    let slope = outcome_slope(cfg.beta_c, cfg.central_captain_rate)?;
    let mut rng = SplitMix64::new(cfg.seed);
    let stats = draw_stats(&mut rng, cfg);
    let width = cfg.n_matches.to_string().len().max(5);
    let latest = current_year();
    let mut corpus = Corpus::new();
    for i in 0..cfg.n_matches {
        let match_id = format!("sim-{:0width$}", i + 1);
        let format = if rng.bernoulli(cfg.odi_fraction) {
            MatchFormat::Odi
        } else {
            MatchFormat::Test
        };
        let n_teams = cfg.teams.len();
        let a = rng.below(n_teams);
        let mut b = rng.below(n_teams - 1);
        if b >= a {
            b += 1;
        }
        let year = cfg.first_year + rng.below((cfg.last_year - cfg.first_year + 1) as usize) as i32;
        let ground = cfg.grounds[rng.below(cfg.grounds.len())].clone();
        let targets = [
            rng.bernoulli(cfg.central_captain_rate),
            rng.bernoulli(cfg.central_captain_rate),
        ];
        let noises = [rng.normal() * cfg.rr_noise_sd, rng.normal() * cfg.rr_noise_sd];
        let t1 = draw_team(
            &mut rng,
            cfg,
            &match_id,
            TeamDraw {
                team: &cfg.teams[a],
                format,
                target_central: targets[0],
                noise: noises[0],
            },
        )?;
        let t2 = draw_team(
            &mut rng,
            cfg,
            &match_id,
            TeamDraw {
                team: &cfg.teams[b],
                format,
                target_central: targets[1],
                noise: noises[1],
            },
        )?;
        let non_decisive = match format {
            MatchFormat::Odi => rng.bernoulli(cfg.tie_rate).then_some(Outcome::Tie),
            MatchFormat::Test => rng.bernoulli(cfg.draw_rate).then_some(Outcome::Draw),
        };
        let outcome = non_decisive.unwrap_or_else(|| {
            let dc = f64::from(u8::from(targets[0])) - f64::from(u8::from(targets[1]));
            if rng.bernoulli(sigmoid(slope * dc)) {
                Outcome::Team1Win
            } else {
                Outcome::Team2Win
            }
        });
        let record = MatchRecord {
            match_id,
            format,
            year,
            ground,
            outcome,
            teams: [t1, t2],
        };
        record
            .validate(latest)
            .map_err(|e| StudyError::Config(format!("generated an invalid match: {e}")))?;
        corpus.insert(record).expect("ids are unique");
    }
    Ok((corpus, stats))
}
