//! End-to-end bookkeeping and null/planted behaviour on simulated corpora.

use leadnet::ingest::{load_player_stats, parse_corpus, Corpus, MatchFormat, MatchRecord, Outcome, StatsIndex};
use leadnet::leadership::{build_differentials, build_observations, build_team_features, DropReason, FeatureOptions};
use leadnet::study::simulate::{simulate_corpus, SimConfig};
use leadnet::study::{analyze_match, run_centralized_study, run_distributed_study, run_score_averages};
use leadnet::stats::MIN_REPLICATES;
use rayon::prelude::*;

fn sim(cfg: SimConfig) -> (Corpus, StatsIndex) {
    simulate_corpus(&cfg).unwrap()
}

fn odi(n: usize, beta_c: f64, seed: u64) -> SimConfig {
    SimConfig {
        n_matches: n,
        odi_fraction: 1.0,
        beta_c,
        seed,
        ..SimConfig::default()
    }
}

#[test]
fn observation_rows_reconcile_with_outcomes() {
    let (corpus, stats) = sim(SimConfig {
        n_matches: 100,
        odi_fraction: 0.5,
        draw_rate: 0.4,
        seed: 21,
        ..SimConfig::default()
    });
    let all: Vec<&MatchRecord> = corpus.iter().collect();
    let decisive = all.iter().filter(|m| m.outcome.is_decisive()).count();
    assert!(decisive < all.len(), "corpus should contain draws");

    let (rows, ledger) = build_observations(&all, &stats, FeatureOptions::default());
    assert!(ledger.is_complete());
    assert_eq!(ledger.units_in, 2 * all.len());
    assert_eq!(ledger.units_used, rows.len());
    assert_eq!(ledger.drops.get(&DropReason::NonDecisive).copied().unwrap_or(0), 2 * (all.len() - decisive));
    let other_drops = ledger.total_dropped() - 2 * (all.len() - decisive);
    assert_eq!(rows.len(), 2 * decisive - other_drops);
    assert_eq!(ledger.events.len(), ledger.total_dropped());

    let opts = FeatureOptions {
        include_draws_as_loss: true,
        ..FeatureOptions::default()
    };
    let (rows, ledger) = build_observations(&all, &stats, opts);
    assert!(ledger.is_complete());
    assert!(!ledger.drops.contains_key(&DropReason::NonDecisive));
    assert_eq!(rows.len(), 2 * all.len() - ledger.total_dropped());
}

#[test]
fn missing_captain_stats_are_ledgered() {
    let (corpus, stats) = sim(odi(60, 0.262, 4));
    let all: Vec<&MatchRecord> = corpus.iter().collect();
    let victim = all[0].teams[0].captain.clone();
    let year = all[0].year;
    let thinned =
        StatsIndex::from_rows(stats.iter().filter(|r| !(r.player == victim && r.year == year)).cloned()).unwrap();
    let (rows, ledger) = build_differentials(&all, &thinned, FeatureOptions::default());
    assert!(ledger.is_complete());
    assert_eq!(ledger.units_used, rows.len());
    let missing = ledger.drops.get(&DropReason::MissingCaptainStats).copied().unwrap_or(0);
    assert!(missing >= 1);
    assert!(ledger.events.iter().any(|e| e.match_id == all[0].match_id));
}

#[test]
fn per_innings_units_count_innings() {
    let (corpus, stats) = sim(SimConfig {
        n_matches: 40,
        odi_fraction: 0.0,
        seed: 9,
        ..SimConfig::default()
    });
    let all: Vec<&MatchRecord> = corpus.iter().collect();
    let innings: usize = all.iter().flat_map(|m| m.teams.iter()).map(|t| t.innings.len()).sum();
    let opts = FeatureOptions {
        per_innings_networks: true,
        ..FeatureOptions::default()
    };
    let (features, ledger) = build_team_features(&all, &stats, opts);
    assert_eq!(ledger.units_in, innings);
    assert_eq!(features.len(), ledger.units_used);
    assert!(ledger.is_complete());
    assert!(features.iter().all(|f| f.innings.is_some()));
}

#[test]
fn corpus_and_stats_round_trip() {
    let (corpus, stats) = sim(SimConfig {
        n_matches: 50,
        odi_fraction: 0.5,
        seed: 17,
        ..SimConfig::default()
    });
    let text = corpus.to_jsonl();
    let back = parse_corpus(&text).unwrap();
    assert_eq!(back, corpus);
    assert_eq!(back.to_jsonl(), text);
    let csv = stats.to_csv_string();
    let stats_back = load_player_stats(csv.as_bytes()).unwrap();
    assert_eq!(stats_back, stats);
    assert_eq!(stats_back.to_csv_string(), csv);
}

/// One-sample Kolmogorov-Smirnov statistic against U(0, 1).
fn ks_uniform(mut p: Vec<f64>) -> f64 {
    p.sort_by(f64::total_cmp);
    let n = p.len() as f64;
    p.iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).abs().max(((i + 1) as f64 / n - x).abs()))
        .fold(0.0, f64::max)
}

#[test]
fn null_effect_gives_balanced_win_rates_and_uniform_lr() {
    let runs: Vec<(f64, f64)> = (1..=100u64)
        .into_par_iter()
        .map(|seed| {
            let (corpus, stats) = sim(odi(600, 0.0, seed));
            let all: Vec<&MatchRecord> = corpus.iter().collect();
            let s = run_centralized_study(&all, &stats, MatchFormat::Odi, FeatureOptions::default()).unwrap();
            let t = s.crosstab;
            let (n1, n0) = ((t.c1_w1 + t.c1_w0) as f64, (t.c0_w1 + t.c0_w0) as f64);
            let pooled = (t.c1_w1 + t.c0_w1) as f64 / (n1 + n0);
            let se = (pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n0)).sqrt();
            let z = (t.c1_w1 as f64 / n1 - t.c0_w1 as f64 / n0) / se;
            (z, s.model1.lr_test.unwrap().p_value)
        })
        .collect();
    let balanced = runs.iter().filter(|(z, _)| z.abs() < 3.0).count();
    assert!(balanced >= 95, "{balanced} of 100 seeds balanced");
    let d = ks_uniform(runs.iter().map(|r| r.1).collect());
    assert!(d < 1.36 / 10.0, "KS statistic {d}");
}

#[test]
fn no_run_rate_effect_gives_flat_slope() {
    let (corpus, stats) = sim(SimConfig {
        a1: 0.0,
        ..odi(1000, 0.262, 31)
    });
    let all: Vec<&MatchRecord> = corpus.iter().collect();
    let s = run_distributed_study(&all, &stats, MatchFormat::Odi, FeatureOptions::default()).unwrap();
    for m in [&s.model1, &s.model2] {
        let c = m.fit.as_ref().unwrap().coefficient("domega").unwrap();
        assert!(c.estimate.abs() < 3.0 * c.std_error, "{}: {} ± {}", m.model, c.estimate, c.std_error);
    }
}

#[test]
fn always_winning_central_captains_split_scores() {
    let (corpus, stats) = sim(odi(300, 0.262, 5));
    let rigged: Vec<MatchRecord> = corpus
        .iter()
        .filter_map(|m| {
            let a = analyze_match(m);
            let (c1, c2) = (a.teams[0].centralized?, a.teams[1].centralized?);
            if c1 == c2 {
                return None;
            }
            let mut m = m.clone();
            m.outcome = if c1 == 1 { Outcome::Team1Win } else { Outcome::Team2Win };
            Some(m)
        })
        .collect();
    let refs: Vec<&MatchRecord> = rigged.iter().collect();
    let s = run_score_averages(&refs, &stats, MatchFormat::Odi, FeatureOptions::default(), MIN_REPLICATES, 1).unwrap();
    let hi = s.strata.iter().find(|x| x.centralized == 1).unwrap();
    let lo = s.strata.iter().find(|x| x.centralized == 0).unwrap();
    assert_eq!(hi.interval.point, 2.0);
    assert_eq!(lo.interval.point, 0.0);
    assert!(hi.interval.lower > lo.interval.upper);
    let d = s.difference.unwrap();
    assert_eq!(d.difference, 2.0);
    assert!(d.p_value < 0.01);
}

#[test]
fn null_score_difference_covers_zero() {
    let (corpus, stats) = sim(odi(800, 0.0, 12));
    let all: Vec<&MatchRecord> = corpus.iter().collect();
    let s = run_score_averages(&all, &stats, MatchFormat::Odi, FeatureOptions::default(), MIN_REPLICATES, 3).unwrap();
    for st in &s.strata {
        assert!((st.interval.lower..=st.interval.upper).contains(&1.0), "{st:?}");
    }
    let d = s.difference.unwrap();
    assert!(d.lower <= 0.0 && 0.0 <= d.upper, "{d:?}");
}

#[test]
fn planted_effect_opens_a_score_gap() {
    let hits = (1..=20u64)
        .into_par_iter()
        .filter(|&seed| {
            let (corpus, stats) = sim(odi(3000, 0.262, 500 + seed));
            let all: Vec<&MatchRecord> = corpus.iter().collect();
            let s = run_score_averages(&all, &stats, MatchFormat::Odi, FeatureOptions::default(), MIN_REPLICATES, seed)
                .unwrap();
            let d = s.difference.unwrap();
            d.difference > 0.0 && d.p_value < 0.05
        })
        .count();
    assert!(hits >= 18, "{hits} of 20 seeds");
}
