use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use leadnet::graph::{build_innings_networks, build_network, export_graph, ExportFormat};
use leadnet::ingest::{load_player_stats, parse_corpus, Corpus, MatchFormat, MatchRecord, Outcome, StatsIndex};
use leadnet::leadership::FeatureOptions;
use leadnet::stats::MIN_REPLICATES;
use leadnet::study::{analyze_match, replicate, simulate::simulate_corpus, simulate::SimConfig, write_report_dir};
use leadnet::study::{FormatFilter, StudyConfig, StudyError};
use leadnet::{centrality::componentwise_betweenness, Error};

#[derive(Parser)]
#[command(name = "leadnet", version, about = "Partnership networks and captaincy studies for cricket scorecards")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Test,
    Odi,
    Both,
}

impl From<FormatArg> for FormatFilter {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Test => FormatFilter::Test,
            FormatArg::Odi => FormatFilter::Odi,
            FormatArg::Both => FormatFilter::Both,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportArg {
    Dot,
    Graphml,
    Json,
}

impl From<ExportArg> for ExportFormat {
    fn from(f: ExportArg) -> Self {
        match f {
            ExportArg::Dot => ExportFormat::Dot,
            ExportArg::Graphml => ExportFormat::GraphMl,
            ExportArg::Json => ExportFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate a corpus (and optionally a stats table) and print a summary.
    Ingest {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        stats: Option<PathBuf>,
        /// Write the corpus back out in canonical form.
        #[arg(long)]
        canonical: Option<PathBuf>,
    },
    /// Export the partnership network of one match.
    Network {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long = "match")]
        match_id: String,
        /// Only this team; both teams otherwise.
        #[arg(long)]
        team: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        export: ExportArg,
        #[arg(long)]
        per_innings_networks: bool,
        /// Output file; standard output otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Centrality and leadership summary of one match.
    Analyze {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long = "match")]
        match_id: String,
    },
    /// Run the full study and write the report directory.
    Replicate {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        stats: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        format: FormatArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = MIN_REPLICATES)]
        bootstrap: usize,
        #[arg(long)]
        include_draws_as_loss: bool,
        #[arg(long)]
        per_innings_networks: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a synthetic corpus and stats table with planted effects.
    Simulate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 200)]
        matches: usize,
        #[arg(long, default_value_t = 0.6)]
        odi_fraction: f64,
        #[arg(long, default_value_t = 0.262, allow_negative_numbers = true)]
        beta_c: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        a1: f64,
        #[arg(long, default_value_t = 0.25)]
        noise_sd: f64,
        #[arg(long, default_value_t = 0.5)]
        central_rate: f64,
        #[arg(long, default_value_t = 0.3)]
        draw_rate: f64,
        #[arg(long, default_value_t = 0.0)]
        tie_rate: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn read_corpus(path: &Path) -> Result<Corpus, Error> {
    Ok(parse_corpus(&fs::read_to_string(path)?)?)
}

fn read_stats(path: &Path) -> Result<StatsIndex, Error> {
    Ok(load_player_stats(fs::File::open(path)?)?)
}

fn find_match<'a>(corpus: &'a Corpus, id: &str) -> Result<&'a MatchRecord, Error> {
    corpus
        .get(id)
        .ok_or_else(|| Error::Study(StudyError::Config(format!("no match with id {id:?}"))))
}

fn print_json(value: &impl serde::Serialize) -> Result<(), Error> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn ingest(corpus: &Path, stats: Option<&Path>, canonical: Option<&Path>) -> Result<(), Error> {
    let c = read_corpus(corpus)?;
    let count = |o: Outcome| c.iter().filter(|m| m.outcome == o).count();
    let mut summary = serde_json::json!({
        "matches": c.len(),
        "odi": c.count_format(MatchFormat::Odi),
        "test": c.count_format(MatchFormat::Test),
        "outcomes": {
            "TEAM1_WIN": count(Outcome::Team1Win),
            "TEAM2_WIN": count(Outcome::Team2Win),
            "DRAW": count(Outcome::Draw),
            "TIE": count(Outcome::Tie),
        },
    });
    if let Some(p) = stats {
        summary["stats_rows"] = read_stats(p)?.len().into();
    }
    if let Some(p) = canonical {
        c.write_jsonl(fs::File::create(p)?)?;
    }
    print_json(&summary)
}

fn network(
    corpus: &Path,
    match_id: &str,
    team: Option<&str>,
    format: ExportFormat,
    per_innings: bool,
    out: Option<&Path>,
) -> Result<(), Error> {
    let c = read_corpus(corpus)?;
    let m = find_match(&c, match_id)?;
    let sets: Vec<_> = m.teams.iter().filter(|t| team.is_none_or(|name| t.team == name)).collect();
    if sets.is_empty() {
        return Err(Error::Study(StudyError::Config(format!(
            "match {match_id} has no team {:?}",
            team.unwrap_or_default()
        ))));
    }
    let mut text = String::new();
    for set in sets {
        let nets = if per_innings {
            build_innings_networks(&m.match_id, set).into_iter().map(|(_, n)| n).collect()
        } else {
            vec![build_network(&m.match_id, set)?]
        };
        for net in nets {
            let b = componentwise_betweenness(&net);
            text.push_str(&export_graph(&net, format, Some(&b)));
            if !text.ends_with('\n') {
                text.push('\n');
            }
        }
    }
    match out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Ingest {
            corpus,
            stats,
            canonical,
        } => ingest(&corpus, stats.as_deref(), canonical.as_deref()),
        Command::Network {
            corpus,
            match_id,
            team,
            export,
            per_innings_networks,
            out,
        } => network(
            &corpus,
            &match_id,
            team.as_deref(),
            export.into(),
            per_innings_networks,
            out.as_deref(),
        ),
        Command::Analyze { corpus, match_id } => {
            let c = read_corpus(&corpus)?;
            print_json(&analyze_match(find_match(&c, &match_id)?))
        }
        Command::Replicate {
            corpus,
            stats,
            format,
            seed,
            bootstrap,
            include_draws_as_loss,
            per_innings_networks,
            out,
        } => {
            let config = StudyConfig {
                format: format.into(),
                seed,
                bootstrap,
                features: FeatureOptions {
                    include_draws_as_loss,
                    per_innings_networks,
                },
            };
            leadnet::study::validate_config(&config)?;
            let c = read_corpus(&corpus)?;
            let s = read_stats(&stats)?;
            let report = replicate(&c, &s, &config)?;
            write_report_dir(&report, &out)?;
            let failures = report.model1_failures();
            if !failures.is_empty() {
                let msg = failures
                    .iter()
                    .map(|(section, format, e)| format!("{section} {format} model1: {e}"))
                    .collect::<Vec<_>>()
                    .join("; ");
                return Err(Error::Fit(format!("report written to {}, but {msg}", out.display())));
            }
            Ok(())
        }
        Command::Simulate {
            out,
            matches,
            odi_fraction,
            beta_c,
            a1,
            noise_sd,
            central_rate,
            draw_rate,
            tie_rate,
            seed,
        } => {
            let cfg = SimConfig {
                n_matches: matches,
                odi_fraction,
                beta_c,
                a1,
                rr_noise_sd: noise_sd,
                central_captain_rate: central_rate,
                draw_rate,
                tie_rate,
                seed,
                ..SimConfig::default()
            };
            let (corpus, stats) = simulate_corpus(&cfg)?;
            fs::create_dir_all(&out)?;
            corpus.write_jsonl(fs::File::create(out.join("corpus.jsonl"))?)?;
            stats.write_csv(fs::File::create(out.join("stats.csv"))?)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
