//! Batting-partnership networks, captain centrality and the regressions that
//! relate leadership structure to results.
//!
//! Pipeline: [`ingest`] parses scorecards and player stats, [`graph`] builds
//! one weighted network per team and match, [`centrality`] scores players and
//! networks, [`leadership`] derives per-match features, [`stats`] fits the
//! models and [`study`] assembles reports.

pub mod centrality;
pub mod graph;
pub mod ingest;
pub mod leadership;
pub mod rng;
pub mod stats;
pub mod study;

use thiserror::Error;

/// Any failure surfaced to the command line.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Ingest(#[from] ingest::IngestError),
    #[error(transparent)]
    Graph(#[from] graph::GraphError),
    #[error(transparent)]
    Centrality(#[from] centrality::CentralityError),
    #[error(transparent)]
    Stats(#[from] stats::StatsError),
    #[error(transparent)]
    Study(#[from] study::StudyError),
    #[error("{0}")]
    Fit(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Process exit status classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCategory {
    Success = 0,
    Data = 1,
    Fit = 2,
    Config = 3,
}

impl Error {
    pub fn category(&self) -> ExitCategory {
        match self {
            Error::Ingest(_) | Error::Graph(_) | Error::Centrality(_) | Error::Io(_) => ExitCategory::Data,
            Error::Stats(_) | Error::Fit(_) => ExitCategory::Fit,
            Error::Study(study::StudyError::Config(_)) => ExitCategory::Config,
            Error::Study(_) => ExitCategory::Data,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.category() as i32
    }
}
