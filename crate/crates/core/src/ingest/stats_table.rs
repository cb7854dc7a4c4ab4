//! Per-season player statistics (`player,year,icc_points,batting_average`).

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::IngestError;

pub const MAX_ICC_POINTS: u16 = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerSeasonStats {
    pub player: String,
    pub year: i32,
    pub icc_points: u16,
    /// Runs per dismissal.
    pub batting_average: f64,
}

/// A lookup for which no stats row exists. Callers drop the observation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no stats for player {player:?} in {year}")]
pub struct MissingStats {
    pub player: String,
    pub year: i32,
}

#[derive(Debug, Deserialize)]
struct RawRow {
    player: String,
    year: i32,
    icc_points: i64,
    batting_average: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StatsIndex {
    rows: BTreeMap<(String, i32), PlayerSeasonStats>,
}

impl StatsIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_rows(rows: impl IntoIterator<Item = PlayerSeasonStats>) -> Result<Self, IngestError> {
        let mut index = Self::new();
        for row in rows {
            index.insert(row)?;
        }
        Ok(index)
    }

    pub fn insert(&mut self, row: PlayerSeasonStats) -> Result<(), IngestError> {
        if row.icc_points > MAX_ICC_POINTS {
            return Err(IngestError::Range {
                player: row.player,
                year: row.year,
                message: format!("icc_points {} outside [0, {MAX_ICC_POINTS}]", row.icc_points),
            });
        }
        if !(row.batting_average.is_finite() && row.batting_average >= 0.0) {
            return Err(IngestError::Range {
                player: row.player,
                year: row.year,
                message: format!("batting_average {} must be finite and non-negative", row.batting_average),
            });
        }
        let key = (row.player.clone(), row.year);
        if self.rows.contains_key(&key) {
            return Err(IngestError::DuplicateKey {
                player: row.player,
                year: row.year,
            });
        }
        self.rows.insert(key, row);
        Ok(())
    }

    pub fn lookup(&self, player: &str, year: i32) -> Result<&PlayerSeasonStats, MissingStats> {
        // BTreeMap<(String, i32)> cannot be queried by (&str, i32) without allocating.
        self.rows
            .get(&(player.to_string(), year))
            .ok_or_else(|| MissingStats {
                player: player.to_string(),
                year,
            })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &PlayerSeasonStats> {
        self.rows.values()
    }

    /// Canonical CSV, rows sorted by (player, year).
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), IngestError> {
        let mut w = csv::Writer::from_writer(writer);
        for row in self.iter() {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

/// Reads a stats table with header `player,year,icc_points,batting_average`.
pub fn load_player_stats<R: Read>(reader: R) -> Result<StatsIndex, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let expected = ["player", "year", "icc_points", "batting_average"];
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(expected.iter().copied()) {
        return Err(IngestError::Schema {
            line: 1,
            message: format!("stats header must be {}", expected.join(",")),
        });
    }
    let mut index = StatsIndex::new();
    for row in rdr.deserialize() {
        let raw: RawRow = row?;
        if !(0..=i64::from(MAX_ICC_POINTS)).contains(&raw.icc_points) {
            return Err(IngestError::Range {
                player: raw.player,
                year: raw.year,
                message: format!("icc_points {} outside [0, {MAX_ICC_POINTS}]", raw.icc_points),
            });
        }
        index.insert(PlayerSeasonStats {
            player: raw.player,
            year: raw.year,
            icc_points: raw.icc_points as u16,
            batting_average: raw.batting_average,
        })?;
    }
    Ok(index)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "player,year,icc_points,batting_average\n";

    #[test]
    fn single_row_lookup() {
        let idx = load_player_stats(format!("{HEADER}p1,2005,750,50.1\n").as_bytes()).unwrap();
        let s = idx.lookup("p1", 2005).unwrap();
        assert_eq!((s.icc_points, s.batting_average), (750, 50.1));
    }

    #[test]
    fn duplicate_key() {
        let text = format!("{HEADER}p1,2005,750,50.1\np1,2005,700,40.0\n");
        assert!(matches!(
            load_player_stats(text.as_bytes()),
            Err(IngestError::DuplicateKey { year: 2005, .. })
        ));
    }

    #[test]
    fn out_of_range_points() {
        for bad in ["1001", "-1"] {
            let text = format!("{HEADER}p1,2005,{bad},50.1\n");
            assert!(matches!(load_player_stats(text.as_bytes()), Err(IngestError::Range { .. })));
        }
        let neg_avg = format!("{HEADER}p1,2005,10,-2\n");
        assert!(matches!(load_player_stats(neg_avg.as_bytes()), Err(IngestError::Range { .. })));
    }

    #[test]
    fn missing_lookup_is_reported() {
        let idx = load_player_stats(format!("{HEADER}p1,2005,750,50.1\n").as_bytes()).unwrap();
        assert_eq!(
            idx.lookup("p2", 2005),
            Err(MissingStats { player: "p2".into(), year: 2005 })
        );
        assert!(idx.lookup("p1", 2006).is_err());
    }

    #[test]
    fn wrong_header() {
        assert!(matches!(
            load_player_stats("name,year,icc,avg\n".as_bytes()),
            Err(IngestError::Schema { .. })
        ));
    }

    #[test]
    fn csv_round_trip() {
        let text = format!("{HEADER}a,2001,0,0.0\nb,2001,1000,12.5\n");
        let idx = load_player_stats(text.as_bytes()).unwrap();
        assert_eq!(idx.to_csv_string(), text);
        assert_eq!(load_player_stats(idx.to_csv_string().as_bytes()).unwrap(), idx);
    }
}
