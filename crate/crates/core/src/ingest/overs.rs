//! Cricket overs notation (`<overs>.<balls>`, six balls to the over).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::IngestError;

pub const BALLS_PER_OVER: u32 = 6;

/// A count of legal deliveries, displayed in overs notation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Overs {
    balls: u32,
}

impl Overs {
    pub fn from_balls(balls: u32) -> Self {
        Self { balls }
    }

    pub fn balls(self) -> u32 {
        self.balls
    }

    /// True overs as a real number: `whole + balls / 6`.
    pub fn as_decimal(self) -> f64 {
        f64::from(self.balls) / f64::from(BALLS_PER_OVER)
    }

    pub fn is_zero(self) -> bool {
        self.balls == 0
    }
}

impl std::ops::Add for Overs {
    type Output = Overs;

    fn add(self, rhs: Overs) -> Overs {
        Overs::from_balls(self.balls + rhs.balls)
    }
}

/// Parses `"<int>"` or `"<int>.<ball>"` with the ball digit in `0..=5`.
pub fn parse_overs(text: &str) -> Result<Overs, IngestError> {
    let err = |reason: &str| IngestError::Format {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let (whole, ball) = match text.split_once('.') {
        Some((w, b)) => (w, Some(b)),
        None => (text, None),
    };
    if whole.is_empty() || !whole.bytes().all(|c| c.is_ascii_digit()) {
        return Err(err("whole overs must be a non-negative integer"));
    }
    let whole: u32 = whole
        .parse()
        .map_err(|_| err("whole overs out of range"))?;
    let ball = match ball {
        None => 0,
        Some(b) if b.len() == 1 && b.as_bytes()[0].is_ascii_digit() => u32::from(b.as_bytes()[0] - b'0'),
        Some(_) => return Err(err("ball count must be a single digit")),
    };
    if ball >= BALLS_PER_OVER {
        return Err(err("ball count must be in 0..=5"));
    }
    whole
        .checked_mul(BALLS_PER_OVER)
        .and_then(|b| b.checked_add(ball))
        .map(Overs::from_balls)
        .ok_or_else(|| err("overs out of range"))
}

impl FromStr for Overs {
    type Err = IngestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_overs(s)
    }
}

impl fmt::Display for Overs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.balls / BALLS_PER_OVER, self.balls % BALLS_PER_OVER)
    }
}

impl Serialize for Overs {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Overs {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_overs(&text).map_err(serde::de::Error::custom)
    }
}
