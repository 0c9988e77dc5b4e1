//! The ten ways a solved game is turned into learning examples.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// What the 21st feature of a per-card representation holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CardFeature {
    /// The card's rank, 1..=deck size.
    Number,
    /// Player 1's marginal cdf at the card.
    Percentile,
}

/// Shape of a representation's target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputKind {
    /// Full player-1 strategy, every hand's bet distribution.
    Full,
    /// One hand's bet distribution.
    Hand,
    /// One bet size in dollars sampled from the hand's distribution.
    Bet,
}

/// Representations R1 through R10.
///
/// | id | features | 21st feature | output |
/// |----|----------|--------------|--------|
/// | R1 | cdf | none | full strategy |
/// | R2 | pdf | none | full strategy |
/// | R3 | cdf | card number | hand distribution |
/// | R4 | pdf | card number | hand distribution |
/// | R5 | cdf | card percentile | hand distribution |
/// | R6 | pdf | card percentile | hand distribution |
/// | R7 | cdf | card number | sampled bet |
/// | R8 | pdf | card number | sampled bet |
/// | R9 | cdf | card percentile | sampled bet |
/// | R10 | pdf | card percentile | sampled bet |
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum RepresentationId {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
    R10,
}

use RepresentationId::*;

impl RepresentationId {
    pub const ALL: [RepresentationId; 10] = [R1, R2, R3, R4, R5, R6, R7, R8, R9, R10];

    pub fn number(self) -> usize {
        self as usize + 1
    }

    pub fn from_number(n: usize) -> Option<Self> {
        Self::ALL.get(n.checked_sub(1)?).copied()
    }

    /// Odd ids use cdf distribution features, even ids pdf.
    pub fn uses_cdf(self) -> bool {
        self.number() % 2 == 1
    }

    pub fn card_feature(self) -> Option<CardFeature> {
        match self {
            R1 | R2 => None,
            R3 | R4 | R7 | R8 => Some(CardFeature::Number),
            R5 | R6 | R9 | R10 => Some(CardFeature::Percentile),
        }
    }

    pub fn output_kind(self) -> OutputKind {
        match self {
            R1 | R2 => OutputKind::Full,
            R3 | R4 | R5 | R6 => OutputKind::Hand,
            R7 | R8 | R9 | R10 => OutputKind::Bet,
        }
    }

    pub fn is_per_card(self) -> bool {
        self.card_feature().is_some()
    }

    /// Number of input features for a deck of `deck_size` cards.
    pub fn feature_len(self, deck_size: usize) -> usize {
        2 * deck_size + usize::from(self.is_per_card())
    }

    /// One-line description for reports.
    pub fn describe(self) -> String {
        let dist = if self.uses_cdf() { "cdf" } else { "pdf" };
        let card = match self.card_feature() {
            None => String::new(),
            Some(CardFeature::Number) => " + card number".into(),
            Some(CardFeature::Percentile) => " + card cdf value".into(),
        };
        let out = match self.output_kind() {
            OutputKind::Full => "full strategy (all hands)",
            OutputKind::Hand => "hand bet distribution",
            OutputKind::Bet => "sampled bet size",
        };
        format!("{self}: {dist} features{card} -> {out}")
    }
}

impl fmt::Display for RepresentationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.number())
    }
}

impl FromStr for RepresentationId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        t.strip_prefix('r')
            .and_then(|n| n.parse().ok())
            .and_then(Self::from_number)
            .ok_or_else(|| Error::RepresentationError(format!("unknown representation {s:?}")))
    }
}

impl TryFrom<String> for RepresentationId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<RepresentationId> for String {
    fn from(r: RepresentationId) -> Self {
        r.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_matches_the_enumeration() {
        assert_eq!(R1.feature_len(10), 20);
        assert_eq!(R6.feature_len(10), 21);
        assert!(R9.uses_cdf() && !R10.uses_cdf());
        assert_eq!(R5.card_feature(), Some(CardFeature::Percentile));
        assert_eq!(R8.card_feature(), Some(CardFeature::Number));
        assert_eq!(R4.output_kind(), OutputKind::Hand);
        assert_eq!(R7.output_kind(), OutputKind::Bet);
    }

    #[test]
    fn parse_and_display() {
        for r in RepresentationId::ALL {
            assert_eq!(r.to_string().parse::<RepresentationId>().unwrap(), r);
        }
        assert_eq!("R10".parse::<RepresentationId>().unwrap(), R10);
        assert!("r11".parse::<RepresentationId>().is_err());
        assert!("x".parse::<RepresentationId>().is_err());
        assert_eq!(serde_json::to_string(&R3).unwrap(), "\"r3\"");
    }
}
