//! Game parameters and their plain-text `key = value` file form.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used for currency and probability comparisons.
pub const TOLERANCE: f64 = 1e-9;

/// Parameters of the one-street game.
///
/// The defaults are a 10-card deck, bets from 0 to 3.00 in 0.10 steps
/// (31 sizes), a 0.50 ante and a 3.00 stack behind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    pub deck_size: usize,
    pub bet_steps: usize,
    pub bet_increment: f64,
    pub ante: f64,
    pub stack: f64,
}

impl Default for GameConfig {
    fn default() -> Self {
        Self {
            deck_size: 10,
            bet_steps: 31,
            bet_increment: 0.1,
            ante: 0.5,
            stack: 3.0,
        }
    }
}

impl GameConfig {
    /// Builds a config and checks its invariants.
    pub fn new(
        deck_size: usize,
        bet_steps: usize,
        bet_increment: f64,
        ante: f64,
        stack: f64,
    ) -> Result<Self> {
        let cfg = Self {
            deck_size,
            bet_steps,
            bet_increment,
            ante,
            stack,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.deck_size < 2 {
            return Err(Error::InvalidConfig(format!(
                "deck_size must be at least 2, got {}",
                self.deck_size
            )));
        }
        if self.bet_steps < 2 {
            return Err(Error::InvalidConfig(format!(
                "bet_steps must be at least 2, got {}",
                self.bet_steps
            )));
        }
        for (name, v) in [
            ("bet_increment", self.bet_increment),
            ("ante", self.ante),
            ("stack", self.stack),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        let top = self.bet_increment * (self.bet_steps - 1) as f64;
        if (top - self.stack).abs() > TOLERANCE {
            return Err(Error::InvalidConfig(format!(
                "bet grid tops out at {top} but stack is {}",
                self.stack
            )));
        }
        Ok(())
    }

    /// Dollar amount of bet index `b`.
    #[inline]
    pub fn bet_amount(&self, b: usize) -> f64 {
        b as f64 * self.bet_increment
    }

    /// Largest absolute payoff of any terminal outcome.
    pub fn max_payoff(&self) -> f64 {
        self.stack + self.ante
    }

    /// Number of entries in a flattened player-1 strategy (hands × bet sizes).
    pub fn strategy_len(&self) -> usize {
        self.deck_size * self.bet_steps
    }

    /// Parses `key = value` lines. Blank lines and `#` comments are ignored;
    /// unspecified keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim().to_ascii_lowercase().replace('-', "_");
            let value = value.trim();
            let bad = || Error::InvalidConfig(format!("line {}: bad value {value:?}", lineno + 1));
            match key.as_str() {
                "deck_size" => cfg.deck_size = value.parse().map_err(|_| bad())?,
                "bet_steps" => cfg.bet_steps = value.parse().map_err(|_| bad())?,
                "bet_increment" => {
                    cfg.bet_increment = value.parse().map_err(|_| bad())?
                }
                "ante" => cfg.ante = value.parse().map_err(|_| bad())?,
                "stack" => cfg.stack = value.parse().map_err(|_| bad())?,
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "line {}: unknown key {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Renders the config in the same form [`GameConfig::parse`] accepts.
    pub fn to_text(&self) -> String {
        format!(
            "deck_size = {}\nbet_steps = {}\nbet_increment = {}\nante = {}\nstack = {}\n",
            self.deck_size, self.bet_steps, self.bet_increment, self.ante, self.stack
        )
    }
}
