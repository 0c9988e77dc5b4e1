//! The one-street game: both players ante, each holds one private card,
//! player 1 picks a bet size from a fixed grid (zero included) and player 2
//! calls or folds.
//!
//! Hands are ranked 1 (weakest) to `deck_size` (strongest). Matrices are
//! stored flat and row-major; rows are indexed by `rank - 1`.

use serde::{Deserialize, Serialize};

use crate::config::{GameConfig, TOLERANCE};
use crate::error::{Error, Result};

/// A private card, ranked from 1 (weakest) to the deck size (strongest).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Card(usize);

impl Card {
    pub fn new(rank: usize, cfg: &GameConfig) -> Result<Self> {
        if rank == 0 || rank > cfg.deck_size {
            return Err(Error::ConfigMismatch(format!(
                "card rank {rank} outside 1..={}",
                cfg.deck_size
            )));
        }
        Ok(Self(rank))
    }

    pub fn rank(self) -> usize {
        self.0
    }

    /// Zero-based row index.
    pub fn index(self) -> usize {
        self.0 - 1
    }
}

/// Position of a bet on the grid `0, increment, 2·increment, …, stack`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BetIndex(usize);

impl BetIndex {
    pub fn new(index: usize, cfg: &GameConfig) -> Result<Self> {
        if index >= cfg.bet_steps {
            return Err(Error::ConfigMismatch(format!(
                "bet index {index} outside 0..{}",
                cfg.bet_steps
            )));
        }
        Ok(Self(index))
    }

    pub fn index(self) -> usize {
        self.0
    }

    pub fn amount(self, cfg: &GameConfig) -> f64 {
        cfg.bet_amount(self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Response {
    Call,
    Fold,
}

/// Player 1's net result for one terminal outcome.
pub fn payoff(h1: Card, h2: Card, bet: BetIndex, response: Response, cfg: &GameConfig) -> Result<f64> {
    if h1 == h2 {
        return Err(Error::IllegalShowdown(h1.rank()));
    }
    Ok(match response {
        Response::Fold => cfg.ante,
        Response::Call => showdown(h1.index(), h2.index(), bet.index(), cfg),
    })
}

/// Called-bet payoff by zero-based indices; the caller guarantees `i != j`.
#[inline]
pub(crate) fn showdown(i: usize, j: usize, b: usize, cfg: &GameConfig) -> f64 {
    let pot = cfg.bet_amount(b) + cfg.ante;
    if i > j {
        pot
    } else {
        -pot
    }
}

/// Joint distribution over (player 1 card, player 2 card).
///
/// Entry `(i, j)` is the probability that player 1 holds rank `i + 1` and
/// player 2 holds rank `j + 1`. The diagonal is zero since both cards come
/// from the same deck.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDeal {
    deck_size: usize,
    p: Vec<f64>,
}

impl JointDeal {
    pub fn new(deck_size: usize, p: Vec<f64>) -> Result<Self> {
        if p.len() != deck_size * deck_size {
            return Err(Error::DimensionError(format!(
                "joint deal needs {} entries, got {}",
                deck_size * deck_size,
                p.len()
            )));
        }
        let mut total = 0.0;
        for (k, &v) in p.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "joint entry ({}, {}) = {v}",
                    k / deck_size + 1,
                    k % deck_size + 1
                )));
            }
            if k / deck_size == k % deck_size && v != 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "both players cannot hold card {} (entry {v})",
                    k / deck_size + 1
                )));
            }
            total += v;
        }
        if (total - 1.0).abs() > TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "joint deal sums to {total}"
            )));
        }
        Ok(Self { deck_size, p })
    }

    /// Independent marginals restricted to distinct cards and renormalized.
    pub fn from_marginals(pdf1: &[f64], pdf2: &[f64]) -> Result<Self> {
        crate::deal::make_joint(pdf1, pdf2)
    }

    /// Uniform over ordered pairs of distinct cards.
    pub fn uniform(deck_size: usize) -> Self {
        let w = 1.0 / (deck_size * (deck_size - 1)) as f64;
        let p = (0..deck_size * deck_size)
            .map(|k| if k / deck_size == k % deck_size { 0.0 } else { w })
            .collect();
        Self { deck_size, p }
    }

    pub fn deck_size(&self) -> usize {
        self.deck_size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.deck_size + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.p[i * self.deck_size..(i + 1) * self.deck_size]
    }

    /// Player 1's marginal pdf.
    pub fn marginal_p1(&self) -> Vec<f64> {
        (0..self.deck_size).map(|i| self.row(i).iter().sum()).collect()
    }

    /// Player 2's marginal pdf.
    pub fn marginal_p2(&self) -> Vec<f64> {
        (0..self.deck_size)
            .map(|j| (0..self.deck_size).map(|i| self.get(i, j)).sum())
            .collect()
    }

    pub(crate) fn check(&self, cfg: &GameConfig) -> Result<()> {
        if self.deck_size != cfg.deck_size {
            return Err(Error::ConfigMismatch(format!(
                "deal has {} cards, config has {}",
                self.deck_size, cfg.deck_size
            )));
        }
        Ok(())
    }
}

fn check_probabilities(rows: usize, cols: usize, v: &[f64], what: &str) -> Result<()> {
    if v.len() != rows * cols {
        return Err(Error::DimensionError(format!(
            "{what} needs {} entries, got {}",
            rows * cols,
            v.len()
        )));
    }
    if let Some((k, x)) = v
        .iter()
        .enumerate()
        .find(|(_, &x)| !(x.is_finite() && (-TOLERANCE..=1.0 + TOLERANCE).contains(&x)))
    {
        return Err(Error::InvalidStrategy(format!(
            "{what} entry (hand {}, bet {}) = {x}",
            k / cols + 1,
            k % cols
        )));
    }
    Ok(())
}

/// Player 1's behavior: one distribution over bet sizes per hand.
///
/// Flattened hand-major, bet-minor; with the default config this is a
/// 310-vector whose first 31 entries belong to card 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyP1 {
    deck_size: usize,
    bet_steps: usize,
    sigma: Vec<f64>,
}

impl StrategyP1 {
    pub fn new(deck_size: usize, bet_steps: usize, sigma: Vec<f64>) -> Result<Self> {
        check_probabilities(deck_size, bet_steps, &sigma, "player 1 strategy")?;
        for (h, row) in sigma.chunks(bet_steps).enumerate() {
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > TOLERANCE {
                return Err(Error::InvalidStrategy(format!(
                    "hand {} probabilities sum to {s}",
                    h + 1
                )));
            }
        }
        Ok(Self {
            deck_size,
            bet_steps,
            sigma,
        })
    }

    /// Every hand bets index `b` with certainty.
    pub fn pure(cfg: &GameConfig, b: usize) -> Self {
        Self::from_choices(cfg, &vec![b; cfg.deck_size])
    }

    /// Hand `h` (zero-based) bets `choices[h]` with certainty.
    pub fn from_choices(cfg: &GameConfig, choices: &[usize]) -> Self {
        let mut sigma = vec![0.0; cfg.strategy_len()];
        for (h, &b) in choices.iter().enumerate() {
            sigma[h * cfg.bet_steps + b] = 1.0;
        }
        Self {
            deck_size: cfg.deck_size,
            bet_steps: cfg.bet_steps,
            sigma,
        }
    }

    pub(crate) fn from_raw(cfg: &GameConfig, sigma: Vec<f64>) -> Self {
        Self {
            deck_size: cfg.deck_size,
            bet_steps: cfg.bet_steps,
            sigma,
        }
    }

    /// Probability that hand index `h` bets index `b`.
    #[inline]
    pub fn prob(&self, h: usize, b: usize) -> f64 {
        self.sigma[h * self.bet_steps + b]
    }

    pub fn row(&self, h: usize) -> &[f64] {
        &self.sigma[h * self.bet_steps..(h + 1) * self.bet_steps]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.sigma
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.sigma
    }

    pub fn deck_size(&self) -> usize {
        self.deck_size
    }

    pub fn bet_steps(&self) -> usize {
        self.bet_steps
    }

    /// Expected dollar amount bet by hand index `h`.
    pub fn expected_bet(&self, h: usize, cfg: &GameConfig) -> f64 {
        self.row(h)
            .iter()
            .enumerate()
            .map(|(b, &x)| x * cfg.bet_amount(b))
            .sum()
    }

    /// Pointwise mixture `alpha·self + (1 − alpha)·other`.
    pub fn mix(&self, other: &Self, alpha: f64) -> Self {
        let sigma = self
            .sigma
            .iter()
            .zip(&other.sigma)
            .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
            .collect();
        Self { sigma, ..*self }
    }

    /// Rows of hands player 1 never holds become "bet 0 with certainty".
    pub fn canonicalize(&mut self, deal: &JointDeal) {
        let m = deal.marginal_p1();
        for (h, &mass) in m.iter().enumerate() {
            if mass == 0.0 {
                let row = &mut self.sigma[h * self.bet_steps..(h + 1) * self.bet_steps];
                row.fill(0.0);
                row[0] = 1.0;
            }
        }
    }

    pub(crate) fn check(&self, cfg: &GameConfig) -> Result<()> {
        if self.deck_size != cfg.deck_size || self.bet_steps != cfg.bet_steps {
            return Err(Error::ConfigMismatch(format!(
                "player 1 strategy is {}x{}, config is {}x{}",
                self.deck_size, self.bet_steps, cfg.deck_size, cfg.bet_steps
            )));
        }
        Ok(())
    }
}

/// Player 2's behavior: call probability for each (own hand, facing bet).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyP2 {
    deck_size: usize,
    bet_steps: usize,
    tau: Vec<f64>,
}

impl StrategyP2 {
    pub fn new(deck_size: usize, bet_steps: usize, tau: Vec<f64>) -> Result<Self> {
        check_probabilities(deck_size, bet_steps, &tau, "player 2 strategy")?;
        Ok(Self {
            deck_size,
            bet_steps,
            tau,
        })
    }

    /// Same call probability everywhere.
    pub fn constant(cfg: &GameConfig, call: f64) -> Self {
        Self {
            deck_size: cfg.deck_size,
            bet_steps: cfg.bet_steps,
            tau: vec![call; cfg.strategy_len()],
        }
    }

    pub fn always_call(cfg: &GameConfig) -> Self {
        Self::constant(cfg, 1.0)
    }

    pub fn always_fold(cfg: &GameConfig) -> Self {
        Self::constant(cfg, 0.0)
    }

    pub(crate) fn from_raw(cfg: &GameConfig, tau: Vec<f64>) -> Self {
        Self {
            deck_size: cfg.deck_size,
            bet_steps: cfg.bet_steps,
            tau,
        }
    }

    /// Call probability for hand index `c` facing bet index `b`.
    #[inline]
    pub fn call_prob(&self, c: usize, b: usize) -> f64 {
        self.tau[c * self.bet_steps + b]
    }

    pub fn set_call_prob(&mut self, c: usize, b: usize, value: f64) {
        self.tau[c * self.bet_steps + b] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.tau
    }

    pub fn mix(&self, other: &Self, alpha: f64) -> Self {
        let tau = self
            .tau
            .iter()
            .zip(&other.tau)
            .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
            .collect();
        Self { tau, ..*self }
    }

    /// Rows of hands player 2 never holds become "always call".
    pub fn canonicalize(&mut self, deal: &JointDeal) {
        let m = deal.marginal_p2();
        for (c, &mass) in m.iter().enumerate() {
            if mass == 0.0 {
                self.tau[c * self.bet_steps..(c + 1) * self.bet_steps].fill(1.0);
            }
        }
    }

    pub(crate) fn check(&self, cfg: &GameConfig) -> Result<()> {
        if self.deck_size != cfg.deck_size || self.bet_steps != cfg.bet_steps {
            return Err(Error::ConfigMismatch(format!(
                "player 2 strategy is {}x{}, config is {}x{}",
                self.deck_size, self.bet_steps, cfg.deck_size, cfg.bet_steps
            )));
        }
        Ok(())
    }
}

/// Exact expected net for player 1 under a strategy profile.
pub fn expected_value(
    deal: &JointDeal,
    s1: &StrategyP1,
    s2: &StrategyP2,
    cfg: &GameConfig,
) -> Result<f64> {
    deal.check(cfg)?;
    s1.check(cfg)?;
    s2.check(cfg)?;
    let d = cfg.deck_size;
    let mut ev = 0.0;
    for i in 0..d {
        for j in 0..d {
            let pij = deal.get(i, j);
            if i == j || pij == 0.0 {
                continue;
            }
            let mut inner = 0.0;
            for b in 0..cfg.bet_steps {
                let x = s1.prob(i, b);
                if x == 0.0 {
                    continue;
                }
                let call = s2.call_prob(j, b);
                inner += x * (call * showdown(i, j, b, cfg) + (1.0 - call) * cfg.ante);
            }
            ev += pij * inner;
        }
    }
    Ok(ev)
}
