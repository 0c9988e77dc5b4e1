//! Exact best responses, NashConv, and a CFR+ equilibrium solver.
//!
//! Player 1 has one information set per hand (choose a bet size) and player
//! 2 one per (hand, bet faced) pair (call or fold). Both are small enough
//! that every iteration walks the full game.

use serde::{Deserialize, Serialize};

use crate::config::GameConfig;
use crate::error::{Error, Result};
use crate::game::{expected_value, showdown, JointDeal, StrategyP1, StrategyP2};

/// Default exploitability target in dollars.
pub const DEFAULT_EPSILON: f64 = 1e-4;
/// Default iteration cap for [`solve`].
pub const DEFAULT_MAX_ITERATIONS: usize = 100_000;

const TIE: f64 = 1e-12;

/// An approximate equilibrium with its convergence certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumResult {
    pub s1: StrategyP1,
    pub s2: StrategyP2,
    /// Player 1's expected net under `(s1, s2)`.
    pub value: f64,
    pub nash_conv: f64,
    pub iterations: usize,
}

/// Player 2's pure best response to `s1` and player 1's resulting value.
///
/// Player 2 calls when the call is at least as good as folding; pairs
/// (hand, bet) that player 1 never reaches are set to call.
pub fn best_response_p2(
    deal: &JointDeal,
    s1: &StrategyP1,
    cfg: &GameConfig,
) -> Result<(StrategyP2, f64)> {
    deal.check(cfg)?;
    s1.check(cfg)?;
    let d = cfg.deck_size;
    let mut tau = vec![1.0; cfg.strategy_len()];
    for c in 0..d {
        for b in 0..cfg.bet_steps {
            let pot = cfg.bet_amount(b) + cfg.ante;
            let mut reach = 0.0;
            let mut call = 0.0;
            for h in (0..d).filter(|&h| h != c) {
                let w = deal.get(h, c) * s1.prob(h, b);
                reach += w;
                call -= w * showdown(h, c, b, cfg);
            }
            if reach > 0.0 {
                let fold = -cfg.ante * reach;
                if call < fold - TIE * pot * reach {
                    tau[c * cfg.bet_steps + b] = 0.0;
                }
            }
        }
    }
    let s2 = StrategyP2::from_raw(cfg, tau);
    let value = expected_value(deal, s1, &s2, cfg)?;
    Ok((s2, value))
}

/// Per-(hand, bet) expected net for player 1 against `s2`, weighted by the
/// deal (rows are not conditioned on the hand).
fn p1_action_values(deal: &JointDeal, s2: &StrategyP2, cfg: &GameConfig) -> Vec<f64> {
    let d = cfg.deck_size;
    let bs = cfg.bet_steps;
    let mut v = vec![0.0; d * bs];
    for h in 0..d {
        for c in (0..d).filter(|&c| c != h) {
            let p = deal.get(h, c);
            if p == 0.0 {
                continue;
            }
            for b in 0..bs {
                let call = s2.call_prob(c, b);
                v[h * bs + b] += p * (call * showdown(h, c, b, cfg) + (1.0 - call) * cfg.ante);
            }
        }
    }
    v
}

/// Player 1's pure best response to `s2` and its value.
///
/// Ties go to the smaller bet; hands player 1 never holds bet zero.
pub fn best_response_p1(
    deal: &JointDeal,
    s2: &StrategyP2,
    cfg: &GameConfig,
) -> Result<(StrategyP1, f64)> {
    deal.check(cfg)?;
    s2.check(cfg)?;
    let bs = cfg.bet_steps;
    let values = p1_action_values(deal, s2, cfg);
    let marginal = deal.marginal_p1();
    let mut choices = vec![0; cfg.deck_size];
    let mut total = 0.0;
    for (h, row) in values.chunks(bs).enumerate() {
        if marginal[h] == 0.0 {
            continue;
        }
        let mut best = 0;
        for b in 1..bs {
            if row[b] > row[best] + TIE * marginal[h] {
                best = b;
            }
        }
        choices[h] = best;
        total += row[best];
    }
    Ok((StrategyP1::from_choices(cfg, &choices), total))
}

/// Total gain available to the two best-responding players.
pub fn nash_conv(
    deal: &JointDeal,
    s1: &StrategyP1,
    s2: &StrategyP2,
    cfg: &GameConfig,
) -> Result<f64> {
    let (_, best_for_p1) = best_response_p1(deal, s2, cfg)?;
    let (_, worst_for_p1) = best_response_p2(deal, s1, cfg)?;
    Ok((best_for_p1 - worst_for_p1).max(0.0))
}

/// Regret-matching+ over one information set's accumulated regrets.
fn regret_match(regrets: &[f64], out: &mut [f64]) {
    let total: f64 = regrets.iter().sum();
    if total > 0.0 {
        for (o, r) in out.iter_mut().zip(regrets) {
            *o = r / total;
        }
    } else {
        out.fill(1.0 / out.len() as f64);
    }
}

/// CFR+ state: floored cumulative regrets, current and linearly averaged
/// strategies for both players.
struct CfrPlus<'a> {
    deal: &'a JointDeal,
    cfg: &'a GameConfig,
    regret1: Vec<f64>,
    regret2_call: Vec<f64>,
    regret2_fold: Vec<f64>,
    sigma: Vec<f64>,
    tau: Vec<f64>,
    avg_sigma: Vec<f64>,
    avg_tau: Vec<f64>,
    weight: f64,
}

impl<'a> CfrPlus<'a> {
    fn new(deal: &'a JointDeal, cfg: &'a GameConfig) -> Self {
        let n = cfg.strategy_len();
        Self {
            deal,
            cfg,
            regret1: vec![0.0; n],
            regret2_call: vec![0.0; n],
            regret2_fold: vec![0.0; n],
            sigma: vec![1.0 / cfg.bet_steps as f64; n],
            tau: vec![0.5; n],
            avg_sigma: vec![0.0; n],
            avg_tau: vec![0.0; n],
            weight: 0.0,
        }
    }

    fn iterate(&mut self, t: usize) {
        let d = self.cfg.deck_size;
        let bs = self.cfg.bet_steps;
        let ante = self.cfg.ante;
        let w = t as f64;

        // player 2 against the current player 1 strategy
        for c in 0..d {
            for b in 0..bs {
                let pot = self.cfg.bet_amount(b) + ante;
                let (mut below, mut above) = (0.0, 0.0);
                for h in 0..d {
                    let x = self.deal.get(h, c) * self.sigma[h * bs + b];
                    if h < c {
                        below += x;
                    } else if h > c {
                        above += x;
                    }
                }
                let k = c * bs + b;
                let v_call = (below - above) * pot;
                let v_fold = -ante * (below + above);
                let tau = self.tau[k];
                let v = tau * v_call + (1.0 - tau) * v_fold;
                self.regret2_call[k] = (self.regret2_call[k] + v_call - v).max(0.0);
                self.regret2_fold[k] = (self.regret2_fold[k] + v_fold - v).max(0.0);
                let total = self.regret2_call[k] + self.regret2_fold[k];
                self.tau[k] = if total > 0.0 { self.regret2_call[k] / total } else { 0.5 };
                self.avg_tau[k] += w * self.tau[k];
            }
        }

        // player 1 against the updated player 2 strategy
        let s2 = StrategyP2::from_raw(self.cfg, std::mem::take(&mut self.tau));
        let values = p1_action_values(self.deal, &s2, self.cfg);
        self.tau = s2.as_slice().to_vec();
        for h in 0..d {
            let row = h * bs..(h + 1) * bs;
            let v: f64 = values[row.clone()]
                .iter()
                .zip(&self.sigma[row.clone()])
                .map(|(a, b)| a * b)
                .sum();
            for k in row.clone() {
                self.regret1[k] = (self.regret1[k] + values[k] - v).max(0.0);
            }
            regret_match(&self.regret1[row.clone()], &mut self.sigma[row.clone()]);
            for k in row {
                self.avg_sigma[k] += w * self.sigma[k];
            }
        }
        self.weight += w;
    }

    fn current(&self) -> (StrategyP1, StrategyP2) {
        self.profile(self.sigma.clone(), self.tau.clone())
    }

    fn average(&self) -> (StrategyP1, StrategyP2) {
        let bs = self.cfg.bet_steps;
        let mut sigma: Vec<f64> = self.avg_sigma.iter().map(|x| x / self.weight).collect();
        // absorb rounding so each row is an exact distribution
        for row in sigma.chunks_mut(bs) {
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|x| *x /= s);
        }
        let tau = self
            .avg_tau
            .iter()
            .map(|x| (x / self.weight).clamp(0.0, 1.0))
            .collect();
        self.profile(sigma, tau)
    }

    fn profile(&self, sigma: Vec<f64>, tau: Vec<f64>) -> (StrategyP1, StrategyP2) {
        let mut s1 = StrategyP1::from_raw(self.cfg, sigma);
        let mut s2 = StrategyP2::from_raw(self.cfg, tau);
        s1.canonicalize(self.deal);
        s2.canonicalize(self.deal);
        (s1, s2)
    }
}

/// Iterations between exploitability checks in [`solve`].
const CHECK_EVERY: usize = 25;

/// Runs CFR+ with alternating updates until either the averaged or the
/// current profile has NashConv at most `epsilon`.
///
/// Deterministic for a given `(deal, cfg, epsilon, max_iterations)`. On
/// failure the error carries the least exploitable profile seen.
pub fn solve(
    deal: &JointDeal,
    cfg: &GameConfig,
    epsilon: f64,
    max_iterations: usize,
) -> Result<EquilibriumResult> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidConfig(format!("epsilon must be positive, got {epsilon}")));
    }
    cfg.validate()?;
    deal.check(cfg)?;

    let mut state = CfrPlus::new(deal, cfg);
    let mut best: Option<EquilibriumResult> = None;
    for t in 1..=max_iterations {
        state.iterate(t);
        if t % CHECK_EVERY != 0 && t != max_iterations {
            continue;
        }
        for (s1, s2) in [state.average(), state.current()] {
            let nc = nash_conv(deal, &s1, &s2, cfg)?;
            if best.as_ref().map_or(true, |b| nc < b.nash_conv) {
                let value = expected_value(deal, &s1, &s2, cfg)?;
                best = Some(EquilibriumResult {
                    s1,
                    s2,
                    value,
                    nash_conv: nc,
                    iterations: t,
                });
            }
        }
        if best.as_ref().is_some_and(|b| b.nash_conv <= epsilon) {
            return Ok(best.unwrap());
        }
    }
    let best = best.expect("at least one iteration runs when max_iterations > 0");
    Err(Error::ConvergenceFailure {
        epsilon,
        iterations: max_iterations,
        nash_conv: best.nash_conv,
        best: Box::new(best),
    })
}
