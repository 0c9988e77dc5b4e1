//! Readable rule lists from decision trees, and compliance measurements for
//! two rules of thumb:
//!
//! * **80-20**: a hand that beats between 20% and 80% of the opponent's
//!   distribution should check or bet tiny.
//! * **All-in**: a hand that beats at least 95% of the opponent's
//!   distribution, against a distribution with at least 10% strong hands,
//!   should go all-in.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::GameConfig;
use crate::dataset::{features_for, GameRecord, Output};
use crate::error::{Error, Result};
use crate::learners::{DecisionTree, Node, Predictor};
use crate::repr::{CardFeature, RepresentationId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparator {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparator::Le => "≤",
            Comparator::Gt => ">",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub feature: usize,
    pub description: String,
    pub comparator: Comparator,
    pub threshold: f64,
}

impl Condition {
    pub fn holds(&self, x: &[f64]) -> bool {
        match self.comparator {
            Comparator::Le => x[self.feature] <= self.threshold,
            Comparator::Gt => x[self.feature] > self.threshold,
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {:.4}", self.description, self.comparator, self.threshold)
    }
}

/// What a rule tells player 1 to do.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Bet(f64),
    /// A bet distribution, summarized by its mean and its largest entries
    /// as `(amount, probability)`.
    Mix { expected_bet: f64, top: Vec<(f64, f64)> },
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Bet(x) => write!(f, "bet {x:.2}"),
            Action::Mix { expected_bet, top } => {
                let parts: Vec<String> = top.iter().map(|(a, p)| format!("{a:.1} pr {p:.3}")).collect();
                write!(f, "bet {} (mean {expected_bet:.2})", parts.join(", "))
            }
        }
    }
}

/// One root-to-leaf path of a tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyRule {
    pub conditions: Vec<Condition>,
    pub action: Action,
    pub prediction: Output,
    pub support: usize,
    pub error: f64,
}

impl StrategyRule {
    pub fn matches(&self, x: &[f64]) -> bool {
        self.conditions.iter().all(|c| c.holds(x))
    }

    /// Interval `(lo, hi]` that the path allows for `feature`.
    pub fn bounds(&self, feature: usize) -> (f64, f64) {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for c in self.conditions.iter().filter(|c| c.feature == feature) {
            match c.comparator {
                Comparator::Le => hi = hi.min(c.threshold),
                Comparator::Gt => lo = lo.max(c.threshold),
            }
        }
        (lo, hi)
    }
}

/// Domain-language name of feature `i`.
pub fn describe_feature(i: usize, rep: RepresentationId, deck_size: usize) -> String {
    let d = deck_size;
    let (who, k) = if i < d { ("you hold", i + 1) } else { ("opponent holds", i - d + 1) };
    if i < 2 * d {
        return if rep.uses_cdf() {
            format!("probability {who} ≤ card {k}")
        } else {
            format!("probability {who} card {k}")
        };
    }
    match rep.card_feature() {
        Some(CardFeature::Percentile) => "your hand's strength percentile".into(),
        _ => "your card".into(),
    }
}

fn action_for(out: &Output, cfg: &GameConfig) -> Action {
    match out {
        Output::Bet(x) => Action::Bet(*x),
        Output::Hand(v) => {
            let mut top: Vec<(f64, f64)> = v
                .iter()
                .enumerate()
                .filter(|(_, &p)| p >= 0.01)
                .map(|(b, &p)| (cfg.bet_amount(b), p))
                .collect();
            top.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.partial_cmp(&b.0).unwrap()));
            top.truncate(3);
            Action::Mix {
                expected_bet: out.expected_bet(0, cfg),
                top,
            }
        }
        Output::Full(_) => Action::Mix {
            expected_bet: (0..cfg.deck_size).map(|h| out.expected_bet(h, cfg)).sum::<f64>()
                / cfg.deck_size as f64,
            top: (0..cfg.deck_size)
                .map(|h| ((h + 1) as f64, out.expected_bet(h, cfg)))
                .collect(),
        },
    }
}

/// One rule per leaf, depth-first with the true branch first.
pub fn extract_rules(tree: &DecisionTree) -> Vec<StrategyRule> {
    fn walk(
        node: &Node,
        path: &mut Vec<Condition>,
        tree: &DecisionTree,
        out: &mut Vec<StrategyRule>,
    ) {
        match node {
            Node::Leaf {
                prediction,
                samples,
                error,
            } => out.push(StrategyRule {
                conditions: path.clone(),
                action: action_for(prediction, &tree.config),
                prediction: prediction.clone(),
                support: *samples,
                error: *error,
            }),
            Node::Split {
                feature,
                threshold,
                left,
                right,
                ..
            } => {
                let description = describe_feature(*feature, tree.rep, tree.config.deck_size);
                for (cmp, child) in [(Comparator::Le, left), (Comparator::Gt, right)] {
                    path.push(Condition {
                        feature: *feature,
                        description: description.clone(),
                        comparator: cmp,
                        threshold: *threshold,
                    });
                    walk(child, path, tree, out);
                    path.pop();
                }
            }
        }
    }
    let mut rules = Vec::with_capacity(tree.leaf_count());
    walk(&tree.root, &mut Vec::new(), tree, &mut rules);
    rules
}

/// Output of the first rule whose conditions all hold.
pub fn apply_rules<'a>(rules: &'a [StrategyRule], x: &[f64]) -> Option<&'a Output> {
    rules.iter().find(|r| r.matches(x)).map(|r| &r.prediction)
}

/// Renders an ordered rule list: `if … then …` for the first rule,
/// `else if …` for the middle ones and a bare `else …` for the last.
pub fn render_rules(rules: &[StrategyRule], separator: &str) -> String {
    let n = rules.len();
    let lines: Vec<String> = rules
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let conds: Vec<String> = r.conditions.iter().map(|c| c.to_string()).collect();
            if conds.is_empty() {
                r.action.to_string()
            } else if i + 1 == n && n > 1 {
                format!("else {}", r.action)
            } else {
                let head = if i == 0 { "if" } else { "else if" };
                format!("{head} {} then {}", conds.join(" and "), r.action)
            }
        })
        .collect();
    lines.join(separator)
}

/// One line per rule with its full path, support and error.
pub fn render_detailed(rules: &[StrategyRule]) -> String {
    rules
        .iter()
        .map(|r| {
            let conds: Vec<String> = r.conditions.iter().map(|c| c.to_string()).collect();
            let cond = if conds.is_empty() { "always".to_string() } else { conds.join(" and ") };
            format!("if {cond} then {}  [support {}, error {:.4}]", r.action, r.support, r.error)
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Something that can name a bet for player 1 holding `card` in a game.
pub trait BetPolicy {
    /// Expected bet in dollars.
    fn bet(&self, record: &GameRecord, card: usize, cfg: &GameConfig) -> Result<f64>;
}

/// The stored equilibrium strategy.
pub struct EquilibriumPolicy;

impl BetPolicy for EquilibriumPolicy {
    fn bet(&self, record: &GameRecord, card: usize, cfg: &GameConfig) -> Result<f64> {
        Ok(Output::Hand(record.hand_block(card - 1, cfg).to_vec()).expected_bet(0, cfg))
    }
}

/// Always the same bet.
pub struct ConstantPolicy(pub f64);

impl BetPolicy for ConstantPolicy {
    fn bet(&self, _: &GameRecord, _: usize, _: &GameConfig) -> Result<f64> {
        Ok(self.0)
    }
}

/// A trained model queried with the game's features.
pub struct ModelPolicy<'a, P: ?Sized>(pub &'a P);

impl<P: Predictor + ?Sized> BetPolicy for ModelPolicy<'_, P> {
    fn bet(&self, record: &GameRecord, card: usize, cfg: &GameConfig) -> Result<f64> {
        let rep = self.0.rep();
        let x = features_for(&record.features, rep, rep.is_per_card().then_some(card))?;
        Ok(self.0.predict(&x)?.expected_bet(card - 1, cfg))
    }
}

/// Thresholds of the two rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuleThresholds {
    /// 80-20 rule: hands beating between these fractions qualify.
    pub middle_low: f64,
    pub middle_high: f64,
    /// 80-20 rule: largest bet that counts as checking.
    pub small_bet: f64,
    /// All-in rule: fraction of the opponent's hands a qualifying hand beats.
    pub dominant: f64,
    /// An opponent hand is strong when it beats at least this fraction of
    /// player 1's distribution; weaker hands are "weak or mediocre".
    pub strong_cut: f64,
    /// Minimum mass of strong opponent hands.
    pub strong_mass: f64,
    /// Smallest bet that counts as all-in.
    pub all_in_bet: f64,
}

impl Default for RuleThresholds {
    fn default() -> Self {
        Self {
            middle_low: 0.2,
            middle_high: 0.8,
            small_bet: 0.2,
            dominant: 0.95,
            strong_cut: 0.8,
            strong_mass: 0.1,
            all_in_bet: 2.7,
        }
    }
}

/// Fraction of qualifying probes on which the policy followed the rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Compliance {
    pub compliance: f64,
    pub probes: usize,
}

/// All-in rule compliance under both readings of "the opponent's
/// distribution": conditioned on player 1's card, and the plain marginal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AllInCompliance {
    pub conditional: Option<Compliance>,
    pub unconditional: Option<Compliance>,
}

const SLACK: f64 = 1e-9;

/// Conditional distribution of the opponent's card given player 1 holds
/// index `c`, or `None` when player 1 never holds it.
fn opponent_given(deal: &[f64], d: usize, c: usize) -> Option<Vec<f64>> {
    let row = &deal[c * d..(c + 1) * d];
    let m: f64 = row.iter().sum();
    (m > 0.0).then(|| row.iter().map(|p| p / m).collect())
}

/// Share of the opponent's conditional mass on cards below index `c`.
fn beat_fraction(cond: &[f64], c: usize) -> f64 {
    cond[..c].iter().sum()
}

struct Tally {
    hits: usize,
    probes: usize,
}

impl Tally {
    fn new() -> Self {
        Self { hits: 0, probes: 0 }
    }

    fn record(&mut self, ok: bool) {
        self.probes += 1;
        self.hits += usize::from(ok);
    }

    fn finish(&self) -> Option<Compliance> {
        (self.probes > 0).then(|| Compliance {
            compliance: self.hits as f64 / self.probes as f64,
            probes: self.probes,
        })
    }
}

/// Measures the 80-20 rule over every (game, card) whose card beats
/// between 20% and 80% of the opponent's card-conditional distribution.
pub fn check_80_20<P: BetPolicy + ?Sized>(
    policy: &P,
    probes: &[GameRecord],
    cfg: &GameConfig,
    t: &RuleThresholds,
) -> Result<Compliance> {
    let d = cfg.deck_size;
    let mut tally = Tally::new();
    for rec in probes {
        for c in 0..d {
            let Some(cond) = opponent_given(&rec.deal, d, c) else { continue };
            let w = beat_fraction(&cond, c);
            if w >= t.middle_low - SLACK && w <= t.middle_high + SLACK {
                tally.record(policy.bet(rec, c + 1, cfg)? <= t.small_bet + SLACK);
            }
        }
    }
    tally.finish().ok_or(Error::NoProbes)
}

/// Measures the all-in rule under both readings of the opponent's
/// distribution.
pub fn check_all_in<P: BetPolicy + ?Sized>(
    policy: &P,
    probes: &[GameRecord],
    cfg: &GameConfig,
    t: &RuleThresholds,
) -> Result<AllInCompliance> {
    let d = cfg.deck_size;
    let mut conditional = Tally::new();
    let mut unconditional = Tally::new();
    for rec in probes {
        let pdf1 = &rec.features.pdf1;
        let pdf2 = &rec.features.pdf2;
        // opponent card j is strong if it beats enough of player 1's
        // distribution given that the opponent holds j
        let strong_cond: Vec<bool> = (0..d)
            .map(|j| {
                let m2 = pdf2[j];
                m2 > 0.0 && (0..j).map(|i| rec.deal[i * d + j]).sum::<f64>() / m2 >= t.strong_cut - SLACK
            })
            .collect();
        let strong_marg: Vec<bool> = (0..d)
            .map(|j| pdf1[..j].iter().sum::<f64>() >= t.strong_cut - SLACK)
            .collect();
        for c in 0..d {
            let Some(cond) = opponent_given(&rec.deal, d, c) else { continue };
            let mut bet = None;
            let mut bet_for = |rec: &GameRecord| -> Result<f64> {
                if bet.is_none() {
                    bet = Some(policy.bet(rec, c + 1, cfg)?);
                }
                Ok(bet.unwrap())
            };

            let w = beat_fraction(&cond, c);
            let strong: f64 = (0..d).filter(|&j| strong_cond[j]).map(|j| cond[j]).sum();
            if w >= t.dominant - SLACK && strong >= t.strong_mass - SLACK {
                conditional.record(bet_for(rec)? >= t.all_in_bet - SLACK);
            }

            let w = pdf2[..c].iter().sum::<f64>();
            let strong: f64 = (0..d).filter(|&j| strong_marg[j]).map(|j| pdf2[j]).sum();
            if w >= t.dominant - SLACK && strong >= t.strong_mass - SLACK {
                unconditional.record(bet_for(rec)? >= t.all_in_bet - SLACK);
            }
        }
    }
    let out = AllInCompliance {
        conditional: conditional.finish(),
        unconditional: unconditional.finish(),
    };
    if out.conditional.is_none() && out.unconditional.is_none() {
        return Err(Error::NoProbes);
    }
    Ok(out)
}
