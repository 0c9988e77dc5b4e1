//! Database of solved games, its on-disk form, and the derived learning
//! examples.
//!
//! A dataset file is line-delimited JSON. The first line is
//! `{"manifest": {...}}`; every following line is one [`GameRecord`] with the
//! fields `id, seed, deal[100], cdf1[10], cdf2[10], pdf1[10], pdf2[10],
//! strategy[310], call_strategy[310], value, nash_conv` (lengths shown for the default game).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{GameConfig, TOLERANCE};
use crate::deal::{make_joint, marginals, sample_simplex, MarginalFeatures};
use crate::equilibrium::{nash_conv, solve, DEFAULT_MAX_ITERATIONS};
use crate::error::{Error, Result};
use crate::game::{JointDeal, StrategyP1, StrategyP2};
use crate::repr::{CardFeature, OutputKind, RepresentationId};
use crate::seed::{derive_seed, rng_from_seed, Stream, RNG_NAME};

pub const FORMAT_NAME: &str = "onestreet-dataset";
pub const FORMAT_VERSION: u32 = 1;
/// Default number of games for desk-scale experiments.
pub const DEFAULT_COUNT: usize = 2_000;

/// One solved game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameRecord {
    pub id: usize,
    pub seed: u64,
    /// Joint deal, row-major (player 1 card major).
    pub deal: Vec<f64>,
    #[serde(flatten)]
    pub features: MarginalFeatures,
    /// Equilibrium player-1 strategy, hand-major.
    pub strategy: Vec<f64>,
    /// Equilibrium player-2 call probabilities, hand-major.
    pub call_strategy: Vec<f64>,
    pub value: f64,
    pub nash_conv: f64,
}

impl GameRecord {
    pub fn joint(&self, cfg: &GameConfig) -> Result<JointDeal> {
        JointDeal::new(cfg.deck_size, self.deal.clone())
    }

    pub fn strategy_p1(&self, cfg: &GameConfig) -> Result<StrategyP1> {
        StrategyP1::new(cfg.deck_size, cfg.bet_steps, self.strategy.clone())
    }

    /// Hand `h`'s (zero-based) bet distribution.
    pub fn hand_block(&self, h: usize, cfg: &GameConfig) -> &[f64] {
        &self.strategy[h * cfg.bet_steps..(h + 1) * cfg.bet_steps]
    }

    /// Checks shapes, distribution invariants and the stored certificate.
    pub fn validate(&self, cfg: &GameConfig, epsilon: f64) -> Result<()> {
        let deal = self.joint(cfg)?;
        self.features.validate()?;
        let fresh = marginals(&deal);
        let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= TOLERANCE);
        if !close(&fresh.cdf1, &self.features.cdf1) || !close(&fresh.cdf2, &self.features.cdf2) {
            return Err(Error::Format(format!("record {}: features do not match deal", self.id)));
        }
        self.strategy_p1(cfg)?;
        self.strategy_p2(cfg)?;
        if !(self.nash_conv >= 0.0 && self.nash_conv <= epsilon) {
            return Err(Error::Format(format!(
                "record {}: nash_conv {} exceeds epsilon {epsilon}",
                self.id, self.nash_conv
            )));
        }
        if self.value.abs() > cfg.max_payoff() + TOLERANCE {
            return Err(Error::Format(format!("record {}: value {} out of range", self.id, self.value)));
        }
        Ok(())
    }

    pub fn strategy_p2(&self, cfg: &GameConfig) -> Result<StrategyP2> {
        StrategyP2::new(cfg.deck_size, cfg.bet_steps, self.call_strategy.clone())
    }

    /// Recomputes NashConv of the stored profile with the exact
    /// best-response oracles.
    pub fn reverify(&self, cfg: &GameConfig) -> Result<f64> {
        nash_conv(&self.joint(cfg)?, &self.strategy_p1(cfg)?, &self.strategy_p2(cfg)?, cfg)
    }
}

/// Metadata line at the top of a dataset file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format: String,
    pub version: u32,
    pub config: GameConfig,
    pub count: usize,
    pub master_seed: u64,
    pub epsilon: f64,
    pub max_iterations: usize,
    pub discarded_degenerate: usize,
    pub retried: usize,
    pub rng: String,
}

#[derive(Serialize, Deserialize)]
struct ManifestLine {
    manifest: DatasetManifest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub manifest: DatasetManifest,
    pub records: Vec<GameRecord>,
}

/// Knobs for [`build_dataset`] beyond count, seed and epsilon.
#[derive(Debug, Clone, Copy)]
pub struct BuildOptions {
    pub max_iterations: usize,
    /// Worker threads; 0 means all available cores.
    pub jobs: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            max_iterations: DEFAULT_MAX_ITERATIONS,
            jobs: 0,
        }
    }
}

struct Generated {
    record: GameRecord,
    discarded: usize,
    retried: bool,
}

fn generate_one(
    id: usize,
    master_seed: u64,
    epsilon: f64,
    cfg: &GameConfig,
    max_iterations: usize,
) -> Result<Generated> {
    let seed = derive_seed(master_seed, Stream::Game, &[id as u64]);
    let mut rng = rng_from_seed(seed);
    let mut discarded = 0;
    let deal = loop {
        let x1 = sample_simplex(cfg.deck_size, &mut rng);
        let x2 = sample_simplex(cfg.deck_size, &mut rng);
        match make_joint(x1.as_slice(), x2.as_slice()) {
            Ok(deal) => break deal,
            Err(Error::DegenerateDeal) => discarded += 1,
            Err(e) => return Err(e),
        }
    };
    let mut retried = false;
    let result = match solve(&deal, cfg, epsilon, max_iterations) {
        Ok(r) => r,
        Err(Error::ConvergenceFailure { .. }) => {
            retried = true;
            match solve(&deal, cfg, epsilon, max_iterations * 10) {
                Ok(r) => r,
                Err(Error::ConvergenceFailure { nash_conv, .. }) => {
                    return Err(Error::GenerationFailed { id, seed, nash_conv })
                }
                Err(e) => return Err(e),
            }
        }
        Err(e) => return Err(e),
    };
    Ok(Generated {
        record: GameRecord {
            id,
            seed,
            features: marginals(&deal),
            deal: deal.as_slice().to_vec(),
            strategy: result.s1.into_vec(),
            call_strategy: result.s2.as_slice().to_vec(),
            value: result.value,
            nash_conv: result.nash_conv,
        },
        discarded,
        retried,
    })
}

/// Samples and solves `count` games. Output depends only on the arguments,
/// not on the number of worker threads.
pub fn build_dataset(
    count: usize,
    master_seed: u64,
    epsilon: f64,
    cfg: &GameConfig,
    options: BuildOptions,
) -> Result<Dataset> {
    if count == 0 {
        return Err(Error::InvalidConfig("dataset count must be at least 1".into()));
    }
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let generated: Vec<Result<Generated>> = pool.install(|| {
        (0..count)
            .into_par_iter()
            .map(|id| generate_one(id, master_seed, epsilon, cfg, options.max_iterations))
            .collect()
    });
    let mut records = Vec::with_capacity(count);
    let mut discarded = 0;
    let mut retried = 0;
    for g in generated {
        let g = g?;
        discarded += g.discarded;
        retried += usize::from(g.retried);
        records.push(g.record);
    }
    Ok(Dataset {
        manifest: DatasetManifest {
            format: FORMAT_NAME.into(),
            version: FORMAT_VERSION,
            config: *cfg,
            count,
            master_seed,
            epsilon,
            max_iterations: options.max_iterations,
            discarded_degenerate: discarded,
            retried,
            rng: RNG_NAME.into(),
        },
        records,
    })
}

impl Dataset {
    pub fn config(&self) -> &GameConfig {
        &self.manifest.config
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer(&mut w, &ManifestLine { manifest: self.manifest.clone() })?;
        w.write_all(b"\n")?;
        for r in &self.records {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        let mut lines = BufReader::new(r).lines();
        let first = lines
            .next()
            .ok_or_else(|| Error::Format("empty dataset file".into()))??;
        let ManifestLine { manifest } = serde_json::from_str(&first)
            .map_err(|e| Error::Format(format!("bad manifest line: {e}")))?;
        if manifest.format != FORMAT_NAME || manifest.version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported dataset format {} v{}",
                manifest.format, manifest.version
            )));
        }
        let mut records = Vec::with_capacity(manifest.count);
        for (n, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: GameRecord = serde_json::from_str(&line)
                .map_err(|e| Error::Format(format!("record line {}: {e}", n + 2)))?;
            records.push(rec);
        }
        if records.len() != manifest.count {
            return Err(Error::Format(format!(
                "manifest declares {} records, file has {}",
                manifest.count,
                records.len()
            )));
        }
        Ok(Self { manifest, records })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_to(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(File::open(path)?)
    }

    /// Validates every record against the manifest's config and epsilon.
    pub fn validate(&self) -> Result<()> {
        for r in &self.records {
            r.validate(self.config(), self.manifest.epsilon)?;
        }
        Ok(())
    }

    pub fn split(&self, train_fraction: f64, seed: u64) -> Result<(Vec<&GameRecord>, Vec<&GameRecord>)> {
        split(&self.records, train_fraction, seed)
    }
}

/// A learning target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    /// Every hand's bet distribution, hand-major.
    Full(Vec<f64>),
    /// One hand's bet distribution.
    Hand(Vec<f64>),
    /// A bet size in dollars.
    Bet(f64),
}

impl Output {
    pub fn kind(&self) -> OutputKind {
        match self {
            Output::Full(_) => OutputKind::Full,
            Output::Hand(_) => OutputKind::Hand,
            Output::Bet(_) => OutputKind::Bet,
        }
    }

    pub fn as_vector(&self) -> Option<&[f64]> {
        match self {
            Output::Full(v) | Output::Hand(v) => Some(v),
            Output::Bet(_) => None,
        }
    }

    /// Expected bet in dollars for hand index `h`; `h` is ignored for
    /// single-hand outputs.
    pub fn expected_bet(&self, h: usize, cfg: &GameConfig) -> f64 {
        let block = match self {
            Output::Bet(x) => return *x,
            Output::Hand(v) => &v[..],
            Output::Full(v) => &v[h * cfg.bet_steps..(h + 1) * cfg.bet_steps],
        };
        block.iter().enumerate().map(|(b, p)| p * cfg.bet_amount(b)).sum()
    }

    /// Flat numeric form for CSV export.
    pub fn values(&self) -> Vec<f64> {
        match self {
            Output::Full(v) | Output::Hand(v) => v.clone(),
            Output::Bet(x) => vec![*x],
        }
    }
}

/// One input/target pair derived from a record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub game_id: usize,
    /// Player 1's card for per-card representations.
    pub card: Option<usize>,
    pub x: Vec<f64>,
    pub y: Output,
}

/// Feature vector of `record` for `rep`, with `card` (rank) for per-card
/// representations.
pub fn features_for(
    features: &MarginalFeatures,
    rep: RepresentationId,
    card: Option<usize>,
) -> Result<Vec<f64>> {
    let mut x = if rep.uses_cdf() {
        features.cdf_input()
    } else {
        features.pdf_input()
    };
    match (rep.card_feature(), card) {
        (None, None) => {}
        (Some(CardFeature::Number), Some(c)) => x.push(c as f64),
        (Some(CardFeature::Percentile), Some(c)) => x.push(features.cdf1[c - 1]),
        _ => {
            return Err(Error::RepresentationError(format!(
                "{rep} {} a card",
                if rep.is_per_card() { "needs" } else { "takes no" }
            )))
        }
    }
    Ok(x)
}

/// Draws one bet size (dollars) from a hand's bet distribution.
fn sample_bet(block: &[f64], seed: u64, cfg: &GameConfig) -> f64 {
    let mut rng = rng_from_seed(seed);
    let b = WeightedIndex::new(block)
        .map(|w| w.sample(&mut rng))
        .unwrap_or(0);
    cfg.bet_amount(b)
}

/// Learning examples for one record: one for R1/R2, ten (one per player-1
/// card) otherwise. Sampled bets use a seed derived from
/// `(sample_seed, game id, card)`.
pub fn extract(
    record: &GameRecord,
    rep: RepresentationId,
    cfg: &GameConfig,
    sample_seed: u64,
) -> Result<Vec<LabeledExample>> {
    if rep.output_kind() == OutputKind::Full {
        return Ok(vec![LabeledExample {
            game_id: record.id,
            card: None,
            x: features_for(&record.features, rep, None)?,
            y: Output::Full(record.strategy.clone()),
        }]);
    }
    (1..=cfg.deck_size)
        .map(|c| {
            let block = record.hand_block(c - 1, cfg);
            let y = match rep.output_kind() {
                OutputKind::Hand => Output::Hand(block.to_vec()),
                _ => {
                    let seed = derive_seed(sample_seed, Stream::BetSample, &[record.id as u64, c as u64]);
                    Output::Bet(sample_bet(block, seed, cfg))
                }
            };
            Ok(LabeledExample {
                game_id: record.id,
                card: Some(c),
                x: features_for(&record.features, rep, Some(c))?,
                y,
            })
        })
        .collect()
}

/// Examples for a set of records, in record order.
pub fn extract_all<'a>(
    records: impl IntoIterator<Item = &'a GameRecord>,
    rep: RepresentationId,
    cfg: &GameConfig,
    sample_seed: u64,
) -> Result<Vec<LabeledExample>> {
    let mut out = Vec::new();
    for r in records {
        out.extend(extract(r, rep, cfg, sample_seed)?);
    }
    Ok(out)
}

/// Seeded game-level split; every example of a game lands on one side.
pub fn split(
    records: &[GameRecord],
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<&GameRecord>, Vec<&GameRecord>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::SplitError(format!(
            "train fraction must be in (0, 1), got {train_fraction}"
        )));
    }
    let n = records.len();
    let n_train = (n as f64 * train_fraction).round() as usize;
    if n_train == 0 || n_train == n {
        return Err(Error::SplitError(format!(
            "{n} games at fraction {train_fraction} leaves one side empty"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng_from_seed(derive_seed(seed, Stream::Split, &[])));
    let mut train: Vec<&GameRecord> = order[..n_train].iter().map(|&i| &records[i]).collect();
    let mut test: Vec<&GameRecord> = order[n_train..].iter().map(|&i| &records[i]).collect();
    train.sort_by_key(|r| r.id);
    test.sort_by_key(|r| r.id);
    Ok((train, test))
}

/// Writes examples as CSV with columns `game_id, card, x0.., y0..`.
pub fn write_examples_csv<W: Write>(w: W, examples: &[LabeledExample]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    if let Some(first) = examples.first() {
        let mut header = vec!["game_id".to_string(), "card".to_string()];
        header.extend((0..first.x.len()).map(|i| format!("x{i}")));
        header.extend((0..first.y.values().len()).map(|i| format!("y{i}")));
        out.write_record(&header)?;
    }
    for e in examples {
        let mut row = vec![e.game_id.to_string(), e.card.map_or(String::new(), |c| c.to_string())];
        row.extend(e.x.iter().map(|v| v.to_string()));
        row.extend(e.y.values().iter().map(|v| v.to_string()));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}
