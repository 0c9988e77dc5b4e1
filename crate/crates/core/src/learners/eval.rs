use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{tree_fit, DecisionTree, Predictor, TreeParams};
use crate::config::GameConfig;
use crate::dataset::{LabeledExample, Output};
use crate::error::{Error, Result};
use crate::metrics::{emd_1d, output_distance};
use crate::repr::RepresentationId;

/// Normalized error of one prediction: strategy EMD for full strategies,
/// bet-distribution EMD for one hand, `|ŷ − y| / stack` for bet sizes.
pub fn output_error(pred: &Output, truth: &Output, cfg: &GameConfig) -> Result<f64> {
    Ok(match (pred, truth) {
        (Output::Full(p), Output::Full(t)) => output_distance(t, p, cfg.bet_steps)?.value(),
        (Output::Hand(p), Output::Hand(t)) => emd_1d(t, p)?.value(),
        (Output::Bet(p), Output::Bet(t)) => ((p - t).abs() / cfg.stack).min(1.0),
        _ => {
            return Err(Error::RepresentationError(
                "prediction and target have different shapes".into(),
            ))
        }
    })
}

/// Mean [`output_error`] of `model` over `test`.
pub fn evaluate<P: Predictor + ?Sized>(
    model: &P,
    test: &[LabeledExample],
    cfg: &GameConfig,
) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::EvalError("empty test set".into()));
    }
    let mut total = 0.0;
    for e in test {
        total += output_error(&model.predict(&e.x)?, &e.y, cfg)?;
    }
    Ok(total / test.len() as f64)
}

/// One line of an error report: a model of some size and its errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub rep: RepresentationId,
    pub model: String,
    /// Depth for trees, `k` for nearest neighbors.
    pub param: usize,
    pub train_error: f64,
    pub test_error: f64,
    /// Tree node count; 0 for nearest neighbors.
    pub node_count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
}

impl EvalReport {
    pub fn extend(&mut self, other: EvalReport) {
        self.rows.extend(other.rows);
    }

    pub fn rows_for(&self, rep: RepresentationId) -> impl Iterator<Item = &EvalRow> {
        self.rows.iter().filter(move |r| r.rep == rep)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["rep", "model", "param", "train_error", "test_error", "node_count"])?;
        for r in &self.rows {
            out.write_record([
                r.rep.to_string(),
                r.model.clone(),
                r.param.to_string(),
                r.train_error.to_string(),
                r.test_error.to_string(),
                r.node_count.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Fits one tree at the deepest requested depth and reports every
/// requested depth by cutting it back ([`DecisionTree::truncate`]).
pub fn depth_sweep(
    train: &[LabeledExample],
    test: &[LabeledExample],
    rep: RepresentationId,
    cfg: &GameConfig,
    depths: &[usize],
    min_leaf: usize,
) -> Result<(EvalReport, DecisionTree)> {
    let max_depth = depths
        .iter()
        .copied()
        .max()
        .ok_or_else(|| Error::EvalError("no depths requested".into()))?;
    let full = tree_fit(train, rep, cfg, TreeParams { max_depth, min_leaf })?;
    let mut rows = Vec::with_capacity(depths.len());
    for &d in depths {
        let tree = full.truncate(d);
        rows.push(EvalRow {
            rep,
            model: "tree".into(),
            param: d,
            train_error: evaluate(&tree, train, cfg)?,
            test_error: evaluate(&tree, test, cfg)?,
            node_count: tree.node_count(),
        });
    }
    Ok((EvalReport { rows }, full))
}
