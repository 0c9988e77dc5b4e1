//! Nearest-neighbor and decision-tree predictors over solved games, and the
//! error measures used to compare them.

mod eval;
mod knn;
mod tree;

use serde::{Deserialize, Serialize};

pub use eval::{depth_sweep, evaluate, output_error, EvalReport, EvalRow};
pub use knn::KnnModel;
pub use tree::{tree_fit, DecisionTree, Node, TreeParams};

use crate::config::GameConfig;
use crate::dataset::{LabeledExample, Output};
use crate::error::{Error, Result};
use crate::repr::{OutputKind, RepresentationId};

/// Anything that maps a feature vector of one representation to an output.
pub trait Predictor {
    fn rep(&self) -> RepresentationId;
    fn predict(&self, x: &[f64]) -> Result<Output>;
}

/// A trained model as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    Knn(KnnModel),
    Tree(DecisionTree),
}

impl Model {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Model::Knn(_) => "knn",
            Model::Tree(_) => "tree",
        }
    }

    pub fn config(&self) -> &GameConfig {
        match self {
            Model::Knn(m) => &m.config,
            Model::Tree(t) => &t.config,
        }
    }
}

impl Predictor for Model {
    fn rep(&self) -> RepresentationId {
        match self {
            Model::Knn(m) => m.rep(),
            Model::Tree(t) => t.rep(),
        }
    }

    fn predict(&self, x: &[f64]) -> Result<Output> {
        match self {
            Model::Knn(m) => m.predict(x),
            Model::Tree(t) => t.predict(x),
        }
    }
}

/// Checks that every example has the feature length and output kind of
/// `rep`.
pub(crate) fn check_examples(
    examples: &[LabeledExample],
    rep: RepresentationId,
    cfg: &GameConfig,
) -> Result<()> {
    let len = rep.feature_len(cfg.deck_size);
    let kind = rep.output_kind();
    let out_len = match kind {
        OutputKind::Full => cfg.strategy_len(),
        OutputKind::Hand => cfg.bet_steps,
        OutputKind::Bet => 1,
    };
    for e in examples {
        if e.x.len() != len || e.y.kind() != kind || e.y.values().len() != out_len {
            return Err(Error::RepresentationError(format!(
                "example from game {} does not match {rep}",
                e.game_id
            )));
        }
    }
    Ok(())
}

/// Componentwise mean of vector outputs, renormalized per `block` entries.
pub(crate) fn mean_vector<'a>(vectors: impl Iterator<Item = &'a [f64]>, block: usize) -> Vec<f64> {
    let mut acc: Vec<f64> = Vec::new();
    let mut n = 0usize;
    for v in vectors {
        if acc.is_empty() {
            acc = vec![0.0; v.len()];
        }
        acc.iter_mut().zip(v).for_each(|(a, x)| *a += x);
        n += 1;
    }
    for chunk in acc.chunks_mut(block) {
        let s: f64 = chunk.iter().sum();
        if s > 0.0 {
            chunk.iter_mut().for_each(|x| *x /= s);
        }
    }
    debug_assert!(n > 0);
    acc
}
