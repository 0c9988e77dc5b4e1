use serde::{Deserialize, Serialize};

use super::{check_examples, mean_vector, Predictor};
use crate::config::GameConfig;
use crate::dataset::{LabeledExample, Output};
use crate::error::{Error, Result};
use crate::metrics::{feature_distance, FeatureWeights};
use crate::repr::RepresentationId;

/// Memorized examples queried by exhaustive scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub rep: RepresentationId,
    pub k: usize,
    pub config: GameConfig,
    pub weights: FeatureWeights,
    pub examples: Vec<LabeledExample>,
}

impl KnnModel {
    pub fn new(
        rep: RepresentationId,
        k: usize,
        config: GameConfig,
        examples: Vec<LabeledExample>,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        check_examples(&examples, rep, &config)?;
        Ok(Self {
            rep,
            k,
            config,
            weights: FeatureWeights::default(),
            examples,
        })
    }

    pub fn with_weights(mut self, weights: FeatureWeights) -> Self {
        self.weights = weights;
        self
    }

    /// Indices of the `k` nearest stored examples, nearest first. Ties go to
    /// the lower game id, then the lower card.
    pub fn neighbors(&self, x: &[f64]) -> Result<Vec<(usize, f64)>> {
        if self.examples.is_empty() {
            return Err(Error::EmptyModel);
        }
        let mut scored = self
            .examples
            .iter()
            .enumerate()
            .map(|(i, e)| {
                feature_distance(x, &e.x, self.rep, self.config.deck_size, self.weights)
                    .map(|d| (i, d.value()))
            })
            .collect::<Result<Vec<_>>>()?;
        let key = |&(i, d): &(usize, f64)| (d, self.examples[i].game_id, self.examples[i].card);
        let k = self.k.min(scored.len());
        let cmp = |a: &(usize, f64), b: &(usize, f64)| key(a).partial_cmp(&key(b)).unwrap();
        if k < scored.len() {
            scored.select_nth_unstable_by(k - 1, cmp);
            scored.truncate(k);
        }
        scored.sort_by(cmp);
        Ok(scored)
    }
}

impl Predictor for KnnModel {
    fn rep(&self) -> RepresentationId {
        self.rep
    }

    fn predict(&self, x: &[f64]) -> Result<Output> {
        let near = self.neighbors(x)?;
        if near.len() == 1 {
            return Ok(self.examples[near[0].0].y.clone());
        }
        let outputs = near.iter().map(|&(i, _)| &self.examples[i].y);
        Ok(match &self.examples[near[0].0].y {
            Output::Bet(_) => {
                let bets: Vec<f64> = outputs.map(|y| y.expected_bet(0, &self.config)).collect();
                Output::Bet(bets.iter().sum::<f64>() / bets.len() as f64)
            }
            Output::Hand(_) => Output::Hand(mean_vector(
                outputs.filter_map(Output::as_vector),
                self.config.bet_steps,
            )),
            Output::Full(_) => Output::Full(mean_vector(
                outputs.filter_map(Output::as_vector),
                self.config.bet_steps,
            )),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cdf_features(shift: f64, card: f64) -> Vec<f64> {
        let mut x: Vec<f64> = (1..=10).map(|k| (k as f64 / 10.0 + shift).min(1.0)).collect();
        x.extend((1..=10).map(|k| k as f64 / 10.0));
        x.push(card);
        x
    }

    fn bet_example(game_id: usize, shift: f64, bet: f64) -> LabeledExample {
        LabeledExample {
            game_id,
            card: Some(1),
            x: cdf_features(shift, 1.0),
            y: Output::Bet(bet),
        }
    }

    #[test]
    fn exact_match_returns_stored_output() {
        let cfg = GameConfig::default();
        let ex = vec![bet_example(0, 0.0, 0.4), bet_example(1, 0.05, 2.0)];
        let m = KnnModel::new(RepresentationId::R7, 1, cfg, ex.clone()).unwrap();
        assert_eq!(m.predict(&ex[1].x).unwrap(), Output::Bet(2.0));
        assert_eq!(m.predict(&ex[0].x).unwrap(), Output::Bet(0.4));
    }

    #[test]
    fn equidistant_pair_averages() {
        let cfg = GameConfig::default();
        let mut a = bet_example(0, 0.0, 0.0);
        let mut b = bet_example(1, 0.0, 3.0);
        a.x[20] = 1.0;
        b.x[20] = 3.0;
        let m = KnnModel::new(RepresentationId::R7, 2, cfg, vec![a.clone(), b]).unwrap();
        let mut q = a.x.clone();
        q[20] = 2.0;
        assert_eq!(m.predict(&q).unwrap(), Output::Bet(1.5));
    }

    #[test]
    fn ties_prefer_lower_game_id() {
        let cfg = GameConfig::default();
        let ex = vec![bet_example(5, 0.0, 1.0), bet_example(2, 0.0, 2.0)];
        let m = KnnModel::new(RepresentationId::R7, 1, cfg, ex).unwrap();
        assert_eq!(m.predict(&cdf_features(0.0, 1.0)).unwrap(), Output::Bet(2.0));
    }

    #[test]
    fn empty_model_is_an_error() {
        let m = KnnModel::new(RepresentationId::R7, 1, GameConfig::default(), vec![]).unwrap();
        assert!(matches!(m.predict(&cdf_features(0.0, 1.0)), Err(Error::EmptyModel)));
        assert!(KnnModel::new(RepresentationId::R7, 0, GameConfig::default(), vec![]).is_err());
    }

    #[test]
    fn vector_average_stays_a_distribution() {
        let cfg = GameConfig::default();
        let mut p = vec![0.0; 31];
        p[0] = 1.0;
        let mut q = vec![0.0; 31];
        q[30] = 0.3;
        q[4] = 0.7;
        let ex: Vec<LabeledExample> = [p, q]
            .into_iter()
            .enumerate()
            .map(|(i, y)| LabeledExample {
                game_id: i,
                card: Some(1),
                x: cdf_features(0.0, 1.0),
                y: Output::Hand(y),
            })
            .collect();
        let m = KnnModel::new(RepresentationId::R3, 2, cfg, ex).unwrap();
        let y = m.predict(&cdf_features(0.0, 1.0)).unwrap();
        let v = y.as_vector().unwrap();
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((v[0] - 0.5).abs() < 1e-12 && (v[30] - 0.15).abs() < 1e-12);
    }
}
