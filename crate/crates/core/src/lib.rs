//! Solve a one-street poker game for arbitrary private-information
//! distributions, build databases of solved instances, and learn compact
//! strategies (nearest neighbors and decision trees) over them with
//! earth mover's distances.

pub mod config;
pub mod dataset;
pub mod deal;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod learners;
pub mod metrics;
pub mod repr;
pub mod rules;
pub mod seed;

pub use config::GameConfig;
pub use dataset::{Dataset, GameRecord, LabeledExample, Output};
pub use deal::{MarginalFeatures, SimplexPoint};
pub use equilibrium::EquilibriumResult;
pub use error::{Error, Result};
pub use game::{BetIndex, Card, JointDeal, Response, StrategyP1, StrategyP2};
pub use learners::{DecisionTree, KnnModel, Model, Predictor};
pub use metrics::NormalizedDistance;
pub use repr::RepresentationId;
pub use rules::StrategyRule;
