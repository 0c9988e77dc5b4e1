//! Greedy CART regression trees.
//!
//! Scalar targets split on within-node squared error. Vector targets (bet
//! distributions) split on the summed EMD of each example to the node's
//! mean distribution. In one dimension EMD is the L1 distance between cdfs,
//! so the node cost is a sum over cdf coordinates of absolute deviations
//! from the coordinate mean; each candidate threshold is scored in
//! `O(K log n)` with one Fenwick tree per coordinate.

use serde::{Deserialize, Serialize};

use super::{check_examples, mean_vector, Predictor};
use crate::config::GameConfig;
use crate::dataset::{LabeledExample, Output};
use crate::error::{Error, Result};
use crate::repr::{OutputKind, RepresentationId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: 8,
            min_leaf: 5,
        }
    }
}

/// A tree node. Internal nodes keep the prediction and error they would
/// have as leaves so a tree can be cut back to any shallower depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    Leaf {
        prediction: Output,
        samples: usize,
        /// Mean training error of the node's examples.
        error: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        prediction: Output,
        samples: usize,
        error: f64,
        /// Taken when `x[feature] <= threshold`.
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    pub fn samples(&self) -> usize {
        match self {
            Node::Leaf { samples, .. } | Node::Split { samples, .. } => *samples,
        }
    }

    pub fn error(&self) -> f64 {
        match self {
            Node::Leaf { error, .. } | Node::Split { error, .. } => *error,
        }
    }

    pub fn prediction(&self) -> &Output {
        match self {
            Node::Leaf { prediction, .. } | Node::Split { prediction, .. } => prediction,
        }
    }

    fn count(&self) -> usize {
        match self {
            Node::Leaf { .. } => 1,
            Node::Split { left, right, .. } => 1 + left.count() + right.count(),
        }
    }

    fn leaves(&self) -> usize {
        match self {
            Node::Leaf { .. } => 1,
            Node::Split { left, right, .. } => left.leaves() + right.leaves(),
        }
    }

    fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    fn truncated(&self, depth: usize) -> Node {
        match self {
            Node::Split {
                prediction,
                samples,
                error,
                ..
            } if depth == 0 => Node::Leaf {
                prediction: prediction.clone(),
                samples: *samples,
                error: *error,
            },
            Node::Split {
                feature,
                threshold,
                prediction,
                samples,
                error,
                left,
                right,
            } => Node::Split {
                feature: *feature,
                threshold: *threshold,
                prediction: prediction.clone(),
                samples: *samples,
                error: *error,
                left: Box::new(left.truncated(depth - 1)),
                right: Box::new(right.truncated(depth - 1)),
            },
            leaf => leaf.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub rep: RepresentationId,
    pub params: TreeParams,
    pub config: GameConfig,
    pub root: Node,
}

impl DecisionTree {
    pub fn node_count(&self) -> usize {
        self.root.count()
    }

    pub fn leaf_count(&self) -> usize {
        self.root.leaves()
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    /// The tree that fitting with `max_depth = depth` would have produced:
    /// split choices never depend on the depth limit, so cutting a deeper
    /// tree is equivalent to refitting.
    pub fn truncate(&self, depth: usize) -> DecisionTree {
        DecisionTree {
            rep: self.rep,
            params: TreeParams {
                max_depth: depth.min(self.params.max_depth),
                ..self.params
            },
            config: self.config,
            root: self.root.truncated(depth),
        }
    }

    /// Leaf reached by `x`.
    pub fn leaf_for(&self, x: &[f64]) -> &Node {
        let mut node = &self.root;
        while let Node::Split {
            feature,
            threshold,
            left,
            right,
            ..
        } = node
        {
            node = if x[*feature] <= *threshold { left } else { right };
        }
        node
    }
}

impl Predictor for DecisionTree {
    fn rep(&self) -> RepresentationId {
        self.rep
    }

    fn predict(&self, x: &[f64]) -> Result<Output> {
        let want = self.rep.feature_len(self.config.deck_size);
        if x.len() != want {
            return Err(Error::RepresentationError(format!(
                "{} expects {want} features, got {}",
                self.rep,
                x.len()
            )));
        }
        Ok(self.leaf_for(x).prediction().clone())
    }
}

/// Fenwick tree update: one more element with `value` at rank `pos`.
fn fenwick_add(count: &mut [f64], sum: &mut [f64], pos: usize, value: f64) {
    let mut i = pos + 1;
    while i < count.len() {
        count[i] += 1.0;
        sum[i] += value;
        i += i & i.wrapping_neg();
    }
}

/// Count and sum of elements with rank in `[0, end)`.
fn fenwick_prefix(count: &[f64], sum: &[f64], end: usize) -> (f64, f64) {
    let (mut c, mut s) = (0.0, 0.0);
    let mut i = end;
    while i > 0 {
        c += count[i];
        s += sum[i];
        i &= i - 1;
    }
    (c, s)
}

/// Training targets in the form the split search needs.
enum Targets {
    /// Bet sizes, with the error scale `1 / stack`.
    Scalar { y: Vec<f64>, scale: f64 },
    /// Per-example cdf coordinates (`k` per example; the last cdf value of
    /// each block is always 1 and is left out) and the EMD normalizer.
    Vector { cdf: Vec<f64>, k: usize, scale: f64 },
}

struct Builder<'a> {
    examples: &'a [LabeledExample],
    targets: Targets,
    params: TreeParams,
    features: usize,
    bet_steps: usize,
}

/// Best split found for one node.
struct Candidate {
    feature: usize,
    threshold: f64,
    cost: f64,
}

const IMPROVEMENT: f64 = 1e-12;

/// Threshold between adjacent distinct values `lo < hi` that keeps `lo` on
/// the left and `hi` on the right, even when they are one ulp apart.
fn midpoint(lo: f64, hi: f64) -> f64 {
    let m = 0.5 * (lo + hi);
    if m < hi {
        m
    } else {
        lo
    }
}

impl Builder<'_> {
    fn prediction(&self, idx: &[usize]) -> Output {
        match &self.targets {
            Targets::Scalar { y, .. } => {
                Output::Bet(idx.iter().map(|&i| y[i]).sum::<f64>() / idx.len() as f64)
            }
            Targets::Vector { .. } => {
                let vs = idx.iter().filter_map(|&i| self.examples[i].y.as_vector());
                match &self.examples[idx[0]].y {
                    Output::Full(_) => Output::Full(mean_vector(vs, self.bet_steps)),
                    _ => Output::Hand(mean_vector(vs, self.bet_steps)),
                }
            }
        }
    }

    /// Summed (unnormalized by count) training error of `idx` around its
    /// own representative.
    fn error_sum(&self, idx: &[usize]) -> f64 {
        match &self.targets {
            Targets::Scalar { y, scale } => {
                let m = idx.iter().map(|&i| y[i]).sum::<f64>() / idx.len() as f64;
                idx.iter().map(|&i| (y[i] - m).abs()).sum::<f64>() * scale
            }
            Targets::Vector { cdf, k, scale } => {
                let mut total = 0.0;
                for c in 0..*k {
                    let m = idx.iter().map(|&i| cdf[i * k + c]).sum::<f64>() / idx.len() as f64;
                    total += idx.iter().map(|&i| (cdf[i * k + c] - m).abs()).sum::<f64>();
                }
                total * scale
            }
        }
    }

    fn build(&self, idx: Vec<usize>, depth: usize) -> Node {
        let n = idx.len();
        let prediction = self.prediction(&idx);
        let err_sum = self.error_sum(&idx);
        let leaf = |prediction: Output| Node::Leaf {
            prediction,
            samples: n,
            error: err_sum / n as f64,
        };
        if depth >= self.params.max_depth
            || n < 2 * self.params.min_leaf.max(1)
            || err_sum <= IMPROVEMENT
        {
            return leaf(prediction);
        }
        let Some(best) = self.best_split(&idx) else {
            return leaf(prediction);
        };
        let (l, r): (Vec<usize>, Vec<usize>) = idx
            .iter()
            .partition(|&&i| self.examples[i].x[best.feature] <= best.threshold);
        // children must not raise training error; for vector targets the
        // split cost already is that error, for scalar targets it is not
        if l.is_empty() || r.is_empty() || self.error_sum(&l) + self.error_sum(&r) > err_sum + IMPROVEMENT {
            return leaf(prediction);
        }
        Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            prediction,
            samples: n,
            error: err_sum / n as f64,
            left: Box::new(self.build(l, depth + 1)),
            right: Box::new(self.build(r, depth + 1)),
        }
    }

    /// Feature-sorted order of `idx`, stable by position.
    fn sorted_by(&self, idx: &[usize], f: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..idx.len()).collect();
        order.sort_by(|&a, &b| {
            self.examples[idx[a]].x[f]
                .partial_cmp(&self.examples[idx[b]].x[f])
                .unwrap()
        });
        order
    }

    fn best_split(&self, idx: &[usize]) -> Option<Candidate> {
        match &self.targets {
            Targets::Scalar { y, .. } => self.best_scalar_split(idx, y),
            Targets::Vector { cdf, k, .. } => self.best_vector_split(idx, cdf, *k),
        }
    }

    fn x(&self, idx: &[usize], order: &[usize], pos: usize, f: usize) -> f64 {
        self.examples[idx[order[pos]]].x[f]
    }

    fn consider(best: &mut Option<Candidate>, feature: usize, threshold: f64, cost: f64) {
        let better = match best {
            None => true,
            Some(b) => cost < b.cost - IMPROVEMENT * b.cost.abs().max(1.0),
        };
        if better {
            *best = Some(Candidate {
                feature,
                threshold,
                cost,
            });
        }
    }

    fn best_scalar_split(&self, idx: &[usize], y: &[f64]) -> Option<Candidate> {
        let n = idx.len();
        let min_leaf = self.params.min_leaf.max(1);
        let total: f64 = idx.iter().map(|&i| y[i]).sum();
        let total_sq: f64 = idx.iter().map(|&i| y[i] * y[i]).sum();
        let parent = total_sq - total * total / n as f64;
        let mut best: Option<Candidate> = None;
        for f in 0..self.features {
            let order = self.sorted_by(idx, f);
            if self.x(idx, &order, 0, f) == self.x(idx, &order, n - 1, f) {
                continue;
            }
            let (mut s, mut sq) = (0.0, 0.0);
            for pos in 0..n - 1 {
                let v = y[idx[order[pos]]];
                s += v;
                sq += v * v;
                let nl = pos + 1;
                let nr = n - nl;
                if nl < min_leaf || nr < min_leaf {
                    continue;
                }
                let (a, b) = (self.x(idx, &order, pos, f), self.x(idx, &order, pos + 1, f));
                if a == b {
                    continue;
                }
                let sse_l = sq - s * s / nl as f64;
                let sr = total - s;
                let sse_r = (total_sq - sq) - sr * sr / nr as f64;
                Self::consider(&mut best, f, midpoint(a, b), sse_l.max(0.0) + sse_r.max(0.0));
            }
        }
        best.filter(|b| b.cost < parent - IMPROVEMENT * parent.abs().max(1.0))
    }

    fn best_vector_split(&self, idx: &[usize], cdf: &[f64], k: usize) -> Option<Candidate> {
        let n = idx.len();
        let min_leaf = self.params.min_leaf.max(1);

        // coordinates that vary inside this node; the rest add nothing
        let active: Vec<usize> = (0..k)
            .filter(|&c| {
                let first = cdf[idx[0] * k + c];
                idx.iter().any(|&i| cdf[i * k + c] != first)
            })
            .collect();
        if active.is_empty() {
            return None;
        }
        let ka = active.len();

        // per active coordinate: sorted values, their prefix sums, and each
        // local example's rank
        let mut sorted = vec![0.0; ka * n];
        let mut prefix = vec![0.0; ka * (n + 1)];
        let mut rank = vec![0u32; n * ka];
        let mut totals = vec![0.0; ka];
        let mut perm: Vec<usize> = (0..n).collect();
        for (a, &c) in active.iter().enumerate() {
            perm.sort_by(|&p, &q| cdf[idx[p] * k + c].partial_cmp(&cdf[idx[q] * k + c]).unwrap());
            let vals = &mut sorted[a * n..(a + 1) * n];
            let pre = &mut prefix[a * (n + 1)..(a + 1) * (n + 1)];
            for (r, &p) in perm.iter().enumerate() {
                let v = cdf[idx[p] * k + c];
                vals[r] = v;
                pre[r + 1] = pre[r] + v;
                rank[p * ka + a] = r as u32;
            }
            totals[a] = pre[n];
        }
        let parent: f64 = (0..ka)
            .map(|a| {
                let m = totals[a] / n as f64;
                sorted[a * n..(a + 1) * n].iter().map(|v| (v - m).abs()).sum::<f64>()
            })
            .sum();

        let mut counts = vec![0.0; ka * (n + 1)];
        let mut sums = vec![0.0; ka * (n + 1)];
        let mut left = vec![0.0; ka];
        let mut best: Option<Candidate> = None;
        for f in 0..self.features {
            let order = self.sorted_by(idx, f);
            if self.x(idx, &order, 0, f) == self.x(idx, &order, n - 1, f) {
                continue;
            }
            counts.fill(0.0);
            sums.fill(0.0);
            left.fill(0.0);
            for pos in 0..n - 1 {
                let p = order[pos];
                for (a, &c) in active.iter().enumerate() {
                    let v = cdf[idx[p] * k + c];
                    left[a] += v;
                    let span = a * (n + 1)..(a + 1) * (n + 1);
                    fenwick_add(&mut counts[span.clone()], &mut sums[span], rank[p * ka + a] as usize, v);
                }
                let nl = pos + 1;
                let nr = n - nl;
                if nl < min_leaf || nr < min_leaf {
                    continue;
                }
                let (lo, hi) = (self.x(idx, &order, pos, f), self.x(idx, &order, pos + 1, f));
                if lo == hi {
                    continue;
                }
                let (nlf, nrf) = (nl as f64, nr as f64);
                let mut cost = 0.0;
                for a in 0..ka {
                    let vals = &sorted[a * n..(a + 1) * n];
                    let pre = &prefix[a * (n + 1)..(a + 1) * (n + 1)];
                    let (cnt, sum) = (&counts[a * (n + 1)..(a + 1) * (n + 1)], &sums[a * (n + 1)..(a + 1) * (n + 1)]);

                    let sl = left[a];
                    let ml = sl / nlf;
                    let r = vals.partition_point(|&v| v <= ml);
                    let (c_le, s_le) = fenwick_prefix(cnt, sum, r);
                    cost += ml * c_le - s_le + (sl - s_le) - ml * (nlf - c_le);

                    let sr = totals[a] - sl;
                    let mr = sr / nrf;
                    let r = vals.partition_point(|&v| v <= mr);
                    let (cl, sl_le) = fenwick_prefix(cnt, sum, r);
                    let c_le = r as f64 - cl;
                    let s_le = pre[r] - sl_le;
                    cost += mr * c_le - s_le + (sr - s_le) - mr * (nrf - c_le);
                }
                Self::consider(&mut best, f, midpoint(lo, hi), cost);
            }
        }
        best.filter(|b| b.cost < parent - IMPROVEMENT * parent.abs().max(1.0))
    }
}

/// Fits a greedy depth-limited tree. Ties between candidate splits go to
/// the lowest feature index, then the lowest threshold.
pub fn tree_fit(
    train: &[LabeledExample],
    rep: RepresentationId,
    cfg: &GameConfig,
    params: TreeParams,
) -> Result<DecisionTree> {
    if train.is_empty() {
        return Err(Error::EvalError("cannot fit a tree on no examples".into()));
    }
    check_examples(train, rep, cfg)?;
    let bs = cfg.bet_steps;
    let targets = match rep.output_kind() {
        OutputKind::Bet => Targets::Scalar {
            y: train.iter().map(|e| e.y.expected_bet(0, cfg)).collect(),
            scale: 1.0 / cfg.stack,
        },
        kind => {
            let blocks = if kind == OutputKind::Full { cfg.deck_size } else { 1 };
            let k = blocks * (bs - 1);
            let mut cdf = Vec::with_capacity(train.len() * k);
            for e in train {
                let v = e.y.as_vector().expect("vector output");
                for block in v.chunks(bs) {
                    let mut acc = 0.0;
                    for &p in &block[..bs - 1] {
                        acc += p;
                        cdf.push(acc);
                    }
                }
            }
            Targets::Vector {
                cdf,
                k,
                scale: 1.0 / (blocks * (bs - 1)) as f64,
            }
        }
    };
    let builder = Builder {
        examples: train,
        targets,
        params,
        features: rep.feature_len(cfg.deck_size),
        bet_steps: bs,
    };
    let root = builder.build((0..train.len()).collect(), 0);
    Ok(DecisionTree {
        rep,
        params,
        config: *cfg,
        root,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn features(a: f64, card_pct: f64) -> Vec<f64> {
        let mut x: Vec<f64> = (1..=10).map(|k| (k as f64 / 10.0).max(a).min(1.0)).collect();
        x.extend((1..=10).map(|k| k as f64 / 10.0));
        x.push(card_pct);
        x
    }

    fn bet(game_id: usize, pct: f64, y: f64) -> LabeledExample {
        LabeledExample {
            game_id,
            card: Some(1),
            x: features(0.0, pct),
            y: Output::Bet(y),
        }
    }

    fn hand(game_id: usize, pct: f64, b: usize) -> LabeledExample {
        let mut v = vec![0.0; 31];
        v[b] = 1.0;
        LabeledExample {
            game_id,
            card: Some(1),
            x: features(0.0, pct),
            y: Output::Hand(v),
        }
    }

    #[test]
    fn adjacent_values_split_cleanly() {
        let lo: f64 = 0.1 + 0.2;
        let hi = f64::from_bits(lo.to_bits() + 1);
        assert!(midpoint(lo, hi) >= lo);
        assert!(midpoint(lo, hi) < hi);
        let cfg = GameConfig::default();
        let ex = vec![bet(0, lo, 0.0), bet(1, lo, 0.0), bet(2, hi, 3.0), bet(3, hi, 3.0)];
        let t = tree_fit(&ex, RepresentationId::R9, &cfg, TreeParams { max_depth: 2, min_leaf: 1 }).unwrap();
        assert_eq!(t.leaf_count(), 2);
        assert_eq!(t.predict(&ex[2].x).unwrap(), Output::Bet(3.0));
    }

    #[test]
    fn constant_targets_give_one_leaf() {
        let cfg = GameConfig::default();
        let ex: Vec<_> = (0..20).map(|i| bet(i, i as f64 / 20.0, 1.2)).collect();
        let t = tree_fit(&ex, RepresentationId::R9, &cfg, TreeParams::default()).unwrap();
        assert_eq!(t.node_count(), 1);
        assert!(t.root.error().abs() < 1e-12);
        let y = t.predict(&ex[3].x).unwrap().expected_bet(0, &cfg);
        assert!((y - 1.2).abs() < 1e-12);
    }

    #[test]
    fn depth_one_separates_two_clusters() {
        let cfg = GameConfig::default();
        let mut ex: Vec<_> = (0..10).map(|i| bet(i, 0.31 + i as f64 * 0.01, 0.0)).collect();
        ex.extend((10..20).map(|i| bet(i, 0.6 + (i - 10) as f64 * 0.01, 3.0)));
        let params = TreeParams { max_depth: 1, min_leaf: 1 };
        let t = tree_fit(&ex, RepresentationId::R9, &cfg, params).unwrap();
        match &t.root {
            Node::Split { feature, threshold, left, right, .. } => {
                assert_eq!(*feature, 20);
                assert!((*threshold - 0.5).abs() < 1e-12);
                assert_eq!(left.prediction(), &Output::Bet(0.0));
                assert_eq!(right.prediction(), &Output::Bet(3.0));
            }
            leaf => panic!("expected a split, got {leaf:?}"),
        }
        // boundary goes to the true (left) branch
        let mut q = features(0.0, 0.5);
        assert_eq!(t.predict(&q).unwrap(), Output::Bet(0.0));
        q[20] = 0.5000001;
        assert_eq!(t.predict(&q).unwrap(), Output::Bet(3.0));
    }

    #[test]
    fn vector_targets_split_on_emd() {
        let cfg = GameConfig::default();
        let mut ex: Vec<_> = (0..8).map(|i| hand(i, 0.1 + 0.01 * i as f64, 0)).collect();
        ex.extend((8..16).map(|i| hand(i, 0.9 + 0.01 * (i - 8) as f64, 30)));
        let t = tree_fit(&ex, RepresentationId::R5, &cfg, TreeParams { max_depth: 3, min_leaf: 2 })
            .unwrap();
        assert_eq!(t.leaf_count(), 2);
        assert_eq!(t.predict(&ex[0].x).unwrap(), ex[0].y);
        assert_eq!(t.predict(&ex[15].x).unwrap(), ex[15].y);
        assert!(t.root.error() > 0.4);
    }

    #[test]
    fn min_leaf_is_respected() {
        let cfg = GameConfig::default();
        let ex: Vec<_> = (0..12).map(|i| bet(i, i as f64 / 12.0, (i % 3) as f64)).collect();
        let t = tree_fit(&ex, RepresentationId::R9, &cfg, TreeParams { max_depth: 10, min_leaf: 4 })
            .unwrap();
        fn check(n: &Node) {
            assert!(n.samples() >= 4);
            if let Node::Split { left, right, .. } = n {
                check(left);
                check(right);
            }
        }
        check(&t.root);
    }

    #[test]
    fn rejects_mismatched_examples() {
        let cfg = GameConfig::default();
        let ex = vec![bet(0, 0.5, 1.0)];
        assert!(matches!(
            tree_fit(&ex, RepresentationId::R5, &cfg, TreeParams::default()),
            Err(Error::RepresentationError(_))
        ));
        assert!(tree_fit(&[], RepresentationId::R9, &cfg, TreeParams::default()).is_err());
    }
}
