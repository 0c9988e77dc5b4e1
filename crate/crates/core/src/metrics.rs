//! Earth mover's distances between game inputs and between strategies.
//!
//! All distances are normalized by the largest possible value, the cost of
//! moving a point mass from the first bin to the last, so they lie in
//! `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::deal::{cdf_to_pdf, pdf_to_cdf};
use crate::error::{Error, Result};
use crate::repr::{CardFeature, RepresentationId};

/// A distance in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct NormalizedDistance(f64);

impl NormalizedDistance {
    pub fn new(value: f64) -> Self {
        debug_assert!((-1e-12..=1.0 + 1e-12).contains(&value), "{value}");
        Self(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<NormalizedDistance> for f64 {
    fn from(d: NormalizedDistance) -> f64 {
        d.0
    }
}

/// Unnormalized EMD between two equal-length histograms: the sum of
/// absolute running differences.
#[inline]
fn emd_raw(p: &[f64], q: &[f64]) -> f64 {
    let mut delta = 0.0;
    let mut result = 0.0;
    for (a, b) in p.iter().zip(q) {
        delta += a - b;
        result += f64::abs(delta);
    }
    result
}

/// Normalized 1-D EMD between two pdfs of equal length `m >= 2`.
pub fn emd_1d(p: &[f64], q: &[f64]) -> Result<NormalizedDistance> {
    if p.len() != q.len() {
        return Err(Error::DimensionError(format!(
            "histograms have lengths {} and {}",
            p.len(),
            q.len()
        )));
    }
    if p.len() < 2 {
        return Err(Error::DimensionError("histograms need at least two bins".into()));
    }
    Ok(NormalizedDistance::new(emd_raw(p, q) / (p.len() - 1) as f64))
}

/// Average of the per-player normalized EMDs between two stacked cdf
/// inputs (player 1's `deck_size` values, then player 2's).
pub fn input_distance(x: &[f64], y: &[f64], deck_size: usize) -> Result<NormalizedDistance> {
    if x.len() != y.len() || deck_size < 2 || x.len() % deck_size != 0 {
        return Err(Error::DimensionError(format!(
            "cdf inputs of lengths {} and {} do not split into {deck_size}-card players",
            x.len(),
            y.len()
        )));
    }
    let players = x.len() / deck_size;
    let mut total = 0.0;
    for (a, b) in x.chunks(deck_size).zip(y.chunks(deck_size)) {
        let pa = cdf_to_pdf(a)?;
        let pb = cdf_to_pdf(b)?;
        let mut delta = 0.0;
        let mut result = 0.0;
        for (u, v) in pa.iter().zip(&pb) {
            delta += u - v;
            result += f64::abs(delta);
        }
        // the final running difference is the gap between the two totals
        if (delta.abs()) > 1e-6 {
            return Err(Error::InvalidDistribution(format!(
                "cdf inputs end at different totals (difference {delta})"
            )));
        }
        total += result / (deck_size - 1) as f64;
    }
    Ok(NormalizedDistance::new(total / players as f64))
}

/// Average over hands of the normalized EMD between two flattened player-1
/// strategies (hand-major blocks of `bet_steps` probabilities).
pub fn output_distance(y: &[f64], y_hat: &[f64], bet_steps: usize) -> Result<NormalizedDistance> {
    if y.len() != y_hat.len() || bet_steps < 2 || y.len() % bet_steps != 0 || y.is_empty() {
        return Err(Error::DimensionError(format!(
            "strategy vectors of lengths {} and {} do not split into {bet_steps}-bet blocks",
            y.len(),
            y_hat.len()
        )));
    }
    let hands = y.len() / bet_steps;
    let mut total = 0.0;
    for (h, (a, b)) in y.chunks(bet_steps).zip(y_hat.chunks(bet_steps)).enumerate() {
        for block in [a, b] {
            let s: f64 = block.iter().sum();
            if (s - 1.0).abs() > 1e-6 {
                return Err(Error::InvalidStrategy(format!(
                    "hand {} block sums to {s}",
                    h + 1
                )));
            }
        }
        total += emd_raw(a, b) / (bet_steps - 1) as f64;
    }
    Ok(NormalizedDistance::new(total / hands as f64))
}

/// Relative weights of the distribution term and the card term when
/// comparing 21-feature inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureWeights {
    pub distribution: f64,
    pub card: f64,
}

impl Default for FeatureWeights {
    fn default() -> Self {
        Self {
            distribution: 2.0,
            card: 1.0,
        }
    }
}

/// Distance between two feature vectors of representation `rep`.
///
/// pdf features are moved to cdf space first so every representation is
/// compared by [`input_distance`]. For per-card representations the card
/// term (rank rescaled to `[0, 1]`, or the cdf value as is) is blended in
/// with `weights`.
pub fn feature_distance(
    f: &[f64],
    g: &[f64],
    rep: RepresentationId,
    deck_size: usize,
    weights: FeatureWeights,
) -> Result<NormalizedDistance> {
    let want = rep.feature_len(deck_size);
    if f.len() != want || g.len() != want {
        return Err(Error::RepresentationError(format!(
            "{rep} expects {want} features, got {} and {}",
            f.len(),
            g.len()
        )));
    }
    let dist_len = 2 * deck_size;
    let dist = if rep.uses_cdf() {
        input_distance(&f[..dist_len], &g[..dist_len], deck_size)?
    } else {
        let to_cdf = |v: &[f64]| -> Vec<f64> { v.chunks(deck_size).flat_map(pdf_to_cdf).collect() };
        input_distance(&to_cdf(&f[..dist_len]), &to_cdf(&g[..dist_len]), deck_size)?
    };
    let Some(card) = rep.card_feature() else {
        return Ok(dist);
    };
    let scale = |v: f64| match card {
        CardFeature::Number => (v - 1.0) / (deck_size - 1) as f64,
        CardFeature::Percentile => v,
    };
    let card_term = (scale(f[dist_len]) - scale(g[dist_len])).abs();
    let total = weights.distribution + weights.card;
    Ok(NormalizedDistance::new(
        (weights.distribution * dist.value() + weights.card * card_term) / total,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn point(m: usize, k: usize) -> Vec<f64> {
        let mut v = vec![0.0; m];
        v[k] = 1.0;
        v
    }

    fn uniform_cdf() -> Vec<f64> {
        (1..=10).map(|k| k as f64 / 10.0).collect()
    }

    #[test]
    fn emd_examples() {
        let u = vec![0.1; 10];
        assert_eq!(emd_1d(&u, &u).unwrap().value(), 0.0);
        assert_abs_diff_eq!(emd_1d(&point(7, 0), &point(7, 6)).unwrap().value(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(emd_1d(&u, &point(10, 0)).unwrap().value(), 0.5, epsilon = 1e-12);
        assert!(matches!(emd_1d(&u, &[0.5, 0.5]), Err(Error::DimensionError(_))));
        assert!(emd_1d(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn input_distance_uniform_vs_polar() {
        let mut uniform = uniform_cdf();
        uniform.extend(uniform_cdf());
        let mut polar = vec![0.5; 9];
        polar.push(1.0);
        polar.extend([0., 0., 0., 0., 1., 1., 1., 1., 1., 1.]);
        assert_abs_diff_eq!(
            input_distance(&uniform, &polar, 10).unwrap().value(),
            0.25,
            epsilon = 1e-12
        );
        assert_eq!(input_distance(&polar, &polar, 10).unwrap().value(), 0.0);
    }

    #[test]
    fn input_distance_rejects_bad_cdf() {
        let mut a = uniform_cdf();
        a.extend(uniform_cdf());
        let mut b = a.clone();
        b[3] = 0.1;
        assert!(matches!(input_distance(&a, &b, 10), Err(Error::InvalidDistribution(_))));
    }

    #[test]
    fn output_distance_examples() {
        let base: Vec<f64> = (0..10).flat_map(|_| point(31, 0)).collect();
        let mut moved = base.clone();
        moved[0] = 0.0;
        moved[30] = 1.0;
        assert_abs_diff_eq!(output_distance(&base, &moved, 31).unwrap().value(), 0.1, epsilon = 1e-12);
        let all: Vec<f64> = (0..10).flat_map(|_| point(31, 30)).collect();
        assert_abs_diff_eq!(output_distance(&base, &all, 31).unwrap().value(), 1.0, epsilon = 1e-12);
        assert_eq!(output_distance(&base, &base, 31).unwrap().value(), 0.0);

        let mut broken = base.clone();
        broken[5] = 0.5;
        assert!(matches!(output_distance(&base, &broken, 31), Err(Error::InvalidStrategy(_))));
    }

    #[test]
    fn card_number_term() {
        let mut f = uniform_cdf();
        f.extend(uniform_cdf());
        let mut g = f.clone();
        f.push(1.0);
        g.push(10.0);
        let d = feature_distance(&f, &g, RepresentationId::R3, 10, FeatureWeights::default()).unwrap();
        assert_abs_diff_eq!(d.value(), 1.0 / 3.0, epsilon = 1e-12);
        assert_eq!(
            feature_distance(&f, &f, RepresentationId::R7, 10, FeatureWeights::default())
                .unwrap()
                .value(),
            0.0
        );
        assert!(matches!(
            feature_distance(&f, &g, RepresentationId::R1, 10, FeatureWeights::default()),
            Err(Error::RepresentationError(_))
        ));
    }

    #[test]
    fn pdf_features_match_cdf_features() {
        let pdf1 = [0.3, 0.0, 0.2, 0.1, 0.1, 0.05, 0.05, 0.1, 0.0, 0.1];
        let pdf2 = [0.1; 10];
        let f_pdf: Vec<f64> = pdf1.iter().chain(&pdf2).copied().collect();
        let g_pdf: Vec<f64> = pdf2.iter().chain(&pdf1).copied().collect();
        let f_cdf: Vec<f64> = [pdf_to_cdf(&pdf1), pdf_to_cdf(&pdf2)].concat();
        let g_cdf: Vec<f64> = [pdf_to_cdf(&pdf2), pdf_to_cdf(&pdf1)].concat();
        let w = FeatureWeights::default();
        let a = feature_distance(&f_pdf, &g_pdf, RepresentationId::R2, 10, w).unwrap();
        let b = feature_distance(&f_cdf, &g_cdf, RepresentationId::R1, 10, w).unwrap();
        assert_abs_diff_eq!(a.value(), b.value(), epsilon = 1e-12);
    }
}
