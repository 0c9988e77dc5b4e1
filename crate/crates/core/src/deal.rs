//! Random private-information distributions and conversions between the
//! joint, marginal pdf and marginal cdf forms.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::TOLERANCE;
use crate::error::{Error, Result};
use crate::game::JointDeal;

/// A point on the probability simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexPoint(Vec<f64>);

impl SimplexPoint {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        check_pdf(&a)?;
        Ok(Self(a))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// Draws a point uniformly from the `n`-dimensional simplex (flat Dirichlet)
/// by normalizing `n` standard exponentials `-ln(u)`.
pub fn sample_simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SimplexPoint {
    assert!(n >= 1, "simplex dimension must be positive");
    let mut a: Vec<f64> = (0..n)
        .map(|_| loop {
            let u: f64 = rng.gen();
            if u > 0.0 {
                break -u.ln();
            }
        })
        .collect();
    let s: f64 = a.iter().sum();
    if s > 0.0 {
        a.iter_mut().for_each(|x| *x /= s);
    } else {
        // every draw was u == 1
        a.fill(1.0 / n as f64);
    }
    SimplexPoint(a)
}

/// Combines two independent card distributions into a joint deal, keeping
/// only outcomes where the players hold different cards and renormalizing.
pub fn make_joint(x1: &[f64], x2: &[f64]) -> Result<JointDeal> {
    if x1.len() != x2.len() {
        return Err(Error::DimensionError(format!(
            "player distributions have lengths {} and {}",
            x1.len(),
            x2.len()
        )));
    }
    check_pdf(x1)?;
    check_pdf(x2)?;
    let n = x1.len();
    let mut p = vec![0.0; n * n];
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let next = x1[i] * x2[j];
                p[i * n + j] = next;
                s += next;
            }
        }
    }
    if s <= 0.0 {
        return Err(Error::DegenerateDeal);
    }
    p.iter_mut().for_each(|v| *v /= s);
    JointDeal::new(n, p)
}

/// Per-player marginal pdfs and cdfs of a joint deal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalFeatures {
    pub cdf1: Vec<f64>,
    pub cdf2: Vec<f64>,
    pub pdf1: Vec<f64>,
    pub pdf2: Vec<f64>,
}

impl MarginalFeatures {
    /// The 20-value cdf input: player 1's cdf followed by player 2's.
    pub fn cdf_input(&self) -> Vec<f64> {
        self.cdf1.iter().chain(&self.cdf2).copied().collect()
    }

    /// The 20-value pdf input in the same player order.
    pub fn pdf_input(&self) -> Vec<f64> {
        self.pdf1.iter().chain(&self.pdf2).copied().collect()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.pdf1.len();
        if [self.pdf2.len(), self.cdf1.len(), self.cdf2.len()]
            .iter()
            .any(|&l| l != n)
        {
            return Err(Error::DimensionError("marginal vectors differ in length".into()));
        }
        for (pdf, cdf) in [(&self.pdf1, &self.cdf1), (&self.pdf2, &self.cdf2)] {
            check_pdf(pdf)?;
            check_cdf(cdf)?;
            let running = pdf_to_cdf(pdf);
            if running.iter().zip(cdf.iter()).any(|(a, b)| (a - b).abs() > TOLERANCE) {
                return Err(Error::InvalidDistribution("cdf is not the running sum of pdf".into()));
            }
        }
        Ok(())
    }
}

pub fn marginals(deal: &JointDeal) -> MarginalFeatures {
    let pdf1 = deal.marginal_p1();
    let pdf2 = deal.marginal_p2();
    MarginalFeatures {
        cdf1: pdf_to_cdf(&pdf1),
        cdf2: pdf_to_cdf(&pdf2),
        pdf1,
        pdf2,
    }
}

/// Running sums.
pub fn pdf_to_cdf(pdf: &[f64]) -> Vec<f64> {
    pdf.iter()
        .scan(0.0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

/// First differences; fails on a decreasing cdf.
pub fn cdf_to_pdf(cdf: &[f64]) -> Result<Vec<f64>> {
    let mut prev = 0.0;
    let mut out = Vec::with_capacity(cdf.len());
    for (k, &c) in cdf.iter().enumerate() {
        if !c.is_finite() || c < prev - TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "cdf decreases at position {k} ({prev} -> {c})"
            )));
        }
        out.push(c - prev);
        prev = c;
    }
    Ok(out)
}

pub(crate) fn check_pdf(pdf: &[f64]) -> Result<()> {
    if pdf.is_empty() {
        return Err(Error::InvalidDistribution("empty distribution".into()));
    }
    if let Some(x) = pdf.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::InvalidDistribution(format!("negative or non-finite probability {x}")));
    }
    let s: f64 = pdf.iter().sum();
    if (s - 1.0).abs() > TOLERANCE {
        return Err(Error::InvalidDistribution(format!("probabilities sum to {s}")));
    }
    Ok(())
}

pub(crate) fn check_cdf(cdf: &[f64]) -> Result<()> {
    cdf_to_pdf(cdf)?;
    match cdf.last() {
        Some(&last) if (last - 1.0).abs() <= TOLERANCE && cdf[0] >= -TOLERANCE => Ok(()),
        _ => Err(Error::InvalidDistribution("cdf must end at 1".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn point(n: usize, k: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        v
    }

    #[test]
    fn constant_uniforms_give_the_barycenter() {
        let mut rng = rand::rngs::mock::StepRng::new(1 << 63, 0);
        let a = sample_simplex(10, &mut rng);
        for &x in a.as_slice() {
            assert_abs_diff_eq!(x, 0.1, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_uniform_is_resampled() {
        // StepRng yields 0 first, then a positive value on every later call
        let mut rng = rand::rngs::mock::StepRng::new(0, 1 << 62);
        let a = sample_simplex(3, &mut rng);
        assert!(a.as_slice().iter().all(|x| x.is_finite()));
        check_pdf(a.as_slice()).unwrap();
    }

    #[test]
    fn one_dimensional_simplex() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(sample_simplex(1, &mut rng).as_slice(), &[1.0]);
    }

    #[test]
    fn seeded_sampling_is_bit_identical() {
        let a = sample_simplex(10, &mut ChaCha8Rng::seed_from_u64(99));
        let b = sample_simplex(10, &mut ChaCha8Rng::seed_from_u64(99));
        assert_eq!(a, b);
    }

    #[test]
    fn uniform_marginals_give_uniform_joint() {
        let deal = make_joint(&[0.1; 10], &[0.1; 10]).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                let want = if i == j { 0.0 } else { 1.0 / 90.0 };
                assert_abs_diff_eq!(deal.get(i, j), want, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn point_mass_row() {
        let deal = make_joint(&point(10, 0), &[0.1; 10]).unwrap();
        assert_eq!(deal.get(0, 0), 0.0);
        for j in 1..10 {
            assert_abs_diff_eq!(deal.get(0, j), 1.0 / 9.0, epsilon = 1e-15);
        }
        for i in 1..10 {
            assert!(deal.row(i).iter().all(|&x| x == 0.0));
        }
        let m = marginals(&deal);
        assert!(m.cdf1.iter().all(|&c| (c - 1.0).abs() < 1e-12));
    }

    #[test]
    fn same_point_mass_is_degenerate() {
        assert!(matches!(
            make_joint(&point(10, 4), &point(10, 4)),
            Err(Error::DegenerateDeal)
        ));
        assert!(make_joint(&[0.5, 0.5], &[1.0]).is_err());
    }

    #[test]
    fn polar_and_uniform_marginals() {
        let mut polar = vec![0.0; 10];
        polar[0] = 0.5;
        polar[9] = 0.5;
        let m = marginals(&make_joint(&polar, &point(10, 4)).unwrap());
        let mut want1 = vec![0.5; 9];
        want1.push(1.0);
        for (a, b) in m.cdf1.iter().zip(&want1) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        let want2 = [0., 0., 0., 0., 1., 1., 1., 1., 1., 1.];
        for (a, b) in m.cdf2.iter().zip(&want2) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }

        let u = marginals(&JointDeal::uniform(10));
        for k in 0..10 {
            assert_abs_diff_eq!(u.cdf1[k], 0.1 * (k + 1) as f64, epsilon = 1e-12);
            assert_abs_diff_eq!(u.cdf2[k], 0.1 * (k + 1) as f64, epsilon = 1e-12);
        }
        u.validate().unwrap();
    }

    #[test]
    fn disjoint_supports_keep_marginals() {
        let x1 = [0.2, 0.8, 0.0, 0.0];
        let x2 = [0.0, 0.0, 0.3, 0.7];
        let m = marginals(&make_joint(&x1, &x2).unwrap());
        for k in 0..4 {
            assert_abs_diff_eq!(m.pdf1[k], x1[k], epsilon = 1e-15);
            assert_abs_diff_eq!(m.pdf2[k], x2[k], epsilon = 1e-15);
        }
    }

    #[test]
    fn cdf_pdf_conversions() {
        let mut polar_cdf = vec![0.5; 9];
        polar_cdf.push(1.0);
        let pdf = cdf_to_pdf(&polar_cdf).unwrap();
        let mut want = vec![0.0; 10];
        want[0] = 0.5;
        want[9] = 0.5;
        assert_eq!(pdf, want);

        let uniform: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).collect();
        for x in cdf_to_pdf(&uniform).unwrap() {
            assert_abs_diff_eq!(x, 0.1, epsilon = 1e-12);
        }

        assert!(matches!(
            cdf_to_pdf(&[0.5, 0.4, 1.0]),
            Err(Error::InvalidDistribution(_))
        ));
    }

    #[test]
    fn cdf_round_trip_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let cdf = pdf_to_cdf(sample_simplex(10, &mut rng).as_slice());
            let back = pdf_to_cdf(&cdf_to_pdf(&cdf).unwrap());
            for (a, b) in back.iter().zip(&cdf) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
    }
}
