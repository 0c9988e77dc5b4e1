//! Deal specifications for `solve`: a full joint matrix, or one pdf per
//! player combined into a joint deal.

use onestreet::deal::make_joint;
use onestreet::{GameConfig, JointDeal};

use crate::Failure;

/// Named deals from the worked examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// Both players' cards uniform and distinct.
    Uniform,
    /// Player 1 holds 1 or 10 equally often, player 2 always holds 5.
    P1Polar,
    /// Player 1 always holds 5, player 2 holds 1 or 10 equally often.
    P2Polar,
}

fn numbers(text: &str) -> Result<Vec<f64>, Failure> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split(|c: char| c == ',' || c.is_whitespace()))
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| Failure::usage(format!("not a number: {t:?}"))))
        .collect()
}

fn point_mass_pdf(d: usize, cards: &[usize]) -> Vec<f64> {
    let mut p = vec![0.0; d];
    for &c in cards {
        p[c - 1] = 1.0 / cards.len() as f64;
    }
    p
}

pub fn preset(p: Preset, cfg: &GameConfig) -> Result<JointDeal, Failure> {
    let d = cfg.deck_size;
    if d < 10 && p != Preset::Uniform {
        return Err(Failure::usage("polar presets need a deck of at least 10 cards"));
    }
    let (x1, x2) = match p {
        Preset::Uniform => return Ok(JointDeal::uniform(d)),
        Preset::P1Polar => (point_mass_pdf(d, &[1, 10]), point_mass_pdf(d, &[5])),
        Preset::P2Polar => (point_mass_pdf(d, &[5]), point_mass_pdf(d, &[1, 10])),
    };
    Ok(make_joint(&x1, &x2)?)
}

/// Parses `d·d` joint entries (row = player 1's card) or `2·d` entries
/// (player 1's pdf, then player 2's).
pub fn parse(text: &str, cfg: &GameConfig) -> Result<JointDeal, Failure> {
    let v = numbers(text)?;
    let d = cfg.deck_size;
    if v.len() == d * d {
        Ok(JointDeal::new(d, v)?)
    } else if v.len() == 2 * d {
        Ok(make_joint(&v[..d], &v[d..])?)
    } else {
        Err(Failure::usage(format!(
            "a deal needs {} joint entries or two pdfs of {d} entries, got {} numbers",
            d * d,
            v.len()
        )))
    }
}

/// Combines two comma-separated pdfs.
pub fn from_pdfs(p1: &str, p2: &str, cfg: &GameConfig) -> Result<JointDeal, Failure> {
    let (x1, x2) = (numbers(p1)?, numbers(p2)?);
    if x1.len() != cfg.deck_size || x2.len() != cfg.deck_size {
        return Err(Failure::usage(format!("each pdf needs {} entries", cfg.deck_size)));
    }
    Ok(make_joint(&x1, &x2)?)
}
