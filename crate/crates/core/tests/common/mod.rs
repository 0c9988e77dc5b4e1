//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use onestreet::deal::{make_joint, sample_simplex};
use onestreet::game::expected_value;
use onestreet::{GameConfig, JointDeal, StrategyP1, StrategyP2};
use rand::Rng;

const EPS: f64 = 1e-11;

fn pivot(t: &mut [Vec<f64>], r: usize, c: usize) {
    let p = t[r][c];
    t[r].iter_mut().for_each(|x| *x /= p);
    let row = t[r].clone();
    for (i, other) in t.iter_mut().enumerate() {
        if i != r {
            let f = other[c];
            if f != 0.0 {
                other.iter_mut().zip(&row).for_each(|(x, y)| *x -= f * y);
            }
        }
    }
}

/// Runs Bland's-rule simplex on tableau rows `t` (last column is the right
/// hand side) minimizing `cost` over columns `0..allowed`.
fn run(t: &mut [Vec<f64>], basis: &mut [usize], cost: &[f64], allowed: usize) {
    let m = t.len();
    let rhs = t[0].len() - 1;
    loop {
        let reduced = |j: usize| cost[j] - (0..m).map(|i| cost[basis[i]] * t[i][j]).sum::<f64>();
        let Some(enter) = (0..allowed).find(|&j| !basis.contains(&j) && reduced(j) < -EPS) else {
            return;
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[i][enter] > EPS {
                let ratio = t[i][rhs] / t[i][enter];
                let better = match leave {
                    None => true,
                    Some((l, r)) => ratio < r - EPS || (ratio <= r + EPS && basis[i] < basis[l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (r, _) = leave.expect("unbounded linear program");
        pivot(t, r, enter);
        basis[r] = enter;
    }
}

/// Minimizes `c·x` subject to `A x = b`, `x ≥ 0` with the two-phase simplex
/// method. Returns the optimum and a minimizer, or `None` if infeasible.
pub fn lp_min(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Option<(f64, Vec<f64>)> {
    let m = a.len();
    let n = c.len();
    let mut t: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let s = if b[i] < 0.0 { -1.0 } else { 1.0 };
            let mut row: Vec<f64> = a[i].iter().map(|x| s * x).collect();
            row.extend((0..m).map(|k| if k == i { 1.0 } else { 0.0 }));
            row.push(s * b[i]);
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();

    let mut phase1 = vec![0.0; n + m];
    phase1[n..].iter_mut().for_each(|x| *x = 1.0);
    run(&mut t, &mut basis, &phase1, n + m);
    let infeasibility: f64 = (0..m).filter(|&i| basis[i] >= n).map(|i| t[i][n + m]).sum();
    if infeasibility > 1e-9 {
        return None;
    }
    for i in 0..m {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| t[i][j].abs() > 1e-9 && !basis.contains(&j)) {
                pivot(&mut t, i, j);
                basis[i] = j;
            }
        }
    }

    let mut phase2 = c.to_vec();
    phase2.extend(vec![0.0; m]);
    run(&mut t, &mut basis, &phase2, n);
    let mut x = vec![0.0; n];
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] = t[i][n + m];
        }
    }
    Some((c.iter().zip(&x).map(|(a, b)| a * b).sum(), x))
}

/// Optimal transport cost between histograms `p` and `q` on `0..m` with
/// ground distance `|i − j| / (m − 1)`, solved as a linear program.
pub fn transport_cost(p: &[f64], q: &[f64]) -> f64 {
    let m = p.len();
    let mut c = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            c.push((i as f64 - j as f64).abs() / (m - 1) as f64);
        }
    }
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..m {
        a.push((0..m * m).map(|k| f64::from(u8::from(k / m == i))).collect());
        b.push(p[i]);
    }
    // the last column constraint is implied by the others
    for j in 0..m - 1 {
        a.push((0..m * m).map(|k| f64::from(u8::from(k % m == j))).collect());
        b.push(q[j]);
    }
    lp_min(&c, &a, &b).expect("transport problem is feasible").0
}

/// Value to the row player of the zero-sum matrix game `payoff[row][col]`.
pub fn matrix_game_value(payoff: &[Vec<f64>]) -> f64 {
    let shift = 1.0 - payoff.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
    let rows = payoff.len();
    let cols = payoff[0].len();
    // column player: maximize Σw subject to (A + shift) w ≤ 1, w ≥ 0
    let mut c = vec![-1.0; cols];
    c.extend(vec![0.0; rows]);
    let a: Vec<Vec<f64>> = (0..rows)
        .map(|i| {
            let mut row: Vec<f64> = payoff[i].iter().map(|x| x + shift).collect();
            row.extend((0..rows).map(|k| f64::from(u8::from(k == i))));
            row
        })
        .collect();
    let (obj, _) = lp_min(&c, &a, &vec![1.0; rows]).expect("feasible");
    1.0 / (-obj) - shift
}

/// Game value by enumerating every pure strategy of both players.
pub fn brute_force_value(deal: &JointDeal, cfg: &GameConfig) -> f64 {
    let d = cfg.deck_size;
    let k = cfg.bet_steps;
    let n1 = k.pow(d as u32);
    let n2 = 1usize << (d * k);
    let p1: Vec<StrategyP1> = (0..n1)
        .map(|mut code| {
            let choices: Vec<usize> = (0..d)
                .map(|_| {
                    let b = code % k;
                    code /= k;
                    b
                })
                .collect();
            StrategyP1::from_choices(cfg, &choices)
        })
        .collect();
    let p2: Vec<StrategyP2> = (0..n2)
        .map(|bits| {
            let tau = (0..d * k).map(|s| f64::from(u8::from(bits >> s & 1 == 1))).collect();
            StrategyP2::new(d, k, tau).unwrap()
        })
        .collect();
    let payoff: Vec<Vec<f64>> = p1
        .iter()
        .map(|s1| p2.iter().map(|s2| expected_value(deal, s1, s2, cfg).unwrap()).collect())
        .collect();
    matrix_game_value(&payoff)
}

pub fn random_deal<R: Rng>(cfg: &GameConfig, rng: &mut R) -> JointDeal {
    loop {
        let x1 = sample_simplex(cfg.deck_size, rng);
        let x2 = sample_simplex(cfg.deck_size, rng);
        if let Ok(d) = make_joint(x1.as_slice(), x2.as_slice()) {
            return d;
        }
    }
}

/// Deal where player 1 holds one of `p1_cards` and player 2 one of
/// `p2_cards` (ranks), each uniformly and independently.
pub fn point_deal(cfg: &GameConfig, p1_cards: &[usize], p2_cards: &[usize]) -> JointDeal {
    let d = cfg.deck_size;
    let mut p = vec![0.0; d * d];
    let w = 1.0 / (p1_cards.len() * p2_cards.len()) as f64;
    for &i in p1_cards {
        for &j in p2_cards {
            p[(i - 1) * d + (j - 1)] = w;
        }
    }
    JointDeal::new(d, p).unwrap()
}

/// Player 1's strategy for the uniform deal as listed in the source
/// material, probabilities rounded to three decimals.
pub fn published_uniform_strategy(cfg: &GameConfig) -> StrategyP1 {
    let rows: [&[(f64, f64)]; 10] = [
        &[(0.1, 0.091), (0.6, 0.266), (1.8, 0.643)],
        &[(0.0, 0.660), (0.3, 0.231), (0.6, 0.109)],
        &[(0.0, 1.0)],
        &[(0.0, 1.0)],
        &[(0.0, 1.0)],
        &[(0.0, 1.0)],
        &[(0.1, 1.0)],
        &[(0.3, 1.0)],
        &[(0.6, 1.0)],
        &[(1.8, 1.0)],
    ];
    let mut sigma = vec![0.0; cfg.strategy_len()];
    for (h, row) in rows.iter().enumerate() {
        for &(amount, p) in row.iter() {
            let b = (amount / cfg.bet_increment).round() as usize;
            sigma[h * cfg.bet_steps + b] = p;
        }
    }
    StrategyP1::new(cfg.deck_size, cfg.bet_steps, sigma).unwrap()
}
