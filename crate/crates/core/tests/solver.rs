mod common;

use common::{brute_force_value, point_deal, random_deal};
use onestreet::equilibrium::{best_response_p1, best_response_p2, nash_conv, solve};
use onestreet::game::{expected_value, payoff};
use onestreet::seed::rng_from_seed;
use onestreet::{BetIndex, Card, GameConfig, Response, StrategyP1, StrategyP2};
use proptest::prelude::*;
use rand::Rng;

fn small_config() -> GameConfig {
    GameConfig::new(3, 3, 1.5, 0.5, 3.0).unwrap()
}

#[test]
fn lp_oracle_solves_matching_pennies() {
    let v = common::matrix_game_value(&[vec![1.0, -1.0], vec![-1.0, 1.0]]);
    assert!(v.abs() < 1e-12);
    let v = common::matrix_game_value(&[vec![3.0, 1.0], vec![0.0, 2.0]]);
    assert!((v - 1.5).abs() < 1e-12);
}

#[test]
fn small_game_matches_exhaustive_minimax() {
    let cfg = small_config();
    let mut rng = rng_from_seed(11);
    let mut deals = vec![point_deal(&cfg, &[1, 3], &[2])];
    deals.extend((0..4).map(|_| random_deal(&cfg, &mut rng)));
    for deal in deals {
        let eps = 1e-5;
        let r = solve(&deal, &cfg, eps, 100_000).unwrap();
        let exact = brute_force_value(&deal, &cfg);
        assert!((r.value - exact).abs() <= eps, "solver {} vs minimax {exact}", r.value);
    }
}

#[test]
fn solver_meets_epsilon_on_random_deals() {
    let cfg = GameConfig::default();
    let mut rng = rng_from_seed(2024);
    for _ in 0..100 {
        let deal = random_deal(&cfg, &mut rng);
        let r = solve(&deal, &cfg, 1e-4, 100_000).unwrap();
        let nc = nash_conv(&deal, &r.s1, &r.s2, &cfg).unwrap();
        assert!(nc <= 1e-4 && (nc - r.nash_conv).abs() < 1e-12);
        let (_, lo) = best_response_p2(&deal, &r.s1, &cfg).unwrap();
        let (_, hi) = best_response_p1(&deal, &r.s2, &cfg).unwrap();
        assert!(lo <= r.value + 1e-12 && r.value <= hi + 1e-12);
        let bound = cfg.stack + cfg.ante;
        assert!(r.value.abs() <= bound);
        for h in 0..cfg.deck_size {
            let s: f64 = r.s1.row(h).iter().sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn solver_is_deterministic() {
    let cfg = GameConfig::default();
    let deal = random_deal(&cfg, &mut rng_from_seed(5));
    assert_eq!(solve(&deal, &cfg, 1e-4, 100_000).unwrap(), solve(&deal, &cfg, 1e-4, 100_000).unwrap());
}

#[test]
fn expected_value_matches_monte_carlo() {
    let cfg = GameConfig::default();
    let mut rng = rng_from_seed(99);
    let deal = random_deal(&cfg, &mut rng);
    let s1 = StrategyP1::new(
        10,
        31,
        (0..310).map(|_| rng.gen::<f64>()).collect::<Vec<_>>().chunks(31).flat_map(|c| {
            let s: f64 = c.iter().sum();
            c.iter().map(move |x| x / s).collect::<Vec<_>>()
        })
        .collect(),
    )
    .unwrap();
    let s2 = StrategyP2::new(10, 31, (0..310).map(|_| rng.gen()).collect()).unwrap();
    let exact = expected_value(&deal, &s1, &s2, &cfg).unwrap();

    let n = 1_000_000;
    let cells: Vec<f64> = deal.as_slice().to_vec();
    let (mut sum, mut sq) = (0.0, 0.0);
    for _ in 0..n {
        let pick = |rng: &mut rand_chacha::ChaCha8Rng, w: &[f64]| {
            let mut u: f64 = rng.gen();
            for (i, p) in w.iter().enumerate() {
                if u < *p {
                    return i;
                }
                u -= p;
            }
            w.iter().rposition(|p| *p > 0.0).unwrap()
        };
        let cell = pick(&mut rng, &cells);
        let (i, j) = (cell / 10, cell % 10);
        let b = pick(&mut rng, s1.row(i));
        let call = rng.gen::<f64>() < s2.call_prob(j, b);
        let resp = if call { Response::Call } else { Response::Fold };
        let x = payoff(
            Card::new(i + 1, &cfg).unwrap(),
            Card::new(j + 1, &cfg).unwrap(),
            BetIndex::new(b, &cfg).unwrap(),
            resp,
            &cfg,
        )
        .unwrap();
        sum += x;
        sq += x * x;
    }
    let mean = sum / n as f64;
    let se = ((sq / n as f64 - mean * mean) / n as f64).sqrt();
    assert!((mean - exact).abs() <= 3.0 * se, "mc {mean} exact {exact} se {se}");
}

proptest! {
    #[test]
    fn called_showdowns_are_antisymmetric(a in 1usize..=10, b in 1usize..=10, bet in 0usize..31) {
        prop_assume!(a != b);
        let cfg = GameConfig::default();
        let card = |r| Card::new(r, &cfg).unwrap();
        let bet = BetIndex::new(bet, &cfg).unwrap();
        let x = payoff(card(a), card(b), bet, Response::Call, &cfg).unwrap();
        let y = payoff(card(b), card(a), bet, Response::Call, &cfg).unwrap();
        prop_assert_eq!(x, -y);
        prop_assert_eq!(payoff(card(a), card(b), bet, Response::Fold, &cfg).unwrap(), cfg.ante);
    }

    #[test]
    fn expected_value_is_bilinear_and_bounded(seed in any::<u64>(), alpha in 0.0f64..=1.0) {
        let cfg = GameConfig::default();
        let mut rng = rng_from_seed(seed);
        let deal = random_deal(&cfg, &mut rng);
        let choices = |rng: &mut rand_chacha::ChaCha8Rng| (0..10).map(|_| rng.gen_range(0..31)).collect::<Vec<_>>();
        let a = StrategyP1::from_choices(&cfg, &choices(&mut rng));
        let b = StrategyP1::from_choices(&cfg, &choices(&mut rng));
        let s2 = StrategyP2::new(10, 31, (0..310).map(|_| rng.gen()).collect()).unwrap();
        let t2 = StrategyP2::always_fold(&cfg);
        let ev = |s1: &StrategyP1, s2: &StrategyP2| expected_value(&deal, s1, s2, &cfg).unwrap();
        let mixed = ev(&a.mix(&b, alpha), &s2);
        prop_assert!((mixed - (alpha * ev(&a, &s2) + (1.0 - alpha) * ev(&b, &s2))).abs() < 1e-12);
        let mixed = ev(&a, &s2.mix(&t2, alpha));
        prop_assert!((mixed - (alpha * ev(&a, &s2) + (1.0 - alpha) * ev(&a, &t2))).abs() < 1e-12);
        prop_assert!(ev(&a, &s2).abs() <= cfg.stack + cfg.ante);
    }

    #[test]
    fn best_responses_bracket_any_profile(seed in any::<u64>()) {
        let cfg = GameConfig::default();
        let mut rng = rng_from_seed(seed);
        let deal = random_deal(&cfg, &mut rng);
        let s1 = StrategyP1::from_choices(&cfg, &(0..10).map(|_| rng.gen_range(0..31)).collect::<Vec<_>>());
        let s2 = StrategyP2::new(10, 31, (0..310).map(|_| rng.gen()).collect()).unwrap();
        let v = expected_value(&deal, &s1, &s2, &cfg).unwrap();
        let (br2, lo) = best_response_p2(&deal, &s1, &cfg).unwrap();
        let (br1, hi) = best_response_p1(&deal, &s2, &cfg).unwrap();
        prop_assert!(lo <= v + 1e-12 && v <= hi + 1e-12);
        prop_assert!((expected_value(&deal, &s1, &br2, &cfg).unwrap() - lo).abs() < 1e-12);
        prop_assert!((expected_value(&deal, &br1, &s2, &cfg).unwrap() - hi).abs() < 1e-12);
        prop_assert!(nash_conv(&deal, &s1, &s2, &cfg).unwrap() >= 0.0);
    }
}
