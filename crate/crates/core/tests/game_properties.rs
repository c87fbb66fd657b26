use proptest::prelude::*;
use zeckgame::analysis::{enumerate_games, sample_games, Limits, MeasureKind, SampleConfig, StateGraph};
use zeckgame::numerics::zeck_count;
use zeckgame::{fib_index, Game, GameState, Move};

fn random_game(n: u64, seed: u64) -> Game {
    let cfg = SampleConfig {
        measure: MeasureKind::RandomPlay,
        seed,
        count: 1,
        threads: 1,
    };
    sample_games(n, &cfg, &Limits::default()).unwrap().remove(0)
}

fn check_replay(g: &Game) {
    let n = g.n();
    let states = g.states();
    let mut combines = 0u64;
    for (w, m) in states.windows(2).zip(g.moves()) {
        assert_eq!(w[1].value(), n as u128);
        let drop = w[0].token_count() - w[1].token_count();
        if m.is_combine() {
            combines += 1;
            assert_eq!(drop, 1, "{m}");
        } else {
            assert_eq!(w[0].token_count(), w[1].token_count(), "{m}");
        }
        assert!(w[0].legal_moves().contains(m));
    }
    let last = states.last().unwrap();
    assert!(last.is_terminal() && last.is_zeckendorf());
    assert_eq!(combines, n - zeck_count(n).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_games_conserve_value(n in 1u64..300, seed in any::<u64>()) {
        check_replay(&random_game(n, seed));
    }

    #[test]
    fn game_text_round_trips(n in 1u64..200, seed in any::<u64>()) {
        let g = random_game(n, seed);
        let back: Game = g.to_string().parse().unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn move_text_round_trips(k in 1u32..500, split in any::<bool>()) {
        prop_assume!(!split || k >= 2);
        let m = if split { Move::split(k) } else { Move::combine(k) };
        prop_assert_eq!(m.to_string().parse::<Move>().unwrap(), m);
    }

    #[test]
    fn legal_move_count_bounded(n in 2u64..400, seed in any::<u64>()) {
        let bins = fib_index(n).unwrap();
        for s in random_game(n, seed).states() {
            if bins >= 2 {
                prop_assert!(s.legal_move_count() <= 2 * bins - 3);
            }
        }
    }

    #[test]
    fn random_games_obey_count_bounds(n in prop::sample::select(vec![50u64, 100, 200]), seed in any::<u64>(), delta in 0.01f64..0.99) {
        let c = random_game(n, seed).counts();
        prop_assert!(c.exception_bound_holds(n));
        prop_assert!(c.high_index_bound_holds(n, delta));
    }
}

#[test]
fn enumerated_games_replay_cleanly() {
    for n in 1..=12 {
        for g in enumerate_games(n, 14).unwrap() {
            check_replay(&g);
        }
    }
}

#[test]
fn move_sums_constant_over_enumeration() {
    for n in 1..=12 {
        let mut sums: Option<Vec<u64>> = None;
        for g in enumerate_games(n, 14).unwrap() {
            let c = g.counts();
            let s: Vec<u64> = (2..c.bins()).map(|k| c.movesum(k)).collect();
            match &sums {
                None => sums = Some(s),
                Some(t) => assert_eq!(&s, t, "{g}"),
            }
            assert!(c.exception_bound_holds(n), "{g}");
            for d in [0.1, 0.3, 0.5, 0.7, 0.9] {
                assert!(c.high_index_bound_holds(n, d), "{g} {d}");
            }
        }
    }
}

#[test]
fn move_sums_constant_over_random_games() {
    for n in [50u64, 100, 200] {
        let cfg = SampleConfig {
            measure: MeasureKind::RandomPlay,
            seed: 7 + n,
            count: 10_000,
            threads: 0,
        };
        let games = sample_games(n, &cfg, &Limits::default()).unwrap();
        let first = games[0].counts();
        let want: Vec<u64> = (2..first.bins()).map(|k| first.movesum(k)).collect();
        for g in &games {
            let c = g.counts();
            let s: Vec<u64> = (2..c.bins()).map(|k| c.movesum(k)).collect();
            assert_eq!(s, want);
            assert!(c.exception_bound_holds(n));
        }
    }
}

#[test]
fn out_degree_bounded_on_full_graphs() {
    for n in 2..=30 {
        let g = StateGraph::build(n, 1_000_000).unwrap();
        let bins = fib_index(n).unwrap();
        assert!(g.max_out_degree() <= 2 * bins - 3, "N={n}");
        assert_eq!(g.state(0), &GameState::initial(n).unwrap());
    }
}
