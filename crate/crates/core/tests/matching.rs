mod common;

use std::collections::BTreeSet;

use divpop_core::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn dich(s: usize, approve: &[usize]) -> PreferenceOrder {
    PreferenceOrder::dichotomous(s, approve).unwrap()
}

#[test]
fn six_classes() {
    let cases = [
        (Agent::red("r", dich(2, &[2])), Color::Red, S2Kind::Pure),
        (Agent::red("r", dich(2, &[1])), Color::Red, S2Kind::Mixed),
        (Agent::red("r", dich(2, &[0])), Color::Red, S2Kind::Indifferent),
        (Agent::blue("b", dich(2, &[0])), Color::Blue, S2Kind::Pure),
        (Agent::blue("b", dich(2, &[1, 2])), Color::Blue, S2Kind::Mixed),
        (Agent::blue("b", dich(2, &[0, 1])), Color::Blue, S2Kind::Indifferent),
    ];
    for (a, color, kind) in cases {
        assert_eq!(classify_s2(&a).unwrap(), S2Class { color, kind });
    }
}

#[test]
fn other_room_sizes_are_rejected() {
    let a = Agent::red("r", dich(3, &[1]));
    assert_eq!(classify_s2(&a).unwrap_err().code(), "room-size-not-two");
    let g = counterexample_game();
    assert_eq!(solve_s2(&g).unwrap_err().code(), "room-size-not-two");
    let r = Agent::red("r", dich(2, &[1]));
    assert_eq!(pair_weight(&r, &r).unwrap_err().code(), "same-agent");
}

#[test]
fn mixed_agents_pair_across_colors() {
    let g = Game::new(
        2,
        vec![Agent::red("r1", dich(2, &[1])), Agent::red("r2", dich(2, &[2]))],
        vec![Agent::blue("b1", dich(2, &[1])), Agent::blue("b2", dich(2, &[0]))],
    )
    .unwrap();
    let m = max_weight_matching(&g).unwrap();
    assert_eq!(m.weight, 2);
    let o = solve_s2(&g).unwrap();
    assert_eq!(happy_count(&g, &o).unwrap(), 2);
    assert_eq!(is_popular(&g, &o, &Search::bruteforce()).unwrap().status, Status::Popular);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pair_weight_counts_happy_agents(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_s2_game(&mut rng, 12);
        let agents: Vec<&Agent> = g.red.iter().chain(&g.blue).collect();
        for (i, a) in agents.iter().enumerate() {
            for b in &agents[i + 1..] {
                prop_assert_eq!(pair_weight(a, b).unwrap(), common::pair_happiness(a, b));
            }
        }
    }

    #[test]
    fn matching_is_perfect_and_optimal(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_s2_game(&mut rng, 10);
        let m = max_weight_matching(&g).unwrap();
        let covered: BTreeSet<&String> = m.pairs.iter().flat_map(|(a, b)| [a, b]).collect();
        prop_assert_eq!(covered.len(), g.num_agents());
        prop_assert_eq!(m.pairs.len() * 2, g.num_agents());
        prop_assert_eq!(matching_weight(&g, &m.pairs).unwrap(), m.weight);
        let best = common::perfect_matchings(&common::all_ids(&g))
            .iter()
            .map(|p| matching_weight(&g, p).unwrap())
            .max()
            .unwrap();
        prop_assert_eq!(m.weight, best);
    }

    #[test]
    fn solver_output_is_popular(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_s2_game(&mut rng, 10);
        let o = solve_s2(&g).unwrap();
        validate_outcome(&g, &o).unwrap();
        prop_assert_eq!(&canonicalize(&g, &o), &o);
        prop_assert!(common::best_margin(&g, &o) <= 0);
        prop_assert_eq!(happy_count(&g, &o).unwrap() as u32, max_weight_matching(&g).unwrap().weight);
    }

    #[test]
    fn happy_count_matches_pair_sum(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_s2_game(&mut rng, 12);
        let o = common::random_outcome(&mut rng, &g);
        let by_pairs: u32 = o
            .rooms
            .iter()
            .map(|r| common::pair_happiness(g.agent(&r[0]).unwrap(), g.agent(&r[1]).unwrap()))
            .sum();
        prop_assert_eq!(happy_count(&g, &o).unwrap() as u32, by_pairs);
    }
}
