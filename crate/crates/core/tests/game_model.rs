mod common;

use std::collections::{BTreeSet, HashMap, HashSet};

use divpop_core::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_game(seed: u64, s: usize, k: usize) -> (ChaCha8Rng, Game) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = common::random_game(&mut rng, s, k);
    (rng, g)
}

/// Shuffles rooms and members without changing the partition.
fn scramble(rng: &mut ChaCha8Rng, o: &Outcome) -> Outcome {
    let mut rooms = o.rooms.clone();
    for r in &mut rooms {
        r.shuffle(rng);
    }
    rooms.shuffle(rng);
    Outcome { rooms }
}

/// Permutes agents within each class.
fn relabel(rng: &mut ChaCha8Rng, g: &Game, o: &Outcome) -> Outcome {
    let mut map = HashMap::new();
    for c in agent_classes(g) {
        let mut to = c.members.clone();
        to.shuffle(rng);
        map.extend(c.members.into_iter().zip(to));
    }
    Outcome {
        rooms: o
            .rooms
            .iter()
            .map(|r| r.iter().map(|a| map[a].clone()).collect())
            .collect(),
    }
}

#[test]
fn counterexample_has_280_outcomes_and_four_classes() {
    let g = counterexample_game();
    assert_eq!(labeled_count(9, 3), Some(280));
    assert_eq!(enumerate_outcomes(&g, EnumerationMode::Labeled, DEFAULT_CAP).unwrap().len(), 280);
    let classes = agent_classes(&g);
    let members: Vec<Vec<&str>> = classes
        .iter()
        .map(|c| c.members.iter().map(String::as_str).collect())
        .collect();
    assert_eq!(
        members,
        vec![
            vec!["b1", "b2", "b3", "b4"],
            vec!["b5", "b6"],
            vec!["r1"],
            vec!["r2", "r3"],
        ]
    );
}

#[test]
fn counterexample_orbits_cover_all_outcomes() {
    let g = counterexample_game();
    let reps = enumerate_outcomes(&g, EnumerationMode::Orbit, DEFAULT_CAP).unwrap();
    let mut seen = HashSet::new();
    for r in &reps {
        for o in expand_orbit(&g, r, DEFAULT_CAP).unwrap() {
            assert!(seen.insert(canonicalize(&g, &o)));
        }
    }
    assert_eq!(seen.len(), 280);
}

#[test]
fn counterexample_top_type_levels() {
    let g = counterexample_game();
    for o in top_type_outcomes() {
        let lv = common::levels(&g, &o);
        assert_eq!(lv[&1].len(), 1);
        assert_eq!(lv[&2].len(), 1);
        let sets = level_sets(&g, &o).unwrap();
        assert_eq!(sets.neutral, lv[&1]);
        assert_eq!(sets.disapprove, lv[&2]);
    }
}

#[test]
fn fractions_compare_numerically() {
    assert_eq!(Fraction::new(1, 2).unwrap(), Fraction::new(2, 4).unwrap());
    assert!(Fraction::new(1, 3).unwrap() < Fraction::new(1, 2).unwrap());
    assert_eq!(Fraction::new(2, 4).unwrap().numerator_at(6), Some(3));
    assert_eq!(Fraction::new(1, 3).unwrap().numerator_at(4), None);
    assert_eq!(theta(5, 4).unwrap_err().code(), "fraction-range");
}

#[test]
fn invalid_games_and_outcomes_are_rejected() {
    let p = PreferenceOrder::indifferent(2).unwrap();
    let err = Game::new(2, vec![Agent::red("a", p.clone())], vec![]).unwrap_err();
    assert_eq!(err.code(), "divisibility");
    let err = Game::new(
        2,
        vec![Agent::red("a", p.clone())],
        vec![Agent::blue("a", p.clone())],
    )
    .unwrap_err();
    assert_eq!(err.code(), "duplicate-id");
    let g = Game::new(2, vec![Agent::red("a", p.clone())], vec![Agent::blue("b", p)]).unwrap();
    let bad = Outcome::new(vec![vec!["a"]]);
    assert_eq!(validate_outcome(&g, &bad).unwrap_err().code(), "missing-agent");
    let bad = Outcome::new(vec![vec!["a", "b", "c"]]);
    assert_eq!(validate_outcome(&g, &bad).unwrap_err().code(), "unknown-agent");
}

#[test]
fn enumeration_cap_is_enforced() {
    let g = counterexample_game();
    let err = enumerate_outcomes(&g, EnumerationMode::Labeled, 100).unwrap_err();
    assert_eq!(err.code(), "cap-exceeded");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn labeled_count_matches_naive(s in 1usize..=4, k in 1usize..=3) {
        prop_assume!(s * k <= 9);
        let ids: Vec<String> = (0..s * k).map(|i| format!("a{i}")).collect();
        let naive = common::naive_partitions(&ids, s).len() as u128;
        prop_assert_eq!(labeled_count(s * k, s), Some(naive));
    }

    #[test]
    fn labeled_enumeration_matches_naive(seed: u64, s in 1usize..=4, k in 1usize..=3) {
        prop_assume!(s * k <= 8);
        let (_, g) = small_game(seed, s, k);
        let listed: Vec<_> = enumerate_outcomes(&g, EnumerationMode::Labeled, DEFAULT_CAP)
            .unwrap()
            .iter()
            .map(|o| common::as_set(&o.rooms))
            .collect();
        let unique: HashSet<_> = listed.iter().cloned().collect();
        let naive: HashSet<_> = common::naive_partitions(&common::all_ids(&g), s)
            .iter()
            .map(|p| common::as_set(p))
            .collect();
        prop_assert_eq!(unique.len(), listed.len());
        prop_assert_eq!(unique, naive);
    }

    #[test]
    fn canonical_form_identifies_partitions(seed: u64, s in 1usize..=4, k in 1usize..=3) {
        let (mut rng, g) = small_game(seed, s, k);
        let a = common::random_outcome(&mut rng, &g);
        let b = common::random_outcome(&mut rng, &g);
        let ca = canonicalize(&g, &a);
        prop_assert_eq!(&canonicalize(&g, &ca), &ca);
        prop_assert_eq!(&canonicalize(&g, &scramble(&mut rng, &a)), &ca);
        let same = common::as_set(&a.rooms) == common::as_set(&b.rooms);
        prop_assert_eq!(canonicalize(&g, &b) == ca, same);
    }

    #[test]
    fn orbits_partition_the_outcomes(seed: u64, s in 1usize..=4, k in 1usize..=3) {
        prop_assume!(s * k <= 8);
        let (_, g) = small_game(seed, s, k);
        let reps = enumerate_outcomes(&g, EnumerationMode::Orbit, DEFAULT_CAP).unwrap();
        let mut seen = HashSet::new();
        let mut keys = BTreeSet::new();
        for r in &reps {
            prop_assert!(keys.insert(orbit_key(&g, r).unwrap()));
            for o in expand_orbit(&g, r, DEFAULT_CAP).unwrap() {
                prop_assert_eq!(orbit_key(&g, &o).unwrap(), orbit_key(&g, r).unwrap());
                prop_assert!(seen.insert(common::as_set(&o.rooms)));
            }
        }
        prop_assert_eq!(seen.len() as u128, labeled_count(s * k, s).unwrap());
    }

    #[test]
    fn orbit_key_ignores_relabeling(seed: u64, s in 1usize..=4, k in 1usize..=4) {
        let (mut rng, g) = small_game(seed, s, k);
        let o = common::random_outcome(&mut rng, &g);
        let moved = relabel(&mut rng, &g, &o);
        prop_assert_eq!(orbit_key(&g, &o).unwrap(), orbit_key(&g, &moved).unwrap());
        prop_assert_eq!(signature_of(&g, &o), signature_of(&g, &moved));
    }

    #[test]
    fn signatures_are_exhaustive(seed: u64, s in 1usize..=4, k in 1usize..=3) {
        prop_assume!(s * k <= 8);
        let (_, g) = small_game(seed, s, k);
        let sigs: HashSet<_> = enumerate_signatures(&g).into_iter().collect();
        let seen: HashSet<_> = enumerate_outcomes(&g, EnumerationMode::Labeled, DEFAULT_CAP)
            .unwrap()
            .iter()
            .map(|o| signature_of(&g, o))
            .collect();
        prop_assert_eq!(sigs, seen);
    }

    #[test]
    fn level_sets_match_ranks(seed: u64, s in 1usize..=5, k in 1usize..=3) {
        let (mut rng, g) = small_game(seed, s, k);
        let o = common::random_outcome(&mut rng, &g);
        let lv = common::levels(&g, &o);
        let sets = level_sets(&g, &o).unwrap();
        prop_assert_eq!(&sets.approve, &lv[&0]);
        prop_assert_eq!(&sets.neutral, &lv[&1]);
        prop_assert_eq!(&sets.disapprove, &lv[&2]);
    }

    #[test]
    fn game_json_round_trips(seed: u64, s in 1usize..=4, k in 1usize..=3) {
        let (_, g) = small_game(seed, s, k);
        let text = game_to_json(&g);
        prop_assert_eq!(parse_game(&text).unwrap(), g);
    }

    #[test]
    fn preference_comparisons_follow_ranks(ranks in prop::collection::vec(0u32..4, 2..7)) {
        let p = PreferenceOrder::from_ranks(ranks.clone()).unwrap();
        let s = ranks.len() - 1;
        for i in 0..=s {
            for j in 0..=s {
                let expected = match (ranks[i], ranks[j]) {
                    (a, b) if a < b => Comparison::Prefer1,
                    (a, b) if a > b => Comparison::Prefer2,
                    _ => Comparison::Indifferent,
                };
                prop_assert_eq!(p.compare_counts(i, j), expected);
            }
        }
    }
}
