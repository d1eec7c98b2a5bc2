mod common;

use std::collections::{BTreeSet, HashMap};

use divpop_core::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn setup(seed: u64, s: usize, k: usize) -> (ChaCha8Rng, Game) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = common::random_game(&mut rng, s, k);
    (rng, g)
}

fn relabel_both(rng: &mut ChaCha8Rng, g: &Game, os: [&Outcome; 2]) -> [Outcome; 2] {
    let mut map = HashMap::new();
    for c in agent_classes(g) {
        let mut to = c.members.clone();
        to.shuffle(rng);
        map.extend(c.members.into_iter().zip(to));
    }
    os.map(|o| Outcome {
        rooms: o
            .rooms
            .iter()
            .map(|r| r.iter().map(|a| map[a].clone()).collect())
            .collect(),
    })
}

fn ids(list: &[&str]) -> BTreeSet<String> {
    list.iter().map(|s| s.to_string()).collect()
}

#[test]
fn rotation_beats_every_top_type_outcome() {
    let g = counterexample_game();
    for o in top_type_outcomes() {
        let [_, x2, x3, x4] = top_type_choice(&o).unwrap();
        let challenger = rotation_challenger(&o).unwrap();
        let rep = popularity_margin(&g, &challenger, &o, None).unwrap();
        assert_eq!(rep.margin, 1);
        assert_eq!(rep.improved, ids(&[&x3, &x4]));
        assert_eq!(rep.worsened, ids(&[&x2]));
        assert_eq!(common::margin(&g, &challenger.rooms, &o.rooms), 1);
    }
}

#[test]
fn counterexample_has_no_popular_outcome() {
    let g = counterexample_game();
    assert_eq!(find_popular(&g, &Search::bruteforce()).unwrap(), None);
    assert_eq!(find_popular(&g, &Search::signature()).unwrap(), None);
}

#[test]
fn strict_reduction_monolith_depends_on_cover() {
    let solvable = X3CInstance::new(3, vec![[1, 2, 3]]).unwrap();
    let b = build_strict_reduction(&solvable).unwrap();
    let mono = monolithic_outcome(&b);
    let v = is_strictly_popular(&b.game, &mono, &Search::signature()).unwrap();
    assert_eq!(v.status, Status::NotStrictlyPopular);
    let w = v.witness.unwrap();
    assert_eq!(common::margin(&b.game, &w.rooms, &mono.rooms), v.margin.unwrap());
    assert!(v.margin.unwrap() >= 0);
    let reduced = reduced_outcome(&b, &[0], None).unwrap();
    assert_eq!(common::margin(&b.game, &reduced.rooms, &mono.rooms), 0);

    let unsolvable = X3CInstance::new(6, vec![[1, 2, 3], [1, 4, 5]]).unwrap();
    let b = build_strict_reduction(&unsolvable).unwrap();
    let mono = monolithic_outcome(&b);
    let v = is_strictly_popular(&b.game, &mono, &Search::signature()).unwrap();
    assert_eq!(v.status, Status::StrictlyPopular);
    assert!(v.margin.unwrap() < 0);
}

#[test]
fn brute_force_respects_the_cap() {
    let g = counterexample_game();
    let o = top_type_outcomes().remove(0);
    let err = best_challenger(&g, &o, &Search::bruteforce().with_cap(10)).unwrap_err();
    assert_eq!(err.code(), "cap-exceeded");
}

#[test]
fn verdicts_serialize_in_snake_case() {
    let g = counterexample_game();
    let o = top_type_outcomes().remove(0);
    let v = is_popular(&g, &o, &Search::signature()).unwrap();
    let text = serde_json::to_string(&v).unwrap();
    assert!(text.contains("\"not_popular\""));
    let back: PopularityVerdict = serde_json::from_str(&text).unwrap();
    assert_eq!(back, v);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn margin_is_antisymmetric(seed: u64, s in 1usize..=4, k in 1usize..=4) {
        let (mut rng, g) = setup(seed, s, k);
        let a = common::random_outcome(&mut rng, &g);
        let b = common::random_outcome(&mut rng, &g);
        let ab = popularity_margin(&g, &a, &b, None).unwrap();
        let ba = popularity_margin(&g, &b, &a, None).unwrap();
        prop_assert_eq!(ab.margin, -ba.margin);
        prop_assert_eq!(&ab.improved, &ba.worsened);
        prop_assert_eq!(ab.margin, ab.improved.len() as i64 - ab.worsened.len() as i64);
        prop_assert_eq!(ab.margin, common::margin(&g, &a.rooms, &b.rooms));
        prop_assert_eq!(popularity_margin(&g, &a, &a, None).unwrap().margin, 0);
    }

    #[test]
    fn margin_adds_over_a_split(seed: u64, s in 1usize..=4, k in 1usize..=4) {
        let (mut rng, g) = setup(seed, s, k);
        let a = common::random_outcome(&mut rng, &g);
        let b = common::random_outcome(&mut rng, &g);
        let (left, right): (BTreeSet<String>, BTreeSet<String>) =
            common::all_ids(&g).into_iter().partition(|_| rng.gen_bool(0.5));
        let whole = popularity_margin(&g, &a, &b, None).unwrap().margin;
        let l = popularity_margin(&g, &a, &b, Some(&left)).unwrap().margin;
        let r = popularity_margin(&g, &a, &b, Some(&right)).unwrap().margin;
        prop_assert_eq!(l + r, whole);
    }

    #[test]
    fn margin_ignores_relabeling(seed: u64, s in 1usize..=4, k in 1usize..=4) {
        let (mut rng, g) = setup(seed, s, k);
        let a = common::random_outcome(&mut rng, &g);
        let b = common::random_outcome(&mut rng, &g);
        let [a2, b2] = relabel_both(&mut rng, &g, [&a, &b]);
        prop_assert_eq!(
            popularity_margin(&g, &a, &b, None).unwrap().margin,
            popularity_margin(&g, &a2, &b2, None).unwrap().margin
        );
    }

    #[test]
    fn popular_verdicts_agree_with_oracle(seed: u64, s in 1usize..=4, k in 1usize..=4) {
        prop_assume!(s * k <= 8);
        let (mut rng, g) = setup(seed, s, k);
        let o = common::random_outcome(&mut rng, &g);
        let oracle = common::best_margin(&g, &o);
        for search in [Search::bruteforce(), Search::signature()] {
            let v = is_popular(&g, &o, &search).unwrap();
            prop_assert_eq!(v.margin, Some(oracle));
            prop_assert_eq!(v.status == Status::Popular, oracle <= 0);
            if let Some(w) = &v.witness {
                validate_outcome(&g, w).unwrap();
                prop_assert_eq!(common::margin(&g, &w.rooms, &o.rooms), oracle);
            }
            let best = best_challenger(&g, &o, &search).unwrap();
            prop_assert_eq!(best.margin, oracle);
            prop_assert_eq!(common::margin(&g, &best.outcome.rooms, &o.rooms), oracle);
        }
    }

    #[test]
    fn strict_verdicts_agree_with_oracle(seed: u64, s in 1usize..=4, k in 1usize..=4) {
        prop_assume!(s * k <= 8);
        let (mut rng, g) = setup(seed, s, k);
        let o = common::random_outcome(&mut rng, &g);
        let oracle = common::best_other_margin(&g, &o);
        let strict = oracle.is_none_or(|m| m < 0);
        for search in [Search::bruteforce(), Search::signature()] {
            let v = is_strictly_popular(&g, &o, &search).unwrap();
            prop_assert_eq!(v.status == Status::StrictlyPopular, strict);
            if strict {
                prop_assert!(v.witness.is_none());
            } else {
                let w = v.witness.clone().unwrap();
                prop_assert!(common::as_set(&w.rooms) != common::as_set(&o.rooms));
                prop_assert_eq!(Some(common::margin(&g, &w.rooms, &o.rooms)), v.margin);
                prop_assert!(v.margin.unwrap() >= 0);
            }
        }
    }

    #[test]
    fn find_popular_agrees_with_oracle(seed: u64, s in 1usize..=3, k in 1usize..=3) {
        prop_assume!(s * k <= 7);
        let (_, g) = setup(seed, s, k);
        let exists = common::naive_partitions(&common::all_ids(&g), s)
            .iter()
            .any(|p| common::best_margin(&g, &Outcome { rooms: p.clone() }) <= 0);
        for search in [Search::bruteforce(), Search::signature()] {
            let found = find_popular(&g, &search).unwrap();
            prop_assert_eq!(found.is_some(), exists);
            if let Some(o) = found {
                prop_assert!(common::best_margin(&g, &o) <= 0);
            }
        }
    }
}
