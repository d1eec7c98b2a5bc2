//! Test oracles written independently of the library's search code.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use divpop_core::{Agent, Game, Outcome, PreferenceOrder};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Partition = Vec<Vec<String>>;

/// Every partition of `ids` into rooms of size `s`: agent `i` joins an open
/// room or opens the next one, so each partition appears once.
pub fn naive_partitions(ids: &[String], s: usize) -> Vec<Partition> {
    fn go(ids: &[String], s: usize, k: usize, at: usize, rooms: &mut Partition, out: &mut Vec<Partition>) {
        if at == ids.len() {
            out.push(rooms.clone());
            return;
        }
        for r in 0..rooms.len() {
            if rooms[r].len() < s {
                rooms[r].push(ids[at].clone());
                go(ids, s, k, at + 1, rooms, out);
                rooms[r].pop();
            }
        }
        if rooms.len() < k {
            rooms.push(vec![ids[at].clone()]);
            go(ids, s, k, at + 1, rooms, out);
            rooms.pop();
        }
    }
    let k = ids.len() / s;
    let mut out = Vec::new();
    go(ids, s, k, 0, &mut Vec::new(), &mut out);
    out
}

pub fn all_ids(g: &Game) -> Vec<String> {
    g.red.iter().chain(&g.blue).map(|a| a.id.clone()).collect()
}

/// Partition as a set of sets, for order-free comparison.
pub fn as_set(rooms: &[Vec<String>]) -> BTreeSet<BTreeSet<String>> {
    rooms.iter().map(|r| r.iter().cloned().collect()).collect()
}

/// Red count of each agent's room.
pub fn red_counts(g: &Game, rooms: &[Vec<String>]) -> HashMap<String, usize> {
    let reds: BTreeSet<&str> = g.red.iter().map(|a| a.id.as_str()).collect();
    let mut out = HashMap::new();
    for r in rooms {
        let c = r.iter().filter(|id| reds.contains(id.as_str())).count();
        for id in r {
            out.insert(id.clone(), c);
        }
    }
    out
}

/// Agents preferring `a` minus agents preferring `b`, straight from ranks.
pub fn margin(g: &Game, a: &[Vec<String>], b: &[Vec<String>]) -> i64 {
    let (ca, cb) = (red_counts(g, a), red_counts(g, b));
    g.red
        .iter()
        .chain(&g.blue)
        .map(|ag| {
            let (ra, rb) = (ag.prefs.ranks()[ca[&ag.id]], ag.prefs.ranks()[cb[&ag.id]]);
            (rb > ra) as i64 - (ra > rb) as i64
        })
        .sum()
}

/// Largest margin any partition achieves over `o` (including `o`).
pub fn best_margin(g: &Game, o: &Outcome) -> i64 {
    naive_partitions(&all_ids(g), g.s)
        .iter()
        .map(|p| margin(g, p, &o.rooms))
        .max()
        .unwrap()
}

/// Largest margin any other partition achieves over `o`.
pub fn best_other_margin(g: &Game, o: &Outcome) -> Option<i64> {
    let own = as_set(&o.rooms);
    naive_partitions(&all_ids(g), g.s)
        .iter()
        .filter(|p| as_set(p) != own)
        .map(|p| margin(g, p, &o.rooms))
        .max()
}

/// Level of fraction `j` for an agent: 0 approve, 1 neutral, 2 disapprove.
pub fn level(a: &Agent, j: usize) -> u8 {
    let ranks = a.prefs.ranks();
    let top = *ranks.iter().max().unwrap();
    match ranks[j] {
        0 => 0,
        r if r == top => 2,
        _ => 1,
    }
}

/// Agents at each level under `o`, keyed 0/1/2.
pub fn levels(g: &Game, o: &Outcome) -> BTreeMap<u8, BTreeSet<String>> {
    let counts = red_counts(g, &o.rooms);
    let mut out: BTreeMap<u8, BTreeSet<String>> = (0..3).map(|l| (l, BTreeSet::new())).collect();
    for a in g.red.iter().chain(&g.blue) {
        out.get_mut(&level(a, counts[&a.id])).unwrap().insert(a.id.clone());
    }
    out
}

/// Random weak order over `s + 1` fractions.
pub fn random_prefs(rng: &mut ChaCha8Rng, s: usize) -> PreferenceOrder {
    match rng.gen_range(0..3) {
        0 => {
            let approve: Vec<usize> = (0..=s).filter(|_| rng.gen_bool(0.4)).collect();
            PreferenceOrder::dichotomous(s, &approve).unwrap()
        }
        1 => {
            let mut approve = Vec::new();
            let mut neutral = Vec::new();
            for j in 0..=s {
                match rng.gen_range(0..3) {
                    0 => approve.push(j),
                    1 => neutral.push(j),
                    _ => {}
                }
            }
            PreferenceOrder::trichotomous(s, &approve, &neutral).unwrap()
        }
        _ => PreferenceOrder::from_ranks((0..=s).map(|_| rng.gen_range(0..=s as u32)).collect())
            .unwrap(),
    }
}

/// Random game with room size `s` and `k` rooms. Agents of one color are
/// sometimes copies of each other so that classes have several members.
pub fn random_game(rng: &mut ChaCha8Rng, s: usize, k: usize) -> Game {
    let n = s * k;
    let reds = rng.gen_range(0..=n);
    let mut pool: Vec<PreferenceOrder> = (0..3).map(|_| random_prefs(rng, s)).collect();
    pool.shuffle(rng);
    let pick = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.5) {
            pool[rng.gen_range(0..pool.len())].clone()
        } else {
            random_prefs(rng, s)
        }
    };
    let red = (0..reds).map(|i| Agent::red(format!("r{i}"), pick(rng))).collect();
    let blue = (0..n - reds).map(|i| Agent::blue(format!("b{i}"), pick(rng))).collect();
    Game::new(s, red, blue).unwrap()
}

/// A random partition of the game's agents.
pub fn random_outcome(rng: &mut ChaCha8Rng, g: &Game) -> Outcome {
    let mut ids = all_ids(g);
    ids.shuffle(rng);
    Outcome {
        rooms: ids.chunks(g.s).map(|c| c.to_vec()).collect(),
    }
}

/// Random room-size-two game with at most `max_n` agents.
pub fn random_s2_game(rng: &mut ChaCha8Rng, max_n: usize) -> Game {
    let k = rng.gen_range(1..=max_n / 2);
    random_game(rng, 2, k)
}

/// Every perfect matching of `ids` (even length).
pub fn perfect_matchings(ids: &[String]) -> Vec<Vec<(String, String)>> {
    if ids.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for j in 1..ids.len() {
        let rest: Vec<String> = ids[1..]
            .iter()
            .enumerate()
            .filter(|(i, _)| i + 1 != j)
            .map(|(_, x)| x.clone())
            .collect();
        for mut m in perfect_matchings(&rest) {
            m.push((ids[0].clone(), ids[j].clone()));
            out.push(m);
        }
    }
    out
}

/// Happy agents in a pair, from ranks: an agent is happy when no feasible
/// fraction ranks strictly better than its own.
pub fn pair_happiness(a: &Agent, b: &Agent) -> u32 {
    let reds = a.color.eq(&divpop_core::Color::Red) as usize + b.color.eq(&divpop_core::Color::Red) as usize;
    [a, b]
        .iter()
        .filter(|x| {
            let ranks = x.prefs.ranks();
            let feasible: &[usize] = match x.color {
                divpop_core::Color::Red => &[1, 2],
                divpop_core::Color::Blue => &[0, 1],
            };
            feasible.iter().all(|&f| ranks[reds] <= ranks[f])
        })
        .count() as u32
}
