//! Seeded random games for `selftest`.

use divpop_core::{Agent, Game, Outcome, PreferenceOrder};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn random_prefs(rng: &mut ChaCha8Rng, s: usize) -> PreferenceOrder {
    let ranks: Vec<u32> = (0..=s).map(|_| rng.gen_range(0..=2)).collect();
    PreferenceOrder::from_ranks(ranks).expect("ranks are in range")
}

/// Game with room size `s`, `k` rooms and a random color split.
pub fn random_game(rng: &mut ChaCha8Rng, s: usize, k: usize) -> Game {
    let n = s * k;
    let reds = rng.gen_range(0..=n);
    let red = (0..reds)
        .map(|i| Agent::red(format!("r{i}"), random_prefs(rng, s)))
        .collect();
    let blue = (0..n - reds)
        .map(|i| Agent::blue(format!("b{i}"), random_prefs(rng, s)))
        .collect();
    Game::new(s, red, blue).expect("sizes divide")
}

pub fn random_outcome(rng: &mut ChaCha8Rng, g: &Game) -> Outcome {
    let mut ids: Vec<String> = g.agents().map(|a| a.id.clone()).collect();
    ids.shuffle(rng);
    Outcome {
        rooms: ids.chunks(g.s).map(|c| c.to_vec()).collect(),
    }
}
