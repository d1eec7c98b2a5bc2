//! A nine-agent game with room size three that has no popular outcome.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{canonicalize, validate_outcome, Agent, Game, Outcome, PreferenceOrder};

/// Red `r1..r3`, blue `b1..b6`, room size 3.
pub fn counterexample_game() -> Game {
    let tri = |approve: &[usize], neutral: &[usize]| {
        PreferenceOrder::trichotomous(3, approve, neutral).expect("fixed preferences are valid")
    };
    let red = vec![
        Agent::red("r1", tri(&[1], &[])),
        Agent::red("r2", tri(&[2], &[])),
        Agent::red("r3", tri(&[2], &[])),
    ];
    let mut blue: Vec<Agent> = (1..=4)
        .map(|i| Agent::blue(format!("b{i}"), tri(&[1], &[2])))
        .collect();
    blue.extend((5..=6).map(|i| Agent::blue(format!("b{i}"), tri(&[0], &[]))));
    Game::new(3, red, blue).expect("fixed game is valid")
}

/// The top-type outcome `{r1, x1, x2}, {r2, r3, x3}, {b5, b6, x4}` for a
/// choice `[x1, x2, x3, x4]` of distinct agents among `b1..b4`.
pub fn top_type_outcome(choice: [&str; 4]) -> Result<Outcome> {
    let pool: BTreeSet<&str> = ["b1", "b2", "b3", "b4"].into();
    let picked: BTreeSet<&str> = choice.iter().copied().collect();
    if picked != pool {
        return Err(Error::NotTopType);
    }
    let [x1, x2, x3, x4] = choice;
    let g = counterexample_game();
    Ok(canonicalize(
        &g,
        &Outcome::new(vec![
            vec!["r1", x1, x2],
            vec!["r2", "r3", x3],
            vec!["b5", "b6", x4],
        ]),
    ))
}

/// Every distinct top-type outcome, in canonical order.
pub fn top_type_outcomes() -> Vec<Outcome> {
    let b = ["b1", "b2", "b3", "b4"];
    let mut out = BTreeSet::new();
    for x3 in b {
        for x4 in b.iter().copied().filter(|&x| x != x3) {
            let rest: Vec<&str> = b.iter().copied().filter(|&x| x != x3 && x != x4).collect();
            out.insert(
                top_type_outcome([rest[0], rest[1], x3, x4])
                    .expect("choices are permutations")
                    .rooms,
            );
        }
    }
    out.into_iter().map(|rooms| Outcome { rooms }).collect()
}

/// Splits a top-type outcome into `[x1, x2, x3, x4]`, with `x2` the larger
/// of the two blues roomed with `r1`.
pub fn top_type_choice(o: &Outcome) -> Result<[String; 4]> {
    let g = counterexample_game();
    validate_outcome(&g, o).map_err(|_| Error::NotTopType)?;
    let room = |id: &str| o.room_of(id).expect("validated outcome").to_vec();
    let blues_of = |room: &[String]| -> Vec<String> {
        let mut v: Vec<String> = room
            .iter()
            .filter(|a| ["b1", "b2", "b3", "b4"].contains(&a.as_str()))
            .cloned()
            .collect();
        v.sort();
        v
    };
    let p1 = room("r1");
    let p2 = room("r2");
    let p3 = room("b5");
    let ok = p2.contains(&"r3".to_string())
        && p3.contains(&"b6".to_string())
        && blues_of(&p1).len() == 2
        && blues_of(&p2).len() == 1
        && blues_of(&p3).len() == 1;
    if !ok {
        return Err(Error::NotTopType);
    }
    let first = blues_of(&p1);
    Ok([
        first[0].clone(),
        first[1].clone(),
        blues_of(&p2)[0].clone(),
        blues_of(&p3)[0].clone(),
    ])
}

/// Moves `x3` into `P1`, `x4` into `P2` and `x2` into `P3`; the result
/// beats the top-type outcome by one vote.
pub fn rotation_challenger(o: &Outcome) -> Result<Outcome> {
    let [x1, x2, x3, x4] = top_type_choice(o)?;
    let g = counterexample_game();
    Ok(canonicalize(
        &g,
        &Outcome::new(vec![
            vec!["r1".to_string(), x1, x3],
            vec!["r2".to_string(), "r3".to_string(), x4],
            vec!["b5".to_string(), "b6".to_string(), x2],
        ]),
    ))
}
