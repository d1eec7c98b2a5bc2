//! Popular outcomes for room size two.
//!
//! Every room of size two is a pair, and an agent's satisfaction depends
//! only on whether its partner has the same color. Pair weights count the
//! happy agents in a pair, so a maximum-weight perfect matching maximizes
//! the number of happy agents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{validate_game, Agent, Color, Game, Outcome};
use crate::table::AgentTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum S2Kind {
    /// Strictly prefers a room of its own color.
    Pure,
    /// Strictly prefers a mixed room.
    Mixed,
    Indifferent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct S2Class {
    pub color: Color,
    pub kind: S2Kind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedMatching {
    pub pairs: Vec<(String, String)>,
    pub weight: u32,
}

pub fn classify_s2(agent: &Agent) -> Result<S2Class> {
    let s = agent.prefs.room_size();
    if s != 2 {
        return Err(Error::RoomSizeNotTwo(s));
    }
    let same = match agent.color {
        Color::Red => 2,
        Color::Blue => 0,
    };
    let kind = match agent.prefs.score(same, 1) {
        1 => S2Kind::Pure,
        -1 => S2Kind::Mixed,
        _ => S2Kind::Indifferent,
    };
    Ok(S2Class {
        color: agent.color,
        kind,
    })
}

fn happy_in(class: S2Class, mixed_room: bool) -> bool {
    match class.kind {
        S2Kind::Indifferent => true,
        S2Kind::Pure => !mixed_room,
        S2Kind::Mixed => mixed_room,
    }
}

/// Number of happy agents when `a` and `b` share a room.
pub fn pair_weight(a: &Agent, b: &Agent) -> Result<u32> {
    if a.id == b.id {
        return Err(Error::SameAgent);
    }
    let (ca, cb) = (classify_s2(a)?, classify_s2(b)?);
    let mixed = a.color != b.color;
    Ok(happy_in(ca, mixed) as u32 + happy_in(cb, mixed) as u32)
}

/// Agents whose room fraction is one of their most preferred feasible
/// fractions.
pub fn happy_count(g: &Game, o: &Outcome) -> Result<usize> {
    if g.s != 2 {
        return Err(Error::RoomSizeNotTwo(g.s));
    }
    let t = AgentTable::new(g)?;
    let profile = t.profile(&t.rooms_of(g, o)?);
    Ok(t.agents
        .iter()
        .enumerate()
        .filter(|(i, a)| a.prefs.is_top(a.color, profile[*i]))
        .count())
}

/// Per-color agents split by kind, each list in ascending id order.
struct Side<'g> {
    pure: Vec<&'g Agent>,
    mixed: Vec<&'g Agent>,
    indifferent: Vec<&'g Agent>,
}

impl<'g> Side<'g> {
    fn new(agents: &'g [Agent]) -> Result<Self> {
        let mut side = Side {
            pure: Vec::new(),
            mixed: Vec::new(),
            indifferent: Vec::new(),
        };
        let mut sorted: Vec<&Agent> = agents.iter().collect();
        sorted.sort_by(|a, b| a.id.cmp(&b.id));
        for a in sorted {
            match classify_s2(a)?.kind {
                S2Kind::Pure => side.pure.push(a),
                S2Kind::Mixed => side.mixed.push(a),
                S2Kind::Indifferent => side.indifferent.push(a),
            }
        }
        Ok(side)
    }

    fn len(&self) -> usize {
        self.pure.len() + self.mixed.len() + self.indifferent.len()
    }

    /// Happy agents of this color when `t` of them sit in mixed rooms,
    /// filled by mixed agents first, then indifferent, then pure.
    fn happy(&self, t: usize) -> usize {
        let (p, m, i) = (self.pure.len(), self.mixed.len(), self.indifferent.len());
        p + i + t.min(m) - t.saturating_sub(m + i)
    }

    /// Agents in the order they are sent to mixed rooms.
    fn mixing_order(&self) -> Vec<&'g Agent> {
        self.mixed
            .iter()
            .chain(&self.indifferent)
            .chain(&self.pure)
            .copied()
            .collect()
    }
}

/// A maximum-weight perfect matching of the agents. Among optimal
/// matchings the one with the fewest mixed pairs is returned.
pub fn max_weight_matching(g: &Game) -> Result<WeightedMatching> {
    if g.s != 2 {
        return Err(Error::RoomSizeNotTwo(g.s));
    }
    validate_game(g)?;
    let red = Side::new(&g.red)?;
    let blue = Side::new(&g.blue)?;
    let (nr, nb) = (red.len(), blue.len());
    let best_t = (nr % 2..=nr.min(nb))
        .step_by(2)
        .max_by_key(|&t| (red.happy(t) + blue.happy(t), std::cmp::Reverse(t)))
        .expect("parity of red and blue counts agree");
    let reds = red.mixing_order();
    let blues = blue.mixing_order();
    let mut pairs: Vec<(String, String)> = Vec::with_capacity((nr + nb) / 2);
    for (r, b) in reds.iter().zip(&blues).take(best_t) {
        pairs.push((r.id.clone(), b.id.clone()));
    }
    for rest in [&reds[best_t..], &blues[best_t..]] {
        let mut left: Vec<&Agent> = rest.to_vec();
        left.sort_by(|a, b| a.id.cmp(&b.id));
        for pair in left.chunks(2) {
            pairs.push((pair[0].id.clone(), pair[1].id.clone()));
        }
    }
    let weight = (red.happy(best_t) + blue.happy(best_t)) as u32;
    Ok(WeightedMatching { pairs, weight })
}

/// Sum of pair weights of an arbitrary perfect matching.
pub fn matching_weight(g: &Game, pairs: &[(String, String)]) -> Result<u32> {
    let mut total = 0;
    for (a, b) in pairs {
        let a = g.agent(a).ok_or_else(|| Error::UnknownAgent(a.clone()))?;
        let b = g.agent(b).ok_or_else(|| Error::UnknownAgent(b.clone()))?;
        total += pair_weight(a, b)?;
    }
    Ok(total)
}

/// The outcome induced by a maximum-weight perfect matching; popular.
pub fn solve_s2(g: &Game) -> Result<Outcome> {
    let m = max_weight_matching(g)?;
    let o = Outcome::new(m.pairs.into_iter().map(|(a, b)| vec![a, b]).collect());
    Ok(crate::model::canonicalize(g, &o))
}
