//! Roommate diversity games: agents of two colors, rooms of a fixed size,
//! and preferences that only look at the fraction of red agents in a room.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    /// Red counts this color can actually observe in a room of size `s`.
    /// A red agent never sits in an all-blue room and vice versa.
    pub fn possible_counts(self, s: usize) -> RangeInclusive<usize> {
        match self {
            Color::Red => 1..=s,
            Color::Blue => 0..=s.saturating_sub(1),
        }
    }

    pub fn is_possible(self, count: usize, s: usize) -> bool {
        self.possible_counts(s).contains(&count)
    }
}

/// Fraction `red / size` of red agents in a room.
///
/// Equality and ordering are numeric, so `1/2 == 2/4`.
#[derive(Debug, Clone, Copy)]
pub struct Fraction {
    red: usize,
    size: usize,
}

impl Fraction {
    pub fn new(red: usize, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::ZeroRoomSize);
        }
        if red > size {
            return Err(Error::FractionOutOfRange { red, size });
        }
        Ok(Fraction { red, size })
    }

    pub fn red(&self) -> usize {
        self.red
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Numerator `j` such that `j / s` equals this fraction, if one exists.
    pub fn numerator_at(&self, s: usize) -> Option<usize> {
        let scaled = self.red * s;
        (scaled % self.size == 0).then(|| scaled / self.size)
    }

    fn reduced(&self) -> (usize, usize) {
        let g = gcd(self.red, self.size);
        (self.red / g, self.size / g)
    }
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

impl PartialEq for Fraction {
    fn eq(&self, other: &Self) -> bool {
        self.red * other.size == other.red * self.size
    }
}

impl Eq for Fraction {}

impl Hash for Fraction {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.reduced().hash(state);
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.red * other.size).cmp(&(other.red * self.size))
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.red, self.size)
    }
}

/// The fraction of red agents in a room holding `red_count` red agents.
pub fn theta(red_count: usize, s: usize) -> Result<Fraction> {
    Fraction::new(red_count, s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Comparison {
    Prefer1,
    Prefer2,
    Indifferent,
}

/// Approval tier of a fraction: the top indifference class, the bottom one,
/// or anything in between.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Approve,
    Neutral,
    Disapprove,
}

/// A weak order over the fractions `0/s ..= s/s`, stored as ranks.
///
/// `ranks[j]` is the rank of `j/s`; a lower rank is strictly better and equal
/// ranks mean indifference. Ranks are kept normalized to `0..L`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PreferenceOrder {
    ranks: Vec<u32>,
}

impl PreferenceOrder {
    /// Builds an order from arbitrary ranks, compressing them to `0..L`
    /// while keeping their relative order.
    pub fn from_ranks(ranks: Vec<u32>) -> Result<Self> {
        if ranks.len() < 2 {
            return Err(Error::ZeroRoomSize);
        }
        let used: BTreeSet<u32> = ranks.iter().copied().collect();
        let remap: HashMap<u32, u32> = used
            .into_iter()
            .enumerate()
            .map(|(i, r)| (r, i as u32))
            .collect();
        Ok(PreferenceOrder {
            ranks: ranks.iter().map(|r| remap[r]).collect(),
        })
    }

    /// Approves the listed numerators, disapproves everything else.
    pub fn dichotomous(s: usize, approve: &[usize]) -> Result<Self> {
        Self::trichotomous(s, approve, &[])
    }

    /// Approves `approve`, is neutral about `neutral`, disapproves the rest.
    pub fn trichotomous(s: usize, approve: &[usize], neutral: &[usize]) -> Result<Self> {
        if s == 0 {
            return Err(Error::ZeroRoomSize);
        }
        let mut ranks = vec![2u32; s + 1];
        for &j in neutral {
            if j > s {
                return Err(Error::PreferenceOutOfRange { value: j, size: s });
            }
            ranks[j] = 1;
        }
        for &j in approve {
            if j > s {
                return Err(Error::PreferenceOutOfRange { value: j, size: s });
            }
            if neutral.contains(&j) {
                return Err(Error::OverlappingLevels(j));
            }
            ranks[j] = 0;
        }
        Self::from_ranks(ranks)
    }

    /// Indifferent between all fractions.
    pub fn indifferent(s: usize) -> Result<Self> {
        Self::from_ranks(vec![0; s + 1])
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    pub fn room_size(&self) -> usize {
        self.ranks.len() - 1
    }

    /// Number of indifference classes.
    pub fn num_levels(&self) -> u32 {
        self.ranks.iter().max().map_or(0, |m| m + 1)
    }

    pub fn rank(&self, j: usize) -> u32 {
        self.ranks[j]
    }

    /// Compares two red counts of rooms of this order's size.
    pub fn compare_counts(&self, j1: usize, j2: usize) -> Comparison {
        match self.ranks[j1].cmp(&self.ranks[j2]) {
            Ordering::Less => Comparison::Prefer1,
            Ordering::Greater => Comparison::Prefer2,
            Ordering::Equal => Comparison::Indifferent,
        }
    }

    /// Compares two fractions.
    ///
    /// # Panics
    /// If either fraction is not of the form `j/s` for this order's `s`.
    pub fn compare(&self, f1: Fraction, f2: Fraction) -> Comparison {
        let s = self.room_size();
        let j1 = f1.numerator_at(s).expect("fraction not on the room-size grid");
        let j2 = f2.numerator_at(s).expect("fraction not on the room-size grid");
        self.compare_counts(j1, j2)
    }

    /// `+1` if `j1` is strictly better than `j2`, `-1` if strictly worse.
    pub(crate) fn score(&self, j1: usize, j2: usize) -> i64 {
        match self.compare_counts(j1, j2) {
            Comparison::Prefer1 => 1,
            Comparison::Prefer2 => -1,
            Comparison::Indifferent => 0,
        }
    }

    /// Rank 0 approves; the last rank disapproves when there are at least
    /// two ranks; anything else is neutral.
    pub fn level(&self, j: usize) -> Level {
        let r = self.ranks[j];
        let levels = self.num_levels();
        if r == 0 {
            Level::Approve
        } else if r + 1 == levels {
            Level::Disapprove
        } else {
            Level::Neutral
        }
    }

    /// Ranks restricted to the counts `color` can observe, renormalized.
    /// Two agents of one color with equal keys are interchangeable.
    pub fn effective_key(&self, color: Color) -> Vec<u32> {
        let s = self.room_size();
        let visible: Vec<u32> = color.possible_counts(s).map(|j| self.ranks[j]).collect();
        if visible.is_empty() {
            return visible;
        }
        Self::from_ranks_unchecked(visible)
    }

    fn from_ranks_unchecked(ranks: Vec<u32>) -> Vec<u32> {
        let used: BTreeSet<u32> = ranks.iter().copied().collect();
        let remap: HashMap<u32, u32> = used
            .into_iter()
            .enumerate()
            .map(|(i, r)| (r, i as u32))
            .collect();
        ranks.iter().map(|r| remap[r]).collect()
    }

    /// True when `j` is weakly preferred to every count `color` can observe.
    pub fn is_top(&self, color: Color, j: usize) -> bool {
        let s = self.room_size();
        let best = color
            .possible_counts(s)
            .map(|c| self.ranks[c])
            .min()
            .unwrap_or(0);
        self.ranks[j] <= best
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agent {
    pub id: String,
    pub color: Color,
    pub prefs: PreferenceOrder,
}

impl Agent {
    pub fn new(id: impl Into<String>, color: Color, prefs: PreferenceOrder) -> Self {
        Agent {
            id: id.into(),
            color,
            prefs,
        }
    }

    pub fn red(id: impl Into<String>, prefs: PreferenceOrder) -> Self {
        Self::new(id, Color::Red, prefs)
    }

    pub fn blue(id: impl Into<String>, prefs: PreferenceOrder) -> Self {
        Self::new(id, Color::Blue, prefs)
    }
}

/// A roommate diversity game. Fields are public so that malformed games can
/// be represented and rejected by [`validate_game`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Game {
    pub s: usize,
    pub red: Vec<Agent>,
    pub blue: Vec<Agent>,
}

impl Game {
    /// Builds and validates a game.
    pub fn new(s: usize, red: Vec<Agent>, blue: Vec<Agent>) -> Result<Self> {
        let g = Game { s, red, blue };
        validate_game(&g)?;
        Ok(g)
    }

    pub fn agents(&self) -> impl Iterator<Item = &Agent> {
        self.red.iter().chain(self.blue.iter())
    }

    pub fn num_agents(&self) -> usize {
        self.red.len() + self.blue.len()
    }

    /// Number of rooms `k`.
    pub fn num_rooms(&self) -> usize {
        if self.s == 0 {
            0
        } else {
            self.num_agents() / self.s
        }
    }

    pub fn agent(&self, id: &str) -> Option<&Agent> {
        self.agents().find(|a| a.id == id)
    }
}

pub fn validate_game(g: &Game) -> Result<()> {
    if g.s == 0 {
        return Err(Error::ZeroRoomSize);
    }
    let mut seen = HashSet::new();
    for a in g.agents() {
        if !seen.insert(a.id.as_str()) {
            return Err(Error::DuplicateAgentId(a.id.clone()));
        }
    }
    for a in g.agents() {
        let found = a.prefs.ranks().len();
        if found != g.s + 1 {
            return Err(Error::RankLength {
                agent: a.id.clone(),
                expected: g.s + 1,
                found,
            });
        }
    }
    for a in &g.red {
        if a.color != Color::Red {
            return Err(Error::ColorMismatch(a.id.clone()));
        }
    }
    for a in &g.blue {
        if a.color != Color::Blue {
            return Err(Error::ColorMismatch(a.id.clone()));
        }
    }
    if g.num_agents() % g.s != 0 {
        return Err(Error::Divisibility {
            agents: g.num_agents(),
            size: g.s,
        });
    }
    Ok(())
}

/// A partition of the agents into rooms, by agent id.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outcome {
    pub rooms: Vec<Vec<String>>,
}

impl Outcome {
    pub fn new<S: Into<String>>(rooms: Vec<Vec<S>>) -> Self {
        Outcome {
            rooms: rooms
                .into_iter()
                .map(|r| r.into_iter().map(Into::into).collect())
                .collect(),
        }
    }

    pub fn room_of(&self, id: &str) -> Option<&[String]> {
        self.rooms
            .iter()
            .find(|r| r.iter().any(|a| a == id))
            .map(Vec::as_slice)
    }
}

pub fn validate_outcome(g: &Game, o: &Outcome) -> Result<()> {
    let ids: HashSet<&str> = g.agents().map(|a| a.id.as_str()).collect();
    let mut seen = HashSet::new();
    for a in o.rooms.iter().flatten() {
        if !ids.contains(a.as_str()) {
            return Err(Error::UnknownAgent(a.clone()));
        }
        if !seen.insert(a.as_str()) {
            return Err(Error::DuplicatedAgent(a.clone()));
        }
    }
    if let Some(missing) = g.agents().find(|a| !seen.contains(a.id.as_str())) {
        return Err(Error::MissingAgent(missing.id.clone()));
    }
    for (i, room) in o.rooms.iter().enumerate() {
        if room.len() != g.s {
            return Err(Error::RoomSize {
                room: i,
                expected: g.s,
                found: room.len(),
            });
        }
    }
    if o.rooms.len() != g.num_rooms() {
        return Err(Error::RoomCount {
            expected: g.num_rooms(),
            found: o.rooms.len(),
        });
    }
    Ok(())
}

/// Sorts members within each room and orders rooms by
/// `(red count, smallest member id)`. Two outcomes describe the same
/// partition iff their canonical forms are equal.
pub fn canonicalize(g: &Game, o: &Outcome) -> Outcome {
    let red: HashSet<&str> = g.red.iter().map(|a| a.id.as_str()).collect();
    let mut rooms: Vec<(usize, Vec<String>)> = o
        .rooms
        .iter()
        .map(|r| {
            let mut members = r.clone();
            members.sort();
            let reds = members.iter().filter(|a| red.contains(a.as_str())).count();
            (reds, members)
        })
        .collect();
    rooms.sort_by(|(ra, a), (rb, b)| (ra, a.first()).cmp(&(rb, b.first())));
    Outcome {
        rooms: rooms.into_iter().map(|(_, r)| r).collect(),
    }
}

/// Per-room red counts, non-increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OutcomeSignature {
    pub red_counts: Vec<usize>,
}

pub fn signature_of(g: &Game, o: &Outcome) -> OutcomeSignature {
    let red: HashSet<&str> = g.red.iter().map(|a| a.id.as_str()).collect();
    let mut red_counts: Vec<usize> = o
        .rooms
        .iter()
        .map(|r| r.iter().filter(|a| red.contains(a.as_str())).count())
        .collect();
    red_counts.sort_unstable_by(|a, b| b.cmp(a));
    OutcomeSignature { red_counts }
}

/// Maximal set of interchangeable agents: same color, same ranks on the
/// fractions that color can observe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AgentClass {
    pub color: Color,
    pub key: Vec<u32>,
    pub members: Vec<String>,
}

/// Classes ordered by their smallest member id; members sorted.
pub fn agent_classes(g: &Game) -> Vec<AgentClass> {
    let mut by_key: HashMap<(Color, Vec<u32>), Vec<String>> = HashMap::new();
    for a in g.agents() {
        let key = a.prefs.effective_key(a.color);
        by_key.entry((a.color, key)).or_default().push(a.id.clone());
    }
    let mut classes: Vec<AgentClass> = by_key
        .into_iter()
        .map(|((color, key), mut members)| {
            members.sort();
            AgentClass {
                color,
                key,
                members,
            }
        })
        .collect();
    classes.sort_by(|a, b| a.members[0].cmp(&b.members[0]));
    classes
}

/// Agents grouped by the tier of the fraction they end up in.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LevelSets {
    pub approve: BTreeSet<String>,
    pub neutral: BTreeSet<String>,
    pub disapprove: BTreeSet<String>,
}

pub fn level_sets(g: &Game, o: &Outcome) -> Result<LevelSets> {
    validate_outcome(g, o)?;
    let mut sets = LevelSets::default();
    for room in &o.rooms {
        let reds = room
            .iter()
            .filter(|id| g.agent(id).map(|a| a.color) == Some(Color::Red))
            .count();
        for id in room {
            let agent = g.agent(id).ok_or_else(|| Error::UnknownAgent(id.clone()))?;
            let bucket = match agent.prefs.level(reds) {
                Level::Approve => &mut sets.approve,
                Level::Neutral => &mut sets.neutral,
                Level::Disapprove => &mut sets.disapprove,
            };
            bucket.insert(id.clone());
        }
    }
    Ok(sets)
}
