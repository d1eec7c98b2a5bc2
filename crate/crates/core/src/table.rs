//! Index-based view of a game used by the search routines.
//!
//! Agents are numbered in ascending id order, so comparing index vectors
//! agrees with comparing id strings.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{validate_game, validate_outcome, Agent, Color, Game, Outcome};

pub(crate) type Rooms = Vec<Vec<usize>>;

pub(crate) struct AgentTable<'g> {
    pub s: usize,
    pub k: usize,
    pub agents: Vec<&'g Agent>,
    pub index: HashMap<&'g str, usize>,
    pub class_of: Vec<usize>,
    pub classes: Vec<Vec<usize>>,
}

impl<'g> AgentTable<'g> {
    pub fn new(g: &'g Game) -> Result<Self> {
        validate_game(g)?;
        let mut agents: Vec<&Agent> = g.agents().collect();
        agents.sort_by(|a, b| a.id.cmp(&b.id));
        let index = agents
            .iter()
            .enumerate()
            .map(|(i, a)| (a.id.as_str(), i))
            .collect();
        let mut class_keys: HashMap<(Color, Vec<u32>), usize> = HashMap::new();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut class_of = Vec::with_capacity(agents.len());
        for (i, a) in agents.iter().enumerate() {
            let key = (a.color, a.prefs.effective_key(a.color));
            let c = *class_keys.entry(key).or_insert_with(|| {
                classes.push(Vec::new());
                classes.len() - 1
            });
            classes[c].push(i);
            class_of.push(c);
        }
        Ok(AgentTable {
            s: g.s,
            k: g.num_rooms(),
            agents,
            index,
            class_of,
            classes,
        })
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    pub fn is_red(&self, i: usize) -> bool {
        self.agents[i].color == Color::Red
    }

    pub fn class_color(&self, c: usize) -> Color {
        self.agents[self.classes[c][0]].color
    }

    pub fn rooms_of(&self, g: &Game, o: &Outcome) -> Result<Rooms> {
        validate_outcome(g, o)?;
        o.rooms
            .iter()
            .map(|r| {
                r.iter()
                    .map(|id| {
                        self.index
                            .get(id.as_str())
                            .copied()
                            .ok_or_else(|| Error::UnknownAgent(id.clone()))
                    })
                    .collect()
            })
            .collect()
    }

    pub fn red_count(&self, room: &[usize]) -> usize {
        room.iter().filter(|&&i| self.is_red(i)).count()
    }

    /// Canonical ordering of index rooms, mirroring `model::canonicalize`.
    pub fn canonical(&self, rooms: &[Vec<usize>]) -> Rooms {
        let mut out: Vec<(usize, Vec<usize>)> = rooms
            .iter()
            .map(|r| {
                let mut m = r.clone();
                m.sort_unstable();
                (self.red_count(&m), m)
            })
            .collect();
        out.sort_by(|(ra, a), (rb, b)| (ra, a.first()).cmp(&(rb, b.first())));
        out.into_iter().map(|(_, r)| r).collect()
    }

    pub fn outcome(&self, rooms: &[Vec<usize>]) -> Outcome {
        Outcome {
            rooms: self
                .canonical(rooms)
                .iter()
                .map(|r| r.iter().map(|&i| self.agents[i].id.clone()).collect())
                .collect(),
        }
    }

    /// Red count of each agent's room.
    pub fn profile(&self, rooms: &[Vec<usize>]) -> Vec<usize> {
        let mut p = vec![0; self.n()];
        for r in rooms {
            let c = self.red_count(r);
            for &i in r {
                p[i] = c;
            }
        }
        p
    }

    /// Popularity margin between two profiles: agents better off in `a`
    /// minus agents better off in `b`.
    pub fn margin(&self, a: &[usize], b: &[usize]) -> i64 {
        self.agents
            .iter()
            .enumerate()
            .map(|(i, ag)| ag.prefs.score(a[i], b[i]))
            .sum()
    }
}
