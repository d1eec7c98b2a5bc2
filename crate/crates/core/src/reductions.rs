//! Games built from X3C instances, together with their predefined outcomes.
//!
//! Agent ids are structured: `r_set:i`, `r_copy:i`, `r_aux:i`, `r_circ:i`,
//! `r_red:j:p`, `r_mon:p`, `b_fill:j:p`, `b_add:j:p`, `b_mon:p`,
//! `b_even:p`, where `i` is a ground element, `j` a 1-based room index and
//! `p` a 1-based position. Groups are named `R_set`, `R_copy`, `R_aux`,
//! `R_circ`, `R_red_j`, `R_mon`, `B_fill_j`, `B_add_j`, `B_mon`, `B_even`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::enumerate::{materialize_orbit, orbit_compositions};
use crate::error::{Error, Result};
use crate::model::{canonicalize, Agent, Color, Game, Level, Outcome, PreferenceOrder};
use crate::table::AgentTable;
use crate::x3c::X3CInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Strict,
    Mixed,
    Popularity,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Strict => "strict",
            Variant::Mixed => "mixed",
            Variant::Popularity => "popularity",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionBundle {
    pub variant: Variant,
    pub game: Game,
    pub groups: BTreeMap<String, Vec<String>>,
    pub instance: X3CInstance,
}

/// Group listing written next to an exported game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleSidecar {
    pub groups: BTreeMap<String, Vec<String>>,
    pub variant: Variant,
}

impl ReductionBundle {
    pub fn group(&self, name: &str) -> &[String] {
        self.groups.get(name).map_or(&[], |v| v.as_slice())
    }

    pub fn sidecar(&self) -> BundleSidecar {
        BundleSidecar {
            groups: self.groups.clone(),
            variant: self.variant,
        }
    }

    pub fn build(variant: Variant, inst: &X3CInstance) -> Result<Self> {
        match variant {
            Variant::Strict => build_strict_reduction(inst),
            Variant::Mixed => build_mixed_reduction(inst),
            Variant::Popularity => build_popularity_reduction(inst),
        }
    }
}

struct Builder {
    s: usize,
    red: Vec<Agent>,
    blue: Vec<Agent>,
    groups: BTreeMap<String, Vec<String>>,
}

impl Builder {
    fn new(s: usize) -> Self {
        Builder {
            s,
            red: Vec::new(),
            blue: Vec::new(),
            groups: BTreeMap::new(),
        }
    }

    fn agent(&mut self, group: &str, id: String, color: Color, prefs: PreferenceOrder) {
        self.groups.entry(group.to_string()).or_default().push(id.clone());
        let a = Agent::new(id, color, prefs);
        match color {
            Color::Red => self.red.push(a),
            Color::Blue => self.blue.push(a),
        }
    }

    /// `size` interchangeable agents `{prefix}:1..` approving `approve` and
    /// neutral about `neutral`.
    #[allow(clippy::too_many_arguments)]
    fn block(
        &mut self,
        group: &str,
        prefix: &str,
        size: usize,
        color: Color,
        approve: &[usize],
        neutral: &[usize],
    ) -> Result<()> {
        let prefs = PreferenceOrder::trichotomous(self.s, approve, neutral)?;
        self.groups.entry(group.to_string()).or_default();
        for p in 1..=size {
            self.agent(group, format!("{prefix}:{p}"), color, prefs.clone());
        }
        Ok(())
    }

    fn finish(self, variant: Variant, inst: &X3CInstance) -> Result<ReductionBundle> {
        let game = Game::new(self.s, self.red, self.blue)?;
        Ok(ReductionBundle {
            variant,
            game,
            groups: self.groups,
            instance: inst.clone(),
        })
    }
}

fn positive(size: isize, what: &str) -> Result<usize> {
    if size <= 0 {
        return Err(Error::InvalidReduction(format!("{what} would have {size} agents")));
    }
    Ok(size as usize)
}

/// Dichotomous game whose unique all-approve outcome is the monolithic one
/// exactly when the instance has no exact cover.
pub fn build_strict_reduction(inst: &X3CInstance) -> Result<ReductionBundle> {
    inst.validate()?;
    let (q, m) = (inst.q(), inst.m);
    let s = 5 * q + 6 + m;
    let mut b = Builder::new(s);
    for i in 1..=m {
        let mut approve: Vec<usize> = inst
            .sets_containing(i)
            .iter()
            .map(|&j| 5 * (j + 1) + 1)
            .collect();
        approve.push(s);
        let prefs = PreferenceOrder::dichotomous(s, &approve)?;
        b.agent("R_set", format!("r_set:{i}"), Color::Red, prefs);
    }
    for j in 1..=q {
        b.block(
            &format!("R_red_{j}"),
            &format!("r_red:{j}"),
            5 * j - 2,
            Color::Red,
            &[5 * j + 1, 5 * j - 2],
            &[],
        )?;
    }
    let mono = 5 * (q + 1) + 1;
    b.block("R_mon", "r_mon", mono, Color::Red, &[s, mono], &[])?;
    for j in 1..=q {
        b.block(
            &format!("B_fill_{j}"),
            &format!("b_fill:{j}"),
            s - (5 * j - 2) - 3,
            Color::Blue,
            &[5 * j + 1, 5 * j - 2],
            &[],
        )?;
        b.block(
            &format!("B_add_{j}"),
            &format!("b_add:{j}"),
            3,
            Color::Blue,
            &[5 * j - 2, 0],
            &[],
        )?;
    }
    b.block("B_mon", "b_mon", s - mono, Color::Blue, &[mono, 0], &[])?;
    b.block("B_even", "b_even", mono, Color::Blue, &[0], &[])?;
    b.finish(Variant::Strict, inst)
}

/// Dichotomous game with copied set agents and six auxiliary agents, one
/// of which is unhappy in the monolithic outcome.
pub fn build_mixed_reduction(inst: &X3CInstance) -> Result<ReductionBundle> {
    inst.validate()?;
    let (q, m) = (inst.q(), inst.m);
    let s = 10 * q + 28 + 2 * m;
    let mut b = Builder::new(s);
    for (group, prefix) in [("R_set", "r_set"), ("R_copy", "r_copy")] {
        for i in 1..=m {
            let mut approve: Vec<usize> = inst
                .sets_containing(i)
                .iter()
                .map(|&j| 2 * (5 * (j + 1) + 1))
                .collect();
            approve.push(s);
            let prefs = PreferenceOrder::dichotomous(s, &approve)?;
            b.agent(group, format!("{prefix}:{i}"), Color::Red, prefs);
        }
    }
    let aux = 2 * (5 * (q + 1) + 1);
    for i in 1..=5 {
        let prefs = PreferenceOrder::dichotomous(s, &[aux, s])?;
        b.agent("R_aux", format!("r_aux:{i}"), Color::Red, prefs);
    }
    b.agent(
        "R_aux",
        "r_aux:6".to_string(),
        Color::Red,
        PreferenceOrder::dichotomous(s, &[aux])?,
    );
    for j in 1..=q + 1 {
        b.block(
            &format!("R_red_{j}"),
            &format!("r_red:{j}"),
            2 * (5 * j - 2),
            Color::Red,
            &[2 * (5 * j + 1), 2 * (5 * j - 2)],
            &[],
        )?;
    }
    let mono = 2 * (5 * (q + 2) + 1);
    b.block("R_mon", "r_mon", mono, Color::Red, &[s, mono], &[])?;
    for j in 1..=q + 1 {
        b.block(
            &format!("B_fill_{j}"),
            &format!("b_fill:{j}"),
            s - 2 * (5 * j - 2) - 6,
            Color::Blue,
            &[2 * (5 * j + 1), 2 * (5 * j - 2)],
            &[],
        )?;
        b.block(
            &format!("B_add_{j}"),
            &format!("b_add:{j}"),
            6,
            Color::Blue,
            &[2 * (5 * j - 2), 0],
            &[],
        )?;
    }
    let bmon = positive(s as isize - mono as isize, "B_mon")?;
    b.block("B_mon", "b_mon", bmon, Color::Blue, &[mono, 0], &[])?;
    b.block("B_even", "b_even", mono, Color::Blue, &[0], &[])?;
    b.finish(Variant::Mixed, inst)
}

/// Trichotomous game embedding three circular rooms that mimic the
/// nine-agent counterexample.
pub fn build_popularity_reduction(inst: &X3CInstance) -> Result<ReductionBundle> {
    inst.validate()?;
    let (q, m) = (inst.q(), inst.m);
    let s = 10 * q + 45 + 2 * m;
    let mut b = Builder::new(s);
    for i in 1..=3 {
        let approve: &[usize] = if i == 3 { &[14, s] } else { &[14] };
        let prefs = PreferenceOrder::trichotomous(s, approve, &[9])?;
        b.agent("R_circ", format!("r_circ:{i}"), Color::Red, prefs);
    }
    for j in 1..=3 {
        let (approve, neutral): (Vec<usize>, Vec<usize>) = if j == 3 {
            (vec![14, 13], vec![9])
        } else {
            (vec![5 * j - 1, 5 * j - 2], vec![])
        };
        b.block(
            &format!("R_red_{j}"),
            &format!("r_red:{j}"),
            5 * j - 2,
            Color::Red,
            &approve,
            &neutral,
        )?;
    }
    for (group, prefix) in [("R_set", "r_set"), ("R_copy", "r_copy")] {
        for i in 1..=m {
            let mut approve: Vec<usize> = inst
                .sets_containing(i)
                .iter()
                .map(|&j| 2 * (5 * (j + 4) + 1))
                .collect();
            approve.push(s);
            let prefs = PreferenceOrder::dichotomous(s, &approve)?;
            b.agent(group, format!("{prefix}:{i}"), Color::Red, prefs);
        }
    }
    for j in 4..=q + 3 {
        b.block(
            &format!("R_red_{j}"),
            &format!("r_red:{j}"),
            2 * (5 * j - 2),
            Color::Red,
            &[2 * (5 * j + 1), 2 * (5 * j - 2)],
            &[],
        )?;
    }
    let mono = s - 2 * m - 3;
    b.block("R_mon", "r_mon", mono, Color::Red, &[s, mono], &[])?;
    for j in 1..=3 {
        b.block(
            &format!("B_fill_{j}"),
            &format!("b_fill:{j}"),
            s - (5 * j - 2) - 1,
            Color::Blue,
            &[5 * j - 1, 5 * j - 2],
            &[],
        )?;
        b.block(
            &format!("B_add_{j}"),
            &format!("b_add:{j}"),
            1,
            Color::Blue,
            &[5 * j - 2, 0],
            &[],
        )?;
    }
    for j in 4..=q + 3 {
        b.block(
            &format!("B_fill_{j}"),
            &format!("b_fill:{j}"),
            s - 2 * (5 * j - 2) - 6,
            Color::Blue,
            &[2 * (5 * j + 1), 2 * (5 * j - 2)],
            &[],
        )?;
        b.block(
            &format!("B_add_{j}"),
            &format!("b_add:{j}"),
            6,
            Color::Blue,
            &[2 * (5 * j - 2), 0],
            &[],
        )?;
    }
    b.block("B_mon", "b_mon", 2 * m + 3, Color::Blue, &[mono, 0], &[])?;
    b.block("B_even", "b_even", mono, Color::Blue, &[0], &[])?;
    b.finish(Variant::Popularity, inst)
}

/// Number of indexed redundant rooms of a bundle.
fn redundant_rooms(bundle: &ReductionBundle) -> usize {
    let q = bundle.instance.q();
    match bundle.variant {
        Variant::Strict => q,
        Variant::Mixed => q + 1,
        Variant::Popularity => q + 3,
    }
}

/// Completes `rooms` with one room holding every blue agent not yet placed.
fn close(bundle: &ReductionBundle, mut rooms: Vec<Vec<String>>) -> Outcome {
    let placed: BTreeSet<&String> = rooms.iter().flatten().collect();
    let rest: Vec<String> = bundle
        .game
        .blue
        .iter()
        .map(|a| &a.id)
        .filter(|id| !placed.contains(id))
        .cloned()
        .collect();
    rooms.push(rest);
    canonicalize(&bundle.game, &Outcome { rooms })
}

fn union(bundle: &ReductionBundle, names: &[&str]) -> Vec<String> {
    names.iter().flat_map(|n| bundle.group(n).to_vec()).collect()
}

fn standard_room(bundle: &ReductionBundle, j: usize) -> Vec<String> {
    union(
        bundle,
        &[
            &format!("B_add_{j}"),
            &format!("R_red_{j}"),
            &format!("B_fill_{j}"),
        ],
    )
}

/// The monolithic outcome: every redundant room in its standard form and
/// all set-like and monolith red agents in one all-red room.
pub fn monolithic_outcome(bundle: &ReductionBundle) -> Outcome {
    let mut rooms: Vec<Vec<String>> = (1..=redundant_rooms(bundle))
        .map(|j| standard_room(bundle, j))
        .collect();
    let red_room: &[&str] = match bundle.variant {
        Variant::Strict => &["R_set", "R_mon"],
        Variant::Mixed => &["R_set", "R_copy", "R_aux", "R_mon"],
        Variant::Popularity => &["R_set", "R_copy", "R_circ", "R_mon"],
    };
    rooms.push(union(bundle, red_room));
    close(bundle, rooms)
}

/// Set agents (and their copies) of the elements of set `j` (0-based).
fn cover_agents(bundle: &ReductionBundle, j: usize, copies: bool) -> Vec<String> {
    let mut out = Vec::new();
    for &i in &bundle.instance.sets[j] {
        out.push(format!("r_set:{i}"));
        if copies {
            out.push(format!("r_copy:{i}"));
        }
    }
    out
}

/// Room of set `j` (0-based) placed at redundant index `idx`: the set
/// agents when the set is in the cover, the standard room otherwise.
fn cover_room(
    bundle: &ReductionBundle,
    cover: &BTreeSet<usize>,
    j: usize,
    idx: usize,
    copies: bool,
) -> Vec<String> {
    if cover.contains(&j) {
        let mut room = cover_agents(bundle, j, copies);
        room.extend(union(
            bundle,
            &[&format!("R_red_{idx}"), &format!("B_fill_{idx}")],
        ));
        room
    } else {
        standard_room(bundle, idx)
    }
}

/// The first five agents of `R_circ ∪ R_red_3` in id order.
pub fn default_choice(bundle: &ReductionBundle) -> Vec<String> {
    let mut pool: Vec<String> = union(bundle, &["R_circ", "R_red_3"]);
    pool.sort();
    pool.truncate(5);
    pool
}

fn resolve_choice(bundle: &ReductionBundle, choice: Option<&[String]>) -> Result<Vec<String>> {
    let Some(choice) = choice else {
        return Ok(default_choice(bundle));
    };
    let distinct: BTreeSet<&String> = choice.iter().collect();
    if choice.len() != 5 || distinct.len() != 5 {
        return Err(Error::InvalidReduction(
            "the choice must list five distinct agents".into(),
        ));
    }
    let pool: BTreeSet<&String> = bundle
        .group("R_circ")
        .iter()
        .chain(bundle.group("R_red_3"))
        .collect();
    if let Some(a) = choice.iter().find(|a| !pool.contains(a)) {
        return Err(Error::InvalidReduction(format!(
            "`{a}` is not in R_circ or R_red_3"
        )));
    }
    if let Some(a) = bundle.group("R_circ").iter().find(|a| !distinct.contains(a)) {
        return Err(Error::InvalidReduction(format!(
            "`{a}` must be chosen, otherwise it has no room"
        )));
    }
    Ok(choice.to_vec())
}

/// The reduced outcome encoding an exact cover (set indices are 0-based).
/// For the popularity variant `choice` lists `a1..a5`; other variants
/// reject it.
pub fn reduced_outcome(
    bundle: &ReductionBundle,
    cover: &[usize],
    choice: Option<&[String]>,
) -> Result<Outcome> {
    if !bundle.instance.is_cover(cover) {
        return Err(Error::InvalidCover);
    }
    if choice.is_some() && bundle.variant != Variant::Popularity {
        return Err(Error::InvalidReduction(
            "only the popularity variant takes a choice of five agents".into(),
        ));
    }
    let cover: BTreeSet<usize> = cover.iter().copied().collect();
    let q = bundle.instance.q();
    let mut rooms = Vec::new();
    match bundle.variant {
        Variant::Strict => {
            for j in 0..q {
                rooms.push(cover_room(bundle, &cover, j, j + 1, false));
            }
        }
        Variant::Mixed => {
            for j in 0..q {
                rooms.push(cover_room(bundle, &cover, j, j + 1, true));
            }
            let last = q + 1;
            rooms.push(union(
                bundle,
                &["R_aux", &format!("R_red_{last}"), &format!("B_fill_{last}")],
            ));
        }
        Variant::Popularity => {
            let a = resolve_choice(bundle, choice)?;
            for (j, lead) in [(1, &a[0..1]), (2, &a[1..2])] {
                let mut room = lead.to_vec();
                room.extend(union(
                    bundle,
                    &[&format!("R_red_{j}"), &format!("B_fill_{j}")],
                ));
                rooms.push(room);
            }
            let mut third = a[2..5].to_vec();
            third.extend(bundle.group("R_red_3").iter().filter(|x| !a.contains(x)).cloned());
            third.extend(bundle.group("B_fill_3").iter().cloned());
            rooms.push(third);
            for j in 0..q {
                rooms.push(cover_room(bundle, &cover, j, j + 4, true));
            }
        }
    }
    rooms.push(union(bundle, &["R_mon", "B_mon"]));
    Ok(close(bundle, rooms))
}

/// Moves `a3` into `a1`'s room, `a1` into `a2`'s room and `a2` into `a3`'s
/// room of a reduced-type outcome.
pub fn reduced_rotation(
    bundle: &ReductionBundle,
    o: &Outcome,
    choice: Option<&[String]>,
) -> Result<Outcome> {
    if bundle.variant != Variant::Popularity {
        return Err(Error::InvalidReduction(
            "rotation applies to the popularity variant".into(),
        ));
    }
    crate::model::validate_outcome(&bundle.game, o)?;
    let a = resolve_choice(bundle, choice)?;
    let find = |id: &String| {
        o.rooms
            .iter()
            .position(|r| r.contains(id))
            .expect("validated outcome")
    };
    let (r1, r2, r3) = (find(&a[0]), find(&a[1]), find(&a[2]));
    if r1 == r2 || r2 == r3 || r1 == r3 {
        return Err(Error::InvalidReduction(
            "a1, a2 and a3 must sit in different rooms".into(),
        ));
    }
    let mut rooms = o.rooms.clone();
    for (room, from, to) in [(r1, &a[0], &a[2]), (r2, &a[1], &a[0]), (r3, &a[2], &a[1])] {
        let pos = rooms[room].iter().position(|x| x == from).expect("member");
        rooms[room][pos] = to.clone();
    }
    Ok(canonicalize(&bundle.game, &Outcome { rooms }))
}

/// Every outcome in which all agents approve their room, one per orbit of
/// within-class relabeling, in canonical order.
pub fn all_approve_outcomes(bundle: &ReductionBundle, cap: u64) -> Result<Vec<Outcome>> {
    let t = AgentTable::new(&bundle.game)?;
    let approves = |c: usize, red: usize| {
        let a = t.agents[t.classes[c][0]];
        a.color.is_possible(red, t.s) && a.prefs.level(red) == Level::Approve
    };
    let mut rooms: Vec<_> = orbit_compositions(&t, &approves, cap)?
        .iter()
        .map(|c| materialize_orbit(&t, c))
        .collect();
    rooms.sort();
    Ok(rooms.iter().map(|r| t.outcome(r)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{level_sets, validate_outcome};

    fn fixture() -> X3CInstance {
        X3CInstance::new(3, vec![[1, 2, 3]]).unwrap()
    }

    #[test]
    fn predefined_outcomes_are_valid() {
        for v in [Variant::Strict, Variant::Mixed, Variant::Popularity] {
            let b = ReductionBundle::build(v, &fixture()).unwrap();
            validate_outcome(&b.game, &monolithic_outcome(&b)).unwrap();
            validate_outcome(&b.game, &reduced_outcome(&b, &[0], None).unwrap()).unwrap();
            let all: usize = b.groups.values().map(Vec::len).sum();
            assert_eq!(all, b.game.num_agents());
        }
    }

    #[test]
    fn cover_is_checked() {
        let b = build_strict_reduction(&fixture()).unwrap();
        assert_eq!(reduced_outcome(&b, &[], None).unwrap_err(), Error::InvalidCover);
    }

    #[test]
    fn choice_must_include_circular_agents() {
        let b = build_popularity_reduction(&fixture()).unwrap();
        let bad: Vec<String> = ["r_circ:1", "r_circ:2", "r_red:3:1", "r_red:3:2", "r_red:3:3"]
            .map(String::from)
            .to_vec();
        assert!(matches!(
            reduced_outcome(&b, &[0], Some(&bad)),
            Err(Error::InvalidReduction(_))
        ));
    }

    #[test]
    fn strict_monolith_is_all_approve() {
        let b = build_strict_reduction(&fixture()).unwrap();
        let levels = level_sets(&b.game, &monolithic_outcome(&b)).unwrap();
        assert!(levels.disapprove.is_empty() && levels.neutral.is_empty());
    }
}
