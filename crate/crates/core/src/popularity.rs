//! Popularity margins and exact popularity checks.
//!
//! Two challenger searches are available: a brute-force scan over every
//! labeled outcome, and a signature search that solves one pair of
//! transportation problems per multiset of room red counts.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate::{for_each_labeled, labeled_rooms, signatures, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::flow::{transport, Plan};
use crate::model::{Game, Outcome};
use crate::table::{AgentTable, Rooms};

/// `N(a, b)`, `N(b, a)` and their size difference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarginReport {
    pub margin: i64,
    pub improved: BTreeSet<String>,
    pub worsened: BTreeSet<String>,
}

/// Margin of `a` over `b`, optionally restricted to `subset`.
pub fn popularity_margin(
    g: &Game,
    a: &Outcome,
    b: &Outcome,
    subset: Option<&BTreeSet<String>>,
) -> Result<MarginReport> {
    let t = AgentTable::new(g)?;
    let pa = t.profile(&t.rooms_of(g, a)?);
    let pb = t.profile(&t.rooms_of(g, b)?);
    if let Some(sub) = subset {
        if let Some(id) = sub.iter().find(|id| !t.index.contains_key(id.as_str())) {
            return Err(Error::UnknownAgent(id.clone()));
        }
    }
    let mut report = MarginReport {
        margin: 0,
        improved: BTreeSet::new(),
        worsened: BTreeSet::new(),
    };
    for (i, agent) in t.agents.iter().enumerate() {
        if subset.is_some_and(|sub| !sub.contains(&agent.id)) {
            continue;
        }
        match agent.prefs.score(pa[i], pb[i]) {
            1 => {
                report.improved.insert(agent.id.clone());
            }
            -1 => {
                report.worsened.insert(agent.id.clone());
            }
            _ => {}
        }
    }
    report.margin = report.improved.len() as i64 - report.worsened.len() as i64;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    #[default]
    Bruteforce,
    Signature,
}

/// Challenger search settings. `cap` bounds the number of labeled outcomes
/// (brute force) or signatures (signature search) visited.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Search {
    pub strategy: Strategy,
    pub cap: u64,
}

impl Default for Search {
    fn default() -> Self {
        Search {
            strategy: Strategy::Bruteforce,
            cap: DEFAULT_CAP,
        }
    }
}

impl Search {
    pub fn bruteforce() -> Self {
        Search::default()
    }

    pub fn signature() -> Self {
        Search {
            strategy: Strategy::Signature,
            cap: DEFAULT_CAP,
        }
    }

    pub fn with_cap(self, cap: u64) -> Self {
        Search { cap, ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Challenger {
    pub outcome: Outcome,
    /// Margin of the challenger over the tested outcome.
    pub margin: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Popular,
    NotPopular,
    StrictlyPopular,
    NotStrictlyPopular,
}

/// Outcome of a popularity check. `margin` is the best margin any
/// challenger achieves over the tested outcome (other outcomes only, for
/// strict checks); `witness` is set for negative verdicts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PopularityVerdict {
    pub status: Status,
    pub margin: Option<i64>,
    pub witness: Option<Outcome>,
}

impl PopularityVerdict {
    pub fn is_affirmative(&self) -> bool {
        matches!(self.status, Status::Popular | Status::StrictlyPopular)
    }
}

/// Sum of agent scores of `rooms` against the current profile.
fn rooms_margin(t: &AgentTable, rooms: &[Vec<usize>], cur: &[usize]) -> i64 {
    rooms
        .iter()
        .map(|r| {
            let c = t.red_count(r);
            r.iter().map(|&i| t.agents[i].prefs.score(c, cur[i])).sum::<i64>()
        })
        .sum()
}

/// Best labeled challenger, canonical-first among ties, optionally skipping
/// `exclude`.
fn brute_best(
    t: &AgentTable,
    cur: &[usize],
    exclude: Option<&Rooms>,
    cap: u64,
) -> Result<Option<(i64, Rooms)>> {
    let mut best: Option<(i64, Rooms)> = None;
    for_each_labeled(t, cap, |rooms| {
        let m = rooms_margin(t, rooms, cur);
        if best.as_ref().is_some_and(|(b, _)| m < *b) {
            return ControlFlow::Continue(());
        }
        let canon = t.canonical(rooms);
        if exclude == Some(&canon) {
            return ControlFlow::Continue(());
        }
        let better = match &best {
            None => true,
            Some((b, r)) => m > *b || canon < *r,
        };
        if better {
            best = Some((m, canon));
        }
        ControlFlow::Continue(())
    })?;
    Ok(best)
}

struct Group {
    members: Vec<usize>,
    current: usize,
}

/// Signature search state for one tested outcome.
struct SignatureSearch<'a, 'g> {
    t: &'a AgentTable<'g>,
    red: Vec<Group>,
    blue: Vec<Group>,
}

/// Distinct red counts of a signature with their multiplicities, in
/// descending order.
fn columns(sig: &[usize]) -> Vec<(usize, usize)> {
    let mut cols: Vec<(usize, usize)> = Vec::new();
    for &c in sig {
        match cols.last_mut() {
            Some((v, m)) if *v == c => *m += 1,
            _ => cols.push((c, 1)),
        }
    }
    cols
}

impl<'a, 'g> SignatureSearch<'a, 'g> {
    fn new(t: &'a AgentTable<'g>, cur: &[usize]) -> Self {
        let mut red: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        let mut blue: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for i in 0..t.n() {
            let side = if t.is_red(i) { &mut red } else { &mut blue };
            side.entry((t.class_of[i], cur[i])).or_default().push(i);
        }
        let groups = |m: BTreeMap<(usize, usize), Vec<usize>>| {
            m.into_iter()
                .map(|((_, current), members)| Group { members, current })
                .collect()
        };
        SignatureSearch {
            t,
            red: groups(red),
            blue: groups(blue),
        }
    }

    fn plan(
        &self,
        cols: &[(usize, usize)],
        red: bool,
        cell_limit: Option<(usize, usize, i64)>,
    ) -> Option<Plan> {
        let s = self.t.s;
        let groups = if red { &self.red } else { &self.blue };
        let supply: Vec<i64> = groups.iter().map(|g| g.members.len() as i64).collect();
        let capacity: Vec<i64> = cols
            .iter()
            .map(|&(c, m)| (if red { c } else { s - c } * m) as i64)
            .collect();
        let gain = |gi: usize, ci: usize| {
            let g = &groups[gi];
            self.t.agents[g.members[0]].prefs.score(cols[ci].0, g.current)
        };
        transport(&supply, &capacity, &gain, cell_limit)
    }

    fn best_plans(&self, sig: &[usize]) -> (i64, Plan, Plan) {
        let cols = columns(sig);
        let r = self.plan(&cols, true, None).expect("red slots match red agents");
        let b = self.plan(&cols, false, None).expect("blue slots match blue agents");
        (r.value + b.value, r, b)
    }

    fn materialize(&self, sig: &[usize], red: &Plan, blue: &Plan) -> Rooms {
        let s = self.t.s;
        let cols = columns(sig);
        let mut red_cursor = vec![0usize; self.red.len()];
        let mut blue_cursor = vec![0usize; self.blue.len()];
        let take = |groups: &[Group], plan: &Plan, cursor: &mut [usize], ci: usize| {
            let mut out = Vec::new();
            for (gi, g) in groups.iter().enumerate() {
                let x = plan.alloc[gi][ci] as usize;
                out.extend_from_slice(&g.members[cursor[gi]..cursor[gi] + x]);
                cursor[gi] += x;
            }
            out.sort_unstable();
            out
        };
        let mut rooms = Vec::with_capacity(sig.len());
        for (ci, &(c, mult)) in cols.iter().enumerate() {
            let reds = take(&self.red, red, &mut red_cursor, ci);
            let blues = take(&self.blue, blue, &mut blue_cursor, ci);
            for r in 0..mult {
                let mut room = reds[r * c..(r + 1) * c].to_vec();
                room.extend_from_slice(&blues[r * (s - c)..(r + 1) * (s - c)]);
                rooms.push(room);
            }
        }
        self.t.canonical(&rooms)
    }

    /// Red counts of the tested rooms, in descending order.
    fn own_signature(&self, cur: &[usize]) -> Vec<usize> {
        let mut per_count = vec![0usize; self.t.s + 1];
        for &c in cur {
            per_count[c] += 1;
        }
        let mut sig = Vec::with_capacity(self.t.k);
        for c in (0..=self.t.s).rev() {
            sig.extend(std::iter::repeat_n(c, per_count[c] / self.t.s));
        }
        sig
    }

    /// Per group, the best gain at each red count and the best gain at any
    /// count up to it. Infeasible counts are `None`.
    fn gain_tables(&self) -> Vec<(usize, Vec<Option<i64>>, Vec<Option<i64>>)> {
        let s = self.t.s;
        let side = |groups: &[Group], red: bool| {
            groups
                .iter()
                .map(|g| {
                    let prefs = &self.t.agents[g.members[0]].prefs;
                    let at: Vec<Option<i64>> = (0..=s)
                        .map(|c| {
                            let ok = if red { c >= 1 } else { c < s };
                            ok.then(|| prefs.score(c, g.current))
                        })
                        .collect();
                    let mut upto = Vec::with_capacity(s + 1);
                    let mut m: Option<i64> = None;
                    for v in &at {
                        m = m.max(*v);
                        upto.push(m);
                    }
                    (g.members.len(), at, upto)
                })
                .collect::<Vec<_>>()
        };
        let mut all = side(&self.red, true);
        all.extend(side(&self.blue, false));
        all
    }

    /// Signatures whose optimistic value reaches `floor`. The optimistic
    /// value lets every agent take its best column, so it never undershoots.
    /// Prefixes are cut as soon as no completion can reach `floor`; `cap`
    /// bounds the number of prefixes visited.
    fn promising(&self, floor: i64, cap: u64) -> Result<Vec<Vec<usize>>> {
        struct Walk<'w> {
            k: usize,
            floor: i64,
            cap: u64,
            visited: u64,
            tables: &'w [(usize, Vec<Option<i64>>, Vec<Option<i64>>)],
            out: Vec<Vec<usize>>,
        }
        impl Walk<'_> {
            fn rec(
                &mut self,
                top: usize,
                left: usize,
                cur: &mut Vec<usize>,
                seen: &[Option<i64>],
            ) -> Result<()> {
                self.visited += 1;
                if self.visited > self.cap {
                    return Err(Error::CapExceeded { cap: self.cap });
                }
                let rooms_left = self.k - cur.len();
                if rooms_left == 0 {
                    if left == 0 && bound(self.tables, seen, None) >= Some(self.floor) {
                        self.out.push(cur.clone());
                    }
                    return Ok(());
                }
                if left > top * rooms_left {
                    return Ok(());
                }
                let hi = top.min(left);
                if bound(self.tables, seen, Some(hi)) < Some(self.floor) {
                    return Ok(());
                }
                for c in (left.div_ceil(rooms_left)..=hi).rev() {
                    let next: Vec<Option<i64>> = self
                        .tables
                        .iter()
                        .zip(seen)
                        .map(|((_, at, _), s)| (*s).max(at[c]))
                        .collect();
                    cur.push(c);
                    self.rec(c, left - c, cur, &next)?;
                    cur.pop();
                }
                Ok(())
            }
        }
        fn bound(
            tables: &[(usize, Vec<Option<i64>>, Vec<Option<i64>>)],
            seen: &[Option<i64>],
            open_to: Option<usize>,
        ) -> Option<i64> {
            let mut total = 0i64;
            for ((size, _, upto), s) in tables.iter().zip(seen) {
                let best = (*s).max(open_to.and_then(|c| upto[c]))?;
                total += *size as i64 * best;
            }
            Some(total)
        }
        let tables = self.gain_tables();
        let reds = (0..self.t.n()).filter(|&i| self.t.is_red(i)).count();
        let mut walk = Walk {
            k: self.t.k,
            floor,
            cap,
            visited: 0,
            tables: &tables,
            out: Vec::new(),
        };
        let seen = vec![None; tables.len()];
        walk.rec(self.t.s, reds, &mut Vec::with_capacity(self.t.k), &seen)?;
        Ok(walk.out)
    }

    /// Maximum margin over all outcomes and the canonical-least
    /// materialization attaining it.
    fn best(&self, cur: &[usize], cap: u64) -> Result<(i64, Rooms)> {
        let floor = self.best_plans(&self.own_signature(cur)).0;
        let sigs = self.promising(floor, cap)?;
        let values: Vec<i64> = sigs.par_iter().map(|sig| self.best_plans(sig).0).collect();
        let top = *values.iter().max().expect("the own signature qualifies");
        let rooms = sigs
            .par_iter()
            .zip(values.par_iter())
            .filter(|(_, &v)| v == top)
            .map(|(sig, _)| {
                let (_, r, b) = self.best_plans(sig);
                self.materialize(sig, &r, &b)
            })
            .min()
            .expect("a signature attains the maximum");
        Ok((top, rooms))
    }

    fn best_value(&self, cur: &[usize], cap: u64) -> Result<i64> {
        let floor = self.best_plans(&self.own_signature(cur)).0;
        let sigs = self.promising(floor + 1, cap)?;
        Ok(sigs
            .par_iter()
            .map(|sig| self.best_plans(sig).0)
            .max()
            .map_or(floor, |v| v.max(floor)))
    }

    /// Best margin over outcomes sharing `sig` with the tested outcome but
    /// moving at least one agent to a different red count. Only valid when
    /// the tested rooms have pairwise distinct red counts.
    fn best_deviation(&self, sig: &[usize]) -> Option<(i64, Rooms)> {
        let cols = columns(sig);
        let red_opt = self.plan(&cols, true, None)?;
        let blue_opt = self.plan(&cols, false, None)?;
        let mut cands: Vec<(i64, Rooms)> = Vec::new();
        for red in [true, false] {
            let groups = if red { &self.red } else { &self.blue };
            for (gi, g) in groups.iter().enumerate() {
                let ci = cols
                    .iter()
                    .position(|&(c, _)| c == g.current)
                    .expect("current count is a column");
                let limit = Some((gi, ci, g.members.len() as i64 - 1));
                let Some(capped) = self.plan(&cols, red, limit) else {
                    continue;
                };
                let (rp, bp) = if red {
                    (&capped, &blue_opt)
                } else {
                    (&red_opt, &capped)
                };
                cands.push((rp.value + bp.value, self.materialize(sig, rp, bp)));
            }
        }
        cands
            .into_iter()
            .max_by(|(va, ra), (vb, rb)| va.cmp(vb).then_with(|| rb.cmp(ra)))
    }
}

fn capped_signatures(t: &AgentTable, cap: u64) -> Result<Vec<Vec<usize>>> {
    let reds = (0..t.n()).filter(|&i| t.is_red(i)).count();
    let sigs = signatures(t.k, t.s, reds);
    if sigs.len() as u64 > cap {
        return Err(Error::CapExceeded { cap });
    }
    Ok(sigs)
}

/// A challenger maximizing its margin over `o`, and that margin. The tested
/// outcome itself is a candidate, so the margin is never negative.
pub fn best_challenger(g: &Game, o: &Outcome, search: &Search) -> Result<Challenger> {
    let t = AgentTable::new(g)?;
    let rooms = t.rooms_of(g, o)?;
    let cur = t.profile(&rooms);
    let (margin, best) = match search.strategy {
        Strategy::Bruteforce => brute_best(&t, &cur, None, search.cap)?
            .ok_or_else(|| Error::Internal("no outcome enumerated".into()))?,
        Strategy::Signature => SignatureSearch::new(&t, &cur).best(&cur, search.cap)?,
    };
    Ok(Challenger {
        outcome: t.outcome(&best),
        margin,
    })
}

pub fn is_popular(g: &Game, o: &Outcome, search: &Search) -> Result<PopularityVerdict> {
    let best = best_challenger(g, o, search)?;
    Ok(if best.margin >= 1 {
        PopularityVerdict {
            status: Status::NotPopular,
            margin: Some(best.margin),
            witness: Some(best.outcome),
        }
    } else {
        PopularityVerdict {
            status: Status::Popular,
            margin: Some(best.margin),
            witness: None,
        }
    })
}

/// Strict popularity: every other partition must lose to `o`.
pub fn is_strictly_popular(g: &Game, o: &Outcome, search: &Search) -> Result<PopularityVerdict> {
    let t = AgentTable::new(g)?;
    let rooms = t.canonical(&t.rooms_of(g, o)?);
    let cur = t.profile(&rooms);
    let best = match search.strategy {
        Strategy::Bruteforce => brute_best(&t, &cur, Some(&rooms), search.cap)?,
        Strategy::Signature => strict_signature(&t, &rooms, &cur, search.cap)?,
    };
    Ok(match best {
        Some((m, r)) if m >= 0 => PopularityVerdict {
            status: Status::NotStrictlyPopular,
            margin: Some(m),
            witness: Some(t.outcome(&r)),
        },
        other => PopularityVerdict {
            status: Status::StrictlyPopular,
            margin: other.map(|(m, _)| m),
            witness: None,
        },
    })
}

/// Best margin over outcomes other than `rooms`, via signatures.
fn strict_signature(
    t: &AgentTable,
    rooms: &Rooms,
    cur: &[usize],
    cap: u64,
) -> Result<Option<(i64, Rooms)>> {
    if t.k <= 1 || t.s == 1 {
        return Ok(None);
    }
    let search = SignatureSearch::new(t, cur);
    let (top, witness) = search.best(cur, cap)?;
    if top > 0 {
        return Ok(Some((top, witness)));
    }
    if let Some(swapped) = neutral_swap(t, rooms) {
        return Ok(Some((0, swapped)));
    }
    // Rooms now have distinct red counts and each class sits in one room.
    let mut own: Vec<usize> = rooms.iter().map(|r| t.red_count(r)).collect();
    own.sort_unstable_by(|a, b| b.cmp(a));
    let sigs = capped_signatures(t, cap)?;
    let others = sigs
        .par_iter()
        .filter(|sig| **sig != own)
        .map(|sig| {
            let (v, r, b) = search.best_plans(sig);
            (v, search.materialize(sig, &r, &b))
        })
        .max_by(|(va, ra), (vb, rb)| va.cmp(vb).then_with(|| rb.cmp(ra)));
    let same = search.best_deviation(&own);
    Ok([others, same]
        .into_iter()
        .flatten()
        .max_by(|(va, ra), (vb, rb)| va.cmp(vb).then_with(|| rb.cmp(ra))))
}

/// Swapping two same-color agents that share a class, or whose rooms share
/// a red count, leaves every agent's fraction unchanged.
fn neutral_swap(t: &AgentTable, rooms: &Rooms) -> Option<Rooms> {
    let mut room_of = vec![0usize; t.n()];
    for (ri, r) in rooms.iter().enumerate() {
        for &i in r {
            room_of[i] = ri;
        }
    }
    let counts: Vec<usize> = rooms.iter().map(|r| t.red_count(r)).collect();
    for i in 0..t.n() {
        for j in i + 1..t.n() {
            let (ri, rj) = (room_of[i], room_of[j]);
            if ri == rj || t.is_red(i) != t.is_red(j) {
                continue;
            }
            if t.class_of[i] == t.class_of[j] || counts[ri] == counts[rj] {
                let mut out = rooms.clone();
                let pi = out[ri].iter().position(|&x| x == i).expect("member");
                let pj = out[rj].iter().position(|&x| x == j).expect("member");
                out[ri][pi] = j;
                out[rj][pj] = i;
                return Some(t.canonical(&out));
            }
        }
    }
    None
}

/// The first popular outcome in canonical order, if any.
pub fn find_popular(g: &Game, search: &Search) -> Result<Option<Outcome>> {
    let t = AgentTable::new(g)?;
    let all = labeled_rooms(&t, search.cap)?;
    let found = match search.strategy {
        Strategy::Bruteforce => {
            let mut seen = HashSet::new();
            let profiles: Vec<Vec<usize>> = all
                .iter()
                .map(|r| t.profile(r))
                .filter(|p| seen.insert(p.clone()))
                .collect();
            all.par_iter().position_first(|r| {
                let cur = t.profile(r);
                profiles.iter().all(|p| t.margin(p, &cur) <= 0)
            })
        }
        Strategy::Signature => {
            let mut first = None;
            for (idx, r) in all.iter().enumerate() {
                let cur = t.profile(r);
                if SignatureSearch::new(&t, &cur).best_value(&cur, search.cap)? <= 0 {
                    first = Some(idx);
                    break;
                }
            }
            first
        }
    };
    Ok(found.map(|idx| t.outcome(&all[idx])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Agent, PreferenceOrder};

    fn indifferent_pairs() -> Game {
        let p = PreferenceOrder::indifferent(2).unwrap();
        Game::new(
            2,
            vec![Agent::red("r1", p.clone()), Agent::red("r2", p.clone())],
            vec![Agent::blue("b1", p.clone()), Agent::blue("b2", p)],
        )
        .unwrap()
    }

    #[test]
    fn self_margin_is_zero() {
        let g = indifferent_pairs();
        let o = Outcome::new(vec![vec!["r1", "b1"], vec!["r2", "b2"]]);
        let rep = popularity_margin(&g, &o, &o, None).unwrap();
        assert_eq!(rep.margin, 0);
        assert!(rep.improved.is_empty() && rep.worsened.is_empty());
    }

    #[test]
    fn indifferent_agents_are_never_strictly_popular() {
        let g = indifferent_pairs();
        let o = Outcome::new(vec![vec!["r1", "r2"], vec!["b1", "b2"]]);
        for search in [Search::bruteforce(), Search::signature()] {
            let v = is_strictly_popular(&g, &o, &search).unwrap();
            assert_eq!(v.status, Status::NotStrictlyPopular);
            assert_eq!(v.margin, Some(0));
            assert_ne!(v.witness.unwrap(), crate::model::canonicalize(&g, &o));
        }
    }

    #[test]
    fn single_room_is_strictly_popular() {
        let p = PreferenceOrder::dichotomous(3, &[1]).unwrap();
        let g = Game::new(
            3,
            vec![Agent::red("r", p.clone())],
            vec![Agent::blue("b1", p.clone()), Agent::blue("b2", p)],
        )
        .unwrap();
        let o = Outcome::new(vec![vec!["r", "b1", "b2"]]);
        for search in [Search::bruteforce(), Search::signature()] {
            assert_eq!(is_popular(&g, &o, &search).unwrap().status, Status::Popular);
            let v = is_strictly_popular(&g, &o, &search).unwrap();
            assert_eq!(v.status, Status::StrictlyPopular);
            assert_eq!(v.margin, None);
            assert_eq!(
                find_popular(&g, &search).unwrap(),
                Some(crate::model::canonicalize(&g, &o))
            );
        }
    }

    #[test]
    fn column_grouping() {
        assert_eq!(columns(&[3, 3, 1, 0, 0]), vec![(3, 2), (1, 1), (0, 2)]);
    }
}
