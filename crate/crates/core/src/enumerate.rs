//! Exhaustive enumeration of outcomes, of orbit representatives under
//! within-class relabeling, and of outcome signatures.

use std::collections::HashSet;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Color, Game, Outcome, OutcomeSignature};
use crate::table::{AgentTable, Rooms};

pub const DEFAULT_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnumerationMode {
    #[default]
    Labeled,
    Orbit,
}

/// `n! / ((s!)^k k!)`, the number of partitions of `n` agents into rooms of
/// size `s`. `None` on overflow.
pub fn labeled_count(n: usize, s: usize) -> Option<u128> {
    if s == 0 || n % s != 0 {
        return Some(0);
    }
    // Product over rooms of C(remaining - 1, s - 1): the smallest remaining
    // agent picks its s - 1 roommates.
    let mut total: u128 = 1;
    let mut remaining = n;
    while remaining > 0 {
        total = total.checked_mul(binomial(remaining - 1, s - 1)?)?;
        remaining -= s;
    }
    Some(total)
}

fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

pub(crate) fn check_labeled_cap(t: &AgentTable, cap: u64) -> Result<u64> {
    match labeled_count(t.n(), t.s) {
        Some(c) if c <= cap as u128 => Ok(c as u64),
        _ => Err(Error::CapExceeded { cap }),
    }
}

/// Visits every partition exactly once. The room holding the smallest
/// unassigned agent is always built next.
pub(crate) fn for_each_labeled<F>(t: &AgentTable, cap: u64, mut f: F) -> Result<()>
where
    F: FnMut(&Rooms) -> ControlFlow<()>,
{
    check_labeled_cap(t, cap)?;
    let mut assigned = vec![false; t.n()];
    let mut rooms: Rooms = Vec::with_capacity(t.k);
    let _ = labeled_rec(t, &mut assigned, &mut rooms, &mut f);
    Ok(())
}

fn labeled_rec<F>(
    t: &AgentTable,
    assigned: &mut [bool],
    rooms: &mut Rooms,
    f: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&Rooms) -> ControlFlow<()>,
{
    let Some(first) = assigned.iter().position(|&a| !a) else {
        return f(rooms);
    };
    assigned[first] = true;
    let mut room = vec![first];
    let flow = pick_companions(t, assigned, rooms, &mut room, first + 1, f);
    assigned[first] = false;
    flow
}

fn pick_companions<F>(
    t: &AgentTable,
    assigned: &mut [bool],
    rooms: &mut Rooms,
    room: &mut Vec<usize>,
    start: usize,
    f: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&Rooms) -> ControlFlow<()>,
{
    if room.len() == t.s {
        rooms.push(room.clone());
        let flow = labeled_rec(t, assigned, rooms, f);
        rooms.pop();
        return flow;
    }
    for j in start..t.n() {
        if assigned[j] {
            continue;
        }
        assigned[j] = true;
        room.push(j);
        let flow = pick_companions(t, assigned, rooms, room, j + 1, f);
        room.pop();
        assigned[j] = false;
        flow?;
    }
    ControlFlow::Continue(())
}

/// All labeled outcomes in canonical form, sorted in canonical order.
pub(crate) fn labeled_rooms(t: &AgentTable, cap: u64) -> Result<Vec<Rooms>> {
    let mut out = Vec::new();
    for_each_labeled(t, cap, |r| {
        out.push(t.canonical(r));
        ControlFlow::Continue(())
    })?;
    out.sort();
    Ok(out)
}

/// Class-count vector of one room.
pub(crate) type Composition = Vec<u32>;

/// One orbit: a room composition per room, in non-increasing order.
pub(crate) type OrbitComps = Vec<Composition>;

fn candidate_compositions(
    t: &AgentTable,
    allowed: &dyn Fn(usize, usize) -> bool,
    cap: u64,
) -> Result<Vec<Composition>> {
    // Distributes `left` agents over `classes` (each capped by its size).
    fn spread(
        t: &AgentTable,
        classes: &[usize],
        left: usize,
        cur: &mut Composition,
        out: &mut Vec<Composition>,
        cap: u64,
    ) -> Result<()> {
        let Some((&c, rest)) = classes.split_first() else {
            if left == 0 {
                if out.len() as u64 >= cap {
                    return Err(Error::CapExceeded { cap });
                }
                out.push(cur.clone());
            }
            return Ok(());
        };
        let tail: usize = rest.iter().map(|&r| t.classes[r].len()).sum();
        let most = left.min(t.classes[c].len());
        let least = left.saturating_sub(tail);
        for x in least..=most {
            cur[c] = x as u32;
            spread(t, rest, left - x, cur, out, cap)?;
        }
        cur[c] = 0;
        Ok(())
    }

    let mut out: Vec<Composition> = Vec::new();
    for red in 0..=t.s {
        let reds: Vec<usize> = (0..t.classes.len())
            .filter(|&c| t.class_color(c) == Color::Red && allowed(c, red))
            .collect();
        let blues: Vec<usize> = (0..t.classes.len())
            .filter(|&c| t.class_color(c) == Color::Blue && allowed(c, red))
            .collect();
        let mut red_parts = Vec::new();
        spread(t, &reds, red, &mut vec![0; t.classes.len()], &mut red_parts, cap)?;
        if red_parts.is_empty() {
            continue;
        }
        let mut blue_parts = Vec::new();
        spread(t, &blues, t.s - red, &mut vec![0; t.classes.len()], &mut blue_parts, cap)?;
        for rp in &red_parts {
            for bp in &blue_parts {
                if out.len() as u64 >= cap {
                    return Err(Error::CapExceeded { cap });
                }
                out.push(rp.iter().zip(bp).map(|(a, b)| a + b).collect());
            }
        }
    }
    out.sort_by(|a, b| b.cmp(a));
    Ok(out)
}

/// Orbit representatives as composition lists. `allowed(class, red_count)`
/// restricts which room fractions each class may occupy.
pub(crate) fn orbit_compositions(
    t: &AgentTable,
    allowed: &dyn Fn(usize, usize) -> bool,
    cap: u64,
) -> Result<Vec<OrbitComps>> {
    let cands = candidate_compositions(t, allowed, cap)?;
    let mut remaining: Vec<u32> = t.classes.iter().map(|c| c.len() as u32).collect();
    let mut cur = Vec::with_capacity(t.k);
    let mut out = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn rec(
        cands: &[Composition],
        from: usize,
        k: usize,
        remaining: &mut [u32],
        cur: &mut OrbitComps,
        out: &mut Vec<OrbitComps>,
        cap: u64,
    ) -> Result<()> {
        if cur.len() == k {
            if remaining.iter().all(|&r| r == 0) {
                if out.len() as u64 >= cap {
                    return Err(Error::CapExceeded { cap });
                }
                out.push(cur.clone());
            }
            return Ok(());
        }
        for (i, comp) in cands.iter().enumerate().skip(from) {
            if comp.iter().zip(remaining.iter()).any(|(x, r)| x > r) {
                continue;
            }
            for (r, x) in remaining.iter_mut().zip(comp) {
                *r -= x;
            }
            cur.push(comp.clone());
            let res = rec(cands, i, k, remaining, cur, out, cap);
            cur.pop();
            for (r, x) in remaining.iter_mut().zip(comp) {
                *r += x;
            }
            res?;
        }
        Ok(())
    }

    rec(&cands, 0, t.k, &mut remaining, &mut cur, &mut out, cap)?;
    Ok(out)
}

/// Canonical representative of an orbit: each class hands out its members
/// in ascending order, room by room.
pub(crate) fn materialize_orbit(t: &AgentTable, comps: &[Composition]) -> Rooms {
    let mut cursor = vec![0usize; t.classes.len()];
    let rooms: Rooms = comps
        .iter()
        .map(|comp| {
            let mut room = Vec::with_capacity(t.s);
            for (c, &x) in comp.iter().enumerate() {
                let members = &t.classes[c];
                room.extend_from_slice(&members[cursor[c]..cursor[c] + x as usize]);
                cursor[c] += x as usize;
            }
            room
        })
        .collect();
    t.canonical(&rooms)
}

pub(crate) fn compositions_of(t: &AgentTable, rooms: &[Vec<usize>]) -> OrbitComps {
    let mut comps: OrbitComps = rooms
        .iter()
        .map(|r| {
            let mut comp = vec![0u32; t.classes.len()];
            for &i in r {
                comp[t.class_of[i]] += 1;
            }
            comp
        })
        .collect();
    comps.sort_by(|a, b| b.cmp(a));
    comps
}

/// Identifies the orbit of an outcome under permutations of agents within
/// their classes: the multiset of per-room class counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OrbitKey(pub Vec<Vec<u32>>);

pub fn orbit_key(g: &Game, o: &Outcome) -> Result<OrbitKey> {
    let t = AgentTable::new(g)?;
    let rooms = t.rooms_of(g, o)?;
    Ok(OrbitKey(compositions_of(&t, &rooms)))
}

/// Every labeled outcome in the orbit of `rooms`.
pub(crate) fn expand_orbit_rooms(t: &AgentTable, rooms: &[Vec<usize>], cap: u64) -> Result<Vec<Rooms>> {
    let mut pending = compositions_of(t, rooms);
    let mut assigned = vec![false; t.n()];
    let mut cur: Rooms = Vec::new();
    let mut out = Vec::new();

    fn rec(
        t: &AgentTable,
        pending: &mut OrbitComps,
        assigned: &mut [bool],
        cur: &mut Rooms,
        out: &mut Vec<Rooms>,
        cap: u64,
    ) -> Result<()> {
        let Some(first) = assigned.iter().position(|&a| !a) else {
            if out.len() as u64 >= cap {
                return Err(Error::CapExceeded { cap });
            }
            out.push(t.canonical(cur));
            return Ok(());
        };
        let fc = t.class_of[first];
        let mut tried: HashSet<Composition> = HashSet::new();
        for idx in 0..pending.len() {
            let comp = pending[idx].clone();
            if comp[fc] == 0 || !tried.insert(comp.clone()) {
                continue;
            }
            pending.remove(idx);
            assigned[first] = true;
            let mut need = comp.clone();
            need[fc] -= 1;
            let mut room = vec![first];
            let res = fill(t, &need, 0, 0, 0, &mut room, pending, assigned, cur, out, cap);
            assigned[first] = false;
            pending.insert(idx, comp);
            res?;
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn fill(
        t: &AgentTable,
        need: &[u32],
        class: usize,
        picked: u32,
        start: usize,
        room: &mut Vec<usize>,
        pending: &mut OrbitComps,
        assigned: &mut [bool],
        cur: &mut Rooms,
        out: &mut Vec<Rooms>,
        cap: u64,
    ) -> Result<()> {
        if class == need.len() {
            cur.push(room.clone());
            let res = rec(t, pending, assigned, cur, out, cap);
            cur.pop();
            return res;
        }
        if picked == need[class] {
            return fill(t, need, class + 1, 0, 0, room, pending, assigned, cur, out, cap);
        }
        for &j in t.classes[class].iter().filter(|&&j| j >= start) {
            if assigned[j] {
                continue;
            }
            assigned[j] = true;
            room.push(j);
            let res = fill(t, need, class, picked + 1, j + 1, room, pending, assigned, cur, out, cap);
            room.pop();
            assigned[j] = false;
            res?;
        }
        Ok(())
    }

    rec(t, &mut pending, &mut assigned, &mut cur, &mut out, cap)?;
    out.sort();
    Ok(out)
}

/// All outcomes (labeled mode) or one canonical representative per orbit
/// (orbit mode), in canonical order.
pub fn enumerate_outcomes(g: &Game, mode: EnumerationMode, cap: u64) -> Result<Vec<Outcome>> {
    let t = AgentTable::new(g)?;
    let rooms = match mode {
        EnumerationMode::Labeled => labeled_rooms(&t, cap)?,
        EnumerationMode::Orbit => {
            let mut reps: Vec<Rooms> = orbit_compositions(&t, &|_, _| true, cap)?
                .iter()
                .map(|c| materialize_orbit(&t, c))
                .collect();
            reps.sort();
            reps
        }
    };
    Ok(rooms.iter().map(|r| t.outcome(r)).collect())
}

/// All outcomes obtained from `o` by permuting agents within their classes.
pub fn expand_orbit(g: &Game, o: &Outcome, cap: u64) -> Result<Vec<Outcome>> {
    let t = AgentTable::new(g)?;
    let rooms = t.rooms_of(g, o)?;
    Ok(expand_orbit_rooms(&t, &rooms, cap)?
        .iter()
        .map(|r| t.outcome(r))
        .collect())
}

/// All multisets of `k` red counts in `[0, s]` summing to `|R|`, each stored
/// non-increasing, in descending lexicographic order.
pub fn enumerate_signatures(g: &Game) -> Vec<OutcomeSignature> {
    signatures(g.num_rooms(), g.s, g.red.len())
        .into_iter()
        .map(|red_counts| OutcomeSignature { red_counts })
        .collect()
}

pub(crate) fn signatures(k: usize, s: usize, reds: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, cap: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let rooms_left = k - cur.len();
        if left > cap * rooms_left {
            return;
        }
        let lo = left.div_ceil(rooms_left);
        for c in (lo..=cap.min(left)).rev() {
            cur.push(c);
            rec(k, c, left - c, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, s, reds, &mut Vec::with_capacity(k), &mut out);
    out
}
