//! Mixed outcomes and mixed popularity.
//!
//! The popularity margin defines a symmetric zero-sum game over outcomes
//! whose value is zero; any maximin strategy is a mixed popular outcome.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::enumerate::{
    expand_orbit_rooms, labeled_count, labeled_rooms, materialize_orbit, orbit_compositions,
    EnumerationMode,
};
use crate::error::{Error, Result};
use crate::lp::solve_zero_sum;
use crate::model::{Game, Outcome};
use crate::table::{AgentTable, Rooms};

/// A finitely supported distribution over outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedOutcome {
    pub support: Vec<(Outcome, BigRational)>,
}

impl MixedOutcome {
    pub fn point(o: Outcome) -> Self {
        MixedOutcome {
            support: vec![(o, BigRational::one())],
        }
    }

    pub fn total(&self) -> BigRational {
        self.support.iter().map(|(_, p)| p.clone()).sum()
    }

    /// Checks positivity, normalization, distinctness and that every
    /// outcome belongs to `g`.
    pub fn validate(&self, g: &Game) -> Result<()> {
        let t = AgentTable::new(g)?;
        self.index_rooms(&t, g).map(|_| ())
    }

    fn index_rooms(&self, t: &AgentTable, g: &Game) -> Result<Vec<Rooms>> {
        if self.support.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(self.support.len());
        for (o, p) in &self.support {
            if !p.is_positive() {
                return Err(Error::InvalidDistribution(format!(
                    "probability {} is not positive",
                    ratio_string(p)
                )));
            }
            let rooms = t.canonical(&t.rooms_of(g, o)?);
            if !seen.insert(rooms.clone()) {
                return Err(Error::InvalidDistribution(
                    "support lists an outcome twice".into(),
                ));
            }
            out.push(rooms);
        }
        let total = self.total();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {}",
                ratio_string(&total)
            )));
        }
        Ok(out)
    }
}

/// `num/den`, always with an explicit denominator.
pub fn ratio_string(p: &BigRational) -> String {
    format!("{}/{}", p.numer(), p.denom())
}

pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("`{s}` is not a rational number"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireEntry {
    outcome: Outcome,
    prob: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireMixed {
    support: Vec<WireEntry>,
}

impl Serialize for MixedOutcome {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        WireMixed {
            support: self
                .support
                .iter()
                .map(|(o, p)| WireEntry {
                    outcome: o.clone(),
                    prob: ratio_string(p),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MixedOutcome {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = WireMixed::deserialize(deserializer)?;
        let support = wire
            .support
            .into_iter()
            .map(|e| {
                parse_ratio(&e.prob)
                    .map(|p| (e.outcome, p))
                    .map_err(serde::de::Error::custom)
            })
            .collect::<std::result::Result<_, _>>()?;
        Ok(MixedOutcome { support })
    }
}

/// Expected margin of `p` over `q`.
pub fn mixed_margin(g: &Game, p: &MixedOutcome, q: &MixedOutcome) -> Result<BigRational> {
    let t = AgentTable::new(g)?;
    let pr = p.index_rooms(&t, g)?;
    let qr = q.index_rooms(&t, g)?;
    let mut total = BigRational::zero();
    for (ra, (_, pa)) in pr.iter().zip(&p.support) {
        let prof_a = t.profile(ra);
        for (rb, (_, qb)) in qr.iter().zip(&q.support) {
            let m = t.margin(&prof_a, &t.profile(rb));
            total += pa * qb * BigRational::from_integer(m.into());
        }
    }
    Ok(total)
}

/// Margin matrix over a list of outcomes: entry `(i, j)` is the margin of
/// outcome `i` over outcome `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameMatrix {
    pub outcomes: Vec<Outcome>,
    pub entries: Vec<Vec<i64>>,
}

impl GameMatrix {
    pub fn is_skew_symmetric(&self) -> bool {
        let n = self.entries.len();
        (0..n).all(|i| (0..n).all(|j| self.entries[i][j] == -self.entries[j][i]))
    }
}

fn margin_matrix(t: &AgentTable, profiles: &[Vec<usize>]) -> Vec<Vec<i64>> {
    profiles
        .par_iter()
        .map(|a| profiles.iter().map(|b| t.margin(a, b)).collect())
        .collect()
}

/// Margin matrix over every labeled outcome, or over one representative
/// per orbit.
pub fn build_game_matrix(g: &Game, mode: EnumerationMode, cap: u64) -> Result<GameMatrix> {
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
    let profiles: Vec<Vec<usize>> = rooms.iter().map(|r| t.profile(r)).collect();
    Ok(GameMatrix {
        outcomes: rooms.iter().map(|r| t.outcome(r)).collect(),
        entries: margin_matrix(&t, &profiles),
    })
}

/// A mixed popular outcome. Labeled mode solves the full game (outcomes
/// with identical per-agent fractions merged); orbit mode solves the
/// orbit-averaged game and spreads each orbit's weight uniformly. Either way
/// the result is re-verified against every labeled challenger.
pub fn solve_mixed(g: &Game, mode: EnumerationMode, cap: u64) -> Result<MixedOutcome> {
    let t = AgentTable::new(g)?;
    let weighted: Vec<(Rooms, BigRational)> = match mode {
        EnumerationMode::Labeled => solve_labeled(&t, cap)?,
        EnumerationMode::Orbit => solve_orbits(&t, cap)?,
    };
    let mut support: Vec<(Rooms, BigRational)> = weighted
        .into_iter()
        .filter(|(_, p)| p.is_positive())
        .collect();
    support.sort_by(|a, b| a.0.cmp(&b.0));
    let mixed = MixedOutcome {
        support: support.into_iter().map(|(r, p)| (t.outcome(&r), p)).collect(),
    };
    let (_, value) = verify_mixed(g, &mixed, cap)?;
    if !value.is_zero() {
        return Err(Error::Internal(format!(
            "maximin strategy has margin {} against its best response",
            ratio_string(&value)
        )));
    }
    Ok(mixed)
}

fn solve_labeled(t: &AgentTable, cap: u64) -> Result<Vec<(Rooms, BigRational)>> {
    let rooms = labeled_rooms(t, cap)?;
    let mut first: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut reps: Vec<usize> = Vec::new();
    let mut profiles: Vec<Vec<usize>> = Vec::new();
    for (idx, r) in rooms.iter().enumerate() {
        let p = t.profile(r);
        if let std::collections::hash_map::Entry::Vacant(e) = first.entry(p.clone()) {
            e.insert(idx);
            reps.push(idx);
            profiles.push(p);
        }
    }
    let matrix: Vec<Vec<BigInt>> = margin_matrix(t, &profiles)
        .into_iter()
        .map(|row| row.into_iter().map(BigInt::from).collect())
        .collect();
    let sol = solve_zero_sum(&matrix);
    Ok(reps
        .into_iter()
        .zip(sol.strategy)
        .map(|(idx, p)| (rooms[idx].clone(), p))
        .collect())
}

fn solve_orbits(t: &AgentTable, cap: u64) -> Result<Vec<(Rooms, BigRational)>> {
    let comps = orbit_compositions(t, &|_, _| true, cap)?;
    let members: Vec<Vec<Rooms>> = comps
        .iter()
        .map(|c| expand_orbit_rooms(t, &materialize_orbit(t, c), cap))
        .collect::<Result<_>>()?;
    let expanded: u128 = members.iter().map(|m| m.len() as u128).sum();
    if Some(expanded) != labeled_count(t.n(), t.s) {
        return Err(Error::Internal(
            "orbits do not cover every labeled outcome exactly once".into(),
        ));
    }
    let sizes: Vec<BigInt> = members.iter().map(|m| BigInt::from(m.len())).collect();
    let lcm = sizes.iter().fold(BigInt::one(), |acc, s| acc.lcm(s));
    let member_profiles: Vec<Vec<Vec<usize>>> = members
        .iter()
        .map(|m| m.iter().map(|r| t.profile(r)).collect())
        .collect();
    let rep_profiles: Vec<&Vec<usize>> = member_profiles.iter().map(|m| &m[0]).collect();
    let matrix: Vec<Vec<BigInt>> = member_profiles
        .par_iter()
        .zip(sizes.par_iter())
        .map(|(orbit, size)| {
            let scale = &lcm / size;
            rep_profiles
                .iter()
                .map(|rep| {
                    let sum: i64 = orbit.iter().map(|p| t.margin(p, rep)).sum();
                    BigInt::from(sum) * &scale
                })
                .collect()
        })
        .collect();
    let sol = solve_zero_sum(&matrix);
    let mut out = Vec::new();
    for ((orbit, weight), size) in members.into_iter().zip(sol.strategy).zip(&sizes) {
        if !weight.is_positive() {
            continue;
        }
        let each = weight / BigRational::from_integer(size.clone());
        out.extend(orbit.into_iter().map(|r| (r, each.clone())));
    }
    Ok(out)
}

/// The pure challenger minimizing the expected margin of `p` over it, and
/// that margin. `p` is mixed popular iff the margin is non-negative.
pub fn verify_mixed(g: &Game, p: &MixedOutcome, cap: u64) -> Result<(Outcome, BigRational)> {
    let t = AgentTable::new(g)?;
    let support = p.index_rooms(&t, g)?;
    let denom = p
        .support
        .iter()
        .fold(BigInt::one(), |acc, (_, w)| acc.lcm(w.denom()));
    let weights: Vec<BigInt> = p
        .support
        .iter()
        .map(|(_, w)| w.numer() * (&denom / w.denom()))
        .collect();
    let profiles: Vec<Vec<usize>> = support.iter().map(|r| t.profile(r)).collect();
    let all = labeled_rooms(&t, cap)?;
    let values: Vec<BigInt> = all
        .par_iter()
        .map(|r| {
            let q = t.profile(r);
            profiles
                .iter()
                .zip(&weights)
                .map(|(prof, w)| w * t.margin(prof, &q))
                .sum()
        })
        .collect();
    let (idx, min) = values
        .iter()
        .enumerate()
        .min_by(|(ia, a), (ib, b)| a.cmp(b).then(ia.cmp(ib)))
        .expect("at least one outcome");
    Ok((t.outcome(&all[idx]), BigRational::new(min.clone(), denom)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Agent, PreferenceOrder};

    fn one_room() -> Game {
        let p = PreferenceOrder::dichotomous(2, &[1]).unwrap();
        Game::new(2, vec![Agent::red("r", p.clone())], vec![Agent::blue("b", p)]).unwrap()
    }

    #[test]
    fn ratio_round_trip() {
        let p = parse_ratio("6/8").unwrap();
        assert_eq!(ratio_string(&p), "3/4");
        assert_eq!(ratio_string(&parse_ratio("1").unwrap()), "1/1");
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("x").is_err());
    }

    #[test]
    fn single_outcome_game() {
        let g = one_room();
        for mode in [EnumerationMode::Labeled, EnumerationMode::Orbit] {
            let m = build_game_matrix(&g, mode, 10).unwrap();
            assert_eq!(m.entries, vec![vec![0]]);
            let p = solve_mixed(&g, mode, 10).unwrap();
            assert_eq!(p.support.len(), 1);
            assert!(p.total().is_one());
        }
    }

    #[test]
    fn validation() {
        let g = one_room();
        let o = Outcome::new(vec![vec!["r", "b"]]);
        let half = BigRational::new(1.into(), 2.into());
        let twice = MixedOutcome {
            support: vec![(o.clone(), half.clone()), (o.clone(), half)],
        };
        assert!(matches!(twice.validate(&g), Err(Error::InvalidDistribution(_))));
        let short = MixedOutcome {
            support: vec![(o, BigRational::new(1.into(), 3.into()))],
        };
        assert!(matches!(short.validate(&g), Err(Error::InvalidDistribution(_))));
    }

    #[test]
    fn json_shape() {
        let o = Outcome::new(vec![vec!["r", "b"]]);
        let text = serde_json::to_string(&MixedOutcome::point(o)).unwrap();
        assert_eq!(text, r#"{"support":[{"outcome":{"rooms":[["r","b"]]},"prob":"1/1"}]}"#);
        let back: MixedOutcome = serde_json::from_str(&text).unwrap();
        assert!(back.total().is_one());
    }
}
