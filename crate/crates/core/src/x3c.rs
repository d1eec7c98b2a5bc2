//! Exact Cover by 3-Sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ground set `{1, ..., m}` and a list of 3-element subsets. Sets are
/// addressed by their 0-based position in `sets`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct X3CInstance {
    pub m: usize,
    pub sets: Vec<[usize; 3]>,
}

impl X3CInstance {
    pub fn new(m: usize, sets: Vec<[usize; 3]>) -> Result<Self> {
        let inst = X3CInstance { m, sets };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 3 {
            return Err(Error::InvalidInstance(format!("m = {} is below 3", self.m)));
        }
        for (j, set) in self.sets.iter().enumerate() {
            if set.iter().any(|&x| x == 0 || x > self.m) {
                return Err(Error::InvalidInstance(format!(
                    "set {j} has an element outside 1..={}",
                    self.m
                )));
            }
            if set[0] == set[1] || set[0] == set[2] || set[1] == set[2] {
                return Err(Error::InvalidInstance(format!("set {j} repeats an element")));
            }
        }
        Ok(())
    }

    pub fn q(&self) -> usize {
        self.sets.len()
    }

    /// Indices of the sets containing element `i`.
    pub fn sets_containing(&self, i: usize) -> Vec<usize> {
        (0..self.sets.len())
            .filter(|&j| self.sets[j].contains(&i))
            .collect()
    }

    /// True when `cover` lists distinct sets partitioning the ground set.
    pub fn is_cover(&self, cover: &[usize]) -> bool {
        let mut hit = vec![false; self.m + 1];
        for &j in cover {
            let Some(set) = self.sets.get(j) else {
                return false;
            };
            for &x in set {
                if hit[x] {
                    return false;
                }
                hit[x] = true;
            }
        }
        hit[1..].iter().all(|&h| h)
    }
}

/// The lexicographically first exact cover, as sorted set indices.
pub fn x3c_solve(inst: &X3CInstance) -> Result<Option<Vec<usize>>> {
    let mut first = None;
    search(inst, &mut |cover| {
        first = Some(cover.to_vec());
        true
    })?;
    Ok(first)
}

/// Every exact cover, each as sorted set indices, in lexicographic order.
pub fn x3c_all_solutions(inst: &X3CInstance) -> Result<Vec<Vec<usize>>> {
    let mut all = Vec::new();
    search(inst, &mut |cover| {
        all.push(cover.to_vec());
        false
    })?;
    all.sort();
    Ok(all)
}

/// Backtracking on the smallest uncovered element. `found` returns true to
/// stop the search.
fn search(inst: &X3CInstance, found: &mut dyn FnMut(&[usize]) -> bool) -> Result<()> {
    inst.validate()?;
    if inst.m % 3 != 0 {
        return Ok(());
    }
    let containing: Vec<Vec<usize>> = (0..=inst.m).map(|i| inst.sets_containing(i)).collect();
    let mut hit = vec![false; inst.m + 1];
    let mut chosen = Vec::new();

    fn rec(
        inst: &X3CInstance,
        containing: &[Vec<usize>],
        hit: &mut [bool],
        chosen: &mut Vec<usize>,
        found: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        let Some(x) = (1..=inst.m).find(|&x| !hit[x]) else {
            let mut cover = chosen.clone();
            cover.sort_unstable();
            return found(&cover);
        };
        for &j in &containing[x] {
            let set = inst.sets[j];
            if set.iter().any(|&y| hit[y]) {
                continue;
            }
            for &y in &set {
                hit[y] = true;
            }
            chosen.push(j);
            let stop = rec(inst, containing, hit, chosen, found);
            chosen.pop();
            for &y in &set {
                hit[y] = false;
            }
            if stop {
                return true;
            }
        }
        false
    }

    rec(inst, &containing, &mut hit, &mut chosen, found);
    Ok(())
}
