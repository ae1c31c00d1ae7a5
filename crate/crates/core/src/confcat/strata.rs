//! Stratum labels of configurations in a covering or a tower, and censuses
//! of the labels realized by all injective tuples of a given size.

use std::collections::BTreeMap;

use serde::Serialize;

use super::config::{injective_tuples, Levels};
use super::stack::CoveringStack;
use crate::epicat::{enumerate_epifin_objects, enumerate_trifin_objects, EpiFinObject, TriFinObject};
use crate::error::{Error, Result};
use crate::graphcov::{CoveringSpace, Tower};

fn check_injective(f: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    let mut repeated = Vec::new();
    for &x in f {
        if x >= n {
            return Err(Error::InvalidPath(format!("vertex {x} out of range")));
        }
        if std::mem::replace(&mut seen[x], true) {
            repeated.push(x);
        }
    }
    if repeated.is_empty() {
        Ok(())
    } else {
        Err(Error::NotInjective(repeated))
    }
}

/// The selfic normalization of the kernel of `π ∘ f`.
pub fn stratum_label(pi: &CoveringSpace, f: &[usize]) -> Result<EpiFinObject> {
    check_injective(f, pi.total().vertex_count())?;
    let levels = Levels::of(&CoveringStack::covering(pi), f);
    EpiFinObject::new(levels.projection(0))
}

/// The nested kernels of `f` under the two projections of a height-2
/// tower.
pub fn tower_stratum_label(t: &Tower, f: &[usize]) -> Result<TriFinObject> {
    if t.height() != 2 {
        return Err(Error::InvalidTower(format!("expected height 2, got {}", t.height())));
    }
    let stack = CoveringStack::tower(t);
    check_injective(f, stack.top().vertex_count())?;
    let levels = Levels::of(&stack, f);
    TriFinObject::new(EpiFinObject::new(levels.projection(0))?, EpiFinObject::new(levels.projection(1))?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusEntry<L> {
    pub label: L,
    pub count: usize,
}

/// Realized labels with their counts, and the possible labels never
/// realized.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Census<L> {
    pub k: usize,
    pub entries: Vec<CensusEntry<L>>,
    pub unrealized: Vec<L>,
}

impl<L: Ord + Clone> Census<L> {
    fn from_counts(k: usize, counts: BTreeMap<L, usize>, possible: Vec<L>) -> Self {
        let unrealized = possible.into_iter().filter(|l| !counts.contains_key(l)).collect();
        Census {
            k,
            entries: counts.into_iter().map(|(label, count)| CensusEntry { label, count }).collect(),
            unrealized,
        }
    }

    pub fn total(&self) -> usize {
        self.entries.iter().map(|e| e.count).sum()
    }

    pub fn count(&self, label: &L) -> usize {
        self.entries.iter().find(|e| &e.label == label).map_or(0, |e| e.count)
    }

    pub fn realized(&self) -> Vec<L> {
        self.entries.iter().map(|e| e.label.clone()).collect()
    }
}

fn tuples_of_size(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    injective_tuples(n, k).into_iter().filter(move |t| t.len() == k)
}

pub fn strata_census(pi: &CoveringSpace, k: usize) -> Census<EpiFinObject> {
    let mut counts = BTreeMap::new();
    for f in tuples_of_size(pi.total().vertex_count(), k) {
        let label = stratum_label(pi, &f).expect("tuples are injective");
        *counts.entry(label).or_insert(0) += 1;
    }
    let possible = enumerate_epifin_objects(k)
        .into_iter()
        .filter(|p| p.source_card() == k)
        .collect();
    Census::from_counts(k, counts, possible)
}

pub fn tower_census(t: &Tower, k: usize) -> Result<Census<TriFinObject>> {
    let mut counts = BTreeMap::new();
    for f in tuples_of_size(t.level(t.height()).vertex_count(), k) {
        *counts.entry(tower_stratum_label(t, &f)?).or_insert(0) += 1;
    }
    let possible = enumerate_trifin_objects(k)
        .into_iter()
        .filter(|x| x.cards()[2] == k)
        .collect();
    Ok(Census::from_counts(k, counts, possible))
}

/// Object counts of `config(π)` summed over strata, against the objects of
/// `config(E)`, for every `k ≤ k_max`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObjectRecount {
    pub by_stratum: usize,
    pub cover_objects: usize,
}

pub fn object_recount(pi: &CoveringSpace, k_max: usize) -> ObjectRecount {
    let n = pi.total().vertex_count();
    ObjectRecount {
        by_stratum: (0..=k_max).map(|k| strata_census(pi, k).total()).sum(),
        cover_objects: injective_tuples(n, k_max).len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finset::FinMap;
    use crate::graphcov::build_cyclic_tower;

    #[test]
    fn single_covering_census() {
        let pi = CoveringSpace::cyclic(6, 3).unwrap();
        let c = strata_census(&pi, 2);
        assert_eq!(c.count(&EpiFinObject::identity(2)), 24);
        assert_eq!(c.count(&EpiFinObject::new(FinMap::to_one(2)).unwrap()), 6);
        assert_eq!(c.entries.len(), 2);
        let c3 = strata_census(&pi, 3);
        assert_eq!(c3.count(&EpiFinObject::new(FinMap::to_one(3)).unwrap()), 0);
    }

    #[test]
    fn tower_census_at_two() {
        let t = build_cyclic_tower(3).unwrap();
        let c = tower_census(&t, 2).unwrap();
        assert_eq!(c.total(), 132);
        let id = EpiFinObject::identity(2);
        let one = EpiFinObject::new(FinMap::to_one(2)).unwrap();
        let id1 = EpiFinObject::identity(1);
        assert_eq!(c.count(&TriFinObject::new(id.clone(), id.clone()).unwrap()), 96);
        assert_eq!(c.count(&TriFinObject::new(one.clone(), id.clone()).unwrap()), 24);
        assert_eq!(c.count(&TriFinObject::new(id1, one).unwrap()), 12);
    }

    #[test]
    fn labels_reject_repeats() {
        let pi = CoveringSpace::cyclic(6, 3).unwrap();
        assert!(matches!(stratum_label(&pi, &[1, 1]), Err(Error::NotInjective(_))));
    }
}
