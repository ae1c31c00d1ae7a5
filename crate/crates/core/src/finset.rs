//! Standard finite sets `{1, ..., k}`, maps between them, partitions and
//! the selfic normal form.
//!
//! Elements are 1-based. A [`FinMap`] stores its target cardinality and the
//! sequence of values; the source cardinality is the length of that
//! sequence. The text form is `k->l:[v1,...,vk]`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A map `k -> l` of standard finite sets.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinMap {
    target: usize,
    values: Vec<usize>,
}

impl FinMap {
    pub fn new(target: usize, values: Vec<usize>) -> Result<Self> {
        for (position, &value) in values.iter().enumerate() {
            if value == 0 || value > target {
                return Err(Error::ValueOutOfRange {
                    position: position + 1,
                    value,
                    target,
                });
            }
        }
        Ok(FinMap { target, values })
    }

    pub fn identity(k: usize) -> Self {
        FinMap {
            target: k,
            values: (1..=k).collect(),
        }
    }

    /// The unique map `k -> 1` (for `k = 0` this is the empty map `0 -> 1`).
    pub fn to_one(k: usize) -> Self {
        FinMap {
            target: 1,
            values: vec![1; k],
        }
    }

    /// The unique map `0 -> l`.
    pub fn empty(target: usize) -> Self {
        FinMap {
            target,
            values: Vec::new(),
        }
    }

    pub fn source_card(&self) -> usize {
        self.values.len()
    }

    pub fn target_card(&self) -> usize {
        self.target
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// Evaluates at a 1-based element of the source.
    pub fn apply(&self, i: usize) -> usize {
        self.values[i - 1]
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target + 1];
        for &v in &self.values {
            if seen[v] {
                return false;
            }
            seen[v] = true;
        }
        true
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target + 1];
        for &v in &self.values {
            hit[v] = true;
        }
        hit[1..].iter().all(|&h| h)
    }

    pub fn is_bijective(&self) -> bool {
        self.source_card() == self.target && self.is_injective()
    }

    /// `self` followed by `next`, i.e. `next ∘ self`.
    pub fn then(&self, next: &FinMap) -> Result<FinMap> {
        compose(self, next)
    }

    /// Minimum of each fiber, for surjective maps. `None` if some fiber is empty.
    pub fn fiber_minima(&self) -> Option<Vec<usize>> {
        let mut minima = vec![0usize; self.target];
        for (i, &v) in self.values.iter().enumerate() {
            if minima[v - 1] == 0 {
                minima[v - 1] = i + 1;
            }
        }
        if minima.contains(&0) {
            None
        } else {
            Some(minima)
        }
    }

    /// Elements of `1..=k` sent to `j`.
    pub fn fiber(&self, j: usize) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == j)
            .map(|(i, _)| i + 1)
            .collect()
    }
}

/// `f` followed by `g`: the result sends `i` to `g(f(i))`.
pub fn compose(f: &FinMap, g: &FinMap) -> Result<FinMap> {
    if f.target != g.source_card() {
        return Err(Error::Composition {
            left: f.to_string(),
            right: g.to_string(),
        });
    }
    Ok(FinMap {
        target: g.target,
        values: f.values.iter().map(|&v| g.values[v - 1]).collect(),
    })
}

/// A surjection is selfic when `j ↦ min f⁻¹(j)` is strictly increasing.
pub fn is_selfic(f: &FinMap) -> bool {
    match f.fiber_minima() {
        Some(minima) => minima.windows(2).all(|w| w[0] < w[1]),
        None => false,
    }
}

/// A partition of `{1, ..., k}` into nonempty blocks.
///
/// Blocks are kept sorted internally and ordered by their minima, so two
/// partitions are equal exactly when they have the same blocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition {
    ground: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(ground: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; ground + 1];
        let mut canonical = Vec::with_capacity(blocks.len());
        for mut block in blocks {
            if block.is_empty() {
                return Err(Error::Partition("empty block".into()));
            }
            block.sort_unstable();
            for &x in &block {
                if x == 0 || x > ground {
                    return Err(Error::Partition(format!("{x} outside 1..={ground}")));
                }
                if seen[x] {
                    return Err(Error::Partition(format!("{x} occurs twice")));
                }
                seen[x] = true;
            }
            canonical.push(block);
        }
        if let Some(missing) = (1..=ground).find(|&x| !seen[x]) {
            return Err(Error::Partition(format!("{missing} is not covered")));
        }
        canonical.sort_unstable_by_key(|b| b[0]);
        Ok(Partition {
            ground,
            blocks: canonical,
        })
    }

    /// The partition into fibers of an arbitrary labelling of `1..=k`.
    pub fn kernel<T: Ord>(labels: &[T]) -> Self {
        let mut by_label: BTreeMap<&T, Vec<usize>> = BTreeMap::new();
        for (i, label) in labels.iter().enumerate() {
            by_label.entry(label).or_default().push(i + 1);
        }
        let mut blocks: Vec<Vec<usize>> = by_label.into_values().collect();
        blocks.sort_unstable_by_key(|b| b[0]);
        Partition {
            ground: labels.len(),
            blocks,
        }
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// True when every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        let label = coarser.block_labels();
        self.ground == coarser.ground
            && self
                .blocks
                .iter()
                .all(|b| b.iter().all(|&x| label[x - 1] == label[b[0] - 1]))
    }

    fn block_labels(&self) -> Vec<usize> {
        let mut label = vec![0; self.ground];
        for (j, block) in self.blocks.iter().enumerate() {
            for &x in block {
                label[x - 1] = j + 1;
            }
        }
        label
    }
}

/// Labels the blocks `1..=l` in order of their minima.
pub fn selfic_from_partition(p: &Partition) -> FinMap {
    FinMap {
        target: p.num_blocks(),
        values: p.block_labels(),
    }
}

/// The fibers of `f`. Inverse to [`selfic_from_partition`] on selfic maps.
pub fn partition_from_selfic(f: &FinMap) -> Partition {
    Partition::kernel(f.values())
}

/// The selfic map with the same fibers as the given labelling.
pub fn selfic_normalize<T: Ord>(labels: &[T]) -> FinMap {
    selfic_from_partition(&Partition::kernel(labels))
}

/// All selfic surjections `k -> l`, lexicographic in their values.
///
/// These are the restricted growth strings of length `k` with maximum `l`.
pub fn enumerate_selfic(k: usize, l: usize) -> Vec<FinMap> {
    fn extend(prefix: &mut Vec<usize>, max: usize, k: usize, l: usize, out: &mut Vec<FinMap>) {
        let i = prefix.len();
        if i == k {
            if max == l {
                out.push(FinMap {
                    target: l,
                    values: prefix.clone(),
                });
            }
            return;
        }
        // every remaining position may open at most one new block
        if max + (k - i) < l {
            return;
        }
        for v in 1..=(max + 1).min(l) {
            prefix.push(v);
            extend(prefix, max.max(v), k, l, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if l > k || (l == 0 && k > 0) {
        return out;
    }
    extend(&mut Vec::with_capacity(k), 0, k, l, &mut out);
    out
}

/// All maps `k -> l`, lexicographic in their values.
pub fn all_maps(k: usize, l: usize) -> AllMaps {
    AllMaps {
        target: l,
        next: if k > 0 && l == 0 {
            None
        } else {
            Some(vec![1; k])
        },
    }
}

pub struct AllMaps {
    target: usize,
    next: Option<Vec<usize>>,
}

impl Iterator for AllMaps {
    type Item = FinMap;

    fn next(&mut self) -> Option<FinMap> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if succ[i] < self.target {
                succ[i] += 1;
                self.next = Some(succ);
                break;
            }
            succ[i] = 1;
        }
        Some(FinMap {
            target: self.target,
            values: current,
        })
    }
}

/// `m (m-1) ... (m-k+1)`, the number of injections `k -> m`.
pub fn falling_factorial(m: usize, k: usize) -> u64 {
    if k > m {
        return 0;
    }
    (0..k).map(|i| (m - i) as u64).product()
}

impl fmt::Display for FinMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}:[", self.source_card(), self.target)?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for FinMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for FinMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(s.to_string());
        let s = s.trim();
        let (cards, list) = s.split_once(':').ok_or_else(bad)?;
        let (k, l) = cards.split_once("->").ok_or_else(bad)?;
        let k: usize = k.trim().parse().map_err(|_| bad())?;
        let l: usize = l.trim().parse().map_err(|_| bad())?;
        let inner = list
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(bad)?;
        let values: Vec<usize> = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(|v| v.trim().parse().map_err(|_| bad()))
                .collect::<Result<_>>()?
        };
        if values.len() != k {
            return Err(bad());
        }
        FinMap::new(l, values)
    }
}

impl Serialize for FinMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FinMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fm(target: usize, values: &[usize]) -> FinMap {
        FinMap::new(target, values.to_vec()).unwrap()
    }

    #[test]
    fn compose_examples() {
        let id3 = FinMap::identity(3);
        assert_eq!(compose(&id3, &id3).unwrap(), id3);
        let f = fm(2, &[1, 1, 2]);
        let g = fm(2, &[2, 1]);
        assert_eq!(compose(&f, &g).unwrap(), fm(2, &[2, 2, 1]));
        let c = compose(&f, &FinMap::to_one(2)).unwrap();
        assert_eq!(c, fm(1, &[1, 1, 1]));
    }

    #[test]
    fn compose_rejects_mismatched_cards() {
        let f = fm(2, &[1, 2]);
        let g = FinMap::identity(3);
        assert!(matches!(compose(&f, &g), Err(Error::Composition { .. })));
    }

    #[test]
    fn out_of_range_values_are_rejected() {
        assert!(FinMap::new(2, vec![1, 3]).is_err());
        assert!(FinMap::new(2, vec![0]).is_err());
        assert!(FinMap::new(0, vec![]).is_ok());
    }

    #[test]
    fn selfic_examples() {
        for k in 0..5 {
            assert!(is_selfic(&FinMap::identity(k)));
        }
        assert!(is_selfic(&fm(2, &[1, 1, 2])));
        assert!(!is_selfic(&fm(2, &[2, 1, 1])));
        assert!(!is_selfic(&fm(3, &[1, 2])));
        // 0 -> 0 is selfic, 0 -> 1 is not surjective
        assert!(is_selfic(&FinMap::empty(0)));
        assert!(!is_selfic(&FinMap::empty(1)));
    }

    #[test]
    fn partition_to_selfic_examples() {
        let discrete = Partition::new(3, vec![vec![1], vec![2], vec![3]]).unwrap();
        assert_eq!(selfic_from_partition(&discrete), FinMap::identity(3));
        let p = Partition::new(3, vec![vec![2], vec![3, 1]]).unwrap();
        assert_eq!(selfic_from_partition(&p), fm(2, &[1, 2, 1]));
        let codiscrete = Partition::new(3, vec![vec![1, 2, 3]]).unwrap();
        assert_eq!(selfic_from_partition(&codiscrete), fm(1, &[1, 1, 1]));
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(3, vec![vec![1, 2]]).is_err());
        assert!(Partition::new(2, vec![vec![1, 2], vec![2]]).is_err());
        assert!(Partition::new(2, vec![vec![1, 2], vec![]]).is_err());
        assert!(Partition::new(0, vec![]).is_ok());
    }

    #[test]
    fn enumerate_selfic_examples() {
        assert_eq!(enumerate_selfic(3, 3), vec![FinMap::identity(3)]);
        assert_eq!(
            enumerate_selfic(3, 2),
            vec![fm(2, &[1, 1, 2]), fm(2, &[1, 2, 1]), fm(2, &[1, 2, 2])]
        );
        assert_eq!(enumerate_selfic(4, 2).len(), 7);
        assert_eq!(enumerate_selfic(0, 0), vec![FinMap::empty(0)]);
        assert!(enumerate_selfic(2, 0).is_empty());
        assert!(enumerate_selfic(2, 3).is_empty());
    }

    #[test]
    fn enumerate_selfic_matches_filtered_brute_force() {
        for k in 0..=6 {
            for l in 0..=k {
                let brute: Vec<FinMap> = all_maps(k, l).filter(is_selfic).collect();
                assert_eq!(enumerate_selfic(k, l), brute, "k={k} l={l}");
            }
        }
    }

    #[test]
    fn all_maps_counts() {
        assert_eq!(all_maps(3, 2).count(), 8);
        assert_eq!(all_maps(0, 0).count(), 1);
        assert_eq!(all_maps(0, 4).count(), 1);
        assert_eq!(all_maps(2, 0).count(), 0);
    }

    #[test]
    fn refinement() {
        let fine = Partition::kernel(&[1, 2, 3, 3]);
        let coarse = Partition::kernel(&[1, 1, 2, 2]);
        assert!(fine.refines(&coarse));
        assert!(!coarse.refines(&fine));
    }

    #[test]
    fn text_form() {
        let f = fm(2, &[1, 1, 2]);
        assert_eq!(f.to_string(), "3->2:[1,1,2]");
        assert_eq!("3->2:[1,1,2]".parse::<FinMap>().unwrap(), f);
        assert_eq!(" 0 -> 0 : [ ] ".parse::<FinMap>().unwrap(), FinMap::empty(0));
        assert!("2->2:[1]".parse::<FinMap>().is_err());
        assert!("2->1:[1,2]".parse::<FinMap>().is_err());
        assert!("garbage".parse::<FinMap>().is_err());
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, "\"3->2:[1,1,2]\"");
        assert_eq!(serde_json::from_str::<FinMap>(&json).unwrap(), f);
    }

    #[test]
    fn falling_factorials() {
        assert_eq!(falling_factorial(4, 2), 12);
        assert_eq!(falling_factorial(3, 0), 1);
        assert_eq!(falling_factorial(2, 3), 0);
    }
}
