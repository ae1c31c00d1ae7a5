//! Exhaustive check that a morphism of `config(π)` is determined by its
//! source, its target and its image in `config(M)`.
//!
//! The streaming check walks base homotopies tick by tick from each
//! source. Alongside each base prefix it keeps every upstairs homotopy
//! projecting onto it, found by filtering whole stars rather than by
//! lifting. Two upstairs homotopies sharing a base prefix would be two
//! morphisms with equal triples as soon as a common target exists. The
//! materialized check builds both categories and compares triple counts.

use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use super::config::{injective_tuples, induced_label_maps, squares_valid, ConfigCategory, Levels};
use super::stack::{for_each_tick, sticky_compatible, Bounds, CoveringStack, Step};
use crate::error::Result;
use crate::graphcov::CoveringSpace;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DeterminacyReport {
    pub sources: usize,
    /// Base homotopies visited, one per source and base prefix.
    pub base_homotopies: u64,
    /// Upstairs homotopies visited.
    pub cover_homotopies: u64,
    /// Morphisms of `config(π)` covered: upstairs homotopies paired with
    /// each valid target.
    pub morphisms: u64,
    /// Largest number of upstairs homotopies over one base homotopy.
    pub max_bucket: usize,
    /// Base homotopies carrying two upstairs homotopies with a common
    /// valid target.
    pub collisions: u64,
    pub witness: Option<String>,
}

impl DeterminacyReport {
    pub fn holds(&self) -> bool {
        self.collisions == 0
    }
}

struct Walker<'a> {
    stack: &'a CoveringStack,
    base: CoveringStack,
    tick_max: usize,
    src: Levels,
    objects: &'a [Vec<usize>],
    levels: &'a [Levels],
    masks: &'a [Vec<bool>],
    base_ticks: FxHashMap<Vec<usize>, Vec<Vec<Step>>>,
    report: DeterminacyReport,
}

impl Walker<'_> {
    fn base_rows(&mut self, pos: &[usize]) -> Vec<Vec<Step>> {
        if let Some(r) = self.base_ticks.get(pos) {
            return r.clone();
        }
        let mut rows = Vec::new();
        let base = &self.base;
        for_each_tick(
            base,
            pos,
            &mut |steps, c, s| sticky_compatible(base, pos, steps, c, s),
            &mut |row| rows.push(row.to_vec()),
        );
        self.base_ticks.insert(pos.to_vec(), rows.clone());
        rows
    }

    /// Every legal upstairs row from `pos` whose shadow is `down` on the
    /// base labels.
    fn cover_rows(&self, pos: &[usize], down: &[Step]) -> Vec<Vec<Step>> {
        let labels = &self.src.labels[0];
        let stack = self.stack;
        let mut rows = Vec::new();
        for_each_tick(
            stack,
            pos,
            &mut |steps, c, s| stack.step_at(0, s) == down[labels[c] - 1] && sticky_compatible(stack, pos, steps, c, s),
            &mut |row| rows.push(row.to_vec()),
        );
        rows
    }

    fn common_target(&self, ends: &[Vec<usize>]) -> Option<usize> {
        (0..self.objects.len()).find(|&t| {
            ends.iter()
                .filter(|last| {
                    induced_label_maps(self.stack, &self.src, last, &self.levels[t])
                        .is_some_and(|u| squares_valid(&self.src, &self.levels[t], &u))
                })
                .count()
                >= 2
        })
    }

    fn valid_targets(&self, last: &[usize]) -> u64 {
        (0..self.objects.len())
            .filter(|&t| {
                last.iter().all(|&v| self.masks[t][v])
                    && induced_label_maps(self.stack, &self.src, last, &self.levels[t])
                        .is_some_and(|u| squares_valid(&self.src, &self.levels[t], &u))
            })
            .count() as u64
    }

    fn walk(&mut self, down_pos: &[usize], ups: &[Vec<usize>], ticks: usize) {
        self.report.base_homotopies += 1;
        for up in ups {
            self.report.morphisms += self.valid_targets(up);
        }
        self.report.cover_homotopies += ups.len() as u64;
        self.report.max_bucket = self.report.max_bucket.max(ups.len());
        if ups.len() > 1 {
            if let Some(t) = self.common_target(ups) {
                self.report.collisions += 1;
                self.report.witness.get_or_insert(format!(
                    "source {:?}: {} cover homotopies of {ticks} ticks over one base homotopy share target {:?}",
                    self.src.points[1],
                    ups.len(),
                    self.objects[t]
                ));
            }
        }
        if ticks == self.tick_max {
            return;
        }
        for down in self.base_rows(down_pos) {
            let next_down: Vec<usize> = down_pos.iter().zip(&down).map(|(&p, &s)| self.base.advance(p, s)).collect();
            let mut next_ups = Vec::new();
            for up in ups {
                for row in self.cover_rows(up, &down) {
                    next_ups.push(up.iter().zip(&row).map(|(&p, &s)| self.stack.advance(p, s)).collect::<Vec<_>>());
                }
            }
            self.walk(&next_down, &next_ups, ticks + 1);
        }
    }
}

/// The streaming check over every source with at most `k_max` points and
/// homotopies of at most `tick_max` ticks.
pub fn check_determinacy(pi: &CoveringSpace, k_max: usize, tick_max: usize) -> DeterminacyReport {
    let stack = CoveringStack::covering(pi);
    let objects = injective_tuples(pi.total().vertex_count(), k_max);
    let levels: Vec<Levels> = objects.iter().map(|o| Levels::of(&stack, o)).collect();
    let n = pi.total().vertex_count();
    let masks: Vec<Vec<bool>> = objects.iter().map(|o| (0..n).map(|v| o.contains(&v)).collect()).collect();
    let mut report = DeterminacyReport::default();
    let mut base_ticks = FxHashMap::default();
    for (o, lv) in objects.iter().zip(&levels) {
        let mut w = Walker {
            stack: &stack,
            base: stack.at(0),
            tick_max,
            src: lv.clone(),
            objects: &objects,
            levels: &levels,
            masks: &masks,
            base_ticks: std::mem::take(&mut base_ticks),
            report: std::mem::take(&mut report),
        };
        w.report.sources += 1;
        let down = lv.points[0].clone();
        w.walk(&down, std::slice::from_ref(o), 0);
        base_ticks = w.base_ticks;
        report = w.report;
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaterializedDeterminacy {
    pub morphisms: usize,
    pub distinct_triples: usize,
}

/// Builds `config(π)` and `config(M)` and counts distinct `(source,
/// target, base morphism)` triples.
pub fn check_determinacy_materialized(pi: &CoveringSpace, bounds: Bounds) -> Result<MaterializedDeterminacy> {
    let stack = CoveringStack::covering(pi);
    let x = ConfigCategory::build(&stack, bounds)?;
    let m = ConfigCategory::build(&stack.at(0), bounds)?;
    let mut triples = FxHashSet::default();
    for a in x.materialized().arrows() {
        let b = x.shadow_arrow(a, 0, &m)?;
        let id = m
            .materialized()
            .arrow_id(&b)
            .ok_or(crate::error::Error::InvalidCategory("base morphism missing".into()))?;
        triples.insert((a.src, a.tgt, id));
    }
    Ok(MaterializedDeterminacy {
        morphisms: x.category().num_morphisms(),
        distinct_triples: triples.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streaming_small() {
        let pi = CoveringSpace::cyclic(6, 3).unwrap();
        let r = check_determinacy(&pi, 2, 2);
        assert!(r.holds(), "{r:?}");
        assert_eq!(r.max_bucket, 1);
        let m = check_determinacy_materialized(&pi, Bounds::new(2, 2, 1)).unwrap();
        assert_eq!(m.morphisms, m.distinct_triples);
        assert_eq!(r.morphisms, m.morphisms as u64);
    }
}
