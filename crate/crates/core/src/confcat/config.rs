//! Bounded configuration categories of a covering stack.
//!
//! An object is an injective tuple of top-level vertices. Its shadows on
//! the lower levels, with the selfic surjections between them, are derived
//! from it. A morphism of length `a` is a homotopy of `a` ticks obeying the
//! sticky rules at every level, followed by a target whose points contain
//! the final positions. The maps `u_i` between labels are then forced, and
//! every consecutive pair of them must form an `EpiFin` square.
//!
//! Height 0 gives `config(M)`, height 1 `config(π)`, height 2 the tower
//! category.

use rustc_hash::FxHashMap;
use serde::Serialize;

use super::stack::{for_each_tick, shadow, sticky_compatible, Bounds, CoveringStack, Step};
use crate::epicat::{validate_epifin_morphism, EpiFinObject};
use crate::error::{Error, Result};
use crate::finset::FinMap;
use crate::scomb::category::{Arrow, FiniteCategory, Materialized};

/// A morphism: source and target object ids and the top-level steps,
/// `ticks` rows of one step per source point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ConfArrow {
    pub src: usize,
    pub tgt: usize,
    pub ticks: usize,
    pub steps: Vec<Step>,
}

impl Arrow for ConfArrow {
    fn source(&self) -> usize {
        self.src
    }
    fn target(&self) -> usize {
        self.tgt
    }
    fn length(&self) -> usize {
        self.ticks
    }
}

impl ConfArrow {
    pub fn identity(o: usize) -> Self {
        ConfArrow {
            src: o,
            tgt: o,
            ticks: 0,
            steps: Vec::new(),
        }
    }

    pub fn tick(&self, t: usize, k: usize) -> &[Step] {
        &self.steps[t * k..(t + 1) * k]
    }
}

/// Derived block data of a top-level tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Levels {
    /// `labels[i][c]`: 1-based level-`i` label of top point `c`.
    pub labels: Vec<Vec<usize>>,
    /// `points[i]`: the distinct level-`i` shadows in label order.
    pub points: Vec<Vec<usize>>,
    /// `reps[i][j]`: the first top point with level-`i` label `j + 1`.
    pub reps: Vec<Vec<usize>>,
}

impl Levels {
    pub fn of(stack: &CoveringStack, top: &[usize]) -> Self {
        let h = stack.height();
        let mut labels = Vec::with_capacity(h + 1);
        let mut points = Vec::with_capacity(h + 1);
        let mut reps = Vec::with_capacity(h + 1);
        for level in 0..=h {
            let (l, p) = shadow(stack, level, top);
            let mut r = vec![usize::MAX; p.len()];
            for (c, &j) in l.iter().enumerate().rev() {
                r[j - 1] = c;
            }
            labels.push(l);
            points.push(p);
            reps.push(r);
        }
        Levels { labels, points, reps }
    }

    pub fn card(&self, level: usize) -> usize {
        self.points[level].len()
    }

    /// The selfic surjection from level `level + 1` labels onto level
    /// `level` labels.
    pub fn projection(&self, level: usize) -> FinMap {
        let values = self.reps[level + 1].iter().map(|&c| self.labels[level][c]).collect();
        FinMap::new(self.card(level), values).expect("labels are in range")
    }
}

/// The label maps `u_i` induced by a homotopy ending at `last` (top
/// positions, one per source point) into the target `tgt`. `None` when some
/// final shadow is missing from the target.
pub fn induced_label_maps(stack: &CoveringStack, src: &Levels, last: &[usize], tgt: &Levels) -> Option<Vec<FinMap>> {
    (0..=stack.height())
        .map(|level| {
            let values = src.reps[level]
                .iter()
                .map(|&c| {
                    let v = stack.vertex_at(level, last[c]);
                    tgt.points[level].iter().position(|&w| w == v).map(|j| j + 1)
                })
                .collect::<Option<Vec<_>>>()?;
            Some(FinMap::new(tgt.card(level), values).expect("positions are in range"))
        })
        .collect()
}

/// Whether every consecutive pair of label maps is an `EpiFin` square.
pub fn squares_valid(src: &Levels, tgt: &Levels, u: &[FinMap]) -> bool {
    (0..u.len().saturating_sub(1)).all(|level| {
        validate_epifin_morphism(&src.projection(level), &tgt.projection(level), &u[level + 1], &u[level])
            .expect("shapes agree by construction")
    })
}

/// Every injective tuple of top vertices with at most `k_max` entries,
/// ordered by length then lexicographically.
pub fn injective_tuples(n: usize, k_max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..k_max.min(n) {
        let mut next = Vec::new();
        for t in &layer {
            for v in 0..n {
                if !t.contains(&v) {
                    let mut t2: Vec<usize> = t.clone();
                    t2.push(v);
                    next.push(t2);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[derive(Clone, Debug)]
pub struct ConfigCategory {
    stack: CoveringStack,
    bounds: Bounds,
    levels: Vec<Levels>,
    cat: Materialized<Vec<usize>, ConfArrow>,
}

impl ConfigCategory {
    pub fn build(stack: &CoveringStack, bounds: Bounds) -> Result<Self> {
        let objects = injective_tuples(stack.top().vertex_count(), bounds.k_max);
        let levels: Vec<Levels> = objects.iter().map(|o| Levels::of(stack, o)).collect();
        let mut by_mask: FxHashMap<Vec<bool>, Vec<usize>> = FxHashMap::default();
        let masks: Vec<Vec<bool>> = objects
            .iter()
            .map(|o| {
                let mut m = vec![false; stack.top().vertex_count()];
                for &v in o {
                    m[v] = true;
                }
                m
            })
            .collect();
        let mut arrows = Vec::new();
        for src in 0..objects.len() {
            let mut path = Vec::new();
            explore(stack, &objects[src], &mut path, 0, bounds.tick_max, &mut |last, steps, ticks| {
                let mut need = vec![false; stack.top().vertex_count()];
                for &v in last {
                    need[v] = true;
                }
                let targets = by_mask.entry(need.clone()).or_insert_with(|| {
                    (0..objects.len())
                        .filter(|&o| need.iter().zip(&masks[o]).all(|(&n, &m)| !n || m))
                        .collect()
                });
                for &tgt in targets.iter() {
                    let u = induced_label_maps(stack, &levels[src], last, &levels[tgt]).expect("target contains the end");
                    if squares_valid(&levels[src], &levels[tgt], &u) {
                        arrows.push(ConfArrow {
                            src,
                            tgt,
                            ticks,
                            steps: steps.to_vec(),
                        });
                    }
                }
            });
        }
        let stack_c = stack.clone();
        let objects_c = objects.clone();
        let levels_c = levels.clone();
        let compose = move |f: &ConfArrow, g: &ConfArrow| -> Result<ConfArrow> {
            let u = top_label_map(&stack_c, &objects_c, &levels_c, f)?;
            let k = objects_c[f.src].len();
            let k_mid = objects_c[f.tgt].len();
            let mut steps = f.steps.clone();
            for t in 0..g.ticks {
                let row = g.tick(t, k_mid);
                steps.extend(u.values().iter().map(|&j| row[j - 1]));
            }
            debug_assert_eq!(steps.len(), (f.ticks + g.ticks) * k);
            Ok(ConfArrow {
                src: f.src,
                tgt: g.tgt,
                ticks: f.ticks + g.ticks,
                steps,
            })
        };
        let cat = Materialized::build(objects, arrows, ConfArrow::identity, compose, Some(bounds.tick_max))?;
        Ok(ConfigCategory {
            stack: stack.clone(),
            bounds,
            levels,
            cat,
        })
    }

    pub fn stack(&self) -> &CoveringStack {
        &self.stack
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn materialized(&self) -> &Materialized<Vec<usize>, ConfArrow> {
        &self.cat
    }

    pub fn category(&self) -> &FiniteCategory {
        self.cat.category()
    }

    pub fn object(&self, id: usize) -> &[usize] {
        self.cat.object(id)
    }

    pub fn object_id(&self, points: &[usize]) -> Option<usize> {
        self.cat.object_id(&points.to_vec())
    }

    pub fn arrow(&self, id: usize) -> &ConfArrow {
        self.cat.arrow(id)
    }

    pub fn levels(&self, id: usize) -> &Levels {
        &self.levels[id]
    }

    /// For height 1: the selfic surjection of an object.
    pub fn reference_object(&self, id: usize) -> EpiFinObject {
        EpiFinObject::new(self.levels[id].projection(0)).expect("shadow labels are selfic")
    }

    /// Top positions at the end of a morphism.
    pub fn final_positions(&self, a: &ConfArrow) -> Vec<usize> {
        end_positions(&self.stack, self.cat.object(a.src), a)
    }

    /// The label maps `u_0, …, u_h` of a morphism.
    pub fn label_maps(&self, a: &ConfArrow) -> Vec<FinMap> {
        let last = self.final_positions(a);
        induced_label_maps(&self.stack, &self.levels[a.src], &last, &self.levels[a.tgt])
            .expect("enumerated arrows end inside their target")
    }

    /// The level-`level` shadow homotopy, one step per level-`level` label
    /// per tick.
    pub fn level_steps(&self, a: &ConfArrow, level: usize) -> Vec<Step> {
        let k = self.cat.object(a.src).len();
        let reps = &self.levels[a.src].reps[level];
        (0..a.ticks)
            .flat_map(|t| {
                let row = a.tick(t, k);
                reps.iter().map(move |&c| self.stack.step_at(level, row[c]))
            })
            .collect()
    }

    /// The image of a morphism in the configuration category of the single
    /// graph at `level`, as data for [`ConfigCategory::materialized`] of
    /// that category.
    pub fn shadow_arrow(&self, a: &ConfArrow, level: usize, cod: &ConfigCategory) -> Result<ConfArrow> {
        let src = cod
            .object_id(&self.levels[a.src].points[level])
            .ok_or(Error::InvalidCategory("shadow source missing".into()))?;
        let tgt = cod
            .object_id(&self.levels[a.tgt].points[level])
            .ok_or(Error::InvalidCategory("shadow target missing".into()))?;
        Ok(ConfArrow {
            src,
            tgt,
            ticks: a.ticks,
            steps: self.level_steps(a, level),
        })
    }
}

pub(crate) fn end_positions(stack: &CoveringStack, start: &[usize], a: &ConfArrow) -> Vec<usize> {
    let k = start.len();
    let mut pos = start.to_vec();
    for t in 0..a.ticks {
        for (p, &s) in pos.iter_mut().zip(a.tick(t, k)) {
            *p = stack.advance(*p, s);
        }
    }
    pos
}

fn top_label_map(stack: &CoveringStack, objects: &[Vec<usize>], levels: &[Levels], a: &ConfArrow) -> Result<FinMap> {
    let last = end_positions(stack, &objects[a.src], a);
    let maps = induced_label_maps(stack, &levels[a.src], &last, &levels[a.tgt])
        .ok_or(Error::InvalidCategory("arrow ends outside its target".into()))?;
    Ok(maps.into_iter().next_back().expect("at least one level"))
}

/// Depth-first walk over sticky homotopies from `start` of at most
/// `tick_max` ticks. `visit` receives the current positions, the flattened
/// steps so far and the number of ticks, once per homotopy.
pub fn explore(
    stack: &CoveringStack,
    start: &[usize],
    path: &mut Vec<Step>,
    ticks: usize,
    tick_max: usize,
    visit: &mut dyn FnMut(&[usize], &[Step], usize),
) {
    visit(start, path, ticks);
    if ticks == tick_max {
        return;
    }
    let mut rows = Vec::new();
    for_each_tick(
        stack,
        start,
        &mut |steps, c, s| sticky_compatible(stack, start, steps, c, s),
        &mut |row| rows.push(row.to_vec()),
    );
    for row in rows {
        let next: Vec<usize> = start.iter().zip(&row).map(|(&p, &s)| stack.advance(p, s)).collect();
        path.extend_from_slice(&row);
        explore(stack, &next, path, ticks + 1, tick_max, visit);
        path.truncate(path.len() - row.len());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphcov::{CoveringSpace, Graph};

    #[test]
    fn injective_tuple_counts() {
        assert_eq!(injective_tuples(3, 2).len(), 1 + 3 + 6);
        assert_eq!(injective_tuples(2, 5).len(), 1 + 2 + 2);
    }

    #[test]
    fn config_of_a_cycle_is_a_valid_category() {
        let c = ConfigCategory::build(&CoveringStack::single(&Graph::cycle(3)), Bounds::new(2, 2, 2)).unwrap();
        c.category().validate().unwrap();
        assert_eq!(c.category().num_objects(), 10);
        // one point, zero ticks: the identity plus inclusions into the two
        // pairs containing it in either order
        let x = c.object_id(&[0]).unwrap();
        let zero: Vec<_> = c
            .category()
            .outgoing(x)
            .iter()
            .filter(|&&m| c.category().length(m) == 0)
            .collect();
        assert_eq!(zero.len(), 1 + 4);
    }

    #[test]
    fn covering_objects_carry_their_stratum() {
        let pi = CoveringSpace::cyclic(6, 3).unwrap();
        let c = ConfigCategory::build(&CoveringStack::covering(&pi), Bounds::new(2, 1, 2)).unwrap();
        c.category().validate().unwrap();
        let o = c.object_id(&[0, 3]).unwrap();
        assert_eq!(c.reference_object(o).map().values(), &[1, 1]);
        let o = c.object_id(&[0, 1]).unwrap();
        assert!(c.reference_object(o).is_identity());
    }

    #[test]
    fn covering_points_in_a_fiber_move_in_parallel() {
        let pi = CoveringSpace::cyclic(6, 3).unwrap();
        let c = ConfigCategory::build(&CoveringStack::covering(&pi), Bounds::new(2, 1, 2)).unwrap();
        let o = c.object_id(&[0, 3]).unwrap();
        for &m in c.category().outgoing(o) {
            let a = c.arrow(m);
            if a.ticks == 1 {
                let row = a.tick(0, 2);
                assert_eq!(c.stack().step_at(0, row[0]), c.stack().step_at(0, row[1]));
            }
        }
    }
}
