//! The unconstrained variants `Fin(M)` and `Fin(π)`, and plain `Fin`.
//!
//! Points of `Fin(M)` may coincide and move freely. An object of `Fin(π)`
//! is a tuple `f` of vertices of the cover with a selfic labelling `p` such
//! that points with one label share a base vertex and `(f, p)` is
//! injective. A morphism keeps points with one label moving in parallel
//! downstairs; its label map `u` is part of the data, and the induced base
//! map `v` must make `(u, v)` an `EpiFin` square.

use serde::Serialize;

use super::config::{ConfArrow, ConfigCategory};
use super::stack::{for_each_tick, Bounds, CoveringStack, Step};
use crate::epicat::validate_epifin_morphism;
use crate::error::{Error, Result};
use crate::finset::{all_maps, compose, enumerate_selfic, FinMap};
use crate::scomb::category::{Arrow, FiniteCategory, Materialized};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FinObject {
    pub points: Vec<usize>,
    /// Base labels; the identity for a single graph.
    pub labels: FinMap,
}

impl FinObject {
    pub fn card(&self) -> usize {
        self.points.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FinArrow {
    pub src: usize,
    pub tgt: usize,
    pub ticks: usize,
    pub steps: Vec<Step>,
    pub u: FinMap,
}

impl Arrow for FinArrow {
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

impl FinArrow {
    fn tick(&self, t: usize, k: usize) -> &[Step] {
        &self.steps[t * k..(t + 1) * k]
    }
}

fn fin_objects(stack: &CoveringStack, k_max: usize) -> Vec<FinObject> {
    let n = stack.top().vertex_count();
    let mut out = Vec::new();
    for k in 0..=k_max {
        for f in all_maps(k, n) {
            let points: Vec<usize> = f.values().iter().map(|&v| v - 1).collect();
            if stack.height() == 0 {
                out.push(FinObject {
                    points,
                    labels: FinMap::identity(k),
                });
                continue;
            }
            for l in 0..=k {
                for p in enumerate_selfic(k, l) {
                    let mut ok = true;
                    for i in 0..k {
                        for j in 0..i {
                            let same_label = p.apply(i + 1) == p.apply(j + 1);
                            if same_label
                                && (points[i] == points[j]
                                    || stack.vertex_at(0, points[i]) != stack.vertex_at(0, points[j]))
                            {
                                ok = false;
                            }
                        }
                    }
                    if ok {
                        out.push(FinObject {
                            points: points.clone(),
                            labels: p,
                        });
                    }
                }
            }
        }
    }
    out
}

/// The base map `v` with `v ∘ p = p' ∘ u`, if well defined.
fn induced_base_map(src: &FinObject, tgt: &FinObject, u: &FinMap) -> Option<FinMap> {
    let mut v = vec![0; src.labels.target_card()];
    for i in 1..=src.card() {
        let (j, w) = (src.labels.apply(i), tgt.labels.apply(u.apply(i)));
        if v[j - 1] != 0 && v[j - 1] != w {
            return None;
        }
        v[j - 1] = w;
    }
    Some(FinMap::new(tgt.labels.target_card(), v).expect("labels are in range"))
}

fn base_step(stack: &CoveringStack, s: Step) -> Step {
    stack.step_at(0, s)
}

#[derive(Clone, Debug)]
pub struct FinCategory {
    stack: CoveringStack,
    bounds: Bounds,
    cat: Materialized<FinObject, FinArrow>,
}

impl FinCategory {
    /// `Fin(M)` for a stack of height 0 and `Fin(π)` for height 1.
    pub fn build(stack: &CoveringStack, bounds: Bounds) -> Result<Self> {
        if stack.height() > 1 {
            return Err(Error::InvalidTower("Fin variants are built for heights 0 and 1".into()));
        }
        let objects = fin_objects(stack, bounds.k_max);
        let mut arrows = Vec::new();
        for (src, so) in objects.iter().enumerate() {
            let mut path = Vec::new();
            explore_free(stack, so, &so.points, &mut path, 0, bounds.tick_max, &mut |last, steps, ticks| {
                for (tgt, to) in objects.iter().enumerate() {
                    let choices: Vec<Vec<usize>> = last
                        .iter()
                        .map(|&x| (1..=to.card()).filter(|&j| to.points[j - 1] == x).collect())
                        .collect();
                    for_each_choice(&choices, &mut |vals| {
                        let u = FinMap::new(to.card(), vals.to_vec()).expect("choices are in range");
                        let Some(v) = induced_base_map(so, to, &u) else { return };
                        if validate_epifin_morphism(&so.labels, &to.labels, &u, &v).expect("shapes agree") {
                            arrows.push(FinArrow {
                                src,
                                tgt,
                                ticks,
                                steps: steps.to_vec(),
                                u,
                            });
                        }
                    });
                }
            });
        }
        let cards: Vec<usize> = objects.iter().map(FinObject::card).collect();
        let cards_c = cards.clone();
        let identity = move |o: usize| FinArrow {
            src: o,
            tgt: o,
            ticks: 0,
            steps: Vec::new(),
            u: FinMap::identity(cards[o]),
        };
        let compose_arrows = move |f: &FinArrow, g: &FinArrow| -> Result<FinArrow> {
            let k_mid = cards_c[f.tgt];
            let mut steps = f.steps.clone();
            for t in 0..g.ticks {
                let row = g.tick(t, k_mid);
                steps.extend(f.u.values().iter().map(|&j| row[j - 1]));
            }
            Ok(FinArrow {
                src: f.src,
                tgt: g.tgt,
                ticks: f.ticks + g.ticks,
                steps,
                u: compose(&f.u, &g.u)?,
            })
        };
        let cat = Materialized::build(objects, arrows, identity, compose_arrows, Some(bounds.tick_max))?;
        Ok(FinCategory {
            stack: stack.clone(),
            bounds,
            cat,
        })
    }

    pub fn stack(&self) -> &CoveringStack {
        &self.stack
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn materialized(&self) -> &Materialized<FinObject, FinArrow> {
        &self.cat
    }

    pub fn category(&self) -> &FiniteCategory {
        self.cat.category()
    }

    /// For `Fin(π)`: the base object `g` with `g ∘ p = π ∘ f`.
    pub fn base_object(&self, o: &FinObject) -> FinObject {
        let l = o.labels.target_card();
        let mut g = vec![0; l];
        for i in 0..o.card() {
            g[o.labels.apply(i + 1) - 1] = self.stack.vertex_at(0, o.points[i]);
        }
        FinObject {
            points: g,
            labels: FinMap::identity(l),
        }
    }

    /// For `Fin(π)`: the base morphism, as data over `base`, which must be
    /// `Fin(M)` for the base graph with the same bounds.
    pub fn base_arrow(&self, a: &FinArrow, base: &FinCategory) -> Result<FinArrow> {
        let so = self.cat.object(a.src);
        let to = self.cat.object(a.tgt);
        let v = induced_base_map(so, to, &a.u).ok_or(Error::InvalidCategory("base map undefined".into()))?;
        let l = so.labels.target_card();
        let reps: Vec<usize> = (1..=l)
            .map(|j| (1..=so.card()).find(|&i| so.labels.apply(i) == j).expect("labels are onto") - 1)
            .collect();
        let k = so.card();
        let steps = (0..a.ticks)
            .flat_map(|t| reps.iter().map(move |&c| base_step(&self.stack, a.steps[t * k + c])))
            .collect();
        let lookup = |o: &FinObject| {
            base.cat
                .object_id(&self.base_object(o))
                .ok_or(Error::InvalidCategory("base object missing".into()))
        };
        Ok(FinArrow {
            src: lookup(so)?,
            tgt: lookup(to)?,
            ticks: a.ticks,
            steps,
            u: v,
        })
    }

    /// The image of a configuration morphism over the same stack.
    pub fn from_config(&self, conf: &ConfigCategory, a: &ConfArrow) -> Result<FinArrow> {
        let lookup = |id: usize| {
            let labels = if self.stack.height() == 0 {
                FinMap::identity(conf.object(id).len())
            } else {
                conf.levels(id).projection(0)
            };
            self.cat
                .object_id(&FinObject {
                    points: conf.object(id).to_vec(),
                    labels,
                })
                .ok_or(Error::InvalidCategory("configuration object missing".into()))
        };
        Ok(FinArrow {
            src: lookup(a.src)?,
            tgt: lookup(a.tgt)?,
            ticks: a.ticks,
            steps: a.steps.clone(),
            u: conf.label_maps(a).pop().expect("top label map"),
        })
    }
}

fn for_each_choice(choices: &[Vec<usize>], visit: &mut dyn FnMut(&[usize])) {
    fn go(choices: &[Vec<usize>], acc: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if acc.len() == choices.len() {
            visit(acc);
            return;
        }
        for &c in &choices[acc.len()] {
            acc.push(c);
            go(choices, acc, visit);
            acc.pop();
        }
    }
    go(choices, &mut Vec::with_capacity(choices.len()), visit);
}

/// Homotopies in which points sharing a base label take the same base
/// step and are otherwise unconstrained.
fn explore_free(
    stack: &CoveringStack,
    obj: &FinObject,
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
        &mut |steps, c, s| {
            (0..c).all(|c2| {
                obj.labels.apply(c2 + 1) != obj.labels.apply(c + 1)
                    || base_step(stack, steps[c2]) == base_step(stack, s)
            })
        },
        &mut |row| rows.push(row.to_vec()),
    );
    for row in rows {
        let next: Vec<usize> = start.iter().zip(&row).map(|(&p, &s)| stack.advance(p, s)).collect();
        path.extend_from_slice(&row);
        explore_free(stack, obj, &next, path, ticks + 1, tick_max, visit);
        path.truncate(path.len() - row.len());
    }
}

/// A morphism of plain `Fin` between `{1..src}` and `{1..tgt}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PlainMap {
    pub src: usize,
    pub tgt: usize,
    pub map: FinMap,
}

impl Arrow for PlainMap {
    fn source(&self) -> usize {
        self.src
    }
    fn target(&self) -> usize {
        self.tgt
    }
}

/// `Fin` on the sets of size `0..=k_max`; object `k` has id `k`.
pub fn plain_fin(k_max: usize) -> Materialized<usize, PlainMap> {
    let arrows = (0..=k_max)
        .flat_map(|k| {
            (0..=k_max).flat_map(move |l| {
                all_maps(k, l).map(move |map| PlainMap {
                    src: k,
                    tgt: l,
                    map,
                })
            })
        })
        .collect();
    Materialized::build(
        (0..=k_max).collect(),
        arrows,
        |k| PlainMap {
            src: k,
            tgt: k,
            map: FinMap::identity(k),
        },
        |f, g| {
            Ok(PlainMap {
                src: f.src,
                tgt: g.tgt,
                map: compose(&f.map, &g.map)?,
            })
        },
        None,
    )
    .expect("Fin is closed under composition")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphcov::{CoveringSpace, Graph};

    #[test]
    fn fin_of_a_cycle_counts_objects_and_zero_length_maps() {
        let f = FinCategory::build(&CoveringStack::single(&Graph::cycle(3)), Bounds::new(2, 1, 2)).unwrap();
        f.category().validate().unwrap();
        assert_eq!(f.category().num_objects(), 1 + 3 + 9);
        // a single point: targets with u forced onto copies of it
        let x = f
            .materialized()
            .object_id(&FinObject {
                points: vec![0],
                labels: FinMap::identity(1),
            })
            .unwrap();
        let zero = f
            .category()
            .outgoing(x)
            .iter()
            .filter(|&&m| f.category().length(m) == 0)
            .count();
        assert_eq!(zero, 1 + 3 + 3);
    }

    #[test]
    fn fin_pi_admits_shared_vertices_with_distinct_labels() {
        let pi = CoveringSpace::cyclic(6, 3).unwrap();
        let f = FinCategory::build(&CoveringStack::covering(&pi), Bounds::new(2, 0, 2)).unwrap();
        let objs = f.materialized().objects();
        assert!(objs.contains(&FinObject {
            points: vec![0, 0],
            labels: FinMap::identity(2),
        }));
        assert!(!objs.contains(&FinObject {
            points: vec![0, 0],
            labels: FinMap::to_one(2),
        }));
        assert_eq!(objs.len(), 1 + 6 + 36 + 6);
    }

    #[test]
    fn plain_fin_is_a_category() {
        let f = plain_fin(3);
        f.category().validate().unwrap();
        assert_eq!(f.category().num_morphisms(), (0..=3u32).map(|k| (0..=3u32).map(|l| l.pow(k)).sum::<u32>()).sum::<u32>() as usize);
    }
}
