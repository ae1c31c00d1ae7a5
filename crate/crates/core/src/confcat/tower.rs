//! The configuration category of a height-2 tower `M(2) → M(1) → M(0)`,
//! its reference functor to `TriFin`, and the lifting checks on it.

use rustc_hash::FxHashSet;
use serde::Serialize;

use super::config::{induced_label_maps, squares_valid, ConfArrow, ConfigCategory, Levels};
use super::stack::{Bounds, CoveringStack, Step};
use crate::epicat::{enumerate_trifin_objects, trifin_category, EpiFinObject, IndexedTriSquare, TriFinObject};
use crate::error::{Error, Result};
use crate::graphcov::{CoveringSpace, Tower};
use crate::scomb::category::Functor;

pub fn build_config_pi_tower(t: &Tower, bounds: Bounds) -> Result<ConfigCategory> {
    if t.height() != 2 {
        return Err(Error::InvalidTower(format!("expected height 2, got {}", t.height())));
    }
    ConfigCategory::build(&CoveringStack::tower(t), bounds)
}

/// Object label `k_0 ↞ k_1 ↞ k_2`.
pub fn tower_reference_object(c: &ConfigCategory, o: usize) -> TriFinObject {
    let l = c.levels(o);
    TriFinObject::new(
        EpiFinObject::new(l.projection(0)).expect("selfic"),
        EpiFinObject::new(l.projection(1)).expect("selfic"),
    )
    .expect("composable")
}

/// The reference functor to `TriFin` on objects with `k_2 ≤ k_max`,
/// validated.
pub fn tower_reference_functor(c: &ConfigCategory) -> Result<Functor> {
    let trifin = trifin_category(enumerate_trifin_objects(c.bounds().k_max))?;
    let f = c.materialized().functor_to(
        &trifin,
        |o| tower_reference_object(c, c.object_id(o).expect("own object")),
        |a: &ConfArrow| {
            let u = c.label_maps(a);
            IndexedTriSquare {
                src: trifin.object_id(&tower_reference_object(c, a.src)).expect("object"),
                tgt: trifin.object_id(&tower_reference_object(c, a.tgt)).expect("object"),
                verticals: [u[0].clone(), u[1].clone(), u[2].clone()],
            }
        },
    )?;
    f.validate(c.category(), trifin.category())?;
    Ok(f)
}

/// Lifts per-label steps on level `i` to level `i + 1`, starting from the
/// level `i + 1` points of the source. `None` if a dart has no lift.
fn lift_level(stage: &CoveringSpace, src: &Levels, level: usize, steps: &[Step], ticks: usize) -> Option<Vec<Step>> {
    let lower = src.card(level);
    let upper = src.card(level + 1);
    let down_label: Vec<usize> = src.reps[level + 1].iter().map(|&c| src.labels[level][c] - 1).collect();
    let mut pos = src.points[level + 1].clone();
    let mut out = Vec::with_capacity(ticks * upper);
    for t in 0..ticks {
        for j in 0..upper {
            let s = match steps[t * lower + down_label[j]] {
                None => None,
                Some(d) => {
                    let up = stage.lift_dart(pos[j], d)?;
                    pos[j] = stage.total().head(up);
                    Some(up)
                }
            };
            out.push(s);
        }
    }
    Some(out)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TowerDeterminacy {
    pub morphisms: usize,
    pub agreeing: usize,
    pub distinct_triples: usize,
    pub witness: Option<String>,
}

impl TowerDeterminacy {
    pub fn holds(&self) -> bool {
        self.agreeing == self.morphisms && self.distinct_triples == self.morphisms
    }
}

/// Recomputes `γ_1` and `γ_2` from `γ_0` and the source by unique lifting
/// and compares with the stored data; also checks that `(source, target,
/// γ_0)` never repeats.
pub fn check_tower_determinacy(c: &ConfigCategory) -> TowerDeterminacy {
    let stack = c.stack();
    let mut report = TowerDeterminacy::default();
    let mut triples = FxHashSet::default();
    for (m, a) in c.materialized().arrows().iter().enumerate() {
        report.morphisms += 1;
        let src = c.levels(a.src);
        let g0 = c.level_steps(a, 0);
        let g1 = lift_level(stack.stage(0), src, 0, &g0, a.ticks);
        let g2 = g1.as_ref().and_then(|g1| lift_level(stack.stage(1), src, 1, g1, a.ticks));
        let agree = g1.as_deref() == Some(&c.level_steps(a, 1)[..]) && g2.as_deref() == Some(&c.level_steps(a, 2)[..]);
        if agree {
            report.agreeing += 1;
        } else {
            report.witness.get_or_insert(format!("morphism {m}: recomputed lifts differ"));
        }
        if !triples.insert((a.src, a.tgt, a.ticks, g0)) {
            report.witness.get_or_insert(format!("morphism {m}: repeated (source, target, γ_0)"));
        }
    }
    report.distinct_triples = triples.len();
    report
}

/// A source, a target and a base homotopy with matching shadow endpoints
/// for which the lifted level-1 homotopy misses the target, so that no
/// tower morphism exists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExcludedTriple {
    pub source: Vec<usize>,
    pub target: Vec<usize>,
    pub base_steps: Vec<Step>,
    pub ticks: usize,
    /// Level-1 end positions of the lift.
    pub lifted_end: Vec<usize>,
    /// Level-1 points of the target.
    pub target_level1: Vec<usize>,
}

/// Searches source/target pairs of the tower category and base morphisms
/// of `config(M(0))` between their shadows, in id order.
pub fn find_excluded_triple(c: &ConfigCategory) -> Result<Option<ExcludedTriple>> {
    let stack = c.stack();
    let base = ConfigCategory::build(&stack.at(0), c.bounds())?;
    for src in 0..c.category().num_objects() {
        let sl = c.levels(src);
        let Some(b_src) = base.object_id(&sl.points[0]) else { continue };
        for &bm in base.category().outgoing(b_src) {
            let a = base.arrow(bm);
            let Some(g1) = lift_level(stack.stage(0), sl, 0, &a.steps, a.ticks) else { continue };
            let Some(g2) = lift_level(stack.stage(1), sl, 1, &g1, a.ticks) else { continue };
            let k = c.object(src).len();
            let mut last = c.object(src).to_vec();
            for t in 0..a.ticks {
                for j in 0..k {
                    let s = g2[t * sl.card(2) + sl.labels[2][j] - 1];
                    last[j] = stack.advance(last[j], s);
                }
            }
            let end1: Vec<usize> = sl.reps[1].iter().map(|&cc| stack.vertex_at(1, last[cc])).collect();
            for tgt in 0..c.category().num_objects() {
                let tl = c.levels(tgt);
                if tl.points[0] != base.object(a.tgt) {
                    continue;
                }
                let exists = induced_label_maps(stack, sl, &last, tl).is_some_and(|u| squares_valid(sl, tl, &u));
                let misses_level1 = end1.iter().any(|v| !tl.points[1].contains(v));
                if !exists && misses_level1 {
                    return Ok(Some(ExcludedTriple {
                        source: c.object(src).to_vec(),
                        target: c.object(tgt).to_vec(),
                        base_steps: a.steps.clone(),
                        ticks: a.ticks,
                        lifted_end: end1,
                        target_level1: tl.points[1].clone(),
                    }));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphcov::build_cyclic_tower;

    #[test]
    fn tower_category_small() {
        let t = build_cyclic_tower(3).unwrap();
        let c = build_config_pi_tower(&t, Bounds::new(2, 1, 2)).unwrap();
        c.category().validate().unwrap();
        tower_reference_functor(&c).unwrap();
        let d = check_tower_determinacy(&c);
        assert!(d.holds(), "{d:?}");
        let w = find_excluded_triple(&c).unwrap().expect("a witness at one tick");
        assert_ne!(w.lifted_end, w.target_level1);
    }
}
