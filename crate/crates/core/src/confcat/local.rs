//! The localized configuration object `config^loc(π)` and its comparison
//! with the base and the cover.
//!
//! Level `r` is the set of `(r+1)`-simplices of `N config(π)` whose ultimate
//! target has reference object `1 ↠ 1`, i.e. is a single point `x` of the
//! cover; faces and degeneracies are shifted by one. It splits into
//! summands indexed by `x`. Over a base vertex `z`, lifting strings ending at
//! `z` identifies each summand `x ∈ π⁻¹(z)` with `(config(M) ↓ z)`.

use rustc_hash::FxHashMap;
use serde::Serialize;

use super::config::{ConfArrow, ConfigCategory};
use super::stack::{Bounds, CoveringStack, Step};
use crate::error::{Error, Result};
use crate::finset::FinMap;
use crate::graphcov::CoveringSpace;
use crate::scomb::category::Functor;
use crate::scomb::checks::{comma, Comma};
use crate::scomb::nerve::{nerve, nerve_map, Nerve};
use crate::scomb::sset::SimplicialMap;

/// One summand of `config^loc`: the comma object over the point `x`.
pub struct LocSummand {
    pub x: usize,
    pub object: usize,
    pub comma: Comma,
}

/// The summands of `config^loc` for a configuration category of height 0
/// or 1, from a nerve of depth at least 1.
pub fn config_loc(conf: &ConfigCategory, n: &Nerve) -> Result<Vec<LocSummand>> {
    let one = FinMap::identity(1);
    let mut out = Vec::new();
    for o in 0..conf.category().num_objects() {
        let pts = conf.object(o);
        let over_one = if conf.stack().height() == 0 {
            pts.len() == 1
        } else {
            conf.reference_object(o).map() == &one
        };
        if over_one {
            out.push(LocSummand {
                x: pts[0],
                object: o,
                comma: comma(n.sset(), o)?,
            });
        }
    }
    Ok(out)
}

/// Lifts a base morphism to the cover, given the lifted target. Each base
/// point is followed backwards from the lift of its final position.
pub fn lift_base_arrow(
    pi: &CoveringSpace,
    base: &ConfigCategory,
    cover: &ConfigCategory,
    a: &ConfArrow,
    lifted_target: usize,
) -> Option<usize> {
    let u = base.label_maps(a).pop()?;
    let end = cover.object(lifted_target);
    let k = base.object(a.src).len();
    let mut pos: Vec<usize> = u.values().iter().map(|&j| end[j - 1]).collect();
    let mut steps: Vec<Step> = vec![None; a.ticks * k];
    for t in (0..a.ticks).rev() {
        for i in 0..k {
            if let Some(d) = a.steps[t * k + i] {
                let back = pi.lift_dart(pos[i], d.reverse())?;
                steps[t * k + i] = Some(back.reverse());
                pos[i] = pi.total().head(back);
            }
        }
    }
    let src = cover.object_id(&pos)?;
    cover.materialized().arrow_id(&ConfArrow {
        src,
        tgt: lifted_target,
        ticks: a.ticks,
        steps,
    })
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LocReport {
    /// Per level, the total size of `config^loc(π)`.
    pub counts: Vec<usize>,
    /// Per level, `Σ_{x} |(config(M) ↓ π(x))_r|`.
    pub base_counts: Vec<usize>,
    pub lift_total: bool,
    pub lift_bijective: bool,
    pub lift_simplicial: bool,
    pub label_preserving: bool,
    pub forget_injective: bool,
    pub forget_label_preserving: bool,
    /// Per level, simplices of `config^loc(E)` outside the image of the
    /// forgetful map.
    pub forget_gap: Vec<usize>,
    pub witness: Option<String>,
}

impl LocReport {
    pub fn holds(&self) -> bool {
        self.lift_total
            && self.lift_bijective
            && self.lift_simplicial
            && self.label_preserving
            && self.forget_injective
            && self.forget_label_preserving
    }
}

/// Builds `config^loc(π)` at levels `0..=bounds.depth` and checks the lift
/// from the base and the forgetful map to the cover.
pub fn check_config_loc(pi: &CoveringSpace, bounds: Bounds) -> Result<LocReport> {
    let stack = CoveringStack::covering(pi);
    let x = ConfigCategory::build(&stack, bounds)?;
    let m = ConfigCategory::build(&stack.at(0), bounds)?;
    let e = ConfigCategory::build(&stack.at(1), bounds)?;
    let depth = bounds.depth + 1;
    let nx = nerve(x.category(), depth)?;
    let nm = nerve(m.category(), depth)?;
    let ne = nerve(e.category(), depth)?;
    let loc = config_loc(&x, &nx)?;
    let loc_e = config_loc(&e, &ne)?;

    let mut report = LocReport {
        counts: vec![0; depth],
        base_counts: vec![0; depth],
        lift_total: true,
        lift_bijective: true,
        lift_simplicial: true,
        label_preserving: true,
        forget_injective: true,
        forget_label_preserving: true,
        forget_gap: vec![0; depth],
        witness: None,
    };
    let fail = |r: &mut LocReport, msg: String| {
        r.witness.get_or_insert(msg);
    };

    // ambient simplex of N config(π) -> (summand, local id), per level
    let mut where_x: Vec<FxHashMap<usize, (usize, usize)>> = vec![FxHashMap::default(); depth];
    for (si, s) in loc.iter().enumerate() {
        for r in 0..depth {
            report.counts[r] += s.comma.sset.count(r);
            for (l, &amb) in s.comma.ambient[r].iter().enumerate() {
                where_x[r].insert(amb, (si, l));
            }
        }
    }

    let mut base_commas: FxHashMap<usize, Comma> = FxHashMap::default();
    for (si, s) in loc.iter().enumerate() {
        let z = pi.project(s.x);
        let zo = m.object_id(&[z]).ok_or(Error::NotAnObject(z))?;
        if let std::collections::hash_map::Entry::Vacant(e) = base_commas.entry(z) {
            e.insert(comma(nm.sset(), zo)?);
        }
        let dz = &base_commas[&z];
        let mut levels = Vec::with_capacity(depth);
        for r in 0..depth {
            report.base_counts[r] += dz.sset.count(r);
            let mut row = Vec::with_capacity(dz.sset.count(r));
            for &amb in &dz.ambient[r] {
                let string = nm.string(r + 1, amb);
                let mut tgt = s.object;
                let mut lifted = Vec::with_capacity(string.len());
                for &phi in string {
                    match lift_base_arrow(pi, &m, &x, m.arrow(phi), tgt) {
                        Some(up) => {
                            lifted.push(up);
                            tgt = x.category().source(up);
                        }
                        None => break,
                    }
                }
                let image = if lifted.len() == string.len() {
                    nx.find(r + 1, &lifted)
                } else {
                    None
                };
                match image.and_then(|a| where_x[r].get(&a)) {
                    Some(&(sj, l)) => {
                        if sj != si {
                            report.label_preserving = false;
                            fail(&mut report, format!("level {r}: a lift over {z} left summand {}", s.x));
                        }
                        row.push(l);
                    }
                    None => {
                        report.lift_total = false;
                        fail(&mut report, format!("level {r}: base simplex {amb} has no lift at {}", s.x));
                        row.push(usize::MAX);
                    }
                }
            }
            levels.push(row);
        }
        if report.lift_total {
            let map = SimplicialMap::new(levels);
            if map.validate(&dz.sset, &s.comma.sset).is_err() {
                report.lift_simplicial = false;
                fail(&mut report, format!("lift into summand {} is not simplicial", s.x));
            }
            if !map.is_isomorphism(&s.comma.sset) {
                report.lift_bijective = false;
                fail(&mut report, format!("lift into summand {} is not bijective", s.x));
            }
        } else {
            report.lift_bijective = false;
            report.lift_simplicial = false;
        }
    }

    // the forgetful functor config(π) -> config(E)
    let xm = x.materialized();
    let forget = Functor::new(
        (0..xm.objects().len())
            .map(|o| e.object_id(x.object(o)).ok_or(Error::NotAnObject(o)))
            .collect::<Result<_>>()?,
        xm.arrows()
            .iter()
            .map(|a| {
                e.materialized()
                    .arrow_id(&ConfArrow {
                        src: e.object_id(x.object(a.src)).expect("objects are shared"),
                        tgt: e.object_id(x.object(a.tgt)).expect("objects are shared"),
                        ticks: a.ticks,
                        steps: a.steps.clone(),
                    })
                    .ok_or(Error::InvalidCategory("cover morphism missing".into()))
            })
            .collect::<Result<_>>()?,
    );
    forget.validate(x.category(), e.category())?;
    let fmap = nerve_map(&forget, &nx, &ne)?;
    let by_x: FxHashMap<usize, usize> = loc_e.iter().enumerate().map(|(i, s)| (s.x, i)).collect();
    for s in &loc {
        let Some(&ei) = by_x.get(&s.x) else {
            report.forget_label_preserving = false;
            fail(&mut report, format!("no summand {} in config^loc(E)", s.x));
            continue;
        };
        let target = &loc_e[ei].comma;
        for r in 0..depth {
            let local: FxHashMap<usize, usize> =
                target.ambient[r].iter().enumerate().map(|(l, &a)| (a, l)).collect();
            let mut hit = vec![false; target.sset.count(r)];
            for &amb in &s.comma.ambient[r] {
                match local.get(&fmap.apply(r + 1, amb)) {
                    Some(&l) => {
                        if std::mem::replace(&mut hit[l], true) {
                            report.forget_injective = false;
                            fail(&mut report, format!("level {r}: forgetful map collides in summand {}", s.x));
                        }
                    }
                    None => {
                        report.forget_label_preserving = false;
                        fail(&mut report, format!("level {r}: forgetful image leaves summand {}", s.x));
                    }
                }
            }
            report.forget_gap[r] += hit.iter().filter(|&&h| !h).count();
        }
    }
    Ok(report)
}
