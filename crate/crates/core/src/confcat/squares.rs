//! Comparison squares between the configuration categories and their
//! unconstrained and reference counterparts, checked levelwise on nerves.

use serde::Serialize;

use super::config::{ConfArrow, ConfigCategory};
use super::fin::{plain_fin, FinCategory, FinObject, PlainMap};
use super::stack::{Bounds, CoveringStack, Step};
use crate::epicat::{enumerate_epifin_objects, epifin_category, is_in_epifin_one, EpiFinObject, IndexedSquare};
use crate::error::{Error, Result};
use crate::finset::FinMap;
use crate::graphcov::{CoveringSpace, Graph};
use crate::scomb::category::{fiber_product, to_terminal, Arrow, FiberProduct, FiniteCategory, Functor, Materialized};
use crate::scomb::checks::{is_strict_pullback, set_pullback, PullbackLevel, PullbackReport, SSetSquare, SetSquare};
use crate::scomb::nerve::{nerve, nerve_map, Nerve};
use crate::scomb::sset::{SimplicialMap, TruncatedSSet};

/// The square
///
/// ```text
///   config(π) ──> Fin(π)
///       │            │
///   config(M) ──> Fin(M)
/// ```
///
/// with its nerves and nerve maps.
pub struct ConfigFinSquare {
    pub config_pi: ConfigCategory,
    pub fin_pi: FinCategory,
    pub config_m: ConfigCategory,
    pub fin_m: FinCategory,
    pub a: Nerve,
    pub b: Nerve,
    pub c: Nerve,
    pub d: Nerve,
    pub top: SimplicialMap,
    pub left: SimplicialMap,
    pub right: SimplicialMap,
    pub bottom: SimplicialMap,
}

/// A corruption applied before comparing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(tag = "drop", content = "index", rename_all = "kebab-case")]
pub enum Mutation {
    /// Remove the `n`-th non-identity morphism of `config(π)`.
    ConfigPiMorphism(usize),
    /// Remove the `n`-th non-identity morphism of `Fin(π)` lying in the
    /// image of `config(π)`.
    FinPiMorphism(usize),
}

fn functor_from(
    dom: &FiniteCategory,
    cod: &FiniteCategory,
    objects: Vec<usize>,
    morphisms: Vec<usize>,
) -> Result<Functor> {
    let f = Functor::new(objects, morphisms);
    f.validate(dom, cod)?;
    Ok(f)
}

pub fn config_fin_square(pi: &CoveringSpace, bounds: Bounds) -> Result<ConfigFinSquare> {
    let stack = CoveringStack::covering(pi);
    let base = stack.at(0);
    let config_pi = ConfigCategory::build(&stack, bounds)?;
    let fin_pi = FinCategory::build(&stack, bounds)?;
    let config_m = ConfigCategory::build(&base, bounds)?;
    let fin_m = FinCategory::build(&base, bounds)?;

    let cp = config_pi.materialized();
    let top_f = functor_from(
        config_pi.category(),
        fin_pi.category(),
        (0..cp.objects().len())
            .map(|o| {
                fin_pi
                    .materialized()
                    .object_id(&FinObject {
                        points: config_pi.object(o).to_vec(),
                        labels: config_pi.levels(o).projection(0),
                    })
                    .ok_or(Error::InvalidCategory("config(π) object missing in Fin(π)".into()))
            })
            .collect::<Result<_>>()?,
        cp.arrows()
            .iter()
            .map(|a| {
                let fa = fin_pi.from_config(&config_pi, a)?;
                fin_pi
                    .materialized()
                    .arrow_id(&fa)
                    .ok_or(Error::InvalidCategory("config(π) morphism missing in Fin(π)".into()))
            })
            .collect::<Result<_>>()?,
    )?;
    let left_f = functor_from(
        config_pi.category(),
        config_m.category(),
        (0..cp.objects().len())
            .map(|o| {
                config_m
                    .object_id(&config_pi.levels(o).points[0])
                    .ok_or(Error::InvalidCategory("shadow missing".into()))
            })
            .collect::<Result<_>>()?,
        cp.arrows()
            .iter()
            .map(|a| {
                let s = config_pi.shadow_arrow(a, 0, &config_m)?;
                config_m
                    .materialized()
                    .arrow_id(&s)
                    .ok_or(Error::InvalidCategory("shadow morphism missing".into()))
            })
            .collect::<Result<_>>()?,
    )?;
    let fp = fin_pi.materialized();
    let right_f = functor_from(
        fin_pi.category(),
        fin_m.category(),
        fp.objects()
            .iter()
            .map(|o| {
                fin_m
                    .materialized()
                    .object_id(&fin_pi.base_object(o))
                    .ok_or(Error::InvalidCategory("base object missing".into()))
            })
            .collect::<Result<_>>()?,
        fp.arrows()
            .iter()
            .map(|a| {
                let b = fin_pi.base_arrow(a, &fin_m)?;
                fin_m
                    .materialized()
                    .arrow_id(&b)
                    .ok_or(Error::InvalidCategory("base morphism missing".into()))
            })
            .collect::<Result<_>>()?,
    )?;
    let cm = config_m.materialized();
    let bottom_f = functor_from(
        config_m.category(),
        fin_m.category(),
        (0..cm.objects().len())
            .map(|o| {
                fin_m
                    .materialized()
                    .object_id(&FinObject {
                        points: config_m.object(o).to_vec(),
                        labels: FinMap::identity(config_m.object(o).len()),
                    })
                    .ok_or(Error::InvalidCategory("config(M) object missing in Fin(M)".into()))
            })
            .collect::<Result<_>>()?,
        cm.arrows()
            .iter()
            .map(|a| {
                let fa = fin_m.from_config(&config_m, a)?;
                fin_m
                    .materialized()
                    .arrow_id(&fa)
                    .ok_or(Error::InvalidCategory("config(M) morphism missing in Fin(M)".into()))
            })
            .collect::<Result<_>>()?,
    )?;

    let depth = bounds.depth;
    let a = nerve(config_pi.category(), depth)?;
    let b = nerve(fin_pi.category(), depth)?;
    let c = nerve(config_m.category(), depth)?;
    let d = nerve(fin_m.category(), depth)?;
    let top = nerve_map(&top_f, &a, &b)?;
    let left = nerve_map(&left_f, &a, &c)?;
    let right = nerve_map(&right_f, &b, &d)?;
    let bottom = nerve_map(&bottom_f, &c, &d)?;
    Ok(ConfigFinSquare {
        config_pi,
        fin_pi,
        config_m,
        fin_m,
        a,
        b,
        c,
        d,
        top,
        left,
        right,
        bottom,
    })
}

fn nth_nondegenerate_edge(x: &TruncatedSSet, n: usize, admit: impl Fn(usize) -> bool) -> Result<usize> {
    let flags = x.degenerate_flags(1)?;
    (0..x.count(1))
        .filter(|&e| !flags[e] && admit(e))
        .nth(n)
        .ok_or_else(|| Error::InvalidSimplicialSet(format!("fewer than {} eligible edges", n + 1)))
}

impl ConfigFinSquare {
    pub fn check(&self) -> Result<PullbackReport> {
        is_strict_pullback(self.sset_square(), self.a.max_dim())
    }

    fn sset_square(&self) -> SSetSquare<'_> {
        SSetSquare {
            a: self.a.sset(),
            b: self.b.sset(),
            c: self.c.sset(),
            d: self.d.sset(),
            top: &self.top,
            left: &self.left,
            right: &self.right,
            bottom: &self.bottom,
        }
    }

    /// Applies `m` and compares again. Removing a `Fin(π)` morphism leaves
    /// the comparison map undefined on some simplices, which is reported
    /// as a failure at the first such level.
    pub fn check_mutated(&self, m: Mutation) -> Result<PullbackReport> {
        let depth = self.a.max_dim();
        match m {
            Mutation::ConfigPiMorphism(n) => {
                let e = nth_nondegenerate_edge(self.a.sset(), n, |_| true)?;
                let (a2, incl) = self.a.sset().remove_simplex(1, e)?;
                let top = incl.then(&self.top);
                let left = incl.then(&self.left);
                is_strict_pullback(
                    SSetSquare {
                        a: &a2,
                        top: &top,
                        left: &left,
                        ..self.sset_square()
                    },
                    depth,
                )
            }
            Mutation::FinPiMorphism(n) => {
                let hit: std::collections::HashSet<usize> = self.top.level(1).iter().copied().collect();
                let e = nth_nondegenerate_edge(self.b.sset(), n, |e| hit.contains(&e))?;
                let (b2, incl) = self.b.sset().remove_simplex(1, e)?;
                let mut back: Vec<Vec<Option<usize>>> = (0..=depth).map(|l| vec![None; self.b.count(l)]).collect();
                for (l, row) in back.iter_mut().enumerate() {
                    for (i, &y) in incl.level(l).iter().enumerate() {
                        row[y] = Some(i);
                    }
                }
                let mut levels = Vec::new();
                let mut tops = Vec::new();
                for l in 0..=depth {
                    let mapped: Option<Vec<usize>> = self.top.level(l).iter().map(|&y| back[l][y]).collect();
                    match mapped {
                        Some(t) => tops.push(t),
                        None => {
                            let missing = self.top.level(l).iter().position(|&y| back[l][y].is_none()).unwrap();
                            levels.push(PullbackLevel {
                                level: l,
                                corner: self.a.count(l),
                                fiber_product: 0,
                                injective: false,
                                bijective: false,
                                witness: Some(format!("simplex {missing} of config(π) has no image")),
                            });
                            return Ok(PullbackReport { holds: false, levels });
                        }
                    }
                    let right: Vec<usize> = incl.level(l).iter().map(|&y| self.right.apply(l, y)).collect();
                    levels.push(set_pullback(
                        l,
                        SetSquare {
                            top: &tops[l],
                            left: self.left.level(l),
                            right: &right,
                            bottom: self.bottom.level(l),
                            b_count: b2.count(l),
                            c_count: self.c.count(l),
                            d_count: self.d.count(l),
                        },
                    )?);
                }
                Ok(PullbackReport {
                    holds: levels.iter().all(|l| l.bijective),
                    levels,
                })
            }
        }
    }
}

/// `Y(L) = config(L) ×_Fin EpiFin` and the comparison functor from
/// `X(L) = config(π)`.
pub struct ReferenceSquare {
    pub x: ConfigCategory,
    pub base: ConfigCategory,
    pub epifin: Materialized<EpiFinObject, IndexedSquare>,
    pub y: FiberProduct,
    pub comparison: Functor,
    pub x_nerve: Nerve,
    pub y_nerve: Nerve,
    pub map: SimplicialMap,
}

fn config_to_fin(c: &ConfigCategory, fin: &Materialized<usize, PlainMap>) -> Result<Functor> {
    let f = c.materialized().functor_to(
        fin,
        |o| o.len(),
        |a: &ConfArrow| PlainMap {
            src: c.object(a.src).len(),
            tgt: c.object(a.tgt).len(),
            map: c.label_maps(a).pop().expect("one level"),
        },
    )?;
    f.validate(c.category(), fin.category())?;
    Ok(f)
}

fn epifin_to_fin(e: &Materialized<EpiFinObject, IndexedSquare>, fin: &Materialized<usize, PlainMap>) -> Result<Functor> {
    let f = e.functor_to(
        fin,
        |o| o.target_card(),
        |s| PlainMap {
            src: e.object(s.src).target_card(),
            tgt: e.object(s.tgt).target_card(),
            map: s.bottom.clone(),
        },
    )?;
    f.validate(e.category(), fin.category())?;
    Ok(f)
}

pub fn reference_square(pi: &CoveringSpace, bounds: Bounds) -> Result<ReferenceSquare> {
    let stack = CoveringStack::covering(pi);
    let x = ConfigCategory::build(&stack, bounds)?;
    let base = ConfigCategory::build(&stack.at(0), bounds)?;
    let epifin = epifin_category(enumerate_epifin_objects(bounds.k_max))?;
    let fin = plain_fin(bounds.k_max);
    let y = fiber_product(
        base.category(),
        &config_to_fin(&base, &fin)?,
        epifin.category(),
        &epifin_to_fin(&epifin, &fin)?,
    )?;
    let object_ids: rustc_hash::FxHashMap<(usize, usize), usize> =
        y.objects.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let morphism_ids: rustc_hash::FxHashMap<(usize, usize), usize> =
        y.morphisms.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let xm = x.materialized();
    let objects = (0..xm.objects().len())
        .map(|o| {
            let g = base.object_id(&x.levels(o).points[0]).expect("shadow is an object");
            let p = epifin.object_id(&x.reference_object(o)).expect("selfic shadow labels");
            object_ids
                .get(&(g, p))
                .copied()
                .ok_or(Error::InvalidCategory("comparison object missing".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let morphisms = xm
        .arrows()
        .iter()
        .map(|a| {
            let s = base.materialized().arrow_id(&x.shadow_arrow(a, 0, &base)?).expect("shadow morphism");
            let u = x.label_maps(a);
            let sq = IndexedSquare {
                src: epifin.object_id(&x.reference_object(a.src)).expect("object"),
                tgt: epifin.object_id(&x.reference_object(a.tgt)).expect("object"),
                top: u[1].clone(),
                bottom: u[0].clone(),
            };
            let e = epifin.arrow_id(&sq).ok_or(Error::InvalidCategory("square missing in EpiFin".into()))?;
            morphism_ids
                .get(&(s, e))
                .copied()
                .ok_or(Error::InvalidCategory("comparison morphism missing".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let comparison = functor_from(x.category(), &y.category, objects, morphisms)?;
    let x_nerve = nerve(x.category(), bounds.depth)?;
    let y_nerve = nerve(&y.category, bounds.depth)?;
    let map = nerve_map(&comparison, &x_nerve, &y_nerve)?;
    Ok(ReferenceSquare {
        x,
        base,
        epifin,
        y,
        comparison,
        x_nerve,
        y_nerve,
        map,
    })
}

fn ultimate_targets(x: &TruncatedSSet, n: usize) -> Vec<usize> {
    (0..x.count(n)).map(|s| x.ultimate_target(n, s)).collect()
}

impl ReferenceSquare {
    /// For each level `r`, whether `X_r → Y_r ×_{Y_0} X_0` is a bijection,
    /// the maps to level 0 being ultimate targets.
    pub fn ultimate_target_squares(&self) -> Result<Vec<PullbackLevel>> {
        let (x, y) = (self.x_nerve.sset(), self.y_nerve.sset());
        let right_all: Vec<Vec<usize>> = (0..=y.max_dim()).map(|r| ultimate_targets(y, r)).collect();
        (0..=x.max_dim())
            .map(|r| {
                let left = ultimate_targets(x, r);
                set_pullback(
                    r,
                    SetSquare {
                        top: self.map.level(r),
                        left: &left,
                        right: &right_all[r],
                        bottom: self.map.level(0),
                        b_count: y.count(r),
                        c_count: x.count(0),
                        d_count: y.count(0),
                    },
                )
            })
            .collect()
    }
}

/// Walks of a graph with pauses, of at most `tick_max` ticks, under
/// concatenation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Walk {
    pub start: usize,
    pub end: usize,
    pub steps: Vec<Step>,
}

impl Arrow for Walk {
    fn source(&self) -> usize {
        self.start
    }
    fn target(&self) -> usize {
        self.end
    }
    fn length(&self) -> usize {
        self.steps.len()
    }
}

pub fn path_category(g: &Graph, tick_max: usize) -> Result<Materialized<usize, Walk>> {
    let mut walks = Vec::new();
    let mut layer: Vec<Walk> = (0..g.vertex_count())
        .map(|v| Walk {
            start: v,
            end: v,
            steps: Vec::new(),
        })
        .collect();
    for _ in 0..=tick_max {
        let mut next = Vec::new();
        for w in &layer {
            for s in std::iter::once(None).chain(g.star(w.end).iter().map(|&d| Some(d))) {
                let mut steps = w.steps.clone();
                steps.push(s);
                next.push(Walk {
                    start: w.start,
                    end: s.map_or(w.end, |d| g.head(d)),
                    steps,
                });
            }
        }
        walks.append(&mut layer);
        layer = next;
    }
    Materialized::build(
        (0..g.vertex_count()).collect(),
        walks,
        |v| Walk {
            start: v,
            end: v,
            steps: Vec::new(),
        },
        |f, h| {
            let mut steps = f.steps.clone();
            steps.extend_from_slice(&h.steps);
            Ok(Walk {
                start: f.start,
                end: h.end,
                steps,
            })
        },
        Some(tick_max),
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductReport {
    pub counts: Vec<usize>,
    pub product_counts: Vec<usize>,
    pub functor_valid: bool,
    pub isomorphism: bool,
}

/// Compares `config(L) ×_Fin EpiFin¹` with `EpiFin¹ × P(L)`, where `P(L)` is
/// the path category, through the functor sending a pair to its reference
/// square and the walk of its single base point.
pub fn epifin_one_product(g: &Graph, bounds: Bounds) -> Result<ProductReport> {
    let base = ConfigCategory::build(&CoveringStack::single(g), Bounds { k_max: 1, ..bounds })?;
    let ones: Vec<EpiFinObject> = enumerate_epifin_objects(bounds.k_max)
        .into_iter()
        .filter(is_in_epifin_one)
        .collect();
    let epi1 = epifin_category(ones)?;
    let fin = plain_fin(bounds.k_max);
    let y = fiber_product(
        base.category(),
        &config_to_fin(&base, &fin)?,
        epi1.category(),
        &epifin_to_fin(&epi1, &fin)?,
    )?;
    let paths = path_category(g, bounds.tick_max)?;
    let prod = fiber_product(
        epi1.category(),
        &to_terminal(epi1.category()),
        paths.category(),
        &to_terminal(paths.category()),
    )?;
    let pobj: rustc_hash::FxHashMap<(usize, usize), usize> =
        prod.objects.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let pmor: rustc_hash::FxHashMap<(usize, usize), usize> =
        prod.morphisms.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut objects = Vec::new();
    for &(c, e) in &y.objects {
        let pts = base.object(c);
        if pts.len() != 1 {
            return Err(Error::InvalidCategory("reference objects have one base point".into()));
        }
        objects.push(pobj[&(e, pts[0])]);
    }
    let mut morphisms = Vec::new();
    for &(c, e) in &y.morphisms {
        let a = base.arrow(c);
        let w = Walk {
            start: base.object(a.src)[0],
            end: base.object(a.tgt)[0],
            steps: a.steps.clone(),
        };
        let wid = paths.arrow_id(&w).ok_or(Error::InvalidCategory("walk missing".into()))?;
        morphisms.push(pmor[&(e, wid)]);
    }
    let phi = Functor::new(objects, morphisms);
    let functor_valid = phi.validate(&y.category, &prod.category).is_ok();
    let yn = nerve(&y.category, bounds.depth)?;
    let pn = nerve(&prod.category, bounds.depth)?;
    let isomorphism = functor_valid && nerve_map(&phi, &yn, &pn)?.is_isomorphism(pn.sset());
    Ok(ProductReport {
        counts: yn.sset().counts().to_vec(),
        product_counts: pn.sset().counts().to_vec(),
        functor_valid,
        isomorphism,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_config_fin_square_is_a_pullback() {
        let pi = CoveringSpace::cyclic(6, 3).unwrap();
        let sq = config_fin_square(&pi, Bounds::new(2, 1, 2)).unwrap();
        let r = sq.check().unwrap();
        assert!(r.holds, "{:?}", r.levels);
        assert!(!sq.check_mutated(Mutation::ConfigPiMorphism(0)).unwrap().holds);
        assert!(!sq.check_mutated(Mutation::FinPiMorphism(0)).unwrap().holds);
    }

    #[test]
    fn small_reference_square() {
        let pi = CoveringSpace::cyclic(6, 3).unwrap();
        let sq = reference_square(&pi, Bounds::new(2, 1, 2)).unwrap();
        for l in sq.ultimate_target_squares().unwrap() {
            assert!(l.bijective, "{l:?}");
        }
    }

    #[test]
    fn small_epifin_one_product() {
        let r = epifin_one_product(&Graph::cycle(3), Bounds::new(2, 1, 2)).unwrap();
        assert!(r.isomorphism, "{r:?}");
    }
}
