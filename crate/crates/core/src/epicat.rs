//! The categories `EpiFin` of selfic surjections, its full subcategory
//! `EpiFin¹` on the objects `k ↠ 1`, and `TriFin` of composable pairs of
//! selfic surjections.
//!
//! A morphism of `EpiFin` from `p: k ↠ l` to `q: m ↠ n` is a commuting square
//!
//! ```text
//!   k --top--> m
//!   |p         |q
//!   l -bottom-> n
//! ```
//!
//! for which `i ↦ (top(i), p(i))` is injective into `m ×_n l`.

use std::fmt;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finset::{all_maps, compose, enumerate_selfic, is_selfic, FinMap};
use crate::scomb::category::{Arrow, Materialized};

/// A selfic surjection `k ↠ l`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "FinMap", into = "FinMap")]
pub struct EpiFinObject(FinMap);

impl EpiFinObject {
    pub fn new(p: FinMap) -> Result<Self> {
        if is_selfic(&p) {
            Ok(EpiFinObject(p))
        } else {
            Err(Error::NotSelfic(p.to_string()))
        }
    }

    pub fn identity(k: usize) -> Self {
        EpiFinObject(FinMap::identity(k))
    }

    /// `k ↠ 1`, for `k ≥ 1`.
    pub fn to_one(k: usize) -> Result<Self> {
        Self::new(FinMap::to_one(k))
    }

    pub fn map(&self) -> &FinMap {
        &self.0
    }

    pub fn source_card(&self) -> usize {
        self.0.source_card()
    }

    pub fn target_card(&self) -> usize {
        self.0.target_card()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_bijective()
    }
}

impl TryFrom<FinMap> for EpiFinObject {
    type Error = Error;
    fn try_from(p: FinMap) -> Result<Self> {
        Self::new(p)
    }
}

impl From<EpiFinObject> for FinMap {
    fn from(x: EpiFinObject) -> FinMap {
        x.0
    }
}

impl fmt::Debug for EpiFinObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Display for EpiFinObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Membership in `EpiFin¹`: the target has exactly one element, so the
/// empty object `0 ↠ 0` is excluded.
pub fn is_in_epifin_one(x: &EpiFinObject) -> bool {
    x.target_card() == 1
}

fn check_square_shape(src: &FinMap, tgt: &FinMap, top: &FinMap, bottom: &FinMap) -> Result<()> {
    let ok = top.source_card() == src.source_card()
        && top.target_card() == tgt.source_card()
        && bottom.source_card() == src.target_card()
        && bottom.target_card() == tgt.target_card();
    if ok {
        Ok(())
    } else {
        Err(Error::SquareShape(format!(
            "src {src}, tgt {tgt}, top {top}, bottom {bottom}"
        )))
    }
}

/// Commutativity plus injectivity into the pullback. The rows are taken as
/// given; card mismatches are errors, failures of either condition give
/// `false`.
pub fn validate_epifin_morphism(src: &FinMap, tgt: &FinMap, top: &FinMap, bottom: &FinMap) -> Result<bool> {
    check_square_shape(src, tgt, top, bottom)?;
    let mut seen = std::collections::HashSet::new();
    for i in 1..=src.source_card() {
        let (t, p) = (top.apply(i), src.apply(i));
        if tgt.apply(t) != bottom.apply(p) || !seen.insert((t, p)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A validated square between selfic surjections.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EpiFinMorphism {
    pub src: EpiFinObject,
    pub tgt: EpiFinObject,
    pub top: FinMap,
    pub bottom: FinMap,
}

impl EpiFinMorphism {
    pub fn new(src: EpiFinObject, tgt: EpiFinObject, top: FinMap, bottom: FinMap) -> Result<Self> {
        if !validate_epifin_morphism(src.map(), tgt.map(), &top, &bottom)? {
            return Err(Error::SquareShape(format!(
                "{top} over {bottom} from {src} to {tgt} is not an EpiFin morphism"
            )));
        }
        Ok(EpiFinMorphism { src, tgt, top, bottom })
    }

    pub fn identity(x: &EpiFinObject) -> Self {
        EpiFinMorphism {
            src: x.clone(),
            tgt: x.clone(),
            top: FinMap::identity(x.source_card()),
            bottom: FinMap::identity(x.target_card()),
        }
    }

    /// True when the stored data still forms a valid square.
    pub fn is_valid(&self) -> bool {
        validate_epifin_morphism(self.src.map(), self.tgt.map(), &self.top, &self.bottom).unwrap_or(false)
    }
}

/// `f` followed by `g`, pasting the squares side by side. The composite is
/// re-validated; a failure would mean `EpiFin` is not closed under
/// composition and is reported as [`Error::ClosureViolation`].
pub fn compose_epifin(f: &EpiFinMorphism, g: &EpiFinMorphism) -> Result<EpiFinMorphism> {
    if f.tgt != g.src {
        return Err(Error::NotComposable(format!("{} is not {}", f.tgt, g.src)));
    }
    let top = compose(&f.top, &g.top)?;
    let bottom = compose(&f.bottom, &g.bottom)?;
    if !validate_epifin_morphism(f.src.map(), g.tgt.map(), &top, &bottom)? {
        return Err(Error::ClosureViolation(format!("{top} over {bottom}")));
    }
    Ok(EpiFinMorphism {
        src: f.src.clone(),
        tgt: g.tgt.clone(),
        top,
        bottom,
    })
}

/// The bottom map forced by `top`, if the square can commute at all.
fn induced_bottom(src: &FinMap, tgt: &FinMap, top: &FinMap) -> Option<FinMap> {
    let mut bottom = vec![0; src.target_card()];
    for i in 1..=src.source_card() {
        let want = tgt.apply(top.apply(i));
        let slot = &mut bottom[src.apply(i) - 1];
        if *slot == 0 {
            *slot = want;
        } else if *slot != want {
            return None;
        }
    }
    // src is surjective, so every slot is filled
    FinMap::new(tgt.target_card(), bottom).ok()
}

/// All morphisms `src → tgt`, lexicographic in `(top, bottom)`.
///
/// Since `src` is surjective the bottom map is determined by the top map,
/// so it suffices to run over all top maps.
pub fn enumerate_epifin_morphisms(src: &EpiFinObject, tgt: &EpiFinObject) -> Vec<EpiFinMorphism> {
    let mut out = Vec::new();
    for top in all_maps(src.source_card(), tgt.source_card()) {
        let Some(bottom) = induced_bottom(src.map(), tgt.map(), &top) else {
            continue;
        };
        if validate_epifin_morphism(src.map(), tgt.map(), &top, &bottom).unwrap_or(false) {
            out.push(EpiFinMorphism {
                src: src.clone(),
                tgt: tgt.clone(),
                top,
                bottom,
            });
        }
    }
    out
}

/// All objects with source card at most `max_k`, ordered by source card,
/// then target card, then values.
pub fn enumerate_epifin_objects(max_k: usize) -> Vec<EpiFinObject> {
    (0..=max_k)
        .flat_map(|k| (0..=k).flat_map(move |l| enumerate_selfic(k, l)))
        .map(EpiFinObject)
        .collect()
}

/// An `EpiFin` morphism together with the ids of its endpoints in some
/// materialized object list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexedSquare {
    pub src: usize,
    pub tgt: usize,
    pub top: FinMap,
    pub bottom: FinMap,
}

impl Arrow for IndexedSquare {
    fn source(&self) -> usize {
        self.src
    }
    fn target(&self) -> usize {
        self.tgt
    }
}

/// `EpiFin` restricted to the given objects, as a materialized finite
/// category. Composition is re-validated on every composable pair.
pub fn epifin_category(objects: Vec<EpiFinObject>) -> Result<Materialized<EpiFinObject, IndexedSquare>> {
    let mut arrows = Vec::new();
    for (i, a) in objects.iter().enumerate() {
        for (j, b) in objects.iter().enumerate() {
            for m in enumerate_epifin_morphisms(a, b) {
                arrows.push(IndexedSquare {
                    src: i,
                    tgt: j,
                    top: m.top,
                    bottom: m.bottom,
                });
            }
        }
    }
    let cards: Vec<(usize, usize)> = objects.iter().map(|o| (o.source_card(), o.target_card())).collect();
    let identity = move |o: usize| IndexedSquare {
        src: o,
        tgt: o,
        top: FinMap::identity(cards[o].0),
        bottom: FinMap::identity(cards[o].1),
    };
    let lookup = objects.clone();
    let compose_sq = move |f: &IndexedSquare, g: &IndexedSquare| -> Result<IndexedSquare> {
        let top = compose(&f.top, &g.top)?;
        let bottom = compose(&f.bottom, &g.bottom)?;
        if !validate_epifin_morphism(lookup[f.src].map(), lookup[g.tgt].map(), &top, &bottom)? {
            return Err(Error::ClosureViolation(format!("{top} over {bottom}")));
        }
        Ok(IndexedSquare {
            src: f.src,
            tgt: g.tgt,
            top,
            bottom,
        })
    };
    Materialized::build(objects, arrows, identity, compose_sq, None)
}

/// Closure, identity and associativity checked over every composable pair
/// and triple among the objects with source card at most `max_k`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClosureReport {
    pub objects: usize,
    pub morphisms: usize,
    pub composable_pairs: u64,
    pub composable_triples: u64,
    pub closure_violations: u64,
    pub identity_violations: u64,
    pub associativity_violations: u64,
}

impl ClosureReport {
    pub fn holds(&self) -> bool {
        self.closure_violations == 0 && self.identity_violations == 0 && self.associativity_violations == 0
    }
}

/// Each composable pair is composed once with [`compose_epifin`] and its
/// composite interned; associativity is then checked on ids, which keeps
/// the billions of triples at cards 4 affordable. Needs `max_k ≤ 15`.
pub fn check_epifin_category(max_k: usize) -> ClosureReport {
    assert!(max_k <= 15, "top maps are packed four bits per value");
    const MISSING: u32 = u32::MAX;
    let objects = enumerate_epifin_objects(max_k);
    let n = objects.len();
    let mut arrows = Vec::new();
    let (mut src, mut tgt, mut pos) = (Vec::new(), Vec::new(), Vec::new());
    let mut out: Vec<Vec<u32>> = vec![Vec::new(); n];
    for a in 0..n {
        for b in 0..n {
            for m in enumerate_epifin_morphisms(&objects[a], &objects[b]) {
                pos.push(out[a].len() as u32);
                out[a].push(arrows.len() as u32);
                src.push(a);
                tgt.push(b);
                arrows.push(m);
            }
        }
    }
    let key = |a: usize, b: usize, top: &FinMap| {
        let packed = top.values().iter().fold(0u64, |acc, &v| acc << 4 | v as u64);
        (a, b, packed)
    };
    let index: FxHashMap<(usize, usize, u64), u32> = (0..arrows.len())
        .map(|m| (key(src[m], tgt[m], &arrows[m].top), m as u32))
        .collect();
    let mut report = ClosureReport {
        objects: n,
        morphisms: arrows.len(),
        ..Default::default()
    };

    // comp[f][j] is the id of f followed by out[tgt f][j]
    let mut comp: Vec<Vec<u32>> = Vec::with_capacity(arrows.len());
    for (f, fa) in arrows.iter().enumerate() {
        let ida = EpiFinMorphism::identity(&fa.src);
        let idb = EpiFinMorphism::identity(&fa.tgt);
        if compose_epifin(&ida, fa).as_ref() != Ok(fa) || compose_epifin(fa, &idb).as_ref() != Ok(fa) {
            report.identity_violations += 1;
        }
        let row = out[tgt[f]]
            .iter()
            .map(|&g| {
                let g = g as usize;
                match compose_epifin(fa, &arrows[g]) {
                    Ok(fg) => index.get(&key(src[f], tgt[g], &fg.top)).copied(),
                    Err(_) => None,
                }
                .unwrap_or_else(|| {
                    report.closure_violations += 1;
                    MISSING
                })
            })
            .collect();
        report.composable_pairs += out[tgt[f]].len() as u64;
        comp.push(row);
    }

    for f in 0..arrows.len() {
        for (j, &g) in out[tgt[f]].iter().enumerate() {
            let (fg, g) = (comp[f][j], g as usize);
            let hs = out[tgt[g]].len();
            report.composable_triples += hs as u64;
            if fg == MISSING {
                report.associativity_violations += hs as u64;
                continue;
            }
            let (left, gh_row) = (&comp[fg as usize], &comp[g]);
            for hi in 0..hs {
                let gh = gh_row[hi];
                let right = if gh == MISSING { MISSING } else { comp[f][pos[gh as usize] as usize] };
                if left[hi] == MISSING || left[hi] != right {
                    report.associativity_violations += 1;
                }
            }
        }
    }
    report
}

/// Closure only, over all composable pairs with source cards at most
/// `max_k`. Cheaper than [`check_epifin_category`] at larger cards.
pub fn check_epifin_closure(max_k: usize) -> ClosureReport {
    let objects = enumerate_epifin_objects(max_k);
    let hom: Vec<Vec<Vec<EpiFinMorphism>>> = objects
        .iter()
        .map(|a| objects.iter().map(|b| enumerate_epifin_morphisms(a, b)).collect())
        .collect();
    let mut report = ClosureReport {
        objects: objects.len(),
        morphisms: hom.iter().flatten().map(Vec::len).sum(),
        ..Default::default()
    };
    let n = objects.len();
    for a in 0..n {
        for b in 0..n {
            for f in &hom[a][b] {
                for c in 0..n {
                    for g in &hom[b][c] {
                        report.composable_pairs += 1;
                        if compose_epifin(f, g).is_err() {
                            report.closure_violations += 1;
                        }
                    }
                }
            }
        }
    }
    report
}

/// A composable pair `k_0 ↞ k_1 ↞ k_2` of selfic surjections.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TriFinObject {
    pub p10: EpiFinObject,
    pub p21: EpiFinObject,
}

impl TriFinObject {
    pub fn new(p10: EpiFinObject, p21: EpiFinObject) -> Result<Self> {
        if p21.target_card() != p10.source_card() {
            return Err(Error::NotComposable(format!("{p21} then {p10}")));
        }
        Ok(TriFinObject { p10, p21 })
    }

    /// Cardinalities `(k_0, k_1, k_2)`.
    pub fn cards(&self) -> [usize; 3] {
        [self.p10.target_card(), self.p10.source_card(), self.p21.source_card()]
    }

    /// The composite `k_2 ↠ k_0`, which is again selfic.
    pub fn composite(&self) -> EpiFinObject {
        EpiFinObject::new(compose(self.p21.map(), self.p10.map()).expect("composable rows"))
            .expect("selfic maps compose to selfic maps")
    }

    pub fn identity(k: usize) -> Self {
        TriFinObject {
            p10: EpiFinObject::identity(k),
            p21: EpiFinObject::identity(k),
        }
    }
}

impl fmt::Display for TriFinObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [k0, k1, k2] = self.cards();
        write!(f, "({k0}<-{k1}<-{k2}; {} ; {})", self.p10.map(), self.p21.map())
    }
}

/// All objects with `k_2 ≤ max_k2`.
pub fn enumerate_trifin_objects(max_k2: usize) -> Vec<TriFinObject> {
    let mut out = Vec::new();
    for p21 in enumerate_epifin_objects(max_k2) {
        for p10 in (0..=p21.target_card()).flat_map(|l| enumerate_selfic(p21.target_card(), l)) {
            out.push(TriFinObject {
                p10: EpiFinObject(p10),
                p21: p21.clone(),
            });
        }
    }
    out
}

/// Vertical maps `v_i: k_i → l_i` making both little squares `EpiFin`
/// morphisms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TriFinMorphism {
    pub src: TriFinObject,
    pub tgt: TriFinObject,
    pub verticals: [FinMap; 3],
}

/// Validates both little squares of a candidate `TriFin` morphism.
pub fn validate_trifin_morphism(src: &TriFinObject, tgt: &TriFinObject, v: &[FinMap; 3]) -> Result<bool> {
    let lower = validate_epifin_morphism(src.p10.map(), tgt.p10.map(), &v[1], &v[0])?;
    let upper = validate_epifin_morphism(src.p21.map(), tgt.p21.map(), &v[2], &v[1])?;
    Ok(lower && upper)
}

impl TriFinMorphism {
    pub fn new(src: TriFinObject, tgt: TriFinObject, verticals: [FinMap; 3]) -> Result<Self> {
        if !validate_trifin_morphism(&src, &tgt, &verticals)? {
            return Err(Error::SquareShape(format!("verticals {verticals:?} from {src} to {tgt}")));
        }
        Ok(TriFinMorphism { src, tgt, verticals })
    }

    pub fn identity(x: &TriFinObject) -> Self {
        let [k0, k1, k2] = x.cards();
        TriFinMorphism {
            src: x.clone(),
            tgt: x.clone(),
            verticals: [FinMap::identity(k0), FinMap::identity(k1), FinMap::identity(k2)],
        }
    }
}

/// `f` followed by `g`, componentwise.
pub fn compose_trifin(f: &TriFinMorphism, g: &TriFinMorphism) -> Result<TriFinMorphism> {
    if f.tgt != g.src {
        return Err(Error::NotComposable(format!("{} is not {}", f.tgt, g.src)));
    }
    let verticals = [
        compose(&f.verticals[0], &g.verticals[0])?,
        compose(&f.verticals[1], &g.verticals[1])?,
        compose(&f.verticals[2], &g.verticals[2])?,
    ];
    if !validate_trifin_morphism(&f.src, &g.tgt, &verticals)? {
        return Err(Error::ClosureViolation(format!("verticals {verticals:?}")));
    }
    Ok(TriFinMorphism {
        src: f.src.clone(),
        tgt: g.tgt.clone(),
        verticals,
    })
}

/// The two little squares: the `(k_0 ← k_1)` square and the `(k_1 ← k_2)`
/// square.
pub fn trifin_source_target_functors(m: &TriFinMorphism) -> (EpiFinMorphism, EpiFinMorphism) {
    (
        EpiFinMorphism {
            src: m.src.p10.clone(),
            tgt: m.tgt.p10.clone(),
            top: m.verticals[1].clone(),
            bottom: m.verticals[0].clone(),
        },
        EpiFinMorphism {
            src: m.src.p21.clone(),
            tgt: m.tgt.p21.clone(),
            top: m.verticals[2].clone(),
            bottom: m.verticals[1].clone(),
        },
    )
}

/// The outer rectangle `(k_0 ← k_2)`, the third forgetful functor.
pub fn trifin_outer(m: &TriFinMorphism) -> EpiFinMorphism {
    EpiFinMorphism {
        src: m.src.composite(),
        tgt: m.tgt.composite(),
        top: m.verticals[2].clone(),
        bottom: m.verticals[0].clone(),
    }
}

/// The forgetful map to `Fin`: `k_0 ← k_1 ← k_2 ↦ k_2`.
pub fn trifin_to_fin_object(x: &TriFinObject) -> usize {
    x.p21.source_card()
}

pub fn trifin_to_fin_morphism(m: &TriFinMorphism) -> FinMap {
    m.verticals[2].clone()
}

/// All morphisms `src → tgt`, lexicographic in `(v_2, v_1, v_0)` order of
/// generation: `v_2` determines `v_1`, which determines `v_0`.
pub fn enumerate_trifin_morphisms(src: &TriFinObject, tgt: &TriFinObject) -> Vec<TriFinMorphism> {
    let mut out = Vec::new();
    for upper in enumerate_epifin_morphisms(&src.p21, &tgt.p21) {
        let v1 = upper.bottom;
        let Some(v0) = induced_bottom(src.p10.map(), tgt.p10.map(), &v1) else {
            continue;
        };
        if validate_epifin_morphism(src.p10.map(), tgt.p10.map(), &v1, &v0).unwrap_or(false) {
            out.push(TriFinMorphism {
                src: src.clone(),
                tgt: tgt.clone(),
                verticals: [v0, v1, upper.top],
            });
        }
    }
    out
}

/// A `TriFin` morphism between entries of a materialized object list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexedTriSquare {
    pub src: usize,
    pub tgt: usize,
    pub verticals: [FinMap; 3],
}

impl Arrow for IndexedTriSquare {
    fn source(&self) -> usize {
        self.src
    }
    fn target(&self) -> usize {
        self.tgt
    }
}

/// `TriFin` restricted to the given objects.
pub fn trifin_category(objects: Vec<TriFinObject>) -> Result<Materialized<TriFinObject, IndexedTriSquare>> {
    let mut arrows = Vec::new();
    for (i, a) in objects.iter().enumerate() {
        for (j, b) in objects.iter().enumerate() {
            for m in enumerate_trifin_morphisms(a, b) {
                arrows.push(IndexedTriSquare {
                    src: i,
                    tgt: j,
                    verticals: m.verticals,
                });
            }
        }
    }
    let lookup = objects.clone();
    let cards: Vec<[usize; 3]> = objects.iter().map(TriFinObject::cards).collect();
    let identity = move |o: usize| IndexedTriSquare {
        src: o,
        tgt: o,
        verticals: cards[o].map(FinMap::identity),
    };
    let compose_sq = move |f: &IndexedTriSquare, g: &IndexedTriSquare| -> Result<IndexedTriSquare> {
        let m = compose_trifin(
            &TriFinMorphism {
                src: lookup[f.src].clone(),
                tgt: lookup[f.tgt].clone(),
                verticals: f.verticals.clone(),
            },
            &TriFinMorphism {
                src: lookup[g.src].clone(),
                tgt: lookup[g.tgt].clone(),
                verticals: g.verticals.clone(),
            },
        )?;
        Ok(IndexedTriSquare {
            src: f.src,
            tgt: g.tgt,
            verticals: m.verticals,
        })
    };
    Materialized::build(objects, arrows, identity, compose_sq, None)
}

/// A candidate triple of verticals whose outer rectangle is a valid
/// `EpiFin` morphism while some little square is not.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OuterOnlyWitness {
    pub src: TriFinObject,
    pub tgt: TriFinObject,
    pub verticals: [FinMap; 3],
}

/// Searches all object pairs with every card at most `max_card` and all
/// vertical triples, returning the first witness in enumeration order.
pub fn find_outer_only_witness(max_card: usize) -> Option<OuterOnlyWitness> {
    let objects: Vec<TriFinObject> = enumerate_trifin_objects(max_card);
    for src in &objects {
        for tgt in &objects {
            let [k0, k1, k2] = src.cards();
            let [l0, l1, l2] = tgt.cards();
            let (outer_src, outer_tgt) = (src.composite(), tgt.composite());
            for v2 in all_maps(k2, l2) {
                for v0 in all_maps(k0, l0) {
                    if !validate_epifin_morphism(outer_src.map(), outer_tgt.map(), &v2, &v0).unwrap_or(false) {
                        continue;
                    }
                    for v1 in all_maps(k1, l1) {
                        let v = [v0.clone(), v1, v2.clone()];
                        if !validate_trifin_morphism(src, tgt, &v).unwrap_or(false) {
                            return Some(OuterOnlyWitness {
                                src: src.clone(),
                                tgt: tgt.clone(),
                                verticals: v,
                            });
                        }
                    }
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fm(target: usize, values: &[usize]) -> FinMap {
        FinMap::new(target, values.to_vec()).unwrap()
    }

    fn obj(target: usize, values: &[usize]) -> EpiFinObject {
        EpiFinObject::new(fm(target, values)).unwrap()
    }

    #[test]
    fn validation_examples() {
        let x = obj(2, &[1, 2, 1]);
        let id = EpiFinMorphism::identity(&x);
        assert!(id.is_valid());
        // two points over one pullback point
        assert!(!validate_epifin_morphism(&fm(1, &[1, 1]), &FinMap::identity(1), &fm(1, &[1, 1]), &FinMap::identity(1)).unwrap());
        assert!(validate_epifin_morphism(&FinMap::identity(2), &fm(1, &[1, 1]), &FinMap::identity(2), &fm(1, &[1, 1])).unwrap());
        // card mismatch is structural
        assert!(matches!(
            validate_epifin_morphism(&FinMap::identity(2), &FinMap::identity(2), &FinMap::identity(3), &FinMap::identity(2)),
            Err(Error::SquareShape(_))
        ));
    }

    #[test]
    fn non_selfic_objects_are_rejected() {
        assert!(EpiFinObject::new(fm(2, &[2, 1])).is_err());
        assert!(serde_json::from_str::<EpiFinObject>("\"2->2:[2,1]\"").is_err());
        assert!(EpiFinObject::new(FinMap::empty(0)).is_ok());
    }

    #[test]
    fn enumeration_examples() {
        let id1 = EpiFinObject::identity(1);
        assert_eq!(enumerate_epifin_morphisms(&id1, &id1).len(), 1);
        let two_one = obj(1, &[1, 1]);
        assert_eq!(enumerate_epifin_morphisms(&id1, &two_one).len(), 2);
        assert_eq!(enumerate_epifin_morphisms(&two_one, &id1).len(), 0);
    }

    #[test]
    fn enumeration_matches_brute_force_over_all_squares() {
        let objects = enumerate_epifin_objects(3);
        for a in &objects {
            for b in &objects {
                let mut brute = Vec::new();
                for top in all_maps(a.source_card(), b.source_card()) {
                    for bottom in all_maps(a.target_card(), b.target_card()) {
                        if validate_epifin_morphism(a.map(), b.map(), &top, &bottom).unwrap() {
                            brute.push((top.clone(), bottom));
                        }
                    }
                }
                let fast: Vec<_> = enumerate_epifin_morphisms(a, b)
                    .into_iter()
                    .map(|m| (m.top, m.bottom))
                    .collect();
                assert_eq!(fast, brute, "{a} -> {b}");
            }
        }
    }

    #[test]
    fn composition_and_errors() {
        let id1 = EpiFinObject::identity(1);
        let two_one = obj(1, &[1, 1]);
        let f = &enumerate_epifin_morphisms(&id1, &two_one)[0];
        assert_eq!(compose_epifin(&EpiFinMorphism::identity(&id1), f).unwrap(), *f);
        assert!(matches!(compose_epifin(f, f), Err(Error::NotComposable(_))));
    }

    #[test]
    fn closure_at_small_cards() {
        let r = check_epifin_category(3);
        assert!(r.holds(), "{r:?}");
        assert!(r.composable_triples > 0);
    }

    #[test]
    fn epifin_one_membership_and_hom_counts() {
        assert!(is_in_epifin_one(&obj(1, &[1, 1, 1])));
        assert!(!is_in_epifin_one(&EpiFinObject::identity(2)));
        assert!(!is_in_epifin_one(&EpiFinObject::identity(0)));
        for k in 1..=4 {
            for m in 1..=4 {
                let a = EpiFinObject::to_one(k).unwrap();
                let b = EpiFinObject::to_one(m).unwrap();
                let homs = enumerate_epifin_morphisms(&a, &b);
                assert_eq!(homs.len() as u64, crate::finset::falling_factorial(m, k));
                assert!(homs.iter().all(|h| h.top.is_injective()));
            }
        }
    }

    #[test]
    fn trifin_basics() {
        let x = TriFinObject::new(obj(1, &[1, 1]), obj(2, &[1, 2, 2])).unwrap();
        assert_eq!(x.cards(), [1, 2, 3]);
        assert_eq!(trifin_to_fin_object(&x), 3);
        let id = TriFinMorphism::identity(&x);
        let (a, b) = trifin_source_target_functors(&id);
        assert_eq!(a, EpiFinMorphism::identity(&x.p10));
        assert_eq!(b, EpiFinMorphism::identity(&x.p21));
        assert!(TriFinObject::new(obj(1, &[1, 1]), EpiFinObject::identity(3)).is_err());
        let homs = enumerate_trifin_morphisms(&x, &x);
        assert!(homs.contains(&id));
        for h in &homs {
            assert_eq!(compose_trifin(&id, h).unwrap(), *h);
            assert!(trifin_outer(h).is_valid());
        }
    }

    #[test]
    fn outer_rectangle_does_not_imply_little_squares() {
        let w = find_outer_only_witness(2).expect("a witness exists with cards at most 2");
        let inner_ok = validate_trifin_morphism(&w.src, &w.tgt, &w.verticals).unwrap();
        assert!(!inner_ok);
        assert!(TriFinMorphism::new(w.src.clone(), w.tgt.clone(), w.verticals.clone()).is_err());
    }
}
