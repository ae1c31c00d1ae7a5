//! Finite categories given by explicit tables, possibly with a length
//! grading whose bounded truncation makes composition partial.

use std::hash::Hash;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};

/// A finite category with interned objects `0..num_objects` and morphisms
/// `0..num_morphisms`.
///
/// Every morphism carries a length. Lengths add under composition, and a
/// composite may be absent when it would exceed the bound the category was
/// materialized with; such pairs are reported by [`FiniteCategory::compose`]
/// as `None`. Ungraded categories have all lengths zero and total
/// composition.
#[derive(Clone, Debug)]
pub struct FiniteCategory {
    num_objects: usize,
    source: Vec<usize>,
    target: Vec<usize>,
    length: Vec<usize>,
    identities: Vec<usize>,
    composites: FxHashMap<(usize, usize), usize>,
    incoming: Vec<Vec<usize>>,
    outgoing: Vec<Vec<usize>>,
    max_length: Option<usize>,
}

impl FiniteCategory {
    /// Assembles a category from tables. `composites` maps `(f, g)` to
    /// `f` followed by `g`.
    pub fn from_tables(
        num_objects: usize,
        source: Vec<usize>,
        target: Vec<usize>,
        length: Vec<usize>,
        identities: Vec<usize>,
        composites: FxHashMap<(usize, usize), usize>,
        max_length: Option<usize>,
    ) -> Result<Self> {
        let n = source.len();
        if target.len() != n || length.len() != n {
            return Err(Error::InvalidCategory("table lengths differ".into()));
        }
        if identities.len() != num_objects {
            return Err(Error::InvalidCategory("one identity per object required".into()));
        }
        let mut incoming = vec![Vec::new(); num_objects];
        let mut outgoing = vec![Vec::new(); num_objects];
        for m in 0..n {
            if source[m] >= num_objects || target[m] >= num_objects {
                return Err(Error::InvalidCategory(format!("morphism {m} has a dangling endpoint")));
            }
            outgoing[source[m]].push(m);
            incoming[target[m]].push(m);
        }
        for (o, &id) in identities.iter().enumerate() {
            if id >= n || source[id] != o || target[id] != o || length[id] != 0 {
                return Err(Error::InvalidCategory(format!("bad identity for object {o}")));
            }
        }
        for (&(f, g), &h) in &composites {
            if f >= n || g >= n || h >= n {
                return Err(Error::InvalidCategory("composite refers to unknown morphism".into()));
            }
            if target[f] != source[g] || source[h] != source[f] || target[h] != target[g] {
                return Err(Error::InvalidCategory(format!("composite of {f} and {g} has wrong endpoints")));
            }
        }
        Ok(FiniteCategory {
            num_objects,
            source,
            target,
            length,
            identities,
            composites,
            incoming,
            outgoing,
            max_length,
        })
    }

    pub fn num_objects(&self) -> usize {
        self.num_objects
    }

    pub fn num_morphisms(&self) -> usize {
        self.source.len()
    }

    pub fn source(&self, m: usize) -> usize {
        self.source[m]
    }

    pub fn target(&self, m: usize) -> usize {
        self.target[m]
    }

    pub fn length(&self, m: usize) -> usize {
        self.length[m]
    }

    pub fn lengths(&self) -> &[usize] {
        &self.length
    }

    pub fn max_length(&self) -> Option<usize> {
        self.max_length
    }

    pub fn identity(&self, object: usize) -> usize {
        self.identities[object]
    }

    pub fn is_identity(&self, m: usize) -> bool {
        self.identities[self.source[m]] == m
    }

    /// `f` followed by `g`. `None` when the pair is not composable or the
    /// composite exceeds the length bound.
    pub fn compose(&self, f: usize, g: usize) -> Option<usize> {
        if self.target[f] != self.source[g] {
            return None;
        }
        if self.is_identity(f) {
            return Some(g);
        }
        if self.is_identity(g) {
            return Some(f);
        }
        self.composites.get(&(f, g)).copied()
    }

    /// Morphisms with the given target, in increasing id order.
    pub fn incoming(&self, object: usize) -> &[usize] {
        &self.incoming[object]
    }

    /// Morphisms with the given source, in increasing id order.
    pub fn outgoing(&self, object: usize) -> &[usize] {
        &self.outgoing[object]
    }

    /// Checks identity, associativity and grading laws on every composable
    /// pair and triple.
    pub fn validate(&self) -> Result<()> {
        for m in 0..self.num_morphisms() {
            let s = self.identity(self.source[m]);
            let t = self.identity(self.target[m]);
            if self.compose(s, m) != Some(m) || self.compose(m, t) != Some(m) {
                return Err(Error::InvalidCategory(format!("identity law fails at {m}")));
            }
        }
        for f in 0..self.num_morphisms() {
            for &g in self.outgoing(self.target[f]) {
                let fg = self.compose(f, g);
                let within = self
                    .max_length
                    .is_none_or(|b| self.length[f] + self.length[g] <= b);
                if fg.is_some() != within {
                    return Err(Error::InvalidCategory(format!(
                        "composite of {f} and {g} defined={} but within bound={within}",
                        fg.is_some()
                    )));
                }
                let Some(fg) = fg else { continue };
                if self.length[fg] != self.length[f] + self.length[g] {
                    return Err(Error::InvalidCategory(format!("length not additive at ({f}, {g})")));
                }
                for &h in self.outgoing(self.target[g]) {
                    let left = self.compose(fg, h);
                    let right = self.compose(g, h).and_then(|gh| self.compose(f, gh));
                    if left != right {
                        return Err(Error::InvalidCategory(format!(
                            "associativity fails at ({f}, {g}, {h})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The full subcategory on the objects satisfying `keep`, with the
    /// object and morphism renumbering back into `self`.
    pub fn full_subcategory(&self, keep: impl Fn(usize) -> bool) -> (FiniteCategory, Functor) {
        let objects: Vec<usize> = (0..self.num_objects).filter(|&o| keep(o)).collect();
        let mut new_object = vec![usize::MAX; self.num_objects];
        for (i, &o) in objects.iter().enumerate() {
            new_object[o] = i;
        }
        let morphisms: Vec<usize> = (0..self.num_morphisms())
            .filter(|&m| new_object[self.source[m]] != usize::MAX && new_object[self.target[m]] != usize::MAX)
            .collect();
        let mut new_morphism = vec![usize::MAX; self.num_morphisms()];
        for (i, &m) in morphisms.iter().enumerate() {
            new_morphism[m] = i;
        }
        let mut composites = FxHashMap::default();
        for (&(f, g), &h) in &self.composites {
            if new_morphism[f] != usize::MAX && new_morphism[g] != usize::MAX {
                composites.insert((new_morphism[f], new_morphism[g]), new_morphism[h]);
            }
        }
        let sub = FiniteCategory::from_tables(
            objects.len(),
            morphisms.iter().map(|&m| new_object[self.source[m]]).collect(),
            morphisms.iter().map(|&m| new_object[self.target[m]]).collect(),
            morphisms.iter().map(|&m| self.length[m]).collect(),
            objects.iter().map(|&o| new_morphism[self.identities[o]]).collect(),
            composites,
            self.max_length,
        )
        .expect("full subcategory of a valid category");
        let inclusion = Functor::new(objects, morphisms);
        (sub, inclusion)
    }
}

/// A functor between finite categories, as object and morphism tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Functor {
    object_map: Vec<usize>,
    morphism_map: Vec<usize>,
}

impl Functor {
    pub fn new(object_map: Vec<usize>, morphism_map: Vec<usize>) -> Self {
        Functor {
            object_map,
            morphism_map,
        }
    }

    pub fn object(&self, o: usize) -> usize {
        self.object_map[o]
    }

    pub fn morphism(&self, m: usize) -> usize {
        self.morphism_map[m]
    }

    pub fn object_map(&self) -> &[usize] {
        &self.object_map
    }

    pub fn morphism_map(&self) -> &[usize] {
        &self.morphism_map
    }

    /// Checks that endpoints, identities and every defined composite of
    /// `dom` are preserved, and lengths too when `cod` is graded.
    pub fn validate(&self, dom: &FiniteCategory, cod: &FiniteCategory) -> Result<()> {
        let bad = |what: String| Err(Error::InvalidCategory(format!("functor: {what}")));
        if self.object_map.len() != dom.num_objects() || self.morphism_map.len() != dom.num_morphisms() {
            return bad("table sizes do not match the domain".into());
        }
        if self.object_map.iter().any(|&o| o >= cod.num_objects())
            || self.morphism_map.iter().any(|&m| m >= cod.num_morphisms())
        {
            return bad("value outside the codomain".into());
        }
        for o in 0..dom.num_objects() {
            if self.morphism(dom.identity(o)) != cod.identity(self.object(o)) {
                return bad(format!("identity of object {o} not preserved"));
            }
        }
        for m in 0..dom.num_morphisms() {
            let fm = self.morphism(m);
            if cod.source(fm) != self.object(dom.source(m)) || cod.target(fm) != self.object(dom.target(m)) {
                return bad(format!("endpoints of morphism {m} not preserved"));
            }
            if cod.max_length().is_some() && cod.length(fm) != dom.length(m) {
                return bad(format!("length of morphism {m} not preserved"));
            }
        }
        for f in 0..dom.num_morphisms() {
            for &g in dom.outgoing(dom.target(f)) {
                if let Some(fg) = dom.compose(f, g) {
                    if cod.compose(self.morphism(f), self.morphism(g)) != Some(self.morphism(fg)) {
                        return bad(format!("composite of {f} and {g} not preserved"));
                    }
                }
            }
        }
        Ok(())
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Functor) -> Functor {
        Functor {
            object_map: self.object_map.iter().map(|&o| next.object(o)).collect(),
            morphism_map: self.morphism_map.iter().map(|&m| next.morphism(m)).collect(),
        }
    }
}

/// Morphism data that knows its endpoints (as object ids) and length.
pub trait Arrow: Clone + Eq + Hash {
    fn source(&self) -> usize;
    fn target(&self) -> usize;
    fn length(&self) -> usize {
        0
    }
}

/// A finite category materialized from explicit object and morphism data,
/// with lookup from data back to ids.
#[derive(Clone, Debug)]
pub struct Materialized<O, A> {
    objects: Vec<O>,
    arrows: Vec<A>,
    object_ids: FxHashMap<O, usize>,
    arrow_ids: FxHashMap<A, usize>,
    category: FiniteCategory,
}

impl<O: Clone + Eq + Hash, A: Arrow> Materialized<O, A> {
    /// Interns the data and computes every composite whose length stays
    /// within `max_length`. A composite missing from `arrows` is an error:
    /// the enumeration was not closed under composition.
    pub fn build(
        objects: Vec<O>,
        arrows: Vec<A>,
        identity: impl Fn(usize) -> A,
        compose: impl Fn(&A, &A) -> Result<A>,
        max_length: Option<usize>,
    ) -> Result<Self> {
        let mut object_ids = FxHashMap::default();
        for (i, o) in objects.iter().enumerate() {
            if object_ids.insert(o.clone(), i).is_some() {
                return Err(Error::InvalidCategory(format!("object {i} listed twice")));
            }
        }
        let mut arrow_ids = FxHashMap::default();
        for (i, a) in arrows.iter().enumerate() {
            if a.source() >= objects.len() || a.target() >= objects.len() {
                return Err(Error::InvalidCategory(format!("arrow {i} has a dangling endpoint")));
            }
            if arrow_ids.insert(a.clone(), i).is_some() {
                return Err(Error::InvalidCategory(format!("arrow {i} listed twice")));
            }
        }
        let identities = (0..objects.len())
            .map(|o| {
                arrow_ids
                    .get(&identity(o))
                    .copied()
                    .ok_or_else(|| Error::InvalidCategory(format!("identity of object {o} missing")))
            })
            .collect::<Result<Vec<_>>>()?;
        let source: Vec<usize> = arrows.iter().map(Arrow::source).collect();
        let target: Vec<usize> = arrows.iter().map(Arrow::target).collect();
        let length: Vec<usize> = arrows.iter().map(Arrow::length).collect();
        let mut outgoing = vec![Vec::new(); objects.len()];
        for (m, &s) in source.iter().enumerate() {
            outgoing[s].push(m);
        }
        let is_identity = |m: usize| identities[source[m]] == m;
        let mut composites = FxHashMap::default();
        for f in 0..arrows.len() {
            if is_identity(f) {
                continue;
            }
            for &g in &outgoing[target[f]] {
                if is_identity(g) || max_length.is_some_and(|b| length[f] + length[g] > b) {
                    continue;
                }
                let h = compose(&arrows[f], &arrows[g])?;
                let id = *arrow_ids.get(&h).ok_or_else(|| {
                    Error::InvalidCategory(format!("composite of arrows {f} and {g} was not enumerated"))
                })?;
                composites.insert((f, g), id);
            }
        }
        let category = FiniteCategory::from_tables(
            objects.len(),
            source,
            target,
            length,
            identities,
            composites,
            max_length,
        )?;
        Ok(Materialized {
            objects,
            arrows,
            object_ids,
            arrow_ids,
            category,
        })
    }
}

impl<O: Eq + Hash, A: Eq + Hash> Materialized<O, A> {
    pub fn category(&self) -> &FiniteCategory {
        &self.category
    }

    pub fn objects(&self) -> &[O] {
        &self.objects
    }

    pub fn arrows(&self) -> &[A] {
        &self.arrows
    }

    pub fn object(&self, id: usize) -> &O {
        &self.objects[id]
    }

    pub fn arrow(&self, id: usize) -> &A {
        &self.arrows[id]
    }

    pub fn object_id(&self, o: &O) -> Option<usize> {
        self.object_ids.get(o).copied()
    }

    pub fn arrow_id(&self, a: &A) -> Option<usize> {
        self.arrow_ids.get(a).copied()
    }

    /// Builds the functor into `cod` described by data-level maps. Fails if
    /// an image is not present in `cod`.
    pub fn functor_to<P: Eq + Hash, B: Eq + Hash>(
        &self,
        cod: &Materialized<P, B>,
        on_object: impl Fn(&O) -> P,
        on_arrow: impl Fn(&A) -> B,
    ) -> Result<Functor> {
        let object_map = self
            .objects
            .iter()
            .enumerate()
            .map(|(i, o)| {
                cod.object_id(&on_object(o))
                    .ok_or_else(|| Error::InvalidCategory(format!("image of object {i} missing")))
            })
            .collect::<Result<Vec<_>>>()?;
        let morphism_map = self
            .arrows
            .iter()
            .enumerate()
            .map(|(i, a)| {
                cod.arrow_id(&on_arrow(a))
                    .ok_or_else(|| Error::InvalidCategory(format!("image of arrow {i} missing")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Functor::new(object_map, morphism_map))
    }
}

/// An arrow of a category described only by ids, for small hand-made
/// categories.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlainArrow {
    pub source: usize,
    pub target: usize,
    pub name: String,
}

impl Arrow for PlainArrow {
    fn source(&self) -> usize {
        self.source
    }
    fn target(&self) -> usize {
        self.target
    }
}

/// The category with one object and one morphism.
pub fn terminal_category() -> FiniteCategory {
    poset_category(1, |_, _| true)
}

/// The category of the finite preorder on `0..n` given by `le`, which must
/// be reflexive and transitive.
pub fn poset_category(n: usize, le: impl Fn(usize, usize) -> bool) -> FiniteCategory {
    let mut source = Vec::new();
    let mut target = Vec::new();
    let mut ids = FxHashMap::default();
    for a in 0..n {
        for b in 0..n {
            if le(a, b) {
                ids.insert((a, b), source.len());
                source.push(a);
                target.push(b);
            }
        }
    }
    let mut composites = FxHashMap::default();
    for (&(a, b), &f) in &ids {
        for c in 0..n {
            if let Some(&g) = ids.get(&(b, c)) {
                let h = ids[&(a, c)];
                composites.insert((f, g), h);
            }
        }
    }
    let identities = (0..n).map(|a| ids[&(a, a)]).collect();
    let len = source.len();
    FiniteCategory::from_tables(n, source, target, vec![0; len], identities, composites, None)
        .expect("preorder category")
}

/// The classical comma category `(C ↓ y)`: objects are morphisms into `y`,
/// a morphism from `a` to `a'` is some `b` with `b` followed by `a'` equal
/// to `a`. Returns the category and, for each of its objects and
/// morphisms, the underlying morphism of `C`.
pub fn slice_category(c: &FiniteCategory, y: usize) -> Result<(FiniteCategory, Vec<usize>, Vec<usize>)> {
    if y >= c.num_objects() {
        return Err(Error::NotAnObject(y));
    }
    let objects: Vec<usize> = c.incoming(y).to_vec();
    let mut by_source = vec![Vec::new(); c.num_objects()];
    for (j, &a) in objects.iter().enumerate() {
        by_source[c.source(a)].push(j);
    }
    let mut under = Vec::new();
    let mut source = Vec::new();
    let mut target = Vec::new();
    let mut length = Vec::new();
    let mut mor_id = FxHashMap::default();
    // a morphism (x -> y) --b--> (x' -> y') is b with b then a' = a
    for (i, &a) in objects.iter().enumerate() {
        for &b in c.outgoing(c.source(a)) {
            for &j in &by_source[c.target(b)] {
                let a2 = objects[j];
                if c.compose(b, a2) == Some(a) {
                    mor_id.insert((i, b, j), under.len());
                    under.push(b);
                    source.push(i);
                    target.push(j);
                    length.push(c.length(b));
                }
            }
        }
    }
    let identities = objects
        .iter()
        .enumerate()
        .map(|(i, &a)| mor_id[&(i, c.identity(c.source(a)), i)])
        .collect();
    let mut slice_out = vec![Vec::new(); objects.len()];
    for (m, &i) in source.iter().enumerate() {
        slice_out[i].push(m);
    }
    let mut composites = FxHashMap::default();
    for f in 0..under.len() {
        for &g in &slice_out[target[f]] {
            if let Some(bb) = c.compose(under[f], under[g]) {
                composites.insert((f, g), mor_id[&(source[f], bb, target[g])]);
            }
        }
    }
    let cat = FiniteCategory::from_tables(objects.len(), source, target, length, identities, composites, c.max_length())?;
    Ok((cat, objects, under))
}

/// The strict fiber product `A ×_C B` of two functors into a common
/// category, with the component ids of every object and morphism.
#[derive(Clone, Debug)]
pub struct FiberProduct {
    pub category: FiniteCategory,
    pub objects: Vec<(usize, usize)>,
    pub morphisms: Vec<(usize, usize)>,
}

/// Pairs agreeing in the common codomain. Lengths add; at most one side
/// may be graded, and its bound becomes the bound of the product.
pub fn fiber_product(a: &FiniteCategory, fa: &Functor, b: &FiniteCategory, fb: &Functor) -> Result<FiberProduct> {
    let graded = |c: &FiniteCategory| c.max_length().is_some() || c.lengths().iter().any(|&l| l > 0);
    let max_length = match (graded(a), graded(b)) {
        (true, true) => return Err(Error::InvalidCategory("fiber product of two graded categories".into())),
        (true, false) => a.max_length(),
        _ => b.max_length(),
    };
    let mut b_over: FxHashMap<usize, Vec<usize>> = FxHashMap::default();
    for o in 0..b.num_objects() {
        b_over.entry(fb.object(o)).or_default().push(o);
    }
    let mut objects = Vec::new();
    let mut object_id = FxHashMap::default();
    for x in 0..a.num_objects() {
        for &y in b_over.get(&fa.object(x)).map_or(&[][..], Vec::as_slice) {
            object_id.insert((x, y), objects.len());
            objects.push((x, y));
        }
    }
    let mut bm_over: FxHashMap<usize, Vec<usize>> = FxHashMap::default();
    for m in 0..b.num_morphisms() {
        bm_over.entry(fb.morphism(m)).or_default().push(m);
    }
    let mut morphisms = Vec::new();
    let mut morphism_id = FxHashMap::default();
    let (mut source, mut target, mut length) = (Vec::new(), Vec::new(), Vec::new());
    for f in 0..a.num_morphisms() {
        for &g in bm_over.get(&fa.morphism(f)).map_or(&[][..], Vec::as_slice) {
            morphism_id.insert((f, g), morphisms.len());
            morphisms.push((f, g));
            source.push(object_id[&(a.source(f), b.source(g))]);
            target.push(object_id[&(a.target(f), b.target(g))]);
            length.push(a.length(f) + b.length(g));
        }
    }
    let identities = objects
        .iter()
        .map(|&(x, y)| morphism_id[&(a.identity(x), b.identity(y))])
        .collect();
    let mut outgoing = vec![Vec::new(); objects.len()];
    for (m, &s) in source.iter().enumerate() {
        outgoing[s].push(m);
    }
    let mut composites = FxHashMap::default();
    for (m, &(f, g)) in morphisms.iter().enumerate() {
        for &m2 in &outgoing[target[m]] {
            let (f2, g2) = morphisms[m2];
            if let (Some(ff), Some(gg)) = (a.compose(f, f2), b.compose(g, g2)) {
                composites.insert((m, m2), morphism_id[&(ff, gg)]);
            }
        }
    }
    let category = FiniteCategory::from_tables(objects.len(), source, target, length, identities, composites, max_length)?;
    Ok(FiberProduct {
        category,
        objects,
        morphisms,
    })
}

/// The unique functor to the terminal category.
pub fn to_terminal(c: &FiniteCategory) -> Functor {
    Functor::new(vec![0; c.num_objects()], vec![0; c.num_morphisms()])
}
