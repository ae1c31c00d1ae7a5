//! Graph coverings: validation, unique path lifting, deck transformations,
//! fiberwise injective lifts of base maps, and towers.

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::graph::{Dart, EdgePath, Graph, GraphMap};
use crate::error::{Error, Result};

/// Why a graph map fails to be a covering, or `None` if it is one: every
/// star of the total graph maps bijectively onto the star below it, and
/// fibers over each component of the base have one size.
pub fn covering_violation(total: &Graph, base: &Graph, proj: &GraphMap) -> Option<String> {
    if let Err(e) = proj.validate(total, base) {
        return Some(e.to_string());
    }
    for x in 0..total.vertex_count() {
        let mut image: Vec<Dart> = total.star(x).iter().map(|&d| proj.dart(d)).collect();
        image.sort_unstable();
        if image != base.star(proj.vertex(x)) {
            return Some(format!("star of vertex {x} is not sent bijectively onto the star of {}", proj.vertex(x)));
        }
    }
    let mut fiber_size = vec![0usize; base.vertex_count()];
    for &z in &proj.vertex_map {
        fiber_size[z] += 1;
    }
    let comp = base.components();
    let mut size_of: FxHashMap<usize, usize> = FxHashMap::default();
    for z in 0..base.vertex_count() {
        let want = *size_of.entry(comp[z]).or_insert(fiber_size[z]);
        if want != fiber_size[z] {
            return Some(format!("fiber over {z} has {} points, not {want}", fiber_size[z]));
        }
    }
    None
}

pub fn validate_covering(total: &Graph, base: &Graph, proj: &GraphMap) -> bool {
    covering_violation(total, base, proj).is_none()
}

/// A validated covering `π: E → M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoveringSpace {
    total: Graph,
    base: Graph,
    proj: GraphMap,
    fibers: Vec<Vec<usize>>,
    lift: FxHashMap<(usize, Dart), Dart>,
}

#[derive(Serialize, Deserialize)]
struct CoveringJson {
    total: Graph,
    base: Graph,
    vertex_map: Vec<usize>,
    #[serde(with = "super::graph::dart_list")]
    edge_map: Vec<Dart>,
}

impl Serialize for CoveringSpace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CoveringJson {
            total: self.total.clone(),
            base: self.base.clone(),
            vertex_map: self.proj.vertex_map.clone(),
            edge_map: self.proj.edge_map.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CoveringSpace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = CoveringJson::deserialize(d)?;
        CoveringSpace::new(
            raw.total,
            raw.base,
            GraphMap {
                vertex_map: raw.vertex_map,
                edge_map: raw.edge_map,
            },
        )
        .map_err(serde::de::Error::custom)
    }
}

impl CoveringSpace {
    pub fn new(total: Graph, base: Graph, proj: GraphMap) -> Result<Self> {
        if let Some(why) = covering_violation(&total, &base, &proj) {
            return Err(Error::NotACovering(why));
        }
        let mut fibers = vec![Vec::new(); base.vertex_count()];
        for (x, &z) in proj.vertex_map.iter().enumerate() {
            fibers[z].push(x);
        }
        let mut lift = FxHashMap::default();
        for x in 0..total.vertex_count() {
            for &d in total.star(x) {
                lift.insert((x, proj.dart(d)), d);
            }
        }
        Ok(CoveringSpace {
            total,
            base,
            proj,
            fibers,
            lift,
        })
    }

    /// The identity covering of `g`.
    pub fn identity(g: &Graph) -> Self {
        Self::new(g.clone(), g.clone(), GraphMap::identity(g)).expect("identity is a covering")
    }

    /// `C_m → C_n` for `n | m`, vertex `i ↦ i mod n`.
    pub fn cyclic(m: usize, n: usize) -> Result<Self> {
        if n == 0 || !m.is_multiple_of(n) {
            return Err(Error::NotACovering(format!("{n} does not divide {m}")));
        }
        let proj = GraphMap {
            vertex_map: (0..m).map(|i| i % n).collect(),
            edge_map: (0..m).map(|i| Dart::forward(i % n)).collect(),
        };
        Self::new(Graph::cycle(m), Graph::cycle(n), proj)
    }

    /// `fiber` disjoint copies of `base`, with copy `j` of vertex `v` at
    /// `j * |V| + v`.
    pub fn trivial(base: &Graph, fiber: usize) -> Self {
        let n = base.vertex_count();
        let edges = (0..fiber)
            .flat_map(|j| base.edges().iter().map(move |&(u, v)| (j * n + u, j * n + v)))
            .collect();
        let total = Graph::new(n * fiber, edges).expect("copies of a valid graph");
        let proj = GraphMap {
            vertex_map: (0..n * fiber).map(|x| x % n).collect(),
            edge_map: (0..base.edge_count() * fiber)
                .map(|e| Dart::forward(e % base.edge_count().max(1)))
                .collect(),
        };
        Self::new(total, base.clone(), proj).expect("trivial covering")
    }

    pub fn total(&self) -> &Graph {
        &self.total
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn proj(&self) -> &GraphMap {
        &self.proj
    }

    pub fn project(&self, x: usize) -> usize {
        self.proj.vertex(x)
    }

    /// Points over `z`, increasing.
    pub fn fiber(&self, z: usize) -> &[usize] {
        &self.fibers[z]
    }

    /// The unique dart at `x` over the base dart `d`, if `d` leaves `π(x)`.
    pub fn lift_dart(&self, x: usize, d: Dart) -> Option<Dart> {
        self.lift.get(&(x, d)).copied()
    }

    /// The unique lift of `p` starting at `start`.
    pub fn lift_path(&self, p: &EdgePath, start: usize) -> Result<EdgePath> {
        p.validate(&self.base)?;
        if start >= self.total.vertex_count() || self.project(start) != p.start {
            return Err(Error::MisplacedStart { start, base: p.start });
        }
        let mut at = start;
        let mut steps = Vec::with_capacity(p.len());
        for &d in &p.steps {
            let up = self.lift_dart(at, d).expect("covering lifts every dart");
            at = self.total.head(up);
            steps.push(up);
        }
        Ok(EdgePath { start, steps })
    }

    /// Componentwise unique lifts of several paths.
    pub fn lift_multipath(&self, paths: &[EdgePath], starts: &[usize]) -> Result<Vec<EdgePath>> {
        if paths.len() != starts.len() {
            return Err(Error::InvalidPath(format!("{} paths but {} starts", paths.len(), starts.len())));
        }
        paths.iter().zip(starts).map(|(p, &s)| self.lift_path(p, s)).collect()
    }

    /// `self` followed by `next`, where `next` covers the base of `self`.
    pub fn then(&self, next: &CoveringSpace) -> Result<CoveringSpace> {
        if self.base != next.total {
            return Err(Error::InvalidTower("base of the upper stage is not the total space of the lower".into()));
        }
        CoveringSpace::new(self.total.clone(), next.base.clone(), self.proj.then(&next.proj))
    }

    /// All automorphisms `h` of the total graph with `π h = π`.
    ///
    /// A deck transformation is fixed by the image of one root per
    /// component, since everything else follows by lifting along a
    /// spanning forest; each choice of root images is propagated and kept
    /// if it yields an automorphism.
    pub fn deck_transformations(&self) -> Vec<GraphMap> {
        let mut out: Vec<GraphMap> = self
            .lifts_over(self, &GraphMap::identity(&self.base))
            .into_iter()
            .filter(|g| g.is_isomorphism(&self.total))
            .collect();
        out.sort();
        out
    }

    /// Lifts `g: E_L → E_M` of `f ∘ π_L` through `π_M = self` that are
    /// graph maps, without any injectivity filter.
    fn lifts_over(&self, lower: &CoveringSpace, f: &GraphMap) -> Vec<GraphMap> {
        let el = &lower.total;
        let (parent, order) = el.spanning_forest();
        let roots: Vec<usize> = order.iter().copied().filter(|&v| parent[v].is_none()).collect();
        let choices: Vec<&[usize]> = roots
            .iter()
            .map(|&r| self.fiber(f.vertex(lower.project(r))))
            .collect();
        let mut out = Vec::new();
        if choices.iter().any(|c| c.is_empty()) && !roots.is_empty() {
            return out;
        }
        let mut idx = vec![0usize; roots.len()];
        'outer: loop {
            let mut vertex_map = vec![usize::MAX; el.vertex_count()];
            for (k, &r) in roots.iter().enumerate() {
                vertex_map[r] = choices[k][idx[k]];
            }
            for &v in &order {
                if let Some(d) = parent[v] {
                    let at = vertex_map[el.tail(d)];
                    let up = self
                        .lift_dart(at, f.dart(lower.proj.dart(d)))
                        .expect("covering lifts every dart");
                    vertex_map[v] = self.total.head(up);
                }
            }
            let mut edge_map = Vec::with_capacity(el.edge_count());
            let mut consistent = true;
            for (e, &(u, v)) in el.edges().iter().enumerate() {
                let d = Dart::forward(e);
                let up = self
                    .lift_dart(vertex_map[u], f.dart(lower.proj.dart(d)))
                    .expect("covering lifts every dart");
                if self.total.head(up) != vertex_map[v] {
                    consistent = false;
                    break;
                }
                edge_map.push(up);
            }
            if consistent {
                out.push(GraphMap { vertex_map, edge_map });
            }
            let mut k = 0;
            while k < idx.len() {
                idx[k] += 1;
                if idx[k] < choices[k].len() {
                    continue 'outer;
                }
                idx[k] = 0;
                k += 1;
            }
            break;
        }
        out
    }
}

/// True when `g` is injective on every fiber of `π_L`.
pub fn is_fiberwise_injective(pi_l: &CoveringSpace, g: &GraphMap) -> bool {
    (0..pi_l.base().vertex_count()).all(|z| {
        let mut images: Vec<usize> = pi_l.fiber(z).iter().map(|&x| g.vertex(x)).collect();
        images.sort_unstable();
        images.windows(2).all(|w| w[0] != w[1])
    })
}

/// All `g: E_L → E_M` with `π_M g = f π_L` that are injective on each fiber
/// of `π_L`: the fiber over `f` of the projection from fiberwise injective
/// maps of total spaces to maps of bases. Sorted.
pub fn enumerate_mapcov(pi_l: &CoveringSpace, pi_m: &CoveringSpace, f: &GraphMap) -> Result<Vec<GraphMap>> {
    f.validate(pi_l.base(), pi_m.base())?;
    let mut out: Vec<GraphMap> = pi_m
        .lifts_over(pi_l, f)
        .into_iter()
        .filter(|g| is_fiberwise_injective(pi_l, g))
        .collect();
    out.sort();
    Ok(out)
}

/// Coverings `M(1) → M(0)`, `M(2) → M(1)`, … given bottom up.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TowerJson", into = "TowerJson")]
pub struct Tower {
    stages: Vec<CoveringSpace>,
}

#[derive(Serialize, Deserialize)]
struct TowerJson {
    stages: Vec<CoveringSpace>,
}

impl TryFrom<TowerJson> for Tower {
    type Error = Error;
    fn try_from(t: TowerJson) -> Result<Self> {
        Tower::new(t.stages)
    }
}

impl From<Tower> for TowerJson {
    fn from(t: Tower) -> Self {
        TowerJson { stages: t.stages }
    }
}

impl Tower {
    pub fn new(stages: Vec<CoveringSpace>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::InvalidTower("no stages".into()));
        }
        for i in 1..stages.len() {
            if stages[i].base() != stages[i - 1].total() {
                return Err(Error::InvalidTower(format!("stage {i} does not sit over stage {}", i - 1)));
            }
        }
        let t = Tower { stages };
        t.composite_from(0)?;
        Ok(t)
    }

    pub fn stages(&self) -> &[CoveringSpace] {
        &self.stages
    }

    /// Number of stages.
    pub fn height(&self) -> usize {
        self.stages.len()
    }

    /// `M(j)` for `0 ≤ j ≤ height`.
    pub fn level(&self, j: usize) -> &Graph {
        if j == 0 {
            self.stages[0].base()
        } else {
            self.stages[j - 1].total()
        }
    }

    /// The covering `M(height) → M(j)`.
    pub fn composite_from(&self, j: usize) -> Result<CoveringSpace> {
        let top = self.stages.len();
        if j >= top {
            return Err(Error::InvalidTower(format!("no stage below level {j}")));
        }
        let mut cov = self.stages[top - 1].clone();
        for i in (j..top - 1).rev() {
            cov = cov.then(&self.stages[i])?;
        }
        Ok(cov)
    }

    /// The covering from the top level to the bottom.
    pub fn composite(&self) -> CoveringSpace {
        self.composite_from(0).expect("validated at construction")
    }

    /// Projection of a vertex of the top level down to level `j`.
    pub fn project_to(&self, j: usize, x: usize) -> usize {
        let mut v = x;
        for i in (j..self.stages.len()).rev() {
            v = self.stages[i].project(v);
        }
        v
    }
}

/// `C_{4n} → C_{2n} → C_n` with `i ↦ i mod` at each stage.
pub fn build_cyclic_tower(n: usize) -> Result<Tower> {
    if n == 0 {
        return Err(Error::InvalidTower("n must be positive".into()));
    }
    Tower::new(vec![CoveringSpace::cyclic(2 * n, n)?, CoveringSpace::cyclic(4 * n, 2 * n)?])
}

/// Comparison of [`CoveringSpace::lift_path`] with brute-force lifting over
/// every base walk of bounded length and every start above it.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LiftingReport {
    pub max_len: usize,
    /// `(walk, start)` pairs examined.
    pub pairs: u64,
    pub failures: u64,
    pub witness: Option<String>,
}

impl LiftingReport {
    pub fn holds(&self) -> bool {
        self.failures == 0
    }
}

/// Candidate lifts are found by searching whole stars of the total graph
/// for darts over each base dart, so the count does not rely on the lift
/// table.
pub fn check_unique_lifting(pi: &CoveringSpace, max_len: usize) -> LiftingReport {
    fn candidates(pi: &CoveringSpace, p: &EdgePath, at: usize, i: usize, steps: &mut Vec<Dart>, out: &mut Vec<Vec<Dart>>) {
        if i == p.steps.len() {
            out.push(steps.clone());
            return;
        }
        for &d in pi.total().star(at) {
            if pi.proj().dart(d) == p.steps[i] {
                steps.push(d);
                candidates(pi, p, pi.total().head(d), i + 1, steps, out);
                steps.pop();
            }
        }
    }
    let mut report = LiftingReport {
        max_len,
        ..Default::default()
    };
    for len in 0..=max_len {
        for z in 0..pi.base().vertex_count() {
            for p in super::graph::all_paths(pi.base(), z, len) {
                for &x in pi.fiber(z) {
                    report.pairs += 1;
                    let mut found = Vec::new();
                    candidates(pi, &p, x, 0, &mut Vec::new(), &mut found);
                    let lifted = pi.lift_path(&p, x).ok().map(|q| q.steps);
                    if found.len() != 1 || lifted.as_ref() != found.first() {
                        report.failures += 1;
                        report.witness.get_or_insert_with(|| {
                            format!("walk {:?} from {z} has {} lifts at {x}", p.steps, found.len())
                        });
                    }
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_examples() {
        let c3 = Graph::cycle(3);
        assert!(validate_covering(&c3, &c3, &GraphMap::identity(&c3)));
        assert!(CoveringSpace::cyclic(6, 3).is_ok());
        // fold P3 onto P2: the middle vertex has two darts over one
        let fold = GraphMap {
            vertex_map: vec![0, 1, 0],
            edge_map: vec![Dart::forward(0), Dart::backward(0)],
        };
        assert!(!validate_covering(&Graph::path(3), &Graph::path(2), &fold));
        assert!(CoveringSpace::cyclic(6, 4).is_err());
    }

    #[test]
    fn lifting_examples() {
        let cov = CoveringSpace::cyclic(6, 3).unwrap();
        let loop3 = EdgePath::new(cov.base(), 0, vec![Dart::forward(0), Dart::forward(1), Dart::forward(2)]).unwrap();
        let up = cov.lift_path(&loop3, 0).unwrap();
        assert_eq!(up.end(cov.total()), 3);
        assert_eq!(cov.proj().map_path(&up), loop3);
        let mut loop6 = loop3.clone();
        loop6.steps.extend(loop3.steps.iter().copied());
        assert_eq!(cov.lift_path(&loop6, 0).unwrap().end(cov.total()), 0);
        assert_eq!(cov.lift_path(&EdgePath::constant(1), 4).unwrap(), EdgePath::constant(4));
        assert!(matches!(cov.lift_path(&loop3, 1), Err(Error::MisplacedStart { .. })));
        let both = cov.lift_multipath(&[loop3.clone(), loop6], &[0, 3]).unwrap();
        assert_eq!(both[0].end(cov.total()), 3);
        assert_eq!(both[1].end(cov.total()), 3);
    }

    #[test]
    fn deck_groups() {
        assert_eq!(CoveringSpace::cyclic(6, 3).unwrap().deck_transformations().len(), 2);
        assert_eq!(CoveringSpace::cyclic(12, 3).unwrap().deck_transformations().len(), 4);
        let t = CoveringSpace::trivial(&Graph::cycle(3), 2);
        // swapping the sheets, plus the identity
        assert_eq!(t.deck_transformations().len(), 2);
    }

    #[test]
    fn mapcov_examples() {
        let point = Graph::discrete(1);
        let two = CoveringSpace::trivial(&point, 2);
        let three = CoveringSpace::trivial(&point, 3);
        let f = GraphMap::identity(&point);
        assert_eq!(enumerate_mapcov(&two, &two, &f).unwrap().len(), 2);
        assert!(enumerate_mapcov(&three, &two, &f).unwrap().is_empty());
    }

    #[test]
    fn cyclic_tower() {
        let t = build_cyclic_tower(3).unwrap();
        assert_eq!(t.level(2).vertex_count(), 12);
        let sizes: Vec<usize> = t.stages().iter().map(|s| s.fiber(0).len()).collect();
        assert_eq!(sizes, vec![2, 2]);
        assert_eq!(t.composite().fiber(0).len(), 4);
        assert_eq!(t.composite().deck_transformations().len(), 4);
        let json = serde_json::to_string(&t).unwrap();
        let back: Tower = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        assert_eq!(t.project_to(0, 7), 1);
        assert_eq!(t.project_to(1, 7), 1);
    }
}
