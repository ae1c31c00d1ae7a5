//! Finite graphs with loops and parallel edges, darts, paths and graph
//! maps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite undirected graph on vertices `0..vertex_count`. Each edge is
/// stored with an orientation `(u, v)` that fixes its forward dart.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    star: Vec<Vec<Dart>>,
}

/// An edge traversed in a direction: forward goes from the first recorded
/// endpoint to the second.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Dart {
    pub edge: usize,
    pub reversed: bool,
}

impl Dart {
    pub fn forward(edge: usize) -> Self {
        Dart { edge, reversed: false }
    }

    pub fn backward(edge: usize) -> Self {
        Dart { edge, reversed: true }
    }

    pub fn reverse(self) -> Self {
        Dart {
            edge: self.edge,
            reversed: !self.reversed,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<usize>,
    edges: Vec<[usize; 2]>,
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson {
            vertices: (0..self.vertex_count).collect(),
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = GraphJson::deserialize(d)?;
        if raw.vertices.iter().enumerate().any(|(i, &v)| i != v) {
            return Err(serde::de::Error::custom("vertex ids must be 0, 1, ..., n-1 in order"));
        }
        Graph::new(raw.vertices.len(), raw.edges.iter().map(|&[u, v]| (u, v)).collect())
            .map_err(serde::de::Error::custom)
    }
}

impl Graph {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut star = vec![Vec::new(); vertex_count];
        for (e, &(u, v)) in edges.iter().enumerate() {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::InvalidGraph(format!("edge {e} = ({u}, {v}) has a missing endpoint")));
            }
            star[u].push(Dart::forward(e));
            star[v].push(Dart::backward(e));
        }
        for s in &mut star {
            s.sort_unstable();
        }
        Ok(Graph {
            vertex_count,
            edges,
            star,
        })
    }

    /// The cycle `C_n` with edges `i → i+1 mod n`. `C_1` is a loop and `C_2`
    /// has two parallel edges.
    pub fn cycle(n: usize) -> Self {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect()).expect("cycle endpoints in range")
    }

    /// The path graph on `n` vertices.
    pub fn path(n: usize) -> Self {
        Graph::new(n, (1..n).map(|i| (i - 1, i)).collect()).expect("path endpoints in range")
    }

    /// `n` isolated vertices.
    pub fn discrete(n: usize) -> Self {
        Graph::new(n, Vec::new()).expect("no edges")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn tail(&self, d: Dart) -> usize {
        let (u, v) = self.edges[d.edge];
        if d.reversed {
            v
        } else {
            u
        }
    }

    pub fn head(&self, d: Dart) -> usize {
        self.tail(d.reverse())
    }

    /// Darts leaving `v`, sorted. A loop contributes both of its darts.
    pub fn star(&self, v: usize) -> &[Dart] {
        &self.star[v]
    }

    pub fn darts(&self) -> impl Iterator<Item = Dart> + '_ {
        (0..self.edges.len()).flat_map(|e| [Dart::forward(e), Dart::backward(e)])
    }

    /// Connected component index of every vertex, numbered by least vertex.
    pub fn components(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.vertex_count];
        let mut next = 0;
        for root in 0..self.vertex_count {
            if comp[root] != usize::MAX {
                continue;
            }
            comp[root] = next;
            let mut stack = vec![root];
            while let Some(v) = stack.pop() {
                for &d in self.star(v) {
                    let w = self.head(d);
                    if comp[w] == usize::MAX {
                        comp[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// For every vertex, the dart by which a breadth-first search from the
    /// least vertex of its component first reached it (`None` at roots),
    /// together with the visiting order.
    pub fn spanning_forest(&self) -> (Vec<Option<Dart>>, Vec<usize>) {
        let mut parent = vec![None; self.vertex_count];
        let mut seen = vec![false; self.vertex_count];
        let mut order = Vec::with_capacity(self.vertex_count);
        for root in 0..self.vertex_count {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut queue = std::collections::VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                order.push(v);
                for &d in self.star(v) {
                    let w = self.head(d);
                    if !seen[w] {
                        seen[w] = true;
                        parent[w] = Some(d);
                        queue.push_back(w);
                    }
                }
            }
        }
        (parent, order)
    }
}

/// A walk: a start vertex and darts traversed head to tail.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgePath {
    pub start: usize,
    pub steps: Vec<Dart>,
}

impl EdgePath {
    pub fn constant(start: usize) -> Self {
        EdgePath {
            start,
            steps: Vec::new(),
        }
    }

    pub fn new(g: &Graph, start: usize, steps: Vec<Dart>) -> Result<Self> {
        let p = EdgePath { start, steps };
        p.validate(g)?;
        Ok(p)
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.start >= g.vertex_count() {
            return Err(Error::InvalidPath(format!("start {} is not a vertex", self.start)));
        }
        let mut at = self.start;
        for (i, &d) in self.steps.iter().enumerate() {
            if d.edge >= g.edge_count() || g.tail(d) != at {
                return Err(Error::InvalidPath(format!("step {i} does not leave vertex {at}")));
            }
            at = g.head(d);
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn end(&self, g: &Graph) -> usize {
        self.steps.last().map_or(self.start, |&d| g.head(d))
    }

    /// The vertices visited, starting with `start`.
    pub fn vertices(&self, g: &Graph) -> Vec<usize> {
        std::iter::once(self.start)
            .chain(self.steps.iter().map(|&d| g.head(d)))
            .collect()
    }
}

/// All walks of exactly `len` steps from `start`, in lexicographic dart
/// order.
pub fn all_paths(g: &Graph, start: usize, len: usize) -> Vec<EdgePath> {
    let mut out = Vec::new();
    let mut steps = Vec::with_capacity(len);
    fn go(g: &Graph, start: usize, at: usize, len: usize, steps: &mut Vec<Dart>, out: &mut Vec<EdgePath>) {
        if steps.len() == len {
            out.push(EdgePath {
                start,
                steps: steps.clone(),
            });
            return;
        }
        for &d in g.star(at) {
            steps.push(d);
            go(g, start, g.head(d), len, steps, out);
            steps.pop();
        }
    }
    go(g, start, start, len, &mut steps, &mut out);
    out
}

/// A map of graphs sending vertices to vertices and each edge to a dart
/// joining the images of its endpoints (in its recorded orientation).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphMap {
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<Dart>,
}

impl GraphMap {
    pub fn identity(g: &Graph) -> Self {
        GraphMap {
            vertex_map: (0..g.vertex_count()).collect(),
            edge_map: (0..g.edge_count()).map(Dart::forward).collect(),
        }
    }

    pub fn validate(&self, dom: &Graph, cod: &Graph) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGraphMap(m));
        if self.vertex_map.len() != dom.vertex_count() || self.edge_map.len() != dom.edge_count() {
            return bad("table sizes do not match the domain".into());
        }
        if let Some(v) = self.vertex_map.iter().position(|&w| w >= cod.vertex_count()) {
            return bad(format!("vertex {v} maps outside the codomain"));
        }
        for (e, &(u, v)) in dom.edges().iter().enumerate() {
            let d = self.edge_map[e];
            if d.edge >= cod.edge_count() {
                return bad(format!("edge {e} maps outside the codomain"));
            }
            if cod.tail(d) != self.vertex_map[u] || cod.head(d) != self.vertex_map[v] {
                return bad(format!("edge {e} is not sent to an edge joining the images of its ends"));
            }
        }
        Ok(())
    }

    pub fn vertex(&self, v: usize) -> usize {
        self.vertex_map[v]
    }

    pub fn dart(&self, d: Dart) -> Dart {
        let image = self.edge_map[d.edge];
        if d.reversed {
            image.reverse()
        } else {
            image
        }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &GraphMap) -> GraphMap {
        GraphMap {
            vertex_map: self.vertex_map.iter().map(|&v| next.vertex(v)).collect(),
            edge_map: self.edge_map.iter().map(|&d| next.dart(d)).collect(),
        }
    }

    pub fn map_path(&self, p: &EdgePath) -> EdgePath {
        EdgePath {
            start: self.vertex(p.start),
            steps: p.steps.iter().map(|&d| self.dart(d)).collect(),
        }
    }

    /// Bijective on vertices and on edges.
    pub fn is_isomorphism(&self, cod: &Graph) -> bool {
        fn bijective(values: impl Iterator<Item = usize>, n: usize, len: usize) -> bool {
            let mut hit = vec![false; n];
            len == n && values.into_iter().all(|v| !std::mem::replace(&mut hit[v], true))
        }
        bijective(self.vertex_map.iter().copied(), cod.vertex_count(), self.vertex_map.len())
            && bijective(self.edge_map.iter().map(|d| d.edge), cod.edge_count(), self.edge_map.len())
    }
}

/// Edge-map entries: a bare edge id for the forward dart, or
/// `[edge, reversed]`.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DartJson {
    Forward(usize),
    Oriented(usize, bool),
}

#[derive(Serialize, Deserialize)]
struct GraphMapJson {
    vertex_map: Vec<usize>,
    edge_map: Vec<DartJson>,
}

impl Serialize for GraphMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphMapJson {
            vertex_map: self.vertex_map.clone(),
            edge_map: self.edge_map.iter().map(dart_to_json).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GraphMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = GraphMapJson::deserialize(d)?;
        Ok(GraphMap {
            vertex_map: raw.vertex_map,
            edge_map: raw.edge_map.into_iter().map(dart_from_json).collect(),
        })
    }
}

fn dart_to_json(d: &Dart) -> DartJson {
    if d.reversed {
        DartJson::Oriented(d.edge, true)
    } else {
        DartJson::Forward(d.edge)
    }
}

fn dart_from_json(d: DartJson) -> Dart {
    match d {
        DartJson::Forward(edge) => Dart::forward(edge),
        DartJson::Oriented(edge, reversed) => Dart { edge, reversed },
    }
}

pub(crate) mod dart_list {
    use super::*;

    pub fn serialize<S: serde::Serializer>(darts: &[Dart], s: S) -> std::result::Result<S::Ok, S::Error> {
        darts.iter().map(dart_to_json).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Vec<Dart>, D::Error> {
        Ok(Vec::<DartJson>::deserialize(d)?.into_iter().map(dart_from_json).collect())
    }
}

/// Every graph map `dom → cod`, by brute force over all vertex maps and all
/// admissible dart choices. Exponential; intended for small graphs and as
/// an oracle.
pub fn all_graph_maps(dom: &Graph, cod: &Graph) -> Vec<GraphMap> {
    let mut out = Vec::new();
    let (n, m) = (dom.vertex_count(), cod.vertex_count());
    if n > 0 && m == 0 {
        return out;
    }
    let total = (m as u128).pow(n as u32);
    let mut vertex_map = vec![0usize; n];
    for code in 0..total {
        let mut c = code;
        for slot in vertex_map.iter_mut() {
            *slot = (c % m as u128) as usize;
            c /= m as u128;
        }
        let choices: Vec<Vec<Dart>> = dom
            .edges()
            .iter()
            .map(|&(u, v)| {
                cod.darts()
                    .filter(|&d| cod.tail(d) == vertex_map[u] && cod.head(d) == vertex_map[v])
                    .collect()
            })
            .collect();
        if choices.iter().any(Vec::is_empty) {
            continue;
        }
        let mut idx = vec![0usize; choices.len()];
        loop {
            out.push(GraphMap {
                vertex_map: vertex_map.clone(),
                edge_map: idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect(),
            });
            let mut k = 0;
            while k < idx.len() {
                idx[k] += 1;
                if idx[k] < choices[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
    }
    out.sort();
    out
}
