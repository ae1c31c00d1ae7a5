//! A stack of coverings `G_h → ⋯ → G_1 → G_0` and the discrete step rules
//! for particles moving on it.
//!
//! Height 0 is a single graph, height 1 a covering, height 2 a tower.
//! Particles live on the top graph; their shadows on each lower level are
//! obtained by projecting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphcov::{CoveringSpace, Dart, Graph, Tower};

/// One tick of one particle: stay put, or cross an edge along a dart.
pub type Step = Option<Dart>;

/// Explicit bounds for a materialized category: number of points, Moore
/// length in ticks, and nerve depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bounds {
    pub k_max: usize,
    pub tick_max: usize,
    #[serde(default = "default_depth", alias = "nerve_depth")]
    pub depth: usize,
}

fn default_depth() -> usize {
    2
}

impl Bounds {
    pub fn new(k_max: usize, tick_max: usize, depth: usize) -> Self {
        Bounds {
            k_max,
            tick_max,
            depth,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CoveringStack {
    graphs: Vec<Graph>,
    stages: Vec<CoveringSpace>,
    /// `vertex_down[i][x]`: the level-`i` shadow of top vertex `x`.
    vertex_down: Vec<Vec<usize>>,
    /// `dart_down[i][2 e + r]`: the level-`i` shadow of a top dart.
    dart_down: Vec<Vec<Dart>>,
}

fn dart_slot(d: Dart) -> usize {
    2 * d.edge + usize::from(d.reversed)
}

impl CoveringStack {
    /// Stages are given bottom up: stage `i` covers level `i` by level
    /// `i + 1`.
    pub fn new(base: Graph, stages: Vec<CoveringSpace>) -> Result<Self> {
        let mut graphs = vec![base];
        for (i, s) in stages.iter().enumerate() {
            if s.base() != &graphs[i] {
                return Err(Error::InvalidTower(format!("stage {i} does not cover level {i}")));
            }
            graphs.push(s.total().clone());
        }
        let h = stages.len();
        let top = &graphs[h];
        let mut vertex_down = vec![Vec::new(); h + 1];
        let mut dart_down = vec![Vec::new(); h + 1];
        vertex_down[h] = (0..top.vertex_count()).collect();
        dart_down[h] = (0..2 * top.edge_count())
            .map(|s| Dart {
                edge: s / 2,
                reversed: s % 2 == 1,
            })
            .collect();
        for i in (0..h).rev() {
            let proj = stages[i].proj();
            vertex_down[i] = vertex_down[i + 1].iter().map(|&v| proj.vertex(v)).collect();
            dart_down[i] = dart_down[i + 1].iter().map(|&d| proj.dart(d)).collect();
        }
        Ok(CoveringStack {
            graphs,
            stages,
            vertex_down,
            dart_down,
        })
    }

    pub fn single(g: &Graph) -> Self {
        Self::new(g.clone(), Vec::new()).expect("no stages to check")
    }

    pub fn covering(pi: &CoveringSpace) -> Self {
        Self::new(pi.base().clone(), vec![pi.clone()]).expect("a covering sits over its base")
    }

    pub fn tower(t: &Tower) -> Self {
        Self::new(t.level(0).clone(), t.stages().to_vec()).expect("a tower is a stack")
    }

    pub fn height(&self) -> usize {
        self.stages.len()
    }

    pub fn graph(&self, level: usize) -> &Graph {
        &self.graphs[level]
    }

    pub fn top(&self) -> &Graph {
        &self.graphs[self.height()]
    }

    pub fn stage(&self, i: usize) -> &CoveringSpace {
        &self.stages[i]
    }

    /// The stack truncated to levels `0..=level`.
    pub fn below(&self, level: usize) -> CoveringStack {
        CoveringStack::new(self.graphs[0].clone(), self.stages[..level].to_vec()).expect("prefix of a stack")
    }

    /// The single graph at `level`, as a stack of height 0.
    pub fn at(&self, level: usize) -> CoveringStack {
        CoveringStack::single(&self.graphs[level])
    }

    pub fn vertex_at(&self, level: usize, top_vertex: usize) -> usize {
        self.vertex_down[level][top_vertex]
    }

    pub fn dart_at(&self, level: usize, top_dart: Dart) -> Dart {
        self.dart_down[level][dart_slot(top_dart)]
    }

    pub fn step_at(&self, level: usize, s: Step) -> Step {
        s.map(|d| self.dart_at(level, d))
    }

    /// Position after a step on the top graph.
    pub fn advance(&self, at: usize, s: Step) -> usize {
        s.map_or(at, |d| self.top().head(d))
    }
}

/// The sticky rules applied at every level: particles whose shadows share
/// a vertex take the same shadow step, and no two shadows cross one edge in
/// opposite directions during a tick.
pub fn sticky_compatible(stack: &CoveringStack, pos: &[usize], steps: &[Step], c: usize, s: Step) -> bool {
    for (c2, &s2) in steps.iter().enumerate().take(c) {
        for level in 0..=stack.height() {
            let (a, b) = (stack.step_at(level, s2), stack.step_at(level, s));
            if stack.vertex_at(level, pos[c2]) == stack.vertex_at(level, pos[c]) && a != b {
                return false;
            }
            if let (Some(a), Some(b)) = (a, b) {
                if a == b.reverse() {
                    return false;
                }
            }
        }
    }
    true
}

/// Calls `visit` with every step tuple for particles at `pos` accepted by
/// `allowed`, which sees the steps chosen so far, the particle index and
/// its candidate step. Options per particle are tried as `None` first, then
/// the star of its vertex in dart order.
pub fn for_each_tick(
    stack: &CoveringStack,
    pos: &[usize],
    allowed: &mut dyn FnMut(&[Step], usize, Step) -> bool,
    visit: &mut dyn FnMut(&[Step]),
) {
    fn go(
        stack: &CoveringStack,
        pos: &[usize],
        steps: &mut Vec<Step>,
        allowed: &mut dyn FnMut(&[Step], usize, Step) -> bool,
        visit: &mut dyn FnMut(&[Step]),
    ) {
        let c = steps.len();
        if c == pos.len() {
            visit(steps);
            return;
        }
        let star = stack.top().star(pos[c]);
        for s in std::iter::once(None).chain(star.iter().map(|&d| Some(d))) {
            if allowed(steps, c, s) {
                steps.push(s);
                go(stack, pos, steps, allowed, visit);
                steps.pop();
            }
        }
    }
    let mut steps = Vec::with_capacity(pos.len());
    go(stack, pos, &mut steps, allowed, visit);
}

/// Level-`level` block structure of a tuple of top vertices: the selfic
/// labels of its shadow and the distinct shadow vertices in label order.
pub fn shadow(stack: &CoveringStack, level: usize, points: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut distinct: Vec<usize> = Vec::new();
    let mut labels = Vec::with_capacity(points.len());
    for &x in points {
        let v = stack.vertex_at(level, x);
        let j = match distinct.iter().position(|&w| w == v) {
            Some(j) => j,
            None => {
                distinct.push(v);
                distinct.len() - 1
            }
        };
        labels.push(j + 1);
    }
    (labels, distinct)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphcov::build_cyclic_tower;

    #[test]
    fn shadows_in_a_tower() {
        let t = build_cyclic_tower(3).unwrap();
        let s = CoveringStack::tower(&t);
        assert_eq!(s.height(), 2);
        assert_eq!(s.vertex_at(1, 7), 1);
        assert_eq!(s.vertex_at(0, 7), 1);
        let (labels, distinct) = shadow(&s, 0, &[0, 6, 3]);
        assert_eq!(labels, vec![1, 1, 1]);
        assert_eq!(distinct, vec![0]);
        let (labels, _) = shadow(&s, 1, &[0, 6, 3]);
        assert_eq!(labels, vec![1, 1, 2]);
    }

    #[test]
    fn tick_enumeration_counts() {
        let s = CoveringStack::single(&Graph::cycle(3));
        let mut n = 0;
        for_each_tick(&s, &[0, 1], &mut |_, _, _| true, &mut |_| n += 1);
        assert_eq!(n, 9);
        let mut sticky = 0;
        let pos = [0, 1];
        for_each_tick(
            &s,
            &pos,
            &mut |steps, c, st| sticky_compatible(&s, &pos, steps, c, st),
            &mut |_| sticky += 1,
        );
        // the swap along edge 0 is the only excluded pair
        assert_eq!(sticky, 8);
    }
}
