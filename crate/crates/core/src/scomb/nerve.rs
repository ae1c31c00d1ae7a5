//! Nerves of finite (possibly length-bounded) categories.
//!
//! An `n`-simplex is a string `x_0 ← x_1 ← ⋯ ← x_n`, stored as the
//! morphisms `[φ_1, …, φ_n]` with `φ_i : x_i → x_{i-1}`. A 0-simplex is
//! stored as `[object]`. `d_0` drops `φ_1`, `d_n` drops `φ_n`, an inner
//! `d_i` composes `φ_{i+1}` then `φ_i`, and `s_i` inserts the identity of
//! `x_i`. Vertex 0 is the ultimate target of the string.
//!
//! For a bounded category only strings whose total length stays within the
//! bound are simplices; these are closed under all operators.

use super::category::{FiniteCategory, Functor};
use super::sset::{SimplicialMap, TruncatedSSet};
use crate::error::{Error, Result};

/// A nerve truncated at some depth, with the strings behind each simplex.
///
/// At each level `n ≥ 2` the strings are sorted lexicographically, so a
/// string is found by binary search; level 1 simplex ids coincide with
/// morphism ids and level 0 ids with object ids.
#[derive(Clone, Debug)]
pub struct Nerve {
    strings: Vec<Vec<usize>>,
    sset: TruncatedSSet,
}

impl Nerve {
    pub fn sset(&self) -> &TruncatedSSet {
        &self.sset
    }

    pub fn into_sset(self) -> TruncatedSSet {
        self.sset
    }

    pub fn max_dim(&self) -> usize {
        self.sset.max_dim()
    }

    pub fn count(&self, n: usize) -> usize {
        self.sset.count(n)
    }

    /// The morphisms of an `n`-simplex (the object, for `n = 0`).
    pub fn string(&self, n: usize, x: usize) -> &[usize] {
        string_in(&self.strings, n, x)
    }

    /// The simplex with the given string, if it is stored.
    pub fn find(&self, n: usize, string: &[usize]) -> Option<usize> {
        find_in(&self.strings, n, string)
    }
}

fn string_in(strings: &[Vec<usize>], n: usize, x: usize) -> &[usize] {
    let stride = n.max(1);
    &strings[n][x * stride..(x + 1) * stride]
}

fn find_in(strings: &[Vec<usize>], n: usize, string: &[usize]) -> Option<usize> {
    if n >= strings.len() || string.len() != n.max(1) {
        return None;
    }
    let count = strings[n].len() / n.max(1);
    if n <= 1 {
        return (string[0] < count).then_some(string[0]);
    }
    let (mut lo, mut hi) = (0, count);
    while lo < hi {
        let mid = (lo + hi) / 2;
        match string_in(strings, n, mid).cmp(string) {
            std::cmp::Ordering::Less => lo = mid + 1,
            std::cmp::Ordering::Greater => hi = mid,
            std::cmp::Ordering::Equal => return Some(mid),
        }
    }
    None
}

/// The nerve of `c` truncated at depth `d`.
pub fn nerve(c: &FiniteCategory, d: usize) -> Result<Nerve> {
    let mut strings: Vec<Vec<usize>> = Vec::with_capacity(d + 1);
    strings.push((0..c.num_objects()).collect());
    // total composite of each string, from x_n to x_0
    let mut totals: Vec<usize> = Vec::new();
    if d >= 1 {
        strings.push((0..c.num_morphisms()).collect());
        totals = (0..c.num_morphisms()).collect();
    }
    for n in 2..=d {
        let prev = &strings[n - 1];
        let stride = n - 1;
        let mut level = Vec::new();
        let mut next_totals = Vec::new();
        for (x, &total) in totals.iter().enumerate() {
            let s = &prev[x * stride..(x + 1) * stride];
            let last = s[stride - 1];
            for &phi in c.incoming(c.source(last)) {
                if let Some(t) = c.compose(phi, total) {
                    level.extend_from_slice(s);
                    level.push(phi);
                    next_totals.push(t);
                }
            }
        }
        strings.push(level);
        totals = next_totals;
    }
    let counts: Vec<usize> = (0..=d).map(|n| strings[n].len() / n.max(1)).collect();
    let mut faces = vec![Vec::new()];
    for n in 1..=d {
        let mut tables = vec![Vec::with_capacity(counts[n]); n + 1];
        let mut buf = Vec::with_capacity(n);
        for x in 0..counts[n] {
            let s = string_in(&strings, n, x);
            for (i, table) in tables.iter_mut().enumerate() {
                let y = if n == 1 {
                    if i == 0 {
                        c.source(s[0])
                    } else {
                        c.target(s[0])
                    }
                } else {
                    buf.clear();
                    if i == 0 {
                        buf.extend_from_slice(&s[1..]);
                    } else if i == n {
                        buf.extend_from_slice(&s[..n - 1]);
                    } else {
                        buf.extend_from_slice(&s[..i - 1]);
                        let merged = c.compose(s[i], s[i - 1]).ok_or_else(|| {
                            Error::InvalidCategory(format!("inner face of a stored string at level {n} is undefined"))
                        })?;
                        buf.push(merged);
                        buf.extend_from_slice(&s[i + 1..]);
                    }
                    find_in(&strings, n - 1, &buf).ok_or_else(|| {
                        Error::InvalidCategory(format!("face d_{i} of simplex {x} at level {n} is not stored"))
                    })?
                };
                table.push(y);
            }
        }
        faces.push(tables);
    }
    let mut degeneracies = Vec::new();
    for n in 0..d {
        let mut tables = vec![Vec::with_capacity(counts[n]); n + 1];
        let mut buf = Vec::with_capacity(n + 1);
        for x in 0..counts[n] {
            let s = string_in(&strings, n, x);
            for (i, table) in tables.iter_mut().enumerate() {
                let y = if n == 0 {
                    c.identity(s[0])
                } else {
                    let vertex = if i == 0 { c.target(s[0]) } else { c.source(s[i - 1]) };
                    buf.clear();
                    buf.extend_from_slice(&s[..i]);
                    buf.push(c.identity(vertex));
                    buf.extend_from_slice(&s[i..]);
                    find_in(&strings, n + 1, &buf).ok_or_else(|| {
                        Error::InvalidCategory(format!("degeneracy s_{i} of simplex {x} at level {n} is not stored"))
                    })?
                };
                table.push(y);
            }
        }
        degeneracies.push(tables);
    }
    degeneracies.push(Vec::new());
    let sset = TruncatedSSet::from_tables(counts, faces, degeneracies)?;
    Ok(Nerve { strings, sset })
}

/// The simplicial map induced by a functor, truncated at the smaller
/// depth.
pub fn nerve_map(f: &Functor, dom: &Nerve, cod: &Nerve) -> Result<SimplicialMap> {
    let d = dom.max_dim().min(cod.max_dim());
    let mut levels = Vec::with_capacity(d + 1);
    levels.push((0..dom.count(0)).map(|o| f.object(o)).collect());
    let mut buf = Vec::new();
    for n in 1..=d {
        let mut level = Vec::with_capacity(dom.count(n));
        for x in 0..dom.count(n) {
            buf.clear();
            buf.extend(dom.string(n, x).iter().map(|&m| f.morphism(m)));
            level.push(cod.find(n, &buf).ok_or_else(|| {
                Error::InvalidSimplicialMap(format!("image of simplex {x} at level {n} is not stored"))
            })?);
        }
        levels.push(level);
    }
    Ok(SimplicialMap::new(levels))
}
