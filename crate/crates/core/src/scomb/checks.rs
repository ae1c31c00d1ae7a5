//! Latching objects, comma constructions, Segal maps and strict pullback
//! comparisons on truncated simplicial sets.

use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use super::sset::{SimplicialMap, TruncatedSSet};
use crate::error::{Error, Result};

/// The degenerate `n`-simplices, as the union of the images of all
/// degeneracies `X_{n-1} → X_n`. Sorted.
pub fn latching_by_degeneracies(x: &TruncatedSSet, n: usize) -> Result<Vec<usize>> {
    let flags = x.degenerate_flags(n)?;
    Ok(flags.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| i).collect())
}

/// Monotone surjections `[n] ↠ [p]` with `p < n`, by their values.
pub fn proper_surjections(n: usize) -> Vec<Vec<usize>> {
    // a surjection is fixed by the set of j with σ(j) = σ(j+1), nonempty here
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let mut values = vec![0; n + 1];
        for j in 0..n {
            values[j + 1] = values[j] + usize::from(mask & (1 << j) == 0);
        }
        out.push(values);
    }
    out.sort_by_key(|v| (std::cmp::Reverse(v[n]), v.clone()));
    out
}

/// The latching object computed as a colimit over the proper surjections
/// out of `[n]`, and its comparison with `X_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatchingColimit {
    pub level: usize,
    /// Number of equivalence classes of the colimit.
    pub classes: usize,
    /// Each class's members all have the same image in `X_n`.
    pub well_defined: bool,
    /// Distinct classes have distinct images.
    pub injective: bool,
    /// The image in `X_n`, sorted.
    pub image: Vec<usize>,
}

/// Builds `colim_{[n] ↠ [p], p < n} X_p` by union-find on the disjoint union
/// of the `X_p`, identifying `(σ', z)` with `(σ, ρ^* z)` whenever
/// `σ' = ρ σ`, and maps it to `X_n` by `(σ, z) ↦ σ^* z`.
pub fn latching_by_colimit(x: &TruncatedSSet, n: usize) -> Result<LatchingColimit> {
    x.check_level(n)?;
    let surjections = proper_surjections(n);
    let mut offsets = Vec::with_capacity(surjections.len() + 1);
    let mut total = 0;
    for s in &surjections {
        offsets.push(total);
        total += x.count(s[n]);
    }
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(parent: &mut [usize], mut a: usize) -> usize {
        while parent[a] != a {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        a
    }
    for (si, sigma) in surjections.iter().enumerate() {
        let p = sigma[n];
        for (ti, tau) in surjections.iter().enumerate() {
            let q = tau[n];
            if si == ti || q > p {
                continue;
            }
            // tau = rho sigma needs tau constant on the fibers of sigma
            let mut rho = vec![usize::MAX; p + 1];
            let factors = (0..=n).all(|j| {
                let r = &mut rho[sigma[j]];
                if *r == usize::MAX {
                    *r = tau[j];
                }
                *r == tau[j]
            });
            if !factors {
                continue;
            }
            for z in 0..x.count(q) {
                let pulled = x.apply_monotone(q, &rho, z)?;
                let a = find(&mut parent, offsets[ti] + z);
                let b = find(&mut parent, offsets[si] + pulled);
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut class_image: FxHashMap<usize, usize> = FxHashMap::default();
    let mut well_defined = true;
    for (si, sigma) in surjections.iter().enumerate() {
        let p = sigma[n];
        for z in 0..x.count(p) {
            let image = x.apply_monotone(p, sigma, z)?;
            let root = find(&mut parent, offsets[si] + z);
            let entry = class_image.entry(root).or_insert(image);
            well_defined &= *entry == image;
        }
    }
    let classes = class_image.len();
    let mut image: Vec<usize> = class_image.values().copied().collect();
    image.sort_unstable();
    image.dedup();
    Ok(LatchingColimit {
        level: n,
        classes,
        well_defined,
        injective: image.len() == classes,
        image,
    })
}

/// True when both latching computations agree at level `n`: the colimit
/// maps injectively onto exactly the degenerate simplices.
pub fn latching_agrees(x: &TruncatedSSet, n: usize) -> Result<bool> {
    let colim = latching_by_colimit(x, n)?;
    Ok(colim.well_defined && colim.injective && colim.image == latching_by_degeneracies(x, n)?)
}

/// The comma object `(X ↓ y)`: level `r` is the set of `(r+1)`-simplices
/// whose vertex 0 is `y`, with `d_i`, `s_i` acting as `d_{i+1}`, `s_{i+1}`.
#[derive(Clone, Debug)]
pub struct Comma {
    pub sset: TruncatedSSet,
    /// `ambient[r][z]` is the simplex of `X_{r+1}` behind `z`.
    pub ambient: Vec<Vec<usize>>,
}

pub fn comma(x: &TruncatedSSet, y: usize) -> Result<Comma> {
    if y >= x.count(0) {
        return Err(Error::NotAnObject(y));
    }
    if x.max_dim() == 0 {
        return Err(Error::LevelOutOfRange { level: 1, max_dim: 0 });
    }
    let d = x.max_dim() - 1;
    let mut ambient: Vec<Vec<usize>> = Vec::with_capacity(d + 1);
    let mut local: Vec<Vec<usize>> = Vec::with_capacity(d + 1);
    for r in 0..=d {
        let mut ids = vec![usize::MAX; x.count(r + 1)];
        let mut amb = Vec::new();
        for s in 0..x.count(r + 1) {
            if x.ultimate_target(r + 1, s) == y {
                ids[s] = amb.len();
                amb.push(s);
            }
        }
        ambient.push(amb);
        local.push(ids);
    }
    let mut faces = vec![Vec::new()];
    for r in 1..=d {
        faces.push(
            (0..=r)
                .map(|i| ambient[r].iter().map(|&s| local[r - 1][x.face(r + 1, i + 1, s)]).collect())
                .collect(),
        );
    }
    let mut degeneracies: Vec<Vec<Vec<usize>>> = (0..d)
        .map(|r| {
            (0..=r)
                .map(|i| ambient[r].iter().map(|&s| local[r + 1][x.degeneracy(r + 1, i + 1, s)]).collect())
                .collect()
        })
        .collect();
    degeneracies.push(Vec::new());
    let counts = ambient.iter().map(Vec::len).collect();
    let sset = TruncatedSSet::from_tables(counts, faces, degeneracies)?;
    Ok(Comma { sset, ambient })
}

/// Outcome of comparing `X_n` with the iterated fiber product of edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SegalReport {
    pub level: usize,
    pub simplices: usize,
    pub spine_tuples: u64,
    pub injective: bool,
    pub bijective: bool,
}

/// The Segal comparison `X_n → X_1 ×_{X_0} ⋯ ×_{X_0} X_1`.
pub fn segal_check(x: &TruncatedSSet, n: usize) -> Result<SegalReport> {
    segal_report(x, n, None)
}

/// The Segal comparison for a length-graded simplicial set: only spine
/// tuples whose edge weights sum to at most `bound` are compared. This is
/// the right target for nerves of length-bounded categories, whose higher
/// simplices are exactly the strings within the bound.
pub fn segal_check_graded(x: &TruncatedSSet, n: usize, weights: &[usize], bound: usize) -> Result<SegalReport> {
    if weights.len() != x.count(1.min(x.max_dim())) {
        return Err(Error::InvalidSimplicialSet("one weight per 1-simplex required".into()));
    }
    segal_report(x, n, Some((weights, bound)))
}

fn segal_report(x: &TruncatedSSet, n: usize, grading: Option<(&[usize], usize)>) -> Result<SegalReport> {
    x.check_level(n)?;
    if n <= 1 {
        let count = x.count(n);
        return Ok(SegalReport {
            level: n,
            simplices: count,
            spine_tuples: count as u64,
            injective: true,
            bijective: true,
        });
    }
    let (weights, bound) = match grading {
        Some((w, b)) => (w.to_vec(), b),
        None => (vec![0; x.count(1)], 0),
    };
    let head = |e: usize| x.face(1, 1, e);
    let tail = |e: usize| x.face(1, 0, e);
    // ways[e][w]: chains of the current length ending in e with weight w
    let mut ways: Vec<Vec<u64>> = (0..x.count(1))
        .map(|e| {
            let mut v = vec![0u64; bound + 1];
            if weights[e] <= bound {
                v[weights[e]] = 1;
            }
            v
        })
        .collect();
    for _ in 1..n {
        let mut at_vertex = vec![vec![0u64; bound + 1]; x.count(0)];
        for (e, w) in ways.iter().enumerate() {
            for (acc, &c) in at_vertex[tail(e)].iter_mut().zip(w) {
                *acc += c;
            }
        }
        ways = (0..x.count(1))
            .map(|e| {
                let mut v = vec![0u64; bound + 1];
                for (total, slot) in v.iter_mut().enumerate() {
                    if total >= weights[e] {
                        *slot = at_vertex[head(e)][total - weights[e]];
                    }
                }
                v
            })
            .collect();
    }
    let spine_tuples: u64 = ways.iter().flatten().sum();
    let mut seen = FxHashSet::default();
    let mut injective = true;
    let mut within = true;
    let mut spine = Vec::with_capacity(n);
    for s in 0..x.count(n) {
        spine.clear();
        for j in 1..=n {
            spine.push(x.apply_monotone(n, &[j - 1, j], s)?);
        }
        within &= spine.iter().map(|&e| weights[e]).sum::<usize>() <= bound;
        injective &= seen.insert(spine.clone());
    }
    Ok(SegalReport {
        level: n,
        simplices: x.count(n),
        spine_tuples,
        injective,
        bijective: injective && within && x.count(n) as u64 == spine_tuples,
    })
}

/// Comparison of one level of a commuting square of sets
///
/// ```text
///   A --top--> B
///   |          |
///  left      right
///   v          v
///   C -bottom-> D
/// ```
///
/// with the fiber product `B ×_D C`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PullbackLevel {
    pub level: usize,
    pub corner: usize,
    pub fiber_product: u64,
    pub injective: bool,
    pub bijective: bool,
    /// A colliding pair of corner elements or a missed fiber product
    /// element, when the comparison fails.
    pub witness: Option<String>,
}

/// Maps of a square of sets, each as a table.
#[derive(Clone, Copy, Debug)]
pub struct SetSquare<'a> {
    pub top: &'a [usize],
    pub left: &'a [usize],
    pub right: &'a [usize],
    pub bottom: &'a [usize],
    pub b_count: usize,
    pub c_count: usize,
    pub d_count: usize,
}

/// Compares one level. Fails with [`Error::NonCommutingSquare`] when the
/// square does not commute.
pub fn set_pullback(level: usize, sq: SetSquare<'_>) -> Result<PullbackLevel> {
    if sq.top.len() != sq.left.len() || sq.right.len() != sq.b_count || sq.bottom.len() != sq.c_count {
        return Err(Error::NonCommutingSquare(format!("table sizes disagree at level {level}")));
    }
    for a in 0..sq.top.len() {
        let (b, c) = (sq.top[a], sq.left[a]);
        if b >= sq.b_count || c >= sq.c_count || sq.right[b] != sq.bottom[c] {
            return Err(Error::NonCommutingSquare(format!("element {a} at level {level}")));
        }
    }
    let mut over_b = vec![0u64; sq.d_count];
    for &dv in sq.right {
        over_b[dv] += 1;
    }
    let mut over_c = vec![0u64; sq.d_count];
    for &dv in sq.bottom {
        over_c[dv] += 1;
    }
    let fiber_product: u64 = over_b.iter().zip(&over_c).map(|(x, y)| x * y).sum();
    let mut seen: FxHashMap<(usize, usize), usize> = FxHashMap::default();
    let mut witness = None;
    for a in 0..sq.top.len() {
        if let Some(prev) = seen.insert((sq.top[a], sq.left[a]), a) {
            witness.get_or_insert_with(|| format!("elements {prev} and {a} have the same image"));
        }
    }
    let injective = witness.is_none();
    let bijective = injective && sq.top.len() as u64 == fiber_product;
    if injective && !bijective {
        let mut c_over: Vec<Vec<usize>> = vec![Vec::new(); sq.d_count];
        for (c, &dv) in sq.bottom.iter().enumerate() {
            c_over[dv].push(c);
        }
        'search: for (b, &dv) in sq.right.iter().enumerate() {
            for &c in &c_over[dv] {
                if !seen.contains_key(&(b, c)) {
                    witness = Some(format!("pair ({b}, {c}) over {dv} is not hit"));
                    break 'search;
                }
            }
        }
    }
    Ok(PullbackLevel {
        level,
        corner: sq.top.len(),
        fiber_product,
        injective,
        bijective,
        witness,
    })
}

/// A square of simplicial maps `A → B → D`, `A → C → D`.
#[derive(Clone, Copy, Debug)]
pub struct SSetSquare<'a> {
    pub a: &'a TruncatedSSet,
    pub b: &'a TruncatedSSet,
    pub c: &'a TruncatedSSet,
    pub d: &'a TruncatedSSet,
    pub top: &'a SimplicialMap,
    pub left: &'a SimplicialMap,
    pub right: &'a SimplicialMap,
    pub bottom: &'a SimplicialMap,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PullbackReport {
    pub holds: bool,
    pub levels: Vec<PullbackLevel>,
}

/// Levelwise comparison of `A` with `B ×_D C` at levels `0..=levels`.
pub fn is_strict_pullback(sq: SSetSquare<'_>, levels: usize) -> Result<PullbackReport> {
    let mut out = Vec::with_capacity(levels + 1);
    for n in 0..=levels {
        for x in [sq.a, sq.b, sq.c, sq.d] {
            x.check_level(n)?;
        }
        out.push(set_pullback(
            n,
            SetSquare {
                top: sq.top.level(n),
                left: sq.left.level(n),
                right: sq.right.level(n),
                bottom: sq.bottom.level(n),
                b_count: sq.b.count(n),
                c_count: sq.c.count(n),
                d_count: sq.d.count(n),
            },
        )?);
    }
    Ok(PullbackReport {
        holds: out.iter().all(|l| l.bijective),
        levels: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scomb::category::{poset_category, slice_category, terminal_category};
    use crate::scomb::nerve::nerve;

    #[test]
    fn proper_surjection_counts() {
        assert_eq!(proper_surjections(0).len(), 0);
        assert_eq!(proper_surjections(1), vec![vec![0, 0]]);
        assert_eq!(proper_surjections(3).len(), 7);
    }

    #[test]
    fn latching_examples() {
        let p = nerve(&poset_category(2, |a, b| a <= b), 3).unwrap();
        assert!(latching_by_degeneracies(p.sset(), 0).unwrap().is_empty());
        assert_eq!(latching_by_degeneracies(p.sset(), 1).unwrap().len(), 2);
        let t = nerve(&terminal_category(), 3).unwrap();
        for n in 1..=3 {
            assert_eq!(latching_by_degeneracies(t.sset(), n).unwrap(), vec![0]);
        }
        for n in 0..=3 {
            assert!(latching_agrees(p.sset(), n).unwrap());
            assert!(latching_agrees(t.sset(), n).unwrap());
        }
    }

    #[test]
    fn comma_matches_slice_on_poset() {
        let c = poset_category(3, |a, b| a <= b);
        let x = nerve(&c, 3).unwrap();
        for y in 0..3 {
            let cm = comma(x.sset(), y).unwrap();
            let (slice, _, _) = slice_category(&c, y).unwrap();
            let ns = nerve(&slice, 2).unwrap();
            assert_eq!(cm.sset.counts(), ns.sset().counts());
        }
        // over the bottom object 0 only the identity arrives
        assert_eq!(comma(x.sset(), 0).unwrap().sset.count(0), 1);
        assert!(comma(x.sset(), 7).is_err());
    }

    #[test]
    fn segal_on_nerves_and_mutants() {
        let x = nerve(&poset_category(3, |a, b| a <= b), 3).unwrap();
        for n in 0..=3 {
            assert!(segal_check(x.sset(), n).unwrap().bijective);
        }
        // the only non-degenerate 2-simplex is 0 <- 1 <- 2
        let flags = x.sset().degenerate_flags(2).unwrap();
        let nd = flags.iter().position(|&f| !f).unwrap();
        let (mutant, _) = x.sset().remove_simplex(2, nd).unwrap();
        assert!(!segal_check(&mutant, 2).unwrap().bijective);
    }

    #[test]
    fn identity_square_is_a_pullback() {
        let x = nerve(&poset_category(2, |a, b| a <= b), 2).unwrap();
        let id = SimplicialMap::identity(x.sset());
        let sq = SSetSquare {
            a: x.sset(),
            b: x.sset(),
            c: x.sset(),
            d: x.sset(),
            top: &id,
            left: &id,
            right: &id,
            bottom: &id,
        };
        let r = is_strict_pullback(sq, 2).unwrap();
        assert!(r.holds);
    }

    #[test]
    fn non_commuting_square_is_an_error() {
        let r = set_pullback(
            0,
            SetSquare {
                top: &[0],
                left: &[0],
                right: &[0],
                bottom: &[1],
                b_count: 1,
                c_count: 1,
                d_count: 2,
            },
        );
        assert!(matches!(r, Err(Error::NonCommutingSquare(_))));
    }

    #[test]
    fn missing_element_is_reported() {
        let r = set_pullback(
            0,
            SetSquare {
                top: &[0],
                left: &[0],
                right: &[0, 0],
                bottom: &[0],
                b_count: 2,
                c_count: 1,
                d_count: 1,
            },
        )
        .unwrap();
        assert!(r.injective && !r.bijective);
        assert!(r.witness.unwrap().contains("(1, 0)"));
    }
}
