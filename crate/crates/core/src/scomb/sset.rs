//! Truncated simplicial sets stored as operator tables, and maps between
//! them.

use serde::Serialize;

use crate::error::{Error, Result};

/// A simplicial set truncated at `max_dim`, with simplices interned as
/// `0..count(n)` at each level.
///
/// `faces[n][i][x]` is `d_i x` for `x ∈ X_n` (`n ≥ 1`, `0 ≤ i ≤ n`) and
/// `degeneracies[n][i][x]` is `s_i x` for `x ∈ X_n` (`n < max_dim`,
/// `0 ≤ i ≤ n`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TruncatedSSet {
    counts: Vec<usize>,
    faces: Vec<Vec<Vec<usize>>>,
    degeneracies: Vec<Vec<Vec<usize>>>,
}

impl TruncatedSSet {
    /// Builds from operator tables and runs the full validator.
    pub fn from_tables(
        counts: Vec<usize>,
        faces: Vec<Vec<Vec<usize>>>,
        degeneracies: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        let x = Self::from_tables_unchecked(counts, faces, degeneracies)?;
        x.validate()?;
        Ok(x)
    }

    /// Checks table shapes and ranges only; the simplicial identities are
    /// left to [`TruncatedSSet::validate`].
    pub(crate) fn from_tables_unchecked(
        counts: Vec<usize>,
        faces: Vec<Vec<Vec<usize>>>,
        degeneracies: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidSimplicialSet(m));
        if counts.is_empty() {
            return bad("no levels".into());
        }
        let d = counts.len() - 1;
        if faces.len() != d + 1 || degeneracies.len() != d + 1 {
            return bad("operator tables do not cover every level".into());
        }
        if !faces[0].is_empty() || !degeneracies[d].is_empty() {
            return bad("operators stored outside their range".into());
        }
        for n in 1..=d {
            if faces[n].len() != n + 1 {
                return bad(format!("level {n} needs {} face tables", n + 1));
            }
            for (i, table) in faces[n].iter().enumerate() {
                if table.len() != counts[n] || table.iter().any(|&y| y >= counts[n - 1]) {
                    return bad(format!("face d_{i} on level {n} is not a total map"));
                }
            }
        }
        for n in 0..d {
            if degeneracies[n].len() != n + 1 {
                return bad(format!("level {n} needs {} degeneracy tables", n + 1));
            }
            for (i, table) in degeneracies[n].iter().enumerate() {
                if table.len() != counts[n] || table.iter().any(|&y| y >= counts[n + 1]) {
                    return bad(format!("degeneracy s_{i} on level {n} is not a total map"));
                }
            }
        }
        Ok(TruncatedSSet {
            counts,
            faces,
            degeneracies,
        })
    }

    pub fn max_dim(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn count(&self, n: usize) -> usize {
        self.counts[n]
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn face(&self, n: usize, i: usize, x: usize) -> usize {
        self.faces[n][i][x]
    }

    pub fn degeneracy(&self, n: usize, i: usize, x: usize) -> usize {
        self.degeneracies[n][i][x]
    }

    pub fn face_table(&self, n: usize, i: usize) -> &[usize] {
        &self.faces[n][i]
    }

    pub fn degeneracy_table(&self, n: usize, i: usize) -> &[usize] {
        &self.degeneracies[n][i]
    }

    pub(crate) fn check_level(&self, n: usize) -> Result<()> {
        if n > self.max_dim() {
            Err(Error::LevelOutOfRange {
                level: n,
                max_dim: self.max_dim(),
            })
        } else {
            Ok(())
        }
    }

    /// Checks every simplicial identity on the stored range.
    pub fn validate(&self) -> Result<()> {
        let d = self.max_dim();
        let fail = |what: String| Err(Error::InvalidSimplicialSet(what));
        for n in 2..=d {
            for j in 1..=n {
                for i in 0..j {
                    for x in 0..self.counts[n] {
                        let lhs = self.face(n - 1, i, self.face(n, j, x));
                        let rhs = self.face(n - 1, j - 1, self.face(n, i, x));
                        if lhs != rhs {
                            return fail(format!("d_{i} d_{j} != d_{} d_{i} on X_{n} at {x}", j - 1));
                        }
                    }
                }
            }
        }
        for n in 0..d {
            for j in 0..=n {
                for x in 0..self.counts[n] {
                    let sx = self.degeneracy(n, j, x);
                    for i in 0..=n + 1 {
                        let lhs = self.face(n + 1, i, sx);
                        let rhs = if i < j {
                            self.degeneracy(n - 1, j - 1, self.face(n, i, x))
                        } else if i == j || i == j + 1 {
                            x
                        } else {
                            self.degeneracy(n - 1, j, self.face(n, i - 1, x))
                        };
                        if lhs != rhs {
                            return fail(format!("d_{i} s_{j} identity fails on X_{n} at {x}"));
                        }
                    }
                }
            }
        }
        for n in 0..d.saturating_sub(1) {
            for j in 0..=n {
                for i in 0..=j {
                    for x in 0..self.counts[n] {
                        let lhs = self.degeneracy(n + 1, i, self.degeneracy(n, j, x));
                        let rhs = self.degeneracy(n + 1, j + 1, self.degeneracy(n, i, x));
                        if lhs != rhs {
                            return fail(format!("s_{i} s_{j} != s_{} s_{i} on X_{n} at {x}", j + 1));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies the operator induced by a monotone map `θ: [m] → [n]`, given
    /// by its values, to `x ∈ X_n`.
    ///
    /// `θ` factors as a surjection followed by an injection; the injection
    /// acts by the faces at the missing indices (largest first) and the
    /// surjection by degeneracies at the indices where it repeats a value
    /// (smallest first).
    pub fn apply_monotone(&self, n: usize, theta: &[usize], x: usize) -> Result<usize> {
        self.check_level(n)?;
        let m = theta
            .len()
            .checked_sub(1)
            .ok_or_else(|| Error::InvalidSimplicialSet("empty operator".into()))?;
        self.check_level(m)?;
        if theta.windows(2).any(|w| w[0] > w[1]) || theta.iter().any(|&v| v > n) {
            return Err(Error::InvalidSimplicialSet(format!("{theta:?} is not a monotone map into [{n}]")));
        }
        let mut image: Vec<usize> = theta.to_vec();
        image.dedup();
        let mut level = n;
        let mut y = x;
        for i in (0..=n).rev() {
            if image.binary_search(&i).is_err() {
                y = self.face(level, i, y);
                level -= 1;
            }
        }
        for j in 0..m {
            if theta[j] == theta[j + 1] {
                y = self.degeneracy(level, j, y);
                level += 1;
            }
        }
        debug_assert_eq!(level, m);
        Ok(y)
    }

    /// The `j`-th vertex of `x ∈ X_n`.
    pub fn vertex(&self, n: usize, x: usize, j: usize) -> usize {
        self.apply_monotone(n, &[j], x).expect("vertex index in range")
    }

    /// The composite `d_1 d_2 ⋯ d_n`, which keeps vertex 0.
    pub fn ultimate_target(&self, n: usize, x: usize) -> usize {
        let mut y = x;
        for level in (1..=n).rev() {
            y = self.face(level, 1, y);
        }
        y
    }

    /// True when `x ∈ X_n` lies in the image of some degeneracy.
    pub fn degenerate_flags(&self, n: usize) -> Result<Vec<bool>> {
        self.check_level(n)?;
        let mut flags = vec![false; self.counts[n]];
        if n > 0 {
            for table in &self.degeneracies[n - 1] {
                for &y in table {
                    flags[y] = true;
                }
            }
        }
        Ok(flags)
    }

    /// The sub-simplicial set on the simplices flagged in `keep`, which
    /// must be closed under all stored operators, together with its
    /// inclusion.
    pub fn subobject(&self, keep: &[Vec<bool>]) -> Result<(TruncatedSSet, SimplicialMap)> {
        let d = self.max_dim();
        if keep.len() != d + 1 || (0..=d).any(|n| keep[n].len() != self.counts[n]) {
            return Err(Error::InvalidSimplicialSet("subobject mask has the wrong shape".into()));
        }
        let mut new_id = Vec::with_capacity(d + 1);
        let mut inclusion = Vec::with_capacity(d + 1);
        for mask in keep {
            let mut ids = vec![usize::MAX; mask.len()];
            let mut inc = Vec::new();
            for (x, &k) in mask.iter().enumerate() {
                if k {
                    ids[x] = inc.len();
                    inc.push(x);
                }
            }
            new_id.push(ids);
            inclusion.push(inc);
        }
        let restrict = |table: &[usize], from: usize, to: usize| -> Result<Vec<usize>> {
            inclusion[from]
                .iter()
                .map(|&x| {
                    let y = new_id[to][table[x]];
                    if y == usize::MAX {
                        Err(Error::InvalidSimplicialSet(format!(
                            "subobject not closed: simplex {x} of level {from} leaves it"
                        )))
                    } else {
                        Ok(y)
                    }
                })
                .collect()
        };
        let mut faces = vec![Vec::new()];
        for n in 1..=d {
            faces.push(
                (0..=n)
                    .map(|i| restrict(&self.faces[n][i], n, n - 1))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        let mut degeneracies = Vec::new();
        for n in 0..d {
            degeneracies.push(
                (0..=n)
                    .map(|i| restrict(&self.degeneracies[n][i], n, n + 1))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        degeneracies.push(Vec::new());
        let counts = inclusion.iter().map(Vec::len).collect();
        let sub = TruncatedSSet::from_tables_unchecked(counts, faces, degeneracies)?;
        Ok((sub, SimplicialMap::new(inclusion)))
    }

    /// Removes a non-degenerate simplex together with every simplex having
    /// it as an iterated face. Used to build corrupted fixtures.
    pub fn remove_simplex(&self, n: usize, x: usize) -> Result<(TruncatedSSet, SimplicialMap)> {
        self.check_level(n)?;
        if x >= self.counts[n] {
            return Err(Error::InvalidSimplicialSet(format!("no simplex {x} at level {n}")));
        }
        if self.degenerate_flags(n)?[x] {
            return Err(Error::InvalidSimplicialSet(format!(
                "simplex {x} at level {n} is degenerate and cannot be removed alone"
            )));
        }
        let mut keep: Vec<Vec<bool>> = self.counts.iter().map(|&c| vec![true; c]).collect();
        keep[n][x] = false;
        for level in n + 1..=self.max_dim() {
            for y in 0..self.counts[level] {
                if (0..=level).any(|i| !keep[level - 1][self.face(level, i, y)]) {
                    keep[level][y] = false;
                }
            }
        }
        self.subobject(&keep)
    }

    /// The levelwise product, with `(x, y)` stored as `x * |Y_n| + y`.
    pub fn product(&self, other: &TruncatedSSet) -> TruncatedSSet {
        let d = self.max_dim().min(other.max_dim());
        let counts: Vec<usize> = (0..=d).map(|n| self.counts[n] * other.counts[n]).collect();
        let pair = |n: usize, a: usize, b: usize| a * other.counts[n] + b;
        let mut faces = vec![Vec::new()];
        for n in 1..=d {
            faces.push(
                (0..=n)
                    .map(|i| {
                        (0..counts[n])
                            .map(|z| {
                                let (a, b) = (z / other.counts[n], z % other.counts[n]);
                                pair(n - 1, self.face(n, i, a), other.face(n, i, b))
                            })
                            .collect()
                    })
                    .collect(),
            );
        }
        let mut degeneracies: Vec<Vec<Vec<usize>>> = (0..d)
            .map(|n| {
                (0..=n)
                    .map(|i| {
                        (0..counts[n])
                            .map(|z| {
                                let (a, b) = (z / other.counts[n], z % other.counts[n]);
                                pair(n + 1, self.degeneracy(n, i, a), other.degeneracy(n, i, b))
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        degeneracies.push(Vec::new());
        TruncatedSSet {
            counts,
            faces,
            degeneracies,
        }
    }

    /// Keeps levels `0..=d`.
    pub fn truncate(&self, d: usize) -> Result<TruncatedSSet> {
        self.check_level(d)?;
        let mut faces = self.faces[..=d].to_vec();
        let mut degeneracies = self.degeneracies[..d].to_vec();
        degeneracies.push(Vec::new());
        faces.truncate(d + 1);
        Ok(TruncatedSSet {
            counts: self.counts[..=d].to_vec(),
            faces,
            degeneracies,
        })
    }
}

/// A levelwise map of truncated simplicial sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimplicialMap {
    levels: Vec<Vec<usize>>,
}

impl SimplicialMap {
    pub fn new(levels: Vec<Vec<usize>>) -> Self {
        SimplicialMap { levels }
    }

    pub fn identity(x: &TruncatedSSet) -> Self {
        SimplicialMap {
            levels: x.counts.iter().map(|&c| (0..c).collect()).collect(),
        }
    }

    pub fn max_dim(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> &[usize] {
        &self.levels[n]
    }

    pub fn apply(&self, n: usize, x: usize) -> usize {
        self.levels[n][x]
    }

    /// Checks totality and commutation with every stored face and
    /// degeneracy.
    pub fn validate(&self, dom: &TruncatedSSet, cod: &TruncatedSSet) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidSimplicialMap(m));
        let d = dom.max_dim().min(cod.max_dim());
        if self.levels.len() != d + 1 {
            return fail(format!("expected {} levels, found {}", d + 1, self.levels.len()));
        }
        for n in 0..=d {
            if self.levels[n].len() != dom.count(n) || self.levels[n].iter().any(|&y| y >= cod.count(n)) {
                return fail(format!("level {n} is not a total map"));
            }
        }
        for n in 1..=d {
            for i in 0..=n {
                for x in 0..dom.count(n) {
                    if self.apply(n - 1, dom.face(n, i, x)) != cod.face(n, i, self.apply(n, x)) {
                        return fail(format!("does not commute with d_{i} at level {n}, simplex {x}"));
                    }
                }
            }
        }
        for n in 0..d {
            for i in 0..=n {
                for x in 0..dom.count(n) {
                    if self.apply(n + 1, dom.degeneracy(n, i, x)) != cod.degeneracy(n, i, self.apply(n, x)) {
                        return fail(format!("does not commute with s_{i} at level {n}, simplex {x}"));
                    }
                }
            }
        }
        Ok(())
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &SimplicialMap) -> SimplicialMap {
        let d = self.max_dim().min(next.max_dim());
        SimplicialMap {
            levels: (0..=d)
                .map(|n| self.levels[n].iter().map(|&x| next.apply(n, x)).collect())
                .collect(),
        }
    }

    /// True when every level is a bijection onto `cod`.
    pub fn is_isomorphism(&self, cod: &TruncatedSSet) -> bool {
        self.levels.iter().enumerate().all(|(n, level)| {
            if level.len() != cod.count(n) {
                return false;
            }
            let mut hit = vec![false; cod.count(n)];
            level.iter().all(|&y| !std::mem::replace(&mut hit[y], true))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The standard 1-simplex truncated at level 2 (monotone maps into [1]).
    pub(crate) fn delta1() -> TruncatedSSet {
        // X_0: [0],[1]; X_1: 00,01,11; X_2: 000,001,011,111
        let counts = vec![2, 3, 4];
        let faces = vec![
            vec![],
            vec![vec![0, 1, 1], vec![0, 0, 1]],
            vec![vec![0, 1, 2, 2], vec![0, 1, 1, 2], vec![0, 0, 1, 2]],
        ];
        let degeneracies = vec![
            vec![vec![0, 2]],
            vec![vec![0, 1, 3], vec![0, 2, 3]],
            vec![],
        ];
        TruncatedSSet::from_tables(counts, faces, degeneracies).unwrap()
    }

    #[test]
    fn standard_simplex_validates() {
        let x = delta1();
        assert_eq!(x.counts(), &[2, 3, 4]);
        assert_eq!(x.degenerate_flags(1).unwrap(), vec![true, false, true]);
    }

    #[test]
    fn broken_identity_is_caught() {
        let x = delta1();
        let mut faces = x.faces.clone();
        faces[1][0] = vec![1, 1, 1];
        let r = TruncatedSSet::from_tables(x.counts.clone(), faces, x.degeneracies.clone());
        assert!(matches!(r, Err(Error::InvalidSimplicialSet(_))));
    }

    #[test]
    fn monotone_operators_on_simplex() {
        let x = delta1();
        // the edge 01 pulled back along [2] -> [1], (0,0,1) is 001
        assert_eq!(x.apply_monotone(1, &[0, 0, 1], 1).unwrap(), 1);
        assert_eq!(x.apply_monotone(1, &[0, 1, 1], 1).unwrap(), 2);
        assert_eq!(x.apply_monotone(2, &[0, 2], 1).unwrap(), 1);
        assert_eq!(x.vertex(2, 2, 0), 0);
        assert_eq!(x.vertex(2, 2, 2), 1);
        assert!(x.apply_monotone(1, &[1, 0], 1).is_err());
    }

    #[test]
    fn product_and_removal() {
        let x = delta1();
        let p = x.product(&x);
        p.validate().unwrap();
        assert_eq!(p.counts(), &[4, 9, 16]);
        let (sub, inc) = x.remove_simplex(1, 1).unwrap();
        sub.validate().unwrap();
        inc.validate(&sub, &x).unwrap();
        assert_eq!(sub.counts(), &[2, 2, 2]);
        assert!(x.remove_simplex(1, 0).is_err());
    }

    #[test]
    fn map_validation() {
        let x = delta1();
        let id = SimplicialMap::identity(&x);
        id.validate(&x, &x).unwrap();
        assert!(id.is_isomorphism(&x));
        let constant = SimplicialMap::new(vec![vec![0, 0], vec![0, 0, 0], vec![0, 0, 0, 0]]);
        constant.validate(&x, &x).unwrap();
        assert!(!constant.is_isomorphism(&x));
        let broken = SimplicialMap::new(vec![vec![0, 1], vec![0, 0, 2], vec![0, 1, 2, 3]]);
        assert!(broken.validate(&x, &x).is_err());
    }
}
