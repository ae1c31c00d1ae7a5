//! JSON and DOT renderings of truncated simplicial sets.

use std::fmt::Write;

use serde::Serialize;

use super::sset::TruncatedSSet;

#[derive(Clone, Debug, Serialize)]
pub struct LevelExport {
    pub level: usize,
    pub simplices: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    /// `faces[i][x]` is `d_i x`.
    pub faces: Vec<Vec<usize>>,
    /// `degeneracies[i][x]` is `s_i x`; empty at the top level.
    pub degeneracies: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SSetExport {
    pub max_dim: usize,
    pub levels: Vec<LevelExport>,
}

/// The full operator tables, optionally with a label per simplex.
pub fn export(x: &TruncatedSSet, label: Option<&dyn Fn(usize, usize) -> String>) -> SSetExport {
    let d = x.max_dim();
    SSetExport {
        max_dim: d,
        levels: (0..=d)
            .map(|n| LevelExport {
                level: n,
                simplices: (0..x.count(n)).collect(),
                labels: label.map(|l| (0..x.count(n)).map(|s| l(n, s)).collect()),
                faces: if n == 0 {
                    Vec::new()
                } else {
                    (0..=n).map(|i| x.face_table(n, i).to_vec()).collect()
                },
                degeneracies: if n == d {
                    Vec::new()
                } else {
                    (0..=n).map(|i| x.degeneracy_table(n, i).to_vec()).collect()
                },
            })
            .collect(),
    }
}

pub fn to_json(x: &TruncatedSSet, label: Option<&dyn Fn(usize, usize) -> String>) -> String {
    serde_json::to_string_pretty(&export(x, label)).expect("export is plain data")
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// The 1-skeleton as a DOT digraph: one node per 0-simplex and one arrow
/// `d_0 e → d_1 e` per non-degenerate 1-simplex `e`.
pub fn to_dot(x: &TruncatedSSet, label: &dyn Fn(usize, usize) -> String) -> String {
    let mut out = String::from("digraph skeleton {\n");
    for v in 0..x.count(0) {
        writeln!(out, "  v{v} [label={}];", quote(&label(0, v))).unwrap();
    }
    if x.max_dim() >= 1 {
        let degenerate = x.degenerate_flags(1).expect("level 1 stored");
        for (e, &deg) in degenerate.iter().enumerate() {
            if !deg {
                writeln!(
                    out,
                    "  v{} -> v{} [label={}];",
                    x.face(1, 0, e),
                    x.face(1, 1, e),
                    quote(&label(1, e))
                )
                .unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scomb::category::poset_category;
    use crate::scomb::nerve::nerve;

    #[test]
    fn json_has_every_level() {
        let x = nerve(&poset_category(2, |a, b| a <= b), 2).unwrap();
        let v: serde_json::Value = serde_json::from_str(&to_json(x.sset(), None)).unwrap();
        assert_eq!(v["levels"].as_array().unwrap().len(), 3);
        assert_eq!(v["levels"][2]["simplices"].as_array().unwrap().len(), 4);
        assert_eq!(v["levels"][1]["faces"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn dot_lists_nondegenerate_edges() {
        let x = nerve(&poset_category(2, |a, b| a <= b), 1).unwrap();
        let dot = to_dot(x.sset(), &|n, s| format!("{n}:{s}"));
        assert_eq!(dot.matches("->").count(), 1);
        assert!(dot.contains("v0 [label=\"0:0\"]"));
    }
}
