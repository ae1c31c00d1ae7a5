use std::path::PathBuf;
use std::process::{Command, Output};

use covcat::epicat::{enumerate_epifin_morphisms, enumerate_epifin_objects};
use serde_json::Value;

fn instance(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "instances", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn covcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_covcat"))
        .args(args)
        .env_remove("COVCAT_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn verify_epifin_closure_without_instance() {
    let out = covcat(&["verify", "epifin-closure"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["records"][0]["status"], "pass");
    assert_eq!(r["records"][0]["instance"], "-");
}

#[test]
fn verify_pullback_on_bundled_cover() {
    let c6 = instance("c6-c3.json");
    let out = covcat(&["verify", "config-fin-pullback", "-i", &c6, "--bounds", "2,1,2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rec = &json(&out)["records"][0];
    assert_eq!(rec["status"], "pass");
    assert_eq!(rec["bounds"]["k_max"], 2);
    assert!(rec["statement"].as_str().is_some_and(|s| !s.is_empty()));
}

#[test]
fn corrupted_fixture_fails_with_a_witness() {
    let bad = instance("c6-c3-corrupted.json");
    let out = covcat(&["verify", "config-fin-pullback", "-i", &bad, "--bounds", "2,1,2"]);
    assert_eq!(code(&out), 1);
    let rec = &json(&out)["records"][0];
    assert_eq!(rec["status"], "fail");
    let witness = rec["witness"].as_str().expect("witness present");
    assert!(witness.contains("simplex"), "{witness}");
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("not-json.json", "{"),
        ("no-total.json", r#"{"kind":"covering","payload":{},"bounds":{"k_max":1,"tick_max":1}}"#),
        ("zero.json", r#"{"kind":"tower","payload":{"stages":[]},"bounds":{"k_max":0,"tick_max":1}}"#),
        ("extra.json", r#"{"kind":"tower","payload":{"stages":[]},"bounds":{"k_max":1,"tick_max":1},"x":1}"#),
        (
            "not-a-cover.json",
            r#"{"kind":"covering","bounds":{"k_max":1,"tick_max":1},"payload":{
                "total":{"vertices":[0,1],"edges":[[0,1]]},"base":{"vertices":[0],"edges":[[0,0]]},
                "vertex_map":[0,0],"edge_map":[0]}}"#,
        ),
    ];
    for (name, text) in cases {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        let out = covcat(&["verify", "-i", p.to_str().unwrap()]);
        assert_eq!(code(&out), 2, "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty(), "{name}");
    }
    assert_eq!(code(&covcat(&["verify", "no-such-check"])), 2);
    assert_eq!(code(&covcat(&["verify", "strata"])), 2);
    assert_eq!(code(&covcat(&["verify", "-i", "/nonexistent.json"])), 2);
    assert_eq!(code(&covcat(&["verify", "epifin-closure", "--bounds", "2,1"])), 2);
    assert_eq!(code(&covcat(&["enumerate", "epifin-morphisms", "2->1:[1,2]", "1->1:[1]"])), 2);
}

#[test]
fn enumerate_selfic_4_2() {
    let out = covcat(&["enumerate", "selfic", "4", "2"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["count"], 7);
    assert_eq!(v["items"].as_array().unwrap().len(), 7);
}

#[test]
fn enumerate_strata_of_c6_over_c3() {
    let out = covcat(&["enumerate", "strata", "-i", &instance("c6-c3.json"), "--k", "2"]);
    assert_eq!(code(&out), 0);
    let census = &json(&out)["censuses"][0];
    let counts = census["counts"].as_object().unwrap();
    assert_eq!(counts.len(), 2);
    assert_eq!(counts["2->2:[1,2]"], 24);
    assert_eq!(counts["2->1:[1,1]"], 6);
}

#[test]
fn enumerate_deck_of_c12_over_c3() {
    let out = covcat(&["enumerate", "deck", "-i", &instance("c12-c3.json")]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["count"], 4);
}

#[test]
fn enumerate_mapcov_and_tower_strata() {
    let out = covcat(&["enumerate", "mapcov", "-i", &instance("mapcov-c6-c3.json")]);
    assert_eq!(code(&out), 0);
    // the rotation of C3 lifts to the two rotations of C6 by an odd step
    assert_eq!(json(&out)["count"], 2);

    let out = covcat(&["enumerate", "strata", "-i", &instance("tower-c12-c6-c3.json")]);
    assert_eq!(code(&out), 0);
    let totals: Vec<u64> = json(&out)["censuses"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["total"].as_u64().unwrap())
        .collect();
    // ordered configurations of k points in C12
    assert_eq!(totals, [1, 12, 132, 1320]);
}

#[test]
fn nerve_levels_match_epifin_enumeration() {
    let out = covcat(&["nerve", "epifin", "--bounds", "2,1,2"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let sizes: Vec<usize> = v["levels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["simplices"].as_array().unwrap().len())
        .collect();

    let objects = enumerate_epifin_objects(2);
    let hom = |a: usize, b: usize| enumerate_epifin_morphisms(&objects[a], &objects[b]).len();
    let n = objects.len();
    let arrows: usize = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| hom(a, b)).sum();
    // composable pairs counted through their middle object
    let pairs: usize = (0..n)
        .map(|m| (0..n).map(|a| hom(a, m)).sum::<usize>() * (0..n).map(|b| hom(m, b)).sum::<usize>())
        .sum();
    assert_eq!(sizes, [n, arrows, pairs]);
    assert_eq!(v["levels"][0]["labels"].as_array().unwrap().len(), n);
}

#[test]
fn nerve_dot_and_depth_zero() {
    let c3 = r#"{"kind":"covering","bounds":{"k_max":2,"tick_max":1},"payload":{
        "total":{"vertices":[0,1,2],"edges":[[0,1],[1,2],[2,0]]},
        "base":{"vertices":[0,1,2],"edges":[[0,1],[1,2],[2,0]]},
        "vertex_map":[0,1,2],"edge_map":[0,1,2]}}"#;
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c3.json");
    std::fs::write(&p, c3).unwrap();
    let p = p.to_str().unwrap();

    let dot_path = dir.path().join("c3.dot");
    let out = covcat(&["nerve", "config-base", "-i", p, "--format", "dot", "-o", dot_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let dot = std::fs::read_to_string(dot_path).unwrap();
    assert!(dot.starts_with("digraph"));
    // 1 + 3 + 6 configurations of at most two points in C3
    assert_eq!(dot.lines().filter(|l| l.contains("[label=") && !l.contains("->")).count(), 10);
    assert!(dot.contains("->"));

    let out = covcat(&["nerve", "config-base", "-i", p, "--depth", "0"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["max_dim"], 0);
    assert_eq!(v["levels"].as_array().unwrap().len(), 1);
    assert_eq!(v["levels"][0]["simplices"].as_array().unwrap().len(), 10);

    assert_eq!(code(&covcat(&["nerve", "config-base", "-i", p, "--format", "svg"])), 2);
    assert_eq!(code(&covcat(&["enumerate", "--format", "dot", "selfic", "3", "2"])), 2);
    assert_eq!(code(&covcat(&["verify", "--format", "dot"])), 2);
}

#[test]
fn reports_are_reproducible() {
    let c4 = instance("c4-c2.json");
    let run = |jobs: &str, seed: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_covcat"))
            .args(["verify", "-i", &c4, "--bounds", "2,1,2", "--jobs", jobs])
            .env("COVCAT_SEED", seed)
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
        json(&out)["records"].clone()
    };
    let first = run("1", "0");
    assert_eq!(first, run("1", "0"));
    assert_eq!(first, run("3", "17"));
}

#[test]
fn exhausted_budget_is_inconclusive() {
    let out = covcat(&["verify", "-i", &instance("c6-c3.json"), "--budget", "0"]);
    assert_eq!(code(&out), 1);
    let records = json(&out)["records"].as_array().unwrap().clone();
    assert!(!records.is_empty());
    assert!(records.iter().all(|r| r["status"] != "fail"));
    assert!(records.iter().any(|r| r["status"] == "inconclusive"));
}

#[test]
fn lift_follows_the_fiber() {
    let out = covcat(&["lift", "-i", &instance("c6-c3.json"), "--path", "1:1,2,0"]);
    assert_eq!(code(&out), 0);
    let lifts = json(&out)["lifts"].as_array().unwrap().clone();
    let ends: Vec<(u64, u64)> = lifts
        .iter()
        .map(|l| (l["start"].as_u64().unwrap(), l["end"].as_u64().unwrap()))
        .collect();
    // once around C3 moves three steps along C6
    assert_eq!(ends, [(1, 4), (4, 1)]);
    assert_eq!(code(&covcat(&["lift", "-i", &instance("c6-c3.json"), "--path", "1:0"])), 2);
}

#[test]
fn report_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("report.json");
    let out = covcat(&["verify", "epifin-closure", "-o", p.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
    assert_eq!(v["records"][0]["check"], "epifin-closure");
}
