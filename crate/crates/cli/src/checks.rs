//! The check registry and the runners behind each id.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::mpsc;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::{Duration, Instant};

use anyhow::{bail, Result};
use covcat::confcat::determinacy::check_determinacy;
use covcat::confcat::local::check_config_loc;
use covcat::confcat::squares::{config_fin_square, reference_square};
use covcat::confcat::strata::{object_recount, strata_census, tower_census};
use covcat::confcat::Bounds;
use covcat::epicat::check_epifin_category;
use covcat::graphcov::{all_graph_maps, check_unique_lifting, enumerate_mapcov, is_fiberwise_injective};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::instance::{InstanceSpec, Payload};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Entry {
    pub id: String,
    pub statement: String,
    pub operation: String,
    /// Instance kind the check needs, or `none`.
    pub input: String,
}

pub fn registry() -> &'static [Entry] {
    static REGISTRY: OnceLock<Vec<Entry>> = OnceLock::new();
    REGISTRY.get_or_init(|| serde_json::from_str(include_str!("registry.json")).expect("embedded registry parses"))
}

pub fn entry(id: &str) -> Option<&'static Entry> {
    registry().iter().find(|e| e.id == id)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub check: String,
    pub statement: String,
    pub instance: String,
    pub bounds: Option<Bounds>,
    pub status: Status,
    pub witness: Option<String>,
    pub details: Value,
}

/// Wall times sit apart from the records so that records compare equal
/// across runs.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub records: Vec<Record>,
    pub wall_ms: BTreeMap<String, u64>,
    pub seed: u64,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.status == Status::Pass)
    }
}

/// `epifin-closure` without an instance runs at this card bound.
pub const DEFAULT_CLOSURE_CARD: usize = 3;

struct Outcome {
    holds: bool,
    witness: Option<String>,
    details: Value,
}

fn outcome(holds: bool, witness: Option<String>, details: impl Serialize) -> Result<Outcome> {
    Ok(Outcome {
        holds,
        witness: if holds { None } else { witness },
        details: serde_json::to_value(details)?,
    })
}

/// A check is applicable when its input kind matches the instance.
pub fn applicable(e: &Entry, instance: Option<&InstanceSpec>) -> bool {
    match (e.input.as_str(), instance) {
        ("none", _) => true,
        (kind, Some(i)) => i.kind().as_str() == kind,
        (_, None) => false,
    }
}

fn run_one(id: &str, instance: Option<&InstanceSpec>, bounds: Option<Bounds>) -> Result<Outcome> {
    let b = bounds.unwrap_or(Bounds::new(DEFAULT_CLOSURE_CARD, 1, 1));
    let covering = || instance.and_then(|i| i.covering()).expect("applicability checked");
    match id {
        "epifin-closure" => {
            let r = check_epifin_category(b.k_max);
            outcome(r.holds(), Some(format!("{r:?}")), r)
        }
        "lifting-uniqueness" => {
            let r = check_unique_lifting(covering(), b.tick_max);
            outcome(r.holds(), r.witness.clone(), r)
        }
        "config-fin-pullback" => {
            let sq = config_fin_square(covering(), b)?;
            let r = match instance.and_then(|i| i.mutation) {
                Some(m) => sq.check_mutated(m)?,
                None => sq.check()?,
            };
            let witness = r.levels.iter().find(|l| !l.bijective).map(|l| {
                format!("level {}: {}", l.level, l.witness.clone().unwrap_or_else(|| "not bijective".into()))
            });
            outcome(r.holds, witness, r)
        }
        "ultimate-target-pullback" => {
            let levels = reference_square(covering(), b)?.ultimate_target_squares()?;
            let bad = levels.iter().find(|l| !l.bijective);
            let witness = bad.map(|l| format!("level {}: {}", l.level, l.witness.clone().unwrap_or_default()));
            outcome(bad.is_none(), witness, levels)
        }
        "determinacy" => {
            let r = check_determinacy(covering(), b.k_max, b.tick_max);
            outcome(r.holds(), r.witness.clone(), r)
        }
        "strata" => {
            let pi = covering();
            let censuses: Vec<_> = (0..=b.k_max).map(|k| strata_census(pi, k)).collect();
            let recount = object_recount(pi, b.k_max);
            let labels_ok = censuses
                .iter()
                .all(|c| c.entries.iter().all(|e| e.label.source_card() == c.k));
            let holds = labels_ok && recount.by_stratum == recount.cover_objects;
            let witness = format!("strata recount {} objects of {}", recount.by_stratum, recount.cover_objects);
            outcome(holds, Some(witness), json!({ "censuses": censuses, "recount": recount }))
        }
        "tower-strata" => {
            let Some(Payload::Tower(t)) = instance.map(|i| &i.payload) else {
                unreachable!("applicability checked")
            };
            let mut censuses = Vec::new();
            for k in 0..=b.k_max {
                censuses.push(tower_census(t, k)?);
            }
            let bad = censuses
                .iter()
                .find_map(|c| c.entries.iter().find(|e| e.label.cards()[2] != c.k).map(|e| e.label.to_string()));
            outcome(bad.is_none(), bad.map(|l| format!("label {l} has the wrong top card")), censuses)
        }
        "loc-lift" => {
            let r = check_config_loc(covering(), b)?;
            let holds = r.lift_total && r.lift_bijective && r.lift_simplicial;
            outcome(holds, r.witness.clone(), r)
        }
        "loc-decomposition" => {
            let r = check_config_loc(covering(), b)?;
            let holds = r.label_preserving && r.forget_injective && r.forget_label_preserving && r.counts == r.base_counts;
            outcome(holds, r.witness.clone(), r)
        }
        "mapcov-fibers" => {
            let Some(Payload::MapLift(m)) = instance.map(|i| &i.payload) else {
                unreachable!("applicability checked")
            };
            let got = enumerate_mapcov(&m.pi_l, &m.pi_m, &m.f)?;
            let over_f: BTreeSet<_> = all_graph_maps(m.pi_l.total(), m.pi_m.total())
                .into_iter()
                .filter(|g| g.then(m.pi_m.proj()) == m.pi_l.proj().then(&m.f) && is_fiberwise_injective(&m.pi_l, g))
                .collect();
            let holds = got.iter().cloned().collect::<BTreeSet<_>>() == over_f && got.len() == over_f.len();
            let witness = format!("{} lifts enumerated, {} found by brute force", got.len(), over_f.len());
            outcome(holds, Some(witness), json!({ "lifts": got, "count": got.len() }))
        }
        other => bail!("no runner for check {other:?}"),
    }
}

pub struct Job {
    pub check: &'static Entry,
    pub instance: Option<Arc<InstanceSpec>>,
    pub bounds: Option<Bounds>,
}

impl Job {
    fn label(&self) -> String {
        match &self.instance {
            Some(i) => format!("{}@{}", self.check.id, i.name),
            None => self.check.id.clone(),
        }
    }
}

/// Runs the jobs on `jobs` worker threads in a seeded order. Jobs still
/// running when `budget` expires are reported as inconclusive; records come
/// back in job order whatever the schedule.
pub fn run_jobs(list: Vec<Job>, jobs: usize, budget: Option<Duration>, seed: u64) -> Report {
    let list = Arc::new(list);
    let mut order: Vec<usize> = (0..list.len()).collect();
    order.shuffle(&mut StdRng::seed_from_u64(seed));
    let queue = Arc::new(Mutex::new(VecDeque::from(order)));
    let (tx, rx) = mpsc::channel();
    for _ in 0..jobs.max(1).min(list.len().max(1)) {
        let (list, queue, tx) = (Arc::clone(&list), Arc::clone(&queue), tx.clone());
        std::thread::spawn(move || loop {
            let Some(i) = queue.lock().unwrap().pop_front() else { break };
            let job = &list[i];
            let start = Instant::now();
            let result = run_one(&job.check.id, job.instance.as_deref(), job.bounds);
            if tx.send((i, result, start.elapsed())).is_err() {
                break;
            }
        });
    }
    drop(tx);

    let deadline = budget.map(|b| Instant::now() + b);
    let mut done: Vec<Option<(Result<Outcome>, Duration)>> = (0..list.len()).map(|_| None).collect();
    let mut remaining = list.len();
    while remaining > 0 {
        let next = match deadline {
            Some(d) => rx.recv_timeout(d.saturating_duration_since(Instant::now())).ok(),
            None => rx.recv().ok(),
        };
        let Some((i, result, elapsed)) = next else { break };
        done[i] = Some((result, elapsed));
        remaining -= 1;
    }

    let mut report = Report {
        records: Vec::new(),
        wall_ms: BTreeMap::new(),
        seed,
    };
    for (job, slot) in list.iter().zip(done) {
        let (status, witness, details) = match slot {
            None => (Status::Inconclusive, Some("wall-time budget exhausted".to_string()), Value::Null),
            Some((result, elapsed)) => {
                report.wall_ms.insert(job.label(), elapsed.as_millis() as u64);
                match result {
                    Ok(o) => (if o.holds { Status::Pass } else { Status::Fail }, o.witness, o.details),
                    Err(e) => (Status::Fail, Some(format!("error: {e:#}")), Value::Null),
                }
            }
        };
        report.records.push(Record {
            check: job.check.id.clone(),
            statement: job.check.statement.clone(),
            instance: job.instance.as_ref().map_or_else(|| "-".into(), |i| i.name.clone()),
            bounds: job.bounds,
            status,
            witness,
            details,
        });
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::MapLift;
    use covcat::graphcov::{build_cyclic_tower, CoveringSpace, Graph, GraphMap};

    #[test]
    fn registry_ids_are_unique_and_runnable() {
        let ids: BTreeSet<&str> = registry().iter().map(|e| e.id.as_str()).collect();
        assert_eq!(ids.len(), registry().len());
        let point = Graph::discrete(1);
        let b = Bounds::new(1, 1, 1);
        let spec = |payload| InstanceSpec {
            name: "tiny".into(),
            payload,
            bounds: b,
            mutation: None,
        };
        let covering = spec(Payload::Covering(CoveringSpace::cyclic(4, 2).unwrap()));
        let tower = spec(Payload::Tower(build_cyclic_tower(2).unwrap()));
        let lift = spec(Payload::MapLift(Box::new(MapLift {
            pi_l: CoveringSpace::trivial(&point, 2),
            pi_m: CoveringSpace::trivial(&point, 2),
            f: GraphMap::identity(&point),
        })));
        for e in registry() {
            let instance = [&covering, &tower, &lift].into_iter().find(|i| applicable(e, Some(i)));
            assert!(e.input == "none" || instance.is_some(), "{}", e.id);
            let r = run_one(&e.id, instance, Some(b)).unwrap();
            assert!(r.holds, "{}", e.id);
        }
        assert!(run_one("no-such-check", None, None).is_err());
    }
}
