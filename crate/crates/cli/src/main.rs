//! `covcat`: batch verification of finite configuration categories.
//!
//! Exit codes: 0 when every selected check passes, 1 when a check fails or
//! runs out of budget, 2 on malformed input or usage.

mod checks;
mod instance;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use covcat::confcat::{plain_fin, Bounds, ConfigCategory, CoveringStack, FinCategory};
use covcat::epicat::{
    enumerate_epifin_morphisms, enumerate_epifin_objects, epifin_category, is_in_epifin_one, EpiFinObject,
};
use covcat::finset::enumerate_selfic;
use covcat::graphcov::{enumerate_mapcov, Dart, EdgePath};
use covcat::scomb::export::{to_dot, to_json};
use covcat::scomb::{nerve, FiniteCategory, Nerve};
use covcat::FinMap;
use serde_json::json;

use checks::{applicable, entry, registry, run_jobs, Job, Status};
use instance::{parse_bounds, InstanceSpec, Payload};

#[derive(Parser)]
#[command(name = "covcat", version, about = "Exhaustive checks on finite configuration categories of graph coverings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Run checks from the registry and print a JSON report.
    Verify {
        /// Check ids; all checks applicable to the instances when omitted.
        checks: Vec<String>,
        /// Instance files; may be repeated.
        #[arg(long = "instance", short)]
        instances: Vec<PathBuf>,
        /// Override the instance bounds: k,ticks,depth.
        #[arg(long, value_parser = parse_bounds)]
        bounds: Option<Bounds>,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Wall-time budget in seconds; unfinished checks are inconclusive.
        #[arg(long)]
        budget: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Print the registry instead of running checks.
        #[arg(long)]
        list: bool,
    },
    /// Dump enumerations as JSON.
    Enumerate {
        #[command(subcommand)]
        what: What,
        #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
        format: Format,
    },
    /// Export a truncated nerve as JSON or as a DOT 1-skeleton.
    Nerve {
        #[arg(value_enum)]
        category: NerveOf,
        #[arg(long, short)]
        instance: Option<PathBuf>,
        #[arg(long, value_parser = parse_bounds)]
        bounds: Option<Bounds>,
        /// Nerve depth; the bounds' depth when omitted.
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Lift a walk in the base of a covering.
    Lift {
        #[arg(long, short)]
        instance: PathBuf,
        /// `start:d,d,...` with darts as edge ids, `r` marking reversal.
        #[arg(long)]
        path: String,
        /// Points above the start to lift from; all of them when omitted.
        #[arg(long = "start")]
        starts: Vec<usize>,
    },
}

#[derive(Subcommand)]
enum What {
    /// Selfic surjections k -> l.
    Selfic { k: usize, l: usize },
    /// EpiFin objects with source card at most k.
    EpifinObjects { k: usize },
    /// EpiFin morphisms between two objects written as `k->l:[...]`.
    EpifinMorphisms { src: String, tgt: String },
    /// Stratum censuses of a covering or tower instance.
    Strata {
        #[arg(long, short)]
        instance: PathBuf,
        /// A single cardinality; every k up to the bound when omitted.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Lifts over the base map of a map-lift instance.
    Mapcov {
        #[arg(long, short)]
        instance: PathBuf,
    },
    /// Deck transformations of a covering instance.
    Deck {
        #[arg(long, short)]
        instance: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NerveOf {
    Epifin,
    EpifinOne,
    Fin,
    ConfigBase,
    ConfigTotal,
    ConfigPi,
    FinBase,
    FinPi,
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|()| out.write_all(b"\n")) {
                // a closed reader (`| head`) is not an error
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => Ok(r?),
            }
        }
    }
}

fn seed() -> Result<u64> {
    match std::env::var("COVCAT_SEED") {
        Ok(s) => s.trim().parse().with_context(|| format!("COVCAT_SEED={s:?} is not an integer")),
        Err(_) => Ok(0),
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Verify {
            checks,
            instances,
            bounds,
            jobs,
            budget,
            format,
            output,
            list,
        } => {
            if format != Format::Json {
                bail!("verify reports are JSON only");
            }
            if list {
                emit(&serde_json::to_string_pretty(registry())?, output.as_deref())?;
                return Ok(0);
            }
            verify(checks, instances, bounds, jobs, budget, output.as_deref())
        }
        Command::Enumerate { what, format } => {
            if format != Format::Json {
                bail!("enumerations are JSON only; DOT is for nerve exports");
            }
            emit(&serde_json::to_string_pretty(&enumerate(what)?)?, None)?;
            Ok(0)
        }
        Command::Nerve {
            category,
            instance,
            bounds,
            depth,
            format,
            output,
        } => {
            let spec = instance.as_deref().map(InstanceSpec::load).transpose()?;
            let b = bounds.or(spec.as_ref().map(|s| s.bounds)).unwrap_or(Bounds::new(2, 1, 2));
            let text = export_nerve(category, spec.as_ref(), b, depth.unwrap_or(b.depth), format)?;
            emit(&text, output.as_deref())?;
            Ok(0)
        }
        Command::Lift { instance, path, starts } => {
            let spec = InstanceSpec::load(&instance)?;
            let pi = spec.covering().ok_or_else(|| anyhow!("lift needs a covering instance"))?;
            let walk = parse_walk(&path)?;
            walk.validate(pi.base())?;
            let starts = if starts.is_empty() {
                pi.fiber(walk.start).to_vec()
            } else {
                starts
            };
            let mut lifts = Vec::new();
            for x in starts {
                let up = pi.lift_path(&walk, x)?;
                lifts.push(json!({ "start": x, "end": up.end(pi.total()), "darts": up.steps.iter().map(dart_text).collect::<Vec<_>>() }));
            }
            emit(&serde_json::to_string_pretty(&json!({ "walk": path, "lifts": lifts }))?, None)?;
            Ok(0)
        }
    }
}

fn verify(
    ids: Vec<String>,
    paths: Vec<PathBuf>,
    bounds: Option<Bounds>,
    jobs: usize,
    budget: Option<f64>,
    output: Option<&Path>,
) -> Result<i32> {
    let instances: Vec<Arc<InstanceSpec>> = paths
        .iter()
        .map(|p| InstanceSpec::load(p).map(Arc::new))
        .collect::<Result<_>>()?;
    let selected: Vec<&'static checks::Entry> = if ids.is_empty() {
        registry()
            .iter()
            .filter(|e| e.input == "none" || instances.iter().any(|i| applicable(e, Some(i))))
            .collect()
    } else {
        ids.iter()
            .map(|id| entry(id).ok_or_else(|| anyhow!("unknown check {id:?}; see `covcat verify --list`")))
            .collect::<Result<_>>()?
    };
    let mut list = Vec::new();
    for e in selected {
        if e.input == "none" {
            list.push(Job {
                check: e,
                instance: None,
                bounds,
            });
            continue;
        }
        let fitting: Vec<_> = instances.iter().filter(|i| applicable(e, Some(i))).collect();
        if fitting.is_empty() {
            bail!("check {} needs a {} instance", e.id, e.input);
        }
        for i in fitting {
            list.push(Job {
                check: e,
                instance: Some(Arc::clone(i)),
                bounds: Some(bounds.unwrap_or(i.bounds)),
            });
        }
    }
    let budget = budget
        .map(|s| Duration::try_from_secs_f64(s).map_err(|_| anyhow!("budget {s} is not a duration in seconds")))
        .transpose()?;
    let report = run_jobs(list, jobs, budget, seed()?);
    for r in &report.records {
        let status = match r.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        };
        eprintln!("{status} {} on {}{}", r.check, r.instance, r.witness.as_ref().map_or(String::new(), |w| format!(": {w}")));
    }
    emit(&serde_json::to_string_pretty(&report)?, output)?;
    Ok(if report.all_pass() { 0 } else { 1 })
}

fn load_covering(path: &Path) -> Result<InstanceSpec> {
    let spec = InstanceSpec::load(path)?;
    spec.covering().ok_or_else(|| anyhow!("{} is not a covering instance", path.display()))?;
    Ok(spec)
}

fn enumerate(what: What) -> Result<serde_json::Value> {
    Ok(match what {
        What::Selfic { k, l } => {
            let maps: Vec<String> = enumerate_selfic(k, l).iter().map(ToString::to_string).collect();
            json!({ "what": "selfic", "k": k, "l": l, "count": maps.len(), "items": maps })
        }
        What::EpifinObjects { k } => {
            let objects: Vec<String> = enumerate_epifin_objects(k).iter().map(ToString::to_string).collect();
            json!({ "what": "epifin-objects", "k": k, "count": objects.len(), "items": objects })
        }
        What::EpifinMorphisms { src, tgt } => {
            let object = |s: &str| -> Result<EpiFinObject> {
                Ok(EpiFinObject::new(s.parse::<FinMap>()?)?)
            };
            let items: Vec<_> = enumerate_epifin_morphisms(&object(&src)?, &object(&tgt)?)
                .iter()
                .map(|m| json!({ "top": m.top.to_string(), "bottom": m.bottom.to_string() }))
                .collect();
            json!({ "what": "epifin-morphisms", "src": src, "tgt": tgt, "count": items.len(), "items": items })
        }
        What::Strata { instance, k } => {
            let spec = InstanceSpec::load(&instance)?;
            let ks: Vec<usize> = k.map_or_else(|| (0..=spec.bounds.k_max).collect(), |k| vec![k]);
            let items: Vec<serde_json::Value> = match &spec.payload {
                Payload::Covering(pi) => ks
                    .iter()
                    .map(|&k| census_json(&covcat::confcat::strata::strata_census(pi, k)))
                    .collect(),
                Payload::Tower(t) => ks
                    .iter()
                    .map(|&k| Ok(census_json(&covcat::confcat::strata::tower_census(t, k)?)))
                    .collect::<Result<_>>()?,
                Payload::MapLift(_) => bail!("strata need a covering or tower instance"),
            };
            json!({ "what": "strata", "instance": spec.name, "censuses": items })
        }
        What::Mapcov { instance } => {
            let spec = InstanceSpec::load(&instance)?;
            let Payload::MapLift(m) = &spec.payload else {
                bail!("mapcov needs a map-lift instance");
            };
            let lifts = enumerate_mapcov(&m.pi_l, &m.pi_m, &m.f)?;
            json!({ "what": "mapcov", "instance": spec.name, "count": lifts.len(), "items": lifts })
        }
        What::Deck { instance } => {
            let spec = load_covering(&instance)?;
            let deck = spec.covering().expect("checked").deck_transformations();
            json!({ "what": "deck", "instance": spec.name, "count": deck.len(), "items": deck })
        }
    })
}

fn census_json<L: std::fmt::Display>(c: &covcat::confcat::strata::Census<L>) -> serde_json::Value {
    let counts: serde_json::Map<String, serde_json::Value> =
        c.entries.iter().map(|e| (e.label.to_string(), json!(e.count))).collect();
    let unrealized: Vec<String> = c.unrealized.iter().map(ToString::to_string).collect();
    json!({ "k": c.k, "total": c.entries.iter().map(|e| e.count).sum::<usize>(), "counts": counts, "unrealized": unrealized })
}

fn export_nerve(
    what: NerveOf,
    spec: Option<&InstanceSpec>,
    b: Bounds,
    depth: usize,
    format: Format,
) -> Result<String> {
    let covering = || {
        spec.and_then(InstanceSpec::covering)
            .ok_or_else(|| anyhow!("this nerve needs a covering instance"))
    };
    // object labels, then the category
    let (objects, category): (Vec<String>, FiniteCategory) = match what {
        NerveOf::Epifin | NerveOf::EpifinOne => {
            let mut objs = enumerate_epifin_objects(b.k_max);
            if what == NerveOf::EpifinOne {
                objs.retain(is_in_epifin_one);
            }
            let c = epifin_category(objs)?;
            (c.objects().iter().map(ToString::to_string).collect(), c.category().clone())
        }
        NerveOf::Fin => {
            let c = plain_fin(b.k_max);
            (c.objects().iter().map(|k| k.to_string()).collect(), c.category().clone())
        }
        NerveOf::ConfigBase | NerveOf::ConfigTotal | NerveOf::ConfigPi => {
            let stack = CoveringStack::covering(covering()?);
            let stack = match what {
                NerveOf::ConfigBase => stack.at(0),
                NerveOf::ConfigTotal => stack.at(1),
                _ => stack,
            };
            let c = ConfigCategory::build(&stack, b)?;
            (c.materialized().objects().iter().map(|o| format!("{o:?}")).collect(), c.category().clone())
        }
        NerveOf::FinBase | NerveOf::FinPi => {
            let stack = CoveringStack::covering(covering()?);
            let stack = if what == NerveOf::FinBase { stack.at(0) } else { stack };
            let c = FinCategory::build(&stack, b)?;
            let labels = c
                .materialized()
                .objects()
                .iter()
                .map(|o| format!("{:?} {}", o.points, o.labels))
                .collect();
            (labels, c.category().clone())
        }
    };
    let n: Nerve = nerve(&category, depth)?;
    let label = |level: usize, x: usize| -> String {
        if level == 0 {
            objects[n.string(0, x).first().copied().unwrap_or(x)].clone()
        } else {
            format!("{:?}", n.string(level, x))
        }
    };
    Ok(match format {
        Format::Json => to_json(n.sset(), Some(&label)),
        Format::Dot => to_dot(n.sset(), &label),
    })
}

fn parse_walk(s: &str) -> Result<EdgePath> {
    let (start, darts) = s.split_once(':').unwrap_or((s, ""));
    let start = start.trim().parse().with_context(|| format!("walk {s:?} has no start vertex"))?;
    let steps = darts
        .split(',')
        .map(str::trim)
        .filter(|d| !d.is_empty())
        .map(|d| {
            let (edge, reversed) = match d.strip_suffix('r') {
                Some(e) => (e, true),
                None => (d, false),
            };
            let edge = edge.parse().with_context(|| format!("dart {d:?}"))?;
            Ok(Dart { edge, reversed })
        })
        .collect::<Result<_>>()?;
    Ok(EdgePath { start, steps })
}

fn dart_text(d: &Dart) -> String {
    if d.reversed {
        format!("{}r", d.edge)
    } else {
        d.edge.to_string()
    }
}
