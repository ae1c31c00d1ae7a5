//! Instance files: a covering, a tower or a base map between two coverings,
//! with the bounds the checks run at.

use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use covcat::confcat::squares::Mutation;
use covcat::confcat::Bounds;
use covcat::graphcov::{CoveringSpace, GraphMap, Tower};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Covering,
    Tower,
    MapLift,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Covering => "covering",
            Kind::Tower => "tower",
            Kind::MapLift => "map-lift",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapLift {
    pub pi_l: CoveringSpace,
    pub pi_m: CoveringSpace,
    pub f: GraphMap,
}

#[derive(Clone, Debug)]
pub enum Payload {
    Covering(CoveringSpace),
    Tower(Tower),
    MapLift(Box<MapLift>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    name: Option<String>,
    kind: Kind,
    payload: serde_json::Value,
    bounds: Bounds,
    #[serde(default)]
    mutation: Option<Mutation>,
}

#[derive(Clone, Debug)]
pub struct InstanceSpec {
    pub name: String,
    pub payload: Payload,
    pub bounds: Bounds,
    pub mutation: Option<Mutation>,
}

impl InstanceSpec {
    pub fn kind(&self) -> Kind {
        match self.payload {
            Payload::Covering(_) => Kind::Covering,
            Payload::Tower(_) => Kind::Tower,
            Payload::MapLift(_) => Kind::MapLift,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let fallback = path.file_stem().map_or_else(|| "instance".into(), |s| s.to_string_lossy().into_owned());
        Self::parse(&text, &fallback).with_context(|| format!("loading {}", path.display()))
    }

    pub fn parse(text: &str, fallback_name: &str) -> Result<Self> {
        let raw: RawSpec = serde_json::from_str(text)?;
        if raw.mutation.is_some() && raw.kind != Kind::Covering {
            bail!("mutations apply to covering instances only");
        }
        let payload = match raw.kind {
            Kind::Covering => Payload::Covering(serde_json::from_value(raw.payload).context("covering payload")?),
            Kind::Tower => Payload::Tower(serde_json::from_value(raw.payload).context("tower payload")?),
            Kind::MapLift => {
                let m: MapLift = serde_json::from_value(raw.payload).context("map-lift payload")?;
                m.f.validate(m.pi_l.base(), m.pi_m.base()).context("base map")?;
                Payload::MapLift(Box::new(m))
            }
        };
        check_bounds(raw.bounds)?;
        Ok(InstanceSpec {
            name: raw.name.unwrap_or_else(|| fallback_name.to_string()),
            payload,
            bounds: raw.bounds,
            mutation: raw.mutation,
        })
    }

    pub fn covering(&self) -> Option<&CoveringSpace> {
        match &self.payload {
            Payload::Covering(pi) => Some(pi),
            _ => None,
        }
    }
}

pub fn check_bounds(b: Bounds) -> Result<()> {
    ensure!(b.k_max >= 1 && b.tick_max >= 1 && b.depth >= 1, "bounds must be positive, got {b:?}");
    Ok(())
}

/// `k,ticks,depth`.
pub fn parse_bounds(s: &str) -> Result<Bounds> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("bounds {s:?} are not three integers k,ticks,depth"))?;
    let [k, t, d] = parts[..] else {
        bail!("bounds {s:?} are not three integers k,ticks,depth");
    };
    let b = Bounds::new(k, t, d);
    check_bounds(b)?;
    Ok(b)
}
