//! Compact text forms for boundary and split descriptions.
//!
//! Boundaries: `const`, `log`, `power:c=2`, `exp`, `poisson`, each optionally
//! followed by `r=` and `q=` (for example `power:c=1,r=1,q=0.5`).
//!
//! Splits: `det:p=0.5`, `strat:<law>`, `random:<law>`, where `<law>` is
//! `uniform`, `power-right:a=2`, `power-left:b=2` or `two-point:lo=0.2,hi=0.8,w=0.5`.

use std::collections::BTreeMap;
use std::str::FromStr;

use fraglab_core::{BoundaryKind, BoundarySpec, Proportions, SplitLaw, SplitSpec};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

fn split_head(s: &str) -> (&str, &str) {
    match s.split_once(':') {
        Some((h, t)) => (h.trim(), t.trim()),
        None => (s.trim(), ""),
    }
}

fn key_values(s: &str, allowed: &[&str]) -> Result<BTreeMap<String, f64>, String> {
    let mut out = BTreeMap::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, got {part:?}"))?;
        let k = k.trim();
        if !allowed.contains(&k) {
            return Err(format!("unknown key {k:?} (allowed: {})", allowed.join(", ")));
        }
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| format!("{k}: not a number: {:?}", v.trim()))?;
        if out.insert(k.to_string(), v).is_some() {
            return Err(format!("{k} given twice"));
        }
    }
    Ok(out)
}

pub fn parse_boundary(s: &str) -> Result<BoundarySpec, String> {
    let (head, tail) = split_head(s);
    let kv = key_values(tail, &["c", "r", "q"])?;
    let r = kv.get("r").copied().unwrap_or(1.0);
    let q = kv.get("q").copied().unwrap_or(0.5);
    let kind = match head {
        "const" | "constant" => BoundaryKind::Constant,
        "log" | "logarithmic" => BoundaryKind::Logarithmic,
        "power" => BoundaryKind::PowerLaw {
            c: *kv.get("c").ok_or("power boundary needs c=")?,
        },
        "exp" | "exponential" => BoundaryKind::Exponential,
        "poisson" => BoundaryKind::PoissonArrivals,
        other => return Err(format!("unknown boundary kind {other:?}")),
    };
    if kv.contains_key("c") && !matches!(kind, BoundaryKind::PowerLaw { .. }) {
        return Err(format!("c= only applies to power boundaries, not {head:?}"));
    }
    BoundarySpec::new(kind, r, q).map_err(|e| e.to_string())
}

fn parse_law(s: &str) -> Result<SplitLaw, String> {
    let (head, tail) = split_head(s);
    let law = match head {
        "uniform" => {
            key_values(tail, &[])?;
            SplitLaw::Uniform
        }
        "power-right" => SplitLaw::PowerRight {
            a: *key_values(tail, &["a"])?.get("a").ok_or("power-right needs a=")?,
        },
        "power-left" => SplitLaw::PowerLeft {
            b: *key_values(tail, &["b"])?.get("b").ok_or("power-left needs b=")?,
        },
        "two-point" => {
            let kv = key_values(tail, &["lo", "hi", "w"])?;
            let get = |k: &str| kv.get(k).copied().ok_or_else(|| format!("two-point needs {k}="));
            SplitLaw::TwoPoint {
                lo: get("lo")?,
                hi: get("hi")?,
                w: get("w")?,
            }
        }
        other => return Err(format!("unknown split law {other:?}")),
    };
    law.validate().map_err(|e| e.to_string())?;
    Ok(law)
}

pub fn parse_split(s: &str) -> Result<SplitSpec, String> {
    let (head, tail) = split_head(s);
    let spec = match head {
        "det" | "deterministic" => {
            let kv = key_values(tail, &["p"])?;
            SplitSpec::Deterministic(Proportions::Constant(*kv.get("p").ok_or("det split needs p=")?))
        }
        "strat" | "stratified" => SplitSpec::RandomStratified(parse_law(tail)?),
        "random" | "fully-random" => SplitSpec::FullyRandom(parse_law(tail)?),
        other => return Err(format!("unknown split kind {other:?}")),
    };
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

/// A boundary given either as text or, in config files, as a table.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryArg(pub BoundarySpec);

/// A split given either as text or, in config files, as a table.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitArg(pub SplitSpec);

impl FromStr for BoundaryArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        parse_boundary(s).map(BoundaryArg)
    }
}

impl FromStr for SplitArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        parse_split(s).map(SplitArg)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TextOr<T> {
    Text(String),
    Value(T),
}

impl<'de> Deserialize<'de> for BoundaryArg {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match TextOr::<BoundarySpec>::deserialize(d)? {
            TextOr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            TextOr::Value(v) => {
                v.validate().map_err(serde::de::Error::custom)?;
                Ok(BoundaryArg(v))
            }
        }
    }
}

impl<'de> Deserialize<'de> for SplitArg {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match TextOr::<SplitSpec>::deserialize(d)? {
            TextOr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            TextOr::Value(v) => {
                v.validate().map_err(serde::de::Error::custom)?;
                Ok(SplitArg(v))
            }
        }
    }
}

impl Serialize for BoundaryArg {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl Serialize for SplitArg {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}
