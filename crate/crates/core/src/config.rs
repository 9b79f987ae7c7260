//! Scenario files: a versioned JSON document holding a [`SimConfig`] plus
//! optional sweep and ablation sections, with dotted-path overrides.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::sim::SimConfig;

pub const SCHEMA_VERSION: u64 = 1;

/// Top-level keys that are not part of the simulation body.
const META_KEYS: [&str; 4] = ["schema_version", "description", "sweep", "ablation"];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid scenario JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("missing schema_version (expected {SCHEMA_VERSION})")]
    MissingVersion,
    #[error("unsupported schema_version {0} (expected {SCHEMA_VERSION})")]
    Version(Value),
    #[error("scenario must be a JSON object")]
    NotObject,
    #[error("override key `{0}` matches no config field")]
    UnknownKey(String),
    #[error("malformed override `{0}`, expected key=value")]
    BadOverride(String),
    #[error("invalid sweep: {0}")]
    Sweep(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Dotted path into the scenario, e.g. `controller.k_zeta`.
    pub parameter: String,
    #[serde(default)]
    pub values: Option<Vec<Value>>,
    #[serde(default)]
    pub range: Option<RangeSpec>,
}

impl SweepSpec {
    /// Explicit values, or `count` evenly spaced points including both ends.
    pub fn resolve(&self) -> Result<Vec<Value>, ConfigError> {
        let vals = match (&self.values, &self.range) {
            (Some(_), Some(_)) => {
                return Err(ConfigError::Sweep("give either values or range, not both".into()))
            }
            (Some(v), None) => v.clone(),
            (None, Some(r)) => {
                if !r.start.is_finite() || !r.stop.is_finite() {
                    return Err(ConfigError::Sweep("range bounds must be finite".into()));
                }
                match r.count {
                    0 => Vec::new(),
                    1 => vec![Value::from(r.start)],
                    n => (0..n)
                        .map(|i| {
                            let f = i as f64 / (n - 1) as f64;
                            Value::from(r.start + f * (r.stop - r.start))
                        })
                        .collect(),
                }
            }
            (None, None) => return Err(ConfigError::Sweep("no values or range".into())),
        };
        if vals.is_empty() {
            return Err(ConfigError::Sweep("empty range".into()));
        }
        Ok(vals)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AblationSpec {
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub description: Option<String>,
    pub sim: SimConfig,
    pub sweep: Option<SweepSpec>,
    pub ablation: Option<AblationSpec>,
}

impl Scenario {
    pub fn new(sim: SimConfig) -> Self {
        Self {
            description: None,
            sim,
            sweep: None,
            ablation: None,
        }
    }

    pub fn from_value(v: Value) -> Result<Self, ConfigError> {
        let Value::Object(mut obj) = v else {
            return Err(ConfigError::NotObject);
        };
        match obj.remove("schema_version") {
            None => return Err(ConfigError::MissingVersion),
            Some(v) if v.as_u64() == Some(SCHEMA_VERSION) => {}
            Some(v) => return Err(ConfigError::Version(v)),
        }
        let take = |obj: &mut Map<String, Value>, k: &str| obj.remove(k).filter(|v| !v.is_null());
        let description = take(&mut obj, "description")
            .map(serde_json::from_value)
            .transpose()?;
        let sweep = take(&mut obj, "sweep").map(serde_json::from_value).transpose()?;
        let ablation = take(&mut obj, "ablation")
            .map(serde_json::from_value)
            .transpose()?;
        let sim = serde_json::from_value(Value::Object(obj))?;
        Ok(Self {
            description,
            sim,
            sweep,
            ablation,
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self, ConfigError> {
        Self::from_value(serde_json::from_str(s)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    /// Full document with every default made explicit.
    pub fn to_value(&self) -> Value {
        let mut obj = match serde_json::to_value(&self.sim).expect("config serializes") {
            Value::Object(o) => o,
            _ => unreachable!("SimConfig is a struct"),
        };
        obj.insert("schema_version".into(), SCHEMA_VERSION.into());
        if let Some(d) = &self.description {
            obj.insert("description".into(), d.clone().into());
        }
        if let Some(s) = &self.sweep {
            obj.insert("sweep".into(), serde_json::to_value(s).expect("sweep serializes"));
        }
        if let Some(a) = &self.ablation {
            obj.insert("ablation".into(), serde_json::to_value(a).expect("ablation serializes"));
        }
        Value::Object(obj)
    }

    /// Applies `key=value` overrides. Keys are dotted paths that must already
    /// exist in the fully defaulted document.
    pub fn with_overrides(&self, overrides: &[(String, Value)]) -> Result<Self, ConfigError> {
        if overrides.is_empty() {
            return Ok(self.clone());
        }
        let mut doc = self.to_value();
        for (k, v) in overrides {
            set_path(&mut doc, k, v.clone())?;
        }
        Self::from_value(doc)
    }
}

fn is_meta(path: &str) -> bool {
    META_KEYS.contains(&path.split('.').next().unwrap_or(""))
}

/// Replaces the value at a dotted path. Array elements are addressed by
/// index (`initial_state.nu.3`). Nullable fields may be set even when
/// currently absent.
pub fn set_path(doc: &mut Value, path: &str, value: Value) -> Result<(), ConfigError> {
    let unknown = || ConfigError::UnknownKey(path.to_string());
    if path.is_empty() {
        return Err(unknown());
    }
    let mut cur = doc;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let last = i + 1 == parts.len();
        cur = match cur {
            Value::Object(o) => {
                if !o.contains_key(*part) {
                    // optional top-level sections may be introduced
                    if i == 0 && last && is_meta(part) && *part != "schema_version" {
                        o.insert(part.to_string(), Value::Null);
                    } else {
                        return Err(unknown());
                    }
                }
                o.get_mut(*part).expect("checked")
            }
            Value::Array(a) => {
                let idx: usize = part.parse().map_err(|_| unknown())?;
                a.get_mut(idx).ok_or_else(unknown)?
            }
            _ => return Err(unknown()),
        };
    }
    *cur = value;
    Ok(())
}

/// Parses `key=value`; the value is read as JSON and falls back to a plain
/// string.
pub fn parse_override(s: &str) -> Result<(String, Value), ConfigError> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| ConfigError::BadOverride(s.to_string()))?;
    let k = k.trim();
    if k.is_empty() {
        return Err(ConfigError::BadOverride(s.to_string()));
    }
    let v = v.trim();
    let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
    Ok((k.to_string(), value))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_uses_defaults() {
        let s = Scenario::from_json_str(r#"{"schema_version": 1}"#).unwrap();
        assert_eq!(s.sim, SimConfig::default());
    }

    #[test]
    fn version_required_and_checked() {
        assert!(matches!(
            Scenario::from_json_str("{}"),
            Err(ConfigError::MissingVersion)
        ));
        assert!(matches!(
            Scenario::from_json_str(r#"{"schema_version": 2}"#),
            Err(ConfigError::Version(_))
        ));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(Scenario::from_json_str(r#"{"schema_version": 1, "durration": 3}"#).is_err());
        assert!(
            Scenario::from_json_str(r#"{"schema_version": 1, "vehicle": {"mass": 3}}"#).is_err()
        );
    }

    #[test]
    fn round_trip() {
        let mut s = Scenario::new(SimConfig::default());
        s.sweep = Some(SweepSpec {
            parameter: "controller.k_zeta".into(),
            values: Some(vec![0.1.into(), 1.0.into()]),
            range: None,
        });
        let back = Scenario::from_value(s.to_value()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn overrides() {
        let s = Scenario::new(SimConfig::default());
        let o = vec![
            parse_override("vehicle.k_m=2e-7").unwrap(),
            parse_override("initial_state.nu.3=0.1").unwrap(),
            parse_override("flags.flip_aux_sign=true").unwrap(),
        ];
        let t = s.with_overrides(&o).unwrap();
        assert_eq!(t.sim.vehicle.k_m, 2e-7);
        assert_eq!(t.sim.initial_state.nu[3], 0.1);
        assert!(t.sim.flags.flip_aux_sign);
    }

    #[test]
    fn unknown_override_is_error() {
        let s = Scenario::new(SimConfig::default());
        for bad in ["vehicle.mass=3", "nope=1", "initial_state.nu.9=0", "duration.x=1"] {
            let o = vec![parse_override(bad).unwrap()];
            assert!(
                matches!(s.with_overrides(&o), Err(ConfigError::UnknownKey(_))),
                "{bad}"
            );
        }
        assert!(parse_override("novalue").is_err());
    }

    #[test]
    fn ranges() {
        let spec = SweepSpec {
            parameter: "x".into(),
            values: None,
            range: Some(RangeSpec {
                start: 0.0,
                stop: 1.0,
                count: 5,
            }),
        };
        let v = spec.resolve().unwrap();
        assert_eq!(v.len(), 5);
        assert_eq!(v[4], Value::from(1.0));
        let empty = SweepSpec {
            range: Some(RangeSpec {
                start: 0.0,
                stop: 1.0,
                count: 0,
            }),
            ..spec
        };
        assert!(empty.resolve().is_err());
    }
}
