//! Flat `key = value` scenario files.
//!
//! ```text
//! # comment
//! params.beta = 0.02146383
//! delays.T1.value = 0.105
//! incidence.family = holling2
//! ```
//!
//! Later keys override earlier ones. `T1.*`, `T2.*` and `T3.*` are accepted
//! as shorthand for `delays.T1.*` and so on.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{
    nondimensionalize, DelayDensity, DelaySet, DelaySpec, DensityShape, DimensionalParams, DimensionlessParams,
    IncidenceModel, ModelError, State, DEFAULT_NODES,
};
use crate::simulator::{InitialHistory, NegativityPolicy, SimulationConfig, DEFAULT_DT};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{}unknown key '{key}'", at(*line))]
    UnknownKey { key: String, line: Option<usize> },
    #[error("missing required key '{0}'")]
    MissingKey(String),
    #[error("{}invalid value '{value}' for '{key}': {message}", at(*line))]
    InvalidValue { key: String, value: String, line: Option<usize>, message: String },
    #[error("{0}")]
    Conflict(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn at(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

const DIMENSIONLESS: [&str; 6] = ["B", "beta", "mu", "mu_v", "d", "alpha"];
const DIMENSIONAL: [&str; 8] = ["Bhat", "betahat", "muhat", "dhat", "alphahat", "muvhat", "Lambda", "V0"];
const DELAY_FIELDS: [&str; 6] = ["kind", "value", "density", "lo", "hi", "nodes"];
const OTHER_KEYS: [&str; 12] = [
    "incidence.family",
    "incidence.a1",
    "incidence.theta",
    "init.S",
    "init.E",
    "init.I",
    "init.R",
    "sim.dt",
    "sim.t_end",
    "sim.stride",
    "sim.negativity",
    "sim.nodes",
];

/// Canonical form of `key`, or `None` when it is not recognised.
pub fn canonical_key(key: &str) -> Option<String> {
    let key = key.trim();
    let key = if key.starts_with("T1.") || key.starts_with("T2.") || key.starts_with("T3.") {
        format!("delays.{key}")
    } else {
        key.to_string()
    };
    let known = match key.split_once('.') {
        Some(("params", k)) => DIMENSIONLESS.contains(&k),
        Some(("dimensional", k)) => DIMENSIONAL.contains(&k),
        Some(("delays", rest)) => match rest.split_once('.') {
            Some((t, f)) => ["T1", "T2", "T3"].contains(&t) && DELAY_FIELDS.contains(&f),
            None => false,
        },
        _ => OTHER_KEYS.contains(&key.as_str()),
    };
    known.then_some(key)
}

/// Whether `key` holds a number (and can therefore be swept).
pub fn is_numeric_key(key: &str) -> bool {
    match canonical_key(key) {
        Some(k) => !(k.ends_with(".kind") || k.ends_with(".density") || k == "incidence.family" || k == "sim.negativity"),
        None => false,
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    line: Option<usize>,
}

/// Parsed key-value pairs with the line each one came from.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigMap {
    entries: BTreeMap<String, Entry>,
}

impl ConfigMap {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Syntax { line, message: format!("expected 'key = value', got '{content}'") });
            };
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(ConfigError::Syntax { line, message: "empty key".into() });
            }
            map.insert(key, value, Some(line))?;
        }
        Ok(map)
    }

    fn insert(&mut self, key: &str, value: &str, line: Option<usize>) -> Result<(), ConfigError> {
        let canonical = canonical_key(key).ok_or_else(|| ConfigError::UnknownKey { key: key.to_string(), line })?;
        self.entries.insert(canonical, Entry { value: value.to_string(), line });
        Ok(())
    }

    /// Sets or replaces one key, as a later line would.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        self.insert(key, value.trim(), None)
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, value) = assignment.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: 0,
            message: format!("override must be key=value, got '{assignment}'"),
        })?;
        self.set(key, value)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    fn invalid(&self, key: &str, message: impl Into<String>) -> ConfigError {
        let e = &self.entries[key];
        ConfigError::InvalidValue { key: key.into(), value: e.value.clone(), line: e.line, message: message.into() }
    }

    pub fn f64_opt(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        let Some(v) = self.get(key) else { return Ok(None) };
        parse_number(v).map(Some).ok_or_else(|| self.invalid(key, "not a number"))
    }

    pub fn f64(&self, key: &str) -> Result<f64, ConfigError> {
        self.f64_opt(key)?.ok_or_else(|| ConfigError::MissingKey(key.into()))
    }

    pub fn usize_opt(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        let Some(v) = self.get(key) else { return Ok(None) };
        v.parse().map(Some).map_err(|_| self.invalid(key, "not a non-negative integer"))
    }
}

/// Parses a decimal number or a ratio `a/b`.
fn parse_number(text: &str) -> Option<f64> {
    let v = match text.split_once('/') {
        Some((a, b)) => a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?,
        None => text.parse::<f64>().ok()?,
    };
    v.is_finite().then_some(v)
}

/// Simulation settings read from `sim.*`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimSettings {
    pub dt: f64,
    pub t_end: Option<f64>,
    pub stride: usize,
    pub negativity: NegativityPolicy,
}

/// A fully resolved model setup.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: DimensionlessParams,
    pub delays: DelaySet,
    pub incidence: IncidenceModel,
    pub initial: Option<State>,
    pub sim: SimSettings,
    /// Days → dimensionless time factor when built from `dimensional.*`.
    pub time_scale: Option<f64>,
}

impl Scenario {
    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        Self::from_map(&ConfigMap::parse(text)?)
    }

    pub fn from_map(map: &ConfigMap) -> Result<Self, ConfigError> {
        let has_dimensionless = map.keys().any(|k| k.starts_with("params."));
        let has_dimensional = map.keys().any(|k| k.starts_with("dimensional."));
        let node_default = map.usize_opt("sim.nodes")?.unwrap_or(DEFAULT_NODES);
        let delays = DelaySet {
            vector: delay_spec(map, "T1", node_default)?,
            host: delay_spec(map, "T2", node_default)?,
            immunity: delay_spec(map, "T3", node_default)?,
        };
        let (params, delays, time_scale) = match (has_dimensionless, has_dimensional) {
            (true, true) => {
                return Err(ConfigError::Conflict(
                    "give either params.* or dimensional.* keys, not both".into(),
                ))
            }
            (false, true) => {
                let f = |k: &str| map.f64(&format!("dimensional.{k}"));
                let dim = DimensionalParams {
                    birth_rate: f("Bhat")?,
                    contact_rate: f("betahat")?,
                    death_rate: f("muhat")?,
                    disease_death_rate: f("dhat")?,
                    recovery_rate: f("alphahat")?,
                    vector_turnover: f("muvhat")?,
                    vector_infection_rate: f("Lambda")?,
                    vector_count: f("V0")?,
                    delays,
                };
                let nd = nondimensionalize(&dim)?;
                (nd.params, nd.delays, Some(nd.time_scale))
            }
            _ => {
                let f = |k: &str| map.f64(&format!("params.{k}"));
                let p = DimensionlessParams {
                    birth_rate: f("B")?,
                    transmission: f("beta")?,
                    death_rate: f("mu")?,
                    vector_death_rate: f("mu_v")?,
                    disease_death_rate: f("d")?,
                    recovery_rate: f("alpha")?,
                };
                p.validate()?;
                (p, delays, None)
            }
        };

        let incidence = incidence_from_map(map)?;

        let init_keys = ["init.S", "init.E", "init.I", "init.R"];
        let initial = if init_keys.iter().any(|k| map.contains(k)) {
            Some(State::new(map.f64(init_keys[0])?, map.f64(init_keys[1])?, map.f64(init_keys[2])?, map.f64(init_keys[3])?))
        } else {
            None
        };

        let negativity = match map.get("sim.negativity") {
            None => NegativityPolicy::Error,
            Some(v) => NegativityPolicy::parse(v).ok_or_else(|| map.invalid("sim.negativity", "expected error or clamp"))?,
        };
        let sim = SimSettings {
            dt: map.f64_opt("sim.dt")?.unwrap_or(DEFAULT_DT),
            t_end: map.f64_opt("sim.t_end")?,
            stride: map.usize_opt("sim.stride")?.unwrap_or(1),
            negativity,
        };
        Ok(Self { params, delays, incidence, initial, sim, time_scale })
    }

    /// Simulation setup; needs `init.*` and `sim.t_end`.
    pub fn simulation_config(&self) -> Result<SimulationConfig, ConfigError> {
        let initial = self.initial.ok_or_else(|| ConfigError::MissingKey("init.S".into()))?;
        let t_end = self.sim.t_end.ok_or_else(|| ConfigError::MissingKey("sim.t_end".into()))?;
        Ok(SimulationConfig {
            dt: self.sim.dt,
            t_end,
            history: InitialHistory::Constant(initial),
            negativity: self.sim.negativity,
            stride: self.sim.stride,
        })
    }
}

/// Builds the incidence model from the `incidence.*` keys alone.
pub fn incidence_from_map(map: &ConfigMap) -> Result<IncidenceModel, ConfigError> {
    let family = map.get("incidence.family").ok_or_else(|| ConfigError::MissingKey("incidence.family".into()))?;
    Ok(match family {
        "holling2" => IncidenceModel::holling2(map.f64("incidence.a1")?)?,
        "saturating" => IncidenceModel::saturating(map.f64("incidence.theta")?)?,
        "linear" => IncidenceModel::Linear,
        _ => return Err(map.invalid("incidence.family", "expected holling2, saturating or linear")),
    })
}

fn delay_spec(map: &ConfigMap, name: &str, node_default: usize) -> Result<DelaySpec, ConfigError> {
    let key = |f: &str| format!("delays.{name}.{f}");
    let kind_key = key("kind");
    let kind = map.get(&kind_key).unwrap_or(if map.contains(&key("density")) { "density" } else { "point" });
    match kind {
        "point" => Ok(DelaySpec::point(map.f64(&key("value"))?)?),
        "density" => {
            let shape_key = key("density");
            let shape = match map.get(&shape_key) {
                Some(text) => DensityShape::parse(text).map_err(|e| map.invalid(&shape_key, e.to_string()))?,
                None => DensityShape::Uniform,
            };
            let lo = map.f64_opt(&key("lo"))?.unwrap_or(0.0);
            let hi = map.f64_opt(&key("hi"))?;
            let nodes = map.usize_opt(&key("nodes"))?.unwrap_or(node_default);
            Ok(DelaySpec::Density(DelayDensity::new(shape, lo, hi, nodes)?))
        }
        _ => Err(map.invalid(&kind_key, "expected point or density")),
    }
}
