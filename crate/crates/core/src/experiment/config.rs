use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::env::WeightSpec;
use crate::error::{Error, Result};
use crate::partition::Beta;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Shape,
    Busemann,
    Monotonicity,
    Cesaro,
    Dlr,
    Ldp,
    Decay,
    Coalescence,
    Junctions,
    Interface,
    Cdf,
    Scan,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Kind::Shape => "shape",
            Kind::Busemann => "busemann",
            Kind::Monotonicity => "monotonicity",
            Kind::Cesaro => "cesaro",
            Kind::Dlr => "dlr",
            Kind::Ldp => "ldp",
            Kind::Decay => "decay",
            Kind::Coalescence => "coalescence",
            Kind::Junctions => "junctions",
            Kind::Interface => "interface",
            Kind::Cdf => "cdf",
            Kind::Scan => "scan",
        };
        f.write_str(s)
    }
}

/// How a Busemann field is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldSource {
    P2l,
    P2p,
}

/// Step law of coupled walks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawKind {
    /// `p ≡ ½`.
    Half,
    /// Forward transitions of a point-to-line Busemann field.
    Busemann,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fixture {
    /// The 2x2 grid `ω(0,0)=1, ω(1,0)=5, ω(0,1)=2, ω(1,1)=3`, padded with zeros to 4x4.
    Hand,
}

/// One experiment. Unset optional fields take per-kind defaults, listed in
/// `docs/config.md`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    /// Output subdirectory and report label; defaults to the kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default = "default_weights")]
    pub weights: WeightSpec,
    #[serde(default = "default_beta", with = "beta_serde")]
    pub beta: Beta,
    /// Seed of the weight field.
    #[serde(default)]
    pub seed: u64,
    /// Seed of the coupling uniforms.
    #[serde(default = "default_coupling_seed")]
    pub coupling_seed: u64,
    /// Seed of Markov-chain samplers.
    #[serde(default = "default_sampler_seed")]
    pub sampler_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub directions: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tilt: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tilt_hi: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<FieldSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub law: Option<LawKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<Fixture>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicas: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub near_axis: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

fn default_weights() -> WeightSpec {
    WeightSpec::standard_gaussian()
}

fn default_beta() -> Beta {
    Beta::ONE
}

fn default_coupling_seed() -> u64 {
    1
}

fn default_sampler_seed() -> u64 {
    2
}

/// `beta = 1.5` or `beta = "inf"`.
mod beta_serde {
    use super::*;

    pub fn serialize<S: Serializer>(b: &Beta, s: S) -> std::result::Result<S::Ok, S::Error> {
        if b.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(b.value())
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Int(i64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Beta, D::Error> {
        let r = match Raw::deserialize(d)? {
            Raw::Num(x) => Beta::new(x),
            Raw::Int(x) => Beta::new(x as f64),
            Raw::Str(s) => Beta::from_str(&s),
        };
        r.map_err(serde::de::Error::custom)
    }
}

const ALWAYS: &[&str] = &["kind", "name", "weights", "beta", "seed"];

fn allowed(kind: Kind) -> &'static [&'static str] {
    match kind {
        Kind::Shape => &["levels", "directions", "direction", "replicas", "near_axis", "scale"],
        Kind::Busemann => &["size", "horizon", "tilt", "provenance", "levels", "replicas"],
        Kind::Monotonicity => &["size", "tilt", "tilt_hi", "replicas", "steps", "coupling_seed"],
        Kind::Cesaro => &["size", "direction", "tilt", "replicas"],
        Kind::Dlr => &["size", "tilt", "fixture", "replicas"],
        Kind::Ldp => &["size", "direction", "tilt", "replicas"],
        Kind::Decay => &["levels", "tilt", "replicas"],
        Kind::Coalescence => &[
            "law",
            "horizon",
            "replicas",
            "fields",
            "tilt",
            "direction",
            "half_width",
            "coupling_seed",
        ],
        Kind::Junctions => &["law", "levels", "replicas", "tilt", "coupling_seed"],
        Kind::Interface => &["steps", "replicas", "coupling_seed", "sampler_seed"],
        Kind::Cdf => &["steps", "replicas", "directions", "alpha", "coupling_seed"],
        Kind::Scan => &["size", "directions", "direction"],
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| toml_error(text, &e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configs always serialise")
    }

    pub fn name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.kind.to_string())
    }

    /// Fields set to something other than their default.
    fn set_fields(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut mark = |on: bool, f: &'static str| {
            if on {
                out.push(f);
            }
        };
        mark(self.coupling_seed != default_coupling_seed(), "coupling_seed");
        mark(self.sampler_seed != default_sampler_seed(), "sampler_seed");
        mark(self.size.is_some(), "size");
        mark(self.horizon.is_some(), "horizon");
        mark(!self.levels.is_empty(), "levels");
        mark(!self.directions.is_empty(), "directions");
        mark(self.direction.is_some(), "direction");
        mark(self.tilt.is_some(), "tilt");
        mark(self.tilt_hi.is_some(), "tilt_hi");
        mark(self.provenance.is_some(), "provenance");
        mark(self.law.is_some(), "law");
        mark(self.fixture.is_some(), "fixture");
        mark(self.replicas.is_some(), "replicas");
        mark(self.fields.is_some(), "fields");
        mark(self.steps.is_some(), "steps");
        mark(self.half_width.is_some(), "half_width");
        mark(self.near_axis.is_some(), "near_axis");
        mark(self.scale.is_some(), "scale");
        mark(self.alpha.is_some(), "alpha");
        out
    }

    /// Reject fields the kind ignores and values outside their domain.
    pub fn validate(&self) -> Result<()> {
        let ok = allowed(self.kind);
        if let Some(f) = self
            .set_fields()
            .into_iter()
            .find(|f| !ok.contains(f) && !ALWAYS.contains(f))
        {
            return Err(cfg_err(f, format!("not used by kind `{}`", self.kind)));
        }
        self.weights.validate().map_err(|e| cfg_err("weights", e.to_string()))?;
        if let Some(n) = &self.name {
            if n.is_empty() || n.contains(['/', '\\']) || n.starts_with('.') {
                return Err(cfg_err("name", "must be a plain, non-empty file name"));
            }
        }
        let positive = |v: Option<i64>, f: &str| match v {
            Some(x) if x < 1 => Err(cfg_err(f, format!("must be positive, got {x}"))),
            _ => Ok(()),
        };
        positive(self.size, "size")?;
        positive(self.horizon, "horizon")?;
        positive(self.half_width, "half_width")?;
        positive(self.replicas.map(|x| x as i64), "replicas")?;
        positive(self.fields.map(|x| x as i64), "fields")?;
        positive(self.steps.map(|x| x as i64), "steps")?;
        if let Some(l) = self.levels.iter().find(|&&l| l < 1) {
            return Err(cfg_err("levels", format!("entries must be positive, got {l}")));
        }
        let unit = |t: f64| t > 0.0 && t < 1.0;
        if let Some(t) = self.directions.iter().find(|&&t| !unit(t)) {
            return Err(cfg_err("directions", format!("entries must lie in (0, 1), got {t}")));
        }
        if let Some(t) = self.direction.filter(|&t| !unit(t)) {
            return Err(cfg_err("direction", format!("must lie in (0, 1), got {t}")));
        }
        if let Some(s) = self.near_axis.filter(|&s| !unit(s)) {
            return Err(cfg_err("near_axis", format!("must lie in (0, 1), got {s}")));
        }
        if let Some(a) = self.alpha.filter(|&a| !unit(a)) {
            return Err(cfg_err("alpha", format!("must lie in (0, 1), got {a}")));
        }
        if let Some(s) = self.scale.filter(|&s| !(s >= 1.0)) {
            return Err(cfg_err("scale", format!("must be at least 1, got {s}")));
        }
        for (f, t) in [("tilt", self.tilt), ("tilt_hi", self.tilt_hi)] {
            if let Some(h) = t.filter(|h| !h.iter().all(|x| x.is_finite())) {
                return Err(cfg_err(f, format!("must be finite, got {h:?}")));
            }
        }
        Ok(())
    }
}

pub(crate) fn cfg_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

/// Turn a TOML error into a config error naming the offending key.
pub(crate) fn toml_error(text: &str, e: &toml::de::Error) -> Error {
    let msg = e.message().trim().to_string();
    let quoted = msg
        .split('`')
        .nth(1)
        .filter(|_| msg.contains("field `"))
        .map(str::to_string);
    let from_span = e.span().and_then(|sp| {
        let line_start = text[..sp.start].rfind('\n').map_or(0, |i| i + 1);
        let line = text[line_start..].lines().next()?;
        let key = line.split('=').next()?.trim();
        (!key.is_empty() && line.contains('=')).then(|| key.trim_matches('"').to_string())
    });
    let field = quoted.or(from_span).unwrap_or_else(|| "<document>".to_string());
    let line = e
        .span()
        .map(|sp| text[..sp.start].matches('\n').count() + 1)
        .map(|l| format!(" (line {l})"))
        .unwrap_or_default();
    cfg_err(&field, format!("{msg}{line}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_and_round_trip() {
        let c = ExperimentConfig::from_toml_str("kind = \"dlr\"\nfixture = \"hand\"\n").unwrap();
        assert_eq!(c.kind, Kind::Dlr);
        assert_eq!(c.beta, Beta::ONE);
        assert_eq!(c.name(), "dlr");
        let back = ExperimentConfig::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn infinite_beta_and_weights() {
        let c = ExperimentConfig::from_toml_str(
            "kind = \"busemann\"\nbeta = \"inf\"\nweights = { distribution = \"uniform\", a = 0.0, b = 1.0 }\n",
        )
        .unwrap();
        assert!(c.beta.is_infinite());
        assert_eq!(c.weights, WeightSpec::Uniform { a: 0.0, b: 1.0 });
        assert!(c.to_toml_string().contains("beta = \"inf\""));
    }

    fn field_of(text: &str) -> String {
        match ExperimentConfig::from_toml_str(text) {
            Err(Error::Config { field, .. }) => field,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn diagnostics_name_the_field() {
        assert_eq!(field_of("kind = \"shape\"\nbeta = \"hot\"\n"), "beta");
        assert_eq!(field_of("kind = \"shape\"\nreplica = 3\n"), "replica");
        assert_eq!(field_of("kind = \"flat\"\n"), "kind");
        assert_eq!(field_of("beta = 1.0\n"), "kind");
        assert_eq!(field_of("kind = \"shape\"\nfixture = \"hand\"\n"), "fixture");
        assert_eq!(field_of("kind = \"scan\"\nsize = 0\n"), "size");
        assert_eq!(field_of("kind = \"shape\"\ndirections = [0.5, 1.0]\n"), "directions");
        assert_eq!(
            field_of("kind = \"shape\"\nweights = { distribution = \"gaussian\", mean = 0.0, sd = -1.0 }\n"),
            "weights"
        );
        assert_eq!(field_of("kind = \"shape\"\nreplicas = \"ten\"\n"), "replicas");
    }
}
