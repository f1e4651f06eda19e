//! Declarative process descriptions and their JSON encoding.
//!
//! ```json
//! { "kind": "IidDiscrete",
//!   "support": [ { "value": 2, "prob": "1/2" }, { "value": -1, "prob": "1/2" } ] }
//! ```
//!
//! Probabilities, weights and transition entries are `"p/q"` strings.
//! Payoffs and moving-average coefficients accept numbers or `"p/q"` strings.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{Prob, Value};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum ProcessSpec {
    /// i.i.d. draws from a finite distribution.
    IidDiscrete { support: Vec<SupportPoint> },
    /// i.i.d. normal draws.
    IidGaussian { mean: f64, stddev: f64 },
    /// `X_k = payoffs[state_k]` for a stationary chain on the declared states.
    MarkovChain {
        transition: Vec<Vec<Prob>>,
        payoffs: Vec<Value>,
    },
    /// `X_k = sum_i coefficients[i] * e_{k-i}` over i.i.d. innovations.
    MovingAverage {
        coefficients: Vec<Value>,
        innovation: Box<ProcessSpec>,
    },
    /// `X_k = f(theta + k * alpha mod 1)` with a uniform phase `theta` and a
    /// piecewise-constant `f`; each piece runs from its `start` to the next
    /// piece's start, and the last piece wraps around through 0.
    Rotation {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<f64>,
        pieces: Vec<Piece>,
    },
    /// A random choice of one component for the whole trajectory.
    Mixture { components: Vec<MixtureComponent> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportPoint {
    pub value: Value,
    pub prob: Prob,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Piece {
    pub start: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureComponent {
    pub weight: Prob,
    pub process: ProcessSpec,
}

impl ProcessSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ProcessSpec::IidDiscrete { .. } => "IidDiscrete",
            ProcessSpec::IidGaussian { .. } => "IidGaussian",
            ProcessSpec::MarkovChain { .. } => "MarkovChain",
            ProcessSpec::MovingAverage { .. } => "MovingAverage",
            ProcessSpec::Rotation { .. } => "Rotation",
            ProcessSpec::Mixture { .. } => "Mixture",
        }
    }

    /// Decodes JSON, reporting the location of the first offending field.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Schema {
            path: String::new(),
            reason: e.to_string(),
        })?;
        decode(&value, "")
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn iid_discrete(points: impl IntoIterator<Item = (Rational, Rational)>) -> Self {
        ProcessSpec::IidDiscrete {
            support: points
                .into_iter()
                .map(|(v, p)| SupportPoint {
                    value: Value(v),
                    prob: Prob(p),
                })
                .collect(),
        }
    }

    /// `X_k = value` for every `k`.
    pub fn constant(value: Rational) -> Self {
        Self::iid_discrete([(value, Rational::from_integer(1.into()))])
    }

    pub fn markov(transition: Vec<Vec<Rational>>, payoffs: Vec<Rational>) -> Self {
        ProcessSpec::MarkovChain {
            transition: transition
                .into_iter()
                .map(|row| row.into_iter().map(Prob).collect())
                .collect(),
            payoffs: payoffs.into_iter().map(Value).collect(),
        }
    }

    pub fn mixture(components: impl IntoIterator<Item = (Rational, ProcessSpec)>) -> Self {
        ProcessSpec::Mixture {
            components: components
                .into_iter()
                .map(|(w, process)| MixtureComponent {
                    weight: Prob(w),
                    process,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }
}

impl<'de> Deserialize<'de> for ProcessSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(d)?;
        decode(&value, "").map_err(serde::de::Error::custom)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DiscreteFields {
    support: Vec<SupportPoint>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GaussianFields {
    mean: f64,
    stddev: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MarkovFields {
    transition: Vec<Vec<Prob>>,
    payoffs: Vec<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MovingAverageFields {
    coefficients: Vec<Value>,
    innovation: serde_json::Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RotationFields {
    #[serde(default)]
    alpha: Option<f64>,
    pieces: Vec<Piece>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentFields {
    weight: Prob,
    process: serde_json::Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MixtureFields {
    components: Vec<ComponentFields>,
}

const KINDS: [&str; 6] = [
    "IidDiscrete",
    "IidGaussian",
    "MarkovChain",
    "MovingAverage",
    "Rotation",
    "Mixture",
];

fn at(base: &str, rest: &str) -> String {
    match (base.is_empty(), rest.is_empty() || rest == ".") {
        (true, _) => rest.to_string(),
        (false, true) => base.to_string(),
        (false, false) if rest.starts_with('[') => format!("{base}{rest}"),
        (false, false) => format!("{base}.{rest}"),
    }
}

fn fields<T: serde::de::DeserializeOwned>(object: serde_json::Value, path: &str) -> Result<T> {
    serde_path_to_error::deserialize(object).map_err(|e| Error::Schema {
        path: at(path, &e.path().to_string()),
        reason: e.into_inner().to_string(),
    })
}

/// Walks the JSON tree by hand so that errors inside nested specs keep their
/// full path.
fn decode(value: &serde_json::Value, path: &str) -> Result<ProcessSpec> {
    let schema = |p: String, reason: String| Error::Schema { path: p, reason };
    let mut object = value
        .as_object()
        .cloned()
        .ok_or_else(|| schema(at(path, ""), "expected an object".into()))?;
    let kind_path = at(path, "kind");
    let kind = match object.remove("kind") {
        Some(serde_json::Value::String(k)) => k,
        Some(_) => return Err(schema(kind_path, "kind must be a string".into())),
        None => return Err(schema(kind_path, "missing field `kind`".into())),
    };
    let rest = serde_json::Value::Object(object);
    Ok(match kind.as_str() {
        "IidDiscrete" => {
            let f: DiscreteFields = fields(rest, path)?;
            ProcessSpec::IidDiscrete { support: f.support }
        }
        "IidGaussian" => {
            let f: GaussianFields = fields(rest, path)?;
            ProcessSpec::IidGaussian {
                mean: f.mean,
                stddev: f.stddev,
            }
        }
        "MarkovChain" => {
            let f: MarkovFields = fields(rest, path)?;
            ProcessSpec::MarkovChain {
                transition: f.transition,
                payoffs: f.payoffs,
            }
        }
        "MovingAverage" => {
            let f: MovingAverageFields = fields(rest, path)?;
            ProcessSpec::MovingAverage {
                coefficients: f.coefficients,
                innovation: Box::new(decode(&f.innovation, &at(path, "innovation"))?),
            }
        }
        "Rotation" => {
            let f: RotationFields = fields(rest, path)?;
            ProcessSpec::Rotation {
                alpha: f.alpha,
                pieces: f.pieces,
            }
        }
        "Mixture" => {
            let f: MixtureFields = fields(rest, path)?;
            let components = f
                .components
                .into_iter()
                .enumerate()
                .map(|(i, c)| {
                    Ok(MixtureComponent {
                        weight: c.weight,
                        process: decode(&c.process, &at(path, &format!("components[{i}].process")))?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            ProcessSpec::Mixture { components }
        }
        other => {
            return Err(schema(
                kind_path,
                format!("unknown kind `{other}`, expected one of {}", KINDS.join(", ")),
            ))
        }
    })
}
