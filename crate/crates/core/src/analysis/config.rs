//! Analysis configuration files.
//!
//! ```toml
//! prefix = [[2, [0, 1]]]
//!
//! [tail]
//! kind = "periodic"          # empty | periodic | consecutive | shifted_top
//! period = [[2, [0, 3]]]
//! # M = "(2k+1)^2", n = "1 + P", N = "(2k+1)^2" for families
//!
//! [analysis]
//! qsum = false
//!
//! [numeric]
//! depth = 14
//! ```

use std::path::PathBuf;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::moran::{Formula, MoranSequence, Stage, Tail};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("{field}: {reason}")]
    Validation { field: String, reason: String },
}

impl ConfigError {
    fn validation(field: impl Into<String>, reason: impl ToString) -> Self {
        Self::Validation {
            field: field.into(),
            reason: reason.to_string(),
        }
    }
}

/// Which analyses run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Toggles {
    pub udz: bool,
    pub rbc: bool,
    pub pcc: bool,
    pub admissible: bool,
    pub verdict: bool,
    pub qsum: bool,
    pub decompose: bool,
}

impl Default for Toggles {
    fn default() -> Self {
        Self {
            udz: true,
            rbc: true,
            pcc: true,
            admissible: true,
            verdict: true,
            qsum: true,
            decompose: true,
        }
    }
}

impl Toggles {
    pub fn none() -> Self {
        Self {
            udz: false,
            rbc: false,
            pcc: false,
            admissible: false,
            verdict: false,
            qsum: false,
            decompose: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numeric {
    /// Product depth of the truncated transform.
    pub depth: usize,
    /// Number of stages in the candidate spectrum.
    pub spectrum_depth: usize,
    pub samples: usize,
    /// Sample window: `[0, W)` for Q, `[-W, W]` for transform exports.
    pub window: f64,
}

impl Default for Numeric {
    fn default() -> Self {
        Self {
            depth: 12,
            spectrum_depth: 4,
            samples: 64,
            window: 1.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub sequence: MoranSequence,
    pub analysis: Toggles,
    pub numeric: Numeric,
    pub output: Outputs,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum RawDigit {
    Int(i64),
    Big(String),
}

type RawStage = (u64, Vec<RawDigit>);

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTail {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    period: Option<Vec<RawStage>>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    size: Option<String>,
    #[serde(rename = "n", default, skip_serializing_if = "Option::is_none")]
    multiplier: Option<String>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    scale: Option<String>,
}

impl Default for RawTail {
    fn default() -> Self {
        Self {
            kind: "empty".into(),
            period: None,
            size: None,
            multiplier: None,
            scale: None,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    prefix: Vec<RawStage>,
    #[serde(default)]
    tail: RawTail,
    #[serde(default)]
    analysis: Toggles,
    #[serde(default)]
    numeric: Numeric,
    #[serde(default)]
    output: Outputs,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn to_stage(raw: &RawStage, field: &str) -> Result<Stage, ConfigError> {
    let digits = raw
        .1
        .iter()
        .map(|d| match d {
            RawDigit::Int(v) => Ok(BigInt::from(*v)),
            RawDigit::Big(s) => s
                .trim()
                .parse::<BigInt>()
                .map_err(|_| ConfigError::validation(field, format!("digit {s:?} is not an integer"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Stage::new(raw.0, digits).map_err(|e| ConfigError::validation(field, e))
}

fn from_stage(s: &Stage) -> RawStage {
    let digits = s
        .digits
        .elements()
        .iter()
        .map(|b| match b.to_i64() {
            Some(v) => RawDigit::Int(v),
            None => RawDigit::Big(b.to_string()),
        })
        .collect();
    (s.scale, digits)
}

fn formula(text: &Option<String>, field: &str) -> Result<Formula, ConfigError> {
    let text = text
        .as_deref()
        .ok_or_else(|| ConfigError::validation(field, "missing formula"))?;
    Formula::parse(text).map_err(|e| ConfigError::validation(field, e))
}

fn tail_from_raw(raw: &RawTail) -> Result<Tail, ConfigError> {
    let unexpected = |present: bool, field: &str| {
        if present {
            Err(ConfigError::validation(
                field,
                format!("not used by tail kind {:?}", raw.kind),
            ))
        } else {
            Ok(())
        }
    };
    match raw.kind.as_str() {
        "empty" => {
            unexpected(raw.period.is_some(), "tail.period")?;
            unexpected(
                raw.size.is_some() || raw.scale.is_some() || raw.multiplier.is_some(),
                "tail",
            )?;
            Ok(Tail::Empty)
        }
        "periodic" => {
            unexpected(
                raw.size.is_some() || raw.scale.is_some() || raw.multiplier.is_some(),
                "tail",
            )?;
            let period = raw
                .period
                .as_ref()
                .ok_or_else(|| ConfigError::validation("tail.period", "missing"))?;
            if period.is_empty() {
                return Err(ConfigError::validation("tail.period", "must not be empty"));
            }
            let stages = period
                .iter()
                .enumerate()
                .map(|(i, s)| to_stage(s, &format!("tail.period[{i}]")))
                .collect::<Result<_, _>>()?;
            Ok(Tail::Periodic(stages))
        }
        "consecutive" => {
            unexpected(raw.period.is_some(), "tail.period")?;
            unexpected(raw.multiplier.is_some(), "tail.n")?;
            Ok(Tail::Consecutive {
                size: formula(&raw.size, "tail.M")?,
                scale: formula(&raw.scale, "tail.N")?,
            })
        }
        "shifted_top" => {
            unexpected(raw.period.is_some(), "tail.period")?;
            Ok(Tail::ShiftedTop {
                size: formula(&raw.size, "tail.M")?,
                multiplier: formula(&raw.multiplier, "tail.n")?,
                scale: formula(&raw.scale, "tail.N")?,
            })
        }
        other => Err(ConfigError::validation(
            "tail.kind",
            format!("unknown kind {other:?}; expected empty, periodic, consecutive or shifted_top"),
        )),
    }
}

fn check_numeric(n: &Numeric) -> Result<(), ConfigError> {
    if n.depth == 0 {
        return Err(ConfigError::validation("numeric.depth", "must be positive"));
    }
    if n.spectrum_depth == 0 {
        return Err(ConfigError::validation("numeric.spectrum_depth", "must be positive"));
    }
    if n.samples == 0 {
        return Err(ConfigError::validation("numeric.samples", "must be positive"));
    }
    if !(n.window > 0.0 && n.window.is_finite()) {
        return Err(ConfigError::validation("numeric.window", "must be positive and finite"));
    }
    Ok(())
}

impl AnalysisConfig {
    /// Default knobs and toggles around a sequence.
    pub fn for_sequence(sequence: MoranSequence) -> Self {
        Self {
            sequence,
            analysis: Toggles::default(),
            numeric: Numeric::default(),
            output: Outputs::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        check_numeric(&self.numeric)
    }

    pub fn to_toml(&self) -> String {
        let tail = match self.sequence.tail() {
            Tail::Empty => RawTail::default(),
            Tail::Periodic(p) => RawTail {
                kind: "periodic".into(),
                period: Some(p.iter().map(from_stage).collect()),
                ..RawTail::default()
            },
            Tail::Consecutive { size, scale } => RawTail {
                kind: "consecutive".into(),
                size: Some(size.to_string()),
                scale: Some(scale.to_string()),
                ..RawTail::default()
            },
            Tail::ShiftedTop {
                size,
                multiplier,
                scale,
            } => RawTail {
                kind: "shifted_top".into(),
                size: Some(size.to_string()),
                multiplier: Some(multiplier.to_string()),
                scale: Some(scale.to_string()),
                period: None,
            },
        };
        let raw = RawConfig {
            prefix: self.sequence.prefix().iter().map(from_stage).collect(),
            tail,
            analysis: self.analysis,
            numeric: self.numeric,
            output: self.output.clone(),
        };
        toml::to_string(&raw).expect("config serializes")
    }
}

/// Parses and validates a configuration file.
pub fn parse_config(text: &str) -> Result<AnalysisConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.span().map_or(1, |s| line_of(text, s.start)),
        reason: e.message().to_string(),
    })?;
    check_numeric(&raw.numeric)?;
    let prefix = raw
        .prefix
        .iter()
        .enumerate()
        .map(|(i, s)| to_stage(s, &format!("prefix[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let tail = tail_from_raw(&raw.tail)?;
    let sequence = MoranSequence::new(prefix, tail).map_err(|e| ConfigError::validation("tail", e))?;
    Ok(AnalysisConfig {
        sequence,
        analysis: raw.analysis,
        numeric: raw.numeric,
        output: raw.output,
    })
}
