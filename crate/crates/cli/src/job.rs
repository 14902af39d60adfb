use std::path::PathBuf;

use calogero::exactmath::rational::{self, Rational};
use calogero::presets;
use calogero::rootsys::{AmbientVector, RootSystemType};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Everything a subcommand may read. Flags override a JSON spec file, which
/// overrides a preset.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "type")]
    pub system: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q0: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p0: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q2: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub match_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiset: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unique: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shards: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resume: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident, $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl JobSpec {
    /// Fields of `other` that are set replace those of `self`.
    pub fn overlay(mut self, other: &JobSpec) -> JobSpec {
        overlay!(
            self, other, command, preset, system, q0, p0, q2, t, t0, t1, steps, method, cluster_tol, match_tol,
            multiset, unique, format, output, bound, shards, resume, threads
        );
        self
    }

    /// Names of the fields that are set.
    pub fn set_fields(&self) -> Vec<&'static str> {
        let v = serde_json::to_value(self).expect("job spec serializes");
        let obj = v.as_object().expect("object");
        FIELDS.iter().copied().filter(|f| obj.contains_key(*f)).collect()
    }

    /// The built-in preset's values as a job spec.
    pub fn from_preset(name: &str) -> Result<JobSpec, CliError> {
        let p = presets::preset(name).ok_or_else(|| {
            CliError::invalid(format!("unknown preset {name:?}; known: {}", presets::NAMES.join(", ")))
        })?;
        Ok(JobSpec {
            preset: Some(name.to_string()),
            system: Some(p.ty.to_string()),
            q0: Some(p.q0.to_strings()),
            p0: Some(p.p0.to_strings()),
            q2: p.q2.map(|q| q.to_strings()),
            t0: Some(float_to_rational_string(p.window.0)),
            t1: Some(float_to_rational_string(p.window.1)),
            steps: Some(p.steps),
            ..Default::default()
        })
    }

    pub fn system(&self) -> Result<RootSystemType, CliError> {
        let s = self.system.as_deref().ok_or_else(|| CliError::invalid("missing --type (or --preset)"))?;
        s.parse().map_err(|e| CliError::invalid(format!("{e}")))
    }

    pub fn vector(&self, name: &str) -> Result<AmbientVector, CliError> {
        let v = match name {
            "q0" => &self.q0,
            "p0" => &self.p0,
            "q2" => &self.q2,
            _ => unreachable!(),
        };
        let v = v.as_ref().ok_or_else(|| CliError::invalid(format!("missing --{name}")))?;
        Ok(AmbientVector(parse_rationals(v)?))
    }

    pub fn rational(&self, name: &str) -> Result<Option<Rational>, CliError> {
        let v = match name {
            "t" => &self.t,
            "t0" => &self.t0,
            "t1" => &self.t1,
            _ => unreachable!(),
        };
        v.as_deref().map(parse_rational).transpose()
    }
}

pub const FIELDS: [&str; 21] = [
    "command", "preset", "type", "q0", "p0", "q2", "t", "t0", "t1", "steps", "method", "cluster_tol", "match_tol",
    "multiset", "unique", "format", "output", "bound", "shards", "resume", "threads",
];

pub fn parse_rational(s: &str) -> Result<Rational, CliError> {
    rational::parse(s.trim()).map_err(|e| CliError::invalid(e.to_string()))
}

pub fn parse_rationals(v: &[String]) -> Result<Vec<Rational>, CliError> {
    v.iter().map(|s| parse_rational(s)).collect()
}

/// Splits a comma-separated flag value.
pub fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect()
}

fn float_to_rational_string(x: f64) -> String {
    rational::to_string(&rational::from_f64(x))
}
