//! Declarative JSON experiment configuration. A single JSON object describes
//! one experiment; a JSON array of such objects is a batch. The schema is
//! versioned via a mandatory `"schema": 1` field and documented in the
//! repository README.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bounds::BoundId;
use crate::csvio;
use crate::error::{Error, Result};
use crate::experiment::{
    log_points, log_points_double, CiMethod, ExperimentConfig, LeverageDistribution,
    MatrixSource, SweepSpec,
};
use crate::plot::PlotStyle;
use crate::sampling::SampleMethod;

pub const SCHEMA_VERSION: u32 = 1;

/// A scalar, an explicit grid, or a log-spaced range description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridField {
    Scalar(f64),
    List(Vec<f64>),
    Range { lo: f64, hi: f64, count: usize },
}

impl GridField {
    fn is_vector(&self) -> bool {
        !matches!(self, GridField::Scalar(_))
    }
}

/// Where the experiment's test matrix comes from, as written in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    /// Path to a CSV matrix with orthonormal columns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    /// Leverage distribution driving the built-in generator:
    /// "one-big", "many-big", or "explicit".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leverage: Option<String>,
    /// Explicit leverage scores (with `"leverage": "explicit"`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scores: Option<Vec<f64>>,
    /// CSV file of leverage scores, one per line (alternative to `scores`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scores_file: Option<String>,
}

/// One parsed configuration entry, not yet resolved against the filesystem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigEntry {
    pub schema: u32,
    /// Output-name stem; mandatory inside a batch.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub m: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<GridField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<GridField>,
    #[serde(default)]
    pub runs: usize,
    pub delta: f64,
    #[serde(default)]
    pub samplers: Vec<String>,
    #[serde(default)]
    pub bounds: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_ci_level")]
    pub ci_level: f64,
    #[serde(default = "default_ci_method")]
    pub ci_method: CiMethod,
    #[serde(default)]
    pub recompute_leverage: bool,
    #[serde(default)]
    pub plot: PlotStyle,
}

fn default_ci_level() -> f64 {
    0.95
}

fn default_ci_method() -> CiMethod {
    CiMethod::Wald
}

/// Result of parsing a configuration document.
#[derive(Debug, Clone, PartialEq)]
pub enum ParsedConfig {
    Single(ConfigEntry),
    Batch(Vec<ConfigEntry>),
}

/// Parses a JSON document: an object is one experiment, an array is a batch.
pub fn parse_config(text: &str) -> Result<ParsedConfig> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid JSON: {e}")))?;
    match value {
        serde_json::Value::Array(items) => {
            let mut entries = Vec::with_capacity(items.len());
            let mut names = BTreeSet::new();
            for (k, item) in items.into_iter().enumerate() {
                let entry = entry_from_value(item)
                    .map_err(|e| Error::Config(format!("batch entry {}: {e}", k + 1)))?;
                let name = entry.name.clone().ok_or_else(|| {
                    Error::Config(format!("batch entry {}: missing \"name\"", k + 1))
                })?;
                if !names.insert(name.clone()) {
                    return Err(Error::Config(format!(
                        "duplicate batch entry name \"{name}\""
                    )));
                }
                entries.push(entry);
            }
            Ok(ParsedConfig::Batch(entries))
        }
        obj @ serde_json::Value::Object(_) => {
            Ok(ParsedConfig::Single(entry_from_value(obj).map_err(|e| Error::Config(e))?))
        }
        _ => Err(Error::Config(
            "top-level JSON must be an object (experiment) or array (batch)".into(),
        )),
    }
}

fn entry_from_value(value: serde_json::Value) -> std::result::Result<ConfigEntry, String> {
    let entry: ConfigEntry = serde_json::from_value(value).map_err(|e| e.to_string())?;
    entry.check_schema()?;
    Ok(entry)
}

impl ConfigEntry {
    fn check_schema(&self) -> std::result::Result<(), String> {
        if self.schema != SCHEMA_VERSION {
            return Err(format!(
                "schema: unsupported version {} (this build reads {SCHEMA_VERSION})",
                self.schema
            ));
        }
        let c_vec = self.c.as_ref().is_some_and(GridField::is_vector);
        let mu_vec = self.mu.as_ref().is_some_and(GridField::is_vector);
        if c_vec && mu_vec {
            return Err("c, mu: exactly one of the two may be a vector".into());
        }
        if !c_vec && !mu_vec {
            return Err("c, mu: one of the two must be a vector (the swept quantity)".into());
        }
        for name in &self.samplers {
            if SampleMethod::from_name(name).is_none() {
                return Err(format!("samplers: unknown sampler \"{name}\""));
            }
        }
        for name in &self.bounds {
            if BoundId::from_name(name).is_none() {
                return Err(format!("bounds: unknown bound \"{name}\""));
            }
        }
        if let Some(spec) = &self.matrix {
            let generated = spec.leverage.is_some();
            if spec.file.is_some() && generated {
                return Err("matrix: give either \"file\" or \"leverage\", not both".into());
            }
            if spec.file.is_none() && !generated {
                return Err("matrix: requires \"file\" or \"leverage\"".into());
            }
            if let Some(kind) = spec.leverage.as_deref() {
                match kind {
                    "one-big" | "many-big" => {
                        if spec.scores.is_some() || spec.scores_file.is_some() {
                            return Err(format!(
                                "matrix: \"{kind}\" takes no explicit scores"
                            ));
                        }
                    }
                    "explicit" => {
                        if spec.scores.is_some() == spec.scores_file.is_some() {
                            return Err(
                                "matrix: \"explicit\" needs exactly one of \"scores\" or \
                                 \"scores_file\""
                                    .into(),
                            );
                        }
                    }
                    other => {
                        return Err(format!(
                            "matrix.leverage: unknown distribution \"{other}\" \
                             (expected one-big, many-big or explicit)"
                        ))
                    }
                }
            }
            if spec.file.is_some() && (spec.scores.is_some() || spec.scores_file.is_some()) {
                return Err("matrix: \"file\" takes no leverage scores".into());
            }
        }
        if let Err(e) = self.plot.validate() {
            return Err(format!("plot: {e}"));
        }
        Ok(())
    }

    /// Expands the swept grid and loads any referenced files, producing a
    /// runnable [`ExperimentConfig`]. Relative paths inside the config are
    /// resolved against `base_dir`; `seed_override` (the CLI `--seed`) wins
    /// over the entry's own seed.
    pub fn resolve(
        &self,
        base_dir: &Path,
        seed_override: Option<u64>,
    ) -> Result<ExperimentConfig> {
        let sweep = self.resolve_sweep()?;
        let matrix_source = match &self.matrix {
            None => None,
            Some(spec) => Some(self.resolve_matrix(spec, base_dir)?),
        };
        let seed = seed_override.or(self.seed).ok_or_else(|| {
            Error::Config("no seed: set \"seed\" in the config or pass --seed".into())
        })?;
        Ok(ExperimentConfig {
            m: self.m,
            n: self.n,
            sweep,
            samplers: self
                .samplers
                .iter()
                .map(|s| SampleMethod::from_name(s).expect("validated"))
                .collect(),
            bounds: self
                .bounds
                .iter()
                .map(|b| BoundId::from_name(b).expect("validated"))
                .collect(),
            runs: self.runs,
            delta: self.delta,
            matrix_source,
            seed,
            ci_level: self.ci_level,
            ci_method: self.ci_method,
            recompute_leverage: self.recompute_leverage,
        })
    }

    fn resolve_sweep(&self) -> Result<SweepSpec> {
        let scalar_f64 = |field: &Option<GridField>, what: &str| -> Result<Option<f64>> {
            match field {
                None => Ok(None),
                Some(GridField::Scalar(v)) => Ok(Some(*v)),
                Some(_) => Err(Error::Config(format!("{what}: expected a scalar"))),
            }
        };
        if self.c.as_ref().is_some_and(GridField::is_vector) {
            let values = match self.c.as_ref().unwrap() {
                GridField::List(vals) => vals
                    .iter()
                    .map(|&v| as_count(v, "c"))
                    .collect::<Result<Vec<usize>>>()?,
                GridField::Range { lo, hi, count } => {
                    let lo = as_count(*lo, "c.lo")? as u64;
                    let hi = as_count(*hi, "c.hi")? as u64;
                    log_points(lo, hi, *count)?
                        .into_iter()
                        .map(|v| v as usize)
                        .collect()
                }
                GridField::Scalar(_) => unreachable!(),
            };
            let mu = match scalar_f64(&self.mu, "mu")? {
                Some(mu) => mu,
                // with an explicit matrix the coherence is measured from it;
                // the placeholder passes validation and is replaced on load
                None if self.matrix.as_ref().is_some_and(|m| m.file.is_some()) => {
                    self.n as f64 / self.m as f64
                }
                None => {
                    return Err(Error::Config(
                        "mu: required as a scalar when c is swept (unless the matrix comes \
                         from a file)"
                            .into(),
                    ))
                }
            };
            Ok(SweepSpec::SampleCount { values, mu })
        } else {
            let values = match self.mu.as_ref().unwrap() {
                GridField::List(vals) => vals.clone(),
                GridField::Range { lo, hi, count } => log_points_double(*lo, *hi, *count)?,
                GridField::Scalar(_) => unreachable!(),
            };
            let c = scalar_f64(&self.c, "c")?
                .ok_or_else(|| Error::Config("c: required as a scalar when mu is swept".into()))?;
            Ok(SweepSpec::Coherence {
                values,
                c: as_count(c, "c")?,
            })
        }
    }

    fn resolve_matrix(&self, spec: &MatrixSpec, base_dir: &Path) -> Result<MatrixSource> {
        if let Some(file) = &spec.file {
            let q = csvio::read_matrix_csv(&join(base_dir, file))?;
            return Ok(MatrixSource::Explicit(q));
        }
        let dist = match spec.leverage.as_deref().expect("validated") {
            "one-big" => LeverageDistribution::OneBig,
            "many-big" => LeverageDistribution::ManyBig,
            "explicit" => {
                let scores = match (&spec.scores, &spec.scores_file) {
                    (Some(scores), None) => scores.clone(),
                    (None, Some(file)) => csvio::read_profile_csv(&join(base_dir, file))?,
                    _ => unreachable!("validated"),
                };
                LeverageDistribution::Explicit(scores)
            }
            _ => unreachable!("validated"),
        };
        Ok(MatrixSource::Generated(dist))
    }

    /// The output stem for this entry inside a batch: `<batch_stem>_<index>`
    /// with a 1-based index.
    pub fn batch_stem(batch_stem: &Path, index: usize) -> PathBuf {
        let mut name = batch_stem.file_name().unwrap_or_default().to_os_string();
        name.push(format!("_{index}"));
        batch_stem.with_file_name(name)
    }
}

fn join(base: &Path, rel: &str) -> PathBuf {
    let p = Path::new(rel);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn as_count(v: f64, what: &str) -> Result<usize> {
    if v.fract() != 0.0 || v < 1.0 || v > u32::MAX as f64 {
        return Err(Error::Config(format!("{what}: expected a positive integer, got {v}")));
    }
    Ok(v as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE1: &str = r#"{
        "schema": 1,
        "m": 500,
        "n": 4,
        "c": {"lo": 4, "hi": 500, "count": 20},
        "mu": 0.016,
        "runs": 10,
        "delta": 0.01,
        "samplers": ["with-replacement"],
        "bounds": ["b1-chernoff"],
        "matrix": {"leverage": "one-big"},
        "seed": 42
    }"#;

    #[test]
    fn parses_minimal_experiment() {
        let parsed = parse_config(EXAMPLE1).unwrap();
        let ParsedConfig::Single(entry) = parsed else {
            panic!("expected a single experiment");
        };
        let config = entry.resolve(Path::new("."), None).unwrap();
        assert_eq!(config.m, 500);
        assert_eq!(config.n, 4);
        assert_eq!(config.seed, 42);
        match &config.sweep {
            SweepSpec::SampleCount { values, mu } => {
                assert_eq!(*values.first().unwrap(), 4);
                assert_eq!(*values.last().unwrap(), 500);
                assert_eq!(*mu, 0.016);
            }
            other => panic!("wrong sweep {other:?}"),
        }
        assert_eq!(config.samplers, vec![SampleMethod::WithReplacement]);
        assert_eq!(config.bounds, vec![BoundId::B1Chernoff]);
        assert!(matches!(
            config.matrix_source,
            Some(MatrixSource::Generated(LeverageDistribution::OneBig))
        ));
    }

    #[test]
    fn rejects_two_vectors() {
        let text = r#"{
            "schema": 1, "m": 100, "n": 2,
            "c": [10, 50], "mu": [0.1, 0.5],
            "runs": 1, "delta": 0.01,
            "samplers": ["bernoulli"],
            "matrix": {"leverage": "one-big"}
        }"#;
        let err = parse_config(text).unwrap_err().to_string();
        assert!(err.contains("exactly one"), "{err}");
    }

    #[test]
    fn rejects_no_vector() {
        let text = r#"{
            "schema": 1, "m": 100, "n": 2, "c": 50, "mu": 0.1,
            "runs": 1, "delta": 0.01, "samplers": ["bernoulli"],
            "matrix": {"leverage": "one-big"}
        }"#;
        assert!(parse_config(text).is_err());
    }

    #[test]
    fn rejects_unknown_bound_with_name() {
        let text = r#"{
            "schema": 1, "m": 100, "n": 2, "c": [10, 50], "mu": 0.1,
            "runs": 1, "delta": 0.01, "bounds": ["b9-imaginary"],
            "samplers": [], "matrix": {"leverage": "one-big"}
        }"#;
        let err = parse_config(text).unwrap_err().to_string();
        assert!(err.contains("b9-imaginary"), "{err}");
    }

    #[test]
    fn rejects_unknown_field() {
        let text = r#"{
            "schema": 1, "m": 100, "n": 2, "c": [10, 50], "mu": 0.1,
            "runs": 1, "delta": 0.01, "samplers": [], "bounds": ["b4"],
            "wat": true
        }"#;
        let err = parse_config(text).unwrap_err().to_string();
        assert!(err.contains("wat"), "{err}");
    }

    #[test]
    fn rejects_wrong_schema_version() {
        let text = r#"{
            "schema": 2, "m": 100, "n": 2, "c": [10, 50], "mu": 0.1,
            "runs": 1, "delta": 0.01, "samplers": [], "bounds": ["b4"]
        }"#;
        let err = parse_config(text).unwrap_err().to_string();
        assert!(err.contains("schema"), "{err}");
    }

    #[test]
    fn missing_seed_is_a_resolve_error() {
        let text = r#"{
            "schema": 1, "m": 100, "n": 2, "c": [10, 50], "mu": 0.1,
            "runs": 2, "delta": 0.01, "samplers": ["bernoulli"],
            "matrix": {"leverage": "many-big"}
        }"#;
        let ParsedConfig::Single(entry) = parse_config(text).unwrap() else {
            panic!()
        };
        assert!(entry.resolve(Path::new("."), None).is_err());
        assert_eq!(entry.resolve(Path::new("."), Some(7)).unwrap().seed, 7);
    }

    #[test]
    fn batch_requires_unique_names() {
        let text = r#"[
            {"schema": 1, "name": "a", "m": 50, "n": 2, "c": [5, 20], "mu": 0.1,
             "runs": 1, "delta": 0.01, "samplers": ["bernoulli"],
             "matrix": {"leverage": "one-big"}, "seed": 1},
            {"schema": 1, "name": "a", "m": 50, "n": 2, "c": [5, 20], "mu": 0.1,
             "runs": 1, "delta": 0.01, "samplers": ["bernoulli"],
             "matrix": {"leverage": "one-big"}, "seed": 2}
        ]"#;
        let err = parse_config(text).unwrap_err().to_string();
        assert!(err.contains("duplicate"), "{err}");
    }

    #[test]
    fn batch_requires_names() {
        let text = r#"[
            {"schema": 1, "m": 50, "n": 2, "c": [5, 20], "mu": 0.1,
             "runs": 1, "delta": 0.01, "samplers": ["bernoulli"],
             "matrix": {"leverage": "one-big"}, "seed": 1}
        ]"#;
        let err = parse_config(text).unwrap_err().to_string();
        assert!(err.contains("name"), "{err}");
    }

    #[test]
    fn empty_batch_parses() {
        assert_eq!(parse_config("[]").unwrap(), ParsedConfig::Batch(vec![]));
    }

    #[test]
    fn mu_sweep_with_scalar_c() {
        let text = r#"{
            "schema": 1, "m": 200, "n": 3, "c": 60,
            "mu": {"lo": 0.015, "hi": 1.0, "count": 5},
            "runs": 2, "delta": 0.05, "samplers": ["without-replacement"],
            "matrix": {"leverage": "many-big"}, "seed": 3
        }"#;
        let ParsedConfig::Single(entry) = parse_config(text).unwrap() else {
            panic!()
        };
        let config = entry.resolve(Path::new("."), None).unwrap();
        match config.sweep {
            SweepSpec::Coherence { values, c } => {
                assert_eq!(c, 60);
                assert_eq!(values.len(), 5);
                assert_eq!(values[0], 0.015);
                assert_eq!(values[4], 1.0);
            }
            other => panic!("wrong sweep {other:?}"),
        }
    }

    #[test]
    fn explicit_scores_inline() {
        let text = r#"{
            "schema": 1, "m": 3, "n": 1, "c": [1, 3], "mu": 1.0,
            "runs": 1, "delta": 0.1, "samplers": ["proportional-to-leverage"],
            "matrix": {"leverage": "explicit", "scores": [1.0, 0.0, 0.0]},
            "seed": 5
        }"#;
        let ParsedConfig::Single(entry) = parse_config(text).unwrap() else {
            panic!()
        };
        let config = entry.resolve(Path::new("."), None).unwrap();
        assert!(matches!(
            config.matrix_source,
            Some(MatrixSource::Generated(LeverageDistribution::Explicit(_)))
        ));
    }

    #[test]
    fn non_integer_c_rejected() {
        let text = r#"{
            "schema": 1, "m": 100, "n": 2, "c": [10.5, 50], "mu": 0.1,
            "runs": 1, "delta": 0.01, "samplers": ["bernoulli"],
            "matrix": {"leverage": "one-big"}, "seed": 1
        }"#;
        let ParsedConfig::Single(entry) = parse_config(text).unwrap() else {
            panic!()
        };
        assert!(entry.resolve(Path::new("."), None).is_err());
    }

    #[test]
    fn matrix_spec_conflicts_rejected() {
        for matrix in [
            r#"{"file": "q.csv", "leverage": "one-big"}"#,
            r#"{}"#,
            r#"{"leverage": "explicit"}"#,
            r#"{"leverage": "explicit", "scores": [1.0], "scores_file": "p.csv"}"#,
            r#"{"leverage": "one-big", "scores": [1.0]}"#,
            r#"{"leverage": "uniform-ish"}"#,
        ] {
            let text = format!(
                r#"{{"schema": 1, "m": 10, "n": 1, "c": [2, 5], "mu": 0.5,
                    "runs": 1, "delta": 0.1, "samplers": ["bernoulli"],
                    "matrix": {matrix}, "seed": 1}}"#
            );
            assert!(parse_config(&text).is_err(), "accepted: {matrix}");
        }
    }
}
