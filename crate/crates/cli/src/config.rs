//! Experiment configs: flat `key = value` files, or the same keys gathered
//! from subcommand flags.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operation {
    Gen,
    Percolate,
    Trim,
    Walk,
    Resist,
    Forest,
    OhdGap,
    EntropyProbe,
}

impl Operation {
    pub const ALL: [Operation; 8] = [
        Operation::Gen,
        Operation::Percolate,
        Operation::Trim,
        Operation::Walk,
        Operation::Resist,
        Operation::Forest,
        Operation::OhdGap,
        Operation::EntropyProbe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Operation::Gen => "gen",
            Operation::Percolate => "percolate",
            Operation::Trim => "trim",
            Operation::Walk => "walk",
            Operation::Resist => "resist",
            Operation::Forest => "forest",
            Operation::OhdGap => "ohd-gap",
            Operation::EntropyProbe => "entropy-probe",
        }
    }

    /// Parameter keys accepted besides `operation`, `seed`, `cap` and `output`.
    pub fn keys(self) -> &'static [&'static str] {
        match self {
            Operation::Gen => &["graph"],
            Operation::Percolate => &["graph", "p", "trials", "mode", "dump"],
            Operation::Trim => &["graph", "p", "h", "sweeps"],
            Operation::Walk => &["graph", "mode", "steps", "trials", "p"],
            Operation::Resist => &["graph", "radii", "p", "samples", "retry_cap"],
            Operation::Forest => &["graph", "bc", "trials"],
            Operation::OhdGap => &["graph", "radii", "trials"],
            Operation::EntropyProbe => &["n", "trials", "t", "step"],
        }
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where a value came from, for error positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Origin {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Value {
    pub text: String,
    pub origin: Option<Origin>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub operation: Operation,
    pub seed: Option<u64>,
    pub cap: Option<usize>,
    pub output: Option<String>,
    pub params: BTreeMap<String, Value>,
}

/// Errors that should exit with status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn at(origin: Option<Origin>, msg: impl fmt::Display) -> UsageError {
    match origin {
        Some(o) => UsageError(format!("line {}, column {}: {msg}", o.line, o.column)),
        None => UsageError(msg.to_string()),
    }
}

impl ExperimentConfig {
    pub fn new(operation: Operation) -> ExperimentConfig {
        ExperimentConfig {
            operation,
            seed: None,
            cap: None,
            output: None,
            params: BTreeMap::new(),
        }
    }

    /// Adds a flag value; `None` leaves the default in place.
    pub fn set(&mut self, key: &str, value: Option<impl ToString>) {
        if let Some(v) = value {
            self.params.insert(
                key.to_string(),
                Value {
                    text: v.to_string(),
                    origin: None,
                },
            );
        }
    }

    pub fn parse(text: &str) -> Result<ExperimentConfig, UsageError> {
        let mut operation = None;
        let mut seed = None;
        let mut cap = None;
        let mut output = None;
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let indent = raw.len() - raw.trim_start().len();
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') || body.starts_with(';') {
                continue;
            }
            let here = Some(Origin {
                line,
                column: indent + 1,
            });
            let Some((k, v)) = body.split_once('=') else {
                return Err(at(here, format!("expected `key = value`, found `{body}`")));
            };
            let key = k.trim();
            let value_col = indent + k.len() + 1 + (v.len() - v.trim_start().len()) + 1;
            let value = Value {
                text: v.trim().to_string(),
                origin: Some(Origin {
                    line,
                    column: value_col,
                }),
            };
            if key.is_empty() {
                return Err(at(here, "missing key"));
            }
            match key {
                "operation" => {
                    let op = Operation::ALL
                        .into_iter()
                        .find(|o| o.name() == value.text)
                        .ok_or_else(|| at(value.origin, format!("unknown operation `{}`", value.text)))?;
                    operation = Some(op);
                }
                "seed" => seed = Some(typed(&value, "seed")?),
                "cap" => cap = Some(typed(&value, "cap")?),
                "output" => output = Some(value.text.clone()),
                _ => entries.push((key.to_string(), value, here)),
            }
        }
        let operation = operation.ok_or_else(|| UsageError("config has no `operation` key".into()))?;
        let mut config = ExperimentConfig {
            operation,
            seed,
            cap,
            output,
            params: BTreeMap::new(),
        };
        for (key, value, origin) in entries {
            if !operation.keys().contains(&key.as_str()) {
                return Err(at(origin, format!("unknown key `{key}` for operation {operation}")));
            }
            if config.params.insert(key.clone(), value).is_some() {
                return Err(at(origin, format!("duplicate key `{key}`")));
            }
        }
        Ok(config)
    }
}

fn typed<T: FromStr>(value: &Value, key: &str) -> Result<T, UsageError>
where
    T::Err: fmt::Display,
{
    value
        .text
        .parse()
        .map_err(|e| at(value.origin, format!("bad value for `{key}`: {e}")))
}

/// Typed parameter access that records every value used, defaults
/// included, for the output header.
pub struct Params<'a> {
    config: &'a ExperimentConfig,
    pub resolved: BTreeMap<String, String>,
}

impl<'a> Params<'a> {
    pub fn new(config: &'a ExperimentConfig) -> Params<'a> {
        Params {
            config,
            resolved: BTreeMap::new(),
        }
    }

    pub fn origin(&self, key: &str) -> Option<Origin> {
        self.config.params.get(key).and_then(|v| v.origin)
    }

    pub fn raw(&mut self, key: &str) -> Option<String> {
        let v = self.config.params.get(key)?.text.clone();
        self.resolved.insert(key.into(), v.clone());
        Some(v)
    }

    pub fn required(&mut self, key: &str) -> Result<String, UsageError> {
        self.raw(key).ok_or_else(|| UsageError(format!("missing `{key}`")))
    }

    pub fn get<T: FromStr + ToString>(&mut self, key: &str, default: T) -> Result<T, UsageError>
    where
        T::Err: fmt::Display,
    {
        match self.config.params.get(key) {
            Some(v) => {
                let x = typed(v, key)?;
                self.resolved.insert(key.into(), v.text.clone());
                Ok(x)
            }
            None => {
                self.resolved.insert(key.into(), default.to_string());
                Ok(default)
            }
        }
    }

    pub fn optional<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, UsageError>
    where
        T::Err: fmt::Display,
    {
        match self.config.params.get(key) {
            Some(v) => {
                let x = typed(v, key)?;
                self.resolved.insert(key.into(), v.text.clone());
                Ok(Some(x))
            }
            None => Ok(None),
        }
    }

    /// A comma-separated list.
    pub fn list<T: FromStr>(&mut self, key: &str, default: &str) -> Result<Vec<T>, UsageError>
    where
        T::Err: fmt::Display,
    {
        let text = self
            .config
            .params
            .get(key)
            .map_or(default.to_string(), |v| v.text.clone());
        let origin = self.origin(key);
        self.resolved.insert(key.into(), text.clone());
        text.split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|e| at(origin, format!("bad entry `{s}` in `{key}`: {e}")))
            })
            .collect()
    }

    /// Rewrites a library parse error so positions point into the config.
    pub fn locate(&self, key: &str, e: percolab::Error) -> UsageError {
        match (e, self.origin(key)) {
            (percolab::Error::Parse { column, message, .. }, Some(o)) => {
                UsageError(format!("line {}, column {}: {message}", o.line, o.column + column - 1))
            }
            (e, _) => UsageError(format!("{key}: {e}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_config() {
        let c =
            ExperimentConfig::parse("# trim run\noperation = trim\ngraph = tree:3:r12\n\nh=0.1\nseed = 7\n").unwrap();
        assert_eq!(c.operation, Operation::Trim);
        assert_eq!(c.seed, Some(7));
        assert_eq!(c.params["h"].text, "0.1");
        assert_eq!(c.params["h"].origin, Some(Origin { line: 5, column: 3 }));
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        let e = ExperimentConfig::parse("operation = trim\n  bogus = 1\n").unwrap_err();
        assert_eq!(e.0, "line 2, column 3: unknown key `bogus` for operation trim");
        assert!(ExperimentConfig::parse("operation = trim\nh = 1\nh = 2\n").is_err());
        assert!(ExperimentConfig::parse("graph = tree:3:r2\n").is_err());
        assert!(ExperimentConfig::parse("operation = trim\nnonsense\n").is_err());
        assert!(ExperimentConfig::parse("operation = fly\n").is_err());
    }

    #[test]
    fn dsl_errors_point_into_the_file() {
        let c = ExperimentConfig::parse("operation = gen\ngraph = tree:3\n").unwrap();
        let mut p = Params::new(&c);
        let text = p.required("graph").unwrap();
        let e = percolab::graph::GraphSpec::parse(&text).unwrap_err();
        assert!(p.locate("graph", e).0.starts_with("line 2, column "));
    }
}
