//! Flat key = value scenario files with line-numbered diagnostics.

use fid_core::fiducial1d::FiducialVariant;
use fid_core::inference::Prior;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug)]
pub struct ScenarioError {
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, &self.field) {
            (Some(l), Some(k)) => write!(f, "line {l}, key '{k}': {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            (None, Some(k)) => write!(f, "key '{k}': {}", self.message),
            (None, None) => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ScenarioError {}

fn err(line: Option<usize>, field: Option<&str>, message: impl Into<String>) -> ScenarioError {
    ScenarioError {
        line,
        field: field.map(str::to_string),
        message: message.into(),
    }
}

/// The CLI commands; also accepted as a `command` key inside scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Density,
    Cdf,
    Quantile,
    Interval,
    Curve,
    Coverage,
    Risk,
    Gfd,
    CompareBayes,
    Sample,
    Crnef,
}

impl Command {
    pub fn parse(s: &str) -> Option<Command> {
        Some(match s {
            "density" => Command::Density,
            "cdf" => Command::Cdf,
            "quantile" => Command::Quantile,
            "interval" => Command::Interval,
            "curve" => Command::Curve,
            "coverage" => Command::Coverage,
            "risk" => Command::Risk,
            "gfd" => Command::Gfd,
            "compare-bayes" => Command::CompareBayes,
            "sample" => Command::Sample,
            "crnef" => Command::Crnef,
            _ => return None,
        })
    }

    pub fn key(&self) -> &'static str {
        match self {
            Command::Density => "density",
            Command::Cdf => "cdf",
            Command::Quantile => "quantile",
            Command::Interval => "interval",
            Command::Curve => "curve",
            Command::Coverage => "coverage",
            Command::Risk => "risk",
            Command::Gfd => "gfd",
            Command::CompareBayes => "compare-bayes",
            Command::Sample => "sample",
            Command::Crnef => "crnef",
        }
    }

    /// Stochastic commands require an explicit seed.
    pub fn stochastic(&self) -> bool {
        matches!(self, Command::Coverage | Command::Sample | Command::Crnef)
    }
}

/// Parameter space selector for the crnef command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Phi,
    Mu,
    P,
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub command: Command,
    pub model: Option<String>,
    /// Numeric model parameters (m, sigma2, alpha, x0, c, mu, trials, r, d, mcomp).
    pub params: BTreeMap<String, f64>,
    pub n: Option<u64>,
    pub stat: Vec<f64>,
    pub data: Vec<f64>,
    pub variant: Option<FiducialVariant>,
    /// `variant = all`: produce every applicable variant side by side.
    pub variant_all: bool,
    pub grid: Option<(f64, f64, usize)>,
    pub levels: Vec<f64>,
    pub replicates: usize,
    pub seed: Option<u64>,
    pub theta0: Option<f64>,
    pub prior: Option<Prior>,
    pub space: Space,
    pub out: Option<String>,
}

const MODEL_PARAM_KEYS: &[&str] = &[
    "m", "sigma2", "alpha", "x0", "c", "mu", "trials", "r", "d", "mcomp", "sigma",
];

/// Parse a scenario document and apply `--set key=value` overrides
/// (overrides carry no line numbers).
pub fn parse_scenario(
    text: &str,
    command: Command,
    overrides: &[(String, String)],
) -> Result<Scenario, ScenarioError> {
    let mut pairs: Vec<(String, String, Option<usize>)> = Vec::new();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for (i, raw_line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(err(Some(lineno), None, "expected 'key = value'"));
        };
        let key = line[..eq].trim().to_lowercase();
        let value = line[eq + 1..].trim().to_string();
        if key.is_empty() {
            return Err(err(Some(lineno), None, "empty key"));
        }
        if value.is_empty() {
            return Err(err(Some(lineno), Some(&key), "empty value"));
        }
        if let Some(first) = seen.insert(key.clone(), lineno) {
            return Err(err(
                Some(lineno),
                Some(&key),
                format!("duplicate key (first set on line {first})"),
            ));
        }
        pairs.push((key, value, Some(lineno)));
    }
    for (k, v) in overrides {
        let k = k.to_lowercase();
        pairs.retain(|(key, _, _)| key != &k);
        pairs.push((k, v.clone(), None));
    }

    let mut sc = Scenario {
        command,
        model: None,
        params: BTreeMap::new(),
        n: None,
        stat: Vec::new(),
        data: Vec::new(),
        variant: None,
        variant_all: false,
        grid: None,
        levels: vec![0.5, 0.8, 0.9, 0.95, 0.99],
        replicates: 10_000,
        seed: None,
        theta0: None,
        prior: None,
        space: Space::Phi,
        out: None,
    };

    for (key, value, line) in &pairs {
        let line = *line;
        match key.as_str() {
            "command" => {
                let c = Command::parse(value)
                    .ok_or_else(|| err(line, Some(key), format!("unknown command '{value}'")))?;
                if c != command {
                    return Err(err(
                        line,
                        Some(key),
                        format!(
                            "scenario says '{}' but the CLI invoked '{}'",
                            c.key(),
                            command.key()
                        ),
                    ));
                }
            }
            "model" => sc.model = Some(value.to_string()),
            "n" => sc.n = Some(parse_u64(value, line, key)?),
            "s" => sc.stat = parse_list(value, line, key)?,
            "data" => sc.data = parse_list(value, line, key)?,
            "variant" => {
                if value == "all" {
                    sc.variant_all = true;
                } else {
                    sc.variant = Some(
                        FiducialVariant::parse(value)
                            .map_err(|e| err(line, Some(key), e.to_string()))?,
                    );
                }
            }
            "grid" => {
                let v = parse_list(value, line, key)?;
                if v.len() != 3 {
                    return Err(err(line, Some(key), "grid needs 'lo, hi, points'"));
                }
                let points = v[2] as usize;
                if !(v[0] < v[1]) {
                    return Err(err(
                        line,
                        Some(key),
                        format!("grid requires lo < hi, got ({}, {})", v[0], v[1]),
                    ));
                }
                if points < 2 || (v[2] - points as f64).abs() > 1e-9 {
                    return Err(err(line, Some(key), "grid points must be an integer >= 2"));
                }
                sc.grid = Some((v[0], v[1], points));
            }
            "levels" | "level" => {
                sc.levels = parse_list(value, line, key)?;
                if sc.levels.iter().any(|l| !(*l > 0.0 && *l < 1.0)) {
                    return Err(err(line, Some(key), "levels must lie in (0, 1)"));
                }
            }
            "replicates" => sc.replicates = parse_u64(value, line, key)? as usize,
            "seed" => sc.seed = Some(parse_u64(value, line, key)?),
            "theta0" => sc.theta0 = Some(parse_f64(value, line, key)?),
            "prior" => {
                sc.prior =
                    Some(Prior::parse(value).map_err(|e| err(line, Some(key), e.to_string()))?)
            }
            "space" => {
                sc.space = match value.as_str() {
                    "phi" => Space::Phi,
                    "mu" => Space::Mu,
                    "p" => Space::P,
                    other => return Err(err(line, Some(key), format!("unknown space '{other}'"))),
                }
            }
            "out" => sc.out = Some(value.to_string()),
            k if MODEL_PARAM_KEYS.contains(&k) => {
                sc.params
                    .insert(k.to_string(), parse_f64(value, line, key)?);
            }
            _ => return Err(err(line, Some(key), "unknown key")),
        }
    }

    if command.stochastic() && sc.seed.is_none() {
        return Err(err(
            None,
            Some("seed"),
            format!(
                "the '{}' command is stochastic and needs a seed",
                command.key()
            ),
        ));
    }
    Ok(sc)
}

fn parse_f64(value: &str, line: Option<usize>, key: &str) -> Result<f64, ScenarioError> {
    value
        .parse::<f64>()
        .map_err(|_| err(line, Some(key), format!("'{value}' is not a number")))
}

fn parse_u64(value: &str, line: Option<usize>, key: &str) -> Result<u64, ScenarioError> {
    value.parse::<u64>().map_err(|_| {
        err(
            line,
            Some(key),
            format!("'{value}' is not a nonnegative integer"),
        )
    })
}

fn parse_list(value: &str, line: Option<usize>, key: &str) -> Result<Vec<f64>, ScenarioError> {
    value
        .split(',')
        .map(|v| parse_f64(v.trim(), line, key))
        .collect()
}
