//! Experiment configuration: a flat `key = value` file merged with flag
//! overrides, validated before any command produces output.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use expobern::report::OutputFormat;
use expobern::tensor::Grid;
use expobern::{builtin_corpus, Corpus, OperatorKind, OperatorParams};

pub const KEYS: &[&str] = &[
    "mu", "d", "n", "function", "grid", "operator", "format", "out", "seed", "timing", "point", "points",
];

/// Raw settings as text, in the order file < flags.
#[derive(Debug, Default, Clone)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn from_file(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Self::parse(&text)
    }

    /// Parses `key = value` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut raw = Self::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key = value", lineno + 1))?;
            raw.set(key.trim(), value.trim())
                .map_err(|e| format!("config line {}: {e}", lineno + 1))?;
        }
        Ok(raw)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let key = match key {
            "functions" => "function",
            "n_list" => "n",
            other => other,
        };
        if !KEYS.contains(&key) {
            return Err(format!("unknown key `{key}`"));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Verify,
    Converge,
    Eval,
    Gamma,
}

impl Command {
    fn default_n_list(self) -> Vec<u32> {
        match self {
            Command::Verify => vec![5, 20, 100],
            Command::Converge => vec![25, 50, 100, 200, 400],
            Command::Eval => vec![50],
            Command::Gamma => vec![10, 100, 1000, 10_000],
        }
    }
}

/// Validated settings shared by all subcommands.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub mu: f64,
    pub d: usize,
    pub n_list: Vec<u32>,
    pub functions: Vec<String>,
    pub grid: Option<Vec<usize>>,
    pub operator: OperatorKind,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub timing: bool,
    pub points: Vec<Vec<f64>>,
    pub corpus: Corpus,
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String> {
    v.trim().parse().map_err(|_| format!("invalid value for {key}: `{v}`"))
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>, String> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse_num(key, s)).collect()
}

fn parse_bool(key: &str, v: &str) -> Result<bool, String> {
    match v.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(format!("invalid value for {key}: `{v}`")),
    }
}

/// A point as comma- or whitespace-separated coordinates.
pub fn parse_point(text: &str, d: usize) -> Result<Vec<f64>, String> {
    let coords: Vec<f64> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| format!("malformed point `{text}`")))
        .collect::<Result<_, _>>()?;
    if coords.len() != d {
        return Err(format!("point `{text}` has {} coordinates, expected d = {d}", coords.len()));
    }
    if coords.iter().any(|c| !(0.0..=1.0).contains(c)) {
        return Err(format!("point `{text}` lies outside the unit cube"));
    }
    Ok(coords)
}

impl ExperimentConfig {
    pub fn resolve(raw: &RawConfig, command: Command) -> Result<Self, String> {
        let mu: f64 = raw.get("mu").map(|v| parse_num("mu", v)).transpose()?.unwrap_or(1.0);
        if !mu.is_finite() || mu < 0.0 {
            return Err(format!("mu must be finite and >= 0, got {mu}"));
        }
        let d: usize = raw.get("d").map(|v| parse_num("d", v)).transpose()?.unwrap_or(2);
        let d_max = expobern::d_max();
        if d == 0 || d > d_max {
            return Err(format!("d must lie in 1..={d_max}, got {d}"));
        }

        let n_list: Vec<u32> = match raw.get("n") {
            Some(v) => parse_list("n", v)?,
            None => command.default_n_list(),
        };
        if n_list.is_empty() {
            return Err("n list is empty".into());
        }
        if n_list[0] == 0 || n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err("n list must be positive and strictly increasing".into());
        }
        OperatorParams::new(n_list[0], mu, d).map_err(|e| e.to_string())?;

        let corpus = builtin_corpus(d, mu).map_err(|e| e.to_string())?;
        let functions: Vec<String> = match raw.get("function") {
            Some(v) => v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
            None => corpus.names().into_iter().map(String::from).collect(),
        };
        if functions.is_empty() {
            return Err("function list is empty".into());
        }
        for name in &functions {
            corpus.lookup(name).map_err(|e| e.to_string())?;
        }

        let grid = match raw.get("grid") {
            None => None,
            Some(v) => {
                let res: Vec<usize> = parse_list("grid", v)?;
                let res = match res.len() {
                    1 => vec![res[0]; d],
                    len if len == d => res,
                    len => return Err(format!("grid lists {len} resolutions for d = {d}")),
                };
                Grid::with_resolutions(&res).map_err(|e| e.to_string())?;
                Some(res)
            }
        };
        if command == Command::Gamma {
            if let Some(res) = &grid {
                if res[0] < 1000 {
                    return Err(format!("gamma grid resolution must be >= 1000, got {}", res[0]));
                }
            }
        }

        let operator = match raw.get("operator") {
            Some(v) => v.parse().map_err(|e: expobern::Error| e.to_string())?,
            None => OperatorKind::Exponential,
        };
        let format = match raw.get("format") {
            Some(v) => v.parse().map_err(|e: expobern::Error| e.to_string())?,
            None => OutputFormat::Csv,
        };
        let out = raw.get("out").map(PathBuf::from);
        let seed = raw.get("seed").map(|v| parse_num("seed", v)).transpose()?.unwrap_or(42);
        let timing = raw.get("timing").map(|v| parse_bool("timing", v)).transpose()?.unwrap_or(false);

        let mut points = Vec::new();
        if let Some(v) = raw.get("point") {
            for p in v.split(';').filter(|s| !s.trim().is_empty()) {
                points.push(parse_point(p, d)?);
            }
        }
        if let Some(path) = raw.get("points") {
            let text = fs::read_to_string(path).map_err(|e| format!("cannot read points file {path}: {e}"))?;
            for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
                points.push(parse_point(line, d)?);
            }
        }
        if command == Command::Eval && points.is_empty() {
            return Err("eval needs --point or --points".into());
        }

        Ok(Self {
            mu,
            d,
            n_list,
            functions,
            grid,
            operator,
            format,
            out,
            seed,
            timing,
            points,
            corpus,
        })
    }

    pub fn grid(&self) -> Grid {
        match &self.grid {
            Some(res) => Grid::with_resolutions(res).expect("validated"),
            None => Grid::default_for(self.d),
        }
    }

    pub fn params(&self, n: u32) -> OperatorParams {
        OperatorParams::new(n, self.mu, self.d).expect("validated")
    }
}
