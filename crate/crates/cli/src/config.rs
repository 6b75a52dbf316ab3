//! TOML run configuration and command-line overrides.
//!
//! ```toml
//! suites = ["young", "check_gagliardo_sobolev"]   # or ["all"]
//! hbar_list = [1.0, 0.5, 0.25]
//! seed = 42
//! output = "report"          # path prefix, extension added from `format`
//! format = "csv"             # or "json"
//! max_points = 512
//! diff_points_max = 96
//! vector_samples = 1000
//!
//! [grid]
//! d = 1
//! n_points = 64
//! half_width = 8.0
//!
//! [exponents]
//! s = [0.25, 0.5, 0.75, 1.0]
//! p = [1.0, 1.5, 2.0, 3.0]
//! r = [2.0]
//!
//! [[families]]
//! kind = "toplitz-gaussian"
//! rank = 8
//! width = 1.0
//! seed = 0
//! ```
//!
//! Every key is optional; missing keys take the harness defaults.

use std::path::PathBuf;

use qsobolev::harness::{FamilyKind, GridSpec, OperatorFamily, SuiteConfig, SuiteId};
use qsobolev::Error;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }

    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{field}: {message}")]
    Field { field: String, message: String },
}

fn field(name: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field: name.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub suite: SuiteConfig,
    /// Output path prefix; `None` writes to stdout.
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            suite: SuiteConfig::default(),
            output: None,
            format: Format::Csv,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.suite.validate().map_err(|e| match e {
            Error::Config { field, message } => ConfigError::Field { field, message },
            other => field("config", other.to_string()),
        })
    }

    /// Applies command-line flags on top of the file configuration.
    pub fn apply(&mut self, o: &Overrides) -> Result<(), ConfigError> {
        if let Some(ids) = &o.suites {
            self.suite.suites = parse_suites("--suite", ids)?;
        }
        if let Some(h) = &o.hbar {
            self.suite.hbar_list = h.clone();
        }
        if let Some(seed) = o.seed {
            self.suite.seed = seed;
        }
        if let Some(out) = &o.out {
            self.output = Some(out.clone());
        }
        if let Some(format) = o.format {
            self.format = format;
        }
        if let Some(text) = &o.grid {
            self.suite.grid = parse_grid(text)?;
            self.suite.max_points = self.suite.max_points.max(self.suite.grid.n_points);
        }
        self.validate()
    }
}

/// Flags that override the configuration file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub suites: Option<Vec<String>>,
    pub hbar: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub grid: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    suites: Option<Vec<String>>,
    families: Option<Vec<RawFamily>>,
    hbar_list: Option<Vec<f64>>,
    grid: Option<RawGrid>,
    exponents: Option<RawExponents>,
    seed: Option<u64>,
    output: Option<String>,
    format: Option<String>,
    max_points: Option<usize>,
    diff_points_max: Option<usize>,
    vector_samples: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    d: Option<usize>,
    n_points: Option<usize>,
    half_width: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExponents {
    s: Option<Vec<f64>>,
    p: Option<Vec<f64>>,
    r: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    kind: String,
    rank: Option<usize>,
    width: Option<f64>,
    seed: Option<u64>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses and validates a configuration file.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax {
        line: e.span().map_or(1, |s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    let mut cfg = RunConfig::default();
    let suite = &mut cfg.suite;
    if let Some(ids) = raw.suites {
        suite.suites = parse_suites("suites", &ids)?;
    }
    if let Some(families) = raw.families {
        suite.families = families
            .iter()
            .enumerate()
            .map(|(i, f)| parse_family(i, f))
            .collect::<Result<_, _>>()?;
    }
    if let Some(h) = raw.hbar_list {
        suite.hbar_list = h;
    }
    if let Some(g) = raw.grid {
        let base = GridSpec::default();
        suite.grid = GridSpec {
            d: g.d.unwrap_or(base.d),
            n_points: g.n_points.unwrap_or(base.n_points),
            half_width: g.half_width.unwrap_or(base.half_width),
        };
    }
    if let Some(e) = raw.exponents {
        if let Some(s) = e.s {
            suite.s_list = s;
        }
        if let Some(p) = e.p {
            suite.p_list = p;
        }
        if let Some(r) = e.r {
            suite.r_list = r;
        }
    }
    if let Some(seed) = raw.seed {
        suite.seed = seed;
    }
    if let Some(n) = raw.max_points {
        suite.max_points = n;
    }
    if let Some(n) = raw.diff_points_max {
        suite.diff_points_max = n;
    }
    if let Some(n) = raw.vector_samples {
        suite.vector_samples = n;
    }
    cfg.output = raw.output.map(PathBuf::from);
    if let Some(f) = raw.format {
        cfg.format = Format::parse(&f).ok_or_else(|| field("format", format!("expected csv or json, got `{f}`")))?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_suites(name: &str, ids: &[String]) -> Result<Vec<SuiteId>, ConfigError> {
    if ids.is_empty() {
        return Err(field(name, "must not be empty"));
    }
    if ids.iter().any(|s| s == "all") {
        return Ok(SuiteId::ALL.to_vec());
    }
    let mut out = Vec::new();
    for id in ids {
        let parsed = SuiteId::parse(id.trim()).ok_or_else(|| field(name, format!("unknown check id `{id}`")))?;
        if !out.contains(&parsed) {
            out.push(parsed);
        }
    }
    Ok(out)
}

fn parse_family(i: usize, raw: &RawFamily) -> Result<OperatorFamily, ConfigError> {
    let kind = FamilyKind::parse(&raw.kind).ok_or_else(|| {
        let known: Vec<_> = FamilyKind::ALL.iter().map(|k| k.id()).collect();
        field(&format!("families[{i}].kind"), format!("unknown family `{}`, expected one of {}", raw.kind, known.join(", ")))
    })?;
    let base = OperatorFamily::default_for(kind);
    OperatorFamily::new(
        kind,
        raw.rank.unwrap_or(base.rank),
        raw.width.unwrap_or(base.width),
        raw.seed.unwrap_or(base.seed),
    )
    .map_err(|e| field(&format!("families[{i}]"), e.to_string()))
}

/// `d,n,L`.
pub fn parse_grid(text: &str) -> Result<GridSpec, ConfigError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || field("--grid", format!("expected d,n,L, got `{text}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    Ok(GridSpec {
        d: parts[0].parse().map_err(|_| bad())?,
        n_points: parts[1].parse().map_err(|_| bad())?,
        half_width: parts[2].parse().map_err(|_| bad())?,
    })
}
