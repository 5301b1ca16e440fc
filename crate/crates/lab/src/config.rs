//! Flat `key = value` run configuration files.
//!
//! Blank lines and everything after `#` are ignored. Keys not listed in
//! [`KEYS`] are rejected, as are repeated keys.

use std::fmt::Write as _;
use std::str::FromStr;

use persistence_core::functionals::FunctionalParams;
use persistence_core::StableParams;
use serde::Serialize;

use crate::error::{LabError, LabResult};
use crate::identities::CheckConfig;
use crate::montecarlo::MonteCarloConfig;

pub const KEYS: [&str; 15] = [
    "alpha",
    "kappa",
    "chi",
    "beta",
    "level",
    "paths",
    "steps",
    "horizon",
    "seed",
    "threads",
    "extension",
    "pv_epsilon",
    "bandwidth",
    "suite",
    "samples",
];

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub alpha: f64,
    /// `None` means 1/2 for `α = 2` and 1 otherwise.
    pub kappa: Option<f64>,
    pub chi: f64,
    /// `None` stops the process itself instead of a functional.
    pub beta: Option<f64>,
    pub level: f64,
    pub paths: usize,
    pub steps: usize,
    pub horizon: f64,
    pub seed: u64,
    /// 0 = one worker per core. Left out of JSON echoes, which must not
    /// depend on the thread count.
    #[serde(skip)]
    pub threads: usize,
    pub extension: usize,
    pub pv_epsilon: Option<f64>,
    pub bandwidth: Option<f64>,
    pub suite: String,
    /// Number of draws for `sample`.
    pub samples: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha: 2.0,
            kappa: None,
            chi: 0.0,
            beta: None,
            level: 1.0,
            paths: 10_000,
            steps: 4096,
            horizon: 400.0,
            seed: DEFAULT_SEED,
            threads: 0,
            extension: 16,
            pv_epsilon: None,
            bandwidth: None,
            suite: "all".into(),
            samples: 1000,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str, line: usize) -> LabResult<T> {
    value
        .parse()
        .map_err(|_| LabError::Config(format!("line {line}: invalid value {value:?} for key `{key}`")))
}

impl RunConfig {
    pub fn kappa(&self) -> f64 {
        self.kappa.unwrap_or(if self.alpha == 2.0 { 0.5 } else { 1.0 })
    }

    pub fn params(&self) -> LabResult<StableParams> {
        Ok(StableParams::new(self.alpha, self.kappa(), self.chi)?)
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn fparams(&self) -> LabResult<Option<FunctionalParams>> {
        let params = self.params()?;
        Ok(match (self.beta, self.pv_epsilon) {
            (None, _) => None,
            (Some(b), Some(eps)) => Some(FunctionalParams::new(&params, b, eps)?),
            (Some(b), None) => Some(FunctionalParams::with_grid_default(&params, b, self.dt())?),
        })
    }

    pub fn monte_carlo(&self) -> LabResult<MonteCarloConfig> {
        MonteCarloConfig::new(
            self.params()?,
            self.fparams()?,
            self.level,
            self.paths,
            self.steps,
            self.horizon,
            self.seed,
        )
    }

    /// Identity checks default to `β = 1` when no `beta` is set.
    pub fn check(&self) -> LabResult<CheckConfig> {
        let mut c = CheckConfig::new(
            self.params()?,
            self.beta.unwrap_or(1.0),
            self.paths,
            self.steps,
            self.horizon,
            self.seed,
        );
        c.level = self.level;
        c.extension = self.extension;
        c.pv_epsilon = self.pv_epsilon;
        c.bandwidth = self.bandwidth;
        c.grid()?;
        c.fparams()?;
        Ok(c)
    }

    pub fn parse(text: &str) -> LabResult<Self> {
        Self::parse_onto(text, Self::default())
    }

    /// Parses `text` with `base` supplying the keys the text leaves out.
    pub fn parse_onto(text: &str, base: Self) -> LabResult<Self> {
        let mut c = base;
        let mut seen: Vec<String> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| LabError::Config(format!("line {n}: expected key = value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(LabError::Config(format!("line {n}: unknown key `{key}`")));
            }
            if seen.iter().any(|k| k == key) {
                return Err(LabError::Config(format!("line {n}: key `{key}` given twice")));
            }
            seen.push(key.into());
            match key {
                "alpha" => c.alpha = parse_value(key, value, n)?,
                "kappa" => c.kappa = Some(parse_value(key, value, n)?),
                "chi" => c.chi = parse_value(key, value, n)?,
                "beta" => c.beta = Some(parse_value(key, value, n)?),
                "level" => c.level = parse_value(key, value, n)?,
                "paths" => c.paths = parse_value(key, value, n)?,
                "steps" => c.steps = parse_value(key, value, n)?,
                "horizon" => c.horizon = parse_value(key, value, n)?,
                "seed" => c.seed = parse_value(key, value, n)?,
                "threads" => c.threads = parse_value(key, value, n)?,
                "extension" => c.extension = parse_value(key, value, n)?,
                "pv_epsilon" => c.pv_epsilon = Some(parse_value(key, value, n)?),
                "bandwidth" => c.bandwidth = Some(parse_value(key, value, n)?),
                "suite" => c.suite = value.into(),
                "samples" => c.samples = parse_value(key, value, n)?,
                _ => unreachable!("key list and match arms agree"),
            }
        }
        Ok(c)
    }

    /// One `key = value` line per set field; unset options are omitted.
    /// Floats use the shortest representation that parses back exactly.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("alpha", self.alpha.to_string());
        if let Some(k) = self.kappa {
            put("kappa", k.to_string());
        }
        put("chi", self.chi.to_string());
        if let Some(b) = self.beta {
            put("beta", b.to_string());
        }
        put("level", self.level.to_string());
        put("paths", self.paths.to_string());
        put("steps", self.steps.to_string());
        put("horizon", self.horizon.to_string());
        put("seed", self.seed.to_string());
        put("threads", self.threads.to_string());
        put("extension", self.extension.to_string());
        if let Some(e) = self.pv_epsilon {
            put("pv_epsilon", e.to_string());
        }
        if let Some(b) = self.bandwidth {
            put("bandwidth", b.to_string());
        }
        put("suite", self.suite.clone());
        put("samples", self.samples.to_string());
        out
    }
}
