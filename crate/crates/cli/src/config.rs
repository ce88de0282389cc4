//! Run configuration: flags over an optional `key=value` file over defaults.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, Context};
use nsgate_core::{AtomParams, GridPolicy};

use crate::output::sig;
use crate::Failure;

/// Every key a config file may set. Names match the long flags.
const KNOWN_KEYS: &[&str] = &[
    "gamma",
    "c",
    "t",
    "l",
    "out",
    "points-per-unit",
    "extent-margin",
    "tmin",
    "tmax",
    "steps",
    "lmin",
    "lmax",
    "resolution",
    "locus",
    "c0",
    "c1",
    "c2",
    "at-optimum",
    "out2",
    "stride",
];

pub const POINTS_PER_UNIT: (f64, f64) = (10.0, 2000.0);

#[derive(Debug, Default)]
pub struct ConfigFile {
    source: Option<PathBuf>,
    entries: BTreeMap<String, String>,
}

fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('_', "-")
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))
            .map_err(Failure::usage)?;
        let mut cfg = Self::parse(&text)
            .map_err(|e| Failure::usage(e.context(format!("in config file {}", path.display()))))?;
        cfg.source = Some(path.to_path_buf());
        Ok(cfg)
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key=value, got `{line}`", n + 1))?;
            let key = normalize_key(key);
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(anyhow!("line {}: unknown key `{key}`", n + 1));
            }
            entries.insert(key, value.trim().to_string());
        }
        Ok(Self {
            source: None,
            entries,
        })
    }

    pub fn source(&self) -> Option<&Path> {
        self.source.as_deref()
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, Failure> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| Failure::usage(anyhow!("config key `{key}`: cannot parse `{raw}`"))),
        }
    }

    /// The flag if given, else the file entry.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Failure> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }
}

/// Settings shared by every subcommand, after merging flags, file and defaults.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub gamma: f64,
    pub speed: f64,
    pub duration: f64,
    pub delay: f64,
    pub points_per_unit: f64,
    pub extent_margin: f64,
    pub out: Option<PathBuf>,
    /// Effective settings in resolution order, for the output header.
    echo: Vec<(String, String)>,
}

pub struct CommonFlags {
    pub gamma: Option<f64>,
    pub speed: Option<f64>,
    pub duration: Option<f64>,
    pub delay: Option<f64>,
    pub points_per_unit: Option<f64>,
    pub extent_margin: Option<f64>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(flags: CommonFlags, file: &ConfigFile) -> Result<Self, Failure> {
        let gamma = file.pick(flags.gamma, "gamma")?.unwrap_or(1.0);
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Failure::usage(anyhow!("--gamma must be >= 0, got {gamma}")));
        }
        let speed = file.pick(flags.speed, "c")?.unwrap_or(1.0);
        positive("--c", speed)?;
        let unit = if gamma > 0.0 { 1.0 / gamma } else { 1.0 };

        let duration = file.pick(flags.duration, "t")?.unwrap_or(1.3 * unit);
        positive("--t", duration)?;
        let delay = file.pick(flags.delay, "l")?.unwrap_or(0.9 * unit);
        non_negative("--l", delay)?;

        let points_per_unit = file
            .pick(flags.points_per_unit, "points-per-unit")?
            .unwrap_or(50.0);
        let (lo, hi) = POINTS_PER_UNIT;
        if !(lo..=hi).contains(&points_per_unit) {
            return Err(Failure::usage(anyhow!(
                "--points-per-unit must lie in [{lo}, {hi}], got {points_per_unit}"
            )));
        }
        let extent_margin = file
            .pick(flags.extent_margin, "extent-margin")?
            .unwrap_or(15.0);
        if !(extent_margin > 0.0 && extent_margin <= 1000.0) {
            return Err(Failure::usage(anyhow!(
                "--extent-margin must lie in (0, 1000], got {extent_margin}"
            )));
        }
        let out = file.pick(flags.out, "out")?;

        let mut cfg = Self {
            gamma,
            speed,
            duration,
            delay,
            points_per_unit,
            extent_margin,
            out,
            echo: Vec::new(),
        };
        cfg.note("gamma", sig(gamma));
        cfg.note("c", sig(speed));
        cfg.note("points-per-unit", sig(points_per_unit));
        cfg.note("extent-margin", sig(extent_margin));
        Ok(cfg)
    }

    /// Records a setting for the output header.
    pub fn note(&mut self, key: &str, value: impl Into<String>) {
        self.echo.push((key.to_string(), value.into()));
    }

    pub fn atom(&self) -> Result<AtomParams, Failure> {
        Ok(AtomParams::new(self.gamma, self.speed)?)
    }

    /// Natural time unit `1/Γ` (1 for an uncoupled atom).
    pub fn unit(&self) -> f64 {
        if self.gamma > 0.0 {
            1.0 / self.gamma
        } else {
            1.0
        }
    }

    pub fn policy(&self) -> GridPolicy {
        GridPolicy {
            points_per_scale: self.points_per_unit,
            tail_lengths: self.extent_margin,
            ..GridPolicy::default()
        }
    }

    /// `# key=value` lines describing the run.
    pub fn header(&self, command: &str, file: &ConfigFile) -> String {
        let mut out = format!("# nsgate {command}\n");
        if let Some(src) = file.source() {
            let _ = writeln!(out, "# config={}", src.display());
        }
        for (k, v) in &self.echo {
            let _ = writeln!(out, "# {k}={v}");
        }
        out
    }
}

pub fn positive(name: &str, v: f64) -> Result<(), Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Failure::usage(anyhow!("{name} must be positive, got {v}")))
    }
}

pub fn non_negative(name: &str, v: f64) -> Result<(), Failure> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Failure::usage(anyhow!("{name} must be >= 0, got {v}")))
    }
}
