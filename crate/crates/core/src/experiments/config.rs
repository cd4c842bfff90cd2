//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comment
//! dist = exponential
//! rate = 1.0
//! seed = 42
//! replicates = 2000
//! n_values = 16, 32, 64, 128
//! ```
//!
//! Unknown keys are rejected so that a typo cannot silently fall back to a
//! default. Keys starting with `tol_` populate the tolerance map.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{FppError, Result};
use crate::lattice::{Point, SectorSpec};
use crate::weights::Distribution;

const KNOWN_KEYS: &[&str] = &[
    "name",
    "dist",
    "rate",
    "a",
    "b",
    "alpha",
    "x_min",
    "value",
    "seed",
    "replicates",
    "n_values",
    "sector_k",
    "sector_theta",
    "sector_theta1",
    "sector_theta2",
    "level",
    "margin",
    "separations",
    "sources",
    "theta",
    "grid_intervals",
    "x",
    "y",
    "probe_x",
    "probe_y",
];

/// How the sector of an experiment is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SectorChoice {
    /// Symmetric about `π/2` with arc `{(-k, n), ..., (k, n)}` on the target
    /// line; shrinks to the vertical direction as `n` grows.
    Lattice { k: i32 },
    /// Fixed angles.
    Angles { theta: f64, theta1: f64, theta2: f64 },
}

impl SectorChoice {
    pub fn at(&self, n_target: i32) -> Result<SectorSpec> {
        match *self {
            SectorChoice::Lattice { k } => SectorSpec::vertical_lattice(k, n_target),
            SectorChoice::Angles { theta, theta1, theta2 } => SectorSpec::new(theta, theta1, theta2),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub dist: Distribution,
    pub seed_base: u64,
    pub replicates: usize,
    pub n_values: Vec<i32>,
    /// `None` leaves the choice to the experiment.
    pub sector: Option<SectorChoice>,
    pub tolerances: BTreeMap<String, f64>,
    /// Significance level of trend tests.
    pub level: f64,
    pub margin: Option<i32>,
    pub separations: Vec<i32>,
    pub sources: Option<(Point, Point)>,
    pub theta: Option<f64>,
    pub grid_intervals: Option<usize>,
    pub x: Option<Point>,
    pub y: Option<Point>,
    pub probe_x: Option<(i32, i32)>,
    pub probe_y: Option<(i32, i32)>,
    /// Every key as written, for the report.
    pub raw: BTreeMap<String, String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            name: String::new(),
            dist: Distribution::Exponential { rate: 1.0 },
            seed_base: 0,
            replicates: 100,
            n_values: vec![32],
            sector: None,
            tolerances: BTreeMap::new(),
            level: 0.01,
            margin: None,
            separations: vec![4],
            sources: None,
            theta: None,
            grid_intervals: None,
            x: None,
            y: None,
            probe_x: None,
            probe_y: None,
            raw: BTreeMap::new(),
        }
    }
}

fn cfg_err(msg: impl Into<String>) -> FppError {
    FppError::Config(msg.into())
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| cfg_err(format!("{key}: cannot parse {v:?}")))
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse_num(key, s)).collect()
}

fn parse_point(key: &str, v: &str) -> Result<Point> {
    let c: Vec<i32> = parse_list(key, v)?;
    match c[..] {
        [x, y] => Ok(Point::new(x, y)),
        _ => Err(cfg_err(format!("{key}: expected `x, y`, got {v:?}"))),
    }
}

fn parse_range(key: &str, v: &str) -> Result<(i32, i32)> {
    let c: Vec<i32> = parse_list(key, v)?;
    match c[..] {
        [lo, hi] if lo <= hi => Ok((lo, hi)),
        _ => Err(cfg_err(format!("{key}: expected `lo, hi` with lo <= hi, got {v:?}"))),
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| cfg_err(format!("line {}: expected `key = value`", i + 1)))?;
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if !KNOWN_KEYS.contains(&k.as_str()) && !k.starts_with("tol_") {
                return Err(cfg_err(format!("line {}: unknown key {k:?}", i + 1)));
            }
            if raw.insert(k.clone(), v).is_some() {
                return Err(cfg_err(format!("line {}: duplicate key {k:?}", i + 1)));
            }
        }
        Self::from_map(raw)
    }

    pub fn from_map(raw: BTreeMap<String, String>) -> Result<Self> {
        let mut c = ExperimentConfig::default();
        let get = |k: &str| raw.get(k).map(String::as_str);
        let num = |k: &str, default: f64| -> Result<f64> { get(k).map_or(Ok(default), |v| parse_num(k, v)) };

        if let Some(name) = get("name") {
            c.name = name.to_string();
        }
        let kind = get("dist").unwrap_or("exponential");
        c.dist = match kind {
            "exponential" => Distribution::exponential(num("rate", 1.0)?),
            "uniform" => Distribution::uniform(num("a", 0.5)?, num("b", 1.5)?),
            "shifted-pareto" | "pareto" => Distribution::shifted_pareto(num("alpha", 3.0)?, num("x_min", 1.0)?),
            "constant" | "unit" => Distribution::constant(num("value", 1.0)?),
            other => return Err(cfg_err(format!("dist: unknown distribution {other:?}"))),
        }
        .map_err(|e| cfg_err(e.to_string()))?;
        if let Some(v) = get("seed") {
            c.seed_base = parse_num("seed", v)?;
        }
        if let Some(v) = get("replicates") {
            c.replicates = parse_num("replicates", v)?;
        }
        if let Some(v) = get("n_values") {
            c.n_values = parse_list("n_values", v)?;
        }
        if let Some(v) = get("level") {
            c.level = parse_num("level", v)?;
        }
        if let Some(v) = get("margin") {
            c.margin = Some(parse_num("margin", v)?);
        }
        if let Some(v) = get("separations") {
            c.separations = parse_list("separations", v)?;
        }
        if let Some(v) = get("sources") {
            let pts: Vec<&str> = v.split(';').collect();
            match pts[..] {
                [a, b] => c.sources = Some((parse_point("sources", a)?, parse_point("sources", b)?)),
                _ => return Err(cfg_err("sources: expected `x1, y1; x2, y2`")),
            }
        }
        if let Some(v) = get("theta") {
            c.theta = Some(parse_num("theta", v)?);
        }
        if let Some(v) = get("grid_intervals") {
            c.grid_intervals = Some(parse_num("grid_intervals", v)?);
        }
        if let Some(v) = get("x") {
            c.x = Some(parse_point("x", v)?);
        }
        if let Some(v) = get("y") {
            c.y = Some(parse_point("y", v)?);
        }
        if let Some(v) = get("probe_x") {
            c.probe_x = Some(parse_range("probe_x", v)?);
        }
        if let Some(v) = get("probe_y") {
            c.probe_y = Some(parse_range("probe_y", v)?);
        }
        let angles = ["sector_theta", "sector_theta1", "sector_theta2"].map(|k| get(k));
        c.sector = match (get("sector_k"), angles) {
            (Some(_), [Some(_), ..] | [_, Some(_), _] | [.., Some(_)]) => {
                return Err(cfg_err("give either sector_k or sector angles, not both"))
            }
            (Some(k), _) => Some(SectorChoice::Lattice {
                k: parse_num("sector_k", k)?,
            }),
            (None, [None, None, None]) => None,
            (None, [t1_2, t1, t2]) => {
                let theta = t1_2.map_or(Ok(FRAC_PI_2), |v| parse_num("sector_theta", v))?;
                let theta1 = t1.map_or(Ok(theta), |v| parse_num("sector_theta1", v))?;
                let theta2 = t2.map_or(Ok(theta), |v| parse_num("sector_theta2", v))?;
                SectorSpec::new(theta, theta1, theta2).map_err(|e| cfg_err(e.to_string()))?;
                Some(SectorChoice::Angles { theta, theta1, theta2 })
            }
        };
        for (k, v) in &raw {
            if let Some(name) = k.strip_prefix("tol_") {
                c.tolerances.insert(name.to_string(), parse_num(k, v)?);
            }
        }
        c.raw = raw;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates < 1 {
            return Err(cfg_err("replicates must be >= 1"));
        }
        if self.n_values.is_empty() {
            return Err(cfg_err("n_values must not be empty"));
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(cfg_err("n_values must be strictly increasing"));
        }
        if self.n_values[0] < 1 {
            return Err(cfg_err("n_values must be positive"));
        }
        if *self.n_values.last().expect("non-empty") > 4096 {
            return Err(cfg_err("n_values above 4096 are beyond desk scale"));
        }
        if !(self.level > 0.0 && self.level < 0.5) {
            return Err(cfg_err("level must be in (0, 0.5)"));
        }
        if self.margin.is_some_and(|m| m < 1) {
            return Err(cfg_err("margin must be >= 1"));
        }
        if self.separations.iter().any(|&d| d < 0) {
            return Err(cfg_err("separations must be >= 0"));
        }
        if let Some(SectorChoice::Lattice { k }) = self.sector {
            if k < 0 {
                return Err(cfg_err("sector_k must be >= 0"));
            }
        }
        Ok(())
    }

    pub fn sector_or(&self, default: SectorChoice) -> SectorChoice {
        self.sector.unwrap_or(default)
    }

    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }
}
