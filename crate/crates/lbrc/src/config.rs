//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comments and blank lines are ignored
//! family = exponential      # or weibull
//! rate = 1.0                # exponential only
//! shape = 1.5               # weibull only
//! scale = 1.0               # weibull only
//! censor_rate = 0.5         # or none
//! sizes = 250,500,1000,2000,4000
//! reps = 200
//! which = rn2               # rn1 rn2 rn3 fbar-gap trunc-hazard hazard
//! grid = quantiles:0.1:0.9:25
//! seed = 20261018
//! cap = 1e4
//! ```
//!
//! `grid` also accepts `range:<lo>:<hi>:<count>` (equispaced times) and
//! `points:<t1>,<t2>,...`.

use lbrc_core::data::EvalGrid;
use lbrc_core::simulation::{Which, DEFAULT_CAP};
use lbrc_core::truth::{Censoring, Family, TruthModel};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyKind {
    Exponential,
    Weibull,
}

/// Population parameters as given by the user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub family: FamilyKind,
    pub rate: f64,
    pub shape: f64,
    pub scale: f64,
    /// `None` means no censoring.
    pub censor_rate: Option<f64>,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self { family: FamilyKind::Exponential, rate: 1.0, shape: 1.0, scale: 1.0, censor_rate: Some(0.5) }
    }
}

impl ModelSpec {
    pub fn build(&self) -> Result<TruthModel, CliError> {
        let family = match self.family {
            FamilyKind::Exponential => Family::Exponential { rate: self.rate },
            FamilyKind::Weibull => Family::Weibull { shape: self.shape, scale: self.scale },
        };
        let censoring = match self.censor_rate {
            None => Censoring::None,
            Some(rate) => Censoring::Exponential { rate },
        };
        Ok(TruthModel::new(family, censoring)?)
    }

    pub fn describe(&self) -> String {
        let censor = self.censor_rate.map_or("none".to_string(), |r| format!("{r:?}"));
        match self.family {
            FamilyKind::Exponential => format!("family=exponential rate={:?} censor_rate={censor}", self.rate),
            FamilyKind::Weibull => {
                format!("family=weibull shape={:?} scale={:?} censor_rate={censor}", self.shape, self.scale)
            }
        }
    }
}

pub fn parse_family(s: &str) -> Option<FamilyKind> {
    match s.to_ascii_lowercase().as_str() {
        "exponential" | "exp" => Some(FamilyKind::Exponential),
        "weibull" => Some(FamilyKind::Weibull),
        _ => None,
    }
}

/// `none` or a positive rate.
pub fn parse_censor_rate(s: &str) -> Option<Option<f64>> {
    if s.eq_ignore_ascii_case("none") {
        return Some(None);
    }
    s.parse::<f64>().ok().map(Some)
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    /// `count` equispaced probabilities of `F` from `lo` to `hi`.
    Quantiles { lo: f64, hi: f64, count: usize },
    Range { lo: f64, hi: f64, count: usize },
    Points(Vec<f64>),
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::Quantiles { lo: 0.1, hi: 0.9, count: 25 }
    }
}

impl GridSpec {
    pub fn parse(s: &str) -> Option<Self> {
        let (kind, rest) = s.split_once(':')?;
        let triple = |rest: &str| -> Option<(f64, f64, usize)> {
            let mut it = rest.split(':');
            let lo = it.next()?.trim().parse().ok()?;
            let hi = it.next()?.trim().parse().ok()?;
            let count = it.next()?.trim().parse().ok()?;
            it.next().is_none().then_some((lo, hi, count))
        };
        match kind.trim() {
            "quantiles" => triple(rest).map(|(lo, hi, count)| GridSpec::Quantiles { lo, hi, count }),
            "range" => triple(rest).map(|(lo, hi, count)| GridSpec::Range { lo, hi, count }),
            "points" => rest
                .split(',')
                .map(|p| p.trim().parse().ok())
                .collect::<Option<Vec<f64>>>()
                .map(GridSpec::Points),
            _ => None,
        }
    }

    pub fn resolve(&self, model: &TruthModel) -> Result<EvalGrid, CliError> {
        let grid = match self {
            GridSpec::Quantiles { lo, hi, count } => model.quantile_grid(*lo, *hi, *count),
            GridSpec::Range { lo, hi, count } => EvalGrid::equispaced(*lo, *hi, *count),
            GridSpec::Points(p) => match p.last() {
                Some(&b) => EvalGrid::new(p.clone(), b),
                None => return Err(CliError::input("config key grid: no points")),
            },
        };
        grid.map_err(|e| CliError::input(format!("config key grid: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateConfig {
    pub model: ModelSpec,
    pub sizes: Vec<usize>,
    pub reps: usize,
    pub which: Which,
    pub grid: GridSpec,
    pub seed: u64,
    pub cap: f64,
}

impl RateConfig {
    /// Parses the text form. `which` is required; everything else falls back
    /// to the default scenario.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut model = ModelSpec::default();
        let mut sizes = vec![250, 500, 1000, 2000, 4000];
        let mut reps = 200;
        let mut which = None;
        let mut grid = GridSpec::default();
        let mut seed = 1;
        let mut cap = DEFAULT_CAP;

        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::input(format!("config line {}: expected key = value", k + 1)));
            };
            let (key, value) = (key.trim(), value.trim());
            let bad = || CliError::input(format!("config key {key}: invalid value {value:?}"));
            let num = || value.parse::<f64>().map_err(|_| bad());
            match key {
                "family" => model.family = parse_family(value).ok_or_else(bad)?,
                "rate" => model.rate = num()?,
                "shape" => model.shape = num()?,
                "scale" => model.scale = num()?,
                "censor_rate" => model.censor_rate = parse_censor_rate(value).ok_or_else(bad)?,
                "sizes" => {
                    sizes = value
                        .trim_start_matches('[')
                        .trim_end_matches(']')
                        .split(',')
                        .map(|s| s.trim().parse::<usize>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| bad())?
                }
                "reps" => reps = value.parse().map_err(|_| bad())?,
                "which" => which = Some(Which::parse(value).ok_or_else(bad)?),
                "grid" => grid = GridSpec::parse(value).ok_or_else(bad)?,
                "seed" => seed = value.parse().map_err(|_| bad())?,
                "cap" => {
                    cap = num()?;
                    if !(cap > 0.0) {
                        return Err(bad());
                    }
                }
                _ => return Err(CliError::input(format!("config key {key}: unknown key"))),
            }
        }
        let which = which.ok_or_else(|| CliError::input("config key which: missing"))?;
        Ok(Self { model, sizes, reps, which, grid, seed, cap })
    }

    /// Canonical text used for hashing.
    pub fn canonical(&self) -> String {
        format!(
            "{} sizes={:?} reps={} which={} grid={:?} seed={} cap={:?}",
            self.model.describe(),
            self.sizes,
            self.reps,
            self.which.name(),
            self.grid,
            self.seed,
            self.cap
        )
    }
}
