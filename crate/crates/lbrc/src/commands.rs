//! The subcommands, callable without going through `main`.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use lbrc_core::data::{Dataset, EvalGrid};
use lbrc_core::estimators::EstimatorBundle;
use lbrc_core::influence::{lil_quantities, plugin_variance, InfluenceContext, PluginContext, SignConvention};
use lbrc_core::simulation::{sample_lbrc, RateReport};
use lbrc_core::step::StepFunction;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::config::{ModelSpec, RateConfig};
use crate::error::CliError;
use crate::experiment::run_rate_experiment;
use crate::io::{fmt_num, parse_dataset, sha256_hex, write_dataset, CsvRecordSpec, CurveExport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorChoice {
    /// The pooled-sample estimators `F̃ₙ`, `F̄ₙ`, `S̃_A` and `Λ̃`.
    Pooled,
    Tjw,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridChoice {
    /// Jump points only.
    Jumps,
    /// `count` equispaced points on `(0, max y]` in addition to the jumps.
    Count(usize),
}

impl GridChoice {
    pub fn parse(s: &str) -> Result<Self, String> {
        if s == "jumps" {
            return Ok(GridChoice::Jumps);
        }
        match s.strip_prefix("n:").map(str::parse::<usize>) {
            Some(Ok(c)) if c > 0 => Ok(GridChoice::Count(c)),
            _ => Err(format!("expected jumps or n:<count>, got {s:?}")),
        }
    }

    fn extra_points(self, max_y: f64) -> Vec<f64> {
        match self {
            GridChoice::Jumps => Vec::new(),
            GridChoice::Count(c) => (1..=c).map(|j| (j as f64 / c as f64 * max_y).min(max_y)).collect(),
        }
    }

    fn describe(self) -> String {
        match self {
            GridChoice::Jumps => "jumps".into(),
            GridChoice::Count(c) => format!("n:{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateOptions {
    pub estimator: EstimatorChoice,
    pub grid: GridChoice,
    pub out: PathBuf,
    pub csv: CsvRecordSpec,
}

fn read_input(path: &Path, csv: &CsvRecordSpec) -> Result<(Dataset, Vec<u8>), CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let d = parse_dataset(path, csv)?;
    Ok((d, bytes))
}

fn union_sorted(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = a.iter().chain(b).copied().collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn curve_rows(f: &StepFunction, extra: &[f64], anchor: f64) -> Vec<(f64, f64)> {
    let mut pts = union_sorted(f.jump_times(), extra);
    if pts.is_empty() {
        pts.push(anchor);
    }
    pts.into_iter().map(|t| (t, f.eval_at(t))).collect()
}

fn create(path: &Path) -> Result<File, CliError> {
    File::create(path).map_err(|e| CliError::io(path, e))
}

/// Fits the requested estimators and writes one CSV per curve into
/// `opts.out`. Returns the written paths.
pub fn estimate(input: &Path, opts: &EstimateOptions) -> Result<Vec<PathBuf>, CliError> {
    let (d, bytes) = read_input(input, &opts.csv)?;
    let fit = EstimatorBundle::fit(&d);
    let flags = format!("estimate estimator={:?} grid={}", opts.estimator, opts.grid.describe());
    let hash = sha256_hex(&[flags.as_bytes(), &bytes]);
    let extra = opts.grid.extra_points(d.max_y());

    let mut curves: Vec<(&str, &StepFunction)> = Vec::new();
    if opts.estimator != EstimatorChoice::Tjw {
        curves.extend([
            ("f_tilde", &fit.f_tilde),
            ("f_bar", &fit.f_bar),
            ("s_a_tilde", &fit.s_a_tilde),
            ("lambda_tilde", &fit.lambda_tilde),
        ]);
    }
    if opts.estimator != EstimatorChoice::Pooled {
        curves.push(("f_tjw", &fit.f_tjw));
    }

    std::fs::create_dir_all(&opts.out).map_err(|e| CliError::io(&opts.out, e))?;
    let mut written = Vec::new();
    for (name, f) in curves {
        let export = CurveExport {
            estimator: name.to_string(),
            n: d.n(),
            config_hash: hash.clone(),
            rows: curve_rows(f, &extra, d.max_y()),
        };
        let path = opts.out.join(format!("{name}.csv"));
        export.write(create(&path)?).map_err(|e| CliError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateOptions {
    pub model: ModelSpec,
    pub n: usize,
    pub seed: u64,
    /// Standard output when `None`.
    pub out: Option<PathBuf>,
}

pub fn simulate(opts: &SimulateOptions) -> Result<Dataset, CliError> {
    if opts.n == 0 {
        return Err(CliError::input("--n must be at least 1"));
    }
    let model = opts.model.build()?;
    let d = sample_lbrc(&model, opts.n, opts.seed)?;
    match &opts.out {
        Some(p) => write_dataset(create(p)?, &d).map_err(|e| CliError::io(p, e))?,
        None => write_dataset(std::io::stdout().lock(), &d).map_err(|e| CliError::io(Path::new("<stdout>"), e))?,
    }
    Ok(d)
}

fn convention_name(c: SignConvention) -> &'static str {
    match c {
        SignConvention::Minus => "minus",
        SignConvention::Plus => "plus",
    }
}

fn join(xs: impl IntoIterator<Item = String>) -> String {
    xs.into_iter().collect::<Vec<_>>().join(",")
}

/// Per-replication table: `n,rep,sup_residual` plus the other sign
/// convention when there is one.
pub fn report_csv(report: &RateReport) -> String {
    let mut s = String::from("n,rep,sup_residual");
    if report.alternate.is_some() {
        s.push_str(",sup_residual_alternate");
    }
    s.push('\n');
    for (k, &n) in report.sample_sizes.iter().enumerate() {
        for (rep, v) in report.sup_residuals[k].iter().enumerate() {
            s.push_str(&format!("{n},{rep},{}", fmt_num(*v)));
            if let Some(alt) = &report.alternate {
                s.push_str(&format!(",{}", fmt_num(alt.sup_residuals[k][rep])));
            }
            s.push('\n');
        }
    }
    s
}

pub fn report_summary(report: &RateReport, config_hash: &str) -> String {
    let mut s = format!("# config: {config_hash}\n");
    s.push_str(&format!("which: {}\n", report.which.name()));
    if let Some(c) = report.convention {
        s.push_str(&format!("convention: {}\n", convention_name(c)));
    }
    s.push_str(&format!("sizes: {}\n", join(report.sample_sizes.iter().map(|n| n.to_string()))));
    s.push_str(&format!("reps: {}\n", report.sup_residuals.first().map_or(0, Vec::len)));
    s.push_str(&format!("medians: {}\n", join(report.medians.iter().map(|m| fmt_num(*m)))));
    s.push_str(&format!("slope: {}\n", fmt_num(report.slope)));
    s.push_str(&format!("target_exponent: {}\n", fmt_num(report.target_exponent)));
    if let Some(alt) = &report.alternate {
        s.push_str(&format!("alternate_convention: {}\n", convention_name(alt.convention)));
        s.push_str(&format!("alternate_medians: {}\n", join(alt.medians.iter().map(|m| fmt_num(*m)))));
        s.push_str(&format!("alternate_slope: {}\n", fmt_num(alt.slope)));
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateOutput {
    pub report: RateReport,
    pub csv: String,
    pub summary: String,
}

/// Reads the config, runs the experiment and, when `out` is given, writes
/// `rate_report.csv` and `rate_summary.txt` there.
pub fn rate_experiment(config: &Path, out: Option<&Path>, threads: usize) -> Result<RateOutput, CliError> {
    let text = std::fs::read_to_string(config).map_err(|e| CliError::io(config, e))?;
    let cfg = RateConfig::parse(&text)?;
    let report = run_rate_experiment(&cfg, threads)?;
    let hash = sha256_hex(&[b"rate-experiment", cfg.canonical().as_bytes()]);
    let csv = report_csv(&report);
    let summary = report_summary(&report, &hash);
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        for (name, body) in [("rate_report.csv", &csv), ("rate_summary.txt", &summary)] {
            let p = dir.join(name);
            create(&p)?.write_all(body.as_bytes()).map_err(|e| CliError::io(&p, e))?;
        }
    }
    Ok(RateOutput { report, csv, summary })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceOptions {
    pub level: f64,
    pub grid: GridChoice,
    pub csv: CsvRecordSpec,
    /// Standard output when `None`.
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfluenceRow {
    pub t: f64,
    pub f_tilde: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub d: f64,
    pub v: f64,
    pub v_squared_weight: f64,
}

/// Normal quantile for a two-sided interval at `level`.
pub fn two_sided_z(level: f64) -> Result<f64, CliError> {
    if !(level > 0.0 && level < 1.0) {
        return Err(CliError::input(format!("--level must lie in (0, 1), got {level}")));
    }
    let normal = Normal::standard();
    Ok(normal.inverse_cdf(0.5 + level / 2.0))
}

/// Plug-in standard errors, clipped normal intervals and the
/// iterated-logarithm scale on a grid, for an in-memory dataset.
pub fn influence_rows(d: &Dataset, level: f64, grid: GridChoice) -> Result<Vec<InfluenceRow>, CliError> {
    let z = two_sided_z(level)?;
    let ctx = PluginContext::new(d);
    let fit = ctx.fit();
    let points = match grid {
        GridChoice::Jumps => {
            let j = fit.f_tilde.jump_times().to_vec();
            if j.is_empty() {
                vec![d.max_y()]
            } else {
                j
            }
        }
        c => c.extra_points(d.max_y()),
    };
    let grid = EvalGrid::new(points, d.max_y())?;
    let f_vals: Vec<f64> = grid.points().iter().map(|&t| fit.f_tilde.eval_at(t)).collect();
    let var = plugin_variance(d, &grid);
    let lil = lil_quantities(&InfluenceContext::Plugin(ctx), &grid, 0.0)?;
    grid.points()
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let f = f_vals[j];
            let se = var[j].sqrt();
            let row = InfluenceRow {
                t,
                f_tilde: f,
                se,
                ci_low: (f - z * se).clamp(0.0, 1.0),
                ci_high: (f + z * se).clamp(0.0, 1.0),
                d: lil.d[j],
                v: lil.v[j],
                v_squared_weight: lil.v_squared_weight[j],
            };
            if [row.se, row.d, row.v].iter().all(|x| x.is_finite()) {
                Ok(row)
            } else {
                Err(CliError::Compute(format!("non-finite variance at t = {t}")))
            }
        })
        .collect()
}

pub fn influence(input: &Path, opts: &InfluenceOptions) -> Result<Vec<InfluenceRow>, CliError> {
    two_sided_z(opts.level)?;
    let (d, bytes) = read_input(input, &opts.csv)?;
    let rows = influence_rows(&d, opts.level, opts.grid)?;
    let flags = format!("influence level={:?} grid={}", opts.level, opts.grid.describe());
    let hash = sha256_hex(&[flags.as_bytes(), &bytes]);
    let mut s = format!("# level: {:?}\n# n: {}\n# config: {hash}\n", opts.level, d.n());
    s.push_str("t,f_tilde,se,ci_low,ci_high,d,v,v_squared_weight\n");
    for r in &rows {
        let cols = [r.t, r.f_tilde, r.se, r.ci_low, r.ci_high, r.d, r.v, r.v_squared_weight];
        s.push_str(&join(cols.iter().map(|x| fmt_num(*x))));
        s.push('\n');
    }
    match &opts.out {
        Some(p) => create(p)?.write_all(s.as_bytes()).map_err(|e| CliError::io(p, e))?,
        None => std::io::stdout().write_all(s.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e))?,
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_choice_parsing() {
        assert_eq!(GridChoice::parse("jumps"), Ok(GridChoice::Jumps));
        assert_eq!(GridChoice::parse("n:7"), Ok(GridChoice::Count(7)));
        assert!(GridChoice::parse("n:0").is_err());
        assert!(GridChoice::parse("every").is_err());
        assert_eq!(GridChoice::Count(4).extra_points(2.0), vec![0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn z_values() {
        assert!((two_sided_z(0.95).unwrap() - 1.959963984540054).abs() < 1e-9);
        assert!(two_sided_z(1.5).is_err());
        assert!(two_sided_z(0.0).is_err());
    }

    #[test]
    fn rows_cover_jumps_and_grid() {
        let f = StepFunction::counting([1.0, 3.0], 2.0);
        let rows = curve_rows(&f, &[2.0, 3.0], 3.0);
        assert_eq!(rows, vec![(1.0, 0.5), (2.0, 0.5), (3.0, 1.0)]);
        assert_eq!(curve_rows(&StepFunction::constant(0.0), &[], 4.0), vec![(4.0, 0.0)]);
    }

    #[test]
    fn one_row_influence_is_finite() {
        let d = Dataset::new(vec![lbrc_core::data::LbrcObservation::new(1.0, 2.0, true).unwrap()]).unwrap();
        let rows = influence_rows(&d, 0.95, GridChoice::Count(3)).unwrap();
        assert_eq!(rows.len(), 3);
        for r in rows {
            assert!(r.se.is_finite() && r.se >= 0.0);
            assert!(0.0 <= r.ci_low && r.ci_low <= r.f_tilde && r.f_tilde <= r.ci_high && r.ci_high <= 1.0);
        }
    }
}
