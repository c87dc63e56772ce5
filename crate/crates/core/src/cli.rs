//! Command-line front end.
//!
//! Every subcommand writes `report.json`, its own `<subcommand>_<name>.<ext>`
//! files, and `manifest.json` listing each emitted file with its SHA-256.
//! Errors go to stderr as one JSON line and map to exit codes: 2 for input
//! and validation problems, 64 for bad arguments, 70 for internal failures,
//! 74 for I/O.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::calibration::{ece, threshold_scan, GridSpec};
use crate::chart::{line_chart, Series};
use crate::data::{load_predictions, Format, LabeledPredictions, RunManifest, RunSet};
use crate::diversity::{check_jensen_identity, diversity_table};
use crate::ensemble::{aggregate_uniform, ensemble_size_sweep, evaluate_ensemble, fmt_opt, weighting_cloud, SweepConfig};
use crate::error::{Error, Result};
use crate::metrics::{fairness_report, Metric};
use crate::postprocess::{
    apply_expected, apply_sampled, before_after, before_after_csv, fit_group_thresholds, Constraint, Objective,
};
use crate::stats::{delta_significance_table, DeltaConfig, MemberReduction};
use crate::synthetic::{generate_synthetic, SyntheticConfig};

pub const ARTIFACT: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const THREADS_ENV: &str = "ENSAUDIT_THREADS";

#[derive(Parser, Debug)]
#[command(name = "ensaudit", version, about = "Fairness and diversity audits for deep ensembles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Fairness and performance report for the ensemble and each member.
    Audit(AuditArgs),
    /// Metrics as a function of ensemble size.
    Sweep(SweepArgs),
    /// Average predictive diversity per (y, a) cell.
    Diversity(DiversityArgs),
    /// Expected calibration error and per-group threshold scans.
    Calibration(CalibrationArgs),
    /// Fit group thresholds under a fairness constraint and evaluate them.
    Postprocess(PostprocessArgs),
    /// Generate a synthetic ensemble with a per-group diversity gap.
    Simulate(SimulateArgs),
    /// Ensemble-minus-member deltas with Welch tests across runs.
    Compare(CompareArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Audit(_) => "audit",
            Command::Sweep(_) => "sweep",
            Command::Diversity(_) => "diversity",
            Command::Calibration(_) => "calibration",
            Command::Postprocess(_) => "postprocess",
            Command::Simulate(_) => "simulate",
            Command::Compare(_) => "compare",
        }
    }
}

/// Comma-separated metric names.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct MetricList(pub Vec<Metric>);

fn parse_metrics(s: &str) -> Result<MetricList> {
    Metric::parse_list(s).map(MetricList)
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Output directory.
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Decision threshold: predict positive when score > threshold.
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    /// Comma-separated metrics; an empty list writes metadata only.
    #[arg(long, value_parser = parse_metrics, default_value = "accuracy,balanced_accuracy,auroc,spd_abs,eod_abs,aod")]
    pub metrics: MetricList,
    /// Skip SVG charts.
    #[arg(long)]
    pub no_charts: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DataArgs {
    /// Wide prediction CSV: sample_id,y,a,m0,...
    #[arg(long)]
    pub data: PathBuf,
    /// Run manifest JSON; without it all members form one run.
    #[arg(long)]
    pub runs: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct AuditArgs {
    #[command(flatten)]
    pub input: DataArgs,
    /// Number of random Dirichlet weightings to evaluate.
    #[arg(long, default_value_t = 0)]
    pub cloud: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: DataArgs,
    /// Largest ensemble size; defaults to the smallest run.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Member orderings per run.
    #[arg(long, default_value_t = 10)]
    pub orderings: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DiversityArgs {
    #[command(flatten)]
    pub input: DataArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CalibrationArgs {
    #[command(flatten)]
    pub input: DataArgs,
    #[arg(long, default_value_t = crate::calibration::DEFAULT_BINS)]
    pub bins: usize,
    /// Threshold grid 0, 1/steps, ..., 1.
    #[arg(long, default_value_t = 100)]
    pub grid_steps: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PostprocessArgs {
    /// Prediction CSV used to fit the thresholds.
    #[arg(long)]
    pub fit: PathBuf,
    /// Prediction CSV the fitted rule is evaluated on.
    #[arg(long)]
    pub apply: Option<PathBuf>,
    #[arg(long, default_value = "eod")]
    pub constraint: Constraint,
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
    #[arg(long, default_value = "accuracy")]
    pub objective: Objective,
    /// Also write sampled decisions (seeded by --seed).
    #[arg(long)]
    pub sampled: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SimulateArgs {
    /// JSON generator config; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub per_cell: Option<usize>,
    #[arg(long)]
    pub members: Option<usize>,
    #[arg(long = "n-runs")]
    pub runs: Option<usize>,
    #[arg(long)]
    pub separation: Option<f64>,
    #[arg(long)]
    pub sigma0: Option<f64>,
    #[arg(long)]
    pub gap: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub spread: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CompareArgs {
    #[command(flatten)]
    pub input: DataArgs,
    #[arg(long, default_value = "run_mean")]
    pub reduction: MemberReduction,
    /// Significance level.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[command(flatten)]
    pub common: Common,
}

/// Results of one subcommand before they are written.
pub struct Outcome {
    pub config: Value,
    pub validation: Value,
    /// `None` writes a metadata-only report.
    pub results: Option<Value>,
    pub files: Vec<(String, Vec<u8>)>,
}

impl Outcome {
    fn new(config: Value, validation: Value) -> Self {
        Outcome {
            config,
            validation,
            results: None,
            files: Vec::new(),
        }
    }

    fn file(&mut self, sub: &str, name: &str, contents: impl Into<Vec<u8>>) {
        self.files.push((format!("{sub}_{name}"), contents.into()));
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManifestEntry {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Audit(a) => &a.common,
        Command::Sweep(a) => &a.common,
        Command::Diversity(a) => &a.common,
        Command::Calibration(a) => &a.common,
        Command::Postprocess(a) => &a.common,
        Command::Simulate(a) => &a.common,
        Command::Compare(a) => &a.common,
    }
}

fn check_common(c: &Common) -> Result<()> {
    if !(0.0..=1.0).contains(&c.threshold) {
        return Err(Error::arg(format!("--threshold must lie in [0,1], got {}", c.threshold)));
    }
    Ok(())
}

/// An unreadable input file is an ingest failure, not an output I/O failure.
fn unreadable(path: &Path) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Io(io) => Error::Unreadable(format!("{}: {io}", path.display())),
        e => e,
    }
}

fn load_data(path: &Path) -> Result<LabeledPredictions<f64>> {
    load_predictions(path, Format::from_path(path)).map_err(unreadable(path))
}

fn load_runset(input: &DataArgs) -> Result<RunSet<f64>> {
    let data = load_data(&input.data)?;
    match &input.runs {
        Some(p) => RunSet::new(data, &RunManifest::load(p).map_err(unreadable(p))?),
        None => Ok(RunSet::single_run(data)),
    }
}

fn to_value<S: Serialize>(s: &S) -> Result<Value> {
    Ok(serde_json::to_value(s)?)
}

fn pretty<S: Serialize>(s: &S) -> Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(s)?;
    v.push(b'\n');
    Ok(v)
}

fn metric_map(metrics: &[Metric], values: &[Option<f64>]) -> Value {
    let m: serde_json::Map<String, Value> = metrics
        .iter()
        .zip(values)
        .map(|(k, v)| (k.as_str().to_string(), json!(v)))
        .collect();
    Value::Object(m)
}

fn audit(a: &AuditArgs) -> Result<Outcome> {
    let rs = load_runset(&a.input)?;
    let data = rs.data();
    let metrics = &a.common.metrics.0;
    let mut out = Outcome::new(to_value(a)?, to_value(&data.validate())?);
    if metrics.is_empty() {
        return Ok(out);
    }
    let t = a.common.threshold;
    let scores = aggregate_uniform(data);
    let report = fairness_report(&scores, data.labels(), data.groups(), t)?;
    let ens = evaluate_ensemble(data, t, metrics)?;
    let members = (0..data.n_members())
        .map(|n| evaluate_ensemble(&data.select_members(&[n])?, t, metrics))
        .collect::<Result<Vec<_>>>()?;

    let mut csv = String::from("model");
    for m in metrics {
        csv.push(',');
        csv.push_str(m.as_str());
    }
    csv.push('\n');
    let mut row = |name: &str, vals: &[Option<f64>]| {
        csv.push_str(name);
        for v in vals {
            csv.push(',');
            csv.push_str(&fmt_opt(*v));
        }
        csv.push('\n');
    };
    row("ensemble", &ens);
    for (n, vals) in members.iter().enumerate() {
        row(&format!("member_{n}"), vals);
    }
    out.file("audit", "metrics.csv", csv);

    let mut results = json!({
        "ensemble_report": report,
        "ensemble": metric_map(metrics, &ens),
        "members": members.iter().map(|v| metric_map(metrics, v)).collect::<Vec<_>>(),
    });
    if a.cloud > 0 {
        let cloud = weighting_cloud(data, a.cloud, a.common.seed.unwrap_or(0), t, metrics)?;
        let mut csv = String::from("index");
        for n in 0..data.n_members() {
            csv.push_str(&format!(",w{n}"));
        }
        for m in metrics {
            csv.push(',');
            csv.push_str(m.as_str());
        }
        csv.push('\n');
        for s in &cloud {
            csv.push_str(&s.index.to_string());
            for w in &s.weights {
                csv.push_str(&format!(",{w}"));
            }
            for v in &s.values {
                csv.push(',');
                csv.push_str(&fmt_opt(*v));
            }
            csv.push('\n');
        }
        out.file("audit", "cloud.csv", csv);
        results["cloud_size"] = json!(cloud.len());
    }
    out.results = Some(results);
    Ok(out)
}

fn sweep(a: &SweepArgs) -> Result<Outcome> {
    let rs = load_runset(&a.input)?;
    let cfg = SweepConfig {
        n_max: a.n_max.unwrap_or(rs.min_run_size()),
        orderings: a.orderings,
        threshold: a.common.threshold,
        seed: a.common.seed.unwrap_or(0),
        metrics: a.common.metrics.0.clone(),
    };
    let mut config = to_value(a)?;
    config["effective"] = to_value(&cfg)?;
    let mut out = Outcome::new(config, to_value(&rs.data().validate())?);
    if cfg.metrics.is_empty() {
        return Ok(out);
    }
    let curve = ensemble_size_sweep(&rs, &cfg)?;
    out.file("sweep", "curve.csv", curve.to_csv());
    if !a.common.no_charts {
        for &m in &cfg.metrics {
            let pts = curve.series(m);
            let series = Series {
                name: m.as_str().to_string(),
                points: pts.iter().map(|p| (p.n as f64, p.mean.unwrap_or(f64::NAN))).collect(),
                band: Some(pts.iter().map(|p| p.std.unwrap_or(0.0)).collect()),
            };
            let svg = line_chart(&format!("{m} vs. ensemble size"), "ensemble size", m.as_str(), &[series]);
            out.file("sweep", &format!("{m}.svg"), svg);
        }
    }
    out.results = Some(to_value(&curve)?);
    Ok(out)
}

fn diversity(a: &DiversityArgs) -> Result<Outcome> {
    let rs = load_runset(&a.input)?;
    let mut out = Outcome::new(to_value(a)?, to_value(&rs.data().validate())?);
    let all = diversity_table(rs.data());
    let per_run: Vec<Value> = (0..rs.n_runs())
        .map(|r| to_value(&diversity_table(&rs.run_data(r))))
        .collect::<Result<_>>()?;
    out.file("diversity", "cells.csv", all.to_csv());
    out.results = Some(json!({
        "all_members": all,
        "per_run": per_run,
        "jensen_check": check_jensen_identity(rs.data()),
    }));
    Ok(out)
}

fn calibration(a: &CalibrationArgs) -> Result<Outcome> {
    let rs = load_runset(&a.input)?;
    let data = rs.data();
    let mut out = Outcome::new(to_value(a)?, to_value(&data.validate())?);
    let scores = aggregate_uniform(data);
    let ens_ece = ece(&scores, data.labels(), a.bins)?;
    let member_ece: Vec<Option<f64>> = (0..data.n_members())
        .map(|n| ece(&data.member_scores(n), data.labels(), a.bins).map(|e| e.value))
        .collect::<Result<_>>()?;
    let scan = threshold_scan(&scores, data.labels(), data.groups(), &GridSpec::Uniform { steps: a.grid_steps })?;
    let member_scans = (0..data.n_members())
        .map(|n| {
            threshold_scan(&data.member_scores(n), data.labels(), data.groups(), &GridSpec::Uniform { steps: a.grid_steps })
                .map(|s| json!({"argmax_all": s.argmax_all, "argmax_group": s.argmax_group}))
        })
        .collect::<Result<Vec<_>>>()?;
    out.file("calibration", "bins.csv", ens_ece.bins_csv());
    out.file("calibration", "scan.csv", scan.to_csv());
    if !a.common.no_charts {
        let mut series = vec![Series::line("all", scan.grid.iter().copied().zip(scan.acc_all.iter().copied()).collect())];
        for g in 0..2 {
            if let Some(c) = &scan.acc_group[g] {
                series.push(Series::line(format!("a={g}"), scan.grid.iter().copied().zip(c.iter().copied()).collect()));
            }
        }
        out.file("calibration", "scan.svg", line_chart("Accuracy vs. threshold", "threshold", "accuracy", &series));
    }
    out.results = Some(json!({
        "ensemble_ece": ens_ece,
        "member_ece": member_ece,
        "ensemble_scan": {"argmax_all": scan.argmax_all, "argmax_group": scan.argmax_group},
        "member_scans": member_scans,
    }));
    Ok(out)
}

fn postprocess(a: &PostprocessArgs) -> Result<Outcome> {
    if !(a.epsilon >= 0.0 && a.epsilon.is_finite()) {
        return Err(Error::arg(format!("--epsilon must be finite and >= 0, got {}", a.epsilon)));
    }
    let fit = load_data(&a.fit)?;
    let apply = a.apply.as_deref().map(load_data).transpose()?;
    let validation = json!({
        "fit": fit.validate(),
        "apply": apply.as_ref().map(|d| d.validate()),
    });
    let mut out = Outcome::new(to_value(a)?, validation);
    let fit_scores = aggregate_uniform(&fit);
    let rule = fit_group_thresholds(&fit_scores, fit.labels(), fit.groups(), a.constraint, a.epsilon, a.objective)?;
    let fit_eval = apply_expected(&rule, &fit_scores, fit.labels(), fit.groups())?;
    let gap = fit_eval.gap(a.constraint).unwrap_or(0.0);
    if gap > a.epsilon + 1e-6 {
        return Err(Error::Internal(format!("fitted rule violates the constraint on fit data: gap {gap}")));
    }
    let t = a.common.threshold;
    let mut rows = before_after(&rule, "fit", &fit_scores, fit.labels(), fit.groups(), t)?.to_vec();
    let mut apply_eval = None;
    if let Some(d) = &apply {
        let s = aggregate_uniform(d);
        rows.extend(before_after(&rule, "apply", &s, d.labels(), d.groups(), t)?);
        apply_eval = Some(apply_expected(&rule, &s, d.labels(), d.groups())?);
    }
    out.file("postprocess", "rule.json", pretty(&rule)?);
    out.file("postprocess", "before_after.csv", before_after_csv(&rows));
    if a.sampled {
        let d = apply.as_ref().unwrap_or(&fit);
        let s = aggregate_uniform(d);
        let decisions = apply_sampled(&rule, &s, d.groups(), a.common.seed.unwrap_or(0))?;
        let mut csv = String::from("sample_id,a,score,decision\n");
        for (k, dec) in decisions.iter().enumerate() {
            csv.push_str(&format!("{},{},{},{}\n", d.sample_ids()[k], d.groups()[k], s[k], dec));
        }
        out.file("postprocess", "decisions.csv", csv);
    }
    out.results = Some(json!({
        "rule": rule,
        "fit_expected": fit_eval,
        "apply_expected": apply_eval,
        "before_after": rows,
    }));
    Ok(out)
}

fn simulate(a: &SimulateArgs) -> Result<Outcome> {
    let mut cfg: SyntheticConfig = match &a.config {
        Some(p) => serde_json::from_slice(&fs::read(p).map_err(|e| unreadable(p)(e.into()))?)?,
        None => SyntheticConfig::default(),
    };
    macro_rules! over {
        ($($f:ident),*) => { $(if let Some(v) = a.$f { cfg.$f = v; })* };
    }
    over!(per_cell, members, runs, separation, sigma0, gap, alpha, spread);
    if let Some(s) = a.common.seed {
        cfg.seed = s;
    }
    let rs = generate_synthetic(&cfg)?;
    let mut config = to_value(a)?;
    config["effective"] = to_value(&cfg)?;
    let mut out = Outcome::new(config, to_value(&rs.data().validate())?);
    let mut csv = Vec::new();
    rs.data().write_csv(&mut csv)?;
    out.file("simulate", "predictions.csv", csv);
    out.file("simulate", "runs.json", pretty(&rs.manifest())?);
    let per_run: Vec<Value> = (0..rs.n_runs())
        .map(|r| to_value(&diversity_table(&rs.run_data(r))))
        .collect::<Result<_>>()?;
    out.results = Some(json!({ "diversity_per_run": per_run }));
    Ok(out)
}

fn compare(a: &CompareArgs) -> Result<Outcome> {
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(Error::arg(format!("--alpha must lie in (0,1), got {}", a.alpha)));
    }
    let rs = load_runset(&a.input)?;
    let mut out = Outcome::new(to_value(a)?, to_value(&rs.data().validate())?);
    if a.common.metrics.0.is_empty() {
        return Ok(out);
    }
    let cfg = DeltaConfig {
        threshold: a.common.threshold,
        metrics: a.common.metrics.0.clone(),
        reduction: a.reduction,
        alpha: a.alpha,
        ..Default::default()
    };
    let table = delta_significance_table(&rs, &cfg)?;
    out.file("compare", "delta.csv", table.to_csv());
    out.file("compare", "delta.md", table.to_markdown());
    out.results = Some(to_value(&table)?);
    Ok(out)
}

/// Runs one parsed command and writes its outputs.
pub fn run_command(cmd: &Command) -> Result<Vec<ManifestEntry>> {
    let c = common(cmd);
    check_common(c)?;
    let outcome = match cmd {
        Command::Audit(a) => audit(a),
        Command::Sweep(a) => sweep(a),
        Command::Diversity(a) => diversity(a),
        Command::Calibration(a) => calibration(a),
        Command::Postprocess(a) => postprocess(a),
        Command::Simulate(a) => simulate(a),
        Command::Compare(a) => compare(a),
    }?;
    emit_report(cmd.name(), outcome, &c.out)
}

/// Writes `report.json`, the subcommand files, and `manifest.json`.
///
/// On failure every file written so far is removed.
pub fn emit_report(sub: &str, outcome: Outcome, out_dir: &Path) -> Result<Vec<ManifestEntry>> {
    let Outcome {
        config,
        validation,
        results,
        mut files,
    } = outcome;
    let names: Vec<&str> = files.iter().map(|f| f.0.as_str()).collect();
    let report = json!({
        "artifact": {"name": ARTIFACT, "version": VERSION},
        "subcommand": sub,
        "config": config,
        "validation": validation,
        "results": results,
        "files": names,
    });
    files.insert(0, ("report.json".to_string(), pretty(&report)?));
    let mut entries: Vec<ManifestEntry> = files
        .iter()
        .map(|(name, bytes)| ManifestEntry {
            name: name.clone(),
            bytes: bytes.len(),
            sha256: hex::encode(Sha256::digest(bytes)),
        })
        .collect();
    entries.sort_by(|a, b| a.name.cmp(&b.name));
    let manifest = pretty(&json!({
        "artifact": {"name": ARTIFACT, "version": VERSION},
        "files": entries,
    }))?;
    files.push(("manifest.json".to_string(), manifest));

    fs::create_dir_all(out_dir)?;
    let mut written: Vec<PathBuf> = Vec::new();
    for (name, bytes) in &files {
        let path = out_dir.join(name);
        if let Err(e) = fs::write(&path, bytes) {
            let _ = fs::remove_file(&path);
            for p in &written {
                let _ = fs::remove_file(p);
            }
            return Err(e.into());
        }
        written.push(path);
    }
    Ok(entries)
}

fn error_line(kind: &str, code: i32, message: &str) -> String {
    json!({"error": kind, "exit_code": code, "message": message}).to_string()
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| Error::arg(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Error::Internal(format!("thread pool: {e}")))
}

/// Parses `args`, runs the command, and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    let msg = e.to_string();
                    let first = msg.lines().find(|l| !l.trim().is_empty()).unwrap_or("usage error");
                    eprintln!("{}", error_line("argument", 64, first.trim()));
                    64
                }
            };
        }
    };
    let result = thread_pool().and_then(|pool| pool.install(|| run_command(&cli.command)));
    match result {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("{}", error_line(e.kind(), e.exit_code(), &e.to_string()));
            e.exit_code()
        }
    }
}
