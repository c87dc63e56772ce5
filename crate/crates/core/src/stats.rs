//! Welch tests, bootstrap intervals, and ensemble-minus-member delta tables.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{LabeledPredictions, RunSet};
use crate::ensemble::{evaluate_ensemble, fmt_opt, mean_std};
use crate::error::{Error, Result};
use crate::metrics::Metric;
use crate::rng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchTest {
    pub t: f64,
    pub df: f64,
    /// Two-sided p-value.
    pub p: f64,
    /// Both samples have zero variance and different means.
    pub degenerate: bool,
}

/// Sample size, mean, and n-1 variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub n: usize,
    pub mean: f64,
    pub var: f64,
}

impl Moments {
    pub fn of(xs: &[f64]) -> Option<Self> {
        let (mean, _) = mean_std(xs)?;
        Some(Moments::around(xs, mean))
    }

    /// Moments with a given mean; the variance is taken around it.
    fn around(xs: &[f64], mean: f64) -> Self {
        let n = xs.len();
        let var = if n > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Moments { n, mean, var }
    }
}

/// Unequal-variance two-sample t-test with Welch–Satterthwaite degrees of freedom.
pub fn welch_t_test(xs: &[f64], ys: &[f64]) -> Result<WelchTest> {
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::arg("Welch test inputs must be finite"));
    }
    match (Moments::of(xs), Moments::of(ys)) {
        (Some(x), Some(y)) => welch_from_moments(x, y),
        _ => Err(Error::arg("Welch test needs at least two values per sample")),
    }
}

/// Welch test from summary statistics.
pub fn welch_from_moments(x: Moments, y: Moments) -> Result<WelchTest> {
    if x.n < 2 || y.n < 2 {
        return Err(Error::arg("Welch test needs at least two values per sample"));
    }
    let (nx, ny) = (x.n as f64, y.n as f64);
    let (mx, my) = (x.mean, y.mean);
    let (sx, sy) = (x.var / nx, y.var / ny);
    let se2 = sx + sy;
    if se2 == 0.0 {
        let same = mx == my;
        return Ok(WelchTest {
            t: if same { 0.0 } else { f64::INFINITY.copysign(mx - my) },
            df: nx + ny - 2.0,
            p: if same { 1.0 } else { 0.0 },
            degenerate: !same,
        });
    }
    let t = (mx - my) / se2.sqrt();
    let df = se2 * se2 / (sx * sx / (nx - 1.0) + sy * sy / (ny - 1.0));
    Ok(WelchTest {
        t,
        df,
        p: student_t_two_sided(t, df),
        degenerate: false,
    })
}

/// `P(|T| >= |t|)` for Student's t with `df` degrees of freedom.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    let x = df / (df + t * t);
    incomplete_beta(x, df / 2.0, 0.5).clamp(0.0, 1.0)
}

/// Natural log of the gamma function (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, &c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

const BETA_TOL: f64 = 1e-15;
const BETA_MAX_ITER: usize = 10_000;

/// Regularized incomplete beta `I_x(a, b)`.
pub fn incomplete_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_cf(x, a, b) / a
    } else {
        1.0 - ln_front.exp() * beta_cf(1.0 - x, b, a) / b
    }
}

/// Continued fraction for the incomplete beta, modified Lentz evaluation.
fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=BETA_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < BETA_TOL {
            break;
        }
    }
    h
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapCi {
    pub estimate: Option<f64>,
    /// `None` when every resample was undefined.
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub level: f64,
    pub resamples: usize,
    /// Resamples on which the metric was undefined.
    pub skipped: usize,
}

/// Linear-interpolated quantile of sorted values.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Percentile interval over `resamples` bootstrap datasets.
///
/// Each resample draws with replacement within every (y, a) cell, so cell
/// counts are preserved. Resample `b` uses the stream keyed by `(seed, b)`.
pub fn bootstrap_ci<T, F>(
    data: &LabeledPredictions<T>,
    metric: F,
    resamples: usize,
    level: f64,
    seed: u64,
) -> Result<BootstrapCi>
where
    T: Scalar,
    F: Fn(&LabeledPredictions<T>) -> Option<f64> + Sync,
{
    if resamples == 0 {
        return Err(Error::arg("bootstrap needs at least one resample"));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::arg(format!("level must lie in (0,1), got {level}")));
    }
    let mut cells: [Vec<usize>; 4] = Default::default();
    for (k, (&y, &a)) in data.labels().iter().zip(data.groups()).enumerate() {
        cells[(2 * y + a) as usize].push(k);
    }
    let values: Vec<Option<f64>> = (0..resamples)
        .into_par_iter()
        .map(|b| {
            let mut r = rng::stream(seed, &[b as u64]);
            let rows: Vec<usize> = cells
                .iter()
                .flat_map(|c| (0..c.len()).map(|_| c[r.gen_range(0..c.len())]).collect::<Vec<_>>())
                .collect();
            metric(&data.resample_rows(&rows))
        })
        .collect();
    let mut ok: Vec<f64> = values.iter().flatten().copied().collect();
    ok.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    Ok(BootstrapCi {
        estimate: metric(data),
        lower: (!ok.is_empty()).then(|| quantile(&ok, tail)),
        upper: (!ok.is_empty()).then(|| quantile(&ok, 1.0 - tail)),
        level,
        resamples,
        skipped: resamples - ok.len(),
    })
}

/// How per-member metrics are summarized on the member side of a delta.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemberReduction {
    /// One value per run: the unweighted mean of that run's member metrics.
    #[default]
    RunMean,
    /// Every member of every run is one value.
    Pooled,
}

impl MemberReduction {
    pub fn as_str(&self) -> &'static str {
        match self {
            MemberReduction::RunMean => "run_mean",
            MemberReduction::Pooled => "pooled",
        }
    }
}

impl fmt::Display for MemberReduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MemberReduction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "run_mean" => Ok(MemberReduction::RunMean),
            "pooled" => Ok(MemberReduction::Pooled),
            _ => Err(Error::arg(format!("unknown member reduction `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaConfig {
    pub threshold: f64,
    pub metrics: Vec<Metric>,
    pub reduction: MemberReduction,
    /// Significance level.
    pub alpha: f64,
    /// Violation level above which a cell is shaded.
    pub violation_flag: f64,
}

impl Default for DeltaConfig {
    fn default() -> Self {
        DeltaConfig {
            threshold: 0.5,
            metrics: Metric::DEFAULT.to_vec(),
            reduction: MemberReduction::RunMean,
            alpha: 0.05,
            violation_flag: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaRow {
    pub metric: Metric,
    pub member_mean: Option<f64>,
    pub member_std: Option<f64>,
    pub ensemble_mean: Option<f64>,
    pub ensemble_std: Option<f64>,
    pub delta_mean: Option<f64>,
    /// Standard deviation across runs of the per-run delta.
    pub delta_std: Option<f64>,
    pub t: Option<f64>,
    pub df: Option<f64>,
    /// `None` with fewer than two values on either side.
    pub p: Option<f64>,
    pub significant: bool,
    pub degenerate: bool,
    /// Fairness violation above the flag level for both members and ensemble.
    pub gray: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaTable {
    pub config: DeltaConfig,
    pub runs: usize,
    pub rows: Vec<DeltaRow>,
}

/// Per-run ensemble-minus-member deltas with Welch tests across runs.
pub fn delta_significance_table<T: Scalar>(runset: &RunSet<T>, cfg: &DeltaConfig) -> Result<DeltaTable> {
    if !(0.0..=1.0).contains(&cfg.threshold) {
        return Err(Error::arg(format!("threshold must lie in [0,1], got {}", cfg.threshold)));
    }
    let threshold = T::lit(cfg.threshold);
    let n_runs = runset.n_runs();
    // per run: (ensemble values, per-member values)
    type RunValues = (Vec<Option<f64>>, Vec<Vec<Option<f64>>>);
    let per_run: Vec<RunValues> = (0..n_runs)
        .into_par_iter()
        .map(|r| -> Result<RunValues> {
            let run = runset.run_data(r);
            let ens = evaluate_ensemble(&run, threshold, &cfg.metrics)?;
            let members = (0..run.n_members())
                .map(|n| evaluate_ensemble(&run.select_members(&[n])?, threshold, &cfg.metrics))
                .collect::<Result<Vec<_>>>()?;
            Ok((ens, members))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(cfg.metrics.len());
    for (mi, &metric) in cfg.metrics.iter().enumerate() {
        let mut ens_vals = Vec::new();
        let mut run_means = Vec::new();
        let mut run_sizes = Vec::new();
        let mut pooled = Vec::new();
        let mut deltas = Vec::new();
        for (ens, members) in &per_run {
            let run_members: Vec<f64> = members.iter().filter_map(|m| m[mi]).collect();
            let run_mean = mean_std(&run_members).map(|m| m.0);
            if let Some(e) = ens[mi] {
                ens_vals.push(e);
            }
            if let Some(m) = run_mean {
                run_means.push(m);
                run_sizes.push(run_members.len());
            }
            pooled.extend(run_members.iter().copied());
            if let (Some(e), Some(m)) = (ens[mi], run_mean) {
                deltas.push(e - m);
            }
        }
        let e = Moments::of(&ens_vals);
        let m = match cfg.reduction {
            MemberReduction::RunMean => Moments::of(&run_means),
            MemberReduction::Pooled => pooled_mean(&run_means, &run_sizes).map(|mean| Moments::around(&pooled, mean)),
        };
        let welch = e.zip(m).and_then(|(e, m)| welch_from_moments(e, m).ok());
        let p = welch.map(|w| w.p);
        let ensemble_mean = e.map(|v| v.mean);
        let member_mean = m.map(|v| v.mean);
        rows.push(DeltaRow {
            metric,
            member_mean,
            member_std: m.map(|v| v.var.sqrt()),
            ensemble_mean,
            ensemble_std: e.map(|v| v.var.sqrt()),
            delta_mean: ensemble_mean.zip(member_mean).map(|(e, m)| e - m),
            delta_std: mean_std(&deltas).map(|v| v.1),
            t: welch.map(|w| w.t),
            df: welch.map(|w| w.df),
            p,
            significant: p.is_some_and(|p| p < cfg.alpha),
            degenerate: welch.is_some_and(|w| w.degenerate),
            gray: metric.is_violation()
                && member_mean.is_some_and(|v| v > cfg.violation_flag)
                && ensemble_mean.is_some_and(|v| v > cfg.violation_flag),
        });
    }
    Ok(DeltaTable {
        config: cfg.clone(),
        runs: n_runs,
        rows,
    })
}

/// Mean over all members, formed from the run means weighted by run size.
/// With equal run sizes this is the plain mean of the run means.
fn pooled_mean(run_means: &[f64], run_sizes: &[usize]) -> Option<f64> {
    if run_sizes.windows(2).all(|w| w[0] == w[1]) {
        return mean_std(run_means).map(|m| m.0);
    }
    let total: usize = run_sizes.iter().sum();
    let s: f64 = run_means.iter().zip(run_sizes).map(|(m, &n)| m * n as f64).sum();
    let lo = run_means.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = run_means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Some((s / total as f64).clamp(lo, hi))
}

/// Three decimals without the leading zero: `0.022` -> `.022`.
fn short(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = if s == "-0.000" { "0.000".to_string() } else { s };
    if let Some(rest) = s.strip_prefix("0.") {
        format!(".{rest}")
    } else if let Some(rest) = s.strip_prefix("-0.") {
        format!("-.{rest}")
    } else {
        s
    }
}

fn pm(mean: Option<f64>, std: Option<f64>) -> String {
    match (mean, std) {
        (Some(m), Some(s)) => format!("{} ± {}", short(m), short(s)),
        _ => "n/a".to_string(),
    }
}

impl DeltaTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "metric,member_mean,member_std,ensemble_mean,ensemble_std,delta_mean,delta_std,t,df,p,significant,degenerate,gray\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.metric,
                fmt_opt(r.member_mean),
                fmt_opt(r.member_std),
                fmt_opt(r.ensemble_mean),
                fmt_opt(r.ensemble_std),
                fmt_opt(r.delta_mean),
                fmt_opt(r.delta_std),
                fmt_opt(r.t),
                fmt_opt(r.df),
                fmt_opt(r.p),
                r.significant,
                r.degenerate,
                r.gray
            ));
        }
        out
    }

    /// Markdown table: significant deltas in bold, shaded rows marked in the
    /// last column.
    pub fn to_markdown(&self) -> String {
        let mut out = String::from("| Metric | Members | Ensemble | Δ | p | Flag |\n|---|---|---|---|---|---|\n");
        for r in &self.rows {
            let delta = pm(r.delta_mean, r.delta_std);
            let delta = if r.significant { format!("**{delta}**") } else { delta };
            out.push_str(&format!(
                "| {} | {} | {} | {} | {} | {} |\n",
                r.metric,
                pm(r.member_mean, r.member_std),
                pm(r.ensemble_mean, r.ensemble_std),
                delta,
                r.p.map_or("n/a".to_string(), |p| format!("{p:.3}")),
                if r.gray { "gray" } else { "" }
            ));
        }
        out
    }
}
