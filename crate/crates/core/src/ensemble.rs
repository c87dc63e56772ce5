//! Score aggregation and ensemble-size sweeps.

use rand::seq::SliceRandom;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{EnsembleWeights, LabeledPredictions, RunSet};
use crate::diversity::{average_div, diversity_table, CellFilter};
use crate::error::{Error, Result};
use crate::metrics::{fairness_report, Metric};
use crate::rng;
use crate::scalar::Scalar;

/// Weighted average of member scores per sample.
pub fn aggregate<T: Scalar>(
    data: &LabeledPredictions<T>,
    weights: &EnsembleWeights<T>,
) -> Result<Vec<T>> {
    if weights.len() != data.n_members() {
        return Err(Error::arg(format!(
            "{} weights for {} members",
            weights.len(),
            data.n_members()
        )));
    }
    let w = weights.as_slice();
    Ok(data
        .rows()
        .map(|row| {
            let s = row
                .iter()
                .zip(w)
                .fold(T::zero(), |acc, (&p, &l)| acc + l * p);
            within_row(s, row)
        })
        .collect())
}

/// Plain average of member scores (uniform weights).
pub fn aggregate_uniform<T: Scalar>(data: &LabeledPredictions<T>) -> Vec<T> {
    let n = T::count(data.n_members());
    data.rows()
        .map(|row| {
            let s = row.iter().fold(T::zero(), |acc, &p| acc + p) / n;
            within_row(s, row)
        })
        .collect()
}

/// Clamps a convex combination into the range of the row it came from, so
/// rounding never moves it outside; identical members aggregate exactly.
pub(crate) fn within_row<T: Scalar>(s: T, row: &[T]) -> T {
    let lo = row.iter().copied().fold(T::infinity(), T::min);
    let hi = row.iter().copied().fold(T::neg_infinity(), T::max);
    s.max(lo).min(hi)
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightMode<T> {
    Uniform,
    /// One draw from the flat Dirichlet over the simplex.
    Dirichlet { seed: u64 },
    /// `exp(-F_n / tau)` normalized, with `F_n` a per-member fairness violation.
    FairnessSoftmax { violations: Vec<T>, temperature: T },
}

pub fn make_weights<T: Scalar>(mode: &WeightMode<T>, n: usize) -> Result<EnsembleWeights<T>> {
    if n == 0 {
        return Err(Error::arg("cannot weight zero members"));
    }
    match mode {
        WeightMode::Uniform => EnsembleWeights::uniform(n),
        WeightMode::Dirichlet { seed } => {
            let mut r = rng::stream(*seed, &[0xD1, n as u64]);
            let gamma = Gamma::new(1.0, 1.0).expect("unit gamma");
            let draws: Vec<f64> = (0..n).map(|_| gamma.sample(&mut r)).collect();
            let total: f64 = draws.iter().sum();
            normalized(draws.iter().map(|d| d / total).collect())
        }
        WeightMode::FairnessSoftmax {
            violations,
            temperature,
        } => {
            if violations.len() != n {
                return Err(Error::arg(format!(
                    "{} fairness violations for {} members",
                    violations.len(),
                    n
                )));
            }
            if !(*temperature > T::zero()) {
                return Err(Error::arg("temperature must be positive"));
            }
            if violations
                .iter()
                .any(|&f| !(f >= T::zero() && f <= T::one()))
            {
                return Err(Error::arg("fairness violations must lie in [0,1]"));
            }
            let tau = temperature.as_f64();
            let logits: Vec<f64> = violations.iter().map(|f| -f.as_f64() / tau).collect();
            let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
            let total: f64 = exps.iter().sum();
            normalized(exps.iter().map(|e| e / total).collect())
        }
    }
}

/// Casts to `T` and puts the rounding residue on the largest weight.
fn normalized<T: Scalar>(w: Vec<f64>) -> Result<EnsembleWeights<T>> {
    let mut out: Vec<T> = w.iter().map(|&x| T::lit(x)).collect();
    let sum: f64 = out.iter().map(|x| x.as_f64()).sum();
    let (imax, _) = out
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite"))
        .expect("non-empty");
    out[imax] = (out[imax] + T::lit(1.0 - sum)).max(T::zero());
    EnsembleWeights::new(out)
}

/// Evaluates `metrics` for the uniform ensemble of all members in `data`.
///
/// Report metrics use the aggregated score column at `threshold`; diversity
/// metrics use the member matrix.
pub fn evaluate_ensemble<T: Scalar>(
    data: &LabeledPredictions<T>,
    threshold: T,
    metrics: &[Metric],
) -> Result<Vec<Option<f64>>> {
    let scores = aggregate_uniform(data);
    evaluate_scores(data, &scores, threshold, metrics)
}

/// Evaluates `metrics` for a given aggregated score column; diversity metrics
/// are taken from the members of `data`.
pub fn evaluate_scores<T: Scalar>(
    data: &LabeledPredictions<T>,
    scores: &[T],
    threshold: T,
    metrics: &[Metric],
) -> Result<Vec<Option<f64>>> {
    let needs_report = metrics.iter().any(|m| !m.is_diversity());
    let report = if needs_report {
        Some(fairness_report(scores, data.labels(), data.groups(), threshold)?)
    } else {
        None
    };
    let table = metrics
        .contains(&Metric::DiversityScore)
        .then(|| diversity_table(data));
    Ok(metrics
        .iter()
        .map(|&m| {
            let v = match m {
                Metric::DivAll => average_div(data, CellFilter::ALL).value,
                Metric::DivY0A0 => average_div(data, CellFilter::cell(0, 0)).value,
                Metric::DivY0A1 => average_div(data, CellFilter::cell(0, 1)).value,
                Metric::DivY1A0 => average_div(data, CellFilter::cell(1, 0)).value,
                Metric::DivY1A1 => average_div(data, CellFilter::cell(1, 1)).value,
                Metric::DiversityScore => table.as_ref().and_then(|t| t.score),
                _ => report.as_ref().and_then(|r| r.metric(m)),
            };
            v.map(Scalar::as_f64)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n_max: usize,
    pub orderings: usize,
    pub threshold: f64,
    pub seed: u64,
    pub metrics: Vec<Metric>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub threshold: f64,
    pub n_max: usize,
    pub orderings: usize,
    pub runs: usize,
    pub seed: u64,
    /// How prefixes were formed.
    pub sampling: String,
    /// Standard deviations use the n-1 denominator over runs x orderings.
    pub std_ddof: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub metric: Metric,
    pub n: usize,
    pub mean: Option<f64>,
    pub std: Option<f64>,
    /// Number of (run, ordering) evaluations where the metric was defined.
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub metadata: SweepMetadata,
    pub points: Vec<SweepPoint>,
}

impl SweepCurve {
    pub fn series(&self, metric: Metric) -> Vec<&SweepPoint> {
        self.points.iter().filter(|p| p.metric == metric).collect()
    }

    pub fn point(&self, metric: Metric, n: usize) -> Option<&SweepPoint> {
        self.points.iter().find(|p| p.metric == metric && p.n == n)
    }

    /// Long-format CSV preceded by a `# {json metadata}` line.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# {}\nmetric,n,mean,std\n",
            serde_json::to_string(&self.metadata).expect("metadata serializes")
        );
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{}\n",
                p.metric,
                p.n,
                fmt_opt(p.mean),
                fmt_opt(p.std)
            ));
        }
        out
    }
}

pub(crate) fn fmt_opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

/// Mean and n-1 standard deviation; the deviation is 0 for a single value.
/// The mean is kept within the range of the values, so a constant sample
/// has exactly that constant as its mean.
pub fn mean_std(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = (xs.iter().sum::<f64>() / n).clamp(lo, hi);
    if xs.len() == 1 {
        return Some((mean, 0.0));
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Some((mean, var.sqrt()))
}

/// Adds members one at a time along seeded permutations of each run.
///
/// Every (run, ordering) pair draws its own permutation from a stream keyed by
/// `(seed, run, ordering)`, and prefix ensembles of size `1..=n_max` reuse that
/// permutation. Results are reduced in a fixed order, so they do not depend on
/// the thread count.
pub fn ensemble_size_sweep<T: Scalar>(runset: &RunSet<T>, cfg: &SweepConfig) -> Result<SweepCurve> {
    if cfg.orderings == 0 {
        return Err(Error::arg("need at least one ordering"));
    }
    if cfg.n_max == 0 || cfg.n_max > runset.min_run_size() {
        return Err(Error::arg(format!(
            "n_max = {} must be in 1..={} (smallest run)",
            cfg.n_max,
            runset.min_run_size()
        )));
    }
    let threshold = T::lit(cfg.threshold);
    let tasks: Vec<(usize, usize)> = (0..runset.n_runs())
        .flat_map(|r| (0..cfg.orderings).map(move |o| (r, o)))
        .collect();

    // values[task][n-1][metric]
    let values: Vec<Vec<Vec<Option<f64>>>> = tasks
        .par_iter()
        .map(|&(run, ordering)| {
            let mut members = runset.run_members(run).to_vec();
            members.shuffle(&mut rng::stream(cfg.seed, &[run as u64, ordering as u64]));
            (1..=cfg.n_max)
                .map(|n| {
                    let prefix = runset.data().select_members(&members[..n])?;
                    evaluate_ensemble(&prefix, threshold, &cfg.metrics)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut points = Vec::with_capacity(cfg.metrics.len() * cfg.n_max);
    for (mi, &metric) in cfg.metrics.iter().enumerate() {
        for n in 1..=cfg.n_max {
            let xs: Vec<f64> = values.iter().filter_map(|task| task[n - 1][mi]).collect();
            let ms = mean_std(&xs);
            points.push(SweepPoint {
                metric,
                n,
                mean: ms.map(|m| m.0),
                std: ms.map(|m| m.1),
                count: xs.len(),
            });
        }
    }
    Ok(SweepCurve {
        metadata: SweepMetadata {
            threshold: cfg.threshold,
            n_max: cfg.n_max,
            orderings: cfg.orderings,
            runs: runset.n_runs(),
            seed: cfg.seed,
            sampling: "prefix-of-permutation".into(),
            std_ddof: 1,
        },
        points,
    })
}

/// One sampled weighting and its evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightingSample {
    pub index: usize,
    pub weights: Vec<f64>,
    pub values: Vec<Option<f64>>,
}

/// Draws `count` flat-Dirichlet weightings and evaluates each weighted ensemble.
///
/// Emits the (performance, violation) cloud only; no weighting is selected.
pub fn weighting_cloud<T: Scalar>(
    data: &LabeledPredictions<T>,
    count: usize,
    seed: u64,
    threshold: T,
    metrics: &[Metric],
) -> Result<Vec<WeightingSample>> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let w = make_weights::<T>(
                &WeightMode::Dirichlet {
                    seed: rng::splitmix(seed, i as u64),
                },
                data.n_members(),
            )?;
            let scores = aggregate(data, &w)?;
            Ok(WeightingSample {
                index: i,
                weights: w.as_slice().iter().map(|x| x.as_f64()).collect(),
                values: evaluate_scores(data, &scores, threshold, metrics)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::RunManifest;

    fn two_members() -> LabeledPredictions<f64> {
        LabeledPredictions::new(
            vec!["a".into(), "b".into()],
            vec![1, 0],
            vec![0, 1],
            vec![vec![0.2, 0.4], vec![0.9, 0.5]],
        )
        .unwrap()
    }

    #[test]
    fn aggregate_examples() {
        let d = two_members();
        let u = aggregate(&d, &EnsembleWeights::uniform(2).unwrap()).unwrap();
        assert!((u[0] - 0.3).abs() < 1e-15);
        let w = aggregate(&d, &EnsembleWeights::new(vec![1.0, 0.0]).unwrap()).unwrap();
        assert_eq!(w, d.member_scores(0));
        let w = aggregate(&d, &EnsembleWeights::new(vec![0.25, 0.75]).unwrap()).unwrap();
        assert!((w[0] - 0.35).abs() < 1e-15);
        assert!(aggregate(&d, &EnsembleWeights::uniform(3).unwrap()).is_err());
    }

    #[test]
    fn weight_modes() {
        let u = make_weights::<f64>(&WeightMode::Uniform, 4).unwrap();
        assert_eq!(u.as_slice(), &[0.25; 4]);
        let eq = make_weights(
            &WeightMode::FairnessSoftmax {
                violations: vec![0.0, 0.0],
                temperature: 3.0,
            },
            2,
        )
        .unwrap();
        assert_eq!(eq.as_slice(), &[0.5, 0.5]);
        // softmax(-1, -3)
        let s = make_weights::<f64>(
            &WeightMode::FairnessSoftmax {
                violations: vec![0.1, 0.3],
                temperature: 0.1,
            },
            2,
        )
        .unwrap();
        assert!((s.as_slice()[0] - 0.8808).abs() < 1e-4);
        assert!((s.as_slice()[1] - 0.1192).abs() < 1e-4);
        let d1 = make_weights::<f64>(&WeightMode::Dirichlet { seed: 3 }, 5).unwrap();
        let d2 = make_weights::<f64>(&WeightMode::Dirichlet { seed: 3 }, 5).unwrap();
        assert_eq!(d1, d2);
        assert!(make_weights::<f64>(
            &WeightMode::FairnessSoftmax {
                violations: vec![0.1],
                temperature: 0.0
            },
            1
        )
        .is_err());
        assert!(make_weights::<f64>(
            &WeightMode::FairnessSoftmax {
                violations: vec![1.2],
                temperature: 1.0
            },
            1
        )
        .is_err());
    }

    #[test]
    fn tiny_temperature_does_not_overflow() {
        let s = make_weights(
            &WeightMode::FairnessSoftmax {
                violations: vec![0.9, 0.1, 0.5],
                temperature: 1e-6,
            },
            3,
        )
        .unwrap();
        assert_eq!(s.as_slice()[1], 1.0);
    }

    #[test]
    fn identical_members_give_flat_sweep() {
        let col = [0.1, 0.7, 0.4, 0.9, 0.6, 0.2];
        let d = LabeledPredictions::<f64>::new(
            (0..6).map(|i| i.to_string()).collect(),
            vec![0, 1, 0, 1, 1, 0],
            vec![0, 0, 0, 1, 1, 1],
            col.iter().map(|&c| vec![c; 4]).collect(),
        )
        .unwrap();
        let rs = RunSet::single_run(d);
        let curve = ensemble_size_sweep(
            &rs,
            &SweepConfig {
                n_max: 4,
                orderings: 3,
                threshold: 0.5,
                seed: 1,
                metrics: Metric::DEFAULT.to_vec(),
            },
        )
        .unwrap();
        for m in Metric::DEFAULT {
            let s = curve.series(m);
            assert_eq!(s.len(), 4);
            for p in &s {
                assert_eq!(p.mean, s[0].mean);
                assert_eq!(p.std, Some(0.0));
            }
        }
    }

    #[test]
    fn sweep_prefix_of_one_is_first_member() {
        let d = LabeledPredictions::<f64>::new(
            (0..4).map(|i| i.to_string()).collect(),
            vec![0, 1, 0, 1],
            vec![0, 0, 1, 1],
            vec![
                vec![0.2, 0.6, 0.9],
                vec![0.7, 0.4, 0.8],
                vec![0.1, 0.55, 0.3],
                vec![0.8, 0.45, 0.6],
            ],
        )
        .unwrap();
        let rs = RunSet::single_run(d.clone());
        let cfg = SweepConfig {
            n_max: 1,
            orderings: 1,
            threshold: 0.5,
            seed: 9,
            metrics: vec![Metric::Accuracy, Metric::SpdSigned],
        };
        let curve = ensemble_size_sweep(&rs, &cfg).unwrap();
        let mut perm = [0, 1, 2];
        perm.shuffle(&mut rng::stream(9, &[0, 0]));
        let r = fairness_report(&d.member_scores(perm[0]), d.labels(), d.groups(), 0.5).unwrap();
        assert_eq!(curve.point(Metric::Accuracy, 1).unwrap().mean, Some(r.accuracy));
        assert_eq!(curve.point(Metric::SpdSigned, 1).unwrap().mean, r.spd_signed);
        assert_eq!(curve.point(Metric::Accuracy, 1).unwrap().std, Some(0.0));
    }

    #[test]
    fn sweep_rejects_oversized_prefix() {
        let d = two_members();
        let rs = RunSet::new(d, &RunManifest { runs: vec![vec![0], vec![1]] }).unwrap();
        let cfg = SweepConfig {
            n_max: 2,
            orderings: 1,
            threshold: 0.5,
            seed: 0,
            metrics: vec![],
        };
        assert!(ensemble_size_sweep(&rs, &cfg).is_err());
    }

    #[test]
    fn sweep_csv_has_metadata_line() {
        let rs = RunSet::single_run(two_members());
        let cfg = SweepConfig {
            n_max: 2,
            orderings: 2,
            threshold: 0.5,
            seed: 0,
            metrics: vec![Metric::Accuracy],
        };
        let csv = ensemble_size_sweep(&rs, &cfg).unwrap().to_csv();
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with("# {"));
        assert_eq!(lines.next().unwrap(), "metric,n,mean,std");
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn weighting_cloud_is_seeded() {
        let d = two_members();
        let a = weighting_cloud(&d, 5, 11, 0.5, &[Metric::Accuracy]).unwrap();
        let b = weighting_cloud(&d, 5, 11, 0.5, &[Metric::Accuracy]).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|s| (s.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12));
    }
}
