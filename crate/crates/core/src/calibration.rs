//! Expected calibration error and per-group threshold scans.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_BINS: usize = 15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EceBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
    pub accuracy: Option<f64>,
    pub confidence: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ece {
    /// `None` for empty input.
    pub value: Option<f64>,
    pub bins: Vec<EceBin>,
}

/// Binary ECE over predicted-class confidence.
///
/// The predicted class is `score > 0.5` and its confidence is
/// `max(score, 1 - score)`, which always lies in `[0.5, 1]`. That interval is
/// split into `bins` equal-width, right-closed bins; a confidence on an inner
/// edge belongs to the lower bin, and exactly 0.5 belongs to the first.
pub fn ece<T: Scalar>(scores: &[T], labels: &[u8], bins: usize) -> Result<Ece> {
    if bins == 0 {
        return Err(Error::arg("ECE needs at least one bin"));
    }
    if scores.len() != labels.len() {
        return Err(Error::arg("scores and labels differ in length"));
    }
    let edges: Vec<f64> = (0..=bins)
        .map(|j| 0.5 + 0.5 * j as f64 / bins as f64)
        .collect();
    let mut count = vec![0usize; bins];
    let mut correct = vec![0usize; bins];
    let mut conf_sum = vec![0.0f64; bins];
    for (&s, &y) in scores.iter().zip(labels) {
        let s = s.as_f64();
        let predicted = u8::from(s > 0.5);
        let conf = s.max(1.0 - s);
        // first edge index j >= 1 with conf <= edges[j]
        let b = edges[1..].partition_point(|&e| e < conf).min(bins - 1);
        count[b] += 1;
        correct[b] += usize::from(predicted == y);
        conf_sum[b] += conf;
    }
    let k = scores.len();
    let table: Vec<EceBin> = (0..bins)
        .map(|b| EceBin {
            lower: edges[b],
            upper: edges[b + 1],
            count: count[b],
            accuracy: (count[b] > 0).then(|| correct[b] as f64 / count[b] as f64),
            confidence: (count[b] > 0).then(|| conf_sum[b] / count[b] as f64),
        })
        .collect();
    let value = (k > 0).then(|| {
        table
            .iter()
            .filter(|b| b.count > 0)
            .map(|b| {
                let gap = (b.accuracy.unwrap() - b.confidence.unwrap()).abs();
                b.count as f64 / k as f64 * gap
            })
            .sum::<f64>()
    });
    Ok(Ece { value, bins: table })
}

impl Ece {
    pub fn bins_csv(&self) -> String {
        let mut out = String::from("lower,upper,count,accuracy,confidence\n");
        for b in &self.bins {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                b.lower,
                b.upper,
                b.count,
                b.accuracy.map_or(String::new(), |v| v.to_string()),
                b.confidence.map_or(String::new(), |v| v.to_string())
            ));
        }
        out
    }
}

/// Threshold grid for scans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GridSpec {
    /// `0, 1/steps, ..., 1`.
    Uniform { steps: usize },
    Points(Vec<f64>),
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::Uniform { steps: 100 }
    }
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        let pts = match self {
            GridSpec::Uniform { steps } => {
                if *steps == 0 {
                    return Err(Error::arg("grid needs at least one step"));
                }
                (0..=*steps).map(|i| i as f64 / *steps as f64).collect()
            }
            GridSpec::Points(p) => p.clone(),
        };
        if pts.is_empty() {
            return Err(Error::arg("threshold grid is empty"));
        }
        if pts.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(Error::arg("threshold grid must lie within [0,1]"));
        }
        if pts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::arg("threshold grid must be strictly increasing"));
        }
        Ok(pts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArgMax {
    pub threshold: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdScan {
    pub grid: Vec<f64>,
    pub acc_all: Vec<f64>,
    /// Per-group accuracy curves; `None` for an empty group.
    pub acc_group: [Option<Vec<f64>>; 2],
    pub argmax_all: ArgMax,
    pub argmax_group: [Option<ArgMax>; 2],
}

struct SortedGroup {
    pos: Vec<f64>,
    neg: Vec<f64>,
}

impl SortedGroup {
    fn len(&self) -> usize {
        self.pos.len() + self.neg.len()
    }

    /// Correct decisions of `score > t`.
    fn correct(&self, t: f64) -> usize {
        let tp = self.pos.len() - self.pos.partition_point(|&s| s <= t);
        let tn = self.neg.partition_point(|&s| s <= t);
        tp + tn
    }
}

fn argmax(grid: &[f64], acc: &[f64]) -> ArgMax {
    // strict > keeps the smallest threshold among ties
    let mut best = 0;
    for i in 1..acc.len() {
        if acc[i] > acc[best] {
            best = i;
        }
    }
    ArgMax {
        threshold: grid[best],
        accuracy: acc[best],
    }
}

/// Accuracy of `score > t` at every grid threshold, overall and per group.
pub fn threshold_scan<T: Scalar>(
    scores: &[T],
    labels: &[u8],
    groups: &[u8],
    grid: &GridSpec,
) -> Result<ThresholdScan> {
    if scores.len() != labels.len() || scores.len() != groups.len() {
        return Err(Error::arg("scores, labels, and groups differ in length"));
    }
    if scores.is_empty() {
        return Err(Error::arg("threshold scan needs samples"));
    }
    let grid = grid.points()?;
    let mut parts = [
        SortedGroup { pos: vec![], neg: vec![] },
        SortedGroup { pos: vec![], neg: vec![] },
    ];
    for ((&s, &y), &a) in scores.iter().zip(labels).zip(groups) {
        let g = &mut parts[(a & 1) as usize];
        if y == 1 {
            g.pos.push(s.as_f64());
        } else {
            g.neg.push(s.as_f64());
        }
    }
    for p in parts.iter_mut() {
        p.pos.sort_by(f64::total_cmp);
        p.neg.sort_by(f64::total_cmp);
    }
    // Thresholds are compared in the scalar type of the scores.
    let grid_t: Vec<f64> = grid.iter().map(|&t| T::lit(t).as_f64()).collect();
    let k = scores.len() as f64;
    let acc_all: Vec<f64> = grid_t
        .iter()
        .map(|&t| (parts[0].correct(t) + parts[1].correct(t)) as f64 / k)
        .collect();
    let acc_group = [0, 1].map(|a| {
        let p = &parts[a];
        (p.len() > 0).then(|| {
            grid_t
                .iter()
                .map(|&t| p.correct(t) as f64 / p.len() as f64)
                .collect::<Vec<f64>>()
        })
    });
    let argmax_group = [0, 1].map(|a| acc_group[a].as_ref().map(|c| argmax(&grid, c)));
    Ok(ThresholdScan {
        argmax_all: argmax(&grid, &acc_all),
        grid,
        acc_all,
        acc_group,
        argmax_group,
    })
}

impl ThresholdScan {
    /// `threshold,acc_all,acc_a0,acc_a1`; an empty group leaves its column blank.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("threshold,acc_all,acc_a0,acc_a1\n");
        for (i, t) in self.grid.iter().enumerate() {
            let g = |a: usize| {
                self.acc_group[a]
                    .as_ref()
                    .map_or(String::new(), |c| c[i].to_string())
            };
            out.push_str(&format!("{},{},{},{}\n", t, self.acc_all[i], g(0), g(1)));
        }
        out
    }
}
