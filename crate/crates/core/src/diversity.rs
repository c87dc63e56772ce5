//! Average predictive diversity per (target, group) cell.
//!
//! For a cell of samples, the average diversity is the mean over samples of
//! the ensemble log-likelihood of the true label minus the average member
//! log-likelihood. It is an empirical Jensen gap and therefore non-negative.
//! Member likelihoods are clamped to `[1e-12, 1 - 1e-12]` before taking logs.

use serde::{Deserialize, Serialize};

use crate::data::LabeledPredictions;
use crate::scalar::Scalar;

pub const PROB_CLAMP: f64 = 1e-12;

/// Selects samples by label and/or group; `None` matches everything.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellFilter {
    pub y: Option<u8>,
    pub a: Option<u8>,
}

impl CellFilter {
    pub const ALL: CellFilter = CellFilter { y: None, a: None };

    pub fn cell(y: u8, a: u8) -> Self {
        CellFilter {
            y: Some(y),
            a: Some(a),
        }
    }

    fn matches(&self, y: u8, a: u8) -> bool {
        self.y.is_none_or(|v| v == y) && self.a.is_none_or(|v| v == a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiversityCell<T> {
    pub y: Option<u8>,
    pub a: Option<u8>,
    /// `None` when the cell is empty.
    pub value: Option<T>,
    pub count: usize,
}

/// Likelihood member `n` assigns to the observed label of sample `k`, clamped.
fn likelihood<T: Scalar>(score: T, y: u8) -> T {
    let p = if y == 1 { score } else { T::one() - score };
    let lo = T::lit(PROB_CLAMP);
    p.max(lo).min(T::one() - lo)
}

/// Per-sample diversity term: log of mean likelihood minus mean log likelihood.
fn sample_term<T: Scalar>(row: &[T], y: u8) -> T {
    let n = T::count(row.len());
    let mut sum_p = T::zero();
    let mut sum_log = T::zero();
    let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
    for &s in row {
        let p = likelihood(s, y);
        sum_p = sum_p + p;
        sum_log = sum_log + p.ln();
        lo = lo.min(p);
        hi = hi.max(p);
    }
    // both means stay within the range of their terms
    let mean_p = (sum_p / n).max(lo).min(hi);
    let mean_log = (sum_log / n).max(lo.ln()).min(hi.ln());
    mean_p.ln() - mean_log
}

pub fn average_div<T: Scalar>(data: &LabeledPredictions<T>, filter: CellFilter) -> DiversityCell<T> {
    let mut sum = T::zero();
    let mut count = 0usize;
    for (k, row) in data.rows().enumerate() {
        let (y, a) = (data.labels()[k], data.groups()[k]);
        if filter.matches(y, a) {
            sum = sum + sample_term(row, y);
            count += 1;
        }
    }
    DiversityCell {
        y: filter.y,
        a: filter.a,
        value: (count > 0).then(|| sum / T::count(count)),
        count,
    }
}

/// `|DIV(1,1) - DIV(1,0)| + |DIV(0,1) - DIV(0,0)|`; `None` if any cell is undefined
/// or missing from `cells`.
pub fn diversity_score<T: Scalar>(cells: &[DiversityCell<T>]) -> Option<T> {
    let get = |y: u8, a: u8| {
        cells
            .iter()
            .find(|c| c.y == Some(y) && c.a == Some(a))
            .and_then(|c| c.value)
    };
    Some((get(1, 1)? - get(1, 0)?).abs() + (get(0, 1)? - get(0, 0)?).abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityTable<T> {
    /// Cells in (y, a) order: (0,0), (0,1), (1,0), (1,1).
    pub cells: Vec<DiversityCell<T>>,
    pub all: DiversityCell<T>,
    pub score: Option<T>,
}

pub fn diversity_table<T: Scalar>(data: &LabeledPredictions<T>) -> DiversityTable<T> {
    let cells: Vec<_> = [(0, 0), (0, 1), (1, 0), (1, 1)]
        .into_iter()
        .map(|(y, a)| average_div(data, CellFilter::cell(y, a)))
        .collect();
    let score = diversity_score(&cells);
    DiversityTable {
        all: average_div(data, CellFilter::ALL),
        cells,
        score,
    }
}

impl<T: Scalar> DiversityTable<T> {
    /// `y,a,div,count` rows; the overall cell uses `all` in both key columns.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("y,a,div,count\n");
        let key = |v: Option<u8>| v.map_or("all".to_string(), |x| x.to_string());
        for c in self.cells.iter().chain(std::iter::once(&self.all)) {
            let div = c.value.map_or(String::new(), |v| v.to_string());
            out.push_str(&format!("{},{},{},{}\n", key(c.y), key(c.a), div, c.count));
        }
        out
    }
}

/// Both sides of the total log-likelihood-ratio identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JensenCheck {
    /// `K` times the average diversity, summed sample by sample.
    pub lhs: f64,
    /// Ensemble total log-likelihood minus the mean of member total log-likelihoods.
    pub rhs: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// Relative tolerance of the identity check.
pub const JENSEN_TOLERANCE: f64 = 1e-9;

pub fn check_jensen_identity<T: Scalar>(data: &LabeledPredictions<T>) -> JensenCheck {
    let labels = data.labels();
    let k = data.len();
    let n = data.n_members();

    // Route 1: per-sample diversity terms.
    let lhs = average_div(data, CellFilter::ALL)
        .value
        .map_or(0.0, |v| v.as_f64() * k as f64);

    // Route 2: dataset-level log-likelihoods, member by member.
    let ensemble_ll: f64 = data
        .rows()
        .zip(labels)
        .map(|(row, &y)| {
            let mean: f64 = row.iter().map(|&s| likelihood(s, y).as_f64()).sum::<f64>() / n as f64;
            mean.ln()
        })
        .sum();
    let member_ll: Vec<f64> = (0..n)
        .map(|m| {
            (0..k)
                .map(|i| likelihood(data.score(i, m), labels[i]).as_f64().ln())
                .sum()
        })
        .collect();
    let rhs = ensemble_ll - member_ll.iter().sum::<f64>() / n as f64;

    let residual = (lhs - rhs).abs();
    // Rounding of the scalar type bounds how tight the check can be.
    let eps = T::epsilon().as_f64().max(f64::EPSILON);
    let tolerance = JENSEN_TOLERANCE.max(eps * 1e3 * (k as f64).sqrt()) * lhs.abs().max(1.0);
    JensenCheck {
        lhs,
        rhs,
        residual,
        tolerance,
        holds: residual < tolerance,
    }
}
