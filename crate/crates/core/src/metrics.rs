//! Per-group confusion statistics, group-fairness gaps, and performance metrics.
//!
//! Decisions use the strict rule `score > t`; a score equal to the threshold is
//! a negative prediction. Counts are integers and every rate or gap is formed
//! as an exact rational before a single rounding into the scalar type, so the
//! hand-countable cases come out exactly (e.g. `1/3 - 2/3 == -1/3`).
//!
//! Gaps follow the "group 1 is advantaged" convention:
//! `spd = PR_1 - PR_0`, `eod = TPR_1 - TPR_0`,
//! `aod = |TPR_1 - TPR_0| / 2 + |FPR_1 - FPR_0| / 2`.
//! Undefined rates (empty group or zero denominator) are `None`, never errors.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type Rate = Ratio<i128>;

fn rate(num: u64, den: u64) -> Option<Rate> {
    (den > 0).then(|| Ratio::new(num as i128, den as i128))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl GroupCounts {
    pub fn size(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn positives(&self) -> u64 {
        self.tp + self.fn_
    }

    pub fn negatives(&self) -> u64 {
        self.fp + self.tn
    }

    pub fn predicted_positive(&self) -> u64 {
        self.tp + self.fp
    }

    pub fn pr_exact(&self) -> Option<Rate> {
        rate(self.predicted_positive(), self.size())
    }

    pub fn tpr_exact(&self) -> Option<Rate> {
        rate(self.tp, self.positives())
    }

    pub fn fpr_exact(&self) -> Option<Rate> {
        rate(self.fp, self.negatives())
    }

    pub fn tnr_exact(&self) -> Option<Rate> {
        rate(self.tn, self.negatives())
    }

    pub fn fnr_exact(&self) -> Option<Rate> {
        rate(self.fn_, self.positives())
    }

    pub fn accuracy_exact(&self) -> Option<Rate> {
        rate(self.tp + self.tn, self.size())
    }

    pub fn balanced_accuracy_exact(&self) -> Option<Rate> {
        Some((self.tpr_exact()? + self.tnr_exact()?) / Ratio::from_integer(2))
    }

    pub fn pr<T: Scalar>(&self) -> Option<T> {
        self.pr_exact().map(T::from_ratio)
    }

    pub fn tpr<T: Scalar>(&self) -> Option<T> {
        self.tpr_exact().map(T::from_ratio)
    }

    pub fn fpr<T: Scalar>(&self) -> Option<T> {
        self.fpr_exact().map(T::from_ratio)
    }

    pub fn tnr<T: Scalar>(&self) -> Option<T> {
        self.tnr_exact().map(T::from_ratio)
    }

    pub fn fnr<T: Scalar>(&self) -> Option<T> {
        self.fnr_exact().map(T::from_ratio)
    }

    pub fn accuracy<T: Scalar>(&self) -> Option<T> {
        self.accuracy_exact().map(T::from_ratio)
    }

    fn add(&self, o: &GroupCounts) -> GroupCounts {
        GroupCounts {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            tn: self.tn + o.tn,
            fn_: self.fn_ + o.fn_,
        }
    }
}

/// Confusion counts for group 0 and group 1.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupConfusion {
    pub groups: [GroupCounts; 2],
}

impl GroupConfusion {
    pub fn group(&self, a: u8) -> &GroupCounts {
        &self.groups[a as usize]
    }

    pub fn overall(&self) -> GroupCounts {
        self.groups[0].add(&self.groups[1])
    }

    pub fn from_decisions(decisions: &[u8], labels: &[u8], groups: &[u8]) -> Result<Self> {
        check_aligned(decisions.len(), labels, groups)?;
        let mut c = GroupConfusion::default();
        for ((&d, &y), &a) in decisions.iter().zip(labels).zip(groups) {
            let g = &mut c.groups[(a & 1) as usize];
            match (d != 0, y != 0) {
                (true, true) => g.tp += 1,
                (true, false) => g.fp += 1,
                (false, false) => g.tn += 1,
                (false, true) => g.fn_ += 1,
            }
        }
        Ok(c)
    }
}

fn check_aligned(k: usize, labels: &[u8], groups: &[u8]) -> Result<()> {
    if labels.len() != k || groups.len() != k {
        return Err(Error::arg(format!(
            "length mismatch: {} scores, {} labels, {} groups",
            k,
            labels.len(),
            groups.len()
        )));
    }
    if labels.iter().chain(groups).any(|&v| v > 1) {
        return Err(Error::arg("labels and groups must be 0 or 1"));
    }
    Ok(())
}

fn check_threshold<T: Scalar>(t: T) -> Result<()> {
    if !(t >= T::zero() && t <= T::one()) {
        return Err(Error::arg(format!("threshold {t} outside [0,1]")));
    }
    Ok(())
}

/// Counts of `score > t` decisions split by group.
pub fn confusion_by_group<T: Scalar>(
    scores: &[T],
    labels: &[u8],
    groups: &[u8],
    threshold: T,
) -> Result<GroupConfusion> {
    check_threshold(threshold)?;
    check_aligned(scores.len(), labels, groups)?;
    let mut c = GroupConfusion::default();
    for ((&s, &y), &a) in scores.iter().zip(labels).zip(groups) {
        let g = &mut c.groups[a as usize];
        match (s > threshold, y == 1) {
            (true, true) => g.tp += 1,
            (true, false) => g.fp += 1,
            (false, false) => g.tn += 1,
            (false, true) => g.fn_ += 1,
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FairnessGaps<T> {
    pub spd_signed: Option<T>,
    pub eod_signed: Option<T>,
    pub aod: Option<T>,
}

pub(crate) struct ExactGaps {
    pub spd: Option<Rate>,
    pub eod: Option<Rate>,
    pub aod: Option<Rate>,
}

pub(crate) fn exact_gaps(c: &GroupConfusion) -> ExactGaps {
    let [g0, g1] = &c.groups;
    let spd = g1.pr_exact().zip(g0.pr_exact()).map(|(a, b)| a - b);
    let eod = g1.tpr_exact().zip(g0.tpr_exact()).map(|(a, b)| a - b);
    let dfpr = g1.fpr_exact().zip(g0.fpr_exact()).map(|(a, b)| a - b);
    let half = Ratio::new(1, 2);
    let aod = eod.zip(dfpr).map(|(e, f)| half * (e.abs() + f.abs()));
    ExactGaps { spd, eod, aod }
}

pub fn fairness_gaps<T: Scalar>(confusion: &GroupConfusion) -> FairnessGaps<T> {
    let g = exact_gaps(confusion);
    FairnessGaps {
        spd_signed: g.spd.map(T::from_ratio),
        eod_signed: g.eod.map(T::from_ratio),
        aod: g.aod.map(T::from_ratio),
    }
}

/// Mann-Whitney AUROC with ties credited one half; `None` for single-class labels.
pub fn auroc_exact<T: Scalar>(scores: &[T], labels: &[u8]) -> Option<Rate> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&i, &j| scores[i].partial_cmp(&scores[j]).expect("scores are not NaN"));
    let n_pos = labels.iter().filter(|&&y| y == 1).count() as i128;
    let n_neg = labels.len() as i128 - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    // Twice the U statistic, so that ties stay integral.
    let mut twice_u: i128 = 0;
    let mut neg_below: i128 = 0;
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        let (mut pos, mut neg) = (0i128, 0i128);
        while j < idx.len() && scores[idx[j]] == scores[idx[i]] {
            if labels[idx[j]] == 1 {
                pos += 1;
            } else {
                neg += 1;
            }
            j += 1;
        }
        twice_u += 2 * pos * neg_below + pos * neg;
        neg_below += neg;
        i = j;
    }
    Some(Ratio::new(twice_u, 2 * n_pos * n_neg))
}

pub fn auroc<T: Scalar>(scores: &[T], labels: &[u8]) -> Option<T> {
    auroc_exact(scores, labels).map(T::from_ratio)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Performance<T> {
    pub accuracy: T,
    pub balanced_accuracy: Option<T>,
    pub auroc: Option<T>,
    /// Accuracy within group 0 and group 1.
    pub group_accuracy: [Option<T>; 2],
}

pub fn performance_metrics<T: Scalar>(
    scores: &[T],
    labels: &[u8],
    groups: &[u8],
    threshold: T,
) -> Result<Performance<T>> {
    let c = confusion_by_group(scores, labels, groups, threshold)?;
    Ok(performance_from(&c, scores, labels))
}

fn performance_from<T: Scalar>(c: &GroupConfusion, scores: &[T], labels: &[u8]) -> Performance<T> {
    let all = c.overall();
    Performance {
        accuracy: all.accuracy().unwrap_or_else(T::zero),
        balanced_accuracy: all.balanced_accuracy_exact().map(T::from_ratio),
        auroc: auroc(scores, labels),
        group_accuracy: [c.groups[0].accuracy(), c.groups[1].accuracy()],
    }
}

/// Flat report of one scored decision rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessReport<T> {
    pub threshold: T,
    pub n_samples: usize,
    pub tp_a0: u64,
    pub fp_a0: u64,
    pub tn_a0: u64,
    pub fn_a0: u64,
    pub tp_a1: u64,
    pub fp_a1: u64,
    pub tn_a1: u64,
    pub fn_a1: u64,
    pub pr_a0: Option<T>,
    pub pr_a1: Option<T>,
    pub tpr_a0: Option<T>,
    pub tpr_a1: Option<T>,
    pub fpr_a0: Option<T>,
    pub fpr_a1: Option<T>,
    pub tnr_a0: Option<T>,
    pub tnr_a1: Option<T>,
    pub fnr_a0: Option<T>,
    pub fnr_a1: Option<T>,
    pub spd_signed: Option<T>,
    pub spd_abs: Option<T>,
    pub eod_signed: Option<T>,
    pub eod_abs: Option<T>,
    pub aod: Option<T>,
    pub accuracy: T,
    pub balanced_accuracy: Option<T>,
    pub auroc: Option<T>,
    pub accuracy_a0: Option<T>,
    pub accuracy_a1: Option<T>,
    /// Names of fields that are undefined (serialized as null).
    pub undefined: Vec<String>,
}

impl<T: Scalar> FairnessReport<T> {
    pub fn confusion(&self) -> GroupConfusion {
        GroupConfusion {
            groups: [
                GroupCounts {
                    tp: self.tp_a0,
                    fp: self.fp_a0,
                    tn: self.tn_a0,
                    fn_: self.fn_a0,
                },
                GroupCounts {
                    tp: self.tp_a1,
                    fp: self.fp_a1,
                    tn: self.tn_a1,
                    fn_: self.fn_a1,
                },
            ],
        }
    }

    pub fn metric(&self, m: Metric) -> Option<T> {
        use Metric::*;
        match m {
            Accuracy => Some(self.accuracy),
            BalancedAccuracy => self.balanced_accuracy,
            Auroc => self.auroc,
            SpdSigned => self.spd_signed,
            SpdAbs => self.spd_abs,
            EodSigned => self.eod_signed,
            EodAbs => self.eod_abs,
            Aod => self.aod,
            AccuracyA0 => self.accuracy_a0,
            AccuracyA1 => self.accuracy_a1,
            PrA0 => self.pr_a0,
            PrA1 => self.pr_a1,
            TprA0 => self.tpr_a0,
            TprA1 => self.tpr_a1,
            FprA0 => self.fpr_a0,
            FprA1 => self.fpr_a1,
            DivAll | DivY0A0 | DivY0A1 | DivY1A0 | DivY1A1 | DiversityScore => None,
        }
    }
}

/// Confusion, gaps, and performance for one score column.
pub fn fairness_report<T: Scalar>(
    scores: &[T],
    labels: &[u8],
    groups: &[u8],
    threshold: T,
) -> Result<FairnessReport<T>> {
    let c = confusion_by_group(scores, labels, groups, threshold)?;
    let gaps = exact_gaps(&c);
    let perf = performance_from(&c, scores, labels);
    let [g0, g1] = c.groups;
    let conv = |r: Option<Rate>| r.map(T::from_ratio);
    let mut report = FairnessReport {
        threshold,
        n_samples: scores.len(),
        tp_a0: g0.tp,
        fp_a0: g0.fp,
        tn_a0: g0.tn,
        fn_a0: g0.fn_,
        tp_a1: g1.tp,
        fp_a1: g1.fp,
        tn_a1: g1.tn,
        fn_a1: g1.fn_,
        pr_a0: g0.pr(),
        pr_a1: g1.pr(),
        tpr_a0: g0.tpr(),
        tpr_a1: g1.tpr(),
        fpr_a0: g0.fpr(),
        fpr_a1: g1.fpr(),
        tnr_a0: g0.tnr(),
        tnr_a1: g1.tnr(),
        fnr_a0: g0.fnr(),
        fnr_a1: g1.fnr(),
        spd_signed: conv(gaps.spd),
        spd_abs: conv(gaps.spd.map(|r| r.abs())),
        eod_signed: conv(gaps.eod),
        eod_abs: conv(gaps.eod.map(|r| r.abs())),
        aod: conv(gaps.aod),
        accuracy: perf.accuracy,
        balanced_accuracy: perf.balanced_accuracy,
        auroc: perf.auroc,
        accuracy_a0: perf.group_accuracy[0],
        accuracy_a1: perf.group_accuracy[1],
        undefined: Vec::new(),
    };
    report.undefined = undefined_fields(&report);
    Ok(report)
}

fn undefined_fields<T: Scalar>(r: &FairnessReport<T>) -> Vec<String> {
    let fields: [(&str, Option<T>); 21] = [
        ("pr_a0", r.pr_a0),
        ("pr_a1", r.pr_a1),
        ("tpr_a0", r.tpr_a0),
        ("tpr_a1", r.tpr_a1),
        ("fpr_a0", r.fpr_a0),
        ("fpr_a1", r.fpr_a1),
        ("tnr_a0", r.tnr_a0),
        ("tnr_a1", r.tnr_a1),
        ("fnr_a0", r.fnr_a0),
        ("fnr_a1", r.fnr_a1),
        ("spd_signed", r.spd_signed),
        ("spd_abs", r.spd_abs),
        ("eod_signed", r.eod_signed),
        ("eod_abs", r.eod_abs),
        ("aod", r.aod),
        ("accuracy", Some(r.accuracy)),
        ("balanced_accuracy", r.balanced_accuracy),
        ("auroc", r.auroc),
        ("accuracy_a0", r.accuracy_a0),
        ("accuracy_a1", r.accuracy_a1),
        ("threshold", Some(r.threshold)),
    ];
    fields
        .iter()
        .filter(|(_, v)| v.is_none())
        .map(|(n, _)| n.to_string())
        .collect()
}

/// Named scalar quantities tracked by sweeps, tables, and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Accuracy,
    BalancedAccuracy,
    Auroc,
    SpdSigned,
    SpdAbs,
    EodSigned,
    EodAbs,
    Aod,
    AccuracyA0,
    AccuracyA1,
    PrA0,
    PrA1,
    TprA0,
    TprA1,
    FprA0,
    FprA1,
    /// Average predictive diversity over all samples.
    DivAll,
    DivY0A0,
    DivY0A1,
    DivY1A0,
    DivY1A1,
    DiversityScore,
}

impl Metric {
    pub const ALL: [Metric; 22] = [
        Metric::Accuracy,
        Metric::BalancedAccuracy,
        Metric::Auroc,
        Metric::SpdSigned,
        Metric::SpdAbs,
        Metric::EodSigned,
        Metric::EodAbs,
        Metric::Aod,
        Metric::AccuracyA0,
        Metric::AccuracyA1,
        Metric::PrA0,
        Metric::PrA1,
        Metric::TprA0,
        Metric::TprA1,
        Metric::FprA0,
        Metric::FprA1,
        Metric::DivAll,
        Metric::DivY0A0,
        Metric::DivY0A1,
        Metric::DivY1A0,
        Metric::DivY1A1,
        Metric::DiversityScore,
    ];

    /// Default selection for reports and sweeps.
    pub const DEFAULT: [Metric; 6] = [
        Metric::Accuracy,
        Metric::BalancedAccuracy,
        Metric::Auroc,
        Metric::SpdAbs,
        Metric::EodAbs,
        Metric::Aod,
    ];

    pub fn as_str(&self) -> &'static str {
        use Metric::*;
        match self {
            Accuracy => "accuracy",
            BalancedAccuracy => "balanced_accuracy",
            Auroc => "auroc",
            SpdSigned => "spd_signed",
            SpdAbs => "spd_abs",
            EodSigned => "eod_signed",
            EodAbs => "eod_abs",
            Aod => "aod",
            AccuracyA0 => "accuracy_a0",
            AccuracyA1 => "accuracy_a1",
            PrA0 => "pr_a0",
            PrA1 => "pr_a1",
            TprA0 => "tpr_a0",
            TprA1 => "tpr_a1",
            FprA0 => "fpr_a0",
            FprA1 => "fpr_a1",
            DivAll => "div_all",
            DivY0A0 => "div_y0_a0",
            DivY0A1 => "div_y0_a1",
            DivY1A0 => "div_y1_a0",
            DivY1A1 => "div_y1_a1",
            DiversityScore => "diversity_score",
        }
    }

    /// Needs the member matrix rather than one aggregated score column.
    pub fn is_diversity(&self) -> bool {
        matches!(
            self,
            Metric::DivAll
                | Metric::DivY0A0
                | Metric::DivY0A1
                | Metric::DivY1A0
                | Metric::DivY1A1
                | Metric::DiversityScore
        )
    }

    /// Absolute fairness violations (smaller is fairer).
    pub fn is_violation(&self) -> bool {
        matches!(self, Metric::SpdAbs | Metric::EodAbs | Metric::Aod)
    }

    /// Parses a comma-separated list; the empty string is the empty selection.
    pub fn parse_list(s: &str) -> Result<Vec<Metric>> {
        s.split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .iter()
            .copied()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::arg(format!("unknown metric `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // (y, a, s) = (1,1,.9),(0,1,.2),(1,1,.4),(1,0,.7),(0,0,.6),(0,0,.1)
    pub(crate) fn worked() -> (Vec<f64>, Vec<u8>, Vec<u8>) {
        (
            vec![0.9, 0.2, 0.4, 0.7, 0.6, 0.1],
            vec![1, 0, 1, 1, 0, 0],
            vec![1, 1, 1, 0, 0, 0],
        )
    }

    #[test]
    fn worked_confusion() {
        let (s, y, a) = worked();
        let c = confusion_by_group(&s, &y, &a, 0.5).unwrap();
        assert_eq!(c.groups[1], GroupCounts { tp: 1, fp: 0, tn: 1, fn_: 1 });
        assert_eq!(c.groups[0], GroupCounts { tp: 1, fp: 1, tn: 1, fn_: 0 });
    }

    #[test]
    fn worked_gaps_are_exact() {
        let (s, y, a) = worked();
        let c = confusion_by_group(&s, &y, &a, 0.5).unwrap();
        let g = fairness_gaps::<f64>(&c);
        assert_eq!(g.spd_signed, Some(-1.0 / 3.0));
        assert_eq!(g.eod_signed, Some(-0.5));
        assert_eq!(g.aod, Some(0.5));
        let p = performance_metrics(&s, &y, &a, 0.5).unwrap();
        assert_eq!(p.accuracy, 2.0 / 3.0);
    }

    #[test]
    fn threshold_extremes() {
        let y = [1, 0, 1, 0];
        let a = [0, 0, 1, 1];
        let c = confusion_by_group(&[0.0; 4], &y, &a, 0.5).unwrap();
        assert!(c.groups.iter().all(|g| g.tp == 0 && g.fp == 0));
        let c = confusion_by_group(&[0.1, 0.2, 0.3, 0.4], &y, &a, 0.0).unwrap();
        assert!(c.groups.iter().all(|g| g.pr::<f64>() == Some(1.0)));
        // ties at the threshold are negative
        let c = confusion_by_group(&[0.5; 4], &y, &a, 0.5).unwrap();
        assert_eq!(c.overall().predicted_positive(), 0);
        let c = confusion_by_group(&[1.0; 4], &y, &a, 1.0).unwrap();
        assert_eq!(c.overall().predicted_positive(), 0);
    }

    #[test]
    fn bad_threshold_and_lengths() {
        assert!(confusion_by_group(&[0.1], &[1], &[0], 1.5).is_err());
        assert!(confusion_by_group(&[0.1, 0.2], &[1], &[0], 0.5).is_err());
        assert!(confusion_by_group(&[0.1], &[2], &[0], 0.5).is_err());
    }

    #[test]
    fn symmetric_and_extreme_gaps() {
        let s = [0.9, 0.1, 0.9, 0.1];
        let y = [1, 0, 1, 0];
        let a = [0, 0, 1, 1];
        let g = fairness_gaps::<f64>(&confusion_by_group(&s, &y, &a, 0.5).unwrap());
        assert_eq!((g.spd_signed, g.eod_signed, g.aod), (Some(0.0), Some(0.0), Some(0.0)));
        let s = [0.1, 0.1, 0.9, 0.9];
        let g = fairness_gaps::<f64>(&confusion_by_group(&s, &y, &a, 0.5).unwrap());
        assert_eq!(g.spd_signed, Some(1.0));
    }

    #[test]
    fn empty_group_flags_undefined() {
        let r = fairness_report(&[0.9, 0.1], &[1, 0], &[1, 1], 0.5).unwrap();
        assert_eq!(r.spd_signed, None);
        assert_eq!(r.pr_a0, None);
        assert!(r.undefined.contains(&"spd_signed".to_string()));
        assert_eq!(r.tp_a1, 1);
    }

    #[test]
    fn auroc_examples() {
        assert_eq!(auroc(&[0.1, 0.4, 0.35, 0.8], &[0, 0, 1, 1]), Some(0.75));
        assert_eq!(auroc(&[0.1, 0.2, 0.8, 0.9], &[0, 0, 1, 1]), Some(1.0));
        assert_eq!(auroc(&[0.5, 0.5], &[0, 1]), Some(0.5));
        assert_eq!(auroc::<f64>(&[0.5, 0.6], &[1, 1]), None);
    }

    #[test]
    fn oracle_classifier_report() {
        let r = fairness_report(&[1.0, 0.0, 1.0, 0.0], &[1, 0, 1, 0], &[0, 0, 1, 1], 0.5).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.aod, Some(0.0));
        assert!(r.undefined.is_empty());
    }

    #[test]
    fn report_json_round_trip() {
        let (s, y, a) = worked();
        let r = fairness_report(&s, &y, &a, 0.5).unwrap();
        assert_eq!(r.spd_signed, Some(-1.0 / 3.0));
        assert_eq!(r.eod_signed, Some(-0.5));
        assert_eq!(r.aod, Some(0.5));
        assert_eq!(r.accuracy, 2.0 / 3.0);
        let text = serde_json::to_string(&r).unwrap();
        let back: FairnessReport<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(v.get("spd_abs").unwrap().is_number());
    }

    #[test]
    fn metric_names_round_trip() {
        for m in Metric::ALL {
            assert_eq!(m.as_str().parse::<Metric>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{}\"", m.as_str()));
        }
        assert!(Metric::parse_list("").unwrap().is_empty());
        assert_eq!(
            Metric::parse_list("accuracy, aod").unwrap(),
            vec![Metric::Accuracy, Metric::Aod]
        );
        assert!(Metric::parse_list("nope").is_err());
    }

    #[test]
    fn works_in_f32() {
        let s: Vec<f32> = worked().0.iter().map(|&v| v as f32).collect();
        let (_, y, a) = worked();
        let r = fairness_report(&s, &y, &a, 0.5f32).unwrap();
        assert_eq!(r.spd_signed, Some(-1.0f32 / 3.0));
        assert!(r.auroc.is_some());
    }
}
