//! Group-dependent randomized thresholds under relaxed fairness constraints.
//!
//! Each group's achievable (FPR, TPR) region is the upper convex hull of its
//! ROC points. A point on a hull segment is realized by randomizing between
//! the two thresholds at the segment's ends. Fitting searches operating-point
//! pairs, one point per group, that satisfy the chosen constraint within
//! `epsilon` and maximizes accuracy or balanced accuracy on the fit data.
//!
//! Search: every candidate point on one group's hull (a TPR grid of step
//! 0.001, the hull vertices, and the exactly achievable TPR values when the
//! group is small) is paired with its best feasible partner on the other
//! hull. Along a hull the objective is concave and the constraint is
//! piecewise linear, so that partner is either a hull vertex or a point where
//! the constraint is tight; both kinds are enumerated exactly. The search runs
//! in both directions and keeps the better pair.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::scalar::Scalar;

/// Threshold that accepts every score in `[0,1]`.
pub const ACCEPT_ALL: f64 = -1.0;
/// Threshold that rejects every score in `[0,1]`.
pub const REJECT_ALL: f64 = 1.0;

/// TPR spacing of the candidate grid.
pub const TPR_RESOLUTION: f64 = 1e-3;

/// Groups with at most this many positives (summed over both groups) also get
/// every exactly achievable TPR as a candidate.
const EXACT_TPR_LIMIT: u64 = 20_000;

const FEAS_TOL: f64 = 1e-12;

/// One ROC point with the threshold that produces it and its raw counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    pub threshold: f64,
    pub fp: u64,
    pub tp: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocHull {
    pub positives: u64,
    pub negatives: u64,
    pub vertices: Vec<RocPoint>,
}

/// All ROC points, from the reject-all threshold down to accept-all.
///
/// Thresholds sit at midpoints between distinct sorted scores, plus the two
/// sentinels.
pub fn roc_points<T: Scalar>(scores: &[T], labels: &[u8]) -> Result<Vec<RocPoint>> {
    if scores.len() != labels.len() {
        return Err(Error::arg("scores and labels differ in length"));
    }
    let p = labels.iter().filter(|&&y| y == 1).count() as u64;
    let n = labels.len() as u64 - p;
    if p == 0 || n == 0 {
        return Err(Error::arg("ROC hull needs both positive and negative labels"));
    }
    let mut order: Vec<(f64, u8)> = scores.iter().map(|s| s.as_f64()).zip(labels.iter().copied()).collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0));

    let point = |fp: u64, tp: u64, threshold: f64| RocPoint {
        fpr: fp as f64 / n as f64,
        tpr: tp as f64 / p as f64,
        threshold,
        fp,
        tp,
    };
    let mut pts = vec![point(0, 0, REJECT_ALL)];
    let (mut fp, mut tp) = (0u64, 0u64);
    let mut i = 0;
    while i < order.len() {
        let s = order[i].0;
        while i < order.len() && order[i].0 == s {
            if order[i].1 == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        let threshold = if i < order.len() {
            let below = order[i].0;
            let mid = below + (s - below) / 2.0;
            // adjacent floats: the lower score itself separates them under `>`
            if mid >= below && mid < s {
                mid
            } else {
                below
            }
        } else {
            ACCEPT_ALL
        };
        pts.push(point(fp, tp, threshold));
    }
    Ok(pts)
}

/// Upper convex hull of the ROC points, computed in exact integer arithmetic.
pub fn build_roc_hull<T: Scalar>(scores: &[T], labels: &[u8]) -> Result<RocHull> {
    let pts = roc_points(scores, labels)?;
    let last = pts.last().expect("non-empty");
    let (p, n) = (last.tp as i128, last.fp as i128);
    // scale both axes to integers: x = fp * P, y = tp * N
    let xy = |q: &RocPoint| (q.fp as i128 * p, q.tp as i128 * n);
    let cross = |o: &RocPoint, a: &RocPoint, b: &RocPoint| {
        let (ox, oy) = xy(o);
        let (ax, ay) = xy(a);
        let (bx, by) = xy(b);
        (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)
    };
    let mut hull: Vec<RocPoint> = Vec::new();
    for q in pts {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &q) >= 0 {
            hull.pop();
        }
        hull.push(q);
    }
    Ok(RocHull {
        positives: p as u64,
        negatives: n as u64,
        vertices: hull,
    })
}

/// A point on a hull: segment index and position along it.
#[derive(Debug, Clone, Copy, PartialEq)]
struct HullPoint {
    seg: usize,
    lambda: f64,
    fpr: f64,
    tpr: f64,
}

impl RocHull {
    /// Trapezoidal area under the hull.
    pub fn area(&self) -> f64 {
        self.vertices
            .windows(2)
            .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) / 2.0)
            .sum()
    }

    fn segments(&self) -> usize {
        self.vertices.len() - 1
    }

    fn at(&self, seg: usize, lambda: f64) -> HullPoint {
        let (a, b) = (&self.vertices[seg], &self.vertices[seg + 1]);
        HullPoint {
            seg,
            lambda,
            fpr: a.fpr + lambda * (b.fpr - a.fpr),
            tpr: a.tpr + lambda * (b.tpr - a.tpr),
        }
    }

    fn vertex(&self, i: usize) -> HullPoint {
        if i == self.segments() {
            self.at(i - 1, 1.0)
        } else {
            self.at(i, 0.0)
        }
    }

    /// Leftmost hull point with the given TPR.
    fn at_tpr(&self, tpr: f64) -> HullPoint {
        let v = &self.vertices;
        let i = v.partition_point(|q| q.tpr < tpr);
        if i == 0 {
            return self.vertex(0);
        }
        if i >= v.len() {
            return self.vertex(v.len() - 1);
        }
        if v[i].tpr == tpr {
            return self.vertex(i);
        }
        let lambda = (tpr - v[i - 1].tpr) / (v[i].tpr - v[i - 1].tpr);
        HullPoint {
            tpr,
            ..self.at(i - 1, lambda)
        }
    }

    /// Distance from `(fpr, tpr)` to the hull polyline.
    pub fn distance(&self, fpr: f64, tpr: f64) -> f64 {
        self.vertices
            .windows(2)
            .map(|w| {
                let (dx, dy) = (w[1].fpr - w[0].fpr, w[1].tpr - w[0].tpr);
                let len2 = dx * dx + dy * dy;
                let t = if len2 > 0.0 {
                    (((fpr - w[0].fpr) * dx + (tpr - w[0].tpr) * dy) / len2).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                let (px, py) = (w[0].fpr + t * dx, w[0].tpr + t * dy);
                ((fpr - px).powi(2) + (tpr - py).powi(2)).sqrt()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// `|PR_1 - PR_0| <= eps`
    Spd,
    /// `|TPR_1 - TPR_0| <= eps`
    Eod,
    /// `|TPR_1 - TPR_0| / 2 + |FPR_1 - FPR_0| / 2 <= eps`
    Aod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    #[default]
    Accuracy,
    BalancedAccuracy,
}

macro_rules! str_enum {
    ($t:ty { $($v:ident => $s:literal),+ }) => {
        impl $t {
            pub fn as_str(&self) -> &'static str {
                match self { $(Self::$v => $s),+ }
            }
        }
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
        impl FromStr for $t {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($s => Ok(Self::$v),)+
                    _ => Err(Error::arg(format!("unknown {} `{s}`", stringify!($t).to_lowercase()))),
                }
            }
        }
    };
}

str_enum!(Constraint { Spd => "spd", Eod => "eod", Aod => "aod" });
str_enum!(Objective { Accuracy => "accuracy", BalancedAccuracy => "balanced_accuracy" });

/// Fit-data statistics of one group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub size: u64,
    pub positives: u64,
    pub negatives: u64,
    /// `P(Y=1 | A=a)`
    pub prevalence: f64,
}

/// Randomized rule for one group: with probability `mix` decide by
/// `score > threshold`, otherwise by `score > alt_threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupRule {
    pub threshold: f64,
    pub alt_threshold: f64,
    pub mix: f64,
    /// Operating point on the fit data.
    pub fpr: f64,
    pub tpr: f64,
}

impl GroupRule {
    pub fn deterministic(threshold: f64, fpr: f64, tpr: f64) -> Self {
        GroupRule {
            threshold,
            alt_threshold: threshold,
            mix: 1.0,
            fpr,
            tpr,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupDecisionRule {
    pub constraint: Constraint,
    pub epsilon: f64,
    pub objective: Objective,
    /// Rules for group 0 and group 1.
    pub groups: [GroupRule; 2],
    pub fit_stats: [GroupStats; 2],
    /// Objective value and constraint gap at the fitted points, on the fit data.
    pub fit_objective: f64,
    pub fit_gap: f64,
}

/// Inputs the search needs about the fit data.
struct Problem {
    constraint: Constraint,
    epsilon: f64,
    prevalence: [f64; 2],
    /// Objective weight on (TPR, 1 - FPR) per group.
    weight_tpr: [f64; 2],
    weight_tnr: [f64; 2],
}

impl Problem {
    fn value(&self, a: usize, p: &HullPoint) -> f64 {
        self.weight_tpr[a] * p.tpr + self.weight_tnr[a] * (1.0 - p.fpr)
    }

    fn positive_rate(&self, a: usize, p: &HullPoint) -> f64 {
        self.prevalence[a] * p.tpr + (1.0 - self.prevalence[a]) * p.fpr
    }

    fn gap(&self, p0: &HullPoint, p1: &HullPoint) -> f64 {
        match self.constraint {
            Constraint::Spd => (self.positive_rate(1, p1) - self.positive_rate(0, p0)).abs(),
            Constraint::Eod => (p1.tpr - p0.tpr).abs(),
            Constraint::Aod => 0.5 * (p1.tpr - p0.tpr).abs() + 0.5 * (p1.fpr - p0.fpr).abs(),
        }
    }

    /// Linear forms `alpha * tpr + beta * fpr = c` on the free group's point at
    /// which the constraint is tight, given the fixed group's point.
    fn tight_lines(&self, free: usize, fixed: &HullPoint) -> Vec<(f64, f64, f64)> {
        let e = self.epsilon;
        match self.constraint {
            Constraint::Eod => vec![(1.0, 0.0, fixed.tpr - e), (1.0, 0.0, fixed.tpr + e)],
            Constraint::Spd => {
                let pr = self.positive_rate(1 - free, fixed);
                let (al, be) = (self.prevalence[free], 1.0 - self.prevalence[free]);
                vec![(al, be, pr - e), (al, be, pr + e)]
            }
            Constraint::Aod => {
                let mut lines = Vec::with_capacity(4);
                for st in [1.0, -1.0] {
                    for sf in [1.0, -1.0] {
                        // st (t - t0) + sf (f - f0) = 2 e
                        lines.push((st, sf, 2.0 * e + st * fixed.tpr + sf * fixed.fpr));
                    }
                }
                lines
            }
        }
    }
}

fn pair<'a>(free: usize, fixed: &'a HullPoint, other: &'a HullPoint) -> (&'a HullPoint, &'a HullPoint) {
    if free == 1 {
        (fixed, other)
    } else {
        (other, fixed)
    }
}

/// Best feasible point on `hull` for group `free`, with the other group fixed.
fn best_partner(prob: &Problem, hulls: &[RocHull; 2], free: usize, fixed: &HullPoint) -> Option<(f64, HullPoint)> {
    let hull = &hulls[free];
    let mut best: Option<(f64, HullPoint)> = None;
    let mut consider = |q: HullPoint| {
        let (p0, p1) = pair(free, fixed, &q);
        if prob.gap(p0, p1) <= prob.epsilon + FEAS_TOL {
            let v = prob.value(free, &q);
            if best.is_none_or(|(b, _)| v > b) {
                best = Some((v, q));
            }
        }
    };
    for i in 0..hull.vertices.len() {
        consider(hull.vertex(i));
    }
    for (al, be, c) in prob.tight_lines(free, fixed) {
        for s in 0..hull.segments() {
            let (a, b) = (&hull.vertices[s], &hull.vertices[s + 1]);
            let base = al * a.tpr + be * a.fpr;
            let slope = al * (b.tpr - a.tpr) + be * (b.fpr - a.fpr);
            if slope == 0.0 {
                continue;
            }
            let lambda = (c - base) / slope;
            if (0.0..=1.0).contains(&lambda) {
                consider(hull.at(s, lambda));
            }
        }
    }
    best
}

fn candidates(hull: &RocHull, extra_tprs: &[f64]) -> Vec<HullPoint> {
    let steps = (1.0 / TPR_RESOLUTION).round() as usize;
    let mut pts: Vec<HullPoint> = (0..=steps)
        .map(|i| hull.at_tpr(i as f64 / steps as f64))
        .chain(extra_tprs.iter().map(|&t| hull.at_tpr(t)))
        .chain((0..hull.vertices.len()).map(|i| hull.vertex(i)))
        .collect();
    pts.sort_by(|a, b| {
        (a.seg, a.lambda)
            .partial_cmp(&(b.seg, b.lambda))
            .expect("finite")
    });
    pts.dedup_by(|a, b| a.fpr == b.fpr && a.tpr == b.tpr);
    pts
}

fn group_stats(labels: &[u8], groups: &[u8], a: u8) -> GroupStats {
    let mut size = 0;
    let mut positives = 0;
    for (&y, &g) in labels.iter().zip(groups) {
        if g == a {
            size += 1;
            positives += u64::from(y == 1);
        }
    }
    GroupStats {
        size,
        positives,
        negatives: size - positives,
        prevalence: if size > 0 { positives as f64 / size as f64 } else { 0.0 },
    }
}

fn split_by_group<T: Scalar>(scores: &[T], labels: &[u8], groups: &[u8], a: u8) -> (Vec<T>, Vec<u8>) {
    scores
        .iter()
        .zip(labels)
        .zip(groups)
        .filter(|(_, &g)| g == a)
        .map(|((&s, &y), _)| (s, y))
        .unzip()
}

/// Per-group ROC hulls of the fit data.
pub fn group_hulls<T: Scalar>(scores: &[T], labels: &[u8], groups: &[u8]) -> Result<[RocHull; 2]> {
    if scores.len() != labels.len() || scores.len() != groups.len() {
        return Err(Error::arg("scores, labels, and groups differ in length"));
    }
    let hull = |a: u8| {
        let (s, y) = split_by_group(scores, labels, groups, a);
        build_roc_hull(&s, &y)
            .map_err(|_| Error::arg(format!("group {a} needs both classes in the fit data")))
    };
    Ok([hull(0)?, hull(1)?])
}

/// Fits group thresholds on `scores` (typically the aggregated ensemble).
pub fn fit_group_thresholds<T: Scalar>(
    scores: &[T],
    labels: &[u8],
    groups: &[u8],
    constraint: Constraint,
    epsilon: f64,
    objective: Objective,
) -> Result<GroupDecisionRule> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::arg(format!("epsilon must be a finite value >= 0, got {epsilon}")));
    }
    let hulls = group_hulls(scores, labels, groups)?;
    let stats = [group_stats(labels, groups, 0), group_stats(labels, groups, 1)];
    let total = (stats[0].size + stats[1].size) as f64;
    let all_pos = (stats[0].positives + stats[1].positives) as f64;
    let all_neg = (stats[0].negatives + stats[1].negatives) as f64;
    let (weight_tpr, weight_tnr) = match objective {
        Objective::Accuracy => (
            [0, 1].map(|a| stats[a].positives as f64 / total),
            [0, 1].map(|a| stats[a].negatives as f64 / total),
        ),
        Objective::BalancedAccuracy => (
            [0, 1].map(|a| 0.5 * stats[a].positives as f64 / all_pos),
            [0, 1].map(|a| 0.5 * stats[a].negatives as f64 / all_neg),
        ),
    };
    let prob = Problem {
        constraint,
        epsilon,
        prevalence: [stats[0].prevalence, stats[1].prevalence],
        weight_tpr,
        weight_tnr,
    };

    let extra: Vec<f64> = if stats[0].positives + stats[1].positives <= EXACT_TPR_LIMIT {
        stats
            .iter()
            .flat_map(|s| (0..=s.positives).map(move |j| j as f64 / s.positives as f64))
            .collect()
    } else {
        Vec::new()
    };

    // (objective, p0, p1), searched from each side
    let mut best: Option<(f64, HullPoint, HullPoint)> = None;
    for fixed_group in [0usize, 1] {
        let free = 1 - fixed_group;
        let cands = candidates(&hulls[fixed_group], &extra);
        let found: Vec<Option<(f64, HullPoint, HullPoint)>> = cands
            .par_iter()
            .map(|c| {
                best_partner(&prob, &hulls, free, c).map(|(v, q)| {
                    let total = v + prob.value(fixed_group, c);
                    let (p0, p1) = pair(free, c, &q);
                    (total, *p0, *p1)
                })
            })
            .collect();
        for f in found.into_iter().flatten() {
            if best.as_ref().is_none_or(|b| f.0 > b.0) {
                best = Some(f);
            }
        }
    }
    let (fit_objective, p0, p1) =
        best.ok_or_else(|| Error::Internal("no feasible operating point pair found".into()))?;
    let realize = |a: usize, p: &HullPoint| {
        let h = &hulls[a];
        let (lo, hi) = (&h.vertices[p.seg], &h.vertices[p.seg + 1]);
        if p.lambda <= 0.0 {
            GroupRule::deterministic(lo.threshold, lo.fpr, lo.tpr)
        } else if p.lambda >= 1.0 {
            GroupRule::deterministic(hi.threshold, hi.fpr, hi.tpr)
        } else {
            GroupRule {
                threshold: lo.threshold,
                alt_threshold: hi.threshold,
                mix: 1.0 - p.lambda,
                fpr: p.fpr,
                tpr: p.tpr,
            }
        }
    };
    Ok(GroupDecisionRule {
        constraint,
        epsilon,
        objective,
        groups: [realize(0, &p0), realize(1, &p1)],
        fit_stats: stats,
        fit_objective,
        fit_gap: prob.gap(&p0, &p1),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum ApplyMode {
    Sampled { seed: u64 },
    Expected,
}

/// Expected per-group rates of a randomized rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectedGroupRates {
    pub size: u64,
    pub pr: Option<f64>,
    pub tpr: Option<f64>,
    pub fpr: Option<f64>,
    pub accuracy: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectedOutcome {
    pub groups: [ExpectedGroupRates; 2],
    pub accuracy: f64,
    pub balanced_accuracy: Option<f64>,
    pub spd_signed: Option<f64>,
    pub eod_signed: Option<f64>,
    pub aod: Option<f64>,
}

impl ExpectedOutcome {
    pub fn gap(&self, c: Constraint) -> Option<f64> {
        match c {
            Constraint::Spd => self.spd_signed.map(f64::abs),
            Constraint::Eod => self.eod_signed.map(f64::abs),
            Constraint::Aod => self.aod,
        }
    }
}

/// Sampled 0/1 decisions; each sample's threshold choice is drawn from a
/// stream keyed by `(seed, sample index)`.
pub fn apply_sampled<T: Scalar>(rule: &GroupDecisionRule, scores: &[T], groups: &[u8], seed: u64) -> Result<Vec<u8>> {
    if scores.len() != groups.len() {
        return Err(Error::arg("scores and groups differ in length"));
    }
    Ok(scores
        .iter()
        .zip(groups)
        .enumerate()
        .map(|(k, (&s, &a))| {
            let g = &rule.groups[(a & 1) as usize];
            let t = if g.mix >= 1.0 {
                g.threshold
            } else {
                let u: f64 = rng::stream(seed, &[k as u64]).gen();
                if u < g.mix {
                    g.threshold
                } else {
                    g.alt_threshold
                }
            };
            u8::from(s.as_f64() > t)
        })
        .collect())
}

/// Expected confusion rates: the `mix`-weighted combination of the two
/// deterministic rules of each group.
pub fn apply_expected<T: Scalar>(
    rule: &GroupDecisionRule,
    scores: &[T],
    labels: &[u8],
    groups: &[u8],
) -> Result<ExpectedOutcome> {
    if scores.len() != labels.len() || scores.len() != groups.len() {
        return Err(Error::arg("scores, labels, and groups differ in length"));
    }
    // expected [tp, fp, tn, fn] per group
    let mut acc = [[0.0f64; 4]; 2];
    let mut sizes = [[0u64; 2]; 2];
    for ((&s, &y), &a) in scores.iter().zip(labels).zip(groups) {
        let a = (a & 1) as usize;
        let g = &rule.groups[a];
        let s = s.as_f64();
        let p_pos = g.mix * f64::from(u8::from(s > g.threshold))
            + (1.0 - g.mix) * f64::from(u8::from(s > g.alt_threshold));
        sizes[a][y as usize] += 1;
        if y == 1 {
            acc[a][0] += p_pos;
            acc[a][3] += 1.0 - p_pos;
        } else {
            acc[a][1] += p_pos;
            acc[a][2] += 1.0 - p_pos;
        }
    }
    let div = |x: f64, n: u64| (n > 0).then(|| x / n as f64);
    let rates = [0, 1].map(|a| {
        let [tp, fp, tn, _] = acc[a];
        let (neg, pos) = (sizes[a][0], sizes[a][1]);
        ExpectedGroupRates {
            size: pos + neg,
            pr: div(tp + fp, pos + neg),
            tpr: div(tp, pos),
            fpr: div(fp, neg),
            accuracy: div(tp + tn, pos + neg),
        }
    });
    let k = scores.len() as u64;
    let pos = sizes[0][1] + sizes[1][1];
    let neg = sizes[0][0] + sizes[1][0];
    let tp = acc[0][0] + acc[1][0];
    let tn = acc[0][2] + acc[1][2];
    let sub = |x: Option<f64>, y: Option<f64>| x.zip(y).map(|(x, y)| x - y);
    let eod = sub(rates[1].tpr, rates[0].tpr);
    let dfpr = sub(rates[1].fpr, rates[0].fpr);
    Ok(ExpectedOutcome {
        groups: rates,
        accuracy: div(tp + tn, k).unwrap_or(0.0),
        balanced_accuracy: div(tp, pos).zip(div(tn, neg)).map(|(a, b)| (a + b) / 2.0),
        spd_signed: sub(rates[1].pr, rates[0].pr),
        eod_signed: eod,
        aod: eod.zip(dfpr).map(|(e, f)| 0.5 * e.abs() + 0.5 * f.abs()),
    })
}

/// Result of applying a rule in either mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Applied {
    Decisions(Vec<u8>),
    Expected(ExpectedOutcome),
}

pub fn apply_decision_rule<T: Scalar>(
    rule: &GroupDecisionRule,
    scores: &[T],
    labels: &[u8],
    groups: &[u8],
    mode: ApplyMode,
) -> Result<Applied> {
    match mode {
        ApplyMode::Sampled { seed } => apply_sampled(rule, scores, groups, seed).map(Applied::Decisions),
        ApplyMode::Expected => apply_expected(rule, scores, labels, groups).map(Applied::Expected),
    }
}

/// One row of a before/after table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeforeAfterRow {
    pub split: String,
    pub stage: String,
    pub accuracy: f64,
    pub balanced_accuracy: Option<f64>,
    pub spd_abs: Option<f64>,
    pub eod_abs: Option<f64>,
    pub aod: Option<f64>,
}

/// `Before HPP` (single threshold) and `After HPP` (expected mode) rows for one split.
pub fn before_after<T: Scalar>(
    rule: &GroupDecisionRule,
    split: &str,
    scores: &[T],
    labels: &[u8],
    groups: &[u8],
    threshold: f64,
) -> Result<[BeforeAfterRow; 2]> {
    let plain = GroupDecisionRule {
        groups: [GroupRule::deterministic(threshold, 0.0, 0.0); 2],
        ..rule.clone()
    };
    let row = |stage: &str, r: &GroupDecisionRule| -> Result<BeforeAfterRow> {
        let e = apply_expected(r, scores, labels, groups)?;
        Ok(BeforeAfterRow {
            split: split.to_string(),
            stage: stage.to_string(),
            accuracy: e.accuracy,
            balanced_accuracy: e.balanced_accuracy,
            spd_abs: e.spd_signed.map(f64::abs),
            eod_abs: e.eod_signed.map(f64::abs),
            aod: e.aod,
        })
    };
    Ok([row("Before HPP", &plain)?, row("After HPP", rule)?])
}

pub fn before_after_csv(rows: &[BeforeAfterRow]) -> String {
    let f = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    let mut out = String::from("split,stage,accuracy,balanced_accuracy,spd_abs,eod_abs,aod\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.split,
            r.stage,
            r.accuracy,
            f(r.balanced_accuracy),
            f(r.spd_abs),
            f(r.eod_abs),
            f(r.aod)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separated_scores_hull() {
        let h = build_roc_hull(&[0.1, 0.2, 0.8, 0.9], &[0, 0, 1, 1]).unwrap();
        let v: Vec<(f64, f64)> = h.vertices.iter().map(|q| (q.fpr, q.tpr)).collect();
        assert_eq!(v, vec![(0.0, 0.0), (0.0, 1.0), (1.0, 1.0)]);
        assert_eq!(h.area(), 1.0);
    }

    #[test]
    fn constant_scores_hull_is_diagonal() {
        let h = build_roc_hull(&[0.4; 5], &[0, 1, 0, 1, 1]).unwrap();
        let v: Vec<(f64, f64)> = h.vertices.iter().map(|q| (q.fpr, q.tpr)).collect();
        assert_eq!(v, vec![(0.0, 0.0), (1.0, 1.0)]);
    }

    #[test]
    fn dominated_point_dropped() {
        let s = [0.9, 0.8, 0.4, 0.3];
        let y = [1, 0, 1, 0];
        let raw: Vec<(f64, f64)> = roc_points(&s, &y).unwrap().iter().map(|q| (q.fpr, q.tpr)).collect();
        assert_eq!(raw, vec![(0.0, 0.0), (0.0, 0.5), (0.5, 0.5), (0.5, 1.0), (1.0, 1.0)]);
        let h = build_roc_hull(&s, &y).unwrap();
        let v: Vec<(f64, f64)> = h.vertices.iter().map(|q| (q.fpr, q.tpr)).collect();
        assert_eq!(v, vec![(0.0, 0.0), (0.0, 0.5), (0.5, 1.0), (1.0, 1.0)]);
    }

    #[test]
    fn hull_thresholds_reproduce_points() {
        let s = [0.9, 0.8, 0.4, 0.3, 0.8, 0.0, 1.0];
        let y = [1, 0, 1, 0, 1, 0, 0];
        for q in roc_points(&s, &y).unwrap() {
            let tp = s.iter().zip(&y).filter(|(&v, &l)| l == 1 && v > q.threshold).count() as u64;
            let fp = s.iter().zip(&y).filter(|(&v, &l)| l == 0 && v > q.threshold).count() as u64;
            assert_eq!((tp, fp), (q.tp, q.fp), "threshold {}", q.threshold);
        }
    }

    #[test]
    fn adjacent_float_scores_separate() {
        let lo = 0.3f64;
        let hi = f64::from_bits(lo.to_bits() + 1);
        let pts = roc_points(&[hi, lo], &[1, 0]).unwrap();
        assert_eq!((pts[1].tp, pts[1].fp), (1, 0));
        assert!(hi > pts[1].threshold && !(lo > pts[1].threshold));
    }

    #[test]
    fn single_class_is_error() {
        assert!(build_roc_hull(&[0.2, 0.3], &[1, 1]).is_err());
    }

    #[test]
    fn negative_epsilon_rejected() {
        let r = fit_group_thresholds(&[0.2, 0.8, 0.3, 0.7], &[0, 1, 0, 1], &[0, 0, 1, 1], Constraint::Eod, -0.1, Objective::Accuracy);
        assert!(matches!(r, Err(Error::Argument(_))));
    }

    #[test]
    fn missing_class_in_group_rejected() {
        let r = fit_group_thresholds(&[0.2, 0.8, 0.3, 0.7], &[0, 1, 1, 1], &[0, 0, 1, 1], Constraint::Eod, 0.1, Objective::Accuracy);
        assert!(r.is_err());
    }

    #[test]
    fn symmetric_groups_get_equal_thresholds() {
        let s = [0.1, 0.35, 0.6, 0.8, 0.45, 0.9];
        let y = [0, 0, 1, 1, 1, 0];
        let scores: Vec<f64> = s.iter().chain(&s).copied().collect();
        let labels: Vec<u8> = y.iter().chain(&y).copied().collect();
        let groups: Vec<u8> = [0u8; 6].iter().chain(&[1u8; 6]).copied().collect();
        for c in [Constraint::Spd, Constraint::Eod, Constraint::Aod] {
            let r = fit_group_thresholds(&scores, &labels, &groups, c, 0.0, Objective::Accuracy).unwrap();
            assert_eq!(r.groups[0].fpr, r.groups[1].fpr);
            assert_eq!(r.groups[0].tpr, r.groups[1].tpr);
            assert!(r.fit_gap <= 1e-12);
            let free = fit_group_thresholds(&scores, &labels, &groups, c, 1.0, Objective::Accuracy).unwrap();
            assert!((r.fit_objective - free.fit_objective).abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_rule_expected_rates() {
        let rule = GroupDecisionRule {
            constraint: Constraint::Eod,
            epsilon: 0.0,
            objective: Objective::Accuracy,
            groups: [
                GroupRule { threshold: 0.5, alt_threshold: 0.2, mix: 0.25, fpr: 0.0, tpr: 0.0 },
                GroupRule::deterministic(0.5, 0.0, 0.0),
            ],
            fit_stats: [GroupStats { size: 0, positives: 0, negatives: 0, prevalence: 0.0 }; 2],
            fit_objective: 0.0,
            fit_gap: 0.0,
        };
        let s = [0.3, 0.6, 0.1, 0.7, 0.4, 0.3];
        let y = [1, 1, 0, 0, 1, 0];
        let a = [0, 0, 0, 0, 1, 1];
        let e = apply_expected(&rule, &s, &y, &a).unwrap();
        // t = 0.5: TPR 1/2, FPR 1/2; t' = 0.2: TPR 1, FPR 1/2
        assert!((e.groups[0].tpr.unwrap() - (0.25 * 0.5 + 0.75 * 1.0)).abs() < 1e-15);
        assert!((e.groups[0].fpr.unwrap() - 0.5).abs() < 1e-15);
        let d1 = apply_sampled(&rule, &s, &a, 5).unwrap();
        assert_eq!(d1, apply_sampled(&rule, &s, &a, 5).unwrap());
    }

    #[test]
    fn parse_enums() {
        assert_eq!("aod".parse::<Constraint>().unwrap(), Constraint::Aod);
        assert_eq!("balanced_accuracy".parse::<Objective>().unwrap(), Objective::BalancedAccuracy);
        assert!("xyz".parse::<Constraint>().is_err());
    }
}
