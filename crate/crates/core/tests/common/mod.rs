//! Brute-force oracles and random instances shared by the integration tests.
#![allow(dead_code)]

use ensaudit::LabeledPredictions;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Scores are either uniform or snapped to a 1/20 grid, so ties and scores
/// exactly at common thresholds show up often.
pub fn random_score(r: &mut ChaCha8Rng, snapped: bool) -> f64 {
    if snapped {
        r.gen_range(0..=20) as f64 / 20.0
    } else {
        r.gen::<f64>()
    }
}

pub fn random_dataset(r: &mut ChaCha8Rng, k_max: usize, n_max: usize) -> LabeledPredictions<f64> {
    let k = r.gen_range(1..=k_max);
    let n = r.gen_range(1..=n_max);
    let snapped = r.gen_bool(0.5);
    let p_pos = r.gen_range(0.1..0.9);
    let p_grp = r.gen_range(0.1..0.9);
    let labels: Vec<u8> = (0..k).map(|_| u8::from(r.gen_bool(p_pos))).collect();
    let groups: Vec<u8> = (0..k).map(|_| u8::from(r.gen_bool(p_grp))).collect();
    let rows: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..n).map(|_| random_score(r, snapped)).collect())
        .collect();
    LabeledPredictions::new((0..k).map(|i| format!("x{i}")).collect(), labels, groups, rows).unwrap()
}

/// `[a][tp, fp, tn, fn]` by direct per-sample counting.
pub fn brute_counts(scores: &[f64], labels: &[u8], groups: &[u8], t: f64) -> [[u64; 4]; 2] {
    let mut c = [[0u64; 4]; 2];
    for k in 0..scores.len() {
        let pred = scores[k] > t;
        let a = groups[k] as usize;
        let idx = match (pred, labels[k] == 1) {
            (true, true) => 0,
            (true, false) => 1,
            (false, false) => 2,
            (false, true) => 3,
        };
        c[a][idx] += 1;
    }
    c
}

pub fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// AUROC over all positive/negative pairs, ties counted one half.
pub fn brute_auroc(scores: &[f64], labels: &[u8]) -> Option<f64> {
    let mut num = 0.0;
    let mut pairs = 0u64;
    for i in 0..scores.len() {
        if labels[i] != 1 {
            continue;
        }
        for j in 0..scores.len() {
            if labels[j] != 0 {
                continue;
            }
            pairs += 1;
            if scores[i] > scores[j] {
                num += 1.0;
            } else if scores[i] == scores[j] {
                num += 0.5;
            }
        }
    }
    (pairs > 0).then(|| num / pairs as f64)
}

/// Adaptive Simpson quadrature.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Two-sided Student-t tail probability by numerical integration.
///
/// With `x = sqrt(df) tan(theta)` the density becomes proportional to
/// `cos(theta)^(df - 1)` on `(-pi/2, pi/2)`, so no gamma functions are needed.
pub fn t_two_sided_quadrature(t: f64, df: f64) -> f64 {
    let g = |th: f64| th.cos().max(0.0).powf(df - 1.0);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let theta = (t.abs() / df.sqrt()).atan();
    let total = simpson(&g, 0.0, half_pi, 1e-14);
    let tail = simpson(&g, theta, half_pi, 1e-14);
    tail / total
}

/// Welch statistic and Welch–Satterthwaite df, written out directly.
pub fn welch_stat(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let mv = |v: &[f64]| {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        (m, v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0), n)
    };
    let (mx, vx, nx) = mv(xs);
    let (my, vy, ny) = mv(ys);
    let se2 = vx / nx + vy / ny;
    let t = (mx - my) / se2.sqrt();
    let df = se2 * se2 / ((vx / nx).powi(2) / (nx - 1.0) + (vy / ny).powi(2) / (ny - 1.0));
    (t, df)
}

/// Per-group deterministic operating points `(tp, fp)` for every distinct
/// threshold (each distinct score plus accept-all).
pub fn group_threshold_counts(scores: &[f64], labels: &[u8], groups: &[u8], a: u8) -> Vec<(u64, u64)> {
    let mut ts: Vec<f64> = scores
        .iter()
        .zip(groups)
        .filter(|(_, &g)| g == a)
        .map(|(&s, _)| s)
        .collect();
    ts.push(-1.0);
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts.iter()
        .map(|&t| {
            let mut tp = 0;
            let mut fp = 0;
            for k in 0..scores.len() {
                if groups[k] == a && scores[k] > t {
                    if labels[k] == 1 {
                        tp += 1;
                    } else {
                        fp += 1;
                    }
                }
            }
            (tp, fp)
        })
        .collect()
}

pub struct PairOracle {
    /// `[a] = (positives, negatives)`
    pub sizes: [(u64, u64); 2],
    pub points: [Vec<(u64, u64)>; 2],
}

impl PairOracle {
    pub fn new(scores: &[f64], labels: &[u8], groups: &[u8]) -> Self {
        let size = |a: u8| {
            let p = (0..scores.len()).filter(|&k| groups[k] == a && labels[k] == 1).count() as u64;
            let n = (0..scores.len()).filter(|&k| groups[k] == a && labels[k] == 0).count() as u64;
            (p, n)
        };
        PairOracle {
            sizes: [size(0), size(1)],
            points: [
                group_threshold_counts(scores, labels, groups, 0),
                group_threshold_counts(scores, labels, groups, 1),
            ],
        }
    }

    pub fn objective(&self, balanced: bool, q0: (u64, u64), q1: (u64, u64)) -> f64 {
        let [(p0, n0), (p1, n1)] = self.sizes;
        let tn0 = n0 - q0.1;
        let tn1 = n1 - q1.1;
        if balanced {
            0.5 * ((q0.0 + q1.0) as f64 / (p0 + p1) as f64 + (tn0 + tn1) as f64 / (n0 + n1) as f64)
        } else {
            (q0.0 + q1.0 + tn0 + tn1) as f64 / (p0 + n0 + p1 + n1) as f64
        }
    }

    /// Gap of a deterministic pair: kind 0 = spd, 1 = eod, 2 = aod.
    pub fn gap(&self, kind: u8, q0: (u64, u64), q1: (u64, u64)) -> f64 {
        let [(p0, n0), (p1, n1)] = self.sizes;
        let tpr = |q: (u64, u64), p: u64| q.0 as f64 / p as f64;
        let fpr = |q: (u64, u64), n: u64| q.1 as f64 / n as f64;
        match kind {
            0 => ((q1.0 + q1.1) as f64 / (p1 + n1) as f64 - (q0.0 + q0.1) as f64 / (p0 + n0) as f64).abs(),
            1 => (tpr(q1, p1) - tpr(q0, p0)).abs(),
            _ => 0.5 * (tpr(q1, p1) - tpr(q0, p0)).abs() + 0.5 * (fpr(q1, n1) - fpr(q0, n0)).abs(),
        }
    }

    /// Best objective over deterministic threshold pairs with gap <= eps.
    pub fn best(&self, balanced: bool, kind: u8, eps: f64) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for &q0 in &self.points[0] {
            for &q1 in &self.points[1] {
                if self.gap(kind, q0, q1) <= eps + 1e-12 {
                    best = best.max(self.objective(balanced, q0, q1));
                }
            }
        }
        best
    }
}
