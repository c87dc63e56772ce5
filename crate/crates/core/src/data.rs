//! Dataset representations, CSV ingestion, and validation.
//!
//! A dataset holds `K` samples with a binary label `y`, a binary protected
//! group attribute `a` (1 = advantaged group), and a `K x N` matrix of
//! per-member positive-class probabilities. Members are represented only by
//! their score columns.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Supported on-disk formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    /// `sample_id,y,a,m0,...,m{N-1}`
    #[default]
    WideCsv,
}

impl Format {
    /// Guess from a path; everything is wide CSV for now.
    pub fn from_path(_path: &Path) -> Self {
        Format::WideCsv
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPredictions<T> {
    sample_ids: Vec<String>,
    labels: Vec<u8>,
    groups: Vec<u8>,
    /// Row-major `K x N`.
    scores: Vec<T>,
    n_members: usize,
}

impl<T: Scalar> LabeledPredictions<T> {
    /// Builds a dataset from score rows (`rows[k][n]`).
    pub fn new(
        sample_ids: Vec<String>,
        labels: Vec<u8>,
        groups: Vec<u8>,
        rows: Vec<Vec<T>>,
    ) -> Result<Self> {
        let n_members = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != n_members) {
            return Err(Error::Validation("score rows have unequal lengths".into()));
        }
        let scores = rows.into_iter().flatten().collect();
        Self::from_flat(sample_ids, labels, groups, scores, n_members)
    }

    /// Builds a dataset from a row-major flat score buffer.
    pub fn from_flat(
        sample_ids: Vec<String>,
        labels: Vec<u8>,
        groups: Vec<u8>,
        scores: Vec<T>,
        n_members: usize,
    ) -> Result<Self> {
        let k = labels.len();
        if k == 0 {
            return Err(Error::Validation("dataset has no samples".into()));
        }
        if n_members == 0 {
            return Err(Error::Validation("dataset has no members".into()));
        }
        if sample_ids.len() != k || groups.len() != k || scores.len() != k * n_members {
            return Err(Error::Validation(format!(
                "container sizes disagree: {} ids, {} labels, {} groups, {} scores for {} members",
                sample_ids.len(),
                k,
                groups.len(),
                scores.len(),
                n_members
            )));
        }
        if let Some(i) = labels.iter().position(|&y| y > 1) {
            return Err(Error::Validation(format!("label at sample {i} is not binary")));
        }
        if let Some(i) = groups.iter().position(|&a| a > 1) {
            return Err(Error::Validation(format!("group at sample {i} is not binary")));
        }
        if let Some(i) = scores.iter().position(|&s| !in_unit(s)) {
            return Err(Error::Validation(format!(
                "score at sample {}, member {} is outside [0,1]",
                i / n_members,
                i % n_members
            )));
        }
        let mut seen = HashSet::with_capacity(k);
        for id in &sample_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::Validation(format!("duplicate sample id `{id}`")));
            }
        }
        Ok(Self {
            sample_ids,
            labels,
            groups,
            scores,
            n_members,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_members(&self) -> usize {
        self.n_members
    }

    pub fn sample_ids(&self) -> &[String] {
        &self.sample_ids
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn groups(&self) -> &[u8] {
        &self.groups
    }

    pub fn score(&self, k: usize, n: usize) -> T {
        self.scores[k * self.n_members + n]
    }

    /// All member scores of sample `k`.
    pub fn row(&self, k: usize) -> &[T] {
        &self.scores[k * self.n_members..(k + 1) * self.n_members]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.scores.chunks_exact(self.n_members)
    }

    pub fn member_scores(&self, n: usize) -> Vec<T> {
        self.rows().map(|r| r[n]).collect()
    }

    /// Keeps the given member columns, in the given order.
    pub fn select_members(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::arg("member selection is empty"));
        }
        let mut seen = vec![false; self.n_members];
        for &i in indices {
            if i >= self.n_members {
                return Err(Error::arg(format!(
                    "member index {i} out of range (N = {})",
                    self.n_members
                )));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::arg(format!("member index {i} selected twice")));
            }
        }
        let scores = self
            .rows()
            .flat_map(|r| indices.iter().map(move |&i| r[i]))
            .collect();
        Ok(Self {
            sample_ids: self.sample_ids.clone(),
            labels: self.labels.clone(),
            groups: self.groups.clone(),
            scores,
            n_members: indices.len(),
        })
    }

    /// Row subset with possible repeats; ids are rewritten to stay unique.
    pub(crate) fn resample_rows(&self, rows: &[usize]) -> Self {
        let mut scores = Vec::with_capacity(rows.len() * self.n_members);
        for &k in rows {
            scores.extend_from_slice(self.row(k));
        }
        Self {
            sample_ids: (0..rows.len()).map(|j| format!("r{j}")).collect(),
            labels: rows.iter().map(|&k| self.labels[k]).collect(),
            groups: rows.iter().map(|&k| self.groups[k]).collect(),
            scores,
            n_members: self.n_members,
        }
    }

    /// Replaces the member matrix with a single score column.
    pub fn with_single_member(&self, scores: Vec<T>) -> Result<Self> {
        Self::from_flat(
            self.sample_ids.clone(),
            self.labels.clone(),
            self.groups.clone(),
            scores,
            1,
        )
    }

    pub fn validate(&self) -> ValidationSummary {
        let mut cells = [[0usize; 2]; 2];
        for (&y, &a) in self.labels.iter().zip(&self.groups) {
            cells[y as usize][a as usize] += 1;
        }
        let group_counts = [cells[0][0] + cells[1][0], cells[0][1] + cells[1][1]];
        let prevalence = [0, 1].map(|a| {
            (group_counts[a] > 0).then(|| cells[1][a] as f64 / group_counts[a] as f64)
        });
        let mut flags = Vec::new();
        for a in 0..2 {
            if group_counts[a] == 0 {
                flags.push(format!("empty group {a}"));
            }
        }
        for y in 0..2 {
            for a in 0..2 {
                if cells[y][a] == 0 {
                    flags.push(format!("empty cell ({y},{a})"));
                }
            }
        }
        ValidationSummary {
            n_samples: self.len(),
            n_members: self.n_members,
            group_counts,
            cell_counts: cells,
            prevalence,
            flags,
        }
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        let mut header = vec!["sample_id".to_string(), "y".into(), "a".into()];
        header.extend((0..self.n_members).map(|n| format!("m{n}")));
        w.write_record(&header).map_err(csv_io)?;
        let mut record = Vec::with_capacity(3 + self.n_members);
        for k in 0..self.len() {
            record.clear();
            record.push(self.sample_ids[k].clone());
            record.push(self.labels[k].to_string());
            record.push(self.groups[k].to_string());
            // Display for floats is the shortest string that parses back to the same value.
            record.extend(self.row(k).iter().map(|s| s.to_string()));
            w.write_record(&record).map_err(csv_io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::None)
            .from_reader(reader);
        let header = r
            .headers()
            .map_err(|e| ingest(0, "header", e.to_string()))?
            .clone();
        let cols: Vec<&str> = header.iter().collect();
        if cols.len() < 4 || cols[0] != "sample_id" || cols[1] != "y" || cols[2] != "a" {
            return Err(ingest(
                0,
                "header",
                "expected `sample_id,y,a,m0,...`".to_string(),
            ));
        }
        let member_cols: Vec<String> = cols[3..].iter().map(|s| s.to_string()).collect();
        let n_members = member_cols.len();

        let mut ids = Vec::new();
        let mut labels = Vec::new();
        let mut groups = Vec::new();
        let mut scores = Vec::new();
        let mut seen = HashSet::new();
        for (i, rec) in r.records().enumerate() {
            let row = i + 1;
            let rec = rec.map_err(|e| ingest(row, "*", e.to_string()))?;
            if rec.len() != cols.len() {
                return Err(ingest(
                    row,
                    "*",
                    format!("expected {} fields, found {}", cols.len(), rec.len()),
                ));
            }
            let id = rec[0].to_string();
            if id.is_empty() {
                return Err(ingest(row, "sample_id", "missing value".into()));
            }
            if !seen.insert(id.clone()) {
                return Err(ingest(row, "sample_id", format!("duplicate sample id `{id}`")));
            }
            labels.push(parse_binary(&rec[1], row, "y")?);
            groups.push(parse_binary(&rec[2], row, "a")?);
            for (j, col) in member_cols.iter().enumerate() {
                let raw = &rec[3 + j];
                let s: T = raw
                    .trim()
                    .parse()
                    .map_err(|_| ingest(row, col, format!("`{raw}` is not a number")))?;
                if !in_unit(s) {
                    return Err(ingest(row, col, format!("score {raw} outside [0,1]")));
                }
                scores.push(s);
            }
            ids.push(id);
        }
        if labels.is_empty() {
            return Err(ingest(1, "*", "file has no data rows".into()));
        }
        Self::from_flat(ids, labels, groups, scores, n_members)
    }

    pub fn load(path: &Path, format: Format) -> Result<Self> {
        match format {
            Format::WideCsv => Self::read_csv(BufReader::new(File::open(path)?)),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = BufWriter::new(File::create(path)?);
        self.write_csv(f)
    }
}

/// Reads a wide-CSV prediction file.
pub fn load_predictions<T: Scalar>(path: &Path, format: Format) -> Result<LabeledPredictions<T>> {
    LabeledPredictions::load(path, format)
}

fn in_unit<T: Scalar>(s: T) -> bool {
    s >= T::zero() && s <= T::one()
}

fn parse_binary(raw: &str, row: usize, column: &str) -> Result<u8> {
    match raw.trim() {
        "0" => Ok(0),
        "1" => Ok(1),
        "" => Err(ingest(row, column, "missing value".into())),
        other => Err(ingest(row, column, format!("`{other}` is not 0 or 1"))),
    }
}

fn ingest(row: usize, column: &str, message: String) -> Error {
    Error::Ingest {
        row,
        column: column.to_string(),
        message,
    }
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

/// Counts reported by [`LabeledPredictions::validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationSummary {
    pub n_samples: usize,
    pub n_members: usize,
    /// Samples per group `a`.
    pub group_counts: [usize; 2],
    /// `cell_counts[y][a]`.
    pub cell_counts: [[usize; 2]; 2],
    /// `P(Y=1 | A=a)`, absent for an empty group.
    pub prevalence: [Option<f64>; 2],
    pub flags: Vec<String>,
}

impl ValidationSummary {
    pub fn has_empty_cell(&self) -> bool {
        self.cell_counts.iter().flatten().any(|&c| c == 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleWeights<T> {
    weights: Vec<T>,
}

impl<T: Scalar> EnsembleWeights<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::arg("weights are empty"));
        }
        if weights.iter().any(|w| !(*w >= T::zero()) || !w.is_finite()) {
            return Err(Error::arg("weights must be finite and non-negative"));
        }
        let sum: f64 = weights.iter().map(|w| w.as_f64()).sum();
        // 1e-12 for f64; f32 rounding needs a wider band.
        let tol = 1e-12f64.max(T::epsilon().as_f64() * weights.len() as f64);
        if (sum - 1.0).abs() > tol {
            return Err(Error::arg(format!("weights sum to {sum}, not 1")));
        }
        Ok(Self { weights })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::arg("cannot weight zero members"));
        }
        Self::new(vec![T::one() / T::count(n); n])
    }

    pub fn as_slice(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Assignment of member columns to independent runs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSet<T> {
    data: LabeledPredictions<T>,
    run_of_member: Vec<usize>,
    runs: Vec<Vec<usize>>,
}

/// JSON run manifest: `{"runs": [[members of run 0], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub runs: Vec<Vec<usize>>,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
    }

    pub fn contiguous(n_runs: usize, members_per_run: usize) -> Self {
        RunManifest {
            runs: (0..n_runs)
                .map(|r| (r * members_per_run..(r + 1) * members_per_run).collect())
                .collect(),
        }
    }
}

impl<T: Scalar> RunSet<T> {
    pub fn new(data: LabeledPredictions<T>, manifest: &RunManifest) -> Result<Self> {
        let n = data.n_members();
        if manifest.runs.is_empty() {
            return Err(Error::Validation("run manifest lists no runs".into()));
        }
        let mut run_of_member = vec![usize::MAX; n];
        for (r, members) in manifest.runs.iter().enumerate() {
            if members.is_empty() {
                return Err(Error::Validation(format!("run {r} is empty")));
            }
            for &m in members {
                if m >= n {
                    return Err(Error::Validation(format!(
                        "run {r} lists member {m}, but N = {n}"
                    )));
                }
                if run_of_member[m] != usize::MAX {
                    return Err(Error::Validation(format!(
                        "member {m} assigned to more than one run"
                    )));
                }
                run_of_member[m] = r;
            }
        }
        if let Some(m) = run_of_member.iter().position(|&r| r == usize::MAX) {
            return Err(Error::Validation(format!("member {m} is not assigned to a run")));
        }
        Ok(Self {
            data,
            run_of_member,
            runs: manifest.runs.clone(),
        })
    }

    /// All members form one run.
    pub fn single_run(data: LabeledPredictions<T>) -> Self {
        let n = data.n_members();
        Self {
            data,
            run_of_member: vec![0; n],
            runs: vec![(0..n).collect()],
        }
    }

    pub fn data(&self) -> &LabeledPredictions<T> {
        &self.data
    }

    pub fn n_runs(&self) -> usize {
        self.runs.len()
    }

    pub fn run_members(&self, run: usize) -> &[usize] {
        &self.runs[run]
    }

    pub fn run_of_member(&self, member: usize) -> usize {
        self.run_of_member[member]
    }

    /// Dataset restricted to one run's members.
    pub fn run_data(&self, run: usize) -> LabeledPredictions<T> {
        self.data
            .select_members(&self.runs[run])
            .expect("manifest validated at construction")
    }

    pub fn manifest(&self) -> RunManifest {
        RunManifest {
            runs: self.runs.clone(),
        }
    }

    pub fn min_run_size(&self) -> usize {
        self.runs.iter().map(Vec::len).min().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> LabeledPredictions<f64> {
        LabeledPredictions::new(
            vec!["a".into(), "b".into()],
            vec![1, 0],
            vec![0, 1],
            vec![vec![0.25, 0.5], vec![0.75, 1.0]],
        )
        .unwrap()
    }

    #[test]
    fn minimal_csv_parses() {
        let text = "sample_id,y,a,m0,m1\ns1,1,0,0.2,0.4\ns2,0,1,0.9,0.1\n";
        let d = LabeledPredictions::<f64>::read_csv(text.as_bytes()).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.n_members(), 2);
        assert_eq!(d.score(1, 0), 0.9);
    }

    #[test]
    fn out_of_range_score_names_row_and_column() {
        let text = "sample_id,y,a,m0,m1\ns1,1,0,0.2,0.4\ns2,0,1,0.9,1.3\n";
        let err = LabeledPredictions::<f64>::read_csv(text.as_bytes()).unwrap_err();
        match err {
            Error::Ingest { row, column, .. } => {
                assert_eq!(row, 2);
                assert_eq!(column, "m1");
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn rejects_bad_labels_duplicates_and_missing() {
        let bad_label = "sample_id,y,a,m0\ns1,2,0,0.2\n";
        assert!(matches!(
            LabeledPredictions::<f64>::read_csv(bad_label.as_bytes()),
            Err(Error::Ingest { ref column, .. }) if column == "y"
        ));
        let bad_group = "sample_id,y,a,m0\ns1,1,x,0.2\n";
        assert!(matches!(
            LabeledPredictions::<f64>::read_csv(bad_group.as_bytes()),
            Err(Error::Ingest { ref column, .. }) if column == "a"
        ));
        let dup = "sample_id,y,a,m0\ns1,1,0,0.2\ns1,0,0,0.3\n";
        assert!(matches!(
            LabeledPredictions::<f64>::read_csv(dup.as_bytes()),
            Err(Error::Ingest { row: 2, ref column, .. }) if column == "sample_id"
        ));
        let missing = "sample_id,y,a,m0\ns1,1,0,\n";
        assert!(matches!(
            LabeledPredictions::<f64>::read_csv(missing.as_bytes()),
            Err(Error::Ingest { row: 1, ref column, .. }) if column == "m0"
        ));
        let short = "sample_id,y,a,m0,m1\ns1,1,0,0.2\n";
        assert!(LabeledPredictions::<f64>::read_csv(short.as_bytes()).is_err());
    }

    #[test]
    fn validate_counts_cells() {
        let d = LabeledPredictions::<f64>::new(
            (0..8).map(|i| i.to_string()).collect(),
            vec![0, 0, 0, 0, 1, 1, 1, 1],
            vec![0, 0, 1, 1, 0, 0, 1, 1],
            vec![vec![0.5]; 8],
        )
        .unwrap();
        let v = d.validate();
        assert_eq!(v.cell_counts, [[2, 2], [2, 2]]);
        assert!(v.flags.is_empty());
        assert_eq!(v.prevalence, [Some(0.5), Some(0.5)]);
    }

    #[test]
    fn validate_flags_empty_cell() {
        let d = LabeledPredictions::<f64>::new(
            (0..3).map(|i| i.to_string()).collect(),
            vec![0, 1, 0],
            vec![0, 1, 1],
            vec![vec![0.5]; 3],
        )
        .unwrap();
        let v = d.validate();
        assert!(v.flags.contains(&"empty cell (1,0)".to_string()));
        assert!(v.has_empty_cell());
    }

    #[test]
    fn select_members_projects_and_composes() {
        let d = LabeledPredictions::<f64>::new(
            vec!["x".into()],
            vec![1],
            vec![0],
            vec![vec![0.1, 0.2, 0.3]],
        )
        .unwrap();
        assert_eq!(d.select_members(&[0, 1, 2]).unwrap(), d);
        assert_eq!(d.select_members(&[2]).unwrap().member_scores(0), vec![0.3]);
        let swapped = d.select_members(&[1, 0]).unwrap();
        assert_eq!(swapped.select_members(&[1, 0]).unwrap(), d.select_members(&[0, 1]).unwrap());
        assert!(d.select_members(&[3]).is_err());
        assert!(d.select_members(&[1, 1]).is_err());
        assert!(d.select_members(&[]).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let d = tiny();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "sample_id,y,a,m0,m1\na,1,0,0.25,0.5\nb,0,1,0.75,1\n"
        );
        assert_eq!(LabeledPredictions::<f64>::read_csv(buf.as_slice()).unwrap(), d);
    }

    #[test]
    fn weights_invariants() {
        assert!(EnsembleWeights::<f64>::new(vec![0.5, 0.5]).is_ok());
        assert!(EnsembleWeights::<f64>::new(vec![0.5, 0.6]).is_err());
        assert!(EnsembleWeights::<f64>::new(vec![1.5, -0.5]).is_err());
        assert_eq!(EnsembleWeights::<f32>::uniform(4).unwrap().as_slice(), &[0.25f32; 4]);
    }

    #[test]
    fn runset_checks_manifest() {
        let d = tiny();
        assert!(RunSet::new(d.clone(), &RunManifest { runs: vec![vec![0], vec![1]] }).is_ok());
        assert!(RunSet::new(d.clone(), &RunManifest { runs: vec![vec![0, 1], vec![]] }).is_err());
        assert!(RunSet::new(d.clone(), &RunManifest { runs: vec![vec![0]] }).is_err());
        assert!(RunSet::new(d.clone(), &RunManifest { runs: vec![vec![0, 0, 1]] }).is_err());
        assert!(RunSet::new(d, &RunManifest { runs: vec![vec![0, 2]] }).is_err());
        let m: RunManifest = serde_json::from_str(r#"{"runs": [[0, 1], [2]]}"#).unwrap();
        assert_eq!(m.runs[1], vec![2]);
    }
}
