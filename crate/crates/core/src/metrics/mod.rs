//! Clustering scores against ground truth and their aggregation over runs.

mod hungarian;

pub use hungarian::min_cost_assignment;

use std::collections::BTreeMap;

use crate::spectral::ClusterAssignment;
use crate::{Error, Result};

/// Reference labels, densely indexed in `[0, num_classes)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    labels: Vec<usize>,
    num_classes: usize,
}

impl GroundTruth {
    pub fn new(labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        if let Some(bad) = labels.iter().find(|&&l| l >= num_classes) {
            return Err(Error::Parameter(format!(
                "class {bad} out of range for {num_classes} classes"
            )));
        }
        Ok(Self {
            labels,
            num_classes,
        })
    }

    /// Re-indexes arbitrary labels to `0..u` in increasing label order.
    pub fn from_raw<T: Ord + Copy>(raw: &[T]) -> Self {
        let mut index = BTreeMap::new();
        for &r in raw {
            index.entry(r).or_insert(0usize);
        }
        for (i, v) in index.values_mut().enumerate() {
            *v = i;
        }
        let labels = raw.iter().map(|r| index[r]).collect();
        Self {
            labels,
            num_classes: index.len(),
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Counts of `(pred cluster, true class)` pairs over dense indices.
struct Contingency {
    counts: Vec<Vec<u64>>,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
    total: u64,
}

fn dense(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut index = BTreeMap::new();
    for &l in labels {
        let next = index.len();
        index.entry(l).or_insert(next);
    }
    (labels.iter().map(|l| index[l]).collect(), index.len())
}

impl Contingency {
    fn build(pred: &[usize], truth: &[usize]) -> Result<Self> {
        if pred.len() != truth.len() {
            return Err(Error::LengthMismatch {
                left: pred.len(),
                right: truth.len(),
            });
        }
        let (p, np) = dense(pred);
        let (t, nt) = dense(truth);
        let mut counts = vec![vec![0u64; nt]; np];
        for (&a, &b) in p.iter().zip(&t) {
            counts[a][b] += 1;
        }
        let row_sums = counts.iter().map(|r| r.iter().sum()).collect();
        let col_sums = (0..nt).map(|j| counts.iter().map(|r| r[j]).sum()).collect();
        Ok(Self {
            counts,
            row_sums,
            col_sums,
            total: pred.len() as u64,
        })
    }
}

/// Fraction of samples labeled correctly under the best one-to-one matching
/// of predicted clusters to true classes.
pub fn accuracy_from_labels(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let table = Contingency::build(pred, truth)?;
    if table.total == 0 {
        return Ok(1.0);
    }
    let size = table.row_sums.len().max(table.col_sums.len());
    // maximize agreements = minimize (−agreements); pad to square with zeros
    let cost: Vec<Vec<i64>> = (0..size)
        .map(|i| {
            (0..size)
                .map(|j| {
                    let c = table
                        .counts
                        .get(i)
                        .and_then(|r| r.get(j))
                        .copied()
                        .unwrap_or(0);
                    -(c as i64)
                })
                .collect()
        })
        .collect();
    let assignment = min_cost_assignment(&cost);
    let matched: i64 = assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| -cost[i][j])
        .sum();
    Ok(matched as f64 / table.total as f64)
}

pub fn clustering_accuracy(pred: &ClusterAssignment, truth: &GroundTruth) -> Result<f64> {
    accuracy_from_labels(pred.labels(), truth.labels())
}

fn entropy(sums: &[u64], total: f64) -> f64 {
    sums.iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.ln()
        })
        .sum()
}

/// `I(pred; truth) / sqrt(H(pred) · H(truth))`.
///
/// Two single-cluster partitions score 1; a single-cluster partition against
/// anything else scores 0.
pub fn nmi_from_labels(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let table = Contingency::build(pred, truth)?;
    if table.total == 0 {
        return Ok(1.0);
    }
    let total = table.total as f64;
    let hp = entropy(&table.row_sums, total);
    let ht = entropy(&table.col_sums, total);
    if hp == 0.0 && ht == 0.0 {
        return Ok(1.0);
    }
    if hp == 0.0 || ht == 0.0 {
        return Ok(0.0);
    }
    let mut mi = 0.0;
    for (i, row) in table.counts.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let pij = c as f64 / total;
            let pi = table.row_sums[i] as f64 / total;
            let pj = table.col_sums[j] as f64 / total;
            mi += pij * (pij / (pi * pj)).ln();
        }
    }
    Ok((mi / (hp * ht).sqrt()).clamp(0.0, 1.0))
}

pub fn nmi(pred: &ClusterAssignment, truth: &GroundTruth) -> Result<f64> {
    nmi_from_labels(pred.labels(), truth.labels())
}

/// Wall time of the three compute stages, in seconds.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub solve: f64,
    pub graph: f64,
    pub spectral: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreReport {
    pub accuracy: f64,
    pub nmi: f64,
    /// Always `1 − accuracy`.
    pub error: f64,
    pub runtime_seconds: f64,
    pub stages: StageTimings,
}

impl ScoreReport {
    pub fn new(accuracy: f64, nmi: f64, runtime_seconds: f64, stages: StageTimings) -> Self {
        Self {
            accuracy,
            nmi,
            error: 1.0 - accuracy,
            runtime_seconds,
            stages,
        }
    }

    pub fn score(
        pred: &ClusterAssignment,
        truth: &GroundTruth,
        runtime_seconds: f64,
        stages: StageTimings,
    ) -> Result<Self> {
        Ok(Self::new(
            clustering_accuracy(pred, truth)?,
            nmi(pred, truth)?,
            runtime_seconds,
            stages,
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("no values to aggregate"));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        Ok(Self {
            mean: sorted.iter().sum::<f64>() / n as f64,
            median,
            min: sorted[0],
            max: sorted[n - 1],
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub runs: usize,
    pub accuracy: Stats,
    pub nmi: Stats,
    pub error: Stats,
    pub runtime: Stats,
    pub solve: Stats,
    pub graph: Stats,
    pub spectral: Stats,
}

pub fn aggregate(reports: &[ScoreReport]) -> Result<Summary> {
    if reports.is_empty() {
        return Err(Error::Empty("no reports to aggregate"));
    }
    let pick = |f: fn(&ScoreReport) -> f64| Stats::of(&reports.iter().map(f).collect::<Vec<_>>());
    Ok(Summary {
        runs: reports.len(),
        accuracy: pick(|r| r.accuracy)?,
        nmi: pick(|r| r.nmi)?,
        error: pick(|r| r.error)?,
        runtime: pick(|r| r.runtime_seconds)?,
        solve: pick(|r| r.stages.solve)?,
        graph: pick(|r| r.stages.graph)?,
        spectral: pick(|r| r.stages.spectral)?,
    })
}
