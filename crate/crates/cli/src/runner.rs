//! Experiment execution: single runs, seeded repeats and parameter sweeps.

use fssc::data::{
    generate_synthetic, load_labels, load_matrix, normalize_columns, pca_project, Dataset,
};
use fssc::derive_seed;
use fssc::metrics::{aggregate, ScoreReport, Summary};
use fssc::pipeline::{run_pipeline, AtStage, Stage, StageError};

use crate::config::{InputSource, RunConfig, SweepConfig};

/// Loads (or generates) the dataset and applies the configured preprocessing.
pub fn prepare_dataset(config: &RunConfig) -> Result<Dataset, StageError> {
    let mut data = match &config.input {
        InputSource::Files {
            matrix,
            labels,
            format,
        } => {
            let y = load_matrix(matrix, *format).at(Stage::Load)?;
            let truth = load_labels(labels).at(Stage::Load)?;
            Dataset::new(y, truth, matrix.display().to_string()).at(Stage::Load)?
        }
        InputSource::Synthetic(spec) => generate_synthetic(spec).at(Stage::Load)?,
    };
    if let Some(dim) = config.pca_dim {
        data.matrix = pca_project(&data.matrix, dim).at(Stage::Preprocess)?;
    }
    if config.normalize {
        data.matrix = normalize_columns(&data.matrix);
    }
    Ok(data)
}

/// Seed for the k-means stage of repeat `repeat`.
pub fn repeat_seed(config: &RunConfig, repeat: usize) -> u64 {
    derive_seed(config.seed, repeat as u64)
}

fn run_on(data: &Dataset, config: &RunConfig, repeat: usize) -> Result<ScoreReport, StageError> {
    let pipeline = config.pipeline(data.truth.num_classes(), repeat_seed(config, repeat));
    let mut report = run_pipeline(data, &pipeline)?.report;
    if !config.timings {
        report.runtime_seconds = 0.0;
        report.stages = Default::default();
    }
    Ok(report)
}

/// One full pipeline run (repeat 0).
pub fn run_once(config: &RunConfig) -> Result<ScoreReport, StageError> {
    let data = prepare_dataset(config)?;
    run_on(&data, config, 0)
}

#[derive(Debug, Clone)]
pub struct RepeatedRun {
    pub dataset: String,
    pub clusters: usize,
    /// One entry per repeat, in repeat order.
    pub reports: Vec<ScoreReport>,
    pub summary: Summary,
}

fn repeat_on(data: &Dataset, config: &RunConfig) -> Result<RepeatedRun, StageError> {
    let reports = (0..config.repeats)
        .map(|r| run_on(data, config, r))
        .collect::<Result<Vec<_>, _>>()?;
    let summary = aggregate(&reports).at(Stage::Score)?;
    Ok(RepeatedRun {
        dataset: data.name.clone(),
        clusters: config.clusters.unwrap_or(data.truth.num_classes()),
        reports,
        summary,
    })
}

/// `config.repeats` runs on the same data with k-means seeds derived from
/// `(seed, repeat)`.
pub fn run_repeated(config: &RunConfig) -> Result<RepeatedRun, StageError> {
    let data = prepare_dataset(config)?;
    repeat_on(&data, config)
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub tau: f64,
    pub k: usize,
    pub run: RepeatedRun,
}

/// Full `tau_grid × k_grid` grid in row-major (τ outer, k inner) order.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>, StageError> {
    let data = prepare_dataset(&config.base)?;
    let mut rows = Vec::with_capacity(config.tau_grid.len() * config.k_grid.len());
    for &tau in &config.tau_grid {
        for &k in &config.k_grid {
            let cell = RunConfig {
                tau,
                k: Some(k),
                ..config.base.clone()
            };
            rows.push(SweepRow {
                tau,
                k,
                run: repeat_on(&data, &cell)?,
            });
        }
    }
    Ok(rows)
}
