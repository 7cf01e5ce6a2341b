//! End-to-end clustering: solve → sparsify → affinity → spectral → score.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::Dataset;
use crate::graph::{build_affinity, sparsify_topk, GraphWarning, SparsifyParams};
use crate::metrics::{ScoreReport, StageTimings};
use crate::solvers::{
    fssc_coefficients, l2graph_coefficients, lrsc_coefficients, CoefficientMatrix, DataMatrix,
    SolverParams, DEFAULT_RANK_EPS,
};
use crate::spectral::{spectral_cluster, ClusterAssignment, SpectralParams};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Fssc,
    Lrsc,
    L2graph,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Fssc => "fssc",
            Algorithm::Lrsc => "lrsc",
            Algorithm::L2graph => "l2graph",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fssc" => Ok(Algorithm::Fssc),
            "lrsc" => Ok(Algorithm::Lrsc),
            "l2graph" | "l2-graph" | "l2" => Ok(Algorithm::L2graph),
            other => Err(Error::Parameter(format!(
                "unknown algorithm {other:?} (expected fssc, lrsc or l2graph)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Load,
    Preprocess,
    Solve,
    Graph,
    Spectral,
    Score,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Load => "load",
            Stage::Preprocess => "preprocess",
            Stage::Solve => "solve",
            Stage::Graph => "graph",
            Stage::Spectral => "spectral",
            Stage::Score => "score",
        };
        f.write_str(s)
    }
}

/// An error tagged with the pipeline stage that raised it.
#[derive(Debug, Error)]
#[error("{stage} stage failed: {error}")]
pub struct StageError {
    pub stage: Stage,
    pub error: Error,
}

impl StageError {
    pub fn new(stage: Stage, error: Error) -> Self {
        Self { stage, error }
    }
}

pub trait AtStage<T> {
    fn at(self, stage: Stage) -> Result<T, StageError>;
}

impl<T> AtStage<T> for crate::Result<T> {
    fn at(self, stage: Stage) -> Result<T, StageError> {
        self.map_err(|e| StageError::new(stage, e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub algorithm: Algorithm,
    pub solver: SolverParams,
    /// Coefficients kept per column; `None` keeps every nonzero.
    pub k: Option<usize>,
    pub zero_diagonal: bool,
    /// Unit-normalize L2-graph columns before sparsification.
    pub l2_normalize: bool,
    pub spectral: SpectralParams,
}

impl PipelineConfig {
    pub fn new(
        algorithm: Algorithm,
        tau: f64,
        k: Option<usize>,
        clusters: usize,
        seed: u64,
    ) -> Self {
        Self {
            algorithm,
            solver: SolverParams {
                tau,
                rank_eps: DEFAULT_RANK_EPS,
            },
            k,
            zero_diagonal: true,
            l2_normalize: true,
            spectral: SpectralParams::new(clusters, seed),
        }
    }

    pub fn sparsify_params(&self, n: usize) -> SparsifyParams {
        SparsifyParams {
            k: self
                .k
                .unwrap_or_else(|| SparsifyParams::max_k(n, self.zero_diagonal)),
            zero_diagonal: self.zero_diagonal,
        }
    }
}

/// Runs only the coefficient stage of `config.algorithm`.
pub fn solve_coefficients(
    y: &DataMatrix,
    config: &PipelineConfig,
) -> crate::Result<CoefficientMatrix> {
    match config.algorithm {
        Algorithm::Fssc => fssc_coefficients(y, &config.solver),
        Algorithm::Lrsc => lrsc_coefficients(y, &config.solver),
        Algorithm::L2graph => l2graph_coefficients(y, &config.solver, config.l2_normalize),
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub assignment: ClusterAssignment,
    pub report: ScoreReport,
    pub warnings: Vec<GraphWarning>,
}

/// Clusters `data` and scores the result; timings cover the compute stages only.
pub fn run_pipeline(data: &Dataset, config: &PipelineConfig) -> Result<RunOutcome, StageError> {
    let y = &data.matrix;
    let n = y.ncols();
    config.solver.validate().at(Stage::Solve)?;
    let sparsify = config.sparsify_params(n);
    sparsify.validate(n).at(Stage::Graph)?;
    config.spectral.validate(n).at(Stage::Spectral)?;

    let t0 = Instant::now();
    let c = solve_coefficients(y, config).at(Stage::Solve)?;
    let t1 = Instant::now();
    let c_hat = sparsify_topk(&c, &sparsify).at(Stage::Graph)?;
    let w = build_affinity(&c_hat);
    let t2 = Instant::now();
    let assignment = spectral_cluster(&w, &config.spectral).at(Stage::Spectral)?;
    let t3 = Instant::now();

    let stages = StageTimings {
        solve: (t1 - t0).as_secs_f64(),
        graph: (t2 - t1).as_secs_f64(),
        spectral: (t3 - t2).as_secs_f64(),
    };
    let runtime = (t3 - t0).as_secs_f64();
    let report = ScoreReport::score(&assignment, &data.truth, runtime, stages).at(Stage::Score)?;
    Ok(RunOutcome {
        assignment,
        report,
        warnings: w.warnings().to_vec(),
    })
}
