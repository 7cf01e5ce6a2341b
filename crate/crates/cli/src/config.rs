//! Run and sweep configuration: command-line flags merged over an optional
//! JSON file.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use fssc::data::{MatrixFormat, SyntheticSpec};
use fssc::pipeline::{Algorithm, PipelineConfig};
use serde::Deserialize;

/// Every tunable of a run. Each field is optional so that flags and the JSON
/// config file can be layered; flags win.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Named parameter preset (ar, exyaleb, mpie, hopkins2, hopkins3); sets tau and k
    #[arg(long)]
    pub preset: Option<String>,

    /// Coefficient solver: fssc, lrsc or l2graph
    #[arg(long)]
    pub algorithm: Option<Algorithm>,

    /// Balance parameter τ
    #[arg(long)]
    pub tau: Option<f64>,

    /// Coefficients kept per column (default: all)
    #[arg(long)]
    pub k: Option<usize>,

    /// Number of clusters (default: number of ground-truth classes)
    #[arg(long)]
    pub clusters: Option<usize>,

    /// Data matrix file; samples are columns. Omit to use synthetic data
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Ground-truth label file, one integer per line
    #[arg(long)]
    pub labels: Option<PathBuf>,

    /// Matrix file format: csv or binary
    #[arg(long)]
    pub format: Option<MatrixFormat>,

    /// Project onto this many principal components before clustering
    #[arg(long)]
    pub pca_dim: Option<usize>,

    /// Scale columns to unit norm before clustering
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub normalize: Option<bool>,

    /// Independent repetitions (k-means seeds)
    #[arg(long)]
    pub repeats: Option<usize>,

    /// Base seed for data generation and k-means
    #[arg(long)]
    pub seed: Option<u64>,

    /// Output path (report CSV, or matrix file for `gen`)
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Drop self-coefficients before top-k retention
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub zero_diagonal: Option<bool>,

    /// Unit-normalize L2-graph coefficient columns
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub l2_normalize: Option<bool>,

    /// k-means++ restarts per clustering
    #[arg(long)]
    pub kmeans_restarts: Option<usize>,

    /// Lloyd iteration cap per restart
    #[arg(long)]
    pub kmeans_max_iters: Option<usize>,

    /// Write measured timings; `false` writes zeros so reports are byte-reproducible
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub timings: Option<bool>,

    /// Synthetic data: ambient dimension
    #[arg(long)]
    pub ambient_dim: Option<usize>,

    /// Synthetic data: dimension of each subspace
    #[arg(long)]
    pub subspace_dim: Option<usize>,

    /// Synthetic data: number of subspaces
    #[arg(long)]
    pub subspaces: Option<usize>,

    /// Synthetic data: points per subspace
    #[arg(long)]
    pub points: Option<usize>,

    /// Synthetic data: Gaussian noise level
    #[arg(long)]
    pub noise: Option<f64>,

    /// Sweep: comma-separated τ values
    #[arg(long, value_delimiter = ',')]
    pub tau_grid: Option<Vec<f64>>,

    /// Sweep: comma-separated k values
    #[arg(long, value_delimiter = ',')]
    pub k_grid: Option<Vec<usize>>,
}

macro_rules! layer {
    ($flags:expr, $file:expr; $($field:ident),* $(,)?) => {
        Settings { $($field: $flags.$field.or($file.$field),)* }
    };
}

impl Settings {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("parsing config file {}", path.display()))
    }

    /// Fields set in `self` take precedence over `file`.
    pub fn layered_over(self, file: Settings) -> Settings {
        layer!(self, file;
            preset, algorithm, tau, k, clusters, input, labels, format, pca_dim, normalize,
            repeats, seed, out, zero_diagonal, l2_normalize, kmeans_restarts, kmeans_max_iters,
            timings, ambient_dim, subspace_dim, subspaces, points, noise, tau_grid, k_grid)
    }
}

/// Published `(τ, k)` choices per benchmark.
pub fn preset(name: &str) -> Result<(f64, usize)> {
    Ok(match name.to_ascii_lowercase().as_str() {
        "ar" => (45.0, 8),
        "exyaleb" | "yaleb" => (3.0, 6),
        "mpie" => (30.0, 13),
        "hopkins2" => (26.0, 5),
        "hopkins3" => (34.0, 5),
        other => bail!("unknown preset {other:?} (ar, exyaleb, mpie, hopkins2, hopkins3)"),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum InputSource {
    Files {
        matrix: PathBuf,
        labels: PathBuf,
        format: MatrixFormat,
    },
    Synthetic(SyntheticSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub tau: f64,
    pub k: Option<usize>,
    /// `None` uses the number of ground-truth classes.
    pub clusters: Option<usize>,
    pub repeats: usize,
    pub seed: u64,
    pub input: InputSource,
    pub normalize: bool,
    pub pca_dim: Option<usize>,
    pub zero_diagonal: bool,
    pub l2_normalize: bool,
    pub kmeans_restarts: usize,
    pub kmeans_max_iters: usize,
    pub timings: bool,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_TAU: f64 = 10.0;
pub const DEFAULT_REPEATS: usize = 20;

pub fn synthetic_spec(s: &Settings) -> SyntheticSpec {
    SyntheticSpec {
        ambient_dim: s.ambient_dim.unwrap_or(50),
        subspace_dim: s.subspace_dim.unwrap_or(4),
        num_subspaces: s.subspaces.unwrap_or(5),
        points_per_subspace: s.points.unwrap_or(40),
        noise_sigma: s.noise.unwrap_or(0.01),
        seed: s.seed.unwrap_or(0),
    }
}

pub fn format_for(path: &Path, explicit: Option<MatrixFormat>) -> MatrixFormat {
    explicit.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some("bin") | Some("sgc") => MatrixFormat::Binary,
        _ => MatrixFormat::Csv,
    })
}

impl RunConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let (preset_tau, preset_k) = match &s.preset {
            Some(name) => {
                let (t, k) = preset(name)?;
                (Some(t), Some(k))
            }
            None => (None, None),
        };
        let input = match (&s.input, &s.labels) {
            (Some(matrix), Some(labels)) => InputSource::Files {
                matrix: matrix.clone(),
                labels: labels.clone(),
                format: format_for(matrix, s.format),
            },
            (Some(_), None) => bail!("--input requires --labels"),
            (None, _) => InputSource::Synthetic(synthetic_spec(s)),
        };
        let config = Self {
            algorithm: s.algorithm.unwrap_or(Algorithm::Fssc),
            tau: s.tau.or(preset_tau).unwrap_or(DEFAULT_TAU),
            k: s.k.or(preset_k),
            clusters: s.clusters,
            repeats: s.repeats.unwrap_or(DEFAULT_REPEATS),
            seed: s.seed.unwrap_or(0),
            input,
            normalize: s.normalize.unwrap_or(false),
            pca_dim: s.pca_dim,
            zero_diagonal: s.zero_diagonal.unwrap_or(true),
            l2_normalize: s.l2_normalize.unwrap_or(true),
            kmeans_restarts: s.kmeans_restarts.unwrap_or(20),
            kmeans_max_iters: s.kmeans_max_iters.unwrap_or(300),
            timings: s.timings.unwrap_or(true),
            out: s.out.clone(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            bail!("tau must be positive, got {}", self.tau);
        }
        if self.repeats < 1 {
            bail!("repeats must be at least 1");
        }
        if self.k == Some(0) {
            bail!("k must be at least 1");
        }
        if self.clusters == Some(0) {
            bail!("clusters must be at least 1");
        }
        if let InputSource::Synthetic(spec) = &self.input {
            spec.validate().context("synthetic data spec")?;
        }
        Ok(())
    }

    /// Pipeline parameters for repeat `repeat` against `classes` true classes.
    pub fn pipeline(&self, classes: usize, spectral_seed: u64) -> PipelineConfig {
        let mut p = PipelineConfig::new(
            self.algorithm,
            self.tau,
            self.k,
            self.clusters.unwrap_or(classes),
            spectral_seed,
        );
        p.zero_diagonal = self.zero_diagonal;
        p.l2_normalize = self.l2_normalize;
        p.spectral.kmeans_restarts = self.kmeans_restarts;
        p.spectral.kmeans_max_iters = self.kmeans_max_iters;
        p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub base: RunConfig,
    pub tau_grid: Vec<f64>,
    pub k_grid: Vec<usize>,
}

impl SweepConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let base = RunConfig::from_settings(s)?;
        let tau_grid = s.tau_grid.clone().unwrap_or_else(|| vec![base.tau]);
        let k_grid = match (&s.k_grid, base.k) {
            (Some(g), _) => g.clone(),
            (None, Some(k)) => vec![k],
            (None, None) => bail!("sweep needs --k-grid or --k"),
        };
        let sweep = Self {
            base,
            tau_grid,
            k_grid,
        };
        sweep.validate()?;
        Ok(sweep)
    }

    pub fn validate(&self) -> Result<()> {
        if self.tau_grid.is_empty() || self.k_grid.is_empty() {
            bail!("sweep grids must be nonempty");
        }
        if let Some(t) = self.tau_grid.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            bail!("tau grid contains invalid value {t}");
        }
        if self.k_grid.contains(&0) {
            bail!("k grid values must be at least 1");
        }
        self.base.validate()
    }
}
