//! CSV reports. Every file opens with a `# schema=1` line followed by the
//! column header.

use std::fmt::Write;

use fssc::metrics::{ScoreReport, Stats};

use crate::config::RunConfig;
use crate::runner::{repeat_seed, RepeatedRun, SweepRow};

pub const SCHEMA_LINE: &str = "# schema=1";

pub const RUN_HEADER: &str =
    "row,repeat,seed,algorithm,tau,k,u,accuracy,nmi,error,time_s,solve_s,graph_s,spectral_s";

pub const SWEEP_HEADER: &str =
    "algorithm,tau,k,u,repeats,acc_mean,nmi_mean,err_mean,time_mean_s,solve_mean_s,graph_mean_s,spectral_mean_s";

fn k_field(k: Option<usize>) -> String {
    k.map_or_else(|| "all".to_string(), |k| k.to_string())
}

/// Per-repeat rows followed by `mean`, `median`, `min` and `max` rows.
type StatPick = fn(&Stats) -> f64;

pub fn run_csv(config: &RunConfig, run: &RepeatedRun) -> String {
    let mut out = String::new();
    writeln!(out, "{SCHEMA_LINE}").unwrap();
    writeln!(out, "{RUN_HEADER}").unwrap();
    let prefix = format!(
        "{},{},{},{}",
        config.algorithm,
        config.tau,
        k_field(config.k),
        run.clusters
    );
    for (r, rep) in run.reports.iter().enumerate() {
        let ScoreReport {
            accuracy,
            nmi,
            error,
            runtime_seconds,
            stages,
        } = rep;
        writeln!(
            out,
            "run,{r},{},{prefix},{accuracy},{nmi},{error},{runtime_seconds},{},{},{}",
            repeat_seed(config, r),
            stages.solve,
            stages.graph,
            stages.spectral
        )
        .unwrap();
    }
    let s = &run.summary;
    let rows: [(_, StatPick); 4] = [
        ("mean", |x| x.mean),
        ("median", |x| x.median),
        ("min", |x| x.min),
        ("max", |x| x.max),
    ];
    for (name, pick) in rows {
        writeln!(
            out,
            "{name},,,{prefix},{},{},{},{},{},{},{}",
            pick(&s.accuracy),
            pick(&s.nmi),
            pick(&s.error),
            pick(&s.runtime),
            pick(&s.solve),
            pick(&s.graph),
            pick(&s.spectral)
        )
        .unwrap();
    }
    out
}

pub fn sweep_csv(config: &RunConfig, rows: &[SweepRow]) -> String {
    let mut out = String::new();
    writeln!(out, "{SCHEMA_LINE}").unwrap();
    writeln!(out, "{SWEEP_HEADER}").unwrap();
    for row in rows {
        let s = &row.run.summary;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            config.algorithm,
            row.tau,
            row.k,
            row.run.clusters,
            s.runs,
            s.accuracy.mean,
            s.nmi.mean,
            s.error.mean,
            s.runtime.mean,
            s.solve.mean,
            s.graph.mean,
            s.spectral.mean
        )
        .unwrap();
    }
    out
}

/// Human-readable one-paragraph summary for the terminal.
pub fn describe(config: &RunConfig, run: &RepeatedRun) -> String {
    let s = &run.summary;
    format!(
        "{} on {} (u = {}, tau = {}, k = {}, {} runs)\n  \
         accuracy mean {:.4} median {:.4}  [min {:.4}, max {:.4}]\n  \
         nmi      mean {:.4} median {:.4}\n  \
         error    mean {:.2}% median {:.2}%\n  \
         time     mean {:.4}s (solve {:.4}s, graph {:.4}s, spectral {:.4}s)",
        config.algorithm,
        run.dataset,
        run.clusters,
        config.tau,
        k_field(config.k),
        s.runs,
        s.accuracy.mean,
        s.accuracy.median,
        s.accuracy.min,
        s.accuracy.max,
        s.nmi.mean,
        s.nmi.median,
        100.0 * s.error.mean,
        100.0 * s.error.median,
        s.runtime.mean,
        s.solve.mean,
        s.graph.mean,
        s.spectral.mean
    )
}
