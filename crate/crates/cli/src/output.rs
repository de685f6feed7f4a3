//! CSV tables and the run metadata file.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! rerun with the same configuration reproduces every file byte for byte
//! (timings live in their own file for that reason).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use swim_core::linalg::RNG_ALGORITHM;

use crate::config::{join, RunConfig, Task};
use crate::error::{CliError, CliResult};

pub const METRICS_HEADER: &str = "task,schedule,width,seed,metric,value,test_rmse";
pub const TIMINGS_HEADER: &str = "task,schedule,width,seed,wall_ms";
pub const SUMMARY_HEADER: &str = "task,schedule,width,metric,runs,mean,std";

/// Build identifier baked in at compile time.
pub const GIT_DESCRIBE: &str = env!("SWIM_FORGE_GIT_DESCRIBE");

/// One `(schedule, width, seed)` cell of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub task: Task,
    pub schedule: String,
    pub width: usize,
    pub seed: u64,
    /// `rmse` or `error_rate`.
    pub metric: &'static str,
    pub value: f64,
    /// Dense-grid RMSE when requested.
    pub test_rmse: Option<f64>,
    pub wall_ms: u128,
}

pub fn metrics_csv(rows: &[MetricRow]) -> String {
    let mut s = format!("{METRICS_HEADER}\n");
    for r in rows {
        let extra = r.test_rmse.map(|v| v.to_string()).unwrap_or_default();
        writeln!(s, "{},{},{},{},{},{},{}", r.task, r.schedule, r.width, r.seed, r.metric, r.value, extra).unwrap();
    }
    s
}

pub fn timings_csv(rows: &[MetricRow]) -> String {
    let mut s = format!("{TIMINGS_HEADER}\n");
    for r in rows {
        writeln!(s, "{},{},{},{},{}", r.task, r.schedule, r.width, r.seed, r.wall_ms).unwrap();
    }
    s
}

/// Mean and sample standard deviation per `(schedule, width)`, in first-seen order.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub task: Task,
    pub schedule: String,
    pub width: usize,
    pub metric: &'static str,
    pub runs: usize,
    pub mean: f64,
    pub std: f64,
}

pub fn summarize(rows: &[MetricRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(String, usize)> = Vec::new();
    for r in rows {
        let k = (r.schedule.clone(), r.width);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(schedule, width)| {
            let group: Vec<&MetricRow> = rows.iter().filter(|r| r.schedule == schedule && r.width == width).collect();
            let values: Vec<f64> = group.iter().map(|r| r.value).collect();
            let (mean, std) = mean_std(&values);
            SummaryRow { task: group[0].task, schedule, width, metric: group[0].metric, runs: values.len(), mean, std }
        })
        .collect()
}

/// Mean and sample (n − 1) standard deviation; the deviation of one value is 0.
pub fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut s = format!("{SUMMARY_HEADER}\n");
    for r in rows {
        writeln!(s, "{},{},{},{},{},{},{}", r.task, r.schedule, r.width, r.metric, r.runs, r.mean, r.std).unwrap();
    }
    s
}

/// `metadata.txt`: configuration, schedules actually used, and provenance of
/// the randomness and the build. Contains nothing run-dependent.
pub fn metadata(cfg: &RunConfig, extra: &[(&str, String)]) -> CliResult<String> {
    let mut s = String::new();
    for (k, v) in cfg.describe() {
        writeln!(s, "{k} = {v}").unwrap();
    }
    let show_schedules = !(cfg.task == Task::SpectralDemo && cfg.demo_mode == crate::config::DemoMode::Adam);
    if show_schedules {
        for (name, sched) in cfg.schedules()? {
            writeln!(s, "schedule.{name}.s1 = {}", join(sched.s1())).unwrap();
            writeln!(s, "schedule.{name}.s2 = {}", join(sched.s2())).unwrap();
        }
    }
    writeln!(s, "rng = {RNG_ALGORITHM}").unwrap();
    writeln!(s, "cell_seed = derive_seed(seed, schedule, width) per cell; dataset drawn from Rng::new(seed)").unwrap();
    for (k, v) in extra {
        writeln!(s, "{k} = {v}").unwrap();
    }
    writeln!(s, "build = swim-forge {} ({GIT_DESCRIBE})", env!("CARGO_PKG_VERSION")).unwrap();
    Ok(s)
}

/// Collects output files under one directory.
#[derive(Debug)]
pub struct OutDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(root: &Path) -> CliResult<Self> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(OutDir { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> CliResult<PathBuf> {
        let path = self.root.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path.clone());
        Ok(path)
    }

    /// Records a file produced by some other writer.
    pub fn record(&mut self, path: PathBuf) {
        self.written.push(path);
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn root(&self) -> &Path {
        &self.root
    }
}
