//! Command-line surface. Every run flag maps onto a config key, applied
//! after the optional `--config` file so flags win.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{RunConfig, Task};
use crate::error::{CliError, CliResult};
use crate::output::OutDir;
use crate::plot::{emit_plot_to_file, PlotKind};
use crate::runs::{run_mnist, run_regress1d, run_spectral_demo};

#[derive(Debug, Parser)]
#[command(name = "swim-forge", version, about = "Sampled-network experiments: regression, MNIST and layer-probe spectra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep schedules x widths x seeds on the 1D multi-frequency target.
    Regress1d(RunArgs),
    /// Sweep schedules x widths x seeds on MNIST (test error rate).
    Mnist(RunArgs),
    /// Layer-probe curves and spectra of Adam-trained or sampled networks.
    SpectralDemo(RunArgs),
    /// Render a metrics, summary or probe CSV as an SVG line chart.
    Plot {
        /// CSV written by one of the runs.
        input: PathBuf,
        /// SVG path; defaults to the input with an .svg extension.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// key = value file applied before the flags below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Hidden widths, e.g. 64,128,1024.
    #[arg(long)]
    pub widths: Option<String>,
    #[arg(long)]
    pub layers: Option<usize>,
    /// Seed list (0,1,2) or range (0..5).
    #[arg(long)]
    pub seeds: Option<String>,
    /// ordered,normal,reversed (any subset) or explicit:v1,v2,...
    #[arg(long)]
    pub schedule: Option<String>,
    /// linspace, first-L or last-L.
    #[arg(long)]
    pub list_policy: Option<String>,
    /// Ascending s1 values the ordered and reversed schedules are drawn from.
    #[arg(long)]
    pub s1_list: Option<String>,
    #[arg(long)]
    pub normal_s1: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub varsigma: Option<usize>,
    /// Fixed ridge value, or relative:F for F times the mean Gram diagonal.
    #[arg(long)]
    pub ridge: Option<String>,
    /// sin, tanh or relu.
    #[arg(long)]
    pub activation: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Number of 1D training points.
    #[arg(long)]
    pub points: Option<usize>,
    /// 1D input interval as lo,hi.
    #[arg(long, allow_hyphen_values = true)]
    pub interval: Option<String>,
    /// Also report RMSE on a dense grid of this many points.
    #[arg(long)]
    pub test_grid: Option<usize>,
    #[arg(long)]
    pub mnist_dir: Option<PathBuf>,
    #[arg(long)]
    pub train_limit: Option<usize>,
    #[arg(long)]
    pub test_limit: Option<usize>,
    /// adam or swim.
    #[arg(long)]
    pub demo_mode: Option<String>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    /// Probe grid size.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Apply a Hann window before the DFT.
    #[arg(long)]
    pub hann: bool,
}

impl RunArgs {
    /// Flags that were given, as config key/value pairs.
    pub fn pairs(&self) -> Vec<(String, String)> {
        let mut v: Vec<(&str, Option<String>)> = vec![
            ("widths", self.widths.clone()),
            ("layers", self.layers.map(|x| x.to_string())),
            ("seeds", self.seeds.clone()),
            ("schedule", self.schedule.clone()),
            ("list_policy", self.list_policy.clone()),
            ("s1_list", self.s1_list.clone()),
            ("normal_s1", self.normal_s1.map(|x| x.to_string())),
            ("epsilon", self.epsilon.map(|x| x.to_string())),
            ("varsigma", self.varsigma.map(|x| x.to_string())),
            ("ridge", self.ridge.clone()),
            ("activation", self.activation.clone()),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
            ("points", self.points.map(|x| x.to_string())),
            ("interval", self.interval.clone()),
            ("test_grid", self.test_grid.map(|x| x.to_string())),
            ("mnist_dir", self.mnist_dir.as_ref().map(|p| p.display().to_string())),
            ("train_limit", self.train_limit.map(|x| x.to_string())),
            ("test_limit", self.test_limit.map(|x| x.to_string())),
            ("demo_mode", self.demo_mode.clone()),
            ("epochs", self.epochs.map(|x| x.to_string())),
            ("lr", self.lr.map(|x| x.to_string())),
            ("grid", self.grid.map(|x| x.to_string())),
        ];
        if self.hann {
            v.push(("hann", Some("true".into())));
        }
        v.into_iter().filter_map(|(k, val)| val.map(|x| (k.to_string(), x))).collect()
    }

    /// Task defaults, then the config file, then the flags.
    pub fn resolve(&self, task: Task) -> CliResult<RunConfig> {
        let mut cfg = RunConfig::defaults(task);
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            cfg.apply_file_text(&text)?;
        }
        cfg.apply_pairs(&self.pairs())?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Runs a parsed command; returns the files written.
pub fn execute(cli: &Cli) -> CliResult<Vec<PathBuf>> {
    let done = |out: OutDir| out.written().to_vec();
    match &cli.command {
        Command::Regress1d(a) => Ok(done(run_regress1d(&a.resolve(Task::Regress1d)?)?)),
        Command::Mnist(a) => Ok(done(run_mnist(&a.resolve(Task::Mnist)?)?)),
        Command::SpectralDemo(a) => Ok(done(run_spectral_demo(&a.resolve(Task::SpectralDemo)?)?)),
        Command::Plot { input, output } => {
            let output = output.clone().unwrap_or_else(|| input.with_extension("svg"));
            emit_plot_to_file(input, &output, PlotKind::Auto)?;
            Ok(vec![output])
        }
    }
}
