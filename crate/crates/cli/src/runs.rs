//! Experiment sweeps. Each `(schedule, width, seed)` cell owns a generator
//! seeded from `derive_seed(seed, schedule, width)`, so cells can run in any
//! order or in parallel with identical results.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use swim_core::dataset::{load_mnist_idx, sample_uniform_fn, target_1d, tone_1d, Dataset};
use swim_core::linalg::{derive_seed, Matrix, Rng};
use swim_core::network::{error_rate, rmse, Mlp};
use swim_core::spectral::{half_open_grid, spectral_profile, ProbeSpectrum};
use swim_core::swim::{swim_initialize, ScaleSchedule, SwimConfig};
use swim_core::trainer::{train, AdamConfig, TrainConfig};

use crate::config::{DemoMode, RunConfig, Task};
use crate::error::{CliError, CliResult};
use crate::output::{metadata, metrics_csv, summarize, summary_csv, timings_csv, MetricRow, OutDir};
use crate::plot::{emit_plot_to_file, PlotKind};

/// Seed for the SWIM generator of one sweep cell.
pub fn cell_seed(seed: u64, schedule: &str, width: usize) -> u64 {
    derive_seed(seed, schedule, width as u64)
}

struct Cell<'a> {
    schedule: &'a str,
    sched: &'a ScaleSchedule<f64>,
    width: usize,
    seed: u64,
}

fn cells<'a>(cfg: &RunConfig, schedules: &'a [(String, ScaleSchedule<f64>)]) -> Vec<Cell<'a>> {
    let mut v = Vec::new();
    for (name, sched) in schedules {
        for &width in &cfg.widths {
            for &seed in &cfg.seeds {
                v.push(Cell { schedule: name, sched, width, seed });
            }
        }
    }
    v
}

/// SWIM settings of one sweep cell.
pub fn swim_config(cfg: &RunConfig, sched: &ScaleSchedule<f64>, seed: u64) -> SwimConfig<f64> {
    let mut c = SwimConfig::new(sched.clone(), seed);
    c.epsilon = cfg.epsilon;
    c.varsigma = cfg.varsigma;
    c.activation = cfg.activation;
    c.ridge = cfg.ridge;
    c
}

fn regress_data(cfg: &RunConfig, seed: u64, f: fn(f64) -> f64) -> CliResult<Dataset<f64>> {
    Ok(sample_uniform_fn(cfg.points, cfg.interval.0, cfg.interval.1, f, &mut Rng::new(seed))?)
}

/// Evenly spaced closed grid `[lo, hi]`.
fn closed_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn rmse_on_grid(net: &Mlp<f64>, grid: &[f64], f: fn(f64) -> f64) -> CliResult<f64> {
    let x = Matrix::column(grid)?;
    let y = Matrix::column(&grid.iter().map(|&v| f(v)).collect::<Vec<_>>())?;
    Ok(rmse(&net.predict(&x)?, &y)?)
}

/// 1D regression sweep: training-set RMSE per cell.
pub fn compute_regress1d(cfg: &RunConfig) -> CliResult<Vec<MetricRow>> {
    cfg.validate()?;
    let schedules = cfg.schedules()?;
    let datasets: Vec<(u64, Dataset<f64>)> =
        cfg.seeds.iter().map(|&s| Ok((s, regress_data(cfg, s, target_1d)?))).collect::<CliResult<_>>()?;
    let grid = (cfg.test_grid > 0).then(|| closed_grid(cfg.interval.0, cfg.interval.1, cfg.test_grid));
    cells(cfg, &schedules)
        .par_iter()
        .map(|c| {
            let start = Instant::now();
            let data = &datasets.iter().find(|(s, _)| *s == c.seed).expect("dataset per seed").1;
            let widths = vec![c.width; cfg.layers];
            let net = swim_initialize(data, &widths, 1, &swim_config(cfg, c.sched, cell_seed(c.seed, c.schedule, c.width)))?;
            let value = rmse(&net.predict(data.inputs())?, data.targets())?;
            let test_rmse = grid.as_deref().map(|g| rmse_on_grid(&net, g, target_1d)).transpose()?;
            Ok(MetricRow {
                task: Task::Regress1d,
                schedule: c.schedule.to_string(),
                width: c.width,
                seed: c.seed,
                metric: "rmse",
                value,
                test_rmse,
                wall_ms: start.elapsed().as_millis(),
            })
        })
        .collect()
}

/// Loads the MNIST train/test subsets named by the config.
pub fn load_mnist(cfg: &RunConfig) -> CliResult<(Dataset<f64>, Dataset<f64>)> {
    let find = |stem: &str| -> CliResult<std::path::PathBuf> {
        for name in [stem.to_string(), format!("{stem}.gz")] {
            let p = cfg.mnist_dir.join(name);
            if p.is_file() {
                return Ok(p);
            }
        }
        Err(CliError::Data(format!("{stem}[.gz] not found in {}", cfg.mnist_dir.display())))
    };
    let train = load_mnist_idx(&find("train-images-idx3-ubyte")?, &find("train-labels-idx1-ubyte")?, Some(cfg.train_limit))?;
    let test = load_mnist_idx(&find("t10k-images-idx3-ubyte")?, &find("t10k-labels-idx1-ubyte")?, Some(cfg.test_limit))?;
    Ok((train, test))
}

/// MNIST sweep: test error rate per cell.
pub fn compute_mnist(cfg: &RunConfig) -> CliResult<Vec<MetricRow>> {
    cfg.validate()?;
    let schedules = cfg.schedules()?;
    let (train, test) = load_mnist(cfg)?;
    cells(cfg, &schedules)
        .par_iter()
        .map(|c| {
            let start = Instant::now();
            let widths = vec![c.width; cfg.layers];
            let sc = swim_config(cfg, c.sched, cell_seed(c.seed, c.schedule, c.width));
            let net = swim_initialize(&train, &widths, train.output_dim(), &sc)?;
            let value = error_rate(&net.predict(test.inputs())?, test.targets())?;
            Ok(MetricRow {
                task: Task::Mnist,
                schedule: c.schedule.to_string(),
                width: c.width,
                seed: c.seed,
                metric: "error_rate",
                value,
                test_rmse: None,
                wall_ms: start.elapsed().as_millis(),
            })
        })
        .collect()
}

fn write_sweep(cfg: &RunConfig, rows: &[MetricRow], extra: &[(&str, String)]) -> CliResult<OutDir> {
    let mut out = OutDir::create(&cfg.out)?;
    let metrics = out.write("metrics.csv", &metrics_csv(rows))?;
    out.write("timings.csv", &timings_csv(rows))?;
    out.write("summary.csv", &summary_csv(&summarize(rows)))?;
    out.write("metadata.txt", &metadata(cfg, extra)?)?;
    let svg = out.root().join("metrics.svg");
    emit_plot_to_file(&metrics, &svg, PlotKind::Auto)?;
    out.record(svg);
    Ok(out)
}

pub fn run_regress1d(cfg: &RunConfig) -> CliResult<OutDir> {
    let rows = compute_regress1d(cfg)?;
    let rmse_note = if cfg.test_grid > 0 {
        format!("training inputs; test_rmse on a {}-point closed grid", cfg.test_grid)
    } else {
        "training inputs".to_string()
    };
    write_sweep(cfg, &rows, &[("target", "sin(4πx)+0.3sin(40πx)+0.1sin(60πx)+0.05sin(80πx)".into()), ("rmse_on", rmse_note)])
}

pub fn run_mnist(cfg: &RunConfig) -> CliResult<OutDir> {
    let rows = compute_mnist(cfg)?;
    write_sweep(
        cfg,
        &rows,
        &[
            ("pixel_scaling", "byte/255".into()),
            ("subsets", "first train_limit / test_limit examples in file order".into()),
        ],
    )
}

/// One network of the spectral demo and its probes on the grid.
#[derive(Debug, Clone)]
pub struct DemoCell {
    /// `adam` or the SWIM schedule name.
    pub schedule: String,
    pub seed: u64,
    pub width: usize,
    /// Probe values per hidden layer, then the network output.
    pub probes: Vec<Vec<f64>>,
    pub spectra: Vec<ProbeSpectrum<f64>>,
    pub grid_rmse: f64,
    pub losses: Vec<f64>,
}

impl DemoCell {
    /// Dominant frequency of each hidden-layer probe, layer 1 first.
    pub fn dominant(&self) -> Vec<f64> {
        self.spectra.iter().map(|s| s.dominant_frequency).collect()
    }
}

#[derive(Debug, Clone)]
pub struct DemoResult {
    pub grid: Vec<f64>,
    pub target: Vec<f64>,
    pub cells: Vec<DemoCell>,
}

/// Probe curves, their spectra and the grid RMSE of one network.
type Probed = (Vec<Vec<f64>>, Vec<ProbeSpectrum<f64>>, f64);

fn probe_cell(net: &Mlp<f64>, grid: &[f64], f: fn(f64) -> f64, hann: bool) -> CliResult<Probed> {
    let x = Matrix::column(grid)?;
    let mut probes: Vec<Vec<f64>> = net.layer_probes(&x)?.iter().map(|p| p.col_to_vec(0)).collect();
    probes.push(net.predict(&x)?.col_to_vec(0));
    let spectra = spectral_profile(net, grid, hann)?;
    Ok((probes, spectra, rmse_on_grid(net, grid, f)?))
}

/// Adam mode trains the sine-tone network; SWIM mode builds one network per
/// schedule on the multi-frequency target. Probes use a half-open grid over
/// the data interval.
pub fn compute_spectral_demo(cfg: &RunConfig) -> CliResult<DemoResult> {
    cfg.validate()?;
    let (lo, hi) = cfg.interval;
    let grid = half_open_grid(lo, hi, cfg.grid);
    let f: fn(f64) -> f64 = match cfg.demo_mode {
        DemoMode::Adam => tone_1d,
        DemoMode::Swim => target_1d,
    };
    let target = grid.iter().map(|&x| f(x)).collect();
    let cells: Vec<DemoCell> = match cfg.demo_mode {
        DemoMode::Adam => {
            let jobs: Vec<(usize, u64)> =
                cfg.widths.iter().flat_map(|&w| cfg.seeds.iter().map(move |&s| (w, s))).collect();
            jobs.par_iter()
                .map(|&(width, seed)| {
                    let data = regress_data(cfg, seed, f)?;
                    let mut rng = Rng::new(cell_seed(seed, "adam", width));
                    let net = Mlp::random_uniform(1, &vec![width; cfg.layers], 1, cfg.activation, &mut rng)?;
                    let tc = TrainConfig { epochs: cfg.epochs, adam: AdamConfig::with_lr(cfg.lr) };
                    let outcome = train(net, &data, &tc)?;
                    let (probes, spectra, grid_rmse) = probe_cell(&outcome.network, &grid, f, cfg.hann)?;
                    Ok(DemoCell { schedule: "adam".into(), seed, width, probes, spectra, grid_rmse, losses: outcome.losses })
                })
                .collect::<CliResult<_>>()?
        }
        DemoMode::Swim => {
            let schedules = cfg.schedules()?;
            let datasets: Vec<(u64, Dataset<f64>)> =
                cfg.seeds.iter().map(|&s| Ok((s, regress_data(cfg, s, f)?))).collect::<CliResult<_>>()?;
            cells(cfg, &schedules)
                .par_iter()
                .map(|c| {
                    let data = &datasets.iter().find(|(s, _)| *s == c.seed).expect("dataset per seed").1;
                    let sc = swim_config(cfg, c.sched, cell_seed(c.seed, c.schedule, c.width));
                    let net = swim_initialize(data, &vec![c.width; cfg.layers], 1, &sc)?;
                    let (probes, spectra, grid_rmse) = probe_cell(&net, &grid, f, cfg.hann)?;
                    Ok(DemoCell {
                        schedule: c.schedule.to_string(),
                        seed: c.seed,
                        width: c.width,
                        probes,
                        spectra,
                        grid_rmse,
                        losses: Vec::new(),
                    })
                })
                .collect::<CliResult<_>>()?
        }
    };
    Ok(DemoResult { grid, target, cells })
}

pub const PROBES_HEADER: &str = "schedule,width,seed,layer,x,value";
pub const SPECTRA_HEADER: &str = "schedule,width,seed,layer,frequency,magnitude";
pub const DOMINANT_HEADER: &str = "schedule,width,seed,layer,dominant_frequency";
pub const DEMO_METRICS_HEADER: &str = "schedule,width,seed,grid_rmse,final_mse";
pub const LOSS_HEADER: &str = "schedule,width,seed,epoch,mse";

fn layer_label(i: usize, hidden: usize) -> String {
    if i < hidden {
        (i + 1).to_string()
    } else {
        "output".into()
    }
}

pub fn run_spectral_demo(cfg: &RunConfig) -> CliResult<OutDir> {
    let res = compute_spectral_demo(cfg)?;
    let mut out = OutDir::create(&cfg.out)?;
    let (mut probes, mut spectra, mut dominant, mut metrics, mut losses) = (
        format!("{PROBES_HEADER}\n"),
        format!("{SPECTRA_HEADER}\n"),
        format!("{DOMINANT_HEADER}\n"),
        format!("{DEMO_METRICS_HEADER}\n"),
        format!("{LOSS_HEADER}\n"),
    );
    for c in &res.cells {
        let tag = format!("{},{},{}", c.schedule, c.width, c.seed);
        for (i, p) in c.probes.iter().enumerate() {
            let layer = layer_label(i, cfg.layers);
            for (x, v) in res.grid.iter().zip(p) {
                writeln!(probes, "{tag},{layer},{x},{v}").unwrap();
            }
        }
        for s in &c.spectra {
            for (f, m) in s.frequencies.iter().zip(&s.magnitudes) {
                writeln!(spectra, "{tag},{},{f},{m}", s.layer).unwrap();
            }
            writeln!(dominant, "{tag},{},{}", s.layer, s.dominant_frequency).unwrap();
        }
        let final_mse = c.losses.last().map(|v| v.to_string()).unwrap_or_default();
        writeln!(metrics, "{tag},{},{final_mse}", c.grid_rmse).unwrap();
        for (e, l) in c.losses.iter().enumerate() {
            writeln!(losses, "{tag},{e},{l}").unwrap();
        }
    }
    for (x, v) in res.grid.iter().zip(&res.target) {
        writeln!(probes, "target,0,0,target,{x},{v}").unwrap();
    }
    let probes_path = out.write("probes.csv", &probes)?;
    out.write("spectra.csv", &spectra)?;
    out.write("dominant.csv", &dominant)?;
    out.write("demo_metrics.csv", &metrics)?;
    if cfg.demo_mode == DemoMode::Adam {
        out.write("loss.csv", &losses)?;
    }
    let init = match cfg.demo_mode {
        DemoMode::Adam => "uniform ±1/sqrt(fan_in) weights and biases; Adam β1=0.9 β2=0.999 ε=1e-8, full batch, MSE",
        DemoMode::Swim => "SWIM sampling, least-squares output layer",
    };
    let target = match cfg.demo_mode {
        DemoMode::Adam => "sin(4πx)",
        DemoMode::Swim => "sin(4πx)+0.3sin(40πx)+0.1sin(60πx)+0.05sin(80πx)",
    };
    let extra = [
        ("target", target.to_string()),
        ("network_init", init.to_string()),
        ("probe_grid", format!("{} points, half-open [{}, {})", cfg.grid, cfg.interval.0, cfg.interval.1)),
        ("spectral_window", if cfg.hann { "hann" } else { "none" }.to_string()),
    ];
    out.write("metadata.txt", &metadata(cfg, &extra)?)?;
    let svg = out.root().join("probes.svg");
    emit_plot_to_file(&probes_path, &svg, PlotKind::Auto)?;
    out.record(svg);
    Ok(out)
}
