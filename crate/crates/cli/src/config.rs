//! Run configuration: task defaults, a flat `key = value` file format and
//! command-line overrides, all funnelled through [`RunConfig::set`].
//!
//! Recognised keys (list values are comma separated):
//!
//! | key | meaning |
//! |-----|---------|
//! | `widths` | hidden width sweep, e.g. `64,128,256` |
//! | `layers` | number of hidden layers |
//! | `seeds` | seed list, or a range `a..b` |
//! | `schedule` | modes `ordered,normal,reversed`, or `explicit:v1,v2,...` |
//! | `list_policy` | `linspace`, `first-L` or `last-L` |
//! | `s1_list` | ascending scale list the ordered/reversed schedules are taken from |
//! | `normal_s1` | constant scale of the normal schedule |
//! | `epsilon`, `varsigma` | pair-score floor and candidate oversampling |
//! | `ridge` | `relative:F` (times mean Gram diagonal) or a fixed value |
//! | `activation` | `sin`, `tanh` or `relu` |
//! | `out` | output directory |
//! | `points`, `interval` | 1D sample count and `lo,hi` |
//! | `test_grid` | extra dense-grid RMSE with this many points (0 = off) |
//! | `mnist_dir`, `train_limit`, `test_limit` | MNIST location and subset sizes |
//! | `demo_mode` | `adam` or `swim` |
//! | `epochs`, `lr` | Adam settings |
//! | `grid` | probe grid size |
//! | `hann` | window probe signals before the DFT |

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use swim_core::network::Activation;
use swim_core::swim::{ListPolicy, Ridge, ScaleSchedule, ScheduleMode};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Regress1d,
    Mnist,
    SpectralDemo,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Regress1d => "regress1d",
            Task::Mnist => "mnist",
            Task::SpectralDemo => "spectral-demo",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemoMode {
    Adam,
    Swim,
}

impl DemoMode {
    pub fn name(self) -> &'static str {
        match self {
            DemoMode::Adam => "adam",
            DemoMode::Swim => "swim",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleChoice {
    Modes(Vec<ScheduleMode>),
    Explicit(Vec<f64>),
}

impl fmt::Display for ScheduleChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleChoice::Modes(m) => f.write_str(&join(m)),
            ScheduleChoice::Explicit(v) => write!(f, "explicit:{}", join(v)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub task: Task,
    pub widths: Vec<usize>,
    pub layers: usize,
    pub seeds: Vec<u64>,
    pub schedule: ScheduleChoice,
    pub list_policy: ListPolicy,
    pub s1_list: Vec<f64>,
    pub normal_s1: f64,
    pub epsilon: f64,
    pub varsigma: usize,
    pub ridge: Ridge<f64>,
    pub activation: Activation,
    pub out: PathBuf,
    pub points: usize,
    pub interval: (f64, f64),
    pub test_grid: usize,
    pub mnist_dir: PathBuf,
    pub train_limit: usize,
    pub test_limit: usize,
    pub demo_mode: DemoMode,
    pub epochs: usize,
    pub lr: f64,
    pub grid: usize,
    pub hann: bool,
}

const ALL_MODES: [ScheduleMode; 3] = [ScheduleMode::Ordered, ScheduleMode::Normal, ScheduleMode::Reversed];

impl RunConfig {
    /// Default experiment setting of each task.
    pub fn defaults(task: Task) -> Self {
        let base = RunConfig {
            task,
            widths: vec![64, 128, 256, 512, 1024],
            layers: 3,
            seeds: (0..5).collect(),
            schedule: ScheduleChoice::Modes(ALL_MODES.to_vec()),
            list_policy: ListPolicy::Linspace,
            s1_list: vec![0.5, 7.0, 13.5, 20.0],
            normal_s1: 3f64.ln(),
            epsilon: 0.01,
            varsigma: 10,
            ridge: Ridge::Relative(swim_core::linalg::DEFAULT_RELATIVE_RIDGE),
            activation: Activation::Sin,
            out: PathBuf::from(format!("runs/{task}")),
            points: 200,
            interval: (0.0, 2.0),
            test_grid: 0,
            mnist_dir: PathBuf::from("data/mnist"),
            train_limit: 5000,
            test_limit: 1000,
            demo_mode: DemoMode::Adam,
            epochs: 1000,
            lr: 0.01,
            grid: 512,
            hann: false,
        };
        match task {
            Task::Regress1d => base,
            Task::Mnist => RunConfig {
                widths: vec![256, 512, 1024],
                s1_list: vec![0.01, 0.173, 0.337, 0.5],
                ..base
            },
            Task::SpectralDemo => RunConfig { widths: vec![124], interval: (0.0, 1.0), ..base },
        }
    }

    /// Switches the spectral demo to SWIM mode with its own defaults
    /// (multi-frequency target on `[0, 2]`, width 1024). Fields set later still win.
    pub fn set_demo_mode(&mut self, mode: DemoMode) {
        self.demo_mode = mode;
        match mode {
            DemoMode::Adam => {
                self.widths = vec![124];
                self.interval = (0.0, 1.0);
            }
            DemoMode::Swim => {
                self.widths = vec![1024];
                self.interval = (0.0, 2.0);
            }
        }
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        let bad = |what: &str| CliError::Validation(format!("{key} = '{value}': {what}"));
        match key.as_str() {
            "widths" => self.widths = parse_list(value).map_err(|e| bad(&e))?,
            "layers" => self.layers = parse(value).map_err(|e| bad(&e))?,
            "seeds" => self.seeds = parse_seeds(value).map_err(|e| bad(&e))?,
            "schedule" => {
                self.schedule = if let Some(list) = value.strip_prefix("explicit:") {
                    ScheduleChoice::Explicit(parse_list(list).map_err(|e| bad(&e))?)
                } else {
                    let modes: Vec<ScheduleMode> = parse_list(value).map_err(|e| bad(&e))?;
                    if modes.contains(&ScheduleMode::Explicit) {
                        return Err(bad("explicit schedules are written explicit:v1,v2,..."));
                    }
                    ScheduleChoice::Modes(modes)
                }
            }
            "list_policy" => self.list_policy = parse(value).map_err(|e| bad(&e))?,
            "s1_list" => self.s1_list = parse_list(value).map_err(|e| bad(&e))?,
            "normal_s1" => self.normal_s1 = parse(value).map_err(|e| bad(&e))?,
            "epsilon" => self.epsilon = parse(value).map_err(|e| bad(&e))?,
            "varsigma" => self.varsigma = parse(value).map_err(|e| bad(&e))?,
            "ridge" => {
                self.ridge = match value.strip_prefix("relative:") {
                    Some(f) => Ridge::Relative(parse(f).map_err(|e| bad(&e))?),
                    None => Ridge::Fixed(parse(value).map_err(|e| bad(&e))?),
                }
            }
            "activation" => self.activation = parse(value).map_err(|e| bad(&e))?,
            "out" => self.out = PathBuf::from(value),
            "points" => self.points = parse(value).map_err(|e| bad(&e))?,
            "interval" => {
                let v: Vec<f64> = parse_list(value).map_err(|e| bad(&e))?;
                match v[..] {
                    [lo, hi] => self.interval = (lo, hi),
                    _ => return Err(bad("expected lo,hi")),
                }
            }
            "test_grid" => self.test_grid = parse(value).map_err(|e| bad(&e))?,
            "mnist_dir" => self.mnist_dir = PathBuf::from(value),
            "train_limit" => self.train_limit = parse(value).map_err(|e| bad(&e))?,
            "test_limit" => self.test_limit = parse(value).map_err(|e| bad(&e))?,
            "demo_mode" => match value {
                "adam" => self.set_demo_mode(DemoMode::Adam),
                "swim" => self.set_demo_mode(DemoMode::Swim),
                _ => return Err(bad("expected adam or swim")),
            },
            "epochs" => self.epochs = parse(value).map_err(|e| bad(&e))?,
            "lr" => self.lr = parse(value).map_err(|e| bad(&e))?,
            "grid" => self.grid = parse(value).map_err(|e| bad(&e))?,
            "hann" => self.hann = parse(value).map_err(|e| bad(&e))?,
            _ => return Err(CliError::Validation(format!("unknown configuration key '{key}'"))),
        }
        Ok(())
    }

    /// Applies a config file: one `key = value` per line, `#` comments,
    /// blank lines ignored. `demo_mode` is applied first so that its defaults
    /// never override other lines of the same file.
    pub fn apply_file_text(&mut self, text: &str) -> CliResult<()> {
        let mut pairs = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Validation(format!("config line {}: expected key = value, got '{line}'", n + 1)))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        self.apply_pairs(&pairs)
    }

    /// Applies settings in order, with any `demo_mode` moved to the front.
    pub fn apply_pairs(&mut self, pairs: &[(String, String)]) -> CliResult<()> {
        let is_mode = |k: &str| k.trim().replace('-', "_") == "demo_mode";
        for (k, v) in pairs.iter().filter(|(k, _)| is_mode(k)) {
            self.set(k, v)?;
        }
        for (k, v) in pairs.iter().filter(|(k, _)| !is_mode(k)) {
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> CliResult<()> {
        let fail = |m: String| Err(CliError::Validation(m));
        if self.seeds.is_empty() {
            return fail("at least one seed is required".into());
        }
        if self.widths.is_empty() || self.widths.contains(&0) {
            return fail(format!("widths must be a non-empty list of positive integers, got {:?}", self.widths));
        }
        if self.layers == 0 {
            return fail("layers must be at least 1".into());
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return fail(format!("epsilon must be finite and >= 0, got {}", self.epsilon));
        }
        if self.varsigma == 0 {
            return fail("varsigma must be at least 1".into());
        }
        match self.ridge {
            Ridge::Fixed(r) | Ridge::Relative(r) if !(r >= 0.0 && r.is_finite()) => {
                return fail(format!("ridge must be finite and >= 0, got {r}"));
            }
            _ => {}
        }
        let (lo, hi) = self.interval;
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return fail(format!("interval [{lo}, {hi}] is empty"));
        }
        if self.points < 2 {
            return fail("points must be at least 2".into());
        }
        if self.test_grid == 1 {
            return fail("test_grid needs at least 2 points (0 disables it)".into());
        }
        if self.task == Task::Mnist && (self.train_limit < 2 || self.test_limit == 0) {
            return fail("train_limit must be >= 2 and test_limit >= 1".into());
        }
        if self.task == Task::SpectralDemo {
            if self.grid < swim_core::spectral::MIN_SIGNAL_LEN {
                return fail(format!("grid must have at least {} points", swim_core::spectral::MIN_SIGNAL_LEN));
            }
            if !(self.lr > 0.0 && self.lr.is_finite()) {
                return fail(format!("lr must be positive, got {}", self.lr));
            }
        }
        if let ScheduleChoice::Modes(m) = &self.schedule {
            if m.is_empty() {
                return fail("schedule list is empty".into());
            }
        }
        // building every schedule surfaces bad scale lists before any work starts
        self.schedules().map(|_| ())
    }

    /// `(label, schedule)` for every requested schedule.
    pub fn schedules(&self) -> CliResult<Vec<(String, ScaleSchedule<f64>)>> {
        let l = self.layers;
        match &self.schedule {
            ScheduleChoice::Explicit(v) => {
                if v.len() != l {
                    return Err(CliError::Validation(format!(
                        "explicit schedule has {} values for {l} hidden layers",
                        v.len()
                    )));
                }
                Ok(vec![("explicit".into(), ScaleSchedule::explicit(v.clone())?)])
            }
            ScheduleChoice::Modes(modes) => modes
                .iter()
                .map(|&m| {
                    let s = match m {
                        ScheduleMode::Normal => ScaleSchedule::make(m, self.normal_s1, self.normal_s1, l)?,
                        _ => ScaleSchedule::from_list(m, &self.s1_list, self.list_policy, l)?,
                    };
                    Ok((m.name().to_string(), s))
                })
                .collect(),
        }
    }

    /// Every setting as `key = value` lines, in a fixed order.
    pub fn describe(&self) -> Vec<(String, String)> {
        let ridge = match self.ridge {
            Ridge::Relative(f) => format!("relative:{f}"),
            Ridge::Fixed(r) => format!("{r}"),
        };
        let mut v = vec![
            ("task", self.task.to_string()),
            ("widths", join(&self.widths)),
            ("layers", self.layers.to_string()),
            ("seeds", join(&self.seeds)),
            ("schedule", self.schedule.to_string()),
            ("list_policy", self.list_policy.to_string()),
            ("s1_list", join(&self.s1_list)),
            ("normal_s1", self.normal_s1.to_string()),
            ("epsilon", self.epsilon.to_string()),
            ("varsigma", self.varsigma.to_string()),
            ("ridge", ridge),
            ("activation", self.activation.to_string()),
            ("out", self.out.display().to_string()),
        ];
        match self.task {
            Task::Regress1d => v.extend([
                ("points", self.points.to_string()),
                ("interval", format!("{},{}", self.interval.0, self.interval.1)),
                ("test_grid", self.test_grid.to_string()),
            ]),
            Task::Mnist => v.extend([
                ("mnist_dir", self.mnist_dir.display().to_string()),
                ("train_limit", self.train_limit.to_string()),
                ("test_limit", self.test_limit.to_string()),
            ]),
            Task::SpectralDemo => v.extend([
                ("demo_mode", self.demo_mode.name().to_string()),
                ("points", self.points.to_string()),
                ("interval", format!("{},{}", self.interval.0, self.interval.1)),
                ("epochs", self.epochs.to_string()),
                ("lr", self.lr.to_string()),
                ("grid", self.grid.to_string()),
                ("hann", self.hann.to_string()),
            ]),
        }
        v.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }
}

fn parse<T: FromStr>(s: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    s.trim().parse::<T>().map_err(|e| e.to_string())
}

fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    let v: Vec<T> = s.split(',').filter(|p| !p.trim().is_empty()).map(parse).collect::<Result<_, _>>()?;
    if v.is_empty() {
        return Err("empty list".into());
    }
    Ok(v)
}

fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b): (u64, u64) = (parse(a)?, parse(b)?);
            if a >= b {
                return Err("empty seed range".into());
            }
            Ok((a..b).collect())
        }
        None => parse_list(s),
    }
}

pub fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}
