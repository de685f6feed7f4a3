use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScheduleMode {
    /// `s1` grows with depth.
    Ordered,
    /// Constant `s1` in every layer.
    Normal,
    /// `s1` shrinks with depth.
    Reversed,
    /// Caller-supplied per-layer values.
    Explicit,
}

impl ScheduleMode {
    pub fn name(self) -> &'static str {
        match self {
            ScheduleMode::Ordered => "ordered",
            ScheduleMode::Normal => "normal",
            ScheduleMode::Reversed => "reversed",
            ScheduleMode::Explicit => "explicit",
        }
    }
}

impl fmt::Display for ScheduleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScheduleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ordered" => Ok(ScheduleMode::Ordered),
            "normal" => Ok(ScheduleMode::Normal),
            "reversed" => Ok(ScheduleMode::Reversed),
            "explicit" => Ok(ScheduleMode::Explicit),
            other => Err(Error::invalid(format!("unknown schedule mode '{other}'"))),
        }
    }
}

/// How a listed sequence of scales with more entries than hidden layers is
/// mapped onto `L` layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ListPolicy {
    /// Keep the first and last entries as endpoints and space `L` values evenly between them.
    Linspace,
    /// Keep the first `L` entries.
    FirstL,
    /// Keep the last `L` entries.
    LastL,
}

impl ListPolicy {
    pub fn name(self) -> &'static str {
        match self {
            ListPolicy::Linspace => "linspace",
            ListPolicy::FirstL => "first-L",
            ListPolicy::LastL => "last-L",
        }
    }
}

impl fmt::Display for ListPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ListPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linspace" => Ok(ListPolicy::Linspace),
            "first-l" | "first_l" | "firstl" => Ok(ListPolicy::FirstL),
            "last-l" | "last_l" | "lastl" => Ok(ListPolicy::LastL),
            other => Err(Error::invalid(format!("unknown list policy '{other}' (expected linspace, first-L or last-L)"))),
        }
    }
}

/// Per-hidden-layer scale factors `(s1, s2)`.
///
/// `s1[l]` sets how far apart the two sampled points of a node land on the
/// activation's argument axis; `s2[l]` shifts the bias.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleSchedule<T> {
    s1: Vec<T>,
    s2: Vec<T>,
    mode: ScheduleMode,
}

impl<T: Real> ScaleSchedule<T> {
    /// Ordered: `layers` evenly spaced values from `s_min` to `s_max` inclusive
    /// (a single layer gets `s_min`). Reversed: the same values, deepest first.
    /// Normal: `s_min` everywhere. Always `s2 = s1 / 2`.
    pub fn make(mode: ScheduleMode, s_min: T, s_max: T, layers: usize) -> Result<Self> {
        if layers == 0 {
            return Err(Error::invalid("a schedule needs at least one layer"));
        }
        let s1 = match mode {
            ScheduleMode::Normal => vec![s_min; layers],
            ScheduleMode::Ordered | ScheduleMode::Reversed => {
                if s_min > s_max {
                    return Err(Error::invalid(format!("s_min {s_min} exceeds s_max {s_max}")));
                }
                let mut v = linspace(s_min, s_max, layers);
                if mode == ScheduleMode::Reversed {
                    v.reverse();
                }
                v
            }
            ScheduleMode::Explicit => {
                return Err(Error::invalid("explicit schedules are built from a value list"));
            }
        };
        Self::validated(s1, None, mode)
    }

    /// Raw per-layer `s1` values with `s2 = s1 / 2`.
    pub fn explicit(s1: Vec<T>) -> Result<Self> {
        Self::validated(s1, None, ScheduleMode::Explicit)
    }

    /// Raw per-layer `s1` and `s2`.
    pub fn explicit_with_s2(s1: Vec<T>, s2: Vec<T>) -> Result<Self> {
        Self::validated(s1, Some(s2), ScheduleMode::Explicit)
    }

    /// Maps an ascending list of scales onto `layers` layers according to
    /// `policy`. For `Reversed` the policy is applied to the ascending list and
    /// the result is reversed, so ordered and reversed use the same scales.
    pub fn from_list(mode: ScheduleMode, ascending: &[T], policy: ListPolicy, layers: usize) -> Result<Self> {
        if !matches!(mode, ScheduleMode::Ordered | ScheduleMode::Reversed) {
            return Err(Error::invalid(format!("list policies apply to ordered/reversed, not {mode}")));
        }
        if ascending.is_empty() {
            return Err(Error::invalid("empty scale list"));
        }
        if ascending.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("scale list must be non-decreasing"));
        }
        if layers == 0 {
            return Err(Error::invalid("a schedule needs at least one layer"));
        }
        let pick = |name: &str| -> Result<()> {
            if ascending.len() < layers {
                Err(Error::invalid(format!(
                    "{name} needs at least {layers} listed values, got {}",
                    ascending.len()
                )))
            } else {
                Ok(())
            }
        };
        let mut s1 = match policy {
            ListPolicy::Linspace => linspace(ascending[0], *ascending.last().expect("non-empty"), layers),
            ListPolicy::FirstL => {
                pick("first-L")?;
                ascending[..layers].to_vec()
            }
            ListPolicy::LastL => {
                pick("last-L")?;
                ascending[ascending.len() - layers..].to_vec()
            }
        };
        if mode == ScheduleMode::Reversed {
            s1.reverse();
        }
        Self::validated(s1, None, mode)
    }

    fn validated(s1: Vec<T>, s2: Option<Vec<T>>, mode: ScheduleMode) -> Result<Self> {
        if s1.is_empty() {
            return Err(Error::invalid("a schedule needs at least one layer"));
        }
        if let Some((i, v)) = s1.iter().enumerate().find(|(_, v)| !(**v > T::zero()) || !v.is_finite()) {
            return Err(Error::invalid(format!("s1[{i}] = {v} must be positive and finite")));
        }
        let s2 = match s2 {
            Some(s2) => {
                if s2.len() != s1.len() {
                    return Err(Error::dims("ScaleSchedule", format!("{} s2 values", s1.len()), s2.len()));
                }
                if s2.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite("s2".into()));
                }
                s2
            }
            None => s1.iter().map(|&v| v / T::lit(2.0)).collect(),
        };
        Ok(ScaleSchedule { s1, s2, mode })
    }

    pub fn len(&self) -> usize {
        self.s1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s1.is_empty()
    }

    pub fn mode(&self) -> ScheduleMode {
        self.mode
    }

    pub fn s1(&self) -> &[T] {
        &self.s1
    }

    pub fn s2(&self) -> &[T] {
        &self.s2
    }

    /// `(s1, s2)` of hidden layer `l` (1-based).
    pub fn scales(&self, l: usize) -> (T, T) {
        (self.s1[l - 1], self.s2[l - 1])
    }
}

pub fn make_schedule<T: Real>(mode: ScheduleMode, s_min: T, s_max: T, layers: usize) -> Result<ScaleSchedule<T>> {
    ScaleSchedule::make(mode, s_min, s_max, layers)
}

fn linspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    if n == 1 {
        return vec![lo];
    }
    let span = hi - lo;
    let steps = T::from_usize_lossy(n - 1);
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + span * T::from_usize_lossy(i) / steps })
        .collect()
}
