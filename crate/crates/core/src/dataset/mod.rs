//! Paired input/target containers and the two benchmark sources: a synthetic
//! multi-frequency 1D function and MNIST read from IDX files.

pub mod idx;

use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rng};
use crate::scalar::Real;

/// Side length of an MNIST digit.
pub const MNIST_SIDE: usize = 28;
pub const MNIST_CLASSES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskKind {
    Regression,
    Classification,
}

#[derive(Debug, Clone)]
pub struct Dataset<T> {
    inputs: Matrix<T>,
    targets: Matrix<T>,
    kind: TaskKind,
    label_names: Option<Vec<String>>,
    source: String,
}

impl<T: Real> Dataset<T> {
    /// Validates row agreement and, for classification, exact one-hot targets.
    pub fn new(inputs: Matrix<T>, targets: Matrix<T>, kind: TaskKind, source: impl Into<String>) -> Result<Self> {
        if inputs.rows() == 0 {
            return Err(Error::invalid("dataset needs at least one row"));
        }
        if inputs.rows() != targets.rows() {
            return Err(Error::dims("Dataset::new", format!("{} target rows", inputs.rows()), targets.rows()));
        }
        if kind == TaskKind::Classification {
            for (i, row) in targets.iter_rows().enumerate() {
                let ones = row.iter().filter(|&&v| v == T::one()).count();
                let zeros = row.iter().filter(|&&v| v == T::zero()).count();
                if ones != 1 || ones + zeros != row.len() {
                    return Err(Error::invalid(format!("classification target row {i} is not one-hot")));
                }
            }
        }
        Ok(Dataset { inputs, targets, kind, label_names: None, source: source.into() })
    }

    pub fn with_label_names(mut self, names: Vec<String>) -> Self {
        self.label_names = Some(names);
        self
    }

    pub fn inputs(&self) -> &Matrix<T> {
        &self.inputs
    }

    pub fn targets(&self) -> &Matrix<T> {
        &self.targets
    }

    pub fn kind(&self) -> TaskKind {
        self.kind
    }

    pub fn label_names(&self) -> Option<&[String]> {
        self.label_names.as_deref()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.inputs.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn input_dim(&self) -> usize {
        self.inputs.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.targets.cols()
    }
}

/// `sin(4πx) + 0.3 sin(40πx) + 0.1 sin(60πx) + 0.05 sin(80πx)`.
pub fn target_1d<T: Real>(x: T) -> T {
    let two_pi = T::TAU();
    let term = |freq: f64, amp: f64| T::lit(amp) * (two_pi * T::lit(freq) * x).sin();
    term(2.0, 1.0) + term(20.0, 0.3) + term(30.0, 0.1) + term(40.0, 0.05)
}

/// `sin(4πx)`, the single-tone target of the gradient-training demo.
pub fn tone_1d<T: Real>(x: T) -> T {
    (T::lit(4.0) * T::PI() * x).sin()
}

/// `n` i.i.d. uniform inputs on `[lo, hi]` with targets `f(x)` evaluated once and stored.
pub fn sample_uniform_fn<T: Real>(n: usize, lo: T, hi: T, f: impl Fn(T) -> T, rng: &mut Rng) -> Result<Dataset<T>> {
    if n == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::invalid(format!("interval [{lo}, {hi}] is empty or non-finite")));
    }
    let xs: Vec<T> = (0..n).map(|_| rng.uniform_in(lo, hi)).collect();
    let ys: Vec<T> = xs.iter().map(|&x| f(x)).collect();
    Dataset::new(
        Matrix::column(&xs)?,
        Matrix::column(&ys)?,
        TaskKind::Regression,
        format!("synthetic uniform[{lo}, {hi}] n={n}"),
    )
}

pub fn sample_uniform_1d<T: Real>(n: usize, lo: T, hi: T, rng: &mut Rng) -> Result<Dataset<T>> {
    sample_uniform_fn(n, lo, hi, target_1d, rng)
}

pub fn one_hot<T: Real>(labels: &[usize], k: usize) -> Result<Matrix<T>> {
    let mut m = Matrix::zeros(labels.len(), k);
    for (i, &l) in labels.iter().enumerate() {
        if l >= k {
            return Err(Error::invalid(format!("label {l} at row {i} outside [0, {k})")));
        }
        m.set(i, l, T::one());
    }
    Ok(m)
}

/// Loads an MNIST split. Pixels become `byte / 255`; targets are one-hot over
/// ten digits. With `limit`, only the first `limit` examples in file order are kept.
pub fn load_mnist_idx<T: Real>(images_path: &Path, labels_path: &Path, limit: Option<usize>) -> Result<Dataset<T>> {
    let images = idx::parse_images(&idx::read_possibly_gzipped(images_path)?)?;
    let labels = idx::parse_labels(&idx::read_possibly_gzipped(labels_path)?)?;
    mnist_from_idx(&images, &labels, limit, &images_path.display().to_string())
}

pub fn mnist_from_idx<T: Real>(images: &IdxImages, labels: &[u8], limit: Option<usize>, source: &str) -> Result<Dataset<T>> {
    if images.rows != MNIST_SIDE || images.cols != MNIST_SIDE {
        return Err(Error::Format {
            kind: "IDX images",
            reason: format!("expected {MNIST_SIDE}x{MNIST_SIDE} images, found {}x{}", images.rows, images.cols),
        });
    }
    if images.count != labels.len() {
        return Err(Error::Format {
            kind: "MNIST",
            reason: format!("{} images but {} labels", images.count, labels.len()),
        });
    }
    let n = limit.map_or(images.count, |l| l.min(images.count));
    if n == 0 {
        return Err(Error::invalid("MNIST split is empty"));
    }
    let d = MNIST_SIDE * MNIST_SIDE;
    let max = T::lit(255.0);
    let pixels: Vec<T> = images.pixels[..n * d].iter().map(|&b| T::from_u8(b).expect("byte") / max).collect();
    let digits: Vec<usize> = labels[..n].iter().map(|&l| l as usize).collect();
    let names = (0..MNIST_CLASSES).map(|c| c.to_string()).collect();
    Ok(Dataset::new(
        Matrix::from_vec(n, d, pixels)?,
        one_hot(&digits, MNIST_CLASSES)?,
        TaskKind::Classification,
        format!("MNIST {source} (first {n})"),
    )?
    .with_label_names(names))
}

pub use idx::IdxImages;
