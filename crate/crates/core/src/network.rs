//! Fully connected networks with the subtracted-bias convention
//! `Φ⁽ˡ⁾ = φ(Φ⁽ˡ⁻¹⁾ Wₗᵀ − bₗ)` and a purely affine output layer.
//!
//! # Serialized layout (version 1)
//!
//! ```text
//! offset  size  field
//! 0       4     magic "SWNN"
//! 4       1     format version (1)
//! 5       1     scalar width in bytes (4 = f32, 8 = f64)
//! 6       1     activation tag (0 = sin, 1 = tanh, 2 = relu)
//! 7       1     reserved, 0
//! 8       4     input dimension, u32 little-endian
//! 12      4     number of affine layers n (hidden layers + output), u32 LE
//! 16      4n    output width of each affine layer, u32 LE
//! ...           per layer: weights row-major (out x in), then bias (out),
//!               each scalar little-endian
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rng};
use crate::scalar::Real;

const MAGIC: &[u8; 4] = b"SWNN";
pub const FORMAT_VERSION: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Activation {
    Sin,
    Tanh,
    Relu,
}

impl Activation {
    #[inline]
    pub fn apply<T: Real>(self, z: T) -> T {
        match self {
            Activation::Sin => z.sin(),
            Activation::Tanh => z.tanh(),
            Activation::Relu => z.max(T::zero()),
        }
    }

    /// Derivative at `z`; relu uses 0 at the kink.
    #[inline]
    pub fn derivative<T: Real>(self, z: T) -> T {
        match self {
            Activation::Sin => z.cos(),
            Activation::Tanh => {
                let t = z.tanh();
                T::one() - t * t
            }
            Activation::Relu => {
                if z > T::zero() {
                    T::one()
                } else {
                    T::zero()
                }
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Sin => "sin",
            Activation::Tanh => "tanh",
            Activation::Relu => "relu",
        }
    }

    fn tag(self) -> u8 {
        match self {
            Activation::Sin => 0,
            Activation::Tanh => 1,
            Activation::Relu => 2,
        }
    }

    fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(Activation::Sin),
            1 => Ok(Activation::Tanh),
            2 => Ok(Activation::Relu),
            t => Err(Error::Format { kind: "network", reason: format!("unknown activation tag {t}") }),
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sin" => Ok(Activation::Sin),
            "tanh" => Ok(Activation::Tanh),
            "relu" => Ok(Activation::Relu),
            other => Err(Error::invalid(format!("unknown activation '{other}' (expected sin, tanh or relu)"))),
        }
    }
}

/// One affine map `x ↦ W x − b`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer<T> {
    /// `out x in`.
    pub weights: Matrix<T>,
    pub bias: Vec<T>,
}

impl<T: Real> DenseLayer<T> {
    pub fn new(weights: Matrix<T>, bias: Vec<T>) -> Result<Self> {
        if bias.len() != weights.rows() {
            return Err(Error::dims("DenseLayer::new", format!("{} biases", weights.rows()), bias.len()));
        }
        Ok(DenseLayer { weights, bias })
    }

    pub fn in_dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn out_dim(&self) -> usize {
        self.weights.rows()
    }

    /// `input Wᵀ − b`, rows are samples.
    pub fn affine(&self, input: &Matrix<T>) -> Result<Matrix<T>> {
        let mut z = input.matmul_t(&self.weights)?;
        z.sub_row_vector(&self.bias)?;
        Ok(z)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp<T> {
    input_dim: usize,
    /// Hidden layers followed by the output layer.
    layers: Vec<DenseLayer<T>>,
    activation: Activation,
}

/// Per-layer activations of a batch: `activations[0]` is the input itself and
/// `activations[l]` is `Φ⁽ˡ⁾` for hidden layer `l`.
#[derive(Debug, Clone)]
pub struct ForwardCache<T> {
    pub activations: Vec<Matrix<T>>,
    /// Pre-activations `Zₗ` of the hidden layers (index `l - 1`), kept only when requested.
    pub pre_activations: Vec<Matrix<T>>,
    pub output: Matrix<T>,
}

impl<T: Real> ForwardCache<T> {
    /// `Φ⁽ᴸ⁾`.
    pub fn last_hidden(&self) -> &Matrix<T> {
        self.activations.last().expect("input is always cached")
    }
}

impl<T: Real> Mlp<T> {
    pub fn new(input_dim: usize, layers: Vec<DenseLayer<T>>, activation: Activation) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::invalid("a network needs at least an output layer"));
        }
        let mut prev = input_dim;
        for (i, layer) in layers.iter().enumerate() {
            if layer.in_dim() != prev {
                return Err(Error::dims("Mlp::new", format!("layer {} input width {prev}", i + 1), layer.in_dim()));
            }
            if layer.out_dim() == 0 {
                return Err(Error::invalid(format!("layer {} has zero width", i + 1)));
            }
            if !layer.weights.is_finite() || layer.bias.iter().any(|b| !b.is_finite()) {
                return Err(Error::NonFinite(format!("parameters of layer {}", i + 1)));
            }
            prev = layer.out_dim();
        }
        Ok(Mlp { input_dim, layers, activation })
    }

    pub fn zeros(input_dim: usize, hidden_widths: &[usize], output_dim: usize, activation: Activation) -> Result<Self> {
        let layers = chain(input_dim, hidden_widths, output_dim)
            .map(|(i, o)| DenseLayer { weights: Matrix::zeros(o, i), bias: vec![T::zero(); o] })
            .collect();
        Self::new(input_dim, layers, activation)
    }

    /// Every weight and bias uniform in `[-1/√fan_in, 1/√fan_in]`.
    pub fn random_uniform(
        input_dim: usize,
        hidden_widths: &[usize],
        output_dim: usize,
        activation: Activation,
        rng: &mut Rng,
    ) -> Result<Self> {
        let layers = chain(input_dim, hidden_widths, output_dim)
            .map(|(i, o)| {
                let bound = T::one() / T::from_usize_lossy(i).sqrt();
                let weights = Matrix::from_fn(o, i, |_, _| rng.uniform_in(-bound, bound));
                let bias = (0..o).map(|_| rng.uniform_in(-bound, bound)).collect();
                DenseLayer { weights, bias }
            })
            .collect();
        Self::new(input_dim, layers, activation)
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_layer().out_dim()
    }

    pub fn num_hidden(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn hidden_widths(&self) -> Vec<usize> {
        self.layers[..self.num_hidden()].iter().map(DenseLayer::out_dim).collect()
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn layers(&self) -> &[DenseLayer<T>] {
        &self.layers
    }

    /// Hidden layer `l` for `1 ≤ l ≤ L`, or the output layer for `l = L + 1`.
    pub fn layer(&self, l: usize) -> &DenseLayer<T> {
        &self.layers[l - 1]
    }

    pub fn output_layer(&self) -> &DenseLayer<T> {
        self.layers.last().expect("validated non-empty")
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [DenseLayer<T>] {
        &mut self.layers
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.as_slice().len() + l.bias.len()).sum()
    }

    pub fn forward(&self, x: &Matrix<T>) -> Result<ForwardCache<T>> {
        self.forward_impl(x, false)
    }

    pub(crate) fn forward_impl(&self, x: &Matrix<T>, keep_pre: bool) -> Result<ForwardCache<T>> {
        if x.cols() != self.input_dim {
            return Err(Error::dims("forward", format!("{} input columns", self.input_dim), x.cols()));
        }
        let mut activations = Vec::with_capacity(self.layers.len());
        let mut pre_activations = Vec::new();
        activations.push(x.clone());
        for (i, layer) in self.layers[..self.num_hidden()].iter().enumerate() {
            let z = layer.affine(activations.last().expect("non-empty"))?;
            let phi = z.map(|v| self.activation.apply(v));
            if let Some((r, c)) = phi.first_non_finite() {
                return Err(Error::NonFinite(format!("hidden layer {} activation at ({r}, {c})", i + 1)));
            }
            if keep_pre {
                pre_activations.push(z);
            }
            activations.push(phi);
        }
        let output = self.output_layer().affine(activations.last().expect("non-empty"))?;
        if let Some((r, c)) = output.first_non_finite() {
            return Err(Error::NonFinite(format!("output layer {} at ({r}, {c})", self.layers.len())));
        }
        Ok(ForwardCache { activations, pre_activations, output })
    }

    pub fn predict(&self, x: &Matrix<T>) -> Result<Matrix<T>> {
        Ok(self.forward(x)?.output)
    }

    /// Output layer applied directly to hidden layer `l`: `Φ⁽ˡ⁾ W_{L+1}ᵀ − b_{L+1}`.
    ///
    /// Requires equal hidden widths. At `l = L` this is the network output.
    pub fn layer_probe(&self, x: &Matrix<T>, l: usize) -> Result<Matrix<T>> {
        self.check_probe_shape()?;
        if l == 0 || l > self.num_hidden() {
            return Err(Error::invalid(format!("probe layer {l} outside 1..={}", self.num_hidden())));
        }
        let cache = self.forward(x)?;
        self.output_layer().affine(&cache.activations[l])
    }

    /// Probes for every hidden layer `1..=L`, sharing one forward pass.
    pub fn layer_probes(&self, x: &Matrix<T>) -> Result<Vec<Matrix<T>>> {
        self.check_probe_shape()?;
        let cache = self.forward(x)?;
        (1..=self.num_hidden()).map(|l| self.output_layer().affine(&cache.activations[l])).collect()
    }

    fn check_probe_shape(&self) -> Result<()> {
        let widths = self.hidden_widths();
        if widths.is_empty() {
            return Err(Error::invalid("network has no hidden layer to probe"));
        }
        if widths.iter().any(|&w| w != widths[0]) {
            return Err(Error::invalid(format!("layer probes need equal hidden widths, got {widths:?}")));
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + self.layers.len() * 4 + self.parameter_count() * T::BYTES);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&[FORMAT_VERSION, T::BYTES as u8, self.activation.tag(), 0]);
        out.extend_from_slice(&(self.input_dim as u32).to_le_bytes());
        out.extend_from_slice(&(self.layers.len() as u32).to_le_bytes());
        for l in &self.layers {
            out.extend_from_slice(&(l.out_dim() as u32).to_le_bytes());
        }
        for l in &self.layers {
            for &w in l.weights.as_slice() {
                w.to_le_bytes_vec(&mut out);
            }
            for &b in &l.bias {
                b.to_le_bytes_vec(&mut out);
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |reason: String| Error::Format { kind: "network", reason };
        if bytes.len() < 16 || &bytes[..4] != MAGIC {
            return Err(bad("missing SWNN header".into()));
        }
        if bytes[4] != FORMAT_VERSION {
            return Err(bad(format!("unsupported format version {}", bytes[4])));
        }
        if bytes[5] as usize != T::BYTES {
            return Err(bad(format!("stored scalars are {} bytes, reading as {}", bytes[5], T::NAME)));
        }
        let activation = Activation::from_tag(bytes[6])?;
        let u32_at = |at: usize| -> Result<usize> {
            bytes
                .get(at..at + 4)
                .map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as usize)
                .ok_or_else(|| bad("truncated header".into()))
        };
        let input_dim = u32_at(8)?;
        let n_layers = u32_at(12)?;
        let widths = (0..n_layers).map(|i| u32_at(16 + 4 * i)).collect::<Result<Vec<_>>>()?;
        let mut pos = 16 + 4 * n_layers;
        let mut layers = Vec::with_capacity(n_layers);
        let mut prev = input_dim;
        for &w in &widths {
            let n = w * prev + w;
            let end = pos + n * T::BYTES;
            let chunk = bytes.get(pos..end).ok_or_else(|| bad("truncated parameters".into()))?;
            let vals: Vec<T> = chunk.chunks_exact(T::BYTES).map(T::from_le_slice).collect();
            let (wv, bv) = vals.split_at(w * prev);
            layers.push(DenseLayer::new(Matrix::from_vec(w, prev, wv.to_vec())?, bv.to_vec())?);
            pos = end;
            prev = w;
        }
        if pos != bytes.len() {
            return Err(bad(format!("{} trailing bytes", bytes.len() - pos)));
        }
        Self::new(input_dim, layers, activation)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

fn chain(input_dim: usize, hidden: &[usize], output_dim: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
    let dims: Vec<usize> = std::iter::once(input_dim).chain(hidden.iter().copied()).chain(std::iter::once(output_dim)).collect();
    (0..dims.len() - 1).map(move |i| (dims[i], dims[i + 1]))
}

/// Root mean squared difference over every entry.
pub fn rmse<T: Real>(pred: &Matrix<T>, target: &Matrix<T>) -> Result<T> {
    if pred.shape() != target.shape() {
        return Err(Error::dims("rmse", format!("{:?}", target.shape()), format!("{:?}", pred.shape())));
    }
    let n = pred.as_slice().len();
    if n == 0 {
        return Err(Error::invalid("rmse of an empty matrix"));
    }
    let sse = pred.as_slice().iter().zip(target.as_slice()).fold(T::zero(), |acc, (&p, &t)| acc + (p - t) * (p - t));
    Ok((sse / T::from_usize_lossy(n)).sqrt())
}

/// Index of the first maximum.
pub fn argmax<T: Real>(row: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = i;
        }
    }
    best
}

/// Fraction of rows whose argmax differs from the target's argmax (ties go to the lowest index).
pub fn error_rate<T: Real>(pred: &Matrix<T>, one_hot_targets: &Matrix<T>) -> Result<f64> {
    if pred.shape() != one_hot_targets.shape() {
        return Err(Error::dims("error_rate", format!("{:?}", one_hot_targets.shape()), format!("{:?}", pred.shape())));
    }
    if pred.cols() < 2 {
        return Err(Error::invalid("error rate needs at least two classes"));
    }
    if pred.rows() == 0 {
        return Err(Error::invalid("error rate of an empty batch"));
    }
    let wrong = pred.iter_rows().zip(one_hot_targets.iter_rows()).filter(|(p, t)| argmax(p) != argmax(t)).count();
    Ok(wrong as f64 / pred.rows() as f64)
}
