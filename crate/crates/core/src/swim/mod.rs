//! Data-driven network construction without gradient descent.
//!
//! Each hidden node is built from a pair of training points. For hidden layer
//! `l`, candidate pairs are drawn uniformly, each pair is scored by how much the
//! target changes relative to the distance between the pair's layer-`(l-1)`
//! features, and `N_l` pairs are then drawn with probability proportional to the
//! score. A node's weight points from the first feature vector to the second,
//! scaled by `s1[l]` over the squared distance, and its bias places the first
//! point at pre-activation `−s2[l]`. Only the output layer is fit, by least
//! squares on the last hidden layer's activations.

mod pairs;
mod schedule;

pub use pairs::{candidate_count, construct_node_params, generate_candidates, pair_weights, CandidatePair, REJECTION_FACTOR};
pub use schedule::{make_schedule, ListPolicy, ScaleSchedule, ScheduleMode};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{default_relative_ridge, gram_scale, least_squares, weighted_sample_with_replacement, Matrix, Rng};
use crate::network::{Activation, DenseLayer, ForwardCache, Mlp};
use crate::scalar::Real;

/// Regularisation of the output-layer fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ridge<T> {
    Fixed(T),
    /// Factor times the mean diagonal of `ΦᵀΦ / M`.
    Relative(T),
}

impl<T: Real> Ridge<T> {
    pub fn resolve(self, features: &Matrix<T>) -> T {
        match self {
            Ridge::Fixed(r) => r,
            Ridge::Relative(f) => f * gram_scale(features),
        }
    }
}

impl<T: Real> Default for Ridge<T> {
    fn default() -> Self {
        Ridge::Relative(default_relative_ridge())
    }
}

#[derive(Debug, Clone)]
pub struct SwimConfig<T> {
    /// Distance floor in the pair score from layer 2 on.
    pub epsilon: T,
    /// Candidate oversampling factor.
    pub varsigma: usize,
    pub schedule: ScaleSchedule<T>,
    pub activation: Activation,
    pub ridge: Ridge<T>,
    pub seed: u64,
}

impl<T: Real> SwimConfig<T> {
    /// `ε = 0.01`, `ς = 10`, sine activation, default relative ridge.
    pub fn new(schedule: ScaleSchedule<T>, seed: u64) -> Self {
        SwimConfig {
            epsilon: T::lit(0.01),
            varsigma: 10,
            schedule,
            activation: Activation::Sin,
            ridge: Ridge::default(),
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon >= T::zero()) || !self.epsilon.is_finite() {
            return Err(Error::invalid(format!("epsilon must be finite and >= 0, got {}", self.epsilon)));
        }
        if self.varsigma == 0 {
            return Err(Error::invalid("varsigma must be at least 1"));
        }
        let r = match self.ridge {
            Ridge::Fixed(r) | Ridge::Relative(r) => r,
        };
        if !(r >= T::zero()) || !r.is_finite() {
            return Err(Error::invalid(format!("ridge must be finite and >= 0, got {r}")));
        }
        Ok(())
    }
}

/// Which pair built each node of one hidden layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerTrace<T> {
    pub candidates: usize,
    /// `(idx1, idx2)` per node, in node order.
    pub pairs: Vec<(usize, usize)>,
    pub s1: T,
    pub s2: T,
}

#[derive(Debug, Clone)]
pub struct SwimBuild<T> {
    pub network: Mlp<T>,
    pub layers: Vec<LayerTrace<T>>,
    /// Ridge actually used for the output fit.
    pub ridge: T,
}

pub fn swim_initialize<T: Real>(
    data: &Dataset<T>,
    hidden_widths: &[usize],
    output_dim: usize,
    cfg: &SwimConfig<T>,
) -> Result<Mlp<T>> {
    swim_initialize_traced(data, hidden_widths, output_dim, cfg).map(|b| b.network)
}

/// As [`swim_initialize`], also returning the pair chosen for every node.
pub fn swim_initialize_traced<T: Real>(
    data: &Dataset<T>,
    hidden_widths: &[usize],
    output_dim: usize,
    cfg: &SwimConfig<T>,
) -> Result<SwimBuild<T>> {
    cfg.validate()?;
    if data.len() < 2 {
        return Err(Error::DegenerateData(format!("{} data point(s); at least 2 needed", data.len())));
    }
    if hidden_widths.is_empty() || hidden_widths.contains(&0) {
        return Err(Error::invalid(format!("hidden widths must be non-empty and positive, got {hidden_widths:?}")));
    }
    if cfg.schedule.len() != hidden_widths.len() {
        return Err(Error::dims(
            "swim_initialize",
            format!("schedule of {} layers", hidden_widths.len()),
            cfg.schedule.len(),
        ));
    }
    if output_dim != data.output_dim() {
        return Err(Error::dims("swim_initialize", format!("output dim {}", data.output_dim()), output_dim));
    }

    let targets = data.targets();
    let mut rng = Rng::new(cfg.seed);
    let mut features = data.inputs().clone();
    let mut layers = Vec::with_capacity(hidden_widths.len() + 1);
    let mut traces = Vec::with_capacity(hidden_widths.len());

    for (i, &nodes) in hidden_widths.iter().enumerate() {
        let l = i + 1;
        let (s1, s2) = cfg.schedule.scales(l);
        let (layer, trace) = {
            let candidates = generate_candidates(&features, nodes, cfg.varsigma, &mut rng)?;
            let candidates = pair_weights(candidates, targets, cfg.epsilon, l)?;
            let scores: Vec<T> = candidates.iter().map(|p| p.weight).collect();
            let chosen = weighted_sample_with_replacement(&scores, nodes, &mut rng).map_err(|e| match e {
                Error::DegenerateData(msg) => Error::DegenerateData(format!("layer {l}: {msg}")),
                e => e,
            })?;

            let in_dim = features.cols();
            let mut weights = Matrix::zeros(nodes, in_dim);
            let mut bias = Vec::with_capacity(nodes);
            let mut pairs = Vec::with_capacity(nodes);
            for (node, &c) in chosen.iter().enumerate() {
                let p = &candidates[c];
                let (w, b) = construct_node_params(p.feat1, p.feat2, s1, s2)?;
                weights.row_mut(node).copy_from_slice(&w);
                bias.push(b);
                pairs.push((p.idx1, p.idx2));
            }
            (
                DenseLayer::new(weights, bias)?,
                LayerTrace { candidates: candidates.len(), pairs, s1, s2 },
            )
        };
        let mut next = layer.affine(&features)?;
        next.map_inplace(|v| cfg.activation.apply(v));
        if let Some((r, c)) = next.first_non_finite() {
            return Err(Error::NonFinite(format!("hidden layer {l} activation at ({r}, {c})")));
        }
        features = next;
        layers.push(layer);
        traces.push(trace);
    }

    let ridge = cfg.ridge.resolve(&features);
    layers.push(fit_output_on_features(&features, targets, ridge)?);
    let network = Mlp::new(data.input_dim(), layers, cfg.activation)?;
    Ok(SwimBuild { network, layers: traces, ridge })
}

/// Least-squares output layer on the cached last hidden activations.
pub fn fit_output_layer<T: Real>(cache: &ForwardCache<T>, targets: &Matrix<T>, ridge: T) -> Result<(Matrix<T>, Vec<T>)> {
    let layer = fit_output_on_features(cache.last_hidden(), targets, ridge)?;
    Ok((layer.weights, layer.bias))
}

fn fit_output_on_features<T: Real>(features: &Matrix<T>, targets: &Matrix<T>, ridge: T) -> Result<DenseLayer<T>> {
    let fit = least_squares(features, targets, ridge)?;
    DenseLayer::new(fit.weights, fit.bias)
}
