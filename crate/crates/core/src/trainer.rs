//! Full-batch gradient training with mean squared error and Adam.
//!
//! Used only to reproduce the layer-wise frequency behaviour of a
//! conventionally trained network; sampled networks never go through here.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::network::Mlp;
use crate::scalar::Real;

/// Gradient of the loss with respect to one affine layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGradient<T> {
    pub weights: Matrix<T>,
    pub bias: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradients<T> {
    /// Same order as [`Mlp::layers`].
    pub layers: Vec<LayerGradient<T>>,
    /// Loss at the parameters the gradient was taken at.
    pub loss: T,
}

/// Mean squared error over every entry of the output.
pub fn mse<T: Real>(pred: &Matrix<T>, target: &Matrix<T>) -> Result<T> {
    let r = crate::network::rmse(pred, target)?;
    Ok(r * r)
}

/// Exact gradient of `mean((f(X) − Y)²)` over all `M × O` entries.
pub fn backprop_gradients<T: Real>(net: &Mlp<T>, x: &Matrix<T>, y: &Matrix<T>) -> Result<Gradients<T>> {
    if y.shape() != (x.rows(), net.output_dim()) {
        return Err(Error::dims(
            "backprop_gradients",
            format!("targets {}x{}", x.rows(), net.output_dim()),
            format!("{}x{}", y.rows(), y.cols()),
        ));
    }
    let cache = net.forward_impl(x, true)?;
    let n = T::from_usize_lossy(y.rows() * y.cols());
    let residual = cache.output.sub(y)?;
    let loss = residual.as_slice().iter().fold(T::zero(), |a, &r| a + r * r) / n;

    // delta = dLoss / d(pre-activation of the current layer)
    let mut delta = residual.scale(T::lit(2.0) / n);
    let act = net.activation();
    let layers = net.layers();
    let mut grads = Vec::with_capacity(layers.len());
    for idx in (0..layers.len()).rev() {
        let input = &cache.activations[idx];
        let weights = delta.t_matmul(input)?;
        // the bias is subtracted, so its gradient carries a minus sign
        let bias = delta.column_sums().into_iter().map(|s| -s).collect();
        grads.push(LayerGradient { weights, bias });
        if idx > 0 {
            let back = delta.matmul(&layers[idx].weights)?;
            let z = &cache.pre_activations[idx - 1];
            delta = back.hadamard(&z.map(|v| act.derivative(v)))?;
        }
    }
    grads.reverse();
    Ok(Gradients { layers: grads, loss })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig<T> {
    pub lr: T,
    pub beta1: T,
    pub beta2: T,
    pub epsilon: T,
}

impl<T: Real> AdamConfig<T> {
    /// `β1 = 0.9`, `β2 = 0.999`, `ε = 1e-8`.
    pub fn with_lr(lr: T) -> Self {
        AdamConfig { lr, beta1: T::lit(0.9), beta2: T::lit(0.999), epsilon: T::lit(1e-8) }
    }
}

#[derive(Debug, Clone)]
pub struct AdamState<T> {
    pub config: AdamConfig<T>,
    step: u64,
    first: Vec<LayerGradient<T>>,
    second: Vec<LayerGradient<T>>,
}

impl<T: Real> AdamState<T> {
    pub fn new(net: &Mlp<T>, config: AdamConfig<T>) -> Self {
        let zeros: Vec<LayerGradient<T>> = net
            .layers()
            .iter()
            .map(|l| LayerGradient { weights: Matrix::zeros(l.out_dim(), l.in_dim()), bias: vec![T::zero(); l.out_dim()] })
            .collect();
        AdamState { config, step: 0, first: zeros.clone(), second: zeros }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// One bias-corrected Adam update of every parameter of `net`.
    pub fn step(&mut self, net: &mut Mlp<T>, grads: &Gradients<T>) -> Result<()> {
        if grads.layers.len() != self.first.len() {
            return Err(Error::dims("adam_step", format!("{} layers", self.first.len()), grads.layers.len()));
        }
        for (g, m) in grads.layers.iter().zip(&self.first) {
            if g.weights.shape() != m.weights.shape() || g.bias.len() != m.bias.len() {
                return Err(Error::dims(
                    "adam_step",
                    format!("{:?}", m.weights.shape()),
                    format!("{:?}", g.weights.shape()),
                ));
            }
        }
        self.step += 1;
        let c = self.config;
        let t = self.step as i32;
        let correct1 = T::one() - c.beta1.powi(t);
        let correct2 = T::one() - c.beta2.powi(t);
        let update = |param: &mut T, g: T, m: &mut T, v: &mut T| {
            *m = c.beta1 * *m + (T::one() - c.beta1) * g;
            *v = c.beta2 * *v + (T::one() - c.beta2) * g * g;
            let m_hat = *m / correct1;
            let v_hat = *v / correct2;
            *param -= c.lr * m_hat / (v_hat.sqrt() + c.epsilon);
        };
        for (((layer, g), m), v) in net.layers_mut().iter_mut().zip(&grads.layers).zip(&mut self.first).zip(&mut self.second) {
            let params = layer.weights.as_mut_slice().iter_mut().chain(layer.bias.iter_mut());
            let gs = g.weights.as_slice().iter().chain(&g.bias);
            let ms = m.weights.as_mut_slice().iter_mut().chain(m.bias.iter_mut());
            let vs = v.weights.as_mut_slice().iter_mut().chain(v.bias.iter_mut());
            for (((p, &gv), mv), vv) in params.zip(gs).zip(ms).zip(vs) {
                update(p, gv, mv, vv);
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TrainConfig<T> {
    pub epochs: usize,
    pub adam: AdamConfig<T>,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome<T> {
    pub network: Mlp<T>,
    /// MSE at the start of each epoch, before that epoch's update.
    pub losses: Vec<T>,
}

/// Full-batch Adam on the whole dataset for `epochs` steps.
pub fn train<T: Real>(mut net: Mlp<T>, data: &Dataset<T>, cfg: &TrainConfig<T>) -> Result<TrainOutcome<T>> {
    let mut adam = AdamState::new(&net, cfg.adam);
    let mut losses = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let grads = backprop_gradients(&net, data.inputs(), data.targets())?;
        if !grads.loss.is_finite() {
            return Err(Error::NonFinite(format!("training loss at epoch {epoch}")));
        }
        losses.push(grads.loss);
        adam.step(&mut net, &grads)?;
    }
    Ok(TrainOutcome { network: net, losses })
}
