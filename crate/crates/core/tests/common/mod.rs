//! Reference implementations written without the library's kernels, for
//! cross-checking. Plain nested `Vec`s and scalar loops only.
#![allow(dead_code)]

use swim_core::linalg::Matrix;
use swim_core::network::{DenseLayer, Mlp};

pub type Dense = Vec<Vec<f64>>;

pub fn to_dense(m: &Matrix<f64>) -> Dense {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect()).collect()
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn gauss_jordan_inverse(a: &Dense) -> Option<Dense> {
    let n = a.len();
    let mut aug: Dense = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| aug[x][col].abs().total_cmp(&aug[y][col].abs()))?;
        if aug[pivot][col].abs() < 1e-300 {
            return None;
        }
        aug.swap(col, pivot);
        let p = aug[col][col];
        for v in aug[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col {
                let f = aug[r][col];
                if f != 0.0 {
                    for c in 0..2 * n {
                        aug[r][c] -= f * aug[col][c];
                    }
                }
            }
        }
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Explicit normal-equation solution of
/// `min (1/M) Σ ‖W x_i − b − y_i‖² + ridge ‖W‖²`, bias unpenalised.
/// Returns `(W as O×K rows, b)`.
pub fn ridge_oracle(x: &Dense, y: &Dense, ridge: f64) -> (Dense, Vec<f64>) {
    let m = x.len();
    let k = x[0].len();
    let o = y[0].len();
    // augmented design [x, -1]
    let a: Dense = x.iter().map(|r| r.iter().copied().chain([-1.0]).collect()).collect();
    let mut g = vec![vec![0.0; k + 1]; k + 1];
    for row in &a {
        for i in 0..=k {
            for j in 0..=k {
                g[i][j] += row[i] * row[j];
            }
        }
    }
    for (i, gi) in g.iter_mut().enumerate().take(k) {
        gi[i] += ridge * m as f64;
    }
    let inv = gauss_jordan_inverse(&g).expect("oracle system singular");
    let mut aty = vec![vec![0.0; o]; k + 1];
    for (row, yr) in a.iter().zip(y) {
        for i in 0..=k {
            for c in 0..o {
                aty[i][c] += row[i] * yr[c];
            }
        }
    }
    let mut theta = vec![vec![0.0; o]; k + 1];
    for i in 0..=k {
        for c in 0..o {
            theta[i][c] = (0..=k).map(|j| inv[i][j] * aty[j][c]).sum();
        }
    }
    let w = (0..o).map(|c| (0..k).map(|i| theta[i][c]).collect()).collect();
    let b = (0..o).map(|c| theta[k][c]).collect();
    (w, b)
}

/// Largest entry-wise difference divided by the largest oracle magnitude.
pub fn relative_error(got: &[f64], want: &[f64]) -> f64 {
    assert_eq!(got.len(), want.len());
    let scale = want.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    got.iter().zip(want).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())) / scale
}

/// Forward pass of one input row, one scalar at a time.
pub fn forward_scalar(net: &Mlp<f64>, x: &[f64]) -> Vec<f64> {
    let layers = net.layers();
    let mut a = x.to_vec();
    for (idx, layer) in layers.iter().enumerate() {
        let mut z = Vec::with_capacity(layer.out_dim());
        for j in 0..layer.out_dim() {
            let mut s = 0.0;
            for (i, &ai) in a.iter().enumerate() {
                s += layer.weights.get(j, i) * ai;
            }
            z.push(s - layer.bias[j]);
        }
        if idx + 1 < layers.len() {
            a = z.into_iter().map(|v| net.activation().apply(v)).collect();
        } else {
            a = z;
        }
    }
    a
}

pub fn mse_scalar(net: &Mlp<f64>, x: &Dense, y: &Dense) -> f64 {
    let mut s = 0.0;
    let mut n = 0usize;
    for (xr, yr) in x.iter().zip(y) {
        for (p, t) in forward_scalar(net, xr).iter().zip(yr) {
            s += (p - t) * (p - t);
            n += 1;
        }
    }
    s / n as f64
}

/// Copy of `net` with one parameter moved by `delta`. `param` indexes
/// weights then bias of layer `layer`.
pub fn perturbed(net: &Mlp<f64>, layer: usize, param: usize, delta: f64) -> Mlp<f64> {
    let mut layers: Vec<DenseLayer<f64>> = net.layers().to_vec();
    let l = &mut layers[layer];
    let nw = l.out_dim() * l.in_dim();
    if param < nw {
        let (r, c) = (param / l.in_dim(), param % l.in_dim());
        let v = l.weights.get(r, c);
        l.weights.set(r, c, v + delta);
    } else {
        l.bias[param - nw] += delta;
    }
    Mlp::new(net.input_dim(), layers, net.activation()).unwrap()
}

/// Central-difference gradient of the scalar-loop MSE, in the same
/// weights-then-bias order per layer.
pub fn numeric_gradient(net: &Mlp<f64>, x: &Dense, y: &Dense, h: f64) -> Vec<Vec<f64>> {
    net.layers()
        .iter()
        .enumerate()
        .map(|(li, l)| {
            (0..l.out_dim() * l.in_dim() + l.out_dim())
                .map(|p| {
                    let up = mse_scalar(&perturbed(net, li, p, h), x, y);
                    let down = mse_scalar(&perturbed(net, li, p, -h), x, y);
                    (up - down) / (2.0 * h)
                })
                .collect()
        })
        .collect()
}

/// Pearson statistic of observed counts against exact probabilities.
pub fn chi_square(counts: &[usize], probs: &[f64]) -> f64 {
    let n: usize = counts.iter().sum();
    counts
        .iter()
        .zip(probs)
        .filter(|(_, &p)| p > 0.0)
        .map(|(&c, &p)| {
            let e = p * n as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum()
}

/// Upper 1% points of the chi-square distribution, indexed by degrees of freedom.
pub fn chi_square_99(df: usize) -> f64 {
    const TABLE: [f64; 12] = [
        f64::NAN, 6.635, 9.210, 11.345, 13.277, 15.086, 16.812, 18.475, 20.090, 21.666, 23.209, 24.725,
    ];
    TABLE[df]
}

pub fn total_variation(counts: &[usize], probs: &[f64]) -> f64 {
    let n: usize = counts.iter().sum();
    0.5 * counts.iter().zip(probs).map(|(&c, &p)| (c as f64 / n as f64 - p).abs()).sum::<f64>()
}

/// Worst deviation from the pair identity over every node of a traced build:
/// `⟨w, f1⟩ − b = −s2` and `⟨w, f2⟩ − b = s1 − s2`, with `f1, f2` the previous
/// layer's features of the recorded pair, recomputed by a fresh forward pass.
pub fn preactivation_identity_error(
    inputs: &Matrix<f64>,
    build: &swim_core::swim::SwimBuild<f64>,
) -> f64 {
    let cache = build.network.forward(inputs).unwrap();
    let mut worst = 0.0f64;
    for (i, trace) in build.layers.iter().enumerate() {
        let layer = &build.network.layers()[i];
        let feats = &cache.activations[i];
        for (node, &(a, b)) in trace.pairs.iter().enumerate() {
            let pre = |row: usize| -> f64 {
                let mut s = 0.0;
                for (k, &f) in feats.row(row).iter().enumerate() {
                    s += layer.weights.get(node, k) * f;
                }
                s - layer.bias[node]
            };
            worst = worst.max((pre(a) + trace.s2).abs());
            worst = worst.max((pre(b) - (trace.s1 - trace.s2)).abs());
        }
    }
    worst
}
