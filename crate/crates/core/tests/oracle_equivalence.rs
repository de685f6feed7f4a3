mod common;

use common::*;
use swim_core::linalg::{least_squares, Matrix, Rng};
use swim_core::network::{Activation, Mlp};
use swim_core::trainer::backprop_gradients;

fn random_matrix(rows: usize, cols: usize, rng: &mut Rng) -> Matrix<f64> {
    Matrix::from_fn(rows, cols, |_, _| rng.uniform_in(-1.0, 1.0))
}

fn check_against_oracle(m: usize, k: usize, o: usize, ridge: f64, rng: &mut Rng) -> f64 {
    let x = random_matrix(m, k, rng);
    let y = random_matrix(m, o, rng);
    let fit = least_squares(&x, &y, ridge).unwrap();
    let (w, b) = ridge_oracle(&to_dense(&x), &to_dense(&y), ridge);
    let got_w: Vec<f64> = fit.weights.as_slice().to_vec();
    let want_w: Vec<f64> = w.concat();
    relative_error(&got_w, &want_w).max(relative_error(&fit.bias, &b))
}

#[test]
fn least_squares_20x3_matches_oracle() {
    let err = check_against_oracle(20, 3, 2, 1e-8, &mut Rng::new(20));
    assert!(err <= 1e-6, "relative error {err}");
}

#[test]
fn least_squares_30x8_matches_oracle() {
    let err = check_against_oracle(30, 8, 1, 1e-8, &mut Rng::new(30));
    assert!(err <= 1e-6, "relative error {err}");
}

#[test]
fn fifty_random_systems_match_oracle() {
    let mut rng = Rng::new(50);
    for case in 0..50 {
        let k = 1 + rng.index(10);
        let m = k + 2 + rng.index(50);
        let o = 1 + rng.index(3);
        let err = check_against_oracle(m, k, o, 1e-8, &mut rng);
        assert!(err <= 1e-6, "case {case} ({m}x{k}, {o} outputs): relative error {err}");
    }
}

#[test]
fn unregularised_systems_match_oracle() {
    let mut rng = Rng::new(51);
    for _ in 0..20 {
        let k = 1 + rng.index(6);
        let m = k + 1 + rng.index(30);
        let err = check_against_oracle(m, k, 2, 0.0, &mut rng);
        assert!(err <= 1e-9, "{m}x{k}: {err}");
    }
}

#[test]
fn square_augmented_system_is_interpolated() {
    // M = K + 1 rows: the affine fit passes through every point
    let mut rng = Rng::new(7);
    let x = random_matrix(6, 5, &mut rng);
    let y = random_matrix(6, 2, &mut rng);
    let fit = least_squares(&x, &y, 0.0).unwrap();
    let pred = fit.predict(&x).unwrap();
    assert!(pred.max_abs_diff(&y).unwrap() < 1e-10);
}

#[test]
fn residual_never_grows_with_more_columns() {
    let mut rng = Rng::new(8);
    let x = random_matrix(40, 10, &mut rng);
    let y = random_matrix(40, 1, &mut rng);
    let mut prev = f64::INFINITY;
    for k in 1..=10 {
        let sub = Matrix::from_fn(40, k, |i, j| x.get(i, j));
        let fit = least_squares(&sub, &y, 0.0).unwrap();
        let r = fit.predict(&sub).unwrap().sub(&y).unwrap().frobenius_norm();
        assert!(r <= prev + 1e-12, "k={k}: {r} > {prev}");
        prev = r;
    }
}

#[test]
fn forward_matches_scalar_loops() {
    let mut rng = Rng::new(11);
    for act in [Activation::Sin, Activation::Tanh, Activation::Relu] {
        let net = Mlp::random_uniform(5, &[17, 9, 13], 3, act, &mut rng).unwrap();
        let x = random_matrix(23, 5, &mut rng);
        let out = net.predict(&x).unwrap();
        for i in 0..x.rows() {
            let want = forward_scalar(&net, x.row(i));
            let err = out.row(i).iter().zip(&want).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            assert!(err <= 1e-12, "{act} row {i}: {err}");
            // a batch of one row gives the same result as the full batch
            let single = net.predict(&Matrix::from_vec(1, 5, x.row(i).to_vec()).unwrap()).unwrap();
            assert!(single.as_slice().iter().zip(out.row(i)).all(|(a, b)| (a - b).abs() <= 1e-12));
        }
    }
}

#[test]
fn backprop_matches_central_differences() {
    let mut rng = Rng::new(12);
    for act in [Activation::Sin, Activation::Tanh] {
        let net = Mlp::random_uniform(2, &[6, 5], 2, act, &mut rng).unwrap();
        let x = random_matrix(9, 2, &mut rng);
        let y = random_matrix(9, 2, &mut rng);
        let g = backprop_gradients(&net, &x, &y).unwrap();
        let numeric = numeric_gradient(&net, &to_dense(&x), &to_dense(&y), 1e-5);
        for (li, (lg, want)) in g.layers.iter().zip(&numeric).enumerate() {
            let got: Vec<f64> = lg.weights.as_slice().iter().chain(&lg.bias).copied().collect();
            let err = relative_error(&got, want);
            assert!(err <= 1e-4, "{act} layer {li}: {err}");
        }
    }
}
