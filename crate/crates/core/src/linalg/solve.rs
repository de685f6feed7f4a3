//! Least-squares fitting of an affine map with a subtracted bias.
//!
//! The model is `y ≈ W φ − b`. For each output column the solver minimises
//! `(1/M) Σ_i (⟨w, φ_i⟩ − b − y_i)² + ridge ‖w‖²`, the bias being left
//! unpenalised. Internally the features are augmented with a constant `−1`
//! column so `b` is fit jointly with `W`.
//!
//! * `ridge == 0`: Householder QR of the augmented matrix. Needs `M ≥ K + 1`
//!   and full column rank, otherwise [`Error::RankDeficient`].
//! * `ridge > 0`: Cholesky factorisation of `AᵀA + M·ridge·I'`, where `I'` is the
//!   identity with the bias entry zeroed.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// Relative ridge used when none is given: `1e-8` times the mean diagonal of
/// the row-normalised Gram matrix `ΦᵀΦ / M`.
pub const DEFAULT_RELATIVE_RIDGE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct AffineFit<T> {
    /// `O x K`.
    pub weights: Matrix<T>,
    /// Length `O`; subtracted from `W φ`.
    pub bias: Vec<T>,
}

impl<T: Real> AffineFit<T> {
    /// `features * Wᵀ − b`, i.e. the fitted predictions.
    pub fn predict(&self, features: &Matrix<T>) -> Result<Matrix<T>> {
        let mut out = features.matmul_t(&self.weights)?;
        out.sub_row_vector(&self.bias)?;
        Ok(out)
    }
}

/// Mean diagonal entry of `ΦᵀΦ / M`, i.e. the mean squared feature value.
pub fn gram_scale<T: Real>(features: &Matrix<T>) -> T {
    let (m, k) = features.shape();
    if m == 0 || k == 0 {
        return T::zero();
    }
    let sum_sq = features.as_slice().iter().fold(T::zero(), |a, &v| a + v * v);
    sum_sq / (T::from_usize_lossy(m) * T::from_usize_lossy(k))
}

/// [`DEFAULT_RELATIVE_RIDGE`], raised to `1000 ε` for scalars too coarse to
/// factor the Gram matrix at that level (`f32`).
pub fn default_relative_ridge<T: Real>() -> T {
    T::lit(DEFAULT_RELATIVE_RIDGE).max(T::epsilon() * T::lit(1e3))
}

/// `default_relative_ridge() * gram_scale(features)`.
pub fn default_ridge<T: Real>(features: &Matrix<T>) -> T {
    default_relative_ridge::<T>() * gram_scale(features)
}

pub fn least_squares<T: Real>(features: &Matrix<T>, targets: &Matrix<T>, ridge: T) -> Result<AffineFit<T>> {
    let (m, k) = features.shape();
    if m == 0 {
        return Err(Error::invalid("least squares needs at least one row"));
    }
    if targets.rows() != m {
        return Err(Error::dims("least_squares", format!("{m} target rows"), targets.rows()));
    }
    if !(ridge >= T::zero()) || !ridge.is_finite() {
        return Err(Error::invalid(format!("ridge must be finite and >= 0, got {ridge}")));
    }
    if let Some((r, c)) = features.first_non_finite() {
        return Err(Error::NonFinite(format!("least_squares features at ({r}, {c})")));
    }
    if let Some((r, c)) = targets.first_non_finite() {
        return Err(Error::NonFinite(format!("least_squares targets at ({r}, {c})")));
    }

    let augmented = augment(features);
    let theta = if ridge == T::zero() {
        householder_solve(augmented, targets)?
    } else {
        ridge_normal_solve(&augmented, targets, ridge * T::from_usize_lossy(m), k)?
    };

    // theta is (K+1) x O; the last row is the bias.
    let o = targets.cols();
    let weights = Matrix::from_fn(o, k, |i, j| theta.get(j, i));
    let bias = theta.row(k).to_vec();
    if !weights.is_finite() || bias.iter().any(|b| !b.is_finite()) {
        return Err(Error::NonFinite("least_squares solution".into()));
    }
    Ok(AffineFit { weights, bias })
}

fn augment<T: Real>(features: &Matrix<T>) -> Matrix<T> {
    let (m, k) = features.shape();
    let mut a = Matrix::zeros(m, k + 1);
    for r in 0..m {
        let row = a.row_mut(r);
        row[..k].copy_from_slice(features.row(r));
        row[k] = -T::one();
    }
    a
}

fn ridge_normal_solve<T: Real>(a: &Matrix<T>, y: &Matrix<T>, lambda: T, k: usize) -> Result<Matrix<T>> {
    let mut gram = a.t_matmul(a)?;
    for i in 0..k {
        let v = gram.get(i, i) + lambda;
        gram.set(i, i, v);
    }
    let rhs = a.t_matmul(y)?;
    let l = cholesky(gram)?;
    Ok(cholesky_solve(&l, rhs))
}

/// Lower Cholesky factor of a symmetric positive-definite matrix (upper triangle ignored).
pub(crate) fn cholesky<T: Real>(mut g: Matrix<T>) -> Result<Matrix<T>> {
    let n = g.rows();
    for j in 0..n {
        let row_j = g.row_mut(j);
        let mut d = row_j[j];
        for v in &row_j[..j] {
            d -= *v * *v;
        }
        if !(d > T::zero()) || !d.is_finite() {
            return Err(Error::RankDeficient(format!(
                "Gram matrix is not positive definite at pivot {j} (value {d})"
            )));
        }
        row_j[j] = d.sqrt();
        for i in (j + 1)..n {
            let (upper, lower) = g.as_mut_slice().split_at_mut(i * n);
            let row_j = &upper[j * n..j * n + n];
            let row_i = &mut lower[..n];
            let mut s = row_i[j];
            for p in 0..j {
                s -= row_i[p] * row_j[p];
            }
            row_i[j] = s / row_j[j];
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            g.set(i, j, T::zero());
        }
    }
    Ok(g)
}

/// Solves `L Lᵀ X = B` column by column.
pub(crate) fn cholesky_solve<T: Real>(l: &Matrix<T>, mut b: Matrix<T>) -> Matrix<T> {
    let n = l.rows();
    let o = b.cols();
    // forward: L Z = B
    for i in 0..n {
        let li = l.row(i);
        for c in 0..o {
            let mut s = b.get(i, c);
            for p in 0..i {
                s -= li[p] * b.get(p, c);
            }
            b.set(i, c, s / li[i]);
        }
    }
    // backward: Lᵀ X = Z
    for i in (0..n).rev() {
        for c in 0..o {
            let mut s = b.get(i, c);
            for p in (i + 1)..n {
                s -= l.get(p, i) * b.get(p, c);
            }
            b.set(i, c, s / l.get(i, i));
        }
    }
    b
}

/// Minimum-residual solution of `A X ≈ Y` for full-column-rank `A` (`M ≥ N`).
fn householder_solve<T: Real>(mut a: Matrix<T>, y: &Matrix<T>) -> Result<Matrix<T>> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::RankDeficient(format!(
            "{m} rows cannot determine {n} unknowns without a ridge"
        )));
    }
    let mut y = y.clone();
    let o = y.cols();
    let mut diag = vec![T::zero(); n];
    let mut v = vec![T::zero(); m];
    let mut s_a = vec![T::zero(); n];
    let mut s_y = vec![T::zero(); o];

    for j in 0..n {
        let mut alpha = T::zero();
        for i in j..m {
            let x = a.get(i, j);
            alpha += x * x;
        }
        let alpha = alpha.sqrt();
        if alpha == T::zero() {
            diag[j] = T::zero();
            continue;
        }
        let x0 = a.get(j, j);
        let beta = if x0 > T::zero() { -alpha } else { alpha };
        // v = x - beta e1, normalised so that H = I - 2 v vᵀ / (vᵀ v)
        for i in j..m {
            v[i] = a.get(i, j);
        }
        v[j] = x0 - beta;
        let vtv = v[j..m].iter().fold(T::zero(), |acc, &t| acc + t * t);
        let tau = T::lit(2.0) / vtv;

        s_a[j..n].iter_mut().for_each(|s| *s = T::zero());
        s_y.iter_mut().for_each(|s| *s = T::zero());
        for i in j..m {
            let vi = v[i];
            for (s, &x) in s_a[j..n].iter_mut().zip(&a.row(i)[j..n]) {
                *s += vi * x;
            }
            for (s, &x) in s_y.iter_mut().zip(y.row(i)) {
                *s += vi * x;
            }
        }
        for i in j..m {
            let f = tau * v[i];
            for (x, &s) in a.row_mut(i)[j..n].iter_mut().zip(&s_a[j..n]) {
                *x -= f * s;
            }
            for (x, &s) in y.row_mut(i).iter_mut().zip(&s_y) {
                *x -= f * s;
            }
        }
        diag[j] = beta;
    }

    let scale = diag.iter().fold(T::zero(), |acc, d| acc.max(d.abs()));
    let tol = scale * T::epsilon() * T::from_usize_lossy(m.max(n)) * T::lit(10.0);
    if let Some(j) = diag.iter().position(|d| d.abs() <= tol) {
        return Err(Error::RankDeficient(format!(
            "column {j} is linearly dependent on earlier columns (|R_jj| = {})",
            diag[j].abs()
        )));
    }

    let mut x = Matrix::zeros(n, o);
    for i in (0..n).rev() {
        for c in 0..o {
            let mut s = y.get(i, c);
            for p in (i + 1)..n {
                s -= a.get(i, p) * x.get(p, c);
            }
            x.set(i, c, s / a.get(i, i));
        }
    }
    Ok(x)
}
