use crate::error::{Error, Result};
use crate::linalg::Rng;
use crate::scalar::Real;

/// Draws `count` indices independently with `P(i) = weights[i] / Σ weights`.
///
/// Cumulative-sum inversion: one uniform draw per sample, located by binary
/// search, so zero-weight entries are never returned.
pub fn weighted_sample_with_replacement<T: Real>(weights: &[T], count: usize, rng: &mut Rng) -> Result<Vec<usize>> {
    let cumulative = cumulative_weights(weights)?;
    let total = *cumulative.last().expect("non-empty after validation");
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let target = T::lit(rng.uniform_f64()) * total;
        let i = cumulative.partition_point(|&c| c <= target);
        // target < total always holds in exact arithmetic; guard rounding at the top
        out.push(last_positive_at_or_before(weights, i.min(weights.len() - 1)));
    }
    Ok(out)
}

fn cumulative_weights<T: Real>(weights: &[T]) -> Result<Vec<T>> {
    if weights.is_empty() {
        return Err(Error::invalid("cannot sample from an empty weight vector"));
    }
    let mut acc = T::zero();
    let mut cumulative = Vec::with_capacity(weights.len());
    for (i, &w) in weights.iter().enumerate() {
        if !w.is_finite() {
            return Err(Error::NonFinite(format!("sampling weight {i}")));
        }
        if w < T::zero() {
            return Err(Error::invalid(format!("sampling weight {i} is negative ({w})")));
        }
        acc += w;
        cumulative.push(acc);
    }
    if !(acc > T::zero()) {
        return Err(Error::DegenerateData("all sampling weights are zero".into()));
    }
    if !acc.is_finite() {
        return Err(Error::NonFinite("sum of sampling weights".into()));
    }
    Ok(cumulative)
}

fn last_positive_at_or_before<T: Real>(weights: &[T], mut i: usize) -> usize {
    while weights[i] == T::zero() && i > 0 {
        i -= 1;
    }
    i
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_weight_is_never_drawn() {
        let mut rng = Rng::new(0);
        assert_eq!(weighted_sample_with_replacement(&[1.0, 0.0], 5, &mut rng).unwrap(), vec![0; 5]);
        let draws = weighted_sample_with_replacement(&[0.0, 0.0, 3.0, 0.0], 100, &mut rng).unwrap();
        assert!(draws.iter().all(|&i| i == 2));
    }

    #[test]
    fn degenerate_weights_are_rejected() {
        let mut rng = Rng::new(0);
        assert!(matches!(
            weighted_sample_with_replacement(&[0.0f64, 0.0], 1, &mut rng),
            Err(Error::DegenerateData(_))
        ));
        assert!(weighted_sample_with_replacement(&[1.0, -0.5], 1, &mut rng).is_err());
        assert!(weighted_sample_with_replacement(&[1.0, f64::INFINITY], 1, &mut rng).is_err());
        assert!(weighted_sample_with_replacement::<f64>(&[], 1, &mut rng).is_err());
    }

    #[test]
    fn same_seed_same_indices() {
        let w = [0.3, 2.0, 0.0, 1.1, 5.0];
        let a = weighted_sample_with_replacement(&w, 1000, &mut Rng::new(11)).unwrap();
        let b = weighted_sample_with_replacement(&w, 1000, &mut Rng::new(11)).unwrap();
        assert_eq!(a, b);
    }
}
