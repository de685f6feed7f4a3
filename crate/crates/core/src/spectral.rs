//! Frequency content of layer probes on a uniform 1D grid.
//!
//! A direct `O(n²)` DFT; probe grids are at most a few thousand points.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::network::Mlp;
use crate::scalar::Real;

/// Shortest signal accepted by [`dominant_frequency`].
pub const MIN_SIGNAL_LEN: usize = 8;

/// `|X_k|` for every bin `k = 0..n`, with `X_k = Σ_j x_j e^{-2πi jk/n}`.
pub fn dft_magnitudes<T: Real>(signal: &[T]) -> Vec<T> {
    let n = signal.len();
    let tau = T::TAU();
    let nf = T::from_usize_lossy(n);
    // twiddles indexed by (j k) mod n keep the phase argument small
    let (cos, sin): (Vec<T>, Vec<T>) = (0..n)
        .map(|r| {
            let a = tau * T::from_usize_lossy(r) / nf;
            (a.cos(), a.sin())
        })
        .unzip();
    (0..n)
        .map(|k| {
            let (mut re, mut im) = (T::zero(), T::zero());
            let mut r = 0usize;
            for &x in signal {
                re += x * cos[r];
                im -= x * sin[r];
                r += k;
                if r >= n {
                    r -= n;
                }
            }
            (re * re + im * im).sqrt()
        })
        .collect()
}

/// Multiplies by the periodic Hann window `0.5 − 0.5 cos(2πj/n)`.
pub fn hann<T: Real>(signal: &[T]) -> Vec<T> {
    let n = T::from_usize_lossy(signal.len());
    let half = T::lit(0.5);
    signal
        .iter()
        .enumerate()
        .map(|(j, &x)| x * (half - half * (T::TAU() * T::from_usize_lossy(j) / n).cos()))
        .collect()
}

/// One-sided spectrum: bins `0..=n/2` at `k / (n Δ)` cycles per unit input.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    pub frequencies: Vec<T>,
    pub magnitudes: Vec<T>,
}

pub fn spectrum<T: Real>(signal: &[T], spacing: T, window: bool) -> Result<Spectrum<T>> {
    let n = signal.len();
    if n < MIN_SIGNAL_LEN {
        return Err(Error::invalid(format!("signal has {n} samples, need at least {MIN_SIGNAL_LEN}")));
    }
    if !(spacing > T::zero() && spacing.is_finite()) {
        return Err(Error::invalid(format!("grid spacing must be positive, got {spacing}")));
    }
    if let Some(i) = signal.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("signal sample {i}")));
    }
    let full = if window { dft_magnitudes(&hann(signal)) } else { dft_magnitudes(signal) };
    let span = T::from_usize_lossy(n) * spacing;
    let half = n / 2;
    Ok(Spectrum {
        frequencies: (0..=half).map(|k| T::from_usize_lossy(k) / span).collect(),
        magnitudes: full[..=half].to_vec(),
    })
}

/// Frequency of the largest non-DC bin; ties go to the lower frequency.
///
/// Bins within rounding noise of each other count as tied. A signal with no
/// energy above that noise outside DC reports 0.
pub fn dominant_in<T: Real>(s: &Spectrum<T>) -> T {
    let scale = s.magnitudes.iter().fold(T::zero(), |m, &v| m.max(v));
    let noise = scale * T::epsilon() * T::from_usize_lossy(s.magnitudes.len() * 8);
    let mut best = 0usize;
    let mut best_mag = T::zero();
    for (k, &m) in s.magnitudes.iter().enumerate().skip(1) {
        if m > best_mag + noise {
            best = k;
            best_mag = m;
        }
    }
    s.frequencies[best]
}

/// Dominant frequency in cycles per unit of a signal sampled every `spacing`.
pub fn dominant_frequency<T: Real>(signal: &[T], spacing: T, window: bool) -> Result<T> {
    Ok(dominant_in(&spectrum(signal, spacing, window)?))
}

/// Spectrum of one output channel of one layer probe.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSpectrum<T> {
    /// Hidden layer, 1-based.
    pub layer: usize,
    pub channel: usize,
    pub frequencies: Vec<T>,
    pub magnitudes: Vec<T>,
    pub dominant_frequency: T,
}

/// Spacing of a uniform grid, or an error if consecutive gaps differ.
pub fn grid_spacing<T: Real>(grid: &[T]) -> Result<T> {
    if grid.len() < 2 {
        return Err(Error::invalid("grid needs at least 2 points"));
    }
    let n = T::from_usize_lossy(grid.len() - 1);
    let step = (grid[grid.len() - 1] - grid[0]) / n;
    if !(step > T::zero()) {
        return Err(Error::invalid("grid must be strictly increasing"));
    }
    let tol = step * T::lit(1e-6);
    for (i, w) in grid.windows(2).enumerate() {
        if ((w[1] - w[0]) - step).abs() > tol {
            return Err(Error::invalid(format!("grid is not uniform at index {i}")));
        }
    }
    Ok(step)
}

/// `n` points `lo + i (hi − lo) / n`, i.e. the half-open interval `[lo, hi)`.
pub fn half_open_grid<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    let nf = T::from_usize_lossy(n);
    (0..n).map(|i| lo + (hi - lo) * T::from_usize_lossy(i) / nf).collect()
}

/// Probe spectra for every hidden layer of a 1D-input network.
pub fn spectral_profile<T: Real>(net: &Mlp<T>, grid: &[T], window: bool) -> Result<Vec<ProbeSpectrum<T>>> {
    if net.input_dim() != 1 {
        return Err(Error::invalid(format!("spectral profile needs 1D input, network has {}", net.input_dim())));
    }
    let spacing = grid_spacing(grid)?;
    let probes = net.layer_probes(&Matrix::column(grid)?)?;
    let mut out = Vec::new();
    for (l, probe) in probes.iter().enumerate() {
        for channel in 0..probe.cols() {
            let s = spectrum(&probe.col_to_vec(channel), spacing, window)?;
            out.push(ProbeSpectrum {
                layer: l + 1,
                channel,
                dominant_frequency: dominant_in(&s),
                frequencies: s.frequencies,
                magnitudes: s.magnitudes,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{target_1d, tone_1d};
    use crate::linalg::Rng;
    use crate::network::Activation;

    fn sampled(n: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
        half_open_grid(0.0, 1.0, n).into_iter().map(f).collect()
    }

    #[test]
    fn pure_tone() {
        let s = sampled(256, tone_1d);
        assert_eq!(dominant_frequency(&s, 1.0 / 256.0, false).unwrap(), 2.0);
        assert_eq!(dominant_frequency(&s, 1.0 / 256.0, true).unwrap(), 2.0);
    }

    #[test]
    fn mixed_target_is_dominated_by_its_slowest_tone() {
        let s = sampled(512, target_1d);
        assert_eq!(dominant_frequency(&s, 1.0 / 512.0, false).unwrap(), 2.0);
    }

    #[test]
    fn constant_signal() {
        let s = vec![3.5; 64];
        let spec = spectrum(&s, 0.1, false).unwrap();
        assert!(spec.magnitudes[1..].iter().all(|&m| m < 1e-12));
        assert_eq!(dominant_in(&spec), 0.0);
        assert_eq!(dominant_frequency(&vec![0.0; 16], 1.0, false).unwrap(), 0.0);
    }

    #[test]
    fn integer_tones_are_exact() {
        let n = 64;
        for k in 1..n / 2 {
            let s = sampled(n, |x| (std::f64::consts::TAU * k as f64 * x).sin());
            assert_eq!(dominant_frequency(&s, 1.0 / n as f64, false).unwrap(), k as f64, "k={k}");
        }
    }

    #[test]
    fn ties_go_low() {
        let s = sampled(32, |x| (std::f64::consts::TAU * 3.0 * x).cos() + (std::f64::consts::TAU * 5.0 * x).cos());
        assert_eq!(dominant_frequency(&s, 1.0 / 32.0, false).unwrap(), 3.0);
    }

    #[test]
    fn parseval() {
        let mut rng = Rng::new(9);
        let s: Vec<f64> = (0..200).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
        let energy: f64 = s.iter().map(|v| v * v).sum();
        let spec: f64 = dft_magnitudes(&s).iter().map(|m| m * m).sum::<f64>() / s.len() as f64;
        assert!((energy - spec).abs() / energy < 1e-9);
    }

    #[test]
    fn frequency_axis_uses_spacing() {
        let s: Vec<f64> = half_open_grid(0.0, 2.0, 128).into_iter().map(tone_1d).collect();
        let spec = spectrum(&s, 2.0 / 128.0, false).unwrap();
        assert_eq!(spec.frequencies.len(), 65);
        assert_eq!(spec.frequencies[1], 0.5);
        assert_eq!(dominant_in(&spec), 2.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(dominant_frequency(&[1.0; 7], 1.0, false).is_err());
        assert!(dominant_frequency(&[1.0; 8], 0.0, false).is_err());
        let mut s = vec![0.0; 8];
        s[3] = f64::NAN;
        assert!(dominant_frequency(&s, 1.0, false).is_err());
        assert!(grid_spacing(&[0.0, 0.1, 0.3]).is_err());
        assert!(grid_spacing(&[0.0]).is_err());
    }

    #[test]
    fn profile_covers_every_layer() {
        let net = Mlp::<f64>::random_uniform(1, &[8, 8, 8], 1, Activation::Sin, &mut Rng::new(4)).unwrap();
        let grid = half_open_grid(0.0, 1.0, 64);
        let prof = spectral_profile(&net, &grid, false).unwrap();
        assert_eq!(prof.iter().map(|p| p.layer).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert!(prof.iter().all(|p| p.magnitudes.iter().all(|&m| m >= 0.0)));
        let uneven = Mlp::<f64>::random_uniform(1, &[8, 4], 1, Activation::Sin, &mut Rng::new(4)).unwrap();
        assert!(spectral_profile(&uneven, &grid, false).is_err());
    }
}
