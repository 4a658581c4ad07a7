//! Members of the FFT genre, each realized as pre-processing, exactly one
//! call into an FFT flavor, and post-processing.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::fft::{FftFlavor, Radix2};
use super::KernelError;

/// Inverse DFT with 1/N scaling: conjugate, forward FFT, conjugate, scale.
pub fn ifft_with<F: FftFlavor + ?Sized>(
    flavor: &F,
    spectrum: &[Complex64],
) -> Result<Vec<Complex64>, KernelError> {
    let mut buf: Vec<Complex64> = spectrum.iter().map(|z| z.conj()).collect();
    flavor.forward_in_place(&mut buf)?;
    let scale = 1.0 / buf.len() as f64;
    Ok(buf.into_iter().map(|z| z.conj() * scale).collect())
}

pub fn ifft(spectrum: &[Complex64]) -> Result<Vec<Complex64>, KernelError> {
    ifft_with(&Radix2, spectrum)
}

/// Unnormalized DCT-II, `X[k] = Σ x[n]·cos(π(n+½)k/N)`.
///
/// The input is reordered into an even-symmetric sequence (even samples
/// ascending, odd samples descending), transformed once, and each bin is
/// rotated by `exp(−iπk/2N)` before taking the real part.
pub fn dct2_via_fft_with<F: FftFlavor + ?Sized>(
    flavor: &F,
    x: &[f64],
) -> Result<Vec<f64>, KernelError> {
    let n = x.len();
    if !flavor.supports(n) {
        return Err(KernelError::UnsupportedSize {
            n,
            flavor: flavor.name(),
        });
    }
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n / 2 {
        v[i] = Complex64::new(x[2 * i], 0.0);
        v[n - 1 - i] = Complex64::new(x[2 * i + 1], 0.0);
    }
    flavor.forward_in_place(&mut v)?;
    let step = -PI / (2 * n) as f64;
    Ok(v.iter()
        .enumerate()
        .map(|(k, z)| (z * Complex64::from_polar(1.0, step * k as f64)).re)
        .collect())
}

pub fn dct2_via_fft(x: &[f64]) -> Result<Vec<f64>, KernelError> {
    dct2_via_fft_with(&Radix2, x)
}

/// Discrete Hartley transform, `H[k] = Σ x[n]·cas(2πnk/N)`, read off a
/// single FFT of the real input as `Re − Im`.
pub fn dht_via_fft_with<F: FftFlavor + ?Sized>(
    flavor: &F,
    x: &[f64],
) -> Result<Vec<f64>, KernelError> {
    let mut buf: Vec<Complex64> = x.iter().map(|&r| Complex64::new(r, 0.0)).collect();
    flavor.forward_in_place(&mut buf)?;
    Ok(buf.into_iter().map(|z| z.re - z.im).collect())
}

pub fn dht_via_fft(x: &[f64]) -> Result<Vec<f64>, KernelError> {
    dht_via_fft_with(&Radix2, x)
}
