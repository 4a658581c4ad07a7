//! Reference FFT flavors: iterative radix-2 and radix-4 decimation in time.
//!
//! Both compute the unnormalized forward DFT
//! `X[k] = Σ x[n]·exp(−2πi·nk/N)`. Twiddles are generated per call so the
//! functions stay pure and reentrant.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;

use super::KernelError;

/// One implementation of the FFT nucleus.
pub trait FftFlavor: Sync {
    fn name(&self) -> &'static str;

    /// Whether `n` is a legal transform size for this flavor.
    fn supports(&self, n: usize) -> bool;

    /// Number of butterfly stages for a size-`n` transform.
    fn stages(&self, n: usize) -> u32;

    /// Forward transform in place.
    fn forward_in_place(&self, data: &mut [Complex64]) -> Result<(), KernelError>;

    fn forward(&self, x: &[Complex64]) -> Result<Vec<Complex64>, KernelError> {
        let mut out = x.to_vec();
        self.forward_in_place(&mut out)?;
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Radix2;

#[derive(Clone, Copy, Debug, Default)]
pub struct Radix4;

impl FftFlavor for Radix2 {
    fn name(&self) -> &'static str {
        "radix2"
    }

    fn supports(&self, n: usize) -> bool {
        n >= 2 && n.is_power_of_two()
    }

    fn stages(&self, n: usize) -> u32 {
        n.trailing_zeros()
    }

    fn forward_in_place(&self, data: &mut [Complex64]) -> Result<(), KernelError> {
        let n = data.len();
        if !self.supports(n) {
            return Err(KernelError::UnsupportedSize { n, flavor: "radix2" });
        }
        bit_reverse_permute(data);
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let step = -2.0 * PI / len as f64;
            let twiddles: Vec<Complex64> =
                (0..half).map(|j| Complex64::from_polar(1.0, step * j as f64)).collect();
            for block in data.chunks_exact_mut(len) {
                let (lo, hi) = block.split_at_mut(half);
                for ((a, b), w) in lo.iter_mut().zip(hi.iter_mut()).zip(&twiddles) {
                    let t = *b * w;
                    *b = *a - t;
                    *a += t;
                }
            }
            len <<= 1;
        }
        Ok(())
    }
}

impl FftFlavor for Radix4 {
    fn name(&self) -> &'static str {
        "radix4"
    }

    fn supports(&self, n: usize) -> bool {
        n >= 4 && n.is_power_of_two() && n.trailing_zeros().is_multiple_of(2)
    }

    fn stages(&self, n: usize) -> u32 {
        n.trailing_zeros() / 2
    }

    fn forward_in_place(&self, data: &mut [Complex64]) -> Result<(), KernelError> {
        let n = data.len();
        if !self.supports(n) {
            return Err(KernelError::UnsupportedSize { n, flavor: "radix4" });
        }
        digit_reverse_base4(data);
        // -i, the forward-transform quarter rotation.
        let neg_i = Complex64::new(0.0, -1.0);
        let mut len = 4;
        while len <= n {
            let quarter = len / 4;
            let step = -2.0 * PI / len as f64;
            for block in data.chunks_exact_mut(len) {
                for j in 0..quarter {
                    let w1 = Complex64::from_polar(1.0, step * j as f64);
                    let w2 = Complex64::from_polar(1.0, step * 2.0 * j as f64);
                    let w3 = Complex64::from_polar(1.0, step * 3.0 * j as f64);
                    let a0 = block[j];
                    let a1 = block[j + quarter] * w1;
                    let a2 = block[j + 2 * quarter] * w2;
                    let a3 = block[j + 3 * quarter] * w3;
                    let s02 = a0 + a2;
                    let d02 = a0 - a2;
                    let s13 = a1 + a3;
                    let d13 = (a1 - a3) * neg_i;
                    block[j] = s02 + s13;
                    block[j + quarter] = d02 + d13;
                    block[j + 2 * quarter] = s02 - s13;
                    block[j + 3 * quarter] = d02 - d13;
                }
            }
            len <<= 2;
        }
        Ok(())
    }
}

fn bit_reverse_permute(data: &mut [Complex64]) {
    let n = data.len();
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            data.swap(i, j);
        }
    }
}

fn digit_reverse_base4(data: &mut [Complex64]) {
    let n = data.len();
    let digits = n.trailing_zeros() / 2;
    for i in 0..n {
        let mut x = i;
        let mut j = 0;
        for _ in 0..digits {
            j = (j << 2) | (x & 3);
            x >>= 2;
        }
        if i < j {
            data.swap(i, j);
        }
    }
}

/// Wraps a flavor and counts how many transforms it performs. Used to show
/// that genre members go through the nucleus exactly once.
#[derive(Debug, Default)]
pub struct CountingFlavor<F> {
    inner: F,
    calls: AtomicUsize,
}

impl<F: FftFlavor> CountingFlavor<F> {
    pub fn new(inner: F) -> Self {
        CountingFlavor {
            inner,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }
}

impl<F: FftFlavor> FftFlavor for CountingFlavor<F> {
    fn name(&self) -> &'static str {
        self.inner.name()
    }

    fn supports(&self, n: usize) -> bool {
        self.inner.supports(n)
    }

    fn stages(&self, n: usize) -> u32 {
        self.inner.stages(n)
    }

    fn forward_in_place(&self, data: &mut [Complex64]) -> Result<(), KernelError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.forward_in_place(data)
    }
}

pub fn fft_radix2(x: &[Complex64]) -> Result<Vec<Complex64>, KernelError> {
    Radix2.forward(x)
}

pub fn fft_radix4(x: &[Complex64]) -> Result<Vec<Complex64>, KernelError> {
    Radix4.forward(x)
}
