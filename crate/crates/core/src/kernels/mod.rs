//! Functional reference flavors of the FFT nucleus, its genre members, and
//! the fixed-point conversions used as glue between flavors.

mod fft;
mod fixed;
mod genre;

use thiserror::Error;

pub use fft::{fft_radix2, fft_radix4, CountingFlavor, FftFlavor, Radix2, Radix4};
pub use fixed::{
    float_to_q15, float_to_q31, floats_to_q15, q15_to_float, q15s_to_floats, q31_to_float, Q15,
    Q31,
};
pub use genre::{dct2_via_fft, dct2_via_fft_with, dht_via_fft, dht_via_fft_with, ifft, ifft_with};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("transform size {n} is not supported by the {flavor} flavor")]
    UnsupportedSize { n: usize, flavor: &'static str },
}
