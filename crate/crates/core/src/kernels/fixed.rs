//! Saturating conversions between floating point and Q15/Q31 fixed point.

use serde::{Deserialize, Serialize};

use crate::model::Rounding;

/// Signed 1.15 fixed point; value = raw / 2^15.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Q15(pub i16);

/// Signed 1.31 fixed point; value = raw / 2^31.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Q31(pub i32);

const Q15_SCALE: f64 = 32768.0;
const Q31_SCALE: f64 = 2147483648.0;

fn quantize(x: f64, scale: f64, lo: f64, hi: f64, rounding: Rounding) -> f64 {
    if x.is_nan() {
        return 0.0;
    }
    let scaled = x * scale;
    let q = match rounding {
        Rounding::RoundNearest => scaled.round(),
        Rounding::Truncate => scaled.trunc(),
    };
    q.clamp(lo, hi)
}

pub fn float_to_q15(x: f64, rounding: Rounding) -> Q15 {
    Q15(quantize(x, Q15_SCALE, i16::MIN as f64, i16::MAX as f64, rounding) as i16)
}

pub fn q15_to_float(q: Q15) -> f64 {
    q.0 as f64 / Q15_SCALE
}

pub fn float_to_q31(x: f64, rounding: Rounding) -> Q31 {
    Q31(quantize(x, Q31_SCALE, i32::MIN as f64, i32::MAX as f64, rounding) as i32)
}

pub fn q31_to_float(q: Q31) -> f64 {
    q.0 as f64 / Q31_SCALE
}

pub fn floats_to_q15(xs: &[f64], rounding: Rounding) -> Vec<Q15> {
    xs.iter().map(|&x| float_to_q15(x, rounding)).collect()
}

pub fn q15s_to_floats(qs: &[Q15]) -> Vec<f64> {
    qs.iter().map(|&q| q15_to_float(q)).collect()
}
