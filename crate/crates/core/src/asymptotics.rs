//! Closed-form predictions for the expected zero count, the Stieltjes
//! constants they need, and the comparison with the zero-counting function
//! of the Riemann zeta function.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::log_moment_sum;

/// Largest tabulated Stieltjes index.
pub const MAX_STIELTJES_INDEX: usize = 16;

/// `gamma_0 ..= gamma_16`, the constant terms of
/// `sum_{n <= X} (log n)^m / n - (log X)^{m+1} / (m + 1)` as `X -> inf`.
///
/// Cross-checked against an Euler-Maclaurin evaluation (see the tests).
#[allow(clippy::excessive_precision)]
const STIELTJES: [f64; MAX_STIELTJES_INDEX + 1] = [
    0.577_215_664_901_532_860_61,
    -0.072_815_845_483_676_724_861,
    -0.009_690_363_192_872_318_484_5,
    0.002_053_834_420_303_345_866_2,
    0.002_325_370_065_467_300_057_5,
    0.000_793_323_817_301_062_701_75,
    -0.000_238_769_345_430_199_609_87,
    -0.000_527_289_567_057_751_046_07,
    -0.000_352_123_353_803_039_509_6,
    -0.000_034_394_774_418_088_048_178,
    0.000_205_332_814_909_064_794_68,
    0.000_270_184_439_543_903_526_67,
    0.000_167_272_912_105_140_193_35,
    -0.000_027_463_806_603_760_158_86,
    -0.000_209_209_262_059_299_945_84,
    -0.000_283_468_655_320_241_446_64,
    -0.000_199_696_858_308_969_774_71,
];

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = STIELTJES[0];

/// `2 / sqrt(3)`.
pub const TWO_OVER_SQRT3: f64 = 1.154_700_538_379_251_5;

/// Read-only view of the tabulated constants `gamma_0..=gamma_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StieltjesTable {
    values: &'static [f64],
}

impl StieltjesTable {
    pub fn up_to(max_index: usize) -> Result<Self> {
        if max_index > MAX_STIELTJES_INDEX {
            return Err(Error::StieltjesIndex(max_index));
        }
        Ok(Self {
            values: &STIELTJES[..=max_index],
        })
    }

    pub fn values(&self) -> &[f64] {
        self.values
    }

    pub fn get(&self, m: usize) -> Option<f64> {
        self.values.get(m).copied()
    }
}

pub fn stieltjes_constant(m: usize) -> Result<f64> {
    STIELTJES.get(m).copied().ok_or(Error::StieltjesIndex(m))
}

/// Two-term prediction for the expected number of zeros of the `k`-th
/// derivative on `[T, 2T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticPrediction {
    pub main_term: f64,
    pub second_term: f64,
    pub total: f64,
    /// `T / (log T)^{2k+1}`, the size of the neglected remainder.
    pub error_scale: f64,
    pub k: u32,
}

/// Leading coefficient `(1/pi) sqrt((2k+1)/(2k+3))` of `T log T`.
pub fn main_coefficient(k: u32) -> f64 {
    let r = (2.0 * f64::from(k) + 1.0) / (2.0 * f64::from(k) + 3.0);
    r.sqrt() / PI
}

/// ```text
/// main   = (1/pi) sqrt((2k+1)/(2k+3)) T log T
/// second = -(gamma_{2k} / 2pi) sqrt((2k+1)^3/(2k+3)) T / (log T)^{2k}
/// ```
///
/// For `k > 8` the index `2k` leaves the Stieltjes table and the call fails.
pub fn predict_expected_zeros(cutoff: f64, k: u32) -> Result<AsymptoticPrediction> {
    if !(cutoff >= 2.0) {
        return Err(Error::Unsupported(format!(
            "asymptotic prediction needs T >= 2, got {cutoff}"
        )));
    }
    let gamma = stieltjes_constant(2 * k as usize)?;
    let l = cutoff.ln();
    let a = 2.0 * f64::from(k) + 1.0;
    let b = 2.0 * f64::from(k) + 3.0;
    let main_term = (a / b).sqrt() / PI * cutoff * l;
    let second_term =
        -(gamma / (2.0 * PI)) * (a * a * a / b).sqrt() * cutoff / l.powi(2 * k as i32);
    Ok(AsymptoticPrediction {
        main_term,
        second_term,
        total: main_term + second_term,
        error_scale: cutoff / l.powi(2 * k as i32 + 1),
        k,
    })
}

/// Main terms of `N_zeta(T) = (T/2pi) log(T/2pi) - T/2pi + O(log T)`.
///
/// Returned unmodified even where it is negative (small `T`).
pub fn zeta_zero_count(cutoff: f64) -> f64 {
    let x = cutoff / (2.0 * PI);
    x * x.ln() - x
}

/// `ek_value / (N_zeta(2T) - N_zeta(T))`; tends to `2/sqrt(3)` for `k = 0`.
pub fn model_vs_zeta_ratio(cutoff: f64, _k: u32, ek_value: f64) -> Result<f64> {
    let denominator = zeta_zero_count(2.0 * cutoff) - zeta_zero_count(cutoff);
    if !(denominator > 0.0) {
        return Err(Error::Unsupported(format!(
            "zeta zero count difference {denominator} is not positive at T = {cutoff}"
        )));
    }
    Ok(ek_value / denominator)
}

/// `sum_{n <= T} (log n)^m / n - (log T)^{m+1}/(m+1) - gamma_m`.
pub fn stieltjes_sum_check(cutoff: f64, m: u32) -> Result<f64> {
    let gamma = stieltjes_constant(m as usize)?;
    let l = cutoff.ln();
    Ok(log_moment_sum(cutoff, m, 0.5) - l.powi(m as i32 + 1) / (f64::from(m) + 1.0) - gamma)
}
