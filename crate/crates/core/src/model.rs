//! Domain types shared by every other module: the polynomial family, the
//! counting interval and the Gaussian coefficient draws.
//!
//! The random polynomial is
//!
//! ```text
//! S(t) = sum_{n <= T} X_n (log n)^k n^(-sigma) cos(t log n)     (or sin)
//! ```
//!
//! with `X_n` i.i.d. standard normal. Up to sign this is the `k`-th
//! derivative of the cosine (`k` even) or sine (`k` odd) base polynomial.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which trigonometric function multiplies the weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Cosine,
    Sine,
}

impl Part {
    /// Part carried by the `k`-th derivative of the cosine polynomial.
    pub fn for_derivative(k: u32) -> Part {
        if k.is_multiple_of(2) {
            Part::Cosine
        } else {
            Part::Sine
        }
    }

    #[inline]
    pub fn apply(self, cos: f64, sin: f64) -> f64 {
        match self {
            Part::Cosine => cos,
            Part::Sine => sin,
        }
    }
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Part::Cosine => "cosine",
            Part::Sine => "sine",
        })
    }
}

impl FromStr for Part {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cos" | "cosine" => Ok(Part::Cosine),
            "sin" | "sine" => Ok(Part::Sine),
            other => Err(format!("unknown part '{other}' (expected cosine or sine)")),
        }
    }
}

/// The family `(T, k, sigma, part)` of a random Dirichlet polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolynomialSpec {
    cutoff: f64,
    order: u32,
    sigma: f64,
    part: Part,
    degenerate: bool,
}

impl PolynomialSpec {
    /// Validates `T > 1`, `k >= 0`, `sigma >= 0`.
    ///
    /// Specs whose every weight vanishes are accepted but flagged: the sine
    /// part with `T < 2` (only `sin(t log 1) = 0` survives) and any `k >= 1`
    /// with `T < 2` (the weight `(log 1)^k` is zero).
    pub fn new(cutoff: f64, order: i64, sigma: f64, part: Part) -> Result<Self> {
        if !(cutoff.is_finite() && cutoff > 1.0) {
            return Err(Error::CutoffTooSmall(cutoff));
        }
        if order < 0 {
            return Err(Error::NegativeOrder(order));
        }
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::NegativeSigma(sigma));
        }
        let order = u32::try_from(order)
            .map_err(|_| Error::Unsupported(format!("derivative order {order} too large")))?;
        let degenerate = cutoff < 2.0 && (part == Part::Sine || order >= 1);
        Ok(Self {
            cutoff,
            order,
            sigma,
            part,
            degenerate,
        })
    }

    /// The base cosine polynomial differentiated `k` times.
    pub fn derivative(cutoff: f64, order: u32, sigma: f64) -> Result<Self> {
        Self::new(cutoff, i64::from(order), sigma, Part::for_derivative(order))
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn part(&self) -> Part {
        self.part
    }

    /// `true` when the polynomial is identically zero.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Number of terms, `floor(T)`.
    pub fn terms(&self) -> usize {
        self.cutoff.floor() as usize
    }

    /// The default counting interval `[T, 2T]`.
    pub fn dyadic_interval(&self) -> Interval {
        Interval {
            lo: self.cutoff,
            hi: 2.0 * self.cutoff,
        }
    }
}

/// `make_spec` under its operational name.
pub fn make_spec(cutoff: f64, order: i64, sigma: f64, part: Part) -> Result<PolynomialSpec> {
    PolynomialSpec::new(cutoff, order, sigma, part)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Self { lo, hi })
        } else {
            Err(Error::DegenerateInterval { lo, hi })
        }
    }

    /// `[T, 2T]`.
    pub fn dyadic(cutoff: f64) -> Result<Self> {
        Self::new(cutoff, 2.0 * cutoff)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, t: f64) -> bool {
        self.lo <= t && t <= self.hi
    }
}

/// Per-trial stream seed.
///
/// `splitmix64(splitmix64(master_seed) ^ trial_index * 0x9E3779B97F4A7C15)`;
/// the result seeds a ChaCha8 generator. Trials depend only on their own
/// index, never on how many trials ran before them or on which thread.
pub fn stream_seed(master_seed: u64, trial_index: u64) -> u64 {
    splitmix64(splitmix64(master_seed) ^ trial_index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// SplitMix64 output function.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic generator for one trial.
pub fn trial_rng(master_seed: u64, trial_index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(master_seed, trial_index))
}

/// One realization of `X_1..X_floor(T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSample {
    spec: PolynomialSpec,
    master_seed: u64,
    trial_index: u64,
    values: Vec<f64>,
}

impl CoefficientSample {
    /// Fixed coefficients, for deterministic experiments. Seed and index are
    /// recorded as zero.
    pub fn from_values(spec: PolynomialSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.terms() {
            return Err(Error::Unsupported(format!(
                "expected {} coefficients for T = {}, got {}",
                spec.terms(),
                spec.cutoff(),
                values.len()
            )));
        }
        Ok(Self {
            spec,
            master_seed: 0,
            trial_index: 0,
            values,
        })
    }

    pub fn spec(&self) -> &PolynomialSpec {
        &self.spec
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn trial_index(&self) -> u64 {
        self.trial_index
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Draws `floor(T)` standard normals (ziggurat, via `rand_distr`) from the
/// stream of `(master_seed, trial_index)`.
pub fn sample_coefficients(
    spec: &PolynomialSpec,
    master_seed: u64,
    trial_index: u64,
) -> CoefficientSample {
    let mut rng = trial_rng(master_seed, trial_index);
    let values = (0..spec.terms())
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    CoefficientSample {
        spec: *spec,
        master_seed,
        trial_index,
        values,
    }
}
