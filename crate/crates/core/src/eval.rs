//! Evaluation of weighted cosine/sine Dirichlet sums.
//!
//! Everything here is a sum over `n <= T` of `a_n cos(t log n)` or
//! `a_n sin(t log n)` for some amplitude `a_n` built from the weights
//! `w_n = (log n)^k / n^sigma`. Three evaluation paths exist:
//!
//! * direct: one `sin_cos` per term, used for single points and as the
//!   reference for the other two;
//! * phase rotation ([`eval_grid`]): walks a uniform grid by multiplying each
//!   `e^{i t log n}` with the fixed rotation `e^{i step log n}`;
//! * multiplicative ([`MultiplicativePhases`]): `n^{i theta}` is completely
//!   multiplicative in `n`, so only primes need a `sin_cos` and composites
//!   are one complex product each. Used at the irregular nodes of quadrature.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{CoefficientSample, Interval, Part, PolynomialSpec};
use crate::summation::{compensated_dot, compensated_sum, CompensatedSum};

/// Steps between modulus renormalizations in the phase recurrence.
pub const RENORMALIZATION_PERIOD: usize = 512;

/// Per-spec amplitudes, computed once and shared read-only.
///
/// Index `i` holds the term `n = i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    spec: PolynomialSpec,
    logs: Vec<f64>,
    weights: Vec<f64>,
    squared_weights: Vec<f64>,
}

impl WeightTable {
    pub fn new(spec: &PolynomialSpec) -> Self {
        let k = spec.order() as i32;
        let sigma = spec.sigma();
        let logs: Vec<f64> = (1..=spec.terms()).map(|n| (n as f64).ln()).collect();
        let weights: Vec<f64> = logs
            .iter()
            .map(|&l| l.powi(k) * (-sigma * l).exp())
            .collect();
        let squared_weights = weights.iter().map(|w| w * w).collect();
        Self {
            spec: *spec,
            logs,
            weights,
            squared_weights,
        }
    }

    /// The same table with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let weights: Vec<f64> = self.weights.iter().map(|w| w * factor).collect();
        let squared_weights = weights.iter().map(|w| w * w).collect();
        Self {
            spec: self.spec,
            logs: self.logs.clone(),
            weights,
            squared_weights,
        }
    }

    pub fn spec(&self) -> &PolynomialSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.logs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.logs.is_empty()
    }

    pub fn logs(&self) -> &[f64] {
        &self.logs
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn squared_weights(&self) -> &[f64] {
        &self.squared_weights
    }

    /// `sum_n |X_n| w_n`, the scale of every pointwise tolerance.
    pub fn l1_mass(&self, sample: &CoefficientSample) -> f64 {
        compensated_sum(
            sample
                .values()
                .iter()
                .zip(&self.weights)
                .map(|(x, w)| x.abs() * w),
        )
    }

    fn check(&self, sample: &CoefficientSample) -> Result<()> {
        if sample.spec() == &self.spec {
            Ok(())
        } else {
            Err(Error::SpecMismatch)
        }
    }
}

/// `S(t) = sum_n X_n w_n cos(t log n)` (or `sin`), evaluated directly.
pub fn eval_polynomial(sample: &CoefficientSample, table: &WeightTable, t: f64) -> Result<f64> {
    table.check(sample)?;
    let part = table.spec.part();
    Ok(compensated_sum(
        sample
            .values()
            .iter()
            .zip(&table.weights)
            .zip(&table.logs)
            .map(|((x, w), l)| {
                let (s, c) = (t * l).sin_cos();
                x * w * part.apply(c, s)
            }),
    ))
}

/// Polynomial values on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridEvaluation {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub step: f64,
}

/// Values on a uniform grid covering `interval`.
///
/// The requested `step` is an upper bound: the grid uses
/// `ceil(length / step)` equal cells so that both endpoints are grid points.
pub fn eval_grid(
    sample: &CoefficientSample,
    table: &WeightTable,
    interval: Interval,
    step: f64,
) -> Result<GridEvaluation> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidStep(step));
    }
    // a few ulps of slack so that step = length / c yields exactly c cells
    let ratio = interval.length() / step;
    let cells = (ratio * (1.0 - 4.0 * f64::EPSILON)).ceil().max(1.0) as usize;
    let actual = interval.length() / cells as f64;
    let mut eval = eval_uniform(sample, table, interval.lo(), actual, cells + 1)?;
    // pin the right endpoint against accumulated rounding in lo + i * step
    if let Some(last) = eval.grid.last_mut() {
        *last = interval.hi();
    }
    Ok(eval)
}

/// `count` values at `start + i * step` by phase rotation.
pub fn eval_uniform(
    sample: &CoefficientSample,
    table: &WeightTable,
    start: f64,
    step: f64,
    count: usize,
) -> Result<GridEvaluation> {
    table.check(sample)?;
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidStep(step));
    }
    let mut coeffs = Vec::with_capacity(table.len());
    let mut re = Vec::with_capacity(table.len());
    let mut im = Vec::with_capacity(table.len());
    let mut rot_re = Vec::with_capacity(table.len());
    let mut rot_im = Vec::with_capacity(table.len());
    for ((x, w), l) in sample.values().iter().zip(&table.weights).zip(&table.logs) {
        let c = x * w;
        if c == 0.0 {
            continue;
        }
        coeffs.push(c);
        let (s, co) = (start * l).sin_cos();
        re.push(co);
        im.push(s);
        let (rs, rc) = (step * l).sin_cos();
        rot_re.push(rc);
        rot_im.push(rs);
    }

    let part = table.spec.part();
    let mut grid = Vec::with_capacity(count);
    let mut values = Vec::with_capacity(count);
    for i in 0..count {
        grid.push(start + i as f64 * step);
        let v = match part {
            Part::Cosine => compensated_dot(&coeffs, &re),
            Part::Sine => compensated_dot(&coeffs, &im),
        };
        values.push(v);
        if i + 1 == count {
            break;
        }
        for j in 0..re.len() {
            let (a, b) = (re[j], im[j]);
            re[j] = a * rot_re[j] - b * rot_im[j];
            im[j] = a * rot_im[j] + b * rot_re[j];
        }
        if (i + 1) % RENORMALIZATION_PERIOD == 0 {
            for (a, b) in re.iter_mut().zip(im.iter_mut()) {
                let inv = (*a * *a + *b * *b).sqrt().recip();
                *a *= inv;
                *b *= inv;
            }
        }
    }
    Ok(GridEvaluation { grid, values, step })
}

/// `P_j(t) = sum_n w_n^2 (log n)^j cos(t log n)` (or `sin`).
///
/// With `u_T(t) = sum_n (log n)^{2k} n^{-2 sigma} cos(t log n)`:
/// `P_0(t) = u_T(t)` for the cosine part, `P_1(t)` with the sine part is
/// `-u_T'(t)`, and `P_2(t)` with the cosine part is `-u_T''(t)`.
pub fn u_moment(table: &WeightTable, j: usize, t: f64, part: Part) -> Result<f64> {
    if j > 2 {
        return Err(Error::MomentIndex(j));
    }
    Ok(compensated_sum(
        table
            .squared_weights
            .iter()
            .zip(&table.logs)
            .map(|(w2, l)| {
                let (s, c) = (t * l).sin_cos();
                w2 * l.powi(j as i32) * part.apply(c, s)
            }),
    ))
}

/// `sum_{n <= T} (log n)^m / n^{2 sigma}`, summed directly.
pub fn log_moment_sum(cutoff: f64, m: u32, sigma: f64) -> f64 {
    let terms = if cutoff >= 1.0 {
        cutoff.floor() as usize
    } else {
        0
    };
    let mut acc = CompensatedSum::new();
    for n in 1..=terms {
        let l = (n as f64).ln();
        acc.add(l.powi(m as i32) * (-2.0 * sigma * l).exp());
    }
    acc.value()
}

/// Factorization tables used to build `n^{i theta}` from prime phases.
///
/// Every composite `n` is split as `p * m` with `p` its smallest prime
/// factor, so `n^{i theta} = p^{i theta} m^{i theta}` with both factors
/// already known when `n` is reached in increasing order.
#[derive(Debug, Clone)]
pub struct MultiplicativePhases {
    terms: usize,
    /// Zero-based indices `p - 1` of the primes.
    primes: Vec<u32>,
    prime_logs: Vec<f64>,
    /// `(n - 1, p - 1, n / p - 1)` for every composite, ascending in `n`.
    composites: Vec<[u32; 3]>,
}

impl MultiplicativePhases {
    /// Phases for `n = 1..=terms`.
    pub fn new(terms: usize) -> Self {
        let mut smallest_factor = vec![0u32; terms + 1];
        let mut primes = Vec::new();
        let mut composites = Vec::new();
        for n in 2..=terms {
            if smallest_factor[n] == 0 {
                primes.push((n - 1) as u32);
                let mut m = n;
                while m <= terms {
                    if smallest_factor[m] == 0 {
                        smallest_factor[m] = n as u32;
                    }
                    m += n;
                }
            } else {
                let p = smallest_factor[n] as usize;
                composites.push([(n - 1) as u32, (p - 1) as u32, (n / p - 1) as u32]);
            }
        }
        let prime_logs = primes.iter().map(|&i| (i as f64 + 1.0).ln()).collect();
        Self {
            terms,
            primes,
            prime_logs,
            composites,
        }
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    /// `log p` for every prime `p <= terms`, ascending.
    pub fn prime_logs(&self) -> &[f64] {
        &self.prime_logs
    }

    /// Writes `cos(theta log p)`, `sin(theta log p)` for the primes.
    pub fn prime_phases(&self, theta: f64, cos: &mut [f64], sin: &mut [f64]) {
        for ((l, c), s) in self
            .prime_logs
            .iter()
            .zip(cos.iter_mut())
            .zip(sin.iter_mut())
        {
            let (sv, cv) = (theta * l).sin_cos();
            *c = cv;
            *s = sv;
        }
    }

    /// Expands prime phases (as from [`Self::prime_phases`]) to all `n`.
    pub fn expand(&self, prime_cos: &[f64], prime_sin: &[f64], cos: &mut [f64], sin: &mut [f64]) {
        let terms = self.terms;
        assert!(cos.len() >= terms && sin.len() >= terms);
        assert!(prime_cos.len() >= self.primes.len() && prime_sin.len() >= self.primes.len());
        if terms == 0 {
            return;
        }
        cos[0] = 1.0;
        sin[0] = 0.0;
        for ((&i, &c), &s) in self.primes.iter().zip(prime_cos).zip(prime_sin) {
            cos[i as usize] = c;
            sin[i as usize] = s;
        }
        for &[n, p, m] in &self.composites {
            let (cp, sp) = (cos[p as usize], sin[p as usize]);
            let (cm, sm) = (cos[m as usize], sin[m as usize]);
            cos[n as usize] = cp * cm - sp * sm;
            sin[n as usize] = cp * sm + sp * cm;
        }
    }

    /// Writes `cos(theta log n)` and `sin(theta log n)` for every `n`.
    pub fn fill(&self, theta: f64, cos: &mut [f64], sin: &mut [f64]) {
        let k = self.primes.len();
        let (mut pc, mut ps) = (vec![0.0; k], vec![0.0; k]);
        self.prime_phases(theta, &mut pc, &mut ps);
        self.expand(&pc, &ps, cos, sin);
    }

    /// `sum_n a_n n^{i theta}` for complex amplitudes.
    pub fn complex_sum(
        &self,
        theta: f64,
        amplitudes: &[Complex64],
        cos: &mut [f64],
        sin: &mut [f64],
    ) -> Complex64 {
        self.fill(theta, cos, sin);
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for ((a, c), s) in amplitudes.iter().zip(cos.iter()).zip(sin.iter()) {
            re.add(a.re * c - a.im * s);
            im.add(a.re * s + a.im * c);
        }
        Complex64::new(re.value(), im.value())
    }
}
