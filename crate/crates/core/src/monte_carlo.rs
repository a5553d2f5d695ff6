//! Simulation ground truth: draw coefficient vectors, count sign changes of
//! each realization on a uniform grid, and aggregate.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::{eval_grid, eval_polynomial, GridEvaluation, WeightTable};
use crate::model::{sample_coefficients, CoefficientSample, Interval, Part, PolynomialSpec};
use crate::summation::pairwise_sum;

/// Grid values below this multiple of `sum |X_n| w_n` count as exact zeros.
pub const EXACT_ZERO_RELATIVE: f64 = 1e-13;

/// Mean zero spacing `pi / (log T sqrt((2k+1)/(2k+3)))` implied by the
/// leading-order density; `pi sqrt(3) / log T` for `k = 0`.
pub fn mean_zero_spacing(cutoff: f64, k: u32) -> f64 {
    let kf = f64::from(k);
    PI / cutoff.ln() * ((2.0 * kf + 3.0) / (2.0 * kf + 1.0)).sqrt()
}

/// One eighth of [`mean_zero_spacing`].
pub fn default_step(cutoff: f64, k: u32) -> f64 {
    mean_zero_spacing(cutoff, k) / 8.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootCountResult {
    pub trial_index: u64,
    pub count: usize,
    /// Refined zero locations, ascending; `None` when only counting.
    pub roots: Option<Vec<f64>>,
    /// The grid step actually used (at most the requested one).
    pub grid_step: f64,
    /// Set when the step exceeds half the mean zero spacing.
    pub coarse_step_warning: bool,
}

/// Where a zero lies relative to the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Crossing {
    /// Sign change strictly inside cell `i` (between points `i` and `i+1`).
    Cell(usize),
    /// Exact zero at grid point `i`.
    Point(usize),
}

fn sign(v: f64, zero: f64) -> i8 {
    if v.abs() < zero {
        0
    } else if v > 0.0 {
        1
    } else {
        -1
    }
}

/// Zeros from the signs of grid values.
///
/// A run of exact zeros between opposite signs is one zero, placed at the
/// leftmost point of the run; between equal signs it is a touch and is not
/// counted. Runs at either end of the grid count once.
fn crossings(values: &[f64], zero: f64) -> Vec<Crossing> {
    let mut out = Vec::new();
    let mut last_nonzero: Option<(usize, i8)> = None;
    let mut run_start: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        let s = sign(v, zero);
        if s == 0 {
            run_start.get_or_insert(i);
            continue;
        }
        match (last_nonzero, run_start) {
            (None, Some(start)) => out.push(Crossing::Point(start)),
            (Some((_, prev)), Some(start)) if prev != s => out.push(Crossing::Point(start)),
            (Some((j, prev)), None) if prev != s => out.push(Crossing::Cell(j)),
            _ => {}
        }
        last_nonzero = Some((i, s));
        run_start = None;
    }
    if let Some(start) = run_start {
        out.push(Crossing::Point(start));
    }
    out
}

fn check_step(spec: &PolynomialSpec, step: f64) -> Result<bool> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidStep(step));
    }
    Ok(step > 0.5 * mean_zero_spacing(spec.cutoff(), spec.order()))
}

fn grid_for(
    sample: &CoefficientSample,
    table: &WeightTable,
    interval: Interval,
    step: f64,
) -> Result<(GridEvaluation, f64)> {
    if sample.spec().is_degenerate() {
        return Err(Error::DegenerateSpec);
    }
    let grid = eval_grid(sample, table, interval, step)?;
    let zero = EXACT_ZERO_RELATIVE * table.l1_mass(sample);
    Ok((grid, zero))
}

/// Counts zeros on `interval` and refines each by bisection until its
/// bracket is no wider than `refine_tol`.
pub fn count_roots(
    sample: &CoefficientSample,
    table: &WeightTable,
    interval: Interval,
    step: f64,
    refine_tol: f64,
) -> Result<RootCountResult> {
    if !(refine_tol > 0.0) {
        return Err(Error::InvalidTolerance(refine_tol));
    }
    let coarse_step_warning = check_step(sample.spec(), step)?;
    let (grid, zero) = grid_for(sample, table, interval, step)?;
    let found = crossings(&grid.values, zero);
    let mut roots = Vec::with_capacity(found.len());
    for c in &found {
        let r = match *c {
            Crossing::Point(i) => grid.grid[i],
            Crossing::Cell(i) => bisect(
                sample,
                table,
                (grid.grid[i], grid.values[i]),
                grid.grid[i + 1],
                refine_tol,
            )?,
        };
        roots.push(r);
    }
    Ok(RootCountResult {
        trial_index: sample.trial_index(),
        count: found.len(),
        roots: Some(roots),
        grid_step: grid.step,
        coarse_step_warning,
    })
}

/// Counts zeros without locating them.
pub fn count_sign_changes(
    sample: &CoefficientSample,
    table: &WeightTable,
    interval: Interval,
    step: f64,
) -> Result<RootCountResult> {
    let coarse_step_warning = check_step(sample.spec(), step)?;
    let (grid, zero) = grid_for(sample, table, interval, step)?;
    Ok(RootCountResult {
        trial_index: sample.trial_index(),
        count: crossings(&grid.values, zero).len(),
        roots: None,
        grid_step: grid.step,
        coarse_step_warning,
    })
}

fn bisect(
    sample: &CoefficientSample,
    table: &WeightTable,
    (mut a, fa): (f64, f64),
    mut b: f64,
    tol: f64,
) -> Result<f64> {
    let left_positive = fa > 0.0;
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = eval_polynomial(sample, table, m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm > 0.0) == left_positive {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialAggregate {
    pub trials: usize,
    pub mean: f64,
    /// Sample standard deviation over `sqrt(trials)`.
    pub stderr: f64,
    pub min: usize,
    pub max: usize,
    pub per_trial_counts: Vec<usize>,
    pub grid_step: f64,
}

impl TrialAggregate {
    fn from_counts(counts: Vec<usize>, grid_step: f64) -> Self {
        let n = counts.len() as f64;
        let as_f64: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
        let mean = pairwise_sum(&as_f64) / n;
        let squares: Vec<f64> = as_f64.iter().map(|c| (c - mean) * (c - mean)).collect();
        let variance = pairwise_sum(&squares) / (n - 1.0);
        Self {
            trials: counts.len(),
            mean,
            stderr: (variance / n).sqrt(),
            min: counts.iter().copied().min().unwrap_or(0),
            max: counts.iter().copied().max().unwrap_or(0),
            per_trial_counts: counts,
            grid_step,
        }
    }
}

/// Counts zeros of `trials` independent realizations, trial `i` drawn from
/// stream `(master_seed, i)`. Parallel over trials; the result does not
/// depend on the thread count.
pub fn run_trials(
    spec: &PolynomialSpec,
    interval: Interval,
    trials: usize,
    master_seed: u64,
    step: f64,
) -> Result<TrialAggregate> {
    if trials < 2 {
        return Err(Error::TooFew {
            what: "trials",
            min: 2,
            got: trials,
        });
    }
    if spec.is_degenerate() {
        return Err(Error::DegenerateSpec);
    }
    check_step(spec, step)?;
    let table = WeightTable::new(spec);
    let results: Vec<RootCountResult> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let sample = sample_coefficients(spec, master_seed, i);
            count_sign_changes(&sample, &table, interval, step)
        })
        .collect::<Result<_>>()?;
    let grid_step = results.first().map_or(step, |r| r.grid_step);
    Ok(TrialAggregate::from_counts(
        results.into_iter().map(|r| r.count).collect(),
        grid_step,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaRow {
    pub sigma: f64,
    pub mean: f64,
    pub stderr: f64,
    /// `mean / (T log T)`.
    pub normalized_mean: f64,
}

/// `run_trials` for `k = 0`, cosine part, on `[T, 2T]` at each exponent.
pub fn sigma_sweep(cutoff: f64, sigmas: &[f64], trials: usize, seed: u64) -> Result<Vec<SigmaRow>> {
    sigmas
        .iter()
        .map(|&sigma| {
            let spec = PolynomialSpec::new(cutoff, 0, sigma, Part::Cosine)?;
            let agg = run_trials(
                &spec,
                spec.dyadic_interval(),
                trials,
                seed,
                default_step(cutoff, 0),
            )?;
            Ok(SigmaRow {
                sigma,
                mean: agg.mean,
                stderr: agg.stderr,
                normalized_mean: agg.mean / (cutoff * cutoff.ln()),
            })
        })
        .collect()
}
