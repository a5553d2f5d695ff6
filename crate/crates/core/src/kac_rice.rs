//! Expected zero density of the Gaussian random polynomial and its integral.
//!
//! For `f_n(t) = w_n cos(t log n)` the Edelman-Kostlan integrand is
//! `(1/pi) sqrt(A/B - C^2)` with
//!
//! ```text
//! B = sum f_n^2    = (M_0 + P_0(2t)) / 2
//! A = sum f_n'^2   = (M_2 - P_2(2t)) / 2
//! C = sum f_n f_n' / B = -P~_1(2t) / (2B)
//! ```
//!
//! where `M_j = sum w_n^2 (log n)^j`, `P_j(s) = sum w_n^2 (log n)^j cos(s log n)`
//! and `P~_1(s) = sum w_n^2 log n sin(s log n)`. For the sine part
//! (`f_n = w_n sin(t log n)`) `sin^2` and `cos^2` trade places, which flips
//! the sign of `P_0` and `P_2` and of `C`; `C` only enters squared.
//! Near `t = 0` the differences `M_j - P_j` cancel, and `B`, `A` are summed
//! termwise from `sin^2`, `cos^2` instead.
//!
//! The breakdown also carries the normalized fluctuations used in the
//! asymptotic analysis, with `L = log T`:
//!
//! ```text
//! x = (2k+1)(gamma_{2k}   + u(2t))   / L^{2k+1}
//! y = (2k+3)(gamma_{2k+2} + u''(2t)) / L^{2k+3}
//! z = (2k+3) C^2 / ((2k+1) L^2)
//! w = (1+y)/(1+x) - 1 - z
//! ```
//!
//! so that `A/B - C^2 ~ ((2k+1)/(2k+3)) L^2 (1 + w)`, with `u = +-P_0` and
//! `u'' = -+P_2` (upper sign for cosine).

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::stieltjes_constant;
use crate::error::{Error, Result};
use crate::eval::{log_moment_sum, u_moment, MultiplicativePhases, WeightTable};
use crate::model::{trial_rng, Interval, Part, PolynomialSpec};
use crate::quadrature::CompositeRule;
use crate::summation::{compensated_dot, compensated_sum, pairwise_sum, CompensatedSum};

/// Largest tolerated negative value of `A/B - C^2` before clamping.
pub const NEGATIVE_DISCRIMINANT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityBreakdown {
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub w: f64,
    /// Expected zeros per unit `t`.
    pub density: f64,
}

impl DensityBreakdown {
    /// `A/B - C^2` before clamping.
    pub fn discriminant(&self) -> f64 {
        self.a / self.b - self.c * self.c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureMethod {
    CompositeDeterministic,
    StratifiedRandom,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub method: QuadratureMethod,
    pub nodes_used: usize,
    /// Standard error of the stratified estimate; zero for the deterministic rule.
    pub stderr: f64,
}

/// Constants that turn the raw covariance sums into `x, y, z, w`.
#[derive(Debug, Clone, Copy)]
struct Normalization {
    log_t: f64,
    order: u32,
    gamma_low: f64,
    gamma_high: f64,
    /// One term carries all the variance, so `(f, f')` is rank one and the
    /// zeros sit at fixed points: the density vanishes identically.
    single_term: bool,
}

impl Normalization {
    fn new(spec: &PolynomialSpec, moments: &[f64; 3]) -> Self {
        let log_t = spec.cutoff().ln();
        let k = spec.order();
        let a = 2.0 * f64::from(k) + 1.0;
        let b = a + 2.0;
        // Beyond the Stieltjes table, use the finite-T residual of the sum.
        let gamma_low =
            stieltjes_constant(2 * k as usize).unwrap_or_else(|_| moments[0] - log_t.powf(a) / a);
        let gamma_high = stieltjes_constant(2 * k as usize + 2)
            .unwrap_or_else(|_| moments[2] - log_t.powf(b) / b);
        // n = 1 drops out unless k = 0 and the part is cosine
        let n1 = usize::from(k == 0 && spec.part() == Part::Cosine);
        Self {
            log_t,
            order: k,
            gamma_low,
            gamma_high,
            single_term: spec.terms() - 1 + n1 <= 1,
        }
    }

    fn fluctuations(&self, part_sign: f64, p0: f64, p2: f64, c: f64) -> (f64, f64, f64, f64) {
        let a = 2.0 * f64::from(self.order) + 1.0;
        let b = a + 2.0;
        let l = self.log_t;
        let x = a * (self.gamma_low + part_sign * p0) / l.powf(a);
        let y = b * (self.gamma_high - part_sign * p2) / l.powf(b);
        let z = b * c * c / (a * l * l);
        let w = (1.0 + y) / (1.0 + x) - 1.0 - z;
        (x, y, z, w)
    }
}

/// `[B, A, sum f f']` from the double-angle sums.
fn double_angle_sums(part: Part, moments: &[f64; 3], p0: f64, p1_sin: f64, p2: f64) -> [f64; 3] {
    let sign = part_sign(part);
    // sum f f' = -P~_1/2 (cosine) or +P~_1/2 (sine)
    [
        0.5 * (moments[0] + sign * p0),
        0.5 * (moments[2] - sign * p2),
        -0.5 * sign * p1_sin,
    ]
}

/// `M_j -+ P_j` cancels where `cos(2t log n)` is near 1 for the dominant
/// terms (around `t = 0`); below this fraction of `M_j` the sums are
/// recomputed from half-angle phases.
const CANCELLATION_FRACTION: f64 = 1.0 / 16.0;

fn cancels(sums: &[f64; 3], moments: &[f64; 3]) -> bool {
    sums[0] < CANCELLATION_FRACTION * moments[0] || sums[1] < CANCELLATION_FRACTION * moments[2]
}

/// `[B, A, sum f f']` summed termwise from `cos(t log n)`, `sin(t log n)`
/// and the amplitudes `w^2 (log n)^j`; no cancellation.
fn half_angle_sums(part: Part, amplitudes: [&[f64]; 3], cos: &[f64], sin: &[f64]) -> [f64; 3] {
    let mut sums = [CompensatedSum::new(); 3];
    for i in 0..cos.len() {
        // f = w f0, f' = w log n f1
        let (f0, f1) = match part {
            Part::Cosine => (cos[i], -sin[i]),
            Part::Sine => (sin[i], cos[i]),
        };
        sums[0].add(amplitudes[0][i] * f0 * f0);
        sums[1].add(amplitudes[2][i] * f1 * f1);
        sums[2].add(amplitudes[1][i] * f0 * f1);
    }
    sums.map(|s| s.value())
}

fn part_sign(part: Part) -> f64 {
    match part {
        Part::Cosine => 1.0,
        Part::Sine => -1.0,
    }
}

fn assemble(
    t: f64,
    part: Part,
    norm: &Normalization,
    [b, a, cross]: [f64; 3],
    p0: f64,
    p2: f64,
) -> Result<DensityBreakdown> {
    if !(b > 0.0) {
        return Err(Error::NonPositiveVariance { t, b });
    }
    let c = cross / b;
    let disc = a / b - c * c;
    debug_assert!(
        disc >= -NEGATIVE_DISCRIMINANT_TOLERANCE * (a / b).abs().max(1.0),
        "A/B - C^2 = {disc} at t = {t}"
    );
    let density = if norm.single_term {
        0.0
    } else {
        disc.max(0.0).sqrt() / PI
    };
    let (x, y, z, w) = norm.fluctuations(part_sign(part), p0, p2, c);
    Ok(DensityBreakdown {
        t,
        a,
        b,
        c,
        x,
        y,
        z,
        w,
        density,
    })
}

/// Density at `t`, assembled from [`u_moment`] and [`log_moment_sum`].
pub fn density_at(spec: &PolynomialSpec, t: f64) -> Result<DensityBreakdown> {
    if spec.is_degenerate() {
        return Err(Error::DegenerateSpec);
    }
    let table = WeightTable::new(spec);
    let k = spec.order();
    let moments = [0, 1, 2].map(|j| log_moment_sum(spec.cutoff(), 2 * k + j, spec.sigma()));
    direct_breakdown(&table, &moments, t)
}

/// Density at `t` using the weights of `table` as given (for example a
/// rescaled table).
pub fn density_with_table(table: &WeightTable, t: f64) -> Result<DensityBreakdown> {
    if table.spec().is_degenerate() {
        return Err(Error::DegenerateSpec);
    }
    direct_breakdown(table, &table_moments(table), t)
}

fn table_moments(table: &WeightTable) -> [f64; 3] {
    [0, 1, 2].map(|j| {
        compensated_sum(
            table
                .squared_weights()
                .iter()
                .zip(table.logs())
                .map(|(w2, l)| w2 * l.powi(j)),
        )
    })
}

fn direct_breakdown(table: &WeightTable, moments: &[f64; 3], t: f64) -> Result<DensityBreakdown> {
    let norm = Normalization::new(table.spec(), moments);
    let p0 = u_moment(table, 0, 2.0 * t, Part::Cosine)?;
    let p1 = u_moment(table, 1, 2.0 * t, Part::Sine)?;
    let p2 = u_moment(table, 2, 2.0 * t, Part::Cosine)?;
    let part = table.spec().part();
    let mut sums = double_angle_sums(part, moments, p0, p1, p2);
    if cancels(&sums, moments) {
        let amplitudes = [0, 1, 2].map(|j| {
            table
                .squared_weights()
                .iter()
                .zip(table.logs())
                .map(|(w2, l)| w2 * l.powi(j))
                .collect::<Vec<_>>()
        });
        let (sin, cos): (Vec<f64>, Vec<f64>) =
            table.logs().iter().map(|l| (t * l).sin_cos()).unzip();
        sums = half_angle_sums(
            part,
            [&amplitudes[0], &amplitudes[1], &amplitudes[2]],
            &cos,
            &sin,
        );
    }
    assemble(t, part, &norm, sums, p0, p2)
}

/// Per-worker buffers for [`KacRiceKernel::breakdown`].
#[derive(Debug, Clone)]
pub struct KernelScratch {
    cos: Vec<f64>,
    sin: Vec<f64>,
    prime_cos: Vec<f64>,
    prime_sin: Vec<f64>,
    node_cos: Vec<f64>,
    node_sin: Vec<f64>,
}

/// Precomputed amplitudes for evaluating the density at many points.
#[derive(Debug, Clone)]
pub struct KacRiceKernel {
    spec: PolynomialSpec,
    phases: MultiplicativePhases,
    amplitudes: [Vec<f64>; 3],
    moments: [f64; 3],
    norm: Normalization,
}

impl KacRiceKernel {
    pub fn new(spec: &PolynomialSpec) -> Result<Self> {
        Self::from_table(&WeightTable::new(spec))
    }

    pub fn from_table(table: &WeightTable) -> Result<Self> {
        if table.spec().is_degenerate() {
            return Err(Error::DegenerateSpec);
        }
        let amplitudes = [0, 1, 2].map(|j| {
            table
                .squared_weights()
                .iter()
                .zip(table.logs())
                .map(|(w2, l)| w2 * l.powi(j))
                .collect::<Vec<_>>()
        });
        let moments = [0, 1, 2].map(|j| compensated_sum(amplitudes[j].iter().copied()));
        Ok(Self {
            spec: *table.spec(),
            phases: MultiplicativePhases::new(table.len()),
            norm: Normalization::new(table.spec(), &moments),
            amplitudes,
            moments,
        })
    }

    pub fn spec(&self) -> &PolynomialSpec {
        &self.spec
    }

    /// `[M_0, M_1, M_2]`.
    pub fn moments(&self) -> [f64; 3] {
        self.moments
    }

    pub fn scratch(&self) -> KernelScratch {
        let n = self.phases.terms();
        let primes = self.phases.prime_logs().len();
        KernelScratch {
            cos: vec![0.0; n],
            sin: vec![0.0; n],
            prime_cos: vec![0.0; primes],
            prime_sin: vec![0.0; primes],
            node_cos: vec![0.0; primes],
            node_sin: vec![0.0; primes],
        }
    }

    /// `[P_0(2t), P~_1(2t), P_2(2t)]` from multiplicative phases.
    pub fn covariance_sums(&self, t: f64, scratch: &mut KernelScratch) -> [f64; 3] {
        self.phases
            .fill(2.0 * t, &mut scratch.cos, &mut scratch.sin);
        self.dots(scratch)
    }

    /// Overwrites the phase buffers of `scratch` when the double-angle
    /// sums cancel.
    fn assemble_at(
        &self,
        t: f64,
        p0: f64,
        p1: f64,
        p2: f64,
        scratch: &mut KernelScratch,
    ) -> Result<DensityBreakdown> {
        let part = self.spec.part();
        let mut sums = double_angle_sums(part, &self.moments, p0, p1, p2);
        if cancels(&sums, &self.moments) {
            self.phases.fill(t, &mut scratch.cos, &mut scratch.sin);
            let [a0, a1, a2] = &self.amplitudes;
            sums = half_angle_sums(part, [a0, a1, a2], &scratch.cos, &scratch.sin);
        }
        assemble(t, part, &self.norm, sums, p0, p2)
    }

    fn dots(&self, scratch: &KernelScratch) -> [f64; 3] {
        [
            compensated_dot(&self.amplitudes[0], &scratch.cos),
            compensated_dot(&self.amplitudes[1], &scratch.sin),
            compensated_dot(&self.amplitudes[2], &scratch.cos),
        ]
    }

    pub fn breakdown(&self, t: f64, scratch: &mut KernelScratch) -> Result<DensityBreakdown> {
        let [p0, p1, p2] = self.covariance_sums(t, scratch);
        self.assemble_at(t, p0, p1, p2, scratch)
    }

    pub fn density(&self, t: f64, scratch: &mut KernelScratch) -> Result<f64> {
        Ok(self.breakdown(t, scratch)?.density)
    }

    /// Integrates `f(breakdown(t))` with `rule`.
    ///
    /// Same value as `rule.integrate` over [`Self::breakdown`], but prime
    /// phases are computed once per panel at its midpoint and rotated to the
    /// nodes by offsets shared by all panels.
    pub fn integrate<const M: usize, F>(&self, rule: &CompositeRule, f: F) -> Result<[f64; M]>
    where
        F: Fn(&DensityBreakdown) -> [f64; M] + Sync + Send,
    {
        let half = rule.half_width();
        let gl = rule.rule();
        let logs = self.phases.prime_logs();
        // e^{2i half x_j log p} for node j, prime p
        let offsets: Vec<(Vec<f64>, Vec<f64>)> = gl
            .nodes()
            .iter()
            .map(|x| {
                logs.iter()
                    .map(|l| (2.0 * half * x * l).sin_cos())
                    .map(|(s, c)| (c, s))
                    .unzip()
            })
            .collect();
        rule.integrate_panels(
            || self.scratch(),
            |mid, half, scratch| {
                self.phases
                    .prime_phases(2.0 * mid, &mut scratch.prime_cos, &mut scratch.prime_sin);
                let mut acc = [CompensatedSum::new(); M];
                for ((x, w), (oc, os)) in gl.nodes().iter().zip(gl.weights()).zip(&offsets) {
                    let t = mid + half * x;
                    for i in 0..logs.len() {
                        let (bc, bs) = (scratch.prime_cos[i], scratch.prime_sin[i]);
                        scratch.node_cos[i] = bc * oc[i] - bs * os[i];
                        scratch.node_sin[i] = bc * os[i] + bs * oc[i];
                    }
                    let KernelScratch {
                        cos,
                        sin,
                        node_cos,
                        node_sin,
                        ..
                    } = scratch;
                    self.phases.expand(node_cos, node_sin, cos, sin);
                    let [p0, p1, p2] = self.dots(scratch);
                    let d = self.assemble_at(t, p0, p1, p2, scratch)?;
                    for (slot, v) in acc.iter_mut().zip(f(&d)) {
                        slot.add(w * half * v);
                    }
                }
                Ok(acc.map(|a| a.value()))
            },
        )
    }
}

/// Knobs for [`expected_count_deterministic_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeterministicOptions {
    pub nodes_per_panel: usize,
    /// Cap on nodes summed over the base and the refined pass.
    pub node_cap: usize,
}

impl Default for DeterministicOptions {
    fn default() -> Self {
        Self {
            nodes_per_panel: 8,
            node_cap: 3_000_000,
        }
    }
}

/// Panel width `pi / (4 log T)`: four panels per period of `cos(2t log T)`.
pub fn panel_width(cutoff: f64) -> f64 {
    PI / (4.0 * cutoff.ln())
}

/// The panel rule used for `spec` on `interval`.
pub fn panel_rule(
    spec: &PolynomialSpec,
    interval: Interval,
    nodes_per_panel: usize,
) -> CompositeRule {
    CompositeRule::with_max_width(interval, panel_width(spec.cutoff()), nodes_per_panel)
}

pub fn expected_count_deterministic(
    spec: &PolynomialSpec,
    interval: Interval,
) -> Result<QuadratureResult> {
    expected_count_deterministic_with(spec, interval, &DeterministicOptions::default())
}

/// Composite Gauss-Legendre integral of the density. The rule is applied
/// once with panels of width `pi / (4 log T)` and once with half that
/// width; the finer value is returned and their difference is the error
/// estimate.
pub fn expected_count_deterministic_with(
    spec: &PolynomialSpec,
    interval: Interval,
    options: &DeterministicOptions,
) -> Result<QuadratureResult> {
    let coarse_rule = panel_rule(spec, interval, options.nodes_per_panel);
    let fine_rule = coarse_rule.refined();
    let needed = coarse_rule.nodes() + fine_rule.nodes();
    if needed > options.node_cap {
        return Err(Error::BudgetExceeded {
            needed,
            cap: options.node_cap,
        });
    }
    let kernel = KacRiceKernel::new(spec)?;
    let integrate = |rule: &CompositeRule| kernel.integrate(rule, |d| [d.density]).map(|[v]| v);
    let coarse = integrate(&coarse_rule)?;
    let fine = integrate(&fine_rule)?;
    Ok(QuadratureResult {
        value: fine.max(0.0),
        abs_error_estimate: (fine - coarse).abs(),
        method: QuadratureMethod::CompositeDeterministic,
        nodes_used: needed,
        stderr: 0.0,
    })
}

/// Minimum number of strata for [`expected_count_stratified`].
pub const MIN_STRATA: usize = 100;

/// One uniform point per equal stratum; the point in stratum `i` comes from
/// the counter-based stream `(seed, i)`. `stderr` is the sample standard
/// deviation of the per-stratum densities times `length / sqrt(strata)`,
/// which ignores the variance reduction from stratification and so
/// overstates the error of a smooth integrand. `abs_error_estimate` equals
/// `stderr`.
pub fn expected_count_stratified(
    spec: &PolynomialSpec,
    interval: Interval,
    strata: usize,
    seed: u64,
) -> Result<QuadratureResult> {
    if strata < MIN_STRATA {
        return Err(Error::TooFew {
            what: "strata",
            min: MIN_STRATA,
            got: strata,
        });
    }
    let kernel = KacRiceKernel::new(spec)?;
    let width = interval.length() / strata as f64;
    let densities: Vec<f64> = (0..strata)
        .into_par_iter()
        .map_init(
            || kernel.scratch(),
            |scratch, i| {
                let u: f64 = trial_rng(seed, i as u64).random();
                let t = interval.lo() + (i as f64 + u) * width;
                kernel.density(t, scratch)
            },
        )
        .collect::<Result<_>>()?;
    let n = strata as f64;
    let mean = pairwise_sum(&densities) / n;
    let squares: Vec<f64> = densities.iter().map(|d| (d - mean) * (d - mean)).collect();
    let variance = pairwise_sum(&squares) / (n - 1.0);
    let stderr = interval.length() * (variance / n).sqrt();
    Ok(QuadratureResult {
        value: interval.length() * mean,
        abs_error_estimate: stderr,
        method: QuadratureMethod::StratifiedRandom,
        nodes_used: strata,
        stderr,
    })
}
