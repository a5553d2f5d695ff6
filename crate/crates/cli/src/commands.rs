//! The four subcommands. Each returns its JSON document and, when `--out` was
//! given, the CSV table to write.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use dirichlet_roots::asymptotics::{
    model_vs_zeta_ratio, predict_expected_zeros, AsymptoticPrediction,
};
use dirichlet_roots::diagnostics::{
    l2_mean_value_check, log_power_coefficients, proof_step_integrals, u_sup_monitor,
};
use dirichlet_roots::kac_rice::{
    expected_count_deterministic, expected_count_stratified, QuadratureResult,
};
use dirichlet_roots::monte_carlo::{default_step, run_trials, sigma_sweep};
use dirichlet_roots::{Error as CoreError, Interval, Part, PolynomialSpec};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;

use crate::args::{
    CompareArgs, DiagnosticsArgs, ExpectedArgs, Method, SimulateArgs, SpecArgs, Suite,
};
use crate::error::{CliError, CliResult};

/// Bumped whenever a field is renamed or removed.
pub const SCHEMA_VERSION: u32 = 1;

/// Exponents of the sigma suite.
pub const SIGMA_GRID: [f64; 6] = [0.0, 0.25, 0.5, 0.6, 0.75, 1.0];

/// Cutoffs below this have no meaningful zeta comparison.
const MIN_ZETA_CUTOFF: f64 = 100.0;

#[derive(Debug, Clone)]
pub struct Output {
    pub json: Value,
    pub csv: Option<(PathBuf, String)>,
}

#[derive(Debug, Clone, Copy, Serialize)]
struct SpecEcho {
    #[serde(rename = "T")]
    cutoff: f64,
    k: u32,
    sigma: f64,
    part: Part,
    terms: usize,
    degenerate: bool,
}

impl From<&PolynomialSpec> for SpecEcho {
    fn from(s: &PolynomialSpec) -> Self {
        Self {
            cutoff: s.cutoff(),
            k: s.order(),
            sigma: s.sigma(),
            part: s.part(),
            terms: s.terms(),
            degenerate: s.is_degenerate(),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
struct IntervalEcho {
    lo: f64,
    hi: f64,
}

impl From<Interval> for IntervalEcho {
    fn from(i: Interval) -> Self {
        Self {
            lo: i.lo(),
            hi: i.hi(),
        }
    }
}

fn build_spec(cutoff: f64, k: i64, sigma: f64, part: Option<Part>) -> CliResult<PolynomialSpec> {
    if k < 0 {
        return Err(CliError::Usage(format!("--k must be nonnegative, got {k}")));
    }
    let part = part.unwrap_or(Part::for_derivative(k as u32));
    Ok(PolynomialSpec::new(cutoff, k, sigma, part)?)
}

fn spec_from(args: &SpecArgs) -> CliResult<PolynomialSpec> {
    build_spec(args.cutoff, args.k, args.sigma, args.part)
}

fn json<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("report types serialize to JSON")
}

fn csv_field(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn prediction(spec: &PolynomialSpec) -> Option<AsymptoticPrediction> {
    predict_expected_zeros(spec.cutoff(), spec.order()).ok()
}

fn zeta_ratio(spec: &PolynomialSpec, value: f64) -> Option<f64> {
    if spec.cutoff() < MIN_ZETA_CUTOFF {
        return None;
    }
    model_vs_zeta_ratio(spec.cutoff(), spec.order(), value).ok()
}

fn quadrature(
    spec: &PolynomialSpec,
    method: Method,
    strata: usize,
    seed: u64,
) -> CliResult<QuadratureResult> {
    let interval = spec.dyadic_interval();
    Ok(match method {
        Method::Deterministic => expected_count_deterministic(spec, interval)?,
        Method::Stratified => expected_count_stratified(spec, interval, strata, seed)?,
    })
}

#[derive(Debug, Serialize)]
struct ExpectedReport {
    schema_version: u32,
    command: &'static str,
    spec: SpecEcho,
    interval: IntervalEcho,
    method: dirichlet_roots::kac_rice::QuadratureMethod,
    seed: Option<u64>,
    strata: Option<usize>,
    ek_value: f64,
    ek_error: f64,
    ek_stderr: f64,
    nodes_used: usize,
    asymptotic: Option<AsymptoticPrediction>,
    zeta_ratio: Option<f64>,
    wall_time_s: f64,
}

pub fn expected(args: &ExpectedArgs) -> CliResult<Output> {
    let spec = spec_from(&args.spec)?;
    let start = Instant::now();
    let q = quadrature(&spec, args.method, args.strata, args.seed)?;
    let stratified = args.method == Method::Stratified;
    let report = ExpectedReport {
        schema_version: SCHEMA_VERSION,
        command: "expected",
        spec: (&spec).into(),
        interval: spec.dyadic_interval().into(),
        method: q.method,
        seed: stratified.then_some(args.seed),
        strata: stratified.then_some(args.strata),
        ek_value: q.value,
        ek_error: q.abs_error_estimate,
        ek_stderr: q.stderr,
        nodes_used: q.nodes_used,
        asymptotic: prediction(&spec),
        zeta_ratio: zeta_ratio(&spec, q.value),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let csv = args.out.clone().map(|path| {
        let mut s = String::from(
            "T,k,sigma,part,method,ek_value,ek_error,nodes_used,asym_total,zeta_ratio\n",
        );
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            spec.cutoff(),
            spec.order(),
            spec.sigma(),
            spec.part(),
            json(&q.method).as_str().unwrap_or_default(),
            q.value,
            q.abs_error_estimate,
            q.nodes_used,
            csv_field(report.asymptotic.map(|p| p.total)),
            csv_field(report.zeta_ratio),
        );
        (path, s)
    });
    Ok(Output {
        json: json(&report),
        csv,
    })
}

#[derive(Debug, Serialize)]
struct SimulateReport {
    schema_version: u32,
    command: &'static str,
    spec: SpecEcho,
    interval: IntervalEcho,
    seed: u64,
    trials: usize,
    step: f64,
    grid_step: f64,
    mean: f64,
    stderr: f64,
    min: usize,
    max: usize,
    wall_time_s: f64,
}

pub fn simulate(args: &SimulateArgs) -> CliResult<Output> {
    let spec = spec_from(&args.spec)?;
    let step = args
        .step
        .unwrap_or_else(|| default_step(spec.cutoff(), spec.order()));
    let interval = spec.dyadic_interval();
    let start = Instant::now();
    let agg = run_trials(&spec, interval, args.trials, args.seed, step)?;
    let report = SimulateReport {
        schema_version: SCHEMA_VERSION,
        command: "simulate",
        spec: (&spec).into(),
        interval: interval.into(),
        seed: args.seed,
        trials: agg.trials,
        step,
        grid_step: agg.grid_step,
        mean: agg.mean,
        stderr: agg.stderr,
        min: agg.min,
        max: agg.max,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let csv = args.out.clone().map(|path| {
        let mut s = String::from("trial_index,count\n");
        for (i, c) in agg.per_trial_counts.iter().enumerate() {
            let _ = writeln!(s, "{i},{c}");
        }
        (path, s)
    });
    Ok(Output {
        json: json(&report),
        csv,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    #[serde(rename = "T")]
    pub cutoff: f64,
    pub ek: f64,
    pub ek_error: f64,
    pub method: dirichlet_roots::kac_rice::QuadratureMethod,
    pub nodes_used: usize,
    pub asym: Option<f64>,
    pub mc_mean: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub mc_grid_step: Option<f64>,
    pub ratio: Option<f64>,
    pub wall_time_s: f64,
}

#[derive(Debug, Serialize)]
struct CompareReport {
    schema_version: u32,
    command: &'static str,
    k: u32,
    sigma: f64,
    part: Part,
    seed: u64,
    trials: usize,
    rows: Vec<CompareRow>,
}

/// One row of `compare`: deterministic quadrature when it fits the budget,
/// stratified otherwise.
pub fn compare_row(
    cutoff: f64,
    k: u32,
    trials: usize,
    seed: u64,
    strata: usize,
) -> CliResult<CompareRow> {
    let spec = PolynomialSpec::derivative(cutoff, k, 0.5)?;
    let start = Instant::now();
    let q = match quadrature(&spec, Method::Deterministic, strata, seed) {
        Err(CliError::Core(CoreError::BudgetExceeded { .. })) => {
            quadrature(&spec, Method::Stratified, strata, seed)?
        }
        other => other?,
    };
    let mc = if trials > 0 {
        let step = default_step(cutoff, k);
        Some(run_trials(
            &spec,
            spec.dyadic_interval(),
            trials,
            seed,
            step,
        )?)
    } else {
        None
    };
    Ok(CompareRow {
        cutoff,
        ek: q.value,
        ek_error: q.abs_error_estimate,
        method: q.method,
        nodes_used: q.nodes_used,
        asym: prediction(&spec).map(|p| p.total),
        mc_mean: mc.as_ref().map(|a| a.mean),
        mc_stderr: mc.as_ref().map(|a| a.stderr),
        mc_grid_step: mc.as_ref().map(|a| a.grid_step),
        ratio: zeta_ratio(&spec, q.value),
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

pub fn compare(args: &CompareArgs) -> CliResult<Output> {
    if args.k < 0 {
        return Err(CliError::Usage(format!(
            "--k must be nonnegative, got {}",
            args.k
        )));
    }
    if args.cutoffs.is_empty() {
        return Err(CliError::Usage("--T needs at least one cutoff".into()));
    }
    if args.trials == 1 {
        return Err(CliError::Usage("--trials must be 0 or at least 2".into()));
    }
    let k = args.k as u32;
    let rows = args
        .cutoffs
        .iter()
        .map(|&t| compare_row(t, k, args.trials, args.seed, args.strata))
        .collect::<CliResult<Vec<_>>>()?;
    let csv = args.out.clone().map(|path| {
        let mut s = String::from("T,ek,asym,mc_mean,mc_stderr,ratio\n");
        for r in &rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                r.cutoff,
                r.ek,
                csv_field(r.asym),
                csv_field(r.mc_mean),
                csv_field(r.mc_stderr),
                csv_field(r.ratio)
            );
        }
        (path, s)
    });
    let report = CompareReport {
        schema_version: SCHEMA_VERSION,
        command: "compare",
        k,
        sigma: 0.5,
        part: Part::for_derivative(k),
        seed: args.seed,
        trials: args.trials,
        rows,
    };
    Ok(Output {
        json: json(&report),
        csv,
    })
}

#[derive(Debug, Serialize)]
struct DiagnosticsReport<T: Serialize> {
    schema_version: u32,
    command: &'static str,
    suite: &'static str,
    #[serde(rename = "T")]
    cutoff: f64,
    seed: Option<u64>,
    results: T,
    wall_time_s: f64,
}

#[derive(Debug, Serialize)]
struct L2Row {
    family: &'static str,
    terms: usize,
    lhs: f64,
    main: f64,
    error_budget: f64,
    realized_constant: f64,
    nodes_used: usize,
}

pub fn diagnostics(args: &DiagnosticsArgs) -> CliResult<Output> {
    let start = Instant::now();
    let mut csv = String::new();
    let (suite, seed, results) = match args.suite {
        Suite::Steps => {
            let spec = build_spec(args.cutoff, args.k, args.sigma, None)?;
            let steps = proof_step_integrals(&spec)?;
            csv.push_str("step_id,integrand,integral_value,envelope,observed_ratio\n");
            for s in &steps {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{}",
                    s.step_id, s.integrand, s.integral_value, s.envelope, s.observed_ratio
                );
            }
            ("steps", None, json(&steps))
        }
        Suite::L2 => {
            if !(args.cutoff > 0.0) {
                return Err(CliError::Usage(format!(
                    "--T must be positive, got {}",
                    args.cutoff
                )));
            }
            let n = (args.cutoff.floor() as usize).clamp(1, 500);
            let families: [(&'static str, Vec<Complex64>); 3] = [
                ("ones_2", vec![Complex64::new(1.0, 0.0); 2]),
                ("log0_over_n", log_power_coefficients(n, 0)),
                ("log1_over_n", log_power_coefficients(n, 1)),
            ];
            let mut rows = Vec::new();
            for (family, a) in &families {
                let r = l2_mean_value_check(a, args.cutoff)?;
                rows.push(L2Row {
                    family,
                    terms: a.len(),
                    lhs: r.lhs,
                    main: r.main,
                    error_budget: r.error_budget,
                    realized_constant: r.realized_constant,
                    nodes_used: r.nodes_used,
                });
            }
            csv.push_str("family,terms,lhs,main,error_budget,realized_constant\n");
            for r in &rows {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    r.family, r.terms, r.lhs, r.main, r.error_budget, r.realized_constant
                );
            }
            ("l2", None, json(&rows))
        }
        Suite::Sup => {
            let spec = build_spec(args.cutoff, args.k, args.sigma, None)?;
            let r = u_sup_monitor(&spec, spec.dyadic_interval(), args.gridpoints)?;
            csv.push_str(
                "sup_u,sup_u1,sup_u2,ratio_u,ratio_u1,ratio_u2,cap_u,cap_u1,cap_u2,gridpoints\n",
            );
            let [r0, r1, r2] = r.log_power_ratios;
            let [c0, c1, c2] = r.caps;
            let _ = writeln!(
                csv,
                "{},{},{},{r0},{r1},{r2},{c0},{c1},{c2},{}",
                r.sup_u, r.sup_u1, r.sup_u2, r.gridpoints
            );
            ("sup", None, json(&r))
        }
        Suite::Sigma => {
            let rows = sigma_sweep(args.cutoff, &SIGMA_GRID, args.trials, args.seed)?;
            csv.push_str("sigma,mean,stderr,normalized_mean\n");
            for r in &rows {
                let _ = writeln!(
                    csv,
                    "{},{},{},{}",
                    r.sigma, r.mean, r.stderr, r.normalized_mean
                );
            }
            ("sigma", Some(args.seed), json(&rows))
        }
    };
    let report = DiagnosticsReport {
        schema_version: SCHEMA_VERSION,
        command: "diagnostics",
        suite,
        cutoff: args.cutoff,
        seed,
        results,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok(Output {
        json: json(&report),
        csv: args.out.clone().map(|p| (p, csv)),
    })
}
