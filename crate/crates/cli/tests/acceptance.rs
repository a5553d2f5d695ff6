//! Acceptance suite. Runs every criterion in order, prints one
//! `PASS`/`FAIL` line each and exits nonzero if any failed.
//!
//! Pass criterion numbers as arguments to run a subset:
//! `cargo test --test acceptance -- 3 7`.

use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use dirichlet_roots::asymptotics::{
    main_coefficient, stieltjes_sum_check, EULER_GAMMA, TWO_OVER_SQRT3,
};
use dirichlet_roots::diagnostics::{
    l2_mean_value_check, log_power_coefficients, proof_step_integrals,
};
use dirichlet_roots::eval::{eval_polynomial, WeightTable};
use dirichlet_roots::kac_rice::{density_with_table, expected_count_deterministic};
use dirichlet_roots::model::trial_rng;
use dirichlet_roots::monte_carlo::{count_sign_changes, default_step, run_trials, sigma_sweep};
use dirichlet_roots::{make_spec, sample_coefficients, Part, PolynomialSpec};
use dirichlet_roots_cli::commands::{compare_row, CompareRow};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

const CUTOFFS: [f64; 4] = [500.0, 1000.0, 2000.0, 4000.0];

/// Kac-Rice rows for k = 0 at [`CUTOFFS`], shared by criteria 1 and 3.
fn k0_rows() -> &'static [CompareRow] {
    static ROWS: OnceLock<Vec<CompareRow>> = OnceLock::new();
    ROWS.get_or_init(|| {
        CUTOFFS
            .iter()
            .map(|&t| compare_row(t, 0, 0, 0, 10_000).expect("compare row"))
            .collect()
    })
}

fn row(cutoff: f64) -> &'static CompareRow {
    k0_rows().iter().find(|r| r.cutoff == cutoff).unwrap()
}

fn ek_convergence() -> Outcome {
    let start = Instant::now();
    let gaps: Vec<(f64, f64)> = k0_rows()
        .iter()
        .map(|r| {
            let l = r.cutoff.ln();
            let asym = r.asym.expect("asymptotic total");
            ((r.ek - asym).abs() / (r.cutoff * l), 3.0 / (l * l))
        })
        .collect();
    let decreasing = gaps.windows(2).all(|w| w[1].0 < w[0].0);
    let bounded = gaps.iter().all(|(g, cap)| g <= cap);
    let listed: Vec<String> = gaps
        .iter()
        .map(|(g, cap)| format!("{g:.5}<={cap:.5}"))
        .collect();
    outcome(
        decreasing && bounded,
        format!(
            "gaps {} ({:.1}s)",
            listed.join(", "),
            start.elapsed().as_secs_f64()
        ),
    )
}

fn mc_matches_ek() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for (cutoff, k, sigma) in [
        (200.0, 0, 0.5),
        (500.0, 0, 0.5),
        (200.0, 1, 0.5),
        (200.0, 0, 0.25),
    ] {
        let spec = PolynomialSpec::derivative(cutoff, k, sigma).unwrap();
        let interval = spec.dyadic_interval();
        let ek = expected_count_deterministic(&spec, interval).unwrap().value;
        let mc = run_trials(&spec, interval, 400, 1, default_step(cutoff, k)).unwrap();
        let z = (mc.mean - ek).abs() / mc.stderr;
        pass &= z <= 4.0;
        parts.push(format!("T={cutoff} k={k} s={sigma}: z={z:.2}"));
    }
    outcome(
        pass,
        format!(
            "{} ({:.1}s)",
            parts.join("; "),
            start.elapsed().as_secs_f64()
        ),
    )
}

fn zeta_ratio() -> Outcome {
    let dist = |t: f64| (row(t).ratio.unwrap() - TWO_OVER_SQRT3).abs();
    let r2000 = row(2000.0).ratio.unwrap();
    let within = (r2000 / TWO_OVER_SQRT3 - 1.0).abs() <= 0.05;
    let closer = dist(4000.0) < dist(1000.0);
    outcome(
        within && closer,
        format!(
            "ratio(2000)={r2000:.4} ({:+.1}% from 2/sqrt3), dist(1000)={:.4}, dist(4000)={:.4}",
            100.0 * (r2000 / TWO_OVER_SQRT3 - 1.0),
            dist(1000.0),
            dist(4000.0)
        ),
    )
}

fn derivative_coefficient() -> Outcome {
    let cutoff = 2000.0;
    let mut pass = true;
    let mut parts = Vec::new();
    for k in [1, 2] {
        let spec = PolynomialSpec::derivative(cutoff, k, 0.5).unwrap();
        let ek = expected_count_deterministic(&spec, spec.dyadic_interval())
            .unwrap()
            .value;
        let observed = ek / (cutoff * cutoff.ln());
        let rel = observed / main_coefficient(k) - 1.0;
        pass &= rel.abs() <= 0.03;
        parts.push(format!(
            "k={k}: {observed:.5} vs {:.5} ({:+.2}%)",
            main_coefficient(k),
            100.0 * rel
        ));
    }
    outcome(pass, parts.join("; "))
}

fn stieltjes_residuals() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for m in 0..=2 {
        let small = stieltjes_sum_check(1e3, m).unwrap();
        let large = stieltjes_sum_check(1e4, m).unwrap();
        for (t, r) in [(1e3f64, small), (1e4, large)] {
            pass &= r.abs() <= 10.0 * t.ln().powi(m as i32) / t;
        }
        let shrink = small.abs() / large.abs();
        pass &= (5.0..=20.0).contains(&shrink);
        parts.push(format!("m={m}: shrink {shrink:.2}"));
    }
    outcome(pass, parts.join("; "))
}

fn mean_value_estimate() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for k in [0, 1] {
        let check = l2_mean_value_check(&log_power_coefficients(500, k), 1000.0).unwrap();
        pass &= check.realized_constant <= 10.0;
        parts.push(format!("k={k}: C={:.3}", check.realized_constant));
    }
    outcome(pass, parts.join("; "))
}

fn proof_steps() -> Outcome {
    let reports =
        |t: f64| proof_step_integrals(&make_spec(t, 0, 0.5, Part::Cosine).unwrap()).unwrap();
    let at2000 = reports(2000.0);
    let target = -EULER_GAMMA * 2000.0 / 2000f64.ln();
    let step1 = at2000[0].integral_value;
    let step1_ok = (step1 / target - 1.0).abs() <= 0.10;
    let (low, high) = (reports(1000.0), reports(4000.0));
    let growth: Vec<f64> = (1..9)
        .map(|i| high[i].observed_ratio / low[i].observed_ratio)
        .collect();
    let growth_ok = growth.iter().all(|g| *g < 8.0);
    let worst = growth.iter().copied().fold(0.0, f64::max);
    outcome(
        step1_ok && growth_ok,
        format!("step 1 {step1:.2} vs {target:.2}; max growth of steps 2-9 {worst:.3}"),
    )
}

fn sigma_transition() -> Outcome {
    let start = Instant::now();
    let per_sigma = |sigma: f64| -> Vec<f64> {
        [250.0, 500.0, 1000.0]
            .iter()
            .map(|&t| sigma_sweep(t, &[sigma], 200, 3).unwrap()[0].normalized_mean)
            .collect()
    };
    let flat = per_sigma(0.25);
    let (lo, hi) = flat.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    let flat_ok = (hi - lo) / lo < 0.15;
    let falling = per_sigma(0.75);
    let falling_ok = falling.windows(2).all(|w| w[1] < w[0]);
    outcome(
        flat_ok && falling_ok,
        format!(
            "sigma=0.25 {flat:.4?} (spread {:.1}%), sigma=0.75 {falling:.4?} ({:.1}s)",
            100.0 * (hi - lo) / lo,
            start.elapsed().as_secs_f64()
        ),
    )
}

fn determinism() -> Outcome {
    let dir =
        std::env::temp_dir().join(format!("dirichlet-roots-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = |name: &str, threads: &str| {
        let path = dir.join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_dirichlet-roots"))
            .args(["simulate", "--T", "200", "--trials", "400", "--seed", "11"])
            .args(["--threads", threads, "--out"])
            .arg(&path)
            .output()
            .unwrap()
            .status;
        assert!(status.success());
        std::fs::read(&path).unwrap()
    };
    let a = csv("a.csv", "8");
    let b = csv("b.csv", "8");
    let c = csv("c.csv", "1");
    std::fs::remove_dir_all(&dir).ok();
    outcome(
        a == b && a == c && !a.is_empty(),
        format!(
            "{} bytes; runs equal: {}, threads 1 vs 8 equal: {}",
            a.len(),
            a == b,
            a == c
        ),
    )
}

fn random_part(rng: &mut impl Rng) -> Part {
    if rng.random::<bool>() {
        Part::Cosine
    } else {
        Part::Sine
    }
}

fn properties() -> Outcome {
    let mut rng = trial_rng(2025, 0);
    let mut failures = Vec::new();

    let mut probes = 0;
    for _ in 0..1000 {
        let cutoff = rng.random_range(2.0..400.0);
        let spec = make_spec(
            cutoff,
            rng.random_range(0..4),
            rng.random_range(0.0..1.5),
            random_part(&mut rng),
        )
        .unwrap();
        let table = WeightTable::new(&spec);
        for _ in 0..100 {
            let t = rng.random_range(-4.0 * cutoff..4.0 * cutoff);
            probes += 1;
            match density_with_table(&table, t) {
                Ok(d) if d.density >= 0.0 && d.density.is_finite() => {}
                other => failures.push(format!(
                    "density at {spec:?}, t={t}: {:?}",
                    other.map(|d| d.density)
                )),
            }
        }
    }

    for _ in 0..1000 {
        let cutoff = rng.random_range(2.0..300.0);
        let spec = make_spec(
            cutoff,
            rng.random_range(0..3),
            rng.random_range(0.0..1.0),
            random_part(&mut rng),
        )
        .unwrap();
        let table = WeightTable::new(&spec);
        let t = rng.random_range(0.0..5e3);
        let base = density_with_table(&table, t).unwrap().density;
        let scaled = density_with_table(&table.scaled(rng.random_range(-8.0f64..8.0).exp()), t)
            .unwrap()
            .density;
        if (base - scaled).abs() > 1e-12 * base.max(1.0) {
            failures.push(format!("scale: {base} vs {scaled} at {spec:?} t={t}"));
        }
        let mirrored = density_with_table(&table, -t).unwrap().density;
        if (base - mirrored).abs() > 1e-12 * base.max(1.0) {
            failures.push(format!("density parity: {base} vs {mirrored}"));
        }

        let cosine = make_spec(cutoff, spec.order() as i64, spec.sigma(), Part::Cosine).unwrap();
        let table = WeightTable::new(&cosine);
        let sample = sample_coefficients(&cosine, rng.random(), 0);
        let plus = eval_polynomial(&sample, &table, t).unwrap();
        let minus = eval_polynomial(&sample, &table, -t).unwrap();
        if (plus - minus).abs() > 1e-13 * table.l1_mass(&sample) {
            failures.push(format!("polynomial parity: {plus} vs {minus}"));
        }
    }

    let spec = make_spec(500.0, 0, 0.5, Part::Cosine).unwrap();
    let table = WeightTable::new(&spec);
    let interval = spec.dyadic_interval();
    let step = interval.length() / (interval.length() / default_step(500.0, 0)).ceil();
    for i in 0..50 {
        let sample = sample_coefficients(&spec, 4, i);
        let coarse = count_sign_changes(&sample, &table, interval, step)
            .unwrap()
            .count;
        let fine = count_sign_changes(&sample, &table, interval, step / 2.0)
            .unwrap()
            .count;
        if fine < coarse {
            failures.push(format!(
                "refinement lost roots in trial {i}: {coarse} -> {fine}"
            ));
        }
    }

    let detail = match failures.first() {
        None => {
            format!("{probes} nonnegativity probes, 1000 scale/parity probes, 50 refinement trials")
        }
        Some(first) => format!("{} failures, first: {first}", failures.len()),
    };
    outcome(failures.is_empty(), detail)
}

type Criterion = (u32, &'static str, fn() -> Outcome);

const CRITERIA: [Criterion; 10] = [
    (
        1,
        "Kac-Rice integral converges to the two-term asymptotic",
        ek_convergence,
    ),
    (
        2,
        "simulated zero counts match the Kac-Rice expectation",
        mc_matches_ek,
    ),
    (
        3,
        "ratio to zeta zero count approaches 2/sqrt(3)",
        zeta_ratio,
    ),
    (4, "derivative leading coefficients", derivative_coefficient),
    (5, "Stieltjes sum residuals", stieltjes_residuals),
    (
        6,
        "mean-value estimate for Dirichlet polynomials",
        mean_value_estimate,
    ),
    (7, "proof-step envelopes", proof_steps),
    (8, "sigma transition trends", sigma_transition),
    (9, "simulation CSV is deterministic", determinism),
    (10, "property suite", properties),
];

fn main() {
    let selected: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = Vec::new();
    for (id, name, run) in CRITERIA {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let result = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {verdict}: {name}: {}", result.detail);
        if !result.pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
