use dirichlet_roots::eval::{eval_polynomial, WeightTable};
use dirichlet_roots::kac_rice::expected_count_deterministic;
use dirichlet_roots::monte_carlo::{count_roots, count_sign_changes, default_step, run_trials};
use dirichlet_roots::summation::pairwise_sum;
use dirichlet_roots::{make_spec, sample_coefficients, Part};

#[test]
fn pooled_draws_are_standard_normal() {
    let spec = make_spec(1000.0, 0, 0.5, Part::Cosine).unwrap();
    let draws: Vec<f64> = (0..1000)
        .flat_map(|i| sample_coefficients(&spec, 2024, i).values().to_vec())
        .collect();
    assert_eq!(draws.len(), 1_000_000);
    let n = draws.len() as f64;
    let mean = pairwise_sum(&draws) / n;
    let squares: Vec<f64> = draws.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&squares) / (n - 1.0);
    assert!(mean.abs() < 0.005, "mean {mean}");
    assert!((var - 1.0).abs() < 0.01, "variance {var}");
}

#[test]
fn samples_are_reproducible_and_separated() {
    let spec = make_spec(300.7, 1, 0.5, Part::Sine).unwrap();
    let a = sample_coefficients(&spec, 5, 17);
    let b = sample_coefficients(&spec, 5, 17);
    let c = sample_coefficients(&spec, 5, 18);
    let d = sample_coefficients(&spec, 6, 17);
    assert_eq!(a.values().len(), 300);
    assert_eq!(a, b);
    assert_ne!(a.values(), c.values());
    assert_ne!(a.values(), d.values());
}

#[test]
fn halving_the_step_never_loses_roots() {
    let spec = make_spec(500.0, 0, 0.5, Part::Cosine).unwrap();
    let table = WeightTable::new(&spec);
    let interval = spec.dyadic_interval();
    // a step that divides the interval exactly, so the finer grid is nested
    let cells = (interval.length() / default_step(500.0, 0)).ceil();
    let step = interval.length() / cells;
    let (mut coarse_total, mut fine_total) = (0, 0);
    for i in 0..50 {
        let sample = sample_coefficients(&spec, 99, i);
        let coarse = count_sign_changes(&sample, &table, interval, step).unwrap();
        let fine = count_sign_changes(&sample, &table, interval, step / 2.0).unwrap();
        assert!(
            fine.count >= coarse.count,
            "trial {i}: {} -> {}",
            coarse.count,
            fine.count
        );
        // close pairs inside one cell are lost; a large constant term makes
        // such near-tangent pairs more common
        assert!(fine.count - coarse.count <= fine.count / 20, "trial {i}");
        coarse_total += coarse.count;
        fine_total += fine.count;
    }
    assert!(((fine_total - coarse_total) as f64) < 0.01 * fine_total as f64);
}

#[test]
fn refined_roots_bracket_sign_changes() {
    let spec = make_spec(200.0, 1, 0.5, Part::Sine).unwrap();
    let table = WeightTable::new(&spec);
    let interval = spec.dyadic_interval();
    let tol = 1e-9;
    for i in 0..5 {
        let sample = sample_coefficients(&spec, 3, i);
        let r = count_roots(&sample, &table, interval, default_step(200.0, 1), tol).unwrap();
        let roots = r.roots.unwrap();
        assert_eq!(roots.len(), r.count);
        assert!(roots.windows(2).all(|w| w[0] < w[1]));
        for &x in &roots {
            assert!(interval.contains(x));
            let lo = eval_polynomial(&sample, &table, x - tol).unwrap();
            let hi = eval_polynomial(&sample, &table, x + tol).unwrap();
            assert!(lo * hi <= 0.0, "no sign change around {x}");
        }
    }
}

#[test]
fn short_cosine_polynomial_has_no_roots() {
    let spec = make_spec(1.5, 0, 0.5, Part::Cosine).unwrap();
    let agg = run_trials(&spec, spec.dyadic_interval(), 20, 1, 0.01).unwrap();
    assert!(agg.per_trial_counts.iter().all(|&c| c == 0));
    assert_eq!((agg.mean, agg.stderr), (0.0, 0.0));
}

#[test]
fn simulation_agrees_with_kac_rice() {
    let spec = make_spec(200.0, 0, 0.5, Part::Cosine).unwrap();
    let interval = spec.dyadic_interval();
    let ek = expected_count_deterministic(&spec, interval).unwrap().value;
    let agg = run_trials(&spec, interval, 400, 7, default_step(200.0, 0)).unwrap();
    assert!(
        (agg.mean - ek).abs() <= 4.0 * agg.stderr,
        "mc {} +- {} vs ek {ek}",
        agg.mean,
        agg.stderr
    );
    assert!(agg.min as f64 <= agg.mean && agg.mean <= agg.max as f64);
}

#[test]
fn thread_count_does_not_change_counts() {
    let spec = make_spec(200.0, 0, 0.5, Part::Cosine).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                run_trials(&spec, spec.dyadic_interval(), 64, 7, default_step(200.0, 0)).unwrap()
            })
    };
    assert_eq!(run(1), run(8));
}
