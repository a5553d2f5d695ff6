use dirichlet_roots::eval::{eval_grid, eval_polynomial, log_moment_sum, u_moment, WeightTable};
use dirichlet_roots::kac_rice::{density_at, density_with_table, NEGATIVE_DISCRIMINANT_TOLERANCE};
use dirichlet_roots::{make_spec, sample_coefficients, Interval, Part};
use proptest::prelude::*;

fn part() -> impl Strategy<Value = Part> {
    prop_oneof![Just(Part::Cosine), Just(Part::Sine)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn density_is_nonnegative(
        cutoff in 2.0f64..400.0,
        k in 0i64..4,
        sigma in 0.0f64..1.5,
        part in part(),
        t in prop_oneof![-1e4f64..1e4, -0.05f64..0.05],
    ) {
        prop_assume!(t != 0.0);
        let spec = make_spec(cutoff, k, sigma, part).unwrap();
        let d = density_at(&spec, t).unwrap();
        prop_assert!(d.b > 0.0);
        prop_assert!(d.density >= 0.0);
        let scale = (d.a / d.b).abs().max(1.0);
        prop_assert!(d.discriminant() >= -NEGATIVE_DISCRIMINANT_TOLERANCE * scale);
    }

    #[test]
    fn density_ignores_common_weight_scale(
        cutoff in 2.0f64..300.0,
        k in 0i64..3,
        sigma in 0.0f64..1.0,
        part in part(),
        t in 0.0f64..5e3,
        log_factor in -8.0f64..8.0,
    ) {
        let spec = make_spec(cutoff, k, sigma, part).unwrap();
        let table = WeightTable::new(&spec);
        let base = density_with_table(&table, t).unwrap().density;
        let scaled = density_with_table(&table.scaled(log_factor.exp()), t).unwrap().density;
        prop_assert!((base - scaled).abs() <= 1e-12 * base.max(1.0), "{base} vs {scaled}");
    }

    #[test]
    fn density_is_even(
        cutoff in 2.0f64..300.0,
        k in 0i64..3,
        sigma in 0.0f64..1.0,
        part in part(),
        t in 0.0f64..5e3,
    ) {
        let spec = make_spec(cutoff, k, sigma, part).unwrap();
        let plus = density_at(&spec, t).unwrap().density;
        let minus = density_at(&spec, -t).unwrap().density;
        prop_assert!((plus - minus).abs() <= 1e-12 * plus.max(1.0));
    }

    #[test]
    fn cosine_polynomial_is_even(
        cutoff in 1.01f64..300.0,
        k in 0i64..3,
        sigma in 0.0f64..1.0,
        seed in any::<u64>(),
        t in 0.0f64..1e4,
    ) {
        let spec = make_spec(cutoff, k, sigma, Part::Cosine).unwrap();
        let table = WeightTable::new(&spec);
        let sample = sample_coefficients(&spec, seed, 0);
        let plus = eval_polynomial(&sample, &table, t).unwrap();
        let minus = eval_polynomial(&sample, &table, -t).unwrap();
        prop_assert!((plus - minus).abs() <= 1e-13 * table.l1_mass(&sample).max(1e-300));
    }

    #[test]
    fn moments_bounded_by_their_value_at_zero(
        cutoff in 1.5f64..300.0,
        k in 0i64..3,
        sigma in 0.0f64..1.0,
        j in 0usize..3,
        part in part(),
        t in -1e4f64..1e4,
    ) {
        let spec = make_spec(cutoff, k, sigma, Part::Cosine).unwrap();
        let table = WeightTable::new(&spec);
        let cap = log_moment_sum(cutoff, j as u32 + 2 * k as u32, sigma);
        let v = u_moment(&table, j, t, part).unwrap();
        prop_assert!(v.abs() <= cap * (1.0 + 1e-12));
    }

    #[test]
    fn grid_matches_direct_evaluation(
        cutoff in 2.0f64..300.0,
        k in 0i64..3,
        part in part(),
        seed in any::<u64>(),
        lo in 0.0f64..1e4,
        step in 1e-3f64..0.5,
    ) {
        let spec = make_spec(cutoff, k, 0.5, part).unwrap();
        let table = WeightTable::new(&spec);
        let sample = sample_coefficients(&spec, seed, 3);
        let interval = Interval::new(lo, lo + 600.0 * step).unwrap();
        let grid = eval_grid(&sample, &table, interval, step).unwrap();
        let tol = 1e-9 * table.l1_mass(&sample);
        for (t, v) in grid.grid.iter().zip(&grid.values) {
            prop_assert!((eval_polynomial(&sample, &table, *t).unwrap() - v).abs() <= tol);
        }
    }
}

#[test]
fn moments_at_zero_are_log_moment_sums() {
    for (cutoff, k, sigma) in [
        (10.0, 0, 0.5),
        (257.9, 1, 0.5),
        (100.0, 2, 0.3),
        (3.0, 0, 0.0),
    ] {
        let spec = make_spec(cutoff, k, sigma, Part::Cosine).unwrap();
        let table = WeightTable::new(&spec);
        for j in 0..3 {
            let m = log_moment_sum(cutoff, j as u32 + 2 * k as u32, sigma);
            let u = u_moment(&table, j, 0.0, Part::Cosine).unwrap();
            assert!(
                (u - m).abs() <= 1e-13 * m.max(1.0),
                "k={k} j={j}: {u} vs {m}"
            );
        }
    }
}

#[test]
fn recurrence_holds_over_long_grids() {
    // 1000 random start points, each followed by a 2048-step walk so that
    // several renormalization blocks are crossed
    let spec = make_spec(500.0, 0, 0.5, Part::Cosine).unwrap();
    let table = WeightTable::new(&spec);
    let sample = sample_coefficients(&spec, 11, 0);
    let tol = 1e-9 * table.l1_mass(&sample);
    let starts = sample_coefficients(&make_spec(1000.0, 0, 0.5, Part::Cosine).unwrap(), 12, 0);
    let mut worst: f64 = 0.0;
    for (i, z) in starts.values().iter().enumerate() {
        let lo = 500.0 + 250.0 * z.abs();
        let interval = Interval::new(lo, lo + 20.0).unwrap();
        let grid = eval_grid(&sample, &table, interval, 20.0 / 2048.0).unwrap();
        // block boundaries, the last point and one index that moves with i
        let idx = [0, 511, 512, 1023, 1537, grid.values.len() - 1, 7 + i % 2000];
        for &j in &idx {
            let j = j.min(grid.values.len() - 1);
            let d = eval_polynomial(&sample, &table, grid.grid[j]).unwrap();
            worst = worst.max((d - grid.values[j]).abs());
        }
    }
    assert!(worst <= tol, "max deviation {worst:e} > {tol:e}");
}
