use proptest::prelude::*;

use multistrat::harness::config::mixed_functions;
use multistrat::harness::stats::{median, variance, variance_standard_error};
use multistrat::multi_index::enumerate_gn;
use multistrat::oracle::{
    brute_force_j, hermite_ito_closed_form, transport_variance, SimplexQuadSpec,
};
use multistrat::ordinary::{ordinary_multiple, ordinary_via_decomposition, relative_sup_gap};
use multistrat::paths::{gen_brownian, gen_transport, polygonal, refine_grid, KNOT_TOLERANCE};
use multistrat::series::sup_distance;
use multistrat::strat::{strat_integral, StratMethod};
use multistrat::{FunctionSpec, FunctionTuple, PiecewiseLinearPath, RngSeed};

fn spec() -> impl Strategy<Value = FunctionSpec> {
    prop_oneof![
        prop::collection::vec(-2.0..2.0f64, 1..=5).prop_map(|coeffs| FunctionSpec::Poly { coeffs }),
        (-4.0..4.0f64, -3.0..3.0f64).prop_map(|(a, b)| FunctionSpec::Sin { a, b }),
        (-4.0..4.0f64).prop_map(|a| FunctionSpec::Exp { a }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn derivative_matches_central_difference(f in spec(), t in 0.01..0.99f64) {
        let h = 1e-5;
        let fd = (f.eval(t + h, 1.0).unwrap() - f.eval(t - h, 1.0).unwrap()) / (2.0 * h);
        let exact = f.deriv_eval(t, 1.0).unwrap();
        // Relative error ≤ 10 h, with an absolute floor where f' vanishes.
        prop_assert!((fd - exact).abs() <= 10.0 * h * exact.abs().max(1.0), "{fd} vs {exact}");
    }

    #[test]
    fn suffix_product_head_and_derivative(fs in prop::collection::vec(spec(), 1..=4), t in 0.01..0.99f64) {
        let tuple = FunctionTuple::new(fs.clone(), 1.0).unwrap();
        let last = fs.last().unwrap();
        prop_assert_eq!(
            tuple.suffix_product(1, t).unwrap(),
            (last.eval(t, 1.0).unwrap(), last.deriv_eval(t, 1.0).unwrap())
        );
        let h = 1e-5;
        for k in 1..=fs.len() {
            let fd = (tuple.suffix_product(k, t + h).unwrap().0 - tuple.suffix_product(k, t - h).unwrap().0) / (2.0 * h);
            let exact = tuple.suffix_product(k, t).unwrap().1;
            prop_assert!((fd - exact).abs() <= 10.0 * h * exact.abs().max(1.0));
        }
    }

    #[test]
    fn transport_is_sqrt_m_lipschitz(m in 0.5..200.0f64, seed in any::<u64>(), s in 0.0..1.0f64, t in 0.0..1.0f64) {
        let p = gen_transport(m, 1.0, RngSeed::new(seed, 0)).unwrap();
        let speed = m.sqrt();
        for pair in p.slopes().windows(2) {
            prop_assert!(pair[0] * pair[1] < 0.0);
        }
        for &b in p.slopes() {
            prop_assert!((b.abs() - speed).abs() <= 1e-12 * speed);
        }
        let gap = (p.eval(t).unwrap() - p.eval(s).unwrap()).abs();
        prop_assert!(gap <= speed * (t - s).abs() * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn refine_grid_covers_knots(m in 1.0..100.0f64, seed in any::<u64>(), cells in 1usize..2000) {
        let p = gen_transport(m, 1.0, RngSeed::new(seed, 1)).unwrap();
        let delta = 1.0 / cells as f64;
        let grid = refine_grid(&p, delta).unwrap();
        for w in grid.windows(2) {
            prop_assert!(w[1] > w[0]);
            prop_assert!(w[1] - w[0] <= delta * (1.0 + 1e-9));
        }
        for k in p.knots() {
            prop_assert!(grid.iter().any(|g| g == k));
        }
    }

    #[test]
    fn polygonal_hits_grid_points(seed in any::<u64>(), log_m in 0u32..8) {
        let w = gen_brownian(256, 1.0, RngSeed::new(seed, 2)).unwrap();
        let m = 1usize << log_m;
        let p = polygonal(&w, m).unwrap();
        for j in 0..=m {
            let t = j as f64 / m as f64;
            prop_assert_eq!(p.eval(t).unwrap(), w.values()[j * 256 / m]);
        }
    }

    #[test]
    fn linear_in_the_first_integrand(c in -3.0..3.0f64, seed in any::<u64>(), n in 1usize..=4) {
        let path = gen_brownian(512, 1.0, RngSeed::new(seed, 3)).unwrap();
        let mut fs = mixed_functions(n);
        let base = FunctionTuple::new(fs.clone(), 1.0).unwrap();
        if let FunctionSpec::Poly { coeffs } = &mut fs[0] {
            coeffs.iter_mut().for_each(|a| *a *= c);
        }
        let scaled = FunctionTuple::new(fs, 1.0).unwrap();
        for method in StratMethod::ALL {
            let a = strat_integral(&base, &path, method).unwrap().scaled(c);
            let b = strat_integral(&scaled, &path, method).unwrap();
            let scale = a.sup_norm().max(b.sup_norm()).max(1e-300);
            prop_assert!(sup_distance(&a, &b) / scale <= 1e-12, "{method}");
            prop_assert_eq!(b.values()[0], 0.0);
        }
    }

    #[test]
    fn redundant_knots_do_not_move_j(seed in any::<u64>(), extra in prop::collection::vec(0.001..0.999f64, 1..8)) {
        let p = gen_transport(20.0, 1.0, RngSeed::new(seed, 4)).unwrap();
        let mut knots = p.knots().to_vec();
        for t in extra {
            if knots.iter().all(|k| (k - t).abs() > 1e-6) {
                knots.push(t);
            }
        }
        knots.sort_by(f64::total_cmp);
        let values: Vec<f64> = knots.iter().map(|&t| p.eval(t).unwrap()).collect();
        let q = PiecewiseLinearPath::new(knots, values).unwrap();
        let tuple = FunctionTuple::new(mixed_functions(3), 1.0).unwrap();
        let delta = 1.0 / 4096.0;
        let a = ordinary_multiple(&tuple, &p, delta).unwrap()[2].terminal();
        let b = ordinary_multiple(&tuple, &q, delta).unwrap()[2].terminal();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0), "{a} vs {b}");
    }

    #[test]
    fn lemma_decomposition_agrees(seed in any::<u64>(), m in 2.0..300.0f64, n in 1usize..=4) {
        let p = gen_transport(m, 1.0, RngSeed::new(seed, 5)).unwrap();
        let tuple = FunctionTuple::new(mixed_functions(n), 1.0).unwrap();
        let delta = 1.0 / 4096.0;
        let levels = ordinary_multiple(&tuple, &p, delta).unwrap();
        let d = ordinary_via_decomposition(&tuple, &p, &levels[..n - 1], delta).unwrap();
        prop_assert!(relative_sup_gap(&levels[n - 1], &d) <= 1e-6);
    }

    #[test]
    fn hermite_derivative_in_w(n in 1usize..=8, w in -3.0..3.0f64, t in 0.1..3.0f64) {
        let h = 1e-5;
        let fd = (hermite_ito_closed_form(n, w + h, t) - hermite_ito_closed_form(n, w - h, t)) / (2.0 * h);
        let exact = hermite_ito_closed_form(n - 1, w, t);
        prop_assert!((fd - exact).abs() <= 10.0 * h * exact.abs().max(1.0));
    }
}

#[test]
fn gn_grows_by_fibonacci_and_obeys_the_recursion() {
    for n in 1..=8 {
        let (a, b, c) = (
            enumerate_gn(n).unwrap().len(),
            enumerate_gn(n + 1).unwrap().len(),
            enumerate_gn(n + 2).unwrap().len(),
        );
        assert_eq!(a + b, c);
    }
}

#[test]
fn brownian_increments_have_the_right_variance() {
    let ends: Vec<f64> = (0..4000)
        .map(|s| {
            gen_brownian(64, 2.0, RngSeed::new(11, s))
                .unwrap()
                .terminal()
        })
        .collect();
    let z = (variance(&ends) - 2.0) / variance_standard_error(&ends);
    assert!(z.abs() <= 3.0, "z = {z}");
}

#[test]
fn transport_variance_matches_monte_carlo() {
    for (m, t) in [(10.0, 0.5), (10.0, 1.0), (100.0, 0.5), (100.0, 1.0)] {
        let xs: Vec<f64> = (0..10_000)
            .map(|s| {
                gen_transport(m, 1.0, RngSeed::new(23, s))
                    .unwrap()
                    .eval(t)
                    .unwrap()
            })
            .collect();
        let z = (variance(&xs) - transport_variance(m, t)) / variance_standard_error(&xs);
        assert!(z.abs() <= 3.0, "m={m} t={t} z={z}");
    }
}

#[test]
fn polygonal_error_shrinks_as_m_doubles() {
    let mut prev = f64::INFINITY;
    for log_m in 4..=10 {
        let m = 1usize << log_m;
        let errs: Vec<f64> = (0..50)
            .map(|s| {
                let w = gen_brownian(1 << 12, 1.0, RngSeed::new(31, s)).unwrap();
                let p = polygonal(&w, m).unwrap();
                w.times()
                    .iter()
                    .zip(w.values())
                    .map(|(&t, &v)| (p.eval(t).unwrap() - v).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        let med = median(&errs);
        assert!(med <= prev, "m={m}: {med} > {prev}");
        prev = med;
    }
}

#[test]
fn quadrature_error_shrinks_under_refinement() {
    // Coarse meshes, where quadrature error dwarfs the oracle's own.
    let tuple = FunctionTuple::new(mixed_functions(2), 1.0).unwrap();
    let spec = SimplexQuadSpec::new(2, 1 << 12).unwrap();
    let mut ratios = Vec::new();
    for s in 0..10 {
        let p = gen_transport(8.0, 1.0, RngSeed::new(7, 50 + s)).unwrap();
        let exact = brute_force_j(&tuple, &p, spec).unwrap();
        let err = |delta: f64| {
            (ordinary_multiple(&tuple, &p, delta).unwrap()[1].terminal() - exact).abs()
        };
        ratios.push(err(0.25) / err(0.125));
    }
    assert!(median(&ratios) >= 3.0, "{ratios:?}");
}

#[test]
fn refined_grid_has_no_near_duplicates() {
    let p = gen_transport(500.0, 1.0, RngSeed::new(3, 3)).unwrap();
    let g = refine_grid(&p, 1e-3).unwrap();
    assert!(g.windows(2).all(|w| w[1] - w[0] > KNOT_TOLERANCE));
}
