use num_rational::BigRational;
use proptest::prelude::*;

use netdesign::designs::{cell_sizes, generate_ensemble};
use netdesign::metrics::resilience;
use netdesign::{
    analytic_cycles, analytic_stars, efficiency, exact_cell_metrics, expected_extent_exact, generate, ratio,
    stars_single_cell_threshold, CascadeParams, Design, DesignConfig, EstimatorConfig, InterCellWiring, RunSeed,
};

fn config(design: Design, n: usize, k: Option<usize>, p: Option<f64>) -> DesignConfig {
    DesignConfig::new(design, n, k, p).unwrap()
}

fn arb_config() -> impl Strategy<Value = DesignConfig> {
    (1usize..60, 0usize..6, 0.0f64..=1.0, any::<bool>()).prop_flat_map(|(n, d, p, leaders)| {
        let design = Design::ALL[d];
        (1..=n).prop_map(move |k| {
            let k = design.has_cells().then_some(k);
            let p = design.has_connectivity().then_some(p);
            let wiring = if leaders { InterCellWiring::Leaders } else { InterCellWiring::RandomMembers };
            config(design, n, k, p).with_wiring(wiring)
        })
    })
}

proptest! {
    #[test]
    fn every_design_has_exactly_n_nodes(cfg in arb_config(), seed in any::<u64>()) {
        let g = generate(&cfg, RunSeed::new(seed));
        prop_assert_eq!(g.node_count(), cfg.n);
        prop_assert_eq!(&g, &generate(&cfg, RunSeed::new(seed)));
    }

    #[test]
    fn cell_partition_covers_n(n in 1usize..400, k in 1usize..400) {
        prop_assume!(k <= n);
        let sizes = cell_sizes(n, k);
        prop_assert_eq!(sizes.iter().sum::<usize>(), n);
        prop_assert!(sizes.iter().all(|&s| s >= 1 && s <= k));
        prop_assert_eq!(sizes.iter().filter(|&&s| s != k).count(), usize::from(n % k != 0));
    }

    #[test]
    fn analytic_resilience_is_nonincreasing_in_tau(n in 2usize..200, k in 1usize..200, a in 0u32..=20, b in 0u32..=20) {
        prop_assume!(k <= n);
        let (lo, hi) = (a.min(b) as f64 / 20.0, a.max(b) as f64 / 20.0);
        for design in [Design::Stars, Design::Cycles] {
            let (r_lo, _) = exact_cell_metrics(design, n, k, &lo, &1.0).unwrap();
            let (r_hi, _) = exact_cell_metrics(design, n, k, &hi, &1.0).unwrap();
            prop_assert!(r_hi <= r_lo + 1e-12);
        }
    }
}

#[test]
fn construction_examples() {
    let g = generate(&config(Design::Cliques, 6, Some(3), None), RunSeed::new(0));
    assert_eq!(g.edge_count(), 6);
    assert_eq!(g.connected_components().len(), 2);
    let star = generate(&config(Design::Stars, 180, Some(180), None), RunSeed::new(0));
    assert_eq!(star.edge_count(), 179);
    assert_eq!(star.degree(0), 179);
    assert_eq!(generate(&config(Design::ErdosRenyi, 10, None, Some(0.0)), RunSeed::new(0)).edge_count(), 0);
    assert!(generate(&config(Design::ErdosRenyi, 10, None, Some(1.0)), RunSeed::new(0)).is_complete());
}

#[test]
fn cell_degrees() {
    for k in [3, 5, 6, 9, 10, 15] {
        let ring = generate(&config(Design::Cycles, 90, Some(k), None), RunSeed::new(0));
        assert!((0..90).all(|u| ring.degree(u) == 2));
        let stars = generate(&config(Design::Stars, 90, Some(k), None), RunSeed::new(0));
        for u in 0..90 {
            let expected = if u % k == 0 { k - 1 } else { 1 };
            assert_eq!(stars.degree(u), expected);
        }
    }
}

#[test]
fn inter_cell_edges_join_distinct_cells() {
    for wiring in [InterCellWiring::RandomMembers, InterCellWiring::Leaders] {
        let cfg = config(Design::ConnectedStars, 60, Some(6), Some(1.0)).with_wiring(wiring);
        let g = generate(&cfg, RunSeed::new(4));
        // ten stars of five edges each plus one bridge per cell pair
        assert_eq!(g.edge_count(), 10 * 5 + 45);
        let bridges: Vec<_> = g.edges().iter().filter(|&&(u, v)| u / 6 != v / 6).collect();
        assert_eq!(bridges.len(), 45);
        if wiring == InterCellWiring::Leaders {
            assert!(bridges.iter().all(|&&(u, v)| u % 6 == 0 && v % 6 == 0));
        }
    }
}

#[test]
fn singleton_cells_reproduce_er() {
    let seed = RunSeed::new(12);
    for p in [0.05, 0.3] {
        let er = config(Design::ErdosRenyi, 40, None, Some(p));
        for design in [Design::ConnectedStars, Design::ConnectedCliques] {
            let cs = config(design, 40, Some(1), Some(p));
            assert_eq!(cs.seed_key(), er.seed_key());
            assert_eq!(generate_ensemble(&cs, seed), generate_ensemble(&er, seed));
        }
    }
}

#[test]
fn closed_form_examples() {
    assert_eq!(analytic_stars(180, 1, &ratio(1, 2), &ratio(1, 1)).unwrap(), (ratio(1, 1), ratio(0, 1)));
    assert_eq!(analytic_stars(3, 3, &ratio(1, 2), &ratio(1, 1)).unwrap().0, ratio(7, 12));
    assert_eq!(analytic_stars(180, 180, &ratio(3, 10), &ratio(1, 1)).unwrap().1, ratio(91, 180));
    assert_eq!(analytic_cycles(3, 3, &ratio(1, 2), &ratio(1, 1)).unwrap().0, ratio(3, 8));
    assert_eq!(analytic_cycles(4, 4, &ratio(1, 2), &ratio(1, 1)).unwrap().1, ratio(5, 6));
    for k in 1..=12 {
        assert_eq!(analytic_cycles(12, k, &ratio(0, 1), &ratio(1, 1)).unwrap().0, ratio(1, 1));
    }
    assert!((stars_single_cell_threshold(1.0f64) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    assert_eq!(stars_single_cell_threshold(0.0f64), 1.0);
    assert_eq!(stars_single_cell_threshold(2.0f64), 0.5);
}

/// Exact efficiency and oracle resilience of generated graphs equal the
/// closed forms, with and without a remainder cell.
#[test]
fn closed_forms_match_generated_graphs_exactly() {
    let one = ratio(1, 1);
    for design in [Design::Stars, Design::Cycles] {
        for n in [6, 8, 12] {
            for k in 1..=n {
                let g = generate(&config(design, n, Some(k), None), RunSeed::new(0));
                let w = efficiency::<BigRational>(&g, &one).unwrap();
                for tau in [ratio(1, 5), ratio(1, 2), ratio(9, 10)] {
                    let (r, w_closed) = exact_cell_metrics(design, n, k, &tau, &one).unwrap();
                    assert_eq!(w, w_closed, "{design} n={n} k={k}");
                    if g.edge_count() <= 12 {
                        let extent = expected_extent_exact(&g, &CascadeParams::new(tau.clone()).unwrap()).unwrap();
                        assert_eq!(r, one.clone() - extent / ratio(n as i64 - 1, 1), "{design} n={n} k={k}");
                    }
                    if n % k == 0 {
                        let analytic = match design {
                            Design::Stars => analytic_stars(n, k, &tau, &one),
                            _ => analytic_cycles(n, k, &tau, &one),
                        };
                        assert_eq!(analytic.unwrap(), (r, w_closed.clone()));
                    }
                }
            }
        }
    }
}

#[test]
fn closed_forms_match_simulation_at_full_size() {
    for (design, k) in [(Design::Stars, 6), (Design::Cycles, 12)] {
        let g = generate(&config(design, 180, Some(k), None), RunSeed::new(0));
        let (r, w) = exact_cell_metrics(design, 180, k, &0.6, &1.0).unwrap();
        assert!((efficiency::<f64>(&g, &1.0).unwrap() - w).abs() < 1e-12);
        let cfg = EstimatorConfig { min_reps: 40_000, max_reps: 40_000, ..Default::default() };
        let est = resilience(&g, &CascadeParams::new(0.6).unwrap(), RunSeed::new(31), &cfg).unwrap();
        assert!((est.mean - r).abs() < 4.0 * est.sample_sd / 200.0 + 1e-9, "{design}: {} vs {r}", est.mean);
    }
}
