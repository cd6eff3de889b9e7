mod common;

use common::*;
use corrtax::dynamics::DynamicsError;
use corrtax::prelude::*;
use corrtax::taxonomy::newick::parse_newick;
use proptest::prelude::*;

fn instance() -> impl Strategy<Value = (u64, usize, usize)> {
    (any::<u64>(), 2usize..10, 5usize..80)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ultrametric_is_dominated_and_strong((seed, n, t) in instance()) {
        let (_, d) = random_distance_from_panel(&mut rng(seed), n, t);
        let du = subdominant_ultrametric(&minimum_spanning_tree(&d).unwrap());
        for i in 0..n {
            prop_assert_eq!(du.get(i, i), 0.0);
            for j in 0..n {
                prop_assert_eq!(du.get(i, j), du.get(j, i));
                prop_assert!(du.get(i, j) <= d.get(i, j));
            }
        }
        prop_assert!(worst_ultrametric_excess(n, |i, j| du.get(i, j)) <= 0.0);
    }

    #[test]
    fn cophenetic_is_ultrametric((seed, n, _t) in instance()) {
        let d = random_tied_dissimilarity(&mut rng(seed), n);
        let dendro = single_linkage(&d).unwrap();
        prop_assert_eq!(dendro.merges().len(), n - 1);
        prop_assert!(dendro.merges().windows(2).all(|w| w[0].height <= w[1].height));
        prop_assert_eq!(dendro.merges().last().unwrap().size, n);
        let du = cophenetic(&dendro);
        prop_assert!(worst_ultrametric_excess(n, |i, j| du.get(i, j)) <= 0.0);
    }

    #[test]
    fn mst_is_a_spanning_tree((seed, n, t) in instance()) {
        let (_, d) = random_distance_from_panel(&mut rng(seed), n, t);
        let tree = minimum_spanning_tree(&d).unwrap();
        prop_assert_eq!(tree.edges().len(), n - 1);
        prop_assert!(tree.edges().windows(2).all(|w| w[0].weight <= w[1].weight));
        // rebuilding through the validating constructor proves connectivity
        prop_assert!(SpanningTree::new(tree.assets().to_vec(), tree.edges().to_vec()).is_ok());
    }

    #[test]
    fn newick_round_trip_reproduces_cophenetic((seed, n, t) in instance()) {
        let (_, d) = random_distance_from_panel(&mut rng(seed), n, t);
        let dendro = single_linkage(&d).unwrap();
        let du = cophenetic(&dendro);
        let text = export_newick(&dendro);
        let parsed = parse_newick(&text).unwrap();
        let back = parsed.cophenetic(d.assets()).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert!((back.get(i, j) - du.get(i, j)).abs() < 1e-9, "{} vs {}", back.get(i, j), du.get(i, j));
            }
        }
        prop_assert_eq!(export_newick(&dendro), text);
    }

    #[test]
    fn survival_fractions_are_multiples_of_inverse_edge_count(seed in any::<u64>(), n in 3usize..8) {
        let panel = random_panel(&mut rng(seed), n, 60);
        let returns = log_returns(&panel).unwrap();
        let plan = WindowPlan::new(20, 5, returns.len()).unwrap();
        let trees = rolling_trees(&returns, &plan).unwrap();
        prop_assert_eq!(trees.len(), (returns.len() - 20) / 5 + 1);
        for origin in 0..trees.len() {
            let curve = edge_survival(&trees, origin).unwrap();
            prop_assert_eq!(curve.fraction[0], 1.0);
            for f in &curve.fraction {
                let k = f * (n - 1) as f64;
                prop_assert!((k - k.round()).abs() < 1e-12 && (0.0..=1.0).contains(f));
            }
            if let Some(h) = tree_half_life(&curve, 1.0).half_life {
                // bracketed by the first lag at or below one half
                let first = curve.fraction.iter().position(|&f| f <= 0.5).unwrap() as f64;
                prop_assert!(h > first - 1.0 && h <= first);
            }
        }
    }

    #[test]
    fn window_count_law(rows in 2usize..200, width in 2usize..200, step in 1usize..20) {
        prop_assume!(width <= rows);
        let plan = WindowPlan::new(width, step, rows).unwrap();
        let starts: Vec<usize> = plan.starts(rows).collect();
        prop_assert_eq!(starts.len(), (rows - width) / step + 1);
        prop_assert!(starts.iter().all(|s| s + width <= rows));
        prop_assert!(starts.last().unwrap() + step + width > rows);
    }
}

#[test]
fn rolling_trees_match_sequential_evaluation() {
    let panel = random_panel(&mut rng(99), 8, 150);
    let returns = log_returns(&panel).unwrap();
    let plan = WindowPlan::new(30, 4, returns.len()).unwrap();
    let parallel = rolling_trees(&returns, &plan).unwrap();
    let sequential: Vec<SpanningTree> = plan
        .starts(returns.len())
        .map(|s| {
            let slice = returns.slice_window(s, 30).unwrap();
            minimum_spanning_tree(&distance_matrix(&correlation_matrix(&slice).unwrap())).unwrap()
        })
        .collect();
    assert_eq!(parallel, sequential);
}

#[test]
fn pipeline_is_bit_reproducible() {
    let run = || {
        let panel = generate_sector_market(&SectorConfig::uniform(3, 4, 1.0, 0.5, 300, 12)).unwrap();
        let returns = log_returns(&panel).unwrap();
        half_life_scaling(&returns, &[10, 20, 30, 40], &ScalingOptions::default()).unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    assert_eq!(a.slope.to_bits(), b.slope.to_bits());
    assert!(a.slope > 0.0);
    assert!(a.residuals.len() >= 2);
}

#[test]
fn scaling_restricts_the_fit_range() {
    let panel = generate_competitive_market(&CompetitionConfig::new(6, 400, 0.3, 4)).unwrap();
    let returns = log_returns(&panel).unwrap();
    let options = ScalingOptions {
        max_fit_width: 25.0,
        ..ScalingOptions::default()
    };
    let s = half_life_scaling(&returns, &[10, 20, 60], &options).unwrap();
    assert_eq!(s.widths, vec![10.0, 20.0, 60.0]);
    let fitted: Vec<f64> = s.residuals.iter().map(|r| r.0).collect();
    assert!(fitted.iter().all(|&w| w <= 25.0), "{fitted:?}");
    let (slope, _) = through_origin_fit(
        &s.widths
            .iter()
            .zip(&s.half_lives)
            .filter(|(w, h)| **w <= 25.0 && h.is_some())
            .map(|(w, h)| (*w, h.unwrap()))
            .collect::<Vec<_>>(),
    );
    assert_eq!(slope, s.slope);

    let weeks_per_obs = ScalingOptions {
        observation_duration: 2.0,
        max_fit_width: 1000.0,
        ..ScalingOptions::default()
    };
    let doubled = half_life_scaling(&returns, &[10, 20, 60], &weeks_per_obs).unwrap();
    assert_eq!(doubled.widths, vec![20.0, 40.0, 120.0]);
    for (a, b) in doubled.half_lives.iter().zip(&s.half_lives) {
        if let (Some(a), Some(b)) = (a, b) {
            assert!((a - 2.0 * b).abs() < 1e-12);
        }
    }
}

#[test]
fn scaling_with_no_decay_is_an_error() {
    // two assets: every tree is the single edge, nothing ever decays
    let panel = generate_competitive_market(&CompetitionConfig::new(2, 100, 0.3, 1)).unwrap();
    let returns = log_returns(&panel).unwrap();
    let err = half_life_scaling(&returns, &[10, 20], &ScalingOptions::default()).unwrap_err();
    assert_eq!(err, DynamicsError::TooFewPoints(0));
}
