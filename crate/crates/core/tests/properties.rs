//! Randomized invariants, each checked against a direct computation.

use std::collections::BTreeMap;

use equistar::model::is_capped_l_coloring;
use equistar::greedy::{post_greedy_disposition, rebalance, Disposition};
use equistar::reduction::{equitable_2colorable, orientation_coloring, Orientation};
use equistar::report::{random_symmetry, sample_reduce_instance};
use equistar::{
    canonicalize, is_equitable_k_coloring, is_equitable_l_coloring, lemma_reduce_color,
    run_eps_greedy, sample_assignment, solve, solve_with, theorem_main_color, Color, ListAssignment, StarForest,
    Strategy as SolveStrategy,
};
use itertools::Itertools;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Tries every coloring from the lists.
fn brute_force_colorable(f: &StarForest, l: &ListAssignment, cap: usize) -> bool {
    l.lists().iter().multi_cartesian_product().any(|colors| {
        let proper = (0..f.component_count()).all(|c| {
            let center = colors[f.offset(c)];
            f.leaf_range(c).all(|v| colors[v] != center)
        });
        let mut usage: BTreeMap<&Color, usize> = BTreeMap::new();
        for c in &colors {
            *usage.entry(c).or_default() += 1;
        }
        proper && usage.values().all(|&n| n <= cap)
    })
}

fn small_forest() -> impl Strategy<Value = StarForest> {
    prop::collection::vec(0usize..=3, 1..=3)
        .prop_filter("at most 7 vertices", |s| s.iter().map(|m| m + 1).sum::<usize>() <= 7)
        .prop_map(|s| StarForest::new(s).unwrap())
}

fn two_stars(max: usize) -> impl Strategy<Value = StarForest> {
    (1..=max, 1..=max).prop_map(|(a, b)| StarForest::new(vec![a, b]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn solver_matches_brute_force(f in small_forest(), k in 1usize..=3, extra in 0usize..=3, seed: u64) {
        let l = sample_assignment(&f, k, k + extra, seed).unwrap();
        let cap = f.vertex_count().div_ceil(k);
        let expected = brute_force_colorable(&f, &l, cap);
        for strategy in [SolveStrategy::CenterEnumeration, SolveStrategy::UsageDp, SolveStrategy::Backtracking] {
            if strategy == SolveStrategy::UsageDp && l.palette().len() > equistar::solver::DP_MAX_PALETTE {
                continue;
            }
            let out = solve_with(&f, &l, k, strategy).unwrap();
            prop_assert_eq!(out.colorable, expected, "{:?}", strategy);
            if let Some(w) = &out.witness {
                prop_assert!(is_equitable_l_coloring(&f, &l, w, k).unwrap());
            }
        }
    }

    #[test]
    fn greedy_invariants_hold(f in two_stars(20), k in 3usize..=6, extra in 0usize..=6, seed: u64) {
        let l = sample_assignment(&f, k, k + extra, seed).unwrap();
        let out = run_eps_greedy(&f, &l, k).unwrap();
        prop_assert!(out.check_invariants(&f, &l).is_ok(), "{:?}", out.check_invariants(&f, &l));
        match post_greedy_disposition(&f, &l, &out).unwrap() {
            Disposition::ColorableNow(c) => prop_assert!(is_equitable_l_coloring(&f, &l, &c, k).unwrap()),
            Disposition::NeedRebalance(state) => {
                prop_assert_eq!(state.classes.len(), k - 2);
                let before = state.mu(&f);
                let (after, moves) = rebalance(&f, &l, state).unwrap();
                let mu = after.mu(&f);
                prop_assert!(mu[0].abs_diff(mu[1]) <= before[0].abs_diff(before[1]));
                prop_assert_eq!(before[0].abs_diff(before[1]) - mu[0].abs_diff(mu[1]), 2 * moves.len());
                prop_assert_eq!(mu[0] + mu[1], before[0] + before[1]);
                for class in &after.classes {
                    prop_assert_eq!(class.vertices.len(), out.rho);
                }
            }
        }
    }

    #[test]
    fn layered_colorer_output_verifies(f in two_stars(30), k in 3usize..=5, extra in 0usize..=8, seed: u64) {
        let (a, b) = (f.leaves(0), f.leaves(1));
        prop_assume!(equistar::closed_form::thm_main_sufficient(a, b, k));
        let l = sample_assignment(&f, k, k + extra, seed).unwrap();
        let out = theorem_main_color(&f, &l, k).unwrap();
        let c = out.coloring.expect("the hypotheses guarantee a coloring");
        prop_assert!(is_equitable_l_coloring(&f, &l, &c, k).unwrap());
    }

    #[test]
    fn reduce_color_respects_cap(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, l, c) = sample_reduce_instance(&mut rng);
        let sigma = (f.leaves(0) + f.leaves(1) + 2) / 2;
        let out = lemma_reduce_color(&f, &l, c).unwrap();
        prop_assert!(is_capped_l_coloring(&f, &l, &out, sigma));
    }

    #[test]
    fn canonical_form_is_a_class_invariant(f in small_forest(), k in 1usize..=3, extra in 0usize..=4, seed: u64) {
        let l = sample_assignment(&f, k, k + extra, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let moved = random_symmetry(&f, &l, &mut rng).apply(&l).unwrap();
        let a = canonicalize(&f, &l).unwrap();
        prop_assert_eq!(&a, &canonicalize(&f, &moved).unwrap());
        prop_assert_eq!(&a, &canonicalize(&f, a.assignment()).unwrap());
        // colorability is a class invariant too
        prop_assert_eq!(solve(&f, &l, k).unwrap().colorable, solve(&f, a.assignment(), k).unwrap().colorable);
    }

    #[test]
    fn orientation_dp_matches_exhaustive(stars in prop::collection::vec(0usize..=12, 1..=10)) {
        let f = StarForest::new(stars.clone()).unwrap();
        let any = (0..stars.len())
            .map(|_| [false, true])
            .multi_cartesian_product()
            .any(|bits| Orientation(bits).is_equitable(&f));
        let found = equitable_2colorable(&f);
        prop_assert_eq!(found.is_some(), any);
        if let Some(o) = found {
            prop_assert!(is_equitable_k_coloring(&f, &orientation_coloring(&f, &o).unwrap(), 2));
        }
    }
}
