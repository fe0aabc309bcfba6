use multidef_core::analytic;
use multidef_core::games::UniformGame;
use multidef_core::milp::BrConfig;
use multidef_core::model::{
    ase_attack, encode_independent, regret, CoverageProfile, IndependentParams, InterdependentGame,
};
use multidef_core::search::{iterated_best_response, ribr, run, Algorithm, SearchConfig};
use proptest::prelude::*;

fn cfg(alg: Algorithm, game: &InterdependentGame, iterations: usize, seed: u64) -> SearchConfig {
    SearchConfig {
        iterations,
        seed,
        ..SearchConfig::new(alg, game)
    }
}

/// Two defenders with one unit-value target each and coverage cost 0.01.
fn pathology_game() -> InterdependentGame {
    encode_independent(&IndependentParams::baseline(1.0, 0.01, 2)).unwrap()
}

#[test]
fn undefended_corner_has_half_unit_regret() {
    let g = pathology_game();
    let r = regret(&g, &CoverageProfile::undefended(&g), &BrConfig::for_game(&g)).unwrap();
    assert!((r - 0.5).abs() < 0.01, "regret {r}");
    assert!(r < 0.5);
}

#[test]
fn ribr_escapes_the_pathology() {
    let g = pathology_game();
    let c = cfg(Algorithm::Ribr, &g, 1000, 0);
    let t = ribr(&g, &c).unwrap();
    assert!(t.best_regret() <= 2.0 * c.br.delta, "regret {}", t.best_regret());
}

#[test]
fn best_responses_escalate_from_the_undefended_corner() {
    let g = pathology_game();
    let c = SearchConfig {
        restart_budget: 50,
        ..cfg(Algorithm::IteratedBestResponse, &g, 200, 0)
    };
    let t = iterated_best_response(&g, &CoverageProfile::undefended(&g), &c).unwrap();
    assert!(t.points.len() >= 3);
    for w in t.points.windows(2) {
        let attack = ase_attack(&g, &w[0].profile, c.br.tie_tolerance()).unwrap();
        for j in 0..2 {
            if attack.p[j] > 0.0 {
                assert!(w[1].profile.coverage(j) >= w[0].profile.coverage(j) - 1e-12);
            }
        }
    }
    let last = &t.points.last().unwrap().profile;
    assert!(last.coverage(0) + last.coverage(1) > t.points[0].profile.coverage(0) + t.points[0].profile.coverage(1));
}

#[test]
fn random_search_beats_the_undefended_corner() {
    let g = pathology_game();
    let t = run(&g, &cfg(Algorithm::RandomSearch, &g, 1000, 1)).unwrap();
    let corner = regret(&g, &CoverageProfile::undefended(&g), &BrConfig::for_game(&g)).unwrap();
    assert!(t.best_regret() < corner);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn ribr_finds_full_coverage_equilibria(v in 0.5f64..3.0, ratio in 0.05f64..0.9, n in 2u32..4, k in 1u32..3) {
        let p = IndependentParams::multi_target(v, v * ratio / k as f64, n, k);
        let a = analytic::solve(&p).unwrap();
        prop_assert!(a.ne_exists);
        let g = encode_independent(&p).unwrap();
        let t = ribr(&g, &cfg(Algorithm::Ribr, &g, 400, 0)).unwrap();
        prop_assert!(t.best_regret() <= 1e-3, "regret {}", t.best_regret());
        let prof = &t.report.profile;
        for j in 0..g.target_count() {
            prop_assert!(prof.coverage(j) >= 0.98, "coverage {}", prof.coverage(j));
        }
    }

    #[test]
    fn zero_regret_starts_are_fixed_points(seed in 0u64..1000) {
        let g = UniformGame { defenders: 2, targets: 4, cost: 0.2, shared_losses: false }.generate(seed).unwrap();
        let found = ribr(&g, &cfg(Algorithm::Ribr, &g, 300, seed)).unwrap();
        prop_assume!(found.best_regret() < 1e-6);
        let start = found.report.profile.clone();
        let t = iterated_best_response(&g, &start, &cfg(Algorithm::IteratedBestResponse, &g, 50, 0)).unwrap();
        prop_assert_eq!(t.points.len(), 1);
        prop_assert_eq!(&t.report.profile, &start);
    }

    #[test]
    fn every_algorithm_is_reproducible(seed in 0u64..1000, alg in 0usize..4) {
        let alg = [Algorithm::RandomSearch, Algorithm::SimulatedAnnealing, Algorithm::IteratedBestResponse, Algorithm::Ribr][alg];
        let g = UniformGame { defenders: 2, targets: 4, cost: 0.2, shared_losses: true }.generate(seed).unwrap();
        let c = cfg(alg, &g, 60, seed);
        let a = run(&g, &c).unwrap();
        prop_assert_eq!(&a, &run(&g, &c).unwrap());
        prop_assert!(a.solves <= 60);
        prop_assert!(a.points.windows(2).all(|w| w[1].best <= w[0].best));
        prop_assert_eq!(a.points.last().unwrap().best, a.best_regret());
    }
}

#[test]
fn ribr_regret_within_twice_the_closed_form() {
    let mut misses = Vec::new();
    for i in 0..24u32 {
        let (v, ratio, n) = (0.5 + 0.07 * i as f64, 1.1 + 0.13 * i as f64, 2 + i % 3);
        let p = IndependentParams::baseline(v, v * ratio, n);
        let a = analytic::solve(&p).unwrap();
        assert!(!a.ne_exists);
        let g = encode_independent(&p).unwrap();
        let t = ribr(&g, &cfg(Algorithm::Ribr, &g, 1000, i as u64)).unwrap();
        if t.best_regret() > 2.0 * a.epsilon {
            misses.push(format!("v={v:.2} c={:.2} n={n}: {:.4} vs {:.4}", v * ratio, t.best_regret(), a.epsilon));
        }
    }
    assert!(misses.is_empty(), "{misses:#?}");
}
