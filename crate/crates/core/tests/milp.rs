use multidef_core::cascade::CascadeMethod;
use multidef_core::games::{node_values, NetworkGame, UniformGame};
use multidef_core::lp::{solve_lp, write_lp};
use multidef_core::milp::{best_response, build_br_milp, grid_best_response, BrConfig};
use multidef_core::model::{ase_utilities, attacker_value, CoverageProfile, InterdependentGame};
use multidef_core::netgen::{grid, partition};
use multidef_core::rng::{sample_simplex, substream};
use proptest::prelude::*;
use rand::Rng;

fn random_opponents(g: &InterdependentGame, seed: u64) -> CoverageProfile {
    let mut rng = substream(seed, &[77]);
    let cov: Vec<f64> = (0..g.target_count()).map(|_| rng.gen::<f64>()).collect();
    CoverageProfile::from_coverage(g, &cov).unwrap()
}

fn game(seed: u64, targets: usize, shared: bool) -> InterdependentGame {
    UniformGame {
        defenders: 2,
        targets,
        cost: 0.2,
        shared_losses: shared,
    }
    .generate(seed)
    .unwrap()
}

fn grid_game(side: usize, players: usize, p: f64, seed: u64) -> InterdependentGame {
    let t = grid(side, side).unwrap();
    let part = partition(&t, players).unwrap();
    let method = CascadeMethod::Auto { cap: 20, samples: 2000, seed };
    NetworkGame { p, cost: 0.2, method }
        .build(&t, &part, &node_values(seed, side * side))
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn tied_opponents_agree_with_grid_search(seed in 0u64..10_000, p in 0.0f64..1.0, mask: u16) {
        let g = grid_game(3, 4, p, seed);
        let cov: Vec<f64> = (0..g.target_count()).map(|j| f64::from((mask >> j) & 1)).collect();
        let prof = CoverageProfile::from_coverage(&g, &cov).unwrap();
        let cfg = BrConfig::for_game(&g).strict(true);
        for d in 0..g.defender_count() {
            let br = best_response(&g, d, &prof, &cfg).unwrap();
            let grid = grid_best_response(&g, d, &prof, 0.01, cfg.tie_tolerance()).unwrap();
            prop_assert!((br.simulated_utility - grid.utility).abs() <= 0.02, "{} vs grid {}", br.simulated_utility, grid.utility);
        }
    }

    #[test]
    fn agrees_with_grid_search(seed in 0u64..10_000, targets in 2usize..5, shared: bool) {
        let g = game(seed, targets, shared);
        let p = random_opponents(&g, seed);
        let cfg = BrConfig::for_game(&g).strict(true);
        for d in 0..2 {
            let br = best_response(&g, d, &p, &cfg).unwrap();
            let grid = grid_best_response(&g, d, &p, 0.01, cfg.tie_tolerance()).unwrap();
            prop_assert!(br.simulated_utility >= grid.utility - 0.02, "{} vs grid {}", br.simulated_utility, grid.utility);
            prop_assert!((br.simulated_utility - grid.utility).abs() <= 0.02);
        }
    }

    #[test]
    fn dominates_random_strategies(seed in 0u64..10_000, targets in 2usize..7, shared: bool) {
        let g = game(seed, targets, shared);
        let p = random_opponents(&g, seed);
        let cfg = BrConfig::for_game(&g);
        let br = best_response(&g, 0, &p, &cfg).unwrap();
        let mut rng = substream(seed, &[5]);
        for _ in 0..100 {
            let mut alt = p.clone();
            for j in g.owned_targets(0) {
                alt.set_row(j, &sample_simplex(&mut rng, 2)).unwrap();
            }
            let (_, u) = ase_utilities(&g, &alt, cfg.tie_tolerance()).unwrap();
            prop_assert!(br.simulated_utility >= u[0] - 1e-6, "{} < {}", br.simulated_utility, u[0]);
        }
    }

    #[test]
    fn linearization_is_exact(seed in 0u64..10_000, targets in 2usize..7, shared: bool, mask in 1u32..64) {
        let g = game(seed, targets, shared);
        let p = random_opponents(&g, seed);
        let cfg = BrConfig::for_game(&g);
        let inst = build_br_milp(&g, 1, &p, cfg.delta, cfg.big_m).unwrap();
        let mut rng = substream(seed, &[9]);
        let rows: Vec<Vec<f64>> = inst.q.iter().map(|_| sample_simplex(&mut rng, 2)).collect();
        let attacked: Vec<bool> = (0..targets).map(|j| mask >> (j % 6) & 1 == 1).collect();
        prop_assume!(attacked.iter().any(|&a| a));
        let mut lp = inst.fixed_program(&rows, &attacked).unwrap();

        let mut full = p.clone();
        for ((j, _), row) in inst.q.iter().zip(&rows) {
            full.set_row(*j, row).unwrap();
        }
        let x = |j: usize| -> f64 { full.row(j).iter().enumerate().map(|(o, q)| q * g.defender_util(1, j, o)).sum() };
        let support: Vec<usize> = (0..targets).filter(|&j| attacked[j]).collect();
        let avg = support.iter().map(|&j| x(j)).sum::<f64>() / support.len() as f64;
        let cost: f64 = inst.q.iter().zip(&rows).map(|((j, _), row)| row[1] * g.cost(*j, 1)).sum();
        let direct = avg - cost;

        let hi = solve_lp(&lp).unwrap().objective;
        for t in &mut lp.objective {
            t.1 = -t.1;
        }
        lp.offset = -lp.offset;
        let lo = -solve_lp(&lp).unwrap().objective;
        prop_assert!((hi - direct).abs() <= 1e-9, "max {} vs {}", hi, direct);
        prop_assert!((lo - direct).abs() <= 1e-9, "min {} vs {}", lo, direct);
    }

    #[test]
    fn attack_support_is_consistent(seed in 0u64..10_000, targets in 2usize..7, shared: bool) {
        let g = game(seed, targets, shared);
        let p = random_opponents(&g, seed);
        let cfg = BrConfig::for_game(&g);
        let br = best_response(&g, 1, &p, &cfg).unwrap();
        let prof = br.apply(&p).unwrap();
        let values: Vec<f64> = (0..targets).map(|j| attacker_value(&g, &prof, j).unwrap()).collect();
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let must = (1.0 - br.delta) / cfg.big_m;
        for j in 0..targets {
            if br.attack_support.contains(&j) {
                prop_assert!(values[j] >= max - br.delta - 1e-7);
            } else {
                prop_assert!(values[j] <= max - must + 1e-7);
            }
        }
        prop_assert!((br.utility - br.simulated_utility).abs() <= 1e-6);
    }
}

#[test]
fn lp_dump_names_every_row() {
    let g = game(3, 4, true);
    let p = random_opponents(&g, 3);
    let cfg = BrConfig::for_game(&g);
    let inst = build_br_milp(&g, 0, &p, cfg.delta, cfg.big_m).unwrap();
    let text = write_lp(&inst.lp);
    assert!(text.starts_with("Maximize"));
    for row in &inst.lp.rows {
        assert!(text.contains(&format!(" {}:", row.name)), "missing {}", row.name);
    }
    assert!(text.contains("Binaries") || text.contains("General"));
    assert!(text.trim_end().ends_with("End"));
}

#[test]
fn same_instance_same_answer() {
    let g = game(11, 6, true);
    let p = random_opponents(&g, 11);
    let cfg = BrConfig::for_game(&g);
    assert_eq!(best_response(&g, 0, &p, &cfg).unwrap(), best_response(&g, 0, &p, &cfg).unwrap());
}

#[test]
fn many_tied_opponents_stay_cheap() {
    let g = grid_game(4, 8, 0.7, 1);
    let prof = CoverageProfile::fully_defended(&g);
    let mut cfg = BrConfig::for_game(&g);
    cfg.rel_gap = 1e-3;
    for d in 0..g.defender_count() {
        let br = best_response(&g, d, &prof, &cfg).unwrap();
        assert!(br.nodes < 1000, "defender {d} took {} nodes", br.nodes);
    }
}
