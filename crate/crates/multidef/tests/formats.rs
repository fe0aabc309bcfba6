use multidef::gamefile::{game_to_json, parse_game};
use multidef::graphfile::{parse_partition, parse_topology, partition_to_string, topology_to_string};
use multidef_core::games::UniformGame;
use multidef_core::model::{encode_independent, IndependentParams};
use multidef_core::netgen::{erdos_renyi, grid, partition, preferential_attachment};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn game_files_round_trip(seed: u64, defenders in 1usize..4, extra in 0usize..5, shared: bool, cost in 0.0f64..1.0) {
        let g = UniformGame { defenders, targets: defenders + extra, cost, shared_losses: shared }.generate(seed).unwrap();
        let text = game_to_json(&g);
        let back = parse_game(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(game_to_json(&back), text);
    }

    #[test]
    fn topology_files_round_trip(n in 1usize..40, p in 0.0f64..0.5, seed: u64) {
        let t = erdos_renyi(n, p, seed).unwrap();
        let back = parse_topology(&topology_to_string(&t), "x").unwrap();
        prop_assert_eq!(back.node_count(), t.node_count());
        prop_assert_eq!(back.edges(), t.edges());
    }
}

#[test]
fn offsets_survive_a_round_trip() {
    let g = encode_independent(&IndependentParams::general(-2.0, -10.0, -1.0, 1.0, 2, 3)).unwrap();
    assert!(g.offsets().iter().any(|&o| o != 0.0));
    assert_eq!(parse_game(&game_to_json(&g)).unwrap(), g);
}

#[test]
fn documented_example_parses() {
    let g = parse_game(
        r#"{
          "targets": ["a", "b"],
          "owners": [0, 1],
          "configs": ["uncovered", "covered"],
          "costs": [[0.0, 0.2], [0.0, 0.2]],
          "defender_utils": [[[-1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]],
          "attacker_vals": [[1.0, 0.0], [1.0, 0.0]],
          "offsets": [0.0, 0.0]
        }"#,
    )
    .unwrap();
    assert_eq!(g.defender_count(), 2);
    assert_eq!(g.defender_util(1, 1, 0), -1.0);
    assert_eq!(g.cost(0, 1), 0.2);
}

#[test]
fn cascade_section_derives_utilities() {
    let g = parse_game(
        r#"{
          "targets": ["a", "b"],
          "owners": [0, 1],
          "configs": ["uncovered", "covered"],
          "costs": [[0.0, 0.2], [0.0, 0.2]],
          "cascade": {
            "edges": [[0, 1, 0.5]],
            "direct": [[1.0, 0.0], [1.0, 0.0]],
            "values": [[1.0, 0.0], [0.0, 2.0]]
          }
        }"#,
    )
    .unwrap();
    assert_eq!(g.defender_util(0, 0, 0), -1.0);
    assert_eq!(g.defender_util(1, 0, 0), -1.0);
    assert_eq!(g.defender_util(1, 0, 1), 0.0);
    assert_eq!(g.attacker_val(0, 0), 2.0);
    assert_eq!(g.attacker_val(1, 0), 2.0);
}

#[test]
fn malformed_games_are_rejected() {
    let base = r#""targets": ["a"], "owners": [0], "configs": ["x", "y"], "costs": [[0.0, 0.1]]"#;
    for body in [
        format!("{{{base}}}"),
        format!(r#"{{{base}, "defender_utils": [[[-1.0, 0.0]]]}}"#),
        format!(r#"{{{base}, "defender_utils": [[[-1.0]]], "attacker_vals": [[1.0, 0.0]]}}"#),
        format!(r#"{{{base}, "defender_utils": [[[-1.0, 0.0]]], "attacker_vals": [[1.0, 0.0]], "extra": 1}}"#),
        format!(
            r#"{{{base}, "defender_utils": [[[-1.0, 0.0]]], "attacker_vals": [[1.0, 0.0]], "cascade": {{"edges": [], "direct": [[1.0, 0.0]], "values": [[1.0]]}}}}"#
        ),
    ] {
        assert!(parse_game(&body).is_err(), "accepted {body}");
    }
}

#[test]
fn partitions_round_trip() {
    let t = preferential_attachment(30, 2, 4).unwrap();
    let p = partition(&t, 3).unwrap();
    assert_eq!(parse_partition(&partition_to_string(&p), &t).unwrap(), p);
}

#[test]
fn partition_files_are_validated() {
    let t = grid(2, 2).unwrap();
    assert!(parse_partition("0 0\n1 0\n2 1\n", &t).is_err());
    assert!(parse_partition("0 0\n1 0\n2 1\n3 1\n3 0\n", &t).is_err());
    assert!(parse_partition("0 0\n1 0\n2 1\n9 1\n", &t).is_err());
    assert!(parse_partition("0 0\n1 0\n2 2\n3 2\n", &t).is_err());
    let p = parse_partition("# parts 2\n0 0\n1 1\n2 0\n3 1\n", &t).unwrap();
    assert_eq!(p.cut, 2);
}

#[test]
fn topology_files_keep_isolated_nodes() {
    let t = parse_topology("# nodes 5\n0 1\n1 2\n", "x").unwrap();
    assert_eq!(t.node_count(), 5);
    assert!(parse_topology("0 0\n", "x").is_err());
    assert!(parse_topology("0\n", "x").is_err());
    assert!(parse_topology("0 1\n1 0\n", "x").is_err());
}
