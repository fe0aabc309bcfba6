use std::fs;
use std::path::Path;

use multidef::experiment::{run_experiment, ExperimentConfig, SearchSpec, TopologySpec};

fn small() -> ExperimentConfig {
    ExperimentConfig {
        topology: TopologySpec::ErdosRenyi { n: 8, p: 0.3 },
        players: vec![1, 2],
        p: vec![0.3],
        samples: 2,
        search: SearchSpec {
            iterations: 60,
            ..SearchSpec::default()
        },
        ..ExperimentConfig::desk()
    }
}

fn data_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

#[test]
fn presets_parse_back() {
    for cfg in [ExperimentConfig::desk(), ExperimentConfig::full()] {
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        assert_eq!(ExperimentConfig::parse(&text).unwrap(), cfg);
    }
    let cfg = ExperimentConfig::parse(r#"{"topology": {"kind": "grid", "rows": 2, "cols": 3}, "players": [1, 3], "p": [0.5], "cost": 0.1, "samples": 4}"#).unwrap();
    assert_eq!(cfg.search, SearchSpec::default());
    assert!(cfg.trace);
}

#[test]
fn invalid_configs_are_rejected() {
    let base = r#""topology": {"kind": "grid", "rows": 2, "cols": 2}, "cost": 0.2"#;
    for body in [
        format!(r#"{{{base}, "players": [1], "p": [0.5], "samples": 0}}"#),
        format!(r#"{{{base}, "players": [], "p": [0.5], "samples": 1}}"#),
        format!(r#"{{{base}, "players": [1], "p": [1.5], "samples": 1}}"#),
        format!(r#"{{{base}, "players": [0], "p": [0.5], "samples": 1}}"#),
        format!(r#"{{{base}, "players": [1], "p": [0.5], "samples": 1, "search": {{"algorithm": "tabu"}}}}"#),
        format!(r#"{{{base}, "players": [1], "p": [0.5], "samples": 1, "colour": "red"}}"#),
    ] {
        assert!(ExperimentConfig::parse(&body).is_err(), "accepted {body}");
    }
}

#[test]
fn outputs_cover_every_cell() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small();
    let out = run_experiment(&cfg, dir.path(), 1, 3).unwrap();
    assert_eq!(out.rows.len(), 4);
    assert_eq!(out.computed, 4);
    assert!(out.failures.is_empty());

    let results = data_lines(&dir.path().join("results.csv"));
    assert!(results[0].starts_with("topology,sample,seed,players,p,welfare_eq"));
    assert_eq!(results.len(), 5);
    let centrality = data_lines(&dir.path().join("centrality.csv"));
    assert_eq!(centrality.len(), 1 + 4 * 8);
    assert_eq!(data_lines(&dir.path().join("summary.csv")).len(), 3);
    assert_eq!(data_lines(&dir.path().join("timings.csv")).len(), 5);
    assert_eq!(fs::read_dir(dir.path().join("trace")).unwrap().count(), 4);

    for (row, cell) in out.rows.iter().zip(&out.cells) {
        assert_eq!((row.sample, row.players), (cell.sample, cell.players));
        assert!(cell.solves <= 60);
        assert_eq!(cell.coverage.len(), 8);
        if row.players == 1 {
            assert_eq!(row.welfare_eq, row.welfare_opt);
        }
    }
}

#[test]
fn resume_reuses_finished_cells() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small();
    let first = run_experiment(&cfg, dir.path(), 1, 3).unwrap();
    let results = fs::read(dir.path().join("results.csv")).unwrap();

    let again = run_experiment(&cfg, dir.path(), 1, 3).unwrap();
    assert_eq!((again.computed, again.reused), (0, 4));
    assert_eq!(again.rows, first.rows);
    assert_eq!(fs::read(dir.path().join("results.csv")).unwrap(), results);

    let more = ExperimentConfig { samples: 3, ..cfg.clone() };
    let grown = run_experiment(&more, dir.path(), 1, 3).unwrap();
    assert_eq!((grown.computed, grown.reused), (2, 4));
    assert_eq!(&grown.rows[..4], &first.rows[..]);

    let pricier = ExperimentConfig { cost: 0.3, ..cfg };
    assert_eq!(run_experiment(&pricier, dir.path(), 1, 3).unwrap().computed, 4);
    assert_eq!(run_experiment(&small(), dir.path(), 1, 4).unwrap().computed, 4);
}

#[test]
fn file_topologies_use_given_partitions() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("star.txt");
    fs::write(&graph, "# nodes 5\n0 1\n0 2\n0 3\n0 4\n").unwrap();
    let part = dir.path().join("star2.txt");
    fs::write(&part, "0 0\n1 0\n2 1\n3 1\n4 1\n").unwrap();
    let cfg = ExperimentConfig {
        topology: TopologySpec::File {
            path: graph.clone(),
            partitions: vec![(2, part)],
        },
        players: vec![1, 2],
        p: vec![0.5],
        samples: 1,
        search: SearchSpec {
            iterations: 40,
            ..SearchSpec::default()
        },
        ..ExperimentConfig::desk()
    };
    let out = run_experiment(&cfg, &dir.path().join("out"), 1, 0).unwrap();
    assert_eq!(out.rows.len(), 2);
    let closeness = &out.cells[0].closeness;
    assert!(closeness[1..].iter().all(|&c| c < closeness[0]));

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "0 0\n1 0\n2 0\n3 0\n4 0\n").unwrap();
    let cfg = ExperimentConfig {
        topology: TopologySpec::File {
            path: graph,
            partitions: vec![(2, bad)],
        },
        ..cfg
    };
    let out = run_experiment(&cfg, &dir.path().join("bad_out"), 1, 0).unwrap();
    assert_eq!(out.failures.len(), 1);
    assert_eq!(out.rows.len(), 1);
}
