use std::path::Path;
use std::process::{Command, Output};

use mac_search::cli::output::{parse_document, Line};
use mac_search::oracle::build_running_example_fixture;

fn macs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_macs")).args(args).output().expect("binary runs")
}

fn fixture_region() -> String {
    let (_, region) = build_running_example_fixture();
    region.bounds().iter().map(|(lo, hi)| format!("{lo},{hi}")).collect::<Vec<_>>().join("x")
}

fn fixture_query(extra: &[&str]) -> Output {
    let region = fixture_region();
    let mut args = vec!["query", "--fixture", "--q", "v2,v3,v6", "--k", "3", "--t", "9", "--region", &region];
    args.extend_from_slice(extra);
    macs(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

/// Score of a row under the reduced weight `w`, computed from scratch.
fn score(x: &[f64], w: &[f64]) -> f64 {
    let last = 1.0 - w.iter().sum::<f64>();
    x.iter().zip(w.iter().chain(std::iter::once(&last))).map(|(a, b)| a * b).sum()
}

#[test]
fn fixture_query_documents_are_self_consistent() {
    let (rsn, region) = build_running_example_fixture();
    for extra in [&[][..], &["--mode", "gs-t", "--j", "2"], &["--mode", "ls-nc"], &["--mode", "ls-t", "--j", "2"]] {
        let o = fixture_query(extra);
        assert_eq!(o.status.code(), Some(0), "{extra:?}: {}", String::from_utf8_lossy(&o.stderr));
        let lines = parse_document(&stdout(&o)).unwrap();
        let Line::Header(h) = &lines[0] else { panic!("first line is the header") };
        assert_eq!(h.core_size, 7);
        assert_eq!(h.cells, lines.len() - 1);
        assert_eq!(h.strategy.is_some(), extra.contains(&"ls-nc") || extra.contains(&"ls-t"));
        for line in &lines[1..] {
            let Line::Cell(c) = line else { panic!("cell lines follow the header") };
            assert!(region.contains(&c.witness, 0.0));
            for hs in &c.halfspaces {
                let v = hs.a.iter().zip(&c.witness).map(|(a, w)| a * w).sum::<f64>() + hs.b;
                assert!(if hs.side == "pos" { v > 0.0 } else { v < 0.0 });
            }
            for (i, com) in c.communities.iter().enumerate() {
                assert_eq!(com.rank, i + 1);
                let min = com.ids.iter().map(|&v| score(rsn.social.attributes(v), &c.witness)).fold(f64::INFINITY, f64::min);
                assert!((min - com.score).abs() < 1e-9);
                let names: Vec<&str> = com.ids.iter().map(|&v| rsn.social.name(v)).collect();
                assert_eq!(names, com.members);
            }
        }
    }
}

#[test]
fn output_is_byte_identical_across_runs() {
    for extra in [&["--mode", "gs-t", "--j", "3"][..], &["--mode", "ls-t", "--j", "2"]] {
        assert_eq!(fixture_query(extra).stdout, fixture_query(extra).stdout);
    }
}

#[test]
fn no_core_exits_with_two_and_an_empty_document() {
    let region = fixture_region();
    let o = macs(&["query", "--fixture", "--q", "v2,v3,v6", "--k", "6", "--t", "9", "--region", &region]);
    assert_eq!(o.status.code(), Some(2));
    let lines = parse_document(&stdout(&o)).unwrap();
    assert_eq!(lines.len(), 1);
    let Line::Header(h) = &lines[0] else { panic!() };
    assert_eq!(h.cells, 0);
    assert!(h.diagnostic.as_deref().unwrap().starts_with("no (k,t)-core"));
}

#[test]
fn usage_errors_exit_with_one() {
    let o = fixture_query(&["--j", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--j"));
    assert_eq!(fixture_query(&["--mode", "gs-t"]).status.code(), Some(1));
    assert_eq!(macs(&["query", "--fixture", "--q", "v2", "--k", "2", "--t", "9"]).status.code(), Some(1));
    let region = fixture_region();
    let o = macs(&["query", "--fixture", "--q", "nobody", "--k", "2", "--t", "9", "--region", &region]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(macs(&["--help"]).status.code(), Some(0));
}

#[test]
fn index_round_trip_gives_the_same_answer() {
    let dir = tempfile::tempdir().unwrap();
    let idx = dir.path().join("q.idx");
    let idx_s = idx.to_str().unwrap();
    let region = fixture_region();
    let o = macs(&["index", "build", "--fixture", "--q", "v2,v3,v6", "--k", "3", "--t", "9", "--region", &region, "--out", idx_s]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&macs(&["index", "load", idx_s]).stdout).unwrap();
    assert_eq!(summary["k"], 3);
    for mode in [&["--mode", "gs-t", "--j", "2"][..], &["--mode", "ls-nc"]] {
        let mut with = mode.to_vec();
        with.extend(["--index", idx_s]);
        assert_eq!(fixture_query(mode).stdout, fixture_query(&with).stdout);
    }
    // A different query is refused.
    let o = macs(&["query", "--fixture", "--q", "v2,v3", "--k", "3", "--t", "9", "--region", &region, "--index", idx_s]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn corrupted_index_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let idx = dir.path().join("q.idx");
    let region = fixture_region();
    let idx_s = idx.to_str().unwrap();
    macs(&["index", "build", "--fixture", "--q", "v2,v3,v6", "--k", "3", "--t", "9", "--region", &region, "--out", idx_s]);
    let mut bytes = std::fs::read(&idx).unwrap();
    bytes[0] ^= 0xff;
    std::fs::write(&idx, &bytes).unwrap();
    let o = macs(&["index", "load", idx_s]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unrecognized index version"));
    let o = fixture_query(&["--index", idx_s]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn oracle_subcommand_ranks_the_example_weights() {
    let o = macs(&["oracle", "--fixture", "--q", "v2,v3,v6", "--k", "3", "--t", "9", "--at-weight", "0.19,0.3", "--j", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["communities"][0]["members"], serde_json::json!(["v2", "v3", "v6", "v7"]));
    assert_eq!(v["communities"][1]["members"], serde_json::json!(["v2", "v3", "v4", "v5", "v6", "v7"]));
}

#[test]
fn generated_data_round_trips_through_tsv() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("net");
    let data_s = data.to_str().unwrap();
    let gen = ["--n", "200", "--d", "3", "--seed", "11"];
    let mut args = vec!["gen", "--out", data_s];
    args.extend(gen);
    assert_eq!(macs(&args).status.code(), Some(0));
    let users = mac_search::network::load_road_social(&data).unwrap();
    assert_eq!(users.social.num_vertices(), 200);
    let q = users.social.name(0).to_string();
    let common = ["--q", &q, "--k", "5", "--t", "50", "--region", "0.3,0.31x0.3,0.31"];
    let mut from_dir = vec!["query", "--data", data_s];
    from_dir.extend(common);
    let mut from_gen = vec!["query"];
    from_gen.extend(gen);
    from_gen.extend(common);
    let a = parse_document(&stdout(&macs(&from_dir))).unwrap();
    let b = parse_document(&stdout(&macs(&from_gen))).unwrap();
    assert!(a.len() > 1);
    // Same cells; only the header's seed echo differs.
    assert_eq!(a[1..], b[1..]);
}

#[test]
fn frozen_fixture_matches_the_builder() {
    let (rsn, _) = build_running_example_fixture();
    let dir = tempfile::tempdir().unwrap();
    mac_search::network::save_road_social(&rsn, dir.path()).unwrap();
    let frozen = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/running_example");
    for f in ["road.tsv", "social_edges.tsv", "attributes.tsv", "locations.tsv"] {
        assert_eq!(std::fs::read_to_string(dir.path().join(f)).unwrap(), std::fs::read_to_string(frozen.join(f)).unwrap(), "{f}");
    }
    let loaded = mac_search::network::load_road_social(&frozen).unwrap();
    assert_eq!(loaded.social.num_vertices(), rsn.social.num_vertices());
}

#[test]
fn bench_emits_one_row_per_k_and_mode() {
    let o = macs(&["bench", "--n", "300", "--ks", "3", "--t", "15", "--queries", "2", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert!(rows[0].starts_with("k,algorithm,samples"));
    assert_eq!(rows.len(), 5);
    assert!(rows[1..].iter().all(|r| r.starts_with("3,")));
}
