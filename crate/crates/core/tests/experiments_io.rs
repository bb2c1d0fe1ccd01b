use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use coreness::error::Error;
use coreness::evaluation::median;
use coreness::experiments::*;
use tempfile::tempdir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn small_ranking(seed: u64) -> ExperimentConfig {
    ExperimentConfig::parse(&format!(
        "kind = homogeneous-ranking\nn = 300\nreplicates = 4\nseed = {seed}\nmethods = [BP, DEGREE, EC, MINRES, NBT, PR]\n"
    ))
    .unwrap()
}

fn run_into(cfg: &ExperimentConfig, threads: usize, dir: &Path) -> EvaluationReport {
    let report = with_threads(Some(threads), || run_experiment(cfg)).unwrap().unwrap();
    write_report(&report, dir).unwrap();
    report
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn reruns_are_byte_identical_across_thread_counts_and_manifests() {
    let cfg = small_ranking(5);
    let (one, four, again) = (tempdir().unwrap(), tempdir().unwrap(), tempdir().unwrap());
    run_into(&cfg, 1, one.path());
    run_into(&cfg, 4, four.path());
    let manifest = fs::read_to_string(one.path().join("manifest.txt")).unwrap();
    let reparsed = ExperimentConfig::parse(&manifest).unwrap();
    assert_eq!(reparsed, cfg);
    run_into(&reparsed, 3, again.path());
    let reference = files(one.path());
    assert_eq!(reference.len(), 4);
    assert_eq!(reference, files(four.path()));
    assert_eq!(reference, files(again.path()));
}

#[test]
fn sweep_reruns_are_byte_identical() {
    let cfg = ExperimentConfig::parse("kind = alpha-sweep\nn = 300\nreplicates = 3\nsweep_alpha = [2.6, 4]\nmethods = [EC, NBT, PR]\n").unwrap();
    let (a, b) = (tempdir().unwrap(), tempdir().unwrap());
    run_into(&cfg, 1, a.path());
    run_into(&cfg, 4, b.path());
    assert_eq!(files(a.path()), files(b.path()));
    let header = fs::read_to_string(a.path().join("replicates.csv")).unwrap();
    assert!(header.starts_with("alpha,replicate,seed,method,metric,value\n"));
}

#[test]
fn aggregate_medians_match_replicate_table() {
    let cfg = ExperimentConfig::parse("kind = ipr-scaling\nsweep_n = [200, 400]\nreplicates = 5\nmethods = [DEGREE, EC, PR]\n").unwrap();
    let dir = tempdir().unwrap();
    run_into(&cfg, 2, dir.path());

    let mut groups: HashMap<(String, String, String), Vec<f64>> = HashMap::new();
    let mut rdr = csv::Reader::from_path(dir.path().join("replicates.csv")).unwrap();
    for rec in rdr.records() {
        let rec = rec.unwrap();
        if &rec[5] != "NA" {
            groups.entry((rec[0].to_string(), rec[3].to_string(), rec[4].to_string())).or_default().push(rec[5].parse().unwrap());
        }
    }
    let mut rdr = csv::Reader::from_path(dir.path().join("aggregate.csv")).unwrap();
    let mut checked = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let values = &groups[&(rec[0].to_string(), rec[1].to_string(), rec[2].to_string())];
        assert_eq!(rec[3].parse::<usize>().unwrap(), values.len());
        assert_eq!(rec[4].parse::<f64>().unwrap(), median(values).unwrap(), "{:?}", rec);
        checked += 1;
    }
    assert_eq!(checked, groups.len());
}

#[test]
fn mostly_failing_ensembles_are_invalid() {
    // About one edge per graph: no eigenvector and an empty 2-core.
    let cfg = ExperimentConfig::parse("kind = homogeneous-ranking\nn = 40\nc11 = 0.2\nc12 = 0.1\nc22 = 0.05\nreplicates = 10\nmethods = [EC, NBT]\n").unwrap();
    let report = run_experiment(&cfg).unwrap();
    assert_eq!(report.attempted, 10);
    assert!(report.failure_rate() > MAX_FAILURE_RATE);
    assert!(!report.is_valid());
    let dir = tempdir().unwrap();
    write_report(&report, dir.path()).unwrap();
    let failures = fs::read_to_string(dir.path().join("failures.csv")).unwrap();
    assert_eq!(failures.lines().count(), report.failures.len() + 1);
}

#[test]
fn edge_lists_load_from_disk() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("g.txt");
    fs::write(&path, "0 1\n1 2\n").unwrap();
    let e = load_edge_list(&path).unwrap();
    assert_eq!(e.graph.node_count(), 3);
    assert_eq!(e.graph.edge_count(), 2);

    fs::write(&path, "# only comments\n\n").unwrap();
    assert!(matches!(load_edge_list(&path), Err(Error::EmptyGraph(_))));
    fs::write(&path, "0 1\n1 2 3\n").unwrap();
    assert!(matches!(load_edge_list(&path), Err(Error::Parse { line: 2, .. })));
    assert!(matches!(load_edge_list(&dir.path().join("missing.txt")), Err(Error::Io(_))));
}

#[test]
fn star_ring_report_matches_golden_files() {
    let input = fixture("star_ring.txt");
    let mut cfg = ExperimentConfig::parse("kind = real-network\ninput = placeholder\nseed = 7\nsubgraph_size = 6\ngamma_grid = [0.1, 0.3]\n").unwrap();
    cfg.input = Some(input);
    let report = run_experiment(&cfg).unwrap();
    let network = report.network.as_ref().unwrap();
    assert_eq!(network.full.graph.node_count(), 14);
    assert_eq!(network.full.graph.edge_count(), 15);
    assert_eq!(network.full.ids[0], "hub");
    assert_eq!(network.subgraph.as_ref().unwrap().graph.node_count(), 6);

    let out = tempdir().unwrap();
    write_report(&report, out.path()).unwrap();
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/star_ring");
    // The manifest records machine-specific paths; everything else is compared.
    let produced: Vec<(String, Vec<u8>)> = files(out.path()).into_iter().filter(|(name, _)| name != "manifest.txt").collect();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::create_dir_all(&golden).unwrap();
        for (name, bytes) in &produced {
            fs::write(golden.join(name), bytes).unwrap();
        }
    }
    let expected = files(&golden);
    let names: Vec<&String> = produced.iter().map(|(n, _)| n).collect();
    assert_eq!(names, expected.iter().map(|(n, _)| n).collect::<Vec<_>>());
    for ((name, got), (_, want)) in produced.iter().zip(&expected) {
        assert!(got == want, "{name} differs from the golden copy");
    }
}
