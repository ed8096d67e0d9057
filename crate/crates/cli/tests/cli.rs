use percolab::graph::{parse_edge_list, GraphSpec, DEFAULT_VERTEX_CAP};
use percolab::percolation::Config;
use sha2::{Digest, Sha256};
use std::process::{Command, Output};

fn percolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_percolab"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = percolab(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

fn temp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("percolab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn trim_writes_sweep_rows() {
    let csv = stdout(&[
        "trim",
        "--graph",
        "tree:3:r12",
        "--p",
        "0.9",
        "--h",
        "0.1",
        "--sweeps",
        "50",
        "--seed",
        "4",
    ]);
    assert!(csv.starts_with("# percolab "));
    assert!(csv.contains("# graph = tree:3:r12\n"));
    assert!(csv.contains("# seed = 4\n"));
    assert!(csv.contains("sweep,removed_count,theta_n,D_n,max_witness_ratio\n"));
    let rows = data_rows(&csv);
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.split(',').count() == 5));
}

#[test]
fn malformed_spec_exits_2() {
    let out = percolab(&["gen", "--graph", "tree:3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("column"));
}

#[test]
fn missing_seed_exits_2() {
    assert_eq!(percolab(&["forest", "--graph", "tree:3:r4"]).status.code(), Some(2));
}

#[test]
fn bad_value_exits_2() {
    let out = percolab(&["percolate", "--graph", "torus:2:4", "--p", "half", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn runtime_failures_exit_1() {
    let out = percolab(&["percolate", "--graph", "torus:2:4", "--p", "1.5", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_suite_lists_the_available_ones() {
    let out = percolab(&["suite", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("wsf-degree") && err.contains("all"));
}

#[test]
fn suite_dispatch() {
    let text = stdout(&["suite", "ust-exactness"]);
    assert_eq!(text.lines().count(), 1);
    assert!(text.contains("ust-exactness") && text.contains("PASS"));
}

fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let args = [
        "ohd-gap", "--graph", "grid:2", "--radii", "3,5", "--trials", "300", "--seed", "11",
    ];
    let a = stdout(&args);
    let b = stdout(&args);
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "1"]);
    let c = stdout(&threaded);
    assert_eq!(digest(&a), digest(&b));
    assert_eq!(digest(&a), digest(&c));
    let other = stdout(&[
        "ohd-gap", "--graph", "grid:2", "--radii", "3,5", "--trials", "300", "--seed", "12",
    ]);
    assert_ne!(digest(&a), digest(&other));
}

#[test]
fn config_files_match_flags() {
    let path = temp("trim.cfg");
    std::fs::write(
        &path,
        "# a trim run\noperation = trim\ngraph = tree:3:r8\np = 0.8\nh = 1/4\nseed = 9\n",
    )
    .unwrap();
    let from_file = stdout(&["run", "--config", path.to_str().unwrap()]);
    let from_flags = stdout(&[
        "trim",
        "--graph",
        "tree:3:r8",
        "--p",
        "0.8",
        "--h",
        "1/4",
        "--seed",
        "9",
    ]);
    assert_eq!(from_file, from_flags);
}

#[test]
fn config_errors_carry_positions() {
    let path = temp("bad.cfg");
    std::fs::write(&path, "operation = trim\ngraph = tree:3:r8\nseed = 1\nwidth = 3\n").unwrap();
    let out = percolab(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4, column 1: unknown key `width`"));

    std::fs::write(&path, "operation = gen\ngraph = grid:2:x4\n").unwrap();
    let out = percolab(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2, column 16"));
}

#[test]
fn out_flag_writes_a_file() {
    let path = temp("forest.csv");
    let printed = stdout(&[
        "forest",
        "--graph",
        "tree:3:r5",
        "--bc",
        "free",
        "--trials",
        "50",
        "--seed",
        "2",
    ]);
    stdout(&[
        "forest",
        "--graph",
        "tree:3:r5",
        "--bc",
        "free",
        "--trials",
        "50",
        "--seed",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), printed);
    let rows = data_rows(&printed);
    assert_eq!(rows, vec!["5,free,50,3,0,"]);
}

#[test]
fn gen_round_trips() {
    let text = stdout(&["gen", "--graph", "grid:2:r3"]);
    let g = parse_edge_list(&text, "grid").unwrap();
    let direct = GraphSpec::parse("grid:2:r3")
        .unwrap()
        .build(0, DEFAULT_VERTEX_CAP)
        .unwrap();
    assert_eq!(g.edges(), direct.edges());
    assert_eq!(g.boundary(), direct.boundary());
}

#[test]
fn percolate_dump_round_trips() {
    let text = stdout(&[
        "percolate",
        "--graph",
        "torus:2:6",
        "--p",
        "0.4",
        "--seed",
        "3",
        "--dump",
    ]);
    let g = GraphSpec::parse("torus:2:6")
        .unwrap()
        .build(0, DEFAULT_VERTEX_CAP)
        .unwrap();
    let c = Config::from_text(&g, &text).unwrap();
    assert_eq!(c.to_text(), text);
    let csv = stdout(&[
        "percolate",
        "--graph",
        "torus:2:6",
        "--p",
        "0.4",
        "--trials",
        "5",
        "--mode",
        "site",
        "--seed",
        "3",
    ]);
    assert_eq!(data_rows(&csv).len(), 5);
}

#[test]
fn walk_resist_and_probe_write_csv() {
    let walk = stdout(&[
        "walk",
        "--graph",
        "tree:3:r40",
        "--mode",
        "delayed",
        "--steps",
        "16",
        "--trials",
        "20",
        "--seed",
        "5",
    ]);
    assert!(walk.contains("# host = implicit 3-regular tree"));
    assert!(data_rows(&walk).iter().any(|r| r.starts_with("16,speed,")));
    let induced = stdout(&[
        "walk",
        "--graph",
        "torus:2:6",
        "--mode",
        "induced",
        "--steps",
        "10",
        "--trials",
        "5",
        "--p",
        "0.7",
        "--seed",
        "5",
    ]);
    assert!(!data_rows(&induced).is_empty());

    let resist = stdout(&["resist", "--graph", "grid:1", "--radii", "4,10"]);
    assert_eq!(data_rows(&resist), vec!["4,2,2,2,1,0", "10,5,5,5,1,0"]);

    let probe = stdout(&[
        "entropy-probe",
        "--n",
        "3",
        "--trials",
        "4",
        "--t",
        "0.5,2",
        "--step",
        "1e-3",
        "--seed",
        "8",
    ]);
    assert_eq!(data_rows(&probe).iter().filter(|r| !r.is_empty()).count(), 8);
    assert!(probe.contains("# violations = 0"));
}
