use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use clique_interdict::oracle::brute_eicp;
use clique_interdict::{generate, parse_dimacs, write_dimacs, Graph};
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_clique-interdict"));
    cmd.env_remove("CLIQUE_INTERDICT_TIME_LIMIT");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write_graph(dir: &Path, name: &str, g: &Graph) -> PathBuf {
    let path = dir.join(name);
    let mut buf = Vec::new();
    write_dimacs(g, &mut buf).unwrap();
    fs::write(&path, buf).unwrap();
    path
}

fn read_graph(path: &Path) -> Graph {
    parse_dimacs(fs::read(path).unwrap().as_slice()).unwrap().0
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/data")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn solve_complete_graph() {
    let dir = TempDir::new().unwrap();
    let k5 = write_graph(dir.path(), "k5.clq", &generate::complete(5));
    let out = run(&["solve", "--graph", k5.to_str().unwrap(), "--k", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["eta"], 2);
    assert_eq!(v["status"], "solved");
    assert_eq!(v["witness"].as_array().unwrap().len(), 4);
    for key in ["k", "lb", "ub", "time_ms", "nodes", "cuts", "seed"] {
        assert!(v[key].is_u64(), "{key}");
    }
    assert!(v["reduction"]["vertices_removed"].is_u64());
    assert!(v["reduction"]["edges_removed"].is_u64());
}

#[test]
fn solve_zero_budget_gives_clique_number() {
    let dir = TempDir::new().unwrap();
    let g = generate::gnp(30, 0.5, 4);
    let path = write_graph(dir.path(), "g.clq", &g);
    let v = json(&run(&["solve", "--graph", path.to_str().unwrap(), "--k", "0"]));
    assert_eq!(v["eta"], clique_interdict::max_clique(&g, None).size);
    assert_eq!(v["witness"].as_array().unwrap().len(), 0);
}

#[test]
fn solve_benchmark_graph() {
    let out = run(&["solve", "--graph", &data("c-fat200-1.clq"), "--k", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["eta"], 11);
}

#[test]
fn budget_fraction_rounds_up() {
    let out = run(&["solve", "--graph", &data("c-fat200-1.clq"), "--k-frac", "0.0066"]);
    let v = json(&out);
    assert_eq!(v["k"], 11);
    assert_eq!(v["eta"], 11);
}

#[test]
fn witness_uses_input_labels() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("tri.txt");
    fs::write(&path, "# triangle plus pendant\n100 200\n200 300\n100 300\n300 7\n").unwrap();
    let out = run(&["solve", "--graph", path.to_str().unwrap(), "--k", "1"]);
    let v = json(&out);
    assert_eq!(v["eta"], 2);
    let edge = &v["witness"][0];
    let labels = [edge[0].as_u64().unwrap(), edge[1].as_u64().unwrap()];
    assert!(labels.iter().all(|l| [100, 200, 300].contains(l)), "{labels:?}");

    let claimed = format!("{}-{}", labels[0], labels[1]);
    let ok = run(&[
        "verify", "--graph", path.to_str().unwrap(), "--k", "1", "--claimed-eta", "2",
        "--witness", &claimed,
    ]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));
    assert_eq!(json(&ok)["valid"], true);
}

#[test]
fn zero_indexed_edge_lists() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("g.edges");
    fs::write(&path, "0 1\n1 2\n0 2\n").unwrap();
    let rejected = run(&["maxclique", "--graph", path.to_str().unwrap()]);
    assert_eq!(rejected.status.code(), Some(1));
    let out = run(&["maxclique", "--graph", path.to_str().unwrap(), "--zero-indexed"]);
    assert_eq!(json(&out)["size"], 3);
}

#[test]
fn verify_rejects_bad_claims() {
    let dir = TempDir::new().unwrap();
    let k5 = write_graph(dir.path(), "k5.clq", &generate::complete(5));
    let path = k5.to_str().unwrap();
    let wrong = run(&[
        "verify", "--graph", path, "--k", "4", "--claimed-eta", "2", "--witness", "1-2,3-4,1-3,2-4",
    ]);
    assert_eq!(wrong.status.code(), Some(1));
    assert_eq!(json(&wrong)["valid"], false);

    let witness_file = dir.path().join("w.txt");
    fs::write(&witness_file, "1-2\n1-3\n1-4\n1-5\n").unwrap();
    let right = run(&[
        "verify", "--graph", path, "--k", "4", "--claimed-eta", "4",
        "--witness", witness_file.to_str().unwrap(),
    ]);
    assert_eq!(json(&right)["residual_omega"], 4);
    assert_eq!(right.status.code(), Some(0));
    let over = run(&[
        "verify", "--graph", path, "--k", "3", "--claimed-eta", "4",
        "--witness", witness_file.to_str().unwrap(),
    ]);
    assert_eq!(over.status.code(), Some(1));
}

#[test]
fn ebcp_values() {
    let dir = TempDir::new().unwrap();
    let k5 = write_graph(dir.path(), "k5.clq", &generate::complete(5));
    let path = k5.to_str().unwrap();
    assert_eq!(json(&run(&["ebcp", "--graph", path, "--p", "2"]))["gamma"], 4);
    assert_eq!(json(&run(&["ebcp", "--graph", path, "--p", "1"]))["gamma"], 10);
    let c5 = write_graph(dir.path(), "c5.clq", &generate::cycle(5));
    assert_eq!(json(&run(&["ebcp", "--graph", c5.to_str().unwrap(), "--p", "2"]))["gamma"], 0);
    let capped = json(&run(&["ebcp", "--graph", path, "--p", "1", "--cutoff", "9"]));
    assert_eq!(capped["status"], "exceeds_cutoff");
    assert!(capped["gamma"].is_null());
}

#[test]
fn reduce_and_bounds_commands() {
    let dir = TempDir::new().unwrap();
    let g = generate::disjoint_union(&generate::complete(5), &generate::complete(3));
    let path = write_graph(dir.path(), "g.clq", &g);
    let reduced = dir.path().join("reduced.clq");
    let v = json(&run(&[
        "reduce", "--graph", path.to_str().unwrap(), "--k", "0", "--out", reduced.to_str().unwrap(),
    ]));
    assert_eq!(v["lb"], 5);
    assert_eq!(v["reduced_n"], 5);
    assert_eq!(read_graph(&reduced), generate::complete(5));

    let b = json(&run(&["bounds", "--graph", path.to_str().unwrap(), "--k", "4"]));
    assert!(b["lb"].as_u64().unwrap() <= b["ub"].as_u64().unwrap());
}

#[test]
fn gen_is_deterministic_and_follows_density() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.clq");
    let b = dir.path().join("b.clq");
    for p in [&a, &b] {
        let out = run(&["gen", "--n", "40", "--density", "0.3", "--seed", "9", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let empty = run(&["gen", "--n", "25", "--density", "0"]);
    assert_eq!(parse_dimacs(empty.stdout.as_slice()).unwrap().0.m(), 0);
    let full = run(&["gen", "--n", "25", "--density", "1"]);
    assert_eq!(parse_dimacs(full.stdout.as_slice()).unwrap().0, generate::complete(25));

    for seed in 0..20 {
        let out = run(&["gen", "--n", "50", "--density", "0.5", "--seed", &seed.to_string()]);
        let m = parse_dimacs(out.stdout.as_slice()).unwrap().0.m();
        assert!((450..=775).contains(&m), "seed {seed}: m = {m}");
    }
    assert_eq!(run(&["gen", "--n", "5", "--density", "1.5"]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(run(&["solve", "--graph", "missing.clq", "--k", "1"]).status.code(), Some(1));
    assert_eq!(run(&["solve", "--graph", "x.clq"]).status.code(), Some(1));
    assert_eq!(
        run(&["solve", "--graph", "x.clq", "--k", "1", "--k-frac", "0.1"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.clq");
    fs::write(&bad, "p edge 3 1\ne 1 9\n").unwrap();
    let out = run(&["solve", "--graph", bad.to_str().unwrap(), "--k", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn timeout_exit_code_and_env_limit() {
    let dir = TempDir::new().unwrap();
    let path = write_graph(dir.path(), "g.clq", &generate::gnp(120, 0.7, 2));
    let out = bin()
        .args(["solve", "--graph", path.to_str().unwrap(), "--k", "30"])
        .env("CLIQUE_INTERDICT_TIME_LIMIT", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["status"], "timeout");
}

#[test]
fn ablation_flags_agree() {
    let dir = TempDir::new().unwrap();
    let path = write_graph(dir.path(), "g.clq", &generate::gnp(16, 0.6, 8));
    let path = path.to_str().unwrap();
    let base = json(&run(&["solve", "--graph", path, "--k", "5"]))["eta"].clone();
    for flag in ["--no-reduce", "--no-ub", "--no-perm-cuts"] {
        let v = json(&run(&["solve", "--graph", path, "--k", "5", flag]));
        assert_eq!(v["eta"], base, "{flag}");
    }
}

#[test]
fn solve_output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let path = write_graph(dir.path(), "g.clq", &generate::gnp(40, 0.5, 1));
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("time_ms");
        v
    };
    let args = ["solve", "--graph", path.to_str().unwrap(), "--k", "6", "--seed", "3"];
    assert_eq!(strip(json(&run(&args))), strip(json(&run(&args))));
}

fn bench_rows(csv_path: &Path) -> Vec<csv::StringRecord> {
    let mut reader = csv::Reader::from_path(csv_path).unwrap();
    let header = reader.headers().unwrap().clone();
    assert_eq!(
        header.iter().collect::<Vec<_>>(),
        [
            "instance", "n", "m", "k", "eta", "status", "time_ms", "lb", "ub",
            "vertices_removed_pct", "edges_removed_pct", "nodes", "cuts"
        ]
    );
    reader.records().map(Result::unwrap).collect()
}

#[test]
fn bench_matches_oracle() {
    let dir = TempDir::new().unwrap();
    let graphs = [
        generate::gnp(8, 0.6, 1),
        generate::gnp(9, 0.5, 2),
        generate::complete(5),
    ];
    let mut manifest = String::from("time_limit = 60\nseed = 1\nworkers = 2\n");
    for (i, g) in graphs.iter().enumerate() {
        write_graph(dir.path(), &format!("g{i}.clq"), g);
        for k in [1, 2] {
            manifest.push_str(&format!("[[run]]\ngraph = \"g{i}.clq\"\nk = {k}\n"));
        }
    }
    let manifest_path = dir.path().join("bench.toml");
    fs::write(&manifest_path, manifest).unwrap();
    let out_path = dir.path().join("out.csv");
    let out = run(&[
        "bench", "--manifest", manifest_path.to_str().unwrap(), "--out", out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = bench_rows(&out_path);
    assert_eq!(rows.len(), 6);
    for row in rows {
        assert_eq!(&row[5], "solved");
        let i: usize = row[0][1..2].parse().unwrap();
        let k: u64 = row[3].parse().unwrap();
        let eta: usize = row[4].parse().unwrap();
        assert_eq!(eta, brute_eicp(&graphs[i], k).unwrap().0, "{row:?}");
    }
}

#[test]
fn bench_edge_cases() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.toml");
    fs::write(&empty, "time_limit = 5\n").unwrap();
    let out_path = dir.path().join("empty.csv");
    run(&["bench", "--manifest", empty.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert!(bench_rows(&out_path).is_empty());

    write_graph(dir.path(), "ok.clq", &generate::complete(4));
    let manifest = dir.path().join("mixed.toml");
    fs::write(
        &manifest,
        "[[run]]\ngraph = \"nope.clq\"\nk = 1\n[[run]]\ngraph = \"ok.clq\"\nc = 0.5\n",
    )
    .unwrap();
    let out_path = dir.path().join("mixed.csv");
    let out = run(&["bench", "--manifest", manifest.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rows = bench_rows(&out_path);
    assert_eq!(rows.len(), 2);
    assert_eq!((&rows[0][5], &rows[0][4]), ("error", "-"));
    assert_eq!(&rows[1][5], "solved");
    assert_eq!(&rows[1][3], "3");
    assert_eq!(&rows[1][4], "2");
}
