use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(test: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("spancirc-cli-{}-{test}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spancirc"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn solve_msc_on_two_triangles() {
    let tree = fixture("two_triangles.json");
    let o = run(&["solve-msc", "--tree", &tree, "--terminals", "e1", "--budget", "4"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "YES weight=4\ne1\ne2\ne3\ne4\n");
    let o = run(&["solve-msc", "--tree", &tree, "--terminals", "e1", "--budget", "3"]);
    assert_eq!((code(&o), stdout(&o)), (0, "NO\n".to_string()));
}

#[test]
fn solve_msc_from_an_instance_file() {
    let o = run(&["solve-msc", "--instance", &fixture("two_triangles_wmsc.json")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("YES weight=4\n"));
}

#[test]
fn solve_sc_reports_the_circuit_size() {
    let o = run(&[
        "solve-sc",
        "--tree",
        &fixture("two_triangles.json"),
        "--terminals",
        "e1,e3",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "YES weight=4\ne1\ne2\ne3\ne4\n");
}

#[test]
fn verify_accepts_a_solver_witness_and_rejects_a_tampered_one() {
    let dir = scratch("verify");
    let inst = fixture("two_triangles_wmsc.json");
    let solved = run(&["solve-msc", "--instance", &inst]);
    let good = dir.join("good.txt");
    fs::write(&good, &solved.stdout).unwrap();
    let o = run(&["verify", "--instance", &inst, "--witness", good.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("YES weight=4"));

    let bad = dir.join("bad.txt");
    fs::write(&bad, stdout(&solved).replace("e4\n", "")).unwrap();
    let o = run(&["verify", "--instance", &inst, "--witness", bad.to_str().unwrap()]);
    assert_eq!((code(&o), stdout(&o)), (0, "NO\n".to_string()));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let o = run(&[
        "solve-msc",
        "--tree",
        &fixture("two_triangles.json"),
        "--budget",
        "4",
        "--frobnicate",
    ]);
    assert_eq!(code(&o), 1);
    assert!(o.stdout.is_empty());
}

#[test]
fn malformed_inputs_exit_with_one() {
    let dir = scratch("malformed");
    let cases = [
        ("{", "tree"),
        ("{\"format\": 2, \"nodes\": []}", "tree"),
        ("{\"format\": 1, \"nodes\": [{\"kind\": \"hexagonal\"}]}", "tree"),
        ("format: 1\ne x a\n", "graph"),
        ("", "graph"),
    ];
    for (i, (text, kind)) in cases.iter().enumerate() {
        let path = dir.join(format!("case{i}"));
        fs::write(&path, text).unwrap();
        let p = path.to_str().unwrap();
        let o = match *kind {
            "tree" => run(&["solve-msc", "--tree", p, "--budget", "3"]),
            _ => run(&["solve-ctse", "--graph", p, "--budget", "3"]),
        };
        assert_eq!(code(&o), 1, "case {i}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = run(&["solve-msc", "--tree", "/nonexistent/tree.json", "--budget", "1"]);
    assert_eq!(code(&o), 1);
    let o = run(&[
        "solve-msc",
        "--tree",
        &fixture("two_triangles.json"),
        "--terminals",
        "nope",
        "--budget",
        "4",
    ]);
    assert_eq!(code(&o), 1);
    let o = run(&["solve-msc", "--tree", &fixture("two_triangles.json")]);
    assert_eq!(code(&o), 1);
}

#[test]
fn graph_engines() {
    let g = fixture("square_with_chord.txt");
    let o = run(&[
        "solve-emwc",
        "--graph",
        &g,
        "--terminals",
        "ab",
        "--r1",
        "a",
        "--r2",
        "c",
        "--budget",
        "3",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("YES weight=3\n"));
    let o = run(&[
        "solve-emwc",
        "--graph",
        &g,
        "--terminals",
        "ab",
        "--r1",
        "a",
        "--r2",
        "c",
        "--budget",
        "2",
    ]);
    assert_eq!(stdout(&o), "NO\n");
    let o = run(&["solve-ctse", "--graph", &g, "--terminals", "ab", "--budget", "4"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("YES weight=3\n"));
    let o = run(&["solve-ctse", "--graph", &g, "--terminals", "ab", "--budget", "2"]);
    assert_eq!(stdout(&o), "NO\n");
}

#[test]
fn compose_prints_a_matrix_file() {
    let o = run(&["compose", "--tree", &fixture("two_triangles.json")]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("format: 1\n"));
    assert_eq!(out.lines().last(), Some("e1 e2 e3 e4"));
}

#[test]
fn generated_trees_validate() {
    let dir = scratch("gen");
    for seed in 0..5u64 {
        let o = run(&["gen", "random", "--seed", &seed.to_string()]);
        assert_eq!(code(&o), 0);
        let path = dir.join(format!("t{seed}.json"));
        fs::write(&path, &o.stdout).unwrap();
        let v = run(&["validate-tree", "--tree", path.to_str().unwrap()]);
        assert_eq!(stdout(&v), "VALID\n");
    }
}

#[test]
fn validate_reports_an_invalid_tree() {
    let dir = scratch("invalid");
    let mut doc: String = fs::read_to_string(fixture("two_triangles.json")).unwrap();
    doc = doc.replace("\"f\"\n", "\"e1\"\n");
    let path = dir.join("t.json");
    fs::write(&path, doc).unwrap();
    let o = run(&["validate-tree", "--tree", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("INVALID"), "{}", stdout(&o));
}

#[test]
fn clique_reduction_instance() {
    let o = run(&[
        "gen",
        "clique-reduction",
        "--graph",
        &fixture("k4.txt"),
        "--k",
        "2",
        "--part",
        "a,b",
        "--part",
        "c,d",
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("\"kind\": \"wmsc\""));
    assert!(text.contains("\"budget\": 16"));
    let o = run(&[
        "gen",
        "clique-reduction",
        "--graph",
        &fixture("k4.txt"),
        "--k",
        "5",
        "--part",
        "a,b,c,d",
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn truncated_inputs_never_crash() {
    let dir = scratch("truncated");
    let full = fs::read_to_string(fixture("two_triangles_wmsc.json")).unwrap();
    for cut in (0..full.len()).step_by(13) {
        let path = dir.join("inst.json");
        fs::write(&path, &full[..cut]).unwrap();
        let o = run(&["solve-msc", "--instance", path.to_str().unwrap()]);
        assert_eq!(code(&o), 1, "prefix of length {cut}");
    }
    let graph = fs::read_to_string(fixture("square_with_chord.txt")).unwrap();
    for cut in 0..graph.len() {
        let path = dir.join("g.txt");
        fs::write(&path, &graph[..cut]).unwrap();
        let o = run(&[
            "solve-ctse",
            "--graph",
            path.to_str().unwrap(),
            "--terminals",
            "ab",
            "--budget",
            "3",
        ]);
        assert!(matches!(code(&o), 0 | 1), "prefix of length {cut}");
    }
}
