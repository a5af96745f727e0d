use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

const A: &str = "[[0,0,1,0,0,0,0],[0,0,-1,0,0,0,1],[0,0,0,0,0,0,1],[0,0,0,0,0,1,0],[0,0,0,0,0,1,0],[0,0,0,0,0,0,1],[0,0,0,0,0,0,0]]";
const A_PRIME: &str = "[[0,0,-1,0,0,0,1],[0,0,1,0,0,0,0],[0,0,0,0,0,0,1],[0,0,0,0,0,-1,-1],[0,0,0,0,0,-1,-1],[0,0,0,0,0,0,-1],[0,0,0,0,0,0,0]]";

fn fanobott(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fanobott"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write_file(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn enumerate_count() {
    let o = fanobott(&["enumerate", "-d", "4", "--count"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "105\n");
}

#[test]
fn enumerate_stream_matches_count() {
    let o = fanobott(&["enumerate", "-d", "3"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 15);
    assert_eq!(lines[0], r#"{"dim":3,"entries":[[0,0,0],[0,0,0],[0,0,0]]}"#);
    for line in lines {
        assert_eq!(code(&fanobott(&["validate", "--inline", line])), 0);
    }
}

#[test]
fn validate_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let zero = write_file(&dir, "zero.json", r#"{"dim":3,"entries":[[0,0,0],[0,0,0],[0,0,0]]}"#);
    let o = fanobott(&["validate", zero.to_str().unwrap()]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "{\"valid\":true}\n"));

    let o = fanobott(&["validate", "--inline", "[[0,1,1],[0,0,0],[0,0,0]]"]);
    assert_eq!(code(&o), 1);
    assert_eq!(
        stdout(&o),
        "{\"row\":1,\"violation\":\"row 1 fails every row condition: zero: row is nonzero; \
         unit: leading +1 in column 2 but column 3 is also nonzero; \
         negated copy: leading entry is +1, not -1\"}\n"
    );

    let o = fanobott(&["validate", "--inline", "[[0,1]]"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("{\"row\":null,"));
}

#[test]
fn malformed_input_exits_two() {
    let o = fanobott(&["validate", "--inline", "not json"]);
    assert_eq!(code(&o), 2);
    assert_eq!(String::from_utf8(o.stderr).unwrap().lines().count(), 1);
    assert_eq!(code(&fanobott(&["validate", "/no/such/file.json"])), 2);
    assert_eq!(code(&fanobott(&["frobnicate"])), 2);
    assert_eq!(code(&fanobott(&["canon", "--inline", "[[0]]", "--mode", "bogus"])), 2);
}

#[test]
fn seven_stage_equivalence() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_file(&dir, "a.json", A);
    let b = write_file(&dir, "b.json", A_PRIME);
    let (a, b) = (a.to_str().unwrap(), b.to_str().unwrap());
    let o = fanobott(&["equiv", a, b, "--mode", "diffeo"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "true\n"));
    let o = fanobott(&["equiv", a, b, "--mode", "variety"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (1, "false\n"));
    let o = fanobott(&["equiv", a, b, "--mode", "rooted"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn witness_then_certify() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_file(&dir, "a.json", A);
    let b = write_file(&dir, "b.json", A_PRIME);
    let (a, b) = (a.to_str().unwrap(), b.to_str().unwrap());
    let o = fanobott(&["witness", a, b]);
    assert_eq!(code(&o), 0);
    let witness = stdout(&o);
    assert!(witness.starts_with(
        r#"{"steps":[{"op":"p","perm":[2,1,3,4,5,6,7]},{"op":"3","k":6,"l":7},{"op":"2","k":6}],"#
    ));
    let w = write_file(&dir, "w.json", &witness);
    let o = fanobott(&["certify", a, b, w.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let cert: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(cert["diagonals"], serde_json::json!([[1, 1, 1, -1, -1, -1, 1]]));
    assert_eq!(
        cert["m_double_prime"][10],
        serde_json::json!([0, 0, 0, -1, 0, -1, 1])
    );
    assert_eq!(cert["signs"][3], "-");

    // swapped endpoints no longer match the digests
    let o = fanobott(&["certify", b, a, w.to_str().unwrap()]);
    assert_eq!(code(&o), 1);

    let o = fanobott(&["witness", a, b, "--mode", "variety"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (1, "null\n"));
}

#[test]
fn single_matrix_reports() {
    let o = fanobott(&["sve", "--inline", A]);
    assert_eq!(
        stdout(&o),
        "{\"h\":[1,2,4,5],\"g\":[],\"g_prime\":[],\"maximal_basis_number\":4}\n"
    );
    let o = fanobott(&["sve", "--inline", "[[0,-1],[0,0]]"]);
    assert_eq!(
        stdout(&o),
        "{\"h\":[],\"g\":[1],\"g_prime\":[{\"p\":1,\"q\":2,\"sign\":-1}],\"maximal_basis_number\":1}\n"
    );
    assert_eq!(stdout(&fanobott(&["peel", "--inline", A])), "[4,2,1]\n");
    assert_eq!(
        stdout(&fanobott(&["canon", "--inline", A, "--mode", "variety"])),
        "(+(+()+())+(+()-()))\n"
    );
    assert_eq!(
        stdout(&fanobott(&["canon", "--inline", A, "--mode", "diffeo"])),
        stdout(&fanobott(&["canon", "--inline", A_PRIME, "--mode", "diffeo"]))
    );
}

#[test]
fn forest_dot_from_forest_json() {
    let o = fanobott(&[
        "forest-dot",
        "--inline",
        r#"{"size":3,"parents":[3,3,0],"signs":["+","-",""]}"#,
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "digraph forest {\n  node [shape=circle];\n  v1 [label=\"v1\"];\n  v2 [label=\"v2\"];\n  \
         v3 [label=\"v3\", shape=doublecircle];\n  v3 -> v1 [label=\"+\"];\n  v3 -> v2 [label=\"-\"];\n}\n"
    );
}

#[test]
fn stdin_input() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_fanobott"))
        .args(["peel", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"{\"dim\":2,\"entries\":[[0,1],[0,0]]}")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(stdout(&o), "[1,1]\n");
}

#[test]
fn classify_goldens() {
    let o = fanobott(&["classify", "-d", "2", "--mode", "diffeo"]);
    assert_eq!(
        stdout(&o),
        "{\"dim\":2,\"mode\":\"diffeo\",\"matrices\":3,\"classes\":2,\"representatives\":[\
         {\"code\":\"()()\",\"members\":1,\"representative\":{\"dim\":2,\"entries\":[[0,0],[0,0]]}},\
         {\"code\":\"(())\",\"members\":2,\"representative\":{\"dim\":2,\"entries\":[[0,1],[0,0]]}}]}\n"
    );
    let counts: Vec<u64> = ["rooted", "variety", "diffeo"]
        .iter()
        .map(|m| {
            let o = fanobott(&["classify", "-d", "3", "--mode", m]);
            let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
            v["classes"].as_u64().unwrap()
        })
        .collect();
    assert_eq!(counts, vec![4, 5, 4]);
}

#[test]
fn classify_matches_oracle() {
    for d in 1..=4 {
        let ds = d.to_string();
        let o = fanobott(&["oracle", "-d", &ds]);
        assert_eq!(code(&o), 0);
        let line = stdout(&o);
        assert!(line.ends_with("disagreements=0\n"), "{line}");
        let o = fanobott(&["classify", "-d", &ds, "--mode", "diffeo"]);
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        let classes = v["classes"].as_u64().unwrap();
        assert!(line.contains(&format!("bfs_classes={classes} ")), "{line}");
    }
}

#[test]
fn jobs_flag_keeps_output_stable() {
    let one = fanobott(&["--jobs", "1", "classify", "-d", "4", "--mode", "variety"]);
    let many = fanobott(&["classify", "-d", "4", "--mode", "variety", "--jobs", "4"]);
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, many.stdout);
}
