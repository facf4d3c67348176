use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

/// `binom(n, j) mod m` for `n <= max_n`, by Pascal's rule.
fn binom_mod(max_n: usize, m: u32) -> Vec<Vec<u32>> {
    let mut rows: Vec<Vec<u32>> = vec![vec![1 % m]];
    for n in 1..=max_n {
        let prev = &rows[n - 1];
        let row = (0..=n)
            .map(|j| {
                let a = if j > 0 { prev[j - 1] } else { 0 };
                let b = if j < n { prev[j] } else { 0 };
                (a + b) % m
            })
            .collect();
        rows.push(row);
    }
    rows
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_perfred")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas")
}

fn assert_schema(name: &str, v: &Value) {
    let text = std::fs::read_to_string(schema_dir().join(format!("{name}.schema.json"))).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    let msgs: Vec<String> = match compiled.validate(v) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{e} at {}", e.instance_path)).collect(),
    };
    panic!("{name} schema rejects output:\n{}\n{v:#}", msgs.join("\n"));
}

fn ok_json(args: &[&str], schema: &str) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    assert_schema(schema, &v);
    v
}

#[test]
fn sl4_pgl4_isomorphic_at_two() {
    let v = ok_json(&["rootdatum", "iso", "--a", "builtin:SL4", "--b", "builtin:PGL4", "-p", "2"], "iso");
    assert_eq!(v["status"], "Isomorphic");
    assert!(v["witness"].is_array());
}

#[test]
fn sl3_pgl3_not_isomorphic_at_two() {
    let v = ok_json(&["rootdatum", "iso", "--a", "builtin:SL3", "--b", "builtin:PGL3", "-p", "2"], "iso");
    assert_eq!(v["status"], "NotIsomorphic");
    assert!(v["certificate"]["invariant"].is_string());
}

#[test]
fn iso_with_explicit_map() {
    let v = ok_json(&["rootdatum", "iso", "--a", "builtin:SL2", "--b", "builtin:PGL2", "-p", "3", "--phi", "1/2"], "iso");
    assert_eq!(v["status"], "NotIsomorphic");
    let v = ok_json(&["rootdatum", "iso", "--a", "builtin:SL2", "--b", "builtin:PGL2", "-p", "2", "--phi", "1/2"], "iso");
    assert_eq!(v["status"], "Isomorphic");
}

#[test]
fn isogeny_report() {
    let v = ok_json(&["rootdatum", "isogeny", "--a", "builtin:PGL2", "--b", "builtin:SL2", "-p", "3", "--phi", "2"], "isogeny");
    assert_eq!(v["valid"], true);
}

#[test]
fn unknown_verdict_exits_two() {
    // A zero node budget cannot find the witness for an isomorphic pair.
    let out = run(&[
        "rootdatum", "iso", "--a", "builtin:SL4", "--b", "builtin:PGL4", "-p", "2", "--node-budget", "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let v = json_of(&out);
    assert_eq!(v["status"], "Unknown");
    assert_schema("iso", &v);
}

#[test]
fn validate_builtin_and_file() {
    let v = ok_json(&["rootdatum", "validate", "--a", "builtin:G2_sc", "-p", "5"], "validation");
    assert_eq!(v["valid"], true);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"p":3,"rank_X":1,"rank_Y":1,"pairing":[[1]],"roots":[[2],[-2]],"coroots":[[2],[-2]],"positive_count":1}"#,
    )
    .unwrap();
    let spec = format!("file:{}", path.display());
    let v = ok_json(&["rootdatum", "validate", "--a", &spec], "validation");
    assert_eq!(v["valid"], false);
    // Other commands refuse an invalid datum.
    assert_eq!(run(&["rootdatum", "dual", "--a", &spec]).status.code(), Some(1));
    // A prime that disagrees with the file is an error.
    assert_eq!(run(&["rootdatum", "validate", "--a", &spec, "-p", "5"]).status.code(), Some(1));
}

#[test]
fn dual_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("so5.json");
    let out = run(&["rootdatum", "builtin", "SO5", "-p", "3", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_schema("root_datum", &v);
    assert_eq!(v["name"], "SO5");

    let spec = format!("file:{}", path.display());
    let d = ok_json(&["rootdatum", "dual", "--a", &spec], "root_datum");
    let dual_path = dir.path().join("dual.json");
    std::fs::write(&dual_path, d.to_string()).unwrap();
    let dual_spec = format!("file:{}", dual_path.display());
    let v = ok_json(&["rootdatum", "iso", "--a", &dual_spec, "--b", "builtin:Sp4", "-p", "3"], "iso");
    assert_eq!(v["status"], "Isomorphic");
}

#[test]
fn weyl_and_builtins() {
    let v = ok_json(&["rootdatum", "weyl", "--a", "builtin:B3_sc", "-p", "3"], "weyl");
    assert_eq!(v["order"], "48");
    assert_eq!(v["longest_length"], 9);
    let v = ok_json(&["rootdatum", "weyl", "--a", "builtin:A2_sc", "-p", "3", "--elements"], "weyl");
    assert_eq!(v["elements"].as_array().unwrap().len(), 6);
    let v = ok_json(&["rootdatum", "builtin", "--list"], "builtin_list");
    assert!(v["builtins"].as_array().unwrap().iter().any(|n| n == "GL3"));
    assert_eq!(run(&["rootdatum", "builtin", "Q7", "-p", "3"]).status.code(), Some(1));
}

#[test]
fn sl2_ext_example() {
    let v = ok_json(&["sl2", "ext", "-p", "3", "--lambda", "0", "--mu", "4", "--target", "simple"], "ext");
    assert_eq!(v["dim"], 1);
    let v = ok_json(&["sl2", "ext", "-p", "3", "--lambda", "4", "--mu", "0", "--target", "costandard"], "ext");
    assert_eq!(v["dim"], 1);
}

#[test]
fn sl2_reports_match_schemas() {
    let v = ok_json(&["sl2", "weights", "-p", "3", "--n", "4"], "weights");
    assert_eq!(v["weights"], serde_json::json!(["4", "2", "-2", "-4"]));
    let v = ok_json(&["sl2", "decomp", "-p", "3", "--lambda", "5", "--mu", "13/3"], "multiplicity_report");
    assert_eq!(v["query"]["multiplicity"], 1);
    let v = ok_json(&["sl2", "weyltype", "-p", "3", "--lambda", "1", "--truncation", "3"], "multiplicity_report");
    assert_eq!(v["factors"], serde_json::json!([
        {"mu": "1/3", "multiplicity": 1, "origin": {"kind": "Einf", "nu": "1", "i": 1}},
        {"mu": "7/9", "multiplicity": 1, "origin": {"kind": "Einf", "nu": "1", "i": 2}},
        {"mu": "25/27", "multiplicity": 1, "origin": {"kind": "Einf", "nu": "1", "i": 3}},
    ]));
    let v = ok_json(&["sl2", "socle", "-p", "3", "--lambda", "5", "--depth", "2"], "socle");
    assert_eq!(v["layers"], serde_json::json!([["5"], ["13/3"], ["43/9", "1/3"]]));
    let v = ok_json(&["sl2", "socle", "-p", "3", "--lambda", "7", "--depth", "2"], "socle");
    assert_eq!(v["flag"], "NotCertified");
    let v = ok_json(&["sl2", "blocks", "-p", "3", "--lambda", "1", "--mu", "1/3"], "blocks");
    assert_eq!(v["same_block"], true);
    let v = ok_json(&["sl2", "fractal", "-p", "2", "--max-n", "3"], "fractal");
    assert_eq!(v["point_count"], 9);
    let v = ok_json(&["sl2", "oracle", "-p", "3", "--lambda-max", "6"], "oracle");
    assert!(v["entries"].as_array().unwrap().len() > 7);
    let v = ok_json(&["sl2", "oracle", "-p", "3", "--lambda", "4", "--mu", "0"], "oracle");
    assert_eq!(v["ext1_simple_costandard"], 1);
}

#[test]
fn oracle_table_is_csv() {
    let out = run(&["sl2", "oracle", "-p", "3", "--lambda-max", "3", "--format", "table"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("lambda,mu,multiplicity\n0,0,1\n"));
}

fn parse_svg_points(svg: &str) -> BTreeSet<(i64, i64)> {
    let attr = |line: &str, key: &str| -> Option<String> {
        let start = line.find(&format!("{key}=\""))? + key.len() + 2;
        let end = line[start..].find('"')? + start;
        Some(line[start..end].to_string())
    };
    svg.lines()
        .filter_map(|l| Some((attr(l, "data-n")?, attr(l, "data-w")?)))
        .filter(|(n, w)| !n.contains('/') && !w.contains('/'))
        .map(|(n, w)| (n.parse().unwrap(), w.parse().unwrap()))
        .collect()
}

#[test]
fn fractal_svg_is_pascal_mod_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.svg");
    let out = run(&["sl2", "fractal", "-p", "3", "--max-n", "81", "--depth", "0", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_schema("fractal", &json_of(&out));
    let svg = std::fs::read_to_string(&path).unwrap();
    let got = parse_svg_points(&svg);
    let rows = binom_mod(81, 3);
    let mut expect = BTreeSet::new();
    for (n, row) in rows.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c != 0 {
                expect.insert((n as i64, n as i64 - 2 * j as i64));
            }
        }
    }
    assert_eq!(got, expect);
}

#[test]
fn fractal_pgm_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.pgm");
    let out = run(&["sl2", "fractal", "-p", "3", "--max-n", "2", "--depth", "1", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let pgm = std::fs::read_to_string(&path).unwrap();
    let mut lines = pgm.lines();
    assert_eq!(lines.next(), Some("P2"));
    assert_eq!(lines.next(), Some("13 7"));
    assert_eq!(lines.next(), Some("255"));
    assert_eq!(lines.count(), 7);
}

#[test]
fn output_is_deterministic() {
    let cases: &[&[&str]] = &[
        &["rootdatum", "iso", "--a", "builtin:SO5", "--b", "builtin:Sp4", "-p", "2"],
        &["rootdatum", "weyl", "--a", "builtin:G2_ad", "-p", "5", "--elements"],
        &["sl2", "decomp", "-p", "5", "--lambda", "17/25"],
        &["sl2", "fractal", "-p", "3", "--max-n", "9", "--depth", "1"],
    ];
    for args in cases {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(run(&["sl2", "ext", "--lambda", "0", "--mu", "1", "--target", "simple"]).status.code(), Some(64));
    assert_eq!(run(&["sl2", "ext", "-p", "3", "--lambda", "0"]).status.code(), Some(64));
    assert_eq!(run(&["rootdatum", "validate", "--a", "nowhere:x"]).status.code(), Some(64));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    // Bad scalars and bad primes are errors, not usage errors.
    assert_eq!(run(&["sl2", "weights", "-p", "3", "--n", "1/2"]).status.code(), Some(1));
    assert_eq!(run(&["sl2", "weights", "-p", "4", "--n", "1"]).status.code(), Some(1));
    assert_eq!(run(&["sl2", "weyltype", "-p", "3", "--lambda", "0"]).status.code(), Some(1));
    assert_eq!(run(&["rootdatum", "validate", "--a", "file:/nonexistent.json"]).status.code(), Some(1));
}

#[test]
fn table_format() {
    let out = run(&["sl2", "ext", "-p", "3", "--lambda", "0", "--mu", "4", "--target", "simple", "--format", "table"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "dim\t1"));
}
