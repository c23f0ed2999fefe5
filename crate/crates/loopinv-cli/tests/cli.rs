//! Binary-level tests: flags, output shapes, exit codes, reproducibility.

use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn loopinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loopinv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn euclid_text_output_and_exit_zero() {
    let out = loopinv(&[
        &corpus("euclid.loop"),
        "--init",
        "quo=0",
        "--init",
        "rem=x",
        "--reduce",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("classification: P-solvable"));
    assert!(text.contains("valid from: n >= 0"));
    assert!(text.contains("rem + quo*y - x == 0"));
    assert!(text.contains("check: PASS"));
}

#[test]
fn byte_identical_output_across_runs() {
    let args = [
        corpus("mixed_session.loop"),
        "--init".into(),
        "t1=1".to_string(),
        "--init".into(),
        "t2=1".into(),
        "--init".into(),
        "s1=1".into(),
        "--init".into(),
        "s2=2".into(),
        "--init".into(),
        "a=3".into(),
        "--init".into(),
        "b=1".into(),
        "--init".into(),
        "c=1".into(),
        "--init".into(),
        "d=3".into(),
        "--init".into(),
        "e=2".into(),
        "--init".into(),
        "f=5".into(),
        "--format".into(),
        "json".into(),
    ];
    let argv: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
    let a = loopinv(&argv);
    let b = loopinv(&argv);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout, "output must be byte-identical");
}

#[test]
fn zero_ideal_prints_true() {
    // one free exponential: no polynomial invariants
    let dir = std::env::temp_dir().join("loopinv-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("free_geometric.loop");
    std::fs::write(&path, "while true do b := 2*b; end").unwrap();
    let out = loopinv(&[path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("true (zero ideal: no polynomial invariants)"));
}

#[test]
fn json_shape_and_generator_reparse() {
    let out = loopinv(&[
        &corpus("euclid.loop"),
        "--init",
        "quo=0",
        "--init",
        "rem=x",
        "--reduce",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["classification"], "P-solvable");
    assert_eq!(v["offset"], 0);
    assert_eq!(v["check"]["passed"], true);
    assert_eq!(v["check"]["iterations"], 25);
    assert_eq!(v["check"]["trials"], 5);
    assert!(v.get("timings").is_none(), "timings only with --timings");
    let gens: Vec<String> = v["generators"]
        .as_array()
        .unwrap()
        .iter()
        .map(|g| g.as_str().unwrap().to_string())
        .collect();
    assert_eq!(gens, vec!["rem + quo*y - x".to_string()]);

    // parser/printer inverse: reparse the canonical string and print again
    use loopinv_core::multipoly::parse_poly;
    use loopinv_core::vars::{SymbolTable, VarKind};
    let mut table = SymbolTable::new();
    let mut vars = Vec::new();
    let mut lookup_alloc = |name: &str, table: &mut SymbolTable, vars: &mut Vec<_>| {
        if let Some(v) = vars
            .iter()
            .find(|v: &&loopinv_core::VarId| v.name() == name)
        {
            return Some((*v).clone());
        }
        let v = table.fresh(VarKind::ProgramVar, name);
        vars.push(v.clone());
        vars.last().cloned()
    };
    for g in &gens {
        // first pass allocates variables in order of appearance
        let mut names = Vec::new();
        for tok in g.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_')) {
            if !tok.is_empty()
                && tok.chars().next().unwrap().is_ascii_alphabetic()
                && !names.contains(&tok.to_string())
            {
                names.push(tok.to_string());
            }
        }
        for n in &names {
            lookup_alloc(n, &mut table, &mut vars);
        }
        let lk = |n: &str| vars.iter().find(|v| v.name() == n).cloned();
        let p1 = parse_poly(g, &lk).unwrap();
        let p2 = parse_poly(&p1.to_canonical_string(), &lk).unwrap();
        assert_eq!(p1, p2, "reparse of the canonical string changed {}", g);
    }
}

#[test]
fn timings_flag_adds_json_field() {
    let out = loopinv(&[
        &corpus("euclid.loop"),
        "--format",
        "json",
        "--timings",
        "--check",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["timings"]["solve_us"].is_u64());
    assert!(v["check"].is_null());
}

#[test]
fn exit_codes_per_failure_stage() {
    // missing file
    let out = loopinv(&["/nonexistent/nothing.loop"]);
    assert_eq!(out.status.code(), Some(1));
    // bad --init value
    let out = loopinv(&[&corpus("euclid.loop"), "--init", "rem=1/0"]);
    assert_eq!(out.status.code(), Some(2));
    // branch construct: parse stage
    let out = loopinv(&[&corpus("negative/branch.loop")]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("out of model"));
    // coupled loop: extraction stage
    let out = loopinv(&[&corpus("negative/coupled.loop")]);
    assert_eq!(out.status.code(), Some(4));
    // irrational eigenvalues: solver stage
    let out = loopinv(&[&corpus("negative/fibonacci.loop")]);
    assert_eq!(out.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no rational roots"));
    // tiny step cap: ideal stage
    let out = loopinv(&[&corpus("counter_sums.loop"), "--gb-step-cap", "1"]);
    assert_eq!(out.status.code(), Some(6));
}

#[test]
fn vars_flag_restricts_the_ring() {
    let out = loopinv(&[
        &corpus("euclid.loop"),
        "--init",
        "quo=0",
        "--init",
        "rem=x",
        "--vars",
        "rem,quo,y",
        "--reduce",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("rem + quo*y - x == 0"));

    // restricting to rem alone leaves no invariant
    let out = loopinv(&[
        &corpus("euclid.loop"),
        "--init",
        "quo=0",
        "--vars",
        "rem",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("true (zero ideal"));
}

#[test]
fn include_temps_reports_shifted_offset() {
    let out = loopinv(&[
        &corpus("factorial_mix.loop"),
        "--include-temps",
        "--init",
        "a=2",
        "--init",
        "t2=-5/6",
        "--init",
        "t1=0",
        "--init",
        "b=1",
        "--init",
        "c=1",
        "--init",
        "d=1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("valid from: n >= 2"), "got:\n{}", text);
    assert!(text.contains("check: PASS"));
}

#[test]
fn counter_flag_renames_the_counter() {
    let dir = std::env::temp_dir().join("loopinv-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("kcounter.loop");
    std::fs::write(
        &path,
        "while true do s := s + 2*k + 1; k := k + 1; end",
    )
    .unwrap();
    let out = loopinv(&[
        path.to_str().unwrap(),
        "--counter",
        "k",
        "--init",
        "s=0",
        "--reduce",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("check: PASS"));
}
