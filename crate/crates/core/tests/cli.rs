use padic_gauge::cli::run;

fn padic(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("padic").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = padic(args);
    assert_eq!(code, 0, "{args:?}: {err}{out}");
    out
}

#[test]
fn eval_examples() {
    assert_eq!(ok(&["eval", "pabs", "12", "--p", "2"]), "2^-2\n");
    assert_eq!(
        ok(&["eval", "h-mul", r#"{"x":[1],"y":[2],"t":"3","p":5}"#, r#"{"x":[4],"y":[5],"t":"6","p":5}"#]),
        "(5,7,14)\n"
    );
    let m = r#"[["1","0","2"],["0","1","0"],["0","0","1"]]"#;
    assert_eq!(ok(&["eval", "tri-norm", m, "--p", "2"]), "2^-1/2\n");
    assert_eq!(ok(&["eval", "pabs", "0", "--p", "3"]), "0\n");
    assert_eq!(ok(&["eval", "vp", "3/8", "--p", "2"]), "-3\n");
    assert_eq!(ok(&["eval", "matnorm", r#"[["1","1/3"],["0","1"]]"#, "--p", "3"]), "3^1\n");
    assert_eq!(ok(&["eval", "aff-compose", r#"{"a":"2","b":"3","p":5}"#, r#"{"a":"1","b":"1","p":5}"#]), "2x+5\n");
}

#[test]
fn eval_reads_files_and_json() {
    let dir = std::env::temp_dir().join(format!("padic-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("m.json");
    std::fs::write(&path, r#"[["1","0","2"],["0","1","0"],["0","0","1"]]"#).unwrap();
    assert_eq!(ok(&["eval", "tri-norm", path.to_str().unwrap(), "--p", "2"]), "2^-1/2\n");
    assert_eq!(ok(&["eval", "pabs", "12", "--p", "2", "--json"]), "{\"exponent\":\"2\",\"kind\":\"finite\"}\n");
    let dec = ok(&["eval", "pabs", "12", "--p", "2", "--decimal"]);
    assert!(dec.starts_with("2^-2\napproximately 2.5e-1"), "{dec}");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn dist_commands() {
    assert_eq!(ok(&["dist", "dp", "1", "5", "--p", "2"]), "2^-2\n");
    assert_eq!(ok(&["dist", "dp-prime", "1", "2", "--p", "2"]), "2\n");
    assert_eq!(ok(&["dist", "dp-log", "1", "8", "--p", "2"]), "3\n");
    let c0 = r#"{"center":"0","scale":2,"p":2}"#;
    let c1 = r#"{"center":"1","scale":1,"p":2}"#;
    assert_eq!(ok(&["dist", "rho", c0, c1]), "3\n");
}

#[test]
fn usage_and_parse_errors_exit_2() {
    for args in [
        &["verify", "no-such-suite", "--p", "2"][..],
        &["eval", "pabs", "1/0", "--p", "2"],
        &["eval", "pabs", "12", "--p", "4"],
        &["eval", "pabs", "12"],
        &["eval", "h-mul", r#"{"x":[1],"y":[2],"t":"3","p":5}"#, r#"{"x":[4],"y":[5],"t":"6","p":3}"#],
        &["eval", "matinv", r#"[["1","1"],["1","1"]]"#, "--p", "2"],
        &["frobnicate"],
        &["verify", "cells", "--p", "2", "--mutant", "dropped-twist"],
    ] {
        let (code, _, err) = padic(args);
        assert_eq!(code, 2, "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
    let (code, out, _) = padic(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("verify"));
}

#[test]
fn verify_examples() {
    let out = ok(&["verify", "heisenberg", "--p", "2", "--n", "1", "--samples", "1000", "--seed", "7"]);
    assert!(out.ends_with("result: PASS\n"));
    let out = ok(&["verify", "haar-scaling", "--p", "2", "--n", "3", "--l", "1"]);
    assert!(out.contains("ratio 1/16 vs expected 2^-4"), "{out}");
    assert!(out.ends_with("result: PASS\n"));
    let out = ok(&["verify", "ultrametric-axioms", "--p", "3", "--samples", "5000"]);
    assert!(out.ends_with("result: PASS\n"));
}

#[test]
fn verify_reports_mutants_with_exit_1() {
    let (code, out, _) =
        padic(&["verify", "heisenberg", "--p", "2", "--n", "1", "--samples", "100", "--mutant", "dropped-twist"]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL") && out.contains("witness:"), "{out}");
    let (code, out, _) = padic(&[
        "verify",
        "tri-norm",
        "--p",
        "3",
        "--n",
        "3",
        "--samples",
        "200",
        "--mutant",
        "sum-tri-norm",
        "--json",
    ]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passed"], false);
    assert_eq!(v["mutant"], "sum-tri-norm");
}

#[test]
fn verify_output_is_reproducible() {
    let args = ["verify", "affine", "--p", "5", "--samples", "200", "--seed", "9", "--json"];
    assert_eq!(ok(&args), ok(&args));
}

#[test]
fn cells_examples() {
    let dot = ok(&["cells", "export", "--p", "2", "--depth", "2"]);
    let nodes = dot.lines().filter(|l| l.trim_end().ends_with("\";") && !l.contains("->")).count();
    assert_eq!(nodes, 7);
    assert!(dot.starts_with("digraph cells {\n"));
    let json = ok(&["cells", "export", "--p", "3", "--depth", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["nodes"].as_array().unwrap().len(), 4);
    assert_eq!(v["nodes"][0]["scale"], 0);
    assert_eq!(
        ok(&["cells", "act", "--f", r#"{"a":"2","b":"1","p":2}"#, "--cell", r#"{"center":"0","scale":0,"p":2}"#]),
        "(1,1)\n"
    );
    let (code, _, err) = padic(&["cells", "export", "--p", "2", "--depth", "30", "--limit", "1000"]);
    assert_eq!(code, 2);
    assert!(err.contains("budget"), "{err}");
}

#[test]
fn haar_table() {
    let out = ok(&["haar", "--p", "2", "--n", "3", "--l", "1"]);
    assert!(out.contains("1\t2\t4\t64\t1/16\t2^-4\texhaustive\tPASS"), "{out}");
}
