use std::process::{Command, Output};

fn lampwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lampwalk"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn same_seed_gives_identical_bytes_for_any_thread_count() {
    let base = [
        "simulate",
        "support-growth",
        "--kernel",
        "sws:biased:0.7",
        "--n",
        "500",
        "--trials",
        "24",
        "--seed",
        "9",
    ];
    let one = lampwalk(&base);
    let mut threaded = base.to_vec();
    threaded.extend(["--threads", "3"]);
    let many = lampwalk(&threaded);
    assert!(one.status.success());
    let strip = |o: &Output| {
        String::from_utf8(o.stdout.clone())
            .unwrap()
            .replace("\"threads\": 3", "\"threads\": 1")
    };
    assert_eq!(strip(&one), strip(&many));
}

#[test]
fn exit_codes() {
    assert_eq!(
        lampwalk(&["simulate", "range", "--kernel", "srw:z", "--n", "10"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        lampwalk(&["spectral", "rho", "--kernel", "biased:1.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(lampwalk(&["no-such-command"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chain.json");
    std::fs::write(
        &path,
        r#"{"vertices":2,"alphabet":["a"],"edges":[[0,"a",1]]}"#,
    )
    .unwrap();
    let out = lampwalk(&[
        "entropy",
        "report",
        "--graph",
        path.to_str().unwrap(),
        "--forbid",
        "a",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("strongly connected"));
}

#[test]
fn csv_and_json_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = lampwalk(&[
        "spectral",
        "green",
        "--kernel",
        "biased:0.7",
        "--z",
        "1",
        "--nmax",
        "200",
        "--format",
        "both",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap())
            .unwrap();
    assert!((summary["result"]["green"].as_f64().unwrap() - 2.5).abs() < 1e-3);
    let csv = std::fs::read_to_string(out_dir.join("data.csv")).unwrap();
    assert_eq!(csv.lines().count(), 202);
}
