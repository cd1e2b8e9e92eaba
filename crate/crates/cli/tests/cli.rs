// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

fn idw(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_idw"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn idw")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn gen_writes_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = idw(&["gen", "--n", "1024", "--seed", "7", "--out", "a.csv"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(text.lines().count(), 1025);
    assert_eq!(text.lines().next(), Some("x,y,z"));

    idw(&["gen", "--n", "1024", "--seed", "7", "--out", "b.csv"], dir.path());
    assert_eq!(text, std::fs::read_to_string(dir.path().join("b.csv")).unwrap());
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&idw(&["gen", "--n", "0", "--out", "a.csv"], dir.path())), 2);
    assert_eq!(code(&idw(&["gen", "--out", "a.csv"], dir.path())), 2);
    assert_eq!(code(&idw(&["gen", "--bogus"], dir.path())), 2);
    assert_eq!(code(&idw(&["analyze", "--components", ""], dir.path())), 2);
    assert_eq!(
        code(&idw(
            &["analyze", "--layout", "soaos", "--precision", "single"],
            dir.path()
        )),
        2
    );

    idw(&["gen", "--n", "16", "--out", "d.csv"], dir.path());
    let illegal = idw(
        &[
            "run",
            "--data",
            "d.csv",
            "--queries",
            "d.csv",
            "--layout",
            "soaos",
            "--precision",
            "single",
            "--out",
            "p.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&illegal), 2);
    assert!(!dir.path().join("p.csv").exists());
}

#[test]
fn io_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = idw(
        &[
            "run",
            "--data",
            "missing.csv",
            "--queries",
            "missing.csv",
            "--out",
            "p.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 1);
}

#[test]
fn help_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&idw(&["--help"], dir.path())), 0);
    assert_eq!(code(&idw(&["bench", "--help"], dir.path())), 0);
}

#[test]
fn analyze_scorecard() {
    let dir = tempfile::tempdir().unwrap();
    let aos = idw(
        &[
            "analyze",
            "--layout",
            "aos",
            "--precision",
            "single",
            "--components",
            "x",
        ],
        dir.path(),
    );
    assert_eq!(code(&aos), 0);
    let text = stdout(&aos);
    let row = text.lines().nth(1).unwrap();
    assert_eq!(row, "aos,single,x,32,128,3,128,384,0.3333");

    let soa = idw(
        &[
            "analyze",
            "--layout",
            "soa",
            "--precision",
            "single",
            "--components",
            "x",
        ],
        dir.path(),
    );
    assert!(stdout(&soa).lines().nth(1).unwrap().ends_with(",1.0000"));

    let all = idw(&["analyze", "--precision", "single"], dir.path());
    let rows: Vec<String> = stdout(&all).lines().skip(1).map(String::from).collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().any(|r| r == "soaos,single,xyz,32,128,n/a,n/a,n/a,n/a"));
}

#[test]
fn run_matches_sequential_reference() {
    let dir = tempfile::tempdir().unwrap();
    idw(&["gen", "--n", "300", "--seed", "3", "--out", "d.csv"], dir.path());
    idw(&["gen", "--n", "40", "--seed", "4", "--out", "q.csv"], dir.path());
    let run = |strategy: &str, layout: &str, out: &str| {
        let o = idw(
            &[
                "run",
                "--data",
                "d.csv",
                "--queries",
                "q.csv",
                "--strategy",
                strategy,
                "--layout",
                layout,
                "--group-size",
                "64",
                "--tile-size",
                "50",
                "--out",
                out,
            ],
            dir.path(),
        );
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read_to_string(dir.path().join(out)).unwrap()
    };
    let reference = run("seq", "soa", "seq.csv");
    assert!(reference.starts_with("x,y,z_pred\n"));
    assert_eq!(reference.lines().count(), 41);
    // Naive and tiled accumulate in the reference order, so the files match.
    assert_eq!(run("naive", "aos", "naive.csv"), reference);
    assert_eq!(run("tiled", "hybrid", "tiled.csv"), reference);

    let z = |text: &str| -> Vec<f64> {
        text.lines()
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
            .collect()
    };
    let expected = z(&reference);
    for strategy in ["nested-original", "nested-improved"] {
        let got = z(&run(strategy, "aoas", "n.csv"));
        for (a, b) in got.iter().zip(&expected) {
            assert!((a - b).abs() <= 1e-9 * b.abs(), "{strategy}: {a} vs {b}");
        }
    }
}

#[test]
fn thread_override_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    idw(&["gen", "--n", "20", "--out", "d.csv"], dir.path());
    let args = ["run", "--data", "d.csv", "--queries", "d.csv", "--out", "p.csv"];
    let bad = Command::new(env!("CARGO_BIN_EXE_idw"))
        .args(args)
        .env("IDW_THREADS", "zero")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&bad), 2);
    let good = Command::new(env!("CARGO_BIN_EXE_idw"))
        .args(args)
        .env("IDW_THREADS", "3")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&good), 0);
    assert!(String::from_utf8_lossy(&good.stderr).contains("\"parallel_width\":3"));
}

#[test]
fn convert_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let ok = |args: &[&str]| {
        let o = idw(args, dir.path());
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    };
    ok(&[
        "gen", "--n", "500", "--seed", "9", "--out", "a.bin", "--format", "bin", "--layout", "soa",
    ]);
    ok(&[
        "convert", "--in", "a.bin", "--from", "soa", "--to", "aoas", "--out", "b.bin",
    ]);
    ok(&[
        "convert", "--in", "b.bin", "--from", "aoas", "--to", "soa", "--out", "c.bin",
    ]);
    let read = |f: &str| std::fs::read(dir.path().join(f)).unwrap();
    assert_eq!(read("a.bin"), read("c.bin"));
    assert_ne!(read("a.bin"), read("b.bin"));

    ok(&["gen", "--n", "500", "--seed", "9", "--out", "a.csv"]);
    ok(&["convert", "--in", "a.csv", "--to", "hybrid", "--out", "h.bin"]);
    ok(&["convert", "--in", "h.bin", "--to", "aos", "--out", "back.csv"]);
    assert_eq!(read("a.csv"), read("back.csv"));

    let wrong_from = idw(
        &[
            "convert", "--in", "a.bin", "--from", "aos", "--to", "soa", "--out", "x.bin",
        ],
        dir.path(),
    );
    assert_eq!(code(&wrong_from), 2);
    let illegal = idw(
        &[
            "convert",
            "--in",
            "a.csv",
            "--to",
            "soaos",
            "--precision",
            "single",
            "--out",
            "x.bin",
        ],
        dir.path(),
    );
    assert_eq!(code(&illegal), 2);
}

#[test]
fn config_file_merges_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("c.json"),
        r#"{"n": 10, "seed": 5, "out": "from_config.csv"}"#,
    )
    .unwrap();
    let o = idw(&["--config", "c.json", "gen", "--n", "12"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("from_config.csv")).unwrap();
    assert_eq!(text.lines().count(), 13);

    std::fs::write(dir.path().join("bad.json"), r#"{"n": 10, "colour": "red"}"#).unwrap();
    assert_eq!(code(&idw(&["gen", "--config", "bad.json"], dir.path())), 2);
    assert_eq!(code(&idw(&["gen", "--config", "absent.json"], dir.path())), 1);
}

#[test]
fn bench_report_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let bench = |out: &str| {
        let o = idw(
            &[
                "bench",
                "--sizes",
                "300",
                "--layouts",
                "soa,soaos",
                "--strategies",
                "naive,nested-improved",
                "--repeats",
                "2",
                "--warmup",
                "0",
                "--seed",
                "4",
                "--out",
                out,
                "--report",
                "r.md",
            ],
            dir.path(),
        );
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read_to_string(dir.path().join(out)).unwrap()
    };
    let strip = |text: &str| -> Vec<String> {
        text.lines()
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                [&f[..5], &f[8..]].concat().join(",")
            })
            .collect()
    };
    let a = bench("a.csv");
    let b = bench("b.csv");
    assert_eq!(strip(&a), strip(&b));
    // 2 strategies x 2 layouts x 2 precisions plus the baseline row.
    assert_eq!(a.lines().count(), 1 + 9);
    assert!(a
        .lines()
        .any(|l| l.starts_with("soaos,naive,single,300,2,n/a,n/a,n/a,n/a")));
    assert!(a
        .lines()
        .any(|l| l.starts_with("-,seq,double,300,2,") && l.contains(",1,")));
    let md = std::fs::read_to_string(dir.path().join("r.md")).unwrap();
    assert!(md.contains("Layout ordering"));
}
