use std::path::PathBuf;
use std::process::{Command, Output};

fn ia(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ia"))
        .args(args)
        .env_remove("IA_SEED")
        .output()
        .unwrap()
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn pc_on_blocks_world() {
    let o = ia(&["pc", &fixture("blocksworld.ian")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("(Stack(A,B), Goal) = {b}"), "{}", stdout(&o));
}

#[test]
fn pc_writes_closed_network() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("closed.ian");
    let o = ia(&["pc", &fixture("blocksworld.ian"), "--comp", "pairwise", "--skip", "none", "--queue", "constr", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.contains("4 8 b\n"), "{text}");
}

#[test]
fn solve_exit_codes() {
    assert_eq!(ia(&["solve", &fixture("blocksworld_bad.ian")]).status.code(), Some(1));
    assert_eq!(ia(&["pc", &fixture("blocksworld_bad.ian")]).status.code(), Some(1));
    assert_eq!(ia(&["solve", &fixture("blocksworld.ian"), "--decomp", "si"]).status.code(), Some(0));
}

#[test]
fn solve_emits_verifiable_intervals() {
    let dir = tempfile::tempdir().unwrap();
    let iv = dir.path().join("iv.txt");
    let sc = dir.path().join("scenario.ian");
    let o = ia(&[
        "solve",
        &fixture("blocksworld.ian"),
        "--emit-intervals",
        iv.to_str().unwrap(),
        "--emit-scenario",
        sc.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = ia(&["verify", &fixture("blocksworld.ian"), iv.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
    let v = ia(&["verify", sc.to_str().unwrap(), iv.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0));

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "0 0 1\n1 0 1\n2 0 1\n3 0 1\n4 0 1\n5 0 1\n6 0 1\n7 0 1\n8 0 1\n").unwrap();
    assert_eq!(ia(&["verify", &fixture("blocksworld.ian"), bad.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn quiet_print_puts_only_the_artifact_on_stdout() {
    let o = ia(&["solve", &fixture("blocksworld.ian"), "--quiet", "--print"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 9);
    assert!(text.lines().all(|l| l.split(' ').count() == 3));
    assert!(stdout(&ia(&["solve", &fixture("blocksworld.ian"), "-q"])).is_empty());
}

#[test]
fn node_limit_is_a_timeout() {
    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("s.ian");
    ia(&["gen", "s", "--n", "40", "--p", "1/4", "--seed", "2", "-o", net.to_str().unwrap()]);
    let o = ia(&["solve", net.to_str().unwrap(), "--node-limit", "5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.ian");
    let b = dir.path().join("b.ian");
    for f in [&a, &b] {
        let o = ia(&["gen", "s", "--n", "30", "--p", "1/4", "--seed", "7", "-o", f.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let c = dir.path().join("c.ian");
    let o = Command::new(env!("CARGO_BIN_EXE_ia"))
        .args(["gen", "s", "--n", "30", "--p", "1/4", "-o", c.to_str().unwrap()])
        .env("IA_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());

    let o = ia(&["gen", "b", "--n", "30", "--seed", "1", "-q", "--print"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("n 30\n"));
}

#[test]
fn classify_label() {
    let o = ia(&["classify", "b,bi,m,o,oi,si"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("sa: 2 block(s) {b,m,o} {bi,oi,si}"), "{text}");
    assert!(text.contains("pointizable: no"));

    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("catalog.txt");
    assert_eq!(ia(&["classify", "--dump", dump.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(dump).unwrap().lines().count(), 8192);
    assert_eq!(ia(&["classify", "b,zz"]).status.code(), Some(3));
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("runs.csv");
    let o = ia(&["bench", "--suite", &fixture("sample.suite"), "--out", out.to_str().unwrap(), "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out).unwrap();
    assert!(csv.starts_with("instance_id,model,n,p_num,p_den,seed,config,verdict,time_ms,"));
    assert_eq!(csv.lines().count(), 1 + 8 * 4);
    assert!(stdout(&o).contains("config sa-heur"));
}

#[test]
fn calibrate_small() {
    let o = ia(&["calibrate", "--n", "12", "--p", "1/4", "--count", "2", "--seed", "3", "-q", "--print"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 13);
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(ia(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(ia(&["pc", "--bogus", "x"]).status.code(), Some(3));
    assert_eq!(ia(&["pc", "/nonexistent/file.ian"]).status.code(), Some(3));
    assert_eq!(ia(&["gen", "s", "--n", "10", "--p", "3/2", "-o", "/dev/null"]).status.code(), Some(3));
    assert_eq!(ia(&["pc", &fixture("blocksworld.ian"), "--queue", "random"]).status.code(), Some(3));
}

#[test]
fn help_documents_flags() {
    let expect: &[(&str, &[&str])] = &[
        ("pc", &["--comp", "--skip", "--queue", "--out"]),
        ("solve", &["--decomp", "--var-order", "--val-order", "--freq-table", "--timeout", "--emit-scenario", "--emit-intervals"]),
        ("classify", &["--dump"]),
        ("bench", &["--suite", "--out", "--jobs"]),
        ("calibrate", &["--count", "--p", "--seed"]),
        ("verify", &[]),
    ];
    for (cmd, flags) in expect {
        let o = ia(&[cmd, "--help"]);
        assert_eq!(o.status.code(), Some(0));
        let text = stdout(&o);
        for f in *flags {
            assert!(text.contains(f), "{cmd} --help lacks {f}");
        }
    }
    for model in ["b", "s"] {
        let o = ia(&["gen", model, "--help"]);
        assert_eq!(o.status.code(), Some(0));
        for f in ["--n", "--seed", "--out"] {
            assert!(stdout(&o).contains(f));
        }
    }
    assert!(stdout(&ia(&["gen", "s", "--help"])).contains("--p"));
    assert_eq!(ia(&["--help"]).status.code(), Some(0));
}
