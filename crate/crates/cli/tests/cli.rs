use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corefold")).args(args).output().expect("spawn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn last_line(o: &Output) -> String {
    stdout(o).lines().last().unwrap_or("").to_string()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("corefold-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn core_summaries() {
    let o = run(&["core", "--genus", "2", "--gens", "a c"]);
    assert!(o.status.success());
    assert_eq!(last_line(&o), "v=2 e=2 f=0 chi=0 boundary=[2,2]");
    let o = run(&["core", "--genus", "2", "--gens", "a b A A B c"]);
    assert_eq!(last_line(&o), "v=12 e=14 f=2 chi=0 boundary=[6,6]");
    let o = run(&["core", "--gens", "a,b", "--format", "text"]);
    assert_eq!(stdout(&o), "v=4 e=6 f=1 chi=-1 boundary=[4]\n");
    let o = run(&["core", "--gens", "a1 b1 a1' b1'", "--format", "text"]);
    assert_eq!(stdout(&o), "v=7 e=8 f=1 chi=0 boundary=[4,4]\n");
}

#[test]
fn boolean_queries() {
    let q = |args: &[&str]| {
        let o = run(args);
        assert!(o.status.success(), "{args:?}");
        stdout(&o).trim().to_string()
    };
    assert_eq!(q(&["trivial", "--genus", "2", "a b A B c d C D"]), "true");
    assert_eq!(q(&["trivial", "a"]), "false");
    assert_eq!(q(&["equal", "abABc", "dcD"]), "true");
    assert_eq!(q(&["equal", "ac", "ca"]), "false");
    assert_eq!(q(&["conjugate", "abAABc", "cDCAdc"]), "true");
    assert_eq!(q(&["conjugate", "a", "b"]), "false");
    assert_eq!(q(&["member", "--gens", "a,b", "dcDC"]), "true");
    assert_eq!(q(&["member", "--gens", "a,b", "c"]), "false");
    assert_eq!(q(&["conj-into", "--gens", "ac", "bacB"]), "true");
    assert_eq!(q(&["conj-into", "--gens", "ac", "b"]), "false");
    assert_eq!(q(&["reduce", "abABc"]), "b2 a2 b2'");
    assert_eq!(q(&["reduce", "--genus", "3", "a1 b1 a1' b1' a2 b2 a2'"]), "b3 a3 b3' a3' b2");
}

#[test]
fn exit_codes() {
    let o = run(&["trivial", "a q"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("at 2"));
    assert_eq!(run(&["--genus", "1", "reduce", "a"]).status.code(), Some(2));
    assert_eq!(run(&["core"]).status.code(), Some(2));
    assert_eq!(run(&["member", "--gens", "a,b", "--budget-geodesic", "1", "abAB"]).status.code(), Some(3));
    let bad = scratch("bad.json");
    fs::write(&bad, "{\"genus\": 2, \"vertices\": [0], \"edges\": [{\"id\": 0, \"src\": 0, \"dst\": 5, \"label\": \"a1\"}], \"faces\": []}").unwrap();
    let o = run(&["stats", "--in", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("edges[0].dst"));
}

#[test]
fn files_round_trip() {
    let path = scratch("fig4.json");
    let o = run(&["core", "--gens", "abAB", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "v=7 e=8 f=1 chi=0 boundary=[4,4]\n");
    let p = path.to_str().unwrap();
    assert_eq!(stdout(&run(&["stats", "--in", p])), "v=7 e=8 f=1 chi=0 boundary=[4,4]\n");
    assert_eq!(stdout(&run(&["check-core", "--in", p])), "true\n");
    assert_eq!(stdout(&run(&["conj-into", "--in", p, "dcDC"])), "true\n");
    let dot = stdout(&run(&["export-dot", "--in", p]));
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("->").count(), 8);
    let json = fs::read_to_string(&path).unwrap();
    let again = scratch("fig4b.json");
    fs::write(&again, &json).unwrap();
    let o = run(&["core", "--gens", "abAB"]);
    let text = stdout(&o);
    assert!(text.starts_with(&json));
}

#[test]
fn deterministic_output() {
    for args in [
        vec!["core", "--gens", "a b A A B c,cd"],
        vec!["core", "--gens", "a b A A B c,cd", "--seed", "7"],
        vec!["cover-ball", "--radius", "2"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let x = stdout(&run(&["core", "--gens", "a b A A B c,cd"]));
    let y = stdout(&run(&["core", "--gens", "a b A A B c,cd", "--seed", "11"]));
    assert_eq!(x, y);
}

#[test]
fn cover_ball_and_closure() {
    let o = run(&["cover-ball", "--radius", "1", "--format", "text"]);
    assert!(o.status.success());
    let ball = scratch("ball.json");
    assert!(run(&["cover-ball", "--radius", "2", "--out", ball.to_str().unwrap()]).status.success());
    let cycle = scratch("cycle.json");
    let labels = ["a1", "b1", "a1", "b1", "a2", "b2", "a2", "b2"];
    let forward = [true, true, false, false, true, true, false, false];
    let mut edges = Vec::new();
    for i in 0..8 {
        let (s, t) = if forward[i] { (i, (i + 1) % 8) } else { ((i + 1) % 8, i) };
        edges.push(format!("{{\"id\": {i}, \"src\": {s}, \"dst\": {t}, \"label\": \"{}\"}}", labels[i]));
    }
    let text = format!(
        "{{\"genus\": 2, \"vertices\": [0,1,2,3,4,5,6,7], \"edges\": [{}], \"faces\": []}}",
        edges.join(", ")
    );
    fs::write(&cycle, text).unwrap();
    let o = run(&[
        "closure",
        "--in",
        cycle.to_str().unwrap(),
        "--ambient",
        ball.to_str().unwrap(),
        "--format",
        "text",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "v=8 e=8 f=1 chi=1 boundary=[8]\nsteps=1 completed=true\n");
}
