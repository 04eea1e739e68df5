use std::path::Path;
use std::process::{Command, Output};

fn jacpair(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jacpair"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn jacobian_of_four_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "c4.txt", "4 4\n0 1 1\n0 3 1\n1 2 1\n2 3 1\n");
    let o = jacpair(&["jacobian", &g]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "factors: 4\n");
    let t = write(dir.path(), "tree.txt", "# a path\n3 2\n0 1 1\n1 2 1\n");
    assert_eq!(stdout(&jacpair(&["jacobian", &t])), "factors: 1\n");
    let k4 = write(dir.path(), "k4.txt", "4 6\n0 1 1\n0 2 1\n0 3 1\n1 2 1\n1 3 1\n2 3 1\n");
    assert_eq!(stdout(&jacpair(&["jacobian", &k4])), "factors: 4,4\n");
}

#[test]
fn pairing_on_banana() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "b5.txt", "2 1\n0 1 5\n");
    let o = jacpair(&["pairing", &g, "--d1", "1:1,0:-1", "--d2", "1:1,0:-1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1/5\n");
    let zero = jacpair(&["pairing", &g, "--d1", "0", "--d2", "1:1,0:-1"]);
    assert_eq!(stdout(&zero), "0\n");
    let bad = jacpair(&["pairing", &g, "--d1", "1:1", "--d2", "1:1,0:-1"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn realize_then_classify() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.txt");
    let o = jacpair(&["realize", "2^3:D", "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().last().unwrap().starts_with("# realizes 2^3:D"));
    let c = jacpair(&["classify", out.to_str().unwrap()]);
    assert_eq!(stdout(&c), "2^3:D\n");
}

#[test]
fn realize_to_stdout() {
    let o = jacpair(&["realize", "3^1:res"]);
    assert_eq!(stdout(&o), "2 1\n0 1 3\n# realizes 3^1:res; 3^1:res <- banana(3)\n");
}

#[test]
fn exit_codes() {
    assert_eq!(jacpair(&["realize", "E:2^1"]).status.code(), Some(1));
    let bad = jacpair(&["realize", "2^2:C"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("C requires r >= 3"));
    assert_eq!(jacpair(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(jacpair(&["jacobian", "/nonexistent/graph.txt"]).status.code(), Some(2));
    assert_eq!(jacpair(&["check-absence", "2,8", "--max-trees", "8"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let loopy = write(dir.path(), "loop.txt", "2 1\n1 1 2\n");
    let o = jacpair(&["jacobian", &loopy]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let split = write(dir.path(), "split.txt", "4 2\n0 1 1\n2 3 1\n");
    assert_eq!(jacpair(&["jacobian", &split]).status.code(), Some(1));
}

#[test]
fn check_absence_verdicts() {
    let o = jacpair(&["check-absence", "2,4", "--max-trees", "8"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "ABSENT\n");
    let p = jacpair(&["check-absence", "5", "--max-trees", "8"]);
    let text = stdout(&p);
    assert!(text.starts_with("PRESENT\n5 5\n"), "{text}");
}

#[test]
fn reduce_on_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "c5.txt", "5 5\n0 1 1\n0 4 1\n1 2 1\n2 3 1\n3 4 1\n");
    let o = jacpair(&["reduce", &g, "--divisor", "1:3,0:-3"]);
    assert_eq!(stdout(&o), "0:-1,3:1\n");
}

#[test]
fn verify_q_small() {
    let o = jacpair(&["verify-q", "1000", "--filter", "1mod24", "--emit-certificates"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p\tq\ta\tratio");
    let ps: Vec<&str> = lines[1..lines.len() - 1].iter().map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(
        ps,
        ["73", "97", "193", "241", "313", "337", "409", "433", "457", "577", "601", "673", "769", "937"]
    );
    assert!(lines.last().unwrap().starts_with("checked=14 failures=0 max_q=11 "));
    assert_eq!(stdout(&jacpair(&["verify-q", "2"])), "checked=0 failures=0 max_q=0 max_ratio=0.000000\n");
    // 3 has no prime q = 3 (mod 4) other than itself below 2 sqrt(3).
    assert_eq!(jacpair(&["verify-q", "10"]).status.code(), Some(1));
}

#[test]
fn census_output_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("census.tsv");
    let a = jacpair(&["census", "--max-trees", "12", "-o", file.to_str().unwrap()]);
    assert!(a.status.success());
    let b = jacpair(&["census", "--max-trees", "12", "--jobs", "4"]);
    assert_eq!(std::fs::read_to_string(&file).unwrap(), stdout(&b));
    assert!(stdout(&b).starts_with("trees\tn\tfactors\tclass\tedges\n3\t3\t3\t3^1:nonres\t"));
}
