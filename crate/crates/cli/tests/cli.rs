use std::io::Write;
use std::process::{Command, Output, Stdio};

fn ordsep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ordsep")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn normalize_prints_normal_form() {
    let o = ordsep(&["normalize", "--A", "C2", "--B", "C3", "--w", "a b b"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "A1 B2\n");
}

#[test]
fn conjugate_prints_conjugator() {
    let o = ordsep(&["conjugate", "--A", "C2", "--B", "C2", "--u", "a b", "--v", "b a"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "A1\n");
    let o = ordsep(&["conjugate", "--A", "C2", "--B", "C3", "--u", "a b", "--v", "a B2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn separate_then_verify() {
    let args = ["--A", "C2", "--B", "C2", "--u", "a b", "--v", "a b a b a b"];
    let o = ordsep(&[&["separate"], &args[..]].concat());
    assert_eq!(o.status.code(), Some(0));
    let cert = stdout(&o);
    assert!(cert.starts_with("DEGREE 12\nORDERS 6 2\nPROVENANCE p-power\n"));

    let mut child = Command::new(env!("CARGO_BIN_EXE_ordsep"))
        .args([&["verify"], &args[..]].concat())
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(cert.as_bytes()).unwrap();
    let v = child.wait_with_output().unwrap();
    assert_eq!(v.status.code(), Some(0));

    let again = ordsep(&[&["separate"], &args[..]].concat());
    assert_eq!(again.stdout, o.stdout);
}

#[test]
fn verify_rejects_tampered_file() {
    let dir = std::env::temp_dir().join(format!("ordsep-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cert.txt");
    let args = ["--A", "C2", "--B", "C2", "--u", "a b", "--v", "a"];
    let o = ordsep(&[&["separate"], &args[..], &["--out", path.to_str().unwrap()]].concat());
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let tampered = text.replacen("ORDERS ", "ORDERS 9", 1);
    std::fs::write(&path, tampered).unwrap();
    let v = ordsep(&[&["verify"], &args[..], &[path.to_str().unwrap()]].concat());
    assert_eq!(v.status.code(), Some(1));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn refusal_exit_codes() {
    let conj = ordsep(&["separate", "--A", "C2", "--B", "C2", "--u", "a b", "--v", "b a"]);
    assert_eq!(conj.status.code(), Some(2));
    let factor = ordsep(&["separate", "--A", "C5", "--B", "C2", "--u", "A1", "--v", "A2"]);
    assert_eq!(factor.status.code(), Some(3));
    let budget = ordsep(&["separate", "--A", "C2", "--B", "C3", "--u", "a b", "--v", "a B2 a b a b", "--budget", "0"]);
    assert_eq!(budget.status.code(), Some(4));
}

#[test]
fn parse_and_io_errors() {
    assert_eq!(ordsep(&["normalize", "--A", "Q9", "--B", "C2", "--w", "a"]).status.code(), Some(64));
    assert_eq!(ordsep(&["normalize", "--A", "C2", "--B", "C2", "--w", "A7"]).status.code(), Some(64));
    assert_eq!(ordsep(&["bogus"]).status.code(), Some(64));
    let missing = ordsep(&["verify", "--A", "C2", "--B", "C2", "--u", "a", "--v", "b", "/nonexistent/cert"]);
    assert_eq!(missing.status.code(), Some(66));
}

#[test]
fn tower_writes_dot_per_stage() {
    let dir = std::env::temp_dir().join(format!("ordsep-dot-{}", std::process::id()));
    let o = ordsep(&["tower", "--A", "C2", "--B", "C2", "--u", "a b", "--steps", "2", "--dot-dir", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    for n in 0..=2 {
        let dot = std::fs::read_to_string(dir.join(format!("stage-{n}.dot"))).unwrap();
        assert!(dot.starts_with("digraph"));
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn oracle_mode() {
    let o = ordsep(&["oracle", "--A", "C2", "--B", "C2", "--u", "a b", "--v", "a", "--oracle", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PROVENANCE oracle"));
    let none = ordsep(&["oracle", "--A", "C2", "--B", "C2", "--u", "a b", "--v", "b a", "--oracle", "4"]);
    assert_eq!(none.status.code(), Some(1));
}

#[test]
fn root_and_cartesian() {
    let o = ordsep(&["root", "--A", "C2", "--B", "C2", "--w", "a b a b"]);
    assert!(stdout(&o).contains("root A1 B1\nexponent 2"));
    let c = ordsep(&["cartesian", "--A", "C2", "--B", "C2", "--w", "a b a b"]);
    assert_eq!(c.status.code(), Some(0));
    assert!(stdout(&c).contains("abelianized 1"));
    let bad = ordsep(&["cartesian", "--A", "C2", "--B", "C2", "--w", "a b"]);
    assert_eq!(bad.status.code(), Some(65));
}
