use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_distenergy")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const SQUARE: &str = "# unit square\n0 0\n1 0\n0 1\n1 1\n";

#[test]
fn energy_of_unit_square() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "sq.txt", SQUARE);
    let o = run(&["energy", &f, "-d", "2,3", "--bruteforce", "--distinct"]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "n,d,D,E,holder_lower,max_m,t,max_codistance,E_bruteforce,E_star\n4,2,2,80,72,8,4,2,80,24\n4,3,2,576,432,8,4,2,576,0\n"
    );
    let j: serde_json::Value = serde_json::from_str(&stdout(&run(&["energy", &f, "--format", "json"]))).unwrap();
    assert_eq!(j[0]["energy"], "80");
}

#[test]
fn spectrum_and_rich_counts() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "sq.txt", SQUARE);
    assert_eq!(stdout(&run(&["spectrum", &f])), "sqdist,multiplicity\n1,8\n2,4\n");
    assert_eq!(stdout(&run(&["spectrum", &f, "--rich"])), "j,k_j\n1,2\n2,2\n4,2\n8,1\n");
    assert!(stdout(&run(&["spectrum", &f, "--min-distinct", "3"])).contains("3,2,"));
}

#[test]
fn elekes_file_roundtrips_through_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["construct", "elekes", "-m", "2"]);
    assert!(o.status.success());
    let f = write(dir.path(), "el.txt", &stdout(&o));
    let spec = stdout(&run(&["spectrum", &f]));
    let distinct = spec.lines().count() - 1;
    // m² + m·A + B for m = 2, n = 32 (A = 4, B = 8)
    assert!(distinct <= 4 + 8 + 8, "{spec}");
    assert!(spec.lines().skip(1).all(|l| !l.split(',').next().unwrap().contains('/')));
}

#[test]
fn extraction_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "g.txt", &stdout(&run(&["construct", "grid", "-n", "400"])));
    let a = stdout(&run(&["extract", &f, "--variant", "plane-E3", "--seed", "5"]));
    let b = stdout(&run(&["extract", &f, "--variant", "plane-E3", "--seed", "5", "--threads", "1"]));
    assert_eq!(a, b);
    assert!(a.starts_with("# variant=plane-E3"));
}

#[test]
fn expansion_actions() {
    let out = stdout(&run(&["expand", "decompose", "-f", "x^2 y^2"]));
    assert!(out.starts_with("decomposable,outer,inner\ntrue,"));
    assert_eq!(stdout(&run(&["expand", "decompose", "-f", "x y"])), "decomposable,outer,inner\nfalse,,\n");
    assert!(stdout(&run(&["expand", "degeneracy", "-f", "(x - y)^2"])).contains("true"));
    let e = stdout(&run(&["expand", "energy", "-f", "x + y", "-a", "1,2,3", "-b", "1,2,3", "--bruteforce"]));
    // sums of {1,2,3}+{1,2,3} have multiplicities 1,2,3,2,1
    assert_eq!(e, "E_f,D,max_m,E_f_bruteforce\n19,5,3,19\n");
}

#[test]
fn incidences_with_curves_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.txt", SQUARE);
    let c = write(dir.path(), "c.txt", "# curves\nx^2 + y^2 - 1\nx - y\n");
    let out = stdout(&run(&["incidence", &p, &c]));
    assert!(out.starts_with("# points=4 curves=2 incidences=4 k22_free=true"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "sq.txt", SQUARE);
    assert_eq!(run(&["energy", &f, "--bruteforce", "--cap", "2"]).status.code(), Some(3));
    assert_eq!(run(&["energy", "/nonexistent/file"]).status.code(), Some(2));
    let bad = write(dir.path(), "bad.txt", "0 0\n1 x\n");
    assert_eq!(run(&["energy", &bad]).status.code(), Some(2));
    assert_eq!(run(&["expand", "energy", "-f", "x +"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn experiment_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = write(
        dir.path(),
        "d.json",
        r#"{"name":"grid","generator":{"id":"grid"},"measurements":["E2","D","t"],"sweep":{"param":"n","values":[64,16,256]},"seeds":[1,0],"reference":"n^3 log n"}"#,
    );
    let one = run(&["experiment", &d, "--threads", "1"]);
    let four = run(&["experiment", &d, "--threads", "4"]);
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    let text = stdout(&one);
    assert_eq!(text.lines().next().unwrap(), "n,seed,E2,D,t,reference,ratio_E2,status");
    assert_eq!(text.lines().count(), 7);
    let json = stdout(&run(&["experiment", &d, "--format", "json"]));
    assert!(serde_json::from_str::<serde_json::Value>(&json).unwrap()["rows"].as_array().unwrap().len() == 6);

    let capped = write(
        dir.path(),
        "c.json",
        r#"{"name":"c","generator":{"id":"circles"},"measurements":["incidences"],"sweep":{"param":"points","values":[4,64]}}"#,
    );
    let o = run(&["experiment", &capped, "--cap", "100"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("cap exceeded"));

    let unknown =
        write(dir.path(), "u.json", r#"{"name":"u","generator":{"id":"nope"},"measurements":["D"],"sweep":{"param":"n","values":[4]}}"#);
    assert_eq!(run(&["experiment", &unknown]).status.code(), Some(2));
}

#[test]
fn verify_passes_and_reports_cap_errors() {
    let o = run(&["verify"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS")));
    let o = run(&["verify", "--cap", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().any(|l| l.starts_with("ERROR")));
}
