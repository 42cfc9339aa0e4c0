use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};

use minkorth::format::parse_vec;
use minkorth::Gauge;

const TRIANGLE: &str = r#"{"type":"polytope_h","normals":[[0,-1],[-1,1],[1,1]]}"#;
const CIRCLE: &str = r#"{"type":"ellipsoid","Q":[[1,0],[0,1]],"c":[0,0]}"#;
const SKEW: &str = r#"{"type":"polytope_v","vertices":[[1,0.2],[0.3,1.1],[-0.9,0.6],[-0.7,-0.8],[0.4,-0.6]]}"#;

static FILES: AtomicUsize = AtomicUsize::new(0);

/// Tests run in parallel, so every call gets its own file.
fn gauge_file(name: &str, body: &str) -> PathBuf {
    let n = FILES.fetch_add(1, Ordering::Relaxed);
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("cli-{name}-{n}.json"));
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minkorth")).args(args).output().unwrap()
}

fn with_gauge(name: &str, body: &str, args: &[&str]) -> Output {
    let p = gauge_file(name, body);
    let mut all: Vec<&str> = args.to_vec();
    let path = p.to_str().unwrap().to_string();
    all.push("--gauge");
    all.push(&path);
    run(&all)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn eval_triangle() {
    let o = with_gauge("tri", TRIANGLE, &["eval", "-v", "1,1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "2\n");
}

#[test]
fn right_interval_triangle() {
    let o = with_gauge("tri", TRIANGLE, &["right-interval", "-x", "0,1", "-y", "1,0", "--eps", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "[-1, 1]\n");
}

#[test]
fn negative_components_parse() {
    let o = with_gauge("tri", TRIANGLE, &["eval", "-v", "-1,-1"]);
    assert_eq!(stdout(&o), "1\n");
}

#[test]
fn circle_bisector_csv() {
    let o = with_gauge("circle", CIRCLE, &["bisector", "-x", "1,0", "--samples", "8", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[2..4], ["alpha_lo", "alpha_hi"]);
    let rows: Vec<Vec<f64>> = lines.map(|l| parse_vec(l).unwrap()).collect();
    assert_eq!(rows.len(), 8);
    for r in rows {
        assert_eq!(r[2], r[3]);
    }
}

#[test]
fn bisector_csv_round_trip() {
    let g = Gauge::from_json(SKEW).unwrap();
    let o = with_gauge("skew", SKEW, &["bisector", "-x", "0.4,-0.3", "--samples", "24", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<Vec<f64>> = text.lines().skip(1).map(|l| parse_vec(l).unwrap()).collect();
    assert_eq!(rows.len(), 24);
    let x = [0.4, -0.3];
    for r in rows {
        for p in [&r[4..6], &r[6..8]] {
            // 12 printed digits; the defining equation holds to that precision
            let a = g.eval(&[p[0] + x[0], p[1] + x[1]]).unwrap();
            let b = g.eval(&[p[0] - x[0], p[1] - x[1]]).unwrap();
            assert!((a - b).abs() <= 1e-9 * (1.0 + a), "{p:?}: {a} vs {b}");
        }
    }
}

#[test]
fn section_csv_points_on_sphere() {
    let g = Gauge::from_json(SKEW).unwrap();
    let o = with_gauge("skew", SKEW, &["section", "-x", "1,0.5", "-y", "-0.2,1", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("s,t,point_0,point_1\n"));
    for l in text.lines().skip(1) {
        let r = parse_vec(l).unwrap();
        assert!((g.eval(&r[2..4]).unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn json_output_parses() {
    let o = with_gauge("tri", TRIANGLE, &["bestapprox", "--basis", "1,0", "-y", "0,1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"], serde_json::json!(1.0));
    assert_eq!(v["certificate"], serde_json::json!([0.0, -1.0]));
}

#[test]
fn out_file_matches_stdout() {
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-out.txt");
    let a = with_gauge("circle", CIRCLE, &["section", "-x", "1,0", "-y", "0,1", "--samples", "36"]);
    let o = out.to_str().unwrap();
    let b = with_gauge("circle", CIRCLE, &["section", "-x", "1,0", "-y", "0,1", "--samples", "36", "--out", o]);
    assert_eq!(b.status.code(), Some(0));
    assert_eq!(std::fs::read(&out).unwrap(), a.stdout);
}

#[test]
fn deterministic_output() {
    let cmds: [&[&str]; 4] = [
        &["bisector", "-x", "0.4,-0.3", "--samples", "32", "--format", "csv"],
        &["section", "-x", "1,0.5", "-y", "-0.2,1", "--format", "json"],
        &["coapprox", "--basis", "1,0", "-y", "0.3,1", "-x", "0.1,0"],
        &["reversal-2d", "--samples", "120"],
    ];
    for c in cmds {
        let a = with_gauge("skew", SKEW, c);
        let b = with_gauge("skew", SKEW, c);
        assert_eq!(a.status.code(), Some(0), "{c:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{c:?}");
    }
}

#[test]
fn every_command_runs() {
    let cmds: [&[&str]; 18] = [
        &["info"],
        &["eval", "-v", "1,2"],
        &["polar", "-v", "1,2"],
        &["dd", "-x", "0,1", "-y", "1,0"],
        &["subdiff-support", "-x", "0,1", "-u", "1,0", "--eps", "0.5"],
        &["birkhoff", "-x", "0,1", "-y", "1,0"],
        &["right-interval", "-x", "0,1", "-y", "1,0"],
        &["left-interval", "-x", "1,0", "-y", "0,1"],
        &["isosceles", "-x", "1,0", "-y", "0,-2"],
        &["isosceles-interval", "-x", "1,0", "-y", "0,1"],
        &["bestapprox", "--basis", "1,0", "-y", "0,1"],
        &["coapprox", "--basis", "1,0", "-y", "0,1", "-x", "0,0"],
        &["bisector", "-x", "1,0", "--samples", "4"],
        &["section", "-x", "1,0", "-y", "0,1"],
        &["m-ratio", "-x", "1,0", "-y", "0,1"],
        &["check-smooth"],
        &["check-rotund"],
        &["reversal-2d"],
    ];
    for c in cmds {
        for fmt in ["text", "csv", "json"] {
            let mut args = c.to_vec();
            args.extend(["--format", fmt]);
            let o = with_gauge("tri", TRIANGLE, &args);
            assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
            assert!(!o.stdout.is_empty());
        }
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(with_gauge("tri", TRIANGLE, &["eval"]).status.code(), Some(1));
    // validation
    let o = with_gauge("tri", TRIANGLE, &["eval", "-v", "1,1,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("dimension"));
    assert_eq!(with_gauge("tri", TRIANGLE, &["eval", "-v", "1,abc"]).status.code(), Some(2));
    let bad = with_gauge("bad", r#"{"type":"polytope_h","normals":[[1,0]]}"#, &["eval", "-v", "1,1"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("positively span"));
    assert_eq!(with_gauge("junk", "not json", &["info"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "-v", "1,1", "--gauge", "/nonexistent/g.json"]).status.code(), Some(2));
    assert_eq!(with_gauge("tri", TRIANGLE, &["right-interval", "-x", "0,0", "-y", "1,0"]).status.code(), Some(2));
    // numerical
    assert_eq!(with_gauge("tri", TRIANGLE, &["eval", "-v", "1e308,1e308"]).status.code(), Some(3));
}
