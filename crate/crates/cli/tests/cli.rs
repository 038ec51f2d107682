use std::path::Path;
use std::process::{Command, Output};

use coxlab::io::{parse_ball_json, parse_polygon_json, read_csv, LoadedPolygon};
use coxlab::polygon::validate_coxeter;
use coxlab::refgroup::side_reflections;
use serde::Deserialize;
use tempfile::TempDir;

fn coxlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coxlab"))
        .args(args)
        .env_remove("COXLAB_SEED")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn path_arg(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

#[derive(Debug, Deserialize, PartialEq)]
struct ThinLine {
    polygon_id: String,
    n_vertices: usize,
    #[serde(rename = "R")]
    r: f64,
    ratio: f64,
    stderr: f64,
    n_samples: usize,
    seed: u64,
    theorem1_constant: f64,
}

fn thin(args: &[&str]) -> (Output, Vec<ThinLine>) {
    let o = coxlab(&[&["thin"], args].concat());
    let rows = if o.status.success() {
        read_csv(o.stdout.as_slice()).expect("thin CSV")
    } else {
        Vec::new()
    };
    (o, rows)
}

#[test]
fn gen_writes_valid_coxeter_polygons() {
    let dir = TempDir::new().unwrap();
    let o = coxlab(&[
        "gen",
        "triangle",
        "2",
        "3",
        "7",
        "--out",
        path_arg(dir.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("triangle-2-3-7.json")).unwrap();
    let LoadedPolygon::Coxeter(p) = parse_polygon_json(&text).unwrap() else {
        panic!("orders missing from gen output");
    };
    let report = validate_coxeter(p.polygon(), Some(p.orders()));
    assert!(report.passed, "{}", report.summary());
    assert!(text.contains("\"version\""), "no version in {text}");

    let o = coxlab(&["gen", "ideal", "19"]);
    assert_eq!(code(&o), 0);
    let p = parse_polygon_json(&stdout(&o)).unwrap();
    assert_eq!(p.polygon().len(), 19);
    assert!(p.polygon().vertices().iter().all(|v| v.is_ideal()));
}

#[test]
fn gen_rejects_impossible_families() {
    for args in [
        &["gen", "regular", "4", "2"][..],
        &["gen", "triangle", "2", "3", "6"],
        &["gen", "square", "4"],
        &["gen", "ideal", "2"],
    ] {
        let o = coxlab(args);
        assert_eq!(
            code(&o),
            2,
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    let o = coxlab(&["gen", "regular", "4", "2"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Euclidean"));
}

#[test]
fn thin_is_deterministic_and_reports_the_constant() {
    let args = [
        "ideal",
        "19",
        "--seed",
        "11",
        "--samples",
        "5000",
        "--R",
        "0,1,2,6",
    ];
    let (o, rows) = thin(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0].ratio, 0.0, "R = 0 has an empty thin part");
    assert!(
        rows.windows(2).all(|w| w[0].ratio <= w[1].ratio),
        "not monotone in R"
    );
    for r in &rows {
        assert_eq!(
            (r.polygon_id.as_str(), r.n_vertices, r.n_samples, r.seed),
            ("ideal-19", 19, 5000, 11)
        );
        assert!((r.theorem1_constant - 1.0 / (1.0 + 1f64.cosh())).abs() < 1e-15);
        assert!(r.stderr >= 0.0);
    }
    assert_eq!(
        rows.iter().map(|r| r.r).collect::<Vec<_>>(),
        [0.0, 1.0, 2.0, 6.0]
    );

    let (_, again) = thin(&args);
    assert_eq!(rows, again);
    // Worker count does not change the sample stream.
    let (_, one_thread) = thin(&[&args[..], &["--threads", "1"]].concat());
    assert_eq!(rows, one_thread);
    // The seed may also come from the environment.
    let o = Command::new(env!("CARGO_BIN_EXE_coxlab"))
        .args(["thin", "ideal", "19", "--samples", "5000", "--R", "0,1,2,6"])
        .env("COXLAB_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(read_csv::<ThinLine, _>(o.stdout.as_slice()).unwrap(), rows);
}

#[test]
fn thin_output_embeds_version_and_config() {
    let (o, _) = thin(&["regular", "7", "3", "--seed", "3", "--samples", "1000"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some(concat!("# coxlab ", env!("CARGO_PKG_VERSION")))
    );
    let config = lines
        .next()
        .unwrap()
        .strip_prefix("# config: ")
        .expect("config line");
    let config: serde_json::Value = serde_json::from_str(config).unwrap();
    assert_eq!(config["seed"], 3);
    assert_eq!(config["samples"], 1000);
    assert_eq!(config["command"], "thin");
}

#[test]
fn thin_reads_polygon_files() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("p.json");
    assert_eq!(
        code(&coxlab(&[
            "gen",
            "regular",
            "7",
            "3",
            "--out",
            path_arg(&file)
        ])),
        0
    );
    let (o, from_file) = thin(&[path_arg(&file), "--seed", "5", "--samples", "2000"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (_, from_spec) = thin(&["regular", "7", "3", "--seed", "5", "--samples", "2000"]);
    assert_eq!(from_file[0].ratio, from_spec[0].ratio);

    std::fs::write(&file, "{\"vertices\": [[1, 0, 0]]}").unwrap();
    let (o, _) = thin(&[path_arg(&file), "--seed", "5"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn invalid_input_exits_with_2() {
    for args in [
        &["thin", "ideal", "19", "--samples", "2000"][..],
        &["thin", "ideal", "19", "--seed", "1", "--samples", "10"],
        &["thin", "ideal", "19", "--seed", "1", "--R", "-1"],
        &["thin", "ideal", "19", "--seed", "1", "--R", "1,x"],
        &["verify", "bogus", "--seed", "1"],
        &["verify", "kernel"],
        &["surgery", "regular", "6", "2"],
        &[
            "surgery", "regular", "6", "2", "--seed", "1", "--alpha", "0.7",
        ],
        &["tree", "2..1"],
        &["tree", "lots"],
        &["frobnicate"],
        &["thin", "ideal", "19", "--seed", "1", "--threads", "0"],
    ] {
        let o = coxlab(args);
        assert_eq!(
            code(&o),
            2,
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn verify_kernel_passes_quickly() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("kernel.json");
    let start = std::time::Instant::now();
    let o = coxlab(&["verify", "kernel", "--seed", "42", "--out", path_arg(&out)]);
    assert!(start.elapsed().as_secs_f64() < 10.0);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("PASS"));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(doc["report"]["passed"], true);
    assert_eq!(doc["config"]["seed"], 42);
    assert_eq!(doc["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn tree_csv_and_single_tree_json() {
    #[derive(Deserialize)]
    struct Row {
        n: usize,
        radius: usize,
        #[allow(dead_code)]
        min_leaf_depth: usize,
    }
    let o = coxlab(&["tree", "3..=64"]);
    assert_eq!(code(&o), 0);
    let rows: Vec<Row> = read_csv(o.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 62);
    for r in rows {
        assert!(
            r.radius <= (r.n as f64).log2().floor() as usize + 1,
            "n = {}",
            r.n
        );
    }

    let o = coxlab(&["tree", "10", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(
        doc["triangulation"]["triangles"].as_array().unwrap().len(),
        8
    );

    let o = coxlab(&["tree", "6", "--dot"]);
    assert!(stdout(&o).starts_with("graph") || stdout(&o).starts_with("digraph"));
}

#[test]
fn ball_round_trips_through_check() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("ball.json");
    let o = coxlab(&[
        "ball",
        "triangle",
        "2",
        "3",
        "7",
        "--ball-length",
        "5",
        "--out",
        path_arg(&file),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&file).unwrap();
    let ball = parse_ball_json(&text).unwrap();
    let p = coxlab::polygon::CoxeterPolygon::triangle(2, 3, 7).unwrap();
    assert!(
        ball.verify_against(&side_reflections(p.polygon()), 1e-9)
            .unwrap()
            < 1e-9
    );

    let o = coxlab(&[
        "ball",
        "triangle",
        "2",
        "3",
        "7",
        "--check",
        path_arg(&file),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    // The same ball does not belong to another group.
    let o = coxlab(&[
        "ball",
        "triangle",
        "2",
        "4",
        "5",
        "--check",
        path_arg(&file),
    ]);
    assert_ne!(code(&o), 0);
}

#[test]
fn surgery_reports_json() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("nested").join("s.json");
    let o = coxlab(&[
        "surgery",
        "regular",
        "6",
        "2",
        "--seed",
        "1",
        "--samples",
        "2000",
        "--out",
        path_arg(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(doc["surgery"]["report"]["min_edge_ok"], true);
    assert_eq!(doc["config"]["eta"], 0.1);
}
