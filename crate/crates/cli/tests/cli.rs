use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn shapekit(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shapekit"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn ok(o: Output) -> String {
    assert!(
        o.status.success(),
        "exit {:?}\nstdout:\n{}\nstderr:\n{}",
        o.status.code(),
        stdout(&o),
        String::from_utf8_lossy(&o.stderr)
    );
    stdout(&o)
}

fn dataset() -> TempDir {
    let dir = TempDir::new().unwrap();
    ok(shapekit(
        &[
            "synth",
            "--out",
            "ds",
            "--per-class",
            "6",
            "--size",
            "128",
            "--shapes",
            "rectangle,triangle,star,cross",
        ],
        dir.path(),
    ));
    dir
}

#[test]
fn extract_train_classify_retrieve() {
    let dir = dataset();
    let p = dir.path();
    let out = ok(shapekit(
        &[
            "extract", "--desc", "gfd", "--input", "ds", "--out", "gfd.tsv",
        ],
        p,
    ));
    assert!(out.contains("wrote 24 GFD descriptors"), "{out}");
    ok(shapekit(
        &["train", "--features", "gfd.tsv", "--model", "forest.txt"],
        p,
    ));
    let out = ok(shapekit(
        &[
            "classify",
            "--model",
            "forest.txt",
            "--image",
            "ds/star-1.png",
        ],
        p,
    ));
    assert_eq!(out.lines().next(), Some("star"));

    let out = ok(shapekit(
        &[
            "retrieve",
            "--query",
            "ds/triangle-4.png",
            "--index",
            "gfd.tsv",
            "--k",
            "3",
        ],
        p,
    ));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("0.000000\ttriangle"), "{out}");
}

#[test]
fn two_stage_round_trip() {
    let dir = dataset();
    let p = dir.path();
    ok(shapekit(
        &[
            "train",
            "--dataset",
            "ds",
            "--two-stage",
            "--shortlist",
            "2",
            "--model",
            "two.txt",
        ],
        p,
    ));
    let out = ok(shapekit(
        &[
            "classify",
            "--model",
            "two.txt",
            "--image",
            "ds/cross-2.png",
        ],
        p,
    ));
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("cross"));
    let shortlist = lines.next().unwrap();
    assert!(
        shortlist.starts_with("shortlist: ") && shortlist.contains("cross"),
        "{out}"
    );

    let bad = shapekit(
        &[
            "classify",
            "--model",
            "two.txt",
            "--shortlist",
            "9",
            "--image",
            "ds/cross-2.png",
        ],
        p,
    );
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn benchmark_writes_text_and_csv() {
    let dir = dataset();
    let p = dir.path();
    let out = ok(shapekit(
        &[
            "benchmark",
            "--dataset",
            "ds",
            "--desc",
            "cbfd",
            "--split",
            "0.5",
            "--seed",
            "3",
            "--report",
            "bench.txt",
        ],
        p,
    ));
    assert!(out.contains("Accuracy"), "{out}");
    assert!(std::fs::read_to_string(p.join("bench.txt"))
        .unwrap()
        .contains("CBFD"));
    let csv = std::fs::read_to_string(p.join("bench.csv")).unwrap();
    assert!(csv.starts_with("section,name,value"), "{csv}");
}

#[test]
fn loads_foreign_grayscale_images() {
    let dir = dataset();
    let p = dir.path();
    // an 8-bit square drawn outside the synthetic renderer
    let img = image::GrayImage::from_fn(128, 128, |x, y| {
        image::Luma([if (40..88).contains(&x) && (30..98).contains(&y) {
            255
        } else {
            0
        }])
    });
    img.save(p.join("query.png")).unwrap();
    ok(shapekit(
        &[
            "train",
            "--dataset",
            "ds",
            "--desc",
            "cbfd",
            "--model",
            "cbfd.txt",
        ],
        p,
    ));
    let out = ok(shapekit(
        &["classify", "--model", "cbfd.txt", "--image", "query.png"],
        p,
    ));
    assert_eq!(out.lines().next(), Some("rectangle"));
}

#[test]
fn error_exit_codes() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    std::fs::create_dir(p.join("empty")).unwrap();
    let o = shapekit(
        &[
            "extract", "--desc", "gfd", "--input", "empty", "--out", "x.tsv",
        ],
        p,
    );
    assert_eq!(o.status.code(), Some(2));
    let o = shapekit(
        &[
            "classify",
            "--model",
            "missing.txt",
            "--image",
            "missing.png",
        ],
        p,
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invariance_exit_code_follows_verdict() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    let pass = shapekit(
        &[
            "invariance",
            "--synthetic",
            "--desc",
            "cbfd",
            "--shapes",
            "3",
            "--size",
            "256",
        ],
        p,
    );
    assert_eq!(pass.status.code(), Some(0), "{}", stdout(&pass));
    assert!(stdout(&pass).contains("CBFD"));
    let fail = shapekit(
        &[
            "invariance",
            "--synthetic",
            "--desc",
            "gfd",
            "--shapes",
            "3",
            "--size",
            "128",
            "--tolerance",
            "0.001",
        ],
        p,
    );
    assert_eq!(fail.status.code(), Some(3), "{}", stdout(&fail));
}
