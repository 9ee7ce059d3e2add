use std::fs;
use std::path::Path;
use std::process::Command;

fn tcomm(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_tcomm"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = tcomm(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn write_events(dir: &Path) -> String {
    let path = dir.join("events.csv");
    let mut text = String::from("src,dst,ts\n");
    for day in 0..6i64 {
        for (a, b) in [
            ("a", "b"),
            ("b", "c"),
            ("c", "a"),
            ("d", "e"),
            ("e", "f"),
            ("f", "d"),
            ("c", "d"),
        ] {
            text.push_str(&format!("{a},{b},{}\n", day * 86_400 + 60));
        }
    }
    text.push_str("broken line\n");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn ingest_check_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_events(dir.path());
    let out = ok(&[
        "ingest-check",
        "--input",
        &input,
        "--delimiter",
        ",",
        "--header",
    ]);
    assert!(out.contains("events=42\n"), "{out}");
    assert!(out.contains("nodes=6\n"));
    assert!(out.contains("malformed=1\n"));
}

#[test]
fn bad_time_fails_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    fs::write(&path, "a b 1\na b later\n").unwrap();
    let out = tcomm(&["ingest-check", "--input", path.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn pipeline_then_render() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_events(dir.path());
    let out = dir.path().join("run");
    let out_s = out.to_str().unwrap();
    ok(&[
        "pipeline",
        "--input",
        &input,
        "--delimiter",
        ",",
        "--header",
        "--window",
        "2d",
        "--stride-fraction",
        "0.5",
        "--workers",
        "2",
        "--out",
        out_s,
    ]);
    for f in [
        "manifest.txt",
        "partitions.csv",
        "counts.csv",
        "matrix_unmi.csv",
        "matrix_inmi.csv",
        "heatmap_unmi.svg",
    ] {
        assert!(out.join(f).exists(), "{f}");
    }
    let manifest = fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("window=172800\n") && manifest.contains("stride=86400\n"));
    let svg = out.join("custom.svg");
    ok(&[
        "render",
        "--input",
        out.join("matrix_inmi.csv").to_str().unwrap(),
        "--out",
        svg.to_str().unwrap(),
    ]);
    assert!(fs::read_to_string(svg).unwrap().starts_with("<svg"));

    let again = dir.path().join("bypass");
    ok(&[
        "pipeline",
        "--partitions",
        out.join("partitions.csv").to_str().unwrap(),
        "--measures",
        "unmi",
        "--out",
        again.to_str().unwrap(),
    ]);
    let body = |p: &Path| {
        fs::read_to_string(p)
            .unwrap()
            .lines()
            .skip(2)
            .map(|l| l.split_once(',').unwrap().1.to_owned())
            .collect::<Vec<_>>()
    };
    assert_eq!(
        body(&out.join("matrix_unmi.csv")),
        body(&again.join("matrix_unmi.csv"))
    );
}

#[test]
fn window_scan_and_synth() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_events(dir.path());
    let scan = dir.path().join("scan");
    let out = ok(&[
        "window-scan",
        "--input",
        &input,
        "--delimiter",
        ",",
        "--header",
        "--window",
        "1d,3d",
        "--null-samples",
        "5",
        "--out",
        scan.to_str().unwrap(),
    ]);
    assert_eq!(out.lines().count(), 2);
    assert!(scan.join("window_scan.csv").exists());

    let synth = dir.path().join("synth");
    ok(&[
        "synth",
        "--pool-size",
        "50",
        "--network-size",
        "30",
        "--iterations",
        "4",
        "--churns",
        "0,0.1",
        "--flips",
        "0.01",
        "--replicates",
        "1",
        "--out",
        synth.to_str().unwrap(),
    ]);
    assert!(synth.join("summary.csv").exists());
    assert!(synth
        .join("phi=0.1_psi=0.01")
        .join("membership_r0.csv")
        .exists());
}

#[test]
fn rejects_bad_arguments() {
    assert!(!tcomm(&["pipeline", "--out", "x"]).status.success());
    assert!(!tcomm(&[
        "render",
        "--input",
        "/nonexistent.csv",
        "--out",
        "/tmp/x.svg"
    ])
    .status
    .success());
}
