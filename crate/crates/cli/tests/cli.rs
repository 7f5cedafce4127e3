use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cylfocus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cylfocus"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("array.json");
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const SMALL: &str = r#"{"wavelength_m": 0.05, "radius_lambda": 20, "num_rings": 41}"#;

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines().skip(1);
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let j = header.iter().position(|h| *h == name).unwrap();
    lines
        .map(|l| l.split(',').nth(j).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn axial_sweep_on_reference_array() {
    let o = cylfocus(&["axial-gain", "--component", "z", "--range", "-5:5:201"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 203);
    assert!(text.starts_with("# component=z axis=z normalization=raw wavelength_m=0.05 R=1 L=10 N=251 M=401 C=1597.91563\n"));
    assert_eq!(text.lines().nth(1), Some("offset_lambda,gx,gy,gz"));
    let plateau = 4.0 * PI * 1_597.915_628_642_629;
    for g in column(&text, "gz") {
        assert!((g / plateau - 1.0).abs() < 0.03, "{g}");
    }
}

#[test]
fn continuum_sweep_with_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let o = cylfocus(&[
        "axial-gain",
        "--config",
        &cfg,
        "--range",
        "-15:15:31",
        "--normalization",
        "continuum",
        "--analytic",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(
        text.lines().nth(1),
        Some("offset_lambda,gx,gy,gz,gx_analytic,gz_analytic")
    );
    for (n, a) in column(&text, "gz").iter().zip(column(&text, "gz_analytic")) {
        assert!((n / a - 1.0).abs() < 0.05, "{n} vs {a}");
    }
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("sweep.csv");
    let args = [
        "transverse-gain",
        "--config",
        &cfg,
        "--axis",
        "y",
        "--range",
        "0.5:30:12",
        "--analytic",
    ];
    let a = cylfocus(&args);
    let mut with_file = args.to_vec();
    with_file.extend(["--output", out.to_str().unwrap()]);
    let b = cylfocus(&with_file);
    assert_eq!(b.status.code(), Some(0));
    assert!(b.stdout.is_empty());
    assert_eq!(fs::read(&out).unwrap(), a.stdout);
}

#[test]
fn byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let jobs: [&[&str]; 4] = [
        &["axial-gain", "--range", "-12:12:49", "--analytic"],
        &[
            "field-map",
            "--plane",
            "xz",
            "--u",
            "-2:2:17",
            "--v",
            "-3:3:9",
            "--focus",
            "0:0:1",
        ],
        &[
            "beam-profile",
            "--component",
            "x",
            "--direction",
            "depth",
            "--source",
            "numeric",
            "--range",
            "-1:1:21",
        ],
        &[
            "resolution",
            "--component",
            "x",
            "--direction",
            "width_y",
            "--source",
            "numeric",
            "--extent",
            "1.5",
            "--step",
            "0.02",
        ],
    ];
    for job in jobs {
        let mut first: Option<Vec<u8>> = None;
        for threads in ["1", "4", "8", "4"] {
            let mut args = job.to_vec();
            args.extend(["--config", &cfg, "--threads", threads]);
            let o = cylfocus(&args);
            assert_eq!(o.status.code(), Some(0), "{job:?}: {}", stderr(&o));
            match &first {
                None => first = Some(o.stdout),
                Some(f) => assert_eq!(f, &o.stdout, "{job:?} on {threads} threads"),
            }
        }
    }
}

#[test]
fn validate_is_deterministic_and_reports_status() {
    let mut first = None;
    for threads in ["1", "4", "8"] {
        let o = cylfocus(&["validate", "--criteria", "5,8,9", "--threads", threads]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        match &first {
            None => first = Some(o.stdout),
            Some(f) => assert_eq!(f, &o.stdout),
        }
    }
    let text = String::from_utf8(first.unwrap()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("PASS  5 edge halving"));
    assert!(lines[2].starts_with("PASS  9 "));
    let o = cylfocus(&["validate", "--criteria", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL  2 polarization ratio"));
    assert_eq!(
        cylfocus(&["validate", "--criteria", "11"]).status.code(),
        Some(2)
    );
}

#[test]
fn resolution_report_json() {
    let o = cylfocus(&["resolution", "--component", "z", "--direction", "width_x"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("\"full_width_3db_lambda\": 0.4429"), "{text}");
    assert!(text.contains("\"source\": \"analytic\""));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = cylfocus(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));
    let cases: [(&str, &[&str], &str); 5] = [
        (
            r#"{"radius_lambda": 20, "num_rings": 3}"#,
            &["axial-gain", "--range", "0:1:3"],
            "wavelength_m",
        ),
        (
            r#"{"wavelength_m": 0.05, "frequency_hz": 6e9, "radius_lambda": 20, "num_rings": 3}"#,
            &["axial-gain", "--range", "0:1:3"],
            "mutually exclusive",
        ),
        (
            r#"{"wavelength_m": 0.05, "radius_lambda": 20, "num_rings": 3, "colour": 1}"#,
            &["axial-gain", "--range", "0:1:3"],
            "colour",
        ),
        (
            "{\"wavelength_m\": 0.05,\n \"radius_lambda\": }",
            &["axial-gain", "--range", "0:1:3"],
            "line 2",
        ),
        (SMALL, &["axial-gain", "--range", "1:0:3"], "start < stop"),
    ];
    for (body, args, needle) in cases {
        let cfg = write_config(dir.path(), body);
        let mut a = args.to_vec();
        a.extend(["--config", &cfg]);
        let o = cylfocus(&a);
        assert_eq!(o.status.code(), Some(2), "{body}");
        assert!(stderr(&o).contains(needle), "{}", stderr(&o));
    }
    for args in [
        &["axial-gain", "--range", "0:1"][..],
        &["axial-gain", "--range", "0:1:1"],
        &[
            "beam-profile",
            "--component",
            "y",
            "--direction",
            "depth",
            "--range",
            "0:1:5",
        ],
        &[
            "resolution",
            "--component",
            "z",
            "--direction",
            "depth",
            "--source",
            "quadrature",
        ],
        &[
            "axial-gain",
            "--range",
            "0:1:3",
            "--config",
            "/nonexistent/array.json",
        ],
    ] {
        assert_eq!(cylfocus(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn numeric_failures_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    // the z = 0 ring has an element at (R, 0, 0)
    let o = cylfocus(&["transverse-gain", "--config", &cfg, "--range", "19:21:3"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    // window narrower than the main lobe: no 3-dB crossing
    let o = cylfocus(&[
        "resolution",
        "--config",
        &cfg,
        "--component",
        "z",
        "--direction",
        "depth",
        "--extent",
        "0.1",
        "--step",
        "0.01",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("3-dB"));
}
